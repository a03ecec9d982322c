// Wire types for the engine's REST API. Field names mirror the JSON
// documents exactly; renaming anything here breaks the contract.

export interface HealthInfo {
  status: string;
  version: string;
  vocab_hash: string;
}

export interface SymptomSuggestion {
  symptom: string;
  score: number;
}

export type FactValue = string | number | boolean;

export interface PatientDocument {
  id: string;
  age: number;
  sex: string;
  blood_group?: string;
  height?: number;
  weight?: number;
  symptoms: string[];
  history?: string;
  lab_facts?: Record<string, FactValue>;
}

export interface RankedDisease {
  disease: string;
  probability: number;
}

export interface RetrievalEntry {
  disease: string;
  score: number;
}

/** One derived fact with its full provenance, as /api/infer returns it. */
export interface RuleDiagnosis {
  individual: string;
  predicate: string;
  value: FactValue;
  rule_id: string;
  bindings: Record<string, FactValue>;
  support: [string, string, FactValue][];
  explanation: string;
}

export interface Recommendation {
  text: string;
  source: "llm" | "fallback";
}

export interface ReportDocument {
  patient_id: string;
  refined_symptoms: string[];
  unresolved_phrases: string[];
  cooccurring_suggestions: string[];
  candidates: string[];
  candidate_fallback: boolean;
  ml_top3: RankedDisease[];
  retrieval_ranking: RetrievalEntry[];
  rule_diagnoses: RuleDiagnosis[];
  recommendation: Recommendation | null;
  report_id: string;
}

export interface InferResponse {
  patient_id: string;
  unresolved_phrases: string[];
  diagnoses: RuleDiagnosis[];
}

export interface MetricsResponse {
  counts: Record<string, number>;
  metrics: Record<string, string>;
}

export interface ErrorBody {
  code: string;
  detail: string;
}
