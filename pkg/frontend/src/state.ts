import { EngineClient, EngineError, fetchRecommendation } from "./api.js";
import type {
  FactValue,
  PatientDocument,
  Recommendation,
  ReportDocument,
  RuleDiagnosis,
  SymptomSuggestion,
} from "./types.js";

export interface PatientForm {
  id: string;
  age: number;
  sex: string;
  history: string;
  symptoms: string[];
  labFacts: Record<string, FactValue>;
}

export interface AppState {
  form: PatientForm;
  suggestions: SymptomSuggestion[];
  report: ReportDocument | null;
  diagnoses: RuleDiagnosis[];
  recommendation: Recommendation | null;
  error: string | null;
  busy: boolean;
}

export function initialState(): AppState {
  return {
    form: {
      id: "patient_web",
      age: 40,
      sex: "female",
      history: "",
      symptoms: [],
      labFacts: {},
    },
    suggestions: [],
    report: null,
    diagnoses: [],
    recommendation: null,
    error: null,
    busy: false,
  };
}

/** Add the symptom if absent, remove it if present. Order of first selection is kept. */
export function toggleSymptom(form: PatientForm, symptom: string): PatientForm {
  const symptoms = form.symptoms.includes(symptom)
    ? form.symptoms.filter((s) => s !== symptom)
    : [...form.symptoms, symptom];
  return { ...form, symptoms };
}

export function setLabFact(
  form: PatientForm,
  name: string,
  value: FactValue,
): PatientForm {
  return { ...form, labFacts: { ...form.labFacts, [name]: value } };
}

export function clearLabFact(form: PatientForm, name: string): PatientForm {
  const labFacts = { ...form.labFacts };
  delete labFacts[name];
  return { ...form, labFacts };
}

export function toPatientDocument(form: PatientForm): PatientDocument {
  const doc: PatientDocument = {
    id: form.id,
    age: form.age,
    sex: form.sex,
    symptoms: [...form.symptoms],
  };
  if (form.history) doc.history = form.history;
  if (Object.keys(form.labFacts).length) doc.lab_facts = { ...form.labFacts };
  return doc;
}

export async function updateSuggestions(
  client: EngineClient,
  state: AppState,
  query: string,
): Promise<AppState> {
  if (!query.trim()) {
    return { ...state, suggestions: [] };
  }
  try {
    const suggestions = await client.suggestSymptoms(query);
    return { ...state, suggestions };
  } catch (err) {
    return { ...state, suggestions: [], error: describeError(err) };
  }
}

/**
 * One full engine round trip: prediction report, rule inference, then a
 * recommendation for the report. Any failure lands in state.error and
 * previously shown results are cleared so the page never mixes two patients.
 */
export async function runAssessment(
  client: EngineClient,
  state: AppState,
): Promise<AppState> {
  const patient = toPatientDocument(state.form);
  try {
    const report = await client.predict(patient);
    const inference = await client.infer(patient);
    const recommendation = await fetchRecommendation(client, report);
    return {
      ...state,
      report,
      diagnoses: inference.diagnoses,
      recommendation,
      error: null,
      busy: false,
    };
  } catch (err) {
    return {
      ...state,
      report: null,
      diagnoses: [],
      recommendation: null,
      error: describeError(err),
      busy: false,
    };
  }
}

export function describeError(err: unknown): string {
  if (err instanceof EngineError) {
    return `${err.code}: ${err.message}`;
  }
  return String(err);
}
