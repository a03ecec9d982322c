"""End-to-end prediction flow: refine, filter, rank, chain rules, recommend.

The ML probability is authoritative for the top-3; the TF-IDF cosine
ranking is attached for display only. Rule-derived diagnoses ride along
with replayable traces. Reports render to a canonical JSON document whose
sha256 is the report id, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from .errors import SymptomResolutionError, VocabularyMismatchError
from .kb import DiseaseMatrix
from .match import TfidfIndex, cooccurring_symptoms, cosine_rank, jaccard, suggest_symptoms
from .patients import PatientRecord, validate_patient
from .predict import TrainedModel, predict_proba
from .rules import Rule, explain, forward_chain, patient_to_facts

log = logging.getLogger(__name__)

PROMPT_VERSION = 1
RETRIEVAL_TOP_N = 10


@dataclass(frozen=True)
class RecommenderConfig:
    """External chat-completion endpoint; absence of endpoint = fallback mode."""

    endpoint: str | None = None
    api_key_env: str = "RECOMMENDER_API_KEY"
    model: str = "default"
    timeout: float = 10.0

    @classmethod
    def from_env(cls, env=os.environ) -> "RecommenderConfig":
        return cls(endpoint=env.get("RECOMMENDER_ENDPOINT") or None)


@dataclass(frozen=True)
class RefinedSymptoms:
    resolved: tuple[str, ...]
    unresolved: tuple[str, ...]
    cooccurring: tuple[str, ...]


@dataclass(frozen=True)
class PredictionReport:
    patient_id: str
    refined_symptoms: tuple[str, ...]
    unresolved_phrases: tuple[str, ...]
    cooccurring_suggestions: tuple[str, ...]
    candidates: tuple[str, ...]
    candidate_fallback: bool
    ml_top3: tuple[tuple[str, float], ...]
    retrieval_ranking: tuple[tuple[str, float], ...]
    rule_diagnoses: tuple[dict, ...]
    recommendation: dict | None = None

    def to_document(self) -> dict:
        doc = {
            "patient_id": self.patient_id,
            "refined_symptoms": list(self.refined_symptoms),
            "unresolved_phrases": list(self.unresolved_phrases),
            "cooccurring_suggestions": list(self.cooccurring_suggestions),
            "candidates": list(self.candidates),
            "candidate_fallback": self.candidate_fallback,
            "ml_top3": [{"disease": d, "probability": p} for d, p in self.ml_top3],
            "retrieval_ranking": [{"disease": d, "score": s}
                                  for d, s in self.retrieval_ranking],
            "rule_diagnoses": [dict(d) for d in self.rule_diagnoses],
            "recommendation": dict(self.recommendation) if self.recommendation else None,
        }
        doc["report_id"] = _content_id(doc)
        return doc

    @property
    def report_id(self) -> str:
        return self.to_document()["report_id"]

    @classmethod
    def from_document(cls, doc: dict) -> "PredictionReport":
        return cls(
            patient_id=doc["patient_id"],
            refined_symptoms=tuple(doc.get("refined_symptoms", ())),
            unresolved_phrases=tuple(doc.get("unresolved_phrases", ())),
            cooccurring_suggestions=tuple(doc.get("cooccurring_suggestions", ())),
            candidates=tuple(doc.get("candidates", ())),
            candidate_fallback=bool(doc.get("candidate_fallback", False)),
            ml_top3=tuple((e["disease"], float(e["probability"]))
                          for e in doc.get("ml_top3", ())),
            retrieval_ranking=tuple((e["disease"], float(e["score"]))
                                    for e in doc.get("retrieval_ranking", ())),
            rule_diagnoses=tuple(dict(d) for d in doc.get("rule_diagnoses", ())),
            recommendation=doc.get("recommendation"),
        )


def _content_id(doc: dict) -> str:
    payload = {k: v for k, v in doc.items() if k != "report_id"}
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def refine_symptoms(
    patient: PatientRecord,
    matrix: DiseaseMatrix,
    top_n: int = 5,
    confirmed: tuple[str, ...] = (),
) -> RefinedSymptoms:
    """Resolve each phrase to its best vocabulary match.

    Co-occurring symptoms are attached as suggestions; only those the
    caller explicitly confirmed (interactive mode) are merged into the
    resolved set. Batch callers pass no confirmations and the suggestions
    stay advisory.
    """
    vocabulary = matrix.vocabulary
    resolved: dict[str, None] = {}
    unresolved = []
    for phrase in patient.symptoms:
        ranked = suggest_symptoms(phrase, vocabulary, top_n=1)
        if ranked:
            resolved.setdefault(ranked[0][0])
        else:
            unresolved.append(phrase)
    if not resolved:
        raise SymptomResolutionError(
            "no reported symptom matched the vocabulary; please re-enter symptoms")
    suggestions = tuple(
        s for s, _ in cooccurring_symptoms(frozenset(resolved), matrix, top_n=top_n))
    for name in confirmed:
        if name in suggestions:
            resolved.setdefault(name)
    return RefinedSymptoms(tuple(resolved), tuple(unresolved), suggestions)


def candidate_filter(
    refined: frozenset[str] | set[str], matrix: DiseaseMatrix
) -> tuple[tuple[str, ...], bool]:
    """Diseases with symptom-set Jaccard above 0.5; full set when none pass."""
    refined = frozenset(refined)
    kept = [d for d in matrix.diseases
            if jaccard(refined, matrix.symptom_set(d)) > 0.5]
    if kept:
        return tuple(kept), False
    log.info("no disease passed the 0.5 Jaccard filter; falling back to all")
    return tuple(matrix.diseases), True


def _renormalized_ranking(
    model: TrainedModel, features: np.ndarray, candidates: tuple[str, ...]
) -> list[tuple[str, float]]:
    """Model probabilities restricted to candidates, renormalized to sum 1."""
    proba = predict_proba(model, features)
    position = {label: i for i, label in enumerate(model.labels)}
    pairs = [(d, float(proba[position[d]])) for d in candidates if d in position]
    mass = sum(p for _, p in pairs)
    if mass <= 0.0:
        pairs = [(d, 1.0 / len(pairs)) for d, _ in pairs]
    else:
        pairs = [(d, p / mass) for d, p in pairs]
    pairs.sort(key=lambda item: (-item[1], position[item[0]]))
    return pairs


def predict_diseases(
    patient: PatientRecord,
    matrix: DiseaseMatrix,
    model: TrainedModel,
    index: TfidfIndex,
    rules: tuple[Rule, ...] = (),
    top_n: int = 3,
    confirmed: tuple[str, ...] = (),
) -> PredictionReport:
    """Full flow: refine, filter, rank both paths, chain rules, assemble."""
    validate_patient(patient)
    vocab_hash = matrix.vocabulary.hash
    if model.vocab_hash != vocab_hash:
        raise VocabularyMismatchError(
            "model and knowledge base use different vocabularies")
    if index.vocab_hash != vocab_hash:
        raise VocabularyMismatchError(
            "index and knowledge base use different vocabularies")
    refined = refine_symptoms(patient, matrix, confirmed=confirmed)
    candidates, fallback = candidate_filter(frozenset(refined.resolved), matrix)
    features = matrix.vocabulary.vector(refined.resolved)
    ranking = _renormalized_ranking(model, features, candidates)
    retrieval = cosine_rank(index, frozenset(refined.resolved),
                            top_n=RETRIEVAL_TOP_N, candidates=candidates)
    store, _ = patient_to_facts(patient, matrix.vocabulary)
    chained, traces = forward_chain(store, rules)
    diagnoses = []
    for trace in traces:
        ind, pred, value = trace.derived
        diagnoses.append({
            "individual": ind,
            "predicate": pred,
            "value": value,
            "rule_id": trace.rule_id,
            "bindings": {k: v for k, v in trace.bindings.items()},
            "support": [list(fact) for fact in trace.support],
            "explanation": explain(trace.derived, chained, traces),
        })
    return PredictionReport(
        patient_id=patient.id,
        refined_symptoms=refined.resolved,
        unresolved_phrases=refined.unresolved,
        cooccurring_suggestions=refined.cooccurring,
        candidates=candidates,
        candidate_fallback=fallback,
        ml_top3=tuple(ranking[:top_n]),
        retrieval_ranking=tuple(retrieval),
        rule_diagnoses=tuple(diagnoses),
    )


# ---------------------------------------------------------------------------
# recommendation

def _load_template(name: str) -> str:
    return (resources.files("medreason") / "templates" / name).read_text("utf-8")


def build_prompt(report: PredictionReport, history: str = "") -> str:
    template = _load_template("recommendation_prompt.txt")
    top3 = "; ".join(f"{d} ({p:.1%})" for d, p in report.ml_top3) or "none"
    rule_lines = "; ".join(
        f"{d['predicate']}={d['value']}" for d in report.rule_diagnoses) or "none"
    return template.format(
        prompt_version=PROMPT_VERSION,
        patient_id=report.patient_id,
        symptoms=", ".join(report.refined_symptoms) or "none",
        ml_top3=top3,
        rule_diagnoses=rule_lines,
        history=history or "none",
    )


def fallback_recommendation(report: PredictionReport) -> str:
    template = _load_template("fallback_recommendation.txt")
    disease = report.ml_top3[0][0] if report.ml_top3 else "no clear condition"
    if report.rule_diagnoses:
        urgency = ("A rule-based diagnosis was derived from your reported "
                   "symptoms; please seek medical attention promptly.")
    else:
        urgency = ("No rule-based diagnosis was derived; monitor your symptoms "
                   "and consult a clinician if they persist or worsen.")
    return template.format(
        disease=disease.replace("_", " "),
        matched_symptoms=", ".join(s.replace("_", " ")
                                   for s in report.refined_symptoms) or "none",
        urgency=urgency,
    )


def recommend(
    report: PredictionReport,
    config: RecommenderConfig,
    history: str = "",
) -> tuple[str, str]:
    """Return (text, source) where source is "llm" or "fallback".

    Every failure mode (no endpoint, network error, bad response shape)
    downgrades to the deterministic fallback template.
    """
    if not config.endpoint:
        return fallback_recommendation(report), "fallback"
    import httpx

    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(config.api_key_env, "")
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    payload = {
        "model": config.model,
        "messages": [{"role": "user", "content": build_prompt(report, history)}],
    }
    try:
        response = httpx.post(config.endpoint, json=payload, headers=headers,
                              timeout=config.timeout)
        response.raise_for_status()
        text = response.json()["choices"][0]["message"]["content"]
        if not isinstance(text, str) or not text.strip():
            raise ValueError("empty completion")
        return text, "llm"
    except Exception as exc:  # any transport/shape failure downgrades
        log.warning("recommendation endpoint failed (%s); using fallback", exc)
        return fallback_recommendation(report), "fallback"


def attach_recommendation(
    report: PredictionReport, config: RecommenderConfig, history: str = ""
) -> PredictionReport:
    text, source = recommend(report, config, history)
    return replace(report, recommendation={"text": text, "source": source})
