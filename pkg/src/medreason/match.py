"""Similarity and retrieval: Jaccard matching, co-occurrence, TF-IDF ranking.

Diseases play the role of documents and symptoms the role of terms. All
tie-breaks use vocabulary/disease declaration order so results are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .text import token_set

if TYPE_CHECKING:
    from .kb import DiseaseMatrix, SymptomVocabulary


def jaccard(a, b) -> float:
    """|a n b| / |a u b| for finite sets; 0 when both are empty."""
    a, b = set(a), set(b)
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def suggest_symptoms(query: str, vocabulary: "SymptomVocabulary", top_n: int = 5
                     ) -> list[tuple[str, float]]:
    """Vocabulary symptoms ranked by token-set Jaccard against the query.

    Zero-score symptoms are excluded; ties keep vocabulary order.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    query_tokens = token_set(query)
    if not query_tokens:
        return []
    scored = []
    for i, symptom_tokens in enumerate(vocabulary.token_sets):
        score = jaccard(query_tokens, symptom_tokens)
        if score > 0.0:
            scored.append((-score, i))
    scored.sort()
    return [(vocabulary.symptoms[i], -neg) for neg, i in scored[:top_n]]


def cooccurring_symptoms(selected, matrix: "DiseaseMatrix", top_n: int = 5
                         ) -> list[tuple[str, int]]:
    """Symptoms that co-occur with the selected ones, ranked by disease count.

    Restricts to diseases containing at least one selected symptom, then
    counts in how many of those each non-selected symptom appears.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    selected = set(selected)
    if not selected:
        return []
    unknown = selected - set(matrix.vocabulary.symptoms)
    if unknown:
        raise KeyError(f"unknown symptoms: {sorted(unknown)}")
    selected_cols = [matrix.vocabulary.index(s) for s in selected]
    disease_mask = matrix.incidence[:, selected_cols].any(axis=1)
    counts = matrix.incidence[disease_mask].sum(axis=0)
    scored = []
    for i, name in enumerate(matrix.vocabulary.symptoms):
        if name in selected or counts[i] == 0:
            continue
        scored.append((-int(counts[i]), i))
    scored.sort()
    return [(matrix.vocabulary.symptoms[i], -neg) for neg, i in scored[:top_n]]


@dataclass(frozen=True)
class TfidfIndex:
    """Per-disease TF-IDF vectors over the symptom vocabulary."""

    vocabulary: "SymptomVocabulary"
    diseases: tuple[str, ...]
    idf: np.ndarray              # shape (V,)
    disease_vectors: np.ndarray  # shape (D, V), rows L2-normalized
    norms: np.ndarray            # pre-normalization Euclidean lengths, shape (D,)

    def __post_init__(self):
        for arr in (self.idf, self.disease_vectors, self.norms):
            arr.setflags(write=False)

    @property
    def vocab_hash(self) -> str:
        return self.vocabulary.hash


def build_tfidf(matrix: "DiseaseMatrix") -> TfidfIndex:
    """Binary tf, smoothed idf ln((1+D)/(1+df)) + 1, L2-normalized vectors."""
    incidence = matrix.incidence.astype(np.float64)
    n_diseases = incidence.shape[0]
    df = incidence.sum(axis=0)
    idf = np.log((1.0 + n_diseases) / (1.0 + df)) + 1.0
    weighted = incidence * idf
    norms = np.linalg.norm(weighted, axis=1)
    vectors = weighted / norms[:, None]
    return TfidfIndex(matrix.vocabulary, matrix.diseases, idf, vectors, norms)


def cosine_rank(index: TfidfIndex, query_symptoms, top_n: int = 3,
                candidates=None) -> list[tuple[str, float]]:
    """Diseases ranked by cosine similarity to a binary symptom query.

    Unknown query symptoms are ignored; a query with no known symptoms yields
    an empty result. ``candidates`` optionally restricts the ranked diseases.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    vocabulary = index.vocabulary
    known = {s for s in query_symptoms if s in vocabulary}
    if not known:
        return []
    query = np.zeros(len(vocabulary), dtype=np.float64)
    for name in known:
        query[vocabulary.index(name)] = index.idf[vocabulary.index(name)]
    scores = index.disease_vectors @ (query / np.linalg.norm(query))
    allowed = None if candidates is None else set(candidates)
    ranked = []
    for i, disease in enumerate(index.diseases):
        if allowed is not None and disease not in allowed:
            continue
        ranked.append((-float(scores[i]), i))
    ranked.sort()
    return [(index.diseases[i], -neg) for neg, i in ranked[:top_n]]
