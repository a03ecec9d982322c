"""Disease-symptom knowledge base: vocabulary, incidence matrix, expansion.

The binary incidence matrix (one row per disease, one column per symptom) is
the system's ground knowledge. Column order is defined by the vocabulary and
is the feature order used by every downstream model and index.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import logging
import random
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources

import numpy as np

from .errors import CorpusError, MatrixFormatError
from .match import jaccard
from .text import canonical_name, token_set

log = logging.getLogger(__name__)

# Two symptom names above this token-set similarity are considered synonyms.
SYNONYM_THRESHOLD = 0.75


@dataclass(frozen=True)
class SymptomVocabulary:
    """Ordered canonical symptom names plus the synonym merges that produced them."""

    symptoms: tuple[str, ...]
    synonym_log: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.symptoms)) != len(self.symptoms):
            raise CorpusError("vocabulary contains duplicate symptom names")
        if any(not s for s in self.symptoms):
            raise CorpusError("vocabulary contains an empty symptom name")

    def __len__(self) -> int:
        return len(self.symptoms)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.symptoms)}

    def index(self, name: str) -> int:
        return self._index[name]

    @cached_property
    def token_sets(self) -> tuple[frozenset[str], ...]:
        """Stemmed token set per symptom, precomputed for matching."""
        return tuple(token_set(name.replace("_", " ")) for name in self.symptoms)

    @cached_property
    def hash(self) -> str:
        """Content hash binding models and indexes to this exact column space."""
        digest = hashlib.sha256("\n".join(self.symptoms).encode("utf-8"))
        return digest.hexdigest()

    def vector(self, names) -> np.ndarray:
        """Binary feature vector with the named symptom columns set."""
        v = np.zeros(len(self.symptoms), dtype=np.uint8)
        for name in names:
            v[self.index(name)] = 1
        return v


def dedup_symptoms(raw_names, stopwords=None) -> SymptomVocabulary:
    """Canonicalize names in input order, dropping near-duplicates.

    A name is dropped when its stemmed token set has Jaccard similarity above
    ``SYNONYM_THRESHOLD`` with any already-retained name (first seen wins);
    dropped -> retained pairs are recorded in the synonym log.
    """
    retained: list[str] = []
    retained_tokens: list[frozenset[str]] = []
    synonym_log: dict[str, str] = {}
    seen = set()
    for raw in raw_names:
        name = canonical_name(raw, stopwords)
        if not name:
            log.debug("skipping symptom name with no usable tokens: %r", raw)
            continue
        if name in seen:
            continue
        seen.add(name)
        tokens = token_set(name.replace("_", " "), stopwords)
        keeper = None
        for kept, kept_tokens in zip(retained, retained_tokens):
            if jaccard(tokens, kept_tokens) > SYNONYM_THRESHOLD:
                keeper = kept
                break
        if keeper is None:
            retained.append(name)
            retained_tokens.append(tokens)
        else:
            synonym_log[name] = keeper
    if not retained:
        raise CorpusError("no usable symptom names in corpus")
    return SymptomVocabulary(tuple(retained), synonym_log)


@dataclass(frozen=True)
class DiseaseMatrix:
    """Binary disease-by-symptom incidence table."""

    diseases: tuple[str, ...]
    vocabulary: SymptomVocabulary
    incidence: np.ndarray  # shape (len(diseases), len(vocabulary)), values 0/1

    def __post_init__(self):
        d, v = self.incidence.shape
        if d != len(self.diseases) or v != len(self.vocabulary):
            raise MatrixFormatError(
                f"incidence shape {self.incidence.shape} does not match "
                f"{len(self.diseases)} diseases x {len(self.vocabulary)} symptoms"
            )
        if len(set(self.diseases)) != len(self.diseases):
            raise MatrixFormatError("duplicate disease names")
        if not np.isin(self.incidence, (0, 1)).all():
            raise MatrixFormatError("incidence cells must be 0 or 1")
        if (self.incidence.sum(axis=1) == 0).any():
            empty = self.diseases[int(np.argmax(self.incidence.sum(axis=1) == 0))]
            raise MatrixFormatError(f"disease {empty!r} has no symptoms")
        self.incidence.setflags(write=False)

    @cached_property
    def _disease_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.diseases)}

    def disease_index(self, name: str) -> int:
        return self._disease_index[name]

    def row(self, disease: str) -> np.ndarray:
        return self.incidence[self.disease_index(disease)]

    def symptom_set(self, disease: str) -> frozenset[str]:
        row = self.row(disease)
        return frozenset(self.vocabulary.symptoms[i] for i in np.flatnonzero(row))

    @property
    def shape(self) -> tuple[int, int]:
        return self.incidence.shape


def load_disease_matrix(table: str, strict: bool = True) -> DiseaseMatrix:
    """Parse a Dataset-1 style CSV: `disease,<symptom_1>,...` header, 0/1 cells.

    Errors name the offending cell as (data row, symptom column), both
    1-based. ``strict`` additionally validates that symptom headers are in
    canonical form and pairwise below the synonym threshold; trusted mode
    (``strict=False``) accepts headers as-is.
    """
    reader = csv.reader(io.StringIO(table))
    try:
        header = next(reader)
    except StopIteration:
        raise MatrixFormatError("empty CSV: missing header row") from None
    if len(header) < 2:
        raise MatrixFormatError("header must name a disease column and at least one symptom")
    symptoms = tuple(h.strip() for h in header[1:])
    if strict:
        _validate_headers(symptoms)
    vocabulary = SymptomVocabulary(symptoms)

    diseases: list[str] = []
    rows: list[list[int]] = []
    for r, record in enumerate(reader, start=1):
        if not record or (len(record) == 1 and not record[0].strip()):
            continue
        if len(record) != len(header):
            raise MatrixFormatError(f"row {r} has {len(record)} fields, expected {len(header)}", row=r)
        name = record[0].strip()
        if name in diseases:
            raise MatrixFormatError(f"duplicate disease {name!r} at row {r}", row=r)
        bits = []
        for c, cell in enumerate(record[1:], start=1):
            cell = cell.strip()
            if cell not in ("0", "1"):
                raise MatrixFormatError(
                    f"non-binary cell {cell!r} at ({r}, {c})", row=r, column=c
                )
            bits.append(int(cell))
        if sum(bits) == 0:
            raise MatrixFormatError(f"disease {name!r} at row {r} has no symptoms", row=r)
        diseases.append(name)
        rows.append(bits)
    if not rows:
        raise MatrixFormatError("CSV has a header but no disease rows")
    incidence = np.array(rows, dtype=np.uint8)
    return DiseaseMatrix(tuple(diseases), vocabulary, incidence)


def _validate_headers(symptoms: tuple[str, ...]) -> None:
    token_sets = []
    for name in symptoms:
        if canonical_name(name.replace("_", " ")) != name:
            raise MatrixFormatError(f"symptom header {name!r} is not in canonical form")
        token_sets.append(token_set(name.replace("_", " ")))
    for i, j in itertools.combinations(range(len(symptoms)), 2):
        if jaccard(token_sets[i], token_sets[j]) > SYNONYM_THRESHOLD:
            raise MatrixFormatError(
                f"symptom headers {symptoms[i]!r} and {symptoms[j]!r} exceed the "
                f"synonym threshold; merge them or load with strict=False"
            )


def serialize_matrix(matrix: DiseaseMatrix) -> str:
    """Inverse of load_disease_matrix; round-trips bit-for-bit."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(("disease",) + matrix.vocabulary.symptoms)
    for i, disease in enumerate(matrix.diseases):
        writer.writerow([disease] + [str(int(x)) for x in matrix.incidence[i]])
    return out.getvalue()


@dataclass(frozen=True)
class ExpandedDataset:
    """Training samples built from symptom combinations of each disease."""

    vocabulary: SymptomVocabulary
    features: np.ndarray  # shape (n, len(vocabulary)), values 0/1
    labels: tuple[str, ...]
    sizes: tuple[int, ...]  # combination size each sample was built from

    def __post_init__(self):
        if not (len(self.labels) == len(self.sizes) == self.features.shape[0]):
            raise ValueError("features, labels and sizes must have equal length")
        self.features.setflags(write=False)

    def __len__(self) -> int:
        return self.features.shape[0]

    def samples(self):
        """Iterate (feature vector, disease label) pairs."""
        return zip(self.features, self.labels)

    def subset(self, indices) -> "ExpandedDataset":
        idx = np.asarray(indices, dtype=int)
        return ExpandedDataset(
            self.vocabulary,
            self.features[idx].copy(),
            tuple(self.labels[i] for i in idx),
            tuple(self.sizes[i] for i in idx),
        )


def expand_combinations(
    matrix: DiseaseMatrix,
    sizes: tuple[int, ...] = (2, 3),
    per_disease_cap: int = 21,
    seed: int = 0,
) -> ExpandedDataset:
    """Enumerate size-2/3 symptom subsets per disease, sampling down to the cap.

    When a disease's subset count exceeds ``per_disease_cap`` a seeded uniform
    sample of exactly the cap is drawn; a disease with fewer than two symptoms
    contributes its full row as a single fallback sample.
    """
    if per_disease_cap < 1:
        raise ValueError("per_disease_cap must be >= 1")
    if not sizes or any(s not in (2, 3) for s in sizes):
        raise ValueError("sizes must be a nonempty subset of {2, 3}")
    rng = random.Random(seed)
    width = len(matrix.vocabulary)
    feature_rows: list[np.ndarray] = []
    labels: list[str] = []
    out_sizes: list[int] = []
    for d, disease in enumerate(matrix.diseases):
        columns = [int(i) for i in np.flatnonzero(matrix.incidence[d])]
        if len(columns) < 2:
            log.warning("disease %r has %d symptom(s); emitting full row as fallback",
                        disease, len(columns))
            feature_rows.append(matrix.incidence[d].copy())
            labels.append(disease)
            out_sizes.append(len(columns))
            continue
        combos: list[tuple[int, ...]] = []
        for size in sorted(set(sizes)):
            combos.extend(itertools.combinations(columns, size))
        if len(combos) > per_disease_cap:
            combos = rng.sample(combos, per_disease_cap)
        for combo in combos:
            row = np.zeros(width, dtype=np.uint8)
            row[list(combo)] = 1
            feature_rows.append(row)
            labels.append(disease)
            out_sizes.append(len(combo))
    return ExpandedDataset(
        matrix.vocabulary,
        np.vstack(feature_rows),
        tuple(labels),
        tuple(out_sizes),
    )


def load_corpus(text: str) -> list[tuple[str, str]]:
    """Parse a raw corpus file: one `disease<TAB>symptom phrase` per line."""
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise CorpusError(f"line {lineno}: expected disease<TAB>symptom phrase")
        disease, phrase = line.split("\t", 1)
        disease, phrase = disease.strip(), phrase.strip()
        if not disease or not phrase:
            raise CorpusError(f"line {lineno}: empty disease or symptom field")
        pairs.append((disease, phrase))
    if not pairs:
        raise CorpusError("corpus contains no disease/symptom pairs")
    return pairs


def matrix_from_corpus(pairs, stopwords=None) -> DiseaseMatrix:
    """Build a DiseaseMatrix from raw (disease, symptom phrase) pairs.

    Symptom phrases are canonicalized and deduplicated; phrases that merged
    into a synonym contribute to the retained column.
    """
    vocabulary = dedup_symptoms([phrase for _, phrase in pairs], stopwords)
    diseases: list[str] = []
    for disease, _ in pairs:
        if disease not in diseases:
            diseases.append(disease)
    incidence = np.zeros((len(diseases), len(vocabulary)), dtype=np.uint8)
    disease_index = {d: i for i, d in enumerate(diseases)}
    for disease, phrase in pairs:
        name = canonical_name(phrase, stopwords)
        name = vocabulary.synonym_log.get(name, name)
        if name in vocabulary:
            incidence[disease_index[disease], vocabulary.index(name)] = 1
    return DiseaseMatrix(tuple(diseases), vocabulary, incidence)


def bundled_dataset_text() -> str:
    """Raw CSV text of the bundled 265-disease incidence table."""
    return resources.files("medreason.data").joinpath("dataset1.csv").read_text("utf-8")


def load_bundled_matrix() -> DiseaseMatrix:
    """The bundled 265x590 disease-symptom matrix."""
    return load_disease_matrix(bundled_dataset_text(), strict=False)
