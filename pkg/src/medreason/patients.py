"""Patient records: validation, JSON round-trip, seeded synthetic cohorts."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, asdict
from typing import TYPE_CHECKING

from .errors import PatientValidationError

if TYPE_CHECKING:
    from .kb import DiseaseMatrix

SEXES = ("male", "female", "other")
BLOOD_GROUPS = ("A+", "A-", "B+", "B-", "AB+", "AB-", "O+", "O-")


@dataclass(frozen=True, eq=True)
class PatientRecord:
    """One inference subject: demographics, reported phrases, lab facts.

    `symptoms` holds free-text phrases as the patient typed them, not
    vocabulary ids; resolution happens downstream. `lab_facts` maps predicate
    names (hasFever, hasTumor_marker_test, ...) straight to values and is
    passed to the rule engine verbatim.
    """

    id: str
    age: int
    sex: str
    blood_group: str = ""
    height: float = 0.0
    weight: float = 0.0
    symptoms: tuple[str, ...] = ()
    history: str = ""
    lab_facts: dict[str, object] = field(default_factory=dict)
    ground_truth: str | None = None


def validate_patient(record: PatientRecord) -> None:
    """Raise PatientValidationError on any contract violation."""
    if not record.id or not isinstance(record.id, str):
        raise PatientValidationError("patient id must be a nonempty string")
    if not isinstance(record.age, int) or isinstance(record.age, bool) or record.age < 0:
        raise PatientValidationError("age must be a nonnegative integer")
    if record.sex not in SEXES:
        raise PatientValidationError(
            f"sex must be one of {', '.join(SEXES)}, got {record.sex!r}")
    for name, value in (("height", record.height), ("weight", record.weight)):
        if not isinstance(value, (int, float)) or isinstance(value, bool) or value < 0:
            raise PatientValidationError(f"{name} must be a nonnegative number")
    if not all(isinstance(s, str) for s in record.symptoms):
        raise PatientValidationError("symptoms must be strings")
    for key, value in record.lab_facts.items():
        if not isinstance(key, str) or not key:
            raise PatientValidationError("lab fact keys must be nonempty strings")
        if not isinstance(value, (bool, int, float, str)):
            raise PatientValidationError(
                f"lab fact {key!r} must be a boolean, number, or string")


def patient_to_json(record: PatientRecord) -> dict:
    doc = asdict(record)
    doc["symptoms"] = list(record.symptoms)
    return doc


def patient_from_json(doc: dict) -> PatientRecord:
    """Build and validate a record from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise PatientValidationError("patient document must be a JSON object")
    known = {"id", "age", "sex", "blood_group", "height", "weight",
             "symptoms", "history", "lab_facts", "ground_truth"}
    extra = set(doc) - known
    if extra:
        raise PatientValidationError(f"unknown patient fields: {sorted(extra)}")
    missing = {"id", "age", "sex"} - set(doc)
    if missing:
        raise PatientValidationError(f"missing patient fields: {sorted(missing)}")
    symptoms = doc.get("symptoms", [])
    if not isinstance(symptoms, (list, tuple)):
        raise PatientValidationError("symptoms must be an array")
    lab_facts = doc.get("lab_facts", {})
    if not isinstance(lab_facts, dict):
        raise PatientValidationError("lab_facts must be an object")
    try:
        record = PatientRecord(
            id=doc["id"],
            age=doc["age"],
            sex=doc["sex"],
            blood_group=doc.get("blood_group", ""),
            height=float(doc.get("height", 0.0)),
            weight=float(doc.get("weight", 0.0)),
            symptoms=tuple(symptoms),
            history=doc.get("history", ""),
            lab_facts=dict(lab_facts),
            ground_truth=doc.get("ground_truth"),
        )
    except (TypeError, ValueError) as exc:
        raise PatientValidationError(str(exc)) from exc
    validate_patient(record)
    return record


def load_patients(text: str) -> list[PatientRecord]:
    """Parse a JSON array (or single object) of patient documents."""
    data = json.loads(text)
    if isinstance(data, dict):
        data = [data]
    return [patient_from_json(doc) for doc in data]


def dump_patients(records: list[PatientRecord]) -> str:
    return json.dumps([patient_to_json(r) for r in records], indent=2)


def generate_synthetic_patients(
    n: int, matrix: "DiseaseMatrix", seed: int = 0
) -> list[PatientRecord]:
    """Draw n patients with a uniform ground-truth disease each.

    Every patient reports 2-5 phrases, each the space-form of a symptom
    column of its ground-truth disease, so downstream resolution can be
    checked against the label. Demographics come from fixed plausible
    ranges (age 1-90, height 100-200 cm, weight 20-120 kg).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    records = []
    for i in range(n):
        d = rng.randrange(len(matrix.diseases))
        disease = matrix.diseases[d]
        row = [matrix.vocabulary.symptoms[j]
               for j in range(len(matrix.vocabulary))
               if matrix.incidence[d, j]]
        k = rng.randint(2, min(5, len(row)))
        chosen = rng.sample(row, k)
        records.append(PatientRecord(
            id=f"synth_{i:04d}",
            age=rng.randint(1, 90),
            sex=rng.choice(list(SEXES)),
            blood_group=rng.choice(list(BLOOD_GROUPS)),
            height=float(rng.randint(100, 200)),
            weight=float(rng.randint(20, 120)),
            symptoms=tuple(name.replace("_", " ") for name in chosen),
            lab_facts={},
            ground_truth=disease,
        ))
    return records
