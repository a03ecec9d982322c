"""Generate the bundled knowledge base, rule corpus, and test fixtures.

Run from the repository root:

    python3 scripts/make_bundled_kb.py

Outputs (all deterministic for a fixed SEED):

    src/medreason/data/dataset1.csv     265 x 590 incidence table
    src/medreason/data/core.swrlx       9 curated diagnostic rules
    src/medreason/data/synthetic.swrlx  280 generated screening rules
    rules/core.swrlx                    byte-identical working copies
    rules/synthetic.swrlx
    fixtures/corpus.tsv                 raw disease<TAB>phrase corpus
    fixtures/fig13.json                 census snapshot for the metrics goldens
    fixtures/patient_220.json           cancer-screen walkthrough patient
    fixtures/patient_chikungunya.json   threshold-rule walkthrough patient

The matrix is synthesized under constraints the test suite relies on, so the
script re-derives and checks every one of them before writing a single file:
every symptom name resolves to itself, pairwise name similarity stays below
the synonym-merge threshold, row overlaps are capped so the candidate filter
is exact, and the curated rules fire (and refuse to fire) on the bundled
patients exactly as the fixtures promise.
"""

from __future__ import annotations

import dataclasses
import json
from collections import Counter
from pathlib import Path
import random

import numpy as np

from medreason.kb import (
    DiseaseMatrix,
    SymptomVocabulary,
    expand_combinations,
    load_corpus,
    load_disease_matrix,
    matrix_from_corpus,
    serialize_matrix,
)
from medreason.match import suggest_symptoms
from medreason.ontometrics import SchemaCounts, compute_metrics, format_ratio
from medreason.patients import generate_synthetic_patients, patient_from_json
from medreason.pipeline import candidate_filter, refine_symptoms
from medreason.rules import forward_chain, parse_rules, patient_to_facts, verify_trace
from medreason.text import stem, token_set

ROOT = Path(__file__).resolve().parent.parent
SEED = 20260815

# The five symptoms the cancer screen keys on. They are reserved to the first
# three diseases; no generated name may share a stem with them, otherwise a
# stray vocabulary entry could outrank them during phrase resolution.
SPECIALS = (
    "abnormal_bleeding",
    "unexplained_weightloss",
    "lump",
    "change_bowel_movement",
    "prolonged",
)

RESERVED_STEMS = frozenset(
    {"abnorm", "bleed", "unexplain", "weightloss", "lump", "chang", "bowel",
     "move", "prolong", "symptom", "weight", "loss"}
)

# Symptom name banks: site x manifestation, all two-token names. Distinct
# names share at most one token, which caps their Jaccard similarity at 1/3,
# comfortably below the 0.75 synonym threshold.
SITES = (
    "gastric", "hepatic", "renal", "cardiac", "neural", "dermal", "ocular",
    "nasal", "oral", "lumbar", "cervical", "thoracic", "pelvic", "cranial",
    "spinal", "vascular", "bronchial", "tracheal", "esophageal", "duodenal",
    "colonic", "rectal", "splenic", "pancreatic", "thyroid", "adrenal",
    "sinus", "tonsillar", "retinal", "corneal",
)
MANIFESTATIONS = (
    "pain", "spasm", "lesion", "inflammation", "ulceration", "hemorrhage",
    "distension", "burning", "itching", "numbness", "stiffness", "tenderness",
    "weakness", "swelling", "discoloration", "tremor", "cramping", "soreness",
    "congestion", "eruption", "erosion", "scarring", "dryness", "rigidity",
    "fatigue",
)

DISEASE_SITES = (
    "Gastric", "Hepatic", "Renal", "Cardiac", "Neural", "Dermal", "Ocular",
    "Nasal", "Oral", "Lumbar", "Cervical", "Thoracic", "Pelvic", "Cranial",
    "Spinal", "Vascular", "Bronchial", "Tracheal", "Esophageal", "Duodenal",
)
DISEASE_FORMS = (
    "Fibrosis", "Stenosis", "Neuropathy", "Dystrophy", "Carcinoma",
    "Granuloma", "Sclerosis", "Thrombosis", "Embolism", "Dysplasia",
    "Atresia", "Stricture", "Calcification", "Aneurysm",
)

N_DISEASES = 265
N_SYMPTOMS = 590

# Curated rows for the three diseases the cancer screen discriminates among.
# With the five-symptom query P: |P n LC| = 5 of 6 (J = 5/6), |P n IBD| and
# |P n PUD| = 4 of 6 (J = 4/7); everything else scores 0. All three clear the
# J > 0.5 candidate gate and nothing else can.
TRIO_ROWS = {
    "Liver_Cancer": SPECIALS + ("hepatic_lesion",),
    "Inflammatory_Bowel_Disease": (
        "abnormal_bleeding", "unexplained_weightloss", "change_bowel_movement",
        "prolonged", "colonic_inflammation", "rectal_hemorrhage",
    ),
    "Peptic_Ulcer_Disease": (
        "unexplained_weightloss", "lump", "change_bowel_movement",
        "prolonged", "gastric_ulceration", "duodenal_distension",
    ),
}
TRIO_EXTRAS = (
    "hepatic_lesion", "colonic_inflammation", "rectal_hemorrhage",
    "gastric_ulceration", "duodenal_distension",
)

# Curated diagnostic rules, kept verbatim. Ids are positional (rule_0001
# through rule_0009); rule_0004 repeats rule_0002 because the curated list
# contains the duplicate and dropping it would renumber every later rule.
CORE_RULES = """\
# Curated diagnostic rules. Ids are positional: rule_0001 .. rule_0009.
# rule_0004 intentionally repeats rule_0002; the curated list carries the
# duplicate and the positional ids must stay stable.

Patient(?p1) ^ hasAge(?p1, ?age1) ^ swrlb:greaterThanOrEqual(?age1, "32"^^rdf:PlainLiteral) ^ swrlb:lessThanOrEqual(?age1, "60"^^rdf:PlainLiteral) ^ hasFever(?p1, "38.2"^^rdf:PlainLiteral) ^ swrlb:greaterThan("38.2"^^rdf:PlainLiteral, "38"^^rdf:PlainLiteral) ^ hasJointPainSeverity(?p1, "6"^^rdf:PlainLiteral) ^ hasRash(?p1, true) ^ hasDurationOfSymptoms(?p1, "8"^^rdf:PlainLiteral) ^ isHospitalized(?p1, false) -> ChikungunyaDiagnosis(?p1, true)
Patient(?p) ^ hasabnormal_bleeding(?p, true) ^ haschange_bowel_movement(?p, true) ^ haslump(?p, true) ^ hasprolonged(?p, true) ^ hasunexplained_weightloss(?p, true) -> has_cancer(?p, true)
Patient(?p) ^ hasFever(?p, true) ^ hasear_pain(?p, true) ^ hashearing_loss(?p, true) -> hasEar_Infection(?p, true)
Patient(?p) ^ hasabnormal_bleeding(?p, true) ^ haschange_bowel_movement(?p, true) ^ haslump(?p, true) ^ hasprolonged(?p, true) ^ hasunexplained_weightloss(?p, true) -> has_cancer(?p, true)
Patient(?p) ^ hasFever(?p, true) ^ hasbetter_sitting_worse_lying(?p, true) ^ hassharp_chest_pain(?p, true) -> hasPericarditis(?p, true)
Patient(?p) ^ hasFever(?p, true) ^ hasmultiple_abscess(?p, true) ^ haspneumonia(?p, true) -> hasBurkholderia_pseudomallei_Infection(?p, true)
Patient(?p) ^ hasfrequent_urination(?p, true) ^ hashunger(?p, true) -> has_diabets(?p, true)
Patient(?p) ^ hasFever(?p, true) ^ has_localized_breast_pain_redness(?p, true) -> has_Mastitis(?p, true)
Patient(?p) ^ hasabnormal_bleeding(?p, true) ^ haschange_bowel_movement(?p, true) ^ haslump(?p, true) ^ hasprolonged(?p, true) ^ hasunexplained_weightloss(?p, true) ^ hasTumor_marker_test(?p, true) -> has_cancer(?p, true)
"""

# Census snapshot backing the seven-metric golden report. The counts are a
# fixed fixture, independent of the bundled matrix.
CENSUS_SNAPSHOT = {
    "C": 854, "ATT": 729, "P": 569, "H": 846,
    "I": 214, "C_nonempty": 1, "axioms": 4733,
}
EXPECTED_METRIC_STRINGS = {
    "attribute_richness": "0.853630",
    "inheritance_richness": "0.990632",
    "relationship_richness": "0.402120",
    "axiom_class_ratio": "5.542155",
    "class_relation_ratio": "0.603534",
    "average_population": "0.250585",
    "class_richness": "0.001171",
}

PATIENT_220 = {
    "id": "patient_220",
    "age": 45,
    "sex": "male",
    "blood_group": "O+",
    "height": 156.0,
    "weight": 70.0,
    "symptoms": [
        "abnormal bleeding",
        "unexplained weight loss",
        "lump",
        "change in bowel movement",
        "prolonged symptoms",
    ],
    "history": "",
    "lab_facts": {"hasTumor_marker_test": True},
}

PATIENT_CHIKUNGUNYA = {
    "id": "patient_chikungunya",
    "age": 45,
    "sex": "female",
    "blood_group": "A+",
    "height": 163.0,
    "weight": 58.0,
    "symptoms": [],
    "history": "",
    "lab_facts": {
        "hasFever": 38.2,
        "hasJointPainSeverity": 6,
        "hasRash": True,
        "hasDurationOfSymptoms": 8,
        "isHospitalized": False,
    },
}


def check(condition: bool, message: str) -> None:
    if not condition:
        raise SystemExit(f"generator check failed: {message}")


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


class RowBuilder:
    """Accumulates disease rows while enforcing the pairwise-overlap cap."""

    def __init__(self) -> None:
        self.rows: dict[str, list[str]] = {}
        self.users: dict[str, list[str]] = {}
        self.overlap: Counter[tuple[str, str]] = Counter()

    def add(self, disease: str, name: str, enforce: bool = True) -> None:
        if enforce:
            for other in self.users.get(name, ()):
                check(self.overlap[_pair(disease, other)] < 2,
                      f"overlap cap would break: {disease} / {other} via {name}")
        for other in self.users.get(name, ()):
            self.overlap[_pair(disease, other)] += 1
        self.users.setdefault(name, []).append(disease)
        self.rows.setdefault(disease, []).append(name)


def build_matrix() -> DiseaseMatrix:
    pool = [f"{site}_{manif}" for site in SITES for manif in MANIFESTATIONS]
    check(len(pool) == len(set(pool)) == 750, "pool names must be unique")
    extras = set(TRIO_EXTRAS)
    check(extras <= set(pool), "trio extras must come from the pool banks")
    dealt = [p for p in pool if p not in extras][:580]

    vocab_names = SPECIALS + TRIO_EXTRAS + tuple(dealt)
    check(len(vocab_names) == len(set(vocab_names)) == N_SYMPTOMS,
          "vocabulary must hold 590 distinct names")

    # Stems across the banks must be distinct and must avoid the reserved
    # stems, otherwise resolution tie-breaks get murky.
    bank_stems = [stem(w) for w in SITES + MANIFESTATIONS]
    check(len(set(bank_stems)) == len(bank_stems), "bank stems must be distinct")
    check(not set(bank_stems) & RESERVED_STEMS, "bank stems must avoid reserved stems")

    diseases = list(TRIO_ROWS)
    for site in DISEASE_SITES:
        for form in DISEASE_FORMS:
            if len(diseases) == N_DISEASES:
                break
            diseases.append(f"{site}_{form}")
    check(len(diseases) == len(set(diseases)) == N_DISEASES,
          "disease catalogue must hold 265 distinct names")
    others = diseases[3:]

    builder = RowBuilder()
    for disease, row in TRIO_ROWS.items():
        for name in row:
            builder.add(disease, name, enforce=False)

    # Every non-trio disease owns 2-3 columns nobody else has, which keeps
    # candidate filtering exact; the remaining slots reuse pool columns under
    # a pairwise-overlap cap of 2.
    cursor = 0
    for i, disease in enumerate(others):
        unique = 3 if i < 56 else 2
        for name in dealt[cursor:cursor + unique]:
            builder.add(disease, name)
        cursor += unique
    check(cursor == 580, "unique column deal must consume all 580 names")

    rng = random.Random(SEED)
    fill_pool = list(TRIO_EXTRAS) + dealt
    for i, disease in enumerate(others):
        target = 7 if i % 4 == 3 else 6
        row = builder.rows[disease]
        while len(row) < target:
            candidates = [s for s in fill_pool if s not in row]
            rng.shuffle(candidates)
            candidates.sort(key=lambda s: len(builder.users.get(s, ())))
            chosen = None
            for s in candidates:
                if all(builder.overlap[_pair(disease, o)] < 2
                       for o in builder.users.get(s, ())):
                    chosen = s
                    break
            check(chosen is not None, f"no admissible fill column for {disease}")
            builder.add(disease, chosen)

    vocabulary = SymptomVocabulary(vocab_names)
    incidence = np.zeros((N_DISEASES, N_SYMPTOMS), dtype=np.uint8)
    for r, disease in enumerate(diseases):
        for name in builder.rows[disease]:
            incidence[r, vocabulary.index(name)] = 1
    return DiseaseMatrix(tuple(diseases), vocabulary, incidence)


def synthetic_rules_text(matrix: DiseaseMatrix) -> str:
    lines = [
        "# Generated screening layer (scripts/make_bundled_kb.py): one coarse",
        "# rule per catalogued disease, keyed to its first three symptom",
        "# columns, plus a referral tier over the first fifteen diseases.",
        "# Edit the generator, not this file.",
        "",
    ]
    for d, disease in enumerate(matrix.diseases):
        columns = np.flatnonzero(matrix.incidence[d])[:3]
        body = " ^ ".join(
            f"has{matrix.vocabulary.symptoms[int(c)]}(?p, true)" for c in columns
        )
        lines.append(f"Patient(?p) ^ {body} -> has{disease}(?p, true)")
    lines.append("")
    for disease in matrix.diseases[:15]:
        lines.append(f"has{disease}(?p, true) -> needs_specialist_review(?p, true)")
    return "\n".join(lines) + "\n"


def check_matrix(matrix: DiseaseMatrix, csv_text: str) -> None:
    check(matrix.shape == (N_DISEASES, N_SYMPTOMS), "matrix shape must be 265 x 590")
    sizes = matrix.incidence.sum(axis=1)
    check(int(sizes.min()) >= 6 and int(sizes.max()) <= 7,
          "every disease must list 6-7 symptoms")

    # Strict reload proves canonical headers and sub-threshold name pairs.
    reloaded = load_disease_matrix(csv_text, strict=True)
    check(reloaded.diseases == matrix.diseases, "CSV round-trip changed diseases")
    check(reloaded.vocabulary.symptoms == matrix.vocabulary.symptoms,
          "CSV round-trip changed the vocabulary")
    check(bool((reloaded.incidence == matrix.incidence).all()),
          "CSV round-trip changed incidence bits")

    overlaps = matrix.incidence.astype(np.int32) @ matrix.incidence.astype(np.int32).T
    trio = list(TRIO_ROWS)
    allowed = {
        _pair(trio[0], trio[1]): 4,
        _pair(trio[0], trio[2]): 4,
        _pair(trio[1], trio[2]): 3,
    }
    for i in range(N_DISEASES):
        for j in range(i + 1, N_DISEASES):
            cap = allowed.get(_pair(matrix.diseases[i], matrix.diseases[j]), 2)
            check(int(overlaps[i, j]) <= cap,
                  f"rows {matrix.diseases[i]} / {matrix.diseases[j]} overlap "
                  f"{int(overlaps[i, j])} > {cap}")

    # Every name must resolve to itself, uniquely, from its space form.
    for name in matrix.vocabulary.symptoms:
        got = suggest_symptoms(name.replace("_", " "), matrix.vocabulary, top_n=1)
        check(bool(got) and got[0][0] == name and got[0][1] == 1.0,
              f"symptom {name!r} does not self-resolve")

    specials = set(SPECIALS)
    for name in matrix.vocabulary.symptoms:
        if name in specials:
            continue
        check(not token_set(name.replace("_", " ")) & RESERVED_STEMS,
              f"generated name {name!r} trespasses on reserved stems")

    expanded = expand_combinations(matrix)
    check(len(expanded.labels) == 5565,
          f"expansion produced {len(expanded.labels)} rows, expected 5565")
    check(abs(len(expanded.labels) - 5682) / 5682 <= 0.10,
          "expansion size drifted more than 10% from the 5682 target")


def check_pipeline(matrix: DiseaseMatrix) -> None:
    p220 = patient_from_json(PATIENT_220)
    refined = refine_symptoms(p220, matrix)
    check(refined.resolved == SPECIALS,
          f"patient_220 phrases resolved to {refined.resolved}")
    check(not refined.unresolved, "patient_220 must have no unresolved phrases")
    candidates, fallback = candidate_filter(refined.resolved, matrix)
    check(candidates == tuple(TRIO_ROWS) and fallback is False,
          f"candidate filter returned {candidates} (fallback={fallback})")

    recs = generate_synthetic_patients(60, matrix, seed=7)
    for rec in recs:
        r = refine_symptoms(rec, matrix)
        check(not r.unresolved, f"{rec.id}: unresolved phrases {r.unresolved}")
        row = matrix.symptom_set(rec.ground_truth)
        check(set(r.resolved) <= row,
              f"{rec.id}: resolution left the ground-truth row")
        cands, fb = candidate_filter(r.resolved, matrix)
        check(fb or rec.ground_truth in cands,
              f"{rec.id}: ground truth lost by the candidate filter")


def check_rules(matrix: DiseaseMatrix, core_text: str, synth_text: str) -> None:
    core = parse_rules(core_text)
    check(len(core) == 9, f"core corpus has {len(core)} rules, expected 9")
    check([r.id for r in core] == [f"rule_{i:04d}" for i in range(1, 10)],
          "core rule ids must be positional")
    synth = parse_rules(synth_text)
    check(len(synth) == 280, f"synthetic corpus has {len(synth)} rules, expected 280")
    combined = parse_rules(core_text.rstrip("\n") + "\n" + synth_text)
    check(len(combined) == 289, "combined corpus must hold 289 rules")

    p220 = patient_from_json(PATIENT_220)
    store, unresolved = patient_to_facts(p220, matrix.vocabulary)
    check(unresolved == [], "patient_220 facts must resolve cleanly")
    augmented, traces = forward_chain(store, core)
    check(len(traces) == 1, f"core rules produced {len(traces)} traces, expected 1")
    trace = traces[0]
    check(trace.derived == ("patient_220", "has_cancer", True),
          f"unexpected derivation {trace.derived}")
    check(trace.rule_id == "rule_0002", f"trace cites {trace.rule_id}")
    check(len(trace.support) == 6, f"trace carries {len(trace.support)} supports")
    check(verify_trace(trace, core, augmented), "cancer trace must replay")

    chik = patient_from_json(PATIENT_CHIKUNGUNYA)
    fired = {t.derived for t in forward_chain(patient_to_facts(chik, matrix.vocabulary)[0], core)[1]}
    check(("patient_chikungunya", "ChikungunyaDiagnosis", True) in fired,
          "threshold rule must fire on the bundled parameters")

    too_old = dataclasses.replace(chik, age=61)
    fired = {t.derived for t in forward_chain(patient_to_facts(too_old, matrix.vocabulary)[0], core)[1]}
    check(not any(d[1] == "ChikungunyaDiagnosis" for d in fired),
          "threshold rule must not fire at age 61")

    short_run = dataclasses.replace(
        chik, lab_facts={**chik.lab_facts, "hasDurationOfSymptoms": 7})
    fired = {t.derived for t in forward_chain(patient_to_facts(short_run, matrix.vocabulary)[0], core)[1]}
    check(not any(d[1] == "ChikungunyaDiagnosis" for d in fired),
          "threshold rule must not fire at seven days of symptoms")


def check_census_snapshot() -> None:
    counts = SchemaCounts.from_document(CENSUS_SNAPSHOT)
    report = compute_metrics(counts)
    for field, expected in EXPECTED_METRIC_STRINGS.items():
        got = format_ratio(getattr(report, field))
        check(got == expected, f"{field}: snapshot yields {got}, expected {expected}")


def corpus_text(matrix: DiseaseMatrix) -> str:
    lines = ["# disease<TAB>symptom phrase, one observation per line"]
    for d, disease in enumerate(matrix.diseases):
        for c in np.flatnonzero(matrix.incidence[d]):
            phrase = matrix.vocabulary.symptoms[int(c)].replace("_", " ")
            lines.append(f"{disease}\t{phrase}")
    return "\n".join(lines) + "\n"


def check_corpus(matrix: DiseaseMatrix, text: str) -> None:
    rebuilt = matrix_from_corpus(load_corpus(text))
    check(rebuilt.diseases == matrix.diseases, "corpus round-trip changed diseases")
    check(len(rebuilt.vocabulary) == N_SYMPTOMS,
          "corpus round-trip changed the vocabulary size")
    for disease in matrix.diseases:
        check(rebuilt.symptom_set(disease) == matrix.symptom_set(disease),
              f"corpus round-trip changed the row of {disease}")


def main() -> None:
    matrix = build_matrix()
    csv_text = serialize_matrix(matrix)
    synth_text = synthetic_rules_text(matrix)
    tsv_text = corpus_text(matrix)

    check_matrix(matrix, csv_text)
    check_pipeline(matrix)
    check_rules(matrix, CORE_RULES, synth_text)
    check_census_snapshot()
    check_corpus(matrix, tsv_text)

    data_dir = ROOT / "src" / "medreason" / "data"
    rules_dir = ROOT / "rules"
    fixtures_dir = ROOT / "fixtures"
    rules_dir.mkdir(exist_ok=True)
    fixtures_dir.mkdir(exist_ok=True)

    outputs = {
        data_dir / "dataset1.csv": csv_text,
        data_dir / "core.swrlx": CORE_RULES,
        data_dir / "synthetic.swrlx": synth_text,
        rules_dir / "core.swrlx": CORE_RULES,
        rules_dir / "synthetic.swrlx": synth_text,
        fixtures_dir / "corpus.tsv": tsv_text,
        fixtures_dir / "fig13.json": json.dumps(CENSUS_SNAPSHOT, indent=2) + "\n",
        fixtures_dir / "patient_220.json": json.dumps(PATIENT_220, indent=2) + "\n",
        fixtures_dir / "patient_chikungunya.json":
            json.dumps(PATIENT_CHIKUNGUNYA, indent=2) + "\n",
    }
    for path, content in outputs.items():
        path.write_text(content, encoding="utf-8")
        print(f"wrote {path.relative_to(ROOT)} ({len(content.encode('utf-8'))} bytes)")
    print("all generator checks passed")


if __name__ == "__main__":
    main()
