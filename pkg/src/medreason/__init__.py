"""Disease prediction engine: knowledge base, rule inference, classifiers.

The package layers, bottom up: text normalization (`text`), the
disease-symptom knowledge base and its graph view (`kb`, `graph`),
similarity and retrieval (`match`), the Horn-rule reasoner (`rules`),
classifiers (`predict`), schema metrics (`ontometrics`), the end-to-end
flow (`pipeline`), and the HTTP/CLI surface (`service`, `cli`).
"""

__version__ = "0.1.0"

from .errors import (
    BuiltinError,
    CorpusError,
    ExplanationError,
    MatrixFormatError,
    MedreasonError,
    ModelFormatError,
    PatientValidationError,
    RuleSafetyError,
    RuleSyntaxError,
    SymptomResolutionError,
    VocabularyMismatchError,
)
from .graph import KnowledgeGraph, build_graph
from .kb import (
    DiseaseMatrix,
    ExpandedDataset,
    SymptomVocabulary,
    dedup_symptoms,
    expand_combinations,
    load_bundled_matrix,
    load_corpus,
    load_disease_matrix,
    matrix_from_corpus,
    serialize_matrix,
)
from .match import (
    TfidfIndex,
    build_tfidf,
    cooccurring_symptoms,
    cosine_rank,
    jaccard,
    suggest_symptoms,
)
from .ontometrics import MetricsReport, SchemaCounts, census, compute_metrics
from .patients import PatientRecord, generate_synthetic_patients, patient_from_json
from .pipeline import (
    PredictionReport,
    RecommenderConfig,
    candidate_filter,
    predict_diseases,
    recommend,
    refine_symptoms,
)
from .predict import (
    EvalReport,
    TrainedModel,
    evaluate,
    knn_predict,
    load_model,
    predict_topk,
    save_model,
    split,
    train_knn,
    train_lr,
    train_mnb,
)
from .rules import (
    Atom,
    FactStore,
    InferenceTrace,
    Rule,
    Var,
    evaluate_builtin,
    explain,
    forward_chain,
    parse_rules,
    patient_to_facts,
)
from .text import preprocess_text, stem

__all__ = [name for name in dir() if not name.startswith("_")]
