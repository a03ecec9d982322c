"""HTTP service exposing the engine: state loading and the FastAPI app."""

from __future__ import annotations

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .errors import (
    ModelFormatError,
    PatientValidationError,
    SymptomResolutionError,
    VocabularyMismatchError,
)
from .graph import KnowledgeGraph, build_graph
from .kb import DiseaseMatrix, load_disease_matrix
from .match import TfidfIndex, build_tfidf, suggest_symptoms
from .ontometrics import census, compute_metrics, report_to_document
from .patients import patient_from_json
from .pipeline import (
    PredictionReport,
    RecommenderConfig,
    predict_diseases,
    recommend,
)
from .predict import TrainedModel, load_model
from .rules import Rule, parse_rules
from .store import read_artifact, read_manifest

log = logging.getLogger(__name__)

REPORT_CACHE_SIZE = 128


@dataclass(frozen=True)
class EngineState:
    """Everything one serving process needs, immutable once built.

    All components are bound to a single vocabulary hash; reloading swaps
    the whole object atomically.
    """

    matrix: DiseaseMatrix
    graph: KnowledgeGraph
    index: TfidfIndex
    model: TrainedModel
    rules: tuple[Rule, ...] = ()
    recommender: RecommenderConfig = field(default_factory=RecommenderConfig)
    version: str = __version__

    def __post_init__(self):
        vocab_hash = self.matrix.vocabulary.hash
        if self.model.vocab_hash != vocab_hash:
            raise VocabularyMismatchError(
                "model vocabulary does not match the loaded knowledge base")
        if self.index.vocab_hash != vocab_hash:
            raise VocabularyMismatchError(
                "index vocabulary does not match the loaded knowledge base")

    @property
    def vocab_hash(self) -> str:
        return self.matrix.vocabulary.hash

    @classmethod
    def build(
        cls,
        matrix: DiseaseMatrix,
        model: TrainedModel,
        rules: tuple[Rule, ...] = (),
        recommender: RecommenderConfig | None = None,
    ) -> "EngineState":
        return cls(
            matrix=matrix,
            graph=build_graph(matrix),
            index=build_tfidf(matrix),
            model=model,
            rules=tuple(rules),
            recommender=recommender or RecommenderConfig.from_env(),
        )


def load_state_from_artifacts(
    directory: str | Path, recommender: RecommenderConfig | None = None
) -> EngineState:
    """Rebuild a serving state from a manifest-described artifact directory."""
    manifest = read_manifest(directory)
    if "model" not in manifest:
        raise ModelFormatError(
            "artifact directory has no trained model; run `medreason train "
            "--out` and re-save the artifacts")
    matrix = load_disease_matrix(read_artifact(directory, manifest["matrix"]),
                                 strict=False)
    rules = parse_rules(read_artifact(directory, manifest["rules"]))
    model = load_model(read_artifact(directory, manifest["model"]),
                       expect_vocab_hash=matrix.vocabulary.hash)
    return EngineState.build(matrix, model, tuple(rules), recommender)


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "detail": detail})


def create_app(state: EngineState, static_dir: str | Path | None = None) -> FastAPI:
    """Wire the REST endpoints around one immutable EngineState."""
    app = FastAPI(title="medreason", version=state.version)
    reports: OrderedDict[str, PredictionReport] = OrderedDict()

    @app.middleware("http")
    async def add_engine_headers(request: Request, call_next):
        response = await call_next(request)
        response.headers["X-Engine-Version"] = state.version
        response.headers["X-Vocab-Hash"] = state.vocab_hash
        return response

    def remember(report: PredictionReport) -> str:
        report_id = report.report_id
        reports[report_id] = report
        reports.move_to_end(report_id)
        while len(reports) > REPORT_CACHE_SIZE:
            reports.popitem(last=False)
        return report_id

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": state.version,
                "vocab_hash": state.vocab_hash}

    @app.get("/api/diseases")
    def diseases():
        return list(state.matrix.diseases)

    @app.get("/api/symptoms")
    def symptoms(q: str = "", n: int = 5):
        if n < 1:
            return _error(400, "invalid_query", "n must be >= 1")
        ranked = suggest_symptoms(q, state.matrix.vocabulary, top_n=n)
        return [{"symptom": s, "score": score} for s, score in ranked]

    async def read_patient(request: Request):
        try:
            body = await request.json()
        except Exception:
            return None, _error(400, "invalid_json", "request body is not valid JSON")
        if not isinstance(body, dict) or "patient" not in body:
            return None, _error(400, "invalid_patient",
                                "body must be an object with a 'patient' field")
        try:
            return patient_from_json(body["patient"]), None
        except PatientValidationError as exc:
            return None, _error(400, "invalid_patient", str(exc))

    @app.post("/api/predict")
    async def predict(request: Request):
        patient, err = await read_patient(request)
        if err is not None:
            return err
        try:
            report = predict_diseases(
                patient, state.matrix, state.model, state.index, state.rules)
        except SymptomResolutionError as exc:
            return _error(400, "unresolved_symptoms", str(exc))
        remember(report)
        return report.to_document()

    @app.post("/api/infer")
    async def infer(request: Request):
        patient, err = await read_patient(request)
        if err is not None:
            return err
        from .rules import explain, forward_chain, patient_to_facts

        store, unresolved = patient_to_facts(patient, state.matrix.vocabulary)
        chained, traces = forward_chain(store, state.rules)
        return {
            "patient_id": patient.id,
            "unresolved_phrases": unresolved,
            "diagnoses": [{
                "individual": t.derived[0],
                "predicate": t.derived[1],
                "value": t.derived[2],
                "rule_id": t.rule_id,
                "bindings": dict(t.bindings),
                "support": [list(f) for f in t.support],
                "explanation": explain(t.derived, chained, traces),
            } for t in traces],
        }

    @app.post("/api/recommend")
    async def recommend_route(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "invalid_json", "request body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "invalid_request", "body must be an object")
        if "report_id" in body:
            report = reports.get(body["report_id"])
            if report is None:
                return _error(404, "unknown_report",
                              "no cached report with that id; send the report")
        elif "report" in body:
            try:
                report = PredictionReport.from_document(body["report"])
            except (KeyError, TypeError, ValueError) as exc:
                return _error(400, "invalid_report", f"bad report document: {exc}")
        else:
            return _error(400, "invalid_request",
                          "body needs a 'report_id' or a 'report' field")
        text, source = recommend(report, state.recommender)
        return {"text": text, "source": source}

    @app.get("/api/metrics")
    def metrics():
        counts = census(state.graph)
        return {
            "counts": counts.to_document(),
            "metrics": report_to_document(compute_metrics(counts)),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="static")
    return app


def serve(state: EngineState, host: str = "127.0.0.1", port: int = 8000,
          static_dir: str | Path | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(state, static_dir=static_dir), host=host, port=port)
