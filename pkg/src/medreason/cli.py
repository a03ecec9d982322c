"""Command-line entry points: build, expand, train, infer, predict, metrics,
synth, serve. Every subcommand honors --seed and --json."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import MedreasonError
from .graph import build_graph
from .kb import (
    expand_combinations,
    load_bundled_matrix,
    load_corpus,
    load_disease_matrix,
    matrix_from_corpus,
    serialize_matrix,
)
from .ontometrics import (
    SchemaCounts,
    census,
    compute_metrics,
    format_report,
    report_to_document,
)
from .patients import dump_patients, generate_synthetic_patients, load_patients
from .pipeline import RecommenderConfig, predict_diseases
from .predict import evaluate, load_model, save_model, split, train_knn, train_lr, train_mnb
from .rules import bundled_rules_text, explain, forward_chain, parse_rules, patient_to_facts
from .service import EngineState, load_state_from_artifacts, serve
from .store import save_engine_artifacts


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_kb(args):
    if getattr(args, "kb", None):
        return load_disease_matrix(_read(args.kb), strict=False)
    return load_bundled_matrix()


def _load_rules(args):
    if getattr(args, "rules", None):
        return parse_rules(_read(args.rules))
    return parse_rules(bundled_rules_text())


def _load_one_patient(path: str):
    records = load_patients(_read(path))
    if len(records) != 1:
        raise MedreasonError(f"{path} must hold exactly one patient document")
    return records[0]


def _emit(args, document: dict | list, text: str) -> None:
    if args.json:
        print(json.dumps(document, indent=2))
    else:
        print(text)


def cmd_build(args) -> int:
    pairs = load_corpus(_read(args.corpus))
    matrix = matrix_from_corpus(pairs)
    rules_text = _read(args.rules) if args.rules else bundled_rules_text()
    parse_rules(rules_text)  # refuse to package an unparseable corpus
    entries = save_engine_artifacts(args.out, serialize_matrix(matrix), rules_text)
    doc = {
        "out": str(args.out),
        "diseases": len(matrix.diseases),
        "symptoms": len(matrix.vocabulary),
        "synonyms_dropped": len(matrix.vocabulary.synonym_log),
        "artifacts": entries,
    }
    _emit(args, doc,
          f"built {doc['diseases']} diseases x {doc['symptoms']} symptoms "
          f"({doc['synonyms_dropped']} synonyms dropped) -> {args.out}")
    return 0


def cmd_expand(args) -> int:
    matrix = _load_kb(args)
    sizes = tuple(int(s) for s in args.sizes.split(","))
    dataset = expand_combinations(matrix, sizes=sizes, per_disease_cap=args.cap,
                                  seed=args.seed)
    header = ["disease", *matrix.vocabulary.symptoms]
    lines = [",".join(header)]
    for features, label in dataset.samples():
        lines.append(",".join([label, *map(str, features.tolist())]))
    output = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
    doc = {"rows": len(dataset.labels), "columns": len(matrix.vocabulary),
           "out": args.out}
    _emit(args, doc, f"expanded to {doc['rows']} rows"
          + (f" -> {args.out}" if args.out else ""))
    if not args.out and not args.json:
        sys.stdout.write(output)
    return 0


def cmd_train(args) -> int:
    matrix = _load_kb(args)
    dataset = expand_combinations(matrix, per_disease_cap=args.cap, seed=args.seed)
    train, test = split(dataset, train_fraction=args.train_fraction, seed=args.seed)
    if args.kind == "mnb":
        model = train_mnb(train, alpha=args.alpha)
    elif args.kind == "knn":
        model = train_knn(train, k=args.k)
    else:
        model = train_lr(train, learning_rate=args.learning_rate,
                         epochs=args.epochs, l2=args.l2, seed=args.seed)
    report = evaluate(model, test)
    if args.out:
        Path(args.out).write_text(save_model(model), encoding="utf-8")
    doc = {
        "kind": model.kind,
        "train_rows": len(train.labels),
        "test_rows": len(test.labels),
        "accuracy": report.accuracy,
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
        "macro_f1": report.macro_f1,
        "out": args.out,
    }
    _emit(args, doc,
          f"{model.kind}: accuracy {report.accuracy:.4f}, "
          f"macro P/R/F1 {report.macro_precision:.4f}/{report.macro_recall:.4f}/"
          f"{report.macro_f1:.4f} on {doc['test_rows']} held-out rows"
          + (f"; model -> {args.out}" if args.out else ""))
    return 0


def cmd_infer(args) -> int:
    matrix = _load_kb(args)
    rules = _load_rules(args)
    patient = _load_one_patient(args.patient)
    store, unresolved = patient_to_facts(patient, matrix.vocabulary)
    chained, traces = forward_chain(store, rules)
    doc = {
        "patient_id": patient.id,
        "unresolved_phrases": unresolved,
        "diagnoses": [{
            "individual": t.derived[0],
            "predicate": t.derived[1],
            "value": t.derived[2],
            "rule_id": t.rule_id,
            "explanation": explain(t.derived, chained, traces),
        } for t in traces],
    }
    if traces:
        text = "\n\n".join(d["explanation"] for d in doc["diagnoses"])
    else:
        text = "no diagnoses derived"
    if unresolved:
        text += "\n\nunresolved phrases: " + ", ".join(unresolved)
    _emit(args, doc, text)
    return 0


def cmd_predict(args) -> int:
    matrix = _load_kb(args)
    rules = _load_rules(args) if args.rules else ()
    model = load_model(_read(args.model),
                       expect_vocab_hash=matrix.vocabulary.hash)
    from .match import build_tfidf

    patient = _load_one_patient(args.patient)
    report = predict_diseases(patient, matrix, model, build_tfidf(matrix),
                              tuple(rules))
    doc = report.to_document()
    lines = [f"top conditions for {patient.id}:"]
    for i, (disease, probability) in enumerate(report.ml_top3, start=1):
        lines.append(f"  {i}. {disease:<40s} {probability:7.1%}")
    for d in report.rule_diagnoses:
        lines.append(f"rule diagnosis: {d['predicate']} = "
                     f"{str(d['value']).lower()} (by {d['rule_id']})")
    _emit(args, doc, "\n".join(lines))
    return 0


def cmd_metrics(args) -> int:
    if args.counts:
        counts = SchemaCounts.from_document(json.loads(_read(args.counts)))
    else:
        counts = census(build_graph(_load_kb(args)))
    metrics = compute_metrics(counts)
    doc = {"counts": counts.to_document(), "metrics": report_to_document(metrics)}
    _emit(args, doc, format_report(metrics))
    return 0


def cmd_synth(args) -> int:
    matrix = _load_kb(args)
    records = generate_synthetic_patients(args.n, matrix, seed=args.seed)
    output = dump_patients(records)
    if args.out:
        Path(args.out).write_text(output + "\n", encoding="utf-8")
        _emit(args, {"patients": len(records), "out": args.out},
              f"wrote {len(records)} patients -> {args.out}")
    else:
        print(output)
    return 0


def cmd_serve(args) -> int:
    if args.artifacts:
        state = load_state_from_artifacts(args.artifacts)
    else:
        matrix = _load_kb(args)
        model = load_model(_read(args.model),
                           expect_vocab_hash=matrix.vocabulary.hash)
        state = EngineState.build(matrix, model, tuple(_load_rules(args)),
                                  RecommenderConfig.from_env())
    serve(state, host=args.host, port=args.port, static_dir=args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medreason",
        description="disease prediction engine: knowledge base, rules, models")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--json", action="store_true",
                        help="emit machine-readable JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common],
                       help="corpus -> knowledge-base artifacts")
    p.add_argument("--corpus", required=True, help="disease<TAB>phrase lines")
    p.add_argument("--rules", help="rule file to package (default: bundled)")
    p.add_argument("--out", required=True, help="artifact directory")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("expand", parents=[common],
                       help="generate the combination dataset")
    p.add_argument("--kb", help="disease matrix CSV (default: bundled)")
    p.add_argument("--sizes", default="2,3", help="subset sizes, comma-separated")
    p.add_argument("--cap", type=int, default=21, help="per-disease sample cap")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(fn=cmd_expand)

    p = sub.add_parser("train", parents=[common], help="fit and evaluate a model")
    p.add_argument("--kb", help="disease matrix CSV (default: bundled)")
    p.add_argument("--kind", choices=("lr", "mnb", "knn"), default="lr")
    p.add_argument("--cap", type=int, default=21)
    p.add_argument("--train-fraction", type=float, default=0.9)
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--alpha", type=float, default=1.0, help="MNB smoothing")
    p.add_argument("-k", type=int, default=5, help="KNN neighbor count")
    p.add_argument("--out", help="write the model document here")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("infer", parents=[common],
                       help="rule-based diagnoses with explanations")
    p.add_argument("--patient", required=True, help="patient JSON file")
    p.add_argument("--rules", help="rule file (default: bundled)")
    p.add_argument("--kb", help="disease matrix CSV (default: bundled)")
    p.set_defaults(fn=cmd_infer)

    p = sub.add_parser("predict", parents=[common],
                       help="top-3 disease prediction for one patient")
    p.add_argument("--patient", required=True)
    p.add_argument("--model", required=True, help="trained model JSON")
    p.add_argument("--kb", help="disease matrix CSV (default: bundled)")
    p.add_argument("--rules", help="optional rule file for diagnoses")
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("metrics", parents=[common], help="schema metrics report")
    p.add_argument("--counts", help="census JSON file")
    p.add_argument("--kb", help="disease matrix CSV to census (default: bundled)")
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("synth", parents=[common],
                       help="generate seeded synthetic patients")
    p.add_argument("-n", type=int, default=200, help="patient count")
    p.add_argument("--kb", help="disease matrix CSV (default: bundled)")
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--artifacts", default=None,
                   help="artifact directory with manifest.json")
    p.add_argument("--kb", help="disease matrix CSV (default: bundled)")
    p.add_argument("--model", help="trained model JSON (required without --artifacts)")
    p.add_argument("--rules", help="rule file (default: bundled)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", help="directory of built UI assets to serve")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "serve" and not args.artifacts and not args.model:
        import os

        artifacts = os.environ.get("ENGINE_ARTIFACT_DIR")
        if artifacts:
            args.artifacts = artifacts
        else:
            print("serve needs --artifacts or --model", file=sys.stderr)
            return 2
    try:
        return args.fn(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 1
    except (MedreasonError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
