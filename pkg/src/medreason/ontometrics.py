"""Schema metrics over a knowledge-graph census.

All seven ratios are computed with exact rational arithmetic and only
rounded (six decimals, half-even) at display time.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

from .graph import KnowledgeGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchemaCounts:
    """Census inputs: category/property/individual/axiom counts.

    C excludes the top node. P is the declared object-property count and H
    the direct subclass-edge count; the metric formulas assume exactly
    these readings.
    """

    C: int
    ATT: int
    P: int
    H: int
    I: int
    C_nonempty: int
    axioms: int
    per_category_subclass_counts: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("C", "ATT", "P", "H", "I", "C_nonempty", "axioms"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.C_nonempty > self.C:
            raise ValueError("C_nonempty cannot exceed C")
        if self.per_category_subclass_counts:
            total = sum(self.per_category_subclass_counts.values())
            if total != self.H:
                raise ValueError(
                    f"per-category subclass counts sum to {total}, H is {self.H}")

    @classmethod
    def from_document(cls, doc: dict) -> "SchemaCounts":
        known = {"C", "ATT", "P", "H", "I", "C_nonempty", "axioms"}
        missing = known - set(doc)
        if missing:
            raise ValueError(f"census document missing fields: {sorted(missing)}")
        return cls(**{k: int(doc[k]) for k in known})

    def to_document(self) -> dict:
        return {k: getattr(self, k)
                for k in ("C", "ATT", "P", "H", "I", "C_nonempty", "axioms")}


def census(graph: KnowledgeGraph) -> SchemaCounts:
    """Count the graph: declarations plus logical assertions.

    Axioms tally every declaration (categories below the top, properties,
    individuals) and every logical assertion (subclass edges, object/data
    assertions, individual typings).
    """
    categories = [c for c in graph.parents if c != graph.top]
    edges = graph.subclass_edges()
    decls = (len(categories) + len(graph.object_properties)
             + len(graph.data_properties) + len(graph.annotation_properties)
             + len(graph.individuals))
    logical = (len(edges) + len(graph.object_assertions)
               + len(graph.data_assertions) + len(graph.individuals))
    log.debug("census: %d declarations, %d logical assertions", decls, logical)
    return SchemaCounts(
        C=len(categories),
        ATT=len(graph.data_properties),
        P=len(graph.object_properties),
        H=len(edges),
        I=len(graph.individuals),
        C_nonempty=len(graph.populated_categories()),
        axioms=decls + logical,
        per_category_subclass_counts=graph.children_count(),
    )


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ZeroDivisionError(message)


def attribute_richness(counts: SchemaCounts) -> Fraction:
    """Attributes per category: ATT / C."""
    _require(counts.C > 0, "attribute richness needs C > 0")
    return Fraction(counts.ATT, counts.C)


def inheritance_richness(counts: SchemaCounts) -> Fraction:
    """Subclass edges per category: H / C."""
    _require(counts.C > 0, "inheritance richness needs C > 0")
    return Fraction(counts.H, counts.C)


def relationship_richness(counts: SchemaCounts) -> Fraction:
    """Share of non-inheritance relations: P / (H + P)."""
    _require(counts.H + counts.P > 0, "relationship richness needs H + P > 0")
    return Fraction(counts.P, counts.H + counts.P)


def axiom_class_ratio(counts: SchemaCounts) -> Fraction:
    """Axioms per category: axioms / C."""
    _require(counts.C > 0, "axiom/class ratio needs C > 0")
    return Fraction(counts.axioms, counts.C)


def class_relation_ratio(counts: SchemaCounts) -> Fraction:
    """Categories per relation: C / (H + P)."""
    _require(counts.H + counts.P > 0, "class/relation ratio needs H + P > 0")
    return Fraction(counts.C, counts.H + counts.P)


def average_population(counts: SchemaCounts) -> Fraction:
    """Individuals per category: I / C."""
    _require(counts.C > 0, "average population needs C > 0")
    return Fraction(counts.I, counts.C)


def class_richness(counts: SchemaCounts) -> Fraction:
    """Share of populated categories: C_nonempty / C."""
    _require(counts.C > 0, "class richness needs C > 0")
    return Fraction(counts.C_nonempty, counts.C)


_METRIC_ORDER = (
    ("attribute_richness", attribute_richness),
    ("inheritance_richness", inheritance_richness),
    ("relationship_richness", relationship_richness),
    ("axiom_class_ratio", axiom_class_ratio),
    ("class_relation_ratio", class_relation_ratio),
    ("average_population", average_population),
    ("class_richness", class_richness),
)

_METRIC_TITLES = {
    "attribute_richness": "Attribute Richness",
    "inheritance_richness": "Inheritance Richness",
    "relationship_richness": "Relationship Richness",
    "axiom_class_ratio": "Axiom/Class Ratio",
    "class_relation_ratio": "Class/Relation Ratio",
    "average_population": "Average Population",
    "class_richness": "Class Richness",
}


@dataclass(frozen=True)
class MetricsReport:
    """The seven ratios, exact."""

    attribute_richness: Fraction
    inheritance_richness: Fraction
    relationship_richness: Fraction
    axiom_class_ratio: Fraction
    class_relation_ratio: Fraction
    average_population: Fraction
    class_richness: Fraction


def compute_metrics(counts: SchemaCounts) -> MetricsReport:
    return MetricsReport(**{name: fn(counts) for name, fn in _METRIC_ORDER})


def format_ratio(value: Fraction, places: int = 6) -> str:
    """Fixed-point display with banker's rounding."""
    exact = Decimal(value.numerator) / Decimal(value.denominator)
    return str(exact.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


def format_report(report: MetricsReport) -> str:
    """Two-column, seven-line text table."""
    width = max(len(t) for t in _METRIC_TITLES.values())
    lines = []
    for name, _ in _METRIC_ORDER:
        title = _METRIC_TITLES[name]
        lines.append(f"{title:<{width}}  {format_ratio(getattr(report, name))}")
    return "\n".join(lines)


def report_to_document(report: MetricsReport) -> dict:
    return {name: format_ratio(getattr(report, name)) for name, _ in _METRIC_ORDER}


def metrics_from_census_file(text: str) -> tuple[SchemaCounts, MetricsReport]:
    counts = SchemaCounts.from_document(json.loads(text))
    return counts, compute_metrics(counts)
