"""Schema metrics: exact rational formulas and half-even display rounding."""

import json
from fractions import Fraction

import pytest

from medreason.graph import build_graph
from medreason.ontometrics import (
    MetricsReport,
    SchemaCounts,
    attribute_richness,
    average_population,
    axiom_class_ratio,
    census,
    class_relation_ratio,
    class_richness,
    compute_metrics,
    format_ratio,
    format_report,
    inheritance_richness,
    metrics_from_census_file,
    relationship_richness,
    report_to_document,
)

TINY = SchemaCounts(C=4, ATT=6, P=2, H=3, I=8, C_nonempty=2, axioms=21)


class TestFormulas:
    def test_each_ratio_is_exact(self):
        assert attribute_richness(TINY) == Fraction(6, 4)
        assert inheritance_richness(TINY) == Fraction(3, 4)
        assert relationship_richness(TINY) == Fraction(2, 5)
        assert axiom_class_ratio(TINY) == Fraction(21, 4)
        assert class_relation_ratio(TINY) == Fraction(4, 5)
        assert average_population(TINY) == Fraction(2, 1)
        assert class_richness(TINY) == Fraction(1, 2)

    def test_compute_metrics_collects_all(self):
        report = compute_metrics(TINY)
        assert isinstance(report, MetricsReport)
        assert report.attribute_richness == Fraction(3, 2)
        assert report.class_richness == Fraction(1, 2)

    def test_zero_categories(self):
        empty = SchemaCounts(C=0, ATT=0, P=1, H=1, I=0, C_nonempty=0, axioms=0)
        for fn, name in [
            (attribute_richness, "attribute richness"),
            (inheritance_richness, "inheritance richness"),
            (axiom_class_ratio, "axiom/class ratio"),
            (average_population, "average population"),
            (class_richness, "class richness"),
        ]:
            with pytest.raises(ZeroDivisionError, match=name):
                fn(empty)

    def test_zero_relations(self):
        bare = SchemaCounts(C=3, ATT=0, P=0, H=0, I=0, C_nonempty=0, axioms=3)
        with pytest.raises(ZeroDivisionError, match="H \\+ P > 0"):
            relationship_richness(bare)
        with pytest.raises(ZeroDivisionError, match="H \\+ P > 0"):
            class_relation_ratio(bare)


class TestSchemaCounts:
    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="ATT must be >= 0"):
            SchemaCounts(C=1, ATT=-1, P=0, H=0, I=0, C_nonempty=0, axioms=0)

    def test_nonempty_bounded_by_total(self):
        with pytest.raises(ValueError, match="C_nonempty cannot exceed C"):
            SchemaCounts(C=1, ATT=0, P=0, H=0, I=0, C_nonempty=2, axioms=0)

    def test_per_category_counts_must_sum_to_h(self):
        with pytest.raises(ValueError, match="sum to 2, H is 3"):
            SchemaCounts(C=4, ATT=0, P=0, H=3, I=0, C_nonempty=0, axioms=0,
                         per_category_subclass_counts={"Disease": 2})

    def test_document_round_trip(self):
        doc = TINY.to_document()
        assert doc == {"C": 4, "ATT": 6, "P": 2, "H": 3, "I": 8,
                       "C_nonempty": 2, "axioms": 21}
        assert SchemaCounts.from_document(doc) == TINY

    def test_from_document_missing_field(self):
        with pytest.raises(ValueError, match="missing fields: \\['axioms'\\]"):
            SchemaCounts.from_document({"C": 1, "ATT": 0, "P": 0, "H": 0,
                                        "I": 0, "C_nonempty": 0})


class TestFormatting:
    def test_fixed_point_display(self):
        assert format_ratio(Fraction(1, 3)) == "0.333333"
        assert format_ratio(Fraction(1, 2)) == "0.500000"
        assert format_ratio(Fraction(2)) == "2.000000"

    def test_half_even_at_the_sixth_place(self):
        assert format_ratio(Fraction(25, 10_000_000)) == "0.000002"
        assert format_ratio(Fraction(15, 10_000_000)) == "0.000002"
        assert format_ratio(Fraction(5, 10_000_000)) == "0.000000"

    def test_report_lines(self):
        lines = format_report(compute_metrics(TINY)).splitlines()
        assert lines == [
            "Attribute Richness     1.500000",
            "Inheritance Richness   0.750000",
            "Relationship Richness  0.400000",
            "Axiom/Class Ratio      5.250000",
            "Class/Relation Ratio   0.800000",
            "Average Population     2.000000",
            "Class Richness         0.500000",
        ]

    def test_document_keys_ordered(self):
        doc = report_to_document(compute_metrics(TINY))
        assert list(doc) == [
            "attribute_richness", "inheritance_richness", "relationship_richness",
            "axiom_class_ratio", "class_relation_ratio", "average_population",
            "class_richness",
        ]
        assert doc["average_population"] == "2.000000"


class TestShippedCensus:
    """The checked-in census fixture must reproduce the reference figures."""

    def test_pinned_six_decimal_values(self, repo_root):
        text = (repo_root / "fixtures" / "fig13.json").read_text("utf-8")
        counts, report = metrics_from_census_file(text)
        assert counts.C == 854 and counts.axioms == 4733
        expected = {
            "attribute_richness": "0.853630",
            "inheritance_richness": "0.990632",
            "relationship_richness": "0.402120",
            "axiom_class_ratio": "5.542155",
            "class_relation_ratio": "0.603534",
            "average_population": "0.250585",
            "class_richness": "0.001171",
        }
        assert report_to_document(report) == expected


class TestCensus:
    def test_toy_graph_counts(self, toy_matrix):
        graph = build_graph(toy_matrix)
        counts = census(graph)
        # top is excluded: 2 roots + 3 diseases + 4 symptoms
        assert counts.C == 9
        assert counts.H == 9  # every category has exactly one parent edge
        assert counts.P == len(graph.object_properties)
        assert counts.ATT == len(graph.data_properties)
        assert counts.I == 0
        assert counts.C_nonempty == 0
        decls = counts.C + counts.P + counts.ATT + len(graph.annotation_properties)
        logical = counts.H + len(graph.object_assertions)
        assert counts.axioms == decls + logical
        assert sum(counts.per_category_subclass_counts.values()) == counts.H

    def test_bundled_graph_census_is_stable(self, matrix):
        counts = census(build_graph(matrix))
        assert counts.C == 857  # 2 roots + 265 diseases + 590 symptoms
        assert counts.H == 857
        assert counts.I == 0
        metrics = compute_metrics(counts)
        assert metrics.inheritance_richness == Fraction(1)

    def test_census_feeds_formulas(self, toy_matrix):
        counts = census(build_graph(toy_matrix))
        assert inheritance_richness(counts) == Fraction(1)
