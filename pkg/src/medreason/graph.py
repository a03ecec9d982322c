"""Typed knowledge graph: category forest, properties, individuals, assertions.

A lightweight native stand-in for an ontology editor's data model. Category
nodes form a forest rooted at a single top node; object/data/annotation
properties are declared by name; individuals carry typed assertions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .kb import DiseaseMatrix

log = logging.getLogger(__name__)

TOP_CATEGORY = "Thing"
DISEASE_ROOT = "Disease_name"
SYMPTOM_ROOT = "symptoms"
ASSOCIATION_PROPERTY = "has_AssociatedSymptoms"


def symptom_predicate(symptom: str) -> str:
    """Boolean data-property name for a symptom column (haslump, hasFever...)."""
    return "has" + symptom


@dataclass
class KnowledgeGraph:
    """Mutable while being built; treated as immutable once handed out."""

    top: str = TOP_CATEGORY
    parents: dict[str, str | None] = field(default_factory=dict)  # category -> parent
    object_properties: list[str] = field(default_factory=list)
    data_properties: list[str] = field(default_factory=list)
    annotation_properties: list[str] = field(default_factory=list)
    individuals: dict[str, str] = field(default_factory=dict)  # individual -> category
    object_assertions: list[tuple[str, str, str]] = field(default_factory=list)
    data_assertions: list[tuple[str, str, object]] = field(default_factory=list)

    def __post_init__(self):
        if self.top not in self.parents:
            self.parents[self.top] = None

    # -- declarations -------------------------------------------------------

    def add_category(self, name: str, parent: str | None = None) -> None:
        parent = parent or self.top
        if name in self.parents:
            raise ValueError(f"category {name!r} already declared")
        if parent not in self.parents:
            raise ValueError(f"unknown parent category {parent!r}")
        self.parents[name] = parent

    def declare_object_property(self, name: str) -> None:
        if name not in self.object_properties:
            self.object_properties.append(name)

    def declare_data_property(self, name: str) -> None:
        if name not in self.data_properties:
            self.data_properties.append(name)

    def declare_annotation_property(self, name: str) -> None:
        if name not in self.annotation_properties:
            self.annotation_properties.append(name)

    def add_individual(self, name: str, category: str) -> None:
        if name in self.individuals:
            raise ValueError(f"individual {name!r} already declared")
        if category not in self.parents:
            raise ValueError(f"unknown category {category!r}")
        self.individuals[name] = category

    # -- assertions ---------------------------------------------------------

    def _check_node(self, name: str) -> None:
        if name not in self.parents and name not in self.individuals:
            raise ValueError(f"unknown node {name!r}")

    def assert_object(self, subject: str, prop: str, obj: str) -> None:
        self._check_node(subject)
        self._check_node(obj)
        if prop not in self.object_properties:
            raise ValueError(f"undeclared object property {prop!r}")
        self.object_assertions.append((subject, prop, obj))

    def assert_data(self, subject: str, prop: str, value) -> None:
        self._check_node(subject)
        if prop not in self.data_properties:
            raise ValueError(f"undeclared data property {prop!r}")
        self.data_assertions.append((subject, prop, value))

    # -- views --------------------------------------------------------------

    @property
    def categories(self) -> list[str]:
        return list(self.parents)

    def subclass_edges(self) -> list[tuple[str, str]]:
        """(child, parent) pairs; the forest under the top node."""
        return [(c, p) for c, p in self.parents.items() if p is not None]

    def children_count(self) -> dict[str, int]:
        counts = {c: 0 for c in self.parents}
        for _, parent in self.subclass_edges():
            counts[parent] += 1
        return counts

    def populated_categories(self) -> set[str]:
        return set(self.individuals.values())

    def validate(self) -> None:
        """Check the forest invariant (each chain reaches the top, no cycles)."""
        for start in self.parents:
            seen = set()
            node = start
            while node is not None:
                if node in seen:
                    raise ValueError(f"subclass cycle through {node!r}")
                seen.add(node)
                node = self.parents.get(node)
            if self.top not in seen and start != self.top:
                raise ValueError(f"category {start!r} is not rooted at {self.top!r}")


def build_graph(matrix: "DiseaseMatrix") -> KnowledgeGraph:
    """Project an incidence matrix into the graph form.

    Creates the top node, disease and symptom subtrees, one association edge
    per set incidence bit, and one boolean data-property declaration per
    symptom.
    """
    g = KnowledgeGraph()
    g.add_category(DISEASE_ROOT)
    g.add_category(SYMPTOM_ROOT)
    for disease in matrix.diseases:
        g.add_category(disease, DISEASE_ROOT)
    for symptom in matrix.vocabulary.symptoms:
        g.add_category(symptom, SYMPTOM_ROOT)
        g.declare_data_property(symptom_predicate(symptom))
    g.declare_object_property(ASSOCIATION_PROPERTY)
    for d, disease in enumerate(matrix.diseases):
        for i in np.flatnonzero(matrix.incidence[d]):
            g.assert_object(disease, ASSOCIATION_PROPERTY, matrix.vocabulary.symptoms[int(i)])
    log.debug("built graph: %d categories, %d association assertions",
              len(g.parents), len(g.object_assertions))
    return g
