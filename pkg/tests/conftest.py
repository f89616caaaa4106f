"""Shared fixtures: the three canonical instances used across the suite.

F1: two tiny ontologies joined by an equivalence and a subsumption whose
    combination is incoherent.
F2: abstract conflict sets S1={m1,m2}, S2={m1,m3}, S3={m4,m5} with
    confidences 0.6/0.7/0.8/0.4/0.9.
F3: a single diamond-shaped hierarchy with a multi-parent bottom class.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import pytest

from alignrepair import (
    Alignment,
    ClassId,
    ConflictList,
    ConflictSet,
    Mapping,
    Relation,
    build_ontology,
)


def mk_mapping(i: int, confidence: float = 1.0,
               relation: Relation = Relation.EQUIVALENCE) -> Mapping:
    """Abstract mapping m<i> with a canonical, sortable identity."""
    return Mapping(
        ClassId(f"s{i:02d}", 1), ClassId(f"t{i:02d}", 2), relation, confidence
    )


WITNESS = ClassId("w", 1)
PAIR = (ClassId("p", 1), ClassId("q", 1))


def mk_set(*mappings: Mapping) -> ConflictSet:
    return ConflictSet(frozenset(mappings), WITNESS, PAIR)


@dataclass
class F1:
    o1: object
    o2: object
    m1: Mapping
    m2: Mapping
    alignment: Alignment

    def cid(self, name: str) -> ClassId:
        onto = self.o1 if name.endswith("1") else self.o2
        return onto.class_id(name)


@pytest.fixture
def f1() -> F1:
    o1 = build_ontology(1, ["A1", "B1", "C1", "D1"], [("A1", "B1")], [("B1", "C1")])
    o2 = build_ontology(2, ["A2", "X2"], [("A2", "X2")])
    m1 = Mapping(o1.class_id("A1"), o2.class_id("A2"), Relation.EQUIVALENCE, 0.9)
    m2 = Mapping(o1.class_id("C1"), o2.class_id("A2"), Relation.SUBSUMES, 0.5)
    return F1(o1, o2, m1, m2, Alignment([m1, m2]))


@dataclass
class F2:
    m1: Mapping
    m2: Mapping
    m3: Mapping
    m4: Mapping
    m5: Mapping
    s1: ConflictSet
    s2: ConflictSet
    s3: ConflictSet
    conflicts: ConflictList
    alignment: Alignment


@pytest.fixture
def f2() -> F2:
    m1 = mk_mapping(1, 0.6)
    m2 = mk_mapping(2, 0.7)
    m3 = mk_mapping(3, 0.8)
    m4 = mk_mapping(4, 0.4)
    m5 = mk_mapping(5, 0.9)
    s1 = mk_set(m1, m2)
    s2 = mk_set(m1, m3)
    s3 = mk_set(m4, m5)
    return F2(m1, m2, m3, m4, m5, s1, s2, s3,
              ConflictList([s1, s2, s3]), Alignment([m1, m2, m3, m4, m5]))


@pytest.fixture
def f3():
    return build_ontology(
        1,
        list("ABCDEF"),
        [("B", "A"), ("C", "A"), ("D", "B"), ("D", "C"), ("E", "D"), ("E", "F")],
    )


# -- brute-force oracles ---------------------------------------------------
# Deliberately naive: plain adjacency dictionaries and quadratic scans,
# sharing nothing with the package's condensation/bitmask machinery.


def brute_reachable(edges: list[tuple]) -> dict:
    """Reflexive-transitive closure as {node: set(reachable)} via BFS."""
    adj: dict = {}
    nodes = set()
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        nodes.add(a)
        nodes.add(b)
    closure = {}
    for start in nodes:
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        closure[start] = seen
    return closure


def merged_edge_list(o1, o2, mappings) -> list[tuple]:
    edges = [(c, p) for onto in (o1, o2) for c, p in onto.subclass_edges]
    for m in mappings:
        if m.relation in (Relation.EQUIVALENCE, Relation.SUBSUMED_BY):
            edges.append((m.source, m.target))
        if m.relation in (Relation.EQUIVALENCE, Relation.SUBSUMES):
            edges.append((m.target, m.source))
    return edges


def brute_entails(o1, o2, mappings):
    """reach(a, b) over the full merged graph, reflexive."""
    closure = brute_reachable(merged_edge_list(o1, o2, mappings))

    def reach(a, b):
        return a == b or b in closure.get(a, {a})

    return reach


def brute_direct_superclasses(o1, o2, mappings, a):
    """Covers of a's component per the strict-order definition."""
    reach = brute_entails(o1, o2, mappings)
    classes = list(o1.classes) + list(o2.classes)

    def strict(x, y):
        return reach(x, y) and not reach(y, x)

    out = set()
    for b in classes:
        if not strict(a, b):
            continue
        if any(strict(a, c) and strict(c, b) for c in classes):
            continue
        out.add(b)
    return out
