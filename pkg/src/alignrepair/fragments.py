"""Core-fragment extraction: the reduced structures that preserve every
disjointness-driven conflict.

The core classes are the disjointness endpoints, the mapping endpoints,
the checkset (subsumption-minimal multi-parent classes), and the conflict
search entry points.  Reduced edges compress mapping-free paths between
core classes of one side, so that for every alignment subset M' the
fragment graph plus M' infers exactly the same subsumptions between core
classes as the full merged graph plus M'.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple

from .model import (
    Alignment,
    ClassId,
    Mapping,
    MergedGraph,
    ModelError,
    Ontology,
    Relation,
    merged_view,
)


class FragmentError(ModelError):
    pass


@dataclass(frozen=True)
class Checkset:
    """Classes whose incoherence checks suffice alongside the disjointness
    endpoints: multi-parent classes with no multi-parent class strictly
    below them."""

    classes: tuple[ClassId, ...]

    def __iter__(self):
        return iter(self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def __contains__(self, c: ClassId) -> bool:
        return c in self.classes


class ReducedEdge(NamedTuple):
    child: ClassId
    parent: ClassId
    via_path: bool  # True when the edge abbreviates a multi-edge path


@dataclass(frozen=True)
class CoreFragments:
    """Reduced per-side hierarchies over the core classes.

    `reduced_edges` carry no mapping edges; conflict search re-adds the
    edges of each candidate mapping subset.  `start_classes` are the
    entry points for conflict enumeration (checkset plus divergence
    classes; see extract_core_fragments).
    """

    core_classes: tuple[ClassId, ...]
    reduced_edges: tuple[ReducedEdge, ...]
    disjoint_pairs: tuple[tuple[ClassId, ClassId], ...]
    start_classes: tuple[ClassId, ...]

    @property
    def edge_provenance(self) -> dict[tuple[ClassId, ClassId], bool]:
        """(child, parent) -> whether the edge abbreviates a longer path."""
        return {(e.child, e.parent): e.via_path for e in self.reduced_edges}

    def core_by_side(self, side: int) -> tuple[ClassId, ...]:
        return tuple(c for c in self.core_classes if c.side == side)

    def __contains__(self, c: ClassId) -> bool:
        return c in self._node_index

    @cached_property
    def _node_index(self) -> dict[ClassId, int]:
        return {c: i for i, c in enumerate(self.core_classes)}

    @cached_property
    def _ontology_adj(self) -> list[list[int]]:
        idx = self._node_index
        adj: list[list[int]] = [[] for _ in self.core_classes]
        for e in self.reduced_edges:
            adj[idx[e.child]].append(idx[e.parent])
        return adj

    @cached_property
    def _ontology_radj(self) -> list[list[int]]:
        idx = self._node_index
        radj: list[list[int]] = [[] for _ in self.core_classes]
        for e in self.reduced_edges:
            radj[idx[e.parent]].append(idx[e.child])
        return radj

    def _require(self, c: ClassId) -> int:
        i = self._node_index.get(c)
        if i is None:
            raise FragmentError(f"class {c.id!r} is not a core class")
        return i

    def subset_edges(self, subset: Iterable[Mapping]) -> list[tuple[int, int]]:
        """Directed node-index edges contributed by a mapping subset."""
        edges = []
        for m in subset:
            s = self._require(m.source)
            t = self._require(m.target)
            if m.relation in (Relation.EQUIVALENCE, Relation.SUBSUMED_BY):
                edges.append((s, t))
            if m.relation in (Relation.EQUIVALENCE, Relation.SUBSUMES):
                edges.append((t, s))
        return edges


def compute_checkset(view: MergedGraph) -> Checkset:
    """Subsumption-minimal multi-parent classes of the merged graph.

    A class is multi-parent when its component has at least two covering
    components; it is kept only if no class in a strictly lower component
    is itself multi-parent.  All members of a qualifying component are
    included.
    """
    multi = [
        c
        for c in range(view.component_count)
        if len(view.component_covers(c)) >= 2
    ]
    blocked = 0
    for c in multi:
        blocked |= view.component_ancestor_mask(c) & ~(1 << c)
    kept = [c for c in multi if not (blocked >> c) & 1]
    classes = sorted(cid for c in kept for cid in view.component_members(c))
    return Checkset(tuple(classes))


def _divergence_starts(view: MergedGraph, o1: Ontology, o2: Ontology) -> list[ClassId]:
    """Conflict-search entry points beyond the checkset.

    Any class where two upward walks can split has at least two distinct
    out-neighbors in the merged graph; that property survives restriction
    to any mapping subset, unlike multi-parenthood, which mapping edges
    elsewhere can mask.  Candidates are pruned to the ontology-minimal
    ones: a candidate below another via pure subclass edges inherits all
    of its incoherences, so only the lower one needs to be searched.
    """
    candidates = [c for c in view.classes if len(view.out_neighbors(c)) >= 2]
    kept: list[ClassId] = []
    for onto in (o1, o2):
        side_cands = [c for c in candidates if c.side == onto.side]
        blocked = 0
        for c in side_cands:
            i = onto.local_index(c.id)
            blocked |= onto.ancestor_mask(i) & ~(1 << i)
        for c in side_cands:
            if not (blocked >> onto.local_index(c.id)) & 1:
                kept.append(c)
    return kept


def _reduced_edges_for_side(
    onto: Ontology, core_side: list[ClassId]
) -> list[ReducedEdge]:
    """Covering relation of ontology-only reachability restricted to core."""
    if not core_side:
        return []
    rank = onto.roots_first_rank()
    locals_ = [(onto.local_index(c.id), c) for c in core_side]
    # Ancestors get smaller roots-first ranks; iterate nearest (deepest) first.
    by_rank_desc = sorted(locals_, key=lambda t: -rank[t[0]])
    strict_anc = {i: onto.ancestor_mask(i) & ~(1 << i) for i, _ in locals_}
    direct = set()
    for child, parent in onto.subclass_edges:
        direct.add((onto.local_index(child.id), onto.local_index(parent.id)))

    edges: list[ReducedEdge] = []
    for i, child in locals_:
        anc_i = strict_anc[i]
        covered = 0
        for j, parent in by_rank_desc:
            if j == i or not (anc_i >> j) & 1:
                continue
            if (covered >> j) & 1:
                continue
            edges.append(ReducedEdge(child, parent, (i, j) not in direct))
            covered |= strict_anc[j]
    return edges


def extract_core_fragments(
    o1: Ontology,
    o2: Ontology,
    alignment: Alignment,
    *,
    view: MergedGraph | None = None,
) -> CoreFragments:
    """Extract the core classes and their reduced subclass structure.

    Pass a prebuilt merged view to avoid recomputing the condensation.
    """
    if view is None:
        view = merged_view(o1, o2, alignment)
    checkset = compute_checkset(view)
    starts = sorted(set(checkset.classes) | set(_divergence_starts(view, o1, o2)))

    core: set[ClassId] = set(starts)
    for a, b in view.disjoint_pairs:
        core.add(a)
        core.add(b)
    for m in alignment:
        core.add(m.source)
        core.add(m.target)

    core_sorted = sorted(core)
    edges: list[ReducedEdge] = []
    for onto in (o1, o2):
        side_core = [c for c in core_sorted if c.side == onto.side]
        edges.extend(_reduced_edges_for_side(onto, side_core))
    edges.sort(key=lambda e: (e.child, e.parent))

    return CoreFragments(
        core_classes=tuple(core_sorted),
        reduced_edges=tuple(edges),
        disjoint_pairs=view.disjoint_pairs,
        start_classes=tuple(starts),
    )


def fragment_entails(
    fragments: CoreFragments,
    subset: Iterable[Mapping],
    a: ClassId,
    b: ClassId,
) -> bool:
    """Reachability over reduced edges plus a mapping subset's edges."""
    src = fragments._require(a)
    dst = fragments._require(b)
    if src == dst:
        return True
    extra: dict[int, list[int]] = {}
    for u, v in fragments.subset_edges(subset):
        extra.setdefault(u, []).append(v)
    adj = fragments._ontology_adj
    seen = {src}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v == dst:
                return True
            if v not in seen:
                seen.add(v)
                queue.append(v)
        for v in extra.get(u, ()):
            if v == dst:
                return True
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def fragments_incoherent(
    fragments: CoreFragments, subset: Iterable[Mapping]
) -> bool:
    """True iff some core class lands under both members of a disjoint pair
    when the subset's mapping edges are added to the reduced structure."""
    if not fragments.disjoint_pairs:
        return False
    extra_down: dict[int, list[int]] = {}
    for u, v in fragments.subset_edges(subset):
        extra_down.setdefault(v, []).append(u)
    radj = fragments._ontology_radj
    idx = fragments._node_index

    def descendants(start: int) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in radj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
            for v in extra_down.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen

    for a, b in fragments.disjoint_pairs:
        if descendants(idx[a]) & descendants(idx[b]):
            return True
    return False
