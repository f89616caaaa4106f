"""Minimal conflict-set enumeration over core fragments.

A conflict set is a minimal set of mappings whose edges, added to the
reduced fragment structure, place some class under both members of a
disjoint pair.  Enumeration keeps, per node, the antichain of minimal
mapping-label sets of walks into each disjointness endpoint (a Pareto
search: a walk whose label set contains another walk's label set can
never yield a new minimal conflict); a witness's conflicts are unions
of one label set per pair member.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .fragments import Checkset, CoreFragments
from .graphs import iter_bits
from .model import Alignment, ClassId, Mapping, MergedGraph, Relation


class EnumerationCapExceeded(RuntimeError):
    """Raised when conflict enumeration exceeds its work budget instead of
    silently truncating (truncation would break completeness)."""


@dataclass(frozen=True)
class ConflictSet:
    """A minimal culprit set of mappings for one incoherence witness."""

    mappings: frozenset[Mapping]
    witness_class: ClassId
    witness_pair: tuple[ClassId, ClassId]

    @property
    def key(self) -> tuple[tuple[str, str, str], ...]:
        return tuple(sorted(m.key for m in self.mappings))

    def __len__(self) -> int:
        return len(self.mappings)

    def __contains__(self, m: Mapping) -> bool:
        return m in self.mappings

    def sorted_mappings(self) -> tuple[Mapping, ...]:
        return tuple(sorted(self.mappings, key=lambda m: m.key))

    def __repr__(self) -> str:
        members = ", ".join(m.describe() for m in self.sorted_mappings())
        return f"ConflictSet({{{members}}} @ {self.witness_class.id})"


class ConflictList:
    """Deduplicated, canonically ordered antichain of conflict sets."""

    __slots__ = ("sets",)

    def __init__(self, sets: Iterable[ConflictSet] = ()):
        by_key: dict[tuple, ConflictSet] = {}
        for s in sorted(
            sets, key=lambda s: (s.key, s.witness_class, s.witness_pair)
        ):
            by_key.setdefault(s.key, s)
        candidates = list(by_key.values())
        kept: list[ConflictSet] = []
        for s in candidates:
            if any(
                other.mappings < s.mappings for other in candidates if other is not s
            ):
                continue
            kept.append(s)
        kept.sort(key=lambda s: s.key)
        self.sets: tuple[ConflictSet, ...] = tuple(kept)

    def __iter__(self) -> Iterator[ConflictSet]:
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, i: int) -> ConflictSet:
        return self.sets[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConflictList):
            return NotImplemented
        return self.sets == other.sets

    def __repr__(self) -> str:
        return f"ConflictList({len(self.sets)} sets)"

    def all_mappings(self) -> tuple[Mapping, ...]:
        seen: dict[tuple, Mapping] = {}
        for s in self.sets:
            for m in s.mappings:
                seen.setdefault(m.key, m)
        return tuple(seen[k] for k in sorted(seen))


@dataclass(frozen=True)
class Cluster:
    """A maximal group of conflict sets connected by shared mappings."""

    sets: tuple[ConflictSet, ...]

    @property
    def key(self) -> tuple:
        return self.sets[0].key if self.sets else ()

    def __iter__(self) -> Iterator[ConflictSet]:
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)


def _insert_minimal(masks: list[int], new: int) -> bool:
    """Insert into an antichain of bitmasks; drop dominated entries.

    Returns False when an existing mask is a subset of `new`.
    """
    for m in masks:
        if m & new == m:  # m subset of new: new is dominated
            return False
    masks[:] = [m for m in masks if new & m != new]
    masks.append(new)
    return True


def find_conflict_sets(
    fragments: CoreFragments,
    checkset: Checkset,
    alignment: Alignment,
    *,
    max_work: int = 1_000_000,
) -> ConflictList:
    """Enumerate every minimal conflict set of the alignment.

    Witnesses are the fragment start classes, the given checkset, and the
    disjointness endpoints.  One backward label search per endpoint
    yields the minimal label sets from every node to that endpoint; a
    witness's conflict candidates are then unions over its entries for
    the two members of a pair.  `max_work` caps, per witness, both the
    label antichain growth and the number of path-pair combinations;
    exceeding it raises EnumerationCapExceeded.
    """
    if not fragments.disjoint_pairs or not len(alignment):
        return ConflictList()

    mappings = sorted(alignment, key=lambda m: m.key)
    node_of = fragments._node_index
    n = len(fragments.core_classes)

    # Reverse labeled graph: reduced edges carry no label (-1), mapping
    # edges the mapping's index.  Parallel edges with distinct labels all
    # matter.
    radj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e in fragments.reduced_edges:
        radj[node_of[e.parent]].append((node_of[e.child], -1))
    for mi, m in enumerate(mappings):
        s = node_of.get(m.source)
        t = node_of.get(m.target)
        if s is None or t is None:
            raise ValueError(
                f"alignment mapping {m.describe()!r} has a non-core endpoint; "
                "fragments were extracted from a different alignment"
            )
        if m.relation in (Relation.EQUIVALENCE, Relation.SUBSUMED_BY):
            radj[t].append((s, mi))
        if m.relation in (Relation.EQUIVALENCE, Relation.SUBSUMES):
            radj[s].append((t, mi))

    endpoint_nodes = sorted(
        {node_of[c] for pair in fragments.disjoint_pairs for c in pair}
    )
    # states_to[e][v] = antichain of minimal label sets of walks v -> e
    states_to = {
        e: _pareto_label_search(radj, e, max_work) for e in endpoint_nodes
    }

    start_classes = sorted(
        set(fragments.start_classes)
        | set(checkset.classes)
        | {c for pair in fragments.disjoint_pairs for c in pair}
    )

    found: dict[int, tuple[ClassId, tuple[ClassId, ClassId]]] = {}
    for start in start_classes:
        s_idx = node_of[start]
        for pair in fragments.disjoint_pairs:
            sets_a = states_to[node_of[pair[0]]].get(s_idx)
            if not sets_a:
                continue
            sets_b = states_to[node_of[pair[1]]].get(s_idx)
            if not sets_b:
                continue
            if len(sets_a) * len(sets_b) > max_work:
                raise EnumerationCapExceeded(
                    f"witness ({start.id}, {pair[0].id}|{pair[1].id}) exceeds "
                    f"{max_work} path pairs"
                )
            witness_masks: list[int] = []
            for ma in sets_a:
                for mb in sets_b:
                    _insert_minimal(witness_masks, ma | mb)
            for mask in witness_masks:
                if mask and mask not in found:
                    found[mask] = (start, pair)

    conflict_sets = [
        ConflictSet(
            mappings=frozenset(mappings[i] for i in iter_bits(mask)),
            witness_class=witness,
            witness_pair=pair,
        )
        for mask, (witness, pair) in found.items()
    ]
    return ConflictList(conflict_sets)


def _pareto_label_search(
    adj: list[list[tuple[int, int]]],
    start: int,
    max_work: int,
) -> dict[int, list[int]]:
    """Minimal mapping-label sets of walks from `start` to every node.

    states[v] is an antichain of bitmasks; each mask is the label set of
    some walk start->v, and every minimal label set appears.
    """
    states: dict[int, list[int]] = {start: [0]}
    queue: deque[tuple[int, int]] = deque([(start, 0)])
    budget = max_work
    while queue:
        u, mask = queue.popleft()
        live = states.get(u)
        if live is None or mask not in live:
            continue  # superseded by a smaller label set
        for v, label in adj[u]:
            nm = mask | (1 << label) if label >= 0 else mask
            lst = states.setdefault(v, [])
            if _insert_minimal(lst, nm):
                budget -= 1
                if budget < 0:
                    raise EnumerationCapExceeded(
                        f"label-set search from node {start} exceeded {max_work} steps"
                    )
                queue.append((v, nm))
    return states


def disjoint_conflict_clusters(conflicts: Sequence[ConflictSet]) -> tuple[Cluster, ...]:
    """Partition conflict sets into maximal share-a-mapping components."""
    sets = list(conflicts)
    if not sets:
        return ()
    parent = list(range(len(sets)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    owner: dict[tuple, int] = {}
    for i, s in enumerate(sets):
        for m in s.mappings:
            if m.key in owner:
                union(owner[m.key], i)
            else:
                owner[m.key] = i

    groups: dict[int, list[ConflictSet]] = {}
    for i, s in enumerate(sets):
        groups.setdefault(find(i), []).append(s)
    clusters = [
        Cluster(tuple(sorted(g, key=lambda s: s.key))) for g in groups.values()
    ]
    clusters.sort(key=lambda c: c.key)
    return tuple(clusters)


def count_incoherent_classes(view: MergedGraph) -> tuple[int, tuple[ClassId, ...]]:
    """All classes entailed to sit under both members of a disjoint pair."""
    bad_comps: set[int] = set()
    for a, b in view.disjoint_pairs:
        below_a = view.components_below(view.component_of(a))
        below_b = view.components_below(view.component_of(b))
        bad_comps |= below_a & below_b
    bad: list[ClassId] = []
    for comp in bad_comps:
        bad.extend(view.component_members(comp))
    ordered = tuple(sorted(bad))
    return len(ordered), ordered


def conflict_statistics(conflicts: ConflictList) -> dict:
    """Set/cluster counts and a size histogram, for reporting."""
    clusters = disjoint_conflict_clusters(conflicts.sets)
    histogram = Counter(len(s) for s in conflicts)
    return {
        "sets": len(conflicts),
        "clusters": len(clusters),
        "set_size_histogram": {str(k): histogram[k] for k in sorted(histogram)},
    }
