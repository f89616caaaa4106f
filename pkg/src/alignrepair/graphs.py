"""Directed-graph primitives: SCC condensation and bitset reachability.

All functions work on integer node ids 0..n-1 with adjacency lists.
Reachability sets are represented as arbitrary-precision int bitmasks,
which keeps membership tests and unions at C speed.
"""

from __future__ import annotations

from collections import deque


def tarjan_scc(n: int, adj: list[list[int]]) -> tuple[int, list[int]]:
    """Strongly connected components, iteratively (no recursion limit).

    Returns (count, comp) where comp[v] is the component id of node v.
    Component ids follow Tarjan's emission order: if a node of component
    x has an edge into a different component y, then y < x.  A single
    forward pass over component ids can therefore accumulate closures.
    """
    UNVISITED = -1
    index = [UNVISITED] * n
    low = [0] * n
    on_stack = bytearray(n)
    stack: list[int] = []
    comp = [UNVISITED] * n
    count = 0
    counter = 0

    for root in range(n):
        if index[root] != UNVISITED:
            continue
        work: list[tuple[int, int]] = [(root, 0)]
        while work:
            v, edge_pos = work[-1]
            if edge_pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = 1
            descended = False
            neighbors = adj[v]
            for i in range(edge_pos, len(neighbors)):
                w = neighbors[i]
                if index[w] == UNVISITED:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    descended = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            work.pop()
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = 0
                    comp[w] = count
                    if w == v:
                        break
                count += 1
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
    return count, comp


def condensation_edges(
    n: int, adj: list[list[int]], comp: list[int], count: int
) -> list[list[int]]:
    """Deduplicated successor lists between components (self-loops dropped)."""
    succ: list[set[int]] = [set() for _ in range(count)]
    for v in range(n):
        cv = comp[v]
        for w in adj[v]:
            cw = comp[w]
            if cw != cv:
                succ[cv].add(cw)
    return [sorted(s) for s in succ]


def closure_masks(count: int, cond_adj: list[list[int]]) -> list[int]:
    """Reachability bitmasks over a condensation in Tarjan emission order.

    masks[c] has bit d set iff component d is reachable from c (reflexive).
    Relies on every successor id being smaller than its predecessor's id.
    """
    masks: list[int] = []
    for c in range(count):
        m = 1 << c
        for t in cond_adj[c]:
            m |= masks[t]
        masks.append(m)
    return masks


def dag_order_roots_first(n: int, parents: list[list[int]]) -> list[int] | None:
    """Topological order with every parent before its children.

    `parents[v]` lists the direct parents of v.  Returns None when the
    parent relation is cyclic.
    """
    children: list[list[int]] = [[] for _ in range(n)]
    pending = [0] * n
    for v in range(n):
        seen = set(parents[v])
        pending[v] = len(seen)
        for p in seen:
            children[p].append(v)
    queue = deque(v for v in range(n) if pending[v] == 0)
    order: list[int] = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for c in children[v]:
            pending[c] -= 1
            if pending[c] == 0:
                queue.append(c)
    if len(order) != n:
        return None
    return order


def ancestor_masks(n: int, parents: list[list[int]], order: list[int]) -> list[int]:
    """Reflexive ancestor bitmasks of a DAG given a roots-first order."""
    anc = [0] * n
    for v in order:
        m = 1 << v
        for p in parents[v]:
            m |= anc[p]
        anc[v] = m
    return anc


def iter_bits(mask: int):
    """Yield the set bit positions of a mask in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
