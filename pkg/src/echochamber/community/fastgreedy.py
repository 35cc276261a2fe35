"""Greedy agglomerative modularity maximization (Clauset-Newman-Moore)."""
from __future__ import annotations

import heapq

from ..graph import WeightedGraph
from .partition import Partition


def merge_sequence(g: WeightedGraph) -> tuple[list[tuple[int, int]], list[float]]:
    """Full greedy dendrogram.

    Returns the merges ``(kept, absorbed)`` in order and the modularity after
    each step (``q[0]`` is the all-singletons value). Among equal gains the
    lowest-index pair is merged first; a merged community keeps the lower
    index. Merging stops when no two connected communities remain.
    """
    n = g.n_nodes
    two_w = 2.0 * g.total_weight
    if n == 0 or two_w == 0:
        return [], [0.0]

    e: list[dict[int, float]] = [{} for _ in range(n)]
    for i, j, w in g.edges():
        e[i][j] = w / two_w
        e[j][i] = w / two_w
    a = (g.strength() / two_w).tolist()
    version = [0] * n
    alive = [True] * n

    heap = []
    for i in range(n):
        for j, eij in e[i].items():
            if i < j:
                heap.append((-2.0 * (eij - a[i] * a[j]), i, j, 0, 0))
    heapq.heapify(heap)

    q = -sum(x * x for x in a)
    qs = [q]
    merges: list[tuple[int, int]] = []
    while heap:
        neg_dq, i, j, vi, vj = heapq.heappop(heap)
        if not (alive[i] and alive[j]) or version[i] != vi or version[j] != vj:
            continue
        ei, ej = e[i], e[j]
        del ei[j]
        del ej[i]
        for k, ejk in ej.items():
            eik = ei.get(k, 0.0) + ejk
            ei[k] = eik
            ek = e[k]
            del ek[j]
            ek[i] = eik
        e[j] = {}
        alive[j] = False
        a[i] += a[j]
        version[i] += 1
        q -= neg_dq
        qs.append(q)
        merges.append((i, j))
        for k, eik in ei.items():
            lo, hi = (i, k) if i < k else (k, i)
            heapq.heappush(
                heap, (-2.0 * (eik - a[i] * a[k]), lo, hi, version[lo], version[hi])
            )
    return merges, qs


def fastgreedy(g: WeightedGraph) -> Partition:
    """Greedy modularity communities, cut at the step of maximum modularity."""
    merges, qs = merge_sequence(g)
    best = max(range(len(qs)), key=lambda k: (qs[k], -k))
    parent = list(range(g.n_nodes))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for kept, absorbed in merges[:best]:
        parent[find(absorbed)] = find(kept)
    return Partition.of(g, [find(v) for v in range(g.n_nodes)])
