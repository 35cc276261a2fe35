"""Multilevel (Louvain) modularity optimization."""
from __future__ import annotations

import numba
import numpy as np
import scipy.sparse as sp

from ..graph import WeightedGraph
from .partition import Partition


@numba.njit(cache=True)
def _local_moves(indptr, indices, weights, k, two_m, order):
    """Move nodes to the neighbouring community with the best modularity gain.

    Sweeps ``order`` until a full pass moves nothing. ``weights`` excludes
    self-loops; ``k`` is the full strength including them.
    """
    n = k.shape[0]
    comm = np.arange(n)
    tot = k.copy()
    links = np.zeros(n)
    touched = np.empty(n, dtype=np.int64)
    any_move = False
    while True:
        moved = 0
        for idx in range(n):
            i = order[idx]
            ci = comm[i]
            ki = k[i]
            n_touched = 0
            for p in range(indptr[i], indptr[i + 1]):
                c = comm[indices[p]]
                if links[c] == 0.0:
                    touched[n_touched] = c
                    n_touched += 1
                links[c] += weights[p]
            tot[ci] -= ki
            best_c = ci
            best_gain = links[ci] - tot[ci] * ki / two_m
            eps = 1e-10 * ki
            for t in range(n_touched):
                c = touched[t]
                gain = links[c] - tot[c] * ki / two_m
                if gain > best_gain + eps:
                    best_gain = gain
                    best_c = c
            tot[best_c] += ki
            for t in range(n_touched):
                links[touched[t]] = 0.0
            if best_c != ci:
                comm[i] = best_c
                moved += 1
        if moved == 0:
            return comm, any_move
        any_move = True


def multilevel(g: WeightedGraph, seed: int = 0) -> Partition:
    """Louvain communities.

    Each level sweeps nodes in an order drawn from ``seed`` until no single
    move raises modularity, then collapses communities into nodes. Stops when
    a level makes no move.
    """
    n = g.n_nodes
    if n == 0:
        return Partition((), ())
    if g.total_weight == 0:
        return Partition.singletons(g)
    rng = np.random.default_rng(seed)
    adj = g.adjacency()
    two_m = 2.0 * g.total_weight
    membership = np.arange(n)
    while True:
        k = np.asarray(adj.sum(axis=1)).ravel()
        off = sp.csr_matrix(adj - sp.diags(adj.diagonal()))
        off.eliminate_zeros()
        comm, moved = _local_moves(
            off.indptr.astype(np.int64), off.indices.astype(np.int64),
            off.data.astype(float), k.astype(float), two_m, rng.permutation(adj.shape[0]),
        )
        if not moved:
            break
        _, dense = np.unique(comm, return_inverse=True)
        n_new = int(dense.max()) + 1
        s = sp.csr_matrix((np.ones(len(dense)), (np.arange(len(dense)), dense)),
                          shape=(len(dense), n_new))
        adj = sp.csr_matrix(s.T @ adj @ s)
        membership = dense[membership]
        if n_new == 1:
            break
    return Partition.of(g, membership.tolist())
