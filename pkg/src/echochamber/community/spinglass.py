"""Potts spin-glass community detection by simulated annealing.

Minimizes the Reichardt-Bornholdt Hamiltonian with a configuration-model
null term,

    H = - sum_{i<j} (A_ij - gamma * k_i k_j / 2W) * [s_i == s_j],

using heat-bath single-spin updates. Edge weights are rescaled so the mean
node strength is 1, which makes the temperature schedule independent of the
weight units.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from ..graph import WeightedGraph
from .partition import Partition


class DisconnectedGraphError(ValueError):
    pass


@dataclass(frozen=True)
class SpinglassParams:
    spins_max: int = 25
    start_temp: float = 1.0
    end_temp: float = 0.01
    cooling: float = 0.99
    gamma: float = 1.0

    def __post_init__(self):
        if self.spins_max < 1:
            raise ValueError("spins_max must be >= 1")
        if not 0 < self.end_temp < self.start_temp:
            raise ValueError("need 0 < end_temp < start_temp")
        if not 0 < self.cooling < 1:
            raise ValueError("cooling must lie in (0, 1)")


@numba.njit(cache=True)
def _anneal(indptr, indices, weights, k, two_w, q, t_start, t_end, cooling, gamma, seed):
    np.random.seed(seed)
    n = k.shape[0]
    spins = np.empty(n, dtype=np.int64)
    for i in range(n):
        spins[i] = np.random.randint(q)
    tot = np.zeros(q)
    for i in range(n):
        tot[spins[i]] += k[i]
    h = np.empty(q)
    prob = np.empty(q)
    order = np.arange(n)
    temp = t_start
    while temp > t_end:
        np.random.shuffle(order)
        for idx in range(n):
            i = order[idx]
            s0 = spins[i]
            tot[s0] -= k[i]
            for s in range(q):
                h[s] = -gamma * k[i] * tot[s] / two_w
            for p in range(indptr[i], indptr[i + 1]):
                h[spins[indices[p]]] += weights[p]
            hmax = h.max()
            z = 0.0
            for s in range(q):
                prob[s] = np.exp((h[s] - hmax) / temp)
                z += prob[s]
            r = np.random.random() * z
            new = q - 1
            acc = 0.0
            for s in range(q):
                acc += prob[s]
                if r < acc:
                    new = s
                    break
            spins[i] = new
            tot[new] += k[i]
        temp *= cooling
    # zero-temperature quench
    changed = True
    while changed:
        changed = False
        for i in range(n):
            s0 = spins[i]
            tot[s0] -= k[i]
            for s in range(q):
                h[s] = -gamma * k[i] * tot[s] / two_w
            for p in range(indptr[i], indptr[i + 1]):
                h[spins[indices[p]]] += weights[p]
            best = s0
            for s in range(q):
                if h[s] > h[best] + 1e-12:
                    best = s
            if best != s0:
                spins[i] = best
                changed = True
            tot[best] += k[i]
    return spins


def spinglass(g: WeightedGraph, seed: int = 0, params: SpinglassParams | None = None) -> Partition:
    """Spin-glass communities of a connected graph.

    Raises :class:`DisconnectedGraphError` when ``g`` has more than one
    component; use :func:`spinglass_by_component` for those.
    """
    params = params or SpinglassParams()
    if g.n_nodes == 0:
        return Partition((), ())
    if g.n_nodes == 1:
        return Partition.singletons(g)
    if not g.is_connected():
        raise DisconnectedGraphError(
            "spinglass needs a connected graph; run it per component "
            "(spinglass_by_component)"
        )
    adj = g.adjacency()
    k = np.asarray(adj.sum(axis=1)).ravel()
    scale = k.mean()
    spins = _anneal(
        adj.indptr.astype(np.int64),
        adj.indices.astype(np.int64),
        adj.data / scale,
        k / scale,
        k.sum() / scale,
        int(params.spins_max),
        float(params.start_temp),
        float(params.end_temp),
        float(params.cooling),
        float(params.gamma),
        int(seed) % (2**32),
    )
    return Partition.of(g, spins)


def spinglass_by_component(g: WeightedGraph, seed: int = 0,
                           params: SpinglassParams | None = None) -> Partition:
    """Run :func:`spinglass` on each connected component and join the labels."""
    membership = [0] * g.n_nodes
    offset = 0
    for comp in g.components():
        sub = g.subgraph(comp)
        part = spinglass(sub, seed, params)
        for node, c in zip(comp, part.membership):
            membership[node] = c + offset
        offset += part.n_communities
    return Partition.of(g, membership)
