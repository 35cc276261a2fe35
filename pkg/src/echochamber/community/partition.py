"""Partitions of graph nodes, modularity, and the Rand index."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from ..graph import WeightedGraph, fingerprint


@dataclass(frozen=True)
class Partition:
    """Community label per node, relabelled to ``0..C-1`` in first-seen order."""

    membership: tuple[int, ...]
    node_ids: tuple[str, ...]

    def __post_init__(self):
        if len(self.membership) != len(self.node_ids):
            raise ValueError("membership and node_ids differ in length")
        relabel: dict[int, int] = {}
        canon = tuple(relabel.setdefault(c, len(relabel)) for c in self.membership)
        object.__setattr__(self, "membership", canon)

    @classmethod
    def of(cls, graph: WeightedGraph, membership: Sequence[int]) -> "Partition":
        return cls(tuple(int(c) for c in membership), graph.nodes)

    @classmethod
    def singletons(cls, graph: WeightedGraph) -> "Partition":
        return cls(tuple(range(graph.n_nodes)), graph.nodes)

    @property
    def fingerprint(self) -> str:
        return fingerprint(self.node_ids)

    @property
    def n_communities(self) -> int:
        return max(self.membership) + 1 if self.membership else 0

    def __len__(self) -> int:
        return len(self.membership)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.node_ids, self.membership))

    def communities(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_communities)]
        for node, c in enumerate(self.membership):
            out[c].append(node)
        return out


def modularity(g: WeightedGraph, p: Partition) -> float:
    """Weighted Newman-Girvan modularity.

    Q = sum_c [ w_in(c)/W - (s(c)/2W)^2 ] with W the total edge weight,
    w_in(c) the weight inside c and s(c) the summed strength of c's nodes.
    An edgeless graph has Q = 0.
    """
    if p.fingerprint != g.fingerprint:
        raise ValueError("partition was computed on a different node set")
    W = g.total_weight
    if W == 0:
        return 0.0
    memb = np.asarray(p.membership, dtype=np.int64)
    n_comm = p.n_communities
    same = memb[g.src] == memb[g.dst]
    w_in = np.bincount(memb[g.src][same], weights=g.weight[same].astype(float), minlength=n_comm)
    s = np.bincount(memb, weights=g.strength(), minlength=n_comm)
    return float(np.sum(w_in / W - (s / (2.0 * W)) ** 2))


def rand_index(p1: Partition, p2: Partition) -> float:
    """Unadjusted Rand index: share of node pairs on which the partitions agree."""
    if p1.fingerprint != p2.fingerprint or len(p1) != len(p2):
        raise ValueError("partitions cover different node sets")
    n = len(p1)
    if n < 2:
        return 1.0
    a = np.asarray(p1.membership)
    b = np.asarray(p2.membership)
    table = np.zeros((a.max() + 1, b.max() + 1), dtype=np.int64)
    np.add.at(table, (a, b), 1)

    def pairs(x):
        return int(np.sum(x * (x - 1) // 2))

    total = n * (n - 1) // 2
    together_both = pairs(table)
    together_a = pairs(table.sum(axis=1))
    together_b = pairs(table.sum(axis=0))
    apart_both = total - together_a - together_b + together_both
    return (together_both + apart_both) / total


def write_partition(p: Partition, out: IO[str]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("node_id", "community"))
    w.writerows(sorted(zip(p.node_ids, p.membership)))


def read_partition(src: IO[str], graph: WeightedGraph | None = None) -> Partition:
    """Read ``node_id,community``; node order follows ``graph`` when given, else sorted ids."""
    r = csv.reader(src)
    header = next(r, None)
    if header is None or [h.strip() for h in header] != ["node_id", "community"]:
        raise ValueError("partition file must start with header node_id,community")
    assign = {row[0]: int(row[1]) for row in r if row}
    ids = graph.nodes if graph is not None else tuple(sorted(assign))
    missing = [i for i in ids if i not in assign]
    if missing or len(assign) != len(ids):
        raise ValueError("partition does not cover the graph's node set")
    return Partition(tuple(assign[i] for i in ids), tuple(ids))
