"""Bipartite page/user graphs and their weighted one-mode projections."""
from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from typing import IO

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .ingest import Dataset

GRAPH_ACTIONS = ("like", "comment")


class ProjectionTooLarge(ValueError):
    pass


def fingerprint(node_ids) -> str:
    h = hashlib.sha256()
    for n in node_ids:
        h.update(str(n).encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class BipartiteGraph:
    """Binary incidence between pages (rows) and users (columns)."""

    pages: tuple[str, ...]
    users: tuple[str, ...]
    incidence: sp.csr_matrix
    action: str = "like"

    @property
    def n_edges(self) -> int:
        return int(self.incidence.nnz)

    def user_degrees(self) -> np.ndarray:
        return np.asarray(self.incidence.sum(axis=0)).ravel().astype(np.int64)

    def neighbors_of_page(self, i: int) -> np.ndarray:
        m = self.incidence
        return m.indices[m.indptr[i]:m.indptr[i + 1]]


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph with positive integer weights and no self-loops.

    Edges are stored as parallel arrays with ``src < dst``, sorted by
    ``(src, dst)``. Isolated nodes are kept.
    """

    nodes: tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        if len(self.src) and (np.any(self.src >= self.dst) or np.any(self.weight <= 0)):
            raise ValueError("edges must satisfy src < dst with positive weight")

    @classmethod
    def from_edges(cls, nodes, edges) -> "WeightedGraph":
        """Build from ``(i, j, w)`` index triples; duplicates are summed."""
        nodes = tuple(nodes)
        acc: dict[tuple[int, int], float] = {}
        for i, j, w in edges:
            if i == j:
                continue
            key = (i, j) if i < j else (j, i)
            acc[key] = acc.get(key, 0) + w
        keys = sorted(acc)
        src = np.array([k[0] for k in keys], dtype=np.int64)
        dst = np.array([k[1] for k in keys], dtype=np.int64)
        weight = np.array([acc[k] for k in keys])
        if weight.size == 0 or np.all(weight == np.round(weight)):
            weight = weight.astype(np.int64)
        return cls(nodes, src, dst, weight)

    @classmethod
    def from_matrix(cls, nodes, mat) -> "WeightedGraph":
        """Build from a symmetric (sparse or dense) co-occurrence matrix; the diagonal is dropped."""
        coo = sp.triu(sp.csr_matrix(mat), k=1).tocoo()
        keep = coo.data > 0
        order = np.lexsort((coo.col[keep], coo.row[keep]))
        return cls(
            tuple(nodes),
            coo.row[keep][order].astype(np.int64),
            coo.col[keep][order].astype(np.int64),
            coo.data[keep][order].astype(np.int64),
        )

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    @property
    def fingerprint(self) -> str:
        return fingerprint(self.nodes)

    def edges(self):
        return zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist())

    def strength(self) -> np.ndarray:
        """Weighted degree of each node."""
        s = np.zeros(self.n_nodes)
        np.add.at(s, self.src, self.weight)
        np.add.at(s, self.dst, self.weight)
        return s

    def adjacency(self) -> sp.csr_matrix:
        n = self.n_nodes
        a = sp.coo_matrix((self.weight.astype(float), (self.src, self.dst)), shape=(n, n))
        return (a + a.T).tocsr()

    def neighbor_lists(self) -> list[dict[int, float]]:
        adj: list[dict[int, float]] = [{} for _ in range(self.n_nodes)]
        for i, j, w in self.edges():
            adj[i][j] = w
            adj[j][i] = w
        return adj

    def min_weight(self, threshold: int) -> "WeightedGraph":
        keep = self.weight >= threshold
        return WeightedGraph(self.nodes, self.src[keep], self.dst[keep], self.weight[keep])

    def components(self) -> list[list[int]]:
        n_comp, labels = csgraph.connected_components(self.adjacency(), directed=False)
        out: list[list[int]] = [[] for _ in range(n_comp)]
        for node, c in enumerate(labels):
            out[c].append(node)
        return out

    def is_connected(self) -> bool:
        return self.n_nodes > 0 and len(self.components()) == 1

    def subgraph(self, nodes: list[int]) -> "WeightedGraph":
        index = {n: k for k, n in enumerate(nodes)}
        edges = [(index[i], index[j], w) for i, j, w in self.edges() if i in index and j in index]
        return WeightedGraph.from_edges([self.nodes[n] for n in nodes], edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )


def build_bipartite(d: Dataset, action: str = "like") -> BipartiteGraph:
    """Incidence of ``action`` between pages and users, multiplicity collapsed to 1.

    Page and user indices follow lexicographic order of their ids. Every page
    known to the dataset (pages table or any record) is a row, so pages without
    this action stay as isolated nodes; users are those with the action.
    """
    if action not in GRAPH_ACTIONS:
        raise ValueError(f"graphs are built from likes or comments, not {action!r}")
    recs = [r for r in d.records if r.action == action]
    page_ids = sorted(set(d.pages) | {r.page_id for r in d.records})
    user_ids = sorted({r.user_id for r in recs})
    pidx = {p: i for i, p in enumerate(page_ids)}
    uidx = {u: i for i, u in enumerate(user_ids)}
    rows = np.fromiter((pidx[r.page_id] for r in recs), dtype=np.int64, count=len(recs))
    cols = np.fromiter((uidx[r.user_id] for r in recs), dtype=np.int64, count=len(recs))
    m = sp.csr_matrix(
        (np.ones(len(recs), dtype=np.int64), (rows, cols)),
        shape=(len(page_ids), len(user_ids)),
    )
    m.data[:] = 1  # duplicates were summed by the constructor
    return BipartiteGraph(tuple(page_ids), tuple(user_ids), m, action)


def bipartite_from_matrix(pages, users, incidence, action: str = "like") -> BipartiteGraph:
    m = sp.csr_matrix(incidence, dtype=np.int64)
    m.eliminate_zeros()
    m.data[:] = 1
    return BipartiteGraph(tuple(pages), tuple(users), m, action)


def _cooccurrence(m: sp.csr_matrix):
    """Row-by-row overlap counts m @ m.T; dense BLAS when the result is small and filled."""
    rows, cols = m.shape
    if rows <= 2000 and m.nnz > 0.02 * rows * cols:
        d = m.toarray().astype(np.float64)
        return np.rint(d @ d.T).astype(np.int64)
    return m @ m.T


def project_pages(b: BipartiteGraph) -> WeightedGraph:
    """Page-page graph weighted by the number of shared users (MM^T, off-diagonal)."""
    return WeightedGraph.from_matrix(b.pages, _cooccurrence(b.incidence))


def project_users(b: BipartiteGraph, max_users: int = 20_000) -> WeightedGraph:
    """User-user graph weighted by the number of shared pages (M^T M, off-diagonal).

    The output can hold up to |U|^2/2 edges, so projections above
    ``max_users`` users are refused.
    """
    if len(b.users) > max_users:
        raise ProjectionTooLarge(
            f"{len(b.users)} users exceeds the user-projection cap of {max_users}; "
            "raise max_users to proceed"
        )
    return WeightedGraph.from_matrix(b.users, _cooccurrence(b.incidence.T.tocsr()))


def write_graph(g: WeightedGraph, edges_out: IO[str], nodes_out: IO[str]) -> None:
    """Write ``node_id,label`` and ``src,dst,weight`` files, rows sorted by id."""
    w = csv.writer(nodes_out, lineterminator="\n")
    w.writerow(("node_id", "label"))
    for i, label in sorted(enumerate(g.nodes), key=lambda t: t[1]):
        w.writerow((label, label))
    rows = []
    for i, j, wt in g.edges():
        a, b = g.nodes[i], g.nodes[j]
        rows.append((a, b, wt) if a < b else (b, a, wt))
    rows.sort()
    w = csv.writer(edges_out, lineterminator="\n")
    w.writerow(("src", "dst", "weight"))
    w.writerows(rows)


def read_graph(edges_in: IO[str], nodes_in: IO[str] | None = None) -> WeightedGraph:
    """Inverse of :func:`write_graph`. Without a nodes file, nodes come from the edges."""
    labels: list[str] = []
    if nodes_in is not None:
        r = csv.reader(nodes_in)
        header = next(r, None)
        if header is None or [h.strip() for h in header] != ["node_id", "label"]:
            raise ValueError("nodes file must start with header node_id,label")
        labels = [row[0] for row in r if row]
    r = csv.reader(edges_in)
    header = next(r, None)
    if header is None or [h.strip() for h in header] != ["src", "dst", "weight"]:
        raise ValueError("edges file must start with header src,dst,weight")
    raw = []
    for row in r:
        if not row:
            continue
        if len(row) != 3:
            raise ValueError(f"malformed edge row {row!r}")
        w = float(row[2])
        raw.append((row[0], row[1], int(w) if w == int(w) else w))
    if nodes_in is None:
        labels = sorted({a for a, _, _ in raw} | {b for _, b, _ in raw})
    labels = sorted(labels)
    index = {lab: k for k, lab in enumerate(labels)}
    missing = {x for a, b, _ in raw for x in (a, b)} - index.keys()
    if missing:
        raise ValueError(f"edges reference unknown nodes: {sorted(missing)[:5]}")
    return WeightedGraph.from_edges(labels, [(index[a], index[b], w) for a, b, w in raw])
