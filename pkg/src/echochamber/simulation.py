"""Bounded confidence model with per-user trust, and its community structure.

Pages have fixed editorial lines c_p ~ U[0, 1]. Users start with an opinion
theta_u ~ U[0, 1], a trust tau_u drawn from a normal truncated to [0, 1] and
an activity a_u from a discrete power law. In every round each user samples
a_u distinct pages; a sampled page within the tolerance of the current
opinion is liked and pulls the opinion toward it:

    theta_u <- (1 - tau_u) * theta_u + tau_u * c_p

Rounds continue until no opinion moves by more than ``convergence_eps`` in a
round or ``max_rounds`` is hit. Likes accumulate, and the resulting
user-page graph is projected onto pages and split into communities.
"""
from __future__ import annotations

import dataclasses
import math
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np
import scipy.sparse as sp

from .community import fastgreedy, multilevel
from .graph import BipartiteGraph, bipartite_from_matrix, project_pages


@dataclass(frozen=True)
class SimConfig:
    n_pages: int = 100
    n_users: int = 10_000
    tolerance: float = 0.2
    trust_mean: float = 0.1
    trust_sd: float = 0.1
    activity_exponent: float = 3.0
    activity_max: int | None = None  # defaults to n_pages
    max_rounds: int = 1000
    convergence_eps: float = 1e-6
    seed: int = 0
    one_shot: bool = False
    method: str = "multilevel"

    def __post_init__(self):
        if self.n_pages < 2:
            raise ValueError("n_pages must be >= 2")
        if self.n_users < 1:
            raise ValueError("n_users must be >= 1")
        if not 0 < self.tolerance <= 1:
            raise ValueError("tolerance must lie in (0, 1]")
        if not 0 < self.trust_mean < 1:
            raise ValueError("trust_mean must lie in (0, 1)")
        if self.trust_sd <= 0:
            raise ValueError("trust_sd must be positive")
        if self.activity_max is not None and self.activity_max < 1:
            raise ValueError("activity_max must be >= 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.method not in ("multilevel", "fastgreedy"):
            raise ValueError("method must be multilevel or fastgreedy")

    @property
    def max_activity(self) -> int:
        return self.n_pages if self.activity_max is None else self.activity_max

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config(text: str, **overrides) -> SimConfig:
    """Parse flat ``key = value`` lines (``#`` starts a comment)."""
    types = {f.name: f.type for f in dataclasses.fields(SimConfig)}
    values: dict = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {n}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ValueError(f"config line {n}: unknown key {key!r}")
        values[key] = _coerce(types[key], raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig(**values)


def _coerce(typ: str, raw: str):
    if raw.lower() in ("none", "") and "None" in typ:
        return None
    if typ.startswith("bool"):
        if raw.lower() in ("1", "true", "yes"):
            return True
        if raw.lower() in ("0", "false", "no"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if typ.startswith("int"):
        return int(raw)
    if typ.startswith("float"):
        return float(raw)
    return raw


@dataclass(frozen=True, eq=False)
class Population:
    editorial: np.ndarray  # c_p per page
    opinion: np.ndarray  # theta_u per user
    trust: np.ndarray  # tau_u per user
    activity: np.ndarray  # a_u per user


def truncated_normal(rng: np.random.Generator, mean: float, sd: float, size: int,
                     lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Normal draws restricted to [lo, hi] by rejection."""
    out = rng.normal(mean, sd, size)
    bad = (out < lo) | (out > hi)
    while bad.any():
        out[bad] = rng.normal(mean, sd, int(bad.sum()))
        bad = (out < lo) | (out > hi)
    return out


def discrete_powerlaw(rng: np.random.Generator, gamma: float, a_max: int, size: int) -> np.ndarray:
    """Inverse-CDF draws from p(a) proportional to a^-gamma on 1..a_max."""
    support = np.arange(1, a_max + 1, dtype=float)
    cdf = np.cumsum(support ** -gamma)
    cdf /= cdf[-1]
    a = np.searchsorted(cdf, rng.random(size), side="right") + 1
    return np.minimum(a, a_max).astype(np.int64)


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent generators for the population draw and the dynamics."""
    pop_ss, dyn_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(pop_ss), np.random.default_rng(dyn_ss)


def init_population(cfg: SimConfig) -> Population:
    rng, _ = _streams(cfg.seed)
    editorial = rng.random(cfg.n_pages)
    opinion = rng.random(cfg.n_users)
    trust = truncated_normal(rng, cfg.trust_mean, cfg.trust_sd, cfg.n_users)
    activity = discrete_powerlaw(rng, cfg.activity_exponent, cfg.max_activity, cfg.n_users)
    return Population(editorial, opinion, trust, activity)


@numba.njit(cache=True)
def _one_round(editorial, opinion, trust, activity, tolerance, order, uniforms, deck, liked):
    """One sweep over users in ``order``; returns the largest opinion step."""
    n_pages = editorial.shape[0]
    max_step = 0.0
    pos = 0
    for idx in range(order.shape[0]):
        u = order[idx]
        a = min(activity[u], n_pages)
        # partial Fisher-Yates: deck[:a] becomes a uniform sample without replacement
        for k in range(a):
            j = k + int(uniforms[pos] * (n_pages - k))
            pos += 1
            tmp = deck[k]
            deck[k] = deck[j]
            deck[j] = tmp
        for k in range(a):
            p = deck[k]
            if abs(editorial[p] - opinion[u]) < tolerance:
                liked[u, p] = True
                new = (1.0 - trust[u]) * opinion[u] + trust[u] * editorial[p]
                step = abs(new - opinion[u])
                if step > max_step:
                    max_step = step
                opinion[u] = new
    return max_step


@dataclass(frozen=True, eq=False)
class SimResult:
    config: SimConfig
    population: Population
    opinions: np.ndarray
    liked: np.ndarray  # bool, users x pages
    rounds: int
    converged: bool

    @property
    def n_likes(self) -> int:
        return int(self.liked.sum())

    def bipartite(self) -> BipartiteGraph:
        pages = tuple(f"p{i}" for i in range(self.liked.shape[1]))
        users = tuple(f"u{i}" for i in range(self.liked.shape[0]))
        return bipartite_from_matrix(pages, users, sp.csr_matrix(self.liked.T), "like")

    def edges(self) -> list[tuple[int, int]]:
        """(user, page) index pairs of every like."""
        u, p = np.nonzero(self.liked)
        return list(zip(u.tolist(), p.tolist()))


def run(cfg: SimConfig, population: Population | None = None) -> SimResult:
    """Run the opinion dynamics. ``population`` overrides the seeded draw."""
    if population is None:
        population = init_population(cfg)
    _, rng = _streams(cfg.seed)
    editorial = population.editorial.astype(float)
    opinion = population.opinion.astype(float).copy()
    trust = population.trust.astype(float)
    activity = np.minimum(population.activity.astype(np.int64), len(editorial))
    n_draws = int(activity.sum())
    liked = np.zeros((len(opinion), len(editorial)), dtype=np.bool_)
    deck = np.arange(len(editorial))
    rounds = 0
    converged = False
    while rounds < cfg.max_rounds:
        rounds += 1
        order = rng.permutation(len(opinion))
        uniforms = rng.random(n_draws)
        step = _one_round(editorial, opinion, trust, activity, float(cfg.tolerance),
                          order, uniforms, deck, liked)
        if step < cfg.convergence_eps:
            converged = True
            break
        if cfg.one_shot:
            break
    return SimResult(cfg, population, opinion, liked, rounds, converged)


def project_and_count(r: SimResult, method: str | None = None) -> int:
    """Number of communities in the page projection of the simulated likes.

    Pages nobody shares with another page count as their own community.
    """
    if r.n_likes == 0:
        return r.liked.shape[1]
    g = project_pages(r.bipartite())
    method = method or r.config.method
    if method == "fastgreedy":
        part = fastgreedy(g)
    else:
        part = multilevel(g, seed=r.config.seed)
    return part.n_communities


def derive_seed(base_seed: int, value: float, iteration: int) -> int:
    """Seed for one sweep run, keyed by the swept value rather than its position."""
    bits = struct.unpack("<Q", struct.pack("<d", float(value)))[0]
    ss = np.random.SeedSequence([int(base_seed), bits, int(iteration)])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


@dataclass(frozen=True)
class SweepPoint:
    value: float
    mean: float
    sd: float
    iterations: int
    counts: tuple[int, ...]

    @property
    def stderr(self) -> float:
        return self.sd / math.sqrt(self.iterations)


def _one(cfg: SimConfig) -> int:
    return project_and_count(run(cfg))


def sweep(base: SimConfig, param: str, values, iterations: int = 100, jobs: int = 1) -> list[SweepPoint]:
    """Mean community count over ``iterations`` seeded runs per value of ``param``."""
    values = list(values)
    if not values:
        raise ValueError("empty sweep grid")
    if param not in {f.name for f in dataclasses.fields(SimConfig)}:
        raise ValueError(f"unknown parameter {param!r}")
    cfgs = [
        dataclasses.replace(base, **{param: v, "seed": derive_seed(base.seed, v, it)})
        for v in values
        for it in range(iterations)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            counts = list(pool.map(_one, cfgs, chunksize=max(1, len(cfgs) // (4 * jobs))))
    else:
        counts = [_one(c) for c in cfgs]
    out = []
    for k, v in enumerate(values):
        c = np.array(counts[k * iterations:(k + 1) * iterations], dtype=float)
        sd = float(c.std(ddof=1)) if iterations > 1 else 0.0
        out.append(SweepPoint(float(v), float(c.mean()), sd, iterations, tuple(int(x) for x in c)))
    return out


def trust_sweep(base: SimConfig, trust_means, iterations: int = 100, jobs: int = 1) -> list[SweepPoint]:
    return sweep(base, "trust_mean", trust_means, iterations, jobs)
