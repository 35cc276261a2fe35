"""User localization across page communities and cross-dataset ranking.

A user whose likes split over communities with shares phi has
localization L = (sum phi^2)^2 / sum phi^4: 1 when every like falls in one
community, N when the likes are spread evenly over N communities.
"""
from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .community import Partition
from .ingest import Dataset
from .stats import empirical_ccdf

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CommunityShares:
    counts: np.ndarray  # likes per community, length N

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def phi(self) -> np.ndarray:
        return self.counts / self.counts.sum()


def community_shares(user_likes: Mapping[str, int], p: Partition) -> CommunityShares:
    """Sum a user's per-page like counts by the community of each page."""
    where = p.as_dict()
    counts = np.zeros(p.n_communities, dtype=np.int64)
    for page, k in user_likes.items():
        if page not in where:
            raise KeyError(f"page {page!r} is not in the partition")
        counts[where[page]] += k
    if counts.sum() < 1:
        raise ValueError("user has no likes")
    return CommunityShares(counts)


def localization(phi) -> float:
    """L[phi] = (sum phi^2)^2 / sum phi^4.

    Accepts normalized shares or raw counts (the ratio is scale-free), or a
    :class:`CommunityShares`.
    """
    if isinstance(phi, CommunityShares):
        phi = phi.counts
    v = np.asarray(phi, dtype=float)
    if np.any(v < 0):
        raise ValueError("shares must be non-negative")
    if not np.any(v > 0):
        raise ValueError("localization of an all-zero share vector")
    v = v / v.max()  # keeps phi^4 away from underflow
    s2 = np.dot(v, v)
    return float(s2 * s2 / np.sum(v ** 4))


@dataclass(frozen=True, eq=False)
class LocalizationSample:
    users: tuple[str, ...]
    values: np.ndarray
    min_likes: int
    n_communities: int
    partition_fingerprint: str
    skipped_users: int = 0

    def __len__(self) -> int:
        return len(self.users)

    @property
    def median(self) -> float:
        return float(np.median(self.values))

    def ccdf(self):
        return empirical_ccdf(self.values)

    def pdf(self, bins: int = 200):
        """Density over log-spaced bins on [1, N]; returns (edges, density)."""
        hi = max(float(self.n_communities), 1.0 + 1e-9)
        edges = np.geomspace(1.0, hi, bins + 1)
        # L = N exactly sits on the last edge, which np.histogram includes
        dens, edges = np.histogram(np.clip(self.values, 1.0, hi), bins=edges, density=True)
        return edges, dens


def user_page_likes(d: Dataset) -> dict[str, Counter]:
    likes: dict[str, Counter] = defaultdict(Counter)
    for r in d.records:
        if r.action == "like":
            likes[r.user_id][r.page_id] += 1
    return likes


def localization_distribution(d: Dataset, p: Partition, min_likes: int = 10) -> LocalizationSample:
    """L for every user with at least ``min_likes`` likes.

    Users who liked a page missing from ``p`` are skipped and counted.
    """
    where = p.as_dict()
    users, values = [], []
    skipped = 0
    for user, pages in sorted(user_page_likes(d).items()):
        if sum(pages.values()) < min_likes:
            continue
        if any(pg not in where for pg in pages):
            skipped += 1
            continue
        values.append(localization(community_shares(pages, p)))
        users.append(user)
    if skipped:
        log.warning("skipped %d users liking pages outside the partition", skipped)
    if not users:
        raise ValueError(f"no user has at least {min_likes} likes on partitioned pages")
    return LocalizationSample(tuple(users), np.array(values), min_likes,
                              p.n_communities, p.fingerprint, skipped)


def polarized_fraction(s: LocalizationSample, threshold: float = 1.05) -> float:
    """Share of users with L below ``threshold``."""
    if threshold <= 1:
        raise ValueError("threshold must exceed 1")
    return float(np.mean(np.asarray(s.values) < threshold))


@dataclass(frozen=True)
class Ranking:
    order: tuple[str, ...]  # most polarized first
    medians: dict[str, float]
    ties: tuple[tuple[str, ...], ...] = ()

    @property
    def has_ties(self) -> bool:
        return bool(self.ties)


def polarization_rank(samples: Mapping[str, "LocalizationSample | float"]) -> Ranking:
    """Order datasets from most to least polarized, i.e. by ascending median L.

    Values may be samples or bare medians. Equal medians are ordered by label
    and reported in ``ties``.
    """
    medians = {label: float(getattr(s, "median", s)) for label, s in samples.items()}
    order = tuple(sorted(medians, key=lambda lab: (medians[lab], lab)))
    groups: dict[float, list[str]] = defaultdict(list)
    for lab in order:
        groups[medians[lab]].append(lab)
    ties = tuple(tuple(g) for g in groups.values() if len(g) > 1)
    return Ranking(order, medians, ties)
