"""Selective exposure: how many distinct pages a user likes per time window."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .ingest import Dataset

DAY = 86_400
# widths nest (each divides the next), so a longer window never sees fewer pages
WINDOWS = {"week": 7 * DAY, "month": 28 * DAY, "quarter": 84 * DAY}
METRICS = ("lifetime", "activity")
N_BINS = 100


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    lifetime_s: int
    activity: int
    windows: dict[str, int] = field(default_factory=dict)


def build_profiles(d: Dataset, origin: int | None = None) -> list[UserProfile]:
    """Per-user like lifetime, like count, and max distinct pages per window.

    Windows are fixed consecutive bins of 7, 28 and 84 days starting at
    ``origin`` (default: the earliest like in ``d``). Comments and shares are
    ignored; users without likes get no profile.
    """
    likes = [r for r in d.records if r.action == "like"]
    if not likes:
        return []
    if origin is None:
        origin = min(r.timestamp for r in likes)
    times: dict[str, list[int]] = defaultdict(list)
    bins: dict[str, dict[tuple[str, int], set]] = {w: defaultdict(set) for w in WINDOWS}
    for r in likes:
        times[r.user_id].append(r.timestamp)
        for w, width in WINDOWS.items():
            bins[w][(r.user_id, (r.timestamp - origin) // width)].add(r.page_id)
    best = {w: defaultdict(int) for w in WINDOWS}
    for w, per_bin in bins.items():
        for (user, _), pages in per_bin.items():
            if len(pages) > best[w][user]:
                best[w][user] = len(pages)
    return [
        UserProfile(user, max(ts) - min(ts), len(ts), {w: best[w][user] for w in WINDOWS})
        for user, ts in sorted(times.items())
    ]


def _minmax(v: np.ndarray) -> np.ndarray:
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros_like(v, dtype=float)
    return (v - lo) / (hi - lo)


def exposure_curve(profiles, by: str = "activity", window: str = "week",
                   total_pages: int = 1, n_bins: int = N_BINS) -> list[tuple[float, float]]:
    """Standardized metric vs. max unique pages per window (as a share of all pages).

    Users fall into ``n_bins`` equal-width bins of the min-max standardized
    metric; each non-empty bin yields one point at the mean x of its users
    and the largest y among them.
    """
    if by not in METRICS:
        raise ValueError(f"by must be one of {METRICS}")
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {tuple(WINDOWS)}")
    if total_pages < 1:
        raise ValueError("total_pages must be >= 1")
    profiles = list(profiles)
    if not profiles:
        raise ValueError("no profiles")
    metric = np.array([p.lifetime_s if by == "lifetime" else p.activity for p in profiles], dtype=float)
    x = _minmax(metric)
    y = np.array([p.windows[window] for p in profiles], dtype=float) / total_pages
    idx = np.minimum((x * n_bins).astype(np.int64), n_bins - 1)
    points = []
    for b in np.unique(idx):
        sel = idx == b
        points.append((float(x[sel].mean()), float(y[sel].max())))
    return points
