import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import spearmanr

from echochamber.exposure import WINDOWS, UserProfile, build_profiles, exposure_curve
from echochamber.ingest import Dataset, InteractionRecord

DAY = 86_400


def ds(rows):
    return Dataset(tuple(InteractionRecord(*r) for r in rows))


def test_same_time_two_pages():
    (p,) = build_profiles(ds([("u", "p1", "a", "like", 0), ("u", "p2", "b", "like", 0)]))
    assert (p.lifetime_s, p.activity, p.windows["week"]) == (0, 2, 2)


def test_single_like():
    (p,) = build_profiles(ds([("u", "p1", "a", "like", 500)]))
    assert (p.lifetime_s, p.activity) == (0, 1)
    assert set(p.windows.values()) == {1}


def test_comments_ignored():
    profiles = build_profiles(ds([("u", "p1", "a", "comment", 0), ("v", "p1", "a", "like", 0)]))
    assert [p.user_id for p in profiles] == ["v"]


def brute_force(rows):
    """Recount distinct pages per user in every fixed bin, independently."""
    likes = [r for r in rows if r[3] == "like"]
    origin = min(r[4] for r in likes)
    out = {}
    for user in {r[0] for r in likes}:
        mine = [r for r in likes if r[0] == user]
        res = {}
        for w, width in WINDOWS.items():
            last = max((r[4] - origin) // width for r in mine)
            res[w] = max(len({r[1] for r in mine if (r[4] - origin) // width == b})
                         for b in range(last + 1))
        ts = [r[4] for r in mine]
        out[user] = (max(ts) - min(ts), len(mine), res)
    return out


def scripted(seed, n_users=100):
    rng = np.random.default_rng(seed)
    rows = []
    for u in range(n_users):
        for _ in range(rng.integers(1, 40)):
            rows.append((f"u{u}", f"p{rng.integers(30)}", "x", "like", int(rng.integers(0, 400 * DAY))))
    return rows


def test_profiles_match_recount():
    rows = scripted(0)
    oracle = brute_force(rows)
    profiles = build_profiles(ds(rows))
    assert len(profiles) == len(oracle)
    for p in profiles:
        assert (p.lifetime_s, p.activity, p.windows) == oracle[p.user_id]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_window_nesting_and_doubling(seed):
    rows = scripted(seed, n_users=10)
    profiles = build_profiles(ds(rows))
    for p in profiles:
        assert p.windows["week"] <= p.windows["month"] <= p.windows["quarter"] <= 30
    doubled = {p.user_id: p for p in build_profiles(ds(rows + rows))}
    for p in profiles:
        q = doubled[p.user_id]
        assert q.activity == 2 * p.activity and q.windows == p.windows


def test_curve_endpoints():
    profiles = [UserProfile("a", 0, 10, {"week": 5}), UserProfile("b", 0, 20, {"week": 2})]
    assert exposure_curve(profiles, "activity", "week", 10) == [(0.0, 0.5), (1.0, 0.2)]


def test_curve_single_user():
    pts = exposure_curve([UserProfile("a", 9, 3, {"week": 4})], "lifetime", "week", 8)
    assert pts == [(0.0, 0.5)]


def test_curve_trend_detected():
    rng = np.random.default_rng(3)
    profiles = []
    for k in range(500):
        act = int(rng.integers(1, 1000))
        pages = max(1, int(50 - act / 25 + rng.integers(0, 3)))
        profiles.append(UserProfile(f"u{k}", 0, act, {"week": pages}))
    pts = exposure_curve(profiles, "activity", "week", 60)
    xs, ys = zip(*pts)
    assert all(0 <= v <= 1 for v in xs + ys)
    assert spearmanr(xs, ys).statistic < 0


def test_curve_errors():
    with pytest.raises(ValueError):
        exposure_curve([], "activity", "week", 1)
    with pytest.raises(ValueError):
        exposure_curve([UserProfile("a", 0, 1, {"week": 1})], "activity", "week", 0)
