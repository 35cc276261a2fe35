#!/usr/bin/env python
"""Regenerate the bundled toy corpus and its golden values.

Writes into src/echochamber/data/:
  toy_interactions.csv  1,000 interaction rows over two countries
  toy_pages.csv         16 pages, two editorial camps per country
  toy_summary.json      counts from a plain csv/set recount of the file
  toy_golden.json       pipeline outputs frozen at generation time

Run from the repository root: ``python scripts/make_toy.py``.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

DATA = Path(__file__).resolve().parents[1] / "src" / "echochamber" / "data"
N_ROWS = 1000
COUNTRIES = {"IT": 0.02, "FR": 0.15}  # chance a like lands in the other camp
PAGES_PER_CAMP = 4
POSTS_PER_PAGE = 5
USERS_PER_COUNTRY = 30
T0 = 1_451_606_400  # 2016-01-01
SPAN = 180 * 86_400
SEED = 20160101


def generate():
    rng = np.random.default_rng(SEED)
    pages = []
    for cc in COUNTRIES:
        for camp in "AB":
            for k in range(1, PAGES_PER_CAMP + 1):
                pages.append((f"{cc}{camp}{k}", f"{cc} camp {camp} outlet {k}", cc))
    posts = {p[0]: [f"{p[0]}-x{j}" for j in range(1, POSTS_PER_PAGE + 1)] for p in pages}
    # heavy-tailed popularity over all posts of a country
    post_weight = {}
    for cc in COUNTRIES:
        ids = [x for p in pages if p[2] == cc for x in posts[p[0]]]
        w = rng.pareto(1.2, len(ids)) + 1.0
        post_weight.update(zip(ids, w))
    users = {}
    for cc in COUNTRIES:
        for k in range(1, USERS_PER_COUNTRY + 1):
            users[f"{cc.lower()}{k:02d}"] = (cc, "AB"[k % 2], rng.pareto(1.5) + 1.0)

    rows = []
    user_ids = sorted(users)
    for _ in range(N_ROWS):
        cc = list(COUNTRIES)[rng.integers(len(COUNTRIES))]
        pool = [u for u in user_ids if users[u][0] == cc]
        act = np.array([users[u][2] for u in pool])
        user = pool[rng.choice(len(pool), p=act / act.sum())]
        camp = users[user][1]
        action = rng.choice(["like", "comment", "share"], p=[0.75, 0.2, 0.05])
        if rng.random() < COUNTRIES[cc]:
            camp = "B" if camp == "A" else "A"
        cand = [x for p in pages if p[2] == cc and p[0][2] == camp for x in posts[p[0]]]
        w = np.array([post_weight[x] for x in cand])
        post = cand[rng.choice(len(cand), p=w / w.sum())]
        page = post.split("-")[0]
        ts = T0 + int(rng.integers(SPAN))
        rows.append((user, page, post, str(action), ts))
    rows.sort(key=lambda r: (r[4], r[0], r[2]))
    return pages, rows


def recount(interactions_text: str, pages_text: str, country: str | None = None) -> dict:
    """Breakdown counts from the raw files, without the library."""
    page_country = {r["page_id"]: r["country"] for r in csv.DictReader(io.StringIO(pages_text))}
    rows = [r for r in csv.DictReader(io.StringIO(interactions_text))
            if country is None or page_country[r["page_id"]] == country]
    likers = {r["user_id"] for r in rows if r["action"] == "like"}
    commenters = {r["user_id"] for r in rows if r["action"] == "comment"}
    return {
        "pages": sum(1 for c in page_country.values() if country is None or c == country),
        "posts": len({r["post_id"] for r in rows}),
        "likes": sum(r["action"] == "like" for r in rows),
        "likers": len(likers),
        "comments": sum(r["action"] == "comment" for r in rows),
        "commenters": len(commenters),
        "shares": sum(r["action"] == "share" for r in rows),
        "users": len(likers | commenters),
    }


def pipeline_goldens(interactions: Path, pages: Path) -> dict:
    from echochamber.community import fastgreedy, modularity, multilevel, rand_index
    from echochamber.graph import build_bipartite, project_pages
    from echochamber.ingest import counts_per, filter_dataset, parse_interactions
    from echochamber.polarization import localization_distribution, polarization_rank, polarized_fraction
    from echochamber.stats import fit_powerlaw

    d = parse_interactions(interactions, pages)
    out = {"countries": {}}
    samples = {}
    for cc in COUNTRIES:
        dc = filter_dataset(d, country=cc)
        g = project_pages(build_bipartite(dc, "like"))
        fg = fastgreedy(g)
        ml = multilevel(g, seed=0)
        s = localization_distribution(dc, fg, min_likes=10)
        samples[cc] = s
        out["countries"][cc] = {
            "n_nodes": g.n_nodes,
            "n_edges": g.n_edges,
            "total_weight": int(g.total_weight),
            "fastgreedy": fg.as_dict(),
            "fastgreedy_modularity": modularity(g, fg),
            "multilevel_rand_vs_fastgreedy": rand_index(fg, ml),
            "localization": {
                "median": s.median,
                "n_users": len(s),
                "polarized_fraction": polarized_fraction(s),
            },
        }
    out["ranking"] = list(polarization_rank(samples).order)
    out["fit_powerlaw_post_likes"] = fit_powerlaw(counts_per(d, "post", "like")).as_dict()
    return out


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    pages, rows = generate()
    pbuf, ibuf = io.StringIO(), io.StringIO()
    pw = csv.writer(pbuf, lineterminator="\n")
    pw.writerow(("page_id", "page_name", "country"))
    pw.writerows(sorted(pages))
    iw = csv.writer(ibuf, lineterminator="\n")
    iw.writerow(("user_id", "page_id", "post_id", "action", "timestamp"))
    iw.writerows(rows)
    (DATA / "toy_pages.csv").write_text(pbuf.getvalue())
    (DATA / "toy_interactions.csv").write_text(ibuf.getvalue())

    summary = {"all": recount(ibuf.getvalue(), pbuf.getvalue())}
    for cc in COUNTRIES:
        summary[cc] = recount(ibuf.getvalue(), pbuf.getvalue(), cc)
    (DATA / "toy_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    golden = pipeline_goldens(DATA / "toy_interactions.csv", DATA / "toy_pages.csv")
    (DATA / "toy_golden.json").write_text(json.dumps(golden, indent=2, sort_keys=True) + "\n")
    print(json.dumps(summary["all"]), golden["ranking"])


if __name__ == "__main__":
    main()
