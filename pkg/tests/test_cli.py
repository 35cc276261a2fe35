import csv
import json
import subprocess
import sys

import pytest

from echochamber.cli import SUBCOMMANDS, main


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def toy(data_dir):
    return str(data_dir / "toy_interactions.csv"), str(data_dir / "toy_pages.csv")


def run_ok(argv):
    assert main(argv) == 0, argv


def rerun_from_manifest(outdir):
    """Replay the recorded argv and return (before, after) bytes of every file."""
    before = {p.name: p.read_bytes() for p in outdir.iterdir()}
    argv = json.loads((outdir / "manifest.json").read_text())["argv"]
    assert main(argv) == 0
    after = {p.name: p.read_bytes() for p in outdir.iterdir()}
    return before, after


def test_summarize(tmp_path, toy, data_dir):
    inter, pages = toy
    run_ok(["summarize", "--in", inter, "--pages", pages, "--out", str(tmp_path)])
    got = json.loads((tmp_path / "summary.json").read_text())
    expected = json.loads((data_dir / "toy_summary.json").read_text())
    assert got == expected["all"]
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["subcommand"] == "summarize" and m["seed"] == 0
    assert [i["path"] for i in m["inputs"]] == [inter, pages]
    assert m["outputs"] == ["summary.json"]
    assert "lenient" in m["parameters"]


def test_project_communities_localization_rank(tmp_path, toy):
    inter, pages = toy
    summaries = []
    for cc in ("IT", "FR"):
        d = tmp_path / cc
        run_ok(["project", "--in", inter, "--pages", pages, "--country", cc, "--out", str(d)])
        run_ok(["communities", "--in", str(d / "edges.csv"), "--nodes", str(d / "nodes.csv"),
                "--method", "fastgreedy", "--out", str(d / "fg")])
        run_ok(["localization", "--in", inter, "--pages", pages, "--country", cc,
                "--partition", str(d / "fg" / "partition.csv"), "--out", str(d / "loc")])
        summaries.append(str(d / "loc" / "localization.json"))
    run_ok(["rank", "--in", summaries[0], "--in", summaries[1], "--out", str(tmp_path / "rank")])
    ranking = json.loads((tmp_path / "rank" / "ranking.json").read_text())
    assert sorted(ranking["order"]) == ["FR", "IT"]
    assert ranking["most_polarized"] == ranking["order"][0]


def test_compare(tmp_path, toy):
    inter, pages = toy
    run_ok(["project", "--in", inter, "--pages", pages, "--country", "IT", "--out", str(tmp_path)])
    for method in ("fastgreedy", "multilevel"):
        run_ok(["communities", "--in", str(tmp_path / "edges.csv"), "--nodes", str(tmp_path / "nodes.csv"),
                "--method", method, "--out", str(tmp_path / method)])
    run_ok(["compare", "--in", str(tmp_path / "fastgreedy" / "partition.csv"),
            "--in", str(tmp_path / "multilevel" / "partition.csv"),
            "--labels", "FG,ML", "--out", str(tmp_path / "cmp")])
    out = json.loads((tmp_path / "cmp" / "compare.json").read_text())
    assert out["method_a"] == "FG" and 0 <= out["rand_index"] <= 1


def test_spinglass_via_cli_is_seeded(tmp_path, toy):
    inter, pages = toy
    run_ok(["project", "--in", inter, "--pages", pages, "--out", str(tmp_path)])
    run_ok(["communities", "--in", str(tmp_path / "edges.csv"), "--nodes", str(tmp_path / "nodes.csv"),
            "--method", "spinglass", "--seed", "3", "--out", str(tmp_path / "sg")])
    before, after = rerun_from_manifest(tmp_path / "sg")
    assert before == after


def test_fit_matches_golden(tmp_path, toy, data_dir):
    inter, pages = toy
    run_ok(["fit", "--in", inter, "--pages", pages, "--family", "powerlaw", "--out", str(tmp_path)])
    got = json.loads((tmp_path / "fit.json").read_text())
    golden = json.loads((data_dir / "toy_golden.json").read_text())["fit_powerlaw_post_likes"]
    assert got == golden


def test_fit_all_and_values_file(tmp_path):
    vals = tmp_path / "v.csv"
    vals.write_text("value\n" + "\n".join(str(v) for v in [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]) + "\n")
    run_ok(["fit", "--values", "--in", str(vals), "--family", "all", "--out", str(tmp_path / "o")])
    out = json.loads((tmp_path / "o" / "fit.json").read_text())
    assert set(out) == {"powerlaw", "poisson", "lognormal", "exponential"}
    run_ok(["ccdf", "--values", "--in", str(vals), "--out", str(tmp_path / "c")])
    rows = read_csv(tmp_path / "c" / "ccdf.csv")
    assert rows[0] == {"x": "1.0", "ccdf": "1.0"} and len(rows) == 11


def test_exposure(tmp_path, toy):
    inter, pages = toy
    run_ok(["exposure", "--in", inter, "--pages", pages, "--out", str(tmp_path)])
    rows = read_csv(tmp_path / "exposure.csv")
    assert {(r["window"], r["by"]) for r in rows} == {
        (w, b) for w in ("week", "month", "quarter") for b in ("lifetime", "activity")}
    assert all(0 <= float(r["x"]) <= 1 and 0 <= float(r["y"]) <= 1 for r in rows)


def test_simulate_and_sweep_rerun(tmp_path):
    sim = tmp_path / "sim"
    run_ok(["simulate", "--n-pages", "20", "--n-users", "200", "--max-rounds", "20",
            "--seed", "4", "--out", str(sim)])
    info = json.loads((sim / "simulation.json").read_text())
    assert info["config"]["seed"] == 4 and info["n_likes"] == len(read_csv(sim / "likes.csv"))
    before, after = rerun_from_manifest(sim)
    assert before == after

    sw = tmp_path / "sweep"
    run_ok(["sweep", "--n-pages", "20", "--n-users", "200", "--max-rounds", "10",
            "--values", "0.1,0.5", "--iterations", "2", "--out", str(sw)])
    rows = read_csv(sw / "sweep.csv")
    assert [r["trust_mean"] for r in rows] == ["0.1", "0.5"]
    assert json.loads((sw / "manifest.json").read_text())["seed"] == 0
    before, after = rerun_from_manifest(sw)
    assert before == after


def test_config_file(tmp_path):
    cfg = tmp_path / "sim.cfg"
    cfg.write_text("n_pages = 10\nn_users = 50\nmax_rounds = 5\nseed = 12\n")
    run_ok(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")])
    info = json.loads((tmp_path / "o" / "simulation.json").read_text())
    assert (info["config"]["n_pages"], info["config"]["seed"]) == (10, 12)
    m = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert m["seed"] == 12 and m["inputs"][0]["path"] == str(cfg)


def test_missing_input_exit_2_and_no_outputs(tmp_path, toy, capsys):
    out = tmp_path / "o"
    assert main(["summarize", "--in", str(tmp_path / "nope.csv"), "--out", str(out)]) == 2
    assert not out.exists()
    inter, _ = toy
    assert main(["localization", "--in", inter, "--partition", str(tmp_path / "nope.csv"),
                 "--out", str(out)]) == 2
    assert not out.exists()
    assert "not found" in capsys.readouterr().err


def test_malformed_data_exit_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("user_id,page_id,post_id,action,timestamp\nu,p,x,wave,1\n")
    assert main(["summarize", "--in", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()
    assert main(["summarize", "--lenient", "--in", str(bad), "--out", str(tmp_path / "o")]) == 0


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["summarize", "--bogus"],
    ["project", "--side", "diagonal", "--in", "x"],
    ["compare", "--in", "only_one.csv"],
    ["sweep", "--values", "a,b"],
])
def test_usage_errors_exit_1(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path / "o")] if argv else argv) == 1
    assert not (tmp_path / "o").exists()
    assert "usage" in capsys.readouterr().err.lower()


def test_every_subcommand_has_help():
    for name in SUBCOMMANDS:
        assert main([name, "--help"]) == 0


def test_inputs_not_mutated(tmp_path, toy):
    inter, pages = toy
    before = open(inter, "rb").read(), open(pages, "rb").read()
    run_ok(["summarize", "--in", inter, "--pages", pages, "--out", str(tmp_path)])
    assert (open(inter, "rb").read(), open(pages, "rb").read()) == before


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "echochamber.cli", "--version"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
