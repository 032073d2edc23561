from __future__ import annotations

import csv
import json
import logging
from collections import Counter

import pytest

from flipmix.cli import ExperimentConfig, main, run_scan, summarize_scan
from flipmix.dynamics import flip_step, make_rng, stationary_distribution, transition_matrix
from flipmix.graph import Coloring, enumerate_proper_colorings
from flipmix.schedule import SETTING_1_1
from conftest import path


@pytest.fixture
def k3_file(tmp_path):
    f = tmp_path / "k3.txt"
    f.write_text("n 3\n0 1\n1 2\n0 2\n")
    return str(f)


def read_csv(path):
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0].startswith("# config_sha256=") and " seed=" in lines[0]
    return lines[0], list(csv.DictReader(lines[1:]))


def test_sample_deterministic_and_proper(tmp_path, k3_file, capsys):
    outs = []
    for i in range(2):
        out = tmp_path / f"s{i}.csv"
        assert main(["sample", "--graph", k3_file, "--k", "3", "--seed", "7", "--steps", "10000",
                     "--out", str(out), "--json"]) == 0
        outs.append(out.read_bytes())
        summary = json.loads(capsys.readouterr().out)
        assert summary["proper"] is True
    assert outs[0] == outs[1]
    _, rows = read_csv(tmp_path / "s0.csv")
    assert rows[-1]["step"] == "10000" and rows[-1]["proper"] == "1"
    assert b'"1,2,3"' in outs[0]  # comma-bearing fields are quoted


def test_sample_warns_below_ergodicity_threshold(k3_file, tmp_path, caplog):
    with caplog.at_level(logging.WARNING, logger="flipmix"):
        assert main(["sample", "--graph", k3_file, "--k", "3", "--seed", "1", "--steps", "10",
                     "--out", str(tmp_path / "o.csv")]) == 0
    assert any("ergodic" in r.message for r in caplog.records)


def test_sample_requires_seed(k3_file, capsys):
    assert main(["sample", "--graph", k3_file, "--k", "3"]) == 2
    assert "seed" in capsys.readouterr().err


def test_unreadable_graph(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("n 2\n0 1 2\n")
    assert main(["sample", "--graph", str(bad), "--k", "3", "--seed", "1"]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["sample", "--graph", str(tmp_path / "missing"), "--k", "3", "--seed", "1"]) == 2


def test_vertex_frequencies_match_stationary_marginal():
    g = path(2)
    states = enumerate_proper_colorings(g, 3)
    pi = stationary_distribution(transition_matrix(g, SETTING_1_1, 3, states))
    exact = Counter()
    for x, p in zip(states, pi):
        exact[x[0]] += p
    rng = make_rng(17)
    x = Coloring((1, 2), 3)
    n = 100_000
    seen = Counter()
    for _ in range(n):
        x = flip_step(g, x, SETTING_1_1, rng)
        seen[x[0]] += 1
    for c in (1, 2, 3):
        assert exact[c] == pytest.approx(1 / 3)
        assert abs(seen[c] / n - exact[c]) < 0.02


def test_exact_mix_triangle(k3_file, tmp_path, capsys):
    out = tmp_path / "tv.csv"
    assert main(["exact-mix", "--graph", k3_file, "--k", "3", "--t-max", "60", "--out", str(out), "--json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    _, rows = read_csv(out)
    tv = [float(r["tv"]) for r in rows]
    assert tv[0] == pytest.approx(5 / 6)
    assert all(b <= a + 1e-12 for a, b in zip(tv, tv[1:]))
    assert summary["uniform_stationary"] is True
    assert isinstance(summary["t_mix"], int) and tv[summary["t_mix"]] <= 0.25


def test_exact_mix_refuses_large_state_space(capsys):
    assert main(["exact-mix", "--gen", "path:12", "--k", "4"]) == 2
    assert "budget" in capsys.readouterr().err


def scan_args(out, seed=3, trials=60):
    return ["couple-scan", "--gen", "tree:15:3", "--k", "7", "--schedule", "glauber", "--seed", str(seed),
            "--trials", str(trials), "--steps", "4", "--out", str(out), "--json"]


def test_couple_scan_reproducible_across_worker_counts(tmp_path, monkeypatch, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("FLIPMIX_THREADS", "1")
    assert main(scan_args(a)) == 0
    sa = json.loads(capsys.readouterr().out)
    monkeypatch.setenv("FLIPMIX_THREADS", "3")
    assert main(scan_args(b)) == 0
    sb = json.loads(capsys.readouterr().out)
    assert a.read_bytes() == b.read_bytes()
    assert sa == sb
    assert sa["coalescence_bound_violations"] == 0
    assert "/" in sa["mean_exact_dH"]["exact"]


def test_couple_scan_trajectories_stop_off_distance_one(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(scan_args(out, trials=40)) == 0
    _, rows = read_csv(out)
    by_trial = {}
    for r in rows:
        by_trial.setdefault(r["trial"], []).append(r)
    for trs in by_trial.values():
        assert all(r["H_after"] == "1" for r in trs[:-1])
        assert len(trs) <= 4


def test_scan_summary_statistics():
    cfg = ExperimentConfig("couple-scan", gen="tree:20:4", k=9, schedule="glauber", seed=5, trials=200)
    trials = run_scan(cfg)
    summ = summarize_scan(trials)
    first = [t[0] for t in trials]
    assert summ["trials"] == 200
    assert float(summ["mean_dH"]) == pytest.approx(sum(r[4] - 1 for r in first) / 200)


def test_config_digest_ignores_output_path():
    a = ExperimentConfig("sample", gen="path:3", k=3, seed=1, out="a.csv")
    b = ExperimentConfig("sample", gen="path:3", k=3, seed=1, out="b.csv")
    c = ExperimentConfig("sample", gen="path:3", k=3, seed=2, out="a.csv")
    assert a.digest() == b.digest() != c.digest()


def test_verify_exit_codes(capsys):
    assert main(["verify"]) == 0
    assert "RESULT: PASS" in capsys.readouterr().out
    assert main(["verify", "--k-ratio", "1.79"]) == 1
    out = capsys.readouterr().out
    assert "failed: arithmetic: contraction" in out


def test_verify_corrupted_schedule(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"P": ["1", "0.5", "0.154", "0.088", "0.044", "0.011"], "eta": "0.0469"}))
    assert main(["verify", "--schedule", str(f), "--json"]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert not rep["ok"]
    assert any(s.startswith("schedule: FP0") for s in rep["failed"])
    assert any(s.startswith("schedule: FP5") for s in rep["failed"])


def test_verify_json_exact_values(capsys):
    assert main(["verify", "--json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["sections"]["arithmetic"]["lambdas"]["multi"]["exact"] == "226/125"
    assert rep["info"]["p3_variant_lambda_multi"]["exact"] == "9039/5000"
