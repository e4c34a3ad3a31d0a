import json

import pytest
import yaml

from extsource.harness import (
    ConfigError, RunConfig, load_config, build_jobs, run, explain, list_suites,
    SUITES,
)
from extsource.cli import main


MINI = """
schema: 1
seed: 7
workers: 1
weights:
  gaussian: {kind: gaussian}
  laguerre: {kind: laguerre}
suites:
  identity:
    weights: [gaussian, laguerre]
    d: [2]
    m: [1]
    sources: [0.5, 1.4]
    intervals:
      - [[1, inf]]
    s: [1.0]
    rel_tol: 1.0e-8
  vertex-ladder:
    weights: [gaussian]
    cap: 3
    max_d: 1
"""


def mini_cfg():
    return RunConfig(yaml.safe_load(MINI))


def test_bundled_configs_load():
    for name in ("quick", "full"):
        cfg = load_config(name)
        assert cfg.seed > 0 and cfg.suites


def test_unknown_bundled_name():
    with pytest.raises(ConfigError):
        load_config("nonexistent-config")


def test_schema_required():
    with pytest.raises(ConfigError, match="schema"):
        RunConfig({"weights": {}, "suites": {}})


def test_unknown_suite_rejected():
    raw = yaml.safe_load(MINI)
    raw["suites"]["bogus"] = {}
    with pytest.raises(ConfigError, match="suites.bogus"):
        RunConfig(raw)


def test_unknown_weight_rejected():
    raw = yaml.safe_load(MINI)
    raw["suites"]["identity"]["weights"] = ["nope"]
    with pytest.raises(ConfigError, match="unknown weight"):
        RunConfig(raw)


def test_zero_source_rejected():
    raw = yaml.safe_load(MINI)
    raw["suites"]["identity"]["sources"] = [0.5, 0.0]
    with pytest.raises(ConfigError, match="nonzero"):
        RunConfig(raw)


def test_exact_suite_rejects_numeric_weight():
    raw = yaml.safe_load(MINI)
    raw["weights"]["quartic"] = {"kind": "exppoly", "coeffs": [0, 0, 0, 0, 0.25]}
    raw["suites"]["vertex-ladder"]["weights"] = ["quartic"]
    with pytest.raises(ConfigError, match="exact"):
        RunConfig(raw)


def test_mc_requires_gaussian():
    raw = yaml.safe_load(MINI)
    raw["suites"]["mc"] = {
        "weights": ["laguerre"], "d": [2], "m": [1], "sources": [0.5],
        "intervals": [[[1, "inf"]]], "s": [1.0], "n": 1000,
    }
    with pytest.raises(ConfigError, match="gaussian"):
        RunConfig(raw)


def test_bad_interval_is_config_error():
    raw = yaml.safe_load(MINI)
    raw["suites"]["identity"]["intervals"] = [[[2, 1]]]  # empty interval
    with pytest.raises(ConfigError, match="intervals"):
        RunConfig(raw)


def test_out_dir_from_config(tmp_path):
    raw = yaml.safe_load(MINI)
    raw["out_dir"] = str(tmp_path / "from-config")
    cfg = RunConfig(raw)
    assert cfg.out_dir == str(tmp_path / "from-config")


def test_job_ids_are_per_suite_and_unique():
    jobs = build_jobs(mini_cfg())
    ids = [rec["id"] for rec, _ in jobs]
    assert len(ids) == len(set(ids))
    assert "identity-0000" in ids and "vertex-ladder-0000" in ids


def test_run_writes_reports_and_skips_infeasible(tmp_path):
    code, summary = run(mini_cfg(), tmp_path)
    assert code == 0
    lines = (tmp_path / "results.ndjson").read_text().splitlines()
    recs = [json.loads(x) for x in lines]
    # laguerre at source 1.4 diverges: recorded as skipped, not failed
    skipped = [r for r in recs if r["status"] == "skipped"]
    assert len(skipped) == 1
    assert skipped[0]["weight"] == "laguerre" and skipped[0]["sources"] == [1.4]
    assert all(r["status"] in ("pass", "skipped") for r in recs)
    assert (tmp_path / "results.csv").exists()
    assert (tmp_path / "summary.txt").exists()


def test_run_byte_reproducible(tmp_path):
    run(mini_cfg(), tmp_path / "a")
    run(mini_cfg(), tmp_path / "b")
    assert (tmp_path / "a" / "results.ndjson").read_bytes() == \
        (tmp_path / "b" / "results.ndjson").read_bytes()
    assert (tmp_path / "a" / "results.csv").read_bytes() == \
        (tmp_path / "b" / "results.csv").read_bytes()


def test_seed_override_changes_records(tmp_path):
    cfg = mini_cfg()
    run(cfg, tmp_path / "a", seed=1)
    rec = json.loads((tmp_path / "a" / "results.ndjson").read_text().splitlines()[0])
    assert rec["seed"] == 1


def test_mutate_run_fails(tmp_path):
    code, _ = run(mini_cfg(), tmp_path, mutate=True)
    assert code == 1
    recs = [json.loads(x) for x in
            (tmp_path / "results.ndjson").read_text().splitlines()]
    assert any(r["status"] == "fail" for r in recs)


def test_explain_known_and_unknown(tmp_path):
    run(mini_cfg(), tmp_path)
    path = tmp_path / "results.ndjson"
    text = explain(path, "identity-0000")
    assert "identity-0000" in text and "inputs" in text
    with pytest.raises(KeyError, match="nearest"):
        explain(path, "identity-9999")


def test_records_carry_rerun_inputs(tmp_path):
    run(mini_cfg(), tmp_path)
    for line in (tmp_path / "results.ndjson").read_text().splitlines():
        rec = json.loads(line)
        assert "id" in rec and "suite" in rec and "seed" in rec
        if rec["suite"] == "identity":
            assert {"weight", "d", "m", "sources", "E", "s", "tol"} <= rec.keys()


def test_list_suites_complete():
    assert set(list_suites()) == set(SUITES)


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("schema: 2\nweights: {}\nsuites: {}\n")
    assert main(["run", "--config", str(bad), "--out-dir", str(tmp_path / "o")]) == 2
    assert main(["list-suites"]) == 0
    assert main(["explain", "xx", "--results", str(tmp_path / "missing.ndjson")]) == 2
