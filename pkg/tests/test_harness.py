import json

import numpy as np
import pytest

from renewal_kac import cli
from renewal_kac.config import ExperimentConfig, load_config
from renewal_kac.errors import ConfigError, DegenerateLaw
from renewal_kac.experiment import ExperimentReport, run_experiment, simulate_replicates, worker_count
from renewal_kac import Exponential, KacProcessParams


def small_config(**overrides):
    data = {
        "law": {"kind": "exponential", "rate": 1.0},
        "n_values": [50, 200],
        "replicates": 40,
        "grid": 64,
        "seed": 7,
    }
    data.update(overrides)
    return ExperimentConfig.from_dict(data)


def strip_clock(text):
    data = json.loads(text)
    data.pop("wall_clock_seconds")
    return json.dumps(data, sort_keys=True)


def test_shipped_default_config_loads():
    cfg = load_config()
    assert cfg.law == {"kind": "exponential", "rate": 1.0} and cfg.seed == 42


@pytest.mark.parametrize(
    "bad",
    [
        {"n_values": [0]},
        {"replicates": 0},
        {"grid": 1},
        {"checks": ["ks", "plots"]},
        {"law": {"kind": "cauchy"}},
        {"law": {"kind": "uniform", "lo": 3, "hi": 1}},
        {"unknown_key": 1},
    ],
)
def test_invalid_configs(bad):
    with pytest.raises(ConfigError):
        small_config(**bad)


def test_sawtooth_report():
    cfg = small_config(
        law={"kind": "atoms", "values": [1.0], "probs": [1.0]}, n_values=[4], replicates=1, grid=4, C=1.0,
        record_paths=True, ks_times=[0.5], covariance_times=[0.5], increments=[0.0, 0.25, 0.5, 1.0],
    )
    report = run_experiment(cfg)
    path = report.results[0]["paths"][0]
    assert path["t"] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert path["x"] == [0.0, 0.5, 0.0, 0.5, 0.0]
    assert report.results[0]["ks"].startswith("skipped")


def test_degenerate_law_propagates():
    cfg = small_config(law={"kind": "atoms", "values": [1.0], "probs": [1.0]})
    with pytest.raises(DegenerateLaw):
        run_experiment(cfg)


def test_pareto_flagged_outside_hypotheses():
    cfg = small_config(law={"kind": "pareto", "shape": 2.2, "scale": 1.0}, moment_p=3.0, n_values=[50], replicates=12)
    report = run_experiment(cfg)
    assert report.hypotheses["within_hypotheses"] is False
    assert report.hypotheses["flag"] == "outside theorem hypotheses"
    assert report.hypotheses["moment_certificate"]["p_moment"] == "infinite"


def test_report_deterministic_and_round_trips():
    a = run_experiment(small_config()).render()
    b = run_experiment(small_config()).render()
    assert strip_clock(a) == strip_clock(b)
    parsed = ExperimentReport.parse(a)
    assert parsed == ExperimentReport.parse(parsed.render())
    assert parsed.render() == a


def test_replicates_independent_of_thread_count():
    law = Exponential(1.0)
    params = KacProcessParams(300, 1.0)
    one = simulate_replicates(law, params, 12, 32, 5, threads=1)
    four = simulate_replicates(law, params, 12, 32, 5, threads=4)
    for a, b in zip(one, four):
        assert np.array_equal(a.evaluation.x_values, b.evaluation.x_values)


def test_replicate_reproducible_in_isolation():
    law = Exponential(1.0)
    params = KacProcessParams(100, 1.0)
    reps = simulate_replicates(law, params, 6, 16, 9, threads=1)
    from renewal_kac.experiment import run_replicate
    from renewal_kac.rng import RngStream

    alone = run_replicate(law, params, 16, RngStream(9).child(100).child(5))
    assert np.array_equal(alone.evaluation.x_values, reps[5].evaluation.x_values)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("RENEWAL_KS_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("RENEWAL_KS_THREADS", "nope")
    assert worker_count() >= 1


def test_cli_simulate_deterministic(capsys):
    argv = ["simulate", "--law", '{"kind":"exponential","rate":1}', "--n", "100", "--seed", "7"]
    assert cli.main(argv) == 0
    first = capsys.readouterr().out
    assert cli.main(argv) == 0
    assert capsys.readouterr().out == first
    rows = first.splitlines()
    assert rows[0] == "t,x,w,r" and len(rows) == 1026


def test_cli_simulate_json_to_dir(tmp_path):
    assert cli.main(["simulate", "--n", "20", "--grid", "8", "--format", "json", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "path_n20_seed0.json").read_text())
    assert len(data["x"]) == 9 and data["params"]["n"] == 20


def test_cli_poisson_check(capsys):
    assert cli.main(["poisson-check", "--n", "200", "--replicates", "100"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["kac_constant"] == 1.0 and out["constants_match"] is True


def test_cli_converge_and_report(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(small_config().to_dict()))
    assert cli.main(["converge", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    report = tmp_path / "out" / "report.json"
    assert cli.main(["report", str(report)]) == 0
    table = capsys.readouterr().out
    assert "ks t=1.0" in table and "composition identity" in table


def test_cli_converge_csv(capsys):
    argv = ["converge", "--n", "30", "--replicates", "20", "--grid", "16", "--format", "csv"]
    assert cli.main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,t,M,seed,statistic,p_value" and len(lines) == 4


def test_cli_assert_failure_exit_code(tmp_path, capsys):
    # forcing C = 3 inflates the variance ninefold, so the normality checks must fail
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(small_config(C=3.0, n_values=[200], replicates=200).to_dict()))
    assert cli.main(["converge", "--config", str(cfg), "--assert", "--out", str(tmp_path)]) == 1
    assert "FAIL" in capsys.readouterr().err


def test_cli_config_errors(tmp_path, capsys):
    assert cli.main(["converge", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"law": {"kind": "exponential"}, "n_values": [], "replicates": 1, "seed": 1}')
    assert cli.main(["converge", "--config", str(bad)]) == 2
    assert cli.main(["simulate", "--law", '{"kind":"atoms","values":[0],"probs":[1]}']) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "--law", "not json"])
    assert exc.value.code == 2
