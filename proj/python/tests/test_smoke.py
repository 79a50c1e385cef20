import math
import pathlib

import pytest

import modeswitch as ms


def test_variant_round_trip():
    spec = ms.parse_variant("XI-intra(=,informed,p0.01,G)")
    assert str(spec) == "XI-intra(=,informed,p0.01,G)"
    assert spec.mode_pair == "XI"
    assert "trigger: informed" in spec.describe()
    names = ms.enumerate_variants()
    assert all(str(ms.parse_variant(n)) == n for n in names)


def test_parse_error_is_value_error():
    with pytest.raises(ValueError, match="n90"):
        ms.parse_variant("XU-intra(10,blind,n90,G)")


def test_deepsea_all_right_path():
    env = ms.Environment("deepsea:4")
    env.reset(0)
    total = 0.0
    done = False
    while not done:
        _, reward, done = env.step(1)
        total += reward
    assert math.isclose(total, 0.99)
    assert math.isclose(env.optimal_return, 0.99)


def test_nstep_primitives():
    gamma = 0.9
    expected = 1.0 + gamma * 2.0 + gamma**2 * 5.0
    assert math.isclose(ms.nstep_target([1.0, 2.0], 5.0, gamma), expected, abs_tol=1e-12)
    assert ms.effective_horizon([0, 1, 0], [1, 1, 1], True) == 2
    assert ms.effective_horizon([0, 1, 0], [1, 1, 1], False) == 3


def test_homeostasis_rate_on_constant_stream():
    rate = ms.homeostasis_rate([1.0] * 200_000, 0.01, seed=3)
    assert abs(rate - 0.01) < 0.002


def test_bandit_prefers_paying_arm():
    b = ms.BanditState(2)
    for _ in range(50):
        b = ms.bandit_update(b, 0, 1.0)
        b = ms.bandit_update(b, 1, 0.0)
    assert b.mean(0) > b.mean(1)


def test_statistics():
    traces = ["GGXXXG", "XG"]
    assert ms.periods("GGXXXG") == [("G", 2), ("X", 3), ("G", 1)]
    assert math.isclose(ms.p_X(traces), 4 / 8)
    assert ms.med_X(traces) == 2.0


def test_run_experiment_writes_outputs(tmp_path: pathlib.Path):
    out = ms.run_experiment("XU-intra(10,blind,n*,G)", "deepsea:4", 20, [1], 10, str(tmp_path))
    seed_dir = pathlib.Path(out) / "seed_1"
    for name in ("learning_curve.csv", "traces.csv", "stats.csv", "bandit_log.csv", "config.txt"):
        assert (seed_dir / name).is_file()
    assert (seed_dir / "learning_curve.csv").read_text().startswith("episode,eval_return,normalized_return\n")


def test_final_scores_greedy_is_trapped():
    scores = ms.final_scores("XU-experiment-level-G", "chain:10", 50, [1, 2])
    assert scores == [pytest.approx(0.1), pytest.approx(0.1)]
