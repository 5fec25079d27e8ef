import json
import math

import numpy as np
import pytest

from expectiles.distributions import DiscreteDistribution, StudentT
from expectiles.empirical import expectile
from expectiles.simulation import (
    ExperimentConfig,
    RngSpec,
    draw,
    ks_distance,
    run_consistency_experiment,
    run_coverage_experiment,
    run_jump_experiment,
    run_stable_experiment,
    sample_discrete,
    sample_student_t,
)

THREE = DiscreteDistribution([0, 1, 2], [0.4, 0.5, 0.1])


# ------------------------------------------------------------------- samplers

def test_golden_draws():
    s = RngSpec(7)
    np.testing.assert_allclose(sample_student_t(1.5, 3, s.stream(0, 0)),
                               [1.06348583, -1.11406846, 0.12386492], atol=1e-8)
    assert sample_discrete(THREE, 5, s.stream(0, 0)).tolist() == [0, 0, 1, 0, 0]


def test_streams_are_deterministic_and_distinct():
    s = RngSpec(11)
    a = s.stream(100, 3).random(4)
    np.testing.assert_array_equal(a, RngSpec(11).stream(100, 3).random(4))
    assert not np.array_equal(a, s.stream(100, 4).random(4))
    assert not np.array_equal(a, s.stream(101, 3).random(4))
    assert not np.array_equal(a, RngSpec(12).stream(100, 3).random(4))


def test_student_t_moments():
    n = 1_000_000
    y = sample_student_t(3.0, n, RngSpec(1).stream(0))
    assert abs(y.mean()) < 4 * math.sqrt(3.0) / math.sqrt(n)
    # P(Y <= 1) for t3 is 0.8044988905221147
    assert abs(np.mean(y <= 1.0) - 0.8044988905221147) < 4 * math.sqrt(0.16 / n)


def test_discrete_frequencies():
    n = 200_000
    y = sample_discrete(THREE, n, RngSpec(2).stream(0))
    for a, p in zip(THREE.atoms, THREE.probs):
        assert abs(np.mean(y == a) - p) < 4 * math.sqrt(p * (1 - p) / n)


def test_point_mass_and_dispatch():
    d = DiscreteDistribution([2.5], [1.0])
    assert np.all(draw(d, 50, RngSpec(0).stream(0)) == 2.5)
    with pytest.raises(TypeError):
        draw(object(), 3, RngSpec(0).stream(0))


# ------------------------------------------------------------------------- KS

def test_ks_examples():
    R = 10
    u = (np.arange(1, R + 1) - 0.5) / R
    assert ks_distance(u, lambda x: x) == pytest.approx(1 / (2 * R))
    assert ks_distance(np.array([0.0]), lambda x: np.full_like(x, 0.5)) == 0.5
    v = np.sort(np.random.default_rng(0).random(5000))
    assert ks_distance(v, lambda x: x) < 0.03
    assert ks_distance(u, u) == pytest.approx(1 / (2 * R))


def test_ks_errors():
    with pytest.raises(ValueError):
        ks_distance(np.array([]), lambda x: x)
    with pytest.raises(ValueError):
        ks_distance(np.array([0.5, 0.1]), lambda x: x)


# --------------------------------------------------------------------- config

def test_config_validation():
    for kw in ({"tau": 1.0}, {"reps": 0}, {"sizes": (1,)}, {"sizes": ()},
               {"taus": (0.0, 0.5)}, {"standardization": "bogus"}, {"seed": -1}):
        args = dict(model=THREE, tau=0.5, sizes=(10,), reps=5)
        args.update(kw)
        with pytest.raises(ValueError):
            ExperimentConfig(**args)


# ---------------------------------------------------------------- experiments

def test_thread_count_does_not_change_results():
    cfg = ExperimentConfig(StudentT(1.5), 0.8, (20, 50), 60, seed=3)
    a = run_stable_experiment(cfg, threads=1)
    b = run_stable_experiment(cfg, threads=4)
    assert a.to_csv() == b.to_csv()
    assert a.to_json() == b.to_json()
    cfg = ExperimentConfig(THREE, 0.8, (30,), 80, seed=3)
    assert run_jump_experiment(cfg, threads=1).to_json() == run_jump_experiment(cfg, threads=3).to_json()


def test_jump_at_half_is_scaled_mean_error():
    cfg = ExperimentConfig(THREE, 0.5, (40,), 25, seed=9)
    rep = run_jump_experiment(cfg, threads=1)
    res = rep.result(40)
    for r in range(5):
        y = draw(THREE, 40, cfg.rng.stream(40, r))
        ref = math.sqrt(40) * (math.fsum(y) / 40 - 0.7)
        assert res.standardized[r] == pytest.approx(ref, abs=1e-12)
    assert res.reference == "normal"


def test_jump_at_atom_reports_alternatives():
    cfg = ExperimentConfig(THREE, 0.8, (100,), 200, seed=1)
    rep = run_jump_experiment(cfg, threads=1)
    res = rep.result(100)
    assert res.reference == "mixture"
    assert set(res.ks_alternatives) == {"normal_sigma1", "normal_sigma2"}
    assert rep.limit["kind"] == "mixture"
    assert res.density is not None and len(res.density["x"]) == 201
    with pytest.raises(ValueError):
        run_jump_experiment(ExperimentConfig(THREE, 0.8, (10,), 5, standardization="normal"))


def test_stable_experiment_scaling():
    cfg = ExperimentConfig(StudentT(1.5), 0.8, (30,), 10, seed=5)
    rep = run_stable_experiment(cfg, threads=1)
    res = rep.result(30)
    lim = rep.limit
    scale = 30 ** lim["rate_exponent"] * lim["c_tilde"]
    np.testing.assert_allclose(res.standardized, scale * res.raw, rtol=1e-14)
    y = draw(StudentT(1.5), 30, cfg.rng.stream(30, 0))
    assert res.raw[0] == pytest.approx(float(expectile(y, 0.8)) - rep.extra["mu"], abs=1e-14)
    with pytest.raises(ValueError):
        run_stable_experiment(ExperimentConfig(StudentT(3), 0.8, (10,), 5))


def test_consistency_wider_grid_not_smaller():
    narrow = ExperimentConfig(StudentT(3), 0.5, (100,), 30, seed=2, taus=(0.4, 0.5, 0.6))
    wide = ExperimentConfig(StudentT(3), 0.5, (100,), 30, seed=2, taus=(0.1, 0.4, 0.5, 0.6, 0.9))
    a = run_consistency_experiment(narrow, threads=1).result(100).raw
    b = run_consistency_experiment(wide, threads=1).result(100).raw
    assert np.all(b >= a)
    with pytest.raises(ValueError):
        run_consistency_experiment(ExperimentConfig(StudentT(3), 0.5, (10,), 2))


def test_coverage_experiment_small():
    cfg = ExperimentConfig(StudentT(3), 0.7, (200,), 300, seed=4)
    rep = run_coverage_experiment(cfg, level=0.9, threads=1)
    res = rep.result(200)
    z = 1.6448536269514722
    covered = np.abs(res.standardized) <= z
    assert res.summary["coverage"] == pytest.approx(covered.mean())
    assert 0.8 < res.summary["coverage"] <= 1.0
    with pytest.raises(ValueError):
        run_coverage_experiment(ExperimentConfig(THREE, 0.8, (10,), 5))


def test_report_naming_and_files(tmp_path):
    cfg = ExperimentConfig(StudentT(1.5), 0.8, (20,), 4, seed=7)
    rep = run_stable_experiment(cfg, threads=1)
    assert rep.basename == "stable-t1.5-0.8-7"
    csv_path, json_path = rep.write(tmp_path)
    assert csv_path.name == "stable-t1.5-0.8-7.csv"
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "n,r,raw,standardized" and len(lines) == 5
    data = json.loads(json_path.read_text())
    assert data["experiment"] == "stable" and "wall_time" not in data
    assert data["results"][0]["ks"] == rep.ks[0]
