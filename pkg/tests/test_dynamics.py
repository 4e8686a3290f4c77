import numpy as np
import pytest
from scipy import stats

from dynamics import (DriftSpec, IntegratorConfig, Telemetry, TrajectoryBundle, TamedEuler, create_integrator, drift,
                      drift_vector, evolve, interaction_sum, isde_window_experiment, stationarity_test,
                      strong_order_report)
from ensemble import EnsembleSpec, log_density_gradient, sample_batch
from utils.errors import DomainError, IntegratorBlowupError, SingularDriftError


START = np.array([3.0, 9.0, 20.0])


def test_drift_is_half_the_log_gradient():
    rng = np.random.default_rng(0)
    for N in (2, 5, 20):
        x = np.cumsum(rng.uniform(0.5, 3.0, N))
        np.testing.assert_allclose(drift_vector(DriftSpec(1.5, "finite-n", N=N), x),
                                   0.5 * log_density_gradient(EnsembleSpec(1.5, N), x), rtol=1e-12, atol=1e-14)


def test_single_particle_drift():
    spec = DriftSpec(2.0, "finite-n", N=3)
    assert drift(spec, 0, START) == pytest.approx(-1.0 / 24.0 + 1.0 / 3.0 + 1.0 / (3.0 - 9.0) + 1.0 / (3.0 - 20.0))
    with pytest.raises(IndexError):
        drift(spec, 3, START)


def test_isde_window_and_cutoff():
    spec = DriftSpec(2.0, "isde", window=2, cutoff=10.0)
    b = drift_vector(spec, START)
    assert b.shape == (2,)
    # 20 is out of range for both moving particles
    assert b[0] == pytest.approx(1.0 / 3.0 + 1.0 / (3.0 - 9.0))
    assert b[1] == pytest.approx(1.0 / 9.0 + 1.0 / (9.0 - 3.0))


def test_interaction_sum_vanishes():
    x = np.cumsum(np.random.default_rng(1).uniform(0.1, 2.0, 30))
    assert interaction_sum(DriftSpec(1.0, "finite-n", N=30), x) == pytest.approx(0.0, abs=1e-9)


def test_drift_spec_validation():
    with pytest.raises(DomainError):
        DriftSpec(1.0, "finite-n")
    with pytest.raises(DomainError):
        DriftSpec(1.0, "brownian", N=3)
    with pytest.raises(DomainError):
        DriftSpec(1.0, "isde", window=0)
    with pytest.raises(DomainError):
        DriftSpec(1.0, "isde", cutoff=0.0)


def test_drift_floors():
    spec = DriftSpec(1.0, "finite-n", N=3)
    with pytest.raises(SingularDriftError):
        drift_vector(spec, [1e-9, 1.0, 2.0], origin_floor=1e-8)
    with pytest.raises(SingularDriftError):
        drift_vector(spec, [1.0, 1.0 + 1e-12, 2.0], collision_floor=1e-10)


def test_integrator_config_validation():
    with pytest.raises(DomainError):
        IntegratorConfig(dt_max=1e-3, dt_min=1e-2)
    with pytest.raises(DomainError):
        IntegratorConfig(safety=1.5)
    with pytest.raises(DomainError):
        IntegratorConfig(scheme="milstein")
    with pytest.raises(DomainError):
        IntegratorConfig(dt_max=1e-3, noise_step=3e-3)
    assert IntegratorConfig(dt_max=1e-3, noise_step=4e-3).noise_step == pytest.approx(4e-3)
    assert IntegratorConfig(dt_max=1e-3).noise_step == pytest.approx(1e-3)


def test_create_integrator():
    spec = DriftSpec(1.0, "finite-n", N=3)
    assert isinstance(create_integrator(spec, IntegratorConfig(scheme="tamed-euler")), TamedEuler)


def test_evolve_requires_non_hitting_order():
    with pytest.raises(DomainError):
        evolve(START, DriftSpec(0.5, "finite-n", N=3), IntegratorConfig(), 0.01, seed=0)


def test_evolve_rejects_bad_initial():
    spec = DriftSpec(2.0, "finite-n", N=3)
    with pytest.raises(DomainError):
        evolve([3.0, 2.0, 20.0], spec, IntegratorConfig(), 0.01, seed=0)
    with pytest.raises(DomainError):
        evolve(START[:2], spec, IntegratorConfig(), 0.01, seed=0)


def test_evolve_is_deterministic_and_ordered():
    spec = DriftSpec(2.0, "finite-n", N=3)
    cfg = IntegratorConfig(dt_max=1e-3)
    a = evolve(START, spec, cfg, 0.05, seed=4, save_every=5)
    b = evolve(START, spec, cfg, 0.05, seed=4, save_every=5)
    np.testing.assert_array_equal(a.states, b.states)
    assert a.times[0] == 0.0 and a.times[-1] == pytest.approx(0.05)
    assert a.times.size == 11
    assert np.all(np.diff(a.states, axis=1) > 0) and np.all(a.states > 0)
    assert a.telemetry.steps >= 50
    c = evolve(START, spec, cfg, 0.05, seed=5)
    assert not np.array_equal(a.final.points, c.final.points)


def test_evolve_zero_horizon():
    bundle = evolve(START, DriftSpec(2.0, "finite-n", N=3), IntegratorConfig(), 0.0, seed=0)
    assert bundle.times.tolist() == [0.0]
    np.testing.assert_array_equal(bundle.states[0], START)


def test_noise_path_does_not_depend_on_dt_max():
    spec = DriftSpec(2.0, "finite-n", N=3)
    coarse = evolve(START, spec, IntegratorConfig(dt_max=2e-3, noise_step=2e-3), 0.05, seed=1)
    fine = evolve(START, spec, IntegratorConfig(dt_max=1e-3, noise_step=2e-3), 0.05, seed=1)
    assert np.max(np.abs(coarse.final.points - fine.final.points)) < 1e-2


def test_isde_freezes_particles_outside_window():
    spec = DriftSpec(2.0, "isde", window=1, cutoff=50.0)
    bundle = evolve(START, spec, IntegratorConfig(), 0.02, seed=3)
    np.testing.assert_array_equal(bundle.final.points[1:], START[1:])
    assert bundle.final.points[0] != START[0]


def test_blowup_raises_with_telemetry():
    cfg = IntegratorConfig(dt_max=1e-3, dt_min=1e-3, safety=1e-6)
    with pytest.raises(IntegratorBlowupError) as info:
        evolve(START, DriftSpec(2.0, "finite-n", N=3), cfg, 0.01, seed=0)
    assert info.value.telemetry["rejected"] >= 1
    assert info.value.time == 0.0


def test_tamed_scheme_runs():
    cfg = IntegratorConfig(scheme="tamed-euler")
    bundle = evolve(START, DriftSpec(2.0, "finite-n", N=3), cfg, 0.02, seed=2)
    assert np.all(np.diff(bundle.final.points) > 0)


def test_telemetry_merge():
    merged = Telemetry(3, 1, 0.5, 2.0, 1e-3).merge(Telemetry(4, 0, 0.2, 3.0, 1e-4))
    assert merged.steps == 7 and merged.rejected == 1
    assert merged.min_gap == 0.2 and merged.min_origin == 2.0 and merged.smallest_dt == 1e-4


def test_bundle_validation():
    with pytest.raises(ValueError):
        TrajectoryBundle([0.0, 0.0], [[1.0, 2.0], [1.0, 2.0]], Telemetry(), 1.0)
    with pytest.raises(ValueError):
        TrajectoryBundle([0.0], [[2.0, 1.0]], Telemetry(), 1.0)


def test_strong_order():
    spec = DriftSpec(2.0, "finite-n", N=3)
    report = strong_order_report(spec, IntegratorConfig(dt_max=2e-3), 0.02, initial=START, levels=3,
                                 trajectories=10)
    assert report["observed_order"].passed


def test_isde_window_experiment_runs():
    report = isde_window_experiment(2.0, 8, 3, R=20.0, T=0.01, draws=10, progress=False)
    assert report["blowups"].value == 0
    assert "difference" in report and "mean_lowest_R" in report
    with pytest.raises(DomainError):
        isde_window_experiment(2.0, 8, 9, R=20.0, T=0.01, draws=10, progress=False)


def test_stationarity_requires_finite_n():
    with pytest.raises(DomainError):
        stationarity_test(DriftSpec(2.0, "isde", window=3), IntegratorConfig(), 0.1, 10, progress=False)


def test_default_dt_min_allows_close_approach_to_origin():
    # 0.1 * x_1^2 = 4e-13 at the start, so the first accepted step is 1e-11 / 32
    cfg = IntegratorConfig(dt_max=1e-11)
    assert cfg.dt_min < 1e-12
    bundle = evolve([2e-6, 5.0, 12.0], DriftSpec(8.0, "finite-n", N=3), cfg, 1e-11, seed=0)
    assert bundle.telemetry.smallest_dt == pytest.approx(1e-11 / 32)
    assert bundle.final.points[0] > cfg.origin_floor


def test_stationarity_reference_is_independent():
    report = stationarity_test(DriftSpec(1.0, "finite-n", N=3), IntegratorConfig(), 0.0, 100, seed=2,
                               progress=False)
    assert report["blowups"].value == 0
    # at T = 0 the evolved batch is the starting batch, the reference is not
    assert report["ks_smallest_stat"].value > 0.0
    smallest = report.tables["smallest"]
    assert not np.array_equal(smallest["reference"].to_numpy(), smallest["after"].to_numpy())


@pytest.mark.slow
@pytest.mark.parametrize("alpha, N", [(1.0, 5), (2.0, 2)])
def test_stationarity_smallest_particle(alpha, N):
    report = stationarity_test(DriftSpec(alpha, "finite-n", N=N), IntegratorConfig(), 0.5, 2000, seed=0,
                               progress=False)
    assert report["blowups"].passed
    assert report["ks_smallest_p"].passed


@pytest.mark.slow
def test_single_particle_relaxes_to_gamma_law():
    # N = 1, alpha = 1: stationary density proportional to x exp(-x/4); start at its mean
    spec = DriftSpec(1.0, "finite-n", N=1)
    cfg = IntegratorConfig(dt_max=1e-2)
    finals = [evolve([8.0], spec, cfg, 40.0, seed=0, key=(j,), save_every=10 ** 9).final.points[0]
              for j in range(400)]
    assert stats.kstest(finals, stats.gamma(a=2.0, scale=4.0).cdf).pvalue > 0.01


@pytest.mark.slow
def test_labels_kept_and_origin_avoided():
    spec = DriftSpec(2.0, "finite-n", N=5)
    cfg = IntegratorConfig()
    for j, start in enumerate(sample_batch(EnsembleSpec(2.0, 5, seed=11), 1000, progress=False)):
        bundle = evolve(start, spec, cfg, 1.0, seed=11, key=(j,))
        assert np.all(np.diff(bundle.states, axis=1) > 0)
        assert np.all(bundle.states[:, 0] > cfg.origin_floor)
        assert bundle.telemetry.min_origin > cfg.origin_floor
