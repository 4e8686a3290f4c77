"""Monte Carlo experiments on the particle dynamics, each returning a DiagnosticReport."""
from functools import partial
from typing import Optional

import numpy as np
import pandas as pd

from dynamics.drift import DriftSpec
from dynamics.engine import IntegratorConfig, Telemetry, evolve
from ensemble import EnsembleSpec, sample_batch, sample
from estimators import estimate_rho1, ks_distance, smallest_particles
from utils.errors import DomainError, IntegratorBlowupError
from utils.report import DiagnosticReport
from utils.tools import parallel_map


# stream family of the trajectory noise, apart from the ensemble draws
NOISE_FAMILY = 7
KS_LEVEL = 0.01


def _final_state(spec: DriftSpec, cfg: IntegratorConfig, T: float, seed: int, task):
    index, points = task
    try:
        bundle = evolve(points, spec, cfg, T, seed, key=(NOISE_FAMILY, index), save_every=10 ** 9)
    except IntegratorBlowupError as err:
        return None, err.telemetry
    return bundle.states[-1], bundle.telemetry


def _run_batch(spec, cfg, T, seed, initial, workers, progress, desc):
    tasks = [(i, np.asarray(c.points)) for i, c in enumerate(initial)]
    results = parallel_map(partial(_final_state, spec, cfg, T, seed), tasks, workers=workers,
                           desc=desc, progress=progress)
    finals = [r[0] for r in results if r[0] is not None]
    telemetry = Telemetry()
    for state, tel in results:
        if state is not None:
            telemetry = telemetry.merge(tel)
    blowups = sum(1 for r in results if r[0] is None)
    return finals, telemetry, blowups


def stationarity_test(spec: DriftSpec, cfg: IntegratorConfig, T: float, draws: int, seed: int = 0,
                      workers: int = 1, progress: bool = True, bins: int = 20) -> DiagnosticReport:
    """
    Start `draws` trajectories from exact ensemble draws, evolve them to time T
    and compare the law of the smallest particle at T with a fresh, independent
    batch of ensemble draws (KS test), together with the binned one-point
    densities and the integrator telemetry.
    """
    if spec.mode != "finite-n":
        raise DomainError("stationarity_test needs a finite-n drift")
    ensemble = EnsembleSpec(spec.alpha, spec.N, seed)
    initial = sample_batch(ensemble, draws, workers=workers, progress=progress)
    # draw indices draws..2*draws-1 share no stream with the starting points
    reference = sample_batch(ensemble, draws, workers=workers, progress=progress, start=draws)
    finals, telemetry, blowups = _run_batch(spec, cfg, T, seed, initial, workers, progress,
                                            f"stationarity N={spec.N}")

    report = DiagnosticReport("stationarity", {"alpha": spec.alpha, "N": spec.N, "T": T, "draws": draws,
                                               "seed": seed, "dt_max": cfg.dt_max, "scheme": cfg.scheme})
    report.add("blowups", blowups, tolerance=0)
    if not finals:
        report.add("ks_smallest_p", 0.0, passed=False)
        return report

    fresh, after = smallest_particles(reference), smallest_particles(finals)
    stat, p = ks_distance(fresh, after)
    report.add("ks_smallest_stat", stat)
    report.add("ks_smallest_p", p, tolerance=KS_LEVEL, passed=p > KS_LEVEL)
    stat_top, p_top = ks_distance([c.points[-1] for c in reference], [f[-1] for f in finals])
    report.add("ks_largest_p", p_top)

    pooled = np.concatenate([c.points for c in reference])
    edges = np.unique(np.concatenate([[0.0], np.quantile(pooled, np.linspace(0, 1, bins + 1)[1:-1]),
                                      [max(pooled.max(), max(f.max() for f in finals)) * (1 + 1e-9)]]))
    rho_fresh, rho_after = estimate_rho1(reference, edges), estimate_rho1(finals, edges)
    se = np.sqrt(rho_fresh.stderr ** 2 + rho_after.stderr ** 2)
    z = np.abs(rho_fresh.estimate - rho_after.estimate) / np.where(se > 0, se, np.inf)
    report.add("rho1_max_z", float(z.max()))
    report.add("min_gap", telemetry.min_gap, passed=telemetry.min_gap > 0)
    report.add("min_origin_distance", telemetry.min_origin, passed=telemetry.min_origin > cfg.origin_floor)
    report.add("rejected_steps", telemetry.rejected)
    report.tables["rho1"] = pd.DataFrame({"bin_lo": edges[:-1], "bin_hi": edges[1:],
                                          "reference": rho_fresh.estimate, "after": rho_after.estimate,
                                          "stderr": se})
    report.tables["smallest"] = pd.DataFrame({"reference": np.sort(fresh)[:len(after)], "after": np.sort(after)})
    return report


def isde_window_experiment(alpha: float, N_outer: int, M_window: int, R: float, T: float, draws: int = 200,
                           seed: int = 0, cfg: Optional[IntegratorConfig] = None, workers: int = 1,
                           progress: bool = True) -> DiagnosticReport:
    """
    Truncated infinite system: the lowest M_window of N_outer sampled particles
    move with cutoff R (and again with 2R, same noise) while the rest stay frozen.
    The mean lowest particle at time T should not feel the doubling beyond the
    Monte Carlo error.
    """
    if not 1 <= M_window <= N_outer:
        raise DomainError(f"need 1 <= M_window <= N_outer, got M_window={M_window}, N_outer={N_outer}")
    cfg = IntegratorConfig() if cfg is None else cfg
    initial = sample_batch(EnsembleSpec(alpha, N_outer, seed), draws, workers=workers, progress=progress)

    lowest = {}
    blowups = 0
    for label, cutoff in (("R", R), ("2R", 2.0 * R)):
        spec = DriftSpec(alpha, "isde", window=M_window, cutoff=cutoff)
        finals, _, failed = _run_batch(spec, cfg, T, seed, initial, workers, progress, f"isde cutoff={cutoff:g}")
        blowups += failed
        lowest[label] = np.array([f[0] for f in finals])

    report = DiagnosticReport("isde_window", {"alpha": alpha, "N_outer": N_outer, "M_window": M_window,
                                              "R": R, "T": T, "draws": draws, "seed": seed})
    report.add("blowups", blowups, tolerance=0)
    a, b = lowest["R"], lowest["2R"]
    if a.size < 2 or b.size < 2:
        report.add("difference", np.nan, passed=False)
        return report
    se = float(np.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size))
    diff = float(b.mean() - a.mean())
    report.add("mean_lowest_R", a.mean())
    report.add("mean_lowest_2R", b.mean())
    report.add("mc_stderr", se)
    report.add("difference", abs(diff), tolerance=se, passed=abs(diff) <= se)
    # the finite-n drift differs from the truncated one by this constant
    report.add("confinement_term", 1.0 / (8.0 * N_outer))
    return report


def strong_order_report(spec: DriftSpec, cfg: IntegratorConfig, T: float, initial=None, levels: int = 4,
                        trajectories: int = 20, seed: int = 0, min_order: float = 0.3) -> DiagnosticReport:
    """
    Step-halving consistency: the same Brownian paths integrated with dt_max / 2^k,
    k = 0..levels-1, against a reference at dt_max / 2^levels. The observed strong
    order is the least-squares slope of log mean error against log dt.
    """
    if initial is None:
        N = spec.N if spec.N is not None else spec.window
        initial = sample(EnsembleSpec(spec.alpha, N, seed)).points
    noise_step = cfg.noise_step
    dts = [noise_step / 2 ** k for k in range(levels + 1)]

    def finals(dt):
        level = IntegratorConfig(dt, min(cfg.dt_min, dt), cfg.safety, cfg.origin_floor, cfg.collision_floor,
                                 cfg.scheme, noise_step)
        return np.array([evolve(initial, spec, level, T, seed, key=(NOISE_FAMILY, j)).states[-1]
                         for j in range(trajectories)])

    reference = finals(dts[-1])
    errors = [float(np.mean(np.max(np.abs(finals(dt) - reference), axis=1))) for dt in dts[:-1]]
    usable = [(dt, e) for dt, e in zip(dts[:-1], errors) if e > 0]
    order = float(np.polyfit(np.log([u[0] for u in usable]), np.log([u[1] for u in usable]), 1)[0]) \
        if len(usable) >= 2 else np.inf

    report = DiagnosticReport("strong_order", {"alpha": spec.alpha, "mode": spec.mode, "T": T,
                                               "levels": levels, "trajectories": trajectories, "seed": seed})
    for dt, e in zip(dts[:-1], errors):
        report.add(f"error_dt{dt:.3g}", e)
    report.add("observed_order", order, tolerance=min_order, passed=order > min_order)
    report.tables["errors"] = pd.DataFrame({"dt": dts[:-1], "error": errors})
    return report
