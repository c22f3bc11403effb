"""Seeded Monte Carlo sweeps comparing the phase-shift algorithms.

Every trial draws a single channel realization that all algorithms share, so
comparisons inside a trial are paired. Per-trial seeds are hashed from
``(base_seed, sweep_index, trial_index)`` and do not depend on execution
order, so a threaded run produces the same records as a sequential one.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .baselines import grid_oracle, no_irs_mrt_rate, random_phases
from .errors import InvalidArgumentError
from .fixed_point import extract_phase_config, solve_fixed_point
from .initialization import initial_point
from .manifold import rcg_solve
from .system import (
    ChannelRealization,
    SystemConfig,
    build_qcqp,
    mrt_beamformer,
    objective_qcqp,
    sample_channels,
    spectral_efficiency,
)

ALGORITHMS = ("fixed_point", "grid_oracle", "no_irs_mrt", "random_phase", "rcg")
SWEEP_KINDS = ("ap_user_distance", "irs_size", "elements_vs_antennas")

TRIAL_HEADER = "sweep_value,trial,algorithm,objective,se_bps_hz,iterations,wall_time_ms,seed"
AGG_HEADER = "sweep_value,algorithm,mean_se,std_se,mean_iters,mean_time_ms,trials"

DEFAULT_TRIALS = 200
FIG1_DISTANCES = tuple(range(15, 70, 5))
FIG2_SIZES = (10, 20, 40, 80, 160)
FIG3_COUNTS = (10, 20, 30, 40, 50, 60)


class ConfigError(InvalidArgumentError):
    pass


class HarnessIOError(OSError):
    pass


@dataclass(frozen=True)
class ScenarioSpec:
    base: SystemConfig
    sweep_kind: str
    sweep_values: tuple
    trials: int = DEFAULT_TRIALS
    base_seed: int = 0
    algorithms: tuple = ("fixed_point", "rcg")
    eps: float = 1e-6
    max_iter: int = 1000
    # r_Au + r_Iu for distance sweeps
    distance_sum_m: float = 70.0
    # size held fixed on the two IRS curves of the elements-vs-antennas sweep
    fixed_count: int = 30
    grid_points: int = 72

    def __post_init__(self):
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))
        object.__setattr__(self, "algorithms", tuple(sorted(set(self.algorithms))))
        if self.sweep_kind not in SWEEP_KINDS:
            raise ConfigError(f"unknown sweep_kind {self.sweep_kind!r}; expected one of {SWEEP_KINDS}")
        if not self.sweep_values:
            raise ConfigError("sweep_values must be non-empty")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ConfigError(f"unknown algorithms {bad}; expected a subset of {ALGORITHMS}")
        if not self.eps > 0 or self.max_iter < 1:
            raise ConfigError("eps must be positive and max_iter >= 1")
        if self.sweep_kind == "ap_user_distance":
            for d in self.sweep_values:
                if not (0 < d < self.distance_sum_m):
                    raise ConfigError(
                        f"AP-user distance {d} must lie in (0, {self.distance_sum_m})"
                    )
        else:
            for n in self.sweep_values:
                if int(n) != n or n < 0:
                    raise ConfigError(f"element counts must be non-negative integers, got {n}")
        if self.sweep_kind == "elements_vs_antennas" and self.fixed_count < 1:
            raise ConfigError("fixed_count must be >= 1")


@dataclass(frozen=True)
class TrialRecord:
    sweep_value: float
    trial_index: int
    algorithm: str
    objective_qcqp: float
    spectral_efficiency_bps_hz: float
    iterations: int
    wall_time_ms: float
    seed_used: int
    sweep_index: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AggregateRecord:
    sweep_value: float
    algorithm: str
    mean_se: float
    std_se: float
    mean_iterations: float
    mean_wall_time_ms: float
    trials: int


def trial_seed(base_seed: int, sweep_index: int, trial_index: int) -> int:
    ss = np.random.SeedSequence([base_seed & (2**64 - 1), sweep_index, trial_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# -- one trial ---------------------------------------------------------------


def _slice(ch: ChannelRealization, m: int, nt: int) -> ChannelRealization:
    return ChannelRealization(ch.ap_irs[:m, :nt], ch.irs_user[:m], ch.ap_user[:nt])


def _trial_systems(spec: ScenarioSpec, value, rng):
    """(label suffix, config, channel) triples evaluated in one trial."""
    base = spec.base
    if spec.sweep_kind == "ap_user_distance":
        cfg = replace(base, d_ap_user_m=float(value), d_irs_user_m=spec.distance_sum_m - float(value))
        return [("", cfg, sample_channels(cfg, rng))]
    if spec.sweep_kind == "irs_size":
        cfg = replace(base, num_irs_elements=int(value))
        return [("", cfg, sample_channels(cfg, rng))]
    n, k = int(value), int(spec.fixed_count)
    # one master draw; i.i.d. sub-blocks keep the three curves paired
    big = max(n, k)
    master = sample_channels(replace(base, num_tx_antennas=big, num_irs_elements=big), rng)
    out = []
    if n >= 1:
        out.append(("", replace(base, num_tx_antennas=n, num_irs_elements=0), _slice(master, 0, n)))
        out.append((":fixed_nt", replace(base, num_tx_antennas=k, num_irs_elements=n), _slice(master, n, k)))
        out.append((":fixed_m", replace(base, num_tx_antennas=n, num_irs_elements=k), _slice(master, k, n)))
    return out


def _run_algorithm(name, spec, cfg, ch, rng):
    """Return (objective, se, iterations) for one algorithm on one channel."""
    M = ch.num_irs_elements
    if name == "no_irs_mrt" or M == 0:
        return 0.0, no_irs_mrt_rate(ch, cfg.p_linear, cfg.sigma2_linear), 0
    q = build_qcqp(ch)
    qn, _ = q.normalized()
    iterations = 0
    if name == "fixed_point":
        res = solve_fixed_point(qn, initial_point(qn), spec.eps, spec.max_iter)
        x, iterations = extract_phase_config(res), res.iterations
    elif name == "rcg":
        res = rcg_solve(qn, initial_point(qn)[:-1], spec.eps, spec.max_iter)
        x, iterations = res.x_final, res.iterations
    elif name == "random_phase":
        x = random_phases(M, rng)
    elif name == "grid_oracle":
        x = grid_oracle(qn, spec.grid_points).best_x
    else:  # pragma: no cover - validated in ScenarioSpec
        raise ConfigError(name)
    f = mrt_beamformer(ch, x, cfg.p_linear)
    se = spectral_efficiency(ch, x, f, cfg.sigma2_linear)
    obj = objective_qcqp(q, np.append(x, 1.0))
    return obj, se, iterations


def run_trial(spec: ScenarioSpec, sweep_index: int, trial_index: int) -> list[TrialRecord]:
    value = spec.sweep_values[sweep_index]
    seed = trial_seed(spec.base_seed, sweep_index, trial_index)
    rng = np.random.default_rng(seed)
    records = []
    paired_curves = spec.sweep_kind == "elements_vs_antennas"
    for suffix, cfg, ch in _trial_systems(spec, value, rng):
        for name in spec.algorithms:
            # no-IRS curve vs. IRS curves of the elements-vs-antennas sweep
            if paired_curves and (name == "no_irs_mrt") == bool(suffix):
                continue
            t0 = time.perf_counter()
            obj, se, iters = _run_algorithm(name, spec, cfg, ch, rng)
            dt = (time.perf_counter() - t0) * 1e3
            records.append(
                TrialRecord(value, trial_index, name + suffix, obj, se, iters, dt, seed, sweep_index)
            )
    return records


def _sort_key(r: TrialRecord):
    return (r.sweep_index, r.trial_index, r.algorithm)


def aggregate(records) -> list[AggregateRecord]:
    groups: dict = {}
    for r in sorted(records, key=_sort_key):
        groups.setdefault((r.sweep_index, r.algorithm), []).append(r)
    out = []
    for (_, alg), rs in sorted(groups.items()):
        se = np.array([r.spectral_efficiency_bps_hz for r in rs])
        out.append(
            AggregateRecord(
                rs[0].sweep_value,
                alg,
                float(se.mean()),
                float(se.std()),
                float(np.mean([r.iterations for r in rs])),
                float(np.mean([r.wall_time_ms for r in rs])),
                len(rs),
            )
        )
    return out


def run_scenario(spec: ScenarioSpec, workers: int = 1):
    """Run every (sweep value, trial) unit and return ``(records, aggregates)``."""
    units = [(i, t) for i in range(len(spec.sweep_values)) for t in range(spec.trials)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda u: run_trial(spec, *u), units))
    else:
        chunks = [run_trial(spec, i, t) for i, t in units]
    records = sorted((r for c in chunks for r in c), key=_sort_key)
    return records, aggregate(records)


# -- the three studies ------------------------------------------------------


def fig1_spec(trials=DEFAULT_TRIALS, seed=0, **overrides) -> ScenarioSpec:
    kw = dict(
        base=SystemConfig(num_tx_antennas=8, num_irs_elements=10, d_ap_irs_m=50.0),
        sweep_kind="ap_user_distance",
        sweep_values=FIG1_DISTANCES,
        trials=trials,
        base_seed=seed,
        algorithms=("fixed_point", "rcg", "random_phase", "no_irs_mrt"),
        distance_sum_m=70.0,
    )
    kw.update(overrides)
    return ScenarioSpec(**kw)


def fig2_spec(trials=DEFAULT_TRIALS, seed=0, **overrides) -> ScenarioSpec:
    kw = dict(
        base=SystemConfig(num_tx_antennas=5, d_ap_irs_m=60.0, d_ap_user_m=60.0, d_irs_user_m=10.0),
        sweep_kind="irs_size",
        sweep_values=FIG2_SIZES,
        trials=trials,
        base_seed=seed,
        algorithms=("fixed_point", "rcg"),
    )
    kw.update(overrides)
    return ScenarioSpec(**kw)


def fig3_spec(trials=DEFAULT_TRIALS, seed=0, **overrides) -> ScenarioSpec:
    kw = dict(
        base=SystemConfig(d_ap_irs_m=50.0, d_ap_user_m=40.0, d_irs_user_m=30.0),
        sweep_kind="elements_vs_antennas",
        sweep_values=FIG3_COUNTS,
        trials=trials,
        base_seed=seed,
        algorithms=("rcg", "no_irs_mrt"),
        fixed_count=30,
    )
    kw.update(overrides)
    return ScenarioSpec(**kw)


def sweep_fig1(trials=DEFAULT_TRIALS, seed=0, workers=1, **overrides):
    """AP-user distance sweep with r_AI = 50 m and r_Au + r_Iu = 70 m."""
    return run_scenario(fig1_spec(trials, seed, **overrides), workers)


def sweep_fig2(trials=DEFAULT_TRIALS, seed=0, workers=1, **overrides):
    """IRS size sweep with Nt = 5; wall time per algorithm is recorded alongside SE."""
    return run_scenario(fig2_spec(trials, seed, **overrides), workers)


def sweep_fig3(trials=DEFAULT_TRIALS, seed=0, workers=1, **overrides):
    """No-IRS MRT versus an IRS with Nt fixed (``:fixed_nt``) or M fixed (``:fixed_m``)."""
    return run_scenario(fig3_spec(trials, seed, **overrides), workers)


# -- CSV and config I/O -----------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.10g}"


def agg_path(path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".agg.csv") if p.suffix == ".csv" else p.with_name(p.name + ".agg.csv")


def emit_csv(records, path) -> tuple[Path, Path]:
    """Write per-trial rows to ``path`` and per-group aggregates next to it."""
    records = sorted(records, key=_sort_key)
    path = Path(path)
    apath = agg_path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRIAL_HEADER.split(","))
            for r in records:
                w.writerow([
                    _fmt(r.sweep_value), r.trial_index, r.algorithm, _fmt(r.objective_qcqp),
                    _fmt(r.spectral_efficiency_bps_hz), r.iterations, _fmt(r.wall_time_ms), r.seed_used,
                ])
        with apath.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(AGG_HEADER.split(","))
            for a in aggregate(records):
                w.writerow([
                    _fmt(a.sweep_value), a.algorithm, _fmt(a.mean_se), _fmt(a.std_se),
                    _fmt(a.mean_iterations), _fmt(a.mean_wall_time_ms), a.trials,
                ])
    except OSError as exc:
        raise HarnessIOError(f"cannot write CSV output to {exc.filename or path}: {exc.strerror}") from exc
    return path, apath


def spec_from_dict(data: dict) -> ScenarioSpec:
    allowed = {f.name for f in fields(ScenarioSpec)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    data = dict(data)
    base = data.pop("base", {})
    if not isinstance(base, dict):
        raise ConfigError("'base' must be an object of system parameters")
    unknown = sorted(set(base) - set(SystemConfig.field_names()))
    if unknown:
        raise ConfigError(f"unknown keys in 'base': {unknown}")
    for key in ("sweep_kind", "sweep_values"):
        if key not in data:
            raise ConfigError(f"missing required key {key!r}")
    try:
        return ScenarioSpec(base=SystemConfig(**base), **data)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_spec(path) -> ScenarioSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise HarnessIOError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return spec_from_dict(data)


def summarize(aggregates) -> str:
    lines = [f"{'sweep':>8}  {'algorithm':<22}{'mean SE':>10}{'std':>9}{'iters':>9}{'ms':>10}"]
    for a in aggregates:
        lines.append(
            f"{_fmt(a.sweep_value):>8}  {a.algorithm:<22}{a.mean_se:10.4f}{a.std_se:9.4f}"
            f"{a.mean_iterations:9.1f}{a.mean_wall_time_ms:10.3f}"
        )
    return "\n".join(lines)


__all__ = [
    "ALGORITHMS", "AggregateRecord", "ConfigError", "HarnessIOError", "ScenarioSpec",
    "TrialRecord", "aggregate", "emit_csv", "fig1_spec", "fig2_spec", "fig3_spec",
    "load_spec", "run_scenario", "run_trial", "spec_from_dict", "summarize",
    "sweep_fig1", "sweep_fig2", "sweep_fig3", "trial_seed",
]
