"""Experiment runners: transmission sweeps, scaling studies, file output.

A sweep optimizes the sensor at every point of a transmission grid for a list
of input variants (which sides inject, how many pulses, how much squeezing)
and records total and per-phase variance bounds.  Quantum rows are paired
with the classical variant of the same geometry to report the advantage
ratio.  A scaling study grows the segment count with classical light,
optimizing the shared reflector transmission and reference phases at each
size, then converts variance to the photon number that would reach a target
sensitivity (classical variance is exactly inversely proportional to photon
number, so one optimized point determines the requirement).

Every grid point derives its own seed from the root seed and its grid index,
and within one variant the T grid is walked in order so each point can warm
start from its neighbor.  Variants are independent and may run on a thread
pool; results are collected in submission order, so serial and parallel runs
write identical bytes.  Output is a headered CSV plus a JSON sidecar with
the full optimized configurations; the only nondeterministic content (a
timestamp line and wall-clock figure) can be suppressed by flag.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from cascade_sensor.lattice import (
    SensorConfig,
    SidePolicy,
    config_from_dict,
    config_to_dict,
    run_sensor,
    single_pass_transmission,
    staggered_schedule,
)
from cascade_sensor.metrology import fisher_matrix, quantum_advantage
from cascade_sensor.optimize import (
    DEConfig,
    FreeParameterSpec,
    NoDistinguishableDesignError,
    optimize_sensor,
)

__all__ = [
    "SweepMode",
    "SweepRecord",
    "SweepSpec",
    "SweepVariant",
    "TimeBudgetExceeded",
    "fit_power_law",
    "run_scaling_study",
    "run_transmission_sweep",
    "validate_config",
]

# Per-phase variance for the default 10 mrad sensitivity target.
DEFAULT_TARGET_VARIANCE = 1e-4


class TimeBudgetExceeded(RuntimeError):
    """A wall-clock budget ran out before the requested grid finished."""


class SweepMode(Enum):
    TRANSMISSION_SWEEP = "transmission_sweep"
    SCALING_STUDY = "scaling_study"


@dataclass(frozen=True)
class SweepVariant:
    """One input arrangement: injection sides, squeezing, pulse count.

    ``num_pulses`` of None picks the minimum for the policy: one pulse
    left-only, two bidirectional.
    """

    sides: SidePolicy
    r: float = 0.0
    num_pulses: int | None = None

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("variant r must be nonnegative")
        if self.num_pulses is not None and self.num_pulses < 1:
            raise ValueError("variant num_pulses must be at least 1")

    def pulse_count(self) -> int:
        if self.num_pulses is not None:
            return self.num_pulses
        return 1 if self.sides is SidePolicy.LEFT_ONLY else 2

    def label(self) -> str:
        side = "one" if self.sides is SidePolicy.LEFT_ONLY else "two"
        kind = "classical" if self.r == 0 else f"squeezed_r{self.r:g}"
        return f"{side}_m{self.pulse_count()}_{kind}"


@dataclass(frozen=True)
class SweepSpec:
    """Full description of one experiment run."""

    mode: SweepMode
    output: str
    alpha: float
    de: DEConfig = field(default_factory=DEConfig)
    # transmission-sweep fields
    n_phases: int = 2
    transmissions: tuple[float, ...] = ()
    variants: tuple[SweepVariant, ...] = ()
    sensing_phases: tuple[float, ...] | None = None
    # scaling-study fields
    n_list: tuple[int, ...] = ()
    target_variance: float = DEFAULT_TARGET_VARIANCE
    k_max: int = 7

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        if self.target_variance <= 0:
            raise ValueError("target_variance must be positive")
        if self.mode is SweepMode.TRANSMISSION_SWEEP:
            if not self.transmissions:
                raise ValueError("transmission sweep needs a nonempty T grid")
            for t in self.transmissions:
                if not 0.0 < t < 1.0:
                    raise ValueError(f"sweep transmission {t} outside (0, 1)")
            if not self.variants:
                raise ValueError("transmission sweep needs at least one variant")
            if self.n_phases < 1:
                raise ValueError("n_phases must be at least 1")
            if self.sensing_phases is not None and len(self.sensing_phases) != self.n_phases:
                raise ValueError(
                    f"expected {self.n_phases} sensing phases, got {len(self.sensing_phases)}"
                )
        else:
            if not self.n_list:
                raise ValueError("scaling study needs a nonempty N list")
            for n in self.n_list:
                if n < 1:
                    raise ValueError("scaling N values must be at least 1")


@dataclass(frozen=True)
class SweepRecord:
    """One optimized grid point, as written to the CSV."""

    n_phases: int
    transmission: float
    variant: str
    num_pulses: int
    r: float
    status: str  # "ok" or "divergent"
    total_variance: float | None
    phase_variances: tuple[float, ...] | None
    q_advantage: float | None
    truncation_loss: float
    photons_in: float
    de_generations: int

    def __post_init__(self) -> None:
        if self.status == "divergent" and self.total_variance is not None:
            raise ValueError("divergent records carry no variances")


def _default_phase_spread(n: int) -> tuple[float, ...]:
    """Generic operating point: distinct, incommensurate-ish phase values."""
    return tuple((0.3 + 0.4 * i) % (2.0 * math.pi) for i in range(n))


def _base_config(
    spec: SweepSpec, variant: SweepVariant, transmission: float
) -> SensorConfig:
    n = spec.n_phases
    phases = spec.sensing_phases or _default_phase_spread(n)
    pulses = staggered_schedule(
        n,
        variant.pulse_count(),
        variant.sides,
        alpha=spec.alpha,
        r=variant.r,
    )
    return SensorConfig(
        n_phases=n,
        transmissions=(transmission,) * (n - 1),
        sensing_phases=phases,
        reference_phases=(0.0,) * n,
        pulses=pulses,
        k_max=spec.k_max,
    )


def _optimize_point(
    base: SensorConfig, de: DEConfig, seed: int, warm: tuple[float, ...] | None
) -> tuple[SweepRecord | None, tuple[float, ...] | None]:
    """Optimize one grid point; returns (record fields, warm vector)."""
    free = FreeParameterSpec(
        pulse_theta=True,
        pulse_chi=any(p.r > 0 for p in base.pulses),
        reference_phases=True,
        uniform_transmission=False,
    )
    de_seeded = DEConfig(
        population_size=de.population_size,
        mutation_factor=de.mutation_factor,
        crossover_rate=de.crossover_rate,
        max_generations=de.max_generations,
        tolerance=de.tolerance,
        seed=seed,
    )
    guesses = [warm] if warm is not None else []
    try:
        best_config, fres, opt = optimize_sensor(
            base, free, de_seeded, initial_guesses=guesses, full_result=True
        )
    except NoDistinguishableDesignError:
        return None, warm

    out = run_sensor(best_config)
    vector = tuple(float(v) for v in free.initial_vector(best_config))
    if fres.total_variance is None:
        return None, vector
    record = (
        best_config,
        fres,
        out.truncation_loss,
        out.input_photons,
        opt.generations_run,
    )
    return record, vector


def _variant_lane(
    spec: SweepSpec, variant: SweepVariant, variant_index: int, root_seed: int
) -> list[tuple[SweepRecord, dict | None]]:
    """Walk the T grid for one variant, warm-starting along the way."""
    rows: list[tuple[SweepRecord, dict | None]] = []
    warm: tuple[float, ...] | None = None
    for t_index, transmission in enumerate(spec.transmissions):
        seed = root_seed + variant_index * len(spec.transmissions) + t_index
        base = _base_config(spec, variant, transmission)
        point, warm = _optimize_point(base, spec.de, seed, warm)
        if point is None:
            record = SweepRecord(
                n_phases=spec.n_phases,
                transmission=transmission,
                variant=variant.label(),
                num_pulses=variant.pulse_count(),
                r=variant.r,
                status="divergent",
                total_variance=None,
                phase_variances=None,
                q_advantage=None,
                truncation_loss=0.0,
                photons_in=variant.pulse_count()
                * (spec.alpha**2 + math.sinh(variant.r) ** 2),
                de_generations=0,
            )
            rows.append((record, None))
            continue
        best_config, fres, trunc, photons, generations = point
        record = SweepRecord(
            n_phases=spec.n_phases,
            transmission=transmission,
            variant=variant.label(),
            num_pulses=variant.pulse_count(),
            r=variant.r,
            status="ok",
            total_variance=fres.total_variance,
            phase_variances=fres.crb_variances,
            q_advantage=None,
            truncation_loss=trunc,
            photons_in=photons,
            de_generations=generations,
        )
        rows.append((record, config_to_dict(best_config)))
    return rows


def _attach_q(records: list[SweepRecord]) -> list[SweepRecord]:
    """Pair each squeezed row with its classical twin and fill Q.

    The classical twin shares sides and pulse count; its variance is first
    rescaled to the squeezed row's slightly larger photon budget (classical
    variance is exactly proportional to 1/photons).
    """
    classical: dict[tuple[str, int, float], SweepRecord] = {}
    for rec in records:
        if rec.r == 0 and rec.status == "ok":
            key = (rec.variant.split("_m")[0], rec.num_pulses, rec.transmission)
            classical.setdefault(key, rec)

    out = []
    for rec in records:
        if rec.r > 0 and rec.status == "ok" and rec.total_variance is not None:
            key = (rec.variant.split("_m")[0], rec.num_pulses, rec.transmission)
            twin = classical.get(key)
            if twin is not None and twin.total_variance is not None:
                matched = twin.total_variance * twin.photons_in / rec.photons_in
                q = quantum_advantage(matched, rec.total_variance)
                rec = replace(rec, q_advantage=q)
        out.append(rec)
    return out


def run_transmission_sweep(
    spec: SweepSpec,
    *,
    root_seed: int | None = None,
    threads: int = 1,
    max_minutes: float | None = None,
    suppress_timestamp: bool = False,
) -> list[SweepRecord]:
    """Optimize every (T, variant) point and write CSV plus sidecar."""
    if spec.mode is not SweepMode.TRANSMISSION_SWEEP:
        raise ValueError("spec mode is not transmission_sweep")
    seed = spec.de.seed if root_seed is None else root_seed
    started = time.monotonic()

    lanes: list[list[tuple[SweepRecord, dict | None]]]
    if threads > 1 and len(spec.variants) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_variant_lane, spec, variant, vi, seed)
                for vi, variant in enumerate(spec.variants)
            ]
            lanes = [f.result() for f in futures]
    else:
        lanes = []
        for vi, variant in enumerate(spec.variants):
            over_budget = (
                max_minutes is not None
                and vi > 0
                and time.monotonic() - started > max_minutes * 60
            )
            if over_budget:
                raise TimeBudgetExceeded(
                    f"sweep exceeded {max_minutes} minutes with "
                    f"{len(spec.variants) - vi} variants unfinished"
                )
            lanes.append(_variant_lane(spec, variant, vi, seed))

    records = [rec for lane in lanes for rec, _cfg in lane]
    configs = [cfg for lane in lanes for _rec, cfg in lane]
    records = _attach_q(records)

    elapsed = time.monotonic() - started
    _write_outputs(
        spec, records, configs, seed, elapsed, suppress_timestamp, extra=None
    )
    return records


def _scaling_point(
    spec: SweepSpec, n: int, seed: int, warm: tuple[float, ...] | None
) -> tuple[dict, tuple[float, ...] | None]:
    """Optimize one segment count and convert variance to required photons."""
    phases = _default_phase_spread(n)
    pulses = staggered_schedule(n, 2, SidePolicy.BIDIRECTIONAL, alpha=spec.alpha)
    base = SensorConfig(
        n_phases=n,
        transmissions=(0.5,) * (n - 1),
        sensing_phases=phases,
        reference_phases=(0.0,) * n,
        pulses=pulses,
        k_max=spec.k_max,
    )
    free = FreeParameterSpec(
        pulse_theta=False,
        pulse_chi=False,
        reference_phases=True,
        uniform_transmission=n > 1,
    )
    de = DEConfig(
        population_size=spec.de.population_size,
        mutation_factor=spec.de.mutation_factor,
        crossover_rate=spec.de.crossover_rate,
        max_generations=spec.de.max_generations,
        tolerance=spec.de.tolerance,
        seed=seed,
    )
    guesses = []
    if warm is not None and len(warm) == free.dimension(base):
        guesses.append(warm)
    best_config, fres, opt = optimize_sensor(
        base, free, de, initial_guesses=guesses, full_result=True
    )
    out = run_sensor(best_config)

    probe_photons = out.input_photons
    total_target = spec.target_variance * n
    required = (
        None
        if fres.total_variance is None
        else probe_photons * fres.total_variance / total_target
    )
    point = {
        "n_phases": n,
        "config": best_config,
        "fisher": fres,
        "transmission": best_config.transmissions[0] if n > 1 else 1.0,
        "single_pass": single_pass_transmission(best_config),
        "truncation_loss": out.truncation_loss,
        "probe_photons": probe_photons,
        "required_photons": required,
        "generations": opt.generations_run,
    }
    vector = tuple(float(v) for v in free.initial_vector(best_config))
    return point, vector


def _verify_photon_scaling(spec: SweepSpec, point: dict) -> float:
    """Re-check the 1/photons conversion by direct evaluation.

    Returns the relative error between the directly evaluated total variance
    at the scaled amplitude and the target total variance.
    """
    config: SensorConfig = point["config"]
    n = point["n_phases"]
    total_target = spec.target_variance * n
    scale = math.sqrt(point["fisher"].total_variance / total_target)
    scaled_pulses = tuple(
        type(p)(
            side=p.side,
            time_bin=p.time_bin,
            alpha=p.alpha * scale,
            theta=p.theta,
            r=p.r,
            chi=p.chi,
        )
        for p in config.pulses
    )
    scaled = SensorConfig(
        n_phases=config.n_phases,
        transmissions=config.transmissions,
        sensing_phases=config.sensing_phases,
        reference_phases=config.reference_phases,
        pulses=scaled_pulses,
        k_max=config.k_max,
    )
    direct = fisher_matrix(scaled)
    if direct.total_variance is None:
        return float("inf")
    return abs(direct.total_variance - total_target) / total_target


def run_scaling_study(
    spec: SweepSpec,
    *,
    root_seed: int | None = None,
    threads: int = 1,
    max_minutes: float | None = None,
    suppress_timestamp: bool = False,
) -> list[SweepRecord]:
    """Optimize each segment count, fit the photon power law, write files.

    Stops adding segment counts once the wall-clock budget is spent; the fit
    covers whatever range completed.
    """
    del threads  # sizes run serially: the budget decides how far to go
    if spec.mode is not SweepMode.SCALING_STUDY:
        raise ValueError("spec mode is not scaling_study")
    seed = spec.de.seed if root_seed is None else root_seed
    started = time.monotonic()

    points: list[dict] = []
    warm: tuple[float, ...] | None = None
    completed_all = True
    for index, n in enumerate(spec.n_list):
        if max_minutes is not None and time.monotonic() - started > max_minutes * 60:
            completed_all = False
            break
        point, warm = _scaling_point(spec, n, seed + index, warm)
        points.append(point)

    if not points:
        raise TimeBudgetExceeded(
            f"scaling budget of {max_minutes} minutes spent before any size finished"
        )

    scaling_check = _verify_photon_scaling(spec, points[0])

    records = []
    configs = []
    for point in points:
        fres = point["fisher"]
        ok = point["required_photons"] is not None
        records.append(
            SweepRecord(
                n_phases=point["n_phases"],
                transmission=point["transmission"],
                variant="scaling_classical_m2",
                num_pulses=2,
                r=0.0,
                status="ok" if ok else "divergent",
                total_variance=fres.total_variance if ok else None,
                phase_variances=fres.crb_variances if ok else None,
                q_advantage=None,
                truncation_loss=point["truncation_loss"],
                photons_in=point["required_photons"] if ok else point["probe_photons"],
                de_generations=point["generations"],
            )
        )
        configs.append(config_to_dict(point["config"]))

    fit = None
    usable = [
        (p["n_phases"], p["required_photons"])
        for p in points
        if p["required_photons"] is not None
    ]
    if len(usable) >= 3:
        exponent, prefactor, r_squared = fit_power_law(usable)
        fit = {
            "exponent": exponent,
            "prefactor": prefactor,
            "r_squared": r_squared,
            "n_range": [usable[0][0], usable[-1][0]],
            "completed_all_sizes": completed_all,
            "single_pass_transmissions": [p["single_pass"] for p in points],
            "scaling_check_relative_error": scaling_check,
        }

    elapsed = time.monotonic() - started
    _write_outputs(
        spec, records, configs, seed, elapsed, suppress_timestamp, extra=fit
    )
    return records


def fit_power_law(points) -> tuple[float, float, float]:
    """Least-squares fit photons = prefactor * N^exponent on log-log axes."""
    pts = [(float(n), float(p)) for n, p in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points to fit")
    if any(n <= 0 or p <= 0 for n, p in pts):
        raise ValueError("power-law fit needs positive data")
    log_n = np.log([n for n, _ in pts])
    log_p = np.log([p for _, p in pts])
    design = np.stack([log_n, np.ones_like(log_n)], axis=1)
    coeffs, _res, _rank, _sv = np.linalg.lstsq(design, log_p, rcond=None)
    exponent, intercept = float(coeffs[0]), float(coeffs[1])
    predicted = design @ coeffs
    ss_res = float(np.sum((log_p - predicted) ** 2))
    ss_tot = float(np.sum((log_p - log_p.mean()) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res < 1e-18 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return exponent, math.exp(intercept), r_squared


# --- file output -----------------------------------------------------------

_CSV_COLUMNS = [
    "n_phases",
    "transmission",
    "variant",
    "num_pulses",
    "r",
    "status",
    "total_variance",
    "phase_variances",
    "q_advantage",
    "truncation_loss",
    "photons_in",
    "de_generations",
]


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ";".join(repr(float(v)) for v in value)
    return str(value)


def _write_outputs(
    spec: SweepSpec,
    records: list[SweepRecord],
    configs: list[dict | None],
    seed: int,
    elapsed: float,
    suppress_timestamp: bool,
    extra: dict | None,
) -> None:
    path = Path(spec.output)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)

    lines = []
    if not suppress_timestamp:
        lines.append(f"# generated {time.strftime('%Y-%m-%dT%H:%M:%S%z')}")
    lines.append(",".join(_CSV_COLUMNS))
    for rec in records:
        row = [
            _csv_cell(rec.n_phases),
            _csv_cell(rec.transmission),
            _csv_cell(rec.variant),
            _csv_cell(rec.num_pulses),
            _csv_cell(rec.r),
            _csv_cell(rec.status),
            _csv_cell(rec.total_variance),
            _csv_cell(rec.phase_variances),
            _csv_cell(rec.q_advantage),
            _csv_cell(rec.truncation_loss),
            _csv_cell(rec.photons_in),
            _csv_cell(rec.de_generations),
        ]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")

    sidecar = {
        "spec": spec_to_dict(spec),
        "root_seed": seed,
        "record_count": len(records),
        "optimized_configs": configs,
    }
    if extra is not None:
        sidecar["fit"] = extra
    if not suppress_timestamp:
        sidecar["wall_clock_seconds"] = elapsed
    side_path = path.with_suffix(path.suffix + ".meta.json")
    side_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


# --- spec (de)serialization -------------------------------------------------

_SIDES = {"one": SidePolicy.LEFT_ONLY, "two": SidePolicy.BIDIRECTIONAL}
_SIDES_BACK = {v: k for k, v in _SIDES.items()}


def de_config_from_dict(data: dict) -> DEConfig:
    if not isinstance(data, dict):
        raise ValueError("de must be a mapping")
    known = {
        "population_size",
        "mutation_factor",
        "crossover_rate",
        "max_generations",
        "tolerance",
        "seed",
    }
    unknown = data.keys() - known
    if unknown:
        raise ValueError(f"de has unknown fields: {', '.join(sorted(unknown))}")
    return DEConfig(
        population_size=data.get("population_size"),
        mutation_factor=float(data.get("mutation_factor", 0.8)),
        crossover_rate=float(data.get("crossover_rate", 0.9)),
        max_generations=int(data.get("max_generations", 300)),
        tolerance=float(data.get("tolerance", 1e-8)),
        seed=int(data.get("seed", 0)),
    )


def de_config_to_dict(de: DEConfig) -> dict:
    return {
        "population_size": de.population_size,
        "mutation_factor": de.mutation_factor,
        "crossover_rate": de.crossover_rate,
        "max_generations": de.max_generations,
        "tolerance": de.tolerance,
        "seed": de.seed,
    }


def spec_from_dict(data: dict) -> SweepSpec:
    if not isinstance(data, dict):
        raise ValueError("spec must be a mapping")
    if "mode" not in data:
        raise ValueError("spec missing field: mode")
    mode_name = data["mode"]
    modes = {m.value: m for m in SweepMode}
    if mode_name not in modes:
        raise ValueError(
            f"mode must be one of {sorted(modes)}, got {mode_name!r}"
        )
    mode = modes[mode_name]
    known = {
        "mode",
        "output",
        "alpha",
        "de",
        "n_phases",
        "transmissions",
        "variants",
        "sensing_phases",
        "n_list",
        "target_variance",
        "k_max",
    }
    unknown = data.keys() - known
    if unknown:
        raise ValueError(f"spec has unknown fields: {', '.join(sorted(unknown))}")
    if "output" not in data:
        raise ValueError("spec missing field: output")
    if "alpha" not in data:
        raise ValueError("spec missing field: alpha")

    variants = []
    for i, entry in enumerate(data.get("variants", [])):
        if not isinstance(entry, dict):
            raise ValueError(f"variants[{i}] must be a mapping")
        side_name = entry.get("sides")
        if side_name not in _SIDES:
            raise ValueError(f"variants[{i}].sides must be 'one' or 'two'")
        vknown = {"sides", "r", "num_pulses"}
        vunknown = entry.keys() - vknown
        if vunknown:
            raise ValueError(
                f"variants[{i}] has unknown fields: {', '.join(sorted(vunknown))}"
            )
        variants.append(
            SweepVariant(
                sides=_SIDES[side_name],
                r=float(entry.get("r", 0.0)),
                num_pulses=(
                    None
                    if entry.get("num_pulses") is None
                    else int(entry["num_pulses"])
                ),
            )
        )

    sensing = data.get("sensing_phases")
    return SweepSpec(
        mode=mode,
        output=str(data["output"]),
        alpha=float(data["alpha"]),
        de=de_config_from_dict(data.get("de", {})),
        n_phases=int(data.get("n_phases", 2)),
        transmissions=tuple(float(t) for t in data.get("transmissions", ())),
        variants=tuple(variants),
        sensing_phases=None if sensing is None else tuple(float(p) for p in sensing),
        n_list=tuple(int(n) for n in data.get("n_list", ())),
        target_variance=float(data.get("target_variance", DEFAULT_TARGET_VARIANCE)),
        k_max=int(data.get("k_max", 7)),
    )


def spec_to_dict(spec: SweepSpec) -> dict:
    return {
        "mode": spec.mode.value,
        "output": spec.output,
        "alpha": spec.alpha,
        "de": de_config_to_dict(spec.de),
        "n_phases": spec.n_phases,
        "transmissions": list(spec.transmissions),
        "variants": [
            {
                "sides": _SIDES_BACK[v.sides],
                "r": v.r,
                "num_pulses": v.num_pulses,
            }
            for v in spec.variants
        ],
        "sensing_phases": None
        if spec.sensing_phases is None
        else list(spec.sensing_phases),
        "n_list": list(spec.n_list),
        "target_variance": spec.target_variance,
        "k_max": spec.k_max,
    }


def validate_config(path) -> list[str]:
    """Schema-check a JSON config file; returns human-readable problems.

    Accepts either an experiment spec (recognized by its "mode" field) or a
    bare sensor configuration.  An empty list means the file is valid.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        return [f"cannot read {path}: {exc}"]
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        return [f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"]
    if not isinstance(data, dict):
        return ["top-level JSON value must be an object"]

    try:
        if "mode" in data:
            spec_from_dict(data)
        else:
            config_from_dict(data)
    except ValueError as exc:
        return [str(exc)]
    except TypeError as exc:
        return [str(exc)]
    return []
