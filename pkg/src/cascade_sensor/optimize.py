"""Differential-evolution search over the sensor's free parameters.

The figure of merit is the total Cramér-Rao variance from the Fisher matrix,
a nonconvex function of pulse phases, squeezing angles, reference phases, and
reflector transmission.  A classic DE/rand/1/bin population search handles it
without derivatives: mutate three distinct partners, crossover against the
target with at least one mutated coordinate, keep the better vector.  All
randomness is drawn from one seeded generator in a fixed order, so a run is
reproducible bit for bit regardless of how candidate evaluations are batched.

Angle parameters live on a circle; candidates leaving the box are wrapped for
periodic coordinates and reflected back inside otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from cascade_sensor import _engine
from cascade_sensor.lattice import SensorConfig, _compiled_for, _tiled_params
from cascade_sensor.metrology import (
    FisherResult,
    _crb_from_matrix,
    _fisher_from_block,
    _stencil_rows,
    fisher_matrix,
)

__all__ = [
    "DEConfig",
    "FreeParameterSpec",
    "NoDistinguishableDesignError",
    "OptimizationResult",
    "de_minimize",
    "optimize_sensor",
]

Array = NDArray[np.float64]

TWO_PI = 2.0 * np.pi
STAGNATION_WINDOW = 30

# Memory cap for one batched propagation chunk when covariances are tracked.
_CHUNK_BYTES = 64e6


class NoDistinguishableDesignError(RuntimeError):
    """Every candidate in the search box had a singular Fisher matrix."""


@dataclass(frozen=True)
class DEConfig:
    """Hyperparameters of the evolution run.

    ``population_size`` of None picks 15 per search dimension.  ``tolerance``
    is relative: the run stops once the best objective improves by less than
    tolerance x |best| over 30 consecutive generations.
    """

    population_size: int | None = None
    mutation_factor: float = 0.8
    crossover_rate: float = 0.9
    max_generations: int = 300
    tolerance: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size is not None and self.population_size < 4:
            raise ValueError("population_size must be at least 4")
        if not 0.0 < self.mutation_factor <= 2.0:
            raise ValueError("mutation_factor must be in (0, 2]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0, 1]")
        if self.max_generations < 1:
            raise ValueError("max_generations must be at least 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")

    def resolved_population(self, dimension: int) -> int:
        if self.population_size is not None:
            return self.population_size
        return max(4, 15 * dimension)


@dataclass(frozen=True)
class OptimizationResult:
    best_params: tuple[float, ...]
    best_objective: float
    generations_run: int
    convergence_trace: tuple[float, ...]


@dataclass(frozen=True)
class FreeParameterSpec:
    """Which sensor knobs the optimizer may move.

    Free angles (pulse phase theta, squeezing angle chi, reference phases)
    range over [0, 2pi) and wrap; a free transmission is one value shared by
    every reflector, confined to [0.001, 0.999].  With tied_pulse_angles the
    per-pulse angles collapse to one shared theta and one shared chi, which
    is useful for checking how much the per-pulse freedom actually buys.
    """

    pulse_theta: bool = True
    pulse_chi: bool = True
    reference_phases: bool = True
    uniform_transmission: bool = False
    tied_pulse_angles: bool = False

    def __post_init__(self) -> None:
        if not (
            self.pulse_theta
            or self.pulse_chi
            or self.reference_phases
            or self.uniform_transmission
        ):
            raise ValueError("at least one parameter group must be free")

    def _angle_width(self, config: SensorConfig) -> int:
        # tied mode: one shared theta (and one shared chi) for every pulse
        return 1 if self.tied_pulse_angles else len(config.pulses)

    def dimension(self, config: SensorConfig) -> int:
        w = self._angle_width(config)
        dim = 0
        if self.pulse_theta:
            dim += w
        if self.pulse_chi:
            dim += w
        if self.reference_phases:
            dim += config.n_phases
        if self.uniform_transmission:
            dim += 1
        return dim

    def bounds(self, config: SensorConfig) -> tuple[tuple[float, float], ...]:
        result: list[tuple[float, float]] = []
        w = self._angle_width(config)
        if self.pulse_theta:
            result += [(0.0, TWO_PI)] * w
        if self.pulse_chi:
            result += [(0.0, TWO_PI)] * w
        if self.reference_phases:
            result += [(0.0, TWO_PI)] * config.n_phases
        if self.uniform_transmission:
            result.append((0.001, 0.999))
        return tuple(result)

    def periodic_mask(self, config: SensorConfig) -> Array:
        mask = np.ones(self.dimension(config), dtype=bool)
        if self.uniform_transmission:
            mask[-1] = False
        return mask

    def initial_vector(self, config: SensorConfig) -> Array:
        values: list[float] = []
        pulses = config.pulses[:1] if self.tied_pulse_angles else config.pulses
        if self.pulse_theta:
            values += [p.theta % TWO_PI for p in pulses]
        if self.pulse_chi:
            values += [p.chi % TWO_PI for p in pulses]
        if self.reference_phases:
            values += [p % TWO_PI for p in config.reference_phases]
        if self.uniform_transmission:
            t = config.transmissions[0] if config.transmissions else 0.5
            values.append(min(max(t, 0.001), 0.999))
        return np.asarray(values, dtype=float)

    def apply(self, config: SensorConfig, vector: Sequence[float]) -> SensorConfig:
        vec = np.asarray(vector, dtype=float)
        if vec.shape != (self.dimension(config),):
            raise ValueError("parameter vector has wrong dimension")
        pos = 0
        m = len(config.pulses)
        w = self._angle_width(config)
        pulses = list(config.pulses)
        if self.pulse_theta:
            block = vec[pos : pos + w] if w == m else np.full(m, vec[pos])
            pulses = [replace(p, theta=float(v)) for p, v in zip(pulses, block)]
            pos += w
        if self.pulse_chi:
            block = vec[pos : pos + w] if w == m else np.full(m, vec[pos])
            pulses = [replace(p, chi=float(v)) for p, v in zip(pulses, block)]
            pos += w
        updates: dict = {"pulses": tuple(pulses)}
        if self.reference_phases:
            updates["reference_phases"] = tuple(
                float(v) for v in vec[pos : pos + config.n_phases]
            )
            pos += config.n_phases
        if self.uniform_transmission:
            updates["transmissions"] = (float(vec[pos]),) * (config.n_phases - 1)
            pos += 1
        return replace(config, **updates)


def _fold_into_box(
    values: Array, lower: Array, upper: Array, periodic: Array
) -> Array:
    """Wrap periodic coordinates; reflect the rest back inside the box."""
    span = upper - lower
    out = values.copy()

    wrapped = lower + np.mod(out - lower, span)
    folded = np.mod(out - lower, 2.0 * span)
    folded = np.where(folded > span, 2.0 * span - folded, folded) + lower

    out = np.where(periodic, wrapped, folded)
    return np.clip(out, lower, upper)


def _de_loop(
    batch_objective: Callable[[Array], Array],
    bounds: Sequence[tuple[float, float]],
    de_config: DEConfig,
    periodic: Array | None = None,
    initial_guesses: Sequence[Sequence[float]] = (),
) -> OptimizationResult:
    lower = np.asarray([b[0] for b in bounds], dtype=float)
    upper = np.asarray([b[1] for b in bounds], dtype=float)
    if lower.size == 0:
        raise ValueError("bounds must be nonempty")
    if not np.all(np.isfinite(lower)) or not np.all(np.isfinite(upper)):
        raise ValueError("bounds must be finite")
    if np.any(upper <= lower):
        raise ValueError("bounds must satisfy lower < upper")
    dim = lower.size
    if periodic is None:
        periodic = np.zeros(dim, dtype=bool)

    pop_size = de_config.resolved_population(dim)
    rng = np.random.default_rng(de_config.seed)

    population = rng.uniform(lower, upper, size=(pop_size, dim))
    for slot, guess in enumerate(initial_guesses[:pop_size]):
        guess = np.asarray(guess, dtype=float)
        if guess.shape != (dim,):
            raise ValueError("initial guess has wrong dimension")
        population[slot] = _fold_into_box(guess, lower, upper, periodic)

    scores = _sanitize(batch_objective(population))

    factor = de_config.mutation_factor
    cross = de_config.crossover_rate
    trace: list[float] = [float(scores.min())]

    generations = 0
    for generations in range(1, de_config.max_generations + 1):
        partners = np.empty((pop_size, 3), dtype=np.int64)
        for i in range(pop_size):
            pool = rng.permutation(pop_size - 1)[:3]
            partners[i] = np.where(pool >= i, pool + 1, pool)
        cross_mask = rng.random((pop_size, dim)) < cross
        forced = rng.integers(0, dim, size=pop_size)
        cross_mask[np.arange(pop_size), forced] = True

        mutants = population[partners[:, 0]] + factor * (
            population[partners[:, 1]] - population[partners[:, 2]]
        )
        mutants = _fold_into_box(mutants, lower, upper, periodic)
        trials = np.where(cross_mask, mutants, population)

        trial_scores = _sanitize(batch_objective(trials))
        better = trial_scores <= scores
        population[better] = trials[better]
        scores[better] = trial_scores[better]

        best = float(scores.min())
        trace.append(best)
        if len(trace) > STAGNATION_WINDOW:
            reference = trace[-1 - STAGNATION_WINDOW]
            scale = max(abs(reference), 1e-300)
            # strict: tolerance = 0 disables the stagnation stop entirely
            if np.isfinite(reference) and (reference - best) < de_config.tolerance * scale:
                break

    best_idx = int(np.argmin(scores))
    return OptimizationResult(
        best_params=tuple(float(v) for v in population[best_idx]),
        best_objective=float(scores[best_idx]),
        generations_run=generations,
        convergence_trace=tuple(trace),
    )


def _sanitize(values: Array) -> Array:
    values = np.asarray(values, dtype=float).copy()
    values[~np.isfinite(values)] = np.inf
    return values


def de_minimize(
    objective: Callable[[Array], float],
    bounds: Sequence[tuple[float, float]],
    de_config: DEConfig,
    *,
    periodic: Sequence[bool] | None = None,
    initial_guesses: Sequence[Sequence[float]] = (),
) -> OptimizationResult:
    """Minimize a scalar objective over a box with DE/rand/1/bin."""

    def batch(vectors: Array) -> Array:
        return np.asarray([objective(v) for v in vectors], dtype=float)

    mask = None if periodic is None else np.asarray(periodic, dtype=bool)
    return _de_loop(batch, bounds, de_config, mask, initial_guesses)


def _batched_total_variance(
    base_config: SensorConfig,
    free: FreeParameterSpec,
    step: float = 1e-5,
) -> Callable[[Array], Array]:
    """Total-CRB objective evaluating a whole candidate matrix per call.

    Every candidate shares the base config's lattice structure, so the
    finite-difference stencils of all candidates stack into one batched
    propagation, chunked to bound covariance memory.
    """
    compiled = _compiled_for(base_config)
    n = base_config.n_phases
    m = len(base_config.pulses)
    rows_per = 1 + 2 * n
    stencil = _stencil_rows(np.asarray(base_config.sensing_phases), step)

    quantum = any(p.r > 0 for p in base_config.pulses)
    state_dim = 2 * compiled.n_cells
    per_row = state_dim * state_dim * 8 if quantum else state_dim * 8
    chunk_rows = max(rows_per, int(_CHUNK_BYTES / max(per_row, 1)))
    chunk_rows -= chunk_rows % rows_per

    def batch(vectors: Array) -> Array:
        count = vectors.shape[0]
        total_rows = count * rows_per
        params = _tiled_params(base_config, total_rows)
        params.sensing[:] = np.tile(stencil, (count, 1))

        w = free._angle_width(base_config)
        pos = 0
        if free.pulse_theta:
            block = vectors[:, pos : pos + w]
            if w != m:
                block = np.broadcast_to(block, (count, m))
            params.theta[:] = np.repeat(block, rows_per, axis=0)
            pos += w
        if free.pulse_chi:
            block = vectors[:, pos : pos + w]
            if w != m:
                block = np.broadcast_to(block, (count, m))
            params.chi[:] = np.repeat(block, rows_per, axis=0)
            pos += w
        if free.reference_phases:
            params.reference[:] = np.repeat(
                vectors[:, pos : pos + n], rows_per, axis=0
            )
            pos += n
        if free.uniform_transmission:
            params.transmissions[:] = np.repeat(
                vectors[:, pos : pos + 1], rows_per, axis=0
            )
            pos += 1

        out = np.empty(count, dtype=float)
        done = 0
        while done < total_rows:
            take = min(chunk_rows, total_rows - done)
            piece = _engine.BatchParams(
                sensing=params.sensing[done : done + take],
                reference=params.reference[done : done + take],
                transmissions=params.transmissions[done : done + take],
                alpha=params.alpha[done : done + take],
                theta=params.theta[done : done + take],
                r=params.r[done : done + take],
                chi=params.chi[done : done + take],
            )
            sim = _engine.simulate(compiled, piece)
            for k in range(take // rows_per):
                cand = done // rows_per + k
                sl = slice(k * rows_per, (k + 1) * rows_per)
                covs = None if sim.covs is None else sim.covs[sl]
                fisher = _fisher_from_block(sim.means[sl], covs, step)
                _vars, total, _cond = _crb_from_matrix(fisher)
                out[cand] = np.inf if total is None else total
            done += take
        return out

    return batch


def optimize_sensor(
    base_config: SensorConfig,
    free: FreeParameterSpec,
    de_config: DEConfig,
    *,
    initial_guesses: Sequence[Sequence[float]] = (),
    full_result: bool = False,
):
    """Optimize the free parameters for minimum total phase variance.

    The base config's own values seed the population alongside any extra
    guesses.  Returns the best configuration found and its Fisher result;
    with full_result the raw optimizer record is appended as a third item.
    """
    if not base_config.pulses:
        raise ValueError("base_config has no pulses")

    guesses = [free.initial_vector(base_config)] + [
        np.asarray(g, dtype=float) for g in initial_guesses
    ]
    result = _de_loop(
        _batched_total_variance(base_config, free),
        free.bounds(base_config),
        de_config,
        free.periodic_mask(base_config),
        guesses,
    )
    if not np.isfinite(result.best_objective):
        raise NoDistinguishableDesignError(
            "every candidate had a singular Fisher matrix; "
            "no distinguishable design in the search box"
        )
    best_config = free.apply(base_config, result.best_params)
    if full_result:
        return best_config, fisher_matrix(best_config), result
    return best_config, fisher_matrix(best_config)
