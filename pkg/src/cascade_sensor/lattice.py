"""Cascaded interferometric phase sensor on a one-dimensional lattice.

The device is a chain of ``n_phases`` sensing segments separated by partially
transmitting reflectors, with a phase-stable reference arm running alongside
and a balanced coupler at each end.  Probe pulses enter at the couplers: the
coherent carrier splits to put a local-oscillator copy in the reference arm,
while the squeezed component is injected into the sensing arm whole, so no
vacuum dilutes the squeezing before it meets a reflector.  Pulses bounce
between the reflectors while picking up the segment phases and leak back out
at both ends where the detector lives.  Time is discretized in units of one segment
transit; a pulse schedule lists when and from which side pulses are launched.

``run_sensor`` propagates the full Gaussian state exactly, keeping every
detector time bin and its correlations.  The simulation is truncated after
each pulse has had ``k_max`` round trips; whatever energy is still bouncing
inside at that point is reported as ``truncation_loss`` so callers can check
the horizon was long enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from cascade_sensor import _engine
from cascade_sensor.gaussian import GaussianState, Side

__all__ = [
    "PulseSpec",
    "SensorConfig",
    "SensorOutput",
    "SidePolicy",
    "config_from_dict",
    "config_to_dict",
    "run_sensor",
    "single_pass_transmission",
    "staggered_schedule",
]


class SidePolicy(Enum):
    """Which end couplers the pulse train uses."""

    LEFT_ONLY = "left_only"
    BIDIRECTIONAL = "bidirectional"


@dataclass(frozen=True)
class PulseSpec:
    """One probe pulse: entry side and time bin, plus its optical parameters.

    ``alpha`` is the coherent amplitude (mean photon number alpha**2) and
    ``theta`` its phase; ``r`` and ``chi`` set the squeezing magnitude and
    axis.  ``r = 0`` is a plain coherent pulse.
    """

    side: Side
    time_bin: int
    alpha: float
    theta: float = 0.0
    r: float = 0.0
    chi: float = 0.0

    def __post_init__(self) -> None:
        if not isinstance(self.side, Side):
            raise TypeError("side must be a Side value")
        if self.time_bin < 0:
            raise ValueError("time_bin must be nonnegative")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.r < 0:
            raise ValueError("r must be nonnegative")

    @property
    def photons(self) -> float:
        return self.alpha**2 + math.sinh(self.r) ** 2


@dataclass(frozen=True)
class SensorConfig:
    """Complete description of one sensor run.

    ``transmissions`` has one entry per interior reflector, ``n_phases - 1``
    of them; the end couplers are fixed at 50:50.  ``sensing_phases`` are the
    unknowns under estimation, ``reference_phases`` the controllable phases
    of the reference arm, one per segment each.  ``k_max`` bounds how many
    round trips are simulated after the last pulse enters.
    """

    n_phases: int
    transmissions: tuple[float, ...]
    sensing_phases: tuple[float, ...]
    reference_phases: tuple[float, ...]
    pulses: tuple[PulseSpec, ...]
    k_max: int = 7

    def __post_init__(self) -> None:
        if self.n_phases < 1:
            raise ValueError("n_phases must be at least 1")
        object.__setattr__(
            self, "transmissions", tuple(float(t) for t in self.transmissions)
        )
        object.__setattr__(
            self, "sensing_phases", tuple(float(p) for p in self.sensing_phases)
        )
        object.__setattr__(
            self, "reference_phases", tuple(float(p) for p in self.reference_phases)
        )
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if len(self.transmissions) != self.n_phases - 1:
            raise ValueError(
                f"expected {self.n_phases - 1} transmissions, got {len(self.transmissions)}"
            )
        for t in self.transmissions:
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"transmission {t} outside [0, 1]")
        if len(self.sensing_phases) != self.n_phases:
            raise ValueError(
                f"expected {self.n_phases} sensing phases, got {len(self.sensing_phases)}"
            )
        if len(self.reference_phases) != self.n_phases:
            raise ValueError(
                f"expected {self.n_phases} reference phases, got {len(self.reference_phases)}"
            )
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")
        seen = set()
        for pulse in self.pulses:
            if not isinstance(pulse, PulseSpec):
                raise TypeError("pulses must contain PulseSpec entries")
            key = (pulse.side, pulse.time_bin)
            if key in seen:
                raise ValueError(
                    f"two pulses share side {pulse.side.value} and bin {pulse.time_bin}"
                )
            seen.add(key)

    @property
    def input_photons(self) -> float:
        return sum(p.photons for p in self.pulses)

    def with_phases(
        self,
        sensing: Sequence[float] | None = None,
        reference: Sequence[float] | None = None,
    ) -> "SensorConfig":
        updates = {}
        if sensing is not None:
            updates["sensing_phases"] = tuple(sensing)
        if reference is not None:
            updates["reference_phases"] = tuple(reference)
        return replace(self, **updates)


@dataclass(frozen=True)
class SensorOutput:
    """Detector-side result of a run.

    ``state`` covers every output port and time bin that received light,
    with cross-bin correlations intact.  ``truncation_loss`` is the fraction
    of input photons still inside the lattice when the simulation stopped.
    """

    state: GaussianState
    truncation_loss: float
    input_photons: float


def staggered_schedule(
    n_phases: int,
    num_pulses: int,
    policy: SidePolicy = SidePolicy.BIDIRECTIONAL,
    *,
    alpha: float = 1.0,
    r: float = 0.0,
    theta: float | Sequence[float] = 0.0,
    chi: float | Sequence[float] = 0.0,
) -> tuple[PulseSpec, ...]:
    """Build the standard pulse train.

    Left-only trains launch one pulse per bin.  Bidirectional trains
    alternate sides and stagger the bins so that counter-propagating pulses
    meet at a reflector rather than passing in open segment: with an even
    segment count the two directions share bins, with an odd count they
    interleave.
    """
    if num_pulses < 1:
        raise ValueError("num_pulses must be at least 1")

    def param(value: float | Sequence[float], idx: int) -> float:
        if isinstance(value, (int, float)):
            return float(value)
        seq = list(value)
        if len(seq) != num_pulses:
            raise ValueError("per-pulse parameter list has wrong length")
        return float(seq[idx])

    pulses = []
    for p in range(num_pulses):
        if policy is SidePolicy.LEFT_ONLY:
            side, time_bin = Side.LEFT, p
        else:
            side = Side.LEFT if p % 2 == 0 else Side.RIGHT
            time_bin = p // 2 if n_phases % 2 == 0 else p
        pulses.append(
            PulseSpec(
                side=side,
                time_bin=time_bin,
                alpha=alpha,
                theta=param(theta, p),
                r=r,
                chi=param(chi, p),
            )
        )
    return tuple(pulses)


def single_pass_transmission(config: SensorConfig) -> float:
    """Probability of crossing the whole chain in one pass: the product of
    the interior reflector transmissions (1 for a single segment)."""
    return float(np.prod(config.transmissions)) if config.transmissions else 1.0


def _compiled_for(config: SensorConfig, reflect_sign: float = 1.0) -> _engine.CompiledSensor:
    return _engine.compile_sensor(
        config.n_phases,
        config.k_max,
        _engine.schedule_key(config.pulses),
        reflect_sign,
    )


def _tiled_params(config: SensorConfig, batch: int) -> _engine.BatchParams:
    """Writable batch arrays, every row a copy of the config's numbers."""

    def tile(values: Iterable[float], width: int) -> np.ndarray:
        row = np.asarray(list(values), dtype=float).reshape(1, width)
        return np.repeat(row, batch, axis=0)

    n = config.n_phases
    m = len(config.pulses)
    return _engine.BatchParams(
        sensing=tile(config.sensing_phases, n),
        reference=tile(config.reference_phases, n),
        transmissions=tile(config.transmissions, n - 1),
        alpha=tile((p.alpha for p in config.pulses), m),
        theta=tile((p.theta for p in config.pulses), m),
        r=tile((p.r for p in config.pulses), m),
        chi=tile((p.chi for p in config.pulses), m),
    )


def run_sensor(config: SensorConfig, *, _reflect_sign: float = 1.0) -> SensorOutput:
    """Propagate the configured pulse train and return the detector state."""
    compiled = _compiled_for(config, _reflect_sign)
    result = _engine.simulate(compiled, _tiled_params(config, 1))

    n_out = len(result.labels)
    mean = result.means[0]
    if result.covs is not None:
        cov = result.covs[0]
    else:
        cov = np.eye(2 * n_out)
    state = GaussianState(mean=mean, cov=cov, labels=result.labels)

    photons_in = float(result.input_photons[0])
    stray = float(result.interior_photons[0])
    loss = stray / photons_in if photons_in > 0 else 0.0
    return SensorOutput(state=state, truncation_loss=loss, input_photons=photons_in)


_SIDE_NAMES = {side.value: side for side in Side}
_POLICY_NAMES = {policy.value: policy for policy in SidePolicy}


def config_to_dict(config: SensorConfig) -> dict:
    """JSON-ready form of a config; inverse of config_from_dict."""
    return {
        "n_phases": config.n_phases,
        "transmissions": list(config.transmissions),
        "sensing_phases": list(config.sensing_phases),
        "reference_phases": list(config.reference_phases),
        "k_max": config.k_max,
        "pulses": [
            {
                "side": p.side.value,
                "time_bin": p.time_bin,
                "alpha": p.alpha,
                "theta": p.theta,
                "r": p.r,
                "chi": p.chi,
            }
            for p in config.pulses
        ],
    }


def config_from_dict(data: dict) -> SensorConfig:
    """Parse and validate a config mapping, with field-level error messages."""
    if not isinstance(data, dict):
        raise ValueError("config must be a mapping")
    required = {"n_phases", "transmissions", "sensing_phases", "reference_phases", "pulses"}
    missing = required - data.keys()
    if missing:
        raise ValueError(f"config missing fields: {', '.join(sorted(missing))}")
    known = required | {"k_max"}
    unknown = data.keys() - known
    if unknown:
        raise ValueError(f"config has unknown fields: {', '.join(sorted(unknown))}")

    pulses = []
    raw_pulses = data["pulses"]
    if not isinstance(raw_pulses, list):
        raise ValueError("pulses must be a list")
    for i, entry in enumerate(raw_pulses):
        if not isinstance(entry, dict):
            raise ValueError(f"pulses[{i}] must be a mapping")
        side_name = entry.get("side")
        if side_name not in _SIDE_NAMES:
            raise ValueError(f"pulses[{i}].side must be 'left' or 'right'")
        try:
            pulses.append(
                PulseSpec(
                    side=_SIDE_NAMES[side_name],
                    time_bin=int(entry.get("time_bin", 0)),
                    alpha=float(entry.get("alpha", 0.0)),
                    theta=float(entry.get("theta", 0.0)),
                    r=float(entry.get("r", 0.0)),
                    chi=float(entry.get("chi", 0.0)),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ValueError(f"pulses[{i}]: {exc}") from exc

    try:
        return SensorConfig(
            n_phases=int(data["n_phases"]),
            transmissions=tuple(float(t) for t in data["transmissions"]),
            sensing_phases=tuple(float(p) for p in data["sensing_phases"]),
            reference_phases=tuple(float(p) for p in data["reference_phases"]),
            pulses=tuple(pulses),
            k_max=int(data.get("k_max", 7)),
        )
    except (TypeError, ValueError) as exc:
        raise ValueError(str(exc)) from exc
