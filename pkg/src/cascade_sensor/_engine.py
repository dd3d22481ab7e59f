"""Time-stepped lattice engine behind run_sensor.

The sensor geometry (segment count, pulse schedule, truncation horizon) fixes
a sequence of local operations whose *structure* does not depend on any phase,
angle, or transmission value.  The compiler below walks the lattice once and
records, per time step, which storage cells rotate by which phase, which cell
pairs meet on a beamsplitter, and where pulses enter.  The runtime then
propagates a whole batch of parameter sets through the compiled program with
vectorized numpy updates; a batch row costs a few index gathers per step
instead of a fresh graph walk.

Cells are storage slots for one mode each.  Interior cells are relabeled as
light moves between segments (a compile-time bookkeeping step that moves no
data); cells that exit through an end coupler are frozen as detector modes
and never touched again, which keeps their correlations with the still-active
interior intact.  All-coherent batches skip covariance propagation entirely:
rotations and beamsplitters are orthogonal, so an identity covariance stays
the identity exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from cascade_sensor.gaussian import ModeLabel, Side, SiteKind

Array = NDArray[np.float64]

_SENSE = 0
_REF = 1
_RIGHT = 0
_LEFT = 1


@dataclass(frozen=True)
class _Step:
    rot_cells: NDArray[np.int64]
    rot_angle_idx: NDArray[np.int64]
    bs_a: NDArray[np.int64]
    bs_b: NDArray[np.int64]
    bs_t_idx: NDArray[np.int64]
    injections: tuple[tuple[int, int, int], ...]  # (sense cell, reference cell, pulse index)


@dataclass(frozen=True)
class CompiledSensor:
    n_phases: int
    k_max: int
    t_max: int
    n_cells: int
    n_pulses: int
    reflect_sign: float
    steps: tuple[_Step, ...]
    out_cells: NDArray[np.int64]
    out_labels: tuple[ModeLabel, ...]
    interior_cells: NDArray[np.int64]


@dataclass
class BatchParams:
    """Per-row numeric inputs of a batched run; all arrays share axis 0."""

    sensing: Array  # (B, N)
    reference: Array  # (B, N)
    transmissions: Array  # (B, N-1)
    alpha: Array  # (B, m)
    theta: Array  # (B, m)
    r: Array  # (B, m)
    chi: Array  # (B, m)

    @property
    def batch_size(self) -> int:
        return self.sensing.shape[0]

    @property
    def any_squeezing(self) -> bool:
        return bool(self.r.size and np.any(self.r > 0.0))


@dataclass
class SimResult:
    means: Array  # (B, 2 * n_out)
    covs: Array | None  # (B, 2 * n_out, 2 * n_out); None for coherent-only batches
    labels: tuple[ModeLabel, ...]
    interior_photons: Array  # (B,)
    input_photons: Array  # (B,)


def schedule_key(pulses) -> tuple[tuple[str, int], ...]:
    """Structural identity of a pulse schedule: sides and time bins only."""
    return tuple((p.side.value, p.time_bin) for p in pulses)


@lru_cache(maxsize=128)
def compile_sensor(
    n_phases: int,
    k_max: int,
    schedule: tuple[tuple[str, int], ...],
    reflect_sign: float = 1.0,
) -> CompiledSensor:
    """Walk the lattice once and emit per-step index programs.

    ``reflect_sign`` flips the sign convention of the reflected beamsplitter
    amplitude; physical predictions must not depend on it.
    """
    n = n_phases
    max_bin = max((b for _, b in schedule), default=0)
    t_max = (k_max + 2) * n + max_bin

    touched: list[bool] = []

    def new_cell() -> int:
        touched.append(False)
        return len(touched) - 1

    # cell_of[(arm, segment, direction)] -> storage cell currently holding it
    cell_of: dict[tuple[int, int, int], int] = {}
    for arm in (_SENSE, _REF):
        for seg in range(1, n + 1):
            for direction in (_RIGHT, _LEFT):
                cell_of[arm, seg, direction] = new_cell()

    def angle_index(arm: int, seg: int) -> int:
        return (seg - 1) if arm == _SENSE else n + (seg - 1)

    pulses_by_bin: dict[int, list[tuple[int, str]]] = {}
    for idx, (side, time_bin) in enumerate(schedule):
        pulses_by_bin.setdefault(time_bin, []).append((idx, side))

    steps: list[_Step] = []
    outputs: list[tuple[int, ModeLabel]] = []

    for t in range(t_max):
        rot_cells: list[int] = []
        rot_angles: list[int] = []
        for (arm, seg, _direction), cell in cell_of.items():
            if touched[cell]:
                rot_cells.append(cell)
                rot_angles.append(angle_index(arm, seg))

        bs_a: list[int] = []
        bs_b: list[int] = []
        bs_t: list[int] = []
        for j in range(1, n):  # interior reflector j sits between segments j and j+1
            a = cell_of[_SENSE, j, _RIGHT]
            b = cell_of[_SENSE, j + 1, _LEFT]
            if touched[a] or touched[b]:
                bs_a.append(a)
                bs_b.append(b)
                bs_t.append(j - 1)
                touched[a] = touched[b] = True

        coupler_events = (
            (Side.LEFT, cell_of[_SENSE, 1, _LEFT], cell_of[_REF, 1, _LEFT]),
            (Side.RIGHT, cell_of[_SENSE, n, _RIGHT], cell_of[_REF, n, _RIGHT]),
        )
        emitted: dict[Side, bool] = {}
        for side, a, b in coupler_events:
            live = touched[a] or touched[b]
            emitted[side] = live
            if live:
                bs_a.append(a)
                bs_b.append(b)
                bs_t.append(n - 1)  # the 50:50 slot of the transmission table
                touched[a] = touched[b] = True

        # Relabel: contents move one segment without copying any data.
        nxt: dict[tuple[int, int, int], int] = {}
        for j in range(1, n):
            nxt[_SENSE, j + 1, _RIGHT] = cell_of[_SENSE, j, _RIGHT]
            nxt[_SENSE, j, _LEFT] = cell_of[_SENSE, j + 1, _LEFT]
            nxt[_REF, j + 1, _RIGHT] = cell_of[_REF, j, _RIGHT]
            nxt[_REF, j, _LEFT] = cell_of[_REF, j + 1, _LEFT]
        for side, a, b in coupler_events:
            if emitted[side]:
                port_bin = t
                outputs.append(
                    (a, ModeLabel(SiteKind.OUTPUT_PORT, index=0, side=side, time_bin=port_bin))
                )
                outputs.append(
                    (b, ModeLabel(SiteKind.OUTPUT_PORT, index=1, side=side, time_bin=port_bin))
                )
                fresh_a, fresh_b = new_cell(), new_cell()
            else:
                fresh_a, fresh_b = a, b  # still vacuum; reuse the cells
            if side is Side.LEFT:
                nxt[_SENSE, 1, _RIGHT] = fresh_a
                nxt[_REF, 1, _RIGHT] = fresh_b
            else:
                nxt[_SENSE, n, _LEFT] = fresh_a
                nxt[_REF, n, _LEFT] = fresh_b
        cell_of = nxt

        injections: list[tuple[int, int, int]] = []
        for pulse_idx, side in pulses_by_bin.get(t, ()):
            if side == Side.LEFT.value:
                sc, rc = cell_of[_SENSE, 1, _RIGHT], cell_of[_REF, 1, _RIGHT]
            else:
                sc, rc = cell_of[_SENSE, n, _LEFT], cell_of[_REF, n, _LEFT]
            touched[sc] = touched[rc] = True
            injections.append((sc, rc, pulse_idx))

        steps.append(
            _Step(
                np.asarray(rot_cells, dtype=np.int64),
                np.asarray(rot_angles, dtype=np.int64),
                np.asarray(bs_a, dtype=np.int64),
                np.asarray(bs_b, dtype=np.int64),
                np.asarray(bs_t, dtype=np.int64),
                tuple(injections),
            )
        )

    outputs.sort(key=lambda item: (item[1].time_bin, item[1].side.value, item[1].index))
    out_cells = np.asarray([cell for cell, _ in outputs], dtype=np.int64)
    out_labels = tuple(label for _, label in outputs)
    interior = np.asarray(sorted(cell_of.values()), dtype=np.int64)

    return CompiledSensor(
        n_phases=n,
        k_max=k_max,
        t_max=t_max,
        n_cells=len(touched),
        n_pulses=len(schedule),
        reflect_sign=float(reflect_sign),
        steps=tuple(steps),
        out_cells=out_cells,
        out_labels=out_labels,
        interior_cells=interior,
    )


def _quad_indices(cells: NDArray[np.int64]) -> NDArray[np.int64]:
    """Interleaved (x, y) row indices for the given cells."""
    return np.stack([2 * cells, 2 * cells + 1], axis=1).reshape(-1)


def simulate(compiled: CompiledSensor, params: BatchParams) -> SimResult:
    """Propagate a batch of parameter rows through the compiled lattice."""
    batch = params.batch_size
    n = compiled.n_phases
    dim = 2 * compiled.n_cells
    with_cov = params.any_squeezing
    sign = compiled.reflect_sign

    angle_table = np.concatenate([params.sensing, params.reference], axis=1)
    t_table = np.concatenate(
        [params.transmissions, np.full((batch, 1), 0.5)], axis=1
    )

    mean = np.zeros((batch, dim))
    cov = None
    if with_cov:
        cov = np.zeros((batch, dim, dim))
        cov[:, np.arange(dim), np.arange(dim)] = 1.0

    sqrt2 = np.sqrt(2.0)

    for step in compiled.steps:
        if step.rot_cells.size:
            ang = angle_table[:, step.rot_angle_idx]
            c, s = np.cos(ang), np.sin(ang)
            rx = 2 * step.rot_cells
            ry = rx + 1
            mx, my = mean[:, rx], mean[:, ry]
            mean[:, rx] = c * mx - s * my
            mean[:, ry] = s * mx + c * my
            if cov is not None:
                x, y = cov[:, rx, :], cov[:, ry, :]
                cov[:, rx, :] = c[:, :, None] * x - s[:, :, None] * y
                cov[:, ry, :] = s[:, :, None] * x + c[:, :, None] * y
                x, y = cov[:, :, rx], cov[:, :, ry]
                cov[:, :, rx] = c[:, None, :] * x - s[:, None, :] * y
                cov[:, :, ry] = s[:, None, :] * x + c[:, None, :] * y

        if step.bs_a.size:
            tvals = t_table[:, step.bs_t_idx]
            a = np.sqrt(tvals)
            # the sign convention belongs to the interior reflectors; end
            # couplers (t slot n-1) keep a fixed orientation
            ev_sign = np.where(step.bs_t_idx < n - 1, sign, 1.0)
            b = ev_sign * np.sqrt(1.0 - tvals)
            for rows_a, rows_b in (
                (2 * step.bs_a, 2 * step.bs_b),
                (2 * step.bs_a + 1, 2 * step.bs_b + 1),
            ):
                xa, xb = mean[:, rows_a], mean[:, rows_b]
                mean[:, rows_a] = a * xa + b * xb
                mean[:, rows_b] = -b * xa + a * xb
                if cov is not None:
                    ra, rb = cov[:, rows_a, :], cov[:, rows_b, :]
                    cov[:, rows_a, :] = a[:, :, None] * ra + b[:, :, None] * rb
                    cov[:, rows_b, :] = -b[:, :, None] * ra + a[:, :, None] * rb
                    ca, cb = cov[:, :, rows_a], cov[:, :, rows_b]
                    cov[:, :, rows_a] = a[:, None, :] * ca + b[:, None, :] * cb
                    cov[:, :, rows_b] = -b[:, None, :] * ca + a[:, None, :] * cb

        for sense_cell, ref_cell, p in step.injections:
            alpha = params.alpha[:, p]
            theta = params.theta[:, p]
            vx = sqrt2 * alpha * np.cos(theta)
            vy = sqrt2 * alpha * np.sin(theta)
            sx, sy = 2 * sense_cell, 2 * sense_cell + 1
            fx, fy = 2 * ref_cell, 2 * ref_cell + 1
            half = 1.0 / sqrt2
            mean[:, sx] = half * vx
            mean[:, sy] = half * vy
            mean[:, fx] = -half * vx
            mean[:, fy] = -half * vy
            if cov is not None:
                # The squeezed component rides the sensing arm whole; only the
                # carrier splits.  The reference cell keeps vacuum noise (it
                # holds the coherent local-oscillator half), so just the
                # sensing block needs writing.
                r_, chi = params.r[:, p], params.chi[:, p]
                ch, sh = np.cosh(r_), np.sinh(r_)
                s11 = ch + np.cos(chi) * sh
                s12 = np.sin(chi) * sh
                s22 = ch - np.cos(chi) * sh
                c11 = s11 * s11 + s12 * s12
                c12 = s12 * (s11 + s22)
                c22 = s12 * s12 + s22 * s22
                for i, j, val in (
                    (sx, sx, c11), (sx, sy, c12), (sy, sx, c12), (sy, sy, c22),
                ):
                    cov[:, i, j] = val

    out_q = _quad_indices(compiled.out_cells)
    means_out = mean[:, out_q].copy()
    covs_out = None
    if cov is not None:
        covs_out = cov[:, out_q[:, None], out_q[None, :]].copy()

    int_q = _quad_indices(compiled.interior_cells)
    interior_photons = (mean[:, int_q] ** 2).sum(axis=1) / 2.0
    if cov is not None:
        interior_photons = interior_photons + (
            cov[:, int_q, int_q].sum(axis=1) - int_q.size
        ) / 4.0

    input_photons = (params.alpha**2 + np.sinh(params.r) ** 2).sum(axis=1)

    return SimResult(
        means=means_out,
        covs=covs_out,
        labels=compiled.out_labels,
        interior_photons=interior_photons,
        input_photons=input_photons,
    )
