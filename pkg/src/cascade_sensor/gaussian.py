"""Multimode Gaussian states: construction, symplectic transforms, loss, diagnostics.

Conventions used throughout the package:

* quadratures are ordered ``(x1, y1, x2, y2, ..., xM, yM)``;
* the vacuum covariance is the identity matrix, so a squeezed quadrature
  variance runs between ``exp(-2r)`` and ``exp(2r)``;
* a coherent state of amplitude ``alpha`` has mean ``sqrt(2)*alpha*(cos t, sin t)``
  and carries ``alpha**2`` photons;
* the symplectic form is the block-diagonal direct sum of ``[[0, 1], [-1, 0]]``.

States are immutable values; every operation returns a new state and never
mutates its inputs, so states can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

Array = NDArray[np.float64]

# A symplectic matrix is represented as a plain 2Mx2M float array satisfying
# S @ Omega @ S.T = Omega; see is_symplectic for the check.
SymplecticMatrix = Array

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9


class SiteKind(Enum):
    """Where in the sensor a mode lives."""

    SENSING_SEGMENT = "sensing_segment"
    REFLECTOR_SLOT = "reflector_slot"
    REFERENCE_SEGMENT = "reference_segment"
    INPUT_PORT = "input_port"
    OUTPUT_PORT = "output_port"
    DISCARD = "discard"


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


class Direction(Enum):
    RIGHT_MOVING = "right_moving"
    LEFT_MOVING = "left_moving"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class ModeLabel:
    """Identity of one bosonic mode.

    ``index`` is the segment number (1-based) for interior sites and the
    detector port number (0 = circulator port, 1 = open port) for output
    ports.  ``time_bin`` is mandatory for input and output ports and
    meaningless for interior sites.
    """

    kind: SiteKind
    index: int = 0
    side: Side | None = None
    direction: Direction = Direction.NOT_APPLICABLE
    time_bin: int | None = None

    def __post_init__(self) -> None:
        if self.kind in (SiteKind.INPUT_PORT, SiteKind.OUTPUT_PORT):
            if self.time_bin is None or self.time_bin < 0:
                raise ValueError(f"{self.kind.value} labels need a time_bin >= 0")
            if self.side is None:
                raise ValueError(f"{self.kind.value} labels need a side")


def _free_label(n: int = 0) -> ModeLabel:
    """Default label for standalone states built outside any sensor."""
    return ModeLabel(SiteKind.INPUT_PORT, index=n, side=Side.LEFT, time_bin=0)


@dataclass(frozen=True)
class GaussianState:
    """Mean vector, covariance matrix and mode labels of a Gaussian state.

    ``mean`` has length 2M, ``cov`` is 2Mx2M, ``labels`` has length M and its
    entries are unique.  Zero-mode states (empty arrays) are legal; they fall
    out of tracing out every mode.
    """

    mean: Array
    cov: Array
    labels: tuple[ModeLabel, ...]

    def __post_init__(self) -> None:
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.asarray(self.cov, dtype=float)
        if mean.size == 0:
            mean = mean.reshape(0)
            cov = cov.reshape(0, 0)
        labels = tuple(self.labels)
        if mean.shape != (2 * len(labels),):
            raise ValueError(
                f"mean has length {mean.shape}, expected {2 * len(labels)} for {len(labels)} modes"
            )
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov has shape {cov.shape}, expected square of side {mean.size}")
        if len(set(labels)) != len(labels):
            raise ValueError("mode labels within one state must be unique")
        mean = mean.copy()
        cov = cov.copy()
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "labels", labels)

    @property
    def num_modes(self) -> int:
        return len(self.labels)

    def mode_index(self, label: ModeLabel) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"mode {label} not present in state") from None


def symplectic_form(num_modes: int) -> Array:
    """Block-diagonal direct sum of [[0, 1], [-1, 0]], one block per mode."""
    omega = np.zeros((2 * num_modes, 2 * num_modes))
    for k in range(num_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def is_symplectic(matrix: Array, tol: float = 1e-10) -> bool:
    """True when S @ Omega @ S.T = Omega within Frobenius tolerance."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        return False
    omega = symplectic_form(matrix.shape[0] // 2)
    return bool(np.linalg.norm(matrix @ omega @ matrix.T - omega) <= tol)


def vacuum_state(labels: Iterable[ModeLabel]) -> GaussianState:
    """Vacuum on the given modes: zero mean, identity covariance."""
    labels = tuple(labels)
    n = 2 * len(labels)
    return GaussianState(np.zeros(n), np.eye(n), labels)


def coherent_state(alpha: float, theta: float = 0.0, label: ModeLabel | None = None) -> GaussianState:
    """Single-mode coherent state of amplitude ``alpha`` and phase ``theta``.

    Parameters
    ----------
    alpha:
        Nonnegative field amplitude; the state carries ``alpha**2`` photons.
    theta:
        Phase of the mean field in radians.
    label:
        Mode label; a generic input-port label is used when omitted.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    mean = np.sqrt(2.0) * alpha * np.array([np.cos(theta), np.sin(theta)])
    return GaussianState(mean, np.eye(2), (label or _free_label(),))


def squeeze_matrix(r: float, chi: float = 0.0) -> SymplecticMatrix:
    """Single-mode squeezing as a symmetric 2x2 symplectic matrix.

    ``r`` is the squeezing strength, ``chi`` the angle of the squeezed
    quadrature ellipse.  The covariance of squeezed vacuum is ``S @ S.T``,
    with quadrature variances ``exp(2r)`` and ``exp(-2r)`` at ``chi = 0``.
    """
    if r < 0:
        raise ValueError(f"squeezing strength must be nonnegative, got {r}")
    ch, sh = np.cosh(r), np.sinh(r)
    return np.array(
        [
            [ch + np.cos(chi) * sh, np.sin(chi) * sh],
            [np.sin(chi) * sh, ch - np.cos(chi) * sh],
        ]
    )


def phase_shift_matrix(phi: float) -> SymplecticMatrix:
    """Counterclockwise quadrature rotation; phases compose additively."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def beamsplitter_matrix(transmission: float) -> SymplecticMatrix:
    """Two-mode beamsplitter of power transmission T as a 4x4 orthogonal symplectic.

    Convention: the transmitted block carries ``sqrt(T)``, the lower-left
    reflected block carries ``-sqrt(1-T)``.
    """
    if not 0.0 <= transmission <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {transmission}")
    a = np.sqrt(transmission)
    b = np.sqrt(1.0 - transmission)
    eye = np.eye(2)
    return np.block([[a * eye, b * eye], [-b * eye, a * eye]])


def _mode_slice(indices: Sequence[int]) -> np.ndarray:
    """Quadrature row indices for the given mode positions."""
    idx = np.asarray(indices, dtype=int)
    return np.stack([2 * idx, 2 * idx + 1], axis=1).reshape(-1)


def apply_transform(
    state: GaussianState, matrix: SymplecticMatrix, target_modes: Sequence[ModeLabel] | None = None
) -> GaussianState:
    """Apply a symplectic matrix to an ordered subset of modes.

    The matrix acts on the listed modes in the given order and as the
    identity elsewhere: mean -> S mean, cov -> S cov S.T on the embedded
    block.  Labels are unchanged.
    """
    matrix = np.asarray(matrix, dtype=float)
    if target_modes is None:
        target_modes = state.labels
    positions = [state.mode_index(m) for m in target_modes]
    if matrix.shape != (2 * len(positions), 2 * len(positions)):
        raise ValueError(
            f"matrix of shape {matrix.shape} cannot act on {len(positions)} modes"
        )
    idx = _mode_slice(positions)
    mean = state.mean.copy()
    cov = state.cov.copy()
    mean[idx] = matrix @ mean[idx]
    cov[idx, :] = matrix @ cov[idx, :]
    cov[:, idx] = cov[:, idx] @ matrix.T
    return GaussianState(mean, cov, state.labels)


def displace(state: GaussianState, d: Array) -> GaussianState:
    """Add a displacement vector to the mean; covariance is unchanged."""
    d = np.asarray(d, dtype=float)
    if d.shape != state.mean.shape:
        raise ValueError(f"displacement of shape {d.shape} does not match mean {state.mean.shape}")
    return GaussianState(state.mean + d, state.cov, state.labels)


def tensor(state_a: GaussianState, state_b: GaussianState) -> GaussianState:
    """Product state on the disjoint union of the two label sets."""
    overlap = set(state_a.labels) & set(state_b.labels)
    if overlap:
        raise ValueError(f"label sets overlap: {sorted(overlap, key=repr)!r}")
    na, nb = state_a.mean.size, state_b.mean.size
    mean = np.concatenate([state_a.mean, state_b.mean])
    cov = np.zeros((na + nb, na + nb))
    cov[:na, :na] = state_a.cov
    cov[na:, na:] = state_b.cov
    return GaussianState(mean, cov, state_a.labels + state_b.labels)


def trace_out(state: GaussianState, modes: Sequence[ModeLabel]) -> GaussianState:
    """Discard the given modes, keeping the reduced state of the rest."""
    drop = {state.mode_index(m) for m in modes}
    keep = [k for k in range(state.num_modes) if k not in drop]
    idx = _mode_slice(keep) if keep else np.array([], dtype=int)
    labels = tuple(state.labels[k] for k in keep)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)], labels)


def loss_channel(state: GaussianState, mode: ModeLabel, eta: float) -> GaussianState:
    """Pure loss of transmissivity ``eta`` on one mode.

    Mean scales by sqrt(eta) on the mode, the diagonal covariance block
    becomes ``eta*block + (1-eta)*I``, and cross covariances with every other
    mode scale by sqrt(eta).  Identical to mixing the mode with vacuum on a
    beamsplitter of transmission eta and tracing the vacuum port out.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    k = state.mode_index(mode)
    idx = _mode_slice([k])
    root = np.sqrt(eta)
    mean = state.mean.copy()
    cov = state.cov.copy()
    mean[idx] *= root
    cov[idx, :] *= root
    cov[:, idx] *= root
    cov[np.ix_(idx, idx)] += (1.0 - eta) * np.eye(2)
    return GaussianState(mean, cov, state.labels)


def photon_number(state: GaussianState) -> float:
    """Total mean photon number: |mean|^2 / 2 + Tr(cov - I) / 4."""
    if state.num_modes == 0:
        return 0.0
    return float(state.mean @ state.mean / 2.0 + (np.trace(state.cov) - state.mean.size) / 4.0)


def symplectic_eigenvalues(state: GaussianState) -> Array:
    """Symplectic spectrum of the covariance, ascending, one value per mode.

    Computed as the moduli of the eigenvalues of i Omega cov, which come in
    equal pairs; every value is >= 1 for a physical state and all values
    equal 1 exactly when the state is pure.
    """
    m = state.num_modes
    if m == 0:
        return np.array([])
    cov = 0.5 * (state.cov + state.cov.T)
    eigs = np.linalg.eigvals(symplectic_form(m) @ cov)
    return np.sort(np.abs(eigs))[::2]


def assert_physical(state: GaussianState, context: str = "") -> None:
    """Raise if the covariance is asymmetric, non PD, or below the vacuum floor.

    Debug-mode validation routine: symmetry within 1e-12 relative, positive
    definiteness, and symplectic eigenvalues >= 1 - 1e-9.
    """
    if state.num_modes == 0:
        return
    tag = f" ({context})" if context else ""
    cov = state.cov
    scale = max(float(np.abs(cov).max()), 1.0)
    asym = float(np.abs(cov - cov.T).max())
    if asym > SYMMETRY_TOL * scale:
        raise AssertionError(f"covariance asymmetric by {asym:.3e}{tag}")
    eigs = np.linalg.eigvalsh(0.5 * (cov + cov.T))
    if eigs.min() <= 0:
        raise AssertionError(f"covariance not positive definite, min eig {eigs.min():.3e}{tag}")
    nu_min = float(symplectic_eigenvalues(state).min())
    if nu_min < 1.0 - PHYSICALITY_TOL:
        raise AssertionError(f"symplectic eigenvalue {nu_min} below vacuum floor{tag}")
