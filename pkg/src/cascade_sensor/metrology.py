"""Fisher information, Cramér-Rao bounds, and homodyne sampling.

The sensitivity of a sensor configuration is summarized by the Fisher
information matrix of its Gaussian detector state,

    F_ij = 2 (dR/dphi_i)^T sigma^{-1} (dR/dphi_j)
         + (1/4) Tr[sigma^{-1} dsigma/dphi_i sigma^{-1} dsigma/dphi_j],

with derivatives taken against the sensing phases.  Its inverse bounds the
covariance of any unbiased estimate; the diagonal of the inverse is the
per-phase variance floor and their sum is the figure of merit the optimizer
minimizes.  Derivatives come from central finite differences on run_sensor;
all perturbed configurations share one lattice structure, so a single batched
propagation serves the whole stencil.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import cho_factor, cho_solve

from cascade_sensor import _engine
from cascade_sensor.gaussian import GaussianState
from cascade_sensor.lattice import SensorConfig, _compiled_for, _tiled_params

__all__ = [
    "FisherResult",
    "FisherStepError",
    "IndistinguishableParametersError",
    "crb",
    "fisher_matrix",
    "quantum_advantage",
    "sample_homodyne",
]

Array = NDArray[np.float64]

CONDITION_LIMIT = 1e12
STEP_CHECK_TOL = 1e-3


class IndistinguishableParametersError(ValueError):
    """The Fisher matrix is too ill-conditioned to bound every phase.

    Physically: the detector state responds to some combination of phases
    only, so no unbiased estimator can resolve them individually.
    """

    def __init__(self, condition_number: float):
        self.condition_number = float(condition_number)
        super().__init__(
            "parameters indistinguishable: Fisher matrix condition number "
            f"{self.condition_number:.3e} exceeds {CONDITION_LIMIT:.0e}"
        )


class FisherStepError(RuntimeError):
    """Finite-difference derivatives did not converge under step halving."""

    def __init__(self, max_relative_change: float, step: float):
        self.max_relative_change = float(max_relative_change)
        self.step = float(step)
        super().__init__(
            f"Fisher entries changed by {self.max_relative_change:.3e} "
            f"(> {STEP_CHECK_TOL}) when halving step {self.step:g}; "
            "derivative estimate unreliable"
        )


@dataclass(frozen=True)
class FisherResult:
    """Fisher matrix plus the bounds derived from it.

    ``crb_variances`` and ``total_variance`` are None when the matrix is too
    ill-conditioned to invert (condition number beyond 1e12); the matrix and
    condition number are still reported so callers can diagnose.
    """

    matrix: Array
    crb_variances: tuple[float, ...] | None
    total_variance: float | None
    condition_number: float

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=float)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def to_dict(self) -> dict:
        return {
            "matrix": self.matrix.tolist(),
            "crb_variances": None
            if self.crb_variances is None
            else list(self.crb_variances),
            "total_variance": self.total_variance,
            "condition_number": self.condition_number,
        }


def _stencil_rows(base: Array, step: float) -> Array:
    """Phase rows [base, p0+, p0-, p1+, p1-, ...] for central differences."""
    n = base.size
    rows = np.repeat(base.reshape(1, n), 1 + 2 * n, axis=0)
    for i in range(n):
        rows[1 + 2 * i, i] += step
        rows[2 + 2 * i, i] -= step
    return rows


def _fisher_from_block(means: Array, covs: Array | None, step: float) -> Array:
    """Assemble the Fisher matrix from one stencil block of moments.

    ``means`` holds 1 + 2N rows in _stencil_rows order; ``covs`` likewise or
    None for coherent-only batches (covariance exactly identity, second term
    exactly zero).
    """
    n = (means.shape[0] - 1) // 2
    inv_2h = 1.0 / (2.0 * step)
    d_means = (means[1::2] - means[2::2]) * inv_2h  # (N, D)

    if covs is None:
        return 2.0 * (d_means @ d_means.T)

    sigma = covs[0]
    cf = cho_factor(sigma, lower=True)
    solved_means = cho_solve(cf, d_means.T)  # (D, N)
    fisher = 2.0 * (d_means @ solved_means)

    d_covs = (covs[1::2] - covs[2::2]) * inv_2h  # (N, D, D)
    dim = sigma.shape[0]
    flat = d_covs.transpose(1, 0, 2).reshape(dim, -1)
    solved = cho_solve(cf, flat).reshape(dim, n, dim).transpose(1, 0, 2)
    for i in range(n):
        for j in range(i, n):
            term = 0.25 * np.tensordot(solved[i], solved[j].T, axes=2)
            fisher[i, j] += term
            if j > i:
                fisher[j, i] += term
    return 0.5 * (fisher + fisher.T)


def _crb_from_matrix(fisher: Array) -> tuple[tuple[float, ...] | None, float | None, float]:
    condition = float(np.linalg.cond(fisher))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        return None, None, condition
    try:
        cf = cho_factor(fisher, lower=True)
    except np.linalg.LinAlgError:
        return None, None, condition
    except ValueError:
        return None, None, condition
    inverse = cho_solve(cf, np.eye(fisher.shape[0]))
    variances = tuple(float(v) for v in np.diag(inverse))
    return variances, float(sum(variances)), condition


def fisher_matrix(
    config: SensorConfig, step: float = 1e-5, *, check_step: bool = False
) -> FisherResult:
    """Fisher information of the detector state w.r.t. the sensing phases.

    One batched propagation evaluates the whole central-difference stencil.
    With ``check_step`` the stencil is doubled at half the step and the two
    estimates must agree to 1e-3 relative, else FisherStepError.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if not config.pulses:
        raise ValueError("config has no pulses; detector state is empty")

    base = np.asarray(config.sensing_phases, dtype=float)
    rows = _stencil_rows(base, step)
    if check_step:
        rows = np.vstack([rows, _stencil_rows(base, step / 2.0)[1:]])

    compiled = _compiled_for(config)
    params = _tiled_params(config, rows.shape[0])
    params.sensing[:] = rows
    result = _engine.simulate(compiled, params)
    if not result.labels:
        raise ValueError("config produces no detector modes")

    n = base.size
    block = slice(0, 1 + 2 * n)
    covs = result.covs
    fisher = _fisher_from_block(
        result.means[block], None if covs is None else covs[block], step
    )

    if check_step:
        half_means = np.vstack([result.means[:1], result.means[1 + 2 * n :]])
        half_covs = None
        if covs is not None:
            half_covs = np.concatenate([covs[:1], covs[1 + 2 * n :]], axis=0)
        fisher_half = _fisher_from_block(half_means, half_covs, step / 2.0)
        scale = np.abs(fisher_half) + 1e-12 * max(np.abs(fisher_half).max(), 1.0)
        change = float(np.max(np.abs(fisher - fisher_half) / scale))
        if change > STEP_CHECK_TOL:
            raise FisherStepError(change, step)
        fisher = fisher_half

    variances, total, condition = _crb_from_matrix(fisher)
    return FisherResult(
        matrix=fisher,
        crb_variances=variances,
        total_variance=total,
        condition_number=condition,
    )


def crb(fisher: Array) -> tuple[float, ...]:
    """Per-phase variance bounds: the diagonal of the Fisher inverse.

    Raises IndistinguishableParametersError when the matrix cannot be
    reliably inverted (condition number above 1e12, or not PD).
    """
    fisher = np.asarray(fisher, dtype=float)
    if fisher.ndim != 2 or fisher.shape[0] != fisher.shape[1]:
        raise ValueError("fisher must be a square matrix")
    scale = np.abs(fisher).max()
    if scale > 0 and np.abs(fisher - fisher.T).max() > 1e-8 * scale:
        raise ValueError("fisher must be symmetric")
    variances, _total, condition = _crb_from_matrix(fisher)
    if variances is None:
        raise IndistinguishableParametersError(condition)
    return variances


def quantum_advantage(
    classical_total_variance: float, quantum_total_variance: float
) -> float:
    """Variance ratio Q; meaningful when both sides used equal photons."""
    if classical_total_variance <= 0 or quantum_total_variance <= 0:
        raise ValueError("total variances must be positive")
    return classical_total_variance / quantum_total_variance


def sample_homodyne(
    state: GaussianState,
    quadrature_angles,
    n_samples: int,
    seed: int,
) -> Array:
    """Draw homodyne outcomes, one chosen quadrature per mode.

    Sampling convention: measuring angle lambda on a mode yields a normal
    variable with mean cos(lambda) x + sin(lambda) y of the state mean and
    variance (projected covariance)/2, so vacuum gives variance 1/2.  Joint
    correlations between modes are kept.
    """
    angles = np.atleast_1d(np.asarray(quadrature_angles, dtype=float))
    if angles.size != state.num_modes:
        raise ValueError(
            f"expected {state.num_modes} quadrature angles, got {angles.size}"
        )
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")

    m = state.num_modes
    projector = np.zeros((m, 2 * m))
    idx = np.arange(m)
    projector[idx, 2 * idx] = np.cos(angles)
    projector[idx, 2 * idx + 1] = np.sin(angles)

    mean = projector @ state.mean
    cov = (projector @ state.cov @ projector.T) / 2.0
    cov = 0.5 * (cov + cov.T)

    rng = np.random.default_rng(seed)
    return rng.multivariate_normal(mean, cov, size=n_samples, method="svd")
