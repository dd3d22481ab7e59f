"""Shared estimation helpers for the homodyne maximum-likelihood checks.

Both the metrology tests and the acceptance gate need the same Monte Carlo
experiment: sample homodyne records from a single-phase sensor, run a grid
ML estimator on each record, and compare the estimator variance against the
Fisher bound.  Kept here so the two call sites stay in lockstep.
"""

import numpy as np

from cascade_sensor.lattice import (
    SensorConfig,
    SidePolicy,
    run_sensor,
    staggered_schedule,
)
from cascade_sensor.metrology import fisher_matrix, sample_homodyne


def balanced_interferometer(alpha, phi, reference=1.1):
    """One segment probed from both ends; saturates the coherent bound."""
    return SensorConfig(
        n_phases=1,
        transmissions=(),
        sensing_phases=(phi,),
        reference_phases=(reference,),
        pulses=staggered_schedule(1, 2, SidePolicy.BIDIRECTIONAL, alpha=alpha),
    )


def signal_quadrature_angles(config, h=1e-5):
    """Per-mode homodyne angle along the mean's response to the phase.

    Single-phase configs only.  The angle in each mode's (x, y) plane points
    along the finite-difference derivative of the detector mean, so the
    measured quadrature carries the full first-moment signal.
    """
    phi = config.sensing_phases[0]
    up = run_sensor(config.with_phases(sensing=[phi + h])).state.mean
    dn = run_sensor(config.with_phases(sensing=[phi - h])).state.mean
    d = (up - dn) / (2.0 * h)
    return np.arctan2(d[1::2], d[0::2])


def ml_phase_variance(config, n_samples=100_000, seed=11, grid_points=512, chunk=20_000):
    """Monte Carlo variance of the grid ML estimator on one unknown phase.

    Returns ``(fisher_value, estimator_variance)``.  The likelihood is
    evaluated on a grid spanning 8 sigma either side of the true phase and
    each record's argmin gets one parabolic refinement step.  Classical
    records have equal variance in every measured quadrature, so maximizing
    the likelihood is minimizing squared distance to the mean curve.
    """
    phi = config.sensing_phases[0]
    fisher = float(fisher_matrix(config).matrix[0, 0])

    state = run_sensor(config).state
    n_modes = state.num_modes
    angles = signal_quadrature_angles(config)
    projector = np.zeros((n_modes, 2 * n_modes))
    idx = np.arange(n_modes)
    projector[idx, 2 * idx] = np.cos(angles)
    projector[idx, 2 * idx + 1] = np.sin(angles)

    samples = sample_homodyne(state, angles, n_samples, seed)

    sigma = fisher**-0.5
    grid = np.linspace(phi - 8.0 * sigma, phi + 8.0 * sigma, grid_points)
    mu = np.empty((grid_points, n_modes))
    for g, value in enumerate(grid):
        mu[g] = projector @ run_sensor(config.with_phases(sensing=[value])).state.mean
    mu_sq = (mu**2).sum(axis=1)

    step = grid[1] - grid[0]
    estimates = np.empty(n_samples)
    for start in range(0, n_samples, chunk):
        block = samples[start : start + chunk]
        rows = np.arange(block.shape[0])
        loss = -2.0 * block @ mu.T + mu_sq
        j = np.clip(np.argmin(loss, axis=1), 1, grid_points - 2)
        lo, mid, hi = loss[rows, j - 1], loss[rows, j], loss[rows, j + 1]
        denom = lo - 2.0 * mid + hi
        offset = np.where(denom > 0, 0.5 * (lo - hi) / denom, 0.0)
        estimates[start : start + block.shape[0]] = grid[j] + offset * step
    return fisher, float(estimates.var(ddof=1))
