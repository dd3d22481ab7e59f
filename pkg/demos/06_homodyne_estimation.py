#!/usr/bin/env python3
"""From variance bound to working estimator: homodyne records plus grid ML.

The Fisher bound is only meaningful if some measurement attains it.  Here
each probe train yields one homodyne record (the quadrature along the
mean's phase response in every output mode); a maximum-likelihood fit over
a phase grid turns the record into an estimate.  Across many simulated
records the estimator variance should sit a few percent above 1/F.
"""

import numpy as np

from cascade_sensor.lattice import SensorConfig, SidePolicy, run_sensor, staggered_schedule
from cascade_sensor.metrology import fisher_matrix, sample_homodyne

ALPHA = 3.0
PHI = 0.4
SAMPLES = 20_000
GRID = 257

config = SensorConfig(
    n_phases=1,
    transmissions=(),
    sensing_phases=(PHI,),
    reference_phases=(1.1,),
    pulses=staggered_schedule(1, 2, SidePolicy.BIDIRECTIONAL, alpha=ALPHA),
)
fisher = fisher_matrix(config).matrix[0, 0]
state = run_sensor(config).state
n_modes = state.num_modes

# quadrature angles along the mean's phase derivative, one per mode
h = 1e-5
up = run_sensor(config.with_phases(sensing=[PHI + h])).state.mean
dn = run_sensor(config.with_phases(sensing=[PHI - h])).state.mean
d = (up - dn) / (2 * h)
angles = np.arctan2(d[1::2], d[0::2])
print(f"{n_modes} detector modes, measuring angles {np.round(angles, 4)}")

projector = np.zeros((n_modes, 2 * n_modes))
projector[np.arange(n_modes), 2 * np.arange(n_modes)] = np.cos(angles)
projector[np.arange(n_modes), 2 * np.arange(n_modes) + 1] = np.sin(angles)

records = sample_homodyne(state, angles, SAMPLES, seed=11)

sigma = fisher**-0.5
grid = np.linspace(PHI - 8 * sigma, PHI + 8 * sigma, GRID)
mu = np.array(
    [projector @ run_sensor(config.with_phases(sensing=[g])).state.mean for g in grid]
)
# classical records: every quadrature has variance 1/2, so ML = least squares
loss = ((records[:, None, :] - mu[None, :, :]) ** 2).sum(axis=2)
estimates = grid[np.argmin(loss, axis=1)]

var = estimates.var(ddof=1)
print(f"true phase          {PHI}")
print(f"mean estimate       {estimates.mean():.6f}")
print(f"estimator variance  {var:.6e}")
print(f"bound 1/F           {1 / fisher:.6e}")
print(f"ratio               {var * fisher:.4f}  (grid pitch adds a little on top of 1)")
