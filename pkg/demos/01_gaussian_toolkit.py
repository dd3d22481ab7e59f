#!/usr/bin/env python3
"""Tour of the Gaussian-state toolkit: build, transform, measure, audit.

Everything downstream (lattice propagation, Fisher information, homodyne
records) reduces to the mean-vector and covariance-matrix operations shown
here on a two-mode example.
"""

import numpy as np

from cascade_sensor.gaussian import (
    ModeLabel,
    Side,
    SiteKind,
    apply_transform,
    beamsplitter_matrix,
    coherent_state,
    loss_channel,
    photon_number,
    squeeze_matrix,
    symplectic_eigenvalues,
    tensor,
    vacuum_state,
)


def label(i):
    return ModeLabel(SiteKind.INPUT_PORT, index=i, side=Side.LEFT, time_bin=0)


print("1. A coherent state with alpha=2 at 30 degrees")
state = coherent_state(2.0, np.pi / 6, label=label(0))
print("   mean:", np.round(state.mean, 6))
print("   photons:", photon_number(state))

print("\n2. Squeeze vacuum by r=1 and attach it as a second mode")
squeezed = apply_transform(vacuum_state([label(1)]), squeeze_matrix(1.0, 0.0), None)
pair = tensor(state, squeezed)
print("   covariance diagonal:", np.round(np.diag(pair.cov), 4))
print("   photons now:", round(photon_number(pair), 6), "(2 coherent + sinh^2 1 squeezed)")

print("\n3. Interfere the two modes on a 50:50 beamsplitter")
mixed = apply_transform(pair, beamsplitter_matrix(0.5), pair.labels)
print("   photons after mixing:", round(photon_number(mixed), 6), "(passive, conserved)")
print("   symplectic eigenvalues:", np.round(symplectic_eigenvalues(mixed), 6))
print("   (all 1.0: the joint state is still pure)")

print("\n4. Send one arm through 20% loss")
lossy = loss_channel(mixed, mixed.labels[0], 0.8)
print("   photons after loss:", round(photon_number(lossy), 6))
print("   symplectic eigenvalues:", np.round(symplectic_eigenvalues(lossy), 6))
print("   (an eigenvalue above 1.0: loss made the state mixed)")
