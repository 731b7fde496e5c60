"""Cyclic precession of a spin-1/2 and its Aharonov-Anandan phase.

The state tilted by theta precesses about z for one period; its geometric
phase is minus half the solid angle enclosed on the Bloch sphere,
whatever the rate or gauge.
"""

import numpy as np
from scipy.linalg import expm

from geomphase import ParameterPath, aa_phase, constant_family, evolve, spin_operators, wrap_phase

sx, sy, sz = spin_operators(0.5)
path = ParameterPath(np.array([0.0, 2 * np.pi]), np.zeros((2, 1)), closed=True)
for theta in (np.pi / 6, np.pi / 3, np.pi / 2, 2 * np.pi / 3):
    psi0 = expm(-1j * theta * sy) @ np.array([1, 0], dtype=complex)
    dec = aa_phase(evolve(constant_family(sz), path, psi0, 10000))
    print(f"theta={theta:.4f}  total {dec.total:+.6f}  dynamical {dec.dynamical:+.6f}  "
          f"geometric {dec.geometric:+.6f}  -pi(1-cos) {wrap_phase(-np.pi * (1 - np.cos(theta))):+.6f}")
