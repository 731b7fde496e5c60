"""Slow evolution around a cone: the geometric part approaches the Berry phase.

A spin-1/2 starting in its aligned level is evolved while the field
circles a cone at half-angle pi/3.  The dynamical phase is removed and
the remainder is compared with -pi/2; the residual shrinks roughly as 1/T.
"""

import numpy as np

from geomphase import berry_phase_adiabatic_numeric, cone_path, spin_field_family, spin_level_index

fam = spin_field_family(0.5, 1.0)
path = cone_path(np.pi / 3, 720)
level = spin_level_index(0.5, 0.5)
for T in (50, 150, 500, 1500):
    dec = berry_phase_adiabatic_numeric(fam, path, level, T, 100 * T)
    dev = abs(dec.geometric + np.pi / 2)
    print(f"T={T:>5}  geometric {dec.geometric:+.6f}  deviation {dev:.3e}  T*deviation {T * dev:.2f}  "
          f"fidelity {dec.fidelity:.6f}")
