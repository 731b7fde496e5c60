"""Non-Abelian holonomy of a doubly degenerate spin-3/2 level.

A quadrupole Hamiltonian (S.n)^2 keeps the m = +-1/2 and m = +-3/2 pairs
degenerate as n moves.  Transporting the lower pair around a cone gives
a 2x2 unitary that differs from a pure phase; slow evolution reproduces
it with a residual that falls as the sweep slows down.
"""

import numpy as np

from geomphase import (
    build_degenerate_frames,
    cone_path,
    operator_distance,
    quadrupole_family,
    wz_holonomy_adiabatic_oracle,
    wz_holonomy_discrete,
)

np.set_printoptions(precision=4, suppress=True)
fam = quadrupole_family(1.5)
path = cone_path(np.pi / 3, 720)
for block in (0, 1):
    D = wz_holonomy_discrete(build_degenerate_frames(fam, path, block))
    print(f"block {block}: eigenphases {D.eigenphases}  unitarity defect {D.unitarity_defect():.1e}")
    print(D.entries)
D = wz_holonomy_discrete(build_degenerate_frames(fam, path, 0))
for T in (50, 150, 500):
    O = wz_holonomy_adiabatic_oracle(fam, path, 0, T, 100 * T)
    print(f"T={T:>4}  distance to slow evolution {operator_distance(O.entries, D.entries):.3e}  leakage {O.leakage:.1e}")
