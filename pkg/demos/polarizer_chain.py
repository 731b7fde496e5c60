"""Phase of light sent through a closed chain of polarizers.

H -> D -> R -> H traces one octant of the Poincare sphere; the returning
beam is shifted by minus half its solid angle, pi/2.  The same law holds
for random chains, and the intensity of the beam interfering with an
unshifted copy reveals the shift.
"""

import numpy as np

from geomphase import PolarizerChain, chain_phase, interference_intensity, spinor

res = chain_phase(PolarizerChain.of(["H", "D", "R"]))
print(f"octant: phase {res.phase:+.12f}  -alpha/2 {res.predicted:+.12f}  transmission {res.transmission:.4f}")
print(f"  interference with the input beam: {interference_intensity(spinor('H'), res.final_state / np.linalg.norm(res.final_state)):.4f}"
      " (4 would be fully in phase)")

rng = np.random.default_rng(1)
for _ in range(5):
    n = int(rng.integers(3, 7))
    states = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    r = chain_phase(PolarizerChain.of(list(states)))
    print(f"{n} polarizers: phase {r.phase:+.6f}  predicted {r.predicted:+.6f}  deviation {r.deviation:.1e}")
