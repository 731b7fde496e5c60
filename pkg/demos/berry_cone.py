"""Berry phases of a spin in a field swept around a cone.

For every level m of spins 1/2, 1 and 3/2 the discrete Berry phase is
compared with -m times the cone's solid angle, then the per-level phases
are fitted to a single geometric angle.
"""

import numpy as np

from geomphase import (
    berry_phase_discrete,
    build_frames,
    cone_path,
    geometric_angles_from_levels,
    spin_field_family,
    spin_level_index,
    wrap_phase,
)

theta = np.pi / 3
omega = 2 * np.pi * (1 - np.cos(theta))
print(f"cone half-angle {theta:.4f}, solid angle {omega:.6f}")
for s in (0.5, 1, 1.5):
    frames = build_frames(spin_field_family(s), cone_path(theta, 720))
    ms = [s - k for k in range(int(2 * s) + 1)]
    results = [berry_phase_discrete(frames, spin_level_index(s, m)) for m in ms]
    for m, r in zip(ms, results):
        print(f"  s={s:<4} m={m:+.1f}  phase {r.principal:+.6f}  -m*Omega {wrap_phase(-m * omega):+.6f}")
    fit = geometric_angles_from_levels(results, ms)
    print(f"  s={s:<4} fitted angle {fit.alpha:.6f}  (max residual {fit.max_residual:.1e})")
