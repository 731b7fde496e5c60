"""Numerical geometric phases: Berry, Aharonov-Anandan, Wilczek-Zee and Pancharatnam.

Conventions used throughout: hbar = 1, inner products conjugate their
first argument, principal phases lie in (-pi, pi], and solid angles are
oriented by the right-hand rule about the outward normal.
"""

from .aa import *  # noqa: F401,F403
from .berry import *  # noqa: F401,F403
from .core import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .evolution import *  # noqa: F401,F403
from .optics import *  # noqa: F401,F403
from .sphere import *  # noqa: F401,F403
from .systems import *  # noqa: F401,F403
from .wz import *  # noqa: F401,F403

__version__ = "0.1.0"
