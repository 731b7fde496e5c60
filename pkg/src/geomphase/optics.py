"""Polarization optics on the Poincare sphere.

A pure polarization is a normalized spinor (z1, z2).  Its Stokes vector
(2 Re z1* z2, 2 Im z1* z2, |z1|^2 - |z2|^2) is the point on the Poincare
sphere; (1, 0) sits at the +z pole and orthogonal polarizations are
antipodal.

An ideal polarizer projects the beam onto its transmission state.  The
projected state is taken in phase with the incoming one (real positive
overlap), which is parallel transport along the shorter geodesic.  After
a closed sequence of polarizers the beam returns to its initial
polarization shifted by minus half the solid angle of the geodesic
polygon traced on the sphere.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import inner_product, pancharatnam_phase, state, wrap_phase
from .errors import ContractViolation, FullExtinctionError
from .evolution import PhaseDecomposition
from .sphere import SolidAngle, polygon_solid_angle

__all__ = [
    "POLARIZATIONS",
    "CoherentPolarizationState",
    "PolarizerChain",
    "ChainResult",
    "spinor",
    "to_poincare",
    "from_poincare",
    "project_polarizer",
    "chain_phase",
    "coherent_phase_shift",
    "field_components",
    "interference_intensity",
]

EXTINCTION_TOL = 1e-9

_S = 1.0 / np.sqrt(2.0)
POLARIZATIONS = {
    "H": (1.0, 0.0),
    "V": (0.0, 1.0),
    "D": (_S, _S),
    "A": (_S, -_S),
    "R": (_S, 1j * _S),
    "L": (_S, -1j * _S),
}


def spinor(spec):
    """Normalized polarization spinor from a name in POLARIZATIONS, a spinor, or a Stokes 3-vector."""
    if isinstance(spec, str):
        try:
            return state(POLARIZATIONS[spec.upper()])
        except KeyError:
            raise ContractViolation(f"unknown polarization {spec!r}") from None
    a = np.asarray(spec)
    if a.shape == (3,) and not np.iscomplexobj(a):
        return from_poincare(a)
    if a.shape != (2,):
        raise ContractViolation(f"polarization must be a 2-spinor or a 3-vector, got shape {a.shape}")
    return state(a)


def to_poincare(s):
    """Stokes vector of a pure polarization (invariant under global phase)."""
    s = np.asarray(s, dtype=complex)
    if s.shape != (2,):
        raise ContractViolation("polarization spinor must have two components")
    n = np.linalg.norm(s)
    if n == 0.0:
        raise ContractViolation("zero spinor has no polarization")
    z1, z2 = s / n
    c = np.conj(z1) * z2
    return np.array([2.0 * c.real, 2.0 * c.imag, abs(z1) ** 2 - abs(z2) ** 2])


def from_poincare(p):
    """A spinor whose Stokes vector is the unit vector p (first component real, >= 0)."""
    p = np.asarray(p, dtype=float)
    p = p / np.linalg.norm(p)
    theta = np.arccos(np.clip(p[2], -1.0, 1.0))
    phi = np.arctan2(p[1], p[0])
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def project_polarizer(beam, polarizer, tol=EXTINCTION_TOL):
    """Pass ``beam`` through an ideal polarizer.

    Returns the transmitted state, rephased to be in phase with the beam,
    and the transmitted intensity fraction |<polarizer|beam>|^2.
    """
    beam = np.asarray(beam, dtype=complex)
    axis = np.asarray(polarizer, dtype=complex)
    axis = axis / np.linalg.norm(axis)
    ov = inner_product(axis, beam)
    if abs(ov) <= tol:
        raise FullExtinctionError("polarizer is orthogonal to the beam")
    out = axis * (ov / abs(ov))
    return out, float(abs(ov) ** 2 / np.vdot(beam, beam).real)


@dataclass(frozen=True)
class PolarizerChain:
    """Transmission states of a sequence of polarizers.

    With ``closed`` set, the chain implicitly ends with a polarizer equal
    to the first one, returning the beam to its initial polarization.
    """

    states: tuple
    closed: bool = True

    @classmethod
    def of(cls, specs, closed=True):
        return cls(tuple(spinor(s) for s in specs), closed)

    def poincare_points(self):
        return np.array([to_poincare(s) for s in self.states])


@dataclass(frozen=True)
class ChainResult:
    decomposition: PhaseDecomposition
    solid_angle: SolidAngle
    predicted: float
    transmission: float
    final_state: np.ndarray

    @property
    def phase(self):
        return self.decomposition.geometric

    @property
    def deviation(self):
        return abs(wrap_phase(self.phase - self.predicted))


def chain_phase(chain, input=None):
    """Phase picked up by a beam sent through a closed polarizer chain.

    The beam starts in ``input`` (default: the first polarizer state) and
    passes every polarizer in order, then the first one again.  The
    geometric phase is ph<input|final>; ``predicted`` is -alpha / 2 with
    alpha the oriented solid angle of the chain's Poincare polygon.
    """
    if not chain.closed:
        raise ContractViolation("chain phase requires a closed chain")
    if len(chain.states) < 1:
        raise ContractViolation("chain has no polarizers")
    first = chain.states[0]
    beam = first if input is None else np.asarray(input, dtype=complex)
    if abs(abs(inner_product(first, beam)) - 1.0) > 1e-9:
        raise ContractViolation("input must have the polarization of the first polarizer")
    start = beam
    transmitted = 1.0
    for pol in list(chain.states[1:]) + [first]:
        beam, frac = project_polarizer(beam, pol)
        transmitted *= frac
    phase = pancharatnam_phase(start, beam)
    pts = chain.poincare_points()
    omega = polygon_solid_angle(pts) if len(pts) >= 3 else SolidAngle(0.0, True)
    predicted = wrap_phase(-0.5 * omega.value)
    dec = PhaseDecomposition(total=phase, dynamical=0.0, geometric=phase, fidelity=1.0)
    return ChainResult(dec, omega, predicted, transmitted, beam)


@dataclass(frozen=True)
class CoherentPolarizationState:
    """Two-mode coherent amplitudes (z1, z2) of a classical polarized wave."""

    z1: complex
    z2: complex
    momentum_label: Optional[str] = None

    @property
    def theta1(self):
        return float(np.angle(self.z1))

    @property
    def theta2(self):
        return float(np.angle(self.z2))

    @property
    def intensity(self):
        return abs(self.z1) ** 2 + abs(self.z2) ** 2


def coherent_phase_shift(st, alpha):
    """Act with exp(i alpha N / 2): both amplitudes advance by alpha / 2."""
    f = np.exp(0.5j * alpha)
    return CoherentPolarizationState(complex(st.z1 * f), complex(st.z2 * f), st.momentum_label)


def field_components(st, xi):
    """Expected vector-potential components 2|z_l| cos(xi + theta_l) along the two polarization axes.

    ``xi`` stands for p.x - omega t; accepts arrays.
    """
    xi = np.asarray(xi, dtype=float)
    return (
        2.0 * abs(st.z1) * np.cos(xi + st.theta1),
        2.0 * abs(st.z2) * np.cos(xi + st.theta2),
    )


def interference_intensity(a, b):
    """Intensity 2 + 2|<a|b>| cos(ph<a|b>) of the superposition of two beams."""
    ov = inner_product(a, b)
    return float(2.0 + 2.0 * ov.real)
