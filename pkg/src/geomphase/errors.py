"""Exception hierarchy shared by all geomphase modules."""


class GeometricPhaseError(Exception):
    """Base class for every error raised by geomphase."""


class ContractViolation(GeometricPhaseError, ValueError):
    """An argument violates a documented precondition."""


class UndefinedPhaseError(GeometricPhaseError):
    """The relative phase of (nearly) orthogonal states is undefined."""

    def __init__(self, overlap):
        self.overlap = overlap
        super().__init__(f"phase undefined: |<a|b>| = {overlap:.3e} is below the orthogonality cutoff")


class NoUniqueGeodesicError(GeometricPhaseError):
    """Antipodal points on the sphere have no unique shortest geodesic."""


class DegeneracyError(GeometricPhaseError):
    """A level requested as non-degenerate is degenerate at some sample."""

    def __init__(self, sample_index, level):
        self.sample_index = sample_index
        self.level = level
        super().__init__(
            f"level {level} is degenerate at sample {sample_index}; "
            "use geomphase.wz for degenerate blocks"
        )


class DegeneracySplittingError(GeometricPhaseError):
    """A degenerate block changes dimension along the path."""

    def __init__(self, sample_index, expected, found):
        self.sample_index = sample_index
        self.expected = expected
        self.found = found
        super().__init__(
            f"degenerate block of dimension {expected} has dimension {found} at sample {sample_index}"
        )


class UndersampledLoopError(GeometricPhaseError):
    """Consecutive samples are too far apart to be matched reliably."""


class NonAdiabaticLeakageError(GeometricPhaseError):
    """The evolved state left the transported level or block."""

    def __init__(self, fidelity=None, defect=None):
        self.fidelity = fidelity
        self.defect = defect
        if defect is not None:
            msg = f"non-adiabatic leakage: projection defect {defect:.3e}"
        else:
            msg = f"non-adiabatic leakage: final fidelity {fidelity:.6f}"
        super().__init__(msg)


class NonCyclicError(GeometricPhaseError):
    """The evolution does not return to its initial ray."""

    def __init__(self, fidelity, tolerance):
        self.fidelity = fidelity
        self.tolerance = tolerance
        super().__init__(f"evolution is not cyclic: |<psi(0)|psi(T)>| = {fidelity:.9f} (tolerance {tolerance:g})")


class StructureViolationError(GeometricPhaseError):
    """Per-level phases are inconsistent with a single geometric angle."""


class FullExtinctionError(GeometricPhaseError):
    """A polarizer orthogonal to the beam blocks it completely."""


class ConfigError(GeometricPhaseError):
    """A scenario configuration failed to parse or validate.

    ``errors`` holds every problem found, not only the first.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
