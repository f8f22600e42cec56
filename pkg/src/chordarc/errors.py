"""Exception types shared across the package."""

from __future__ import annotations


class ChordArcError(Exception):
    """Base class for all package errors."""


class DegenerateEdgeError(ChordArcError):
    """An edge is too short for frames to be well conditioned."""


class CuspError(ChordArcError):
    """A turning angle of +-pi (tangent reversal at a vertex)."""


class OrientationError(ChordArcError):
    """Signed area has the wrong sign or vanishes."""


class SelfTouchingError(ChordArcError):
    """Two distinct vertices coincide (d = 0 for i != j)."""

    def __init__(self, i: int, j: int):
        super().__init__(f"vertices {i} and {j} coincide (d = 0)")
        self.pair = (i, j)


class NotCriticalPairError(ChordArcError):
    """Pair fails the first-order criticality test for classification."""


class AdmissionError(ChordArcError):
    """Initial curve rejected before a flow run (e.g. self-intersecting)."""


class BlowUpError(ChordArcError):
    """Non-finite coordinates appeared during time stepping."""

    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class StiffnessCollapseError(ChordArcError):
    """Stable time step underflowed (dt < 1e-16)."""


class ForcingDomainError(ChordArcError):
    """Forcing evaluated outside its domain (e.g. non-positive area)."""


class ForcingConsistencyError(ChordArcError):
    """A forcing family produced a negative value; internal inconsistency."""


class GenerationError(ChordArcError):
    """A generator could not produce an admissible curve."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ConfigError(ChordArcError):
    """Malformed run configuration file."""
