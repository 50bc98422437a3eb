"""Exception hierarchy for eprsim.

Every error raised on purpose by this package derives from EprSimError, so
callers can catch one type at an API boundary. The subclasses mirror the
distinct failure modes of the library: bad tensor shapes, unknown subsystem
labels, states that are invalid for an operation, malformed measurement
events, bad observer frames, and conditional probabilities whose
conditioning event never occurs.
"""

from __future__ import annotations


class EprSimError(Exception):
    """Base class for all eprsim errors."""


class DimensionError(EprSimError):
    """A tensor product or operator would exceed the configured size cap,
    or operand dimensions are incompatible."""


class ShapeError(EprSimError):
    """An array does not have the shape an operation requires
    (e.g. a non-square density matrix)."""


class LabelError(EprSimError):
    """A subsystem label is unknown, duplicated, or in the wrong position."""


class StateError(EprSimError):
    """A state violates an invariant (norm, hermiticity, trace, positivity)
    or is not in the support an operation requires."""


class EventError(EprSimError):
    """A measurement event specification is malformed (e.g. the same
    subsystem measured twice in one event)."""


class FrameError(EprSimError):
    """An observer frame does not match the system it is applied to."""


class UndefinedConditionalError(EprSimError):
    """The requested conditional probability has no operational meaning:
    the conditioned joint event carries no probability, so the Bayes
    quotient would fabricate a value.

    The joint probability of the full event and the probability of the
    conditioning event are attached so callers can report the well-defined
    quantities instead.
    """

    def __init__(self, message: str, *, joint_probability: float, conditioning_probability: float):
        super().__init__(message)
        self.joint_probability = joint_probability
        self.conditioning_probability = conditioning_probability


class ScenarioError(EprSimError):
    """A scenario file failed to parse or validate.

    ``location`` carries a human-readable pointer (file, line or field path)
    used for CLI diagnostics.
    """

    def __init__(self, message: str, *, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location
