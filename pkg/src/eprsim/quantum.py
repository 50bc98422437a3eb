"""Spin-1/2 states and observables.

The reference basis is the z-axis: basis index 0 is spin up, index 1 is
spin down. A measurement direction is a unit vector
n = (sin t cos p, sin t sin p, cos t) given by polar angle ``theta`` and
azimuth ``phi``; the corresponding observable is (1/2) n.sigma with hbar
set to 1, so its eigenvalues are +-1/2. Outcome statistics use the signs
+-1 of the spin projection, which is what the correlation algebra wants.

The phase convention for the spin-up eigenstate along (theta, phi) is
(cos(theta/2), e^{i phi} sin(theta/2)); probabilities never depend on it,
but tests and serialized states need one deterministic representative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import EventError, LabelError, StateError
from .linalg import (
    INVARIANT_TOL,
    SubsystemLayout,
    as_complex_matrix,
    assert_density_matrix,
    kron_all,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

# Two floating-point axes count as the same direction when the angle
# between their unit vectors is below this (radians).
AXIS_ANGLE_TOL = 1e-9

NORM_TOL = 1e-10


class Outcome(Enum):
    """Spin projection along the chosen axis: up (+1) or down (-1)."""

    UP = "up"
    DOWN = "down"

    @property
    def sign(self) -> int:
        return 1 if self is Outcome.UP else -1

    @property
    def opposite(self) -> "Outcome":
        return Outcome.DOWN if self is Outcome.UP else Outcome.UP

    @classmethod
    def from_name(cls, name: str) -> "Outcome":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"outcome must be 'up' or 'down', got {name!r}") from None


@dataclass(frozen=True)
class MeasurementAxis:
    """Measurement direction parametrized by polar/azimuthal angles.

    theta in [0, pi], phi in [0, 2*pi). Use :meth:`from_degrees` or
    :meth:`from_vector` for inputs outside those ranges.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "phi", float(self.phi))
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not (0.0 <= self.phi < 2.0 * math.pi):
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi}")

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float = 0.0) -> "MeasurementAxis":
        theta = math.radians(theta_deg)
        phi = math.radians(phi_deg) % (2.0 * math.pi)
        # Angles like 180deg can land a hair above pi after conversion.
        theta = min(max(theta, 0.0), math.pi)
        return cls(theta, phi)

    @classmethod
    def from_vector(cls, v: Sequence[float]) -> "MeasurementAxis":
        v = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise ValueError("cannot build an axis from the zero vector")
        x, y, z = (v / norm).tolist()
        theta = math.acos(min(1.0, max(-1.0, z)))
        phi = math.atan2(y, x) % (2.0 * math.pi)
        return cls(theta, phi)

    @property
    def unit_vector(self) -> np.ndarray:
        st, ct = math.sin(self.theta), math.cos(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), ct])


Z_AXIS = MeasurementAxis(0.0, 0.0)
X_AXIS = MeasurementAxis(math.pi / 2, 0.0)
Y_AXIS = MeasurementAxis(math.pi / 2, math.pi / 2)


def angle_between(a: MeasurementAxis, b: MeasurementAxis) -> float:
    """Angle in radians between two measurement directions.

    Uses atan2 of the cross- and dot-products rather than acos of the
    dot alone: acos loses half the float precision near 0 and pi, where
    a one-ulp rounding of the dot product already shifts the angle by
    ~1.5e-8 and would defeat the 1e-9 axis-identity tolerance.
    """
    va, vb = a.unit_vector, b.unit_vector
    cross = float(np.linalg.norm(np.cross(va, vb)))
    return math.atan2(cross, float(np.dot(va, vb)))


def axes_equal(a: MeasurementAxis, b: MeasurementAxis, tol: float = AXIS_ANGLE_TOL) -> bool:
    return angle_between(a, b) <= tol


def axis_ket(axis: MeasurementAxis, outcome: Outcome) -> np.ndarray:
    """Eigenvector of the spin observable along ``axis``.

    Up: (cos(t/2), e^{i p} sin(t/2)); down is the orthogonal complement
    (-sin(t/2), e^{i p} cos(t/2)).
    """
    half = axis.theta / 2.0
    ph = cmath.exp(1j * axis.phi)
    if outcome is Outcome.UP:
        return np.array([math.cos(half), ph * math.sin(half)], dtype=complex)
    return np.array([-math.sin(half), ph * math.cos(half)], dtype=complex)


def spin_operator(axis: MeasurementAxis) -> np.ndarray:
    """Spin observable (1/2) n.sigma (hbar = 1); eigenvalues +-1/2."""
    nx, ny, nz = axis.unit_vector
    return 0.5 * (nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z)


def projector(axis: MeasurementAxis, outcome: Outcome) -> np.ndarray:
    """Rank-1 eigenprojector of :func:`spin_operator` for the outcome."""
    v = axis_ket(axis, outcome)
    return np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class QuantumSystem:
    """A labeled register of subsystems plus its state.

    ``state`` is either a pure vector (1-D, unit norm) or a density matrix
    (2-D, Hermitian, unit trace, positive semidefinite); both are validated
    on construction. ``measured`` records which particles have been coupled
    to a pointer and along which axis — bookkeeping used by the
    no-signaling check, with no effect on any amplitude.

    Instances are immutable; operations return new systems.
    """

    layout: SubsystemLayout
    state: np.ndarray
    measured: tuple[tuple[str, MeasurementAxis], ...] = field(default=())

    def __post_init__(self):
        state = np.array(self.state, dtype=complex)
        if state.ndim == 1:
            if state.shape[0] != self.layout.dim:
                raise StateError(
                    f"state vector length {state.shape[0]} does not match "
                    f"layout dimension {self.layout.dim}"
                )
            if not np.all(np.isfinite(state.real)) or not np.all(np.isfinite(state.imag)):
                raise StateError("state vector entries must be finite")
            norm = float(np.linalg.norm(state))
            if abs(norm - 1.0) > NORM_TOL:
                raise StateError(f"pure state norm {norm} deviates from 1 beyond tolerance")
        elif state.ndim == 2:
            if state.shape != (self.layout.dim, self.layout.dim):
                raise StateError(
                    f"density matrix shape {state.shape} does not match "
                    f"layout dimension {self.layout.dim}"
                )
            assert_density_matrix(state)
        else:
            raise StateError(f"state must be a vector or a matrix, got ndim={state.ndim}")
        state.setflags(write=False)
        object.__setattr__(self, "state", state)
        object.__setattr__(self, "measured", tuple(self.measured))

    @property
    def is_pure(self) -> bool:
        return self.state.ndim == 1

    @property
    def dim(self) -> int:
        return self.layout.dim

    def density(self) -> np.ndarray:
        """The state as a density matrix (|psi><psi| if pure)."""
        if self.is_pure:
            return np.outer(self.state, self.state.conj())
        return np.array(self.state)

    def measured_axis(self, particle: str) -> MeasurementAxis | None:
        for lab, axis in self.measured:
            if lab == particle:
                return axis
        return None

    def particle_labels(self) -> tuple[str, ...]:
        """Labels of the spin-1/2 factors, in layout order."""
        return tuple(lab for lab, dim in self.layout.factors if dim == 2)


def make_singlet(
    labels: tuple[str, str] = ("alpha", "beta"),
    reference_axis: MeasurementAxis = Z_AXIS,
) -> QuantumSystem:
    """Two-qubit singlet (|+->-|-+>)/sqrt(2), anti-correlated along every
    axis.

    ``reference_axis`` picks the basis the amplitudes are written in; the
    default z gives the vector (0, 1/sqrt2, -1/sqrt2, 0). Any other choice
    yields the same physical state (the representation differs by a global
    phase only).
    """
    up = axis_ket(reference_axis, Outcome.UP)
    down = axis_ket(reference_axis, Outcome.DOWN)
    vec = (np.kron(up, down) - np.kron(down, up)) / math.sqrt(2.0)
    layout = SubsystemLayout.of((labels[0], 2), (labels[1], 2))
    return QuantumSystem(layout, vec)


def _event_operator(
    layout: SubsystemLayout, events: Sequence[tuple[str, MeasurementAxis, Outcome]]
) -> np.ndarray:
    """Full-space operator: outcome projectors on measured factors,
    identity elsewhere."""
    seen: set[str] = set()
    by_label: dict[str, np.ndarray] = {}
    for label, axis, outcome in events:
        if label in seen:
            raise EventError(f"duplicate label {label!r} in measurement event")
        seen.add(label)
        if layout.dim_of(label) != 2:
            raise LabelError(f"label {label!r} is not a spin-1/2 factor")
        by_label[label] = projector(axis, outcome)
    factors = [by_label.get(lab, np.eye(dim, dtype=complex)) for lab, dim in layout.factors]
    return kron_all(factors)


def born_probability(
    sys: QuantumSystem, events: Sequence[tuple[str, MeasurementAxis, Outcome]]
) -> float:
    """Probability of a joint outcome event: Tr(rho P1 x P2 x ...), with
    identity on unmeasured factors.

    ``events`` lists (label, axis, outcome) triples, at most one per label.
    The result is clamped to [0, 1]; a non-negligible imaginary part means
    corrupted inputs and raises.
    """
    op = _event_operator(sys.layout, events)
    if sys.is_pure:
        p = complex(np.vdot(sys.state, op @ sys.state))
    else:
        p = complex(np.trace(sys.state @ op))
    if abs(p.imag) > 1e-9:
        raise StateError(f"probability has non-real value {p}")
    return min(1.0, max(0.0, p.real))


def outcome_distribution(
    sys: QuantumSystem, settings: Sequence[tuple[str, MeasurementAxis]]
) -> dict[tuple[Outcome, ...], float]:
    """Exact joint distribution over all outcome tuples for the given
    (label, axis) settings, in the canonical cell order
    (UP,...,UP), (UP,...,DOWN), ..., (DOWN,...,DOWN)."""
    import itertools

    labels = [lab for lab, _ in settings]
    if len(set(labels)) != len(labels):
        raise EventError(f"duplicate labels in settings: {labels}")
    dist: dict[tuple[Outcome, ...], float] = {}
    for combo in itertools.product((Outcome.UP, Outcome.DOWN), repeat=len(settings)):
        events = [(lab, axis, out) for (lab, axis), out in zip(settings, combo)]
        dist[combo] = born_probability(sys, events)
    total = sum(dist.values())
    if abs(total - 1.0) > INVARIANT_TOL:
        raise StateError(f"joint distribution sums to {total}, not 1")
    return dist


def pair_correlation(
    sys: QuantumSystem,
    setting_a: tuple[str, MeasurementAxis],
    setting_b: tuple[str, MeasurementAxis],
) -> float:
    """Expectation of the product of the +-1 outcomes at two stations."""
    dist = outcome_distribution(sys, [setting_a, setting_b])
    return sum(p * oa.sign * ob.sign for (oa, ob), p in dist.items())
