"""Backward free evolution and retrodicted pair states.

Free flight is spin-independent: the Hamiltonian acts as E times the
identity on every spin factor, so evolving a spin state between two
times multiplies it by a unit phase and nothing else. Evolving a
post-measurement description back to the separation time therefore
yields a perfectly ordinary anti-correlated product state; comparing it
with the singlet shows which statistics all descriptions share (the
same-axis anti-correlation) and which remain description-dependent.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import StateError
from .linalg import SubsystemLayout
from .quantum import (
    MeasurementAxis,
    Outcome,
    QuantumSystem,
    axis_ket,
    born_probability,
)

GAUGE_TOL = 1e-10


@dataclass(frozen=True)
class FreeEvolution:
    """Free flight between times t1 and t0 at spin-independent energy E.

    The generator commutes with every spin observable, so the induced
    map is the global phase e^{i E (t0 - t1)}.
    """

    t0: float
    t1: float
    energy: float

    def phase(self) -> complex:
        return cmath.exp(1j * self.energy * (self.t0 - self.t1))

    def hamiltonian(self, dim: int) -> np.ndarray:
        return self.energy * np.eye(dim, dtype=complex)


def evolve_back(state: QuantumSystem, ev: FreeEvolution) -> tuple[QuantumSystem, complex]:
    """Apply e^{i H (t0 - t1)} to a particle-only system.

    Returns the evolved system and the unit phase it picked up. Density
    matrices are phase-invariant and come back unchanged.
    """
    if any(dim != 2 for dim in state.layout.dims):
        raise StateError(
            f"free evolution applies to spin-1/2 factors only, layout has dims {state.layout.dims}"
        )
    phase = ev.phase()
    if state.is_pure:
        evolved = QuantumSystem(state.layout, phase * state.state, state.measured)
    else:
        evolved = QuantumSystem(state.layout, np.array(state.state), state.measured)
    return evolved, phase


def retrodicted_pair_state(
    alice_outcome: Outcome,
    axis: MeasurementAxis,
    labels: tuple[str, str] = ("alpha", "beta"),
) -> QuantumSystem:
    """The pair state retrodicted from one station's result: that
    station's eigenstate along the measured axis, the partner in the
    opposite one. A product state, unentangled by construction."""
    own = axis_ket(axis, alice_outcome)
    partner = axis_ket(axis, alice_outcome.opposite)
    layout = SubsystemLayout.of((labels[0], 2), (labels[1], 2))
    return QuantumSystem(layout, np.kron(own, partner))


def equal_outcome_probability(
    sys: QuantumSystem, axis_a: MeasurementAxis, axis_b: MeasurementAxis
) -> float:
    """P(both stations up) + P(both stations down) for one setting pair."""
    particles = sys.particle_labels()
    if len(particles) < 2:
        raise StateError(f"need two spin-1/2 stations, layout has {particles}")
    pa, pb = particles[0], particles[1]
    both_up = born_probability(sys, [(pa, axis_a, Outcome.UP), (pb, axis_b, Outcome.UP)])
    both_down = born_probability(sys, [(pa, axis_a, Outcome.DOWN), (pb, axis_b, Outcome.DOWN)])
    return both_up + both_down


def gauge_equivalence_check(
    state_a: QuantumSystem,
    state_b: QuantumSystem,
    observables: list[tuple[MeasurementAxis, MeasurementAxis]],
    tol: float = GAUGE_TOL,
) -> dict:
    """Compare two descriptions of the same pair on measurable
    statistics: the equal-outcome probability per setting pair.

    Reports, per observable, both predictions and whether they agree
    within ``tol``; disagreement marks a description-dependent quantity,
    not a contradiction in either description.
    """
    if state_a.layout != state_b.layout:
        raise ValueError(
            f"layout mismatch: {state_a.layout.factors} vs {state_b.layout.factors}"
        )
    from .locality import axis_payload

    results = []
    for axis_a, axis_b in observables:
        pa = equal_outcome_probability(state_a, axis_a, axis_b)
        pb = equal_outcome_probability(state_b, axis_a, axis_b)
        diff = abs(pa - pb)
        results.append(
            {
                "settings": {"axis_a": axis_payload(axis_a), "axis_b": axis_payload(axis_b)},
                "equal_outcome_probability": {"state_a": pa, "state_b": pb},
                "difference": diff,
                "agree": diff <= tol,
            }
        )
    return {
        "test": "gauge_equivalence",
        "observables": results,
        "all_agree": all(r["agree"] for r in results),
    }
