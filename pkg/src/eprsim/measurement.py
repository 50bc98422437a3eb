"""Pointer-model measurement: couple a spin to a three-state device.

A device is a shift register with basis (ready, point_up, point_down).
Measuring along an axis applies the controlled shift
U = P_up x SHIFT_UP + P_down x SHIFT_DOWN on the particle-device pair:
the pointer swings up on the up branch and down on the down branch, and
the particle's eigenstates pass through undisturbed. With three states
the shift is a cyclic permutation, hence exactly unitary.

Outcome sampling draws from the exact joint Born distribution by inverse
CDF. Uniform draws come from a counter-mode generator (Philox) addressed
by absolute trial index, so splitting the trial range across workers
reproduces the single-threaded stream bit for bit.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .errors import LabelError, StateError
from .linalg import SubsystemLayout, kron_all, partial_trace
from .quantum import MeasurementAxis, Outcome, QuantumSystem, outcome_distribution, projector

READY, POINT_UP, POINT_DOWN = 0, 1, 2
POINTER_DIM = 3
POINTER_BASIS = ("ready", "point_up", "point_down")

# Cyclic shifts on the pointer: SHIFT_UP sends ready -> point_up,
# SHIFT_DOWN sends ready -> point_down.
SHIFT_UP = np.roll(np.eye(POINTER_DIM, dtype=complex), 1, axis=0)
SHIFT_DOWN = np.roll(np.eye(POINTER_DIM, dtype=complex), -1, axis=0)

# Philox generates doubles in blocks of 4 per counter increment; chunk
# starts must stay block-aligned for advance() to land on the serial
# stream. Any multiple of 4 works; 4096 keeps per-chunk overhead low.
SAMPLE_CHUNK = 4096

READY_SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class PointerDevice:
    """A three-state measurement pointer starting in ``ready``."""

    label: str
    basis: tuple[str, str, str] = POINTER_BASIS

    def __post_init__(self):
        if len(set(self.basis)) != 3:
            raise ValueError(f"pointer basis needs 3 distinct states, got {self.basis}")

    @property
    def dim(self) -> int:
        return POINTER_DIM

    def ready_state(self) -> np.ndarray:
        ket = np.zeros(POINTER_DIM, dtype=complex)
        ket[READY] = 1.0
        return ket


@dataclass(frozen=True)
class MeasurementRecord:
    """One observer's result in one trial."""

    observer: str
    axis: MeasurementAxis
    outcome: Outcome
    trial: int
    seed: int

    def __post_init__(self):
        if self.trial < 0:
            raise ValueError(f"trial index must be non-negative, got {self.trial}")


def _insert_factor(sys: QuantumSystem, after: str, label: str, ket: np.ndarray) -> QuantumSystem:
    """Tensor a fresh factor in state ``ket`` immediately after ``after``."""
    layout = sys.layout.insert_after(after, label, ket.shape[0])
    pos = sys.layout.position(after) + 1
    dims = list(sys.layout.dims)
    k = len(dims)
    if sys.is_pure:
        tensor = sys.state.reshape(dims)
        joined = np.tensordot(tensor, ket, axes=0)
        vec = np.moveaxis(joined, k, pos).reshape(-1)
        return QuantumSystem(layout, vec, sys.measured)
    rho_t = sys.state.reshape(dims + dims)
    factor = np.outer(ket, ket.conj())
    joined = np.tensordot(rho_t, factor, axes=0)
    joined = np.moveaxis(joined, 2 * k, pos)
    joined = np.moveaxis(joined, 2 * k + 1, k + 1 + pos)
    rho = joined.reshape(layout.dim, layout.dim)
    return QuantumSystem(layout, rho, sys.measured)


def attach_device(sys: QuantumSystem, particle: str, device: PointerDevice) -> QuantumSystem:
    """Tensor the device's ready state in right after its particle."""
    if device.label in sys.layout.labels:
        raise LabelError(f"device label {device.label!r} already present in layout")
    if sys.layout.dim_of(particle) != 2:
        raise LabelError(f"label {particle!r} is not a spin-1/2 factor")
    return _insert_factor(sys, particle, device.label, device.ready_state())


def measurement_unitary(
    layout: SubsystemLayout, particle: str, device: str, axis: MeasurementAxis
) -> np.ndarray:
    """The controlled-shift unitary on the full space.

    Requires the device factor to sit immediately after its particle,
    which :func:`attach_device` guarantees.
    """
    p = layout.position(particle)
    d = layout.position(device)
    if d != p + 1:
        raise LabelError(
            f"device {device!r} (position {d}) must sit immediately after "
            f"particle {particle!r} (position {p})"
        )
    if layout.dims[p] != 2 or layout.dims[d] != POINTER_DIM:
        raise LabelError(f"expected dims (2, {POINTER_DIM}) for {particle!r}, {device!r}")
    pair = np.kron(projector(axis, Outcome.UP), SHIFT_UP) + np.kron(
        projector(axis, Outcome.DOWN), SHIFT_DOWN
    )
    factors = [np.eye(dim, dtype=complex) for dim in layout.dims[:p]]
    factors.append(pair)
    factors.extend(np.eye(dim, dtype=complex) for dim in layout.dims[p + 2 :])
    return kron_all(factors)


def measure_unitary(
    sys: QuantumSystem, particle: str, device: str, axis: MeasurementAxis
) -> QuantumSystem:
    """Couple the particle's spin along ``axis`` to its pointer.

    The device must still be in its ready state; a pointer that has
    already swung cannot be reused.
    """
    rho_dev = partial_trace(sys.density(), sys.layout, {device})
    if abs(rho_dev[READY, READY] - 1.0) > READY_SUPPORT_TOL:
        raise StateError(
            f"device {device!r} is not ready (ready-state weight "
            f"{rho_dev[READY, READY].real})"
        )
    u = measurement_unitary(sys.layout, particle, device, axis)
    if sys.is_pure:
        state = u @ sys.state
    else:
        state = u @ sys.state @ u.conj().T
    measured = sys.measured + ((particle, axis),)
    return QuantumSystem(sys.layout, state, measured)


def _chunk_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform doubles [start, start+count) of the seed's serial stream."""
    if start % 4 != 0:
        raise ValueError(f"chunk start {start} is not block-aligned")
    bitgen = Philox(key=seed)
    bitgen.advance(start // 4)
    return Generator(bitgen).random(count)


def sample_outcomes(
    sys: QuantumSystem,
    settings: list[tuple[str, str, str, MeasurementAxis]],
    n_trials: int,
    seed: int,
    n_workers: int = 1,
) -> list[MeasurementRecord]:
    """Draw joint outcomes for every station over ``n_trials`` trials.

    Each setting is (observer, particle, device, axis). Returns one record
    per station per trial, grouped by trial in settings order. Output
    depends only on the seed, never on ``n_workers``.
    """
    if n_trials == 0:
        raise ValueError("n_trials must be positive")
    if n_trials < 0:
        raise ValueError(f"n_trials must be positive, got {n_trials}")
    if n_workers < 1:
        raise ValueError(f"n_workers must be at least 1, got {n_workers}")
    for _, particle, device, _ in settings:
        if sys.layout.dim_of(particle) != 2:
            raise LabelError(f"label {particle!r} is not a spin-1/2 factor")
        if sys.layout.dim_of(device) != POINTER_DIM:
            raise LabelError(f"label {device!r} is not a pointer factor")

    dist = outcome_distribution(sys, [(particle, axis) for _, particle, _, axis in settings])
    cells = list(dist.keys())
    cdf = np.cumsum([dist[c] for c in cells])
    cdf[-1] = 1.0

    def draw_chunk(start: int) -> np.ndarray:
        count = min(SAMPLE_CHUNK, n_trials - start)
        u = _chunk_uniforms(seed, start, count)
        return np.searchsorted(cdf, u, side="right")

    starts = range(0, n_trials, SAMPLE_CHUNK)
    if n_workers == 1 or len(starts) == 1:
        chunks = [draw_chunk(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            chunks = list(pool.map(draw_chunk, starts))
    indices = np.concatenate(chunks)

    records: list[MeasurementRecord] = []
    for trial, idx in enumerate(indices):
        combo = cells[idx]
        for (observer, _, _, axis), outcome in zip(settings, combo):
            records.append(MeasurementRecord(observer, axis, outcome, trial, seed))
    return records


def records_to_csv(records: list[MeasurementRecord]) -> str:
    """CSV text with columns trial, observer, theta, phi, outcome."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trial", "observer", "theta", "phi", "outcome"])
    for rec in records:
        writer.writerow(
            [rec.trial, rec.observer, repr(rec.axis.theta), repr(rec.axis.phi), rec.outcome.value]
        )
    return buf.getvalue()


def records_to_jsonl(records: list[MeasurementRecord]) -> str:
    """JSON lines, one record per line, same field order as the CSV."""
    lines = []
    for rec in records:
        lines.append(
            json.dumps(
                {
                    "trial": rec.trial,
                    "observer": rec.observer,
                    "theta": rec.axis.theta,
                    "phi": rec.axis.phi,
                    "outcome": rec.outcome.value,
                }
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")


def pointer_pair_settings(
    sys: QuantumSystem,
    observers: tuple[str, str],
    particles: tuple[str, str],
    devices: tuple[str, str],
    axes: tuple[MeasurementAxis, MeasurementAxis],
) -> list[tuple[str, str, str, MeasurementAxis]]:
    """Convenience builder for the two-station settings list."""
    return [
        (observers[0], particles[0], devices[0], axes[0]),
        (observers[1], particles[1], devices[1], axes[1]),
    ]


def all_outcome_cells(n_stations: int) -> list[tuple[Outcome, ...]]:
    """Canonical cell order used by the sampler's inverse CDF."""
    return list(itertools.product((Outcome.UP, Outcome.DOWN), repeat=n_stations))
