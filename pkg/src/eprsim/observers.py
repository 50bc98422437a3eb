"""Per-observer views of a shared quantum state.

An observer frame is just the set of subsystem labels that observer can
touch; their view of the world is the reduced density matrix obtained by
tracing out everything else. Nothing here ever compares frames against
an unreduced "view from nowhere": the anti-correlation Carol finds in
the pointer pair has to come out of her own 9x9 reduced matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import FrameError
from .linalg import SubsystemLayout, as_complex_matrix, partial_trace
from .measurement import POINT_DOWN, POINT_UP, POINTER_DIM
from .quantum import QuantumSystem, axes_equal

DISTRIBUTION_TOL = 1e-10


@dataclass(frozen=True)
class ObserverFrame:
    """Named subset of subsystem labels an observer has access to."""

    name: str
    accessible: frozenset[str]

    def __init__(self, name: str, accessible):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "accessible", frozenset(accessible))
        if not self.accessible:
            raise FrameError(f"frame {name!r} must grant access to at least one label")


def _check_frame(layout: SubsystemLayout, frame: ObserverFrame) -> None:
    unknown = frame.accessible - set(layout.labels)
    if unknown:
        raise FrameError(
            f"frame {frame.name!r} references labels {sorted(unknown)} "
            f"not present in layout {layout.labels}"
        )


def reduced_view(sys: QuantumSystem, frame: ObserverFrame) -> np.ndarray:
    """Density matrix on the frame's factors, all else traced out.

    Factors keep their layout order. With every label accessible this is
    the full density matrix.
    """
    _check_frame(sys.layout, frame)
    return partial_trace(sys.density(), sys.layout, set(frame.accessible))


def carol_view(post: QuantumSystem) -> np.ndarray:
    """Carol's 9x9 view: both pointer devices, both particles traced out.

    The input must be the post-measurement four-factor system (two
    spin-1/2 particles, each followed by a three-state device). The trace
    runs over each particle basis independently; no correlation between
    the devices is assumed by the reduction itself.
    """
    dims = post.layout.dims
    if sorted(dims) != [2, 2, POINTER_DIM, POINTER_DIM]:
        raise FrameError(
            f"expected two particles and two devices, got dims {dims} "
            f"for labels {post.layout.labels}"
        )
    devices = [lab for lab, dim in post.layout.factors if dim == POINTER_DIM]
    return partial_trace(post.density(), post.layout, set(devices))


def pointer_joint_distribution(carol_rho: np.ndarray) -> np.ndarray:
    """Joint 3x3 pointer-reading probabilities P(first device = i,
    second device = j) from Carol's 9x9 matrix."""
    rho = as_complex_matrix(carol_rho)
    if rho.shape != (POINTER_DIM**2, POINTER_DIM**2):
        raise FrameError(f"expected a 9x9 device-pair matrix, got shape {rho.shape}")
    probs = np.real(np.diag(rho)).reshape(POINTER_DIM, POINTER_DIM)
    total = float(probs.sum())
    if abs(total - 1.0) > DISTRIBUTION_TOL:
        raise FrameError(f"pointer probabilities sum to {total}, not 1")
    return np.clip(probs, 0.0, 1.0)


def equal_reading_probability(carol_rho: np.ndarray) -> float:
    """Probability both pointers read the same direction (both up or
    both down)."""
    probs = pointer_joint_distribution(carol_rho)
    return float(probs[POINT_UP, POINT_UP] + probs[POINT_DOWN, POINT_DOWN])


def no_signaling_check(sys_a: QuantumSystem, sys_b: QuantumSystem, frame: ObserverFrame) -> float:
    """Largest entrywise change in the frame's reduced view between two
    global states that differ only outside the frame.

    The two systems must agree on the frame's own measurement settings
    (same axis on each in-frame particle, or unmeasured in both); what
    the far station did — different axis, or no measurement at all — is
    exactly what may vary.
    """
    _check_frame(sys_a.layout, frame)
    _check_frame(sys_b.layout, frame)
    for label in sorted(frame.accessible):
        if sys_a.layout.dim_of(label) != sys_b.layout.dim_of(label):
            raise ValueError(f"layouts disagree on dimension of {label!r}")
        if sys_a.layout.dim_of(label) != 2:
            continue
        axis_a = sys_a.measured_axis(label)
        axis_b = sys_b.measured_axis(label)
        if (axis_a is None) != (axis_b is None):
            raise ValueError(
                f"systems disagree on whether {label!r} was measured; "
                "the frame's own settings must match"
            )
        if axis_a is not None and not axes_equal(axis_a, axis_b):
            raise ValueError(
                f"systems disagree on the measurement axis of {label!r}; "
                "the frame's own settings must match"
            )
    view_a = reduced_view(sys_a, frame)
    view_b = reduced_view(sys_b, frame)
    if view_a.shape != view_b.shape:
        raise ValueError(f"reduced views have different shapes {view_a.shape}, {view_b.shape}")
    return float(np.max(np.abs(view_a - view_b)))


def matrix_payload(matrix: np.ndarray, layout: SubsystemLayout) -> dict:
    """JSON-ready form of a matrix over a layout: labels, dims, then
    row-major entries as (re, im) pairs."""
    m = as_complex_matrix(matrix)
    if m.shape != (layout.dim, layout.dim):
        raise FrameError(f"matrix shape {m.shape} does not match layout dimension {layout.dim}")
    entries = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {
        "labels": list(layout.labels),
        "dims": list(layout.dims),
        "entries": entries,
    }


def matrix_to_json(matrix: np.ndarray, layout: SubsystemLayout) -> str:
    """Serialize a matrix over a layout as JSON text."""
    return json.dumps(matrix_payload(matrix, layout))


def matrix_from_json(text: str) -> tuple[np.ndarray, SubsystemLayout]:
    """Inverse of :func:`matrix_to_json`."""
    payload = json.loads(text)
    layout = SubsystemLayout.of(*zip(payload["labels"], payload["dims"]))
    dim = layout.dim
    entries = payload["entries"]
    if len(entries) != dim * dim:
        raise FrameError(f"expected {dim * dim} entries for dimension {dim}, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(dim, dim), layout
