"""Dense complex linear algebra for small multipartite quantum systems.

States are 1-D complex numpy arrays, operators and density matrices are
square 2-D complex arrays (C order, i.e. row-major). Multipartite structure
is not baked into the arrays; it is described separately by a
:class:`SubsystemLayout`, an ordered list of ``(label, dimension)`` factors.
Keeping the factor order explicit removes all ambiguity from tensor index
arithmetic: ``kron`` composes factors left to right in layout order and
``partial_trace`` contracts the factors you name.

Everything in this module is a pure function of its inputs; nothing mutates
its arguments and there is no global state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionError, LabelError, ShapeError, StateError

# Largest entry count a kron result may have. All systems in scope are at
# most 36-dimensional, so this cap only guards against runaway composition.
DEFAULT_SIZE_CAP = 2**20

# Tolerances: invariant checks (hermiticity, trace, norm) at 1e-10, exact
# oracle-level equivalence at 1e-12. Short chains of rational-plus-sqrt2
# arithmetic in double precision leave wide headroom around both.
INVARIANT_TOL = 1e-10
ORACLE_TOL = 1e-12

# Smallest eigenvalue accepted as "positive semidefinite": roundoff can push
# genuine zeros slightly negative.
PSD_EIG_TOL = -1e-10


def as_complex_matrix(a) -> np.ndarray:
    """Coerce input to a 2-D complex array, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix or vector, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise StateError("matrix entries must be finite (no NaN/Inf)")
    return m


def kron(a, b, *, size_cap: int = DEFAULT_SIZE_CAP) -> np.ndarray:
    """Kronecker product with the standard (left factor varies slowest)
    ordering, matching SubsystemLayout's left-to-right factor order.

    Raises DimensionError if the result would exceed ``size_cap`` entries.
    """
    am = as_complex_matrix(a)
    bm = as_complex_matrix(b)
    entries = am.shape[0] * bm.shape[0] * am.shape[1] * bm.shape[1]
    if entries > size_cap:
        raise DimensionError(
            f"kron result would have {entries} entries, exceeding the cap of {size_cap}"
        )
    return np.kron(am, bm)


def kron_all(factors: Iterable, *, size_cap: int = DEFAULT_SIZE_CAP) -> np.ndarray:
    """Left-to-right kron of a sequence of matrices/vectors."""
    result = None
    for f in factors:
        result = as_complex_matrix(f) if result is None else kron(result, f, size_cap=size_cap)
    if result is None:
        raise DimensionError("kron_all needs at least one factor")
    return result


def dagger(a) -> np.ndarray:
    """Conjugate transpose. A 1-D input is treated as a column vector, so
    its dagger is the corresponding 1xN bra row."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        return m.conj()[None, :]
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix or vector, got ndim={m.ndim}")
    return m.conj().T


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered register of tensor factors: ``((label, dim), ...)``.

    The factor order is the canonical composition order for everything in
    this package (particle A, A's pointer, particle B, B's pointer once
    devices are attached). Labels are unique; dims are positive.
    """

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        factors = tuple((str(lab), int(dim)) for lab, dim in self.factors)
        object.__setattr__(self, "factors", factors)
        labels = [lab for lab, _ in factors]
        if len(set(labels)) != len(labels):
            raise LabelError(f"duplicate subsystem labels in {labels}")
        if not factors:
            raise LabelError("layout needs at least one factor")
        for lab, dim in factors:
            if dim < 1:
                raise DimensionError(f"factor {lab!r} has non-positive dimension {dim}")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "SubsystemLayout":
        return cls(tuple(pairs))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def dim(self) -> int:
        """Total Hilbert-space dimension (product of factor dims)."""
        return math.prod(self.dims)

    def position(self, label: str) -> int:
        for i, (lab, _) in enumerate(self.factors):
            if lab == label:
                return i
        raise LabelError(f"unknown subsystem label {label!r}; layout has {list(self.labels)}")

    def dim_of(self, label: str) -> int:
        return self.factors[self.position(label)][1]

    def insert_after(self, label: str, new_label: str, dim: int) -> "SubsystemLayout":
        if new_label in self.labels:
            raise LabelError(f"label {new_label!r} already present in layout")
        pos = self.position(label)
        factors = list(self.factors)
        factors.insert(pos + 1, (new_label, dim))
        return SubsystemLayout(tuple(factors))

    def restricted(self, keep: Iterable[str]) -> "SubsystemLayout":
        """Sub-layout of the kept labels, preserving this layout's order."""
        keep_set = set(keep)
        unknown = keep_set - set(self.labels)
        if unknown:
            raise LabelError(f"unknown subsystem labels {sorted(unknown)}")
        return SubsystemLayout(tuple(f for f in self.factors if f[0] in keep_set))


def partial_trace(rho, layout: SubsystemLayout, keep: Iterable[str]) -> np.ndarray:
    """Trace out every factor not named in ``keep``.

    Returns the reduced matrix on the kept factors, in layout order. The
    trace is preserved: Tr(result) == Tr(rho) up to roundoff.
    """
    rho = as_complex_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"partial_trace needs a square matrix, got shape {rho.shape}")
    if rho.shape[0] != layout.dim:
        raise ShapeError(
            f"matrix dimension {rho.shape[0]} does not match layout dimension {layout.dim}"
        )
    keep_set = set(keep)
    unknown = keep_set - set(layout.labels)
    if unknown:
        raise LabelError(f"unknown subsystem labels {sorted(unknown)}")

    dims = list(layout.dims)
    traced = [i for i, lab in enumerate(layout.labels) if lab not in keep_set]
    if not traced:
        return rho.copy()

    r = rho.reshape(tuple(dims) + tuple(dims))
    # Trace highest positions first so lower axis indexes stay valid.
    for p in sorted(traced, reverse=True):
        r = np.trace(r, axis1=p, axis2=p + len(dims))
        del dims[p]
    d = math.prod(dims) if dims else 1
    return r.reshape(d, d)


def is_hermitian(m, tol: float = INVARIANT_TOL) -> bool:
    m = as_complex_matrix(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T)) <= tol


def min_eigenvalue(m) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(np.linalg.eigvalsh(as_complex_matrix(m))[0])


def assert_density_matrix(m, tol: float = INVARIANT_TOL) -> np.ndarray:
    """Validate hermiticity, unit trace, and positive semidefiniteness
    (smallest eigenvalue >= -1e-10). Returns the validated array."""
    rho = as_complex_matrix(m)
    if rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"density matrix must be square, got {rho.shape}")
    if not is_hermitian(rho, tol):
        raise StateError("density matrix is not Hermitian within tolerance")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > tol:
        raise StateError(f"density matrix trace {tr} is not 1 within tolerance")
    lo = min_eigenvalue(rho)
    if lo < PSD_EIG_TOL:
        raise StateError(f"density matrix has negative eigenvalue {lo}")
    return rho
