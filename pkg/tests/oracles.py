"""Independent naive oracles for cross-checking the linear algebra.

Everything here works by explicit mixed-radix index arithmetic and plain
Python complex arithmetic: no Kronecker products, no reshapes, no
library partial trace. Slow on purpose; the point is a second, unrelated
path to the same numbers.
"""

from __future__ import annotations

import itertools


def flat_index(dims, multi) -> int:
    """Row-major flattening of a multi-index."""
    idx = 0
    for d, m in zip(dims, multi):
        idx = idx * d + m
    return idx


def naive_partial_trace(rho, dims, keep_positions):
    """Contract the factors not in ``keep_positions`` by direct index
    summation. ``rho`` is any 2-D indexable; returns a nested list."""
    dims = list(dims)
    keep = sorted(keep_positions)
    traced = [p for p in range(len(dims)) if p not in keep]
    keep_dims = [dims[p] for p in keep]
    traced_dims = [dims[p] for p in traced]
    out_dim = 1
    for d in keep_dims:
        out_dim *= d
    out = [[0j for _ in range(out_dim)] for _ in range(out_dim)]
    keep_indices = list(itertools.product(*[range(d) for d in keep_dims]))
    traced_indices = list(itertools.product(*[range(d) for d in traced_dims]))
    for i_out, i_keep in enumerate(keep_indices):
        for j_out, j_keep in enumerate(keep_indices):
            total = 0j
            for t in traced_indices:
                row_multi = [0] * len(dims)
                col_multi = [0] * len(dims)
                for p, v in zip(keep, i_keep):
                    row_multi[p] = v
                for p, v in zip(keep, j_keep):
                    col_multi[p] = v
                for p, v in zip(traced, t):
                    row_multi[p] = v
                    col_multi[p] = v
                total += complex(rho[flat_index(dims, row_multi), flat_index(dims, col_multi)])
            out[i_out][j_out] = total
    return out


def naive_event_operator(dims, factor_matrices):
    """Full-space operator with the given per-factor matrices (2-D
    nested lists or arrays) and implicit identities, built entry by
    entry rather than by Kronecker products."""
    total = 1
    for d in dims:
        total *= d
    mats = []
    for p, d in enumerate(dims):
        if p in factor_matrices:
            mats.append(factor_matrices[p])
        else:
            mats.append([[1.0 if r == c else 0.0 for c in range(d)] for r in range(d)])
    op = [[0j for _ in range(total)] for _ in range(total)]
    all_multi = list(itertools.product(*[range(d) for d in dims]))
    for i, row_multi in enumerate(all_multi):
        for j, col_multi in enumerate(all_multi):
            value = 1 + 0j
            for m, r, c in zip(mats, row_multi, col_multi):
                value *= complex(m[r][c])
                if value == 0:
                    break
            op[i][j] = value
    return op


def naive_born_probability(state, dims, factor_projectors) -> float:
    """Born probability from an entrywise-built event operator.

    ``state`` is a 1-D pure vector or a 2-D density, any indexable.
    ``factor_projectors`` maps factor position -> 2-D projector.
    """
    op = naive_event_operator(dims, factor_projectors)
    total = len(op)
    if state.ndim == 1:
        acc = 0j
        for i in range(total):
            amp_i = complex(state[i])
            if amp_i == 0:
                continue
            row = 0j
            for j in range(total):
                row += op[i][j] * complex(state[j])
            acc += amp_i.conjugate() * row
        return acc.real
    acc = 0j
    for i in range(total):
        for j in range(total):
            acc += complex(state[i, j]) * op[j][i]
    return acc.real
