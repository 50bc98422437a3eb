"""Locality criteria, CHSH, and local-hidden-variable baselines.

All tests here reduce to 2x2 joint outcome tables P(A, B) for one
setting pair, computed either from a quantum state by the Born rule or
from a hidden-variable model branch by branch. The locality criterion
says conditioning on the distant outcome must not move a local outcome's
probability; factorization says the joint must equal the product of the
marginals. Hidden-variable models satisfy both per branch by
construction, which is exactly what the singlet at a shared axis breaks.

A conditional whose defining joint cell carries no probability is
reported as undefined rather than silently assigned a value; the raw
joint and conditioning probabilities ride along on the error so callers
can fall back to the joint form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EventError, StateError, UndefinedConditionalError
from .measurement import MeasurementRecord
from .quantum import (
    MeasurementAxis,
    Outcome,
    QuantumSystem,
    axes_equal,
    born_probability,
    outcome_distribution,
)

LOCALITY_TOL = 1e-10
ZERO_TOL = 1e-12
DISTRIBUTION_TOL = 1e-12

CLASSICAL_BOUND = 2.0
QUANTUM_VALUE = 2.0 * math.sqrt(2.0)

_OUTCOMES = (Outcome.UP, Outcome.DOWN)

# (p_plus, p_minus) distribution over the +-1 outcomes of one response.
ResponseFn = Callable[[object, MeasurementAxis], tuple[float, float]]


def axis_payload(axis: MeasurementAxis) -> dict:
    """Plain-JSON form of an axis used by every report."""
    return {"theta": axis.theta, "phi": axis.phi}


@dataclass(frozen=True)
class ConditionalEvent:
    """A station outcome, conditioned on its own setting and optionally
    the partner's setting and outcome.

    ``side`` is "a" (first station) or "b" (second). Conditioning on the
    partner's outcome requires conditioning on the partner's axis too.
    For a hidden-variable source, ``hidden_value`` picks one branch;
    leaving it unset averages over the branch distribution.
    """

    side: str
    outcome: Outcome
    own_axis: MeasurementAxis
    partner_axis: MeasurementAxis | None = None
    partner_outcome: Outcome | None = None
    hidden_value: object | None = None

    def __post_init__(self):
        if self.side not in ("a", "b"):
            raise EventError(f"side must be 'a' or 'b', got {self.side!r}")
        if self.partner_outcome is not None and self.partner_axis is None:
            raise EventError("conditioning on the partner outcome requires the partner axis")


@dataclass(frozen=True)
class HiddenVariableModel:
    """Local model: a distribution over hidden values, and per-station
    response distributions that see only the local axis and the value.

    ``response_a(lam, axis)`` returns (P(+1), P(-1)); likewise
    ``response_b``. Deterministic strategies are the special case of
    one-hot responses.
    """

    lambdas: tuple
    weights: tuple[float, ...]
    response_a: ResponseFn
    response_b: ResponseFn

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(self.lambdas))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.lambdas) != len(self.weights):
            raise ValueError(
                f"{len(self.lambdas)} hidden values but {len(self.weights)} weights"
            )
        if not self.lambdas:
            raise ValueError("model needs at least one hidden value")
        if any(w < 0.0 for w in self.weights):
            raise ValueError(f"weights must be nonnegative, got {self.weights}")
        total = sum(self.weights)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1")

    @classmethod
    def deterministic(
        cls,
        assignment_a: Sequence[tuple[MeasurementAxis, int]],
        assignment_b: Sequence[tuple[MeasurementAxis, int]],
    ) -> "HiddenVariableModel":
        """Single-branch model with a fixed +-1 answer per listed axis."""

        def responder(assignment):
            pairs = tuple(assignment)

            def respond(lam, axis):
                for ax, sign in pairs:
                    if axes_equal(axis, ax):
                        return (1.0, 0.0) if sign > 0 else (0.0, 1.0)
                raise ValueError(f"no assignment for axis {axis}")

            return respond

        return cls((0,), (1.0,), responder(assignment_a), responder(assignment_b))


def _response(fn: ResponseFn, lam, axis: MeasurementAxis) -> np.ndarray:
    dist = np.asarray(fn(lam, axis), dtype=float)
    if dist.shape != (2,) or np.any(dist < -1e-12) or abs(float(dist.sum()) - 1.0) > 1e-10:
        raise ValueError(f"response for {lam!r} is not a +-1 distribution: {dist}")
    return np.clip(dist, 0.0, 1.0)


def _system_stations(sys: QuantumSystem) -> tuple[str, str]:
    particles = sys.particle_labels()
    if len(particles) < 2:
        raise StateError(f"need two spin-1/2 stations, layout has {particles}")
    return particles[0], particles[1]


def _check_table(table: np.ndarray) -> np.ndarray:
    if np.any(table < -DISTRIBUTION_TOL):
        raise StateError(f"negative joint probability in table {table}")
    if abs(float(table.sum()) - 1.0) > DISTRIBUTION_TOL:
        raise StateError(f"joint table sums to {table.sum()}, not 1")
    return np.clip(table, 0.0, 1.0)


def lambda_tables(
    model: HiddenVariableModel, axis_a: MeasurementAxis, axis_b: MeasurementAxis
) -> list[tuple[object, float, np.ndarray]]:
    """Per-branch joint tables [(lam, weight, 2x2 P(A,B))]; each branch
    factorizes into its local responses by construction."""
    out = []
    for lam, weight in zip(model.lambdas, model.weights):
        pa = _response(model.response_a, lam, axis_a)
        pb = _response(model.response_b, lam, axis_b)
        out.append((lam, weight, _check_table(np.outer(pa, pb))))
    return out


def joint_table(source, axis_a: MeasurementAxis, axis_b: MeasurementAxis) -> np.ndarray:
    """2x2 joint outcome table; rows index station a's outcome (up,
    down), columns station b's. Hidden-variable sources are averaged
    over their branch distribution."""
    if isinstance(source, QuantumSystem):
        pa, pb = _system_stations(source)
        dist = outcome_distribution(source, [(pa, axis_a), (pb, axis_b)])
        table = np.array(
            [[dist[(oa, ob)] for ob in _OUTCOMES] for oa in _OUTCOMES], dtype=float
        )
        return _check_table(table)
    if isinstance(source, HiddenVariableModel):
        table = np.zeros((2, 2))
        for _, weight, branch in lambda_tables(source, axis_a, axis_b):
            table += weight * branch
        return _check_table(table)
    raise TypeError(f"unsupported source type {type(source).__name__}")


def _branches(source, axis_a, axis_b) -> list[tuple[object, float, np.ndarray]]:
    """Branch decomposition: one branch per hidden value, or the state
    itself as the single branch of a quantum source."""
    if isinstance(source, HiddenVariableModel):
        return [(lam, w, t) for lam, w, t in lambda_tables(source, axis_a, axis_b) if w > ZERO_TOL]
    return [("state", 1.0, joint_table(source, axis_a, axis_b))]


def conditional_probability(source, event: ConditionalEvent) -> float:
    """Exact conditional probability of a station outcome.

    Without a partner outcome this is the plain marginal. With one, it
    is the Bayes quotient of joint over conditioning probability; if
    either the conditioning event or the joint cell itself has no
    support, the conditional is undefined and raises, carrying both raw
    probabilities.
    """
    if isinstance(source, HiddenVariableModel) and event.hidden_value is not None:
        try:
            idx = source.lambdas.index(event.hidden_value)
        except ValueError:
            raise ValueError(f"hidden value {event.hidden_value!r} not in model") from None
        lam = source.lambdas[idx]
        if event.partner_outcome is None:
            fn = source.response_a if event.side == "a" else source.response_b
            return float(_response(fn, lam, event.own_axis)[_OUTCOMES.index(event.outcome)])
        axis_a = event.own_axis if event.side == "a" else event.partner_axis
        axis_b = event.own_axis if event.side == "b" else event.partner_axis
        pa = _response(source.response_a, lam, axis_a)
        pb = _response(source.response_b, lam, axis_b)
        return _conditional_from_table(_check_table(np.outer(pa, pb)), event)

    if event.partner_axis is None:
        return _marginal(source, event)
    axis_a = event.own_axis if event.side == "a" else event.partner_axis
    axis_b = event.own_axis if event.side == "b" else event.partner_axis
    return _conditional_from_table(joint_table(source, axis_a, axis_b), event)


def _marginal(source, event: ConditionalEvent) -> float:
    if isinstance(source, QuantumSystem):
        pa, pb = _system_stations(source)
        label = pa if event.side == "a" else pb
        return born_probability(source, [(label, event.own_axis, event.outcome)])
    fn = source.response_a if event.side == "a" else source.response_b
    idx = 0 if event.outcome is Outcome.UP else 1
    return float(
        sum(
            w * _response(fn, lam, event.own_axis)[idx]
            for lam, w in zip(source.lambdas, source.weights)
        )
    )


def _conditional_from_table(table: np.ndarray, event: ConditionalEvent) -> float:
    own = _OUTCOMES.index(event.outcome)
    if event.partner_outcome is None:
        marg = table.sum(axis=1) if event.side == "a" else table.sum(axis=0)
        return float(marg[own])
    partner = _OUTCOMES.index(event.partner_outcome)
    if event.side == "a":
        joint = float(table[own, partner])
        conditioning = float(table.sum(axis=0)[partner])
    else:
        joint = float(table[partner, own])
        conditioning = float(table.sum(axis=1)[partner])
    if conditioning <= ZERO_TOL or joint <= ZERO_TOL:
        raise UndefinedConditionalError(
            f"conditional of {event.outcome.value} given partner "
            f"{event.partner_outcome.value} is undefined: joint probability "
            f"{joint}, conditioning probability {conditioning}",
            joint_probability=joint,
            conditioning_probability=conditioning,
        )
    return joint / conditioning


def bell_locality_test(source, axis_a: MeasurementAxis, axis_b: MeasurementAxis) -> dict:
    """Does conditioning on the distant outcome leave local outcome
    probabilities unchanged?

    Checks both stations, every outcome pair with support, branch by
    branch for hidden-variable sources. Holds iff the worst gap between
    conditional and unconditional probability is at most 1e-10.
    """
    witnesses = []
    max_gap = 0.0
    for lam, _, table in _branches(source, axis_a, axis_b):
        for side in ("a", "b"):
            own_marg = table.sum(axis=1) if side == "a" else table.sum(axis=0)
            partner_marg = table.sum(axis=0) if side == "a" else table.sum(axis=1)
            for po_idx, po in enumerate(_OUTCOMES):
                if partner_marg[po_idx] <= ZERO_TOL:
                    continue
                for o_idx, o in enumerate(_OUTCOMES):
                    joint = float(table[o_idx, po_idx] if side == "a" else table[po_idx, o_idx])
                    cond = joint / float(partner_marg[po_idx])
                    gap = abs(cond - float(own_marg[o_idx]))
                    max_gap = max(max_gap, gap)
                    if gap > LOCALITY_TOL:
                        witnesses.append(
                            {
                                "branch": str(lam),
                                "side": side,
                                "outcome": o.value,
                                "partner_outcome": po.value,
                                "unconditional": float(own_marg[o_idx]),
                                "conditional": float(cond),
                                "gap": float(gap),
                            }
                        )
    return {
        "test": "bell_locality",
        "settings": {"axis_a": axis_payload(axis_a), "axis_b": axis_payload(axis_b)},
        "holds": max_gap <= LOCALITY_TOL,
        "gap": float(max_gap),
        "witnesses": witnesses,
    }


def factorization_test(source, axis_a: MeasurementAxis, axis_b: MeasurementAxis) -> dict:
    """Does the joint outcome table equal the product of its marginals?

    Branch by branch for hidden-variable sources; the reported gap is
    the worst cellwise |joint - product|.
    """
    witnesses = []
    max_gap = 0.0
    for lam, _, table in _branches(source, axis_a, axis_b):
        marg_a = table.sum(axis=1)
        marg_b = table.sum(axis=0)
        for (i, oa), (j, ob) in itertools.product(enumerate(_OUTCOMES), repeat=2):
            product = float(marg_a[i] * marg_b[j])
            gap = abs(float(table[i, j]) - product)
            max_gap = max(max_gap, gap)
            if gap > LOCALITY_TOL:
                witnesses.append(
                    {
                        "branch": str(lam),
                        "outcome_a": oa.value,
                        "outcome_b": ob.value,
                        "joint": float(table[i, j]),
                        "product": product,
                        "gap": float(gap),
                    }
                )
    return {
        "test": "factorization",
        "settings": {"axis_a": axis_payload(axis_a), "axis_b": axis_payload(axis_b)},
        "holds": max_gap <= LOCALITY_TOL,
        "gap": float(max_gap),
        "witnesses": witnesses,
    }


@dataclass(frozen=True)
class CorrelationTable:
    """Product-of-outcomes expectations E(a, b) per setting pair, with
    optional trial counts and standard errors from sampling."""

    settings: tuple[tuple[MeasurementAxis, MeasurementAxis], ...]
    values: tuple[float, ...]
    counts: tuple[int, ...] | None = None
    stderrs: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "settings", tuple(self.settings))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.counts is not None:
            object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if self.stderrs is not None:
            object.__setattr__(self, "stderrs", tuple(float(s) for s in self.stderrs))
        if len(self.settings) != len(self.values):
            raise ValueError(
                f"{len(self.settings)} settings but {len(self.values)} correlations"
            )
        for field_val, name in ((self.counts, "counts"), (self.stderrs, "stderrs")):
            if field_val is not None and len(field_val) != len(self.settings):
                raise ValueError(f"{name} length does not match settings")
        for e in self.values:
            if not -1.0 - 1e-9 <= e <= 1.0 + 1e-9:
                raise ValueError(f"correlation {e} outside [-1, 1]")

    def value_for(self, axis_a: MeasurementAxis, axis_b: MeasurementAxis) -> float:
        for (sa, sb), e in zip(self.settings, self.values):
            if axes_equal(sa, axis_a) and axes_equal(sb, axis_b):
                return e
        raise ValueError(f"no correlation recorded for setting pair {axis_a}, {axis_b}")


def _distinct_axes(axes: Sequence[MeasurementAxis]) -> list[MeasurementAxis]:
    out: list[MeasurementAxis] = []
    for axis in axes:
        if not any(axes_equal(axis, seen) for seen in out):
            out.append(axis)
    return out


def chsh_value(table: CorrelationTable) -> float:
    """Signed S = E(a,b) - E(a,b') + E(a',b) + E(a',b') from a table
    holding exactly the four setting pairs of two axes per station.

    Primed axes are the second distinct axis per station in table
    order. A missing pair raises.
    """
    a_axes = _distinct_axes([sa for sa, _ in table.settings])
    b_axes = _distinct_axes([sb for _, sb in table.settings])
    if len(a_axes) != 2 or len(b_axes) != 2:
        raise ValueError(
            f"need exactly two distinct axes per station, got {len(a_axes)} and {len(b_axes)}"
        )
    e = {
        (i, j): table.value_for(a, b)
        for i, a in enumerate(a_axes)
        for j, b in enumerate(b_axes)
    }
    return e[(0, 0)] - e[(0, 1)] + e[(1, 0)] + e[(1, 1)]


def chsh_report(table: CorrelationTable) -> dict:
    """JSON-ready CHSH summary: per-setting E and SE, |S| and its sign,
    and the classical/quantum reference values."""
    s = chsh_value(table)
    return {
        "test": "chsh",
        "settings": [
            {"axis_a": axis_payload(sa), "axis_b": axis_payload(sb)}
            for sa, sb in table.settings
        ],
        "E": list(table.values),
        "SE": list(table.stderrs) if table.stderrs is not None else None,
        "counts": list(table.counts) if table.counts is not None else None,
        "S": abs(s),
        "S_signed": s,
        "classical_bound": CLASSICAL_BOUND,
        "quantum_value": QUANTUM_VALUE,
    }


def exact_correlation_table(
    sys: QuantumSystem, setting_pairs: Sequence[tuple[MeasurementAxis, MeasurementAxis]]
) -> CorrelationTable:
    """Exact Born-rule correlations for the given setting pairs."""
    from .quantum import pair_correlation

    pa, pb = _system_stations(sys)
    values = [pair_correlation(sys, (pa, sa), (pb, sb)) for sa, sb in setting_pairs]
    return CorrelationTable(tuple(setting_pairs), tuple(values), None, tuple([0.0] * len(values)))


def estimate_correlations(
    record_pairs: Sequence[tuple[MeasurementRecord, MeasurementRecord]],
) -> CorrelationTable:
    """Empirical correlations from per-trial record pairs, grouped by
    exact setting pair; E is the mean +-1 product, SE = sqrt((1-E^2)/n)."""
    if not record_pairs:
        raise ValueError("at least one record pair is required")
    groups: dict[tuple, list[int]] = {}
    axes_by_key: dict[tuple, tuple[MeasurementAxis, MeasurementAxis]] = {}
    for rec_a, rec_b in record_pairs:
        if rec_a.trial != rec_b.trial:
            raise ValueError(
                f"record pair mixes trials {rec_a.trial} and {rec_b.trial}"
            )
        key = (rec_a.axis.theta, rec_a.axis.phi, rec_b.axis.theta, rec_b.axis.phi)
        groups.setdefault(key, []).append(rec_a.outcome.sign * rec_b.outcome.sign)
        axes_by_key.setdefault(key, (rec_a.axis, rec_b.axis))
    settings, values, counts, stderrs = [], [], [], []
    for key, products in groups.items():
        n = len(products)
        e = float(sum(products)) / n
        settings.append(axes_by_key[key])
        values.append(e)
        counts.append(n)
        stderrs.append(math.sqrt(max(0.0, 1.0 - e * e) / n))
    return CorrelationTable(tuple(settings), tuple(values), tuple(counts), tuple(stderrs))


def pair_records(
    records: Sequence[MeasurementRecord],
) -> list[tuple[MeasurementRecord, MeasurementRecord]]:
    """Group a flat two-station record list into per-trial pairs."""
    by_trial: dict[int, list[MeasurementRecord]] = {}
    for rec in records:
        by_trial.setdefault(rec.trial, []).append(rec)
    pairs = []
    for trial in sorted(by_trial):
        recs = by_trial[trial]
        if len(recs) != 2:
            raise ValueError(f"trial {trial} has {len(recs)} records, expected 2")
        pairs.append((recs[0], recs[1]))
    return pairs


def lhv_brute_force(
    axes_a: tuple[MeasurementAxis, MeasurementAxis],
    axes_b: tuple[MeasurementAxis, MeasurementAxis],
    n_mixtures: int = 0,
    seed: int | None = None,
) -> dict:
    """Exhaust all 16 deterministic local strategies for a CHSH setting
    and report the best |S|.

    A strategy fixes a +-1 answer per local setting; E(a_i, b_j) is then
    the product of the two answers. Optionally also samples random convex
    mixtures of the strategies, whose S is the same convex mixture of
    strategy values and so can never beat the deterministic maximum.
    """
    setting_pairs = [(sa, sb) for sa in axes_a for sb in axes_b]
    strategies = []
    best = None
    s_values = []
    for signs_a in itertools.product((1, -1), repeat=2):
        for signs_b in itertools.product((1, -1), repeat=2):
            values = [
                float(signs_a[axes_a.index(sa)] * signs_b[axes_b.index(sb)])
                for sa, sb in setting_pairs
            ]
            s = chsh_value(CorrelationTable(tuple(setting_pairs), tuple(values)))
            entry = {"a": list(signs_a), "b": list(signs_b), "S": s}
            strategies.append(entry)
            s_values.append(s)
            if best is None or abs(s) > abs(best["S"]):
                best = entry
    result = {
        "settings": [
            {"axis_a": axis_payload(sa), "axis_b": axis_payload(sb)}
            for sa, sb in setting_pairs
        ],
        "strategies": strategies,
        "max_abs_S": abs(best["S"]),
        "best_strategy": best,
        "quantum_value": QUANTUM_VALUE,
        "gap_to_quantum": QUANTUM_VALUE - abs(best["S"]),
        "mixture_max_abs_S": None,
    }
    if n_mixtures > 0:
        rng = np.random.default_rng(seed)
        mix_max = 0.0
        for _ in range(n_mixtures):
            w = rng.random(len(s_values))
            w /= w.sum()
            mix_max = max(mix_max, abs(float(np.dot(w, s_values))))
        result["mixture_max_abs_S"] = mix_max
    return result
