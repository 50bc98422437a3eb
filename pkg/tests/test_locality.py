import math

import numpy as np
import pytest

from conftest import random_axis
from eprsim import (
    CorrelationTable,
    ConditionalEvent,
    EventError,
    HiddenVariableModel,
    MeasurementAxis,
    MeasurementRecord,
    Outcome,
    PointerDevice,
    QuantumSystem,
    UndefinedConditionalError,
    X_AXIS,
    Z_AXIS,
    attach_device,
    axis_ket,
    bell_locality_test,
    chsh_report,
    chsh_value,
    conditional_probability,
    estimate_correlations,
    exact_correlation_table,
    factorization_test,
    joint_table,
    lhv_brute_force,
    make_singlet,
    pair_records,
    sample_outcomes,
)

UP, DOWN = Outcome.UP, Outcome.DOWN


def product_pair(axis_a, outcome_a, axis_b, outcome_b):
    state = np.kron(axis_ket(axis_a, outcome_a), axis_ket(axis_b, outcome_b))
    return QuantumSystem(make_singlet().layout, state)

CHSH_A = (Z_AXIS, MeasurementAxis(math.pi / 2, 0.0))
CHSH_B = (MeasurementAxis(math.pi / 4, 0.0), MeasurementAxis(3 * math.pi / 4, 0.0))


def random_model(rng, axes):
    """Random stochastic local model answering only the given axes."""
    n = int(rng.integers(1, 4))
    lambdas = tuple(range(n))
    weights = rng.random(n)
    weights /= weights.sum()
    prob_a = {(lam, ax): float(rng.random()) for lam in lambdas for ax in axes}
    prob_b = {(lam, ax): float(rng.random()) for lam in lambdas for ax in axes}

    def respond(table):
        return lambda lam, axis: (table[(lam, axis)], 1.0 - table[(lam, axis)])

    return HiddenVariableModel(lambdas, tuple(weights), respond(prob_a), respond(prob_b))


def test_marginal_conditional_is_one_half_any_axis():
    singlet = make_singlet()
    rng = np.random.default_rng(50)
    for _ in range(10):
        axis = random_axis(rng)
        for side in ("a", "b"):
            p = conditional_probability(singlet, ConditionalEvent(side, UP, axis))
            assert p == pytest.approx(0.5, abs=1e-12)


def test_opposite_partner_outcome_pins_conditional_to_one():
    singlet = make_singlet()
    event = ConditionalEvent("a", UP, Z_AXIS, partner_axis=Z_AXIS, partner_outcome=DOWN)
    assert conditional_probability(singlet, event) == pytest.approx(1.0, abs=1e-12)
    event_b = ConditionalEvent("b", UP, Z_AXIS, partner_axis=Z_AXIS, partner_outcome=DOWN)
    assert conditional_probability(singlet, event_b) == pytest.approx(1.0, abs=1e-12)


def test_equal_partner_outcome_conditional_is_undefined():
    singlet = make_singlet()
    event = ConditionalEvent("a", UP, Z_AXIS, partner_axis=Z_AXIS, partner_outcome=UP)
    with pytest.raises(UndefinedConditionalError) as exc:
        conditional_probability(singlet, event)
    assert abs(exc.value.joint_probability) <= 1e-12
    assert exc.value.conditioning_probability == pytest.approx(0.5, abs=1e-10)


def test_perpendicular_conditional_equals_marginal():
    singlet = make_singlet()
    event = ConditionalEvent("a", UP, Z_AXIS, partner_axis=X_AXIS, partner_outcome=UP)
    assert conditional_probability(singlet, event) == pytest.approx(0.5, abs=1e-10)


def test_partner_outcome_requires_partner_axis():
    with pytest.raises(EventError):
        ConditionalEvent("a", UP, Z_AXIS, partner_outcome=UP)
    with pytest.raises(EventError):
        ConditionalEvent("c", UP, Z_AXIS)


def test_conditionals_see_through_attached_devices():
    sys = attach_device(make_singlet(), "alpha", PointerDevice("A"))
    event = ConditionalEvent("a", UP, Z_AXIS, partner_axis=Z_AXIS, partner_outcome=DOWN)
    assert conditional_probability(sys, event) == pytest.approx(1.0, abs=1e-12)


def test_joint_table_matches_half_angle_law():
    singlet = make_singlet()
    gamma = 1.1
    table = joint_table(singlet, Z_AXIS, MeasurementAxis(gamma, 0.0))
    same = math.sin(gamma / 2.0) ** 2 / 2.0
    diff = math.cos(gamma / 2.0) ** 2 / 2.0
    expected = np.array([[same, diff], [diff, same]])
    assert np.max(np.abs(table - expected)) < 1e-12


def test_bell_locality_holds_at_perpendicular_axes():
    result = bell_locality_test(make_singlet(), Z_AXIS, X_AXIS)
    assert result["holds"]
    assert result["gap"] <= 1e-10
    assert result["witnesses"] == []


def test_bell_locality_fails_at_shared_axis_with_half_gap():
    result = bell_locality_test(make_singlet(), Z_AXIS, Z_AXIS)
    assert not result["holds"]
    assert result["gap"] == pytest.approx(0.5, abs=1e-12)
    assert result["witnesses"]
    worst = max(result["witnesses"], key=lambda w: w["gap"])
    assert worst["unconditional"] == pytest.approx(0.5, abs=1e-12)
    assert worst["conditional"] in (pytest.approx(0.0, abs=1e-12), pytest.approx(1.0, abs=1e-12))


def test_bell_locality_holds_for_product_state():
    pair = product_pair(Z_AXIS, UP, Z_AXIS, UP)
    for axis_b in (Z_AXIS, X_AXIS, MeasurementAxis(0.7, 1.2)):
        result = bell_locality_test(pair, Z_AXIS, axis_b)
        assert result["holds"], result


def test_factorization_fails_for_singlet_except_special_angles():
    singlet = make_singlet()
    shared = factorization_test(singlet, Z_AXIS, Z_AXIS)
    assert not shared["holds"]
    assert shared["gap"] == pytest.approx(0.25, abs=1e-12)
    generic = factorization_test(singlet, Z_AXIS, MeasurementAxis(math.pi / 3, 0.0))
    assert not generic["holds"]
    assert generic["gap"] == pytest.approx(0.125, abs=1e-12)
    perpendicular = factorization_test(singlet, Z_AXIS, X_AXIS)
    assert perpendicular["holds"]


def test_factorization_holds_for_product_state():
    pair = product_pair(Z_AXIS, UP, X_AXIS, DOWN)
    rng = np.random.default_rng(51)
    for _ in range(10):
        result = factorization_test(pair, random_axis(rng), random_axis(rng))
        assert result["holds"], result


def test_shared_axis_breaks_both_criteria_together():
    singlet = make_singlet()
    assert not bell_locality_test(singlet, Z_AXIS, Z_AXIS)["holds"]
    assert not factorization_test(singlet, Z_AXIS, Z_AXIS)["holds"]


def test_random_local_models_satisfy_both_criteria():
    rng = np.random.default_rng(52)
    for _ in range(20):
        axes = (random_axis(rng), random_axis(rng))
        model = random_model(rng, axes)
        bell = bell_locality_test(model, axes[0], axes[1])
        fact = factorization_test(model, axes[0], axes[1])
        assert bell["holds"], bell
        assert fact["holds"], fact


def test_deterministic_model_conditionals_and_branches():
    model = HiddenVariableModel.deterministic(
        [(Z_AXIS, +1), (X_AXIS, -1)], [(Z_AXIS, -1), (X_AXIS, +1)]
    )
    assert conditional_probability(model, ConditionalEvent("a", UP, Z_AXIS)) == 1.0
    assert conditional_probability(model, ConditionalEvent("b", UP, X_AXIS)) == 1.0
    pinned = ConditionalEvent(
        "a", UP, Z_AXIS, partner_axis=Z_AXIS, partner_outcome=DOWN, hidden_value=0
    )
    assert conditional_probability(model, pinned) == 1.0
    undefined = ConditionalEvent(
        "a", UP, Z_AXIS, partner_axis=Z_AXIS, partner_outcome=UP, hidden_value=0
    )
    with pytest.raises(UndefinedConditionalError):
        conditional_probability(model, undefined)
    with pytest.raises(ValueError):
        conditional_probability(
            model, ConditionalEvent("a", UP, Z_AXIS, hidden_value="missing")
        )


def test_hidden_value_selects_branch():
    model = HiddenVariableModel(
        ("plus", "minus"),
        (0.25, 0.75),
        lambda lam, axis: (1.0, 0.0) if lam == "plus" else (0.0, 1.0),
        lambda lam, axis: (1.0, 0.0) if lam == "plus" else (0.0, 1.0),
    )
    branch = ConditionalEvent("a", UP, Z_AXIS, hidden_value="plus")
    assert conditional_probability(model, branch) == 1.0
    averaged = ConditionalEvent("a", UP, Z_AXIS)
    assert conditional_probability(model, averaged) == pytest.approx(0.25, abs=1e-12)


def test_model_validation():
    flat = lambda lam, axis: (0.5, 0.5)
    with pytest.raises(ValueError):
        HiddenVariableModel((0, 1), (0.5,), flat, flat)
    with pytest.raises(ValueError):
        HiddenVariableModel((), (), flat, flat)
    with pytest.raises(ValueError):
        HiddenVariableModel((0,), (0.7,), flat, flat)
    with pytest.raises(ValueError):
        HiddenVariableModel((0, 1), (1.5, -0.5), flat, flat)
    broken = HiddenVariableModel((0,), (1.0,), lambda lam, axis: (0.9, 0.9), flat)
    with pytest.raises(ValueError):
        joint_table(broken, Z_AXIS, Z_AXIS)


def test_chsh_value_canonical_angles():
    table = exact_correlation_table(
        make_singlet(), [(sa, sb) for sa in CHSH_A for sb in CHSH_B]
    )
    s = chsh_value(table)
    assert s == pytest.approx(-2.0 * math.sqrt(2.0), abs=1e-9)
    report = chsh_report(table)
    assert report["S"] == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-9)
    assert report["S_signed"] == pytest.approx(s, abs=1e-15)
    assert report["classical_bound"] == 2.0
    assert len(report["E"]) == 4


def test_chsh_value_requires_all_four_pairs():
    pairs = [(sa, sb) for sa in CHSH_A for sb in CHSH_B]
    table = exact_correlation_table(make_singlet(), pairs[:3])
    with pytest.raises(ValueError):
        chsh_value(table)
    single_axis = exact_correlation_table(make_singlet(), [(Z_AXIS, sb) for sb in CHSH_B])
    with pytest.raises(ValueError):
        chsh_value(single_axis)


def test_chsh_value_zero_for_uncorrelated_table():
    pairs = tuple((sa, sb) for sa in CHSH_A for sb in CHSH_B)
    table = CorrelationTable(pairs, (0.0, 0.0, 0.0, 0.0))
    assert chsh_value(table) == 0.0


def test_correlation_table_validation():
    pairs = ((Z_AXIS, Z_AXIS),)
    with pytest.raises(ValueError):
        CorrelationTable(pairs, (0.0, 1.0))
    with pytest.raises(ValueError):
        CorrelationTable(pairs, (1.5,))
    with pytest.raises(ValueError):
        CorrelationTable(pairs, (0.0,), counts=(1, 2))
    table = CorrelationTable(pairs, (-1.0,))
    with pytest.raises(ValueError):
        table.value_for(Z_AXIS, X_AXIS)


def test_lhv_brute_force_caps_at_classical_bound():
    result = lhv_brute_force(CHSH_A, CHSH_B)
    assert len(result["strategies"]) == 16
    assert result["max_abs_S"] == 2.0
    assert all(abs(s["S"]) <= 2.0 for s in result["strategies"])
    assert result["best_strategy"]["S"] in (2.0, -2.0)
    assert result["gap_to_quantum"] == pytest.approx(2.0 * math.sqrt(2.0) - 2.0, abs=1e-12)
    assert result["mixture_max_abs_S"] is None
    all_plus = next(
        s for s in result["strategies"] if s["a"] == [1, 1] and s["b"] == [1, 1]
    )
    assert all_plus["S"] == 2.0


def test_lhv_mixtures_stay_under_bound():
    result = lhv_brute_force(CHSH_A, CHSH_B, n_mixtures=200, seed=9)
    assert result["mixture_max_abs_S"] <= 2.0 + 1e-12
    again = lhv_brute_force(CHSH_A, CHSH_B, n_mixtures=200, seed=9)
    assert again["mixture_max_abs_S"] == result["mixture_max_abs_S"]


def test_estimate_correlations_arithmetic():
    def pair(trial, axis_b, out_a, out_b):
        return (
            MeasurementRecord("Alice", Z_AXIS, out_a, trial, 1),
            MeasurementRecord("Bob", axis_b, out_b, trial, 1),
        )

    pairs = [
        pair(0, Z_AXIS, UP, UP),
        pair(1, Z_AXIS, UP, DOWN),
        pair(2, Z_AXIS, DOWN, UP),
        pair(3, Z_AXIS, DOWN, DOWN),
        pair(4, X_AXIS, UP, DOWN),
        pair(5, X_AXIS, DOWN, UP),
    ]
    table = estimate_correlations(pairs)
    assert table.value_for(Z_AXIS, Z_AXIS) == 0.0
    assert table.value_for(Z_AXIS, X_AXIS) == -1.0
    by_setting = dict(zip(table.settings, zip(table.counts, table.stderrs)))
    assert by_setting[(Z_AXIS, Z_AXIS)] == (4, 0.5)
    assert by_setting[(Z_AXIS, X_AXIS)] == (2, 0.0)


def test_estimated_shared_axis_correlation_is_exactly_minus_one():
    pre = attach_device(
        attach_device(make_singlet(), "alpha", PointerDevice("A")),
        "beta",
        PointerDevice("B"),
    )
    records = sample_outcomes(
        pre,
        [("Alice", "alpha", "A", Z_AXIS), ("Bob", "beta", "B", Z_AXIS)],
        n_trials=500,
        seed=77,
    )
    table = estimate_correlations(pair_records(records))
    assert table.values == (-1.0,)
    assert table.stderrs == (0.0,)
    assert table.counts == (500,)


def test_estimate_correlations_rejects_bad_input():
    with pytest.raises(ValueError):
        estimate_correlations([])
    mismatched = (
        MeasurementRecord("Alice", Z_AXIS, UP, 0, 1),
        MeasurementRecord("Bob", Z_AXIS, DOWN, 1, 1),
    )
    with pytest.raises(ValueError):
        estimate_correlations([mismatched])


def test_pair_records_requires_two_per_trial():
    lone = [MeasurementRecord("Alice", Z_AXIS, UP, 0, 1)]
    with pytest.raises(ValueError):
        pair_records(lone)
