import math

import numpy as np
import pytest

from conftest import random_axis
from eprsim import (
    EventError,
    LabelError,
    MeasurementAxis,
    Outcome,
    QuantumSystem,
    StateError,
    SubsystemLayout,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    angle_between,
    axes_equal,
    axis_ket,
    born_probability,
    make_singlet,
    outcome_distribution,
    pair_correlation,
    projector,
    spin_operator,
)

SINGLET_VECTOR = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)


def test_outcome_signs_and_opposites():
    assert Outcome.UP.sign == 1
    assert Outcome.DOWN.sign == -1
    assert Outcome.UP.opposite is Outcome.DOWN
    assert Outcome.from_name("Up") is Outcome.UP
    with pytest.raises(ValueError):
        Outcome.from_name("sideways")


def test_axis_validation():
    with pytest.raises(ValueError):
        MeasurementAxis(-0.1, 0.0)
    with pytest.raises(ValueError):
        MeasurementAxis(math.pi + 0.1, 0.0)
    with pytest.raises(ValueError):
        MeasurementAxis(1.0, 7.0)
    with pytest.raises(ValueError):
        MeasurementAxis.from_vector([0.0, 0.0, 0.0])


def test_axis_constructors_agree():
    axis = MeasurementAxis.from_degrees(90.0, 270.0)
    assert axis.theta == pytest.approx(math.pi / 2)
    assert axis.phi == pytest.approx(3 * math.pi / 2)
    rng = np.random.default_rng(21)
    for _ in range(50):
        v = rng.normal(size=3)
        axis = MeasurementAxis.from_vector(v)
        assert np.allclose(axis.unit_vector, v / np.linalg.norm(v), atol=1e-12)


def test_angle_between_and_equality():
    assert angle_between(Z_AXIS, X_AXIS) == pytest.approx(math.pi / 2)
    assert axes_equal(Z_AXIS, MeasurementAxis(0.0, 1.0))
    assert not axes_equal(Z_AXIS, X_AXIS)


def test_axis_kets_are_spin_eigenvectors():
    rng = np.random.default_rng(22)
    for _ in range(50):
        axis = random_axis(rng)
        s = spin_operator(axis)
        up = axis_ket(axis, Outcome.UP)
        down = axis_ket(axis, Outcome.DOWN)
        assert np.allclose(s @ up, 0.5 * up, atol=1e-12)
        assert np.allclose(s @ down, -0.5 * down, atol=1e-12)
        assert abs(np.vdot(up, down)) < 1e-12


def test_z_axis_kets_are_computational_basis():
    assert np.allclose(axis_ket(Z_AXIS, Outcome.UP), [1, 0], atol=1e-15)
    assert np.allclose(axis_ket(Z_AXIS, Outcome.DOWN), [0, 1], atol=1e-15)


def test_projectors_complete_and_orthogonal():
    rng = np.random.default_rng(23)
    for _ in range(20):
        axis = random_axis(rng)
        p_up = projector(axis, Outcome.UP)
        p_down = projector(axis, Outcome.DOWN)
        assert np.allclose(p_up + p_down, np.eye(2), atol=1e-12)
        assert np.allclose(p_up @ p_down, 0.0, atol=1e-12)
        assert np.allclose(p_up @ p_up, p_up, atol=1e-12)


def test_singlet_vector_in_z_basis():
    s = make_singlet()
    assert np.allclose(s.state, SINGLET_VECTOR, atol=1e-15)
    assert s.layout.labels == ("alpha", "beta")
    assert s.is_pure


def test_singlet_reference_axis_is_global_phase():
    rng = np.random.default_rng(24)
    base = make_singlet()
    for _ in range(20):
        axis = random_axis(rng)
        rotated = make_singlet(reference_axis=axis)
        overlap = abs(np.vdot(base.state, rotated.state))
        assert overlap == pytest.approx(1.0, abs=1e-12)


def test_singlet_anti_correlated_along_every_axis():
    rng = np.random.default_rng(25)
    s = make_singlet()
    for _ in range(25):
        axis = random_axis(rng)
        e = pair_correlation(s, ("alpha", axis), ("beta", axis))
        assert e == pytest.approx(-1.0, abs=1e-10)


def test_singlet_correlation_is_minus_cosine():
    rng = np.random.default_rng(26)
    s = make_singlet()
    for _ in range(40):
        a, b = random_axis(rng), random_axis(rng)
        e = pair_correlation(s, ("alpha", a), ("beta", b))
        assert e == pytest.approx(-math.cos(angle_between(a, b)), abs=1e-9)


def test_born_marginal_is_half_for_singlet():
    rng = np.random.default_rng(27)
    s = make_singlet()
    for _ in range(30):
        axis = random_axis(rng)
        p = born_probability(s, [("alpha", axis, Outcome.UP)])
        assert p == pytest.approx(0.5, abs=1e-12)


def test_born_joint_z_up_x_up_quarter():
    s = make_singlet()
    p = born_probability(s, [("alpha", Z_AXIS, Outcome.UP), ("beta", X_AXIS, Outcome.UP)])
    assert p == pytest.approx(0.25, abs=1e-12)


def test_born_probability_density_matches_pure():
    rng = np.random.default_rng(28)
    s = make_singlet()
    mixed = QuantumSystem(s.layout, s.density())
    for _ in range(10):
        a, b = random_axis(rng), random_axis(rng)
        events = [("alpha", a, Outcome.UP), ("beta", b, Outcome.DOWN)]
        assert born_probability(s, events) == pytest.approx(
            born_probability(mixed, events), abs=1e-12
        )


def test_born_probability_errors():
    s = make_singlet()
    with pytest.raises(EventError):
        born_probability(
            s, [("alpha", Z_AXIS, Outcome.UP), ("alpha", X_AXIS, Outcome.DOWN)]
        )
    with pytest.raises(LabelError):
        born_probability(s, [("gamma", Z_AXIS, Outcome.UP)])


def test_outcome_distribution_orders_cells_and_sums_to_one():
    s = make_singlet()
    dist = outcome_distribution(s, [("alpha", Z_AXIS), ("beta", Z_AXIS)])
    cells = list(dist.keys())
    assert cells == [
        (Outcome.UP, Outcome.UP),
        (Outcome.UP, Outcome.DOWN),
        (Outcome.DOWN, Outcome.UP),
        (Outcome.DOWN, Outcome.DOWN),
    ]
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    assert dist[(Outcome.UP, Outcome.DOWN)] == pytest.approx(0.5, abs=1e-12)
    assert dist[(Outcome.UP, Outcome.UP)] == pytest.approx(0.0, abs=1e-12)


def test_product_state_equal_outcome_probability_law():
    # Anti-correlated product along z, both stations measured at angle
    # gamma from z: equal outcomes occur with probability sin^2(gamma)/2.
    layout = SubsystemLayout.of(("alpha", 2), ("beta", 2))
    vec = np.kron(axis_ket(Z_AXIS, Outcome.UP), axis_ket(Z_AXIS, Outcome.DOWN))
    product = QuantumSystem(layout, vec)
    for gamma_deg in (0.0, 30.0, 45.0, 90.0, 120.0):
        axis = MeasurementAxis.from_degrees(gamma_deg)
        p_equal = sum(
            born_probability(product, [("alpha", axis, o), ("beta", axis, o)])
            for o in (Outcome.UP, Outcome.DOWN)
        )
        gamma = math.radians(gamma_deg)
        assert p_equal == pytest.approx(math.sin(gamma) ** 2 / 2.0, abs=1e-12)


def test_quantum_system_validation():
    layout = SubsystemLayout.of(("a", 2), ("b", 2))
    with pytest.raises(StateError):
        QuantumSystem(layout, np.array([1.0, 0.0, 0.0]))
    with pytest.raises(StateError):
        QuantumSystem(layout, np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(StateError):
        QuantumSystem(layout, np.eye(4, dtype=complex))
    with pytest.raises(StateError):
        QuantumSystem(layout, np.zeros((4, 4, 4), dtype=complex))


def test_quantum_system_state_is_readonly():
    s = make_singlet()
    with pytest.raises(ValueError):
        s.state[0] = 1.0


def test_particle_labels_filters_spin_factors():
    layout = SubsystemLayout.of(("alpha", 2), ("A", 3), ("beta", 2))
    dim = 2 * 3 * 2
    vec = np.zeros(dim, dtype=complex)
    vec[0] = 1.0
    sys = QuantumSystem(layout, vec)
    assert sys.particle_labels() == ("alpha", "beta")


def test_y_axis_constant():
    assert np.allclose(Y_AXIS.unit_vector, [0.0, 1.0, 0.0], atol=1e-12)
