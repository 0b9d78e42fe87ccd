import numpy as np
import pytest

from covsys.algebra import Automorphism, make_function_algebra, make_matrix_algebra
from covsys.errors import InputError
from covsys.groups import (
    FiniteGroup,
    GalileiElement,
    galilei_compose,
    random_galilei,
    random_rotation,
    rotation_about,
)
from covsys.multipliers import (
    Action,
    MultiplierTable,
    galilei_cocycle,
    heisenberg_multiplier,
    left_to_right,
    pair_index,
    right_to_left,
    spin_cocycle,
    trivial_multiplier,
    validate_left,
    validate_right,
)


def corrupt(table: MultiplierTable, x, y) -> MultiplierTable:
    vals = np.array(table.values)
    vals[x, y] = -vals[x, y]
    return table.with_values(vals)


def test_trivial_multiplier_passes():
    g = FiniteGroup.cyclic(4)
    alg = make_function_algebra([0, 1])
    action = Action.trivial(g, alg)
    xi = trivial_multiplier(g, action, "left")
    report = validate_left(xi)
    assert report.passed and report.max_residual == 0.0


def test_heisenberg_exponent_identity_integer_oracle():
    # the cocycle identity in exponents, checked exhaustively in exact
    # integer arithmetic, independent of the library path
    n = 3
    for ax in range(n):
        for bx in range(n):
            for ay in range(n):
                for by in range(n):
                    for az in range(n):
                        for bz in range(n):
                            lhs = ay * bz
                            rhs = ax * by + (ax + ay) * bz - ax * (by + bz)
                            assert (lhs - rhs) % n == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_heisenberg_validates_exact(n):
    _, xi = heisenberg_multiplier(n)
    report = validate_left(xi)
    assert report.passed
    assert report.mode == "exact-phase"
    assert report.max_residual == 0.0
    assert report.exhaustive


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_heisenberg_both_paths_agree(n):
    _, xi = heisenberg_multiplier(n)
    exact = validate_left(xi)
    numeric = validate_left(xi.with_values(xi.values))
    assert numeric.mode == "numeric" and numeric.exhaustive
    assert exact.passed == numeric.passed is True
    assert numeric.max_residual < 1e-12


def test_corrupted_table_fails_with_witness():
    g, xi = heisenberg_multiplier(3)
    bad = corrupt(xi, pair_index(3, 1, 1), pair_index(3, 2, 0))
    report = validate_left(bad)
    assert not report.passed
    cocycle = report.check("cocycle")
    assert not cocycle.passed
    x, y, z = cocycle.witness
    # the witness triple really violates the identity
    lhs = bad.action.apply(x, bad.values[y, z])
    rhs = (bad.values[x, y]
           @ bad.values[g.mul(x, y), z]
           @ bad.values[x, g.mul(y, z)].conj().T)
    assert np.max(np.abs(lhs - rhs)) > 0.5


def test_unitarity_flagged_not_raised():
    _, xi = heisenberg_multiplier(2)
    vals = np.array(xi.values)
    vals[1, 1] *= 2.0  # non-unitary entry
    report = validate_left(xi.with_values(vals))
    assert not report.check("unitarity").passed


def test_validate_right_on_converted_heisenberg():
    _, xi = heisenberg_multiplier(3)
    zeta = left_to_right(xi)
    report = validate_right(zeta)
    assert report.passed and report.max_residual == 0.0
    numeric = validate_right(zeta.with_values(zeta.values))
    assert numeric.passed and numeric.max_residual < 1e-12


def test_right_with_wrong_twist_fails():
    # swap action on two points twists the identities; a multiplier that was
    # valid for the trivial action must now fail
    g = FiniteGroup.cyclic(2)
    alg = make_function_algebra([0, 1])
    action = Action.from_permutations(g, alg, [[0, 1], [1, 0]])
    vals = np.broadcast_to(np.eye(2, dtype=complex), (2, 2, 2, 2)).copy()
    vals[1, 1] = np.diag([1.0, -1.0])   # not fixed by the swap
    zeta = MultiplierTable("right", g, action, vals)
    assert not validate_right(zeta).passed


def test_left_to_right_and_back():
    _, xi = heisenberg_multiplier(4)
    assert np.array_equal(right_to_left(left_to_right(xi)).values, xi.values)


def test_left_to_right_trivial_action_pointwise():
    _, xi = heisenberg_multiplier(3)
    zeta = left_to_right(xi)
    assert np.array_equal(zeta.values, xi.values)


def test_roundtrip_with_swap_action_exact():
    # +-1-valued multiplier over the swap system: conversion is an exact
    # gather, so the round trip is bitwise
    g = FiniteGroup.cyclic(2)
    alg = make_function_algebra([0, 1])
    action = Action.from_permutations(g, alg, [[0, 1], [1, 0]])
    vals = np.broadcast_to(np.eye(2, dtype=complex), (2, 2, 2, 2)).copy()
    vals[1, 1] = -np.eye(2)
    xi = MultiplierTable("left", g, action, vals)
    back = right_to_left(left_to_right(xi))
    assert np.array_equal(back.values, xi.values)


def test_operator_valued_multiplier_validates(rng):
    # sigma_1 = Ad(u) with u^2 not central: xi(1,1) = u^2 makes a genuinely
    # operator-valued left multiplier on Z_2
    g = FiniteGroup.cyclic(2)
    alg = make_matrix_algebra(3)
    z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    q, r = np.linalg.qr(z)
    u = q * (np.diag(r) / np.abs(np.diag(r)))
    action = Action(g, alg, [Automorphism.identity(alg), Automorphism.from_unitary(alg, u)])
    vals = np.broadcast_to(np.eye(3, dtype=complex), (2, 2, 3, 3)).copy()
    vals[1, 1] = u @ u
    xi = MultiplierTable("left", g, action, vals)
    report = validate_left(xi)
    assert report.passed, report.to_dict()
    zeta = left_to_right(xi)
    assert validate_right(zeta).passed
    back = right_to_left(zeta)
    assert np.max(np.abs(back.values - xi.values)) < 1e-12


def test_phase_index_consistency_enforced():
    g, xi = heisenberg_multiplier(3)
    vals = np.array(xi.values)
    vals[1, 2] = -vals[1, 2]
    with pytest.raises(InputError):
        MultiplierTable("left", g, xi.action, vals,
                        phase_order=3, phase_index=xi.phase_index)


# ---------------------------------------------------------------------------
# Galilei mass cocycle


def test_galilei_cocycle_normalization(rng):
    e = GalileiElement.identity()
    for _ in range(20):
        x = random_galilei(rng)
        assert galilei_cocycle(1.0, x, e) == 1.0
        assert galilei_cocycle(1.0, e, x) == 1.0


def test_galilei_cocycle_kappa_zero(rng):
    for _ in range(20):
        x, y = random_galilei(rng), random_galilei(rng)
        assert galilei_cocycle(0.0, x, y) == 1.0


def test_galilei_cocycle_identity(rng):
    worst = 0.0
    for _ in range(100):
        x, y, z = (random_galilei(rng) for _ in range(3))
        lhs = galilei_cocycle(1.0, x, y) * galilei_cocycle(1.0, galilei_compose(x, y), z)
        rhs = galilei_cocycle(1.0, y, z) * galilei_cocycle(1.0, x, galilei_compose(y, z))
        worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-12


def test_galilei_cocycle_pure_shifts_exactly_one(rng):
    for _ in range(50):
        a = GalileiElement(rng.standard_normal(3), np.eye(3), 0.0, np.zeros(3))
        b = GalileiElement(rng.standard_normal(3), np.eye(3), 0.0, np.zeros(3))
        assert galilei_cocycle(1.0, a, b) == 1.0


# ---------------------------------------------------------------------------
# spin sign


def test_spin_cocycle_identity_element(rng):
    eye = np.eye(3)
    for _ in range(10):
        rot = random_rotation(rng)
        assert spin_cocycle(rot, eye) == 1.0
        assert spin_cocycle(eye, rot) == 1.0


def test_spin_cocycle_two_pi_rotations():
    # (-i sigma_z)^2 = -1 while the section of the identity is +1
    rot = rotation_about([0, 0, 1], np.pi)
    assert spin_cocycle(rot, rot) == -1.0


def test_spin_cocycle_values_and_consistency(rng):
    from covsys.groups import so3_section

    for _ in range(200):
        r1, r2 = random_rotation(rng), random_rotation(rng)
        sign = spin_cocycle(r1, r2)
        assert sign in (1.0, -1.0)
        resid = np.max(np.abs(so3_section(r1) @ so3_section(r2)
                              - sign * so3_section(r1 @ r2)))
        assert resid < 1e-10


def test_section_product_sign_is_section_independent(rng):
    # v(R1)v(R2)v(R1R2)^-1 = +-1 regardless of which lifts are chosen
    from covsys.groups import so3_section

    for _ in range(50):
        r1, r2 = random_rotation(rng), random_rotation(rng)
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                prod = (s1 * so3_section(r1)) @ (s2 * so3_section(r2))
                ratio = prod @ np.linalg.inv(so3_section(r1 @ r2))
                off = ratio - np.trace(ratio) / 2.0 * np.eye(2)
                assert np.max(np.abs(off)) < 1e-9
                assert abs(abs(np.trace(ratio) / 2.0) - 1.0) < 1e-9


def test_validate_left_with_explicit_sample():
    g, xi = heisenberg_multiplier(3)
    sample = [(1, 2, 3), (4, 5, 6), (0, 0, 0), (8, 8, 8)]
    report = validate_left(xi.with_values(xi.values), sample=sample)
    assert report.mode == "numeric"
    assert not report.exhaustive
    assert report.passed


def test_validate_left_empty_sample_rejected():
    _, xi = heisenberg_multiplier(3)
    with pytest.raises(InputError):
        validate_left(xi.with_values(xi.values), sample=[])
