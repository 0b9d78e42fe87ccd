import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covsys.errors import ConstructionError, InputError
from covsys.groups import (
    FiniteGroup,
    GalileiElement,
    PAULI,
    finite_group,
    galilei_compose,
    product_cyclic,
    random_galilei,
    random_rotation,
    random_su2,
    rotation_about,
    so3_section,
    su2_to_so3,
)


def test_z2_table():
    g = finite_group([[0, 1], [1, 0]])
    assert g.order == 2
    assert g.identity == 0
    assert g.inv(1) == 1


def test_z3xz3_product():
    g = product_cyclic(3, 3)
    assert g.order == 9
    # (1,0)*(0,1) = (1,1): indices 3, 1 -> 4
    assert g.mul(3, 1) == 4


def test_group_axioms_exhaustive_small():
    for g in (FiniteGroup.cyclic(5), product_cyclic(2, 3), product_cyclic(4, 4)):
        n = g.order
        t = g.table
        for x in range(n):
            assert t[x, g.inv(x)] == g.identity
            assert t[g.inv(x), x] == g.identity
            for y in range(n):
                for z in range(n):
                    assert t[t[x, y], z] == t[x, t[y, z]]


def test_non_associative_latin_square_rejected():
    # a loop: Latin square with two-sided identity and two-sided inverses,
    # found by brute force to violate associativity
    table = [[0, 1, 2, 3, 4],
             [1, 0, 3, 4, 2],
             [2, 4, 0, 1, 3],
             [3, 2, 4, 0, 1],
             [4, 3, 1, 2, 0]]
    lhs = np.asarray(table)
    violated = any(lhs[lhs[x, y], z] != lhs[x, lhs[y, z]]
                   for x in range(5) for y in range(5) for z in range(5))
    assert violated
    with pytest.raises(ConstructionError) as err:
        finite_group(table)
    assert err.value.reason == "associativity"
    assert err.value.witness is not None


def test_missing_identity_rejected():
    with pytest.raises(ConstructionError) as err:
        finite_group([[1, 1], [1, 1]])
    assert err.value.reason == "identity"


def test_missing_inverse_rejected():
    # identity is 0; 1*2 = 0 but 2*1 = 1, so 1 has no two-sided inverse
    table = [[0, 1, 2], [1, 2, 0], [2, 1, 0]]
    with pytest.raises(ConstructionError) as err:
        finite_group(table)
    assert err.value.reason == "inverse"


def test_galilei_identity_and_shifts():
    e = GalileiElement.identity()
    x = GalileiElement([1.0, 2.0, 3.0], rotation_about([0, 0, 1], 0.3), 1.5, [0.1, 0.0, -0.2])
    xe = galilei_compose(x, e)
    assert np.allclose(xe.q, x.q) and np.allclose(xe.rot, x.rot)
    assert xe.t == x.t and np.allclose(xe.v, x.v)
    a = GalileiElement([1.0, 0.0, 0.0], np.eye(3), 0.0, np.zeros(3))
    b = GalileiElement([0.0, 2.0, 0.0], np.eye(3), 0.0, np.zeros(3))
    assert np.allclose(galilei_compose(a, b).q, [1.0, 2.0, 0.0])


def test_galilei_boost_acting_on_shift():
    # hand evaluation: (0,I,1,v') * (q,I,0,0) = (q, I, 1, v')
    v = np.array([0.3, -0.4, 0.5])
    q = np.array([1.0, 2.0, -1.0])
    x = GalileiElement(np.zeros(3), np.eye(3), 1.0, v)
    y = GalileiElement(q, np.eye(3), 0.0, np.zeros(3))
    out = galilei_compose(x, y)
    assert np.allclose(out.q, q)
    assert out.t == 1.0
    assert np.allclose(out.v, v)


def test_galilei_associative_and_inverse(rng):
    for _ in range(100):
        x, y, z = (random_galilei(rng) for _ in range(3))
        lhs = galilei_compose(galilei_compose(x, y), z)
        rhs = galilei_compose(x, galilei_compose(y, z))
        assert np.max(np.abs(lhs.q - rhs.q)) < 1e-12
        assert np.max(np.abs(lhs.rot - rhs.rot)) < 1e-12
        assert abs(lhs.t - rhs.t) < 1e-12
        assert np.max(np.abs(lhs.v - rhs.v)) < 1e-12
        xi = galilei_compose(x, x.inverse())
        assert np.max(np.abs(xi.q)) < 1e-12 and abs(xi.t) < 1e-12


def test_covering_identity_and_center():
    assert np.allclose(su2_to_so3(np.eye(2)), np.eye(3))
    assert np.allclose(su2_to_so3(-np.eye(2)), np.eye(3))


def test_covering_z_rotation():
    # oracle: independent component extraction from u M(q) u^* entries,
    # M(q) = [[z, x-iy], [x+iy, -z]]
    theta = 0.7
    u = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    rot = su2_to_so3(u)
    expected = rotation_about([0, 0, 1], theta)
    assert np.allclose(rot, expected, atol=1e-12)
    for q in np.eye(3):
        m = np.einsum("j,jkl->kl", q, PAULI)
        mp = u @ m @ u.conj().T
        qp = np.array([mp[1, 0].real, mp[1, 0].imag, mp[0, 0].real])
        assert np.allclose(rot @ q, qp, atol=1e-12)


def test_covering_homomorphism(rng):
    for _ in range(50):
        u1, u2 = random_su2(rng), random_su2(rng)
        assert np.allclose(su2_to_so3(u1 @ u2), su2_to_so3(u1) @ su2_to_so3(u2), atol=1e-12)
        assert np.allclose(su2_to_so3(-u1), su2_to_so3(u1), atol=1e-12)


def test_section_identity_convention():
    assert np.allclose(so3_section(np.eye(3)), np.eye(2))


def test_section_pi_rotation_about_z():
    # the SU(2) lift of the pi rotation: -i sigma_z = diag(-i, i)
    lift = so3_section(rotation_about([0, 0, 1], np.pi))
    assert np.allclose(lift, np.diag([-1j, 1j]), atol=1e-12)


def test_section_roundtrip(rng):
    for _ in range(200):
        rot = random_rotation(rng)
        lift = so3_section(rot)
        assert np.max(np.abs(su2_to_so3(lift) - rot)) < 1e-10
        again = so3_section(rot)
        assert np.array_equal(lift, again)  # deterministic


def test_section_roundtrip_near_pi(rng):
    for _ in range(50):
        axis = rng.standard_normal(3)
        rot = rotation_about(axis, np.pi)
        assert np.max(np.abs(su2_to_so3(so3_section(rot)) - rot)) < 1e-10


@settings(deadline=None, max_examples=60, derandomize=True)
@given(st.floats(-np.pi, np.pi), st.integers(0, 2**32 - 1))
def test_section_roundtrip_property(angle, seed):
    axis = np.random.default_rng(seed).standard_normal(3)
    if np.linalg.norm(axis) < 1e-6:
        axis = np.array([1.0, 0.0, 0.0])
    rot = rotation_about(axis, angle)
    assert np.max(np.abs(su2_to_so3(so3_section(rot)) - rot)) < 1e-10


def test_bad_rotation_rejected():
    with pytest.raises(InputError):
        GalileiElement(np.zeros(3), 2.0 * np.eye(3), 0.0, np.zeros(3))


def test_group_descriptor_roundtrip():
    g = product_cyclic(2, 3)
    g2 = FiniteGroup.from_descriptor(g.descriptor())
    assert np.array_equal(g.table, g2.table)


def test_galilei_flat_roundtrip(rng):
    x = random_galilei(rng)
    again = GalileiElement.from_flat(x.to_flat())
    assert np.max(np.abs(again.q - x.q)) == 0.0
    assert np.max(np.abs(again.rot - x.rot)) == 0.0
    assert again.t == x.t


def test_orthonormalize_rotation_explicit_repair(rng):
    from covsys.groups import check_rotation, orthonormalize_rotation

    rot = random_rotation(rng)
    noisy = rot + 1e-6 * rng.standard_normal((3, 3))
    with pytest.raises(InputError):
        check_rotation(noisy)          # never repaired silently
    fixed = orthonormalize_rotation(noisy)
    check_rotation(fixed)
    assert np.max(np.abs(fixed - rot)) < 1e-5
