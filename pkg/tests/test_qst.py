import numpy as np
import pytest

from covsys.errors import InputError
from covsys.qst import (
    BASE_POINT,
    MINKOWSKI,
    Atom,
    QstParams,
    SigmaPoint,
    commutator_forms,
    commutator_forms_from_multiplier,
    epsilon_matrix,
    eta_matrix,
    gram_positivity,
    lorentz_boost,
    lorentz_rotation,
    moments_via_kernel,
    qst_multiplier,
    quasifree_gram,
    quasifree_kernel,
    random_weyl_points,
    second_moments,
    sigma_point_from_epsilon,
    transport_T,
)


def boosted_params():
    return QstParams(atoms=[
        (np.eye(4), 0.5),
        (lorentz_boost(1, 0.5), 0.3),
        (lorentz_rotation(1, 0.7) @ lorentz_boost(3, -0.4), 0.2),
    ])


def test_sigma_point_invariants():
    with pytest.raises(InputError):
        SigmaPoint((1, 0, 0), (2, 0, 0))
    with pytest.raises(InputError):
        SigmaPoint((1, 1, 0), (1, -1, 0))   # e.m = 0
    p = SigmaPoint((1, 0, 0), (-1, 0, 0))
    assert p.sign == -1.0


def test_epsilon_base_point():
    expected = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]],
                        dtype=float)
    eps = epsilon_matrix(BASE_POINT)
    assert np.array_equal(eps, expected)
    assert np.array_equal(eps, -eps.T)
    assert np.allclose(eps @ eps, -np.eye(4))


def test_epsilon_antisymmetry_random(rng):
    for _ in range(20):
        lam = lorentz_boost(1, float(rng.uniform(-0.8, 0.8)))
        p, _ = transport_T(0.5 * np.eye(4), lam)
        eps = epsilon_matrix(p)
        assert np.max(np.abs(eps + eps.T)) == 0.0
        z = rng.standard_normal(4)
        assert abs(z @ eps @ z) < 1e-12


def test_epsilon_lorentz_transport():
    lam = lorentz_boost(2, 0.4)
    p, _ = transport_T(0.5 * np.eye(4), lam)
    eps0 = epsilon_matrix(BASE_POINT)
    assert np.max(np.abs(epsilon_matrix(p) - lam.T @ eps0 @ lam)) < 1e-12
    # round trip through the parametrization
    again = sigma_point_from_epsilon(lam.T @ eps0 @ lam)
    assert np.allclose(again.e, p.e) and np.allclose(again.m, p.m)


def test_eta_matrix_formulas():
    eps0 = epsilon_matrix(BASE_POINT)
    eta = eta_matrix(BASE_POINT, MINKOWSKI)
    assert np.allclose(eta, np.linalg.inv(eps0) @ MINKOWSKI)
    # gamma = eps gives (e.m) times the identity
    eta2 = eta_matrix(BASE_POINT, eps0)
    assert np.allclose(eta2, np.eye(4))
    flipped = SigmaPoint((1, 0, 0), (-1, 0, 0))
    assert np.allclose(eta_matrix(flipped, epsilon_matrix(flipped)),
                       flipped.sign * np.eye(4))
    # the sign factor scales eta linearly for fixed gamma
    assert np.allclose(eta_matrix(flipped, MINKOWSKI),
                       flipped.sign * np.linalg.inv(epsilon_matrix(flipped)) @ MINKOWSKI)


def test_kernel_normalization():
    params = QstParams()
    zero = np.zeros(8)
    assert quasifree_kernel(params, None, zero, zero) == 1.0
    boosted = boosted_params()
    assert abs(quasifree_kernel(boosted, None, zero, zero) - 1.0) < 1e-15


def test_kernel_diagonal_modulus_one_single_atom(rng):
    params = QstParams()
    for _ in range(20):
        x = rng.standard_normal(8)
        assert abs(abs(quasifree_kernel(params, None, x, x)) - 1.0) < 1e-14


def test_multiplier_normalization_and_modulus(rng):
    for _ in range(20):
        x = rng.standard_normal(8)
        zero = np.zeros(8)
        assert qst_multiplier(BASE_POINT, MINKOWSKI, x, zero) == 1.0
        assert qst_multiplier(BASE_POINT, MINKOWSKI, zero, x) == 1.0
        y = rng.standard_normal(8)
        assert abs(abs(qst_multiplier(BASE_POINT, MINKOWSKI, x, y)) - 1.0) < 1e-14


def test_multiplier_scalar_cocycle_identity(rng):
    # sigma is trivial so the multiplier must satisfy the plain 2-cocycle law
    for _ in range(100):
        x, y, z = (rng.standard_normal(8) for _ in range(3))
        lhs = (qst_multiplier(BASE_POINT, MINKOWSKI, x, y)
               * qst_multiplier(BASE_POINT, MINKOWSKI, x + y, z))
        rhs = (qst_multiplier(BASE_POINT, MINKOWSKI, y, z)
               * qst_multiplier(BASE_POINT, MINKOWSKI, x, y + z))
        assert abs(lhs - rhs) < 1e-12


def test_kernel_translation_covariance(rng):
    # omega_{x,y}(f) = omega_{x+z,y+z}(zeta(y,z) f zeta(x,z)^*) with central
    # scalar zeta given by the multiplier at each atom
    params = boosted_params()
    for _ in range(20):
        x, y, z = (rng.standard_normal(8) for _ in range(3))
        lhs = quasifree_kernel(params, None, x, y)
        twist = np.array([
            qst_multiplier(a.point, params.gamma, y, z)
            * np.conj(qst_multiplier(a.point, params.gamma, x, z))
            for a in params.atoms
        ])
        rhs = quasifree_kernel(params, twist, x + z, y + z)
        assert abs(lhs - rhs) < 1e-12


def test_commutator_forms_base_point():
    qq, kk, kq = commutator_forms(BASE_POINT, MINKOWSKI)
    eps0 = epsilon_matrix(BASE_POINT)
    g = MINKOWSKI
    assert np.allclose(qq, -1j * g @ eps0 @ g)
    assert qq[0, 1] == 1j          # -i * (g eps0 g)[0,1] = -i * (-1)
    assert np.allclose(kk, 1j * np.linalg.inv(eps0))
    assert np.allclose(kk, -1j * eps0)     # eps0^2 = -1
    assert np.allclose(kq, -1j * g)        # g is its own inverse
    assert np.allclose(qq, -qq.T) and np.allclose(kk, -kk.T)


def test_commutator_forms_match_multiplier_exponent():
    points = [BASE_POINT]
    rngl = np.random.default_rng(5)
    for _ in range(10):
        lam = (lorentz_boost(int(rngl.integers(1, 4)), float(rngl.uniform(-0.5, 0.5)))
               @ lorentz_rotation(int(rngl.integers(1, 4)), float(rngl.uniform(0, np.pi))))
        p, _ = transport_T(0.5 * np.eye(4), lam)
        points.append(p)
    for p in points:
        qq, kk, kq = commutator_forms(p, MINKOWSKI)
        qq2, kk2, kq2 = commutator_forms_from_multiplier(p, MINKOWSKI)
        assert np.max(np.abs(qq - qq2)) < 1e-12
        assert np.max(np.abs(kk - kk2)) < 1e-12
        assert np.max(np.abs(kq - kq2)) < 1e-12


def test_second_moments_single_atom():
    params = QstParams()
    eps0 = epsilon_matrix(BASE_POINT)
    g = MINKOWSKI
    expected = g @ (0.5 * np.eye(4) + 0.5j * eps0) @ g
    assert np.allclose(second_moments(params), expected, atol=1e-14)
    herm = 0.5 * (expected + expected.conj().T)
    assert np.linalg.eigvalsh(herm).min() >= -1e-12


def test_moments_oracle_single_atom():
    params = QstParams()
    analytic = second_moments(params)
    est = moments_via_kernel(params, 1e-3)
    assert np.max(np.abs(analytic - est.matrix)) < 1e-6
    assert np.max(np.abs(est.first)) < 1e-8
    assert 1.5 < est.slope < 2.5


def test_moments_oracle_boosted():
    params = boosted_params()
    analytic = second_moments(params)
    est = moments_via_kernel(params, 1e-3)
    scale = max(1.0, float(np.max(np.abs(analytic))))
    assert np.max(np.abs(analytic - est.matrix)) / scale < 1e-6
    assert np.max(np.abs(est.first)) < 1e-8


def test_moments_step_bounds():
    with pytest.raises(InputError):
        moments_via_kernel(QstParams(), 0.5)


def test_gram_two_equal_points():
    params = QstParams()
    pts = np.zeros((2, 8))
    pts[:, 0] = 1.0
    g = quasifree_gram(params, pts)
    eigs = np.linalg.eigvalsh(0.5 * (g + g.conj().T))
    assert np.allclose(sorted(eigs), [0.0, 2.0], atol=1e-14)


def test_gram_positive_default(rng):
    params = QstParams()
    pts = random_weyl_points(rng, 8)
    assert gram_positivity(params, pts) >= -1e-10
    boosted = boosted_params()
    assert gram_positivity(boosted, random_weyl_points(rng, 8)) >= -1e-10


def test_gram_violation_detected():
    violation = QstParams(c_seed=0.01 * np.eye(4))
    assert violation.psd_margin() < -0.4
    pts = random_weyl_points(np.random.default_rng(0), 8)
    assert gram_positivity(violation, pts) < -1e-3


def test_transport_identity():
    point, tmat = transport_T(0.5 * np.eye(4), np.eye(4))
    assert point.e == BASE_POINT.e and point.m == BASE_POINT.m
    assert np.array_equal(tmat, 0.5 * np.eye(4))


def test_transport_boost_preserves_invariants():
    lam = lorentz_boost(1, 0.5)
    point, tmat = transport_T(0.5 * np.eye(4), lam)
    e, m = np.asarray(point.e), np.asarray(point.m)
    assert abs(e @ e - m @ m) < 1e-12
    assert abs(abs(e @ m) - 1.0) < 1e-12
    atom = Atom.from_transport(0.5 * np.eye(4), lam, 1.0)
    assert atom.psd_margin() >= -1e-10
    assert np.linalg.eigvalsh(tmat).min() >= -1e-12


def test_transport_stabilizer_fixes_T():
    # spatial rotations about the x axis stabilize eps0 and C = 0.5*I
    lam = lorentz_rotation(1, 0.7)
    eps0 = epsilon_matrix(BASE_POINT)
    assert np.max(np.abs(lam.T @ eps0 @ lam - eps0)) < 1e-12
    point, tmat = transport_T(0.5 * np.eye(4), lam)
    assert np.allclose(point.e, BASE_POINT.e) and np.allclose(point.m, BASE_POINT.m)
    assert np.max(np.abs(tmat - 0.5 * np.eye(4))) < 1e-12


def test_transport_rejects_non_lorentz():
    with pytest.raises(InputError):
        transport_T(0.5 * np.eye(4), 2.0 * np.eye(4))


def test_params_config_roundtrip():
    params = boosted_params()
    again = QstParams.from_config(params.to_config())
    assert np.max(np.abs(again.gamma - params.gamma)) == 0.0
    assert len(again.atoms) == 3
    with pytest.raises(InputError):
        QstParams.from_config({"gamma": np.eye(4).tolist(), "bogus": 1})


def test_params_weight_validation():
    with pytest.raises(InputError):
        QstParams(atoms=[(np.eye(4), 0.5), (np.eye(4), 0.4)])
    with pytest.raises(InputError):
        QstParams(atoms=[(np.eye(4), -1.0), (np.eye(4), 2.0)])


def test_gram_positivity_needs_two_points():
    with pytest.raises(InputError):
        gram_positivity(QstParams(), np.zeros((1, 8)))
