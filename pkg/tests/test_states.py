import numpy as np
import pytest

from covsys.algebra import make_function_algebra
from covsys.errors import ConstructionError
from covsys.groups import product_cyclic
from covsys.multipliers import Action, heisenberg_multiplier, left_to_right
from covsys.states import (
    CovariantState,
    CovarianceSystem,
    delta_state,
    full_block_gram,
    gram_matrix,
    state_from_rep,
    validate_state,
)



def test_delta_state_validates(heisenberg3):
    _, state, _ = heisenberg3
    report = validate_state(state)
    assert report.passed, report.to_dict()
    assert report.meta["gram_min_eig"] >= -1e-12


def test_state_from_rep_swap_values(zswap):
    # hand-computed 2x2 arithmetic: omega_ee = f(0), omega_11 = f(1),
    # off-diagonal entries identically zero
    _, state = zswap
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    assert state.evaluate(0, 0, p0) == 1.0
    assert state.evaluate(0, 0, p1) == 0.0
    assert state.evaluate(1, 1, p1) == 1.0
    assert state.evaluate(1, 1, p0) == 0.0
    assert abs(state.evaluate(0, 1, np.eye(2))) == 0.0
    assert abs(state.evaluate(1, 0, np.eye(2))) == 0.0
    assert validate_state(state).passed


def test_state_from_rep_trivial_group():
    alg = make_function_algebra([0, 1])
    group = product_cyclic(1, 1)
    system = CovarianceSystem(alg, group, Action.trivial(group, alg))
    pi = alg.basis_matrices()
    u = np.eye(2, dtype=complex)[None, :, :]
    psi = np.array([np.sqrt(0.25), np.sqrt(0.75)])
    state = state_from_rep(system, pi, u, psi)
    assert abs(state.evaluate(0, 0, np.diag([1.0, 0.0])) - 0.25) < 1e-14
    assert abs(state.evaluate(0, 0, np.diag([0.0, 1.0])) - 0.75) < 1e-14
    assert validate_state(state).passed


def test_state_from_rep_heisenberg_weyl_pair():
    # clock & shift on C^3 realize the Weyl multiplier; the resulting vector
    # state must validate and carry that multiplier
    group, xi = heisenberg_multiplier(3)
    alg = make_function_algebra(["*"])
    system = CovarianceSystem(alg, group, Action.trivial(group, alg))
    w3 = np.exp(2j * np.pi / 3)
    x_shift = np.roll(np.eye(3), 1, axis=0).astype(complex)
    z_clock = np.diag([w3**j for j in range(3)])
    u = np.stack([
        np.linalg.matrix_power(x_shift, i % 3) @ np.linalg.matrix_power(z_clock, i // 3)
        for i in range(9)
    ])
    pi = np.eye(3, dtype=complex)[None, :, :]
    psi = np.array([1.0, 0.0, 0.0])
    state = state_from_rep(system, pi, u, psi)
    assert validate_state(state).passed
    # the materialized zeta equals the Weyl multiplier (trivial action)
    assert np.max(np.abs(state.zeta.values - left_to_right(xi).values)) < 1e-12


def test_state_from_rep_covariance_precondition():
    # break covariance: use the identity action but a swap unitary family
    alg = make_function_algebra([0, 1])
    group = product_cyclic(2, 1)
    system = CovarianceSystem(alg, group, Action.trivial(group, alg))
    pi = alg.basis_matrices()
    u = np.stack([np.eye(2, dtype=complex),
                  np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)])
    with pytest.raises(ConstructionError) as err:
        state_from_rep(system, pi, u, np.array([1.0, 0.0]))
    assert err.value.reason == "covariance"
    assert err.value.witness is not None


def test_perturbed_tensor_fails(heisenberg3):
    system, state, _ = heisenberg3
    tensor = np.array(state.tensor)
    tensor[2, 5] += 0.1
    bad = CovariantState(system, tensor, state.zeta)
    report = validate_state(bad)
    assert not report.passed
    failing = {c.check for c in report.checks if not c.passed}
    assert failing & {"positivity", "covariance", "hermiticity"}


def test_gram_matrix_normalization(heisenberg3):
    system, state, _ = heisenberg3
    e = system.group.identity
    g = gram_matrix(state, [(1.0, e, np.eye(1))])
    assert g.shape == (1, 1)
    assert abs(g[0, 0] - 1.0) < 1e-14


def test_gram_matrix_duplicated_entry_psd(heisenberg3):
    system, state, _ = heisenberg3
    fam = [(1.0, 3, np.eye(1)), (1.0, 3, np.eye(1))]
    g = gram_matrix(state, fam)
    eigs = np.linalg.eigvalsh(0.5 * (g + g.conj().T))
    assert eigs.min() >= -1e-12
    assert abs(np.linalg.matrix_rank(g, tol=1e-10) - 1) == 0


def test_gram_matrix_random_families(heisenberg3, rng):
    _, state, _ = heisenberg3
    for _ in range(50):
        size = int(rng.integers(1, 6))
        fam = [(complex(*rng.standard_normal(2)), int(rng.integers(0, 9)),
                (rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1))))
               for _ in range(size)]
        g = gram_matrix(state, fam)
        assert np.max(np.abs(g - g.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(0.5 * (g + g.conj().T)).min() >= -1e-10


def test_full_block_gram_heisenberg_is_identity(heisenberg3):
    _, state, _ = heisenberg3
    assert np.array_equal(full_block_gram(state), np.eye(9))


def test_covariance_exact_for_rep_states(zswap):
    _, state = zswap
    from covsys.states import covariance_residual

    res, _ = covariance_residual(state)
    assert res == 0.0


def test_schwarz_and_norm_bound_margins(heisenberg3):
    _, state, _ = heisenberg3
    report = validate_state(state, random_families=200, seed=7)
    assert report.check("schwarz").passed
    assert report.check("norm-bound").passed


def test_tensor_descriptor_roundtrip(zswap):
    system, state = zswap
    desc = state.to_descriptor()
    rebuilt = CovariantState.from_descriptor(system, desc, state.zeta)
    assert np.max(np.abs(rebuilt.tensor - state.tensor)) == 0.0


def test_validate_state_with_user_families(heisenberg3, rng):
    _, state, _ = heisenberg3
    fams = []
    for _ in range(5):
        size = int(rng.integers(1, 4))
        fams.append([(complex(*rng.standard_normal(2)), int(rng.integers(0, 9)),
                      rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1)))
                     for _ in range(size)])
    report = validate_state(state, families=fams)
    assert report.passed
