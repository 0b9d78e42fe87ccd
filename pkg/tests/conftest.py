import numpy as np
import pytest

from covsys.groups import product_cyclic
from covsys.multipliers import Action, heisenberg_multiplier, left_to_right
from covsys.states import CovarianceSystem, delta_state, state_from_rep
from covsys.algebra import make_function_algebra


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def heisenberg_state(n=3):
    """The delta state on the Z_n x Z_n system with the Weyl multiplier."""
    group, xi = heisenberg_multiplier(n)
    algebra = make_function_algebra(["*"])
    system = CovarianceSystem(algebra, group, Action.trivial(group, algebra))
    state = delta_state(system, left_to_right(xi))
    return system, state, xi


def zswap_state():
    """The swap vector state on C({0,1}) x Z_2: psi = (1,0), U(1) = swap."""
    algebra = make_function_algebra([0, 1])
    group = product_cyclic(2, 1)
    action = Action.from_permutations(group, algebra, [[0, 1], [1, 0]])
    system = CovarianceSystem(algebra, group, action)
    pi = algebra.basis_matrices()
    u = np.stack([np.eye(2, dtype=complex),
                  np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)])
    state = state_from_rep(system, pi, u, np.array([1.0, 0.0]))
    return system, state


@pytest.fixture
def heisenberg3():
    return heisenberg_state(3)


@pytest.fixture
def zswap():
    return zswap_state()
