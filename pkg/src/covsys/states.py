"""Covariant states of a covariance system.

A covariance system is an algebra, a finite group, and a true representation
of the group by automorphisms.  A state is the doubly indexed family of
functionals omega_{x,y}, stored densely as one complex tensor, together with
the right multiplier that twists its translation covariance.

validate_state runs every axiom that is decidable at finite size: block-Gram
positivity (exhaustive over the full group-times-basis family, which dominates
every finite family), normalization, hermiticity, the zeta-twisted covariance
law, plus sampled Schwarz-inequality and norm-bound margins.
"""

from __future__ import annotations

import numpy as np

from ._linalg import dagger, maxabs, specnorm
from .algebra import Algebra, AlgebraElement
from .errors import ConstructionError, InputError
from .groups import FiniteGroup
from .multipliers import (
    Action,
    CheckResult,
    MultiplierTable,
    ValidationReport,
    left_to_right,
    validate_right,
)

DEFAULT_TOL = 1e-10


class CovarianceSystem:
    """(algebra, group, action) with the action a genuine representation."""

    def __init__(self, algebra: Algebra, group: FiniteGroup, action: Action, tol=1e-10):
        if action.algebra != algebra or action.group is not group:
            raise InputError("action does not match algebra/group")
        res, witness = action.representation_residual()
        if res > tol:
            raise ConstructionError(
                "representation",
                f"action is not a homomorphism (residual {res:.3e} at {witness})",
                witness=witness,
            )
        self.algebra = algebra
        self.group = group
        self.action = action

    def __repr__(self):
        return (f"CovarianceSystem(|X|={self.group.order}, "
                f"A={self.algebra.kind}:{self.algebra.dim})")


class CovariantState:
    """omega_{x,y} stored as a (N, N, d, d) pairing tensor plus its zeta."""

    def __init__(self, system: CovarianceSystem, tensor, zeta: MultiplierTable):
        tensor = np.asarray(tensor, dtype=complex)
        n, d = system.group.order, system.algebra.dim
        if tensor.shape != (n, n, d, d):
            raise InputError("state tensor has wrong shape")
        if zeta.side != "right":
            raise InputError("state must carry a right multiplier")
        if zeta.group is not system.group:
            raise InputError("zeta is defined over a different group")
        tensor.setflags(write=False)
        self.system = system
        self.tensor = tensor
        self.zeta = zeta

    def evaluate(self, x: int, y: int, a) -> complex:
        m = a.matrix if isinstance(a, AlgebraElement) else np.asarray(a, dtype=complex)
        return complex(np.sum(self.tensor[x, y] * m))

    def basis_values(self) -> np.ndarray:
        """E[x, y, k] = omega_{x,y}(b_k) over the algebra basis."""
        basis = self.system.algebra.basis_matrices()
        return np.einsum("xyrs,krs->xyk", self.tensor, basis, optimize=True)

    def to_descriptor(self) -> dict:
        vals = self.basis_values()
        return {
            "kind": "tensor",
            "data": [[[[v.real, v.imag] for v in vals[x, y]]
                      for y in self.system.group.elements()]
                     for x in self.system.group.elements()],
        }

    @staticmethod
    def from_descriptor(system: CovarianceSystem, data: dict, zeta: MultiplierTable):
        arr = np.asarray(data["data"], dtype=float)
        n, nb = system.group.order, system.algebra.basis_size
        if arr.shape != (n, n, nb, 2):
            raise InputError(f"state tensor must have shape {(n, n, nb, 2)}")
        vals = arr[..., 0] + 1j * arr[..., 1]
        tensor = np.empty((n, n, system.algebra.dim, system.algebra.dim), dtype=complex)
        for x in range(n):
            for y in range(n):
                tensor[x, y] = system.algebra.from_coefficients(vals[x, y]).matrix
        return CovariantState(system, tensor, zeta)


def delta_state(system: CovarianceSystem, zeta: MultiplierTable,
                point_functional=None) -> CovariantState:
    """omega_{x,y} = delta_{x,y} * phi for a state phi of the algebra
    (default: evaluation at the first basis point / matrix unit E_00)."""
    n, d = system.group.order, system.algebra.dim
    if point_functional is None:
        phi = np.zeros((d, d), dtype=complex)
        phi[0, 0] = 1.0
    else:
        phi = np.asarray(point_functional, dtype=complex)
    tensor = np.zeros((n, n, d, d), dtype=complex)
    for x in range(n):
        tensor[x, x] = phi
    return CovariantState(system, tensor, zeta)


def state_from_rep(system: CovarianceSystem, pi, u, psi, tol=1e-9) -> CovariantState:
    """Vector state omega_{x,y}(a) = (pi(a) U(x)^* psi, U(y)^* psi).

    pi maps the algebra basis to matrices on the representation space, u is a
    projective unitary family with u[e] = 1, psi a unit vector.  The pair must
    be covariant for the system action; the multiplier is read off from
    U(x) U(y) U(xy)^* through pi and converted to the right multiplier zeta
    carried by the state.
    """
    group, algebra, action = system.group, system.algebra, system.action
    pi = np.asarray(pi, dtype=complex)
    u = np.asarray(u, dtype=complex)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    nb, n = algebra.basis_size, group.order
    if pi.shape[0] != nb or u.shape[0] != n or pi.shape[1:] != u.shape[1:]:
        raise InputError("pi/u dimensions are inconsistent")
    dh = pi.shape[1]
    if psi.shape != (dh,):
        raise InputError("cyclic vector has wrong dimension")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise InputError("cyclic vector must be normalized")

    basis = algebra.basis_matrices()
    _check_star_rep(algebra, basis, pi, tol)
    eye = np.eye(dh)
    if maxabs(u[group.identity] - eye) > tol:
        raise ConstructionError("unit", "U(e) is not the identity")
    for x in range(n):
        if maxabs(dagger(u[x]) @ u[x] - eye) > tol:
            raise ConstructionError("unitarity", f"U({x}) is not unitary")

    pi_of = lambda m: np.einsum("k,kab->ab", algebra.coefficients(m), pi)
    for x in range(n):
        for k in range(nb):
            lhs = pi_of(action.apply(x, basis[k]))
            rhs = u[x] @ pi[k] @ dagger(u[x])
            if maxabs(lhs - rhs) > tol:
                raise ConstructionError(
                    "covariance",
                    f"pi(sigma_x a) != U(x) pi(a) U(x)^* at x={x}, basis {k}",
                    witness=(x, k),
                )

    # omega tensor
    uvec = np.einsum("xba,b->xa", u.conj(), psi)       # U(x)^* psi
    tensor = np.empty((n, n, algebra.dim, algebra.dim), dtype=complex)
    basis_vals = np.einsum("ya,kab,xb->xyk", uvec.conj(), pi, uvec, optimize=True)
    for x in range(n):
        for y in range(n):
            tensor[x, y] = algebra.from_coefficients(basis_vals[x, y]).matrix

    # multiplier read-off: pi(xi(x,y)) = U(x) U(y) U(xy)^*
    amat = pi.reshape(nb, -1).T                        # (dh^2, nb)
    xi_vals = np.empty((n, n, algebra.dim, algebra.dim), dtype=complex)
    for x in range(n):
        for y in range(n):
            q = (u[x] @ u[y] @ dagger(u[group.mul(x, y)])).reshape(-1)
            coeff, *_ = np.linalg.lstsq(amat, q, rcond=None)
            if maxabs(amat @ coeff - q) > tol:
                raise ConstructionError(
                    "projective",
                    f"U(x)U(y)U(xy)^* is not in pi(A) at ({x}, {y})",
                    witness=(x, y),
                )
            xi_vals[x, y] = algebra.from_coefficients(coeff).matrix
    xi = MultiplierTable("left", group, action, xi_vals)
    zeta = left_to_right(xi)
    return CovariantState(system, tensor, zeta)


def _check_star_rep(algebra, basis, pi, tol):
    nb = len(basis)
    for i in range(nb):
        ci = algebra.coefficients(dagger(basis[i]))
        if maxabs(dagger(pi[i]) - np.einsum("k,kab->ab", ci, pi)) > tol:
            raise ConstructionError("star", f"pi does not respect the involution at basis {i}")
        for j in range(nb):
            cij = algebra.coefficients(basis[i] @ basis[j])
            prod = np.einsum("k,kab->ab", cij, pi)
            if maxabs(pi[i] @ pi[j] - prod) > tol:
                raise ConstructionError(
                    "homomorphism", f"pi is not multiplicative at basis ({i}, {j})"
                )
    ident = algebra.coefficients(np.eye(algebra.dim))
    if maxabs(np.einsum("k,kab->ab", ident, pi) - np.eye(pi.shape[1])) > tol:
        raise ConstructionError("unit", "pi(1) is not the identity")


def gram_matrix(state: CovariantState, family) -> np.ndarray:
    """G_{jk} = lambda_j conj(lambda_k) omega_{x_j, x_k}(a_k^* a_j)."""
    fam = _normalize_family(state, family)
    m = len(fam)
    g = np.empty((m, m), dtype=complex)
    for j, (lj, xj, aj) in enumerate(fam):
        for k, (lk, xk, ak) in enumerate(fam):
            g[j, k] = lj * np.conj(lk) * state.evaluate(xj, xk, dagger(ak) @ aj)
    return g


def _normalize_family(state, family):
    out = []
    for lam, x, a in family:
        mat = a.matrix if isinstance(a, AlgebraElement) else np.asarray(a, dtype=complex)
        if mat.shape != (state.system.algebra.dim,) * 2:
            raise InputError("family element has wrong shape")
        out.append((complex(lam), int(x), mat))
    return out


def _random_family(rng, state, size):
    algebra = state.system.algebra
    lams = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    xs = rng.integers(0, state.system.group.order, size)
    mats = []
    for _ in range(size):
        m = rng.standard_normal((algebra.dim,) * 2) + 1j * rng.standard_normal((algebra.dim,) * 2)
        if algebra.kind == "function":
            m = np.diag(np.diagonal(m))
        mats.append(m)
    return list(zip(lams, xs, mats))


def full_block_gram(state: CovariantState) -> np.ndarray:
    """Gram of the complete family {(x, basis b)}: G = omega_{x,y}(b_j^* b_i).

    Positive semidefiniteness of this matrix is equivalent to the positivity
    axiom over all finite families, every family being a coefficient vector
    against it.
    """
    basis = state.system.algebra.basis_matrices()
    b2 = np.einsum("jba,ibc->ijac", basis.conj(), basis, optimize=True)
    n, nb = state.system.group.order, state.system.algebra.basis_size
    g = np.einsum("xyac,ijac->xiyj", state.tensor, b2, optimize=True)
    return g.reshape(n * nb, n * nb)


def covariance_residual(state: CovariantState):
    """Max residual of omega_{x,y}(sigma_z a) = omega_{xz,yz}(zeta(y,z) a zeta(x,z)^*)."""
    system, zeta = state.system, state.zeta
    group, algebra, action = system.group, system.algebra, system.action
    basis = algebra.basis_matrices()
    n = group.order
    sb = np.stack([[action.apply(z, b) for b in basis] for z in range(n)])
    lhs = np.einsum("xyrs,zkrs->xyzk", state.tensor, sb, optimize=True)
    res, witness = 0.0, None
    for z in range(n):
        tz = group.table[:, z]
        w2 = state.tensor[np.ix_(tz, tz)]
        mats = np.einsum("yab,kbc,xdc->xykad", zeta.values[:, z], basis,
                         zeta.values[:, z].conj(), optimize=True)
        rhs = np.einsum("xyrs,xykrs->xyk", w2, mats, optimize=True)
        diff = np.abs(lhs[:, :, z, :] - rhs)
        r = float(diff.max())
        if r > res:
            x, y, k = np.unravel_index(int(np.argmax(diff)), diff.shape)
            res, witness = r, (int(x), int(y), z, int(k))
    return res, witness


def hermiticity_residual(state: CovariantState):
    basis = state.system.algebra.basis_matrices()
    lhs = np.einsum("xyrs,ksr->xyk", state.tensor, basis.conj(), optimize=True)
    rhs = np.einsum("yxrs,krs->xyk", state.tensor, basis, optimize=True).conj()
    diff = np.abs(lhs - rhs)
    x, y, k = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff.max()), (int(x), int(y), int(k))


def validate_state(state: CovariantState, families=None, tol=DEFAULT_TOL,
                   seed=0, random_families=100) -> ValidationReport:
    """Full axiom check of a covariant state; see the module docstring."""
    checks = []

    zeta_report = validate_right(state.zeta, tol=tol, seed=seed)
    checks.append(CheckResult(
        "zeta-multiplier", zeta_report.max_residual, None, zeta_report.passed))

    res = abs(state.evaluate(state.system.group.identity, state.system.group.identity,
                             np.eye(state.system.algebra.dim)) - 1.0)
    checks.append(CheckResult("normalization", float(res), None, res <= tol))

    res, wit = hermiticity_residual(state)
    checks.append(CheckResult("hermiticity", res, wit, res <= tol))

    g = full_block_gram(state)
    eigs = np.linalg.eigvalsh(0.5 * (g + dagger(g)))
    min_eig = float(eigs[0])
    user_min = min_eig
    for fam in (list(families) if families else []):
        gf = gram_matrix(state, fam)
        ge = np.linalg.eigvalsh(0.5 * (gf + dagger(gf)))
        user_min = min(user_min, float(ge[0]))
    checks.append(CheckResult("positivity", max(0.0, -user_min), None, user_min >= -tol))

    res, wit = covariance_residual(state)
    checks.append(CheckResult("covariance", res, wit, res <= tol))

    rng = np.random.default_rng(seed)
    schwarz_min, bound_min = np.inf, np.inf
    for _ in range(random_families):
        size = int(rng.integers(2, 6))
        fam_a = _random_family(rng, state, size)
        fam_b = _random_family(rng, state, size)
        # Schwarz inequality for the commutator-type pairing
        fam_b = [(la, xa, mb) for (la, xa, _), (_, _, mb) in zip(fam_a, fam_b)]
        asum = gram_matrix(state, fam_a).sum().real
        bsum = gram_matrix(state, fam_b).sum().real
        cross = 0.0
        for (lj, xj, aj), (_, _, bj) in zip(fam_a, fam_b):
            for (lk, xk, ak), (_, _, bk) in zip(fam_a, fam_b):
                cross += lj * np.conj(lk) * state.evaluate(
                    xj, xk, dagger(ak) @ bj - dagger(bk) @ aj)
        schwarz_min = min(schwarz_min, 4.0 * asum * bsum - abs(cross) ** 2)
        norm_bound = sum(abs(l) * specnorm(m) for l, _, m in fam_a) ** 2
        bound_min = min(bound_min, norm_bound - asum)
    checks.append(CheckResult("schwarz", max(0.0, -float(schwarz_min)), None,
                              schwarz_min >= -tol))
    checks.append(CheckResult("norm-bound", max(0.0, -float(bound_min)), None,
                              bound_min >= -tol))

    report = ValidationReport(checks, tol, "numeric", exhaustive=True, seed=seed,
                              meta={"gram_min_eig": min_eig,
                                    "random_families": random_families,
                                    "continuity": "not-applicable (finite group)"})
    return report
