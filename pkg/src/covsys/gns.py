"""Generalized GNS construction for finite covariance systems.

From a validated covariant state the construction produces, exactly and in
finite dimensions: the quotient Hilbert space of algebra-valued functions on
the group under the state's sesquilinear form, the *-representation acting by
left multiplication, the projective unitary family implementing the group with
multiplier xi = sigma_{xy}(zeta(x,y)), and the cyclic vector coming from the
indicator of the neutral element times the algebra unit.

The kernel quotient is an explicit rank decision: eigenvectors of the
Hermitian Gram form with eigenvalue above rank_tol times the largest are kept
and whitened, so the quotient map is an isometry onto C^d by construction.
Uniqueness is realized operationally: find_intertwiner builds the unitary that
maps one representation's dense columns onto another's and verifies it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import dagger, maxabs
from .errors import ConstructionError, InputError, IntertwinerError
from .states import CovariantState, CovarianceSystem, full_block_gram

DEFAULT_RANK_TOL = 1e-9
DEFAULT_TOL = 1e-10


@dataclass
class GnsRep:
    """A concrete representation (H = C^dim, pi, U, Omega) of a system.

    quotient_map/quotient_pinv relate ambient function coordinates (flat index
    x*basis_size + i) to quotient coordinates; hand-built representations may
    leave them None.
    """

    system: CovarianceSystem
    ambient_dim: int
    dim: int
    pi: np.ndarray                      # (basis_size, dim, dim)
    u: np.ndarray                       # (|X|, dim, dim)
    omega: np.ndarray                   # (dim,)
    xi: np.ndarray | None = None        # realized multiplier values (|X|,|X|,dA,dA)
    quotient_map: np.ndarray | None = None
    quotient_pinv: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)
    trivial: bool = False

    @staticmethod
    def from_operators(system, pi, u, omega, xi=None) -> "GnsRep":
        pi = np.asarray(pi, dtype=complex)
        u = np.asarray(u, dtype=complex)
        omega = np.asarray(omega, dtype=complex).reshape(-1)
        return GnsRep(
            system=system,
            ambient_dim=system.group.order * system.algebra.basis_size,
            dim=len(omega),
            pi=pi,
            u=u,
            omega=omega,
            xi=np.asarray(xi, dtype=complex) if xi is not None else None,
        )

    def pi_of(self, a) -> np.ndarray:
        mat = a.matrix if hasattr(a, "matrix") else np.asarray(a, dtype=complex)
        coeff = self.system.algebra.coefficients(mat)
        return np.einsum("k,kab->ab", coeff, self.pi)

    def cyclic_columns(self) -> np.ndarray:
        """All vectors pi(b_i) U(x)^* Omega as a (dim, |X|*basis_size) matrix,
        column order x*basis_size + i."""
        uo = np.einsum("xba,b->xa", self.u.conj(), self.omega)
        cols = np.einsum("kab,xb->xka", self.pi, uo, optimize=True)
        return cols.reshape(self.ambient_dim, self.dim).T

    def reconstructed_values(self) -> np.ndarray:
        """E[x,y,k] = (pi(b_k) U(x)^* Omega, U(y)^* Omega)."""
        uo = np.einsum("xba,b->xa", self.u.conj(), self.omega)
        return np.einsum("ya,kab,xb->xyk", uo.conj(), self.pi, uo, optimize=True)

    def summary(self) -> dict:
        out = {"ambient_dim": self.ambient_dim, "dim": self.dim, "trivial": self.trivial}
        out.update({k: v for k, v in self.diagnostics.items()})
        return out

    def to_descriptor(self) -> dict:
        """JSON form: dimensions, operator matrices, cyclic vector, multiplier."""
        from .serialize import matrix_to_json

        return {
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "pi": [matrix_to_json(p) for p in self.pi],
            "u": [matrix_to_json(u) for u in self.u],
            "omega": [[v.real, v.imag] for v in self.omega.tolist()],
            "xi": None if self.xi is None else
                  [[matrix_to_json(self.xi[x, y]) for y in range(self.xi.shape[1])]
                   for x in range(self.xi.shape[0])],
        }

    @staticmethod
    def from_descriptor(system, data: dict) -> "GnsRep":
        from .serialize import matrix_from_json

        pi = np.stack([matrix_from_json(p) for p in data["pi"]])
        u = np.stack([matrix_from_json(m) for m in data["u"]])
        omega = np.array([complex(re, im) for re, im in data["omega"]])
        xi = None
        if data.get("xi") is not None:
            n = len(data["xi"])
            xi = np.stack([np.stack([matrix_from_json(data["xi"][x][y])
                                     for y in range(n)]) for x in range(n)])
        rep = GnsRep.from_operators(system, pi, u, omega, xi=xi)
        if rep.dim != int(data["dim"]):
            raise InputError("descriptor dimension mismatch")
        return rep


def _left_mult_matrices(algebra) -> np.ndarray:
    """L[k][:, l] = coefficients of b_k b_l."""
    basis = algebra.basis_matrices()
    nb = algebra.basis_size
    out = np.empty((nb, nb, nb), dtype=complex)
    for k in range(nb):
        for l in range(nb):
            out[k, :, l] = algebra.coefficients(basis[k] @ basis[l])
    return out


def _right_mult_matrix(algebra, m) -> np.ndarray:
    basis = algebra.basis_matrices()
    nb = algebra.basis_size
    out = np.empty((nb, nb), dtype=complex)
    for l in range(nb):
        out[:, l] = algebra.coefficients(basis[l] @ m)
    return out


def _action_matrix(algebra, action, x) -> np.ndarray:
    basis = algebra.basis_matrices()
    nb = algebra.basis_size
    out = np.empty((nb, nb), dtype=complex)
    for l in range(nb):
        out[:, l] = algebra.coefficients(action.apply(x, basis[l]))
    return out


def gns_build(state: CovariantState, rank_tol: float = DEFAULT_RANK_TOL,
              tol: float = DEFAULT_TOL) -> GnsRep:
    """Run the construction; see the module docstring.

    Raises ConstructionError when the Gram form has an eigenvalue below
    -tol*max(1, largest); a Gram form that is entirely numerical noise yields
    the explicit trivial representation (dim 0) instead of an exception.
    """
    system = state.system
    group, algebra, action = system.group, system.algebra, system.action
    n, nb, d_a = group.order, algebra.basis_size, algebra.dim
    ambient = n * nb

    # form matrix of (f, g), rows indexed by the second argument
    gram = np.conj(full_block_gram(state))
    gram = 0.5 * (gram + dagger(gram))
    eigs, vecs = np.linalg.eigh(gram)
    max_eig = float(eigs[-1]) if len(eigs) else 0.0
    if eigs[0] < -tol * max(1.0, max_eig):
        raise ConstructionError(
            "positivity", f"Gram form has eigenvalue {eigs[0]:.3e}; state is not positive"
        )
    keep = eigs > rank_tol * max(max_eig, 0.0)
    dim = int(np.count_nonzero(keep))
    if dim == 0:
        return GnsRep(system, ambient, 0,
                      pi=np.zeros((nb, 0, 0), dtype=complex),
                      u=np.zeros((n, 0, 0), dtype=complex),
                      omega=np.zeros(0, dtype=complex),
                      xi=_realized_multiplier(state),
                      diagnostics={"gram_min_eig": float(eigs[0]) if len(eigs) else 0.0,
                                   "gram_max_eig": max_eig},
                      trivial=True)

    sq = np.sqrt(eigs[keep])
    vk = vecs[:, keep]
    tmap = sq[:, None] * vk.conj().T            # (dim, ambient), T Tpinv = 1
    tpinv = vk * (1.0 / sq)[None, :]            # (ambient, dim)
    t3 = tmap.reshape(dim, n, nb)
    tp3 = tpinv.reshape(n, nb, dim)

    # pi(b_k): block-diagonal left multiplication, compressed through the quotient
    lmats = _left_mult_matrices(algebra)
    pi = np.einsum("axi,kil,xlb->kab", t3, lmats, tp3, optimize=True)

    # U(x): (U(x)f)(y) = sigma_x[f(yx) zeta(y, x)]
    zeta = state.zeta
    u = np.empty((n, dim, dim), dtype=complex)
    for x in group.elements():
        if x == group.identity:
            u[x] = np.eye(dim)     # the ambient operator is the identity map
            continue
        smat = _action_matrix(algebra, action, x)
        blocks = np.stack([smat @ _right_mult_matrix(algebra, zeta.values[y, x])
                           for y in group.elements()])
        tp_g = tp3[group.table[:, x]]           # block yx for each y
        u[x] = np.einsum("ayi,yil,yld->ad", t3, blocks, tp_g, optimize=True)

    # cyclic vector: class of the indicator of e times the unit of A
    amb = np.zeros(ambient, dtype=complex)
    amb[group.identity * nb: group.identity * nb + nb] = algebra.coefficients(
        np.eye(d_a, dtype=complex))
    omega = tmap @ amb
    nrm = float(np.linalg.norm(omega))
    if abs(nrm - 1.0) > 1e-6:
        raise ConstructionError(
            "normalization", f"cyclic vector norm {nrm} (state not normalized?)")
    omega = omega / nrm

    rep = GnsRep(system, ambient, dim, pi=pi, u=u, omega=omega,
                 xi=_realized_multiplier(state),
                 quotient_map=tmap, quotient_pinv=tpinv)
    rep.diagnostics.update({
        "gram_min_eig": float(eigs[0]),
        "gram_max_eig": max_eig,
        "unitarity": _unitarity_residual(rep),
        "projective": projective_residual(rep),
        "covariance": covariance_residual(rep),
        "cyclic_rank": cyclic_rank(rep),
        "reconstruction": verify_reconstruction(rep, state),
    })
    return rep


def _realized_multiplier(state: CovariantState) -> np.ndarray:
    """xi(x,y) = sigma_{xy}(zeta(x,y)), the multiplier the U family satisfies."""
    group, action = state.system.group, state.system.action
    zeta = state.zeta
    n, d = group.order, state.system.algebra.dim
    xi = np.empty((n, n, d, d), dtype=complex)
    for x in group.elements():
        for y in group.elements():
            xi[x, y] = action.apply(group.mul(x, y), zeta.values[x, y])
    return xi


def _unitarity_residual(rep: GnsRep) -> float:
    eye = np.eye(rep.dim)
    return max((maxabs(dagger(ux) @ ux - eye) for ux in rep.u), default=0.0)


def projective_residual(rep: GnsRep) -> float:
    """Max deviation of U(x) U(y) = pi(xi(x,y)) U(xy) over all pairs."""
    group = rep.system.group
    worst = 0.0
    for x in group.elements():
        for y in group.elements():
            rhs = rep.pi_of(rep.xi[x, y]) @ rep.u[group.mul(x, y)]
            worst = max(worst, maxabs(rep.u[x] @ rep.u[y] - rhs))
    return worst


def covariance_residual(rep: GnsRep) -> float:
    """Max deviation of pi(sigma_x a) = U(x) pi(a) U(x)^* over basis elements."""
    system = rep.system
    basis = system.algebra.basis_matrices()
    worst = 0.0
    for x in system.group.elements():
        for k, b in enumerate(basis):
            lhs = rep.pi_of(system.action.apply(x, b))
            worst = max(worst, maxabs(lhs - rep.u[x] @ rep.pi[k] @ dagger(rep.u[x])))
    return worst


def cyclic_rank(rep: GnsRep) -> int:
    if rep.dim == 0:
        return 0
    s = np.linalg.svd(rep.cyclic_columns(), compute_uv=False)
    return int(np.count_nonzero(s > max(s[0], 1.0) * 1e-10))


def verify_reconstruction(rep: GnsRep, state: CovariantState) -> float:
    """Max over (x, y, basis a) of |omega_{x,y}(a) - (pi(a)U(x)^*Omega, U(y)^*Omega)|."""
    target = state.basis_values()
    if rep.dim == 0:
        return maxabs(target)
    return maxabs(rep.reconstructed_values() - target)


def find_intertwiner(rep1: GnsRep, rep2: GnsRep, state: CovariantState,
                     tol: float = 1e-9) -> np.ndarray:
    """The unitary V with V pi1 = pi2 V, V U1 = U2 V, V Omega1 = Omega2.

    Both representations must reconstruct the given state; the distinguishing
    (x, y, basis) triple is reported when they do not.  V is built on the
    cyclic columns, then verified rather than assumed unitary.
    """
    if rep1.dim != rep2.dim:
        raise IntertwinerError(
            f"dimensions differ: {rep1.dim} vs {rep2.dim}", witness=None)
    target = state.basis_values()
    for rep, tag in ((rep1, "first"), (rep2, "second")):
        diff = np.abs(rep.reconstructed_values() - target)
        if diff.size and float(diff.max()) > tol:
            x, y, k = np.unravel_index(int(np.argmax(diff)), diff.shape)
            raise IntertwinerError(
                f"{tag} representation does not reconstruct the state "
                f"(residual {float(diff.max()):.3e})",
                witness=(int(x), int(y), int(k)),
            )

    m1 = rep1.cyclic_columns()
    m2 = rep2.cyclic_columns()
    v = m2 @ np.linalg.pinv(m1, rcond=1e-12)

    checks = {
        "unitarity": maxabs(dagger(v) @ v - np.eye(rep1.dim)),
        "omega": maxabs(v @ rep1.omega - rep2.omega),
        "pi": max(maxabs(v @ p1 - p2 @ v) for p1, p2 in zip(rep1.pi, rep2.pi)),
        "u": max(maxabs(v @ u1 - u2 @ v) for u1, u2 in zip(rep1.u, rep2.u)),
    }
    bad = {k: r for k, r in checks.items() if r > tol}
    if bad:
        raise IntertwinerError(f"intertwiner verification failed: {bad}", witness=None)
    return v
