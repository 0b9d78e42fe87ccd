"""Twisted crossed product of a finite covariance system.

Elements are algebra-valued functions on the group; the product is the
xi-twisted convolution and the involution carries the xi(x, x^-1) correction.
For finite groups the algebra is already complete, so no norm closure is
involved.  A covariant state extends to a functional on the crossed product
and the GNS operators integrate to a *-representation of it; both directions
are verified numerically by the test suite.
"""

from __future__ import annotations

import numpy as np

from ._linalg import dagger
from .errors import InputError
from .gns import GnsRep
from .kernels import twisted_convolve as _convolve_kernel
from .multipliers import MultiplierTable, right_to_left
from .states import CovariantState, CovarianceSystem

# modular function of the group; finite groups are unimodular, so the
# correction factor in the involution and the state extension is constant
MODULAR_DELTA = 1.0


class CrossedProduct:
    """The twisted group algebra of (system, xi) with xi a left multiplier."""

    def __init__(self, system: CovarianceSystem, xi: MultiplierTable):
        if xi.side != "left":
            raise InputError("crossed product needs a left multiplier")
        if xi.group is not system.group or xi.algebra != system.algebra:
            raise InputError("multiplier does not match the system")
        self.system = system
        self.xi = xi

    @staticmethod
    def from_state(state: CovariantState) -> "CrossedProduct":
        return CrossedProduct(state.system, right_to_left(state.zeta))

    def element(self, values) -> "CrossedElement":
        return CrossedElement(self, values)

    def delta(self, x: int, a=None) -> "CrossedElement":
        """delta_x * a, default a = unit of the algebra."""
        n, d = self.system.group.order, self.system.algebra.dim
        vals = np.zeros((n, d, d), dtype=complex)
        vals[x] = np.eye(d) if a is None else (a.matrix if hasattr(a, "matrix") else a)
        return CrossedElement(self, vals)

    def unit(self) -> "CrossedElement":
        return self.delta(self.system.group.identity)

    def random_element(self, rng, scale=1.0) -> "CrossedElement":
        n, d = self.system.group.order, self.system.algebra.dim
        vals = scale * (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d)))
        if self.system.algebra.kind == "function":
            vals = np.stack([np.diag(np.diagonal(v)) for v in vals])
        return CrossedElement(self, vals)

    def element_from_descriptor(self, data: dict) -> "CrossedElement":
        from .serialize import matrix_from_json

        n, d = self.system.group.order, self.system.algebra.dim
        vals = np.zeros((n, d, d), dtype=complex)
        for key, mat in data.items():
            x = int(key)
            if not 0 <= x < n:
                raise InputError(f"group index {x} out of range")
            vals[x] = matrix_from_json(mat)
        return CrossedElement(self, vals)


class CrossedElement:
    """A function group -> algebra, stored densely as a (|X|, d, d) stack."""

    __slots__ = ("product", "values")

    def __init__(self, product: CrossedProduct, values):
        n, d = product.system.group.order, product.system.algebra.dim
        vals = np.ascontiguousarray(values, dtype=complex)
        if vals.shape != (n, d, d):
            raise InputError("crossed element has wrong shape")
        vals.setflags(write=False)
        self.product = product
        self.values = vals

    def _same(self, other):
        if self.product is not other.product:
            raise InputError("elements live in different crossed products")

    def __add__(self, other):
        self._same(other)
        return CrossedElement(self.product, self.values + other.values)

    def __sub__(self, other):
        self._same(other)
        return CrossedElement(self.product, self.values - other.values)

    def __rmul__(self, scalar):
        return CrossedElement(self.product, complex(scalar) * self.values)

    def __mul__(self, other):
        if isinstance(other, CrossedElement):
            return twisted_convolve(self, other)
        return CrossedElement(self.product, self.values * complex(other))

    def star(self) -> "CrossedElement":
        return twisted_involution(self)

    def l1_norm(self) -> float:
        """Sum over the group of operator norms, the natural l1-type norm."""
        return float(sum(np.linalg.norm(v, ord=2) for v in self.values))

    def to_descriptor(self) -> dict:
        """JSON form: a map from group index to the matrix value there."""
        from .serialize import matrix_to_json

        return {str(x): matrix_to_json(self.values[x])
                for x in self.product.system.group.elements()}


def twisted_convolve(f: CrossedElement, g: CrossedElement) -> CrossedElement:
    """(f x g)(x) = sum_y f(y) xi(y, y^-1 x) sigma_y[g(y^-1 x)]."""
    f._same(g)
    prod = f.product
    system = prod.system
    group, action = system.group, system.action
    conj = action.conjugators
    gsig = np.einsum("yab,zbc,ydc->yzad", conj, g.values, conj.conj(), optimize=True)
    out = _convolve_kernel(f.values, np.ascontiguousarray(gsig),
                           prod.xi.values, group.table, group.inverse)
    return CrossedElement(prod, out)


def twisted_involution(f: CrossedElement) -> CrossedElement:
    """f*(x) = Delta(x)^-1 xi(x, x^-1)^* sigma_x[f(x^-1)^*]."""
    prod = f.product
    group, action = prod.system.group, prod.system.action
    out = np.empty_like(f.values)
    for x in group.elements():
        xinv = group.inv(x)
        out[x] = (dagger(prod.xi.values[x, xinv])
                  @ action.apply(x, dagger(f.values[xinv]))) / MODULAR_DELTA
    return CrossedElement(prod, out)


class ExtendedState:
    """The extension omega-bar of a covariant state to the crossed product:
    omega_bar(f) = sum_x Delta(x)^-1 omega_{x,e}(xi(x^-1, x) f(x^-1))."""

    def __init__(self, state: CovariantState, product: CrossedProduct):
        self.state = state
        self.product = product

    def __call__(self, f: CrossedElement) -> complex:
        if f.product is not self.product:
            raise InputError("element lives in a different crossed product")
        group = self.product.system.group
        e = group.identity
        xi = self.product.xi.values
        total = 0.0 + 0.0j
        for x in group.elements():
            xinv = group.inv(x)
            total += self.state.evaluate(x, e, xi[xinv, x] @ f.values[xinv]) / MODULAR_DELTA
        return complex(total)


def extend_state(state: CovariantState, product: CrossedProduct | None = None) -> ExtendedState:
    """Extend a covariant state to its crossed product (built from the state's
    zeta when not supplied)."""
    if product is None:
        product = CrossedProduct.from_state(state)
    return ExtendedState(state, product)


def integrated_rep(rep: GnsRep, f: CrossedElement) -> np.ndarray:
    """pi_bar(f) = sum_x pi(f(x)) U(x) on the representation space of rep."""
    if rep.system is not f.product.system:
        raise InputError("representation and element belong to different systems")
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for x in rep.system.group.elements():
        out += rep.pi_of(f.values[x]) @ rep.u[x]
    return out


def classical_gns(product: CrossedProduct, functional) -> dict:
    """Plain GNS data of a linear functional on the crossed product algebra.

    Returns the Gram matrix over the delta_x b_i basis, the quotient dimension
    under the same rank rule the covariance GNS uses, and the whitening map.
    Used to cross-check that the GNS representation of omega-bar matches the
    integrated representation on the cyclic subspace.
    """
    system = product.system
    group, algebra = system.group, system.algebra
    basis = algebra.basis_matrices()
    n, nb = group.order, algebra.basis_size
    gens = []
    for x in group.elements():
        for i in range(nb):
            gens.append(product.delta(x, algebra.element(basis[i])))
    m = n * nb
    gram = np.empty((m, m), dtype=complex)
    for r, gr in enumerate(gens):
        for c, gc in enumerate(gens):
            # form linear in the first argument: (f, g) = functional(g* x f)
            gram[r, c] = functional(twisted_convolve(gr.star(), gc))
    gram = 0.5 * (gram + dagger(gram))
    eigs, vecs = np.linalg.eigh(gram)
    max_eig = float(eigs[-1]) if len(eigs) else 0.0
    keep = eigs > 1e-9 * max(max_eig, 0.0)
    dim = int(np.count_nonzero(keep))
    sq = np.sqrt(eigs[keep])
    tmap = sq[:, None] * vecs[:, keep].conj().T
    return {"gram": gram, "dim": dim, "whitening": tmap, "generators": gens}
