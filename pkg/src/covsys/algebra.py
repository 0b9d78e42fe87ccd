"""Finite-dimensional C*-algebras as concrete complex matrices.

Two kinds are supported: the abelian algebra of functions on a finite point
set, embedded as diagonal matrices, and the full matrix algebra M_n.  Both are
unital, so the multiplier algebra is the algebra itself and every construction
in the package stays inside exact dense linear algebra.

An automorphism is a permutation of the point set (function kind) or a unitary
conjugation (matrix kind); both are represented uniformly by a unitary
conjugator, with permutations additionally kept as index arrays so their
action is an exact gather instead of a float matmul.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import dagger, maxabs, specnorm
from .errors import DomainError, InputError

POSITIVITY_TOL = 1e-10


@dataclass(frozen=True)
class Algebra:
    """A function algebra over labeled points, or a full matrix algebra."""

    kind: str                       # "function" | "matrix"
    dim: int                        # matrix size
    points: tuple | None = None     # labels, function kind only

    def __post_init__(self):
        if self.kind not in ("function", "matrix"):
            raise InputError(f"unknown algebra kind {self.kind!r}")
        if self.dim < 1:
            raise InputError("algebra dimension must be positive")

    @property
    def basis_size(self) -> int:
        # vector-space dimension: s indicators, or n^2 matrix units
        return self.dim if self.kind == "function" else self.dim * self.dim

    def basis_matrices(self) -> np.ndarray:
        """Basis as a (basis_size, dim, dim) stack.

        Function kind: indicator functions (diagonal matrix units).
        Matrix kind: matrix units E_rs in row-major order.
        """
        d = self.dim
        if self.kind == "function":
            out = np.zeros((d, d, d), dtype=complex)
            for i in range(d):
                out[i, i, i] = 1.0
            return out
        out = np.zeros((d * d, d, d), dtype=complex)
        for r in range(d):
            for s in range(d):
                out[r * d + s, r, s] = 1.0
        return out

    def coefficients(self, matrix) -> np.ndarray:
        """Coordinates of a matrix in the basis above."""
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise InputError(f"expected a {self.dim}x{self.dim} matrix")
        if self.kind == "function":
            return np.diagonal(m).copy()
        return m.reshape(-1).copy()

    def from_coefficients(self, coeffs) -> "AlgebraElement":
        c = np.asarray(coeffs, dtype=complex)
        if c.shape != (self.basis_size,):
            raise InputError(f"expected {self.basis_size} coefficients")
        if self.kind == "function":
            return AlgebraElement(self, np.diag(c))
        return AlgebraElement(self, c.reshape(self.dim, self.dim))

    def element(self, matrix) -> "AlgebraElement":
        return AlgebraElement(self, matrix)

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, np.eye(self.dim, dtype=complex))

    def descriptor(self) -> dict:
        if self.kind == "function":
            return {"kind": "function", "points": list(self.points)}
        return {"kind": "matrix", "n": self.dim}

    @staticmethod
    def from_descriptor(data: dict) -> "Algebra":
        if not isinstance(data, dict) or "kind" not in data:
            raise InputError("algebra descriptor needs a 'kind' field")
        if data["kind"] == "function":
            return make_function_algebra(data.get("points", []))
        if data["kind"] == "matrix":
            return make_matrix_algebra(int(data.get("n", 0)))
        raise InputError(f"unknown algebra kind {data['kind']!r}")


class AlgebraElement:
    """A matrix tagged with its parent algebra; immutable after construction."""

    __slots__ = ("algebra", "matrix")

    def __init__(self, algebra: Algebra, matrix):
        m = np.array(matrix, dtype=complex)
        if m.shape != (algebra.dim, algebra.dim):
            raise InputError(
                f"matrix shape {m.shape} does not match algebra dimension {algebra.dim}"
            )
        if algebra.kind == "function":
            off = m - np.diag(np.diagonal(m))
            if np.any(off != 0):
                raise InputError("function-algebra elements must be exactly diagonal")
        m.setflags(write=False)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, *_):
        raise AttributeError("AlgebraElement is immutable")

    def _check_same(self, other):
        if self.algebra != other.algebra:
            raise InputError("elements belong to different algebras")

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check_same(other)
            return AlgebraElement(self.algebra, self.matrix @ other.matrix)
        return AlgebraElement(self.algebra, self.matrix * complex(other))

    def __rmul__(self, scalar):
        return AlgebraElement(self.algebra, complex(scalar) * self.matrix)

    def __add__(self, other):
        self._check_same(other)
        return AlgebraElement(self.algebra, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check_same(other)
        return AlgebraElement(self.algebra, self.matrix - other.matrix)

    def __neg__(self):
        return AlgebraElement(self.algebra, -self.matrix)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, dagger(self.matrix))

    def norm(self) -> float:
        return specnorm(self.matrix)

    def coefficients(self) -> np.ndarray:
        return self.algebra.coefficients(self.matrix)

    def __repr__(self):
        return f"AlgebraElement({self.algebra.kind}, dim={self.algebra.dim})"


@dataclass(frozen=True)
class Automorphism:
    """Product-, involution-, and norm-preserving map of an algebra.

    ``conjugator`` u acts by a -> u a u*;  for permutation-backed automorphisms
    ``perm`` holds the point map i -> perm[i] and the action is an exact index
    gather with no floating-point arithmetic.
    """

    algebra: Algebra
    conjugator: np.ndarray
    perm: tuple | None = None

    @staticmethod
    def identity(algebra: Algebra) -> "Automorphism":
        if algebra.kind == "function":
            return Automorphism.from_permutation(algebra, range(algebra.dim))
        return Automorphism(algebra, np.eye(algebra.dim, dtype=complex))

    @staticmethod
    def from_permutation(algebra: Algebra, perm) -> "Automorphism":
        p = tuple(int(i) for i in perm)
        if sorted(p) != list(range(algebra.dim)):
            raise InputError("not a permutation of the point set")
        mat = np.zeros((algebra.dim, algebra.dim), dtype=complex)
        for i, j in enumerate(p):
            mat[j, i] = 1.0
        return Automorphism(algebra, mat, perm=p)

    @staticmethod
    def from_unitary(algebra: Algebra, u, tol=1e-12) -> "Automorphism":
        u = np.asarray(u, dtype=complex)
        if maxabs(dagger(u) @ u - np.eye(algebra.dim)) > tol:
            raise InputError("conjugator is not unitary within tolerance")
        if algebra.kind == "function":
            raise InputError(
                "function-algebra automorphisms must be permutations; "
                "use from_permutation"
            )
        return Automorphism(algebra, u)

    def __post_init__(self):
        c = np.asarray(self.conjugator, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "conjugator", c)

    @property
    def inverse_perm(self):
        return tuple(np.argsort(self.perm)) if self.perm is not None else None

    def apply_matrix(self, m: np.ndarray) -> np.ndarray:
        if self.perm is not None:
            pinv = np.argsort(self.perm)
            return m[np.ix_(pinv, pinv)]
        return self.conjugator @ m @ dagger(self.conjugator)

    def apply_matrix_inverse(self, m: np.ndarray) -> np.ndarray:
        if self.perm is not None:
            p = np.asarray(self.perm)
            return m[np.ix_(p, p)]
        return dagger(self.conjugator) @ m @ self.conjugator

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(self.algebra, self.apply_matrix(a.matrix))

    def inverse(self) -> "Automorphism":
        if self.perm is not None:
            return Automorphism.from_permutation(self.algebra, self.inverse_perm)
        return Automorphism(self.algebra, dagger(self.conjugator))

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other: (self.compose(other))(a) = self(other(a))."""
        if self.algebra != other.algebra:
            raise InputError("automorphisms of different algebras")
        if self.perm is not None and other.perm is not None:
            p = tuple(self.perm[j] for j in other.perm)
            return Automorphism.from_permutation(self.algebra, p)
        return Automorphism(self.algebra, self.conjugator @ other.conjugator)


def make_function_algebra(points) -> Algebra:
    """Abelian algebra of functions on a finite nonempty point set."""
    pts = tuple(points)
    if len(pts) == 0:
        raise InputError("function algebra needs at least one point")
    if len(set(pts)) != len(pts):
        raise InputError("point labels must be distinct")
    return Algebra(kind="function", dim=len(pts), points=pts)


def make_matrix_algebra(n: int) -> Algebra:
    if n < 1:
        raise InputError("matrix algebra size must be positive")
    return Algebra(kind="matrix", dim=n)


def is_positive(a: AlgebraElement, tol: float = POSITIVITY_TOL) -> bool:
    """True iff the self-adjoint element a has spectrum >= -tol.

    Raises DomainError when a is not self-adjoint within tol; that situation
    is a malformed question, distinct from a negative answer.
    """
    m = a.matrix
    if maxabs(m - dagger(m)) > tol:
        raise DomainError("element is not self-adjoint within tolerance")
    # Hermitian solver on the symmetrized matrix keeps the spectrum real.
    eigs = np.linalg.eigvalsh(0.5 * (m + dagger(m)))
    return bool(eigs[0] >= -tol)


def apply_automorphism(sigma: Automorphism, a: AlgebraElement) -> AlgebraElement:
    if sigma.algebra != a.algebra:
        raise InputError("automorphism and element belong to different algebras")
    return sigma(a)
