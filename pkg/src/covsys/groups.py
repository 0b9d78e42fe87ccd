"""Group arithmetic: validated finite multiplication tables, the Galilei
composition law, and the SU(2) double cover of SO(3) with a fixed measurable
section.

Finite groups are plain integer tables checked against every axiom at
construction (associativity over all triples, two-sided identity, two-sided
inverses).  Continuous groups appear only through closed-form element
arithmetic; no Haar integration happens here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import maxabs
from .errors import ConstructionError, InputError

ROTATION_TOL = 1e-12
# scalar parts below this are treated as exactly zero when picking the
# quaternion lift of a rotation by pi
SECTION_SCALAR_EPS = 1e-8

PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)


class FiniteGroup:
    """A finite group given by its multiplication table over 0..N-1."""

    __slots__ = ("order", "table", "inverse", "identity")

    def __init__(self, table):
        t = np.asarray(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise InputError("multiplication table must be square")
        n = t.shape[0]
        if n == 0:
            raise InputError("group must be nonempty")
        if t.min() < 0 or t.max() >= n:
            raise ConstructionError("closure", "table entries outside 0..N-1")

        idx = np.arange(n)
        identity = None
        for e in range(n):
            if np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx):
                identity = e
                break
        if identity is None:
            raise ConstructionError("identity", "no two-sided identity element")

        inverse = np.full(n, -1, dtype=np.int64)
        for x in range(n):
            right = np.where(t[x] == identity)[0]
            if len(right) != 1 or t[right[0], x] != identity:
                raise ConstructionError("inverse", f"element {x} has no two-sided inverse")
            inverse[x] = right[0]

        # (xy)z == x(yz) for every triple, fully vectorized
        lhs = t[t, :]              # lhs[x,y,z] = (xy)z
        rhs = t[:, t]              # rhs[x,y,z] = x(yz)
        if not np.array_equal(lhs, rhs):
            x, y, z = np.unravel_index(int(np.argmax(lhs != rhs)), lhs.shape)
            raise ConstructionError(
                "associativity",
                f"associativity fails at triple ({x}, {y}, {z})",
                witness=(int(x), int(y), int(z)),
            )

        t.setflags(write=False)
        inverse.setflags(write=False)
        self.order = n
        self.table = t
        self.inverse = inverse
        self.identity = identity

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def inv(self, x: int) -> int:
        return int(self.inverse[x])

    def elements(self):
        return range(self.order)

    @staticmethod
    def cyclic(n: int) -> "FiniteGroup":
        if n < 1:
            raise InputError("cyclic group order must be positive")
        idx = np.arange(n)
        return FiniteGroup((idx[:, None] + idx[None, :]) % n)

    def direct_product(self, other: "FiniteGroup") -> "FiniteGroup":
        """Product group with index (a, b) -> a * other.order + b."""
        n, m = self.order, other.order
        table = np.empty((n * m, n * m), dtype=np.int64)
        for a in range(n):
            for b in range(m):
                row = self.table[a][:, None] * m + other.table[b][None, :]
                table[a * m + b] = row.reshape(-1)
        return FiniteGroup(table)

    def descriptor(self) -> dict:
        return {"order": self.order, "table": self.table.tolist()}

    @staticmethod
    def from_descriptor(data: dict) -> "FiniteGroup":
        if "table" not in data:
            raise InputError("group descriptor needs a 'table' field")
        g = FiniteGroup(data["table"])
        if "order" in data and int(data["order"]) != g.order:
            raise InputError("declared order does not match table size")
        return g

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def finite_group(table) -> FiniteGroup:
    return FiniteGroup(table)


def product_cyclic(n: int, m: int) -> FiniteGroup:
    return FiniteGroup.cyclic(n).direct_product(FiniteGroup.cyclic(m))


def check_rotation(mat, tol=ROTATION_TOL):
    m = np.asarray(mat, dtype=float)
    if m.shape != (3, 3):
        raise InputError("rotation must be a 3x3 matrix")
    if maxabs(m.T @ m - np.eye(3)) > tol:
        raise InputError("matrix is not orthogonal within tolerance")
    if abs(np.linalg.det(m) - 1.0) > 10 * tol:
        raise InputError("matrix has determinant != +1")
    return m


def check_su2(mat, tol=ROTATION_TOL):
    u = np.asarray(mat, dtype=complex)
    if u.shape != (2, 2):
        raise InputError("SU(2) element must be a 2x2 matrix")
    if maxabs(u.conj().T @ u - np.eye(2)) > tol:
        raise InputError("matrix is not unitary within tolerance")
    if abs(np.linalg.det(u) - 1.0) > 10 * tol:
        raise InputError("matrix has determinant != 1")
    return u


@dataclass(frozen=True)
class GalileiElement:
    """(shift q, rotation, time t, boost velocity v)."""

    q: np.ndarray
    rot: np.ndarray
    t: float
    v: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).reshape(3)
        v = np.asarray(self.v, dtype=float).reshape(3)
        rot = check_rotation(self.rot)
        for name, val in (("q", q), ("rot", rot), ("v", v)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "t", float(self.t))

    @staticmethod
    def identity() -> "GalileiElement":
        return GalileiElement(np.zeros(3), np.eye(3), 0.0, np.zeros(3))

    def inverse(self) -> "GalileiElement":
        rinv = self.rot.T
        return GalileiElement(
            -rinv @ (self.q - self.t * self.v), rinv, -self.t, -rinv @ self.v
        )

    def to_flat(self) -> list:
        """Flat JSON array: [q(3), rot row-major (9), t, v(3)]."""
        return [*self.q.tolist(), *self.rot.reshape(-1).tolist(), self.t, *self.v.tolist()]

    @staticmethod
    def from_flat(data) -> "GalileiElement":
        arr = np.asarray(data, dtype=float).reshape(-1)
        if arr.shape != (16,):
            raise InputError("flat Galilei element must have 16 entries")
        return GalileiElement(arr[:3], arr[3:12].reshape(3, 3), arr[12], arr[13:])


def galilei_compose(x: GalileiElement, y: GalileiElement) -> GalileiElement:
    """Product x*y with x acting last (x plays the primed slot)."""
    return GalileiElement(
        x.q + x.rot @ y.q + y.t * x.v,
        x.rot @ y.rot,
        x.t + y.t,
        x.v + x.rot @ y.v,
    )


def pauli_vector(q) -> np.ndarray:
    """q . sigma, the traceless Hermitian matrix carrying a 3-vector."""
    q = np.asarray(q, dtype=float)
    return np.einsum("j,jkl->kl", q, PAULI)


def su2_to_so3(u) -> np.ndarray:
    """The covering homomorphism: the rotation R with (Rq).sigma = u (q.sigma) u*."""
    u = check_su2(u)
    r = np.empty((3, 3))
    for j in range(3):
        m = u @ PAULI[j] @ u.conj().T
        for i in range(3):
            r[i, j] = 0.5 * np.trace(PAULI[i] @ m).real
    return r


def _quaternion_from_rotation(rot) -> np.ndarray:
    """(w, x, y, z) with rot = Xi(w - i(x,y,z).sigma); sign not yet fixed."""
    r = rot
    t = np.trace(r)
    # pivot on the largest diagonal-ish candidate for numerical safety
    cand = [1.0 + t, 1.0 + 2.0 * r[0, 0] - t, 1.0 + 2.0 * r[1, 1] - t, 1.0 + 2.0 * r[2, 2] - t]
    k = int(np.argmax(cand))
    s = np.sqrt(max(cand[k], 0.0))
    if k == 0:
        w = 0.5 * s
        x = (r[2, 1] - r[1, 2]) / (2.0 * s)
        y = (r[0, 2] - r[2, 0]) / (2.0 * s)
        z = (r[1, 0] - r[0, 1]) / (2.0 * s)
    elif k == 1:
        x = 0.5 * s
        w = (r[2, 1] - r[1, 2]) / (2.0 * s)
        y = (r[0, 1] + r[1, 0]) / (2.0 * s)
        z = (r[0, 2] + r[2, 0]) / (2.0 * s)
    elif k == 2:
        y = 0.5 * s
        w = (r[0, 2] - r[2, 0]) / (2.0 * s)
        x = (r[0, 1] + r[1, 0]) / (2.0 * s)
        z = (r[1, 2] + r[2, 1]) / (2.0 * s)
    else:
        z = 0.5 * s
        w = (r[1, 0] - r[0, 1]) / (2.0 * s)
        x = (r[0, 2] + r[2, 0]) / (2.0 * s)
        y = (r[1, 2] + r[2, 1]) / (2.0 * s)
    quat = np.array([w, x, y, z])
    return quat / np.linalg.norm(quat)


def so3_section(rot) -> np.ndarray:
    """A fixed section of the covering map: the SU(2) lift with nonnegative
    scalar part; rotations by pi (scalar part 0) take the lift whose first
    nonzero vector component is positive.  Deterministic but, as any section
    of the double cover, globally discontinuous.
    """
    rot = check_rotation(rot)
    quat = _quaternion_from_rotation(rot)
    w, vec = quat[0], quat[1:]
    if abs(w) <= SECTION_SCALAR_EPS:
        sign = 1.0
        for c in vec:
            if abs(c) > SECTION_SCALAR_EPS:
                sign = 1.0 if c > 0 else -1.0
                break
        quat = quat * sign
    elif w < 0:
        quat = -quat
    w, x, y, z = quat
    return w * np.eye(2, dtype=complex) - 1j * (x * PAULI[0] + y * PAULI[1] + z * PAULI[2])


def rotation_about(axis, angle: float) -> np.ndarray:
    """Rotation matrix by ``angle`` about the unit-normalized ``axis``."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    k = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def orthonormalize_rotation(mat) -> np.ndarray:
    """Project a nearly orthogonal matrix onto SO(3) (polar factor).

    Never applied implicitly: validation rejects out-of-tolerance inputs and
    callers opt into this repair explicitly.
    """
    m = np.asarray(mat, dtype=float)
    if m.shape != (3, 3):
        raise InputError("rotation must be a 3x3 matrix")
    u, _, vt = np.linalg.svd(m)
    r = u @ vt
    if np.linalg.det(r) < 0:
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return r


def random_rotation(rng) -> np.ndarray:
    """Uniform-ish random rotation from a random quaternion."""
    quat = rng.standard_normal(4)
    quat /= np.linalg.norm(quat)
    w, x, y, z = quat
    u = w * np.eye(2, dtype=complex) - 1j * (x * PAULI[0] + y * PAULI[1] + z * PAULI[2])
    return su2_to_so3(u)


def random_su2(rng) -> np.ndarray:
    quat = rng.standard_normal(4)
    quat /= np.linalg.norm(quat)
    w, x, y, z = quat
    return w * np.eye(2, dtype=complex) - 1j * (x * PAULI[0] + y * PAULI[1] + z * PAULI[2])


def random_galilei(rng, scale=1.0) -> GalileiElement:
    return GalileiElement(
        scale * rng.standard_normal(3),
        random_rotation(rng),
        scale * float(rng.standard_normal()),
        scale * rng.standard_normal(3),
    )
