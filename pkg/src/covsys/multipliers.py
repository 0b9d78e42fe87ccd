"""Operator-valued multipliers and scalar cocycles.

A left multiplier assigns a unitary algebra element to each pair of group
elements, normalized on the identity, together with an action whose twist it
measures.  Finite-group multipliers are dense tables validated exhaustively
(through the compiled kernel sweep when available); the continuous examples
(the mass cocycle of the Galilei group, the spin sign of the rotation group)
are closed-form evaluators validated on sampled triples.

Tables whose entries are scalar roots of unity may carry the integer exponent
of each entry.  When the action is trivial and the stored complex values match
the stored exponents bit for bit, validation runs in exact integer arithmetic
and reports residual 0.0 for identities that hold; otherwise the generic
floating-point path runs.  The numeric path is kept as an independent
cross-check of the exact one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from ._linalg import dagger, maxabs
from .algebra import Algebra, Automorphism, make_function_algebra
from .errors import CovsysError, InputError
from .groups import FiniteGroup, GalileiElement, product_cyclic, so3_section
from .serialize import matrix_from_json, matrix_to_json

DEFAULT_TOL = 1e-10
MAX_EXHAUSTIVE_TRIPLES = 10**6


class Action:
    """A family of automorphisms indexed by a finite group.

    Not required to be a homomorphism at construction: multipliers carry
    twisted families, covariance systems check the representation property
    via ``representation_residual``.
    """

    def __init__(self, group: FiniteGroup, algebra: Algebra, autos):
        autos = list(autos)
        if len(autos) != group.order:
            raise InputError("need one automorphism per group element")
        for a in autos:
            if a.algebra != algebra:
                raise InputError("automorphism algebra mismatch")
        self.group = group
        self.algebra = algebra
        self.autos = autos
        self._conjugators = np.ascontiguousarray(
            np.stack([a.conjugator for a in autos]), dtype=complex
        )

    @staticmethod
    def trivial(group: FiniteGroup, algebra: Algebra) -> "Action":
        ident = Automorphism.identity(algebra)
        return Action(group, algebra, [ident] * group.order)

    @staticmethod
    def from_permutations(group: FiniteGroup, algebra: Algebra, perms) -> "Action":
        autos = [Automorphism.from_permutation(algebra, p) for p in perms]
        return Action(group, algebra, autos)

    @staticmethod
    def from_unitaries(group: FiniteGroup, algebra: Algebra, mats) -> "Action":
        autos = [Automorphism.from_unitary(algebra, m) for m in mats]
        return Action(group, algebra, autos)

    @property
    def conjugators(self) -> np.ndarray:
        return self._conjugators

    @property
    def is_trivial(self) -> bool:
        eye = np.eye(self.algebra.dim)
        return all(maxabs(c - eye) == 0.0 for c in self._conjugators)

    def apply(self, x: int, matrix: np.ndarray) -> np.ndarray:
        return self.autos[x].apply_matrix(matrix)

    def apply_inverse(self, x: int, matrix: np.ndarray) -> np.ndarray:
        return self.autos[x].apply_matrix_inverse(matrix)

    def representation_residual(self):
        """Max residual of sigma_e = id and sigma_x sigma_y = sigma_xy on the basis."""
        basis = self.algebra.basis_matrices()
        e = self.group.identity
        res = max(maxabs(self.apply(e, b) - b) for b in basis)
        witness = None
        for x in self.group.elements():
            for y in self.group.elements():
                xy = self.group.mul(x, y)
                for k, b in enumerate(basis):
                    r = maxabs(self.apply(x, self.apply(y, b)) - self.apply(xy, b))
                    if r > res:
                        res = r
                        witness = (x, y, k)
        return res, witness

    def descriptor(self) -> dict:
        if self.is_trivial:
            return {"kind": "trivial"}
        if all(a.perm is not None for a in self.autos):
            return {"kind": "permutation", "perms": [list(a.perm) for a in self.autos]}
        return {"kind": "unitary", "mats": [matrix_to_json(a.conjugator) for a in self.autos]}

    @staticmethod
    def from_descriptor(data: dict, group: FiniteGroup, algebra: Algebra) -> "Action":
        kind = data.get("kind")
        if kind == "trivial":
            return Action.trivial(group, algebra)
        if kind == "permutation":
            return Action.from_permutations(group, algebra, data["perms"])
        if kind == "unitary":
            return Action.from_unitaries(
                group, algebra, [matrix_from_json(m) for m in data["mats"]]
            )
        raise InputError(f"unknown action kind {kind!r}")


@dataclass
class CheckResult:
    check: str
    max_residual: float
    witness: tuple | None
    passed: bool

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "max_residual": self.max_residual,
            "witness_triple": list(self.witness) if self.witness is not None else None,
            "pass": self.passed,
        }


@dataclass
class ValidationReport:
    checks: list
    tol: float
    mode: str                   # "exact-phase" | "numeric"
    exhaustive: bool
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.check == name:
                return c
        raise KeyError(name)

    @property
    def max_residual(self) -> float:
        return max((c.max_residual for c in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "tol": self.tol,
            "mode": self.mode,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
            **({"meta": self.meta} if self.meta else {}),
        }


class MultiplierTable:
    """Dense finite-group multiplier, left or right handed.

    ``phase_order``/``phase_index`` optionally represent every entry as the
    root of unity exp(2*pi*i*index/order) times the identity; the constructor
    verifies that representation against the complex values bitwise.
    """

    def __init__(self, side, group, action, values, phase_order=None, phase_index=None):
        if side not in ("left", "right"):
            raise InputError("side must be 'left' or 'right'")
        values = np.ascontiguousarray(values, dtype=complex)
        d = action.algebra.dim
        if values.shape != (group.order, group.order, d, d):
            raise InputError("multiplier table has wrong shape")
        if phase_order is not None:
            phase_index = np.asarray(phase_index, dtype=np.int64) % int(phase_order)
            if phase_index.shape != (group.order, group.order):
                raise InputError("phase index table has wrong shape")
            expected = _roots_of_unity(int(phase_order))[phase_index]
            expected = expected[:, :, None, None] * np.eye(d)
            if not np.array_equal(values, expected):
                raise InputError("phase indices do not reproduce the table values")
        self.side = side
        self.group = group
        self.action = action
        self.values = values
        self.phase_order = int(phase_order) if phase_order is not None else None
        self.phase_index = phase_index
        values.setflags(write=False)

    @property
    def algebra(self) -> Algebra:
        return self.action.algebra

    def value(self, x: int, y: int) -> np.ndarray:
        return self.values[x, y]

    def with_values(self, values) -> "MultiplierTable":
        """Same side/group/action, new raw values (drops any exact phases)."""
        return MultiplierTable(self.side, self.group, self.action, values)

    def descriptor(self) -> dict:
        d = {
            "side": self.side,
            "group": self.group.descriptor(),
            "algebra": self.algebra.descriptor(),
            "action": self.action.descriptor(),
            "values": [[matrix_to_json(self.values[x, y]) for y in self.group.elements()]
                       for x in self.group.elements()],
        }
        if self.phase_order is not None:
            d["phase_order"] = self.phase_order
            d["phase_index"] = self.phase_index.tolist()
        return d

    @staticmethod
    def from_descriptor(data: dict) -> "MultiplierTable":
        group = FiniteGroup.from_descriptor(data["group"])
        algebra = Algebra.from_descriptor(data["algebra"])
        action = Action.from_descriptor(data.get("action", {"kind": "trivial"}), group, algebra)
        n, d = group.order, algebra.dim
        values = np.empty((n, n, d, d), dtype=complex)
        for x in range(n):
            for y in range(n):
                values[x, y] = matrix_from_json(data["values"][x][y])
        return MultiplierTable(
            data.get("side", "left"), group, action, values,
            phase_order=data.get("phase_order"), phase_index=data.get("phase_index"),
        )


def _roots_of_unity(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def trivial_multiplier(group: FiniteGroup, action: Action, side="left") -> MultiplierTable:
    d = action.algebra.dim
    values = np.broadcast_to(np.eye(d, dtype=complex), (group.order, group.order, d, d)).copy()
    idx = np.zeros((group.order, group.order), dtype=np.int64)
    return MultiplierTable(side, group, action, values, phase_order=1, phase_index=idx)


def pair_index(n: int, a: int, b: int) -> int:
    """Index of (a, b) in Z_n x Z_n under the direct-product ordering."""
    return (a % n) * n + (b % n)


def index_pair(n: int, idx: int) -> tuple:
    return idx // n, idx % n


def heisenberg_multiplier(n: int):
    """The Weyl/Heisenberg multiplier on Z_n x Z_n over the scalars.

    xi((a,b), (a',b')) = exp(2*pi*i * a*b' / n), a bilinear-exponent scalar
    cocycle with trivial action; exponents are stored exactly.  In the
    associated projective representation the generators satisfy
    U(1,0) U(0,1) = exp(2*pi*i/n) U(0,1) U(1,0).

    Returns (group, left multiplier).
    """
    if n < 2:
        raise InputError("Heisenberg multiplier needs n >= 2")
    group = product_cyclic(n, n)
    algebra = make_function_algebra(["*"])
    action = Action.trivial(group, algebra)
    ab = np.arange(n * n)
    a, b = ab // n, ab % n
    idx = (a[:, None] * b[None, :]) % n
    values = _roots_of_unity(n)[idx][:, :, None, None] * np.eye(1)
    xi = MultiplierTable("left", group, action, values, phase_order=n, phase_index=idx)
    return group, xi


# ---------------------------------------------------------------------------
# validation


def _normalization_residual(table: MultiplierTable):
    e = table.group.identity
    eye = np.eye(table.algebra.dim)
    res, witness = 0.0, None
    for x in table.group.elements():
        for pair in ((x, e), (e, x)):
            r = maxabs(table.values[pair] - eye)
            if r > res:
                res, witness = r, (pair[0], pair[1], -1)
    return res, witness


def _unitarity_residual(table: MultiplierTable):
    vals = table.values
    eye = np.eye(table.algebra.dim)
    uu = np.einsum("xyba,xybc->xyac", vals.conj(), vals, optimize=True)
    diff = np.abs(uu - eye)
    x, y = np.unravel_index(int(np.argmax(diff)), diff.shape)[:2]
    return float(diff.max()), (int(x), int(y), -1)


def _twisted_action_residual_left(table: MultiplierTable):
    """projtrans: sigma_x sigma_y a = xi(x,y) (sigma_xy a) xi(x,y)^* over basis a."""
    group, action = table.group, table.action
    basis = action.algebra.basis_matrices()
    res, witness = 0.0, None
    sb = np.stack([[action.apply(x, b) for b in basis] for x in group.elements()])
    for x in group.elements():
        for y in group.elements():
            xy = group.mul(x, y)
            u = table.values[x, y]
            lhs = np.stack([action.apply(x, m) for m in sb[y]])
            rhs = np.einsum("ab,kbc,dc->kad", u, sb[xy], u.conj(), optimize=True)
            r = maxabs(lhs - rhs)
            if r > res:
                res, witness = r, (x, y, -1)
    return res, witness


def _twisted_action_residual_right(table: MultiplierTable):
    """sigma_x sigma_y a = sigma_xy( zeta(x,y) a zeta(x,y)^* ) over basis a."""
    group, action = table.group, table.action
    basis = action.algebra.basis_matrices()
    res, witness = 0.0, None
    sb = np.stack([[action.apply(x, b) for b in basis] for x in group.elements()])
    for x in group.elements():
        for y in group.elements():
            xy = group.mul(x, y)
            u = table.values[x, y]
            lhs = np.stack([action.apply(x, m) for m in sb[y]])
            inner = np.einsum("ab,kbc,dc->kad", u, basis, u.conj(), optimize=True)
            rhs = np.stack([action.apply(xy, m) for m in inner])
            r = maxabs(lhs - rhs)
            if r > res:
                res, witness = r, (x, y, -1)
    return res, witness


def _sampled_triples(group: FiniteGroup, sample, seed, count=20000):
    if sample is not None:
        triples = np.asarray(list(sample), dtype=np.int64)
        if triples.ndim != 2 or triples.shape[1] != 3 or triples.shape[0] == 0:
            raise InputError("sample must be a nonempty list of index triples")
        return triples, None
    rng = np.random.default_rng(seed)
    return rng.integers(0, group.order, size=(count, 3)), seed


def _cocycle_residual_sampled_left(table, triples):
    res, witness = 0.0, None
    for x, y, z in triples:
        lhs = table.action.apply(x, table.values[y, z])
        xy, yz = table.group.mul(x, y), table.group.mul(y, z)
        rhs = table.values[x, y] @ table.values[xy, z] @ dagger(table.values[x, yz])
        r = maxabs(lhs - rhs)
        if r > res:
            res, witness = r, (int(x), int(y), int(z))
    return res, witness


def _cocycle_residual_sampled_right(table, triples):
    res, witness = 0.0, None
    for x, y, z in triples:
        lhs = table.action.apply_inverse(y, table.values[z, x])
        zx, xy = table.group.mul(z, x), table.group.mul(x, y)
        rhs = dagger(table.values[zx, y]) @ table.values[z, xy] @ table.values[x, y]
        r = maxabs(lhs - rhs)
        if r > res:
            res, witness = r, (int(x), int(y), int(z))
    return res, witness


def _phase_gap(order: int, mismatch_exponents) -> float:
    # modulus of exp(2*pi*i*k/order) - 1 for the worst mismatching exponent k
    worst = max(
        abs(2.0 * np.sin(np.pi * (int(k) % order) / order)) for k in mismatch_exponents
    )
    return float(worst)


def _exact_left_report(table: MultiplierTable, tol: float) -> ValidationReport:
    group, idx, n = table.group, table.phase_index, table.phase_order
    e = group.identity
    checks = []

    norm_bad = [k for k in np.concatenate([idx[:, e], idx[e, :]]) if k % n != 0]
    checks.append(_exact_check("normalization", norm_bad, n, None, tol))
    checks.append(CheckResult("unitarity", 0.0, None, True))

    t = group.table
    lhs = idx[None, :, :]                        # idx[y,z]
    rhs = idx[:, :, None] + idx[t][:, :, :] - idx[:, t]  # idx[x,y]+idx[xy,z]-idx[x,yz]
    mism = (rhs - lhs) % n
    bad = np.argwhere(mism != 0)
    if len(bad) == 0:
        checks.append(CheckResult("cocycle", 0.0, None, True))
    else:
        gaps = 2.0 * np.abs(np.sin(np.pi * mism[mism != 0] / n))
        worst_at = bad[int(np.argmax(gaps))]
        res = float(np.max(gaps))
        checks.append(CheckResult("cocycle", res, tuple(int(v) for v in worst_at), res <= tol))

    # scalar values with trivial action: the twisted-action identity is literal
    checks.append(CheckResult("twisted-action", 0.0, None, True))
    return ValidationReport(checks, tol, "exact-phase", exhaustive=True)


def _exact_check(name, bad_exponents, order, witness, tol):
    if not bad_exponents:
        return CheckResult(name, 0.0, witness, True)
    res = _phase_gap(order, bad_exponents)
    return CheckResult(name, res, witness, res <= tol)


def _exact_right_report(table: MultiplierTable, tol: float) -> ValidationReport:
    group, idx, n = table.group, table.phase_index, table.phase_order
    e = group.identity
    checks = []
    norm_bad = [k for k in np.concatenate([idx[:, e], idx[e, :]]) if k % n != 0]
    checks.append(_exact_check("normalization", norm_bad, n, None, tol))
    checks.append(CheckResult("unitarity", 0.0, None, True))

    t = group.table
    # sigma trivial: idx[z,x] = -idx[zx,y] + idx[z,xy] + idx[x,y] for all x,y,z
    lhs = idx.T[:, None, :]                       # [x,y,z] -> idx[z,x]
    zx = idx[t, :]                                # [z,x,y] -> idx[zx,y]
    rhs = -np.transpose(zx, (1, 2, 0)) + np.transpose(idx[:, t], (1, 2, 0)) + idx[:, :, None]
    mism = (rhs - lhs) % n
    bad = np.argwhere(mism != 0)
    if len(bad) == 0:
        checks.append(CheckResult("cocycle", 0.0, None, True))
    else:
        gaps = 2.0 * np.abs(np.sin(np.pi * mism[mism != 0] / n))
        worst_at = bad[int(np.argmax(gaps))]
        res = float(np.max(gaps))
        checks.append(CheckResult("cocycle", res, tuple(int(v) for v in worst_at), res <= tol))
    checks.append(CheckResult("twisted-action", 0.0, None, True))
    return ValidationReport(checks, tol, "exact-phase", exhaustive=True)


def _exact_applicable(table: MultiplierTable) -> bool:
    return table.phase_order is not None and table.action.is_trivial


def validate_left(xi: MultiplierTable, sample=None, tol=DEFAULT_TOL, seed=0) -> ValidationReport:
    """Check normalization, unitarity, the cocycle identity, and the twisted
    action identity of a left multiplier.

    Exhaustive over all triples when N^3 <= 1e6 and no sample is given;
    exact integer arithmetic when the table carries verified phase exponents
    and the action is trivial.
    """
    if xi.side != "left":
        raise InputError("expected a left multiplier")
    if _exact_applicable(xi) and sample is None:
        return _exact_left_report(xi, tol)
    return _numeric_report(xi, sample, tol, seed, side="left")


def validate_right(zeta: MultiplierTable, sample=None, tol=DEFAULT_TOL, seed=0) -> ValidationReport:
    """Right-handed counterpart of validate_left."""
    if zeta.side != "right":
        raise InputError("expected a right multiplier")
    if _exact_applicable(zeta) and sample is None:
        return _exact_right_report(zeta, tol)
    return _numeric_report(zeta, sample, tol, seed, side="right")


def _numeric_report(table, sample, tol, seed, side) -> ValidationReport:
    n = table.group.order
    checks = []
    res, wit = _normalization_residual(table)
    checks.append(CheckResult("normalization", res, wit, res <= tol))
    res, wit = _unitarity_residual(table)
    checks.append(CheckResult("unitarity", res, wit, res <= tol))

    exhaustive = sample is None and n**3 <= MAX_EXHAUSTIVE_TRIPLES
    used_seed = None
    if exhaustive:
        kernel = (kernels.cocycle_residual_left if side == "left"
                  else kernels.cocycle_residual_right)
        res, wit = kernel(table.values, table.action.conjugators,
                          np.ascontiguousarray(table.group.table))
    else:
        triples, used_seed = _sampled_triples(table.group, sample, seed)
        sampler = (_cocycle_residual_sampled_left if side == "left"
                   else _cocycle_residual_sampled_right)
        res, wit = sampler(table, triples)
    checks.append(CheckResult("cocycle", float(res), wit, res <= tol))

    action_check = (_twisted_action_residual_left if side == "left"
                    else _twisted_action_residual_right)
    res, wit = action_check(table)
    checks.append(CheckResult("twisted-action", res, wit, res <= tol))
    return ValidationReport(checks, tol, "numeric", exhaustive=exhaustive, seed=used_seed)


# ---------------------------------------------------------------------------
# left <-> right conversion


def left_to_right(xi: MultiplierTable) -> MultiplierTable:
    """zeta(x, y) = sigma_{xy}^{-1} xi(x, y)."""
    if xi.side != "left":
        raise InputError("expected a left multiplier")
    if xi.phase_order is not None:
        # scalar multiples of the identity are fixed by every automorphism
        return MultiplierTable("right", xi.group, xi.action, xi.values,
                               phase_order=xi.phase_order, phase_index=xi.phase_index)
    group, action = xi.group, xi.action
    values = np.empty_like(xi.values)
    for x in group.elements():
        for y in group.elements():
            values[x, y] = action.apply_inverse(group.mul(x, y), xi.values[x, y])
    return MultiplierTable("right", group, action, values)


def right_to_left(zeta: MultiplierTable) -> MultiplierTable:
    """xi(x, y) = sigma_{xy} zeta(x, y)."""
    if zeta.side != "right":
        raise InputError("expected a right multiplier")
    if zeta.phase_order is not None:
        return MultiplierTable("left", zeta.group, zeta.action, zeta.values,
                               phase_order=zeta.phase_order, phase_index=zeta.phase_index)
    group, action = zeta.group, zeta.action
    values = np.empty_like(zeta.values)
    for x in group.elements():
        for y in group.elements():
            values[x, y] = action.apply(group.mul(x, y), zeta.values[x, y])
    return MultiplierTable("left", group, action, values)


# ---------------------------------------------------------------------------
# closed-form cocycles of the continuous examples


def galilei_cocycle(kappa: float, x: GalileiElement, y: GalileiElement) -> complex:
    """The mass cocycle of the Galilei group at parameter kappa (mass in
    natural units): a unit-modulus scalar, identically 1 on pure shifts."""
    exponent = (
        0.5 * x.t * float(y.v @ y.v)
        + x.t * float(x.v @ (x.rot @ y.v))
        - float(x.v @ (x.rot @ (y.q - y.t * y.v)))
    )
    return complex(np.exp(-1j * kappa * exponent))


def spin_cocycle(rot1, rot2) -> float:
    """The sign relating section lifts: v(R1) v(R2) = s * v(R1 R2), s = +-1."""
    v1 = so3_section(rot1)
    v2 = so3_section(rot2)
    v12 = so3_section(np.asarray(rot1) @ np.asarray(rot2))
    prod = v1 @ v2
    s = complex(np.trace(dagger(v12) @ prod) / 2.0)
    if abs(abs(s) - 1.0) > 1e-6:
        raise CovsysError(f"section product is not proportional to the lift: |s|={abs(s)}")
    snap = 1.0 if abs(s - 1.0) < abs(s + 1.0) else -1.0
    if abs(s - snap) > 1e-10:
        raise CovsysError(f"section sign {s} not within 1e-10 of +-1")
    if maxabs(prod - snap * v12) > 1e-9:
        raise CovsysError("section lifts are inconsistent beyond tolerance")
    return snap


def scalar_cocycle_residual(value, compose, triples) -> float:
    """Max residual of xi(x,y) xi(xy,z) = xi(y,z) xi(x,yz) for a scalar
    2-cocycle given by closed-form ``value`` over explicit ``triples``."""
    worst = 0.0
    for x, y, z in triples:
        lhs = value(x, y) * value(compose(x, y), z)
        rhs = value(y, z) * value(x, compose(y, z))
        worst = max(worst, abs(lhs - rhs))
    return worst
