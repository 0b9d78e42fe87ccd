"""Quantum spacetime at the kernel level.

The configuration manifold consists of pairs (e, m) of 3-vectors with equal
lengths and unit dot product (up to sign); each point carries the antisymmetric
commutator tensor eps(e, m) and, through a metric gamma, the position-to-wave-
vector map eta.  The quasifree state is a finite convex combination of atoms,
each an explicit Lorentz transport of the base point with T = Lam^T C Lam, and
its two-point kernel is an oscillatory eps-phase times a Gaussian damping.

Everything here is a closed formula; the single numerical decision is the
finite-difference step of the moment oracle, which differentiates the kernel
directly and must reproduce the analytic moment matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import dagger, maxabs
from .errors import InputError, QuadratureError
from .kernels import quasifree_gram as _gram_kernel
from .serialize import real_matrix_from_json

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])
SIGMA_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class SigmaPoint:
    """A point (e, m) of the configuration manifold."""

    e: tuple
    m: tuple

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float).reshape(3)
        m = np.asarray(self.m, dtype=float).reshape(3)
        if abs(float(e @ e) - float(m @ m)) > SIGMA_TOL * max(1.0, float(e @ e)):
            raise InputError("|e|^2 and |m|^2 differ beyond tolerance")
        if abs(abs(float(e @ m)) - 1.0) > 1e-10:
            raise InputError("e.m must be +-1")
        object.__setattr__(self, "e", tuple(float(v) for v in e))
        object.__setattr__(self, "m", tuple(float(v) for v in m))

    @property
    def sign(self) -> float:
        """The orientation e.m = +-1."""
        return 1.0 if float(np.dot(self.e, self.m)) > 0 else -1.0


BASE_POINT = SigmaPoint((1.0, 0.0, 0.0), (1.0, 0.0, 0.0))


def epsilon_from_vectors(e, m) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    m = np.asarray(m, dtype=float)
    return np.array([
        [0.0, e[0], e[1], e[2]],
        [-e[0], 0.0, m[2], -m[1]],
        [-e[1], -m[2], 0.0, m[0]],
        [-e[2], m[1], -m[0], 0.0],
    ])


def epsilon_matrix(p: SigmaPoint) -> np.ndarray:
    """The antisymmetric commutator tensor of the point; invertible since its
    Pfaffian is e.m = +-1."""
    return epsilon_from_vectors(p.e, p.m)


def sigma_point_from_epsilon(mat, tol=1e-10) -> SigmaPoint:
    """Invert the parametrization: read (e, m) back from a 4x4 matrix."""
    mat = np.asarray(mat, dtype=float)
    if mat.shape != (4, 4) or maxabs(mat + mat.T) > tol:
        raise InputError("matrix is not antisymmetric 4x4")
    e = mat[0, 1:4]
    m = np.array([mat[2, 3], -mat[1, 3], mat[1, 2]])
    return SigmaPoint(tuple(e), tuple(m))


def eta_matrix(p: SigmaPoint, gamma) -> np.ndarray:
    """eta = (e.m) eps^{-1} gamma, mapping position shifts to wave vectors."""
    gamma = np.asarray(gamma, dtype=float)
    eps = epsilon_matrix(p)
    return p.sign * np.linalg.solve(eps, gamma)


def check_lorentz(lam, tol=1e-10) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (4, 4):
        raise InputError("Lorentz matrix must be 4x4")
    if maxabs(lam.T @ MINKOWSKI @ lam - MINKOWSKI) > tol:
        raise InputError("matrix does not preserve the Minkowski metric")
    if abs(np.linalg.det(lam) - 1.0) > 1e-8:
        raise InputError("matrix is not proper (det != +1)")
    return lam


def lorentz_boost(axis: int, rapidity: float) -> np.ndarray:
    """Boost along spatial axis 1..3 with the given rapidity."""
    if axis not in (1, 2, 3):
        raise InputError("boost axis must be 1, 2 or 3")
    lam = np.eye(4)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    lam[0, 0] = lam[axis, axis] = ch
    lam[0, axis] = lam[axis, 0] = sh
    return lam


def lorentz_rotation(axis: int, angle: float) -> np.ndarray:
    """Spatial rotation about axis 1..3 embedded in the Lorentz group."""
    if axis not in (1, 2, 3):
        raise InputError("rotation axis must be 1, 2 or 3")
    a, b = [i for i in (1, 2, 3) if i != axis]
    lam = np.eye(4)
    c, s = np.cos(angle), np.sin(angle)
    lam[a, a] = lam[b, b] = c
    lam[a, b] = -s
    lam[b, a] = s
    return lam


def transport_T(c_seed, lam):
    """Transport the seed matrix along a proper Lorentz element: the reached
    point is read off Lam^T eps0 Lam and T = Lam^T C Lam."""
    lam = check_lorentz(lam)
    c_seed = np.asarray(c_seed, dtype=float)
    eps0 = epsilon_matrix(BASE_POINT)
    point = sigma_point_from_epsilon(lam.T @ eps0 @ lam)
    tmat = lam.T @ c_seed @ lam
    return point, tmat


@dataclass(frozen=True)
class Atom:
    """One atom of the discretized measure: a transported point with weight."""

    lorentz: np.ndarray
    weight: float
    point: SigmaPoint
    epsilon: np.ndarray
    tmat: np.ndarray

    @staticmethod
    def from_transport(c_seed, lam, weight) -> "Atom":
        point, tmat = transport_T(c_seed, lam)
        return Atom(np.asarray(lam, dtype=float), float(weight), point,
                    epsilon_matrix(point), tmat)

    def psd_margin(self) -> float:
        """Smallest eigenvalue of T + (i/2)(e.m) eps; nonnegative for a
        well-formed quasifree state."""
        h = self.tmat + 0.5j * self.point.sign * self.epsilon
        return float(np.linalg.eigvalsh(0.5 * (h + dagger(h)))[0])


class QstParams:
    """gamma, the seed matrix C, and the atomic measure."""

    def __init__(self, gamma=None, c_seed=None, atoms=None):
        self.gamma = np.asarray(MINKOWSKI if gamma is None else gamma, dtype=float)
        if self.gamma.shape != (4, 4):
            raise InputError("gamma must be 4x4")
        if abs(np.linalg.det(self.gamma)) < 1e-12:
            raise InputError("gamma must be invertible")
        self.c_seed = np.asarray(0.5 * np.eye(4) if c_seed is None else c_seed, dtype=float)
        if self.c_seed.shape != (4, 4) or maxabs(self.c_seed - self.c_seed.T) > 1e-12:
            raise InputError("C must be a symmetric 4x4 matrix")
        if float(np.linalg.eigvalsh(self.c_seed)[0]) < -1e-12:
            raise InputError("C must be positive semidefinite")
        specs = atoms if atoms is not None else [(np.eye(4), 1.0)]
        self.atoms = [Atom.from_transport(self.c_seed, lam, w) for lam, w in specs]
        weights = np.array([a.weight for a in self.atoms])
        if np.any(weights <= 0):
            raise InputError("atom weights must be strictly positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise InputError("atom weights must sum to 1")

    def psd_margin(self) -> float:
        """min over atoms of the T + (i/2)(e.m) eps spectral margin; a
        negative value flags a kernel that cannot be positive definite."""
        return min(a.psd_margin() for a in self.atoms)

    def etas(self) -> np.ndarray:
        return np.stack([eta_matrix(a.point, self.gamma) for a in self.atoms])

    @staticmethod
    def from_config(config: dict) -> "QstParams":
        allowed = {"gamma", "C", "atoms"}
        unknown = set(config) - allowed
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        gamma = real_matrix_from_json(config["gamma"], (4, 4)) if "gamma" in config else None
        c_seed = real_matrix_from_json(config["C"], (4, 4)) if "C" in config else None
        atoms = None
        if "atoms" in config:
            atoms = []
            for entry in config["atoms"]:
                bad = set(entry) - {"lorentz", "weight"}
                if bad:
                    raise InputError(f"unknown atom keys: {sorted(bad)}")
                atoms.append((real_matrix_from_json(entry["lorentz"], (4, 4)),
                              float(entry["weight"])))
        return QstParams(gamma, c_seed, atoms)

    def to_config(self) -> dict:
        return {
            "gamma": self.gamma.tolist(),
            "C": self.c_seed.tolist(),
            "atoms": [{"lorentz": a.lorentz.tolist(), "weight": a.weight}
                      for a in self.atoms],
        }


def _split_point(x):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (8,):
        raise InputError("a Weyl point is an 8-vector (k, q)")
    return x[:4], x[4:]


def qst_multiplier(p: SigmaPoint, gamma, x, xp) -> complex:
    """The scalar multiplier exp((i/2)(e.m)(k + eta q) . eps (k' + eta q'));
    unit modulus, trivial when either argument vanishes."""
    k, q = _split_point(x)
    kp, qp = _split_point(xp)
    eps = epsilon_matrix(p)
    eta = eta_matrix(p, gamma)
    z = k + eta @ q
    zp = kp + eta @ qp
    return complex(np.exp(0.5j * p.sign * float(z @ eps @ zp)))


def quasifree_kernel(params: QstParams, f, x, xp) -> complex:
    """The two-point kernel of the quasifree state at Weyl points x, x'.

    f weighs the atoms: None for the constant 1, a callable on SigmaPoint, or
    a per-atom array of values.
    """
    k, q = _split_point(x)
    kp, qp = _split_point(xp)
    fvals = _atom_values(params, f)
    total = 0.0 + 0.0j
    for atom, fv in zip(params.atoms, fvals):
        eta = eta_matrix(atom.point, params.gamma)
        z = k + eta @ q
        zp = kp + eta @ qp
        phase = 0.5 * atom.point.sign * float(z @ atom.epsilon @ zp)
        diff = z - zp
        damp = 0.5 * float(diff @ atom.tmat @ diff)
        total += atom.weight * fv * np.exp(1j * phase - damp)
    return complex(total)


def _atom_values(params, f):
    if f is None:
        return np.ones(len(params.atoms), dtype=complex)
    if callable(f):
        return np.array([f(a.point) for a in params.atoms], dtype=complex)
    vals = np.asarray(f, dtype=complex).reshape(-1)
    if vals.shape != (len(params.atoms),):
        raise InputError("per-atom values must match the number of atoms")
    return vals


def quasifree_gram(params: QstParams, points) -> np.ndarray:
    """Gram matrix G_jl = kernel(x_j, x_l) with f = 1, assembled by the
    compiled kernel when available."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 8 or pts.shape[0] < 1:
        raise InputError("points must be a (P, 8) array")
    nat = len(params.atoms)
    zpts = np.empty((nat, pts.shape[0], 4))
    eps = np.empty((nat, 4, 4))
    tmat = np.empty((nat, 4, 4))
    signs = np.empty(nat)
    weights = np.empty(nat)
    for i, atom in enumerate(params.atoms):
        eta = eta_matrix(atom.point, params.gamma)
        zpts[i] = pts[:, :4] + pts[:, 4:] @ eta.T
        eps[i] = atom.epsilon
        tmat[i] = atom.tmat
        signs[i] = atom.point.sign
        weights[i] = atom.weight
    return _gram_kernel(np.ascontiguousarray(zpts), np.ascontiguousarray(eps),
                        np.ascontiguousarray(tmat), signs, weights)


def gram_positivity(params: QstParams, points) -> float:
    """Smallest eigenvalue of the quasifree Gram matrix over the points."""
    if np.asarray(points).shape[0] < 2:
        raise InputError("need at least two points")
    g = quasifree_gram(params, points)
    return float(np.linalg.eigvalsh(0.5 * (g + dagger(g)))[0])


def random_weyl_points(rng, count: int, scale: float = 1.0) -> np.ndarray:
    return scale * rng.standard_normal((count, 8))


# ---------------------------------------------------------------------------
# commutator structure


def commutator_forms(p: SigmaPoint, gamma):
    """The three commutator matrices (QQ, KK, KQ):
    [Q_mu, Q_nu] = -i (e.m) (g^-1 eps g~^-1), [K_mu, K_nu] = i (e.m) eps^-1,
    [K_mu, Q_nu] = -i (g^-1)_{nu,mu}."""
    gamma = np.asarray(gamma, dtype=float)
    eps = epsilon_matrix(p)
    ginv = np.linalg.inv(gamma)
    qq = -1j * p.sign * ginv @ eps @ ginv.T
    kk = 1j * p.sign * np.linalg.inv(eps)
    kq = -1j * ginv.T
    return qq, kk, kq


def commutator_forms_from_multiplier(p: SigmaPoint, gamma, delta: float = 0.5):
    """Independent route to the same three matrices: sample the multiplier at
    scaled basis directions, read off the antisymmetrized exponent as an 8x8
    bilinear form, and pull it back through the Weyl generator substitution
    alpha = -i gamma~ k, beta = i gamma q.

    The multiplier is treated as a black box; the form is exactly bilinear so
    the sampling is exact up to round-off (delta stays well inside the
    principal branch of the phase).
    """
    gamma = np.asarray(gamma, dtype=float)
    m8 = np.empty((8, 8))
    basis = np.eye(8) * delta
    for i in range(8):
        for j in range(8):
            z = qst_multiplier(p, gamma, basis[i], basis[j]) \
                * np.conj(qst_multiplier(p, gamma, basis[j], basis[i]))
            phase = float(np.angle(z))
            if abs(phase) > 2.5:
                raise InputError("sampling step too large: phase near branch cut")
            m8[i, j] = phase / delta**2
    m_kk, m_kq = m8[:4, :4], m8[:4, 4:]
    m_qk, m_qq = m8[4:, :4], m8[4:, 4:]
    ginv = np.linalg.inv(gamma)
    ginv_t = ginv.T
    qq = -1j * ginv @ m_kk @ ginv_t
    kk = -1j * ginv_t @ m_qq @ ginv
    kq = 1j * ginv_t @ m_qk @ ginv_t
    return qq, kk, kq


# ---------------------------------------------------------------------------
# moments


def second_moments(params: QstParams) -> np.ndarray:
    """(Q_nu Q_mu Omega, Omega) as a 4x4 matrix: the atom average of
    g^-1 (T + (i/2)(e.m) eps) g~^-1."""
    ginv = np.linalg.inv(params.gamma)
    out = np.zeros((4, 4), dtype=complex)
    for atom in params.atoms:
        core = atom.tmat + 0.5j * atom.point.sign * atom.epsilon
        out += atom.weight * (ginv @ core @ ginv.T)
    return out


@dataclass
class MomentEstimate:
    """Finite-difference estimate of the position moments from the kernel."""

    matrix: np.ndarray          # Richardson-extrapolated second moments
    raw: np.ndarray             # plain central-difference value at step h
    first: np.ndarray           # first-moment estimate (should vanish)
    step: float
    slope: float                # observed convergence order, ~2 for h^2 bias
    indicator: float            # disagreement of successive extrapolations

    def __array__(self, dtype=None, copy=None):
        arr = np.asarray(self.matrix)
        return arr.astype(dtype) if dtype is not None else arr


def moments_via_kernel(params: QstParams, h: float = 1e-3) -> MomentEstimate:
    """Differentiate the f = 1 kernel at the origin to estimate the first and
    second position moments; central differences with Richardson refinement.

    The mixed second derivative in (k, k') equals gamma S gamma~ with S the
    moment matrix, so S is recovered by the inverse substitution.  Raises
    QuadratureError when the h^2 convergence pattern is not observed.
    """
    if not (1e-4 <= h <= 1e-2):
        raise InputError("step must lie in [1e-4, 1e-2]")

    def kernel_at(k, kp):
        x = np.concatenate([k, np.zeros(4)])
        xp = np.concatenate([kp, np.zeros(4)])
        return quasifree_kernel(params, None, x, xp)

    def mixed_second(step):
        d2 = np.empty((4, 4), dtype=complex)
        for a in range(4):
            ea = np.zeros(4)
            ea[a] = step
            for b in range(4):
                eb = np.zeros(4)
                eb[b] = step
                d2[a, b] = (kernel_at(ea, eb) - kernel_at(ea, -eb)
                            - kernel_at(-ea, eb) + kernel_at(-ea, -eb)) / (4.0 * step**2)
        return d2

    ginv = np.linalg.inv(params.gamma)
    s_h = ginv @ mixed_second(h) @ ginv.T
    s_h2 = ginv @ mixed_second(h / 2.0) @ ginv.T
    s_h4 = ginv @ mixed_second(h / 4.0) @ ginv.T
    r1 = (4.0 * s_h2 - s_h) / 3.0
    r2 = (4.0 * s_h4 - s_h2) / 3.0
    d1, d2_ = maxabs(s_h - s_h2), maxabs(s_h2 - s_h4)
    slope = float(np.log2(d1 / d2_)) if d2_ > 1e-14 and d1 > 1e-14 else 2.0
    indicator = maxabs(r2 - r1)
    if indicator > 1e-6 and not (1.0 <= slope <= 3.0):
        raise QuadratureError(
            f"moment differences do not converge at second order (slope {slope:.2f})",
            estimate=r2, indicator=indicator)

    grad = np.empty(4, dtype=complex)
    zero = np.zeros(4)
    for a in range(4):
        ea = np.zeros(4)
        ea[a] = h
        grad[a] = (kernel_at(ea, zero) - kernel_at(-ea, zero)) / (2.0 * h)
    first = -1j * (ginv @ grad)
    return MomentEstimate(matrix=r2, raw=s_h, first=first, step=h,
                          slope=slope, indicator=float(indicator))
