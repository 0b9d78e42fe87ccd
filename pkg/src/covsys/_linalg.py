"""Small dense linear-algebra helpers shared across modules."""

from __future__ import annotations

import numpy as np


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def maxabs(m):
    """Entrywise sup norm; 0.0 for empty arrays."""
    m = np.asarray(m)
    return 0.0 if m.size == 0 else float(np.max(np.abs(m)))


def specnorm(m):
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(m), ord=2))


def is_unitary(m, tol=1e-12):
    m = np.asarray(m)
    return maxabs(dagger(m) @ m - np.eye(m.shape[-1])) <= tol


def hermitian_part(m):
    return 0.5 * (m + dagger(m))


def eigh_range(m):
    """(min, max) eigenvalue of a Hermitian matrix."""
    w = np.linalg.eigvalsh(hermitian_part(np.asarray(m, dtype=complex)))
    return float(w[0]), float(w[-1])


def random_unitary(rng, n):
    """Haar-ish unitary from the QR factorization of a Ginibre matrix."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def argmax_abs(m):
    """Index tuple of the entry with the largest modulus."""
    m = np.asarray(m)
    return np.unravel_index(int(np.argmax(np.abs(m))), m.shape)
