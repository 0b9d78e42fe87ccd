"""Vectorized numpy fallback for the hot kernels.

Same signatures and semantics as the compiled backend in ``_ckernels``; all
functions are pure and reduce in fixed index order, so results are
reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np


def _dag(m):
    return np.conj(np.swapaxes(m, -1, -2))


def cocycle_residual_left(values, conj, table):
    """Exhaustive sweep of the left-multiplier cocycle identity.

    values[x, y] are d x d unitaries, conj[x] implements the action by
    conjugation, table is the group law.  Returns the max entrywise residual of

        sigma_x xi(y, z)  vs  xi(x, y) xi(xy, z) xi(x, yz)^*

    over all triples, plus the witness triple.
    """
    n = table.shape[0]
    best = -1.0
    witness = (0, 0, 0)
    for x in range(n):
        cx = conj[x]
        lhs = np.einsum("ab,yzbc,dc->yzad", cx, values, cx.conj(), optimize=True)
        a = values[x]                       # (y,d,d)
        b = values[table[x]]                # (y,z,d,d)
        c = values[x][table]                # (y,z,d,d): xi(x, yz)
        rhs = np.einsum("yab,yzbc,yzdc->yzad", a, b, c.conj(), optimize=True)
        diff = np.abs(lhs - rhs)
        flat = int(np.argmax(diff))
        val = float(diff.reshape(-1)[flat])
        if val > best:
            y, z = np.unravel_index(flat, diff.shape)[:2]
            best = val
            witness = (x, int(y), int(z))
    return best, witness


def cocycle_residual_right(values, conj, table):
    """Exhaustive sweep of the right-multiplier identity

        sigma_y^{-1} zeta(z, x)  vs  zeta(zx, y)^* zeta(z, xy) zeta(x, y)

    over all triples (x, y, z); returns (max residual, witness)."""
    n = table.shape[0]
    best = -1.0
    witness = (0, 0, 0)
    for y in range(n):
        cy = conj[y]
        lhs = np.einsum("ba,zxbc,cd->zxad", cy.conj(), values, cy, optimize=True)
        a = values[table, y]                 # (z,x,d,d): zeta(zx, y)
        b = values[:, table[:, y]]           # (z,x,d,d): zeta(z, xy)
        c = values[:, y]                     # (x,d,d):   zeta(x, y)
        rhs = np.einsum("zxba,zxbc,xcd->zxad", a.conj(), b, c, optimize=True)
        diff = np.abs(lhs - rhs)
        flat = int(np.argmax(diff))
        val = float(diff.reshape(-1)[flat])
        if val > best:
            z, x = np.unravel_index(flat, diff.shape)[:2]
            best = val
            witness = (int(x), y, int(z))
    return best, witness


def twisted_convolve(fvals, gsig, xi, table, inverse):
    """(f x g)(x) = sum_y f(y) xi(y, y^-1 x) sigma_y[g(y^-1 x)].

    gsig[y, z] must hold sigma_y applied to g(z)."""
    n = table.shape[0]
    zidx = table[inverse]                    # zidx[y, x] = y^-1 x
    rows = np.arange(n)[:, None]
    xi_g = xi[rows, zidx]
    gs_g = gsig[rows, zidx]
    return np.einsum("yab,yxbc,yxcd->xad", fvals, xi_g, gs_g, optimize=True)


def quasifree_gram(zpts, eps, tmat, signs, weights):
    """Gram matrix of the quasifree kernel over Weyl points.

    zpts[a, j] is the reduced point k_j + eta_a q_j of atom a; per atom the
    kernel is exp(i/2 s z.eps z') times the Gaussian damping driven by tmat.
    """
    nat, p, _ = zpts.shape
    gram = np.zeros((p, p), dtype=complex)
    for a in range(nat):
        z = zpts[a]
        phase = 0.5 * signs[a] * (z @ eps[a] @ z.T)
        quad = z @ tmat[a] @ z.T
        diag = np.diagonal(quad)
        damp = diag[:, None] + diag[None, :] - (quad + quad.T)
        gram = gram + weights[a] * np.exp(1j * phase - 0.5 * damp)
    return gram
