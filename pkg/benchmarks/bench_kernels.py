#!/usr/bin/env python3
"""Compare the compiled kernel core against the numpy fallback.

Usage:  PYTHONPATH=src python benchmarks/bench_kernels.py [--repeats 3]

Covers the three hot loops: the exhaustive cocycle sweep (N^3 triples of
small-matrix products), the twisted convolution, and the quasifree Gram
assembly.  Falls back to timing only the python backend when the extension is
not built.
"""

import argparse
import pathlib
import sys
import time

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from covsys.algebra import Automorphism, make_matrix_algebra  # noqa: E402
from covsys.groups import product_cyclic  # noqa: E402
from covsys.kernels import available_backends  # noqa: E402
from covsys.multipliers import Action, heisenberg_multiplier  # noqa: E402
from covsys.qst import QstParams, eta_matrix, lorentz_boost, random_weyl_points  # noqa: E402


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_cocycle_scalar(impl):
    group, xi = heisenberg_multiplier(10)      # N = 100: 1e6 triples
    table = np.ascontiguousarray(group.table)
    conj = xi.action.conjugators
    return lambda: impl.cocycle_residual_left(xi.values, conj, table)


def bench_cocycle_operator(impl, rng):
    group = product_cyclic(6, 6)               # N = 36 with 2x2 values
    alg = make_matrix_algebra(2)
    autos = [Automorphism.identity(alg)]
    for _ in range(group.order - 1):
        z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        q, r = np.linalg.qr(z)
        autos.append(Automorphism.from_unitary(alg, q * (np.diag(r) / np.abs(np.diag(r)))))
    action = Action(group, alg, autos)
    vals = rng.standard_normal((36, 36, 2, 2)) + 1j * rng.standard_normal((36, 36, 2, 2))
    vals = np.ascontiguousarray(vals)
    table = np.ascontiguousarray(group.table)
    return lambda: impl.cocycle_residual_left(vals, action.conjugators, table)


def bench_convolve(impl, rng):
    group = product_cyclic(10, 10)
    n, d = group.order, 3
    vals = rng.standard_normal((n, n, d, d)) + 1j * rng.standard_normal((n, n, d, d))
    vals = np.ascontiguousarray(vals)
    f = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
    g = rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))
    gsig = np.ascontiguousarray(np.broadcast_to(g, (n, n, d, d)))
    table = np.ascontiguousarray(group.table)
    return lambda: impl.twisted_convolve(f, gsig, vals, table, group.inverse)


def bench_gram(impl, rng):
    params = QstParams(atoms=[(np.eye(4), 0.5),
                              (lorentz_boost(1, 0.4), 0.3),
                              (lorentz_boost(2, -0.3), 0.2)])
    pts = random_weyl_points(rng, 200)
    nat = len(params.atoms)
    zpts = np.empty((nat, 200, 4))
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
    zpts = np.ascontiguousarray(zpts)
    return lambda: impl.quasifree_gram(zpts, eps, tmat, signs, weights)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    rng = np.random.default_rng(0)
    cases = {
        "cocycle sweep, N=100 scalar (1e6 triples)": bench_cocycle_scalar,
        "cocycle sweep, N=36 2x2 operator values": lambda i: bench_cocycle_operator(i, rng),
        "twisted convolution, N=100 3x3 values": lambda i: bench_convolve(i, rng),
        "quasifree Gram, 200 points x 3 atoms": lambda i: bench_gram(i, rng),
    }

    width = max(len(name) for name in cases)
    header = f"{'kernel':<{width}}  " + "".join(f"{b:>12}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, make in cases.items():
        times = {}
        for bname, impl in backends.items():
            fn = make(impl)
            fn()  # warm up / JIT caches
            times[bname] = timeit(fn, args.repeats)
        row = f"{name:<{width}}  " + "".join(f"{times[b]*1e3:>10.1f}ms" for b in backends)
        if len(times) > 1:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)

    if len(backends) == 1:
        print("\ncompiled backend not built; run `python setup.py build_ext --inplace`")


if __name__ == "__main__":
    main()
