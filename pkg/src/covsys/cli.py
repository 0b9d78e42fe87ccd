"""covctl: one binary over every module.

All input is JSON, all reports are JSON (CSV for moment tables only).  Reports
embed the tool version, a hash of the canonical config, the seed, and the
tolerances, and identical config+seed runs produce byte-identical files: every
reduction in the library is fixed-order and the only randomness is the seeded
generator recorded in the report.

Exit codes: 0 all checks passed, 1 a mathematical validation failed (the
report names a witness when one exists), 2 input or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .algebra import Algebra
from .crossed import CrossedProduct, extend_state, integrated_rep, twisted_convolve, twisted_involution
from .errors import CovsysError, InputError
from .galilei import ccr_residuals, sample_galilei_cocycle, spin_demo, standard_covariance_check
from .gns import gns_build
from .groups import FiniteGroup, product_cyclic
from .multipliers import (
    Action,
    MultiplierTable,
    heisenberg_multiplier,
    left_to_right,
    right_to_left,
    trivial_multiplier,
    validate_left,
    validate_right,
)
from .qst import (
    QstParams,
    epsilon_matrix,
    gram_positivity,
    lorentz_boost,
    moments_via_kernel,
    quasifree_kernel,
    random_weyl_points,
    second_moments,
    transport_T,
)
from .serialize import dumps_canonical, jsonable, sha256_of
from .states import CovariantState, CovarianceSystem, delta_state, validate_state

PASS, FAIL, USAGE = 0, 1, 2


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}")


def _require_keys(config, allowed, context):
    unknown = set(config) - set(allowed)
    if unknown:
        raise InputError(f"unknown {context} keys: {sorted(unknown)}")


def _load_group(spec):
    if "cyclic" in spec:
        _require_keys(spec, {"cyclic"}, "group")
        return FiniteGroup.cyclic(int(spec["cyclic"]))
    if "product_cyclic" in spec:
        _require_keys(spec, {"product_cyclic"}, "group")
        n, m = spec["product_cyclic"]
        return product_cyclic(int(n), int(m))
    _require_keys(spec, {"order", "table"}, "group")
    return FiniteGroup.from_descriptor(spec)


def _load_multiplier(spec, group=None, algebra=None, action=None):
    """Left multiplier from a config stanza."""
    if "kind" not in spec:
        raise InputError("multiplier stanza needs a 'kind'")
    kind = spec["kind"]
    if kind == "heisenberg":
        _require_keys(spec, {"kind", "n"}, "multiplier")
        hgroup, xi = heisenberg_multiplier(int(spec["n"]))
        if group is not None and hgroup.order != group.order:
            raise InputError("heisenberg multiplier order does not match the group")
        return xi
    if kind == "trivial":
        _require_keys(spec, {"kind"}, "multiplier")
        if group is None or action is None:
            raise InputError("trivial multiplier needs an ambient system")
        return trivial_multiplier(group, action, side="left")
    if kind == "table":
        allowed = {"kind", "side", "group", "algebra", "action", "values",
                   "phase_order", "phase_index"}
        _require_keys(spec, allowed, "multiplier")
        table = MultiplierTable.from_descriptor(spec)
        return table if table.side == "left" else right_to_left(table)
    raise InputError(f"unknown multiplier kind {kind!r}")


def _load_system(config):
    """(system, state, xi) from a system config file."""
    _require_keys(config, {"algebra", "group", "action", "multiplier", "state", "uv_pair"},
                  "system config")
    for key in ("algebra", "group", "multiplier", "state"):
        if key not in config:
            raise InputError(f"system config is missing '{key}'")
    algebra = Algebra.from_descriptor(config["algebra"])
    group = _load_group(config["group"])
    action = Action.from_descriptor(config.get("action", {"kind": "trivial"}), group, algebra)
    system = CovarianceSystem(algebra, group, action)
    xi = _load_multiplier(config["multiplier"], group, algebra, action)
    if xi.algebra != algebra or not np.array_equal(xi.group.table, group.table):
        raise InputError("multiplier does not match the system's group/algebra")
    # rebind the multiplier onto the system's own group/action objects
    xi = MultiplierTable("left", group, action, xi.values,
                         phase_order=xi.phase_order, phase_index=xi.phase_index)
    zeta = left_to_right(xi)
    state_spec = config["state"]
    if state_spec.get("kind") == "diagonal-delta":
        _require_keys(state_spec, {"kind"}, "state")
        state = delta_state(system, zeta)
    elif state_spec.get("kind") == "tensor":
        _require_keys(state_spec, {"kind", "data"}, "state")
        state = CovariantState.from_descriptor(system, state_spec, zeta)
    else:
        raise InputError(f"unknown state kind {state_spec.get('kind')!r}")
    return system, state, xi


def _report_shell(args, subcommand, config=None):
    return {
        "tool": "covctl",
        "version": __version__,
        "subcommand": subcommand,
        "seed": args.seed,
        "tolerances": {"residual_tol": args.tol, "rank_tol": args.rank_tol},
        "config_sha256": sha256_of(config) if config is not None else None,
        "threads": os.environ.get("COVCTL_THREADS", "1"),
    }


def _emit(report, args) -> None:
    if getattr(args, "format", "json") == "csv":
        text = report.pop("_csv")
    else:
        report.pop("_csv", None)
        text = dumps_canonical(jsonable(report))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (exit_code, report)


def cmd_validate_multiplier(args):
    config = _load_json(args.config)
    if "kind" in config:
        table = _load_multiplier(config)
    else:
        table = MultiplierTable.from_descriptor(config)
    report = _report_shell(args, "validate-multiplier", config)
    validator = validate_left if table.side == "left" else validate_right
    result = validator(table, tol=args.tol, seed=args.seed)
    report["report"] = result.to_dict()
    report["pass"] = result.passed
    return (PASS if result.passed else FAIL), report


def cmd_validate_state(args):
    config = _load_json(args.config)
    _, state, _ = _load_system(config)
    report = _report_shell(args, "validate-state", config)
    result = validate_state(state, tol=args.tol, seed=args.seed)
    report["report"] = result.to_dict()
    report["pass"] = result.passed
    return (PASS if result.passed else FAIL), report


def cmd_gns(args):
    config = _load_json(args.system)
    _, state, _ = _load_system(config)
    report = _report_shell(args, "gns", config)
    rep = gns_build(state, rank_tol=args.rank_tol, tol=args.tol)
    summary = rep.summary()
    ok = (not rep.trivial
          and summary["cyclic_rank"] == rep.dim
          and all(summary[k] <= args.tol for k in
                  ("unitarity", "projective", "covariance", "reconstruction")))
    if "uv_pair" in config:
        i, j = (int(v) for v in config["uv_pair"])
        uv = rep.u[i] @ rep.u[j]
        vu = rep.u[j] @ rep.u[i]
        phase = complex(np.trace(vu.conj().T @ uv) / rep.dim)
        summary["uv_phase"] = phase
        summary["uv_phase_residual"] = float(np.max(np.abs(uv - phase * vu)))
        ok = ok and summary["uv_phase_residual"] <= args.tol
    report["report"] = summary
    report["pass"] = bool(ok)
    return (PASS if ok else FAIL), report


def cmd_crossed(args):
    config = _load_json(args.system)
    system, state, xi = _load_system(config)
    report = _report_shell(args, "crossed", config)
    cp = CrossedProduct(system, xi)
    rep = gns_build(state, rank_tol=args.rank_tol, tol=args.tol)
    omega_bar = extend_state(state, cp)
    rng = np.random.default_rng(args.seed)

    assoc = invol = homo = consistency = 0.0
    positivity_min = np.inf
    for _ in range(args.trials):
        f = cp.random_element(rng)
        g = cp.random_element(rng)
        h = cp.random_element(rng)
        assoc = max(assoc, float(np.max(np.abs(
            (twisted_convolve(twisted_convolve(f, g), h)
             - twisted_convolve(f, twisted_convolve(g, h))).values))))
        invol = max(invol, float(np.max(np.abs(
            (twisted_involution(twisted_convolve(f, g))
             - twisted_convolve(twisted_involution(g), twisted_involution(f))).values))))
        positivity_min = min(positivity_min,
                             omega_bar(twisted_convolve(twisted_involution(f), f)).real)
        pf = integrated_rep(rep, f)
        homo = max(homo, float(np.max(np.abs(
            integrated_rep(rep, twisted_convolve(f, g)) - pf @ integrated_rep(rep, g)))))
        consistency = max(consistency, abs(
            omega_bar(f) - complex(rep.omega.conj() @ (pf @ rep.omega))))
    checks = {
        "associativity": assoc,
        "involution_antimultiplicative": invol,
        "omega_bar_positivity_min": float(positivity_min),
        "integrated_rep_homomorphism": homo,
        "omega_bar_vs_vector_state": consistency,
    }
    ok = (assoc <= args.tol and invol <= args.tol and homo <= args.tol
          and consistency <= args.tol and positivity_min >= -args.tol)
    report["report"] = {"trials": args.trials, **checks}
    report["pass"] = bool(ok)
    return (PASS if ok else FAIL), report


def cmd_galilei_cocycle(args):
    report = _report_shell(args, "galilei cocycle",
                           {"kappa": args.kappa, "trials": args.trials})
    worst, shift_res = sample_galilei_cocycle(args.kappa, args.trials, seed=args.seed)
    ok = worst < 1e-12 and shift_res == 0.0
    report["report"] = {
        "kappa": args.kappa,
        "trials": args.trials,
        "cocycle_identity_max_residual": worst,
        "pure_shift_residual": shift_res,
    }
    report["pass"] = bool(ok)
    return (PASS if ok else FAIL), report


def cmd_galilei_spin_demo(args):
    shift = tuple(args.shift)
    report = _report_shell(args, "galilei spin-demo",
                           {"width": args.width, "shift": list(shift)})
    result = spin_demo(width=args.width, shift=shift)
    ok = result.skipped or (result.ratio is not None
                            and abs(result.ratio + 1.0) < 1e-6
                            and abs(result.control_ratio - 1.0) < 1e-12)
    report["report"] = {
        "value_up": result.value_up,
        "value_down": result.value_down,
        "ratio": result.ratio,
        "skipped": result.skipped,
        "control_ratio": result.control_ratio,
    }
    report["pass"] = bool(ok)
    return (PASS if ok else FAIL), report


def cmd_galilei_grid_check(args):
    report = _report_shell(args, "galilei grid-check",
                           {"sites": args.sites, "spacing": args.spacing,
                            "shift_sites": args.shift_sites})
    res = standard_covariance_check(args.sites, args.spacing,
                                    args.shift_sites * args.spacing)
    ccr = ccr_residuals(args.sites, args.sites * args.spacing)
    ccr2 = ccr_residuals(2 * args.sites, args.sites * args.spacing)
    ratio = float(ccr[0, 0] / ccr2[0, 0]) if ccr2[0, 0] > 0 else float("inf")
    ok = res.covariance_residual <= args.tol and 3.0 < ratio < 5.0
    report["report"] = {
        "covariance_residual": res.covariance_residual,
        "ccr_residual": float(ccr[0, 0]),
        "ccr_residual_half_spacing": float(ccr2[0, 0]),
        "ccr_refinement_ratio": ratio,
    }
    report["pass"] = bool(ok)
    return (PASS if ok else FAIL), report


def _moments_csv(analytic, estimate):
    lines = ["mu,nu,analytic_re,analytic_im,kernel_re,kernel_im"]
    fd = np.asarray(estimate.matrix)
    for mu in range(4):
        for nu in range(4):
            a, b = analytic[mu, nu], fd[mu, nu]
            lines.append(f"{mu},{nu},{a.real!r},{a.imag!r},{b.real!r},{b.imag!r}")
    return "\n".join(lines) + "\n"


def cmd_qst_moments(args):
    config = _load_json(args.config)
    params = QstParams.from_config(config)
    report = _report_shell(args, "qst moments", config)
    analytic = second_moments(params)
    estimate = moments_via_kernel(params, args.step)
    scale = max(1.0, float(np.max(np.abs(analytic))))
    agreement = float(np.max(np.abs(analytic - estimate.matrix))) / scale
    first = float(np.max(np.abs(estimate.first)))
    herm = 0.5 * (analytic + analytic.conj().T)
    ok = agreement < 1e-6 and first < 1e-8
    report["report"] = {
        "second_moments": analytic,
        "second_moments_kernel_estimate": np.asarray(estimate.matrix),
        "second_moments_kernel_raw": estimate.raw,
        "hermitian_part_min_eig": float(np.linalg.eigvalsh(herm)[0]),
        "first_moments_max": first,
        "relative_agreement": agreement,
        "fd_step": estimate.step,
        "fd_slope": estimate.slope,
        "psd_margin": params.psd_margin(),
    }
    report["pass"] = bool(ok)
    report["_csv"] = _moments_csv(analytic, estimate)
    return (PASS if ok else FAIL), report


def cmd_qst_gram(args):
    config = _load_json(args.config)
    params = QstParams.from_config(config)
    if args.points:
        pts_spec = _load_json(args.points)
        _require_keys(pts_spec, {"points"}, "points")
        pts = np.asarray(pts_spec["points"], dtype=float)
    else:
        rng = np.random.default_rng(args.seed)
        pts = random_weyl_points(rng, args.random, args.scale)
    report = _report_shell(args, "qst gram", config)
    min_eig = gram_positivity(params, pts)
    ok = min_eig >= -args.tol
    report["report"] = {
        "num_points": int(pts.shape[0]),
        "gram_min_eig": min_eig,
        "psd_margin": params.psd_margin(),
    }
    report["pass"] = bool(ok)
    return (PASS if ok else FAIL), report


def cmd_qst_transport(args):
    config = {"rapidity": args.rapidity, "axis": args.axis}
    report = _report_shell(args, "qst transport", config)
    lam = lorentz_boost(args.axis, args.rapidity)
    params = QstParams()
    point, tmat = transport_T(params.c_seed, lam)
    h = tmat + 0.5j * point.sign * epsilon_matrix(point)
    margin = float(np.linalg.eigvalsh(0.5 * (h + h.conj().T))[0])
    e, m = np.asarray(point.e), np.asarray(point.m)
    report["report"] = {
        "e": e.tolist(),
        "m": m.tolist(),
        "sign": point.sign,
        "T": tmat,
        "sigma_residuals": {
            "norm_gap": abs(float(e @ e) - float(m @ m)),
            "dot_gap": abs(abs(float(e @ m)) - 1.0),
        },
        "psd_margin": margin,
    }
    ok = margin >= -args.tol
    report["pass"] = bool(ok)
    return (PASS if ok else FAIL), report


def cmd_qst_kernel(args):
    config = _load_json(args.config)
    params = QstParams.from_config(config)
    x = np.asarray(args.x, dtype=float)
    xp = np.asarray(args.xp, dtype=float)
    report = _report_shell(args, "qst kernel", config)
    value = quasifree_kernel(params, None, x, xp)
    diag = quasifree_kernel(params, None, x, x)
    report["report"] = {
        "x": x.tolist(),
        "xp": xp.tolist(),
        "value": value,
        "diagonal_value": diag,
        "diagonal_modulus_gap": abs(abs(diag) - 1.0) if len(params.atoms) == 1 else None,
    }
    ok = abs(value) <= 1.0 + args.tol
    report["pass"] = bool(ok)
    return (PASS if ok else FAIL), report


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="covctl", description=__doc__)
    parser.add_argument("--version", action="version", version=f"covctl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--rank-tol", dest="rank_tol", type=float, default=1e-9)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("validate-multiplier", help="check multiplier identities")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(handler=cmd_validate_multiplier)

    p = sub.add_parser("validate-state", help="check covariant-state axioms")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(handler=cmd_validate_state)

    p = sub.add_parser("gns", help="run the GNS construction")
    p.add_argument("--system", required=True)
    common(p)
    p.set_defaults(handler=cmd_gns)

    p = sub.add_parser("crossed", help="crossed-product consistency report")
    p.add_argument("--system", required=True)
    p.add_argument("--trials", type=int, default=50)
    common(p)
    p.set_defaults(handler=cmd_crossed)

    gal = sub.add_parser("galilei", help="nonrelativistic examples")
    gsub = gal.add_subparsers(dest="galilei_command", required=True)
    p = gsub.add_parser("cocycle")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=1000)
    common(p)
    p.set_defaults(handler=cmd_galilei_cocycle)
    p = gsub.add_parser("spin-demo")
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--shift", type=float, nargs=3, default=[0.0, 0.0, 0.0])
    common(p)
    p.set_defaults(handler=cmd_galilei_spin_demo)
    p = gsub.add_parser("grid-check")
    p.add_argument("--sites", type=int, default=64)
    p.add_argument("--spacing", type=float, default=0.25)
    p.add_argument("--shift-sites", dest="shift_sites", type=int, default=1)
    common(p)
    p.set_defaults(handler=cmd_galilei_grid_check)

    qst = sub.add_parser("qst", help="quantum-spacetime kernel tools")
    qsub = qst.add_subparsers(dest="qst_command", required=True)
    p = qsub.add_parser("moments")
    p.add_argument("--config", required=True)
    p.add_argument("--step", type=float, default=1e-3)
    common(p)
    p.set_defaults(handler=cmd_qst_moments)
    p = qsub.add_parser("gram")
    p.add_argument("--config", required=True)
    p.add_argument("--points", default=None)
    p.add_argument("--random", type=int, default=8)
    p.add_argument("--scale", type=float, default=1.0)
    common(p)
    p.set_defaults(handler=cmd_qst_gram)
    p = qsub.add_parser("transport")
    p.add_argument("--rapidity", type=float, required=True)
    p.add_argument("--axis", type=int, default=1)
    common(p)
    p.set_defaults(handler=cmd_qst_transport)
    p = qsub.add_parser("kernel")
    p.add_argument("--config", required=True)
    p.add_argument("--x", type=float, nargs=8, required=True)
    p.add_argument("--xp", type=float, nargs=8, required=True)
    common(p)
    p.set_defaults(handler=cmd_qst_kernel)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, report = args.handler(args)
    except InputError as exc:
        print(f"covctl: input error: {exc}", file=sys.stderr)
        return USAGE
    except CovsysError as exc:
        witness = getattr(exc, "witness", None)
        report = {
            "tool": "covctl", "version": __version__, "pass": False,
            "error": str(exc),
            "witness": list(witness) if witness is not None else None,
        }
        _emit(report, args)
        return FAIL
    _emit(report, args)
    return code


def entrypoint():  # console-script wrapper
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
