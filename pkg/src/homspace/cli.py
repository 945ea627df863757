"""
Command-line front door: space -> stats -> cubes -> norms -> characterization.

Commands: analyze, cubes, norms, embed-test, kernel-check, maximal, gallery.
Reports are deterministic JSON (same config + seed => byte-identical) or a
flattened CSV with one row per witness.

Exit codes: 0 ok; 2 usage or input problems; 3 inadmissible dyadic
constants; 4 characterization discrepancy; 5 internal invariant failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from homspace import gallery, maximal, seqnorm, space as space_mod
from homspace.common import DEFAULT_SEED, dumps_report, report_to_csv, rng_stream
from homspace.dyadic import (
    CubeConstructionError,
    InadmissibleConstants,
    build_cubes,
    build_nets,
    default_constants,
    max_single_child_chain,
    verify_cube_axioms,
)
from homspace.embed import EmbedParams, characterize
from homspace.seqnorm import NormParams

SCHEMA = 1


def _add_space_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--space", help="path to a JSON space file")
    p.add_argument("--gallery", choices=[k for k in gallery.KINDS if k != "file"],
                   help="built-in space kind")
    p.add_argument("--n", type=int, default=64, help="lattice points per axis")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--depth", type=int, default=6, help="cantor depth")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--snowflake-e", type=float, default=1.0, dest="e")
    p.add_argument("--extent", type=float, default=1.0)


def _add_cube_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=float, help="scale base (default: largest admissible power of 1/2)")
    p.add_argument("--c0", type=float, default=1.0)
    p.add_argument("--C0", type=float, default=2.0)
    p.add_argument("--A0", type=float, help="override the quasi-triangle constant")
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--threads", type=int, default=0,
                   help="worker cap hint (computation is vectorized; recorded in the report)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homspace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="space statistics and lower-bound checks")
    _add_space_args(p)
    _add_common(p)
    p.add_argument("--omega", type=float,
                   help="scaling exponent (default: declared, else measured)")
    p.add_argument("--check-lower-bound", action="store_true")
    p.add_argument("--check-local-lower-bound", action="store_true")
    p.add_argument("--check-reverse-doubling", type=float, metavar="KAPPA")

    p = sub.add_parser("cubes", help="build a dyadic cube system and verify its axioms")
    _add_space_args(p)
    _add_cube_args(p)
    _add_common(p)

    p = sub.add_parser("norms", help="sequence norms over a built cube system")
    _add_space_args(p)
    _add_cube_args(p)
    _add_common(p)
    p.add_argument("--seq", required=True, help="JSON list of {k, alpha, value}")
    p.add_argument("--family", choices=seqnorm.FAMILIES, default="besov")
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--variant", choices=seqnorm.VARIANTS, default="homogeneous")
    p.add_argument("--layer-cake", action="store_true",
                   help="cross-check the Triebel-Lizorkin norm via the distribution function")

    p = sub.add_parser("embed-test", help="full characterization loop")
    _add_space_args(p)
    _add_cube_args(p)
    _add_common(p)
    p.add_argument("--family", choices=seqnorm.FAMILIES, default="besov")
    p.add_argument("--variant", choices=seqnorm.VARIANTS, default="homogeneous")
    p.add_argument("--omega", type=float, help="default: declared, else measured")
    p.add_argument("--s1", type=float, required=True)
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--s2", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--q", type=float, default=1.0, help="shared q (besov)")
    p.add_argument("--q1", type=float)
    p.add_argument("--q2", type=float)
    p.add_argument("--n-sequences", type=int, default=256)

    p = sub.add_parser("kernel-check", help="kernel bound calibration and stability")
    _add_space_args(p)
    _add_cube_args(p)
    _add_common(p)
    p.add_argument("--omega", type=float)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=3.0)
    p.add_argument("--p2", type=float, default=1.0,
                   help="source integrability fixing r = p2/(1+p2)")
    p.add_argument("--r-exp", type=float, help="override the sub-exponent r")
    p.add_argument("--calibration", type=int, default=32)
    p.add_argument("--trials", type=int, default=50)

    p = sub.add_parser("maximal", help="Hardy-Littlewood maximal function values")
    _add_space_args(p)
    _add_common(p)
    p.add_argument("--values", help="JSON array of per-point values")
    p.add_argument("--random", type=int, metavar="COUNT",
                   help="evaluate on COUNT seeded random functions and report ratios")

    p = sub.add_parser("gallery", help="construct a space and write its space file")
    _add_space_args(p)
    _add_common(p)

    return parser


def _resolve_space(args) -> space_mod.FiniteHomSpace:
    if args.space and args.gallery:
        raise ValueError("pass either --space or --gallery, not both")
    if args.space:
        return gallery.load_space(args.space)
    if not args.gallery:
        raise ValueError("a space is required: pass --space PATH or --gallery KIND")
    spec = gallery.GallerySpec(
        kind=args.gallery, n=args.n, dim=args.dim, depth=args.depth,
        alpha=args.alpha, beta=args.beta, e=args.e, extent=args.extent,
    )
    return gallery.build(spec)


def _resolve_omega(args, sp) -> float:
    if getattr(args, "omega", None) is not None:
        return args.omega
    if sp.declared_omega is not None:
        return float(sp.declared_omega)
    fitted = space_mod.fit_mass_exponent(sp, seed=args.seed)
    if fitted is None:
        raise ValueError("cannot infer omega on this space; pass --omega")
    return fitted


def _resolve_cubes(args, sp):
    a0 = args.A0 if args.A0 is not None else None
    if args.delta is None:
        delta, c0, C0 = default_constants(sp, c0=args.c0, C0=args.C0, a0=a0, seed=args.seed)
    else:
        delta, c0, C0 = args.delta, args.c0, args.C0
    k_range = None
    if args.k_min is not None or args.k_max is not None:
        if args.k_min is None or args.k_max is None:
            raise ValueError("pass both --k-min and --k-max or neither")
        k_range = (args.k_min, args.k_max)
    net = build_nets(sp, delta, c0, C0, k_range=k_range, seed=args.seed, a0=a0)
    return build_cubes(net, sp)


def _config_echo(args) -> dict:
    skip = {"out", "format", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def cmd_analyze(args) -> dict:
    sp = _resolve_space(args)
    stats = space_mod.space_stats(sp, seed=args.seed)
    report = {
        "schema": SCHEMA,
        "command": "analyze",
        "config": _config_echo(args),
        "n_points": sp.n,
        "total_mass": sp.total_mass,
        "diameter": sp.diameter,
        "r_floor": sp.r_floor,
        "stats": stats.to_dict(),
    }
    if args.check_lower_bound or args.check_local_lower_bound or args.check_reverse_doubling:
        omega = _resolve_omega(args, sp)
        report["omega_used"] = omega
        if args.check_lower_bound:
            lb = space_mod.check_lower_bound(
                sp, omega, sp.r_floor, max(sp.diameter, sp.r_floor * 2), seed=args.seed)
            report["lower_bound"] = lb.to_dict()
        if args.check_local_lower_bound:
            lb = space_mod.check_local_lower_bound(sp, omega, seed=args.seed)
            report["local_lower_bound"] = lb.to_dict()
    if args.check_reverse_doubling is not None:
        rev = space_mod.check_reverse_doubling(sp, args.check_reverse_doubling, seed=args.seed)
        report["reverse_doubling"] = rev.to_dict()
    return report


def cmd_cubes(args) -> dict:
    sp = _resolve_space(args)
    cubes = _resolve_cubes(args, sp)
    axioms = verify_cube_axioms(cubes)
    chain = max_single_child_chain(cubes)
    return {
        "schema": SCHEMA,
        "command": "cubes",
        "config": _config_echo(args),
        "axioms": axioms.to_dict(),
        "chain": chain.to_dict(),
        "system": cubes.to_dict(),
    }


def cmd_norms(args) -> dict:
    sp = _resolve_space(args)
    cubes = _resolve_cubes(args, sp)
    seq = seqnorm.load_sequence(args.seq, cubes)
    params = NormParams(s=args.s, p=args.p, q=args.q, delta=cubes.delta,
                        variant=args.variant, family=args.family)
    value = seqnorm.sequence_norm(seq, params)
    report = {
        "schema": SCHEMA,
        "command": "norms",
        "config": _config_echo(args),
        "family": args.family,
        "s": args.s,
        "p": args.p,
        "q": args.q,
        "variant": args.variant,
        "include_zero_level": params.include_zero_level,
        "value": value,
    }
    if args.layer_cake and args.family == "triebel_lizorkin":
        report["layer_cake_value"] = seqnorm.layer_cake_tl_norm(seq, params)
    return report


def cmd_embed_test(args) -> dict:
    sp = _resolve_space(args)
    omega = _resolve_omega(args, sp)
    cubes = _resolve_cubes(args, sp)
    q1 = args.q1 if args.q1 is not None else args.q
    q2 = args.q2 if args.q2 is not None else args.q
    params = EmbedParams(
        source=NormParams(s=args.s2, p=args.p2, q=q2, delta=cubes.delta,
                          omega=omega, variant=args.variant, family=args.family),
        target=NormParams(s=args.s1, p=args.p1, q=q1, delta=cubes.delta,
                          omega=omega, variant=args.variant, family=args.family),
        omega=omega,
    )
    result = characterize(sp, cubes, params, n_sequences=args.n_sequences, seed=args.seed)
    witnesses = []
    if result.necessity and result.necessity.witness:
        witnesses.append({"kind": "necessity", **result.necessity.witness})
    if result.scan:
        witnesses.extend({"kind": "scan", **v} for v in result.scan.violations)
    return {
        "schema": SCHEMA,
        "command": "embed-test",
        "config": _config_echo(args),
        "params": params.to_dict(),
        "omega_used": omega,
        "sup_ratio": result.scan.sup_ratio if result.scan else None,
        "proof_constant": result.scan.proof_constant if result.scan else None,
        "lower_bound": result.lower_bound.to_dict() if result.lower_bound else None,
        "result": result.to_dict(),
        "witnesses": witnesses,
        "verdict": result.verdict,
    }


def cmd_kernel_check(args) -> dict:
    sp = _resolve_space(args)
    omega = _resolve_omega(args, sp)
    cubes = _resolve_cubes(args, sp)
    r_exp = args.r_exp if args.r_exp is not None else maximal.default_r_exp(args.p2)
    params = maximal.KernelParams(epsilon=args.epsilon, gamma=args.gamma,
                                  r_exp=r_exp, omega=omega)
    cal = maximal.calibrate_kernel_bound(cubes, params, n_sequences=args.calibration,
                                         seed=args.seed)
    rng = rng_stream(args.seed, 0xF4E54)
    probes = cal.probes
    worst = 0.0
    failures = []
    for i in range(args.trials):
        seq = maximal.random_sequence(cubes, rng)
        for k, j, x in probes:
            res = maximal.kernel_maximal_bound_check(cubes, seq, k, j, x, params,
                                                     c_report=2.0 * cal.c_report)
            if res.ratio is not None:
                worst = max(worst, res.ratio)
            if res.verdict == "FAIL":
                failures.append({"trial": i, "level_pair": list(res.level_pair),
                                 "point": res.point, "ratio": res.ratio})
    return {
        "schema": SCHEMA,
        "command": "kernel-check",
        "config": _config_echo(args),
        "params": params.to_dict(),
        "calibration": {"c_report": cal.c_report, "n_samples": cal.n_samples,
                        "cube_bound_constant": cal.cube_bound_constant},
        "fresh_worst_ratio": worst,
        "witnesses": failures,
        "verdict": "PASS" if not failures else "FAIL",
    }


def cmd_maximal(args) -> dict:
    sp = _resolve_space(args)
    report = {
        "schema": SCHEMA,
        "command": "maximal",
        "config": _config_echo(args),
        "n_points": sp.n,
    }
    if args.values:
        with open(args.values) as fh:
            values = json.load(fh)
        mf = maximal.hl_maximal(sp, np.asarray(values, dtype=float))
        report["maximal"] = [float(v) for v in mf]
    elif args.random:
        rng = rng_stream(args.seed, 0x3A2)
        ratios = []
        for _ in range(args.random):
            f = rng.standard_normal(sp.n)
            mf = maximal.hl_maximal(sp, f)
            ratios.append(float(mf.max() / np.abs(f).max()))
        report["max_over_sup_ratios"] = ratios
    else:
        raise ValueError("pass --values FILE or --random COUNT")
    return report


def cmd_gallery(args) -> dict:
    sp = _resolve_space(args)
    metric = "euclidean"
    if args.gallery == "snowflake":
        metric = f"snowflake:{args.e}"
    if args.space:
        metric = "explicit"
    return {
        "schema": SCHEMA,
        "command": "gallery",
        "config": _config_echo(args),
        "n_points": sp.n,
        "total_mass": sp.total_mass,
        "space": gallery.space_to_dict(sp, metric=metric),
    }


COMMANDS = {
    "analyze": cmd_analyze,
    "cubes": cmd_cubes,
    "norms": cmd_norms,
    "embed-test": cmd_embed_test,
    "kernel-check": cmd_kernel_check,
    "maximal": cmd_maximal,
    "gallery": cmd_gallery,
}


def _emit(report: dict, args) -> None:
    text = dumps_report(report) if args.format == "json" else report_to_csv(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = COMMANDS[args.command](args)
    except InadmissibleConstants as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except CubeConstructionError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return 5
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        _emit(report, args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if report.get("verdict") == "DISCREPANCY":
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
