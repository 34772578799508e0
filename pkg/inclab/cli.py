"""
Command line for inclab.

Subcommands: generate, validate, count, sweep, fit, furstenberg, sumproduct, surface.
Exit status is 0 on success, 2 when a validation assertion fails and 1 on
usage, IO or domain errors.
"""
import argparse
import json
import logging
import sys
import uuid
from typing import Optional, Sequence

from inclab.core.error_codes import BusinessException
from inclab.core.logging_config import setup_logging, trace_id_var
from inclab.engine.constructions import construct
from inclab.engine.experiments import (
    SLOPE_MARGIN,
    f_surface,
    fit_slope,
    furstenberg_check,
    surface_grid,
    surface_region,
    sumproduct_inputs,
    sumproduct_sweep,
    sweep,
)
from inclab.engine.incidence import count
from inclab.engine.serialization import (
    format_value,
    furstenberg_csv,
    load_configuration,
    profile_csv,
    read_sweep_csv,
    save_configuration,
    sumproduct_csv,
    surface_csv,
    sweep_csv,
    write_json,
    write_text,
)
from inclab.engine.spacing import (
    ball_profile_brute,
    ball_profile_dyadic,
    max_intersect_degree_balls,
    max_overlap_degree_tubes,
    tube_profile,
)
from inclab.engine.sumproduct import build_instance, verify_instance


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ASSERTION = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(data: dict, out: Optional[str] = None) -> None:
    if out:
        write_json(data, out)
    else:
        print(json.dumps(data, indent=2, sort_keys=True))


def _emit_csv(text: str, out: Optional[str]) -> None:
    if out:
        write_text(text, out)
    else:
        sys.stdout.write(text)


def _cmd_generate(args) -> int:
    overrides = {"lam": args.lam} if args.lam is not None else {}
    config = construct(args.construction, args.k, args.alpha, args.beta, **overrides)
    if args.out:
        save_configuration(config, args.out)
    _emit({"k": args.k, "construction": args.construction, "n_balls": config.n_balls,
           "n_tubes": config.n_tubes, "out": args.out})
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = load_configuration(args.input)
    alpha = args.alpha if args.alpha is not None else config.meta.get("alpha")
    beta = args.beta if args.beta is not None else config.meta.get("beta")
    if alpha is None or beta is None:
        raise UsageError("validate: --alpha and --beta are required when the file carries no exponents")

    if args.mode == "brute":
        balls = ball_profile_brute(config.ball_centers, config.scale, beta)
        tubes = tube_profile(config.tube_params, config.scale, alpha, mode="brute")
    else:
        balls = ball_profile_dyadic(config.ball_centers, config.scale, beta)
        tubes = tube_profile(config.tube_params, config.scale, alpha)
    if args.profile_out:
        write_text(profile_csv(balls), f"{args.profile_out}.balls.csv")
        write_text(profile_csv(tubes), f"{args.profile_out}.tubes.csv")

    report = {
        "k": config.scale.k,
        "alpha": alpha,
        "beta": beta,
        "K_beta": balls.K,
        "K_alpha": tubes.K,
        "ball_degree": max_intersect_degree_balls(config.ball_centers, config.ball_radius),
        "tube_degree": max_overlap_degree_tubes(config.tube_params, config.tube_width, config.tube_length),
    }
    ok = args.max_K is None or (balls.K <= args.max_K and tubes.K <= args.max_K)
    report["ok"] = ok
    _emit(report)
    return EXIT_OK if ok else EXIT_ASSERTION


def _cmd_count(args) -> int:
    config = load_configuration(args.input)
    config.check_size()
    report = count(config, args.method, threads=args.threads)
    _emit(report.to_dict(include_vectors=args.vectors), args.out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    result = sweep(
        args.construction, args.alpha, args.beta, args.k_min, args.k_max,
        method=args.method, profiles=not args.no_profiles, threads=args.threads, lam=args.lam,
    )
    _emit_csv(sweep_csv(result, timings=args.timings), args.out)
    summary = {
        "construction": result.construction,
        "alpha": result.alpha,
        "beta": result.beta,
        "slope": result.fit.slope,
        "intercept": result.fit.intercept,
        "r2": result.fit.r2,
        "predicted": result.predicted,
        "bound_slopes": result.bound_slopes,
        "passed": result.passed,
    }
    if args.summary:
        _emit(summary, args.summary)
    elif args.out:
        _emit(summary)
    return EXIT_OK if result.passed else EXIT_ASSERTION


def _cmd_fit(args) -> int:
    ks, values = read_sweep_csv(args.input)
    fit = fit_slope(ks, values)
    data = {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2, "rows": len(ks)}
    ok = True
    if args.expect is not None:
        ok = abs(fit.slope - args.expect) <= args.tol
        data.update(expect=args.expect, tol=args.tol, ok=ok)
    _emit(data)
    return EXIT_OK if ok else EXIT_ASSERTION


def _cmd_furstenberg(args) -> int:
    report = furstenberg_check(args.u, args.v, args.k_min, args.k_max)
    if args.out:
        write_text(furstenberg_csv(report), args.out)
    data = {"u": report.u, "v": report.v, "bound": report.bound, "slope": report.fit.slope,
            "passed": report.passed}
    if report.product_fit is not None:
        data["product_slope"] = report.product_fit.slope
    _emit(data)
    return EXIT_OK if report.passed else EXIT_ASSERTION


def _cmd_sumproduct(args) -> int:
    result = sumproduct_sweep(args.kind, args.k_min, args.k_max, args.s)
    if args.out:
        write_text(sumproduct_csv(result), args.out)
    data = {"kind": result.kind, "s": result.s, "lhs_slope": result.lhs_fit.slope,
            "rhs_slope": result.rhs_fit.slope, "predicted": result.predicted, "passed": result.passed}
    ok = result.passed
    if args.structural_k is not None:
        A, B, C = sumproduct_inputs(args.kind, args.structural_k, args.s)
        report = verify_instance(build_instance(args.structural_k, A, B, C, u=result.s, v=result.s, v_prime=result.s))
        data["structural"] = {
            "ok": report.ok,
            "families_meet_tubes": report.families_meet_tubes,
            "max_cover_distance": report.max_cover_distance,
            "max_family_K": report.max_family_K,
            "lhs": report.lhs,
            "rhs": report.rhs,
        }
        ok = ok and report.ok
    _emit(data)
    return EXIT_OK if ok else EXIT_ASSERTION


def _cmd_surface(args) -> int:
    if args.grid is not None:
        _emit_csv(surface_csv(surface_grid(args.grid)), args.out)
        return EXIT_OK
    if args.alpha is None or args.beta is None:
        raise UsageError("surface: give --alpha and --beta, or --grid N")
    value = f_surface(args.alpha, args.beta)
    if args.region:
        print(f"{format_value(float(value))} {surface_region(args.alpha, args.beta)}")
    else:
        print(format_value(float(value)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="inclab", description="Discretized ball/tube incidence laboratory")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="Build an extremal configuration")
    p.add_argument("--construction", type=int, required=True, choices=[1, 2, 3, 4])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lam", type=float, default=None, help="row-rotation exponent override (construction 1)")
    p.add_argument("--out", default=None, help="configuration JSON path")
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("validate", help="Measure spacing profiles and overlap degrees")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--mode", choices=["dyadic", "brute"], default="dyadic")
    p.add_argument("--max-K", dest="max_K", type=float, default=None, help="fail when either K exceeds this")
    p.add_argument("--profile-out", default=None, help="prefix for per-level profile CSVs")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("count", help="Count incidences of a configuration file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", choices=["grid", "brute"], default="grid")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--vectors", action="store_true", help="include per-tube and per-ball counts")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_count)

    p = sub.add_parser("sweep", help="Sweep a construction over k and fit log2 I")
    p.add_argument("--construction", type=int, required=True, choices=[1, 2, 3, 4])
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--method", choices=["grid", "brute"], default="grid")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--no-profiles", action="store_true", help="skip spacing profiles and bound ratios")
    p.add_argument("--timings", action="store_true", help="add a wall-clock seconds column")
    p.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    p.add_argument("--summary", default=None, help="JSON fit summary path")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("fit", help="Refit log2 I against k from a sweep CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--expect", type=float, default=None)
    p.add_argument("--tol", type=float, default=SLOPE_MARGIN)
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("furstenberg", help="Furstenberg configuration and product-set sweeps")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_furstenberg)

    p = sub.add_parser("sumproduct", help="Sum-product sweep with optional structural checks")
    p.add_argument("--kind", choices=["ap", "cantor"], default="ap")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--structural-k", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_sumproduct)

    p = sub.add_parser("surface", help="Evaluate the exponent surface")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--region", action="store_true")
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_surface)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    token = trace_id_var.set(uuid.uuid4().hex[:12])
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            # --help
            return int(exc.code or 0)
        setup_logging(logging.INFO if args.verbose else logging.WARNING)
        return args.handler(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except BusinessException as exc:
        print(f"{exc.code}: {exc.message}" + (f" ({exc.details})" if exc.details else ""), file=sys.stderr)
        return EXIT_USAGE
    finally:
        trace_id_var.reset(token)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
