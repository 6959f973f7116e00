"""Command-line interface: ``pqlattice <command> ...``.

Exit codes: 0 success, 2 a verification found a violated invariant,
3 a resource cap was hit, 4 bad parameters.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import asymptotics as asy
from .embedding import DiscLattice, EmbeddingConfig, embed_ball
from .enumeration import VisitCapExceeded, bounded_min_perimeter, oracle
from .lattice import LatticeError, NonsenseParams, ResourceLimit, build_ball, validate_params
from .render import IoFailure, layer_highlights, render_svg
from .shapes import TooSmall, build_minimal_shape, classify
from .verify import GRID, parse_grid, verify_all

EXIT_OK, EXIT_VIOLATION, EXIT_CAP, EXIT_PARAMS = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


def read_config(path: str) -> dict[str, str]:
    """key=value lines; blank lines and # comments are ignored."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _emit(payload, out: str | None) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _params(args, *extra: str):
    for name in ("p", "q") + extra:
        if getattr(args, name) is None:
            raise NonsenseParams(f"--{name} is required")
    return validate_params(args.p, args.q)


# ---------------------------------------------------------------------------
# commands


def cmd_counts(args) -> int:
    params = _params(args)
    rows = asy.counts_rows(params, args.n)
    _emit(asy.rows_to_csv(rows) if args.format == "csv" else rows, args.out)
    return EXIT_OK


def cmd_ball(args) -> int:
    params = _params(args)
    ball = build_ball(params, args.depth)
    _emit(ball.to_json_dict(), args.out)
    return EXIT_OK


def cmd_minimal(args) -> int:
    params = _params(args, "N")
    variant = 0 if args.variant == 0 else f"{args.variant}:{args.seed}"
    shape = build_minimal_shape(params, args.N, variant_seed=variant)
    verdict = classify(shape)
    doc = shape.to_json_dict() | {"ball_depth": shape.lattice.depth, "classification": verdict.summary()}
    _emit(doc, args.out)
    return EXIT_OK if verdict.in_m else EXIT_VIOLATION


def cmd_oracle(args) -> int:
    params = _params(args, "N")
    if args.bound is not None:
        res = bounded_min_perimeter(DiscLattice(params), 0, args.N, args.bound)
        _emit(res.to_json_dict(), args.report)
        return EXIT_OK
    try:
        res = oracle(params, args.N, threads=args.threads, cap=args.cap, centers=args.centers)
    except VisitCapExceeded as exc:
        _emit({"p": params.p, "q": params.q, "N": args.N, "error": str(exc), "partial": True}, args.report)
        return EXIT_CAP
    doc = res.to_json_dict()
    if res.rejected_minimizers:
        doc["rejected_minimizers"] = res.rejected_minimizers
    if res.non_minimal_inm:
        doc["non_minimal_InM"] = res.non_minimal_inm
    _emit(doc, args.report)
    return EXIT_OK if res.consistent or args.N < params.p else EXIT_VIOLATION


def cmd_cheeger(args) -> int:
    params = _params(args)
    seq = asy.ball_ratio_sequence(params, args.n_max)
    ie = asy.cheeger_constant(params)
    doc = {
        "p": params.p,
        "q": params.q,
        "i_e": ie,
        "expressions": asy.cheeger_expressions(params),
        "ball_ratios": [{"n": n, "ratio": str(r), "value": float(r), "above": asy.exceeds_cheeger(params, r)} for n, r in enumerate(seq)],
    }
    _emit(doc, args.out)
    return EXIT_OK if all(x["above"] for x in doc["ball_ratios"]) else EXIT_VIOLATION


def cmd_growth(args) -> int:
    params = _params(args)
    f = asy.growth_function(params)
    coeffs = asy.series_coefficients(f, args.n_max)
    matrix = asy.matrix_coefficients(params, args.n_max)
    doc = {
        "p": params.p,
        "q": params.q,
        "growth_function": str(f),
        "numerator": list(f.numerator),
        "denominator": list(f.denominator),
        "coefficients": coeffs,
        "matches_matrix_form": coeffs == matrix,
        "count_sequence": asy.count_sequence(params, args.n_max),
    }
    _emit(doc, args.out)
    return EXIT_OK if doc["matches_matrix_form"] else EXIT_VIOLATION


def cmd_euler(args) -> int:
    params = _params(args)
    chi = asy.euler_characteristic(params)
    _emit({"p": params.p, "q": params.q, "euler_characteristic": str(chi), "value": float(chi)}, args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    params = _params(args)
    highlights = []
    depth = args.depth
    cfg = EmbeddingConfig.for_params(params)
    shape_doc = None
    if args.highlight:
        shape_doc = json.loads(Path(args.highlight).read_text())
        if (shape_doc.get("p"), shape_doc.get("q")) != (params.p, params.q):
            raise NonsenseParams("highlighted shape belongs to a different lattice")
        depth = max(depth, shape_doc.get("ball_depth", 0))
    ball = build_ball(params, depth)
    if args.layers:
        highlights.extend(layer_highlights(ball, cfg))
    if shape_doc is not None:
        highlights.append((shape_doc["members"], args.color))
    coords = embed_ball(ball, cfg).coords
    render_svg(ball, coords, highlights, args.out, cfg)
    print(args.out)
    return EXIT_OK


def cmd_verify_all(args) -> int:
    grid = parse_grid(args.grid) if args.grid else [validate_params(p, q) for p, q in GRID]
    log = None if args.quiet else (lambda line: print(line, flush=True))
    report = verify_all(grid, threads=args.threads, cap=args.cap, log=log)
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
    print(f"{'OK' if report['passed'] else 'FAILED'}: {len(report['checks']) - report['failures']}/{len(report['checks'])} checks passed in {report['wall_time_s']} s")
    return EXIT_OK if report["passed"] else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# parser


def _add_global(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--threads", type=int, default=d(1), help="worker processes for exhaustive search")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for variant sampling")
    parser.add_argument("--config", default=d(None), help="file of key=value defaults (flags win)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pqlattice", description="{p,q} hyperbolic lattices, minimal perimeters and growth")
    _add_global(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, fn, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        _add_global(sp, suppress=True)
        sp.set_defaults(func=fn)
        return sp

    def pq(sp):
        sp.add_argument("--p", type=int)
        sp.add_argument("--q", type=int)

    sp = command("counts", cmd_counts, "layer class counts from the transfer matrix")
    pq(sp)
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")

    sp = command("ball", cmd_ball, "build B_depth and dump it as JSON")
    pq(sp)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--out")

    sp = command("minimal", cmd_minimal, "construct a minimal-perimeter shape of size N")
    pq(sp)
    sp.add_argument("--N", type=int)
    sp.add_argument("--variant", type=int, default=0)
    sp.add_argument("--out")

    sp = command("oracle", cmd_oracle, "exhaustive minimum perimeter over root-containing animals")
    pq(sp)
    sp.add_argument("--N", type=int)
    sp.add_argument("--cap", type=int, default=10**8, help="visit cap on animals")
    sp.add_argument("--centers", choices=("first", "any"), default="first")
    sp.add_argument("--bound", type=int, help="only search perimeters <= BOUND (compiled branch and bound)")
    sp.add_argument("--report")

    sp = command("cheeger", cmd_cheeger, "Cheeger constant and ball ratios")
    pq(sp)
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--out")

    sp = command("growth", cmd_growth, "growth function and its coefficients")
    pq(sp)
    sp.add_argument("--n-max", type=int, default=10)
    sp.add_argument("--out")

    sp = command("euler", cmd_euler, "Euler characteristic of the tiling group")
    pq(sp)
    sp.add_argument("--out")

    sp = command("render", cmd_render, "SVG drawing in the Poincare disc")
    pq(sp)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--highlight", help="shape JSON written by `minimal`")
    sp.add_argument("--color", default="#d62728")
    sp.add_argument("--layers", action="store_true", help="colour vertices by layer")
    sp.add_argument("--out", default="lattice.svg")

    sp = command("verify-all", cmd_verify_all, "run every property suite")
    sp.add_argument("--grid", help='pairs as "p1,q1;p2,q2"; default is the standard grid')
    sp.add_argument("--cap", type=int, default=10**8)
    sp.add_argument("--report")
    sp.add_argument("--quiet", action="store_true")
    return parser


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return action.choices[command]


def _coerce(actions: dict[str, argparse.Action], config: dict[str, str]) -> dict:
    """Typed values from a config file, using each option's own converter."""
    out = {}
    for key, raw in config.items():
        act = actions.get(key)
        if act is None or key in ("config", "command", "help"):
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            out[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            out[key] = act.type(raw) if act.type else raw
    return out


def parse(argv: list[str]) -> argparse.Namespace:
    """Parse argv; a --config file supplies defaults that explicit flags override."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    sub = _subparser(parser, args.command)
    top = {a.dest: a for a in parser._actions}
    values = _coerce(top | {a.dest: a for a in sub._actions}, read_config(args.config))
    # global options become top-level defaults so a flag given before the
    # command is not overwritten by the subcommand namespace
    parser.set_defaults(**{k: v for k, v in values.items() if k in top})
    sub.set_defaults(**{k: v for k, v in values.items() if k not in top})
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
    except SystemExit as exc:
        return EXIT_PARAMS if exc.code else EXIT_OK
    except ConfigError as exc:
        print(f"bad parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    try:
        return args.func(args)
    except (ResourceLimit, VisitCapExceeded) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (TooSmall, ConfigError, NonsenseParams, ValueError) as exc:
        print(f"bad parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except IoFailure as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except LatticeError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
