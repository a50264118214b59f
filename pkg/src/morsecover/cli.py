"""Command-line front end: pack, cover, integrate, pv-demo, validate.

Exit codes: 0 success, 1 violated contract, 2 bad input.  All numeric
output uses 12 significant digits, so identical configurations and seeds
reproduce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import (load_config, load_measure, load_region, parse_config,
                     space_from_node)
from .covering import (SatelliteConfig, TaggedFamily, is_satellite_config,
                       kappa_bound, packing_count, partition_disjoint,
                       greedy_select)
from .errors import ContractError, InputError
from .families import IntervalFamily, family_from_spec
from .geometry import (Space, closed_ball, morse_diameter, shape_from_record,
                       validate_morse)
from .integrate import (builtin_integrand, expression_integrand, integrate,
                        pv_balls_outside, pv_counterexample, pv_sweep)
from .measure import MeasurableRegion, RadonMeasure, measure_of


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _cmd_pack(args) -> int:
    space = Space(args.d, args.norm)
    lower, witness, upper = packing_count(
        space, args.container, args.mindist, anchored=args.anchored,
        surface_only=args.surface, budget=args.budget, seed=args.seed)
    lines = [
        f"dimension: {args.d}",
        f"norm: {args.norm}",
        f"container: {_fmt(args.container)}",
        f"min-dist: {_fmt(args.mindist)}",
        f"anchored: {'yes' if args.anchored else 'no'}",
        f"surface-only: {'yes' if args.surface else 'no'}",
        f"lower: {lower}",
        f"upper: {upper}",
        "witness:",
    ]
    for p in witness.points:
        lines.append("  " + " ".join(_fmt(c) for c in p))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_cover(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        space = space_from_node(cfg.children.get("space"), args.config)
        section = cfg.children.get("cover", cfg)
        n = section.get_int("n", args.config, args.n)
        tau = section.get_float("tau", args.config, args.tau)
        seed = cfg.get_int("seed", args.config, args.seed)
    else:
        space, n, tau, seed = Space(2, "l2"), args.n, args.tau, args.seed
    if seed is None:
        raise InputError("cover needs a seed for its random family")
    rng = np.random.default_rng(seed)
    lo, hi, rmin, rmax = 0.0, 10.0, args.radius_min, args.radius_max
    sets = []
    for _ in range(n):
        center = tuple(rng.uniform(lo, hi, size=space.dim))
        radius = float(rng.uniform(rmin, rmax))
        sets.append(closed_ball(space, center, radius))
    fam = TaggedFamily.from_sets(sets)
    order = greedy_select(fam, tau)
    part = partition_disjoint(fam, order)
    lines = [
        f"entries: {n}",
        f"selected: {len(order)}",
        f"tau: {_fmt(tau)}",
        f"kappa-bound: {part.kappa}",
        f"families: {part.m}",
    ]
    for j, members in enumerate(part.families):
        lines.append(f"family {j + 1}: " + " ".join(str(i) for i in members))
    lines.append("selection-order: " + " ".join(str(i) for i in order))
    _emit("\n".join(lines) + "\n", args.out)
    if args.svg:
        if space.dim != 2:
            raise InputError("SVG output is plane-only; use coordinate tables")
        from .svg import render_partition

        render_partition(sets, [list(f) for f in part.families], args.svg)
    return 0


def _integrand_from_args(args, cfg, cfg_path, space):
    if cfg is not None and "integrand" in cfg.children:
        node = cfg.children["integrand"]
        builtin = node.get("builtin")
        if builtin:
            return builtin_integrand(builtin)
        expr = node.get("expr")
        if expr:
            return expression_integrand(expr, space.dim)
        raise InputError(f"{cfg_path}:{node.line}: integrand needs builtin or expr")
    if args.builtin:
        return builtin_integrand(args.builtin)
    if args.expr:
        return expression_integrand(args.expr, space.dim)
    raise InputError("no integrand given; use --builtin, --expr or a config")


_BUILTIN_DOMAINS = {
    "x2": 1, "sinpix": 1, "step": 1, "x": 1, "one": 1, "xinvsqrt": 1,
    "x1x2": 2,
}


def _cmd_integrate(args) -> int:
    cfg = load_config(args.config) if args.config else None
    cfg_path = args.config or "<args>"
    if cfg is not None:
        space = space_from_node(cfg.children.get("space"), cfg_path)
    elif args.builtin:
        space = Space(_BUILTIN_DOMAINS.get(args.builtin, 1), "l2")
    else:
        space = Space(args.d, "l2")
    f = _integrand_from_args(args, cfg, cfg_path, space)

    if cfg is not None and cfg.get("measure"):
        mu = load_measure(cfg.require("measure", cfg_path), space)
    else:
        mu = RadonMeasure.lebesgue(space, (0.0,) * space.dim, (1.0,) * space.dim)
    if cfg is not None and cfg.get("region"):
        omega = load_region(cfg.require("region", cfg_path), space)
    else:
        omega = MeasurableRegion.box((0.0,) * space.dim, (1.0,) * space.dim)

    fam_kind = "interval"
    if cfg is not None and "family" in cfg.children:
        fam_kind = cfg.children["family"].get("kind", "interval")
    family = family_from_spec(space, fam_kind)

    eps = args.eps if args.eps is not None else \
        (cfg.get_float("eps", cfg_path, 1e-3) if cfg else 1e-3)
    tol = args.tol if args.tol is not None else \
        (cfg.get_float("tol", cfg_path) if cfg else None)
    seed = args.seed if args.seed is not None else \
        (cfg.get_int("seed", cfg_path, 0) if cfg else 0)
    cert = integrate(f, omega, mu, family, eps=eps, tol=tol, seed=seed)
    _emit(cert.to_text(), args.out)
    return 0


def _cmd_pv_demo(args) -> int:
    lines = ["n-balls central-radius sum abs-sum residual-tail"]
    if args.n:
        radius = 0.5 * (1.0 / args.n - 0.5 / (args.n * args.n))
        rep = pv_counterexample(args.n, radius)
        lines.append(" ".join([str(rep.n_balls), _fmt(rep.central_radius),
                               _fmt(rep.sum), _fmt(rep.abs_sum),
                               _fmt(rep.residual_tail)]))
    if args.halvings:
        for rep in pv_sweep(args.start_radius, args.halvings):
            lines.append(" ".join([str(rep.n_balls), _fmt(rep.central_radius),
                                   _fmt(rep.sum), _fmt(rep.abs_sum),
                                   _fmt(rep.residual_tail)]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_validate(args) -> int:
    try:
        with open(args.shapes) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read shapes file {args.shapes}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.shapes}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if isinstance(payload, dict):
        space_rec = payload.get("space", {})
        records = payload.get("shapes", [])
    else:
        space_rec, records = {}, payload
    space = Space(int(space_rec.get("dim", 2)), space_rec.get("norm", "l2"),
                  tuple(space_rec["weights"]) if "weights" in space_rec else None)
    sets = [shape_from_record(space, rec) for rec in records]
    lines = []
    all_ok = True
    for i, S in enumerate(sets):
        rep = validate_morse(S, samples=args.samples)
        all_ok &= rep.valid
        verdict = "valid" if rep.valid else "INVALID " + "; ".join(rep.failures)
        lines.append(f"shape {i}: min-lambda {_fmt(rep.min_lambda)} {verdict}")
    if args.satellite:
        cfg = SatelliteConfig(tuple((S.tag, S) for S in sets), args.tau)
        verdict = is_satellite_config(cfg)
        ok = "yes" if verdict.ok else f"no ({verdict.violation})"
        lines.append(f"satellite configuration (tau {_fmt(args.tau)}): {ok}")
        bound = kappa_bound(space, max(S.lam for S in sets), "morse")
        lines.append(f"kappa-bound: {bound}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="morsecover",
        description="Covering selections, packing bounds and gauge-fine "
                    "Riemann-sum integration.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pack", help="bracket a packing number")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--norm", default="l2", choices=("l1", "l2", "linf"))
    p.add_argument("--container", type=float, required=True)
    p.add_argument("--mindist", type=float, required=True)
    p.add_argument("--anchored", action="store_true")
    p.add_argument("--surface", action="store_true")
    p.add_argument("--budget", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pack)

    p = sub.add_parser("cover", help="greedy subcover and disjoint partition")
    p.add_argument("--config")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--tau", type=float, default=1.2)
    p.add_argument("--radius-min", type=float, default=0.2)
    p.add_argument("--radius-max", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--svg")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cover)

    p = sub.add_parser("integrate", help="certified Riemann-sum integral")
    p.add_argument("--config")
    p.add_argument("--builtin")
    p.add_argument("--expr")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_integrate)

    p = sub.add_parser("pv-demo", help="principal-value counterexample table")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--halvings", type=int, default=0)
    p.add_argument("--start-radius", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pv_demo)

    p = sub.add_parser("validate", help="shape and configuration verdicts")
    p.add_argument("--shapes", required=True)
    p.add_argument("--satellite", action="store_true")
    p.add_argument("--tau", type=float, default=1.2)
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_validate)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
