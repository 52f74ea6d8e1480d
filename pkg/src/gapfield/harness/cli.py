"""Command line entry point: ``gapfield {solve,sweep,predict,verify,neck}``.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure
(including a failed invariant check).
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ..asymptotics import gap_prediction, gradient_blowup_prediction, p_laplacian_prediction
from ..errors import ConfigError, DomainError, GeometryError, NumericalError
from ..geometry import GapGeometry, closest_gap
from ..neck import (
    MODES,
    GapProfile,
    bound_pair,
    conductance_constant,
    neck_conductance_leading,
    neck_conductance_quadrature,
)
from ..solver import (
    MAX_LEVEL,
    boundary_flux,
    dirichlet_energy,
    discretize,
    max_gradient,
    solve_floating,
    variational_bounds,
)
from .config import load_config
from .report import FORMATS, emit_report
from .sweep import run_sweep
from .verify import run_invariant_suite


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=float))


def _plan(args):
    if not args.config:
        raise ConfigError("this command needs --config", key_path="--config")
    plan = load_config(args.config)
    from dataclasses import replace

    if args.level is not None:
        plan = replace(plan, level=args.level)
    if args.mode is not None:
        plan = replace(plan, mode=args.mode)
    return plan


def cmd_solve(args) -> int:
    plan = _plan(args)
    cfg = plan.config
    if cfg.outer is None or not cfg.particles:
        raise ConfigError("solve needs an outer boundary and particles", key_path="particles")
    disc = discretize(cfg, plan.level)
    u = solve_floating(disc, plan.boundary)
    out = {
        "potentials": [float(t) for t in u.potentials],
        "fluxes": [boundary_flux(u, k) for k in range(cfg.n_particles)],
        "outer_flux": boundary_flux(u, "outer"),
        "energy": dirichlet_energy(u),
        "level": plan.level,
    }
    if cfg.n_particles >= 2:
        i, j = plan.pair
        gap = closest_gap(cfg, i, j)
        grad = max_gradient(u, gap)
        out.update(delta=gap.delta, max_grad=grad.value,
                   argmax=[grad.location.real, grad.location.imag], argmax_in_neck=grad.in_neck)
    _dump(out)
    return 0


def cmd_sweep(args) -> int:
    plan = _plan(args)
    report = run_sweep(plan)
    path = emit_report(report, args.format, args.out)
    print(path)
    for line in report.failures:
        print(f"row failed: {line}", file=sys.stderr)
    return 0


def cmd_predict(args) -> int:
    mode = args.mode or "derived"
    if args.config:
        plan = _plan(args)
        R_o = plan.R_o if args.r_o is None else args.r_o
        if R_o is None:
            raise ConfigError("predict needs R_o in the configuration or --r-o", key_path="R_o")
        if plan.analytic_gap is not None:
            gap = plan.analytic_gap
        else:
            gap = closest_gap(plan.config, *plan.pair)
        if args.delta is not None:
            from dataclasses import replace

            gap = replace(gap, delta=args.delta, neck_width=None)
        C12 = conductance_constant(gap, mode)
        delta, dim = gap.delta, gap.dim
    else:
        if args.r_o is None or args.delta is None:
            raise ConfigError("predict needs --r-o and --delta (or --config)", key_path="--r-o")
        dim = args.dim
        alpha = args.alpha
        if dim == 2:
            gap = GapGeometry.parabolic_2d(args.delta, alpha[0], neck_width=None)
        else:
            gap = GapGeometry.parabolic_3d(args.delta, (alpha[0], alpha[-1]), neck_width=None)
        C12 = conductance_constant(gap, mode)
        R_o, delta = args.r_o, args.delta
    if args.p is not None:
        pred = p_laplacian_prediction(R_o, C12, delta, dim, args.p)
    elif args.config:
        pred = gap_prediction(R_o, gap, mode)
    else:
        pred = gradient_blowup_prediction(R_o, C12, delta, dim, mode)
    _dump(pred.to_dict())
    return 0


def cmd_verify(args) -> int:
    results = run_invariant_suite(seed=args.seed, level=args.level or 1)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 2


def cmd_neck(args) -> int:
    mode = args.mode or "derived"
    if args.config:
        plan = _plan(args)
        if plan.analytic_gap is not None:
            gap = plan.analytic_gap
            if args.width is not None:
                gap = gap.with_neck_width(args.width)
            prof = GapProfile.parabolic(gap)
            bp = bound_pair(prof)
        else:
            cfg = plan.config
            gap = closest_gap(cfg, *plan.pair)
            w = args.width if args.width is not None else plan.neck_width
            if w is not None:
                gap = gap.with_neck_width(w)
            if gap.neck_width is None:
                raise GeometryError("no admissible neck half-width for this gap")
            from ..solver import solve_capacitance

            psi = solve_capacitance(discretize(cfg, plan.level), plan.pair[0])
            bp = variational_bounds(psi, gap, 0)
            prof = GapProfile.exact(cfg, gap)
    else:
        if args.delta is None or args.width is None:
            raise ConfigError("neck needs --delta and --width (or --config)", key_path="--delta")
        if args.profile == "constant":
            prof = GapProfile.constant(args.delta, args.width, args.dim)
            gap = None
        else:
            a = args.alpha
            gap = (GapGeometry.parabolic_2d(args.delta, a[0], neck_width=None) if args.dim == 2
                   else GapGeometry.parabolic_3d(args.delta, (a[0], a[-1]), neck_width=None))
            prof = GapProfile.parabolic(gap, args.width)
        bp = bound_pair(prof)
    out = {"profile": prof.kind, "delta": prof.delta, "width": prof.width, "dim": prof.dim,
           "conductance": neck_conductance_quadrature(prof), **bp.to_dict()}
    if gap is not None:
        out["leading"] = neck_conductance_leading(gap, mode)
        out["mode"] = mode
    _dump(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gapfield", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON run plan")
        p.add_argument("--level", type=int, choices=range(1, MAX_LEVEL + 1), help="refinement level")
        p.add_argument("--mode", choices=MODES, help="conductance constant convention")
        return p

    common(sub.add_parser("solve", help="solve one configuration and print potentials, fluxes, energy"))
    p = common(sub.add_parser("sweep", help="run a gap sweep and write a report"))
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out", default=".", help="output directory")
    for name, helptext in (("predict", "closed-form predictions only"),
                           ("neck", "neck conductance and bound pair for a profile")):
        p = common(sub.add_parser(name, help=helptext))
        p.add_argument("--delta", type=float)
        p.add_argument("--alpha", type=float, nargs="+", default=[1.0],
                       help="curvature radius (d=2) or principal radii (d=3)")
        p.add_argument("--dim", type=int, choices=(2, 3), default=2)
        if name == "predict":
            p.add_argument("--r-o", dest="r_o", type=float, help="zero-gap flux number")
            p.add_argument("--p", type=float, help="power-law exponent")
        else:
            p.add_argument("--width", type=float, help="neck half-width")
            p.add_argument("--profile", choices=("parabolic", "constant"), default="parabolic")
    p = sub.add_parser("verify", help="run the seeded invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--level", type=int, choices=range(1, MAX_LEVEL + 1))
    return parser


_COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "predict": cmd_predict,
             "verify": cmd_verify, "neck": cmd_neck}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"gapfield: error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"gapfield: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, GeometryError, DomainError) as exc:
        print(f"gapfield: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
