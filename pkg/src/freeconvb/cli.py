"""Command-line front end.

Every subcommand writes a delimited table (CSV with header, or JSON) and can
render a figure with ``--plot file.svg``.  Exit status is 2 for bad
arguments or specs and 1 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import checks, fock, laws, nc
from .dualnum import DualComplex
from .errors import FreeConvError, InvalidSpec
from .measures import stieltjes_invert
from .specio import load_spec, parse_grid, parse_measure, parse_second, write_table
from .subordination import Domain, SolverConfig, additive_omega
from .typeb import TypeBLaw, boxplus_b, boxtimes_b, cfree_boxplus, ns_semigroup_b

__all__ = ["RunConfig", "main", "build_parser"]

log = logging.getLogger("freeconvb")


@dataclass(frozen=True)
class RunConfig:
    tol: float = 1e-13
    max_iter: int = 500
    eps_im: float = 1e-7
    grid: tuple = (-3.0, 3.0, 200)
    output_format: str = "csv"
    plot_path: str | None = None

    def __post_init__(self):
        start, stop, count = self.grid
        if self.tol <= 0:
            raise InvalidSpec("--tol must be positive")
        if self.max_iter < 1:
            raise InvalidSpec("--max-iter must be positive")
        if self.eps_im <= 0:
            raise InvalidSpec("--eps-im must be positive")
        if count < 2 or not start < stop:
            raise InvalidSpec("grid needs start < stop and at least 2 points")

    @property
    def solver(self) -> SolverConfig:
        return SolverConfig(self.tol, self.max_iter, self.eps_im)

    @property
    def xs(self) -> np.ndarray:
        start, stop, count = self.grid
        return np.linspace(start, stop, int(count))

    def points(self) -> list:
        return [complex(x, self.eps_im) for x in self.xs]


# =============================================================================
# Subcommands: each returns (columns, rows, plot) where plot is None or a
# dict with the arguments of plotting.save_lines
# =============================================================================


def _law(spec_first, spec_second) -> TypeBLaw:
    first = parse_measure(load_spec(spec_first))
    second = parse_second(load_spec(spec_second)) if spec_second else parse_second(None)
    return TypeBLaw(first, second)


def _density_plot(cfg, xs, densities, title):
    return {
        "x": xs,
        "series": densities,
        "xlabel": "x",
        "ylabel": "density",
        "title": title,
        "caption": f"-Im G(x + i eps)/pi with eps = {cfg.eps_im:g}",
    }


def cmd_boxplus(args, cfg):
    mu1 = parse_measure(load_spec(args.a))
    mu2 = parse_measure(load_spec(args.b))
    rows = []
    for z in cfg.points():
        G = additive_omega(mu1, mu2, z, cfg.solver).value.re
        rows.append((z.real, z.imag, G.real, G.imag, -G.imag / math.pi))
    cols = ("z_re", "z_im", "G3_re", "G3_im", "density")
    plot = _density_plot(cfg, cfg.xs, {"boxplus": [r[4] for r in rows]}, "free convolution")
    return cols, rows, plot


def cmd_boxplus_b(args, cfg):
    out = boxplus_b(_law(args.a, args.a2), _law(args.b, args.b2), cfg.solver)
    rows = []
    for z in cfg.points():
        G, g = out.G3(z), out.g3(z)
        rows.append((z.real, z.imag, G.real, G.imag, g.real, g.imag))
    cols = ("z_re", "z_im", "G3_re", "G3_im", "g3_re", "g3_im")
    plot = _density_plot(
        cfg,
        cfg.xs,
        {"first": [-r[3] / math.pi for r in rows], "second": [-r[5] / math.pi for r in rows]},
        "type B free convolution",
    )
    return cols, rows, plot


def cmd_boxtimes_b(args, cfg):
    domain = Domain(args.domain)
    out = boxtimes_b(_law(args.a, args.a2), _law(args.b, args.b2), domain, cfg.solver)
    rows = []
    for x in cfg.xs:
        z = complex(x, args.im)
        p, q = out.psi3(z), out.psi_second(z)
        rows.append((z.real, z.imag, p.real, p.imag, q.real, q.imag))
    cols = ("z_re", "z_im", "psi3_re", "psi3_im", "psi_nu3_re", "psi_nu3_im")
    plot = {
        "x": cfg.xs,
        "series": {"Re psi3": [r[2] for r in rows], "Re psi_nu3": [r[4] for r in rows]},
        "xlabel": "Re z",
        "ylabel": "value",
        "title": "type B multiplicative convolution",
        "caption": f"Im z = {args.im:g}",
    }
    return cols, rows, plot


def cmd_cfree(args, cfg):
    mu1 = parse_measure(load_spec(args.a))
    rho1 = parse_measure(load_spec(args.a2))
    mu2 = parse_measure(load_spec(args.b))
    rho2 = parse_measure(load_spec(args.b2))
    out = cfree_boxplus((mu1, rho1), (mu2, rho2), cfg.solver)
    rows = []
    for z in cfg.points():
        F = out(z)
        G = 1 / F
        rows.append((z.real, z.imag, F.real, F.imag, -G.imag / math.pi))
    cols = ("z_re", "z_im", "F3_re", "F3_im", "density")
    plot = _density_plot(cfg, cfg.xs, {"rho3": [r[4] for r in rows]}, "c-free convolution")
    return cols, rows, plot


def cmd_ns_power(args, cfg):
    law = _law(args.a, args.a2)
    rows = []
    for z in cfg.points():
        G, g = ns_semigroup_b(law, args.t, z, cfg.solver)
        rows.append((z.real, z.imag, G.real, G.imag, g.real, g.imag))
    cols = ("z_re", "z_im", "G3_re", "G3_im", "g3_re", "g3_im")
    plot = _density_plot(
        cfg, cfg.xs, {f"t = {args.t:g}": [-r[3] / math.pi for r in rows]}, "free convolution power"
    )
    return cols, rows, plot


def _parse_dual_list(text: str, exact: bool):
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        re_part, _, inf_part = token.partition(":")
        conv = Fraction if exact else float
        try:
            values.append(DualComplex(conv(re_part), conv(inf_part or "0")))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidSpec(f"bad dual number {token!r}") from exc
    if not values:
        raise InvalidSpec("empty sequence")
    return values


def _series_rows(seq):
    return [(n, str(v.re) if isinstance(v.re, Fraction) else v.re,
             str(v.inf) if isinstance(v.inf, Fraction) else v.inf)
            for n, v in enumerate(seq, start=1)]


def cmd_moments(args, cfg):
    kappa = _parse_dual_list(args.kappa, args.exact)
    m = nc.moments_from_cumulants(kappa, args.order, exact=args.exact)
    rows = _series_rows(m)
    plot = {
        "x": [r[0] for r in rows],
        "series": {"m": [float(Fraction(r[1])) for r in rows],
                   "m'": [float(Fraction(r[2])) for r in rows]},
        "xlabel": "order",
        "ylabel": "moment",
        "title": "dual moments",
    }
    return ("n", "m_re", "m_inf"), rows, plot


def cmd_cumulants(args, cfg):
    moments = _parse_dual_list(args.moments, args.exact)
    k = nc.cumulants_from_moments(moments, args.order, exact=args.exact)
    rows = _series_rows(k)
    plot = {
        "x": [r[0] for r in rows],
        "series": {"kappa": [float(Fraction(r[1])) for r in rows],
                   "kappa'": [float(Fraction(r[2])) for r in rows]},
        "xlabel": "order",
        "ylabel": "cumulant",
        "title": "dual free cumulants",
    }
    return ("n", "kappa_re", "kappa_inf"), rows, plot


def cmd_density(args, cfg):
    mu = parse_measure(load_spec(args.a))
    dens = stieltjes_invert(mu.cauchy, cfg.xs, cfg.eps_im, richardson=args.richardson)
    rows = list(zip(dens.grid, dens.values))
    plot = _density_plot(cfg, dens.grid, {"density": dens.values}, "Stieltjes inversion")
    return ("x", "density"), rows, plot


def _parse_complex_pair(text: str) -> complex:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise InvalidSpec(f"--b must be RE or RE,IM, got {text!r}") from exc
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise InvalidSpec(f"--b must be RE or RE,IM, got {text!r}")


def cmd_stable(args, cfg):
    spec = laws.StableSpec(args.case, args.alpha, _parse_complex_pair(args.b))
    rows = []
    for z in cfg.points():
        G = laws.stable_cauchy(spec, args.q, z)
        g = laws.stable_second(spec, z) if args.q == 1 else complex("nan")
        rows.append((z.real, z.imag, G.real, G.imag, g.real, g.imag))
    cols = ("z_re", "z_im", "G3_re", "G3_im", "g3_re", "g3_im")
    plot = _density_plot(cfg, cfg.xs, {"stable": [-r[3] / math.pi for r in rows]},
                         f"stable law, case {args.case}")
    return cols, rows, plot


def cmd_burgers(args, cfg):
    law = _law(args.a, args.a2)
    try:
        steps = [float(s) for s in args.steps.split(",")]
    except ValueError as exc:
        raise InvalidSpec(f"bad --steps {args.steps!r}") from exc
    grid = [complex(x, args.y) for x in cfg.xs]
    rows = []
    for h in steps:
        r1, r2 = laws.burgers_residual(law, args.t, grid, h, h, cfg.solver)
        rows.append((h, r1, r2))
    plot = {
        "x": steps,
        "series": {"first": [r[1] for r in rows], "second": [r[2] for r in rows]},
        "xlabel": "step",
        "ylabel": "max residual",
        "title": f"type B heat equation at t = {args.t:g}",
        "logy": True,
    }
    return ("h", "r1", "r2"), rows, plot


def cmd_fock_moments(args, cfg):
    depth = args.depth if args.depth is not None else math.ceil(args.m_max / 2)
    basis = fock.build_fock(args.n, args.k, depth)
    X = fock.matrix_XN(basis, args.n, 1)
    rows = []
    for m in range(1, args.m_max + 1):
        value = fock.psi_N_moment(basis, X, m, exact=args.exact)
        predicted = fock.predicted_moment(args.n, m)
        if args.exact:
            rows.append((args.n, m, str(value), str(predicted), str(value - predicted)))
        else:
            rows.append((args.n, m, value, float(predicted), value - float(predicted)))
    plot = {
        "x": [r[1] for r in rows],
        "series": {"psi_N": [float(Fraction(r[2])) for r in rows],
                   "predicted": [float(Fraction(r[3])) for r in rows]},
        "xlabel": "m",
        "ylabel": "moment",
        "title": f"Fock model, N = {args.n}",
    }
    return ("N", "m", "psi", "predicted", "difference"), rows, plot


def cmd_check(args, cfg):
    results = checks.run_suite(args.suite)
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [(r.number, r.name, "PASS" if r.passed else "FAIL", r.value, r.threshold)
            for r in results]
    plot = {
        "x": [r.number for r in results],
        "series": {"residual / limit": [r.value / r.threshold if r.threshold else r.value
                                        for r in results]},
        "xlabel": "criterion",
        "ylabel": "ratio",
        "title": f"check suite {args.suite}",
    }
    return ("criterion", "name", "status", "residual", "limit"), rows, plot


# =============================================================================
# Parser
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-13)
    common.add_argument("--max-iter", type=int, default=500)
    common.add_argument("--eps-im", type=float, default=1e-7)
    common.add_argument("--grid", default="-3:3:200", help="a:b:n")
    common.add_argument("--output", choices=("csv", "json"), default="csv")
    common.add_argument("--plot", metavar="FILE.svg")
    common.add_argument("--out", metavar="FILE", help="write the table here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="freeconv-b", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("boxplus", cmd_boxplus, "free additive convolution")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    for name, func, text in (
        ("boxplus-b", cmd_boxplus_b, "type B additive convolution"),
        ("boxtimes-b", cmd_boxtimes_b, "type B multiplicative convolution"),
    ):
        p = add(name, func, text)
        p.add_argument("--a", required=True)
        p.add_argument("--a2")
        p.add_argument("--b", required=True)
        p.add_argument("--b2")
        if name == "boxtimes-b":
            p.add_argument("--domain", choices=("disc", "slit"), default="disc")
            p.add_argument("--im", type=float, default=0.0, help="imaginary part of z")

    p = add("cfree", cmd_cfree, "conditionally free convolution")
    for flag in ("--a", "--a2", "--b", "--b2"):
        p.add_argument(flag, required=True)

    p = add("ns-power", cmd_ns_power, "type B free convolution power")
    p.add_argument("--a", required=True)
    p.add_argument("--a2")
    p.add_argument("--t", type=float, required=True)

    p = add("moments", cmd_moments, "dual moments from dual free cumulants")
    p.add_argument("--kappa", required=True, help="comma separated re:inf pairs")
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--exact", action="store_true")

    p = add("cumulants", cmd_cumulants, "dual free cumulants from dual moments")
    p.add_argument("--moments", required=True, help="comma separated re:inf pairs")
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--exact", action="store_true")

    p = add("density", cmd_density, "density by Stieltjes inversion")
    p.add_argument("--a", required=True)
    p.add_argument("--richardson", action="store_true")

    p = add("stable", cmd_stable, "free stable laws")
    p.add_argument("--case", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--b", default="-1", help="RE or RE,IM")
    p.add_argument("--q", type=float, default=1.0)

    p = add("burgers", cmd_burgers, "type B heat equation residuals")
    p.add_argument("--a", required=True)
    p.add_argument("--a2")
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--steps", default="2e-3,1e-3")
    p.add_argument("--y", type=float, default=0.5, help="imaginary part of probe points")

    p = add("fock-moments", cmd_fock_moments, "Fock model moments")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--exact", action="store_true")

    p = add("check", cmd_check, "run the acceptance suite")
    p.add_argument("--suite", default="all", choices=tuple(checks.SUITES))
    return parser


# Options whose values may legitimately start with "-" (grids, negative reals).
_SIGNED_OPTIONS = frozenset({"--grid", "--b", "--im", "--y", "--kappa", "--moments"})


def _attach_signed_values(argv: Sequence[str]) -> list:
    """Rewrite ``--grid -3:3:200`` as ``--grid=-3:3:200`` so argparse accepts it."""
    out, i = [], 0
    while i < len(argv):
        arg = argv[i]
        if arg in _SIGNED_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_signed_values(sys.argv[1:] if argv is None else list(argv)))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        xs = parse_grid(args.grid)
        cfg = RunConfig(args.tol, args.max_iter, args.eps_im,
                        (float(xs[0]), float(xs[-1]), len(xs)), args.output, args.plot)
    except InvalidSpec as exc:
        parser.error(str(exc))

    try:
        columns, rows, plot = args.func(args, cfg)
    except InvalidSpec as exc:
        parser.error(str(exc))
    except (FreeConvError, ArithmeticError, ValueError) as exc:
        print(f"error: {args.command} failed: {exc}", file=sys.stderr)
        return 1

    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_table(columns, rows, cfg.output_format, fh)
    else:
        write_table(columns, rows, cfg.output_format, sys.stdout)
    if cfg.plot_path and plot is not None:
        from .plotting import save_lines

        x = plot.pop("x")
        series = plot.pop("series")
        save_lines(cfg.plot_path, x, series, **plot)
    if args.command == "check" and not all(r[2] == "PASS" for r in rows):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
