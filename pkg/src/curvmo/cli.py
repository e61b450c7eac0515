"""Command-line front-end: ``curvmo {moments,density,verify,ht-report}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .closed_forms import Atom, CrossDensity, ProductKernel, TabulatedDensity, _kernel_histogram
from .curvature import InvalidTensorError
from .invariants import hitchin_thorpe_report
from .models import KINDS, ModelError, ModelSpec, parse_child
from .moments import DegreeBudgetError
from .verify import SUITES, run_suite

SCHEMA_VERSION = 1


def _value(v) -> str:
    return str(v) if isinstance(v, (int, Fraction)) else repr(float(v))


def _json(payload: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **payload}, sort_keys=True, indent=2) + "\n"


def _csv(header: Sequence[str], rows, comments: Sequence[str] = (), footer: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    for line in footer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _rational_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _spec_from_args(args) -> ModelSpec:
    if args.model is None:
        raise ModelError("--model is required")
    return ModelSpec(
        args.model,
        m=args.m,
        n=args.n,
        c=args.c,
        kappa=args.kappa,
        a=args.a,
        b=args.b,
        mu=args.mu,
        nu=args.nu,
        seed=args.seed,
        path=args.path,
        left=parse_child(args.left) if args.left else None,
        right=parse_child(args.right) if args.right else None,
    )


# -- commands ---------------------------------------------------------------------------


def cmd_moments(args) -> str:
    spec = _spec_from_args(args)
    seq = spec.moments(args.k)
    values = [_value(v) for v in seq.values]
    if args.format == "csv":
        return _csv(["k", "moment"], list(enumerate(values)), comments=[f"model {json.dumps(spec.describe(), sort_keys=True)}"])
    return _json({"command": "moments", "model": spec.describe(), "dimension": seq.dimension, "moments": values})


def _density_table(density, points: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Abscissae, density values and total mass for a density object."""
    if points < 2:
        raise ModelError("--points must be at least 2")
    if isinstance(density, Atom):
        raise ModelError("a space form has a point-mass curvature law, not a density")
    if isinstance(density, CrossDensity):
        s = density.abscissae(points)
        return s, np.array([density.pdf(float(v)) for v in s]), density.total_mass()
    if isinstance(density, ProductKernel):
        if density.closed_form:
            m, _, mu = density._oriented()
            # uniform in x where s = mu x^2; x = 0 is skipped when the density blows up there
            x = np.arange(1, points + 1) / points if m == 2 else np.linspace(0.0, 1.0, points)
            s = mu * x * x
            _, w = density.nodes(96)
            return s, np.asarray(density.pdf(s), dtype=float), float(np.sum(w))
        density = _kernel_histogram(density)
    if isinstance(density, TabulatedDensity):
        lo, hi = density.support
        s = np.linspace(lo, hi, points + 2)[1:-1]
        return s, np.asarray(density.pdf(s), dtype=float), density.total_mass()
    raise ModelError(f"no tabulation for {type(density).__name__}")


def cmd_density(args) -> str:
    spec = _spec_from_args(args)
    s, f, mass = _density_table(spec.density(), args.points)
    rows = [(repr(float(a)), repr(float(b))) for a, b in zip(s, f)]
    if args.format == "json":
        return _json(
            {
                "command": "density",
                "model": spec.describe(),
                "points": [[float(a), float(b)] for a, b in zip(s, f)],
                "integral": mass,
            }
        )
    return _csv(
        ["s", "density"],
        rows,
        comments=[f"model {json.dumps(spec.describe(), sort_keys=True)}"],
        footer=[f"integral {mass!r}"],
    )


def cmd_verify(args) -> tuple[str, bool]:
    checks = run_suite(args.suite, seed=args.seed, samples=args.samples)
    ok = all(c.passed for c in checks)
    if args.format == "csv":
        rows = [(c.suite, c.name, "pass" if c.passed else "fail", c.detail) for c in checks]
        return _csv(["suite", "check", "result", "detail"], rows), ok
    payload = {
        "command": "verify",
        "suite": args.suite,
        "seed": args.seed,
        "samples": args.samples,
        "passed": ok,
        "checks": [c.as_dict() for c in checks],
    }
    return _json(payload), ok


def cmd_ht_report(args) -> str:
    spec = _spec_from_args(args)
    report = hitchin_thorpe_report(spec.tensor())
    if args.format == "csv":
        return _csv(["field", "value"], [(k, v) for k, v in sorted(report.to_dict().items())])
    return _json({"command": "ht-report", "model": spec.describe(), **report.to_dict()})


# -- argument parsing -------------------------------------------------------------------


def _model_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=KINDS, help="model kind")
    g.add_argument("--m", type=int, help="dimension (sphere, flat, random, kernel)")
    g.add_argument("--n", type=int, help="CP^n/HP^n index, Gr_2(R^n) n, or kernel second dimension")
    g.add_argument("--c", type=_rational_arg, help="constant sectional curvature of a sphere")
    g.add_argument("--kappa", type=_rational_arg, help="scalar curvature of CP^n or HP^n")
    g.add_argument("--a", type=int, help="first parameter of the rank-one family")
    g.add_argument("--b", type=int, help="second parameter of the rank-one family")
    g.add_argument("--mu", type=_rational_arg, help="curvature of the first kernel factor")
    g.add_argument("--nu", type=_rational_arg, help="curvature of the second kernel factor")
    g.add_argument("--left", help="first product factor, e.g. sphere:2:1 or flat:1")
    g.add_argument("--right", help="second product factor, e.g. cpn:2:24")
    g.add_argument("--path", help="JSON tensor file for --model file")
    return p


def _output_flags(default_format: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "csv"), default=default_format)
    p.add_argument("--out", help="write to this file instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="seed for random tensors and Monte Carlo")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curvmo", description="Moments of sectional curvature.")
    sub = parser.add_subparsers(dest="command", required=True)
    model = _model_flags()

    p = sub.add_parser("moments", parents=[model, _output_flags("json")], help="exact moments 0..k")
    p.add_argument("--k", type=int, required=True, help="highest moment order")

    p = sub.add_parser("density", parents=[model, _output_flags("csv")], help="tabulate a curvature density")
    p.add_argument("--points", type=int, default=101)

    p = sub.add_parser("verify", parents=[_output_flags("json")], help="run self-check suites")
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    p.add_argument("--samples", type=int, default=200_000, help="Monte Carlo sample count")

    sub.add_parser("ht-report", parents=[model, _output_flags("json")], help="Euler-characteristic identity report")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ok = True
    try:
        if args.command == "moments":
            text = cmd_moments(args)
        elif args.command == "density":
            text = cmd_density(args)
        elif args.command == "verify":
            text, ok = cmd_verify(args)
        else:
            text = cmd_ht_report(args)
    except (ModelError, DegreeBudgetError, InvalidTensorError, ValueError) as exc:
        print(f"curvmo {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
