"""Self-check suites run by ``curvmo verify``.

Each suite returns a list of ``Check`` records; a suite passes when every
check does.  The exact suites compare rationals with ``==``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .closed_forms import (
    CROSS_PARAMETERS,
    cross_density_moment_quadrature,
    cross_moment,
    gr2rn_moment,
    product_moment,
)
from .curvature import (
    direct_sum,
    make_constant_curvature,
    make_cpn,
    make_hpn,
    make_zero,
    random_tensor,
)
from .invariants import hitchin_thorpe_report, model_table, model_tensors, pf2_column, interpolate_invariant
from .mc import mc_moments
from .moments import psi_sequence, spectrum_moments
from .models import ModelSpec

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"suite": self.suite, "name": self.name, "passed": self.passed, "detail": self.detail}


def _spheres(seed: int, samples: int) -> list[Check]:
    out = []
    for m in range(2, 9):
        values = psi_sequence(make_constant_curvature(m, 1), 5).values
        bad = [k for k, v in enumerate(values) if v != 1]
        out.append(Check("spheres", f"S^{m} k<=5", not bad, f"non-unit orders {bad}" if bad else "all 1"))
    return out


def _cross(seed: int, samples: int) -> list[Check]:
    out = []
    cases = [("cpn", 2, make_cpn(2)), ("cpn", 3, make_cpn(3)), ("hpn", 2, make_hpn(2))]
    for kind, n, tensor in cases:
        exact = psi_sequence(tensor, 4).values
        spec = ModelSpec(kind, n=n).spectrum()
        fast = spectrum_moments(spec, 4).values
        a, b = CROSS_PARAMETERS[kind](n)
        closed = tuple(cross_moment(a, b, k) for k in range(5))
        ok = exact == fast == closed
        out.append(Check("cross", f"{kind}{n} tensor/spectrum/closed k<=4", ok, " ".join(map(str, exact))))
    op2 = spectrum_moments(ModelSpec("op2").spectrum(), 6).values
    closed = tuple(cross_moment(3, 3, k) for k in range(7))
    out.append(Check("cross", "op2 spectrum/closed k<=6", op2 == closed, " ".join(map(str, op2))))
    worst = 0.0
    for a in range(5):
        for b in range(5):
            for k in range(7):
                worst = max(worst, abs(cross_density_moment_quadrature(a, b, k) - float(cross_moment(a, b, k))))
    out.append(Check("cross", "quadrature vs exact (a,b)<=4 k<=6", worst <= 1e-10, f"max error {worst:.3g}"))
    return out


def _products(seed: int, samples: int) -> list[Check]:
    out = []
    factors = {
        "S2": make_constant_curvature(2, 1),
        "S3": make_constant_curvature(3, 1),
        "R3": random_tensor(3, seed),
    }
    seqs = {name: psi_sequence(t, 3).values for name, t in factors.items()}
    for left, tl in factors.items():
        for right, tr in factors.items():
            direct = psi_sequence(direct_sum(tl, tr), 3).values
            combined = tuple(
                product_moment(seqs[left], tl.dimension, seqs[right], tr.dimension, k) for k in range(4)
            )
            out.append(Check("products", f"{left}x{right} k<=3", direct == combined, " ".join(map(str, direct))))
    circle = (Fraction(1),) + (Fraction(0),) * 3
    s3 = psi_sequence(make_constant_curvature(3, 1), 3).values
    direct = psi_sequence(direct_sum(make_zero(1), make_constant_curvature(3, 1)), 3).values
    combined = tuple(product_moment(circle, 1, s3, 3, k) for k in range(4))
    out.append(Check("products", "S1xS3 k<=3", direct == combined, " ".join(map(str, direct))))
    return out


def _gr2(seed: int, samples: int) -> list[Check]:
    s2s2 = psi_sequence(direct_sum(make_constant_curvature(2, 1), make_constant_curvature(2, 1)), 4).values
    out = []
    ok = all(gr2rn_moment(4, k) == 2**k * s2s2[k] for k in range(5))
    out.append(Check("gr2", "Gr2(R^4) = 2^k S2xS2, k<=4", ok))
    for n in range(4, 9):
        value = gr2rn_moment(n, 1)
        out.append(Check("gr2", f"Gr2(R^{n}) mean", value == Fraction(n - 2, 2 * n - 5), str(value)))
    return out


def _mc(seed: int, samples: int) -> list[Check]:
    cases = [
        ("cp2", make_cpn(2, 24), (1, 2)),
        ("hp2", make_hpn(2), (1,)),
        ("s2xs2", direct_sum(make_constant_curvature(2, 1), make_constant_curvature(2, 1)), (1, 2)),
    ]
    out = []
    for name, tensor, ks in cases:
        exact = psi_sequence(tensor, max(ks)).values
        estimates = mc_moments(tensor, ks, samples, seed)
        for k in ks:
            est = estimates[k]
            z = est.z_score(exact[k])
            out.append(
                Check("mc", f"{name} k={k}", abs(z) <= 4, f"mean {est.mean:.6g} se {est.std_error:.3g} z {z:+.2f}")
            )
    return out


def _ht(seed: int, samples: int) -> list[Check]:
    out = []
    for name, tensor in model_tensors().items():
        rep = hitchin_thorpe_report(tensor)
        ok = rep.identity_holds and rep.second_moment_nonnegative and rep.variance_nonnegative
        out.append(Check("ht", f"{name} identity", ok, f"lhs = rhs = {rep.lhs}"))
    expected = {"CP2": (4, Fraction(24, 5), 0), "S4": (1, 1, 0), "S2xS2": (Fraction(1, 9), Fraction(7, 45), 0),
                "S1xS3": (Fraction(1, 4), Fraction(1, 3), Fraction(3, 2))}
    rows_ok = all(row.as_row() == tuple(map(Fraction, expected[row.label])) for row, _ in model_table())
    out.append(Check("ht", "model table", rows_ok))
    coeffs = interpolate_invariant(pf2_column()).coefficients
    out.append(Check("ht", "pf2 interpolation", coeffs == (-4, 5, Fraction(-4, 9)), " ".join(map(str, coeffs))))
    return out


SUITES: dict[str, Callable[[int, int], list[Check]]] = {
    "spheres": _spheres,
    "cross": _cross,
    "products": _products,
    "gr2": _gr2,
    "mc": _mc,
    "ht": _ht,
}


def run_suite(name: str, seed: int = 0, samples: int = 200_000) -> list[Check]:
    if name == "all":
        return [c for suite in SUITES.values() for c in suite(seed, samples)]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](seed, samples)
