"""Quadratic curvature invariants of 4-manifolds and the Euler-characteristic identity.

Natural quadratic invariants of 4-dimensional curvature tensors form a
3-dimensional space.  Evaluating psi_1^2, psi_2 and |Ric°|^2 on four model
geometries (CP^2, S^4, S^2 x S^2, S^1 x S^3) pins down any such invariant by
interpolation; applied to the Gauss-Bonnet integrand this gives

    (4 pi^2 / 3) pf_2 = 5 psi_2 - 4 psi_1^2 - (4/9) |Ric°|^2.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .curvature import (
    CurvatureTensor,
    direct_sum,
    make_constant_curvature,
    make_cpn,
    make_zero,
    ric0_norm_sq,
)
from .moments import psi_sequence

__all__ = [
    "MODEL_NAMES",
    "InconsistentSystemError",
    "InvariantVector",
    "InterpolationResult",
    "HitchinThorpeReport",
    "model_tensors",
    "model_table",
    "pf2_column",
    "interpolate_invariant",
    "hitchin_thorpe_report",
]

MODEL_NAMES = ("CP2", "S4", "S2xS2", "S1xS3")

# Euler characteristic and volume / pi^2 of the unit-normalised models;
# S1xS3 has volume 4 pi^3, which is irrelevant because chi = 0.
_EULER_DATA = {
    "CP2": (3, Fraction(1, 2)),
    "S4": (2, Fraction(8, 3)),
    "S2xS2": (4, Fraction(16)),
    "S1xS3": (0, None),
}


class InconsistentSystemError(ValueError):
    """The values are not a combination of psi_1^2, psi_2 and |Ric°|^2."""


@dataclass(frozen=True)
class InvariantVector:
    label: str
    psi1_sq: Fraction
    psi2: Fraction
    ric0_sq: Fraction

    def __post_init__(self):
        if self.psi2 - self.psi1_sq < 0:
            raise ValueError(f"{self.label}: negative variance psi2 - psi1^2")

    def as_row(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.psi1_sq, self.psi2, self.ric0_sq)


def model_tensors() -> dict[str, CurvatureTensor]:
    unit = make_constant_curvature
    return {
        "CP2": make_cpn(2, 24),
        "S4": unit(4, 1),
        "S2xS2": direct_sum(unit(2, 1), unit(2, 1)),
        "S1xS3": direct_sum(make_zero(1), unit(3, 1)),
    }


def invariant_vector(r: CurvatureTensor, label: str = "") -> InvariantVector:
    seq = psi_sequence(r, 2)
    return InvariantVector(label, seq[1] ** 2, seq[2], ric0_norm_sq(r))


def pf2_column() -> dict[str, Fraction]:
    """(4 pi^2 / 3) pf_2 = (4/3) chi / (Vol / pi^2) for each homogeneous model."""
    out = {}
    for name, (chi, vol) in _EULER_DATA.items():
        out[name] = Fraction(0) if chi == 0 else Fraction(4, 3) * chi / vol
    return out


def model_table() -> list[tuple[InvariantVector, Fraction]]:
    """Rows (psi_1^2, psi_2, |Ric°|^2) computed by the engine, with the pf_2 column."""
    pf2 = pf2_column()
    return [(invariant_vector(r, name), pf2[name]) for name, r in model_tensors().items()]


@dataclass(frozen=True)
class InterpolationResult:
    coefficients: tuple[Fraction, Fraction, Fraction]
    residuals: tuple[Fraction, ...]
    rank: int


def _solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Row-reduce the augmented system; return (solution, rank) or raise."""
    n_cols = len(rows[0])
    aug = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n_cols + 1):
        pivot = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        if c == n_cols:
            raise InconsistentSystemError("values do not lie in the span of the basis invariants")
        aug[r], aug[pivot] = aug[pivot], aug[r]
        p = aug[r][c]
        aug[r] = [v / p for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if len(pivots) < n_cols:
        raise ValueError("basis invariants are linearly dependent on these models")
    sol = [Fraction(0)] * n_cols
    for i, c in enumerate(pivots):
        sol[c] = aug[i][n_cols]
    return sol, len(pivots)


def interpolate_invariant(
    values: Mapping[str, Fraction], table: Sequence[tuple[InvariantVector, Fraction]] | None = None
) -> InterpolationResult:
    """Coefficients (c1, c2, c3) with c1 psi_1^2 + c2 psi_2 + c3 |Ric°|^2 = value on every model."""
    table = model_table() if table is None else table
    missing = [row.label for row, _ in table if row.label not in values]
    if missing:
        raise KeyError(f"no value for models {missing}")
    rows = [row.as_row() for row, _ in table]
    rhs = [Fraction(values[row.label]) for row, _ in table]
    sol, rank = _solve_exact(rows, rhs)
    residuals = tuple(sum(c * a for c, a in zip(sol, row)) - b for row, b in zip(rows, rhs))
    return InterpolationResult(tuple(sol), residuals, rank)


@dataclass(frozen=True)
class HitchinThorpeReport:
    psi1: Fraction
    psi2: Fraction
    ric0_sq: Fraction
    pf2_scaled: Fraction
    lhs: Fraction
    rhs: Fraction
    second_moment_term: Fraction
    variance_term: Fraction
    identity_holds: bool
    second_moment_nonnegative: bool
    variance_nonnegative: bool

    def to_dict(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            out[key] = str(value) if isinstance(value, Fraction) else value
        return out

    def to_json(self) -> str:
        return json.dumps({"schema_version": 1, **self.to_dict()}, sort_keys=True)


def hitchin_thorpe_report(r: CurvatureTensor) -> HitchinThorpeReport:
    """Pointwise identity (4 pi^2/3) pf_2 + (4/9)|Ric°|^2 = psi_2 + 4 (psi_2 - psi_1^2)."""
    if r.dimension != 4:
        raise ValueError(f"the identity is stated for dimension 4, got {r.dimension}")
    seq = psi_sequence(r, 2)
    p1, p2 = seq[1], seq[2]
    ric0 = ric0_norm_sq(r)
    pf2_scaled = 5 * p2 - 4 * p1 * p1 - Fraction(4, 9) * ric0
    lhs = pf2_scaled + Fraction(4, 9) * ric0
    variance = p2 - p1 * p1
    rhs = p2 + 4 * variance
    return HitchinThorpeReport(
        psi1=p1,
        psi2=p2,
        ric0_sq=ric0,
        pf2_scaled=pf2_scaled,
        lhs=lhs,
        rhs=rhs,
        second_moment_term=p2,
        variance_term=4 * variance,
        identity_holds=lhs == rhs,
        second_moment_nonnegative=p2 >= 0,
        variance_nonnegative=variance >= 0,
    )
