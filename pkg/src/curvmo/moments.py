"""Sectional curvature moments of algebraic curvature tensors.

``psi(R, k)`` is the average of sec^k over the Grassmannian of 2-planes with
its Fubini-Study volume.  It is computed exactly from the Jacobi operator
J_X = R_{., X}X via

    psi_k = L^k [ exp( sum_r tr(J_X^r) / (2r) ) ]_{deg 2k} (0) / [m + 2k - 2]_{2k}

where L is the positive Laplacian sum_mu d^2/dx_mu^2.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .curvature import CurvatureTensor, JacobiSpectrumModel, jacobi_matrix, validate, InvalidTensorError
from .poly import Polynomial, exp_truncated, falling_factorial, gen_binomial, laplacian

__all__ = [
    "DEFAULT_DEGREE_BUDGET",
    "DegreeBudgetError",
    "MomentSequence",
    "degree_budget",
    "psi",
    "psi_sequence",
    "psi_from_spectrum",
    "spectrum_moments",
    "gaussian_integrate",
    "sphere_integrate",
    "det_generating_check",
    "sup_sec_estimate",
    "power_mean_roots",
    "volumes",
]

DEFAULT_DEGREE_BUDGET = 6


class DegreeBudgetError(ValueError):
    """Requested moment order exceeds the exact-engine degree budget."""


def degree_budget() -> int:
    """K_max for the exact tensor path; ``CURVMO_DEGREE_BUDGET`` overrides it."""
    env = os.environ.get("CURVMO_DEGREE_BUDGET")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"CURVMO_DEGREE_BUDGET must be an integer, got {env!r}") from None
        if value < 0:
            raise ValueError("CURVMO_DEGREE_BUDGET must be non-negative")
        return value
    return DEFAULT_DEGREE_BUDGET


@dataclass(frozen=True)
class MomentSequence:
    """Exact moments psi_0 .. psi_K of one curvature tensor or model space."""

    values: tuple[Fraction, ...]
    dimension: int

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        if not values or values[0] != 1:
            raise ValueError("a moment sequence starts with psi_0 = 1")
        object.__setattr__(self, "values", values)

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def as_strings(self) -> list[str]:
        return [str(v) for v in self.values]


def _sym_matmul(a, b, m: int, max_degree: int):
    """Product of two symmetric polynomial matrices that commute (powers of J)."""
    out = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            acc = Polynomial.zero(m)
            for c in range(m):
                if a[i][c].is_zero() or b[c][j].is_zero():
                    continue
                acc = acc + a[i][c].mul(b[c][j], max_degree)
            out[i][j] = acc
            out[j][i] = acc
    return out


def _trace_of_product(a, b, m: int) -> Polynomial:
    # tr(AB) for symmetric A, B
    acc = Polynomial.zero(m)
    for i in range(m):
        for j in range(i, m):
            if a[i][j].is_zero() or b[i][j].is_zero():
                continue
            term = a[i][j] * b[i][j]
            acc = acc + (term if i == j else term.scale(2))
    return acc


def jacobi_power_traces(r: CurvatureTensor, kmax: int) -> list[Polynomial]:
    """tr(J_X^r) for r = 0..kmax as homogeneous polynomials of degree 2r."""
    m = r.dimension
    jac = jacobi_matrix(r)
    half = (kmax + 1) // 2
    powers = {1: jac}
    for p in range(2, half + 1):
        powers[p] = _sym_matmul(powers[p - 1], jac, m, 2 * p)
    traces = [Polynomial.constant(m, m)]
    for rr in range(1, kmax + 1):
        if rr == 1:
            traces.append(sum((jac[a][a] for a in range(m)), Polynomial.zero(m)))
            continue
        p, q = (rr + 1) // 2, rr // 2
        traces.append(_trace_of_product(powers[p], powers[q], m))
    return traces


def psi_sequence(r: CurvatureTensor, kmax: int, budget: int | None = None) -> MomentSequence:
    """Exact moments psi_0..psi_kmax sharing one expansion of the generating series."""
    problems = validate(r)
    if problems:
        raise InvalidTensorError("; ".join(problems))
    m = r.dimension
    if m < 2:
        raise ValueError("moments need dimension m >= 2")
    if kmax < 0:
        raise ValueError("moment order must be non-negative")
    budget = degree_budget() if budget is None else budget
    if kmax > budget:
        raise DegreeBudgetError(
            f"order {kmax} exceeds the exact degree budget {budget} (set CURVMO_DEGREE_BUDGET)"
        )
    traces = jacobi_power_traces(r, kmax)
    series = Polynomial.zero(m)
    for rr in range(1, kmax + 1):
        series = series + traces[rr].scale(Fraction(1, 2 * rr))
    gen = exp_truncated(series, 2 * kmax)
    values = []
    for k in range(kmax + 1):
        top = laplacian(gen.homogeneous_part(2 * k), k).eval_at_zero()
        values.append(top / falling_factorial(m + 2 * k - 2, 2 * k))
    return MomentSequence(tuple(values), m)


def psi(r: CurvatureTensor, k: int, budget: int | None = None) -> Fraction:
    return psi_sequence(r, k, budget)[k]


def _newton_series(lam: Fraction, exponent: Fraction, order: int) -> list[Fraction]:
    # (1 - lam u)^exponent = sum_s C(exponent, s) (-lam)^s u^s
    return [gen_binomial(exponent, s) * (-lam) ** s for s in range(order + 1)]


def spectrum_moments(model: JacobiSpectrumModel, kmax: int) -> MomentSequence:
    """Moments from a Jacobi spectrum that depends on X only through g(X, X)."""
    m = model.dimension
    if m < 2:
        raise ValueError("spectrum model needs total multiplicity m >= 2")
    coeffs = [Fraction(1)] + [Fraction(0)] * kmax
    for lam, mult in model.pairs:
        if lam == 0:
            continue
        factor = _newton_series(lam, Fraction(-mult, 2), kmax)
        coeffs = [sum(coeffs[i] * factor[n - i] for i in range(n + 1)) for n in range(kmax + 1)]
    values = [
        coeffs[k] * (-1) ** k / gen_binomial(Fraction(-(m - 1), 2), k) for k in range(kmax + 1)
    ]
    return MomentSequence(tuple(values), m)


def psi_from_spectrum(model: JacobiSpectrumModel, k: int) -> Fraction:
    return spectrum_moments(model, k)[k]


def gaussian_integrate(p: Polynomial) -> Fraction:
    """Expectation of ``p`` under the standard Gaussian on R^m."""
    total = Fraction(0)
    q = p
    j = 0
    while not q.is_zero():
        total += q.eval_at_zero() / (2**j * math.factorial(j))
        q = q.laplacian()
        j += 1
    return total


def sphere_integrate(p: Polynomial) -> Fraction:
    """Average of a homogeneous polynomial over the unit sphere of R^m."""
    if p.is_zero():
        return Fraction(0)
    if not p.is_homogeneous():
        raise ValueError("sphere_integrate needs a homogeneous polynomial")
    deg = p.degree
    if deg % 2:
        return Fraction(0)
    half = deg // 2
    m = p.dim
    norm = 4**half * math.factorial(half) * falling_factorial(Fraction(m, 2) + half - 1, half)
    return laplacian(p, half).eval_at_zero() / norm


def det_generating_check(f, t: float) -> tuple[float, float]:
    """Compare exp(sum_r (2t)^r tr F^r / (2r)) with det(I - 2tF)^(-1/2).

    Both sides are returned; the series is summed until its terms drop below
    1e-16 in absolute value.
    """
    f = np.asarray(f, dtype=float)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError("F must be a square matrix")
    if not np.allclose(f, f.T, atol=1e-14):
        raise ValueError("F must be symmetric")
    a = 2.0 * t * f
    radius = float(np.max(np.abs(np.linalg.eigvalsh(a)))) if a.size else 0.0
    if radius >= 1.0:
        raise ValueError(f"spectral radius {radius:.3g} of 2tF is >= 1; series diverges")
    log_sum = 0.0
    power = np.eye(len(a))
    r = 1
    while True:
        power = power @ a
        term = np.trace(power) / (2 * r)
        log_sum += term
        if abs(term) < 1e-16 or r > 10_000:
            break
        r += 1
    series = math.exp(log_sum)
    closed = np.linalg.det(np.eye(len(a)) - a) ** -0.5
    return series, float(closed)


def power_mean_roots(moments: MomentSequence | Sequence) -> list[float]:
    """(E[sec^{2j}])^{1/(2j)} for j = 1, 2, ... (nondecreasing by Jensen)."""
    values = moments.values if isinstance(moments, MomentSequence) else tuple(moments)
    roots = []
    for k in range(2, len(values), 2):
        v = float(values[k])
        if v < 0:
            raise ValueError(f"even moment psi_{k} is negative")
        roots.append(v ** (1.0 / k))
    return roots


def sup_sec_estimate(moments: MomentSequence | Sequence) -> float:
    """Lower estimate of max |sec| from the highest available even moment."""
    roots = power_mean_roots(moments)
    if not roots:
        raise ValueError("need moments up to at least order 2")
    return roots[-1]


def volumes(m: int) -> tuple[float, float, float]:
    """Volumes of the unit sphere in R^m, of St_2(R^m) and of Gr_2(R^m)."""
    if m < 2:
        raise ValueError("volumes need m >= 2")

    def sphere(d: int) -> float:
        return 2 * math.pi ** (d / 2) / math.gamma(d / 2)

    stiefel = sphere(m) * sphere(m - 1)
    return sphere(m), stiefel, stiefel / (4 * math.pi)
