"""Closed-form moment sequences and densities.

Covers the rank-one symmetric spaces (a two-parameter family of densities on
[1, 4]), the Grassmannian Gr_2(R^n), Riemannian products, and the kernel
densities that turn factor curvature densities into product densities.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate

from .moments import MomentSequence
from .poly import falling_factorial, gen_binomial

__all__ = [
    "CrossDensity",
    "CROSS_PARAMETERS",
    "cross_moment",
    "cross_moments",
    "cross_density_eval",
    "cross_density_moment_quadrature",
    "cross_normalization",
    "product_moment",
    "product_moments",
    "gr2rn_moment",
    "simplex_integral",
    "Atom",
    "ProductKernel",
    "TabulatedDensity",
    "kernel_moment",
    "product_kernel_density",
    "product_density",
]

# (a, b) parameters of the rank-one symmetric spaces with sec in [1, 4]
CROSS_PARAMETERS = {
    "cpn": lambda n: (0, n - 2),
    "hpn": lambda n: (1, 2 * n - 3),
    "op2": lambda n=2: (3, 3),
}


def _as_sequence(psi) -> Sequence[Fraction]:
    return psi.values if isinstance(psi, MomentSequence) else psi


# -- the (a, b) family on [1, 4] ----------------------------------------------------


def cross_moment(a: int, b: int, k: int) -> Fraction:
    """k-th moment of the (a, b) density on [1, 4].

    sum_r 4^r C(-(2a+1)/2, r) C(-(b+1), k-r) / C(-(2a+2b+3)/2, k)
    """
    if min(a, b, k) < 0:
        raise ValueError("a, b and k must be non-negative")
    num = sum(
        4**r * gen_binomial(Fraction(-(2 * a + 1), 2), r) * gen_binomial(-(b + 1), k - r)
        for r in range(k + 1)
    )
    return num / gen_binomial(Fraction(-(2 * a + 2 * b + 3), 2), k)


def cross_moments(a: int, b: int, kmax: int, dimension: int | None = None) -> MomentSequence:
    # the family's dimension is 2a + 2b + 4 for every rank-one space
    m = dimension if dimension is not None else 2 * a + 2 * b + 4
    return MomentSequence(tuple(cross_moment(a, b, k) for k in range(kmax + 1)), m)


def cross_normalization(a: int, b: int) -> Fraction:
    """Prefactor (2a+1)/6 * C(a+b+1/2, b) making the (a, b) density integrate to 1."""
    return Fraction(2 * a + 1, 6) * gen_binomial(Fraction(2 * a + 2 * b + 1, 2), b)


def cross_density_eval(a: int, b: int, s: float) -> float:
    if not 1.0 <= s <= 4.0:
        raise ValueError(f"s = {s} lies outside the support [1, 4]")
    if s == 1.0:
        if a == 0:
            raise ValueError("the a = 0 density is singular at s = 1")
        return 0.0
    u2 = (s - 1.0) / 3.0
    return float(cross_normalization(a, b)) * u2 ** ((2 * a - 1) / 2) * ((4.0 - s) / 3.0) ** b


def _cross_u_integrand(a: int, b: int, f):
    # s = 1 + 3u^2 turns the density into (2a+1) C(a+b+1/2, b) u^{2a} (1-u^2)^b du
    c = float(6 * cross_normalization(a, b))

    def g(u):
        return c * u ** (2 * a) * (1.0 - u * u) ** b * f(1.0 + 3.0 * u * u)

    return g


def cross_density_moment_quadrature(a: int, b: int, k: int) -> float:
    """Adaptive quadrature of s^k against the (a, b) density, after s = 1 + 3u^2."""
    g = _cross_u_integrand(a, b, lambda s: s**k)
    value, _ = integrate.quad(g, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    return value


@dataclass(frozen=True)
class CrossDensity:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("a and b must be non-negative")

    support = (1.0, 4.0)

    @property
    def label(self) -> str:
        return f"cross a={self.a} b={self.b}"

    def pdf(self, s: float) -> float:
        return cross_density_eval(self.a, self.b, s)

    def moment(self, k: int) -> Fraction:
        return cross_moment(self.a, self.b, k)

    def nodes(self, order: int = 48) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes in s and probability weights (Gauss-Legendre in u)."""
        x, w = np.polynomial.legendre.leggauss(order)
        u = 0.5 * (x + 1.0)
        g = _cross_u_integrand(self.a, self.b, lambda s: 1.0)
        return 1.0 + 3.0 * u * u, 0.5 * w * g(u)

    def abscissae(self, points: int) -> np.ndarray:
        # uniform in u = sqrt((s-1)/3), which clusters points near s = 1
        start = 0 if self.a > 0 else 1
        u = np.arange(start, points + start) / (points - 1 + start)
        return 1.0 + 3.0 * u * u

    def total_mass(self) -> float:
        return cross_density_moment_quadrature(self.a, self.b, 0)


# -- products ---------------------------------------------------------------------


def _product_weight(m: int, n: int, k: int, r: int) -> Fraction:
    return (
        math.comb(k, r)
        * falling_factorial(m + 2 * r - 2, 2 * r)
        * falling_factorial(n + 2 * (k - r) - 2, 2 * (k - r))
        / falling_factorial(m + n + 2 * k - 2, 2 * k)
    )


def product_moment(psi_m, m: int, psi_n, n: int, k: int) -> Fraction:
    """k-th moment of the Riemannian product of factors with moments psi_m, psi_n.

    Dimensions 1 are admitted: the falling factorials kill every term that
    would need a moment of order >= 1 of the one-dimensional factor.
    """
    if m < 1 or n < 1:
        raise ValueError("factor dimensions must be positive")
    pm, pn = _as_sequence(psi_m), _as_sequence(psi_n)
    total = Fraction(0)
    for r in range(k + 1):
        w = _product_weight(m, n, k, r)
        if w == 0:
            continue
        if r >= len(pm) or k - r >= len(pn):
            raise ValueError(f"moment sequences are too short for order {k}")
        total += w * Fraction(pm[r]) * Fraction(pn[k - r])
    return total


def product_moments(psi_m, m: int, psi_n, n: int, kmax: int) -> MomentSequence:
    return MomentSequence(
        tuple(product_moment(psi_m, m, psi_n, n, k) for k in range(kmax + 1)), m + n
    )


def gr2rn_moment(n: int, k: int) -> Fraction:
    """Moments of the Fubini-Study Gr_2(R^n) normalised to sec in [0, 2]."""
    if n < 4:
        raise ValueError("gr2rn_moment needs n >= 4")
    if k < 0:
        raise ValueError("k must be non-negative")
    total = Fraction(0)
    for mu in range(k // 2 + 1):
        for nu in range(k // 2 - mu + 1):
            rest = k - 2 * mu - 2 * nu
            total += (
                Fraction((-1) ** nu, 4**mu)
                * Fraction(n - 3, n + 2 * mu + 2 * nu - 3)
                * gen_binomial(Fraction(-(n - 4), 2), mu)
                * gen_binomial(Fraction(-1, 2), nu)
                * gen_binomial(Fraction(-(n + 2 * mu + 4 * nu - 2), 2), rest)
            )
    return total / gen_binomial(Fraction(-(2 * n - 5), 2), k)


def simplex_integral(exponents: Sequence[int]) -> Fraction:
    """Integral of x_0^k_0 ... x_n^k_n over the standard n-simplex."""
    if any(e < 0 for e in exponents):
        raise ValueError("exponents must be non-negative")
    n = len(exponents) - 1
    num = math.prod(math.factorial(e) for e in exponents)
    return Fraction(num, math.factorial(n + sum(exponents)))


# -- product kernels and densities ------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """Point mass at curvature ``c`` (the density of a space form)."""

    value: float

    @property
    def support(self) -> tuple[float, float]:
        return (self.value, self.value)

    def nodes(self, order: int = 0) -> tuple[np.ndarray, np.ndarray]:
        return np.array([float(self.value)]), np.array([1.0])

    def moment(self, k: int):
        return Fraction(self.value) ** k if k else Fraction(1)


@dataclass(frozen=True)
class ProductKernel:
    """Law of x^2 mu + y^2 nu for (x, y) with density ~ x^{m-2} y^{n-2} on the 2-simplex.

    Densities for nu = 0 (or mu = 0) are closed-form; otherwise they are
    estimated by a seeded Monte Carlo histogram.
    """

    m: int
    n: int
    mu: float
    nu: float
    bins: int = 512
    samples: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("kernel dimensions must be positive")
        if self.m == 1 and self.n == 1:
            raise ValueError("at least one factor must have dimension >= 2")

    @property
    def support(self) -> tuple[float, float]:
        return (min(self.mu, self.nu, 0.0), max(self.mu, self.nu, 0.0))

    @property
    def closed_form(self) -> bool:
        return (self.nu == 0) != (self.mu == 0)

    def _oriented(self):
        # closed form is written for nu = 0 with a curved factor of dimension m
        if self.nu == 0:
            return self.m, self.n, self.mu
        return self.n, self.m, self.nu

    def pdf(self, s):
        return product_kernel_density(self, s)

    def moment(self, k: int) -> float:
        return kernel_moment(self.m, self.n, self.mu, self.nu, k)

    def nodes(self, order: int = 64) -> tuple[np.ndarray, np.ndarray]:
        if self.closed_form:
            m, n, mu = self._oriented()
            # s = mu x^2 with x-density (m+n-2)!/((m-2)!(n-1)!) x^{m-2} (1-x)^{n-1}
            x, w = np.polynomial.legendre.leggauss(order)
            x = 0.5 * (x + 1.0)
            return mu * x * x, 0.5 * w * _x_marginal(m, n)(x)
        hist = _kernel_histogram(self)
        return hist.centers, hist.masses


def _x_marginal(m: int, n: int):
    if m == 1:
        raise ValueError("the curved factor of a closed-form kernel needs m >= 2")
    c = math.factorial(m + n - 2) / (math.factorial(m - 2) * math.factorial(n - 1))

    def f(x):
        return c * x ** (m - 2) * (1.0 - x) ** (n - 1)

    return f


def kernel_moment(m: int, n: int, mu, nu, k: int):
    """Exact k-th moment of the kernel (rational when mu and nu are)."""
    exact = all(isinstance(v, (int, Fraction)) for v in (mu, nu))
    total = Fraction(0) if exact else 0.0
    for r in range(k + 1):
        w = _product_weight(m, n, k, r)
        if w == 0:
            continue
        term = (Fraction(mu) if exact else mu) ** r * (Fraction(nu) if exact else nu) ** (k - r)
        total += (w if exact else float(w)) * term
    return total


def product_kernel_density(kern: ProductKernel, s):
    """Density of the product kernel at ``s`` (scalar or array)."""
    s_arr = np.asarray(s, dtype=float)
    lo, hi = kern.support
    if np.any(s_arr < lo) or np.any(s_arr > hi):
        raise ValueError(f"s outside the support hull [{lo}, {hi}]")
    if kern.mu == 0 and kern.nu == 0:
        raise ValueError("a kernel with mu = nu = 0 is a point mass at 0")
    if kern.closed_form:
        m, n, mu = kern._oriented()
        if m < 2:
            raise ValueError("the curved factor of a closed-form kernel needs m >= 2")
        c = math.factorial(m + n - 2) / (math.factorial(m - 2) * math.factorial(n - 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            root = np.sqrt(s_arr / mu)
            out = c * root ** (m - 3) * (1.0 - root) ** (n - 1) / (2.0 * abs(mu))
        return out if out.ndim else float(out)
    if kern.m < 2 or kern.n < 2:
        raise ValueError("general kernels need m, n >= 2")
    hist = _kernel_histogram(kern)
    out = hist.pdf(s_arr)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class TabulatedDensity:
    """Piecewise-constant density on a uniform grid of bins."""

    edges: np.ndarray
    values: np.ndarray
    label: str = ""

    @property
    def support(self) -> tuple[float, float]:
        return float(self.edges[0]), float(self.edges[-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def masses(self) -> np.ndarray:
        return self.values * self.widths

    def pdf(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.clip(np.searchsorted(self.edges, s, side="right") - 1, 0, len(self.values) - 1)
        out = np.where((s >= self.edges[0]) & (s <= self.edges[-1]), self.values[idx], 0.0)
        return out if out.ndim else float(out)

    def nodes(self, order: int = 0) -> tuple[np.ndarray, np.ndarray]:
        return self.centers, self.masses

    def moment(self, k: int) -> float:
        # exact for the piecewise-constant density
        a, b = self.edges[:-1], self.edges[1:]
        return float(np.sum(self.values * (b ** (k + 1) - a ** (k + 1)) / (k + 1)))

    def total_mass(self) -> float:
        return float(np.sum(self.masses))


def _sample_simplex_xy(m: int, n: int, samples: int, rng) -> tuple[np.ndarray, np.ndarray]:
    # density ~ x^{m-2} y^{n-2} on the 2-simplex is Dirichlet(m-1, n-1, 1) in (x, y, 1-x-y)
    g = np.stack(
        [rng.standard_gamma(m - 1, samples), rng.standard_gamma(n - 1, samples), rng.standard_gamma(1, samples)]
    )
    g /= g.sum(axis=0)
    return g[0], g[1]


def _weighted_histogram(values, weights, lo, hi, bins, label) -> TabulatedDensity:
    if hi <= lo:
        raise ValueError("degenerate support: the law is a point mass")
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(values, bins=edges, weights=weights)
    total = float(np.sum(weights))
    return TabulatedDensity(edges, counts / (total * np.diff(edges)), label)


@functools.lru_cache(maxsize=16)
def _kernel_histogram(kern: ProductKernel) -> TabulatedDensity:
    rng = np.random.default_rng(kern.seed)
    x, y = _sample_simplex_xy(kern.m, kern.n, kern.samples, rng)
    s = x * x * kern.mu + y * y * kern.nu
    lo, hi = kern.support
    return _weighted_histogram(
        s, np.ones_like(s), lo, hi, kern.bins, f"kernel m={kern.m} n={kern.n} mu={kern.mu} nu={kern.nu}"
    )


def _check_normalized(density, order: int) -> tuple[np.ndarray, np.ndarray]:
    pts, w = density.nodes(order)
    total = float(np.sum(w))
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"factor density is not normalised (total mass {total:.8g})")
    return np.asarray(pts, dtype=float), np.asarray(w, dtype=float)


def product_density(
    density_m,
    m: int,
    density_n,
    n: int,
    *,
    order: int = 24,
    bins: int = 512,
    samples: int = 200_000,
    seed: int = 0,
):
    """Curvature density of a Riemannian product from the factor densities.

    Two atoms give a single ``ProductKernel``.  Otherwise the factor laws are
    discretised on quadrature nodes, and the kernel mixture is pushed forward
    with shared simplex samples into a weighted histogram.
    """
    if isinstance(density_m, Atom) and isinstance(density_n, Atom):
        return ProductKernel(m, n, float(density_m.value), float(density_n.value), bins=bins, samples=samples, seed=seed)
    if m < 2 or n < 2:
        raise ValueError("continuous factor composition needs m, n >= 2")
    mus, wm = _check_normalized(density_m, order)
    nus, wn = _check_normalized(density_n, order)
    rng = np.random.default_rng(seed)
    x, y = _sample_simplex_xy(m, n, samples, rng)
    x2, y2 = x * x, y * y
    lo = min(0.0, float(mus.min()), float(nus.min()), *density_m.support, *density_n.support)
    hi = max(0.0, float(mus.max()), float(nus.max()), *density_m.support, *density_n.support)
    edges = np.linspace(lo, hi, bins + 1)
    counts = np.zeros(bins)
    for mu, a in zip(mus, wm):
        for nu, b in zip(nus, wn):
            c, _ = np.histogram(x2 * mu + y2 * nu, bins=edges)
            counts += a * b * c
    counts /= samples
    return TabulatedDensity(edges, counts / np.diff(edges), "product density")
