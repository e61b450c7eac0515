"""Monte Carlo oracles for sectional curvature moments.

All estimators draw from numpy's PCG64 generator.  Samples are produced in
fixed-size chunks, each with its own child seed spawned from
``SeedSequence(seed)``, so an estimate depends only on ``(seed, samples)``
and not on how many workers evaluate the chunks.  Chunk partial sums are
reduced in chunk order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .curvature import CurvatureTensor, InvalidTensorError, validate
from .poly import Polynomial

__all__ = [
    "CHUNK_SIZE",
    "McEstimate",
    "sample_two_frame",
    "sample_two_frames",
    "sample_sphere",
    "sample_simplex",
    "mc_moment",
    "mc_moments",
    "mc_sphere_poly",
    "mc_simplex",
]

CHUNK_SIZE = 100_000
_DEGENERATE = 1e-12


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int

    def within(self, exact, n_se: float = 4.0) -> bool:
        return abs(self.mean - float(exact)) <= n_se * self.std_error

    def z_score(self, exact) -> float:
        diff = self.mean - float(exact)
        if self.std_error == 0:
            return 0.0 if diff == 0 else math.inf
        return diff / self.std_error


def sample_two_frames(m: int, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``size`` orthonormal 2-frames in R^m, uniform on the Stiefel manifold.

    Two independent Gaussian vectors are orthonormalised by Gram-Schmidt;
    draws whose normalised Gram determinant falls below 1e-12 are redrawn.
    """
    if m < 2:
        raise ValueError("2-frames need m >= 2")
    g1 = rng.standard_normal((size, m))
    g2 = rng.standard_normal((size, m))
    while True:
        n1 = np.einsum("ij,ij->i", g1, g1)
        n2 = np.einsum("ij,ij->i", g2, g2)
        d12 = np.einsum("ij,ij->i", g1, g2)
        bad = (n1 * n2 - d12 * d12) < _DEGENERATE * n1 * n2
        if not bad.any():
            break
        k = int(bad.sum())
        g1[bad] = rng.standard_normal((k, m))
        g2[bad] = rng.standard_normal((k, m))
    x = g1 / np.sqrt(n1)[:, None]
    y = g2 - np.einsum("ij,ij->i", g2, x)[:, None] * x
    y /= np.linalg.norm(y, axis=1)[:, None]
    return x, y


def sample_two_frame(m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    x, y = sample_two_frames(m, 1, rng)
    return x[0], y[0]


def sample_sphere(m: int, size: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((size, m))
    return g / np.linalg.norm(g, axis=1)[:, None]


def sample_simplex(m: int, n: int, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """(x, y) on the 2-simplex with density proportional to x^{m-2} y^{n-2}.

    Gamma-ratio construction of Dirichlet(m-1, n-1, 1) on (x, y, 1-x-y).
    """
    if m < 2 or n < 2:
        raise ValueError("simplex law needs m, n >= 2")
    g = np.stack(
        [rng.standard_gamma(m - 1, size), rng.standard_gamma(n - 1, size), rng.standard_gamma(1, size)]
    )
    g /= g.sum(axis=0)
    return g[0], g[1]


def _chunks(samples: int) -> list[int]:
    full, rest = divmod(samples, CHUNK_SIZE)
    return [CHUNK_SIZE] * full + ([rest] if rest else [])


def _run_chunked(
    draw: Callable[[int, np.random.Generator], np.ndarray],
    powers: Iterable[int],
    samples: int,
    seed: int,
    workers: int = 1,
) -> dict[int, McEstimate]:
    """Accumulate sum and sum of squares of draw(...)**k per chunk, then reduce."""
    if samples < 2:
        raise ValueError("need at least two samples for a standard error")
    powers = sorted(set(powers))
    sizes = _chunks(samples)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))

    def one(args):
        size, ss = args
        vals = draw(size, np.random.Generator(np.random.PCG64(ss)))
        out = {}
        for k in powers:
            v = vals**k
            out[k] = (float(np.sum(v)), float(np.sum(v * v)))
        return out

    jobs = list(zip(sizes, seqs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(j) for j in jobs]
    result = {}
    for k in powers:
        s1 = sum(p[k][0] for p in parts)
        s2 = sum(p[k][1] for p in parts)
        mean = s1 / samples
        var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
        result[k] = McEstimate(mean, math.sqrt(var / samples), samples, seed)
    return result


def _sec_sampler(r: CurvatureTensor):
    m = r.dimension
    # sec(X, Y) = sum R[i,j,k,l] Y_i X_j X_k Y_l for an orthonormal frame
    rmat = r.as_float().reshape(m * m, m * m)

    def draw(size, rng):
        x, y = sample_two_frames(m, size, rng)
        left = np.einsum("ni,nj->nij", y, x).reshape(size, m * m)
        right = np.einsum("nk,nl->nkl", x, y).reshape(size, m * m)
        return np.einsum("np,np->n", left @ rmat, right)

    return draw


def mc_moments(
    r: CurvatureTensor, ks: Iterable[int], samples: int, seed: int, workers: int = 1
) -> dict[int, McEstimate]:
    """Estimates of E[sec^k] for several k from one shared set of frames."""
    problems = validate(r)
    if problems:
        raise InvalidTensorError("; ".join(problems))
    return _run_chunked(_sec_sampler(r), ks, samples, seed, workers)


def mc_moment(r: CurvatureTensor, k: int, samples: int, seed: int, workers: int = 1) -> McEstimate:
    return mc_moments(r, [k], samples, seed, workers)[k]


def _poly_evaluator(p: Polynomial):
    items = list(p.terms.items())
    exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), p.dim)
    coeffs = np.array([float(c) for _, c in items])

    def evaluate(points: np.ndarray) -> np.ndarray:
        if not items:
            return np.zeros(len(points))
        mons = np.prod(points[:, None, :] ** exps[None, :, :], axis=2)
        return mons @ coeffs

    return evaluate


def mc_sphere_poly(p: Polynomial, samples: int, seed: int, workers: int = 1) -> McEstimate:
    """Average of ``p`` over uniform points of the unit sphere."""
    evaluate = _poly_evaluator(p)
    return _run_chunked(lambda size, rng: evaluate(sample_sphere(p.dim, size, rng)), [1], samples, seed, workers)[1]


def mc_simplex(
    m: int, n: int, mu: float, nu: float, k: int, samples: int, seed: int, workers: int = 1
) -> McEstimate:
    """Estimate of E[(x^2 mu + y^2 nu)^k] under the simplex law."""

    def draw(size, rng):
        x, y = sample_simplex(m, n, size, rng)
        return x * x * mu + y * y * nu

    return _run_chunked(draw, [k], samples, seed, workers)[k]
