"""Algebraic curvature tensors on euclidean R^m with exact rational components.

Components follow ``R[i, j, k, l] = g(R_{e_i, e_j} e_k, e_l)`` in the standard
orthonormal basis.  With this convention the unit sphere has
``R_{Y,X}X = g(X,X) Y - g(X,Y) X``, sectional curvature
``sec(X, Y) = R[Y, X, X, Y] / (|X|^2 |Y|^2 - <X,Y>^2)`` and Ricci tensor
``Ric(a, b) = sum_mu R[mu, a, b, mu]`` equal to ``(m - 1) * id``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .poly import Polynomial

__all__ = [
    "CurvatureTensor",
    "InvalidTensorError",
    "JacobiSpectrumModel",
    "TwoPlaneSpan",
    "complex_structure",
    "quaternionic_structures",
    "make_constant_curvature",
    "make_zero",
    "make_cpn",
    "make_hpn",
    "make_op2_spectrum",
    "direct_sum",
    "random_tensor",
    "validate",
    "jacobi_matrix",
    "jacobi_matrix_at",
    "sectional_curvature",
    "ricci",
    "scalar_curvature",
    "ric0_norm_sq",
]


class InvalidTensorError(ValueError):
    """Raised when a tensor violates the curvature symmetries."""


def _fraction_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = v if isinstance(v, Fraction) else Fraction(v)
    return out


class CurvatureTensor:
    """Immutable 4-index tensor of ``Fraction`` components."""

    __slots__ = ("dimension", "components")

    def __init__(self, components):
        comps = _fraction_array(components)
        if comps.ndim != 4 or len(set(comps.shape)) != 1:
            raise ValueError(f"components must have shape (m, m, m, m), got {comps.shape}")
        comps.setflags(write=False)
        object.__setattr__(self, "dimension", comps.shape[0])
        object.__setattr__(self, "components", comps)

    def __setattr__(self, name, value):
        raise AttributeError("CurvatureTensor is immutable")

    def __getitem__(self, idx):
        return self.components[idx]

    def __eq__(self, other):
        if not isinstance(other, CurvatureTensor):
            return NotImplemented
        return self.dimension == other.dimension and bool(
            np.all(self.components == other.components)
        )

    def __hash__(self):
        return hash((self.dimension, tuple(self.components.flat)))

    def __mul__(self, c):
        c = Fraction(c)
        return CurvatureTensor(self.components * c)

    __rmul__ = __mul__

    def __add__(self, other: "CurvatureTensor"):
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        return CurvatureTensor(self.components + other.components)

    def __repr__(self):
        nz = int(np.count_nonzero(self.components != 0))
        return f"CurvatureTensor(dimension={self.dimension}, nonzero={nz})"

    def as_float(self) -> np.ndarray:
        return self.components.astype(float)

    def conjugate(self, q) -> "CurvatureTensor":
        """Pull back by an orthogonal matrix ``q`` with exact rational entries."""
        q = _fraction_array(q)
        r = np.einsum("ai,bj,ck,dl,ijkl->abcd", q.T, q.T, q.T, q.T, self.components)
        return CurvatureTensor(r)

    # -- serialization ------------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "dimension": self.dimension,
                "components": [str(v) for v in self.components.flat],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "CurvatureTensor":
        doc = json.loads(text)
        m = int(doc["dimension"])
        flat = doc["components"]
        if len(flat) != m**4:
            raise ValueError(f"expected {m ** 4} components, got {len(flat)}")
        comps = np.array([Fraction(s) for s in flat], dtype=object).reshape((m,) * 4)
        return cls(comps)


@dataclass(frozen=True)
class TwoPlaneSpan:
    X: tuple
    Y: tuple

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(Fraction(v) for v in self.X))
        object.__setattr__(self, "Y", tuple(Fraction(v) for v in self.Y))
        if len(self.X) != len(self.Y):
            raise ValueError("spanning vectors have different lengths")
        if self.gram_determinant() <= 0:
            raise ValueError("degenerate span: X and Y are linearly dependent")

    def gram_determinant(self) -> Fraction:
        xx = sum(a * a for a in self.X)
        yy = sum(b * b for b in self.Y)
        xy = sum(a * b for a, b in zip(self.X, self.Y))
        return xx * yy - xy * xy


@dataclass(frozen=True)
class JacobiSpectrumModel:
    """Jacobi operator eigenvalues ``scale * g(X, X)`` with multiplicities."""

    pairs: tuple[tuple[Fraction, int], ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        pairs = tuple((Fraction(lam), int(mult)) for lam, mult in self.pairs)
        if any(mult <= 0 for _, mult in pairs):
            raise ValueError("multiplicities must be positive")
        if not any(lam == 0 for lam, _ in pairs):
            raise ValueError("the Jacobi operator always has X in its kernel; add (0, 1)")
        object.__setattr__(self, "pairs", pairs)

    @property
    def dimension(self) -> int:
        return sum(mult for _, mult in self.pairs)


# -- model spaces -----------------------------------------------------------------


def make_constant_curvature(m: int, c=1) -> CurvatureTensor:
    if m < 2:
        raise ValueError("constant curvature tensors need m >= 2")
    c = Fraction(c)
    eye = np.eye(m, dtype=np.int64)
    # R_{X,Y}Z = c (g(Y,Z) X - g(X,Z) Y)
    base = np.einsum("jk,il->ijkl", eye, eye) - np.einsum("ik,jl->ijkl", eye, eye)
    return CurvatureTensor(base.astype(object) * c)


def make_zero(m: int) -> CurvatureTensor:
    """Zero tensor; m = 1 is allowed here so circles can appear as product factors."""
    if m < 1:
        raise ValueError("dimension must be positive")
    return CurvatureTensor(np.zeros((m,) * 4, dtype=np.int64))


def complex_structure(n: int) -> np.ndarray:
    """I e_{2i-1} = e_{2i} on R^{2n} (columns are images of basis vectors)."""
    I = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for i in range(n):
        I[2 * i + 1, 2 * i] = 1
        I[2 * i, 2 * i + 1] = -1
    return I


def quaternionic_structures(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Left multiplication by i, j, k on H^n = R^{4n}, coordinates (1, i, j, k)."""
    li = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    lj = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]])
    lk = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])
    eye = np.eye(n, dtype=np.int64)
    return tuple(np.kron(eye, q).astype(np.int64) for q in (li, lj, lk))


def _kaehler_block(J: np.ndarray) -> np.ndarray:
    """Integer tensor of g(JX,Z)JY - g(JY,Z)JX + 2 g(JX,Y)JZ, indexed [i,j,k,l]."""
    # with X=e_i, Y=e_j, Z=e_k paired against e_l; J[a, b] = g(J e_b, e_a)
    return (
        np.einsum("ki,lj->ijkl", J, J)
        - np.einsum("kj,li->ijkl", J, J)
        + 2 * np.einsum("ji,lk->ijkl", J, J)
    )


def _round_block(m: int) -> np.ndarray:
    """Integer tensor of g(X,Z)Y - g(Y,Z)X."""
    eye = np.eye(m, dtype=np.int64)
    return np.einsum("ik,jl->ijkl", eye, eye) - np.einsum("jk,il->ijkl", eye, eye)


def make_cpn(n: int, kappa=None) -> CurvatureTensor:
    """Fubini-Study curvature of CP^n with scalar curvature ``kappa``.

    The default ``kappa = 4n(n+1)`` gives sectional curvatures in [1, 4].
    """
    if n < 2:
        raise ValueError("CP^n needs n >= 2")
    kappa = Fraction(4 * n * (n + 1)) if kappa is None else Fraction(kappa)
    base = _round_block(2 * n) + _kaehler_block(complex_structure(n))
    return CurvatureTensor(base.astype(object) * (-kappa / (4 * n * (n + 1))))


def make_hpn(n: int, kappa=None) -> CurvatureTensor:
    """Symmetric curvature of HP^n; default ``kappa = 16n(n+2)`` (sec in [1, 4])."""
    if n < 2:
        raise ValueError("HP^n needs n >= 2")
    kappa = Fraction(16 * n * (n + 2)) if kappa is None else Fraction(kappa)
    base = _round_block(4 * n)
    for J in quaternionic_structures(n):
        base = base + _kaehler_block(J)
    return CurvatureTensor(base.astype(object) * (-kappa / (16 * n * (n + 2))))


def make_op2_spectrum() -> JacobiSpectrumModel:
    """Jacobi spectrum of the Cayley plane with sec in [1, 4] (m = 16)."""
    return JacobiSpectrumModel(((0, 1), (4, 7), (1, 8)), label="OP2")


def direct_sum(a: CurvatureTensor, b: CurvatureTensor) -> CurvatureTensor:
    m, n = a.dimension, b.dimension
    out = np.zeros((m + n,) * 4, dtype=object)
    out[...] = Fraction(0)
    out[:m, :m, :m, :m] = a.components
    out[m:, m:, m:, m:] = b.components
    return CurvatureTensor(out)


def _cyclic_sum(t: np.ndarray) -> np.ndarray:
    # b(T)[i,j,k,l] = T[i,j,k,l] + T[j,k,i,l] + T[k,i,j,l]
    return t + t.transpose(2, 0, 1, 3) + t.transpose(1, 2, 0, 3)


def random_tensor(m: int, seed: int, magnitude: int = 5) -> CurvatureTensor:
    """Seeded random curvature tensor with rational entries.

    An integer array with entries in [-magnitude, magnitude] is projected onto
    the curvature symmetries: antisymmetrized in both index pairs, symmetrized
    under pair exchange, then corrected by a third of its cyclic sum.
    """
    if m < 2:
        raise ValueError("random tensors need m >= 2")
    rng = np.random.default_rng(seed)
    t = rng.integers(-magnitude, magnitude, size=(m,) * 4, endpoint=True).astype(np.int64)
    t = t - t.transpose(1, 0, 2, 3)
    t = t - t.transpose(0, 1, 3, 2)
    t = t + t.transpose(2, 3, 0, 1)
    # scale by 3 so the Bianchi correction stays integral; overall factor 1/24
    t = 3 * t - _cyclic_sum(t)
    return CurvatureTensor(t.astype(object) * Fraction(1, 24))


# -- validation and pointwise quantities ------------------------------------------


def validate(r: CurvatureTensor) -> list[str]:
    """List the violated symmetry families (empty when ``r`` is a curvature tensor)."""
    c = r.components
    checks = {
        "antisymmetry R[i,j,k,l] = -R[j,i,k,l]": c + c.transpose(1, 0, 2, 3),
        "skew range R[i,j,k,l] = -R[i,j,l,k]": c + c.transpose(0, 1, 3, 2),
        "first Bianchi identity": _cyclic_sum(c),
        "pair symmetry R[i,j,k,l] = R[k,l,i,j]": c - c.transpose(2, 3, 0, 1),
    }
    problems = []
    for name, residual in checks.items():
        bad = np.argwhere(residual != 0)
        if len(bad):
            problems.append(f"{name} fails at {tuple(int(v) for v in bad[0])} ({len(bad)} entries)")
    return problems


def _require_valid(r: CurvatureTensor) -> None:
    problems = validate(r)
    if problems:
        raise InvalidTensorError("; ".join(problems))


def jacobi_matrix(r: CurvatureTensor, check: bool = True) -> list[list[Polynomial]]:
    """Jacobi operator Y -> R_{Y,X}X as a symmetric matrix of quadratics in X.

    Entry (a, b) is g(R_{e_a,X}X, e_b) = sum_{i,j} R[a,i,j,b] x_i x_j.
    """
    if check:
        _require_valid(r)
    m = r.dimension
    c = r.components
    rows = []
    for a in range(m):
        row = []
        for b in range(m):
            terms = {}
            for i in range(m):
                for j in range(i, m):
                    coeff = c[a, i, j, b] + (c[a, j, i, b] if j != i else 0)
                    if coeff:
                        exps = [0] * m
                        exps[i] += 1
                        exps[j] += 1
                        terms[tuple(exps)] = coeff
            row.append(Polynomial(m, terms))
        rows.append(row)
    return rows


def jacobi_matrix_at(r: CurvatureTensor, x: Sequence) -> np.ndarray:
    """Numeric Jacobi matrix at a point; exact for rational ``x``."""
    xv = np.asarray(list(x), dtype=object if r.components.dtype == object else float)
    return np.einsum("aijb,i,j->ab", r.components, xv, xv)


def _curvature_form(r: CurvatureTensor, x, y) -> Fraction:
    xv = np.asarray(list(x), dtype=object)
    yv = np.asarray(list(y), dtype=object)
    return np.einsum("ijkl,i,j,k,l->", r.components, yv, xv, xv, yv)


def sectional_curvature(r: CurvatureTensor, plane: TwoPlaneSpan | tuple) -> Fraction:
    if not isinstance(plane, TwoPlaneSpan):
        plane = TwoPlaneSpan(*plane)
    if len(plane.X) != r.dimension:
        raise ValueError("plane vectors do not match the tensor dimension")
    return Fraction(_curvature_form(r, plane.X, plane.Y)) / plane.gram_determinant()


def ricci(r: CurvatureTensor) -> np.ndarray:
    _require_valid(r)
    c = r.components
    m = r.dimension
    out = np.empty((m, m), dtype=object)
    for a in range(m):
        for b in range(m):
            out[a, b] = sum((c[mu, a, b, mu] for mu in range(m)), Fraction(0))
    return out


def scalar_curvature(r: CurvatureTensor) -> Fraction:
    ric = ricci(r)
    return sum((ric[a, a] for a in range(r.dimension)), Fraction(0))


def ric0_norm_sq(r: CurvatureTensor) -> Fraction:
    """Squared norm of the trace-free Ricci tensor, |Ric|^2 - kappa^2 / (2m).

    The norm on symmetric 2-forms is one half of the sum of squared entries.
    """
    ric = ricci(r)
    m = r.dimension
    kappa = sum((ric[a, a] for a in range(m)), Fraction(0))
    sq = sum((v * v for v in ric.flat), Fraction(0))
    return sq / 2 - kappa * kappa / (2 * m)
