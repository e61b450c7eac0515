"""Exact sparse multivariate polynomials over the rationals.

Monomials x_1^a_1 ... x_m^a_m are packed into a single Python integer: each
exponent occupies an 8-bit field and the total degree sits in the field above
the last variable, so multiplying monomials is integer addition and degree
truncation is a single comparison.  Coefficients are kept as integers over a
common positive denominator, normalised so the gcd of the denominator and all
numerators is 1.  The public view (``Polynomial.terms``) is a plain mapping
from exponent tuples to ``Fraction``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Polynomial",
    "poly_add",
    "poly_mul",
    "laplacian",
    "eval_at_zero",
    "exp_truncated",
    "falling_factorial",
    "gen_binomial",
    "norm_squared",
]

_BITS = 8
_MASK = (1 << _BITS) - 1
MAX_EXPONENT = _MASK

Rational = Fraction | int


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class Polynomial:
    """Sparse polynomial in ``dim`` variables with exact rational coefficients.

    Instances are immutable.  Construct from a mapping of exponent tuples to
    rationals, or with the ``constant``/``variable``/``monomial`` helpers.
    """

    __slots__ = ("dim", "_num", "_den", "_dshift")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], Rational] | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        num: dict[int, int] = {}
        den = 1
        if terms:
            fracs = []
            for exps, c in terms.items():
                c = _as_fraction(c)
                if c:
                    fracs.append((self._pack(dim, exps), c))
            for _, c in fracs:
                den = den * c.denominator // math.gcd(den, c.denominator)
            for key, c in fracs:
                num[key] = num.get(key, 0) + c.numerator * (den // c.denominator)
        self._set(dim, num, den)

    # -- construction helpers -------------------------------------------------

    def _set(self, dim: int, num: dict[int, int], den: int) -> None:
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_dshift", _BITS * dim)
        num = {k: v for k, v in num.items() if v}
        if not num:
            den = 1
        else:
            g = math.gcd(den, *num.values())
            if g > 1:
                num = {k: v // g for k, v in num.items()}
                den //= g
        object.__setattr__(self, "_num", num)
        object.__setattr__(self, "_den", den)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _raw(cls, dim: int, num: dict[int, int], den: int) -> "Polynomial":
        p = cls.__new__(cls)
        p._set(dim, num, den)
        return p

    @staticmethod
    def _pack(dim: int, exps: Sequence[int]) -> int:
        exps = tuple(exps)
        if len(exps) != dim:
            raise ValueError(f"multi-index {exps} does not have length {dim}")
        key = 0
        total = 0
        for i, a in enumerate(exps):
            if a < 0 or a > MAX_EXPONENT or int(a) != a:
                raise ValueError(f"invalid exponent {a} in {exps}")
            key |= int(a) << (_BITS * i)
            total += int(a)
        return key | (total << (_BITS * dim))

    def _unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (_BITS * i)) & _MASK for i in range(self.dim))

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls._raw(dim, {}, 1)

    @classmethod
    def constant(cls, dim: int, value: Rational) -> "Polynomial":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim: int, index: int) -> "Polynomial":
        exps = [0] * dim
        exps[index] = 1
        return cls(dim, {tuple(exps): 1})

    @classmethod
    def monomial(cls, dim: int, exps: Sequence[int], coeff: Rational = 1) -> "Polynomial":
        return cls(dim, {tuple(exps): coeff})

    # -- inspection -------------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        d = self._den
        return {self._unpack(k): Fraction(v, d) for k, v in sorted(self._num.items())}

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return Fraction(self._num.get(self._pack(self.dim, exps), 0), self._den)

    def __len__(self) -> int:
        return len(self._num)

    def is_zero(self) -> bool:
        return not self._num

    def _degree_of(self, key: int) -> int:
        return key >> self._dshift

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((k >> self._dshift for k in self._num), default=-1)

    @property
    def min_degree(self) -> int:
        return min((k >> self._dshift for k in self._num), default=-1)

    def is_homogeneous(self) -> bool:
        return self.degree == self.min_degree

    def homogeneous_part(self, degree: int) -> "Polynomial":
        s = self._dshift
        return Polynomial._raw(
            self.dim, {k: v for k, v in self._num.items() if k >> s == degree}, self._den
        )

    def evaluate(self, point: Sequence) -> Fraction | float:
        """Evaluate at ``point``; exact when the coordinates are rationals."""
        if len(point) != self.dim:
            raise ValueError("point has wrong dimension")
        total = 0
        for exps, c in self.terms.items():
            term = c
            for x, a in zip(point, exps):
                if a:
                    term = term * x**a
            total = total + term
        return total

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if not isinstance(other, Polynomial):
            raise TypeError("expected a Polynomial")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} != {other.dim}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.dim, _as_fraction(other))
        self._check(other)
        d1, d2 = self._den, other._den
        den = d1 * d2 // math.gcd(d1, d2)
        f1, f2 = den // d1, den // d2
        num = {k: v * f1 for k, v in self._num.items()}
        for k, v in other._num.items():
            num[k] = num.get(k, 0) + v * f2
        return Polynomial._raw(self.dim, num, den)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.dim, {k: -v for k, v in self._num.items()}, self._den)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.dim, _as_fraction(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Rational) -> "Polynomial":
        c = _as_fraction(c)
        return Polynomial._raw(
            self.dim, {k: v * c.numerator for k, v in self._num.items()}, self._den * c.denominator
        )

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return self.mul(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / _as_fraction(other))
        return NotImplemented

    def mul(self, other: "Polynomial", max_degree: int | None = None) -> "Polynomial":
        """Product, discarding every term of total degree above ``max_degree``."""
        self._check(other)
        if not self._num or not other._num:
            return Polynomial.zero(self.dim)
        if self.degree + other.degree > MAX_EXPONENT:
            # a single exponent field could overflow into its neighbour
            if max_degree is None or max_degree > MAX_EXPONENT:
                raise OverflowError("product degree exceeds the supported exponent range")
        s = self._dshift
        a, b = self._num, other._num
        if len(a) > len(b):
            a, b = b, a
        bs = sorted(b.items())
        out: dict[int, int] = {}
        get = out.get
        if max_degree is None:
            for ka, ca in a.items():
                for kb, cb in bs:
                    k = ka + kb
                    out[k] = get(k, 0) + ca * cb
        else:
            if max_degree < 0:
                return Polynomial.zero(self.dim)
            limit = (max_degree + 1) << s
            for ka, ca in a.items():
                if ka >= limit:
                    continue
                for kb, cb in bs:
                    k = ka + kb
                    if k >= limit:
                        break
                    out[k] = get(k, 0) + ca * cb
        return Polynomial._raw(self.dim, out, self._den * other._den)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.dim, 1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.dim, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self._den == other._den and self._num == other._num

    def __hash__(self):
        return hash((self.dim, self._den, frozenset(self._num.items())))

    # -- calculus ---------------------------------------------------------------

    def laplacian(self) -> "Polynomial":
        """Sum of the pure second derivatives, sum_mu d^2 p / dx_mu^2."""
        out: dict[int, int] = {}
        get = out.get
        drop_deg = 2 << self._dshift
        for key, c in self._num.items():
            for i in range(self.dim):
                a = (key >> (_BITS * i)) & _MASK
                if a >= 2:
                    k = key - (2 << (_BITS * i)) - drop_deg
                    out[k] = get(k, 0) + c * a * (a - 1)
        return Polynomial._raw(self.dim, out, self._den)

    def eval_at_zero(self) -> Fraction:
        return Fraction(self._num.get(0, 0), self._den)

    def __repr__(self) -> str:
        if not self._num:
            return f"Polynomial({self.dim}, 0)"
        parts = []
        for exps, c in self.terms.items():
            mono = "*".join(
                f"x{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(exps) if a
            )
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return f"Polynomial({self.dim}, {' + '.join(parts)})"


def norm_squared(dim: int) -> Polynomial:
    """The quadratic form g(X, X) = x_1^2 + ... + x_m^2."""
    return Polynomial(dim, {tuple(2 if j == i else 0 for j in range(dim)): 1 for i in range(dim)})


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_mul(p: Polynomial, q: Polynomial, max_degree: int | None = None) -> Polynomial:
    return p.mul(q, max_degree)


def laplacian(p: Polynomial, times: int = 1) -> Polynomial:
    for _ in range(times):
        p = p.laplacian()
    return p


def eval_at_zero(p: Polynomial) -> Fraction:
    return p.eval_at_zero()


def exp_truncated(p: Polynomial, max_degree: int) -> Polynomial:
    """Truncated exponential sum_j p^j / j! up to total degree ``max_degree``.

    Uses the Euler-operator recurrence n E_n = sum_d d p_d E_{n-d} on the
    homogeneous components, which yields the same truncation as summing the
    power series and needs one product per pair of components.
    """
    if p.eval_at_zero() != 0:
        raise ValueError("exp_truncated needs a polynomial with zero constant term")
    dim = p.dim
    if max_degree < 0:
        return Polynomial.zero(dim)
    parts = {d: p.homogeneous_part(d) for d in range(1, max_degree + 1)}
    parts = {d: q for d, q in parts.items() if not q.is_zero()}
    comps = [Polynomial.constant(dim, 1)]
    for n in range(1, max_degree + 1):
        acc = Polynomial.zero(dim)
        for d, pd in parts.items():
            if d > n or comps[n - d].is_zero():
                continue
            acc = acc + pd.mul(comps[n - d]).scale(d)
        comps.append(acc.scale(Fraction(1, n)))
    total = Polynomial.zero(dim)
    for c in comps:
        total = total + c
    return total


def falling_factorial(x: Rational, s: int) -> Fraction:
    """[x]_s = x (x-1) ... (x-s+1); 1 for s = 0 and 0 for s < 0."""
    x = _as_fraction(x)
    if s < 0:
        return Fraction(0)
    out = Fraction(1)
    for i in range(s):
        out *= x - i
    return out


def gen_binomial(x: Rational, s: int) -> Fraction:
    """Generalized binomial coefficient C(x, s) = [x]_s / s!."""
    if s < 0:
        return Fraction(0)
    return falling_factorial(x, s) / math.factorial(s)


def product_of(polys: Iterable[Polynomial], dim: int) -> Polynomial:
    out = Polynomial.constant(dim, 1)
    for q in polys:
        out = out * q
    return out
