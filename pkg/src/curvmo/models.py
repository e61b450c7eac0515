"""Model specifications: named curvature models and how to get moments and densities from them."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .closed_forms import (
    CROSS_PARAMETERS,
    Atom,
    CrossDensity,
    ProductKernel,
    cross_moments,
    gr2rn_moment,
    kernel_moment,
    product_density,
    product_moments,
)
from .curvature import (
    CurvatureTensor,
    JacobiSpectrumModel,
    direct_sum,
    make_constant_curvature,
    make_cpn,
    make_hpn,
    make_op2_spectrum,
    make_zero,
    random_tensor,
)
from .moments import MomentSequence, degree_budget, psi_sequence, spectrum_moments

__all__ = ["KINDS", "ModelSpec", "ModelError", "parse_child"]

KINDS = ("sphere", "flat", "cpn", "hpn", "op2", "cross", "gr2rn", "kernel", "product", "random", "file")


class ModelError(ValueError):
    """Invalid or unsupported model specification."""


def _rational(text, name: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ModelError(f"{name} must be a rational number, got {text!r}") from None


def _need(value, name: str, kind: str):
    if value is None:
        raise ModelError(f"model {kind} needs --{name}")
    return value


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    m: Optional[int] = None
    n: Optional[int] = None
    c: Optional[Fraction] = None
    kappa: Optional[Fraction] = None
    a: Optional[int] = None
    b: Optional[int] = None
    mu: Optional[Fraction] = None
    nu: Optional[Fraction] = None
    seed: int = 0
    path: Optional[str] = None
    left: Optional["ModelSpec"] = field(default=None)
    right: Optional["ModelSpec"] = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown model kind {self.kind!r}; choose from {', '.join(KINDS)}")
        k = self.kind
        if k in ("sphere", "flat", "random"):
            m = _need(self.m, "m", k)
            low = 1 if k == "flat" else 2
            if m < low:
                raise ModelError(f"model {k} needs m >= {low}")
        if k in ("cpn", "hpn") and _need(self.n, "n", k) < 2:
            raise ModelError(f"model {k} needs n >= 2")
        if k == "gr2rn" and _need(self.n, "n", k) < 4:
            raise ModelError("model gr2rn needs n >= 4")
        if k == "cross":
            if _need(self.a, "a", k) < 0 or _need(self.b, "b", k) < 0:
                raise ModelError("cross parameters a and b must be non-negative")
        if k == "kernel":
            for name in ("m", "n", "mu", "nu"):
                _need(getattr(self, name), name, k)
            if self.m < 1 or self.n < 1 or (self.m == 1 and self.n == 1):
                raise ModelError("kernel dimensions must be positive, one of them >= 2")
        if k == "product" and (self.left is None or self.right is None):
            raise ModelError("model product needs --left and --right")
        if k == "file" and self.path is None:
            raise ModelError("model file needs --path")

    # -- structure -------------------------------------------------------------

    @property
    def dimension(self) -> int:
        k = self.kind
        if k in ("sphere", "flat", "random", "kernel"):
            return self.m if k != "kernel" else self.m + self.n
        if k == "cpn":
            return 2 * self.n
        if k == "hpn":
            return 4 * self.n
        if k == "op2":
            return 16
        if k == "cross":
            return 2 * self.a + 2 * self.b + 4
        if k == "gr2rn":
            return 2 * (self.n - 2)
        if k == "product":
            return self.left.dimension + self.right.dimension
        return self.tensor().dimension

    def describe(self) -> dict:
        out = {"kind": self.kind}
        for name in ("m", "n", "c", "kappa", "a", "b", "mu", "nu", "path"):
            value = getattr(self, name)
            if value is not None:
                out[name] = str(value) if isinstance(value, Fraction) else value
        if self.kind == "random":
            out["seed"] = self.seed
        if self.kind == "product":
            out["left"] = self.left.describe()
            out["right"] = self.right.describe()
        return out

    def tensor(self) -> CurvatureTensor:
        k = self.kind
        if k == "sphere":
            return make_constant_curvature(self.m, self.c if self.c is not None else 1)
        if k == "flat":
            return make_zero(self.m)
        if k == "cpn":
            return make_cpn(self.n, self.kappa)
        if k == "hpn":
            return make_hpn(self.n, self.kappa)
        if k == "random":
            return random_tensor(self.m, self.seed)
        if k == "product":
            return direct_sum(self.left.tensor(), self.right.tensor())
        if k == "file":
            try:
                return CurvatureTensor.from_json(Path(self.path).read_text(encoding="utf-8"))
            except OSError as exc:
                raise ModelError(f"cannot read tensor file: {exc}") from None
        raise ModelError(f"model {k} has no curvature tensor representation")

    def spectrum(self) -> Optional[JacobiSpectrumModel]:
        """Jacobi spectrum when it depends on X only through g(X, X)."""
        k = self.kind
        if k == "sphere":
            c = self.c if self.c is not None else Fraction(1)
            return JacobiSpectrumModel(((0, 1), (c, self.m - 1)))
        if k == "flat" and self.m >= 2:
            return JacobiSpectrumModel(((0, self.m),))
        if k == "cpn":
            s = Fraction(1) if self.kappa is None else self.kappa / (4 * self.n * (self.n + 1))
            return JacobiSpectrumModel(((0, 1), (4 * s, 1), (s, 2 * self.n - 2)))
        if k == "hpn":
            s = Fraction(1) if self.kappa is None else self.kappa / (16 * self.n * (self.n + 2))
            return JacobiSpectrumModel(((0, 1), (4 * s, 3), (s, 4 * self.n - 4)))
        if k == "op2":
            return make_op2_spectrum()
        return None

    def _cross_scale(self) -> Fraction:
        if self.kind == "cpn" and self.kappa is not None:
            return self.kappa / (4 * self.n * (self.n + 1))
        if self.kind == "hpn" and self.kappa is not None:
            return self.kappa / (16 * self.n * (self.n + 2))
        return Fraction(1)

    # -- moments ---------------------------------------------------------------

    def moments(self, kmax: int) -> MomentSequence:
        """Exact moments 0..kmax by the cheapest exact route available."""
        if kmax < 0:
            raise ModelError("--k must be non-negative")
        k = self.kind
        if k == "op2":
            return spectrum_moments(make_op2_spectrum(), kmax)
        if k == "cross":
            return cross_moments(self.a, self.b, kmax)
        if k == "gr2rn":
            return MomentSequence(tuple(gr2rn_moment(self.n, j) for j in range(kmax + 1)), self.dimension)
        if k == "kernel":
            return MomentSequence(
                tuple(kernel_moment(self.m, self.n, self.mu, self.nu, j) for j in range(kmax + 1)),
                self.dimension,
            )
        if k == "product":
            left, right = self.left, self.right
            return product_moments(
                left.factor_moments(kmax), left.dimension, right.factor_moments(kmax), right.dimension, kmax
            )
        spec = self.spectrum()
        if spec is not None and kmax > degree_budget():
            # beyond the exact-engine budget, a known Jacobi spectrum still gives exact values
            return spectrum_moments(spec, kmax)
        return psi_sequence(self.tensor(), kmax)

    def factor_moments(self, kmax: int) -> tuple[Fraction, ...]:
        """Moments of a product factor; a 1-dimensional factor contributes only psi_0."""
        if self.dimension == 1:
            if self.kind not in ("flat", "file"):
                raise ModelError("only flat factors may be 1-dimensional")
            return (Fraction(1),) + (Fraction(0),) * kmax
        return self.moments(kmax).values

    # -- densities ---------------------------------------------------------------

    def density(self):
        """Curvature density object for the model, or an Atom for space forms."""
        k = self.kind
        if k == "sphere":
            return Atom(float(self.c if self.c is not None else 1))
        if k == "flat":
            return Atom(0.0)
        if k in ("cpn", "hpn", "op2"):
            a, b = CROSS_PARAMETERS[k](self.n) if k != "op2" else CROSS_PARAMETERS[k]()
            scale = self._cross_scale()
            if scale != 1:
                raise ModelError("densities are tabulated for the normalisation with sec in [1, 4]; omit --kappa")
            return CrossDensity(a, b)
        if k == "cross":
            return CrossDensity(self.a, self.b)
        if k == "kernel":
            return ProductKernel(self.m, self.n, float(self.mu), float(self.nu))
        if k == "product":
            return product_density(
                self.left.density(), self.left.dimension, self.right.density(), self.right.dimension
            )
        raise ModelError(f"model {k} has no tabulated curvature density")


def parse_child(text: str) -> ModelSpec:
    """Parse a product factor such as ``sphere:2:1``, ``flat:1``, ``cpn:2:24`` or ``random:3:7``."""
    parts = text.split(":")
    kind, args = parts[0], parts[1:]

    def integer(i: int, name: str) -> int:
        try:
            return int(args[i])
        except (IndexError, ValueError):
            raise ModelError(f"factor {text!r}: expected an integer {name}") from None

    def optional_rational(i: int, name: str):
        return _rational(args[i], name) if len(args) > i else None

    if kind == "sphere":
        return ModelSpec("sphere", m=integer(0, "m"), c=optional_rational(1, "c"))
    if kind == "flat":
        return ModelSpec("flat", m=integer(0, "m"))
    if kind in ("cpn", "hpn"):
        return ModelSpec(kind, n=integer(0, "n"), kappa=optional_rational(1, "kappa"))
    if kind == "op2":
        return ModelSpec("op2")
    if kind == "random":
        return ModelSpec("random", m=integer(0, "m"), seed=integer(1, "seed") if len(args) > 1 else 0)
    if kind == "file":
        if not args:
            raise ModelError("factor file needs a path, e.g. file:tensor.json")
        return ModelSpec("file", path=":".join(args))
    raise ModelError(f"unknown factor kind {kind!r}")
