"""Class membership: coefficient margin, analytic condition, extremals.

A class instance is an operator parameterization plus an order
sigma in [0, 1).  Two membership tests coexist and are never conflated:

* the coefficient test.  With weights w_a(k) = k (k - sigma) and
  w_b(k) = k (k - 2 - sigma), the weighted sum

      S(f) = sum w_a(k) Phi_k |a_k|  +  sum w_b(k) Phi_k |b_k|

  is compared against the normalization constant ell (ell - 2 - sigma).
  The margin bound - S(f) is affine in each coefficient modulus, and
  margin >= 0 is the sufficient membership certificate.

* the analytic test.  With H the operator applied to both parts,

      ratio(z) = [z^2 (Hh)''(z) - conj(z^2 (Hg)''(z))]
                 / [z (Hh)'(z) + conj(z (Hg)'(z))]

  membership requires Re ratio >= sigma on the disk; grids sample it.
  At z = 0 the ratio is the limit value ell - 1.

Classes with ell - 2 - sigma <= 0 have a nonpositive normalization
constant; results there are computed anyway but flagged degenerate.
"""

from __future__ import annotations

import math
import operator as _op
import warnings
from dataclasses import dataclass, field
from typing import Mapping
from types import MappingProxyType

import numpy as np

from .errors import (
    DegenerateClassError,
    DegenerateClassWarning,
    DomainError,
    NormalizationError,
    SchemaError,
    SingularRatioError,
    ValenceMismatchError,
)
from .operator import OperatorParams, apply_operator, multiplier_row
from .series import (
    DiskGrid,
    HarmonicSeries,
    _analytic_terms,
    _co_analytic_terms,
    _power_table,
    _sense_gap_on,
    _table_sum,
)

__all__ = [
    "ClassParams",
    "ExtremalWeights",
    "MembershipReport",
    "weight_pair",
    "coefficient_sum",
    "margin",
    "re_ge_alpha_modulus",
    "analytic_ratio",
    "min_re_over_grid",
    "sense_gap_over_grid",
    "extremal_function",
    "convolve",
    "bernardi",
    "check_membership",
]

# |B(z)| below this is treated as a vanished denominator.
SINGULAR_THRESHOLD = 1e-300
# |B(z)|**2 would underflow below this; fall back to direct complex division.
_SAFE_DENOM = 1e-150

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ClassParams:
    """Operator parameters plus the order sigma in [0, 1)."""

    op: OperatorParams
    sigma: float

    def __post_init__(self):
        if not isinstance(self.op, OperatorParams):
            raise DomainError("op must be an OperatorParams instance")
        sigma = float(self.sigma)
        if not (math.isfinite(sigma) and 0.0 <= sigma < 1.0):
            raise DomainError(f"require 0 <= sigma < 1, got {sigma}")
        object.__setattr__(self, "sigma", sigma)

    @property
    def ell(self) -> int:
        return self.op.ell

    @property
    def bound(self) -> float:
        """Normalization constant ell (ell - 2 - sigma) of the coefficient test."""
        return self.ell * (self.ell - 2 - self.sigma)

    @property
    def degenerate(self) -> bool:
        """True when ell - 2 - sigma <= 0 (the class is {z**ell}-or-empty)."""
        return self.ell - 2 - self.sigma <= 0

    def to_dict(self) -> dict:
        return {"operator": self.op.to_dict(), "sigma": self.sigma}

    @classmethod
    def from_dict(cls, data: object) -> "ClassParams":
        if not isinstance(data, dict):
            raise SchemaError("class document must be a JSON object")
        expected = {"operator", "sigma"}
        unknown = set(data) - expected
        if unknown:
            raise SchemaError(f"unknown keys in class document: {sorted(unknown)}")
        missing = expected - set(data)
        if missing:
            raise SchemaError(f"missing keys in class document: {sorted(missing)}")
        sigma = data["sigma"]
        if isinstance(sigma, bool) or not isinstance(sigma, (int, float)):
            raise SchemaError("'sigma' must be a number")
        try:
            return cls(OperatorParams.from_dict(data["operator"]), float(sigma))
        except SchemaError:
            raise
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc


def weight_pair(kappa: int, sigma: float) -> tuple[float, float]:
    """Coefficient-test weights (k (k - sigma), k (k - 2 - sigma)).

    The second entry goes negative for k < 2 + sigma, which is reachable
    only in degenerate classes; it is kept signed, as written.
    """
    kappa = _op.index(kappa)
    if kappa < 1:
        raise DomainError(f"weight index must be >= 1, got {kappa}")
    sigma = float(sigma)
    return (kappa * (kappa - sigma), kappa * (kappa - 2 - sigma))


def _check_valence(f: HarmonicSeries, cp: ClassParams) -> None:
    if f.ell != cp.ell:
        raise ValenceMismatchError(
            f"series valence {f.ell} differs from class valence {cp.ell}"
        )


def coefficient_sum(f: HarmonicSeries, cp: ClassParams) -> float:
    """Weighted sum S(f) over the stored coefficients, moduli term-wise."""
    _check_valence(f, cp)
    if not (f.a or f.b):
        return 0.0
    row = multiplier_row(cp.op, f.truncation)
    total = 0.0
    for k, c in sorted(f.a.items()):
        total += weight_pair(k, cp.sigma)[0] * row[k - f.ell] * abs(c)
    for k, c in sorted(f.b.items()):
        total += weight_pair(k, cp.sigma)[1] * row[k - f.ell] * abs(c)
    return total


def margin(f: HarmonicSeries, cp: ClassParams) -> float:
    """Membership margin bound - S(f); nonnegative margin is sufficient.

    Emits a DegenerateClassWarning when the normalization constant is
    nonpositive (the margin is then meaningless as a certificate).
    """
    if cp.degenerate:
        warnings.warn(
            f"class with ell={cp.ell}, sigma={cp.sigma} is degenerate "
            "(normalization constant <= 0)",
            DegenerateClassWarning,
            stacklevel=2,
        )
    return cp.bound - coefficient_sum(f, cp)


def re_ge_alpha_modulus(theta, alpha: float):
    """Modulus form of the half-plane test: |theta + (1-alpha)| >= |theta - (1+alpha)|.

    Equivalent to Re theta >= alpha, exactly, for alpha >= 0.  Accepts a
    complex scalar or a numpy array of them.
    """
    alpha = float(alpha)
    if not (math.isfinite(alpha) and alpha >= 0):
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    th = np.asarray(theta, dtype=np.complex128)
    out = np.abs(th + (1.0 - alpha)) >= np.abs(th - (1.0 + alpha))
    return bool(out) if np.isscalar(theta) or np.ndim(theta) == 0 else out


# -- the analytic ratio ------------------------------------------------

def _ratio_parts(hf: HarmonicSeries, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Numerator and denominator of the ratio for an operator-applied series.

    Numerator  A = sum k(k-1) c z^k  (analytic)  - conj(same over co-analytic)
    Denominator B = sum k c z^k      (analytic)  + conj(same over co-analytic)
    """
    powers = _power_table(z, hf.truncation)
    an = _analytic_terms(hf)
    co = _co_analytic_terms(hf)
    a2 = _table_sum([(k, k * (k - 1) * c) for k, c in an], powers)
    a1 = _table_sum([(k, k * c) for k, c in an], powers)
    g2 = _table_sum([(k, k * (k - 1) * c) for k, c in co], powers)
    g1 = _table_sum([(k, k * c) for k, c in co], powers)
    return a2 - np.conj(g2), a1 + np.conj(g1)


def analytic_ratio(f: HarmonicSeries, cp: ClassParams, z: complex) -> complex:
    """The ratio whose real part the class bounds below by sigma.

    The operator is applied internally.  z = 0 returns the limit value
    ell - 1 exactly; a vanished denominator raises SingularRatioError.
    """
    _check_valence(f, cp)
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError(f"require |z| < 1, got |z|={abs(z)}")
    if z == 0:
        return complex(cp.ell - 1)
    hf = apply_operator(f, cp.op)
    num, den = _ratio_parts(hf, np.asarray(z, dtype=np.complex128))
    if abs(complex(den)) < SINGULAR_THRESHOLD:
        raise SingularRatioError(z)
    return complex(num / den)


def _re_ratio_values(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Re(num/den) via Re(num * conj(den)) / |den|^2.

    This form keeps exactly proportional numerators and denominators
    exactly tied across grid points, which makes the documented argmin
    tie-break observable.  Near-underflow denominators fall back to
    direct complex division.
    """
    babs = np.abs(den)
    re = np.empty(den.shape, dtype=np.float64)
    safe = babs >= _SAFE_DENOM
    re[safe] = (
        num.real[safe] * den.real[safe] + num.imag[safe] * den.imag[safe]
    ) / (den.real[safe] ** 2 + den.imag[safe] ** 2)
    if not np.all(safe):
        tiny = ~safe
        re[tiny] = np.real(num[tiny] / den[tiny])
    return re


def min_re_over_grid(
    f: HarmonicSeries, cp: ClassParams, grid: DiskGrid
) -> tuple[float, complex]:
    """Minimum of Re(analytic_ratio) over the grid and the attaining point.

    Deterministic for a given grid: the scan is row-major over (radius,
    angle index), and ties resolve to the lowest radius, then the lowest
    angle index.  A vanished denominator anywhere raises
    SingularRatioError carrying the first offending point.
    """
    _check_valence(f, cp)
    hf = apply_operator(f, cp.op)
    z = grid.points()
    num, den = _ratio_parts(hf, z)
    babs = np.abs(den)
    vanished = babs < SINGULAR_THRESHOLD
    if vanished.any():
        raise SingularRatioError(grid.point_at(int(np.argmax(vanished.ravel()))))
    re = _re_ratio_values(num, den)
    idx = int(np.argmin(re.ravel()))
    return float(re.ravel()[idx]), grid.point_at(idx)


def sense_gap_over_grid(f: HarmonicSeries, grid: DiskGrid) -> tuple[float, complex]:
    """Minimum sense-preservation gap |h'| - |g'| over the grid, with argmin.

    Same deterministic scan order and tie-break as min_re_over_grid.
    The gap is evaluated on f itself, not on the operator image.
    """
    gap = _sense_gap_on(f, grid.points())
    idx = int(np.argmin(gap.ravel()))
    return float(gap.ravel()[idx]), grid.point_at(idx)


# -- extremal functions ------------------------------------------------

def _normalize_weight_table(raw: Mapping[int, float], name: str) -> Mapping[int, float]:
    table: dict[int, float] = {}
    for key in sorted(raw, key=_op.index):
        k = _op.index(key)
        w = float(raw[key])
        if not (math.isfinite(w) and w >= 0):
            raise DomainError(f"{name}-weight at index {k} must be >= 0, got {w}")
        if w != 0:
            table[k] = w
    return MappingProxyType(table)


@dataclass(frozen=True)
class ExtremalWeights:
    """Convex weights of the extreme-point representation.

    ``x_ell`` weighs the bare z**ell extreme point, ``x`` the analytic
    single-term extremals (indices >= ell + 1), ``y`` the co-analytic
    ones (indices >= ell).  Weights are nonnegative and sum to 1.
    """

    x_ell: float
    x: Mapping[int, float] = field(default_factory=dict)
    y: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        x_ell = float(self.x_ell)
        if not (math.isfinite(x_ell) and x_ell >= 0):
            raise DomainError(f"x_ell must be >= 0, got {x_ell}")
        x = _normalize_weight_table(self.x, "x")
        y = _normalize_weight_table(self.y, "y")
        total = math.fsum([x_ell, *x.values(), *y.values()])
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise NormalizationError(
                f"extremal weights must sum to 1 within {_WEIGHT_SUM_TOL}, got {total!r}"
            )
        object.__setattr__(self, "x_ell", x_ell)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def unit(cls, part: str, kappa: int) -> "ExtremalWeights":
        """All weight on a single extreme point."""
        if part == "analytic":
            return cls(0.0, {kappa: 1.0}, {})
        if part == "co-analytic":
            return cls(0.0, {}, {kappa: 1.0})
        raise DomainError(f"part must be 'analytic' or 'co-analytic', got {part!r}")


def extremal_function(
    weights: ExtremalWeights, cp: ClassParams, truncation: int | None = None
) -> HarmonicSeries:
    """Sharpness witness: the convex combination of extreme points.

    Coefficients are a_k = bound * X_k / (w_a(k) Phi_k) and
    b_k = bound * Y_k / (w_b(k) Phi_k), so the margin equals
    bound * x_ell; unit single-index weights give margin 0.
    """
    if cp.degenerate:
        raise DegenerateClassError(
            f"extremal coefficients are undefined for the degenerate class "
            f"ell={cp.ell}, sigma={cp.sigma}"
        )
    ell = cp.ell
    for k in weights.x:
        if k < ell + 1:
            raise DomainError(f"analytic extremal index {k} must be >= {ell + 1}")
    if any(k < ell for k in weights.y):
        raise DomainError(f"co-analytic extremal indices must be >= {ell}")
    top = max([ell, *weights.x, *weights.y])
    n = top if truncation is None else _op.index(truncation)
    if n < top:
        raise DomainError(f"truncation {n} must cover the highest weighted index {top}")
    row = multiplier_row(cp.op, top)
    bound = cp.bound
    a = {
        k: bound * w / (weight_pair(k, cp.sigma)[0] * row[k - ell])
        for k, w in weights.x.items()
    }
    b = {
        k: bound * w / (weight_pair(k, cp.sigma)[1] * row[k - ell])
        for k, w in weights.y.items()
    }
    return HarmonicSeries(ell, n, a, b)


# -- convolution and the integral transform -----------------------------

def convolve(f: HarmonicSeries, m: HarmonicSeries) -> HarmonicSeries:
    """Term-wise coefficient product (Hadamard convolution); z**ell stays 1."""
    if f.ell != m.ell:
        raise ValenceMismatchError(f"valences differ: {f.ell} vs {m.ell}")
    a = {k: c * m.a[k] for k, c in f.a.items() if k in m.a}
    b = {k: c * m.b[k] for k, c in f.b.items() if k in m.b}
    return HarmonicSeries(f.ell, max(f.truncation, m.truncation), a, b)


def convolution_identity(ell: int, truncation: int) -> HarmonicSeries:
    """The all-ones series, the identity element of convolve."""
    a = {k: 1.0 + 0j for k in range(ell + 1, truncation + 1)}
    b = {k: 1.0 + 0j for k in range(ell, truncation + 1)}
    return HarmonicSeries(ell, truncation, a, b)


def bernardi(f: HarmonicSeries, u: float) -> HarmonicSeries:
    """Integral-transform coefficient map a_k -> (u+ell)/(k+u) a_k, u > -1.

    The z**ell term is unchanged (its factor is (u+ell)/(ell+u) = 1), and
    every factor lies in (0, 1], so coefficient margins never decrease.
    """
    u = float(u)
    if not (math.isfinite(u) and u > -1.0):
        raise DomainError(f"require u > -1, got {u}")
    ell = f.ell
    a = {k: (u + ell) / (k + u) * c for k, c in f.a.items()}
    b = {k: (u + ell) / (k + u) * c for k, c in f.b.items()}
    return HarmonicSeries(ell, f.truncation, a, b)


# -- membership reports --------------------------------------------------

@dataclass(frozen=True)
class MembershipReport:
    """Joint outcome of the coefficient test and the sampled analytic test.

    The two verdicts are reported side by side and never combined: the
    coefficient test is only sufficient, the analytic test is the class
    definition sampled on a grid.
    """

    margin: float
    coefficient_sum: float
    bound: float
    min_re: float
    argmin_z: complex
    sense_gap_min: float
    sufficient_verdict: bool
    analytic_verdict: bool
    grid: DiskGrid
    degenerate: bool

    def to_dict(self) -> dict:
        return {
            "margin": self.margin,
            "coefficient_sum": self.coefficient_sum,
            "bound": self.bound,
            "min_re": self.min_re,
            "argmin_z": [self.argmin_z.real, self.argmin_z.imag],
            "sense_gap_min": self.sense_gap_min,
            "sufficient_verdict": self.sufficient_verdict,
            "analytic_verdict": self.analytic_verdict,
            "grid": self.grid.to_dict(),
            "degenerate": self.degenerate,
        }


def check_membership(
    f: HarmonicSeries, cp: ClassParams, grid: DiskGrid | None = None
) -> MembershipReport:
    """Run both membership tests on one grid and collect the report."""
    grid = grid if grid is not None else DiskGrid.uniform()
    s = coefficient_sum(f, cp)
    mar = cp.bound - s
    min_re, argmin_z = min_re_over_grid(f, cp, grid)
    gap_min, _ = sense_gap_over_grid(f, grid)
    return MembershipReport(
        margin=mar,
        coefficient_sum=s,
        bound=cp.bound,
        min_re=min_re,
        argmin_z=argmin_z,
        sense_gap_min=gap_min,
        sufficient_verdict=mar >= 0,
        analytic_verdict=min_re >= cp.sigma,
        grid=grid,
        degenerate=cp.degenerate,
    )
