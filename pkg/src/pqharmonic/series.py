"""Truncated harmonic multivalent series f = h + conj(g).

A series of valence ell is the harmonic polynomial

    f(z) = z**ell + sum_{k=ell+1..N} a_k z**k + conj(sum_{k=ell..N} b_k z**k)

on the open unit disk.  The analytic part h carries the fixed leading
coefficient 1 (never stored) plus the table ``a``; the co-analytic part g
is the table ``b``.  Absent indices mean a zero coefficient, and the
truncation order N is part of the storage, not of the function identity:
two series are equal when valence and coefficient tables agree.

The JSON form is bit-exact::

    {"ell": 3, "truncation": 12, "a": {"4": [re, im], ...}, "b": {"3": [re, im], ...}}

with decimal-integer-string keys and two-element binary64 arrays for
complex values; unknown keys are rejected.
"""

from __future__ import annotations

import cmath
import json
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from types import MappingProxyType

import numpy as np

from .errors import DomainError, NormalizationError, SchemaError, ValenceMismatchError

__all__ = [
    "HarmonicSeries",
    "DiskGrid",
    "evaluate",
    "eval_part_derivative",
    "sense_gap",
    "linear_combine",
    "read_series",
    "write_series",
]

ANALYTIC = "analytic"
CO_ANALYTIC = "co-analytic"

_WEIGHT_SUM_TOL = 1e-12


def _normalize_table(raw: Mapping[int, complex], lo: int, hi: int, name: str) -> Mapping[int, complex]:
    table: dict[int, complex] = {}
    for key in sorted(raw, key=operator.index):
        k = operator.index(key)
        if not lo <= k <= hi:
            raise DomainError(f"{name}-coefficient index {k} outside [{lo}, {hi}]")
        v = complex(raw[key])
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise DomainError(f"{name}-coefficient at index {k} must be finite")
        if v != 0:
            table[k] = v
    return MappingProxyType(table)


@dataclass(frozen=True, eq=False)
class HarmonicSeries:
    """Immutable truncated harmonic series of valence ``ell``.

    ``a`` maps k in [ell+1, truncation] to the analytic coefficients,
    ``b`` maps k in [ell, truncation] to the co-analytic coefficients.
    Exact-zero coefficients are dropped on construction, so sparse tables
    are canonical.  The co-analytic leading modulus |b_ell| < 1 is
    advisory (see ``b_ell``) and is reported, never enforced.
    """

    ell: int
    truncation: int
    a: Mapping[int, complex] = field(default_factory=dict)
    b: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        ell = operator.index(self.ell)
        if ell < 1:
            raise DomainError(f"valence must be a positive integer, got {ell}")
        n = operator.index(self.truncation)
        if n < ell:
            raise DomainError(f"truncation {n} must be >= valence {ell}")
        object.__setattr__(self, "ell", ell)
        object.__setattr__(self, "truncation", n)
        object.__setattr__(self, "a", _normalize_table(self.a, ell + 1, n, "a"))
        object.__setattr__(self, "b", _normalize_table(self.b, ell, n, "b"))

    @classmethod
    def monomial(cls, ell: int, truncation: int | None = None) -> "HarmonicSeries":
        """The bare z**ell series."""
        return cls(ell, ell if truncation is None else truncation)

    @property
    def b_ell(self) -> complex:
        """Leading co-analytic coefficient (0 when absent)."""
        return self.b.get(self.ell, 0j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HarmonicSeries):
            return NotImplemented
        return (
            self.ell == other.ell
            and dict(self.a) == dict(other.a)
            and dict(self.b) == dict(other.b)
        )

    def __repr__(self) -> str:  # compact, table sizes only
        return (
            f"HarmonicSeries(ell={self.ell}, truncation={self.truncation}, "
            f"|a|={len(self.a)}, |b|={len(self.b)})"
        )

    # -- JSON schema -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "truncation": self.truncation,
            "a": {str(k): [v.real, v.imag] for k, v in self.a.items()},
            "b": {str(k): [v.real, v.imag] for k, v in self.b.items()},
        }

    @classmethod
    def from_dict(cls, data: object) -> "HarmonicSeries":
        if not isinstance(data, dict):
            raise SchemaError("series document must be a JSON object")
        expected = {"ell", "truncation", "a", "b"}
        unknown = set(data) - expected
        if unknown:
            raise SchemaError(f"unknown keys in series document: {sorted(unknown)}")
        missing = expected - set(data)
        if missing:
            raise SchemaError(f"missing keys in series document: {sorted(missing)}")
        ell = _schema_int(data["ell"], "ell")
        n = _schema_int(data["truncation"], "truncation")
        a = _schema_table(data["a"], "a")
        b = _schema_table(data["b"], "b")
        try:
            return cls(ell, n, a, b)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc


def _schema_int(value: object, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"'{name}' must be an integer")
    return value


def _schema_real(value: object, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where} must be a number")
    out = float(value)
    if not math.isfinite(out):
        raise SchemaError(f"{where} must be finite")
    return out


def _schema_table(value: object, name: str) -> dict[int, complex]:
    if not isinstance(value, dict):
        raise SchemaError(f"'{name}' must be an object")
    table: dict[int, complex] = {}
    for key, entry in value.items():
        if not isinstance(key, str) or not key.lstrip("-").isdigit():
            raise SchemaError(f"'{name}' key {key!r} is not a decimal integer string")
        k = int(key)
        if k in table:
            raise SchemaError(f"duplicate '{name}' index {k}")
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise SchemaError(f"'{name}[{key}]' must be a two-element [re, im] array")
        table[k] = complex(
            _schema_real(entry[0], f"'{name}[{key}][0]'"),
            _schema_real(entry[1], f"'{name}[{key}][1]'"),
        )
    return table


def read_series(path: str | Path) -> HarmonicSeries:
    with open(path, encoding="utf-8") as fp:
        return HarmonicSeries.from_dict(json.load(fp))


def write_series(f: HarmonicSeries, path: str | Path) -> None:
    Path(path).write_text(json.dumps(f.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- evaluation --------------------------------------------------------

def _check_in_disk(z: complex) -> complex:
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError(f"evaluation point must satisfy |z| < 1, got |z|={abs(z)}")
    return z


def _power_table(z: np.ndarray, kmax: int) -> list:
    """Powers z**0..z**kmax by cumulative multiplication.

    Fixed evaluation order keeps scalar and grid paths bit-identical and is
    exact at dyadic points, which downstream singularity fixtures rely on.
    """
    powers = [np.ones_like(z)]
    for _ in range(kmax):
        powers.append(powers[-1] * z)
    return powers


def _table_sum(terms: Iterable[tuple[int, complex]], powers: list) -> np.ndarray:
    out = np.zeros_like(powers[0])
    for k, c in terms:
        out = out + c * powers[k]
    return out


def _analytic_terms(f: HarmonicSeries) -> list[tuple[int, complex]]:
    return [(f.ell, 1.0 + 0j)] + sorted(f.a.items())


def _co_analytic_terms(f: HarmonicSeries) -> list[tuple[int, complex]]:
    return sorted(f.b.items())


def _values_on(f: HarmonicSeries, z: np.ndarray) -> np.ndarray:
    powers = _power_table(z, f.truncation)
    h = _table_sum(_analytic_terms(f), powers)
    g = _table_sum(_co_analytic_terms(f), powers)
    return h + np.conj(g)


def evaluate(f: HarmonicSeries, z: complex) -> complex:
    """Value h(z) + conj(g(z)) at a point of the open unit disk."""
    z = _check_in_disk(z)
    return complex(_values_on(f, np.asarray(z, dtype=np.complex128)))


def _derivative_terms(
    terms: Iterable[tuple[int, complex]], order: int
) -> list[tuple[int, complex]]:
    out = []
    for k, c in terms:
        factor = k if order == 1 else k * (k - 1)
        if factor != 0:
            out.append((k - order, factor * c))
    return out


def eval_part_derivative(f: HarmonicSeries, part: str, order: int, z: complex) -> complex:
    """Term-wise derivative of one polynomial part, evaluated at z.

    ``part`` selects 'analytic' (h) or 'co-analytic' (g); ``order`` is 1
    or 2.  No conjugation is applied; callers compose conjugates.
    """
    if part not in (ANALYTIC, CO_ANALYTIC):
        raise DomainError(f"part must be '{ANALYTIC}' or '{CO_ANALYTIC}', got {part!r}")
    if order not in (1, 2):
        raise DomainError(f"derivative order must be 1 or 2, got {order}")
    z = _check_in_disk(z)
    terms = _analytic_terms(f) if part == ANALYTIC else _co_analytic_terms(f)
    dterms = _derivative_terms(terms, order)
    if not dterms:
        return 0j
    powers = _power_table(np.asarray(z, dtype=np.complex128), max(k for k, _ in dterms))
    return complex(_table_sum(dterms, powers))


def _sense_gap_on(f: HarmonicSeries, z: np.ndarray) -> np.ndarray:
    powers = _power_table(z, f.truncation - 1)
    hp = _table_sum(_derivative_terms(_analytic_terms(f), 1), powers)
    gp = _table_sum(_derivative_terms(_co_analytic_terms(f), 1), powers)
    return np.abs(hp) - np.abs(gp)


def sense_gap(f: HarmonicSeries, z: complex) -> float:
    """|h'(z)| - |g'(z)|; positive values certify sense preservation at z."""
    z = _check_in_disk(z)
    return float(_sense_gap_on(f, np.asarray(z, dtype=np.complex128)))


def linear_combine(terms: Sequence[tuple[float, HarmonicSeries]]) -> HarmonicSeries:
    """Coefficient-wise affine combination of series sharing one valence.

    Weights are real and must sum to 1 (within 1e-12) so the leading
    z**ell coefficient stays 1.  The output truncation is the maximum of
    the inputs' truncations.
    """
    if not terms:
        raise NormalizationError("linear_combine requires at least one term")
    ells = {f.ell for _, f in terms}
    if len(ells) != 1:
        raise ValenceMismatchError(f"all series must share one valence, got {sorted(ells)}")
    weights = [float(w) for w, _ in terms]
    total = math.fsum(weights)
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise NormalizationError(f"weights must sum to 1 within {_WEIGHT_SUM_TOL}, got {total!r}")
    ell = ells.pop()
    truncation = max(f.truncation for _, f in terms)
    a: dict[int, complex] = {}
    b: dict[int, complex] = {}
    for w, f in zip(weights, (f for _, f in terms)):
        for k, c in f.a.items():
            a[k] = a.get(k, 0j) + w * c
        for k, c in f.b.items():
            b[k] = b.get(k, 0j) + w * c
    return HarmonicSeries(ell, truncation, a, b)


# -- disk grids --------------------------------------------------------

@dataclass(frozen=True)
class DiskGrid:
    """Sampling grid: radii crossed with uniformly spaced angles.

    Angles are 2*pi*j / angles_per_radius for j = 0..angles_per_radius-1.
    Grid scans use the documented tie-break "lowest radius, then lowest
    angle index", which the row-major point layout realizes.
    """

    r_values: tuple[float, ...]
    angles_per_radius: int
    r_max: float

    def __post_init__(self):
        r_max = float(self.r_max)
        if not (math.isfinite(r_max) and 0.0 < r_max < 1.0):
            raise DomainError(f"r_max must lie in (0, 1), got {r_max}")
        r_values = tuple(float(r) for r in self.r_values)
        if not r_values:
            raise DomainError("grid needs at least one radius")
        for prev, cur in zip((0.0,) + r_values, r_values):
            if not (math.isfinite(cur) and prev < cur <= r_max):
                raise DomainError("radii must be ascending and lie in (0, r_max]")
        angles = operator.index(self.angles_per_radius)
        if angles < 1:
            raise DomainError(f"angles_per_radius must be >= 1, got {angles}")
        object.__setattr__(self, "r_values", r_values)
        object.__setattr__(self, "angles_per_radius", angles)
        object.__setattr__(self, "r_max", r_max)

    @classmethod
    def uniform(cls, n_radii: int = 64, angles: int = 256, r_max: float = 0.995) -> "DiskGrid":
        """Radii uniform on (0, r_max]: r_max/n, 2 r_max/n, ..., r_max."""
        n_radii = operator.index(n_radii)
        if n_radii < 1:
            raise DomainError(f"n_radii must be >= 1, got {n_radii}")
        r = np.linspace(r_max / n_radii, r_max, n_radii)
        return cls(tuple(float(x) for x in r), angles, r_max)

    @property
    def size(self) -> int:
        return len(self.r_values) * self.angles_per_radius

    def points(self) -> np.ndarray:
        """Complex points, shape (len(r_values), angles_per_radius)."""
        theta = 2.0 * np.pi * np.arange(self.angles_per_radius) / self.angles_per_radius
        return np.asarray(self.r_values)[:, None] * np.exp(1j * theta)[None, :]

    def point_at(self, flat_index: int) -> complex:
        i, j = divmod(operator.index(flat_index), self.angles_per_radius)
        theta = 2.0 * np.pi * j / self.angles_per_radius
        return complex(self.r_values[i] * cmath.exp(1j * theta))

    def to_dict(self) -> dict:
        return {
            "r_values": list(self.r_values),
            "angles_per_radius": self.angles_per_radius,
            "r_max": self.r_max,
        }

    @classmethod
    def from_dict(cls, data: object) -> "DiskGrid":
        if not isinstance(data, dict):
            raise SchemaError("grid document must be a JSON object")
        expected = {"r_values", "angles_per_radius", "r_max"}
        if set(data) != expected:
            raise SchemaError(f"grid document keys must be {sorted(expected)}")
        rs = data["r_values"]
        if not isinstance(rs, list):
            raise SchemaError("'r_values' must be an array")
        try:
            return cls(
                tuple(_schema_real(r, "'r_values' entry") for r in rs),
                _schema_int(data["angles_per_radius"], "angles_per_radius"),
                _schema_real(data["r_max"], "r_max"),
            )
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
