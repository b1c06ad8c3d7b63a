"""The deformed linear operator as a coefficient multiplier sequence.

For valence ell, shift delta > -ell, exponent t >= 0 and a deformation
pair (p, q), the multiplier at index k >= ell is

    Phi_k = [k + ell - 1]_q**t * ([delta + ell]_{p,q})_{k - ell} / [k - ell]_{p,q}!

The operator maps a series term-wise: a_k -> Phi_k a_k and
b_k -> Phi_k b_k, while the fixed leading z**ell term of the analytic
part stays unweighted.  The denominator is the deformed factorial, so
Phi_ell = [2 ell - 1]_q**t (both products are empty there), and the
configuration t = 0, delta = 1 - ell makes every Phi_k exactly 1.
"""

from __future__ import annotations

import math
import operator as _op
from dataclasses import dataclass
from functools import lru_cache

from .brackets import PQParams, bracket_q, factorial_pq, pochhammer_pq
from .errors import DomainError, SchemaError, ValenceMismatchError
from .series import HarmonicSeries, _schema_int, _schema_real

__all__ = ["OperatorParams", "multiplier", "multiplier_row", "apply_operator"]


@dataclass(frozen=True)
class OperatorParams:
    """Full parameterization of the multiplier sequence."""

    pq: PQParams
    ell: int
    delta: float
    t: int

    def __post_init__(self):
        if not isinstance(self.pq, PQParams):
            raise DomainError("pq must be a PQParams instance")
        ell = _op.index(self.ell)
        if ell < 1:
            raise DomainError(f"valence must be a positive integer, got {ell}")
        delta = float(self.delta)
        if not math.isfinite(delta) or delta <= -ell:
            raise DomainError(f"require delta > -ell, got delta={delta}, ell={ell}")
        t = _op.index(self.t)
        if t < 0:
            raise DomainError(f"exponent t must be a nonnegative integer, got {t}")
        object.__setattr__(self, "ell", ell)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls, ell: int, pq: PQParams) -> "OperatorParams":
        """The configuration (t=0, delta=1-ell) whose multipliers are all 1."""
        return cls(pq, ell, 1 - _op.index(ell), 0)

    def to_dict(self) -> dict:
        return {"p": self.pq.p, "q": self.pq.q, "ell": self.ell, "delta": self.delta, "t": self.t}

    @classmethod
    def from_dict(cls, data: object) -> "OperatorParams":
        if not isinstance(data, dict):
            raise SchemaError("operator document must be a JSON object")
        expected = {"p", "q", "ell", "delta", "t"}
        unknown = set(data) - expected
        if unknown:
            raise SchemaError(f"unknown keys in operator document: {sorted(unknown)}")
        missing = expected - set(data)
        if missing:
            raise SchemaError(f"missing keys in operator document: {sorted(missing)}")
        try:
            return cls(
                PQParams(_schema_real(data["p"], "'p'"), _schema_real(data["q"], "'q'")),
                _schema_int(data["ell"], "ell"),
                _schema_real(data["delta"], "'delta'"),
                _schema_int(data["t"], "t"),
            )
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc


def multiplier(kappa: int, params: OperatorParams) -> float:
    """Multiplier Phi_kappa > 0 for kappa >= ell."""
    kappa = _op.index(kappa)
    if kappa < params.ell:
        raise DomainError(f"multiplier index {kappa} must be >= valence {params.ell}")
    n = kappa - params.ell
    bracket_power = bracket_q(kappa + params.ell - 1, params.pq.q) ** params.t
    return (
        bracket_power
        * pochhammer_pq(params.delta + params.ell, n, params.pq)
        / factorial_pq(n, params.pq)
    )


@lru_cache(maxsize=128)
def _multiplier_row(params: OperatorParams, kappa_max: int) -> tuple[float, ...]:
    return tuple(multiplier(k, params) for k in range(params.ell, kappa_max + 1))


def multiplier_row(params: OperatorParams, kappa_max: int) -> tuple[float, ...]:
    """Multipliers (Phi_ell, ..., Phi_kappa_max); cached per parameter set.

    The cache is read-only after construction, so concurrent readers are
    safe and see identical values.
    """
    kappa_max = _op.index(kappa_max)
    if kappa_max < params.ell:
        raise DomainError(f"kappa_max {kappa_max} must be >= valence {params.ell}")
    return _multiplier_row(params, kappa_max)


def apply_operator(f: HarmonicSeries, params: OperatorParams) -> HarmonicSeries:
    """Apply the multiplier sequence term-wise to both coefficient tables.

    The z**ell leading term of the analytic part is left unweighted; the
    co-analytic b_ell term IS multiplied by Phi_ell.
    """
    if f.ell != params.ell:
        raise ValenceMismatchError(
            f"series valence {f.ell} differs from operator valence {params.ell}"
        )
    row = multiplier_row(params, f.truncation) if (f.a or f.b) else ()
    a = {k: row[k - f.ell] * c for k, c in f.a.items()}
    b = {k: row[k - f.ell] * c for k, c in f.b.items()}
    return HarmonicSeries(f.ell, f.truncation, a, b)
