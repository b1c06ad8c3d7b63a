"""Scalar primitives of the two-parameter deformed calculus.

The deformed bracket of a real number x is

    [x]_{p,q} = (p**x - q**x) / (p - q),      0 < q < p <= 1,

and the one-parameter bracket [x]_q = (1 - q**x) / (1 - q) is its p = 1
specialization.  Factorials and shifted factorials (Pochhammer products)
are plain products of brackets, with the empty product equal to 1.  For
integer n >= 1 the bracket equals the finite sum
p**(n-1) + p**(n-2) q + ... + q**(n-1), which tests use as an independent
oracle.

All computation is in binary64; real (non-integer) bracket arguments are
supported because shifted-factorial bases need not be integers.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["PQParams", "bracket_pq", "bracket_q", "factorial_pq", "pochhammer_pq"]


@dataclass(frozen=True)
class PQParams:
    """Deformation pair (p, q), constrained to 0 < q < p <= 1 strictly.

    p = q is rejected rather than treated as a limit; the theory this
    package implements requires the strict ordering.
    """

    p: float
    q: float

    def __post_init__(self):
        p = float(self.p)
        q = float(self.q)
        if not (math.isfinite(p) and math.isfinite(q)):
            raise DomainError("p and q must be finite")
        if not 0.0 < q < p <= 1.0:
            raise DomainError(f"require 0 < q < p <= 1 strictly, got p={p}, q={q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


def _check_exponent(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("bracket argument must be finite")
    if x < 0:
        raise DomainError(f"bracket argument must be >= 0, got {x}")
    return x


def bracket_pq(x: float, pq: PQParams) -> float:
    """Two-parameter bracket [x]_{p,q} = (p**x - q**x) / (p - q) for x >= 0."""
    x = _check_exponent(x)
    if x == 0.0:
        return 0.0
    return (pq.p**x - pq.q**x) / (pq.p - pq.q)


def bracket_q(x: float, q: float) -> float:
    """One-parameter bracket [x]_q = (1 - q**x) / (1 - q) for x >= 0, 0 < q < 1."""
    x = _check_exponent(x)
    q = float(q)
    if not (math.isfinite(q) and 0.0 < q < 1.0):
        raise DomainError(f"require 0 < q < 1, got q={q}")
    if x == 0.0:
        return 0.0
    return (1.0 - q**x) / (1.0 - q)


def factorial_pq(n: int, pq: PQParams) -> float:
    """Deformed factorial [n]! = [1][2]...[n]; the empty product is 1."""
    n = operator.index(n)
    if n < 0:
        raise DomainError(f"factorial order must be >= 0, got {n}")
    out = 1.0
    for k in range(1, n + 1):
        out *= bracket_pq(k, pq)
    return out


def pochhammer_pq(a: float, n: int, pq: PQParams) -> float:
    """Deformed shifted factorial ([a])_n = [a][a+1]...[a+n-1], a > 0.

    The base a may be any positive real; the empty product is 1.
    """
    a = float(a)
    if not (math.isfinite(a) and a > 0):
        raise DomainError(f"shifted-factorial base must be > 0, got {a}")
    n = operator.index(n)
    if n < 0:
        raise DomainError(f"shifted-factorial length must be >= 0, got {n}")
    out = 1.0
    for j in range(n):
        out *= bracket_pq(a + j, pq)
    return out
