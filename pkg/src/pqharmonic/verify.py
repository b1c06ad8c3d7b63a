"""Seeded verification suites: sufficiency, closure claims, integral oracle.

Everything here is reproducible by construction.  A suite run is driven
by a SuiteConfig whose master seed splits into per-trial seeds as
``master + trial_index``; each trial builds its own counter-based
generator (numpy Philox), so trials are order- and
parallelism-independent and any failure can be replayed from the seed
recorded in its report.

The convolution suite treats closure as a hypothesis under test: each
pair is classified closed / not closed, and the acceptance bar is the
agreement between the primary margin and an independent margin oracle
that re-derives the multiplier sequence from its ratio recurrence.
"""

from __future__ import annotations

import json
import math
import operator as _op
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import quad

from .brackets import bracket_pq, bracket_q
from .errors import (
    DegenerateClassError,
    DomainError,
    QuadratureError,
    SingularRatioError,
)
from .membership import (
    ClassParams,
    bernardi,
    coefficient_sum,
    convolve,
    min_re_over_grid,
    sense_gap_over_grid,
    weight_pair,
)
from .operator import multiplier_row
from .series import ANALYTIC, CO_ANALYTIC, DiskGrid, HarmonicSeries, evaluate, linear_combine

__all__ = [
    "SUITE_NAMES",
    "SuiteConfig",
    "TrialReport",
    "SuiteReport",
    "sample_in_class",
    "sufficiency_trial",
    "closure_suite",
    "run_single_trial",
    "run_suites",
    "write_reports",
    "suite_exit_code",
    "bernardi_quadrature_oracle",
    "recurrence_margin",
]

SUITE_NAMES = ("sufficiency", "convex", "convolution", "bernardi", "sense")

# Tolerances, pinned once: grid-noise slack for the analytic check,
# exact-arithmetic slack for affine identities, and the quadrature
# accuracy target with the agreement headroom over it.
SUFFICIENCY_SLACK = 1e-9
AFFINITY_TOL = 1e-12
ORACLE_AGREEMENT_TOL = 1e-12
QUADRATURE_TARGET = 1e-10
QUADRATURE_AGREEMENT_TOL = 1e-8

_BERNARDI_U_VALUES = (0.0, 1.0, 2.0)
_BERNARDI_X_VALUES = (0.25, 0.5, 0.75)
_BERNARDI_QUAD_TRIALS = 20


@dataclass(frozen=True)
class SuiteConfig:
    """Reproducible description of a verification run."""

    cp: ClassParams
    trials: int
    truncation: int
    grid: DiskGrid
    seed: int
    suites: tuple[str, ...] = SUITE_NAMES

    def __post_init__(self):
        trials = _op.index(self.trials)
        if trials < 1:
            raise DomainError(f"trials must be >= 1, got {trials}")
        n = _op.index(self.truncation)
        if n < self.cp.ell + 1:
            raise DomainError(f"truncation {n} must be >= ell + 1 = {self.cp.ell + 1}")
        seed = _op.index(self.seed)
        if not 0 <= seed < 2**64:
            raise DomainError("seed must fit in an unsigned 64-bit integer")
        suites = tuple(self.suites)
        unknown = set(suites) - set(SUITE_NAMES)
        if unknown:
            raise DomainError(f"unknown suites: {sorted(unknown)}")
        if not suites:
            raise DomainError("at least one suite must be selected")
        # canonical order, duplicates dropped
        suites = tuple(s for s in SUITE_NAMES if s in suites)
        object.__setattr__(self, "trials", trials)
        object.__setattr__(self, "truncation", n)
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "suites", suites)

    def to_dict(self) -> dict:
        return {
            "class": self.cp.to_dict(),
            "trials": self.trials,
            "truncation": self.truncation,
            "grid": self.grid.to_dict(),
            "seed": self.seed,
            "suites": list(self.suites),
        }


@dataclass(frozen=True)
class TrialReport:
    """One trial's outcome; failures always carry enough to replay them."""

    suite: str
    trial_index: int
    seed_used: int
    margin: float
    verdict: str
    min_re: float | None = None
    sense_gap_min: float | None = None
    witness_z: complex | None = None
    extra: Mapping[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "trial_index": self.trial_index,
            "seed_used": self.seed_used,
            "margin": self.margin,
            "verdict": self.verdict,
            "min_re": self.min_re,
            "sense_gap_min": self.sense_gap_min,
            "witness_z": None
            if self.witness_z is None
            else [self.witness_z.real, self.witness_z.imag],
            "extra": dict(self.extra),
        }


@dataclass(frozen=True)
class SuiteReport:
    """All trials of one suite plus the counts the exit code is read from."""

    suite: str
    config: SuiteConfig
    trials: tuple[TrialReport, ...]

    @property
    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "singular": 0}
        for t in self.trials:
            out[t.verdict] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config.to_dict(),
            "summary": self.counts,
            "trials": [t.to_dict() for t in self.trials],
        }

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n").encode()


# -- in-class sampling ---------------------------------------------------

def _default_indices(cp: ClassParams, truncation: int) -> list[tuple[str, int]]:
    ell = cp.ell
    return [(ANALYTIC, k) for k in range(ell + 1, truncation + 1)] + [
        (CO_ANALYTIC, k) for k in range(ell, truncation + 1)
    ]


def _sample_with_rng(
    cp: ClassParams,
    truncation: int,
    rng: np.random.Generator,
    budget: float | None = None,
    indices: Sequence[tuple[str, int]] | None = None,
) -> HarmonicSeries:
    if cp.degenerate:
        raise DegenerateClassError(
            f"cannot sample the degenerate class ell={cp.ell}, sigma={cp.sigma}"
        )
    truncation = _op.index(truncation)
    if truncation < cp.ell + 1:
        raise DomainError(f"truncation {truncation} must be >= ell + 1 = {cp.ell + 1}")
    idx = _default_indices(cp, truncation) if indices is None else list(indices)
    for part, k in idx:
        lo = cp.ell + 1 if part == ANALYTIC else cp.ell
        if part not in (ANALYTIC, CO_ANALYTIC) or not lo <= k <= truncation:
            raise DomainError(f"invalid sample index ({part!r}, {k})")
    if budget is None:
        beta = 1.0 - rng.random()  # in (0, 1]
    else:
        beta = float(budget)
        if not 0.0 <= beta <= 1.0:
            raise DomainError(f"budget must lie in [0, 1], got {beta}")
    if not idx or beta == 0.0:
        return HarmonicSeries.monomial(cp.ell, truncation)
    u = 1.0 - rng.random(len(idx))  # strictly positive weights
    shares = u / u.sum()
    row = multiplier_row(cp.op, truncation)
    a: dict[int, complex] = {}
    b: dict[int, complex] = {}
    for (part, k), share in zip(idx, shares):
        wa, wb = weight_pair(k, cp.sigma)
        weight = wa if part == ANALYTIC else wb
        value = beta * cp.bound * float(share) / (weight * row[k - cp.ell])
        if part == ANALYTIC:
            a[k] = a.get(k, 0j) + value
        else:
            b[k] = b.get(k, 0j) + value
    return HarmonicSeries(cp.ell, truncation, a, b)


def sample_in_class(
    cp: ClassParams,
    truncation: int,
    seed: int,
    budget: float | None = None,
    indices: Sequence[tuple[str, int]] | None = None,
) -> HarmonicSeries:
    """Draw a nonnegative-real-coefficient series with margin >= 0.

    A budget fraction beta in (0, 1] of the normalization constant is
    split across the coefficient indices by normalized positive random
    shares; each share is divided by its weight times the multiplier, so
    the margin is (1 - beta) * bound by construction.  Bit-exact
    reproducible from the seed.  ``budget`` and ``indices`` override the
    drawn fraction and the active index set (used to pin edge cases).
    """
    rng = np.random.Generator(np.random.Philox(key=_op.index(seed)))
    return _sample_with_rng(cp, truncation, rng, budget=budget, indices=indices)


# -- individual trials ----------------------------------------------------

def sufficiency_trial(
    f: HarmonicSeries,
    cp: ClassParams,
    grid: DiskGrid,
    trial_index: int = 0,
    seed_used: int | None = None,
) -> TrialReport:
    """Grid check of the analytic condition and sense preservation.

    The verdict reflects the analytic side only (min Re >= sigma minus
    grid slack, positive sense gap); the coefficient margin is reported
    alongside, since the coefficient test is one-directional.
    """
    mar = cp.bound - coefficient_sum(f, cp)
    gap_min, gap_argmin = sense_gap_over_grid(f, grid)
    seed_used = trial_index if seed_used is None else seed_used
    try:
        min_re, argmin_z = min_re_over_grid(f, cp, grid)
    except SingularRatioError as exc:
        return TrialReport(
            suite="sufficiency",
            trial_index=trial_index,
            seed_used=seed_used,
            margin=mar,
            verdict="singular",
            min_re=None,
            sense_gap_min=gap_min,
            witness_z=exc.z,
        )
    re_ok = min_re >= cp.sigma - SUFFICIENCY_SLACK
    sense_ok = gap_min > 0.0
    verdict = "pass" if (re_ok and sense_ok) else "fail"
    witness = None if verdict == "pass" else (argmin_z if not re_ok else gap_argmin)
    return TrialReport(
        suite="sufficiency",
        trial_index=trial_index,
        seed_used=seed_used,
        margin=mar,
        verdict=verdict,
        min_re=min_re,
        sense_gap_min=gap_min,
        witness_z=witness,
    )


def recurrence_margin(f: HarmonicSeries, cp: ClassParams) -> float:
    """Margin recomputed with multipliers built from the ratio recurrence.

    Independent of the primary product-form multiplier path:
    Phi_ell = [2 ell - 1]_q**t and
    Phi_{k+1} = Phi_k * ([k+ell]_q / [k+ell-1]_q)**t
                       * [delta+k]_{p,q} / [k+1-ell]_{p,q}.
    """
    op = cp.op
    q = op.pq.q
    phi = [bracket_q(2 * op.ell - 1, q) ** op.t]
    for k in range(op.ell, f.truncation):
        step = (bracket_q(k + op.ell, q) / bracket_q(k + op.ell - 1, q)) ** op.t
        step *= bracket_pq(op.delta + k, op.pq) / bracket_pq(k + 1 - op.ell, op.pq)
        phi.append(phi[-1] * step)
    total = 0.0
    for k, c in sorted(f.a.items()):
        total += weight_pair(k, cp.sigma)[0] * phi[k - op.ell] * abs(c)
    for k, c in sorted(f.b.items()):
        total += weight_pair(k, cp.sigma)[1] * phi[k - op.ell] * abs(c)
    return cp.bound - total


def _trial_rng(config: SuiteConfig, trial_index: int) -> tuple[np.random.Generator, int]:
    seed_used = config.seed + trial_index
    return np.random.Generator(np.random.Philox(key=seed_used)), seed_used


def _convex_trial(config: SuiteConfig, i: int) -> TrialReport:
    rng, seed_used = _trial_rng(config, i)
    cp = config.cp
    f1 = _sample_with_rng(cp, config.truncation, rng)
    f2 = _sample_with_rng(cp, config.truncation, rng)
    mu = float(rng.random())
    m1 = cp.bound - coefficient_sum(f1, cp)
    m2 = cp.bound - coefficient_sum(f2, cp)
    combined = linear_combine([(mu, f1), (1.0 - mu, f2)])
    m_comb = cp.bound - coefficient_sum(combined, cp)
    affine = mu * m1 + (1.0 - mu) * m2
    deviation = abs(m_comb - affine)
    ok = deviation <= AFFINITY_TOL and m_comb >= -AFFINITY_TOL
    return TrialReport(
        suite="convex",
        trial_index=i,
        seed_used=seed_used,
        margin=m_comb,
        verdict="pass" if ok else "fail",
        extra={
            "mu": mu,
            "margin_first": m1,
            "margin_second": m2,
            "affine_margin": affine,
            "deviation": deviation,
        },
    )


def _convolution_trial(config: SuiteConfig, i: int) -> TrialReport:
    rng, seed_used = _trial_rng(config, i)
    cp = config.cp
    f = _sample_with_rng(cp, config.truncation, rng)
    m = _sample_with_rng(cp, config.truncation, rng)
    product = convolve(f, m)
    primary = cp.bound - coefficient_sum(product, cp)
    oracle = recurrence_margin(product, cp)
    agreement = abs(primary - oracle)
    ok = agreement <= ORACLE_AGREEMENT_TOL
    return TrialReport(
        suite="convolution",
        trial_index=i,
        seed_used=seed_used,
        margin=primary,
        verdict="pass" if ok else "fail",
        extra={
            "margin_oracle": oracle,
            "agreement": agreement,
            "closed": bool(primary >= -AFFINITY_TOL),
            "margin_first": cp.bound - coefficient_sum(f, cp),
            "margin_second": cp.bound - coefficient_sum(m, cp),
        },
    )


def _bernardi_trial(config: SuiteConfig, i: int) -> TrialReport:
    rng, seed_used = _trial_rng(config, i)
    cp = config.cp
    f = _sample_with_rng(cp, config.truncation, rng)
    base_margin = cp.bound - coefficient_sum(f, cp)
    monotone_ok = True
    margins: dict[str, float] = {}
    worst_quad = 0.0
    quad_checked = i < _BERNARDI_QUAD_TRIALS
    for u in _BERNARDI_U_VALUES:
        transformed = bernardi(f, u)
        mu_margin = cp.bound - coefficient_sum(transformed, cp)
        margins[repr(u)] = mu_margin
        if mu_margin < base_margin - AFFINITY_TOL:
            monotone_ok = False
        if quad_checked:
            for x in _BERNARDI_X_VALUES:
                mapped = evaluate(transformed, x)
                oracle = bernardi_quadrature_oracle(f, u, x)
                err = abs(oracle - mapped) / (1.0 + abs(oracle))
                worst_quad = max(worst_quad, err)
    quad_ok = (not quad_checked) or worst_quad <= QUADRATURE_AGREEMENT_TOL
    ok = monotone_ok and quad_ok
    return TrialReport(
        suite="bernardi",
        trial_index=i,
        seed_used=seed_used,
        margin=base_margin,
        verdict="pass" if ok else "fail",
        extra={
            "margins_after": margins,
            "monotone_ok": monotone_ok,
            "quadrature_checked": quad_checked,
            "max_quadrature_relative_error": worst_quad,
        },
    )


def _sufficiency_suite_trial(config: SuiteConfig, i: int) -> TrialReport:
    rng, seed_used = _trial_rng(config, i)
    f = _sample_with_rng(config.cp, config.truncation, rng)
    return sufficiency_trial(f, config.cp, config.grid, trial_index=i, seed_used=seed_used)


def _sense_trial(config: SuiteConfig, i: int) -> TrialReport:
    rng, seed_used = _trial_rng(config, i)
    cp = config.cp
    f = _sample_with_rng(cp, config.truncation, rng)
    gap_min, gap_argmin = sense_gap_over_grid(f, config.grid)
    ok = gap_min > 0.0
    return TrialReport(
        suite="sense",
        trial_index=i,
        seed_used=seed_used,
        margin=cp.bound - coefficient_sum(f, cp),
        verdict="pass" if ok else "fail",
        sense_gap_min=gap_min,
        witness_z=None if ok else gap_argmin,
    )


_TRIAL_RUNNERS = {
    "sufficiency": _sufficiency_suite_trial,
    "convex": _convex_trial,
    "convolution": _convolution_trial,
    "bernardi": _bernardi_trial,
    "sense": _sense_trial,
}


def run_single_trial(config: SuiteConfig, suite: str, trial_index: int) -> TrialReport:
    """Replay one trial; identical to its in-batch run, bit for bit."""
    if suite not in _TRIAL_RUNNERS:
        raise DomainError(f"unknown suite {suite!r}")
    trial_index = _op.index(trial_index)
    if not 0 <= trial_index < config.trials:
        raise DomainError(f"trial index {trial_index} outside [0, {config.trials})")
    return _TRIAL_RUNNERS[suite](config, trial_index)


def closure_suite(config: SuiteConfig) -> list[TrialReport]:
    """Convex-combination and convolution trials, per config.suites."""
    out: list[TrialReport] = []
    for suite in config.suites:
        if suite in ("convex", "convolution"):
            out.extend(
                _TRIAL_RUNNERS[suite](config, i) for i in range(config.trials)
            )
    return out


def run_suites(config: SuiteConfig) -> dict[str, SuiteReport]:
    """Run every selected suite; trials are gathered in index order."""
    return {
        suite: SuiteReport(
            suite=suite,
            config=config,
            trials=tuple(_TRIAL_RUNNERS[suite](config, i) for i in range(config.trials)),
        )
        for suite in config.suites
    }


def write_reports(reports: Mapping[str, SuiteReport], outdir: str | Path) -> list[Path]:
    """Write report-<suite>-<seed>.json files; bytes are run-independent."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for suite, report in reports.items():
        path = outdir / f"report-{suite}-{report.config.seed}.json"
        path.write_bytes(report.to_json_bytes())
        paths.append(path)
    return paths


def suite_exit_code(reports: Mapping[str, SuiteReport]) -> int:
    """0 all pass, 1 any fail, 2 any singular."""
    counts = [r.counts for r in reports.values()]
    if any(c["singular"] for c in counts):
        return 2
    if any(c["fail"] for c in counts):
        return 1
    return 0


# -- quadrature oracle -----------------------------------------------------

def bernardi_quadrature_oracle(f: HarmonicSeries, u: float, x: float) -> complex:
    """Integral-transform value (u+ell)/x**u * int_0^x t**(u-1) f(t) dt.

    Evaluated by adaptive quadrature along the real segment (0, x), where
    conj(t) = t, with the power-law endpoint factor t**(u+ell-1) handled
    as an algebraic weight; the smooth remainder is f(t)/t**ell.
    Independent of the coefficient map implemented by ``bernardi``.
    """
    u = float(u)
    if not (math.isfinite(u) and u > -1.0):
        raise DomainError(f"require u > -1, got {u}")
    x = float(x)
    if not (math.isfinite(x) and 0.0 < x < 1.0):
        raise DomainError(f"require 0 < x < 1, got {x}")
    ell = f.ell
    alpha = u + ell - 1.0
    smooth = [(0, 1.0 + 0j)]
    smooth += [(k - ell, c) for k, c in sorted(f.a.items())]
    for k, c in sorted(f.b.items()):
        smooth.append((k - ell, complex(c).conjugate()))

    def g_real(t: float) -> float:
        return sum(c.real * t**n for n, c in smooth)

    def g_imag(t: float) -> float:
        return sum(c.imag * t**n for n, c in smooth)

    val_re, err_re = quad(
        g_real, 0.0, x, weight="alg", wvar=(alpha, 0.0), epsabs=1e-14, epsrel=1e-11
    )
    val_im, err_im = quad(
        g_imag, 0.0, x, weight="alg", wvar=(alpha, 0.0), epsabs=1e-14, epsrel=1e-11
    )
    prefactor = (u + ell) / x**u
    value = prefactor * complex(val_re, val_im)
    estimate = abs(prefactor) * (err_re + err_im)
    if estimate > QUADRATURE_TARGET * (1.0 + abs(value)):
        raise QuadratureError(estimate)
    return value
