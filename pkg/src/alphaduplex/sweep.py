"""Overlap-fraction sweeps and operating-point search.

A sweep evaluates both link directions on a grid of overlap fractions,
through either the closed-form path or the network simulator, and keeps
enough context (parameters, pulse pair, simulation config) to re-evaluate
off-grid points later.  That re-evaluation power is what makes the
operating-point search work: the balanced point, where uplink and downlink
throughput cross, typically lives in a sliver far narrower than any
reasonable grid step, so the search densifies around near-touches of the
two curves until it brackets a sign change and then polishes the root.

Monte Carlo sweeps are deterministic functions of the overlap fraction for
a fixed seed (geometry and fading are drawn independently of the grid), so
the same search applies, though each off-grid probe re-runs the campaign.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum, unique

import numpy as np
from scipy.optimize import brentq

from .analytic import (
    LinkMetrics,
    ber_downlink,
    ber_downlink_eta4,
    ber_uplink,
    ber_uplink_eta4,
)
from .model import Direction, SystemParams
from .montecarlo import SimConfig, run_campaign
from .pulse import (
    BandPlan,
    InterferenceFactors,
    PulsePair,
    interference_factors,
    make_pulses,
)

__all__ = [
    "SweepSource",
    "NoCrossingError",
    "ThroughputPair",
    "Crossing",
    "SweepResult",
    "OperatingPoints",
    "ComparisonRecord",
    "sweep_alpha",
    "find_operating_points",
    "compare_duplex_schemes",
]

# densification schedule for the balanced-point search
_DENSE_POINTS = 33
_MAX_DEPTH = 8
_MAX_WINDOWS = 5
_MIN_REFINE_TOL = 1e-12


@unique
class SweepSource(Enum):
    """Which evaluation path produced a sweep."""

    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"


class NoCrossingError(RuntimeError):
    """Uplink and downlink throughput never cross on the swept range."""


@dataclass(frozen=True)
class ThroughputPair:
    """Uplink/downlink throughput (or throughput deltas) at one point."""

    ul: float
    dl: float


@dataclass(frozen=True)
class Crossing:
    """One balanced crossing: equal-throughput overlap fraction."""

    alpha: float
    t_ul: float
    t_dl: float

    @property
    def total(self) -> float:
        return self.t_ul + self.t_dl


@dataclass(frozen=True)
class SweepResult:
    """Both-direction metrics over an increasing overlap-fraction grid.

    Carries the inputs needed to re-evaluate the same curves at arbitrary
    overlap fractions, which the operating-point search relies on.
    ``fixed_factors`` pins the interference factors to one value for every
    grid point (analytic source only); otherwise factors follow the pulse
    pair and band plan at each point.
    """

    rows: tuple[tuple[float, LinkMetrics, LinkMetrics], ...]
    source: SweepSource
    params: SystemParams
    pulses: PulsePair | None
    sim: SimConfig | None = None
    fixed_factors: InterferenceFactors | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.source, SweepSource):
            raise TypeError("source must be a SweepSource")
        if not self.rows:
            raise ValueError("rows must be nonempty")
        prev = -1.0
        for alpha, ul, dl in self.rows:
            if not 0.0 <= alpha <= 1.0:
                raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
            if alpha <= prev:
                raise ValueError("alphas must be strictly increasing")
            prev = alpha
            if ul.direction is not Direction.UPLINK or ul.alpha != alpha:
                raise ValueError("first metrics of each row must be uplink "
                                 "at the row's alpha")
            if dl.direction is not Direction.DOWNLINK or dl.alpha != alpha:
                raise ValueError("second metrics of each row must be "
                                 "downlink at the row's alpha")
        _check_context(self.source, self.pulses, self.sim, self.fixed_factors)

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(r[0] for r in self.rows)

    def evaluate(self, alpha: float) -> tuple[LinkMetrics, LinkMetrics]:
        """Both-direction metrics at ``alpha`` under this sweep's context."""
        return _evaluate_point(self.params, self.pulses, self.fixed_factors,
                               self.sim, self.source, float(alpha))

    def table(self) -> tuple[tuple[float, float, float, float, float], ...]:
        """Rows of (alpha, t_ul, t_dl, ber_ul, ber_dl)."""
        return tuple((alpha, ul.throughput, dl.throughput, ul.ber, dl.ber)
                     for alpha, ul, dl in self.rows)


@dataclass(frozen=True)
class OperatingPoints:
    """Balanced and unbalanced operating points with their throughputs.

    ``crossings`` lists every balanced crossing found; ``balanced_alpha``
    is the one with the largest total throughput (ties going to the larger
    overlap fraction).  ``unbalanced_alpha`` maximizes downlink throughput
    over the sweep grid subject to no uplink loss relative to zero overlap.
    """

    balanced_alpha: float
    unbalanced_alpha: float
    hd_baseline: ThroughputPair
    fd_point: ThroughputPair
    balanced: ThroughputPair
    unbalanced: ThroughputPair
    crossings: tuple[Crossing, ...]

    def __post_init__(self) -> None:
        for name in ("balanced_alpha", "unbalanced_alpha"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not self.crossings:
            raise ValueError("crossings must be nonempty")


@dataclass(frozen=True)
class ComparisonRecord:
    """Throughput of full overlap and the balanced point against none.

    Deltas are percentages relative to the zero-overlap baseline.
    """

    hd: ThroughputPair
    fd: ThroughputPair
    balanced: ThroughputPair
    balanced_alpha: float
    unbalanced_alpha: float
    fd_delta: ThroughputPair
    balanced_delta: ThroughputPair

    def lines(self) -> tuple[str, ...]:
        """Line-oriented key=value rendering of the record."""
        items = (
            ("balanced_alpha", self.balanced_alpha),
            ("unbalanced_alpha", self.unbalanced_alpha),
            ("hd_ul_bps", self.hd.ul),
            ("hd_dl_bps", self.hd.dl),
            ("fd_ul_bps", self.fd.ul),
            ("fd_dl_bps", self.fd.dl),
            ("balanced_ul_bps", self.balanced.ul),
            ("balanced_dl_bps", self.balanced.dl),
            ("fd_delta_ul_pct", self.fd_delta.ul),
            ("fd_delta_dl_pct", self.fd_delta.dl),
            ("balanced_delta_ul_pct", self.balanced_delta.ul),
            ("balanced_delta_dl_pct", self.balanced_delta.dl),
        )
        return tuple(f"{k}={v:.12g}" for k, v in items)


def _check_context(source: SweepSource, pulses: PulsePair | None,
                   sim: SimConfig | None,
                   fixed_factors: InterferenceFactors | None) -> None:
    if source is SweepSource.MONTE_CARLO:
        if sim is None:
            raise ValueError("Monte Carlo sweeps require a SimConfig")
        if fixed_factors is not None:
            raise ValueError("fixed_factors applies to the analytic source "
                             "only")
        if pulses is None:
            raise ValueError("Monte Carlo sweeps require a pulse pair")
    elif pulses is None and fixed_factors is None:
        raise ValueError("analytic sweeps need a pulse pair or "
                         "fixed_factors")


def _as_link(m) -> LinkMetrics:
    return LinkMetrics(direction=m.direction, alpha=m.alpha, ber=m.mean_ber,
                       bandwidth=m.bandwidth, throughput=m.throughput)


def _evaluate_point(params: SystemParams, pulses: PulsePair | None,
                    fixed_factors: InterferenceFactors | None,
                    sim: SimConfig | None, source: SweepSource,
                    alpha: float) -> tuple[LinkMetrics, LinkMetrics]:
    if source is SweepSource.MONTE_CARLO:
        ul, dl = run_campaign(params, sim, [alpha], pulses)
        return _as_link(ul), _as_link(dl)
    if fixed_factors is not None:
        factors = fixed_factors
    else:
        plan = BandPlan(params.b_u, params.b_d, alpha)
        factors = interference_factors(plan, *make_pulses(pulses, plan))
    if params.eta == 4.0:
        return (ber_uplink_eta4(alpha, factors, params),
                ber_downlink_eta4(alpha, factors, params))
    return (ber_uplink(alpha, factors, params),
            ber_downlink(alpha, factors, params))


def _validated_grid(grid) -> tuple[float, ...]:
    alphas = tuple(float(a) for a in np.atleast_1d(np.asarray(grid, dtype=float)))
    if not alphas:
        raise ValueError("grid must be nonempty")
    if any(not 0.0 <= a <= 1.0 for a in alphas):
        raise ValueError("grid values must lie in [0, 1]")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("grid must be strictly increasing")
    return alphas


def sweep_alpha(params: SystemParams, pulses: PulsePair | None, grid,
                source: SweepSource, *, sim: SimConfig | None = None,
                fixed_factors: InterferenceFactors | None = None,
                workers: int = 1) -> SweepResult:
    """Evaluate both directions at every grid overlap fraction.

    The analytic source computes each grid point independently and (with
    ``workers`` > 1) concurrently; results do not depend on the schedule.
    The Monte Carlo source hands the whole grid to one campaign so that
    every point shares the same realizations and fading draws.
    """
    alphas = _validated_grid(grid)
    if workers < 1:
        raise ValueError("workers must be at least 1")
    _check_context(source, pulses, sim, fixed_factors)

    if source is SweepSource.MONTE_CARLO:
        metrics = run_campaign(params, sim, list(alphas), pulses)
        rows = [(alpha, _as_link(metrics[2 * i]), _as_link(metrics[2 * i + 1]))
                for i, alpha in enumerate(alphas)]
    else:
        def at(alpha: float):
            return _evaluate_point(params, pulses, fixed_factors, None,
                                   source, alpha)

        if workers == 1:
            pairs = [at(a) for a in alphas]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                pairs = list(pool.map(at, alphas))
        rows = [(a, ul, dl) for a, (ul, dl) in zip(alphas, pairs)]

    return SweepResult(rows=tuple(rows), source=source, params=params,
                       pulses=pulses, sim=sim, fixed_factors=fixed_factors)


class _CachedCurves:
    """Memoized re-evaluation of a sweep's throughput curves."""

    def __init__(self, sr: SweepResult, refine_tol: float) -> None:
        self._sr = sr
        self._tol = refine_tol
        self._cache = {alpha: (ul, dl) for alpha, ul, dl in sr.rows}

    def point(self, alpha: float) -> tuple[LinkMetrics, LinkMetrics]:
        alpha = float(alpha)
        if alpha not in self._cache:
            self._cache[alpha] = self._sr.evaluate(alpha)
        return self._cache[alpha]

    def gap(self, alpha: float) -> float:
        ul, dl = self.point(alpha)
        return ul.throughput - dl.throughput

    def balanced_at(self, alpha: float) -> bool:
        ul, dl = self.point(alpha)
        return (abs(ul.throughput - dl.throughput)
                <= self._tol * max(ul.throughput, dl.throughput))


def _scan(curves: _CachedCurves, xs) -> tuple[list, list]:
    """Split a grid into balanced points and strict sign-change brackets.

    A maximal run of grid points already within the balance tolerance
    collapses to its largest member (the documented tie-break for flat
    balanced stretches); sign changes between strictly unbalanced
    neighbors become brackets for root polishing.
    """
    xs = list(xs)
    gaps = [curves.gap(x) for x in xs]
    ok = [curves.balanced_at(x) for x in xs]
    roots, brackets = [], []
    i = 0
    while i < len(xs):
        if ok[i]:
            while i + 1 < len(xs) and ok[i + 1]:
                i += 1
            roots.append(xs[i])
        i += 1
    for i in range(len(xs) - 1):
        if not ok[i] and not ok[i + 1] and (gaps[i] > 0.0) != (gaps[i + 1] > 0.0):
            brackets.append((xs[i], xs[i + 1]))
    return roots, brackets


def _refine_window(curves: _CachedCurves, lo: float, hi: float,
                   prev_min: float, depth: int) -> tuple[list, list]:
    """Chase a near-touch of the curves down to a root or a resolved dip."""
    if depth >= _MAX_DEPTH or not hi - lo > 1e-12:
        return [], []
    xs = np.linspace(lo, hi, _DENSE_POINTS)
    roots, brackets = _scan(curves, xs)
    if roots or brackets:
        return roots, brackets
    absd = [abs(curves.gap(x)) for x in xs]
    k = int(np.argmin(absd))
    if absd[k] >= 0.9 * prev_min:
        return [], []  # dip resolved without reaching zero
    lo2 = xs[max(0, k - 1)]
    hi2 = xs[min(len(xs) - 1, k + 1)]
    return _refine_window(curves, lo2, hi2, absd[k], depth + 1)


def _local_minima_windows(curves: _CachedCurves,
                          alphas: tuple[float, ...]) -> list[tuple[float, float, float]]:
    absd = [abs(curves.gap(a)) for a in alphas]
    n = len(alphas)
    windows = []
    for i in range(n):
        left = absd[i - 1] if i > 0 else math.inf
        right = absd[i + 1] if i < n - 1 else math.inf
        if absd[i] <= left and absd[i] <= right:
            windows.append((absd[i], alphas[max(0, i - 1)],
                            alphas[min(n - 1, i + 1)]))
    windows.sort(key=lambda w: w[0])
    return windows[:_MAX_WINDOWS]


def _balanced_crossings(curves: _CachedCurves,
                        alphas: tuple[float, ...]) -> list[Crossing]:
    roots, brackets = _scan(curves, alphas)
    if not roots and not brackets:
        # near-touches hide between grid points; densify around each local
        # minimum of the throughput gap until a sign change appears
        for d_min, lo, hi in _local_minima_windows(curves, alphas):
            r, b = _refine_window(curves, lo, hi, d_min, 0)
            roots.extend(r)
            brackets.extend(b)
    for lo, hi in brackets:
        root = float(brentq(curves.gap, lo, hi, xtol=1e-13))
        if not curves.balanced_at(root):
            raise RuntimeError("crossing refinement stalled above the "
                               "requested balance tolerance")
        roots.append(root)
    roots.sort()
    return [Crossing(alpha=r, t_ul=curves.point(r)[0].throughput,
                     t_dl=curves.point(r)[1].throughput)
            for r in _dedupe(roots)]


def _dedupe(sorted_roots: list[float]) -> list[float]:
    out: list[float] = []
    for r in sorted_roots:
        if not out or r - out[-1] > 1e-10:
            out.append(r)
    return out


def find_operating_points(sr: SweepResult,
                          refine_tol: float = 1e-9) -> OperatingPoints:
    """Locate the balanced and unbalanced overlap fractions of a sweep.

    The balanced point is a root of t_ul(alpha) - t_dl(alpha), bracketed
    on (a densification of) the sweep grid and polished until
    |t_ul - t_dl| <= refine_tol * max(t_ul, t_dl); with several crossings
    the one with the largest total throughput wins and all are reported.
    The unbalanced point maximizes downlink throughput over the grid
    subject to t_ul(alpha) >= t_ul(0) (tiny relative slack); if no grid
    point qualifies it falls back to zero overlap.

    Raises NoCrossingError when the throughput gap keeps one sign over the
    swept range.  Monte Carlo sweeps are searchable too (fixed seed makes
    the curves deterministic and continuous in alpha), but every off-grid
    probe re-runs the campaign.
    """
    if not _MIN_REFINE_TOL <= refine_tol < 1.0:
        raise ValueError(f"refine_tol must lie in [{_MIN_REFINE_TOL}, 1)")
    curves = _CachedCurves(sr, refine_tol)
    alphas = sr.alphas

    crossings = _balanced_crossings(curves, alphas)
    if not crossings:
        raise NoCrossingError("uplink and downlink throughput do not cross "
                              "on the swept overlap range")
    best = max(crossings, key=lambda c: (c.total, c.alpha))

    hd_ul, hd_dl = curves.point(0.0)
    fd_ul, fd_dl = curves.point(1.0)
    t_ul0 = hd_ul.throughput
    feasible = [(alpha, ul, dl) for alpha, ul, dl in sr.rows
                if ul.throughput >= t_ul0 * (1.0 - 1e-9)]
    if feasible:
        ub_alpha, ub_ul, ub_dl = max(feasible,
                                     key=lambda r: (r[2].throughput, r[0]))
    else:
        ub_alpha, (ub_ul, ub_dl) = 0.0, curves.point(0.0)

    return OperatingPoints(
        balanced_alpha=best.alpha,
        unbalanced_alpha=ub_alpha,
        hd_baseline=ThroughputPair(ul=t_ul0, dl=hd_dl.throughput),
        fd_point=ThroughputPair(ul=fd_ul.throughput, dl=fd_dl.throughput),
        balanced=ThroughputPair(ul=best.t_ul, dl=best.t_dl),
        unbalanced=ThroughputPair(ul=ub_ul.throughput, dl=ub_dl.throughput),
        crossings=tuple(crossings),
    )


def _pct(new: float, base: float) -> float:
    if base == 0.0:
        if new == 0.0:
            return 0.0
        return math.copysign(math.inf, new)
    return 100.0 * (new - base) / base


def compare_duplex_schemes(sr: SweepResult,
                           points: OperatingPoints) -> ComparisonRecord:
    """Percentage throughput deltas of full overlap and the balanced point.

    Both are measured against the zero-overlap baseline, per direction.
    The sweep is consulted to confirm the points belong to it.
    """
    for alpha, ul, dl in sr.rows:
        if alpha == 0.0 and (ul.throughput != points.hd_baseline.ul
                             or dl.throughput != points.hd_baseline.dl):
            raise ValueError("operating points disagree with the sweep at "
                             "alpha=0")
        if alpha == 1.0 and (ul.throughput != points.fd_point.ul
                             or dl.throughput != points.fd_point.dl):
            raise ValueError("operating points disagree with the sweep at "
                             "alpha=1")
    hd, fd, bal = points.hd_baseline, points.fd_point, points.balanced
    return ComparisonRecord(
        hd=hd, fd=fd, balanced=bal,
        balanced_alpha=points.balanced_alpha,
        unbalanced_alpha=points.unbalanced_alpha,
        fd_delta=ThroughputPair(ul=_pct(fd.ul, hd.ul),
                                dl=_pct(fd.dl, hd.dl)),
        balanced_delta=ThroughputPair(ul=_pct(bal.ul, hd.ul),
                                      dl=_pct(bal.dl, hd.dl)),
    )
