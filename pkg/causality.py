#!/usr/bin/env python3
"""
Light-cone support of the massless commutator kernel.

After the angular integration the covariant commutator reduces to

    Delta(r, t) = (-8 pi i / (c r)) * lim_{eps -> 0} I(eps, r, ct)
    I(eps, r, ct) = int_0^inf e^{-eps k} sin(k r) sin(k ct) dk

which has the closed form 1/2 [eps/(eps^2 + (r-ct)^2) - eps/(eps^2 + (r+ct)^2)].
This module evaluates I both ways and scans (r, ct, eps) grids to show it
vanishes off the light cone as eps -> 0.
"""

import csv
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from tqdm import tqdm

from errors import ResolutionError

logger = logging.getLogger(__name__)

MIN_DECAY = 20.0
MIN_POINTS_PER_PERIOD = 10
DEFAULT_POINTS_PER_PERIOD = 128
SCAN_DECAY = 30.0

RELATIVE_TOLERANCE = 1e-6
ABSOLUTE_TOLERANCE = 1e-9
SLOPE_TOLERANCE = 0.10
ON_CONE_TOLERANCE = 0.05

SCAN_COLUMNS = ["r", "ct", "epsilon", "closed_form", "quadrature", "classification"]


@dataclass(frozen=True)
class SeparationPoint:
    r: float
    ct: float
    epsilon: float

    def __post_init__(self):
        if not (np.isfinite(self.r) and np.isfinite(self.ct) and np.isfinite(self.epsilon)):
            raise ValueError(f"Separation must be finite: {self}")
        if self.r <= 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


def regulated_kernel(p: SeparationPoint) -> float:
    """Closed-form I; odd in ct, exactly 0 at ct = 0"""
    if p.ct == 0:
        return 0.0
    eps2 = p.epsilon ** 2
    return 0.5 * (p.epsilon / (eps2 + (p.r - p.ct) ** 2) - p.epsilon / (eps2 + (p.r + p.ct) ** 2))


def _periods(p: SeparationPoint, k_max: float) -> float:
    # sin(kr) sin(k ct) oscillates no faster than cos(k (r + |ct|))
    return k_max * (p.r + abs(p.ct)) / (2 * np.pi)


def default_points(p: SeparationPoint, k_max: float, points_per_period: int = DEFAULT_POINTS_PER_PERIOD) -> int:
    n = int(np.ceil(points_per_period * _periods(p, k_max))) + 1
    return n if n % 2 else n + 1


def kernel_quadrature(p: SeparationPoint, k_max: Optional[float] = None, n_points: Optional[int] = None) -> float:
    """Composite Simpson quadrature of the damped integrand on [0, k_max].

    k_max defaults to 20/eps; n_points defaults to 128 points per period of the
    fastest oscillation, rounded up to an odd count.
    """
    if k_max is None:
        k_max = MIN_DECAY / p.epsilon
    if p.epsilon * k_max < MIN_DECAY * (1 - 1e-12):
        raise ResolutionError(
            f"k_max = {k_max:g} cuts the integrand off at e^-{p.epsilon * k_max:.3g}; need k_max >= {MIN_DECAY}/eps")
    if n_points is None:
        n_points = default_points(p, k_max)
    periods = _periods(p, k_max)
    if n_points < MIN_POINTS_PER_PERIOD * periods:
        raise ResolutionError(
            f"{n_points} points over {periods:.1f} periods is below "
            f"{MIN_POINTS_PER_PERIOD} points per period (need {int(np.ceil(MIN_POINTS_PER_PERIOD * periods))})")

    k = np.linspace(0.0, k_max, n_points)
    integrand = np.exp(-p.epsilon * k) * np.sin(k * p.r) * np.sin(k * p.ct)
    return float(simpson(integrand, x=k))


def agrees(closed_form: float, quadrature: float) -> bool:
    return abs(closed_form - quadrature) <= max(RELATIVE_TOLERANCE * abs(closed_form), ABSOLUTE_TOLERANCE)


def classify(r: float, ct: float, delta: float) -> str:
    if r > abs(ct) + delta:
        return "spacelike"
    if abs(ct) > r + delta:
        return "timelike"
    return "lightcone"


def off_cone_slope(r: float, ct: float) -> float:
    """lim I/eps for r != |ct|"""
    return 0.5 * abs(1.0 / (r - ct) ** 2 - 1.0 / (r + ct) ** 2)


@dataclass(frozen=True)
class ScanRow:
    r: float
    ct: float
    epsilon: float
    closed_form: float
    quadrature: float
    classification: str

    @property
    def agrees(self) -> bool:
        return agrees(self.closed_form, self.quadrature)


@dataclass(frozen=True)
class PointSummary:
    r: float
    ct: float
    classification: str
    fitted_slope: Optional[float]
    analytic_slope: Optional[float]
    on_cone_limit: Optional[float]
    quadrature_agrees: bool
    passed: bool


@dataclass
class ScanResult:
    rows: List[ScanRow]
    summaries: List[PointSummary]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.summaries)


def _summarize(r: float, ct: float, classification: str, rows: Sequence[ScanRow]) -> PointSummary:
    quadrature_ok = all(row.agrees for row in rows)
    eps = np.array([row.epsilon for row in rows])
    values = np.array([row.closed_form for row in rows])

    if classification != "lightcone":
        fitted = float(np.sum(np.abs(values) * eps) / np.sum(eps ** 2))
        analytic = off_cone_slope(r, ct)
        slope_ok = abs(fitted - analytic) <= SLOPE_TOLERANCE * analytic if analytic > 0 else fitted <= ABSOLUTE_TOLERANCE
        return PointSummary(r, ct, classification, fitted, analytic, None, quadrature_ok, quadrature_ok and slope_ok)

    if np.isclose(r, abs(ct), rtol=0, atol=1e-12):
        smallest = int(np.argmin(eps))
        limit = float(2 * eps[smallest] * values[smallest])
        cone_ok = abs(abs(limit) - 1.0) <= ON_CONE_TOLERANCE
        return PointSummary(r, ct, classification, None, None, limit, quadrature_ok, quadrature_ok and cone_ok)

    # inside the band but off the cone: no limit is asserted at these eps
    return PointSummary(r, ct, classification, None, None, None, quadrature_ok, quadrature_ok)


def lightcone_scan(r_grid: Iterable[float], ct_grid: Iterable[float], epsilons: Sequence[float],
                   points_per_period: int = DEFAULT_POINTS_PER_PERIOD, quiet: bool = False) -> ScanResult:
    """Closed form vs quadrature over the grid, plus eps -> 0 limits per (r, ct).

    Off-cone points (|r - |ct|| > 10 max eps) must show |I| ~ C eps with the
    fitted C within 10% of the analytic slope; exact on-cone points must have
    |2 eps I| within 5% of 1 at the smallest eps.
    """
    epsilons = [float(e) for e in epsilons]
    if not epsilons or any(e <= 0 for e in epsilons):
        raise ValueError(f"epsilons must be positive, got {epsilons}")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError(f"epsilons must be strictly decreasing, got {epsilons}")

    delta = 10 * max(epsilons)
    points = [(float(r), float(ct)) for r in r_grid for ct in ct_grid]
    rows: List[ScanRow] = []
    summaries: List[PointSummary] = []

    for r, ct in tqdm(points, desc="Light-cone scan", disable=quiet):
        classification = classify(r, ct, delta)
        point_rows = []
        for eps in epsilons:
            p = SeparationPoint(r, ct, eps)
            k_max = SCAN_DECAY / eps
            quad = kernel_quadrature(p, k_max, default_points(p, k_max, points_per_period))
            point_rows.append(ScanRow(r, ct, eps, regulated_kernel(p), quad, classification))
        rows.extend(point_rows)
        summary = _summarize(r, ct, classification, point_rows)
        if not summary.passed:
            logger.warning(f"Scan point r={r}, ct={ct} ({classification}) failed: {summary}")
        summaries.append(summary)

    passed = sum(s.passed for s in summaries)
    logger.info(f"Light-cone scan: {passed}/{len(summaries)} points passed, delta = {delta:g}")
    return ScanResult(rows, summaries)


def write_scan_csv(rows: Iterable[ScanRow], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SCAN_COLUMNS)
        writer.writeheader()
        for row in rows:
            record = asdict(row)
            record["closed_form"] = repr(row.closed_form)
            record["quadrature"] = repr(row.quadrature)
            writer.writerow(record)
    logger.info(f"Wrote scan table to {path}")
    return path
