"""Transport around a circular town: angular cost and peaked densities.

Grid points sit at equally spaced angles; the cost of moving between two of
them is one minus the cosine of the angle between.  Column differences of
this cost are pure sinusoids in the row angle, so each has a single maximum
and a single minimum around the circle.  That is the discrete shape of the
condition under which optimizers concentrate on at most two limbs, and the
demo verifies the whole chain on solved instances: subtwist shape of the
cost, extremality of the optimizer, and a two-limb split of its support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import LimbsysError
from .extremality import ExtremalityCertificate, is_extremal, support_graph
from .limbs import two_limb_check
from .measures import DEFAULT_TOL, CostMatrix, DiscreteMarginal, ToleranceConfig
from .transport import SolveReport, solve

__all__ = [
    "CircleGrid",
    "DemoConfig",
    "DemoReport",
    "SubtwistReport",
    "build_circle_cost",
    "build_peaked_density",
    "subtwist_check",
    "demo_instance",
    "rational_demo_instance",
    "run_demo",
    "support_rows",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CircleGrid:
    """n equally spaced angles on the circle, starting at 0."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("a circle grid needs at least 3 points")

    @property
    def angles(self) -> tuple:
        return tuple(TWO_PI * i / self.n for i in range(self.n))


@dataclass(frozen=True)
class DemoConfig:
    """Grid size, the two density peaks, and tolerances for the demo run.

    Defaults put the first peak at the top of the circle and the second at
    the bottom, sharp enough that some mass has to cross town.
    """

    n: int = 64
    mu_center: float = math.pi / 2
    mu_kappa: float = 4.0
    nu_center: float = 3 * math.pi / 2
    nu_kappa: float = 4.0
    tol: ToleranceConfig = DEFAULT_TOL

    def __post_init__(self):
        if self.mu_kappa < 0 or self.nu_kappa < 0:
            raise ValueError("concentrations must be nonnegative")
        if not (0 <= self.mu_center < TWO_PI and 0 <= self.nu_center < TWO_PI):
            raise ValueError("peak centers must lie in [0, 2*pi)")


@dataclass(frozen=True)
class SubtwistReport:
    """Verdict of the column-pair sign-change scan.

    ``violations`` lists column pairs whose difference has the wrong number
    of sign changes; ``degenerate`` lists pairs with a constant difference,
    which are flagged but do not fail the check on their own.
    """

    passed: bool
    violations: tuple
    degenerate: tuple


@dataclass(frozen=True)
class DemoReport:
    config: DemoConfig
    solve_report: SolveReport
    certificate: ExtremalityCertificate
    two_limb: Optional[tuple]
    cross_mass: Optional[object]


def build_circle_cost(grid: CircleGrid) -> CostMatrix:
    """c[i][j] = 1 - cos(angle_i - angle_j): symmetric, zero on the diagonal,
    maximal (2) between antipodal points."""
    angles = grid.angles
    return CostMatrix(
        tuple(
            tuple(1.0 - math.cos(angles[i] - angles[j]) for j in range(grid.n))
            for i in range(grid.n)
        )
    )


def build_peaked_density(grid: CircleGrid, center: float, kappa: float) -> DiscreteMarginal:
    """Smooth, everywhere-positive density peaked at ``center``:
    weights proportional to exp(kappa * cos(angle - center)), total mass 1.
    kappa = 0 gives the uniform density."""
    if kappa < 0:
        raise ValueError("concentration must be nonnegative")
    raw = [math.exp(kappa * math.cos(a - center)) for a in grid.angles]
    total = sum(raw)
    return DiscreteMarginal(tuple(w / total for w in raw))


def _cyclic_sign_changes(diffs, zero_tol):
    signs = [1 if d > zero_tol else -1 for d in diffs if abs(d) > zero_tol]
    if not signs:
        return None
    return sum(1 for a, b in zip(signs, signs[1:] + signs[:1]) if a != b)


def _line_sign_changes(diffs, zero_tol):
    signs = [1 if d > zero_tol else -1 for d in diffs if abs(d) > zero_tol]
    if not signs:
        return None
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def subtwist_check(
    c: CostMatrix,
    periodic: bool = True,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> SubtwistReport:
    """Scan every column pair for the one-max-one-min difference shape.

    For columns j1 != j2 the sequence d_i = c[i][j1] - c[i][j2] is examined
    through the signs of its consecutive differences, zeros skipped so that
    plateaus merge.  Around the circle a pass means exactly two sign changes
    (one rising arc, one falling arc); on a line it means at most two.
    Differences within ``eps_cost`` of zero count as zero for float data;
    exact data is compared exactly.
    """
    m, n = c.m, c.n
    exact = not any(isinstance(v, float) for row in c.rows for v in row)
    zero_tol = 0 if exact else tol.eps_cost
    count = _cyclic_sign_changes if periodic else _line_sign_changes

    violations = []
    degenerate = []
    if exact:
        cols = [[c.rows[i][j] for i in range(m)] for j in range(n)]
        for j1 in range(n):
            for j2 in range(j1 + 1, n):
                d = [a - b for a, b in zip(cols[j1], cols[j2])]
                if periodic:
                    diffs = [d[(i + 1) % m] - d[i] for i in range(m)]
                else:
                    diffs = [d[i + 1] - d[i] for i in range(m - 1)]
                changes = count(diffs, zero_tol)
                if changes is None:
                    degenerate.append((j1, j2))
                elif (periodic and changes != 2) or (not periodic and changes > 2):
                    violations.append((j1, j2))
    else:
        arr = np.asarray(c.rows, dtype=float)
        for j1 in range(n):
            d_all = arr[:, j1][:, None] - arr[:, j1 + 1 :]
            if periodic:
                diffs_all = np.roll(d_all, -1, axis=0) - d_all
            else:
                diffs_all = d_all[1:] - d_all[:-1]
            for offset in range(d_all.shape[1]):
                j2 = j1 + 1 + offset
                diffs = diffs_all[:, offset]
                live = diffs[np.abs(diffs) > zero_tol]
                if live.size == 0:
                    degenerate.append((j1, j2))
                    continue
                signs = np.sign(live)
                if periodic:
                    changes = int(np.count_nonzero(signs != np.roll(signs, -1)))
                else:
                    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
                if (periodic and changes != 2) or (not periodic and changes > 2):
                    violations.append((j1, j2))

    return SubtwistReport(not violations, tuple(violations), tuple(degenerate))


def demo_instance(cfg: DemoConfig):
    """Grid, densities, and cost for a demo configuration."""
    grid = CircleGrid(cfg.n)
    cost = build_circle_cost(grid)
    mu = build_peaked_density(grid, cfg.mu_center, cfg.mu_kappa)
    nu = build_peaked_density(grid, cfg.nu_center, cfg.nu_kappa)
    return grid, mu, nu, cost


def rational_demo_instance(cfg: DemoConfig, denominator: int = 10**6):
    """Demo data snapped to exact rationals with the given denominator.

    Density totals are re-balanced exactly after snapping, so the instance
    is feasible in exact arithmetic and solver results can be compared
    against the enumeration oracle with no tolerance at all.
    """
    _, mu, nu, cost = demo_instance(cfg)

    def snap(x):
        return Fraction(round(x * denominator), denominator)

    mu_w = [snap(w) for w in mu.weights]
    nu_w = [snap(w) for w in nu.weights]
    gap = sum(mu_w) - sum(nu_w)
    nu_w[0] += gap
    if nu_w[0] <= 0:
        raise LimbsysError("snapping denominator too coarse to keep densities positive")
    rows = tuple(tuple(snap(v) for v in row) for row in cost.rows)
    return DiscreteMarginal(tuple(mu_w)), DiscreteMarginal(tuple(nu_w)), CostMatrix(rows)


def run_demo(cfg: DemoConfig) -> DemoReport:
    """Full demo pipeline: check the cost shape, solve, certify.

    The cost must pass the subtwist scan and the optimizer must be extremal;
    both hold by construction and failures raise.  The two-limb split of the
    optimal support is attempted and reported; if no split exists at this
    grid size, the report carries None rather than failing, since only the
    continuum problem guarantees two limbs.
    """
    _, mu, nu, cost = demo_instance(cfg)
    shape = subtwist_check(cost, periodic=True, tol=cfg.tol)
    if not shape.passed:
        raise LimbsysError(
            f"circle cost failed the subtwist scan at pairs {shape.violations[:3]}"
        )
    report = solve(mu, nu, cost, cfg.tol)
    certificate = is_extremal(report.coupling, cfg.tol)
    if not certificate.extremal:
        raise AssertionError("a basic solution has forest support and must be extremal")
    maps = two_limb_check(support_graph(report.coupling, cfg.tol))
    cross = None
    if maps is not None:
        f2 = maps[1]
        antigraph_cells = {(f2[j], j) for j in range(cfg.n) if f2[j] is not None}
        cross = sum(w for i, j, w in report.coupling.entries if (i, j) in antigraph_cells)
    return DemoReport(cfg, report, certificate, maps, cross)


def support_rows(report: DemoReport) -> list:
    """Plot-ready support: (theta, phi, mass, limb_kind) per occupied cell."""
    angles = CircleGrid(report.config.n).angles
    kind_of = {}
    if report.two_limb is not None:
        f1, f2 = report.two_limb
        for i, j in enumerate(f1):
            if j is not None:
                kind_of[(i, j)] = "graph"
        for j, i in enumerate(f2):
            if i is not None:
                kind_of[(i, j)] = "antigraph"
    return [
        (angles[i], angles[j], w, kind_of.get((i, j), "unsplit"))
        for i, j, w in report.solve_report.coupling.entries
    ]
