"""Circle cost construction, subtwist scanning, and the demo pipeline."""

import math
from fractions import Fraction as F

import pytest

from limbsys import (
    CircleGrid,
    CostMatrix,
    Coupling,
    DemoConfig,
    build_circle_cost,
    build_peaked_density,
    decompose,
    limb_count,
    rational_demo_instance,
    run_demo,
    subtwist_check,
    support_graph,
    support_rows,
)


def double_frequency_cost(n):
    angles = CircleGrid(n).angles
    return CostMatrix(
        tuple(
            tuple(1.0 - math.cos(2.0 * (angles[i] - angles[j])) for j in range(n))
            for i in range(n)
        )
    )


class TestCircleCost:
    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            CircleGrid(2)

    def test_zero_diagonal(self):
        c = build_circle_cost(CircleGrid(5))
        assert all(c.at(i, i) == 0 for i in range(5))

    def test_antipodal_pairs_cost_two(self):
        c = build_circle_cost(CircleGrid(8))
        for i in range(8):
            assert c.at(i, (i + 4) % 8) == pytest.approx(2.0, abs=1e-12)

    def test_quarter_turn_on_four_points(self):
        assert build_circle_cost(CircleGrid(4)).at(0, 1) == pytest.approx(1.0, abs=1e-12)

    def test_range_and_symmetry(self):
        c = build_circle_cost(CircleGrid(12))
        for i in range(12):
            for j in range(12):
                assert -1e-12 <= c.at(i, j) <= 2 + 1e-12
                assert abs(c.at(i, j) - c.at(j, i)) <= 1e-12

    def test_translation_invariance(self):
        n = 12
        c = build_circle_cost(CircleGrid(n))
        for k in (1, 5):
            for i in range(n):
                for j in range(n):
                    assert abs(c.at(i, j) - c.at((i + k) % n, (j + k) % n)) <= 1e-12


class TestPeakedDensity:
    def test_zero_concentration_is_uniform(self):
        mu = build_peaked_density(CircleGrid(5), 1.0, 0.0)
        assert mu.weights == (0.2,) * 5

    def test_peak_sits_nearest_the_center(self):
        grid = CircleGrid(16)
        center = 2.3
        mu = build_peaked_density(grid, center, 4.0)
        best = max(range(16), key=lambda i: mu.weights[i])
        nearest = min(range(16), key=lambda i: abs(grid.angles[i] - center))
        assert best == nearest

    def test_explicit_four_point_values(self):
        mu = build_peaked_density(CircleGrid(4), 0.0, 1.0)
        raw = (math.e, 1.0, 1.0 / math.e, 1.0)
        total = sum(raw)
        for got, want in zip(mu.weights, raw):
            assert got == pytest.approx(want / total, rel=1e-12)
        assert sum(mu.weights) == pytest.approx(1.0, abs=1e-12)

    def test_strictly_positive(self):
        mu = build_peaked_density(CircleGrid(64), 0.0, 8.0)
        assert all(w > 0 for w in mu.weights)


class TestSubtwist:
    def test_circle_cost_passes(self):
        for n in (3, 8, 16, 64):
            report = subtwist_check(build_circle_cost(CircleGrid(n)))
            assert report.passed, (n, report.violations[:3])

    def test_double_frequency_fails_from_five_points(self):
        for n in (5, 6, 7, 9, 12, 16, 33):
            report = subtwist_check(double_frequency_cost(n))
            assert not report.passed
            assert len(report.violations) >= 1

    def test_constant_difference_columns_flagged_degenerate(self):
        c = CostMatrix(tuple((0.0, 1.0, 3.0) for _ in range(4)))
        report = subtwist_check(c)
        assert report.passed
        assert set(report.degenerate) == {(0, 1), (0, 2), (1, 2)}

    def test_gauge_invariance_per_column(self):
        c = double_frequency_cost(9)
        shifted = CostMatrix(tuple(tuple(v + 0.7 * j for j, v in enumerate(row)) for row in c.rows))
        assert subtwist_check(c).violations == subtwist_check(shifted).violations

    def test_cyclic_row_relabeling_invariance(self):
        for build in (build_circle_cost(CircleGrid(10)), double_frequency_cost(10)):
            rolled = CostMatrix(tuple(build.rows[(i + 3) % 10] for i in range(10)))
            assert subtwist_check(build).passed == subtwist_check(rolled).passed

    def test_line_mode_accepts_monotone_and_rejects_waves(self):
        ramp = CostMatrix(tuple((float(i), 0.0) for i in range(6)))
        assert subtwist_check(ramp, periodic=False).passed
        wave = CostMatrix(tuple((float(i % 2), 0.0) for i in range(6)))
        assert not subtwist_check(wave, periodic=False).passed

    def test_exact_rational_path(self):
        c = CostMatrix(
            tuple(tuple(F((i * j) % 5, 3) for j in range(4)) for i in range(4))
        )
        report = subtwist_check(c)
        assert isinstance(report.passed, bool)


class TestDemo:
    def test_identical_marginals_stay_home(self):
        cfg = DemoConfig(n=16, mu_center=1.0, mu_kappa=3.0, nu_center=1.0, nu_kappa=3.0)
        report = run_demo(cfg)
        coupling = report.solve_report.coupling
        assert coupling.cells() == {(i, i) for i in range(16)}
        assert report.solve_report.primal_value == 0
        assert report.two_limb is not None
        assert report.cross_mass == 0
        assert limb_count(decompose(support_graph(coupling))) == 1

    def test_uniform_marginals_cost_zero(self):
        report = run_demo(DemoConfig(n=12, mu_kappa=0.0, nu_kappa=0.0))
        assert report.solve_report.primal_value == 0
        assert report.solve_report.coupling.cells() == {(i, i) for i in range(12)}

    def test_opposed_peaks_cross_town(self):
        report = run_demo(DemoConfig(n=24))
        assert report.certificate.extremal
        assert report.two_limb is not None
        assert report.cross_mass > 0

    def test_demo_two_limb_maps_form_a_valid_system(self):
        from limbsys import system_from_two_limbs, system_support, validate_system

        report = run_demo(DemoConfig(n=16))
        assert report.two_limb is not None
        system = system_from_two_limbs(16, 16, *report.two_limb)
        assert validate_system(system)
        assert system_support(system).edges == report.solve_report.coupling.cells()

    def test_support_rows_cover_and_label(self):
        report = run_demo(DemoConfig(n=16))
        rows = support_rows(report)
        assert len(rows) == len(report.solve_report.coupling.entries)
        kinds = {kind for _, _, _, kind in rows}
        assert kinds <= {"graph", "antigraph", "unsplit"}
        angles = CircleGrid(16).angles
        assert all(theta in angles and phi in angles for theta, phi, _, _ in rows)

    def test_rational_snapping_balances_exactly(self):
        mu, nu, cost = rational_demo_instance(DemoConfig(n=8))
        assert mu.total() == nu.total()
        assert all(isinstance(w, F) and w > 0 for w in mu.weights + nu.weights)
        assert all(isinstance(v, F) for row in cost.rows for v in row)
