"""Limb systems: validation, decomposition, reconstruction, two-limb splits."""

import itertools
import random
from fractions import Fraction as F

import pytest

from limbsys import (
    Coupling,
    CyclicSupportError,
    DiscreteMarginal,
    InvalidSystemError,
    Limb,
    NumberedLimbSystem,
    SupportGraph,
    decompose,
    limb_count,
    marginals_of,
    reconstruct,
    support_graph,
    system_from_two_limbs,
    system_support,
    system_violations,
    two_limb_check,
    validate_system,
)

import oracles


def path_system():
    """The two-point path support as three limbs, one map entry each."""
    return NumberedLimbSystem(
        2,
        2,
        (
            Limb(1, "graph", ((0, 0),)),
            Limb(2, "antigraph", ((1, 0),)),
            Limb(3, "graph", ((1, 1),)),
        ),
        (1, 3),
        (0, 2),
    )


class TestLimbType:
    def test_parity_enforced(self):
        with pytest.raises(ValueError, match="parity"):
            Limb(2, "graph", ((0, 0),))

    def test_single_valuedness(self):
        with pytest.raises(ValueError, match="single-valued"):
            Limb(1, "graph", ((0, 0), (0, 1)))

    def test_level_parity_enforced(self):
        with pytest.raises(ValueError, match="odd"):
            NumberedLimbSystem(1, 1, (), (2,), (0,))


class TestValidateSystem:
    def test_single_total_limb(self):
        system = NumberedLimbSystem(2, 2, (Limb(1, "graph", ((0, 1), (1, 0))),), (1, 1), (0, 0))
        assert validate_system(system)

    def test_range_outside_previous_index_set(self):
        bad = NumberedLimbSystem(1, 1, (Limb(1, "graph", ((0, 0),)),), (1,), (2,))
        assert not validate_system(bad)
        assert any("I_2" in v for v in system_violations(bad))

    def test_overlapping_limb_supports(self):
        bad = NumberedLimbSystem(
            2,
            2,
            (Limb(1, "graph", ((0, 0),)), Limb(2, "antigraph", ((0, 0),))),
            (1, 1),
            (2, 0),
        )
        assert any("disjoint" in v for v in system_violations(bad))

    def test_path_system_is_valid(self):
        assert validate_system(path_system())

    def test_demo_style_two_limb_system(self):
        system = system_from_two_limbs(3, 3, (0, 0, 2), (None, 0, None))
        assert validate_system(system)


class TestDecompose:
    def test_diagonal_single_limb(self):
        system = decompose(SupportGraph(3, 3, frozenset((i, i) for i in range(3))))
        assert len(system.limbs) == 1
        assert system.limbs[0] == Limb(1, "graph", ((0, 0), (1, 1), (2, 2)))
        assert system.x_levels == (1, 1, 1)
        assert system.y_levels == (0, 0, 0)

    def test_empty_support(self):
        system = decompose(SupportGraph(2, 3, frozenset()))
        assert system.limbs == ()
        assert system.x_levels == (1, 1)
        assert system.y_levels == (0, 0, 0)
        assert limb_count(system) == 0

    def test_path_rooted_at_heaviest_column(self):
        # Column 1 meets two cells, so it becomes the root and the path
        # needs only two limbs (the hand-rooted three-limb version of the
        # same support is a different, equally valid system).
        support = SupportGraph(2, 2, frozenset({(0, 0), (0, 1), (1, 1)}))
        system = decompose(support)
        assert [limb.k for limb in system.limbs] == [1, 2]
        assert system.limbs[0].pairs == ((0, 1), (1, 1))
        assert system.limbs[1].pairs == ((0, 0),)
        assert validate_system(system)
        assert system_support(system).edges == support.edges

    def test_cyclic_support_raises_with_witness(self):
        cyclic = SupportGraph(2, 2, frozenset({(0, 0), (0, 1), (1, 0), (1, 1)}))
        with pytest.raises(CyclicSupportError) as err:
            decompose(cyclic)
        assert set(err.value.witness.edges) <= cyclic.edges

    def test_union_of_limbs_is_support_and_disjoint(self):
        rng = random.Random(4)
        for _ in range(60):
            m, n = rng.randint(1, 8), rng.randint(1, 8)
            cells = oracles.random_forest_cells(rng, m, n)
            system = decompose(SupportGraph(m, n, frozenset(cells)))
            assert validate_system(system)
            sizes = sum(len(limb.pairs) for limb in system.limbs)
            union = system_support(system).edges
            assert union == frozenset(cells)
            assert sizes == len(cells)


class TestReconstruct:
    def test_identity_system(self):
        system = NumberedLimbSystem(2, 2, (Limb(1, "graph", ((0, 0), (1, 1))),), (1, 1), (0, 0))
        half = DiscreteMarginal((F(1, 2), F(1, 2)))
        report = reconstruct(system, half, half)
        assert report.feasible
        assert report.coupling == Coupling(2, 2, ((0, 0, F(1, 2)), (1, 1, F(1, 2))))

    def test_three_limb_path_by_hand(self):
        mu = DiscreteMarginal((F(1, 2), F(1, 2)))
        nu = DiscreteMarginal((F(1, 5), F(4, 5)))
        report = reconstruct(path_system(), mu, nu)
        assert report.feasible
        assert report.coupling == Coupling(
            2, 2, ((0, 0, F(1, 5)), (0, 1, F(3, 10)), (1, 1, F(1, 2)))
        )
        # eta per limb, ascending: eta_1 on rows, eta_2 on columns, eta_3 on rows.
        assert report.eta[0].weights == (F(1, 5), 0)
        assert report.eta[1].weights == (0, F(3, 10))
        assert report.eta[2].weights == (0, F(1, 2))

    def test_three_limb_path_infeasible_marginals(self):
        mu = DiscreteMarginal((F(1, 2), F(1, 2)))
        nu = DiscreteMarginal((F(9, 10), F(1, 10)))
        report = reconstruct(path_system(), mu, nu)
        assert not report.feasible
        assert "limb 2" in report.message

    def test_invalid_system_raises(self):
        bad = NumberedLimbSystem(1, 1, (Limb(1, "graph", ((0, 0),)),), (1,), (2,))
        with pytest.raises(InvalidSystemError):
            reconstruct(bad, DiscreteMarginal((F(1),)), DiscreteMarginal((F(1),)))

    def test_marginal_sizes_must_match_system(self):
        from limbsys import ShapeMismatchError

        system = NumberedLimbSystem(2, 2, (Limb(1, "graph", ((0, 0), (1, 1))),), (1, 1), (0, 0))
        with pytest.raises(ShapeMismatchError):
            reconstruct(system, DiscreteMarginal((F(1),)), DiscreteMarginal((F(1, 2), F(1, 2))))

    def test_empty_system_feasible_only_for_zero_mass(self):
        system = NumberedLimbSystem(2, 2, (), (1, 1), (0, 0))
        zero = DiscreteMarginal((0, 0))
        assert reconstruct(system, zero, zero).feasible
        assert not reconstruct(system, DiscreteMarginal((F(1), 0)), zero).feasible

    def test_round_trip_exact(self):
        rng = random.Random(6)
        for _ in range(50):
            m, n = rng.randint(1, 8), rng.randint(1, 8)
            gamma = oracles.random_forest_coupling(rng, m, n)
            mu, nu = marginals_of(gamma)
            report = reconstruct(decompose(support_graph(gamma)), mu, nu)
            assert report.feasible
            assert report.coupling == gamma

    def test_matches_feasibility_oracle_on_random_forests(self):
        # At most one coupling vanishes outside a forest; the exact linear
        # solver must find exactly the reconstruction output.
        rng = random.Random(60)
        for _ in range(40):
            m, n = rng.randint(2, 7), rng.randint(2, 7)
            gamma = oracles.random_forest_coupling(rng, m, n)
            mu, nu = marginals_of(gamma)
            cells = sorted(gamma.cells())
            report = reconstruct(decompose(SupportGraph(m, n, frozenset(cells))), mu, nu)
            from_oracle = oracles.coupling_on_cells(mu, nu, cells)
            assert report.feasible
            assert from_oracle is not None
            assert report.coupling == from_oracle == gamma

    def test_monotone_truncation(self):
        # Dropping the highest limb and the mass it consumed reproduces the
        # reconstruction of the truncated system: the recursion is local.
        rng = random.Random(321)
        for _ in range(30):
            m, n = rng.randint(2, 7), rng.randint(2, 7)
            gamma = oracles.random_forest_coupling(rng, m, n)
            mu, nu = marginals_of(gamma)
            system = decompose(support_graph(gamma))
            if len(system.limbs) < 2:
                continue
            top = system.limbs[-1]
            truncated = NumberedLimbSystem(
                m, n, system.limbs[:-1], system.x_levels, system.y_levels
            )
            top_cells = top.cells()
            piece = Coupling.from_entries(
                m, n, [(i, j, w) for i, j, w in gamma.entries if (i, j) in top_cells]
            )
            rest = Coupling.from_entries(
                m, n, [(i, j, w) for i, j, w in gamma.entries if (i, j) not in top_cells]
            )
            prow, pcol = marginals_of(piece)
            mu2 = DiscreteMarginal(tuple(a - b for a, b in zip(mu.weights, prow.weights)))
            nu2 = DiscreteMarginal(tuple(a - b for a, b in zip(nu.weights, pcol.weights)))
            report = reconstruct(truncated, mu2, nu2)
            assert report.feasible
            assert report.coupling == rest


class TestLimbCount:
    def test_examples(self):
        identity = NumberedLimbSystem(2, 2, (Limb(1, "graph", ((0, 0), (1, 1))),), (1, 1), (0, 0))
        assert limb_count(identity) == 1
        assert limb_count(path_system()) == 3


def bruteforce_two_limb(m, n, cells):
    """A support splits into graph plus antigraph iff some set A of columns
    takes at most one cell per row while every column outside A keeps at
    most one cell."""
    col_deg = [sum(1 for i, j in cells if j == jj) for jj in range(n)]
    for mask in range(1 << n):
        in_a = [(mask >> j) & 1 for j in range(n)]
        if any(col_deg[j] > 1 and not in_a[j] for j in range(n)):
            continue
        if all(sum(1 for i2, j2 in cells if i2 == i and in_a[j2]) <= 1 for i in range(m)):
            return True
    return False


class TestTwoLimbCheck:
    def test_diagonal_is_a_pure_graph(self):
        f1, f2 = two_limb_check(SupportGraph(3, 3, frozenset((i, i) for i in range(3))))
        assert f1 == (0, 1, 2)
        assert f2 == (None, None, None)

    def test_row_with_two_heavy_columns_fails(self):
        support = SupportGraph(3, 2, frozenset({(0, 0), (0, 1), (1, 0), (2, 1)}))
        assert two_limb_check(support) is None
        assert not bruteforce_two_limb(3, 2, support.edges)

    def test_exhaustive_agreement_on_all_4x4_supports(self):
        cells4 = [(i, j) for i in range(4) for j in range(4)]
        for mask in range(1 << 16):
            cells = frozenset(c for k, c in enumerate(cells4) if (mask >> k) & 1)
            got = two_limb_check(SupportGraph(4, 4, cells))
            assert (got is not None) == bruteforce_two_limb(4, 4, cells), cells

    def test_soundness_of_returned_maps(self):
        rng = random.Random(14)
        for _ in range(80):
            m, n = rng.randint(1, 6), rng.randint(1, 6)
            cells = frozenset(
                (rng.randrange(m), rng.randrange(n)) for _ in range(rng.randint(0, m * n))
            )
            support = SupportGraph(m, n, cells)
            result = two_limb_check(support)
            if result is None:
                continue
            f1, f2 = result
            system = system_from_two_limbs(m, n, f1, f2)
            assert validate_system(system)
            assert system_support(system).edges == cells
            ran_f1 = {j for j in f1 if j is not None}
            dom_f2 = {j for j, i in enumerate(f2) if i is not None}
            assert not (ran_f1 & dom_f2)
