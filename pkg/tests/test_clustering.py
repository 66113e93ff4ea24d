"""Balanced and representative clustering welfare, and parity over assignments."""

import itertools
import random

import pytest

from welfair.core import qualification
from welfair.metrics import dem_par_welf
from welfair.clustering import (
    ClusteringProblem,
    balanced_welfare,
    check_assignment,
    clustering_dem_par,
    clustering_to_fdmp,
    negative_euclidean,
    representative_welfare,
)

# Four individuals A, B (group 0) and C, D (group 1) on a line; groups are
# spatially separated.
FOUR_POINTS = ClusteringProblem.from_rows(
    [((0.0,), 0), ((1.0,), 0), ((10.0,), 1), ((11.0,), 1)], k=2
)


class TestBalancedWelfare:
    def test_alternating_clusters_are_half_for_everyone(self):
        # {A, C}, {B, D}: every cluster holds one member of each group.
        assignment = (0, 1, 0, 1)
        for i in range(4):
            assert balanced_welfare(FOUR_POINTS, assignment, i) == 0.5

    def test_homogeneous_clusters_are_one_for_everyone(self):
        assignment = (0, 0, 1, 1)
        for i in range(4):
            assert balanced_welfare(FOUR_POINTS, assignment, i) == 1.0

    def test_mixed_cluster_proportions(self):
        # {A, B, C}, {D}: A and B get 2/3, C gets 1/3, D gets 1.
        assignment = (0, 0, 0, 1)
        values = [balanced_welfare(FOUR_POINTS, assignment, i) for i in range(4)]
        assert values == [pytest.approx(2 / 3), pytest.approx(2 / 3), pytest.approx(1 / 3), 1.0]

    def test_range_and_per_cluster_counts(self):
        rng = random.Random(5)
        for _ in range(50):
            n = rng.randint(1, 6)
            k = rng.randint(1, 3)
            problem = ClusteringProblem.from_rows(
                [((float(rng.randint(0, 5)),), rng.randint(0, 1)) for _ in range(n)], k=k
            )
            assignment = tuple(rng.randrange(k) for _ in range(n))
            for cluster in range(k):
                members = [i for i in range(n) if assignment[i] == cluster]
                by_group = {}
                for i in members:
                    by_group.setdefault(problem.points[i][1], []).append(i)
                for group, group_members in by_group.items():
                    expected = len(group_members) / len(members)
                    for i in group_members:
                        w = balanced_welfare(problem, assignment, i)
                        assert 0.0 < w <= 1.0
                        assert w == pytest.approx(expected, abs=1e-12)

    def test_conjoinedness(self):
        # Moving individual 2 changes individual 0's welfare even though
        # individual 0's own assignment is untouched.
        problem = ClusteringProblem.from_rows([((0.0,), 0), ((1.0,), 1), ((2.0,), 1)], k=2)
        before = balanced_welfare(problem, (0, 1, 0), 0)
        after = balanced_welfare(problem, (0, 1, 1), 0)
        assert before == 0.5
        assert after == 1.0


class TestRepresentativeWelfare:
    def test_point_at_centroid_scores_zero(self):
        problem = ClusteringProblem.from_rows([((1.0, 2.0), 0), ((1.0, 2.0), 1)], k=1)
        assert representative_welfare(problem, (0, 0), 0) == 0.0

    def test_two_point_cluster(self):
        problem = ClusteringProblem.from_rows([((0.0,), 0), ((2.0,), 1)], k=1)
        assert representative_welfare(problem, (0, 0), 0) == -1.0
        assert representative_welfare(problem, (0, 0), 1) == -1.0

    def test_singleton_cluster(self):
        assert representative_welfare(FOUR_POINTS, (0, 0, 0, 1), 3) == 0.0

    def test_custom_similarity(self):
        sim = lambda features, summary: 42.0
        assert representative_welfare(FOUR_POINTS, (0, 1, 0, 1), 0, sim=sim) == 42.0


class TestClusteringParity:
    def test_alternating_clusters_satisfy_balanced_parity(self):
        verdict = clustering_dem_par(FOUR_POINTS, (0, 1, 0, 1), "balanced", tau=0.5)
        stats = [g.statistic for g in verdict.per_group]
        assert stats == [1.0, 1.0]
        assert verdict.satisfied

    def test_unbalanced_assignment_fails_at_point_six(self):
        verdict = clustering_dem_par(FOUR_POINTS, (0, 0, 0, 1), "balanced", tau=0.6)
        stats = [g.statistic for g in verdict.per_group]
        assert stats == [1.0, 0.5]
        assert not verdict.satisfied

    def test_balanced_parity_cannot_see_packed_groups(self):
        # Homogeneous clusters satisfy balanced parity at every tau <= 1;
        # representative welfare with a distance similarity still can
        # distinguish who is far from their cluster summary.
        for tau in (0.25, 0.5, 1.0):
            assert clustering_dem_par(FOUR_POINTS, (0, 0, 1, 1), "balanced", tau=tau).satisfied
        spread = ClusteringProblem.from_rows(
            [((0.0,), 0), ((1.0,), 0), ((10.0,), 1), ((30.0,), 1)], k=2
        )
        packed = (0, 0, 1, 1)
        rep = clustering_dem_par(spread, packed, "representative", tau=-1.0)
        assert not rep.satisfied

    def test_matches_brute_force_over_all_assignments(self):
        # Exhaustively recount welfare for every assignment of the 4-point
        # problem and compare the induced parity verdict.
        for assignment in itertools.product(range(2), repeat=4):
            verdict = clustering_dem_par(FOUR_POINTS, assignment, "balanced", tau=0.6)
            rates = []
            for group in (0, 1):
                members = [i for i in range(4) if FOUR_POINTS.points[i][1] == group]
                hits = sum(
                    1
                    for i in members
                    if balanced_welfare(FOUR_POINTS, assignment, i) >= 0.6
                )
                rates.append(hits / len(members))
            assert verdict.satisfied == (abs(rates[0] - rates[1]) <= 1e-9)

    def test_cluster_relabeling_invariance(self):
        rng = random.Random(11)
        for _ in range(100):
            n = rng.randint(2, 6)
            k = rng.randint(2, 3)
            rows = [
                ((float(rng.randint(0, 9)), float(rng.randint(0, 9))), rng.randint(0, 1))
                for _ in range(n)
            ]
            if not {g for _, g in rows} == {0, 1}:
                rows[0] = (rows[0][0], 0)
                rows[-1] = (rows[-1][0], 1)
            problem = ClusteringProblem.from_rows(rows, k=k)
            assignment = tuple(rng.randrange(k) for _ in range(n))
            relabel = list(range(k))
            rng.shuffle(relabel)
            permuted = tuple(relabel[c] for c in assignment)
            for welfare in ("balanced", "representative"):
                for i in range(n):
                    fn = balanced_welfare if welfare == "balanced" else representative_welfare
                    assert fn(problem, assignment, i) == fn(problem, permuted, i)
                tau = rng.choice([0.3, 0.5, -1.0])
                a = clustering_dem_par(problem, assignment, welfare, tau=tau)
                b = clustering_dem_par(problem, permuted, welfare, tau=tau)
                assert a.satisfied == b.satisfied
                assert [g.statistic for g in a.per_group] == [
                    g.statistic for g in b.per_group
                ]

    def test_adapter_consistency(self):
        fdmp = clustering_to_fdmp(FOUR_POINTS, "balanced", tau=0.6)
        direct = dem_par_welf(fdmp, (0, 0, 0, 1))
        via_helper = clustering_dem_par(FOUR_POINTS, (0, 0, 0, 1), "balanced", tau=0.6)
        assert direct == via_helper

    def test_qualification_over_toy_assignment_space(self):
        # Everyone can reach a homogeneous cluster in some assignment, so
        # every individual is qualified at tau = 1.
        fdmp = clustering_to_fdmp(FOUR_POINTS, "balanced", tau=1.0)
        assert all(qualification(fdmp, ind) == 1 for ind, _ in fdmp.population.entries)


class TestValidation:
    def test_assignment_length_checked(self):
        with pytest.raises(ValueError):
            check_assignment(FOUR_POINTS, (0, 1))

    def test_cluster_id_range_checked(self):
        with pytest.raises(ValueError):
            check_assignment(FOUR_POINTS, (0, 1, 2, 0))

    def test_empty_problem_rejected(self):
        with pytest.raises(ValueError):
            ClusteringProblem.from_rows([], k=2)

    def test_unknown_welfare_kind(self):
        with pytest.raises(ValueError):
            clustering_dem_par(FOUR_POINTS, (0, 1, 0, 1), "nope", tau=0.5)
