"""Exact probability computation and counterfactual qualification."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from welfair.core import (
    DecisionSpace,
    Individual,
    Population,
    Thresholds,
    always,
    conditional_probability,
    cost_of,
    qualification,
    welfare_of,
)
from welfair.errors import EnumerationCapExceeded, UnknownAlgorithm, ZeroConditionMass

from conftest import RECIDIVISM_COUNTS, random_table_fdmps, table_fdmp

from welfair.classification import RELEASE, StrataPopulation, strata_to_fdmp


def two_entry_population():
    return Population.from_pairs(
        [
            (Individual(attrs="hit", group=0), 0.6),
            (Individual(attrs="miss", group=1), 0.4),
        ]
    )


class TestConditionalProbability:
    def test_direct_ratio(self):
        pop = two_entry_population()
        assert conditional_probability(pop, lambda i: i.attrs == "hit", always) == 0.6

    def test_recidivism_release_rate(self, recidivism_population):
        # Minority released mass: 30 + 20 + 10 + 160 of 500.
        pop = recidivism_population.to_population()
        p = conditional_probability(
            pop, lambda i: i.attrs.decision == RELEASE, lambda i: i.group == 0
        )
        assert p == pytest.approx(220 / 500, abs=1e-15)

    def test_empty_condition_raises(self):
        pop = two_entry_population()
        with pytest.raises(ZeroConditionMass):
            conditional_probability(pop, always, lambda i: False)

    @given(random_table_fdmps())
    def test_event_equal_to_condition_gives_one(self, drawn):
        fdmp, _, _ = drawn
        cond = lambda i: i.group == 0
        assert conditional_probability(fdmp.population, cond, cond) == 1.0

    @given(random_table_fdmps())
    def test_disjoint_event_gives_zero(self, drawn):
        fdmp, _, _ = drawn
        assert (
            conditional_probability(
                fdmp.population, lambda i: i.group == 1, lambda i: i.group == 0
            )
            == 0.0
        )

    @given(random_table_fdmps(), st.integers(0, 3))
    def test_bounds(self, drawn, seed):
        fdmp, _, _ = drawn
        event = lambda i: (hash(i.attrs) + seed) % 3 == 0
        p = conditional_probability(fdmp.population, event, always)
        assert 0.0 <= p <= 1.0

    @given(random_table_fdmps(max_groups=2), st.integers(0, 5))
    def test_partition_law(self, drawn, seed):
        fdmp, _, _ = drawn
        pop = fdmp.population
        event = lambda i: (hash(i.attrs) + seed) % 2 == 0
        total = conditional_probability(pop, event, always)
        mixed = 0.0
        whole = pop.total_mass()
        for z in range(pop.group_count):
            mass = pop.group_mass(z)
            if mass > 0:
                mixed += conditional_probability(pop, event, lambda i, z=z: i.group == z) * (
                    mass / whole
                )
        assert mixed == pytest.approx(total, abs=1e-9)


class TestPopulationValidation:
    def test_rejects_negative_weight(self):
        with pytest.raises(ValueError):
            Population.from_pairs([(Individual(attrs=0, group=0), -1.0)])

    def test_rejects_zero_total(self):
        with pytest.raises(ValueError):
            Population.from_pairs([(Individual(attrs=0, group=0), 0.0)])

    def test_rejects_out_of_range_group(self):
        with pytest.raises(ValueError):
            Population(entries=((Individual(attrs=0, group=5), 1.0),), group_count=2)

    def test_rejects_single_group_declaration(self):
        with pytest.raises(ValueError):
            Population(entries=((Individual(attrs=0, group=0), 1.0),), group_count=1)


class TestThresholds:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            Thresholds(tau=math.inf, rho=0.0)


class TestDecisionSpace:
    def test_cap_enforced_on_iteration(self):
        space = DecisionSpace(generate=lambda: iter(range(100)), size=100, enumeration_cap=10)
        with pytest.raises(EnumerationCapExceeded):
            list(space)

    def test_cap_enforced_without_known_size(self):
        space = DecisionSpace(generate=lambda: iter(range(100)), enumeration_cap=10)
        with pytest.raises(EnumerationCapExceeded):
            list(space)

    def test_must_be_non_empty(self):
        with pytest.raises(ValueError):
            DecisionSpace.of()

    def test_contains_scans_when_no_membership(self):
        space = DecisionSpace(generate=lambda: iter(["a", "b"]))
        assert space.contains("b")
        assert not space.contains("c")


class TestUtilityAccess:
    def test_welfare_and_cost_delegate(self):
        fdmp = table_fdmp(
            [(0, 0, 1.0), (1, 1, 1.0)],
            welfare={(0, "m"): 2.0, (1, "m"): 0.5},
            cost={(0, "m"): -1.0, (1, "m"): 3.0},
            tau=1.0,
            rho=0.0,
        )
        ind = fdmp.population.entries[0][0]
        assert welfare_of(fdmp, "m", ind) == 2.0
        assert cost_of(fdmp, "m", ind) == -1.0

    def test_unknown_algorithm(self):
        fdmp = table_fdmp(
            [(0, 0, 1.0), (1, 1, 1.0)],
            welfare={(0, "m"): 1.0, (1, "m"): 1.0},
            cost={(0, "m"): 0.0, (1, "m"): 0.0},
            tau=1.0,
            rho=0.0,
        )
        ind = fdmp.population.entries[0][0]
        with pytest.raises(UnknownAlgorithm):
            welfare_of(fdmp, "nope", ind)
        with pytest.raises(UnknownAlgorithm):
            cost_of(fdmp, "nope", ind)


class TestQualification:
    @given(random_table_fdmps())
    @settings(max_examples=150)
    def test_matches_brute_force_oracle(self, drawn):
        fdmp, welfare, cost = drawn
        algorithms = sorted({m for _, m in welfare})
        tau, rho = fdmp.thresholds.tau, fdmp.thresholds.rho
        for ind, _ in fdmp.population.entries:
            oracle = int(
                any(
                    welfare[(ind.attrs, m)] >= tau and cost[(ind.attrs, m)] <= rho
                    for m in algorithms
                )
            )
            assert qualification(fdmp, ind) == oracle

    @given(random_table_fdmps(), st.sampled_from([0.25, 0.5, 1.0]))
    def test_monotone_in_thresholds(self, drawn, delta):
        # Lowering tau or raising rho can only widen the qualified set.
        from dataclasses import replace

        fdmp, _, _ = drawn
        easier = replace(
            fdmp,
            thresholds=Thresholds(
                tau=fdmp.thresholds.tau - delta, rho=fdmp.thresholds.rho + delta
            ),
        )
        for ind, _ in fdmp.population.entries:
            if qualification(fdmp, ind) == 1:
                assert qualification(easier, ind) == 1

    def test_enumeration_cap_propagates(self):
        fdmp = table_fdmp(
            [(0, 0, 1.0), (1, 1, 1.0)],
            welfare={(0, "m"): 0.0, (1, "m"): 0.0},
            cost={(0, "m"): 1.0, (1, "m"): 1.0},
            tau=1.0,
            rho=0.0,
            cap=1,
        )
        # One algorithm fits the cap; an unreachable threshold forces a full scan.
        assert qualification(fdmp, fdmp.population.entries[0][0]) == 0
        bigger = table_fdmp(
            [(0, 0, 1.0), (1, 1, 1.0)],
            welfare={(0, "a"): 0.0, (0, "b"): 0.0, (1, "a"): 0.0, (1, "b"): 0.0},
            cost={(0, "a"): 1.0, (0, "b"): 1.0, (1, "a"): 1.0, (1, "b"): 1.0},
            tau=1.0,
            rho=0.0,
            cap=1,
        )
        with pytest.raises(EnumerationCapExceeded):
            qualification(bigger, bigger.population.entries[0][0])

    def test_independent_of_audited_decisions(self, recidivism_population):
        # Flipping recorded decisions changes the observed outcomes but not
        # who could have had a good one.
        base = strata_to_fdmp(recidivism_population)
        flipped_counts = {
            (s, g, ("release" if d == "detain" else "detain")): c
            for (s, g, d), c in RECIDIVISM_COUNTS.items()
        }
        flipped = strata_to_fdmp(StrataPopulation.from_mapping(flipped_counts))
        base_gammas = {
            (i.attrs.stratum, i.group): qualification(base, i)
            for i, _ in base.population.entries
        }
        flipped_gammas = {
            (i.attrs.stratum, i.group): qualification(flipped, i)
            for i, _ in flipped.population.entries
        }
        assert base_gammas == flipped_gammas
