"""Shared builders: the recidivism strata table and random-problem generators."""

from __future__ import annotations

import pytest
from hypothesis import strategies as st

from welfair.classification import DETAIN, RELEASE, Stratum, StrataPopulation
from welfair.core import DecisionSpace, Fdmp, Individual, Population, Thresholds, UtilityModel

# Inmate counts per (stratum, group, decision): 1,000 inmates total, 500 per
# group, engineered so the observed-outcome metric is satisfied while the
# counterfactual one is not.
RECIDIVISM_COUNTS = {
    (Stratum.DANGEROUS, 0, DETAIN): 120.0,
    (Stratum.DANGEROUS, 0, RELEASE): 30.0,
    (Stratum.BACKLASH, 0, DETAIN): 40.0,
    (Stratum.BACKLASH, 0, RELEASE): 20.0,
    (Stratum.PREVENTABLE, 0, DETAIN): 80.0,
    (Stratum.PREVENTABLE, 0, RELEASE): 10.0,
    (Stratum.SAFE, 0, DETAIN): 40.0,
    (Stratum.SAFE, 0, RELEASE): 160.0,
    (Stratum.DANGEROUS, 1, DETAIN): 80.0,
    (Stratum.DANGEROUS, 1, RELEASE): 20.0,
    (Stratum.BACKLASH, 1, DETAIN): 20.0,
    (Stratum.BACKLASH, 1, RELEASE): 20.0,
    (Stratum.PREVENTABLE, 1, DETAIN): 80.0,
    (Stratum.PREVENTABLE, 1, RELEASE): 80.0,
    (Stratum.SAFE, 1, DETAIN): 40.0,
    (Stratum.SAFE, 1, RELEASE): 160.0,
}


@pytest.fixture
def recidivism_population() -> StrataPopulation:
    return StrataPopulation.from_mapping(RECIDIVISM_COUNTS)


def table_fdmp(entries, welfare, cost, tau, rho, group_count=None, cap=1_000_000):
    """FDMP over an explicit utility table.

    ``entries``: list of (type_key, group, weight); ``welfare``/``cost``:
    dicts keyed by (type_key, algorithm).  Algorithms are inferred from the
    welfare table keys, in first-appearance order.
    """
    algorithms = list(dict.fromkeys(m for _, m in welfare))
    population = Population.from_pairs(
        ((Individual(attrs=key, group=g), wgt) for key, g, wgt in entries),
        group_count=group_count,
    )
    return Fdmp(
        population=population,
        decisions=DecisionSpace.of(*algorithms, enumeration_cap=cap),
        utilities=UtilityModel(
            welfare=lambda ind, m: welfare[(ind.attrs, m)],
            cost=lambda ind, m: cost[(ind.attrs, m)],
        ),
        thresholds=Thresholds(tau=tau, rho=rho),
    )


# Value grid keeps statistics far from the comparison tolerance: adjacent
# utilities differ by 0.25 while epsilon is 1e-9.
utility_values = st.sampled_from([i * 0.25 for i in range(-8, 9)])
weight_values = st.integers(min_value=1, max_value=9).map(float)


@st.composite
def random_table_fdmps(draw, max_types_per_group=4, max_algorithms=6, max_groups=2):
    """Random finite FDMP with an explicit utility table and >= 1 entry per group."""
    group_count = draw(st.integers(2, max_groups))
    n_algorithms = draw(st.integers(1, max_algorithms))
    algorithms = [f"m{i}" for i in range(n_algorithms)]
    entries = []
    key = 0
    for g in range(group_count):
        for _ in range(draw(st.integers(1, max_types_per_group))):
            entries.append((key, g, draw(weight_values)))
            key += 1
    welfare = {}
    cost = {}
    for type_key, _, _ in entries:
        for m in algorithms:
            welfare[(type_key, m)] = draw(utility_values)
            cost[(type_key, m)] = draw(utility_values)
    tau = draw(utility_values)
    rho = draw(utility_values)
    return table_fdmp(entries, welfare, cost, tau, rho, group_count=group_count), welfare, cost
