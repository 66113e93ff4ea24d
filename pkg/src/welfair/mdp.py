"""Finite episodic decision processes with welfare contributions.

States carry a group id alongside their domain attributes; the group is
constant along every trajectory, so the individuals of the induced
decision problem are the initial states weighted by the start
distribution.  Policy evaluation is exact backward induction over the
unrolled finite horizon -- never iterative approximation -- which makes
every reported value bit-stable.  The per-step analogue of the reward for
the individual's side is a *welfare contribution*; its discounted
cumulative expectation is the welfare a policy yields from a start state,
and the negated cumulative expected reward is the policy's cost.

Episodes must provably terminate: either an explicit horizon is given (and
no trajectory may outlive it), or the non-absorbing transition graph must
be acyclic so a trajectory bound can be certified.  A discount of 1 is
only allowed under that certification.

Qualification enumerates the full space of deterministic stationary
policies.  Finite-horizon finite problems always admit deterministic
witnesses under exhaustive search, so stochastic policies are not
enumerated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Iterable, Iterator, Mapping

from .core import (
    DEFAULT_ENUMERATION_CAP,
    DEFAULT_EPSILON,
    DecisionSpace,
    Fdmp,
    Individual,
    Population,
    Thresholds,
    UtilityModel,
)
from .errors import HorizonUnbounded, UnknownAlgorithm, WelfairError
from .metrics import FairnessVerdict, eq_opp_static_expected

_ROW_TOLERANCE = 1e-12


@dataclass(frozen=True)
class MdpState:
    """One state: id, protected-group id (None for shared/terminal states), attrs."""

    id: str
    group: int | None = None
    attrs: Any = None
    absorbing: bool = False


@dataclass(frozen=True)
class EpisodicMdp:
    """Finite MDP with certified-episodic semantics.

    ``transitions`` maps (state id, action) to a distribution over
    successor state ids; every non-absorbing state needs a row for every
    action, and each row must sum to 1 within 1e-12.  ``initial`` is the
    start distribution; its support states must carry a group id.
    """

    states: tuple[MdpState, ...]
    actions: tuple[str, ...]
    transitions: Mapping[tuple[str, str], Mapping[str, float]]
    rewards: Mapping[tuple[str, str], float]
    gamma: float
    initial: Mapping[str, float]
    horizon: int | None = None

    def __post_init__(self) -> None:
        ids = [s.id for s in self.states]
        if len(set(ids)) != len(ids):
            raise ValueError("state ids must be unique")
        if not self.actions:
            raise ValueError("action set must be non-empty")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("discount must lie in [0, 1]")
        by_id = {s.id: s for s in self.states}
        for sid, p in self.initial.items():
            if sid not in by_id:
                raise ValueError(f"initial distribution references unknown state {sid!r}")
            if p < 0:
                raise ValueError("initial probabilities must be non-negative")
        total = sum(self.initial.values())
        if abs(total - 1.0) > _ROW_TOLERANCE:
            raise ValueError(f"initial distribution sums to {total!r}, expected 1")
        for state in self.states:
            if state.absorbing:
                continue
            for action in self.actions:
                row = self.transitions.get((state.id, action))
                if row is None:
                    raise ValueError(f"missing transition row for ({state.id!r}, {action!r})")
                row_sum = 0.0
                for succ, p in row.items():
                    if succ not in by_id:
                        raise ValueError(f"transition to unknown state {succ!r}")
                    if p < 0:
                        raise ValueError("transition probabilities must be non-negative")
                    row_sum += p
                if abs(row_sum - 1.0) > _ROW_TOLERANCE:
                    raise ValueError(
                        f"transition row ({state.id!r}, {action!r}) sums to {row_sum!r}"
                    )
        self._check_group_constancy(by_id)

    def _check_group_constancy(self, by_id: dict[str, MdpState]) -> None:
        # The protected attribute must not change along any trajectory.
        for state in self.states:
            if state.absorbing or state.group is None:
                continue
            for action in self.actions:
                for succ, p in self.transitions[(state.id, action)].items():
                    succ_state = by_id[succ]
                    if p > 0 and not succ_state.absorbing and succ_state.group is not None:
                        if succ_state.group != state.group:
                            raise ValueError(
                                f"group id changes along transition {state.id!r} -> {succ!r}"
                            )

    @cached_property
    def state_by_id(self) -> Mapping[str, MdpState]:
        return {s.id: s for s in self.states}

    @cached_property
    def reachable(self) -> tuple[str, ...]:
        """State ids reachable from the initial support under any action, in state order."""
        frontier = [sid for sid, p in self.initial.items() if p > 0]
        seen = set(frontier)
        while frontier:
            sid = frontier.pop()
            state = self.state_by_id[sid]
            if state.absorbing:
                continue
            for action in self.actions:
                for succ, p in self.transitions[(sid, action)].items():
                    if p > 0 and succ not in seen:
                        seen.add(succ)
                        frontier.append(succ)
        return tuple(s.id for s in self.states if s.id in seen)

    @cached_property
    def decision_states(self) -> tuple[str, ...]:
        """Reachable non-absorbing state ids, in declared state order."""
        return tuple(
            sid for sid in self.reachable if not self.state_by_id[sid].absorbing
        )

    def certified_horizon(self) -> int:
        """Largest number of steps any trajectory can take before absorption.

        With an explicit horizon, additionally checks that no trajectory
        outlives it.  Without one, requires the non-absorbing transition
        graph to be acyclic.

        Raises:
            HorizonUnbounded: a cycle among non-absorbing states exists, or
                some trajectory is not absorbed within the given horizon.
        """
        depth = self._longest_path()
        if self.horizon is not None:
            if depth is None or depth > self.horizon:
                raise HorizonUnbounded(
                    f"trajectories are not certainly absorbed within horizon {self.horizon}"
                )
            return self.horizon
        if depth is None:
            raise HorizonUnbounded(
                "no horizon given and the non-absorbing transition graph has a cycle"
            )
        return depth

    def _longest_path(self) -> int | None:
        """Steps to absorption along the longest trajectory; None if unbounded."""
        order: dict[str, int] = {}
        visiting: set[str] = set()

        def visit(sid: str) -> int | None:
            state = self.state_by_id[sid]
            if state.absorbing:
                return 0
            if sid in order:
                return order[sid]
            if sid in visiting:
                return None
            visiting.add(sid)
            best = 0
            for action in self.actions:
                for succ, p in self.transitions[(sid, action)].items():
                    if p <= 0:
                        continue
                    sub = visit(succ)
                    if sub is None:
                        return None
                    best = max(best, sub)
            visiting.discard(sid)
            order[sid] = best + 1
            return best + 1

        worst = 0
        for sid in self.reachable:
            depth = visit(sid)
            if depth is None:
                return None
            worst = max(worst, depth)
        return worst


@dataclass(frozen=True)
class WelfareContribution:
    """Per-step welfare w(state, action); must cover every reachable pair."""

    values: Mapping[tuple[str, str], float]

    def __call__(self, sid: str, action: str) -> float:
        try:
            return float(self.values[(sid, action)])
        except KeyError:
            raise WelfairError(f"welfare contribution missing for ({sid!r}, {action!r})") from None


@dataclass(frozen=True)
class Policy:
    """Deterministic stationary policy as a canonical (state id, action) table."""

    assignments: tuple[tuple[str, str], ...]

    @classmethod
    def from_mapping(cls, table: Mapping[str, str]) -> "Policy":
        return cls(assignments=tuple(sorted(table.items())))

    @cached_property
    def _table(self) -> dict[str, str]:
        return dict(self.assignments)

    def act(self, sid: str) -> str:
        try:
            return self._table[sid]
        except KeyError:
            raise UnknownAlgorithm(f"policy does not cover state {sid!r}") from None


def _contrib_fn(contrib: Any) -> Callable[[str, str], float]:
    if isinstance(contrib, WelfareContribution):
        return contrib
    if callable(contrib):
        return contrib
    if isinstance(contrib, Mapping):
        return WelfareContribution(values=contrib)
    raise WelfairError(f"cannot interpret contribution {contrib!r}")


def expected_cumulative(
    mdp: EpisodicMdp,
    contrib: Any,
    policy: Policy | Mapping[str, str],
    s0: str,
    *,
    horizon: int | None = None,
) -> float:
    """Exact E[sum of gamma^t * contrib(s_t, policy(s_t))] from ``s0``.

    Backward induction over the unrolled certified horizon; absorbing
    states contribute nothing.  The one-step successor mass is re-checked
    during the sweep so a corrupted row cannot silently skew a value.
    """
    if isinstance(policy, Mapping) and not isinstance(policy, Policy):
        policy = Policy.from_mapping(policy)
    value_of = _contrib_fn(contrib)
    steps = horizon if horizon is not None else mdp.certified_horizon()
    if s0 not in mdp.state_by_id:
        raise WelfairError(f"unknown start state {s0!r}")

    memo: dict[tuple[str, int], float] = {}

    def value(sid: str, remaining: int) -> float:
        state = mdp.state_by_id[sid]
        if state.absorbing or remaining == 0:
            return 0.0
        key = (sid, remaining)
        if key in memo:
            return memo[key]
        action = policy.act(sid)
        row = mdp.transitions[(sid, action)]
        mass = 0.0
        future = 0.0
        for succ in sorted(row):
            p = row[succ]
            mass += p
            if p > 0:
                future += p * value(succ, remaining - 1)
        if abs(mass - 1.0) > _ROW_TOLERANCE:
            raise WelfairError(
                f"transition mass {mass!r} for ({sid!r}, {action!r}) is not conserved"
            )
        result = value_of(sid, action) + mdp.gamma * future
        memo[key] = result
        return result

    return value(s0, steps)


def policy_cost(
    mdp: EpisodicMdp, policy: Policy | Mapping[str, str], s0: str, *, horizon: int | None = None
) -> float:
    """Negative expected cumulative reward of ``policy`` from ``s0``."""
    return -expected_cumulative(mdp, mdp.rewards, policy, s0, horizon=horizon)


def enumerate_policies(mdp: EpisodicMdp) -> Iterator[Policy]:
    """All deterministic stationary policies over the reachable decision states.

    Deterministic order: lexicographic over state index (declared order)
    then action index.  An empty decision-state set yields exactly one
    trivial policy.
    """
    states = mdp.decision_states
    for choice in itertools.product(mdp.actions, repeat=len(states)):
        yield Policy.from_mapping(dict(zip(states, choice)))


def policy_space(mdp: EpisodicMdp, enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> DecisionSpace:
    states = mdp.decision_states
    size = len(mdp.actions) ** len(states)

    def membership(m: Any) -> bool:
        if isinstance(m, Mapping) and not isinstance(m, Policy):
            m = Policy.from_mapping(m)
        if not isinstance(m, Policy):
            return False
        table = dict(m.assignments)
        return all(table.get(sid) in mdp.actions for sid in states)

    return DecisionSpace(
        generate=lambda: enumerate_policies(mdp),
        size=size,
        enumeration_cap=enumeration_cap,
        membership=membership,
    )


def mdp_to_fdmp(
    mdp: EpisodicMdp,
    w: Any,
    tau: float,
    rho: float,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> Fdmp:
    """Decision problem whose individuals are the initial states.

    Welfare of (initial state, policy) is the policy's expected cumulative
    welfare contribution from that state; cost is the negated expected
    cumulative reward.  Policy evaluations are memoized, so qualification
    by full enumeration stays cheap on the toy problems this targets.
    """
    steps = mdp.certified_horizon()
    entries = []
    for sid in sorted(mdp.initial):
        p = mdp.initial[sid]
        if p <= 0:
            continue
        state = mdp.state_by_id[sid]
        if state.group is None:
            raise WelfairError(f"initial state {sid!r} carries no group id")
        entries.append((Individual(attrs=state, group=state.group), p))
    population = Population.from_pairs(entries)

    welfare_cache: dict[tuple[Policy, str], float] = {}
    cost_cache: dict[tuple[Policy, str], float] = {}

    def as_policy(m: Any) -> Policy:
        if isinstance(m, Policy):
            return m
        if isinstance(m, Mapping):
            return Policy.from_mapping(m)
        raise UnknownAlgorithm(f"cannot interpret policy handle {m!r}")

    def welfare(ind: Individual, m: Any) -> float:
        policy = as_policy(m)
        key = (policy, ind.attrs.id)
        if key not in welfare_cache:
            welfare_cache[key] = expected_cumulative(mdp, w, policy, ind.attrs.id, horizon=steps)
        return welfare_cache[key]

    def cost(ind: Individual, m: Any) -> float:
        policy = as_policy(m)
        key = (policy, ind.attrs.id)
        if key not in cost_cache:
            cost_cache[key] = policy_cost(mdp, policy, ind.attrs.id, horizon=steps)
        return cost_cache[key]

    return Fdmp(
        population=population,
        decisions=policy_space(mdp, enumeration_cap),
        utilities=UtilityModel(welfare=welfare, cost=cost),
        thresholds=Thresholds(tau=tau, rho=rho),
    )


def eq_opp_mdp_static(
    mdp: EpisodicMdp,
    w: Any,
    policy: Policy | Mapping[str, str],
    alpha: float,
    p0: Mapping[str, float],
    *,
    epsilon: float = DEFAULT_EPSILON,
) -> FairnessVerdict:
    """Static-qualification baseline: equal E[welfare] for initial states scoring >= alpha.

    ``p0`` assigns each initial state a fixed qualification score (e.g.
    a first-step success probability); individuals qualify once and for
    all by clearing ``alpha``, and expected cumulative welfare -- not a
    thresholded probability -- is compared across groups.
    """
    # Thresholds play no role in the expected-value comparison.
    fdmp = mdp_to_fdmp(mdp, w, tau=0.0, rho=0.0)
    m = policy if isinstance(policy, Policy) else Policy.from_mapping(policy)
    return eq_opp_static_expected(
        fdmp, m, alpha, lambda ind: float(p0[ind.attrs.id]), epsilon=epsilon
    )


# ---------------------------------------------------------------------------
# Two-stage loan scenario
# ---------------------------------------------------------------------------

GRANT = "grant"
REJECT = "reject"

# Outcome-level parameters: per (applicant type, timestep, action) the joint
# distribution of outcomes with their welfare contribution and reward.
LOAN_OUTCOMES: dict[tuple[str, int, str], tuple[tuple[str, float, float, float], ...]] = {
    ("prime", 0, GRANT): (("repaid", 0.7, 2.0, 3.0), ("defaulted", 0.3, -1.0, 0.0)),
    ("subprime", 0, GRANT): (("repaid", 0.6, 2.0, 3.0), ("defaulted", 0.4, -1.0, 0.0)),
    ("prime", 1, GRANT): (("repaid", 0.8, 2.0, 3.0), ("defaulted", 0.2, -1.0, 0.0)),
    ("subprime", 1, GRANT): (("repaid", 0.7, 2.0, 3.0), ("defaulted", 0.3, -1.0, 0.0)),
    ("prime", 0, REJECT): (("rejected", 1.0, 0.0, 2.0),),
    ("subprime", 0, REJECT): (("rejected", 1.0, 0.0, 2.0),),
    ("prime", 1, REJECT): (("rejected", 1.0, 0.0, 2.0),),
    ("subprime", 1, REJECT): (("rejected", 1.0, 0.0, 2.0),),
}

# Initial mix: a minority applicant is prime with probability .34, a majority
# applicant with probability .66, and the two groups are equally likely.
LOAN_INITIAL: dict[tuple[str, int], float] = {
    ("prime", 0): 0.17,
    ("subprime", 0): 0.33,
    ("prime", 1): 0.33,
    ("subprime", 1): 0.17,
}

# First-step repayment probability per applicant type, used as the static
# qualification score of the baseline comparison.
LOAN_FIRST_REPAYMENT = {"prime": 0.7, "subprime": 0.6}

LOAN_TERMINAL = "done"


def loan_state_id(applicant: str, group: int, timestep: int) -> str:
    return f"{applicant}|z{group}|t{timestep}"


@dataclass(frozen=True)
class LoanApplicant:
    applicant: str
    timestep: int


def two_stage_loan_scenario() -> tuple[EpisodicMdp, WelfareContribution, Thresholds]:
    """The two-round loan decision process.

    Two applicant types apply for a loan in each of two timesteps; granting
    risks a default, rejecting is safe for the lender.  Per-step expected
    rewards and welfare contributions are derived from the outcome-level
    table ``LOAN_OUTCOMES``.  A good outcome for the applicant is at least
    one repaid loan (tau = 1); the lender tolerates at most one default's
    worth of cost (rho = -4).
    """
    states = []
    transitions: dict[tuple[str, str], dict[str, float]] = {}
    rewards: dict[tuple[str, str], float] = {}
    welfare: dict[tuple[str, str], float] = {}
    for applicant in ("prime", "subprime"):
        for group in (0, 1):
            for timestep in (0, 1):
                sid = loan_state_id(applicant, group, timestep)
                states.append(
                    MdpState(
                        id=sid,
                        group=group,
                        attrs=LoanApplicant(applicant=applicant, timestep=timestep),
                    )
                )
                succ = loan_state_id(applicant, group, 1) if timestep == 0 else LOAN_TERMINAL
                for action in (GRANT, REJECT):
                    outcomes = LOAN_OUTCOMES[(applicant, timestep, action)]
                    rewards[(sid, action)] = sum(p * r for _, p, _, r in outcomes)
                    welfare[(sid, action)] = sum(p * w for _, p, w, _ in outcomes)
                    transitions[(sid, action)] = {succ: 1.0}
    states.append(MdpState(id=LOAN_TERMINAL, absorbing=True))
    initial = {
        loan_state_id(applicant, group, 0): p
        for (applicant, group), p in LOAN_INITIAL.items()
    }
    mdp = EpisodicMdp(
        states=tuple(states),
        actions=(GRANT, REJECT),
        transitions=transitions,
        rewards=rewards,
        gamma=1.0,
        initial=initial,
        horizon=2,
    )
    return mdp, WelfareContribution(values=welfare), Thresholds(tau=1.0, rho=-4.0)


def loan_prime_policy(mdp: EpisodicMdp) -> Policy:
    """Grant to prime applicants, reject subprime applicants, in both rounds."""
    return Policy.from_mapping(
        {
            sid: (GRANT if mdp.state_by_id[sid].attrs.applicant == "prime" else REJECT)
            for sid in mdp.decision_states
        }
    )


def loan_fair_policy(mdp: EpisodicMdp) -> Policy:
    """Reject subprime applicants in the first round only; grant otherwise."""

    def choose(sid: str) -> str:
        attrs = mdp.state_by_id[sid].attrs
        if attrs.applicant == "subprime" and attrs.timestep == 0:
            return REJECT
        return GRANT

    return Policy.from_mapping({sid: choose(sid) for sid in mdp.decision_states})


def loan_first_repayment_scores(mdp: EpisodicMdp) -> dict[str, float]:
    """Static qualification scores for the loan scenario's initial states."""
    return {
        sid: LOAN_FIRST_REPAYMENT[mdp.state_by_id[sid].attrs.applicant]
        for sid in mdp.initial
    }
