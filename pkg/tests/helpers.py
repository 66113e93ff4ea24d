"""Oracles shared by the MDP tests and the acceptance suite."""

from __future__ import annotations

import math

import numpy as np

from welfair.mdp import EpisodicMdp, MdpState


def random_dag_mdp(rng, max_states=4, max_actions=3, groups=(0,)):
    """Random acyclic episodic MDP: one chain of states per group, shared terminal."""
    actions = tuple(f"a{i}" for i in range(rng.randint(1, max_actions)))
    states = []
    transitions = {}
    rewards = {}
    contrib = {}
    initial = {}
    for g in groups:
        n = rng.randint(1, max_states)
        chain = [f"g{g}s{i}" for i in range(n)]
        for i, sid in enumerate(chain):
            states.append(MdpState(id=sid, group=g))
            pool = chain[i + 1 :] + ["end"]
            for a in actions:
                k = rng.randint(1, min(3, len(pool)))
                chosen = rng.sample(pool, k)
                raw = [rng.randint(1, 5) for _ in chosen]
                total = sum(raw)
                row = {}
                acc = 0.0
                for succ, r in zip(chosen[:-1], raw[:-1]):
                    row[succ] = r / total
                    acc += r / total
                row[chosen[-1]] = 1.0 - acc
                transitions[(sid, a)] = row
                rewards[(sid, a)] = rng.randint(-8, 8) * 0.25
                contrib[(sid, a)] = rng.randint(-8, 8) * 0.25
        initial[chain[0]] = 1.0 / len(groups)
    states.append(MdpState(id="end", absorbing=True))
    mdp = EpisodicMdp(
        states=tuple(states),
        actions=actions,
        transitions=transitions,
        rewards=rewards,
        gamma=rng.choice([1.0, 0.9, 0.5]),
        initial=initial,
    )
    return mdp, contrib


def oracle_value(mdp, contrib, policy_table, sid, steps):
    """Independent recursive evaluator used to cross-check backward induction."""
    state = mdp.state_by_id[sid]
    if state.absorbing or steps == 0:
        return 0.0
    action = policy_table[sid]
    out = contrib[(sid, action)]
    for succ, p in mdp.transitions[(sid, action)].items():
        out += mdp.gamma * p * oracle_value(mdp, contrib, policy_table, succ, steps - 1)
    return out


def mc_estimate(mdp, contrib, policy_table, sid, steps, rng, episodes=100_000):
    """Monte-Carlo trajectory sampling; returns (mean, standard error)."""
    ids = [s.id for s in mdp.states]
    index = {s: i for i, s in enumerate(ids)}
    absorbing = np.array([s.absorbing for s in mdp.states])
    succ_choices = {}
    step_value = np.zeros(len(ids))
    for s in policy_table:  # policies cover exactly the reachable decision states
        i = index[s]
        row = mdp.transitions[(s, policy_table[s])]
        succs = np.array([index[t] for t in sorted(row)])
        probs = np.array([row[t] for t in sorted(row)])
        succ_choices[i] = (succs, probs / probs.sum())
        step_value[i] = contrib[(s, policy_table[s])]
    current = np.full(episodes, index[sid])
    returns = np.zeros(episodes)
    for t in range(steps):
        live = ~absorbing[current]
        if not live.any():
            break
        returns[live] += (mdp.gamma**t) * step_value[current[live]]
        nxt = current.copy()
        for i in np.unique(current[live]):
            mask = live & (current == i)
            succs, probs = succ_choices[i]
            nxt[mask] = rng.choice(succs, size=mask.sum(), p=probs)
        current = nxt
    return returns.mean(), returns.std(ddof=1) / math.sqrt(episodes)
