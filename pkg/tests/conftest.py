"""Shared test helpers: formula generators, protocol configs, mutation fixtures."""

from __future__ import annotations

import dataclasses
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from decmon import (
    FALSE,
    TRUE,
    Always,
    And,
    Atom,
    Eventually,
    Iff,
    Implies,
    LassoWord,
    Network,
    Next,
    Not,
    Or,
    Until,
    WcetConfig,
    build_network,
    parse_formula,
)
from decmon.protocol import LOC_EXEC, LOC_START

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

HEATING_TEXT = "G((!b0|!b1)&(t30->fan_on))"
HEATING_PRINTED = "G ((!b0 | !b1) & (t30 -> fan_on))"


@pytest.fixture
def heating():
    return parse_formula(HEATING_TEXT)


def make_cfg(n=4, fault_t=0, wcet_l=10, wcet_e=5, wcet_m=32, wcet_r=2, wcet_v=1, wcet_t=10):
    return WcetConfig(
        n=n,
        fault_t=fault_t,
        wcet_l=wcet_l,
        wcet_e=wcet_e,
        wcet_m=wcet_m,
        wcet_r=wcet_r,
        wcet_v=wcet_v,
        wcet_t=wcet_t,
    )


_UNARY = (Not, Next, Always, Eventually)
_BINARY = (And, Or, Implies, Iff, Until)


def random_formula(rng: random.Random, names=("p", "q", "r"), depth: int = 4):
    """Uniform-ish random formula of the given maximal depth."""
    if depth == 0 or rng.random() < 0.3:
        leaves = [TRUE, FALSE] + [Atom(n) for n in names]
        return leaves[rng.randrange(len(leaves))]
    ctor = (_UNARY + _BINARY)[rng.randrange(len(_UNARY) + len(_BINARY))]
    if ctor in _UNARY:
        return ctor(random_formula(rng, names, depth - 1))
    return ctor(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))


def random_sample(rng: random.Random, names=("p", "q", "r")) -> frozenset[str]:
    return frozenset(n for n in names if rng.random() < 0.5)


def random_lasso(rng: random.Random, names=("p", "q", "r"), max_stem=3, max_loop=2) -> LassoWord:
    stem = tuple(random_sample(rng, names) for _ in range(rng.randint(0, max_stem)))
    loop = tuple(random_sample(rng, names) for _ in range(rng.randint(1, max_loop)))
    return LassoWord(stem, loop)


def all_samples(names) -> list[frozenset[str]]:
    names = sorted(names)
    return [
        frozenset(n for i, n in enumerate(names) if mask >> i & 1)
        for mask in range(1 << len(names))
    ]


def formula_strategy(names=("p", "q", "r")):
    leaves = st.sampled_from((TRUE, FALSE) + tuple(Atom(n) for n in names))

    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(Next, children),
            st.builds(Always, children),
            st.builds(Eventually, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Implies, children, children),
            st.builds(Iff, children, children),
            st.builds(Until, children, children),
        )

    return st.recursive(leaves, extend, max_leaves=6)


def sample_strategy(names=("p", "q", "r")):
    return st.frozensets(st.sampled_from(tuple(names)))


def lasso_strategy(names=("p", "q", "r"), max_stem=3, max_loop=2):
    return st.builds(
        LassoWord,
        st.lists(sample_strategy(names), max_size=max_stem).map(tuple),
        st.lists(sample_strategy(names), min_size=1, max_size=max_loop).map(tuple),
    )


def drop_edges(auto, predicate):
    return dataclasses.replace(auto, edges=tuple(e for e in auto.edges if not predicate(e)))


def network_skipping_synch(cfg: WcetConfig) -> Network:
    """Component 1 lacks the initial synch? edge, so it never leaves start."""
    net = build_network(cfg)
    automata = list(net.automata)
    automata[1] = drop_edges(
        automata[1], lambda e: e.source == LOC_START and e.kind == "receive"
    )
    return Network(automata=tuple(automata), vars=net.vars)


def network_deadlocking(cfg: WcetConfig) -> Network:
    """Component 0 lacks the exec->sampling loop edge: one round then deadlock."""
    net = build_network(cfg)
    automata = list(net.automata)
    automata[0] = drop_edges(automata[0], lambda e: e.source == LOC_EXEC)
    return Network(automata=tuple(automata), vars=net.vars)
