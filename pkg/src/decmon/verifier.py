"""Explicit-state verification of the sampling protocol's timing properties.

The protocol network is finite once absolute time is dropped from the
state (clocks are bounded by the location invariants, shared variables by
their ranges), so a BFS closure gives a complete graph to check:

* synchronous sampling: no reachable state has one component sampling
  while another is elsewhere.
* liveness: every sampling state with cycle bit c is inevitably followed
  by a sampling state with bit 1-c.  On a finite graph this fails exactly
  when some reachable cycle or deadlock avoids the target states.
* sampling period: the s_clock value at every re-entry into sampling
  equals the closed-form period.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .protocol import LOC_EXEC, LOC_SAMPLING, VAR_CYCLE, WcetConfig, build_network
from .timed import Network, NetworkState, successors
from .wcet import sampling_period

DEFAULT_STATE_BUDGET = 1_000_000

Key = tuple


class BudgetExceededError(RuntimeError):
    """Raised when exploration would exceed the state budget."""

    def __init__(self, budget: int):
        super().__init__(f"exploration exceeds the budget of {budget} states")
        self.budget = budget


@dataclass(frozen=True, eq=False)
class StateGraph:
    """BFS closure of the network's reachable states, keyed without time."""

    network: Network
    nodes: dict[Key, NetworkState]
    succ: dict[Key, tuple[Key, ...]]
    parent: dict[Key, Key | None]
    initial: Key

    def path_to(self, key: Key) -> list[NetworkState]:
        """The BFS tree path from the initial state to key, inclusive."""
        keys: list[Key] = []
        cursor: Key | None = key
        while cursor is not None:
            keys.append(cursor)
            cursor = self.parent[cursor]
        keys.reverse()
        return [self.nodes[k] for k in keys]


def explore(
    cfg: WcetConfig | None = None,
    state_budget: int = DEFAULT_STATE_BUDGET,
    network: Network | None = None,
    threads: int = 1,
) -> StateGraph:
    """BFS closure from the initial state.

    The network defaults to the protocol model for cfg; passing network
    directly supports mutated fixtures.  threads > 1 expands each BFS
    frontier in a thread pool; successor computation is pure, and results
    are merged in frontier order, so the graph is identical to a serial run.
    """
    if state_budget < 1:
        raise ValueError("state_budget must be >= 1")
    net = build_network(cfg) if network is None else network
    init = net.initial_state()
    init_key = init.key()
    nodes: dict[Key, NetworkState] = {init_key: init}
    succ: dict[Key, tuple[Key, ...]] = {}
    parent: dict[Key, Key | None] = {init_key: None}

    def expand(key: Key) -> list[NetworkState]:
        return successors(nodes[key], net)

    frontier: list[Key] = [init_key]
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier:
            mapper = pool.map if pool is not None else map
            expansions = list(mapper(expand, frontier))
            next_frontier: list[Key] = []
            for key, states in zip(frontier, expansions):
                out: list[Key] = []
                for s in states:
                    k = s.key()
                    if k not in nodes:
                        if len(nodes) >= state_budget:
                            raise BudgetExceededError(state_budget)
                        nodes[k] = s
                        parent[k] = key
                        next_frontier.append(k)
                    if k not in out:
                        out.append(k)
                succ[key] = tuple(out)
            frontier = next_frontier
    finally:
        if pool is not None:
            pool.shutdown()
    return StateGraph(network=net, nodes=nodes, succ=succ, parent=parent, initial=init_key)


@dataclass
class CheckResult:
    """holds plus, when it does not, a replayable counterexample path."""

    holds: bool
    witness: list[NetworkState] | None = None


@dataclass
class SamplingPeriodResult(CheckResult):
    expected: int = 0
    measured: tuple[int, ...] = ()


def _graph(cfg, state_budget, network, graph) -> StateGraph:
    if graph is not None:
        return graph
    return explore(cfg, state_budget=state_budget, network=network)


def check_synchronous_sampling(
    cfg: WcetConfig | None = None,
    state_budget: int = DEFAULT_STATE_BUDGET,
    network: Network | None = None,
    graph: StateGraph | None = None,
) -> CheckResult:
    """No reachable state may have components disagreeing on being in
    sampling_local_events."""
    g = _graph(cfg, state_budget, network, graph)
    for key, state in g.nodes.items():
        sampling = [loc == LOC_SAMPLING for loc in state.locs]
        if any(sampling) and not all(sampling):
            return CheckResult(False, witness=g.path_to(key))
    return CheckResult(True)


def _avoiding_violation(g: StateGraph, start: Key, target) -> list[Key] | None:
    """DFS from start through non-target states; returns a path to a
    deadlock, or a path closing a cycle (last key repeats an earlier one),
    when one exists.  Reaching a target state closes that branch."""
    path: list[Key] = [start]
    on_path: set[Key] = {start}
    iters = [iter(g.succ[start])]
    visited: set[Key] = {start}
    if not g.succ[start]:
        return path
    while iters:
        nxt = next(iters[-1], None)
        if nxt is None:
            iters.pop()
            on_path.discard(path.pop())
            continue
        if target(g.nodes[nxt]):
            continue
        if nxt in on_path:
            return path + [nxt]
        if nxt in visited:
            continue
        if not g.succ.get(nxt):
            return path + [nxt]
        visited.add(nxt)
        path.append(nxt)
        on_path.add(nxt)
        iters.append(iter(g.succ[nxt]))
    return None


def check_liveness(
    cfg: WcetConfig | None = None,
    state_budget: int = DEFAULT_STATE_BUDGET,
    network: Network | None = None,
    graph: StateGraph | None = None,
) -> CheckResult:
    """Leads-to in both directions: for every component, sampling with
    cycle bit c is always eventually followed by sampling with bit 1-c."""
    g = _graph(cfg, state_budget, network, graph)
    cycle_idx = g.network.var_index[VAR_CYCLE]
    n = len(g.network.automata)
    for i in range(n):
        for c in (0, 1):
            def target(s: NetworkState, i=i, c=c) -> bool:
                return s.locs[i] == LOC_SAMPLING and s.vars[cycle_idx] == 1 - c

            for key, state in g.nodes.items():
                if state.locs[i] == LOC_SAMPLING and state.vars[cycle_idx] == c:
                    bad = _avoiding_violation(g, key, target)
                    if bad is not None:
                        prefix = g.path_to(key)
                        return CheckResult(False, witness=prefix + [g.nodes[k] for k in bad[1:]])
    return CheckResult(True)


def check_sampling_period(
    cfg: WcetConfig | None = None,
    state_budget: int = DEFAULT_STATE_BUDGET,
    network: Network | None = None,
    graph: StateGraph | None = None,
    expected: int | None = None,
) -> SamplingPeriodResult:
    """s_clock must equal the closed-form period at every re-entry into
    sampling_local_events (the initial entry from start is excluded)."""
    g = _graph(cfg, state_budget, network, graph)
    if expected is None:
        if cfg is None:
            raise ValueError("need cfg or an explicit expected period")
        expected = sampling_period(cfg)
    measured: list[int] = []
    for key, state in g.nodes.items():
        for succ_key in g.succ[key]:
            succ_state = g.nodes[succ_key]
            for i, auto in enumerate(g.network.automata):
                if state.locs[i] == LOC_EXEC and succ_state.locs[i] == LOC_SAMPLING:
                    value = state.clocks[i][auto.clock_index["s_clock"]]
                    if value not in measured:
                        measured.append(value)
                    if value != expected:
                        return SamplingPeriodResult(
                            False,
                            witness=g.path_to(key),
                            expected=expected,
                            measured=tuple(sorted(measured)),
                        )
    if not measured:
        return SamplingPeriodResult(False, witness=g.path_to(g.initial), expected=expected, measured=())
    return SamplingPeriodResult(True, expected=expected, measured=tuple(sorted(measured)))
