"""Networks of timed automata with broadcast channels and bounded integers.

Time is a global integer; clocks advance in lockstep.  Three step kinds:

* broadcast: a component takes a send edge on a channel; every other
  component with an enabled receive edge on that channel must take one
  (the sender never blocks, ready receivers may not opt out).
* internal: handshake-free edges fire as a lockstep batch, one edge per
  component that has an enabled internal edge.  The models built here only
  enable internal edges at instants where the updates commute, so the batch
  is well defined.
* delay: all clocks advance by the maximal delay that keeps every location
  invariant satisfied without skipping a guard boundary.  Because every
  wait in this model family is exact (invariant x <= k against guard
  x == k), stepping straight to the next boundary loses no behavior.

A state with no successor of any kind is a deadlock.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

INTERNAL = "internal"
SEND = "send"
RECEIVE = "receive"

_CLOCK_OPS = ("<", "<=", "==", ">=", ">")
_VAR_OPS = ("<", "<=", "==", ">=", ">", "!=")
_INVARIANT_OPS = ("<", "<=")


class ModelError(ValueError):
    """Raised for ill-formed automata, guards or variable updates."""


@dataclass(frozen=True)
class ClockConstraint:
    """clock op bound, or (clock - minus_clock) op bound for difference form."""

    clock: str
    op: str
    bound: int
    minus_clock: str | None = None

    def __post_init__(self):
        if self.op not in _CLOCK_OPS:
            raise ModelError(f"bad clock operator {self.op!r}")

    def sat(self, values: dict[str, int]) -> bool:
        v = values[self.clock]
        if self.minus_clock is not None:
            v -= values[self.minus_clock]
        return _compare(v, self.op, self.bound)


@dataclass(frozen=True)
class VarConstraint:
    var: str
    op: str
    bound: int

    def __post_init__(self):
        if self.op not in _VAR_OPS:
            raise ModelError(f"bad variable operator {self.op!r}")

    def sat(self, env: dict[str, int]) -> bool:
        return _compare(env[self.var], self.op, self.bound)


def _compare(v: int, op: str, bound: int) -> bool:
    match op:
        case "<":
            return v < bound
        case "<=":
            return v <= bound
        case "==":
            return v == bound
        case ">=":
            return v >= bound
        case ">":
            return v > bound
        case "!=":
            return v != bound
    raise ModelError(f"bad operator {op!r}")


@dataclass(frozen=True)
class VarUpdate:
    """set: var := value; inc: var += value; inc_mod: var := (var + 1) % value."""

    var: str
    op: str
    value: int

    def __post_init__(self):
        if self.op not in ("set", "inc", "inc_mod"):
            raise ModelError(f"bad update operator {self.op!r}")

    def apply(self, current: int) -> int:
        match self.op:
            case "set":
                return self.value
            case "inc":
                return current + self.value
            case "inc_mod":
                return (current + 1) % self.value
        raise ModelError(f"bad update operator {self.op!r}")


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    kind: str = INTERNAL
    channel: str | None = None
    clock_guard: tuple[ClockConstraint, ...] = ()
    var_guard: tuple[VarConstraint, ...] = ()
    resets: tuple[str, ...] = ()
    updates: tuple[VarUpdate, ...] = ()

    def __post_init__(self):
        if self.kind not in (INTERNAL, SEND, RECEIVE):
            raise ModelError(f"bad edge kind {self.kind!r}")
        if self.kind == INTERNAL and self.channel is not None:
            raise ModelError("internal edges have no channel")
        if self.kind != INTERNAL and self.channel is None:
            raise ModelError(f"{self.kind} edge needs a channel")


@dataclass(frozen=True, eq=False)
class TimedAutomaton:
    name: str
    locations: tuple[str, ...]
    initial: str
    clocks: tuple[str, ...]
    edges: tuple[Edge, ...]
    invariants: dict[str, tuple[ClockConstraint, ...]]

    def __post_init__(self):
        locs = set(self.locations)
        if self.initial not in locs:
            raise ModelError(f"initial location {self.initial!r} not declared")
        clocks = set(self.clocks)
        for e in self.edges:
            if e.source not in locs or e.target not in locs:
                raise ModelError(f"edge {e.source!r} -> {e.target!r} uses undeclared locations")
            for c in e.clock_guard:
                if c.clock not in clocks or (c.minus_clock is not None and c.minus_clock not in clocks):
                    raise ModelError(f"edge guard uses undeclared clock: {c}")
            for r in e.resets:
                if r not in clocks:
                    raise ModelError(f"edge resets undeclared clock {r!r}")
        for loc, atoms in self.invariants.items():
            if loc not in locs:
                raise ModelError(f"invariant on undeclared location {loc!r}")
            for c in atoms:
                if c.op not in _INVARIANT_OPS:
                    raise ModelError("invariants must be upper bounds (< or <=)")
                if c.minus_clock is not None:
                    raise ModelError("difference constraints are not allowed in invariants")
                if c.clock not in clocks:
                    raise ModelError(f"invariant uses undeclared clock {c.clock!r}")

    @cached_property
    def edges_from(self) -> dict[str, tuple[Edge, ...]]:
        grouped: dict[str, list[Edge]] = {loc: [] for loc in self.locations}
        for e in self.edges:
            grouped[e.source].append(e)
        return {loc: tuple(es) for loc, es in grouped.items()}

    @cached_property
    def clock_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.clocks)}


@dataclass(frozen=True)
class SharedVar:
    name: str
    lo: int
    hi: int
    init: int

    def __post_init__(self):
        if not self.lo <= self.init <= self.hi:
            raise ModelError(f"variable {self.name!r}: init {self.init} outside [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class NetworkState:
    """locs[i] and clocks[i] belong to component i; vars follow declaration order.

    time is absolute elapsed time and is excluded from key(), which is the
    quotient used for state-graph deduplication.
    """

    locs: tuple[str, ...]
    clocks: tuple[tuple[int, ...], ...]
    vars: tuple[int, ...]
    time: int = 0

    def key(self):
        return (self.locs, self.clocks, self.vars)


@dataclass(frozen=True)
class Transition:
    state: NetworkState
    kind: str
    delay: int = 0
    fired: tuple[tuple[int, Edge], ...] = ()


@dataclass(frozen=True, eq=False)
class Network:
    automata: tuple[TimedAutomaton, ...]
    vars: tuple[SharedVar, ...] = ()

    def __post_init__(self):
        names = [v.name for v in self.vars]
        if len(set(names)) != len(names):
            raise ModelError("duplicate shared variable names")

    @cached_property
    def var_index(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.vars)}

    def initial_state(self) -> NetworkState:
        return NetworkState(
            locs=tuple(a.initial for a in self.automata),
            clocks=tuple((0,) * len(a.clocks) for a in self.automata),
            vars=tuple(v.init for v in self.vars),
            time=0,
        )


def _clock_env(auto: TimedAutomaton, values: tuple[int, ...]) -> dict[str, int]:
    return dict(zip(auto.clocks, values))


def _enabled(auto: TimedAutomaton, edge: Edge, clocks: tuple[int, ...], env: dict[str, int]) -> bool:
    cenv = _clock_env(auto, clocks)
    return all(c.sat(cenv) for c in edge.clock_guard) and all(v.sat(env) for v in edge.var_guard)


def _apply(net: Network, state: NetworkState, pairs: tuple[tuple[int, Edge], ...]) -> NetworkState | None:
    """Fire the given (component, edge) pairs in order; None if an invariant fails."""
    locs = list(state.locs)
    clocks = [list(c) for c in state.clocks]
    values = list(state.vars)
    for i, edge in pairs:
        auto = net.automata[i]
        locs[i] = edge.target
        for name in edge.resets:
            clocks[i][auto.clock_index[name]] = 0
        for up in edge.updates:
            vi = net.var_index[up.var]
            new = up.apply(values[vi])
            decl = net.vars[vi]
            if not decl.lo <= new <= decl.hi:
                raise ModelError(
                    f"update drives {decl.name!r} to {new}, outside [{decl.lo}, {decl.hi}]"
                )
            values[vi] = new
    for i, auto in enumerate(net.automata):
        cenv = _clock_env(auto, tuple(clocks[i]))
        for c in auto.invariants.get(locs[i], ()):
            if not c.sat(cenv):
                return None
    return NetworkState(
        locs=tuple(locs),
        clocks=tuple(tuple(c) for c in clocks),
        vars=tuple(values),
        time=state.time,
    )


def _max_delay(net: Network, state: NetworkState) -> int | None:
    """Maximal useful delay: bounded by invariant slack, snapped to the next
    lower-bound guard boundary so no edge enabling instant is skipped."""
    slack: int | None = None
    env = dict(zip((v.name for v in net.vars), state.vars))
    boundaries: list[int] = []
    for i, auto in enumerate(net.automata):
        cenv = _clock_env(auto, state.clocks[i])
        for c in auto.invariants.get(state.locs[i], ()):
            head = c.bound - cenv[c.clock] if c.op == "<=" else c.bound - 1 - cenv[c.clock]
            slack = head if slack is None else min(slack, head)
        for edge in auto.edges_from[state.locs[i]]:
            if not all(v.sat(env) for v in edge.var_guard):
                continue
            for c in edge.clock_guard:
                if c.minus_clock is not None or c.op in ("<", "<="):
                    continue
                v = cenv[c.clock]
                t = c.bound - v if c.op in ("==", ">=") else c.bound + 1 - v
                if t > 0:
                    boundaries.append(t)
    if slack is not None and slack <= 0:
        return None
    candidates = boundaries + ([slack] if slack is not None else [])
    if not candidates:
        return None
    return min(candidates)


def _advance(state: NetworkState, d: int) -> NetworkState:
    return NetworkState(
        locs=state.locs,
        clocks=tuple(tuple(v + d for v in row) for row in state.clocks),
        vars=state.vars,
        time=state.time + d,
    )


def successor_transitions(state: NetworkState, net: Network) -> list[Transition]:
    """All successor transitions: broadcasts by sender index, then the
    internal lockstep batches, then the delay step if one exists."""
    env = dict(zip((v.name for v in net.vars), state.vars))
    enabled: list[list[Edge]] = []
    for i, auto in enumerate(net.automata):
        enabled.append(
            [e for e in auto.edges_from[state.locs[i]] if _enabled(auto, e, state.clocks[i], env)]
        )

    out: list[Transition] = []
    for i, edges in enumerate(enabled):
        for edge in edges:
            if edge.kind != SEND:
                continue
            ready: list[list[tuple[int, Edge]]] = []
            for j, other in enumerate(enabled):
                if j == i:
                    continue
                receives = [(j, e) for e in other if e.kind == RECEIVE and e.channel == edge.channel]
                if receives:
                    ready.append(receives)
            for combo in product(*ready):
                pairs = tuple(sorted(((i, edge),) + combo))
                nxt = _apply(net, state, pairs)
                if nxt is not None:
                    out.append(Transition(nxt, "broadcast", fired=pairs))

    internal_choices = [
        [(i, e) for e in edges if e.kind == INTERNAL] for i, edges in enumerate(enabled)
    ]
    movers = [c for c in internal_choices if c]
    if movers:
        for combo in product(*movers):
            nxt = _apply(net, state, tuple(combo))
            if nxt is not None:
                out.append(Transition(nxt, "internal", fired=tuple(combo)))

    d = _max_delay(net, state)
    if d is not None:
        out.append(Transition(_advance(state, d), "delay", delay=d))
    return out


def successors(state: NetworkState, net: Network) -> list[NetworkState]:
    return [t.state for t in successor_transitions(state, net)]
