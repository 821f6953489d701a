"""The synchronous sampling protocol as a network of timed automata.

Each of the n components cycles through: sample local events (wcet_l),
n broadcast rounds disseminating local events (wcet_e each, the shared
counter s_id selects the sender), run the local monitor (wcet_m plus one
wcet_e to cover the last transmission), optionally exchange local results
(n rounds of wcet_r) and vote (wcet_v) when fault tolerance is on, then
execute the local task (wcet_t) and loop.  Component 0 drives the loop via
the synch broadcast and flips the shared cycle bit; each component's
s_clock is reset exactly when sampling restarts, so the cycle length can
be read off a clock.

The construction yields a deterministic network: every reachable state
has exactly one successor, because each wait is exact (invariant x <= k
paired with guard x == k) and broadcast rounds have a unique sender.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .timed import (
    ClockConstraint,
    Edge,
    Network,
    NetworkState,
    SharedVar,
    TimedAutomaton,
    VarConstraint,
    VarUpdate,
    successor_transitions,
)

LOC_START = "start"
LOC_SAMPLING = "sampling_local_events"
LOC_SENDING = "sending_receiving_events"
LOC_MONITORING = "local_monitoring"
LOC_RESULT = "send_receive_result"
LOC_VOTING = "voting"
LOC_EXEC = "exec_local_task"

CH_SYNCH = "synch"
CH_SEND = "send"

CLOCK_X = "x"
CLOCK_S = "s_clock"

VAR_SID = "s_id"
VAR_CYCLE = "cycle"

CONFIG_KEYS = ("n", "fault_t", "wcet_l", "wcet_e", "wcet_m", "wcet_r", "wcet_v", "wcet_t")


class ConfigError(ValueError):
    """Raised for invalid protocol configurations."""


@dataclass(frozen=True)
class WcetConfig:
    """Component count, fault-tolerance switch and per-phase WCET budgets."""

    n: int
    wcet_l: int
    wcet_e: int
    wcet_m: int
    wcet_t: int
    wcet_r: int = 1
    wcet_v: int = 1
    fault_t: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"need at least 2 components, got n={self.n}")
        for name in ("wcet_l", "wcet_e", "wcet_m", "wcet_r", "wcet_v", "wcet_t"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.fault_t not in (0, 1):
            raise ConfigError(f"fault_t must be 0 or 1, got {self.fault_t}")
        if self.fault_t == 1 and self.n % 2 == 0:
            raise ConfigError(f"fault tolerance needs an odd number of components for a strict majority, got n={self.n}")

    @classmethod
    def from_mapping(cls, mapping) -> "WcetConfig":
        unknown = sorted(set(mapping) - set(CONFIG_KEYS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            values = {k: int(v) for k, v in mapping.items()}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config values must be integers: {exc}") from exc
        missing = sorted(k for k in ("n", "wcet_l", "wcet_e", "wcet_m", "wcet_t") if k not in values)
        if missing:
            raise ConfigError(f"missing config keys: {', '.join(missing)}")
        return cls(**values)

    @classmethod
    def from_file(cls, path) -> "WcetConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_mapping(parse_config_text(fh.read()))


def parse_config_text(text: str) -> dict[str, int]:
    """Parse key=value lines; blank lines and # comments are skipped."""
    values: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key = key.strip()
        try:
            values[key] = int(value.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: value for {key!r} is not an integer") from exc
    return values


def build_component(comp_id: int, cfg: WcetConfig) -> TimedAutomaton:
    """One protocol component.  Component 0 drives synch; component n-1
    closes each dissemination phase.  5 locations, 7 with fault_t=1."""
    if not 0 <= comp_id < cfg.n:
        raise ConfigError(f"component id {comp_id} outside 0..{cfg.n - 1}")
    n = cfg.n
    last = n - 1
    reset_x = (CLOCK_X,)
    reset_both = (CLOCK_X, CLOCK_S)

    locations = [LOC_START, LOC_SAMPLING, LOC_SENDING, LOC_MONITORING, LOC_EXEC]
    invariants = {
        LOC_START: (ClockConstraint(CLOCK_X, "<=", 0),),
        LOC_SAMPLING: (ClockConstraint(CLOCK_X, "<=", cfg.wcet_l),),
        LOC_SENDING: (ClockConstraint(CLOCK_X, "<=", cfg.wcet_e),),
        LOC_MONITORING: (ClockConstraint(CLOCK_X, "<=", cfg.wcet_m + cfg.wcet_e),),
        LOC_EXEC: (ClockConstraint(CLOCK_X, "<=", cfg.wcet_t),),
    }
    if cfg.fault_t:
        locations[4:4] = [LOC_RESULT, LOC_VOTING]
        invariants[LOC_RESULT] = (ClockConstraint(CLOCK_X, "<=", cfg.wcet_r),)
        invariants[LOC_VOTING] = (ClockConstraint(CLOCK_X, "<=", cfg.wcet_v),)

    edges: list[Edge] = []

    # Everyone enters sampling together at time 0.
    if comp_id == 0:
        edges.append(Edge(LOC_START, LOC_SAMPLING, kind="send", channel=CH_SYNCH, resets=reset_both))
    else:
        edges.append(Edge(LOC_START, LOC_SAMPLING, kind="receive", channel=CH_SYNCH, resets=reset_both))

    # Dissemination round 0: component 0 broadcasts after the sampling wait.
    if comp_id == 0:
        edges.append(
            Edge(
                LOC_SAMPLING,
                LOC_SENDING,
                kind="send",
                channel=CH_SEND,
                clock_guard=(ClockConstraint(CLOCK_X, "==", cfg.wcet_l),),
                var_guard=(VarConstraint(VAR_SID, "==", 0),),
                resets=reset_x,
                updates=(VarUpdate(VAR_SID, "inc", 1),),
            )
        )
    else:
        edges.append(Edge(LOC_SAMPLING, LOC_SENDING, kind="receive", channel=CH_SEND, resets=reset_x))

    # Middle rounds 1..n-2: sender selected by s_id, one wcet_e wait each.
    if 1 <= comp_id <= n - 2:
        edges.append(
            Edge(
                LOC_SENDING,
                LOC_SENDING,
                kind="send",
                channel=CH_SEND,
                clock_guard=(ClockConstraint(CLOCK_X, "==", cfg.wcet_e),),
                var_guard=(VarConstraint(VAR_SID, "==", comp_id),),
                resets=reset_x,
                updates=(VarUpdate(VAR_SID, "inc", 1),),
            )
        )
    if n >= 3:
        edges.append(
            Edge(
                LOC_SENDING,
                LOC_SENDING,
                kind="receive",
                channel=CH_SEND,
                var_guard=(
                    VarConstraint(VAR_SID, "<=", n - 2),
                    VarConstraint(VAR_SID, "!=", comp_id),
                ),
                resets=reset_x,
            )
        )

    # Final round n-1 ends the dissemination phase.
    mon_entry_updates = (VarUpdate(VAR_SID, "set", 0),)
    if comp_id == last:
        edges.append(
            Edge(
                LOC_SENDING,
                LOC_MONITORING,
                kind="send",
                channel=CH_SEND,
                clock_guard=(ClockConstraint(CLOCK_X, "==", cfg.wcet_e),),
                var_guard=(VarConstraint(VAR_SID, "==", last),),
                resets=reset_x,
                updates=mon_entry_updates,
            )
        )
    else:
        edges.append(
            Edge(
                LOC_SENDING,
                LOC_MONITORING,
                kind="receive",
                channel=CH_SEND,
                var_guard=(VarConstraint(VAR_SID, "==", last),),
                resets=reset_x,
            )
        )

    # Monitoring: wcet_m plus one wcet_e covering the last transmission.
    mon_exit_target = LOC_RESULT if cfg.fault_t else LOC_EXEC
    edges.append(
        Edge(
            LOC_MONITORING,
            mon_exit_target,
            kind="internal",
            clock_guard=(ClockConstraint(CLOCK_X, "==", cfg.wcet_m + cfg.wcet_e),),
            resets=reset_x,
        )
    )

    if cfg.fault_t:
        # Result exchange: n rounds of wcet_r, same sender rotation.
        if comp_id <= n - 2:
            edges.append(
                Edge(
                    LOC_RESULT,
                    LOC_RESULT,
                    kind="send",
                    channel=CH_SEND,
                    clock_guard=(ClockConstraint(CLOCK_X, "==", cfg.wcet_r),),
                    var_guard=(VarConstraint(VAR_SID, "==", comp_id),),
                    resets=reset_x,
                    updates=(VarUpdate(VAR_SID, "inc", 1),),
                )
            )
        edges.append(
            Edge(
                LOC_RESULT,
                LOC_RESULT,
                kind="receive",
                channel=CH_SEND,
                var_guard=(
                    VarConstraint(VAR_SID, "<=", n - 2),
                    VarConstraint(VAR_SID, "!=", comp_id),
                ),
                resets=reset_x,
            )
        )
        if comp_id == last:
            edges.append(
                Edge(
                    LOC_RESULT,
                    LOC_VOTING,
                    kind="send",
                    channel=CH_SEND,
                    clock_guard=(ClockConstraint(CLOCK_X, "==", cfg.wcet_r),),
                    var_guard=(VarConstraint(VAR_SID, "==", last),),
                    resets=reset_x,
                    updates=(VarUpdate(VAR_SID, "set", 0),),
                )
            )
        else:
            edges.append(
                Edge(
                    LOC_RESULT,
                    LOC_VOTING,
                    kind="receive",
                    channel=CH_SEND,
                    var_guard=(VarConstraint(VAR_SID, "==", last),),
                    resets=reset_x,
                )
            )
        edges.append(
            Edge(
                LOC_VOTING,
                LOC_EXEC,
                kind="internal",
                clock_guard=(ClockConstraint(CLOCK_X, "==", cfg.wcet_v),),
                resets=reset_x,
            )
        )

    # Loop: component 0 restarts the cycle and flips the cycle bit.
    if comp_id == 0:
        edges.append(
            Edge(
                LOC_EXEC,
                LOC_SAMPLING,
                kind="send",
                channel=CH_SYNCH,
                clock_guard=(ClockConstraint(CLOCK_X, "==", cfg.wcet_t),),
                resets=reset_both,
                updates=(VarUpdate(VAR_CYCLE, "inc_mod", 2),),
            )
        )
    else:
        edges.append(Edge(LOC_EXEC, LOC_SAMPLING, kind="receive", channel=CH_SYNCH, resets=reset_both))

    return TimedAutomaton(
        name=f"C{comp_id}",
        locations=tuple(locations),
        initial=LOC_START,
        clocks=(CLOCK_X, CLOCK_S),
        edges=tuple(edges),
        invariants=invariants,
    )


def build_network(cfg: WcetConfig) -> Network:
    return Network(
        automata=tuple(build_component(i, cfg) for i in range(cfg.n)),
        vars=(
            SharedVar(VAR_SID, 0, cfg.n - 1, 0),
            SharedVar(VAR_CYCLE, 0, 1, 0),
        ),
    )


@dataclass(frozen=True)
class TimelineEvent:
    """A component entering a location at an absolute model time."""

    time: int
    component: int
    location: str


class DeadlockError(RuntimeError):
    """Raised when the simulated network has no successor."""


class NondeterminismError(RuntimeError):
    """Raised when the simulated network has more than one successor."""


def simulate(cfg: WcetConfig, rounds: int = 1, network: Network | None = None) -> list[TimelineEvent]:
    """Deterministic run of the protocol for the given number of sampling
    rounds; returns every location entry as a TimelineEvent."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    net = build_network(cfg) if network is None else network
    state = net.initial_state()
    events = [TimelineEvent(0, i, loc) for i, loc in enumerate(state.locs)]
    entries = 0
    while True:
        transitions = successor_transitions(state, net)
        if not transitions:
            raise DeadlockError(f"deadlock at time {state.time}")
        if len(transitions) > 1:
            raise NondeterminismError(f"{len(transitions)} successors at time {state.time}")
        step = transitions[0]
        state = step.state
        if step.kind == "delay":
            continue
        for comp, edge in step.fired:
            events.append(TimelineEvent(state.time, comp, edge.target))
        if any(edge.target == LOC_SAMPLING for _, edge in step.fired):
            entries += 1
            if entries > rounds:
                break
    return events


def timeline_csv(events) -> str:
    """CSV rendering with a time,component,location header."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time", "component", "location"])
    for e in events:
        writer.writerow([e.time, e.component, e.location])
    return buf.getvalue()


def ascii_timeline(events, n: int) -> str:
    """One row per instant with anything to show; '.' marks no entry."""
    instants: dict[int, dict[int, str]] = {}
    for e in events:
        instants.setdefault(e.time, {})[e.component] = e.location
    headers = ["time"] + [f"C{i}" for i in range(n)]
    rows = [
        [str(t)] + [cells.get(i, ".") for i in range(n)]
        for t, cells in sorted(instants.items())
    ]
    widths = [max(len(r[c]) for r in [headers] + rows) for c in range(n + 1)]
    lines = []
    for row in [headers] + rows:
        lines.append("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"
