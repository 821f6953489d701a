"""Decentralized monitoring rounds: local sampling, dissemination, identical
local monitors, and optional majority voting.

Each round merges the per-component local samples into the global sample
(the dissemination phase makes it common knowledge), steps every
component's own progression monitor on that merged sample, applies any
injected verdict flips, and votes when fault tolerance is on.  Round r is
stamped with time r x period, the cycle length of the timed protocol
model.  The run stops once the effective verdict is definite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .formula import Formula, atoms, parse_formula
from .progression import Monitor, load_trace_jsonl
from .protocol import WcetConfig
from .verdicts import Verdict3
from .wcet import sampling_period


class PartitionError(ValueError):
    """Raised when local alphabets overlap or do not cover the formula."""


@dataclass(frozen=True)
class Partition:
    """Pairwise-disjoint local alphabets, one per component."""

    alphabets: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "alphabets", tuple(frozenset(a) for a in self.alphabets))
        seen: set[str] = set()
        for i, alpha in enumerate(self.alphabets):
            overlap = seen & alpha
            if overlap:
                raise PartitionError(
                    f"component {i} shares propositions with an earlier one: {sorted(overlap)}"
                )
            seen |= alpha

    @property
    def alphabet(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for alpha in self.alphabets:
            out |= alpha
        return out

    def __len__(self) -> int:
        return len(self.alphabets)


@dataclass(frozen=True)
class FaultInjection:
    """Force one component's reported verdict in one round."""

    round: int
    component: int
    verdict: Verdict3


@dataclass(frozen=True)
class RoundReport:
    round: int
    time: int
    merged: frozenset[str]
    verdicts: tuple[Verdict3, ...]
    voted: Verdict3 | None

    @property
    def effective(self) -> Verdict3:
        """The verdict the round acts on: the vote when present, otherwise
        the unanimous verdict (UNKNOWN when components disagree)."""
        if self.voted is not None:
            return self.voted
        first = self.verdicts[0]
        return first if all(v == first for v in self.verdicts) else Verdict3.UNKNOWN


def vote(verdicts) -> Verdict3:
    """Strict-majority vote; UNKNOWN when no value exceeds half."""
    tallies: dict[Verdict3, int] = {}
    count = 0
    for v in verdicts:
        tallies[v] = tallies.get(v, 0) + 1
        count += 1
    if count == 0:
        raise ValueError("vote needs at least one verdict")
    for value, tally in tallies.items():
        if tally * 2 > count:
            return value
    return Verdict3.UNKNOWN


def run_decentralized(
    f: Formula,
    partition: Partition,
    local_traces,
    cfg: WcetConfig,
    faults=(),
) -> list[RoundReport]:
    """Run the synchronous rounds; see the module docstring for the shape.

    Local traces must all have the same length and stay within their
    component's alphabet; the formula's propositions must be covered by
    the partition.
    """
    n = len(partition)
    if cfg.n != n:
        raise PartitionError(f"config has n={cfg.n} but partition has {n} alphabets")
    traces = [list(t) for t in local_traces]
    if len(traces) != n:
        raise PartitionError(f"expected {n} local traces, got {len(traces)}")
    lengths = {len(t) for t in traces}
    if len(lengths) > 1:
        raise PartitionError(f"local traces have differing lengths: {sorted(lengths)}")
    missing = atoms(f) - partition.alphabet
    if missing:
        raise PartitionError(f"formula propositions outside the partition: {sorted(missing)}")
    for i, trace in enumerate(traces):
        for r, sample in enumerate(trace):
            extra = frozenset(sample) - partition.alphabets[i]
            if extra:
                raise PartitionError(
                    f"component {i}, round {r}: sampled propositions outside its alphabet: {sorted(extra)}"
                )
    flips: dict[tuple[int, int], Verdict3] = {}
    for fault in faults:
        if not 0 <= fault.component < n:
            raise ValueError(f"fault targets component {fault.component}, valid range is 0..{n - 1}")
        flips[(fault.round, fault.component)] = fault.verdict

    period = sampling_period(cfg)
    monitors = [Monitor(f) for _ in range(n)]
    reports: list[RoundReport] = []
    rounds = lengths.pop() if lengths else 0
    for r in range(rounds):
        merged = frozenset().union(*(traces[i][r] for i in range(n))) if n else frozenset()
        reported = []
        for i, mon in enumerate(monitors):
            actual = mon.step(merged)
            reported.append(flips.get((r, i), actual))
        voted = vote(reported) if cfg.fault_t else None
        report = RoundReport(
            round=r,
            time=r * period,
            merged=merged,
            verdicts=tuple(reported),
            voted=voted,
        )
        reports.append(report)
        if report.effective.is_definite:
            break
    return reports


@dataclass(frozen=True)
class Scenario:
    formula: Formula
    partition: Partition
    traces: tuple[tuple[frozenset[str], ...], ...]
    cfg: WcetConfig
    faults: tuple[FaultInjection, ...]


class ScenarioError(ValueError):
    """Raised for malformed scenario files."""


def load_scenario(path) -> Scenario:
    """Scenario JSON: formula text, partition lists, per-component trace
    file paths (relative to the scenario file), config mapping, fault list."""
    scenario_path = Path(path)
    try:
        data = json.loads(scenario_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{scenario_path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{scenario_path}: expected a JSON object")
    for key in ("formula", "partition", "traces", "config"):
        if key not in data:
            raise ScenarioError(f"{scenario_path}: missing {key!r}")
    partition = Partition(tuple(frozenset(a) for a in data["partition"]))
    formula = parse_formula(data["formula"], alphabet=partition.alphabet)
    cfg = WcetConfig.from_mapping(data["config"])
    trace_paths = data["traces"]
    if len(trace_paths) != len(partition):
        raise ScenarioError(
            f"{scenario_path}: {len(trace_paths)} trace files for {len(partition)} components"
        )
    traces = tuple(
        tuple(load_trace_jsonl(scenario_path.parent / p, alphabet=partition.alphabets[i]))
        for i, p in enumerate(trace_paths)
    )
    faults = []
    for entry in data.get("faults", ()):
        try:
            faults.append(
                FaultInjection(
                    round=int(entry["round"]),
                    component=int(entry["component"]),
                    verdict=Verdict3(entry["verdict"]),
                )
            )
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"{scenario_path}: bad fault entry {entry!r}: {exc}") from exc
    return Scenario(formula, partition, traces, cfg, tuple(faults))


def run_scenario(scenario: Scenario) -> list[RoundReport]:
    return run_decentralized(
        scenario.formula,
        scenario.partition,
        scenario.traces,
        scenario.cfg,
        scenario.faults,
    )


def report_json_line(report: RoundReport) -> str:
    """One RoundReport as a stable JSON line."""
    return json.dumps(
        {
            "round": report.round,
            "time": report.time,
            "merged": sorted(report.merged),
            "verdicts": [v.value for v in report.verdicts],
            "voted": report.voted.value if report.voted is not None else None,
        },
        sort_keys=True,
        separators=(",", ":"),
    )
