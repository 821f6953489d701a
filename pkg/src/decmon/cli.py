"""Command-line interface: one subcommand per capability.

Exit codes: 0 success, 1 property violation or a definitely-violated
verdict (suppressed by --no-fail-on-violation), 2 usage or input errors.
All subcommands can emit machine-readable output with --json; those
objects are printed with sorted keys and compact separators so bytes are
stable across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .decentral import PartitionError, ScenarioError, load_scenario, report_json_line, run_scenario
from .formula import ParseError, atoms, format_formula, parse_formula
from .fsm import FsmStateCapError, build_fsm, export_fsm_dot, export_fsm_text
from .progression import (
    DEFAULT_MAX_SYMBOLS,
    FormulaSizeError,
    TraceFormatError,
    load_trace_jsonl,
    monitor_trace,
)
from .protocol import (
    CONFIG_KEYS,
    ConfigError,
    TimelineEvent,
    WcetConfig,
    ascii_timeline,
    parse_config_text,
    simulate,
    timeline_csv,
)
from .timed import ModelError
from .verdicts import Verdict3
from .verifier import (
    BudgetExceededError,
    check_liveness,
    check_sampling_period,
    check_synchronous_sampling,
    explore,
)
from .wcet import (
    TABLE1_BUS,
    BusModel,
    comm_report_rows,
    comm_wcet,
    cycles_to_seconds,
    sampling_frequency,
)

ENV_STATE_BUDGET = "DECMON_STATE_BUDGET"
_USAGE_ERRORS = (
    ParseError,
    ConfigError,
    ScenarioError,
    TraceFormatError,
    PartitionError,
    FormulaSizeError,
    FsmStateCapError,
    BudgetExceededError,
    ModelError,
    OSError,
    ValueError,
)


def _emit_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True, separators=(",", ":")))


def _split_alphabet(text: str | None):
    if text is None:
        return None
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise ValueError("alphabet is empty")
    return names


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key=value config file")
    for key in CONFIG_KEYS:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int, default=None)


def _config_from_args(args) -> WcetConfig:
    values: dict[str, int] = {}
    if args.config:
        values.update(parse_config_text(Path(args.config).read_text(encoding="utf-8")))
    for key in CONFIG_KEYS:
        given = getattr(args, key)
        if given is not None:
            values[key] = given
    return WcetConfig.from_mapping(values)


def _state_budget(args) -> int:
    if args.state_budget is not None:
        return args.state_budget
    return int(os.environ.get(ENV_STATE_BUDGET, "1000000"))


def _violation_exit(args) -> int:
    return 0 if args.no_fail_on_violation else 1


def _cmd_monitor(args) -> int:
    alphabet = _split_alphabet(args.alphabet)
    formula = parse_formula(args.formula, alphabet=alphabet)
    trace_alphabet = alphabet if alphabet is not None else atoms(formula)
    trace = load_trace_jsonl(args.trace, alphabet=trace_alphabet)
    limit = None if args.max_symbols == 0 else args.max_symbols
    run = monitor_trace(formula, trace, max_symbols=limit)
    if args.json:
        _emit_json(
            {
                "formula": format_formula(run.initial),
                "final": run.final_verdict.value,
                "steps": [
                    {
                        "step": i,
                        "props": sorted(step.sample),
                        "verdict": step.verdict.value,
                        "formula": format_formula(step.formula),
                    }
                    for i, step in enumerate(run.steps)
                ],
            }
        )
    else:
        for i, step in enumerate(run.steps):
            props = ",".join(sorted(step.sample)) if step.sample else "-"
            print(f"step {i}: props={props} verdict={step.verdict.value} formula={format_formula(step.formula)}")
        print(f"final: {run.final_verdict.value}")
    if run.final_verdict is Verdict3.BOT:
        return _violation_exit(args)
    return 0


def _cmd_build_fsm(args) -> int:
    alphabet = _split_alphabet(args.alphabet)
    formula = parse_formula(args.formula, alphabet=alphabet)
    fsm = build_fsm(formula, alphabet=alphabet, state_cap=args.state_cap)
    if args.json:
        transitions = [
            {"from": si, "props": sorted(fsm.mask_sample(mask)), "to": dst}
            for si, mask, dst in _fsm_transitions(fsm)
        ]
        _emit_json(
            {
                "alphabet": list(fsm.alphabet),
                "initial": fsm.initial,
                "states": [
                    {"id": si, "formula": format_formula(f), "verdict": fsm.verdicts[si].value}
                    for si, f in enumerate(fsm.states)
                ],
                "transitions": transitions,
            }
        )
    elif args.dot:
        print(export_fsm_dot(fsm), end="")
    else:
        print(export_fsm_text(fsm), end="")
    return 0


def _fsm_transitions(fsm):
    n_samples = 1 << len(fsm.alphabet)
    for si in range(len(fsm.states)):
        for mask in range(n_samples):
            if fsm.dense:
                yield si, mask, fsm.transitions[si][mask]
            else:
                yield si, mask, fsm.transitions[(si, mask)]


def _cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    events = simulate(cfg, rounds=args.rounds)
    if args.json:
        _emit_json(
            {"events": [{"time": e.time, "component": e.component, "location": e.location} for e in events]}
        )
    elif args.ascii:
        print(ascii_timeline(events, cfg.n), end="")
    else:
        print(timeline_csv(events), end="")
    return 0


def _witness_events(witness) -> list[TimelineEvent]:
    events: list[TimelineEvent] = []
    previous = None
    for state in witness:
        if previous is None:
            events.extend(TimelineEvent(state.time, i, loc) for i, loc in enumerate(state.locs))
        else:
            for i, loc in enumerate(state.locs):
                if previous.locs[i] != loc:
                    events.append(TimelineEvent(state.time, i, loc))
        previous = state
    return events


def _witness_json(witness):
    return [
        {
            "time": s.time,
            "locations": list(s.locs),
            "clocks": [list(row) for row in s.clocks],
            "vars": list(s.vars),
        }
        for s in witness
    ]


def _cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    budget = _state_budget(args)
    graph = explore(cfg, state_budget=budget, threads=args.threads)
    liveness = check_liveness(cfg, graph=graph)
    synch = check_synchronous_sampling(cfg, graph=graph)
    period = check_sampling_period(cfg, graph=graph)
    ok = liveness.holds and synch.holds and period.holds
    if args.json:
        payload = {
            "config": {key: getattr(cfg, key) for key in CONFIG_KEYS},
            "states": len(graph.nodes),
            "liveness": {"holds": liveness.holds},
            "synch_sampling": {"holds": synch.holds},
            "period": {
                "holds": period.holds,
                "expected": period.expected,
                "measured": list(period.measured),
            },
        }
        if liveness.witness:
            payload["liveness"]["witness"] = _witness_json(liveness.witness)
        if synch.witness:
            payload["synch_sampling"]["witness"] = _witness_json(synch.witness)
        if period.witness:
            payload["period"]["witness"] = _witness_json(period.witness)
        _emit_json(payload)
    else:
        print(f"liveness={'holds' if liveness.holds else 'violated'}")
        print(f"synch-sampling={'holds' if synch.holds else 'violated'}")
        if period.holds:
            print(f"period={period.expected}")
        else:
            measured = ",".join(map(str, period.measured)) or "-"
            print(f"period=violated expected={period.expected} measured={measured}")
        for name, result in (("liveness", liveness), ("synch-sampling", synch), ("period", period)):
            if result.witness:
                print(f"counterexample ({name}):")
                print(timeline_csv(_witness_events(result.witness)), end="")
    if not ok:
        return _violation_exit(args)
    return 0


def _cmd_decmon(args) -> int:
    scenario = load_scenario(args.scenario)
    reports = run_scenario(scenario)
    for report in reports:
        print(report_json_line(report))
    if reports and reports[-1].effective is Verdict3.BOT:
        return _violation_exit(args)
    return 0


def _cmd_wcet(args) -> int:
    if args.cycles is not None:
        if args.clock_hz is None:
            raise ValueError("--cycles needs --clock-hz")
        seconds = cycles_to_seconds(args.cycles, args.clock_hz, args.prescaler)
        if args.json:
            _emit_json(
                {
                    "cycles": args.cycles,
                    "clock_hz": args.clock_hz,
                    "prescaler": args.prescaler,
                    "seconds": seconds,
                }
            )
        else:
            print(f"seconds={seconds}")
        return 0
    if args.period:
        cfg = _config_from_args(args)
        period, frequency = sampling_frequency(cfg)
        if args.json:
            _emit_json({"period": period, "frequency": frequency})
        else:
            print(f"period={period}")
            print(f"frequency={frequency}")
        return 0
    bus = BusModel(
        token_msg_bytes=args.token_bytes,
        result_msg_bytes=args.result_bytes,
        synch_msg_bytes=args.synch_bytes,
        nodes=args.nodes,
        bits_per_byte_on_wire=args.wire_bits,
        baud=args.baud,
    )
    budget = comm_wcet(bus)
    if args.json:
        _emit_json(
            {
                "token_msg_bytes": bus.token_msg_bytes,
                "result_msg_bytes": bus.result_msg_bytes,
                "synch_msg_bytes": bus.synch_msg_bytes,
                "nodes": bus.nodes,
                "wire_bits_per_byte": bus.bits_per_byte_on_wire,
                "baud": bus.baud,
                "bytes_per_round": budget.total_bytes,
                "bits_per_round": budget.total_bits,
                "seconds": budget.seconds,
                "seconds_3dp": budget.seconds_3dp,
            }
        )
    else:
        rows = comm_report_rows(bus)
        width_property = max(len(r[0]) for r in rows)
        width_value = max(len(r[1]) for r in rows)
        for prop, value, description in rows:
            print(f"{prop.ljust(width_property)}  {value.ljust(width_value)}  {description}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decmon",
        description="Sample-based decentralized LTL monitoring toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_monitor = sub.add_parser("monitor", help="progress a formula over a JSONL trace")
    p_monitor.add_argument("-f", "--formula", required=True)
    p_monitor.add_argument("trace", help='JSONL file, one {"props": [...]} per line')
    p_monitor.add_argument("--alphabet", help="comma-separated proposition names")
    p_monitor.add_argument("--max-symbols", type=int, default=DEFAULT_MAX_SYMBOLS, help="formula growth cap, 0 disables")
    p_monitor.add_argument("--json", action="store_true")
    p_monitor.add_argument("--no-fail-on-violation", action="store_true")
    p_monitor.set_defaults(func=_cmd_monitor)

    p_fsm = sub.add_parser("build-fsm", help="tabulate the progression closure")
    p_fsm.add_argument("-f", "--formula", required=True)
    p_fsm.add_argument("--alphabet", help="comma-separated proposition names")
    p_fsm.add_argument("--state-cap", type=int, default=1024)
    group = p_fsm.add_mutually_exclusive_group()
    group.add_argument("--dot", action="store_true", help="GraphViz output")
    group.add_argument("--json", action="store_true")
    p_fsm.set_defaults(func=_cmd_build_fsm)

    p_sim = sub.add_parser("simulate", help="run the protocol timeline")
    _add_config_flags(p_sim)
    p_sim.add_argument("--rounds", type=int, default=1)
    group = p_sim.add_mutually_exclusive_group()
    group.add_argument("--ascii", action="store_true", help="ASCII diagram instead of CSV")
    group.add_argument("--json", action="store_true")
    p_sim.set_defaults(func=_cmd_simulate)

    p_verify = sub.add_parser("verify", help="check liveness, synchronous sampling and the period")
    _add_config_flags(p_verify)
    p_verify.add_argument("--state-budget", type=int, default=None, help=f"defaults to ${ENV_STATE_BUDGET} or 1000000")
    p_verify.add_argument("--threads", type=int, default=1)
    p_verify.add_argument("--json", action="store_true")
    p_verify.add_argument("--no-fail-on-violation", action="store_true")
    p_verify.set_defaults(func=_cmd_verify)

    p_dec = sub.add_parser("decmon", help="run a decentralized monitoring scenario")
    p_dec.add_argument("scenario", help="scenario JSON file")
    p_dec.add_argument("--json", action="store_true", help="output is JSON lines already; accepted for uniformity")
    p_dec.add_argument("--no-fail-on-violation", action="store_true")
    p_dec.set_defaults(func=_cmd_decmon)

    p_wcet = sub.add_parser("wcet", help="communication and timing budgets")
    p_wcet.add_argument("--table1", action="store_true", help="report for the reference bus model")
    p_wcet.add_argument("--token-bytes", type=int, default=TABLE1_BUS.token_msg_bytes)
    p_wcet.add_argument("--result-bytes", type=int, default=TABLE1_BUS.result_msg_bytes)
    p_wcet.add_argument("--synch-bytes", type=int, default=TABLE1_BUS.synch_msg_bytes)
    p_wcet.add_argument("--nodes", type=int, default=TABLE1_BUS.nodes)
    p_wcet.add_argument("--wire-bits", type=int, default=TABLE1_BUS.bits_per_byte_on_wire)
    p_wcet.add_argument("--baud", type=int, default=TABLE1_BUS.baud)
    p_wcet.add_argument("--period", action="store_true", help="closed-form sampling period for a config")
    _add_config_flags(p_wcet)
    p_wcet.add_argument("--cycles", type=int, default=None)
    p_wcet.add_argument("--clock-hz", type=float, default=None)
    p_wcet.add_argument("--prescaler", type=int, default=1)
    p_wcet.add_argument("--json", action="store_true")
    p_wcet.set_defaults(func=_cmd_wcet)

    return parser


def dispatch(argv=None) -> int:
    """Parse argv and run one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"decmon: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
