"""Protocol model: config validation, component construction, deterministic runs."""

from __future__ import annotations

import dataclasses

import pytest

from decmon import (
    ClockConstraint,
    ConfigError,
    DeadlockError,
    Edge,
    Network,
    NondeterminismError,
    TimelineEvent,
    WcetConfig,
    ascii_timeline,
    build_component,
    build_network,
    parse_config_text,
    simulate,
    timeline_csv,
)
from decmon.protocol import (
    CLOCK_S,
    CLOCK_X,
    LOC_EXEC,
    LOC_MONITORING,
    LOC_RESULT,
    LOC_SAMPLING,
    LOC_SENDING,
    LOC_START,
    LOC_VOTING,
    VAR_SID,
)
from conftest import make_cfg, network_deadlocking


class TestWcetConfig:
    def test_valid(self):
        cfg = make_cfg()
        assert (cfg.n, cfg.fault_t, cfg.wcet_m) == (4, 0, 32)

    def test_too_few_components(self):
        with pytest.raises(ConfigError, match="n=1"):
            make_cfg(n=1)

    def test_wcets_must_be_positive(self):
        with pytest.raises(ConfigError, match="wcet_e"):
            make_cfg(wcet_e=0)
        with pytest.raises(ConfigError, match="wcet_m"):
            make_cfg(wcet_m=-3)

    def test_fault_t_is_a_switch(self):
        with pytest.raises(ConfigError, match="fault_t"):
            make_cfg(fault_t=2)

    def test_fault_tolerance_needs_odd_n(self):
        with pytest.raises(ConfigError, match="odd"):
            make_cfg(n=4, fault_t=1)
        make_cfg(n=3, fault_t=1)  # fine

    def test_from_mapping_defaults(self):
        cfg = WcetConfig.from_mapping({"n": 2, "wcet_l": 1, "wcet_e": 1, "wcet_m": 1, "wcet_t": 1})
        assert (cfg.wcet_r, cfg.wcet_v, cfg.fault_t) == (1, 1, 0)

    def test_from_mapping_unknown_key(self):
        with pytest.raises(ConfigError, match="wcet_z"):
            WcetConfig.from_mapping({"n": 2, "wcet_z": 1})

    def test_from_mapping_missing_keys(self):
        with pytest.raises(ConfigError, match="wcet_m"):
            WcetConfig.from_mapping({"n": 2, "wcet_l": 1, "wcet_e": 1, "wcet_t": 1})

    def test_from_mapping_rejects_non_integers(self):
        with pytest.raises(ConfigError, match="integer"):
            WcetConfig.from_mapping({"n": "two"})

    def test_config_text_parsing(self):
        values = parse_config_text("# comment\nn = 4\n\nwcet_l=10\n")
        assert values == {"n": 4, "wcet_l": 10}

    def test_config_text_errors_carry_line_numbers(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config_text("n=4\nnonsense\n")
        with pytest.raises(ConfigError, match="line 1"):
            parse_config_text("n=four\n")

    def test_from_file(self, tmp_path):
        path = tmp_path / "proto.cfg"
        path.write_text("n=4\nwcet_l=10\nwcet_e=5\nwcet_m=32\nwcet_t=10\n")
        assert WcetConfig.from_file(path) == make_cfg(wcet_r=1, wcet_v=1)


class TestBuildComponent:
    def test_component_id_range(self):
        with pytest.raises(ConfigError, match="outside"):
            build_component(4, make_cfg())

    def test_plain_component_has_five_locations(self):
        auto = build_component(1, make_cfg())
        assert auto.locations == (LOC_START, LOC_SAMPLING, LOC_SENDING, LOC_MONITORING, LOC_EXEC)
        assert auto.initial == LOC_START
        assert auto.clocks == (CLOCK_X, CLOCK_S)

    def test_fault_tolerant_component_has_seven_locations(self):
        auto = build_component(1, make_cfg(n=3, fault_t=1))
        assert auto.locations == (
            LOC_START,
            LOC_SAMPLING,
            LOC_SENDING,
            LOC_MONITORING,
            LOC_RESULT,
            LOC_VOTING,
            LOC_EXEC,
        )

    def test_component_zero_drives_both_synch_points(self):
        auto = build_component(0, make_cfg())
        sends = [e for e in auto.edges if e.kind == "send" and e.channel == "synch"]
        assert {(e.source, e.target) for e in sends} == {
            (LOC_START, LOC_SAMPLING),
            (LOC_EXEC, LOC_SAMPLING),
        }

    def test_other_components_receive_synch(self):
        auto = build_component(2, make_cfg())
        assert not any(e.kind == "send" and e.channel == "synch" for e in auto.edges)

    def test_sender_rotation(self):
        cfg = make_cfg()  # n=4
        first = build_component(0, cfg)
        (send0,) = [e for e in first.edges if e.kind == "send" and e.source == LOC_SAMPLING]
        assert send0.var_guard[0].var == VAR_SID and send0.var_guard[0].bound == 0

        middle = build_component(2, cfg)
        (loop,) = [
            e
            for e in middle.edges
            if e.kind == "send" and (e.source, e.target) == (LOC_SENDING, LOC_SENDING)
        ]
        assert loop.var_guard[0].bound == 2

        last = build_component(3, cfg)
        (closing,) = [
            e
            for e in last.edges
            if e.kind == "send" and (e.source, e.target) == (LOC_SENDING, LOC_MONITORING)
        ]
        assert closing.var_guard[0].bound == 3
        assert any(u.var == VAR_SID and u.op == "set" and u.value == 0 for u in closing.updates)

    def test_two_components_have_no_middle_rounds(self):
        cfg = make_cfg(n=2)
        for comp in (0, 1):
            auto = build_component(comp, cfg)
            assert not any(
                (e.source, e.target) == (LOC_SENDING, LOC_SENDING) for e in auto.edges
            )

    def test_phase_invariants(self):
        cfg = make_cfg()
        auto = build_component(0, cfg)
        bounds = {loc: cs[0].bound for loc, cs in auto.invariants.items()}
        assert bounds == {
            LOC_START: 0,
            LOC_SAMPLING: cfg.wcet_l,
            LOC_SENDING: cfg.wcet_e,
            LOC_MONITORING: cfg.wcet_m + cfg.wcet_e,
            LOC_EXEC: cfg.wcet_t,
        }

    def test_network_shares_sender_index_and_cycle_bit(self):
        net = build_network(make_cfg())
        assert [(v.name, v.lo, v.hi, v.init) for v in net.vars] == [
            ("s_id", 0, 3, 0),
            ("cycle", 0, 1, 0),
        ]


class TestSimulate:
    def test_plain_round_timeline(self):
        events = simulate(make_cfg(), rounds=1)
        c0 = [(e.time, e.location) for e in events if e.component == 0]
        assert c0 == [
            (0, LOC_START),
            (0, LOC_SAMPLING),
            (10, LOC_SENDING),
            (15, LOC_SENDING),
            (20, LOC_SENDING),
            (25, LOC_MONITORING),
            (62, LOC_EXEC),
            (72, LOC_SAMPLING),
        ]
        assert events[-1] == TimelineEvent(72, 3, LOC_SAMPLING)

    def test_fault_tolerant_round_timeline(self):
        events = simulate(make_cfg(n=3, fault_t=1), rounds=1)
        for comp in range(3):
            entries = [(e.time, e.location) for e in events if e.component == comp]
            assert entries == [
                (0, LOC_START),
                (0, LOC_SAMPLING),
                (10, LOC_SENDING),
                (15, LOC_SENDING),
                (20, LOC_MONITORING),
                (57, LOC_RESULT),
                (59, LOC_RESULT),
                (61, LOC_RESULT),
                (63, LOC_VOTING),
                (64, LOC_EXEC),
                (74, LOC_SAMPLING),
            ]

    def test_components_stay_in_lockstep(self):
        events = simulate(make_cfg(n=5, fault_t=1), rounds=1)
        sampling_returns = [e.time for e in events if e.location == LOC_SAMPLING and e.time > 0]
        assert len(sampling_returns) == 5
        assert set(sampling_returns) == {88}

    def test_runs_are_reproducible(self):
        assert simulate(make_cfg(), rounds=2) == simulate(make_cfg(), rounds=2)

    def test_multiple_rounds(self):
        events = simulate(make_cfg(), rounds=3)
        returns = sorted({e.time for e in events if e.location == LOC_SAMPLING and e.time > 0})
        assert returns == [72, 144, 216]

    def test_rounds_must_be_positive(self):
        with pytest.raises(ValueError, match="rounds"):
            simulate(make_cfg(), rounds=0)

    def test_deadlocked_network_is_reported(self):
        cfg = make_cfg()
        with pytest.raises(DeadlockError, match="time 72"):
            simulate(cfg, rounds=1, network=network_deadlocking(cfg))

    def test_nondeterministic_network_is_reported(self):
        cfg = make_cfg()
        net = build_network(cfg)
        first = net.automata[0]
        rogue = Edge(
            LOC_EXEC,
            LOC_EXEC,
            kind="internal",
            clock_guard=(ClockConstraint(CLOCK_X, "==", cfg.wcet_t),),
        )
        automata = (dataclasses.replace(first, edges=first.edges + (rogue,)),) + net.automata[1:]
        with pytest.raises(NondeterminismError, match="2 successors"):
            simulate(cfg, rounds=1, network=Network(automata=automata, vars=net.vars))


class TestRenderers:
    EVENTS = [
        TimelineEvent(0, 0, "start"),
        TimelineEvent(0, 1, "start"),
        TimelineEvent(5, 0, "exec_local_task"),
    ]

    def test_csv(self):
        assert timeline_csv(self.EVENTS) == (
            "time,component,location\n0,0,start\n0,1,start\n5,0,exec_local_task\n"
        )

    def test_ascii(self):
        assert ascii_timeline(self.EVENTS, 2) == (
            "time  C0               C1\n"
            "0     start            start\n"
            "5     exec_local_task  .\n"
        )

    def test_ascii_covers_a_real_run(self):
        text = ascii_timeline(simulate(make_cfg(), rounds=1), 4)
        lines = text.splitlines()
        assert lines[0].split() == ["time", "C0", "C1", "C2", "C3"]
        assert lines[1].split() == ["0", *["sampling_local_events"] * 4]
        assert lines[-1].split() == ["72", *["sampling_local_events"] * 4]
