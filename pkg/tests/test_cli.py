"""Command-line interface: golden outputs, exit codes, flag plumbing."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from decmon.cli import dispatch
from test_decentral import write_heating_scenario

VERIFY_ARGS = [
    "verify",
    "--n", "4", "--fault-t", "0",
    "--wcet-l", "10", "--wcet-e", "5", "--wcet-m", "32", "--wcet-t", "10",
]

WCET_TABLE_JSON = (
    '{"baud":4800,"bits_per_round":2810,"bytes_per_round":281,"nodes":4,'
    '"result_msg_bytes":4,"seconds":0.5854166666666667,"seconds_3dp":0.585,'
    '"synch_msg_bytes":1,"token_msg_bytes":66,"wire_bits_per_byte":10}'
)


@pytest.fixture
def heating_trace(tmp_path):
    path = tmp_path / "trace.jsonl"
    path.write_text('{"props": ["b0"]}\n{"props": ["b0", "b1"]}\n')
    return str(path)


class TestMonitorCommand:
    FORMULA = "G((!b0|!b1)&(t30->fan_on))"

    def test_human_output_and_violation_exit(self, capsys, heating_trace):
        code = dispatch(["monitor", "-f", self.FORMULA, heating_trace])
        out = capsys.readouterr().out
        assert out == (
            "step 0: props=b0 verdict=unknown formula=G ((!b0 | !b1) & (t30 -> fan_on))\n"
            "step 1: props=b0,b1 verdict=bot formula=false\n"
            "final: bot\n"
        )
        assert code == 1

    def test_json_output(self, capsys, heating_trace):
        code = dispatch(["monitor", "-f", self.FORMULA, heating_trace, "--json"])
        out = capsys.readouterr().out
        assert out == (
            '{"final":"bot","formula":"G ((!b0 | !b1) & (t30 -> fan_on))","steps":['
            '{"formula":"G ((!b0 | !b1) & (t30 -> fan_on))","props":["b0"],"step":0,"verdict":"unknown"},'
            '{"formula":"false","props":["b0","b1"],"step":1,"verdict":"bot"}]}\n'
        )
        assert code == 1

    def test_no_fail_on_violation(self, heating_trace, capsys):
        code = dispatch(["monitor", "-f", self.FORMULA, heating_trace, "--no-fail-on-violation"])
        capsys.readouterr()
        assert code == 0

    def test_satisfied_prefix_exits_zero(self, tmp_path, capsys):
        trace = tmp_path / "ok.jsonl"
        trace.write_text('{"props": ["p"]}\n')
        assert dispatch(["monitor", "-f", "F p", str(trace)]) == 0
        assert capsys.readouterr().out.endswith("final: top\n")

    def test_alphabet_flag_admits_extra_props(self, tmp_path, capsys):
        trace = tmp_path / "t.jsonl"
        trace.write_text('{"props": ["q"]}\n')
        code = dispatch(["monitor", "-f", "F p", str(trace), "--alphabet", "p,q"])
        capsys.readouterr()
        assert code == 0

    def test_props_outside_formula_alphabet_fail(self, tmp_path, capsys):
        trace = tmp_path / "t.jsonl"
        trace.write_text('{"props": ["q"]}\n')
        code = dispatch(["monitor", "-f", "F p", str(trace)])
        err = capsys.readouterr().err
        assert code == 2 and "q" in err

    def test_growth_cap(self, tmp_path, capsys):
        trace = tmp_path / "t.jsonl"
        trace.write_text('{"props": ["p"]}\n{"props": ["q"]}\n')
        formula = "F (p & F (q & F r))"
        code = dispatch(["monitor", "-f", formula, str(trace), "--max-symbols", "12"])
        assert code == 2
        assert "12" in capsys.readouterr().err
        code = dispatch(["monitor", "-f", formula, str(trace), "--max-symbols", "0"])
        capsys.readouterr()
        assert code == 0

    def test_parse_error_exits_two(self, heating_trace, capsys):
        code = dispatch(["monitor", "-f", "G (", heating_trace])
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestBuildFsmCommand:
    def test_text_output(self, capsys):
        assert dispatch(["build-fsm", "-f", "p U q"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("alphabet p,q\nstate 0 unknown p U q\n")
        assert "0 p,q 2\n" in out

    def test_dot_output(self, capsys):
        assert dispatch(["build-fsm", "-f", "p U q", "--dot"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("digraph monitor {")

    def test_json_output(self, capsys):
        assert dispatch(["build-fsm", "-f", "p U q", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["alphabet"] == ["p", "q"]
        assert [s["verdict"] for s in data["states"]] == ["unknown", "bot", "top"]
        assert {"from": 0, "props": ["q"], "to": 2} in data["transitions"]

    def test_state_cap_exits_two(self, capsys):
        code = dispatch(["build-fsm", "-f", "G (p | X q)", "--state-cap", "1"])
        assert code == 2
        assert "cap" in capsys.readouterr().err


class TestSimulateCommand:
    ARGS = ["simulate", "--n", "4", "--wcet-l", "10", "--wcet-e", "5", "--wcet-m", "32", "--wcet-t", "10"]

    def test_csv_default(self, capsys):
        assert dispatch(self.ARGS) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "time,component,location"
        assert lines[1] == "0,0,start"
        assert lines[-1] == "72,3,sampling_local_events"

    def test_ascii(self, capsys):
        assert dispatch(self.ARGS + ["--ascii"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split() == ["time", "C0", "C1", "C2", "C3"]

    def test_json(self, capsys):
        assert dispatch(self.ARGS + ["--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["events"][0] == {"time": 0, "component": 0, "location": "start"}

    def test_config_file_with_flag_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "proto.cfg"
        cfg.write_text("n=4\nwcet_l=10\nwcet_e=5\nwcet_m=32\nwcet_t=10\n")
        assert dispatch(["simulate", "--config", str(cfg), "--n", "2"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[-1].startswith("62,1,")  # n=2: 10 + 2*5 + 32 + 10


class TestVerifyCommand:
    def test_human_output(self, capsys):
        assert dispatch(VERIFY_ARGS) == 0
        assert capsys.readouterr().out == "liveness=holds\nsynch-sampling=holds\nperiod=72\n"

    def test_json_output(self, capsys):
        assert dispatch(VERIFY_ARGS + ["--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["liveness"] == {"holds": True}
        assert data["synch_sampling"] == {"holds": True}
        assert data["period"] == {"holds": True, "expected": 72, "measured": [72]}
        assert data["config"]["n"] == 4 and data["config"]["wcet_r"] == 1
        assert data["states"] > 0

    def test_threads_flag(self, capsys):
        assert dispatch(VERIFY_ARGS + ["--threads", "4"]) == 0
        assert capsys.readouterr().out.endswith("period=72\n")

    def test_state_budget_flag(self, capsys):
        code = dispatch(VERIFY_ARGS + ["--state-budget", "5"])
        assert code == 2
        assert "budget of 5" in capsys.readouterr().err

    def test_state_budget_env(self, capsys, monkeypatch):
        monkeypatch.setenv("DECMON_STATE_BUDGET", "5")
        assert dispatch(VERIFY_ARGS) == 2
        assert "budget of 5" in capsys.readouterr().err
        monkeypatch.setenv("DECMON_STATE_BUDGET", "100000")
        assert dispatch(VERIFY_ARGS) == 0
        capsys.readouterr()

    def test_invalid_config_exits_two(self, capsys):
        code = dispatch(["verify", "--n", "1", "--wcet-l", "1", "--wcet-e", "1", "--wcet-m", "1", "--wcet-t", "1"])
        assert code == 2
        assert "n=1" in capsys.readouterr().err


class TestDecmonCommand:
    def test_scenario_run(self, tmp_path, capsys):
        path = write_heating_scenario(tmp_path)
        code = dispatch(["decmon", str(path)])
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 3
        assert lines[-1] == (
            '{"merged":["b0","b1"],"round":2,"time":148,'
            '"verdicts":["bot","bot","bot"],"voted":"bot"}'
        )
        assert code == 1

    def test_no_fail_on_violation(self, tmp_path, capsys):
        path = write_heating_scenario(tmp_path)
        assert dispatch(["decmon", str(path), "--no-fail-on-violation"]) == 0
        capsys.readouterr()

    def test_missing_scenario_exits_two(self, capsys):
        assert dispatch(["decmon", "/does/not/exist.json"]) == 2
        capsys.readouterr()


class TestWcetCommand:
    def test_table_json_golden(self, capsys):
        assert dispatch(["wcet", "--table1", "--json"]) == 0
        assert capsys.readouterr().out == WCET_TABLE_JSON + "\n"

    def test_table_human_report(self, capsys):
        assert dispatch(["wcet", "--table1"]) == 0
        out = capsys.readouterr().out
        assert "281 bytes" in out and "2810 bits" in out and "0.585 s" in out

    def test_custom_bus_flags(self, capsys):
        assert dispatch(["wcet", "--token-bytes", "1", "--result-bytes", "1", "--synch-bytes", "0", "--nodes", "1", "--baud", "10", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert (data["bytes_per_round"], data["seconds"]) == (2, 2.0)

    def test_period(self, capsys):
        args = ["wcet", "--period", "--n", "4", "--wcet-l", "10", "--wcet-e", "5", "--wcet-m", "32", "--wcet-t", "10"]
        assert dispatch(args) == 0
        assert capsys.readouterr().out == "period=72\nfrequency=0.013888888888888888\n"
        assert dispatch(args + ["--json"]) == 0
        assert json.loads(capsys.readouterr().out)["period"] == 72

    def test_cycles(self, capsys):
        assert dispatch(["wcet", "--cycles", "65415", "--clock-hz", "16000000", "--prescaler", "8"]) == 0
        assert capsys.readouterr().out == "seconds=0.0327075\n"

    def test_cycles_need_a_clock(self, capsys):
        assert dispatch(["wcet", "--cycles", "100"]) == 2
        assert "--clock-hz" in capsys.readouterr().err


class TestDispatch:
    def test_unknown_subcommand(self, capsys):
        assert dispatch(["frobnicate"]) == 2
        capsys.readouterr()

    def test_no_subcommand(self, capsys):
        assert dispatch([]) == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert dispatch(["--help"]) == 0
        assert "decmon" in capsys.readouterr().out

    def test_module_entrypoint(self):
        proc = subprocess.run(
            [sys.executable, "-m", "decmon", "wcet", "--table1", "--json"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout == WCET_TABLE_JSON + "\n"
