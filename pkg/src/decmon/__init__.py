"""decmon: sample-based decentralized LTL monitoring.

The pieces: an LTL progression engine with three-valued verdicts, monitor
automata tabulated from the progression closure, a timed-automata model of
the synchronous sampling protocol with per-phase WCET budgets, an
explicit-state verifier for its timing properties, a decentralized
monitoring simulator with majority voting, and WCET budget arithmetic.
"""

from .decentral import (
    FaultInjection,
    Partition,
    PartitionError,
    RoundReport,
    Scenario,
    ScenarioError,
    load_scenario,
    report_json_line,
    run_decentralized,
    run_scenario,
    vote,
)
from .formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Atom,
    Eventually,
    FalseF,
    Formula,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    ParseError,
    TrueF,
    UnknownAtomError,
    Until,
    atoms,
    expand_derived,
    format_formula,
    parse_formula,
    structural_key,
    symbol_count,
)
from .fsm import FsmStateCapError, MonitorFsm, build_fsm, export_fsm_dot, export_fsm_text, run_fsm
from .progression import (
    DEFAULT_MAX_SYMBOLS,
    FormulaSizeError,
    Monitor,
    MonitorRun,
    MonitorStep,
    TraceFormatError,
    load_trace_jsonl,
    monitor_trace,
    parse_trace_lines,
    progress,
    simplify,
    verdict_of,
)
from .protocol import (
    ConfigError,
    DeadlockError,
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
from .semantics import LassoWord, OracleBudgetError, eval_lasso, semantic_verdict_oracle
from .timed import (
    ClockConstraint,
    Edge,
    ModelError,
    Network,
    NetworkState,
    SharedVar,
    TimedAutomaton,
    Transition,
    VarConstraint,
    VarUpdate,
    successor_transitions,
    successors,
)
from .verdicts import Verdict3
from .verifier import (
    BudgetExceededError,
    CheckResult,
    SamplingPeriodResult,
    StateGraph,
    check_liveness,
    check_sampling_period,
    check_synchronous_sampling,
    explore,
)
from .wcet import (
    TABLE1_BUS,
    BusModel,
    CommWcet,
    comm_report_rows,
    comm_wcet,
    csma_message_bytes,
    cycles_to_seconds,
    period_formula,
    sampling_frequency,
    sampling_period,
)

__version__ = "0.1.0"
