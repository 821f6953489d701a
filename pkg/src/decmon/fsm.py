"""Monitor automata: the progression closure of a formula, tabulated.

States are simplified formulas, the input alphabet is the powerset of the
proposition set, and the transition function is one progression step.
true and false are absorbing verdict sinks.  Construction is breadth-first
from the simplified root, so state numbering is deterministic and rebuilds
are identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import Formula, atoms, format_formula
from .progression import _check_size, progress, simplify, verdict_of
from .verdicts import Verdict3

MAX_ALPHABET = 24
DENSE_ALPHABET_LIMIT = 16
DEFAULT_STATE_CAP = 1024
DEFAULT_STATE_SYMBOLS = 256


class FsmStateCapError(RuntimeError):
    """Raised when the progression closure exceeds the state cap."""

    def __init__(self, discovered: int, cap: int):
        super().__init__(
            f"monitor automaton exceeds the cap of {cap} states "
            f"({discovered} discovered, frontier not exhausted)"
        )
        self.discovered = discovered
        self.cap = cap


@dataclass(frozen=True, eq=False)
class MonitorFsm:
    """Deterministic monitor automaton over samples from 2^alphabet.

    transitions is a dense per-state tuple indexed by sample bitmask when
    the alphabet has at most DENSE_ALPHABET_LIMIT propositions, and a sparse
    {(state, mask): state} dict above that.
    """

    alphabet: tuple[str, ...]
    states: tuple[Formula, ...]
    verdicts: tuple[Verdict3, ...]
    initial: int
    transitions: tuple[tuple[int, ...], ...] | dict[tuple[int, int], int]
    _bit: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self._bit.update({name: i for i, name in enumerate(self.alphabet)})

    @property
    def dense(self) -> bool:
        return not isinstance(self.transitions, dict)

    def sample_mask(self, sample) -> int:
        mask = 0
        for name in sample:
            bit = self._bit.get(name)
            if bit is None:
                raise ValueError(f"proposition {name!r} is not in the alphabet")
            mask |= 1 << bit
        return mask

    def mask_sample(self, mask: int) -> frozenset[str]:
        return frozenset(n for i, n in enumerate(self.alphabet) if mask >> i & 1)

    def step(self, state: int, sample) -> int:
        mask = self.sample_mask(sample)
        if self.dense:
            return self.transitions[state][mask]
        return self.transitions[(state, mask)]

    def verdict(self, state: int) -> Verdict3:
        return self.verdicts[state]


def build_fsm(
    f: Formula,
    alphabet=None,
    state_cap: int = DEFAULT_STATE_CAP,
    dense_limit: int = DENSE_ALPHABET_LIMIT,
    max_state_symbols: int | None = DEFAULT_STATE_SYMBOLS,
) -> MonitorFsm:
    """Tabulate the progression closure of f over the given alphabet.

    The alphabet defaults to the atoms of f and may not exceed MAX_ALPHABET
    propositions (the sample space is its powerset).  Exceeding state_cap
    raises FsmStateCapError naming the number of states discovered.

    Some formulas have no finite closure: each step rewrites to a strictly
    larger formula, so the states would grow without bound.  state_cap
    bounds how many states may be discovered; max_state_symbols bounds how
    large a single state may get (FormulaSizeError beyond it, None
    disables).  The size bound catches divergence-by-growth long before
    deep trees start fighting the interpreter's recursion limit.
    """
    names = tuple(sorted(atoms(f) if alphabet is None else set(alphabet)))
    if len(names) > MAX_ALPHABET:
        raise ValueError(
            f"alphabet has {len(names)} propositions, limit is {MAX_ALPHABET}"
        )
    n_samples = 1 << len(names)
    samples = [
        frozenset(n for i, n in enumerate(names) if mask >> i & 1)
        for mask in range(n_samples)
    ]

    root = simplify(f)
    _check_size(root, max_state_symbols)
    states: list[Formula] = [root]
    index: dict[Formula, int] = {root: 0}
    rows: list[list[int]] = []
    pos = 0
    while pos < len(states):
        current = states[pos]
        row = []
        for sample in samples:
            succ = simplify(progress(current, sample))
            _check_size(succ, max_state_symbols)
            si = index.get(succ)
            if si is None:
                if len(states) >= state_cap:
                    raise FsmStateCapError(len(states) + 1, state_cap)
                si = len(states)
                index[succ] = si
                states.append(succ)
            row.append(si)
        rows.append(row)
        pos += 1

    transitions: tuple[tuple[int, ...], ...] | dict[tuple[int, int], int]
    if len(names) <= dense_limit:
        transitions = tuple(tuple(row) for row in rows)
    else:
        transitions = {
            (si, mask): row[mask] for si, row in enumerate(rows) for mask in range(n_samples)
        }
    return MonitorFsm(
        alphabet=names,
        states=tuple(states),
        verdicts=tuple(verdict_of(s) for s in states),
        initial=0,
        transitions=transitions,
    )


def run_fsm(m: MonitorFsm, trace) -> Verdict3:
    """Drive the automaton over a finite trace; sink verdicts end the run."""
    state = m.initial
    for sample in trace:
        if m.verdicts[state].is_definite:
            break
        state = m.step(state, sample)
    return m.verdicts[state]


def _sample_label(sample: frozenset[str]) -> str:
    return ",".join(sorted(sample)) if sample else "-"


def _iter_transitions(m: MonitorFsm):
    n_samples = 1 << len(m.alphabet)
    for si in range(len(m.states)):
        for mask in range(n_samples):
            if m.dense:
                yield si, mask, m.transitions[si][mask]
            else:
                yield si, mask, m.transitions[(si, mask)]


def export_fsm_text(m: MonitorFsm) -> str:
    """Line-oriented export: states, then one transition per line.

    Transition lines are "src sample dst" with the sample as a sorted
    comma-joined proposition list ("-" when empty), in (src, mask) order.
    """
    lines = [f"alphabet {','.join(m.alphabet) if m.alphabet else '-'}"]
    for si, state in enumerate(m.states):
        lines.append(f"state {si} {m.verdicts[si].value} {format_formula(state)}")
    lines.append(f"initial {m.initial}")
    for si, mask, dst in _iter_transitions(m):
        lines.append(f"{si} {_sample_label(m.mask_sample(mask))} {dst}")
    return "\n".join(lines) + "\n"


def export_fsm_dot(m: MonitorFsm) -> str:
    """GraphViz export; parallel edges are merged and labeled by sample list."""
    lines = ["digraph monitor {", "  rankdir=LR;"]
    shapes = {
        Verdict3.TOP: "doublecircle",
        Verdict3.BOT: "doubleoctagon",
        Verdict3.UNKNOWN: "circle",
    }
    for si, state in enumerate(m.states):
        label = format_formula(state).replace('"', '\\"')
        lines.append(f'  s{si} [shape={shapes[m.verdicts[si]]} label="{si}: {label}"];')
    lines.append(f"  init [shape=point]; init -> s{m.initial};")
    grouped: dict[tuple[int, int], list[str]] = {}
    for si, mask, dst in _iter_transitions(m):
        grouped.setdefault((si, dst), []).append(_sample_label(m.mask_sample(mask)))
    for (si, dst), labels in sorted(grouped.items()):
        text = "; ".join(labels).replace('"', '\\"')
        lines.append(f'  s{si} -> s{dst} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
