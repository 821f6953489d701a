"""WCET budget arithmetic: bus communication worst case, the closed-form
sampling period, and cycle-count timing conversions."""

from __future__ import annotations

from dataclasses import dataclass

from .protocol import WcetConfig


@dataclass(frozen=True)
class BusModel:
    """Per-round message sizes and wire parameters of a shared serial bus.

    Each sampling round carries one synch message, one token message per
    node and one result message per node.  bits_per_byte_on_wire covers
    framing (8 data bits plus start and stop bits makes 10).
    """

    token_msg_bytes: int
    result_msg_bytes: int
    synch_msg_bytes: int
    nodes: int
    bits_per_byte_on_wire: int = 10
    baud: int = 4800

    def __post_init__(self):
        for name in ("token_msg_bytes", "result_msg_bytes", "nodes", "bits_per_byte_on_wire", "baud"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.synch_msg_bytes < 0:
            raise ValueError("synch_msg_bytes must be non-negative")


@dataclass(frozen=True)
class CommWcet:
    total_bytes: int
    total_bits: int
    seconds: float
    seconds_3dp: float


def csma_message_bytes(data_bytes: int, csma_bytes: int = 1, header_bytes: int = 1) -> int:
    """Message length on a CSMA bus: arbitration byte, length/token byte, payload."""
    if data_bytes < 0 or csma_bytes < 0 or header_bytes < 0:
        raise ValueError("byte counts must be non-negative")
    return csma_bytes + header_bytes + data_bytes


def comm_wcet(b: BusModel) -> CommWcet:
    """Worst-case bus time for one full round of the protocol's traffic."""
    total_bytes = b.synch_msg_bytes + b.nodes * b.token_msg_bytes + b.nodes * b.result_msg_bytes
    total_bits = total_bytes * b.bits_per_byte_on_wire
    seconds = total_bits / b.baud
    return CommWcet(
        total_bytes=total_bytes,
        total_bits=total_bits,
        seconds=seconds,
        seconds_3dp=round(seconds, 3),
    )


TABLE1_BUS = BusModel(
    token_msg_bytes=csma_message_bytes(64),
    result_msg_bytes=4,
    synch_msg_bytes=1,
    nodes=4,
    bits_per_byte_on_wire=10,
    baud=4800,
)


def period_formula(
    n: int,
    wcet_l: int,
    wcet_e: int,
    wcet_m: int,
    wcet_r: int,
    wcet_v: int,
    wcet_t: int,
    fault_t: int,
) -> int:
    """Closed-form cycle length: sampling, n dissemination rounds, monitoring
    (with one extra wcet_e), optional result exchange and vote, local task."""
    return wcet_l + n * wcet_e + wcet_m + fault_t * (n * wcet_r + wcet_v) + wcet_t


def sampling_period(cfg: WcetConfig) -> int:
    return period_formula(
        cfg.n, cfg.wcet_l, cfg.wcet_e, cfg.wcet_m, cfg.wcet_r, cfg.wcet_v, cfg.wcet_t, cfg.fault_t
    )


def sampling_frequency(cfg: WcetConfig) -> tuple[int, float]:
    """(period, 1/period) for a validated configuration."""
    period = sampling_period(cfg)
    return period, 1.0 / period


def cycles_to_seconds(cycles: int, clock_hz: float, prescaler: int = 1) -> float:
    """Seconds taken by a cycle count on a clock divided by a prescaler."""
    if cycles <= 0 or clock_hz <= 0 or prescaler <= 0:
        raise ValueError("cycles, clock_hz and prescaler must be positive")
    return cycles / (clock_hz / prescaler)


def comm_report_rows(b: BusModel) -> list[tuple[str, str, str]]:
    """Rows for the bus budget report: (property, value, description)."""
    w = comm_wcet(b)
    return [
        ("token message length", f"{b.token_msg_bytes} bytes", "CSMA arbitration byte, length/token byte, payload"),
        ("result message length", f"{b.result_msg_bytes} bytes", "local monitor verdict broadcast"),
        ("synch message length", f"{b.synch_msg_bytes} bytes", "cycle start broadcast"),
        ("nodes", str(b.nodes), "components on the bus"),
        ("bytes per round", f"{w.total_bytes} bytes", "synch + nodes x (token + result)"),
        ("wire bits per byte", str(b.bits_per_byte_on_wire), "8 data bits + start + stop"),
        ("bits per round", f"{w.total_bits} bits", "bytes x wire bits per byte"),
        ("baud rate", f"{b.baud} bit/s", "bus speed"),
        ("worst-case communication time", f"{w.seconds_3dp} s", f"{w.total_bits}/{b.baud}, rounded to 3 decimals"),
    ]
