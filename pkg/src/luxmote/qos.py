"""Voltage-bucketed service levels and the adaptive duty-cycle controller.

The node's service quality is quantized into 7 states.  Each state maps the
storage voltage to three wakeup intervals, one per application mode:

    state  voltage [V]  sensing [s]  event hold-off [s]  advertising [s]
      7     3.6 - 3.4        20              10                0.1
      6     3.4 - 3.2        40              20                0.2
      5     3.2 - 3.0        60              30                0.4
      4     3.0 - 2.8       120              60                0.64
      3     2.8 - 2.6       240             120                0.9
      2     2.6 - 2.4       300             300                2
      1     2.4 - 2.1       600             600                5

Bucket edges are half-open with the shared edge belonging to the higher-QoS
bucket (3.4 V is state 7, 3.0 V is state 5); the top bucket also includes its
upper edge.  Higher state = shorter intervals = more service.

The controller re-evaluates the target state once per wakeup from two
5-sample histories (ambient light and storage voltage), nudging the state
down when light is absent/falling or voltage is flat/falling, and up
otherwise.  It re-seeds directly from the table on the first iteration and
whenever the voltage sits at the table ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple

HISTORY_LEN = 5

# "voltage equals the ceiling" is a threshold test: exact float equality is
# meaningless for a measured quantity, and 10 mV is far below a bucket width.
V_MAX_TOL = 0.010

_TREND_DEN = sum((i - (HISTORY_LEN - 1) / 2.0) ** 2 for i in range(HISTORY_LEN))


class ApplicationMode(Enum):
    """Which interval column of the table governs the node's wakeups."""

    PERIODIC_SENSING = "periodic_sensing"
    EVENT_DETECTION = "event_detection"
    ADVERTISING = "advertising"


class QosRow(NamedTuple):
    state: int
    v_lo: float
    v_hi: float
    sense_interval_s: float
    pir_interval_s: float
    adv_interval_s: float


@dataclass(frozen=True)
class QosTable:
    """The 7-row voltage-to-interval lookup.

    Invariants enforced at construction: exactly 7 rows with states 1..7,
    buckets contiguous and non-overlapping covering [2.1, 3.6] V, and all
    three interval columns strictly decreasing in state.
    """

    rows: tuple[QosRow, ...]

    def __post_init__(self):
        rows = tuple(QosRow(*r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) != 7:
            raise ValueError(f"table must have exactly 7 rows, got {len(rows)}")
        if sorted(r.state for r in rows) != list(range(1, 8)):
            raise ValueError("table states must be exactly 1..7")
        by_voltage = sorted(rows, key=lambda r: r.v_lo)
        for row in by_voltage:
            if not row.v_lo < row.v_hi:
                raise ValueError(f"state {row.state}: empty bucket [{row.v_lo}, {row.v_hi})")
        for low, high in zip(by_voltage, by_voltage[1:]):
            if abs(low.v_hi - high.v_lo) > 1e-9:
                raise ValueError(
                    f"buckets of states {low.state} and {high.state} are not contiguous "
                    f"({low.v_hi} vs {high.v_lo})"
                )
            if high.state != low.state + 1:
                raise ValueError(
                    f"states must increase with voltage ({low.state} then {high.state})"
                )
        if abs(by_voltage[0].v_lo - 2.1) > 1e-9 or abs(by_voltage[-1].v_hi - 3.6) > 1e-9:
            raise ValueError(
                f"buckets must cover [2.1, 3.6] V, got [{by_voltage[0].v_lo}, {by_voltage[-1].v_hi}]"
            )
        by_state = sorted(rows, key=lambda r: r.state)
        for col in ("sense_interval_s", "pir_interval_s", "adv_interval_s"):
            values = [getattr(r, col) for r in by_state]
            if any(v <= 0 for v in values):
                raise ValueError(f"{col}: intervals must be positive")
            if any(b >= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{col}: intervals must strictly decrease with state")

    @property
    def v_min(self) -> float:
        return min(r.v_lo for r in self.rows)

    @property
    def v_max(self) -> float:
        return max(r.v_hi for r in self.rows)

    def row_for_state(self, state: int) -> QosRow:
        for row in self.rows:
            if row.state == state:
                return row
        raise ValueError(f"no such state {state}")


DEFAULT_TABLE = QosTable(
    rows=(
        QosRow(7, 3.4, 3.6, 20.0, 10.0, 0.1),
        QosRow(6, 3.2, 3.4, 40.0, 20.0, 0.2),
        QosRow(5, 3.0, 3.2, 60.0, 30.0, 0.4),
        QosRow(4, 2.8, 3.0, 120.0, 60.0, 0.64),
        QosRow(3, 2.6, 2.8, 240.0, 120.0, 0.9),
        QosRow(2, 2.4, 2.6, 300.0, 300.0, 2.0),
        QosRow(1, 2.1, 2.4, 600.0, 600.0, 5.0),
    )
)


def lookup_state(table: QosTable, volt: float) -> int:
    """State whose voltage bucket contains ``volt``.

    Domain is [table.v_min, table.v_max]; outside it the node is either dead
    or beyond the table's ceiling and the lookup is a contract violation.
    """
    if volt < table.v_min - 1e-12 or volt > table.v_max + 1e-12:
        raise ValueError(
            f"voltage {volt} V outside table domain [{table.v_min}, {table.v_max}]"
        )
    top = max(table.rows, key=lambda r: r.v_hi)
    if volt >= top.v_hi:
        return top.state
    for row in table.rows:
        if row.v_lo <= volt < row.v_hi:
            return row.state
    # Float-tolerance slack just below the bottom bucket.
    return min(table.rows, key=lambda r: r.v_lo).state


def interval_for(table: QosTable, state: int, mode: ApplicationMode) -> float:
    """Wakeup / hold-off interval in seconds for a state and application mode."""
    row = table.row_for_state(state)
    if mode is ApplicationMode.PERIODIC_SENSING:
        return row.sense_interval_s
    if mode is ApplicationMode.EVENT_DETECTION:
        return row.pir_interval_s
    return row.adv_interval_s


def trend(buffer) -> float:
    """Least-squares slope of the readings against their sample index.

    The controller only consumes the sign: negative means falling.
    """
    n = len(buffer)
    if n != HISTORY_LEN:
        raise ValueError(f"trend window must have {HISTORY_LEN} entries, got {n}")
    x_mean = (HISTORY_LEN - 1) / 2.0
    mean = sum(buffer) / n
    num = 0.0
    for i, y in enumerate(buffer):
        num += (i - x_mean) * (y - mean)
    return num / _TREND_DEN


@dataclass(frozen=True)
class ControllerState:
    """Controller memory carried across wakeups.

    ``light_buf`` and ``volt_buf`` are the last 5 readings (zero-filled until
    warm), ``index`` counts table re-seeds (0 = never seeded), ``qos`` is the
    state chosen at the last step and ``next_qos`` the running target the
    adjustment rules operate on.  Values are immutable; ``step`` returns a new
    state, so any number of controllers can run in parallel.
    """

    light_buf: tuple[float, ...] = (0.0,) * HISTORY_LEN
    volt_buf: tuple[float, ...] = (0.0,) * HISTORY_LEN
    index: int = 0
    qos: int = 1
    next_qos: int = 1
    v_max: float = 3.6

    def __post_init__(self):
        if len(self.light_buf) != HISTORY_LEN or len(self.volt_buf) != HISTORY_LEN:
            raise ValueError("history buffers must hold exactly 5 entries")
        if not (1 <= self.qos <= 7 and 1 <= self.next_qos <= 7):
            raise ValueError("qos and next_qos must be in [1, 7]")


def step(
    ctrl: ControllerState, volt: float, light: float, table: QosTable
) -> tuple[ControllerState, int]:
    """One controller evaluation; returns (new state, chosen QoS).

    Body, in order: (1) re-seed next_qos from the table when never seeded or
    when the voltage sits at the ceiling (within V_MAX_TOL), bumping the seed
    counter; (2) push the readings into the history buffers; (3) light rule:
    -1 if light is zero or its trend is negative, else +1; (4) voltage rule:
    -1 if the voltage trend is <= 0 and the voltage is not at the ceiling,
    else +1; (5) clamp to [1, 7]; the clamped value becomes both next_qos and
    the returned qos.

    Readings above the table ceiling are clamped to it (the table has no
    buckets beyond 3.6 V even though the storage element may charge higher).
    Must only be called on a live node: volt below the table floor raises.
    """
    if light < 0:
        raise ValueError(f"light must be non-negative, got {light}")
    if volt < table.v_min - 1e-12:
        raise ValueError(
            f"controller stepped on a dead node: {volt} V below table floor {table.v_min} V"
        )
    volt = min(volt, ctrl.v_max)

    next_qos = ctrl.next_qos
    index = ctrl.index
    at_max = volt >= ctrl.v_max - V_MAX_TOL
    if index == 0 or at_max:
        next_qos = lookup_state(table, volt)
        index += 1

    light_buf = ctrl.light_buf[1:] + (light,)
    volt_buf = ctrl.volt_buf[1:] + (volt,)

    if light == 0 or trend(light_buf) < 0:
        next_qos -= 1
    else:
        next_qos += 1
    if trend(volt_buf) <= 0 and not at_max:
        next_qos -= 1
    else:
        next_qos += 1

    next_qos = max(1, min(7, next_qos))
    new = ControllerState(
        light_buf=light_buf,
        volt_buf=volt_buf,
        index=index,
        qos=next_qos,
        next_qos=next_qos,
        v_max=ctrl.v_max,
    )
    return new, next_qos


def reset(ctrl: ControllerState) -> ControllerState:
    """Cold-start state: zeroed histories, seed counter back to 0.

    Used when a node recovers from a brown-out; the next step re-seeds from
    the table. Idempotent.
    """
    return replace(
        ctrl,
        light_buf=(0.0,) * HISTORY_LEN,
        volt_buf=(0.0,) * HISTORY_LEN,
        index=0,
    )
