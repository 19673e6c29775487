"""Discrete-event simulation of a single harvesting node's lifecycle.

Between discrete events the node evolves continuously: the panel charges the
storage element through the input converter, the standby draw and optional
self-discharge pull it down.  Discrete events are wakeups (controller
evaluation plus the mode's action energy), external events (motion/door
impulses in event-detection mode), brown-out death and cold-start recovery,
and light-trace sample boundaries.

Events at equal times are ordered trace sample < death < recovery < external
< wakeup.  A run is a pure function of (config, traces, duration, seed): no
wall clock, no global state.

Continuous stretches are integrated in closed form: with piecewise-constant
lux the net storage-side power is constant between regime boundaries (the
cold-start threshold, the rated-voltage clamp, the brown-out cutoff and the
recovery threshold), so the energy trajectory is linear in time and regime
crossings are solved exactly.  Leaky storage elements fall back to time
stepping capped at 1 s, with crossings bisected to 1 ms.
"""

from __future__ import annotations

import csv
import heapq
import json
import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .energy import (
    ConverterModel,
    HarvesterModel,
    LoadModel,
    SupercapState,
    discharge,
    standby_power,
)
from .qos import (
    DEFAULT_TABLE,
    ApplicationMode,
    ControllerState,
    QosTable,
    interval_for,
    reset,
    step,
)
from .traces import Trace


class EventKind(IntEnum):
    """Event types; the numeric value is the tie-break priority at equal times.

    A trace sample at time t takes effect at t, so it dispatches before any
    node event at the same instant; among node events the order is death,
    recovery, external event, wakeup.
    """

    TRACE_SAMPLE = -1
    DEATH = 0
    RECOVERY = 1
    EXTERNAL_EVENT = 2
    WAKEUP = 3


class SimEvent(NamedTuple):
    time_s: float
    kind: EventKind
    seq: int
    payload: object


@dataclass(frozen=True)
class NodeConfig:
    """Full parameterization of one node."""

    node_id: str = "node"
    mode: ApplicationMode = ApplicationMode.PERIODIC_SENSING
    supercap: SupercapState = SupercapState()
    harvester: HarvesterModel = HarvesterModel()
    converter: ConverterModel = ConverterModel()
    load: LoadModel = LoadModel()
    table: QosTable = DEFAULT_TABLE
    v_on: float = 2.4
    position_m: tuple[float, float] = (0.0, 0.0)
    pinned_qos: Optional[int] = None

    def __post_init__(self):
        if not self.supercap.v_cutoff < self.v_on <= self.table.v_max:
            raise ValueError(
                f"v_on must satisfy v_cutoff < v_on <= {self.table.v_max} "
                f"(got v_cutoff={self.supercap.v_cutoff}, v_on={self.v_on})"
            )
        if self.supercap.v_cutoff < self.table.v_min - 1e-9:
            raise ValueError(
                f"v_cutoff {self.supercap.v_cutoff} below the table floor "
                f"{self.table.v_min}: a live node could fall outside the table"
            )
        if self.pinned_qos is not None and not 1 <= self.pinned_qos <= 7:
            raise ValueError(f"pinned_qos must be in [1, 7], got {self.pinned_qos}")
        if len(self.position_m) != 2:
            raise ValueError(f"position_m must be (x, y), got {self.position_m}")
        object.__setattr__(self, "position_m", (float(self.position_m[0]), float(self.position_m[1])))


@dataclass(frozen=True)
class Packet:
    """What the node radios out: synthesized readings plus its own health."""

    node_id: str
    timestamp_s: float
    readings: dict
    qos_state: int
    voltage_v: float


class LogRecord(NamedTuple):
    time_s: float
    voltage_v: float
    lux: float
    qos: int
    action: str
    packets: int


@dataclass
class EnergyLedger:
    """Storage-side energy bookkeeping for one run.

    ``harvest_panel_j`` is raw panel output (pre-conversion);
    ``harvest_stored_j`` what actually entered the storage element;
    ``drain_stored_j`` what left it for loads; ``load_j`` what the loads
    received (post-buck); ``leak_j`` self-discharge.  Conservation:
    delta stored energy == harvest_stored - drain_stored - leak.
    """

    harvest_panel_j: float = 0.0
    harvest_stored_j: float = 0.0
    drain_stored_j: float = 0.0
    load_j: float = 0.0
    leak_j: float = 0.0

    @property
    def conversion_loss_j(self) -> float:
        return (self.harvest_panel_j - self.harvest_stored_j) + (
            self.drain_stored_j - self.load_j
        )

    @property
    def throughput_j(self) -> float:
        return self.harvest_stored_j + self.drain_stored_j + self.leak_j

    def net_stored_j(self) -> float:
        return self.harvest_stored_j - self.drain_stored_j - self.leak_j


@dataclass
class NodeLog:
    """Complete observable outcome of one node run."""

    node_id: str
    mode: ApplicationMode
    duration_s: float
    seed: int
    capacitance_f: float
    initial_voltage_v: float
    final_voltage_v: float = 0.0
    alive_at_end: bool = True
    records: list = field(default_factory=list)
    packets: list = field(default_factory=list)
    ledger: EnergyLedger = field(default_factory=EnergyLedger)
    qos_histogram: list = field(default_factory=lambda: [0] * 8)  # index 1..7
    controller_steps: int = 0
    packets_emitted: int = 0
    packet_gap_sum_s: float = 0.0
    packet_gap_count: int = 0
    dead_seconds: float = 0.0
    deaths: int = 0
    recoveries: int = 0
    events_detected: int = 0
    events_missed_dead: int = 0
    notifications_emitted: int = 0
    notification_latencies_s: list = field(default_factory=list)
    events_pending_at_end: int = 0

    @property
    def uptime_fraction(self) -> float:
        return 1.0 - self.dead_seconds / self.duration_s

    @property
    def mean_packet_interval_s(self) -> Optional[float]:
        if self.packet_gap_count == 0:
            return None
        return self.packet_gap_sum_s / self.packet_gap_count

    @property
    def delta_stored_j(self) -> float:
        return 0.5 * self.capacitance_f * (self.final_voltage_v**2 - self.initial_voltage_v**2)

    @property
    def energy_residual_j(self) -> float:
        """Conservation defect: should be ~0 up to float rounding."""
        return self.delta_stored_j - self.ledger.net_stored_j()

    @property
    def energy_residual_relative(self) -> float:
        scale = max(self.ledger.throughput_j, abs(self.delta_stored_j), 1e-30)
        return abs(self.energy_residual_j) / scale


class _Phys:
    """Per-run physical constants and the continuous-dynamics integrator."""

    __slots__ = (
        "c",
        "e_max",
        "v_rated",
        "v_cutoff",
        "v_on",
        "v_boost",
        "eta_boost",
        "eta_cold",
        "eta_buck",
        "p_per_lux",
        "p_standby_load",
        "p_standby_storage",
        "i_leak",
    )

    def __init__(self, cfg: NodeConfig):
        sc, conv, harv, load = cfg.supercap, cfg.converter, cfg.harvester, cfg.load
        self.c = sc.capacitance_f
        self.v_rated = sc.v_rated
        self.e_max = 0.5 * self.c * sc.v_rated**2
        self.v_cutoff = sc.v_cutoff
        self.v_on = cfg.v_on
        self.v_boost = conv.v_boost_min
        self.eta_boost = conv.eta_boost
        self.eta_cold = conv.eta_cold
        self.eta_buck = conv.eta_buck
        self.p_per_lux = harv.p_ref_w / harv.lux_ref
        self.p_standby_load = load.i_standby_a * conv.v_out_v
        self.p_standby_storage = standby_power(load, conv)
        self.i_leak = sc.leak_current_a

    def advance(self, v, alive, lux, dt, led):
        """Continuous dynamics for up to ``dt`` seconds at constant lux.

        Returns (v_new, seconds_used, crossing) with crossing in
        (None, "death", "recovery").  On a crossing the state is advanced
        exactly to the crossing point and the remaining time is unconsumed.
        """
        p_panel = self.p_per_lux * lux
        if self.i_leak == 0.0:
            return self._advance_exact(v, alive, p_panel, dt, led)
        return self._advance_stepped(v, alive, p_panel, dt, led)

    def _advance_exact(self, v, alive, p_panel, dt, led):
        c = self.c
        used = 0.0
        while used < dt:
            if not alive and v >= self.v_on:
                return v, used, "recovery"
            eta = self.eta_boost if v >= self.v_boost else self.eta_cold
            p_in = eta * p_panel
            p_out = self.p_standby_storage if alive else 0.0
            if v == self.v_boost and p_in < p_out:
                # Leaving the efficient region downward: the stretch below
                # the threshold runs on the cold-start path.
                p_in = self.eta_cold * p_panel
            p_net = p_in - p_out
            span = dt - used
            if v >= self.v_rated and p_net >= 0.0:
                # Pinned at the rated voltage: only the load draw is
                # replenished, surplus harvest is shed.
                led.harvest_panel_j += p_panel * span
                led.harvest_stored_j += p_out * span
                led.drain_stored_j += p_out * span
                if alive:
                    led.load_j += self.p_standby_load * span
                return v, dt, None
            if p_net == 0.0:
                led.harvest_panel_j += p_panel * span
                led.harvest_stored_j += p_in * span
                led.drain_stored_j += p_out * span
                if alive:
                    led.load_j += self.p_standby_load * span
                return v, dt, None
            if p_net < 0.0 and alive and v <= self.v_cutoff:
                return v, used, "death"
            if p_net > 0.0:
                thr = self.v_rated
                if not alive and v < self.v_on < thr:
                    thr = self.v_on
                if v < self.v_boost < thr:
                    thr = self.v_boost
            else:
                thr = self.v_cutoff if alive else 0.0
                if thr < self.v_boost < v:
                    thr = self.v_boost
            e0 = 0.5 * c * v * v
            t_hit = (0.5 * c * thr * thr - e0) / p_net
            if t_hit <= span:
                span = t_hit
                v_new = thr
            else:
                v_new = math.sqrt(max(v * v + 2.0 * p_net * span / c, 0.0))
            led.harvest_panel_j += p_panel * span
            led.harvest_stored_j += p_in * span
            led.drain_stored_j += p_out * span
            if alive:
                led.load_j += self.p_standby_load * span
            used += span
            v = v_new
            if v_new == thr:
                if alive and thr == self.v_cutoff:
                    return v, used, "death"
                if not alive and thr == self.v_on:
                    return v, used, "recovery"
                # boost threshold or rated clamp: regime change, keep going
        return v, used, None

    def _substep(self, v, alive, p_panel, h):
        """One leaky time step: net charge/drain by energy, then constant-
        current self-discharge.  Returns (v', absorbed, drained, leaked)."""
        c = self.c
        eta = self.eta_boost if v >= self.v_boost else self.eta_cold
        p_in = eta * p_panel
        p_out = self.p_standby_storage if alive else 0.0
        e0 = 0.5 * c * v * v
        e1 = e0 + (p_in - p_out) * h
        absorbed = p_in * h
        drained = p_out * h
        if e1 > self.e_max:
            absorbed = self.e_max - e0 + drained
            e1 = self.e_max
        if e1 < 0.0:
            drained = e0 + absorbed
            e1 = 0.0
        v1 = math.sqrt(2.0 * e1 / c)
        v2 = v1 - self.i_leak * h / c
        if v2 < 0.0:
            v2 = 0.0
        leaked = 0.5 * c * (v1 * v1 - v2 * v2)
        return v2, absorbed, drained, leaked

    def _advance_stepped(self, v, alive, p_panel, dt, led):
        used = 0.0
        while used < dt:
            if not alive and v >= self.v_on:
                return v, used, "recovery"
            h = dt - used
            if h > 1.0:
                h = 1.0
            v2, absorbed, drained, leaked = self._substep(v, alive, p_panel, h)
            crossing = None
            if alive and v2 < self.v_cutoff:
                crossing = "death"
                h = self._bisect(v, alive, p_panel, h, self.v_cutoff, below=True)
            elif not alive and v2 >= self.v_on:
                crossing = "recovery"
                h = self._bisect(v, alive, p_panel, h, self.v_on, below=False)
            if crossing is not None:
                v2, absorbed, drained, leaked = self._substep(v, alive, p_panel, h)
            led.harvest_panel_j += p_panel * h
            led.harvest_stored_j += absorbed
            led.drain_stored_j += drained
            led.leak_j += leaked
            if alive:
                led.load_j += drained * self.eta_buck
            used += h
            v = v2
            if crossing is not None:
                return v, used, crossing
        return v, used, None

    def _bisect(self, v, alive, p_panel, h, v_target, below, tol=1e-3):
        """Smallest step length (to ``tol`` seconds) that puts the voltage on
        the far side of ``v_target``; the endpoint at ``h`` already is."""
        lo, hi = 0.0, h
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            v_mid = self._substep(v, alive, p_panel, mid)[0]
            crossed = v_mid < v_target if below else v_mid >= v_target
            if crossed:
                hi = mid
            else:
                lo = mid
        return hi


def integrate_interval(
    config: NodeConfig,
    voltage_v: float,
    alive: bool,
    t0: float,
    t1: float,
    light: Trace,
    ledger: Optional[EnergyLedger] = None,
):
    """Continuous integration over (t0, t1) with no discrete node events inside.

    Applies harvest at sample-held lux, the standby draw while alive, and
    self-discharge.  Returns (voltage, t_reached, crossing): crossing is None
    when t1 was reached, otherwise "death" or "recovery" with t_reached the
    crossing time (exact for leak-free storage, within 1 ms otherwise).
    """
    if not t0 < t1:
        raise ValueError(f"need t0 < t1, got {t0} >= {t1}")
    phys = _Phys(config)
    led = ledger if ledger is not None else EnergyLedger()
    now = t0
    v = voltage_v
    times = light.times_s
    n = len(times)
    while now < t1:
        idx = int(np.searchsorted(times, now, side="right"))
        lux = float(light.values[max(idx - 1, 0)])
        t_stop = t1 if idx >= n else min(t1, float(times[idx]))
        v, span, crossing = phys.advance(v, alive, lux, t_stop - now, led)
        now += span
        if crossing is not None:
            return v, now, crossing
    return v, t1, None


_SENSOR_TEMP_C = 21.0  # synthesized constant; physical sensing is out of scope


class _NodeSim:
    """Event loop for a single node; see run_node."""

    def __init__(self, config, light, events, duration_s, seed, detail):
        if duration_s <= 0:
            raise ValueError(f"duration_s must be > 0, got {duration_s}")
        if events is not None and config.mode is not ApplicationMode.EVENT_DETECTION:
            raise ValueError(
                f"node {config.node_id}: events trace given but mode is {config.mode.value}"
            )
        self.cfg = config
        self.phys = _Phys(config)
        self.table = config.table
        self.mode = config.mode
        self.duration = float(duration_s)
        self.detail = detail
        self.v = config.supercap.voltage_v
        self.alive = self.v >= config.supercap.v_cutoff
        self.ctrl = ControllerState(v_max=config.table.v_max)
        self.qos = config.pinned_qos if config.pinned_qos is not None else self.ctrl.qos
        self.lux = light.value_at(0.0)
        self.now = 0.0
        self.gen = 0
        self._seq = 0
        self.heap: list[SimEvent] = []
        self.last_notification = -math.inf
        self.pending_events: list[float] = []
        self._last_packet_t = None
        self.died_at = None if self.alive else 0.0
        self._cap = config.supercap
        self.log = NodeLog(
            node_id=config.node_id,
            mode=config.mode,
            duration_s=self.duration,
            seed=seed,
            capacitance_f=config.supercap.capacitance_f,
            initial_voltage_v=self.v,
        )

        if self.alive:
            self._push(0.0, EventKind.WAKEUP, self.gen)
        for t in light.times_s:
            if 0.0 < t < self.duration:
                self._push(float(t), EventKind.TRACE_SAMPLE, float(light.value_at(t)))
        if events is not None:
            for t, val in zip(events.times_s, events.values):
                if 0.0 <= t < self.duration:
                    self._push(float(t), EventKind.EXTERNAL_EVENT, float(val))

    def _push(self, t, kind, payload):
        self._seq += 1
        heapq.heappush(self.heap, SimEvent(t, kind, self._seq, payload))

    def run(self) -> NodeLog:
        while True:
            if self.heap and self.heap[0].time_s < self.duration:
                t_next = self.heap[0].time_s
            else:
                t_next = self.duration
            if not self._advance_to(t_next):
                continue  # a death/recovery got queued at the crossing time
            if not self.heap or self.heap[0].time_s >= self.duration:
                if self.now >= self.duration:
                    break
                continue
            ev = heapq.heappop(self.heap)
            self._dispatch(ev)
        return self._finalize()

    def _advance_to(self, t_target) -> bool:
        led = self.log.ledger
        while self.now < t_target:
            v, span, crossing = self.phys.advance(
                self.v, self.alive, self.lux, t_target - self.now, led
            )
            self.v = v
            self.now += span
            if crossing == "death":
                self._push(self.now, EventKind.DEATH, None)
                return False
            if crossing == "recovery":
                self._push(self.now, EventKind.RECOVERY, None)
                return False
        return True

    def _dispatch(self, ev: SimEvent):
        kind = ev.kind
        if kind is EventKind.WAKEUP:
            if self.alive and ev.payload == self.gen:
                self._wakeup(ev.time_s)
        elif kind is EventKind.EXTERNAL_EVENT:
            self._external(ev.time_s, ev.payload)
        elif kind is EventKind.DEATH:
            if self.alive:
                self._die(ev.time_s)
        elif kind is EventKind.RECOVERY:
            if not self.alive:
                self._recover(ev.time_s)
        else:  # TRACE_SAMPLE
            self.lux = ev.payload
            self._record(ev.time_s, "sample", 0)

    def _pay(self, e_load_j) -> None:
        """Draw an action energy atomically; updates the ledger."""
        if e_load_j == 0.0:
            return
        before = replace(self._cap, voltage_v=self.v)
        after = discharge(before, e_load_j, self.cfg.converter)
        drained = 0.5 * self.phys.c * (self.v * self.v - after.voltage_v**2)
        self.log.ledger.drain_stored_j += drained
        self.log.ledger.load_j += drained * self.phys.eta_buck
        self.v = after.voltage_v

    def _emit_packet(self, t) -> None:
        log = self.log
        log.packets_emitted += 1
        if self._last_packet_t is not None:
            log.packet_gap_sum_s += t - self._last_packet_t
            log.packet_gap_count += 1
        self._last_packet_t = t
        if self.detail:
            log.packets.append(
                Packet(
                    node_id=self.cfg.node_id,
                    timestamp_s=t,
                    readings={"light_lux": self.lux, "temperature_c": _SENSOR_TEMP_C},
                    qos_state=self.qos,
                    voltage_v=self.v,
                )
            )

    def _wakeup(self, t):
        if self.cfg.pinned_qos is not None:
            qos = self.cfg.pinned_qos
        else:
            self.ctrl, qos = step(self.ctrl, self.v, self.lux, self.table)
        self.qos = qos
        self.log.qos_histogram[qos] += 1
        self.log.controller_steps += 1

        load = self.cfg.load
        if self.mode is ApplicationMode.PERIODIC_SENSING:
            e_action = load.e_sense_tx_j + load.e_controller_step_j
        elif self.mode is ApplicationMode.ADVERTISING:
            e_action = load.e_advertise_j + load.e_controller_step_j
        else:  # event detection: the wakeup only runs the controller
            e_action = load.e_controller_step_j
        self._pay(e_action)

        if self.v < self.phys.v_cutoff:
            self._push(t, EventKind.DEATH, None)
            self._record(t, "wakeup", 0)
            return

        emitted = 0
        if self.mode is not ApplicationMode.EVENT_DETECTION:
            self._emit_packet(t)
            emitted = 1
        self._push(t + interval_for(self.table, qos, self.mode), EventKind.WAKEUP, self.gen)
        self._record(t, "wakeup", emitted)

    def _external(self, t, payload):
        if not self.alive:
            self.log.events_missed_dead += 1
            return
        self.log.events_detected += 1
        self._pay(self.cfg.load.e_event_detect_j)
        if self.v < self.phys.v_cutoff:
            self._push(t, EventKind.DEATH, None)
            self._record(t, "event", 0)
            return
        holdoff = interval_for(self.table, self.qos, ApplicationMode.EVENT_DETECTION)
        if t - self.last_notification >= holdoff:
            self._emit_packet(t)
            self.log.notifications_emitted += 1
            self.log.notification_latencies_s.append(0.0)
            for t_pending in self.pending_events:
                self.log.notification_latencies_s.append(t - t_pending)
            self.pending_events.clear()
            self.last_notification = t
            self._record(t, "event", 1)
        else:
            self.pending_events.append(t)
            self._record(t, "event", 0)

    def _die(self, t):
        self.alive = False
        self.gen += 1
        self.died_at = t
        self.log.deaths += 1
        self._record(t, "death", 0)

    def _recover(self, t):
        self.alive = True
        self.log.recoveries += 1
        self.log.dead_seconds += t - self.died_at
        self.died_at = None
        self.ctrl = reset(self.ctrl)
        self._record(t, "recovery", 0)
        self._push(t, EventKind.WAKEUP, self.gen)

    def _record(self, t, action, packets):
        if self.detail:
            self.log.records.append(
                LogRecord(t, self.v, self.lux, self.qos, action, packets)
            )

    def _finalize(self) -> NodeLog:
        log = self.log
        if not self.alive:
            log.dead_seconds += self.duration - self.died_at
        log.final_voltage_v = self.v
        log.alive_at_end = self.alive
        log.events_pending_at_end = len(self.pending_events)
        return log


def run_node(
    config: NodeConfig,
    light: Trace,
    events: Optional[Trace] = None,
    *,
    duration_s: float,
    seed: int = 0,
    detail: bool = True,
) -> NodeLog:
    """Simulate one node over [0, duration_s).

    ``light`` drives the harvester (lux, sample-and-hold); ``events`` is only
    meaningful in event-detection mode and raises otherwise.  ``detail``
    controls whether per-event records and packet objects are kept (summary
    counters and the energy ledger are always maintained).  Deterministic
    given (config, traces, duration, seed).
    """
    return _NodeSim(config, light, events, duration_s, seed, detail).run()


def write_node_log_csv(log: NodeLog, path) -> None:
    """Per-event log as CSV: time_s,node_id,voltage_v,lux,qos,action,packets."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s", "node_id", "voltage_v", "lux", "qos", "action", "packets"])
        for rec in log.records:
            writer.writerow(
                [
                    repr(rec.time_s),
                    log.node_id,
                    repr(rec.voltage_v),
                    repr(rec.lux),
                    rec.qos,
                    rec.action,
                    rec.packets,
                ]
            )


def ledger_summary(log: NodeLog) -> dict:
    """JSON-ready run summary: ledger totals, conservation residual, counters."""
    led = log.ledger
    return {
        "node_id": log.node_id,
        "mode": log.mode.value,
        "duration_s": log.duration_s,
        "seed": log.seed,
        "initial_voltage_v": log.initial_voltage_v,
        "final_voltage_v": log.final_voltage_v,
        "alive_at_end": log.alive_at_end,
        "uptime_fraction": log.uptime_fraction,
        "dead_seconds": log.dead_seconds,
        "deaths": log.deaths,
        "recoveries": log.recoveries,
        "controller_steps": log.controller_steps,
        "packets_emitted": log.packets_emitted,
        "qos_histogram": {str(s): log.qos_histogram[s] for s in range(1, 8)},
        "events_detected": log.events_detected,
        "events_missed_dead": log.events_missed_dead,
        "notifications_emitted": log.notifications_emitted,
        "events_unnotified": log.events_pending_at_end,
        "ledger": {
            "harvest_panel_j": led.harvest_panel_j,
            "harvest_stored_j": led.harvest_stored_j,
            "drain_stored_j": led.drain_stored_j,
            "load_j": led.load_j,
            "leak_j": led.leak_j,
            "conversion_loss_j": led.conversion_loss_j,
            "throughput_j": led.throughput_j,
        },
        "energy_residual_j": log.energy_residual_j,
        "energy_residual_relative": log.energy_residual_relative,
    }


def write_ledger_json(log: NodeLog, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(ledger_summary(log), fh, indent=2, sort_keys=True)
        fh.write("\n")
