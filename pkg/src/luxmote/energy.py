"""Physical energy models: supercapacitor storage, light harvesting, converter
efficiency with cold-start, and load accounting.

All state transitions are value-semantic: operations take a state and return
a new one, so node models can be evaluated from any number of threads.

Sign conventions and units: energies in joules, powers in watts, currents in
amperes, voltages in volts.  "Storage-side" quantities are measured at the
supercapacitor terminals; "load-side" quantities at the regulated output
rail.  The buck converter sits between them, so a load-side joule costs
1/eta_buck storage-side joules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SupercapState:
    """Energy storage as capacitance plus terminal voltage.

    The single source of truth for a node's energy: stored energy is exactly
    0.5 * C * V^2.  ``v_cutoff`` is the brown-out threshold below which the
    node is dead; ``v_rated`` the absolute maximum the element tolerates.
    Self-discharge, when enabled, is a constant current drawn directly from
    the storage element.
    """

    capacitance_f: float = 1.0
    voltage_v: float = 3.0
    v_rated: float = 5.5
    v_cutoff: float = 2.1
    leak_current_a: float = 0.0

    def __post_init__(self):
        if self.capacitance_f <= 0:
            raise ValueError(f"capacitance_f must be > 0, got {self.capacitance_f}")
        if not 0.0 <= self.voltage_v <= self.v_rated:
            raise ValueError(
                f"voltage_v must be within [0, {self.v_rated}], got {self.voltage_v}"
            )
        if not self.v_cutoff < self.v_rated:
            raise ValueError(
                f"v_cutoff must be below v_rated ({self.v_cutoff} >= {self.v_rated})"
            )
        if self.v_cutoff < 0:
            raise ValueError(f"v_cutoff must be >= 0, got {self.v_cutoff}")
        if self.leak_current_a < 0:
            raise ValueError(f"leak_current_a must be >= 0, got {self.leak_current_a}")

    @property
    def energy_j(self) -> float:
        return 0.5 * self.capacitance_f * self.voltage_v**2

    @property
    def dead(self) -> bool:
        """True when the voltage has fallen below the brown-out threshold."""
        return self.voltage_v < self.v_cutoff


@dataclass(frozen=True)
class HarvesterModel:
    """Indoor photovoltaic panel, scaled linearly through one reference point.

    Defaults are the published operating point of a small amorphous indoor
    panel: 46.5 uA at 1.5 V under 300 lux.  Output power is the panel power
    before converter losses.
    """

    i_ref_a: float = 46.5e-6
    v_ref_v: float = 1.5
    lux_ref: float = 300.0
    scaling: str = "linear"

    def __post_init__(self):
        if self.i_ref_a < 0 or self.v_ref_v < 0:
            raise ValueError("harvester reference point must be non-negative")
        if self.lux_ref <= 0:
            raise ValueError(f"lux_ref must be > 0, got {self.lux_ref}")
        if self.scaling != "linear":
            raise ValueError(f"unknown scaling law {self.scaling!r}")

    @property
    def p_ref_w(self) -> float:
        """Panel power at the reference illuminance."""
        return self.i_ref_a * self.v_ref_v


@dataclass(frozen=True)
class ConverterModel:
    """Two-path energy-management front end.

    The input (boost) path is efficient once the storage element is above
    ``v_boost_min``; below that the charger falls back to a cold-start mode
    with drastically worse efficiency, which is why the hardware switches
    chargers.  The output (buck) path regulates ``v_out_v`` and supports up
    to ``i_out_max_a``.
    """

    v_boost_min: float = 1.8
    eta_boost: float = 0.80
    eta_cold: float = 0.05
    eta_buck: float = 0.90
    i_out_max_a: float = 0.110
    v_out_v: float = 3.0

    def __post_init__(self):
        for name in ("eta_boost", "eta_cold", "eta_buck"):
            eta = getattr(self, name)
            if not 0.0 < eta <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {eta}")
        if not self.eta_cold < self.eta_boost:
            raise ValueError(
                f"eta_cold must be strictly below eta_boost "
                f"({self.eta_cold} >= {self.eta_boost})"
            )
        if self.v_boost_min < 0:
            raise ValueError(f"v_boost_min must be >= 0, got {self.v_boost_min}")
        if self.i_out_max_a <= 0:
            raise ValueError(f"i_out_max_a must be > 0, got {self.i_out_max_a}")
        if self.v_out_v <= 0:
            raise ValueError(f"v_out_v must be > 0, got {self.v_out_v}")


@dataclass(frozen=True)
class LoadModel:
    """Per-action energies and the always-on standby draw, all load-side.

    The standby current is the MCU's sleep draw at the regulated rail.  The
    per-action energies are configuration parameters with plausible defaults,
    not measured ground truth; ``e_controller_step_j`` defaults to 0 because
    its cost is folded into the sense-and-transmit energy.
    """

    i_standby_a: float = 1e-6
    e_sense_tx_j: float = 50e-6
    e_event_detect_j: float = 30e-6
    e_advertise_j: float = 15e-6
    e_controller_step_j: float = 0.0

    def __post_init__(self):
        for name in (
            "i_standby_a",
            "e_sense_tx_j",
            "e_event_detect_j",
            "e_advertise_j",
            "e_controller_step_j",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


def stored_energy(cap: SupercapState) -> float:
    """Energy held by the storage element: 0.5 * C * V^2 joules."""
    return 0.5 * cap.capacitance_f * cap.voltage_v**2


def harvest_power(model: HarvesterModel, lux: float) -> float:
    """Panel output power in watts at the given illuminance, before converter
    losses.  Linear in lux through the reference point: zero at zero lux."""
    if lux < 0:
        raise ValueError(f"lux must be non-negative, got {lux}")
    return model.p_ref_w * (lux / model.lux_ref)


def input_efficiency(conv: ConverterModel, v_storage: float) -> float:
    """Input-path efficiency at the given storage voltage.

    Two-level step function: the efficient boost path at or above
    ``v_boost_min`` (boundary inclusive), cold-start below it.
    """
    if v_storage < 0:
        raise ValueError(f"v_storage must be non-negative, got {v_storage}")
    return conv.eta_boost if v_storage >= conv.v_boost_min else conv.eta_cold


def charge(
    cap: SupercapState, p_panel_w: float, dt_s: float, conv: ConverterModel
) -> SupercapState:
    """Accumulate harvested energy over ``dt_s`` seconds of constant panel power.

    The input efficiency is evaluated from the voltage at the start of the
    step, so steps must be short enough that the efficiency regime does not
    change inside one (the simulator guarantees this by splitting at the
    cold-start threshold).  The voltage clamps at ``v_rated``; energy beyond
    the clamp is discarded.  Self-discharge is not applied here.
    """
    if dt_s <= 0:
        raise ValueError(f"dt_s must be > 0, got {dt_s}")
    if p_panel_w < 0:
        raise ValueError(f"p_panel_w must be >= 0, got {p_panel_w}")
    eta = input_efficiency(conv, cap.voltage_v)
    e_in = eta * p_panel_w * dt_s
    v_new = math.sqrt(cap.voltage_v**2 + 2.0 * e_in / cap.capacitance_f)
    if v_new > cap.v_rated:
        v_new = cap.v_rated
    return replace(cap, voltage_v=v_new)


def discharge(cap: SupercapState, e_load_j: float, conv: ConverterModel) -> SupercapState:
    """Draw a load-side energy through the buck converter.

    Storage-side energy drawn is ``e_load_j / eta_buck``.  If the demand
    exceeds what is stored, the element is drained to 0 V.  Death is not an
    exception: the returned state's ``dead`` property reports whether the
    voltage ended below the cutoff.
    """
    if e_load_j < 0:
        raise ValueError(f"e_load_j must be >= 0, got {e_load_j}")
    e_new = stored_energy(cap) - e_load_j / conv.eta_buck
    if e_new < 0.0:
        e_new = 0.0
    v_new = math.sqrt(2.0 * e_new / cap.capacitance_f)
    return replace(cap, voltage_v=v_new)


def standby_power(load: LoadModel, conv: ConverterModel) -> float:
    """Storage-side power of the always-on standby draw:
    i_standby * v_out / eta_buck watts."""
    return load.i_standby_a * conv.v_out_v / conv.eta_buck
