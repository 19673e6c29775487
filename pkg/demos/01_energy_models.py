"""Tour of the physical energy models: storage element, indoor panel,
two-path converter, and the standby draw.

Run:  python3 demos/01_energy_models.py
"""

from luxmote import (
    ConverterModel,
    HarvesterModel,
    LoadModel,
    SupercapState,
    charge,
    discharge,
    harvest_power,
    input_efficiency,
    standby_power,
    stored_energy,
)

cap = SupercapState(capacitance_f=1.0, voltage_v=3.0)
conv = ConverterModel()
panel = HarvesterModel()
load = LoadModel()

print("=== storage element ===")
print(f"1 F at {cap.voltage_v} V holds {stored_energy(cap):.3f} J")
print(f"usable down to the {cap.v_cutoff} V brown-out: "
      f"{stored_energy(cap) - 0.5 * cap.v_cutoff**2:.3f} J")

print("\n=== indoor panel (linear in lux) ===")
for lux in (0, 100, 300, 600, 1000):
    print(f"  {lux:5d} lux -> {harvest_power(panel, lux) * 1e6:8.2f} uW raw panel output")

print("\n=== converter input path ===")
print("the boost charger is efficient above 1.8 V; below that the cold-start")
print("path barely moves energy, which is why brown-outs are so costly:")
for v in (1.0, 1.5, 1.79, 1.8, 2.5, 3.6):
    print(f"  storage at {v:4.2f} V -> input efficiency {input_efficiency(conv, v):.0%}")

print("\n=== a day of charging at 300 lux ===")
state = cap
p_panel = harvest_power(panel, 300.0)
for hour in range(0, 25, 4):
    if hour:
        state = charge(state, p_panel, 4 * 3600.0, conv)
    print(f"  t = {hour:2d} h: {state.voltage_v:.3f} V")

print("\n=== paying for work ===")
print(f"standby draw (storage side): {standby_power(load, conv) * 1e6:.2f} uW")
one_tx = discharge(state, load.e_sense_tx_j, conv)
print(f"one sense+transmit ({load.e_sense_tx_j * 1e6:.0f} uJ load-side) moves the "
      f"voltage by {(state.voltage_v - one_tx.voltage_v) * 1e6:.2f} uV")

drained = state
joules = 0.0
while not drained.dead:
    drained = discharge(drained, 0.1, conv)
    joules += 0.1
print(f"draining 0.1 J at a time kills the node after {joules:.1f} J load-side")
print(f"final voltage {drained.voltage_v:.3f} V (cutoff {drained.v_cutoff} V)")
