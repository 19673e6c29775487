"""Unit and property tests for the physical energy models."""

import math

import numpy as np
import pytest

from luxmote.energy import (
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


IDEAL = ConverterModel(eta_boost=1.0, eta_cold=0.05, eta_buck=1.0)


class TestSupercapState:
    def test_stored_energy_examples(self):
        assert stored_energy(SupercapState(capacitance_f=1.0, voltage_v=3.6)) == pytest.approx(6.48)
        assert stored_energy(SupercapState(capacitance_f=1.0, voltage_v=0.0)) == 0.0
        assert stored_energy(SupercapState(capacitance_f=1.0, voltage_v=2.1)) == pytest.approx(2.205)

    def test_energy_property_matches_function(self):
        cap = SupercapState(capacitance_f=0.47, voltage_v=2.9)
        assert cap.energy_j == stored_energy(cap)

    def test_dead_flag(self):
        assert SupercapState(voltage_v=2.0999).dead
        assert not SupercapState(voltage_v=2.1).dead

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"capacitance_f": 0.0},
            {"capacitance_f": -1.0},
            {"voltage_v": -0.1},
            {"voltage_v": 5.6},
            {"v_cutoff": 5.5},
            {"v_cutoff": -0.5},
            {"leak_current_a": -1e-9},
        ],
    )
    def test_invariant_violations_raise(self, kwargs):
        with pytest.raises(ValueError):
            SupercapState(**kwargs)


class TestHarvester:
    def test_reference_point(self):
        # 46.5 uA at 1.5 V under 300 lux
        assert harvest_power(HarvesterModel(), 300.0) == pytest.approx(69.75e-6)

    def test_zero_light(self):
        assert harvest_power(HarvesterModel(), 0.0) == 0.0

    def test_linear_scaling(self):
        assert harvest_power(HarvesterModel(), 600.0) == pytest.approx(139.5e-6)
        assert harvest_power(HarvesterModel(), 150.0) == pytest.approx(34.875e-6)

    def test_negative_lux_rejected(self):
        with pytest.raises(ValueError):
            harvest_power(HarvesterModel(), -1.0)

    def test_monotone_in_lux(self):
        model = HarvesterModel()
        lux = np.linspace(0, 2000, 50)
        powers = [harvest_power(model, x) for x in lux]
        assert all(b >= a for a, b in zip(powers, powers[1:]))
        assert all(p >= 0 for p in powers)

    def test_unknown_scaling_rejected(self):
        with pytest.raises(ValueError):
            HarvesterModel(scaling="quadratic")


class TestConverter:
    def test_input_efficiency_step(self):
        conv = ConverterModel()
        assert input_efficiency(conv, 2.5) == 0.80
        assert input_efficiency(conv, 1.0) == 0.05
        # boundary is inclusive on the efficient side
        assert input_efficiency(conv, 1.8) == 0.80

    def test_cold_start_strictly_worse(self):
        with pytest.raises(ValueError):
            ConverterModel(eta_boost=0.5, eta_cold=0.5)
        with pytest.raises(ValueError):
            ConverterModel(eta_boost=0.3, eta_cold=0.4)

    @pytest.mark.parametrize("name", ["eta_boost", "eta_cold", "eta_buck"])
    def test_efficiency_bounds(self, name):
        with pytest.raises(ValueError):
            ConverterModel(**{name: 0.0})
        with pytest.raises(ValueError):
            ConverterModel(**{name: 1.5})


class TestCharge:
    def test_closed_form(self):
        cap = SupercapState(capacitance_f=1.0, voltage_v=2.0)
        out = charge(cap, 1e-3, 1000.0, IDEAL)
        assert out.voltage_v == pytest.approx(math.sqrt(6.0), rel=1e-12)

    def test_zero_power_is_identity(self):
        cap = SupercapState(capacitance_f=1.0, voltage_v=3.3)
        assert charge(cap, 0.0, 12345.0, IDEAL).voltage_v == 3.3

    def test_clamps_at_rated(self):
        cap = SupercapState(capacitance_f=1.0, voltage_v=5.49)
        out = charge(cap, 1.0, 1000.0, IDEAL)
        assert out.voltage_v == 5.5

    def test_uses_efficiency_at_start_voltage(self):
        conv = ConverterModel()
        cold = charge(SupercapState(voltage_v=1.0), 1e-3, 10.0, conv)
        warm = charge(SupercapState(voltage_v=1.8), 1e-3, 10.0, conv)
        gained_cold = 0.5 * (cold.voltage_v**2 - 1.0**2)
        gained_warm = 0.5 * (warm.voltage_v**2 - 1.8**2)
        assert gained_cold == pytest.approx(0.05 * 1e-3 * 10.0)
        assert gained_warm == pytest.approx(0.80 * 1e-3 * 10.0)

    def test_invalid_arguments(self):
        cap = SupercapState()
        with pytest.raises(ValueError):
            charge(cap, 1e-3, 0.0, IDEAL)
        with pytest.raises(ValueError):
            charge(cap, -1e-3, 1.0, IDEAL)


class TestDischarge:
    def test_closed_form(self):
        # 0.5*C*(3.6^2 - 3.0^2) = 1.98 J at unit buck efficiency
        cap = SupercapState(capacitance_f=1.0, voltage_v=3.6)
        out = discharge(cap, 1.98, IDEAL)
        assert out.voltage_v == pytest.approx(3.0, rel=1e-12)
        assert not out.dead

    def test_death_below_cutoff(self):
        cap = SupercapState(capacitance_f=1.0, voltage_v=2.11)
        out = discharge(cap, 1.0, IDEAL)
        assert out.dead

    def test_zero_load_is_identity(self):
        cap = SupercapState(capacitance_f=1.0, voltage_v=2.8)
        assert discharge(cap, 0.0, IDEAL).voltage_v == 2.8

    def test_buck_efficiency_scales_draw(self):
        conv = ConverterModel(eta_buck=0.5)
        cap = SupercapState(capacitance_f=1.0, voltage_v=3.0)
        out = discharge(cap, 0.5, conv)  # draws 1 J storage-side
        assert out.voltage_v == pytest.approx(math.sqrt(9.0 - 2.0), rel=1e-12)

    def test_overdraw_drains_to_zero(self):
        cap = SupercapState(capacitance_f=0.1, voltage_v=2.5)
        out = discharge(cap, 100.0, IDEAL)
        assert out.voltage_v == 0.0
        assert out.dead

    def test_negative_load_rejected(self):
        with pytest.raises(ValueError):
            discharge(SupercapState(), -1e-6, IDEAL)


class TestStandbyPower:
    def test_examples(self):
        load = LoadModel()
        assert standby_power(load, IDEAL) == pytest.approx(3e-6)
        assert standby_power(load, ConverterModel(eta_buck=0.9)) == pytest.approx(
            3.3333333e-6, rel=1e-6
        )
        assert standby_power(LoadModel(i_standby_a=0.0), IDEAL) == 0.0


class TestProperties:
    def test_charge_discharge_roundtrip(self):
        # equal storage-side energy through ideal converters returns the
        # initial voltage to 1e-9 relative
        rng = np.random.default_rng(42)
        for _ in range(200):
            c = rng.uniform(0.1, 10.0)
            v0 = rng.uniform(2.2, 5.0)
            p = rng.uniform(1e-6, 1e-3)
            dt = rng.uniform(1.0, 1000.0)
            cap = SupercapState(capacitance_f=c, voltage_v=v0)
            up = charge(cap, p, dt, IDEAL)
            if up.voltage_v >= up.v_rated:
                continue  # clamped: energy discarded, not reversible
            back = discharge(up, p * dt, IDEAL)
            assert back.voltage_v == pytest.approx(v0, rel=1e-9)

    def test_clamp_safety_fuzz(self):
        rng = np.random.default_rng(7)
        conv = ConverterModel()
        for _ in range(500):
            cap = SupercapState(capacitance_f=rng.uniform(0.05, 5.0), voltage_v=rng.uniform(0.0, 5.5))
            charged = charge(cap, rng.uniform(0, 1e-2), rng.uniform(0.1, 1e4), conv)
            assert 0.0 <= charged.voltage_v <= charged.v_rated
            drained = discharge(cap, rng.uniform(0, 10.0), conv)
            assert 0.0 <= drained.voltage_v <= drained.v_rated

    def test_load_model_rejects_negative(self):
        with pytest.raises(ValueError):
            LoadModel(e_sense_tx_j=-1e-9)
        with pytest.raises(ValueError):
            LoadModel(i_standby_a=-1e-9)
