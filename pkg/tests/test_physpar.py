import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magsync.physpar import (
    TWO_PI, ConfigError, ConfigParseError, DriveSpec, SystemConfig,
    baseline_config, config_hash, describe, dump_config, load_config,
    loads_config, rabi_frequency, spin_count, thermal_occupation,
)

from oracles import thermal_occupation_mp

BASELINE_TEXT = """\
[system]
omega_b = 10 MHz
delta_a = 10 MHz
delta_c = 10 MHz
delta_d = 4 MHz
kappa_a = 1 MHz
kappa_c = 1 MHz
kappa_d = 0.6 MHz
gamma_b = 100
g_a = 4.8 MHz
g_c = 4.8 MHz
G_db = 0.1 MHz
lambda = 0.24 MHz
theta = 0
J_a = 2.4 MHz
J_c = 2.4 MHz

[bath]
T = 0.1 mK

[flags]
symmetric_sites = true
full_linearization = false
"""


class TestThermalOccupation:

    def test_zero_temperature(self):
        assert thermal_occupation(TWO_PI * 10e6, 0.0) == 0.0
        assert thermal_occupation(1.0, 0) == 0.0

    def test_mechanical_mode_at_100uK(self):
        # frozen from 50-digit mpmath evaluation of the Bose-Einstein formula
        expected = 0.008304373388861986
        assert float(thermal_occupation_mp(TWO_PI * 10e6, 1e-4)) == pytest.approx(expected, rel=1e-15)
        assert thermal_occupation(TWO_PI * 10e6, 1e-4) == pytest.approx(expected, rel=1e-13)

    def test_microwave_mode_underflows(self):
        assert thermal_occupation_mp(TWO_PI * 10e9, 1e-4) < mpmath_tiny()
        assert thermal_occupation(TWO_PI * 10e9, 1e-4) == 0.0

    @pytest.mark.parametrize("omega,T", [
        (TWO_PI * 10e9, 0.3), (TWO_PI * 10e6, 0.1), (TWO_PI * 1e3, 1.0), (1e12, 5e-3),
    ])
    def test_against_mpmath(self, omega, T):
        assert thermal_occupation(omega, T) == pytest.approx(float(thermal_occupation_mp(omega, T)), rel=1e-13)

    @pytest.mark.parametrize("x", [650.0, 700.5, 709.0, 720.0, 744.0, 800.0])
    def test_large_ratio(self, x):
        T = 1e-3
        omega = x * 1.380649e-23 * T / 1.054571817e-34
        assert thermal_occupation(omega, T) == pytest.approx(
            float(thermal_occupation_mp(omega, T)), rel=1e-12, abs=1e-320)

    def test_subnormal_temperature(self):
        assert thermal_occupation(1e5, 5e-324) == 0.0

    @pytest.mark.parametrize("omega", [0.0, -1.0])
    def test_domain_error(self, omega):
        with pytest.raises(ValueError):
            thermal_occupation(omega, 1.0)

    def test_negative_temperature(self):
        with pytest.raises(ValueError):
            thermal_occupation(1.0, -1.0)

    @given(st.floats(1e5, 1e11), st.floats(1e-4, 10.0), st.floats(1.01, 3.0))
    def test_monotone(self, omega, T, factor):
        n_lo = thermal_occupation(omega, T)
        if n_lo > 1e-300:
            assert thermal_occupation(omega, T * factor) > n_lo
            assert thermal_occupation(omega * factor, T) < n_lo


def mpmath_tiny():
    import mpmath
    return mpmath.mpf("1e-2000")


class TestSpinsAndRabi:

    def test_spin_count_yig_sphere(self):
        assert spin_count(250e-6, 4.22e27) == pytest.approx(3.5e16, rel=0.02)

    def test_spin_count_cubic(self):
        assert spin_count(500e-6) == pytest.approx(8 * spin_count(250e-6), rel=1e-14)

    def test_spin_count_small(self):
        assert spin_count(1e-30) < 1e-60

    def test_spin_count_domain(self):
        with pytest.raises(ValueError):
            spin_count(0.0)

    def test_rabi_reference_drive(self):
        om = rabi_frequency(3.9e-5, 3.5e16, TWO_PI * 28e9)
        assert om == pytest.approx(7.2e14, rel=0.01)

    def test_rabi_scaling(self):
        base = rabi_frequency(1e-5, 1e16)
        assert rabi_frequency(2e-5, 1e16) == pytest.approx(2 * base, rel=1e-15)
        assert rabi_frequency(1e-5, 4e16) == pytest.approx(2 * base, rel=1e-15)

    @pytest.mark.parametrize("args", [(0, 1, 1), (1, 0, 1), (1, 1, -1)])
    def test_rabi_domain(self, args):
        with pytest.raises(ValueError):
            rabi_frequency(*args)


class TestConfig:

    def test_baseline_file(self, tmp_path):
        p = tmp_path / "baseline.cfg"
        p.write_text(BASELINE_TEXT)
        cfg = load_config(p)
        assert cfg.kappa_d == pytest.approx(0.6 * cfg.kappa_c, rel=1e-15)
        assert cfg.omega_b == pytest.approx(TWO_PI * 10e6, rel=1e-15)
        assert cfg.T == pytest.approx(1e-4)
        assert cfg.lam == pytest.approx(0.05 * cfg.g_a, rel=1e-12)

    def test_shipped_baseline_matches_code(self):
        from pathlib import Path
        path = Path(__file__).resolve().parents[1] / "configs" / "baseline.cfg"
        cfg = load_config(path)
        ref = baseline_config()
        for f in ("omega_b", "delta_a", "delta_d", "kappa_d", "g_a", "G_db", "lam", "J_a", "T"):
            assert getattr(cfg, f) == pytest.approx(getattr(ref, f), rel=1e-12), f

    def test_empty_file(self):
        with pytest.raises(ConfigError) as info:
            loads_config("")
        assert any("omega_b" in p for p in info.value.problems)
        assert any("kappa_a" in p for p in info.value.problems)

    def test_negative_kappa(self):
        text = BASELINE_TEXT.replace("kappa_a = 1 MHz", "kappa_a = -1 MHz")
        with pytest.raises(ConfigError) as info:
            loads_config(text)
        assert any("kappa_a" in p for p in info.value.problems)

    def test_lists_every_problem(self):
        text = BASELINE_TEXT.replace("kappa_a = 1 MHz", "kappa_a = -1 MHz").replace(
            "gamma_b = 100", "gamma_b = -3")
        with pytest.raises(ConfigError) as info:
            loads_config(text)
        joined = " ".join(info.value.problems)
        assert "kappa_a" in joined and "gamma_b" in joined

    def test_parse_error_line(self):
        text = BASELINE_TEXT.replace("g_c = 4.8 MHz", "g_c = four")
        with pytest.raises(ConfigParseError) as info:
            loads_config(text)
        assert info.value.lineno == 11

    def test_bad_unit(self):
        with pytest.raises(ConfigParseError, match="unknown unit"):
            loads_config(BASELINE_TEXT.replace("T = 0.1 mK", "T = 0.1 furlong"))

    def test_malformed_line(self):
        with pytest.raises(ConfigParseError):
            loads_config("[system]\nthis is not a key value pair\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown section"):
            loads_config(BASELINE_TEXT + "\n[system2]\n")
        with pytest.raises(ConfigError, match="foo"):
            loads_config(BASELINE_TEXT.replace("[bath]", "[bath]\nfoo = 1"))

    @pytest.mark.parametrize("text,value", [
        ("1", TWO_PI), ("1 Hz", TWO_PI), ("2 kHz", TWO_PI * 2e3),
        ("3 MHz", TWO_PI * 3e6), ("1.5 GHz", TWO_PI * 1.5e9), ("7 rad/s", 7.0),
    ])
    def test_frequency_units(self, text, value):
        cfg = loads_config(BASELINE_TEXT.replace("omega_b = 10 MHz", f"omega_b = {text}"))
        assert cfg.omega_b == value

    def test_theta_range(self):
        with pytest.raises(ConfigError, match="theta"):
            loads_config(BASELINE_TEXT.replace("theta = 0", "theta = 7"))

    def test_G_and_drive_exclusive(self):
        text = BASELINE_TEXT + "\n[drive]\nB0 = 3.9e-5\nsphere_diameter = 250 um\ng_db_bare = 1\n"
        with pytest.raises(ConfigError, match="mutually exclusive"):
            loads_config(text)

    def test_drive_section(self):
        text = BASELINE_TEXT.replace("G_db = 0.1 MHz\n", "") + (
            "\n[drive]\nB0 = 3.9e-5\nsphere_diameter = 250 um\ng_db_bare = 0.001\nE = 0\n")
        cfg = loads_config(text)
        assert cfg.G_db is None
        assert cfg.drive.sphere_diameter == pytest.approx(250e-6)
        assert cfg.drive.rabi == pytest.approx(7.1e14, rel=0.02)

    def test_drive_missing_key(self):
        text = BASELINE_TEXT.replace("G_db = 0.1 MHz\n", "") + "\n[drive]\nB0 = 3.9e-5\n"
        with pytest.raises(ConfigError, match="sphere_diameter"):
            loads_config(text)

    def test_symmetric_accessors(self):
        cfg = baseline_config()
        assert cfg.site(1) == cfg.site(2)
        cfg2 = cfg.replace(symmetric_sites=True, site2=(("kappa_d", 1.0),))
        assert cfg2.site(1) == cfg2.site(2)
        cfg3 = cfg.replace(symmetric_sites=False, site2=(("kappa_d", 1.0),))
        assert cfg3.site(2).kappa_d == 1.0 and cfg3.site(1).kappa_d == cfg.kappa_d

    def test_site_index(self):
        with pytest.raises(IndexError):
            baseline_config().site(3)

    def test_immutable(self):
        cfg = baseline_config()
        with pytest.raises(Exception):
            cfg.lam = 1.0

    def test_replace_validates(self):
        with pytest.raises(ConfigError):
            baseline_config().replace(kappa_a=-1.0)

    def test_describe_lists_both_units(self):
        text = describe(baseline_config())
        assert "rad/s" in text and "Hz (/2pi)" in text
        assert "omega_b" in text

    def test_hash_stable(self):
        assert config_hash(baseline_config()) == config_hash(baseline_config())
        assert config_hash(baseline_config()) != config_hash(baseline_config(lam=0.0))


_pos = st.floats(1e-3, 1e10, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(
    omega_b=_pos, delta=st.floats(-1e9, 1e9), kappa=_pos, gamma=_pos,
    g=_pos, lam=st.floats(0, 1e8), theta=st.floats(0, 6.28), J=st.floats(0, 1e9),
    T=st.floats(0, 10), full=st.booleans(), om=st.floats(1.0, 1e12),
)
def test_round_trip_exact(omega_b, delta, kappa, gamma, g, lam, theta, J, T, full, om):
    cfg = SystemConfig(
        omega_b=omega_b, delta_a=delta, delta_c=-delta, delta_d=delta / 3,
        kappa_a=kappa, kappa_c=kappa * 1.1, kappa_d=kappa / 7, gamma_b=gamma,
        g_a=g, g_c=g / 3, G_db=g / 11, lam=lam, theta=theta, J_a=J, J_c=J / 2,
        T=T, omega_d=om, full_linearization=full,
        symmetric_sites=False, site2=(("kappa_d", kappa / 5), ("delta_a", delta / 9)),
    )
    again = loads_config(dump_config(cfg))
    assert again == cfg


def test_round_trip_with_drive():
    cfg = baseline_config(G_db=None, drive=DriveSpec(B0=3.9e-5, sphere_diameter=250e-6,
                                                     g_db_bare=0.123, E=TWO_PI * 1e3))
    assert loads_config(dump_config(cfg)) == cfg


@pytest.mark.parametrize("hz", [10e6, 4.8e6, 0.1e6, 100.0, 1.0, 1e-3, 3.3e9])
def test_unit_convention(hz):
    cfg = loads_config(BASELINE_TEXT.replace("gamma_b = 100", f"gamma_b = {hz!r}"))
    assert cfg.gamma_b == TWO_PI * hz
    assert math.isclose(cfg.gamma_b / TWO_PI, hz, rel_tol=1e-15)
