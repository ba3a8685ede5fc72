import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from airdemand.dataset import check_sample
from airdemand.synth import (
    PRESETS, DamSpec, SynthConfig, air_velocity, froude_at_gate, generate, get_preset, kalinske_beta,
)

# 0.0066 * 10**1.4 evaluated with mpmath at 30 digits
BETA_AT_11 = 0.165784504479632287


def test_beta_exact_points():
    assert kalinske_beta(1.0) == 0.0
    assert kalinske_beta(2.0) == 0.0066
    assert abs(kalinske_beta(11.0) - BETA_AT_11) < 1e-12


@pytest.mark.parametrize("fr", [-3.0, 0.0, 0.5, 1.0])
def test_beta_zero_below_jump(fr):
    assert kalinske_beta(fr) == 0.0


@pytest.mark.parametrize("fr", [math.nan, math.inf, -math.inf])
def test_beta_rejects_non_finite(fr):
    with pytest.raises(ValueError):
        kalinske_beta(fr)


def test_beta_monotone_grid():
    grid = np.linspace(-2, 50, 1000)
    vals = [kalinske_beta(f) for f in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    above = [v for f, v in zip(grid, vals) if f > 1]
    assert all(b > a for a, b in zip(above, above[1:]))


@given(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6))
def test_beta_non_negative(fr):
    assert kalinske_beta(fr) >= 0


SQUARE = DamSpec("sq", 1.0, 20.0, gate_height=2.0, gate_width=2.0, opening_min=10, opening_max=100)


def test_froude_hand_case():
    # y = 1 m, V = 6.264 / 2 = 3.132 m/s, sqrt(9.81 * 1) = 3.13209
    fr = froude_at_gate(6.264, SQUARE, 50)
    assert abs(fr - 3.132 / 3.1320919526731650) < 1e-12
    assert abs(fr - 1.0) < 1e-4


def test_froude_unity_by_construction():
    y = 1.0
    q = math.sqrt(9.81 * y) * 2.0 * y
    assert froude_at_gate(q, SQUARE, 50) == pytest.approx(1.0, abs=1e-15)


def test_froude_linear_in_q():
    assert froude_at_gate(8.0, SQUARE, 40) == pytest.approx(2 * froude_at_gate(4.0, SQUARE, 40), rel=1e-15)


@pytest.mark.parametrize("q, opening", [(0.0, 50), (-1.0, 50), (5.0, 5), (5.0, 101)])
def test_froude_preconditions(q, opening):
    with pytest.raises(ValueError):
        froude_at_gate(q, SQUARE, opening)


def test_noiseless_targets_match_closed_form():
    spec = get_preset("safarood")
    d = generate(spec, SynthConfig(50, 0.0, 3))
    for s in d.samples:
        y = spec.gate_height * s.opening / 100
        fr = s.flow / (spec.gate_width * y) / math.sqrt(9.81 * y)
        beta = 0.0066 * (fr - 1) ** 1.4 if fr > 1 else 0.0
        assert s.air_velocity == pytest.approx(beta * s.flow / 0.25, rel=1e-13)
        assert s.air_velocity == air_velocity(s.flow, spec, s.opening)


def test_generate_deterministic():
    spec = get_preset("balarood")
    cfg = SynthConfig(30, 0.1, 5)
    assert generate(spec, cfg) == generate(spec, cfg)
    assert generate(spec, cfg) != generate(spec, SynthConfig(30, 0.1, 6))


def test_safarood_envelope():
    d = generate(get_preset("safarood"), SynthConfig(110, 0.0, 7))
    a = d.as_array()
    assert len(d) == 110
    assert a[:, 0].min() >= 8.7 and a[:, 0].max() <= 48.2
    assert a[:, 1].min() >= 20 and a[:, 1].max() <= 100
    assert "vent_area_m2=0.25" in d.source_tag


@pytest.mark.parametrize("name", sorted(PRESETS))
@pytest.mark.parametrize("noise", [0.0, 0.5, 3.0])
def test_generated_samples_valid(name, noise):
    d = generate(get_preset(name), SynthConfig(200, noise, 1))
    for s in d.samples:
        check_sample(s)


def test_presets_transcribed():
    rows = {
        "safarood": (8.7, 48.2, 1.47, 1.19, 20), "balarood": (2.2, 44.8, 1.39, 1.17, 10),
        "sardasht": (14.1, 225.0, 2.80, 2.23, 10), "silve": (4.6, 96.3, 2.00, 1.89, 10),
        "talvar": (15.1, 179.4, 3.12, 2.14, 10), "kucheri": (27.7, 243.2, 2.79, 2.29, 10),
    }
    for name, (qmin, qmax, h, w, omin) in rows.items():
        s = PRESETS[name]
        assert (s.q_min, s.q_max, s.gate_height, s.gate_width, s.opening_min, s.opening_max) == (qmin, qmax, h, w, omin, 100)
    assert PRESETS["talvar"].head_max is None and PRESETS["talvar"].head_normal == 56.5
    assert PRESETS["safarood"].downstream_length == (12.0, 60.0)


def test_areas():
    s = get_preset("safarood")
    assert s.full_area == pytest.approx(1.47 * 1.19)
    assert s.exit_area(50) == pytest.approx(0.5 * 1.47 * 1.19)


@pytest.mark.parametrize("kw", [
    dict(q_min=5, q_max=5), dict(q_min=0, q_max=5), dict(gate_height=0),
    dict(opening_min=0), dict(opening_min=50, opening_max=40), dict(opening_max=120),
])
def test_damspec_invariants(kw):
    base = dict(name="x", q_min=1, q_max=2, gate_height=1, gate_width=1, opening_min=10, opening_max=100)
    with pytest.raises(ValueError):
        DamSpec(**{**base, **kw})


def test_damspec_dict_roundtrip():
    s = get_preset("sardasht")
    assert DamSpec.from_dict(s.to_dict()) == s


def test_synthconfig_invariants():
    with pytest.raises(ValueError):
        SynthConfig(0)
    with pytest.raises(ValueError):
        SynthConfig(5, -0.1)
    with pytest.raises(KeyError):
        get_preset("hoover")
