from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flipmix.schedule import (
    GLAUBER,
    PRESETS,
    SETTING_1_1,
    SETTING_1_1_PROOF,
    VIGODA,
    FlipSchedule,
    load_schedule,
    parse_schedule,
    validate_schedule,
)


def failing(s):
    return {c.prop for c in validate_schedule(s).failures()}


def test_decimal_strings_are_exact():
    assert SETTING_1_1[2] == Fraction(324, 1000)
    assert SETTING_1_1.eta == Fraction(469, 10000)
    assert SETTING_1_1[0] == 0 and SETTING_1_1[7] == 0 and SETTING_1_1.support == 6


def test_floats_rejected():
    with pytest.raises(TypeError):
        FlipSchedule((1.0, 0.3))


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        FlipSchedule(("1", "1.5"))


def test_main_schedule_passes_with_three_equalities():
    rep = validate_schedule(SETTING_1_1)
    assert rep.ok
    tight = {(c.prop, c.detail.split(" = ")[0]) for c in rep.equalities()}
    assert ("FP3", "3(P_4-P_5)") in tight
    assert ("FP5", "2P_2") in tight
    assert ("FP6", "2P_3") in tight
    assert 2 * (SETTING_1_1[3] - SETTING_1_1[4]) == Fraction("0.132") == 3 * (SETTING_1_1[4] - SETTING_1_1[5])
    assert 2 * SETTING_1_1[2] == Fraction("0.648") == 1 - 4 * SETTING_1_1[4]
    assert 2 * SETTING_1_1[3] == Fraction("0.308") == 4 * SETTING_1_1[4] - SETTING_1_1[5]


def test_glauber_and_vigoda_pass():
    assert validate_schedule(GLAUBER).ok
    assert validate_schedule(VIGODA).ok


def test_large_p2_fails_fp0_and_fp5():
    assert failing(SETTING_1_1.replace(2, "0.5")) == {"FP0", "FP5"}


def test_large_p3_fails_fp1():
    assert "FP1" in failing(SETTING_1_1.replace(3, "0.30"))


def test_low_p3_variant_fails_only_fp3():
    assert failing(SETTING_1_1_PROOF) == {"FP3"}


def test_failure_detail_is_instantiated():
    bad = validate_schedule(SETTING_1_1.replace(2, "0.5")).failures()
    assert any("1/2" in c.detail for c in bad)


def test_load_presets_and_files(tmp_path):
    for name, s in PRESETS.items():
        assert load_schedule(name) is s
    f = tmp_path / "s.json"
    f.write_text(SETTING_1_1.to_json())
    assert load_schedule(f) == SETTING_1_1
    assert parse_schedule(json.dumps({"P": ["1"]})) == GLAUBER


@given(st.lists(st.fractions(0, 1), min_size=1, max_size=8), st.fractions(0, 1))
def test_json_round_trip(p, eta):
    s = FlipSchedule(tuple(p), eta)
    assert parse_schedule(s.to_json()) == s


@given(st.lists(st.fractions(0, 1, max_denominator=50), min_size=1, max_size=8))
def test_validator_agrees_with_direct_fp1(p):
    s = FlipSchedule(tuple(p))
    direct = all(s[j] <= Fraction(2, 3) * s[j - 1] for j in range(3, 12))
    assert ("FP1" not in failing(s)) == direct
