import math

import pytest

from double_lambda import DomainError, PhysicalConstants, si_conversion, si_to_atomic


def test_atomic_units_exact():
    au = PhysicalConstants.atomic_units()
    assert au.hbar == 1.0
    assert 4.0 * math.pi * au.eps0 == pytest.approx(1.0, abs=1e-15)
    assert au.c == pytest.approx(137.035999)
    assert au.is_atomic_units


def test_constants_must_be_positive():
    with pytest.raises(DomainError):
        PhysicalConstants(c=-1.0)
    with pytest.raises(DomainError):
        PhysicalConstants(hbar=0.0)


def test_sample_length_is_half_a_millimetre():
    # 1e7 a.u. of length is 0.529 mm, which the rounded reference quotes
    # as 0.5 mm (one significant digit)
    metres = si_conversion(1e7, "length")
    assert metres == pytest.approx(5.29177210903e-4, rel=1e-9)
    assert round(metres * 1e3, 1) == 0.5


def test_pulse_duration_in_microseconds():
    seconds = si_conversion(1e11, "time")
    assert seconds == pytest.approx(2.4e-6, rel=0.05)


def test_density_in_si():
    per_cm3 = si_conversion(3e-13, "density") * 1e-6
    assert per_cm3 == pytest.approx(2e12, rel=0.05)


def test_power_density_of_typical_signal():
    # squared field amplitude (1e-10)^2 a.u. corresponds to ~3.5e-4 W/cm^2
    w_per_m2 = si_conversion((1e-10) ** 2, "power-density")
    assert w_per_m2 * 1e-4 == pytest.approx(3.5e-4, rel=0.05)


@pytest.mark.parametrize("kind", ["length", "time", "energy",
                                  "electric-field", "density",
                                  "power-density"])
def test_conversions_invert(kind):
    value = 0.731
    back = si_to_atomic(si_conversion(value, kind), kind)
    assert back == pytest.approx(value, rel=1e-12)


def test_unknown_kind_rejected():
    with pytest.raises(DomainError):
        si_conversion(1.0, "charge")
    with pytest.raises(DomainError):
        si_to_atomic(1.0, "charge")
