import cmath
import math

import numpy as np
import pytest

from double_lambda import (MixingAngles, PolaritonState,
                           SingularDecompositionError, asymptotic_prediction,
                           compression_factor, from_polaritons, group_velocity,
                           initial_decomposition, peak_position,
                           to_polaritons, transit_delay)
from double_lambda.model import AU


def rotation_matrix(angles):
    ct, st = math.cos(angles.theta), math.sin(angles.theta)
    cp, sp = math.cos(angles.phi), math.sin(angles.phi)
    return np.array([[ct * cp, st * cp, sp],
                     [ct * sp, st * sp, -cp],
                     [-st, ct, 0.0]])


class TestMixingAngles:
    def test_zero_controls_stops_light(self):
        a = MixingAngles.from_controls(0.0, 0.0)
        assert a.theta == pytest.approx(math.pi / 2)
        assert a.phi == 0.0            # convention at the singular point
        assert group_velocity(a) == pytest.approx(0.0, abs=1e-25)

    def test_equal_controls_partition_equally(self):
        a = MixingAngles.from_controls(1e-3, 1e-3 * cmath.exp(0.5j))
        assert a.phi == pytest.approx(math.pi / 4)

    def test_unit_controls(self):
        a = MixingAngles.from_controls(1.0, 1.0)
        assert math.sin(a.theta) == pytest.approx(3 ** -0.5, rel=1e-14)
        assert group_velocity(a) / AU.c == pytest.approx(2.0 / 3.0, rel=1e-14)

    def test_sin_theta_definition(self, rng):
        for _ in range(20):
            u2 = rng.normal() + 1j * rng.normal()
            u4 = rng.normal() + 1j * rng.normal()
            a = MixingAngles.from_controls(u2, u4)
            assert math.sin(a.theta) == pytest.approx(
                (abs(u2) ** 2 + abs(u4) ** 2 + 1) ** -0.5, rel=1e-14)
            assert math.tan(a.phi) == pytest.approx(abs(u4) / abs(u2), rel=1e-12)

    def test_group_velocity_formula(self):
        u2, u4 = 2.7e-3, 3.0e-3
        a = MixingAngles.from_controls(u2, u4)
        usq = u2 * u2 + u4 * u4
        assert group_velocity(a) == pytest.approx(
            AU.c * usq / (usq + 1), rel=1e-12)


class TestTransformation:
    def test_orthogonality(self, rng):
        for _ in range(25):
            a = MixingAngles(theta=rng.uniform(0, math.pi / 2),
                             phi=rng.uniform(0, math.pi / 2))
            m = rotation_matrix(a)
            np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-14)

    def test_round_trip(self, rng):
        for _ in range(25):
            a = MixingAngles(theta=rng.uniform(0.05, math.pi / 2 - 0.05),
                             phi=rng.uniform(0, math.pi / 2),
                             arg_u2=rng.uniform(-3, 3),
                             arg_u4=rng.uniform(-3, 3))
            triple = rng.normal(size=3) + 1j * rng.normal(size=3)
            state = to_polaritons(*triple, a)
            back = from_polaritons(state, a)
            np.testing.assert_allclose(back, triple, rtol=1e-12, atol=1e-15)

    def test_pure_dark_state(self):
        a = MixingAngles(theta=0.7, phi=0.3)
        r1, r3, sg = from_polaritons(
            PolaritonState(dark=1.0, bright_atomic=0.0, bright_field=0.0), a)
        assert r1 == pytest.approx(math.cos(0.7) * math.cos(0.3))
        assert r3 == pytest.approx(math.cos(0.7) * math.sin(0.3))
        assert sg == pytest.approx(-math.sin(0.7))

    def test_sigma_reconstruction_is_exact(self):
        a = MixingAngles(theta=0.9, phi=0.4, arg_u2=1.0, arg_u4=-0.5)
        state = PolaritonState(dark=0.3 + 0.1j, bright_atomic=-0.2j,
                               bright_field=0.05)
        _, _, sg = from_polaritons(state, a)
        assert sg == pytest.approx(-math.sin(0.9) * state.dark
                                   + math.cos(0.9) * state.bright_atomic,
                                   rel=1e-15)

    def test_matched_fields_are_dark(self, rng):
        # fields locked to the control ratio, with the lower coherence at
        # -sin(theta) q sqrt(|U2|^2+|U4|^2+1), form a pure dark excitation
        for _ in range(10):
            u2 = rng.normal() * 1e-3 + 1j * rng.normal() * 1e-3
            u4 = rng.normal() * 1e-3 + 1j * rng.normal() * 1e-3
            q = rng.normal() + 1j * rng.normal()
            a = MixingAngles.from_controls(u2, u4)
            sg = -math.sin(a.theta) * q * math.sqrt(abs(u2) ** 2
                                                    + abs(u4) ** 2 + 1.0)
            state = to_polaritons(q * u2, q * u4, sg, a)
            scale = abs(q)
            assert abs(state.bright_atomic) < 1e-12 * scale
            assert abs(state.bright_field) < 1e-12 * scale


class TestInitialDecomposition:
    def test_single_input_equal_controls(self):
        a = MixingAngles(theta=0.6, phi=math.pi / 4)
        dark, xb = initial_decomposition(1.0, 0.0, a)
        assert dark == pytest.approx(1.0 / (math.sqrt(2) * math.cos(0.6)),
                                     rel=1e-14)
        assert xb == pytest.approx(1.0 / math.sqrt(2), rel=1e-14)

    def test_matched_input_has_no_bright_part(self):
        a = MixingAngles(theta=0.6, phi=math.pi / 4)
        dark, xb = initial_decomposition(0.5, 0.5, a)
        assert xb == pytest.approx(0.0, abs=1e-16)

    def test_reconstruction_inverts(self, rng):
        a = MixingAngles(theta=0.8, phi=0.55, arg_u2=0.2, arg_u4=-1.1)
        r1, r3 = rng.normal(size=2) + 1j * rng.normal(size=2)
        dark, xb = initial_decomposition(r1, r3, a)
        zero = np.zeros_like(np.asarray(dark))
        r1b, r3b, _ = from_polaritons(
            PolaritonState(dark=dark, bright_atomic=zero, bright_field=xb), a)
        assert r1b == pytest.approx(r1, rel=1e-12)
        assert r3b == pytest.approx(r3, rel=1e-12)

    def test_singular_at_zero_controls(self):
        a = MixingAngles.from_controls(0.0, 0.0)
        with pytest.raises(SingularDecompositionError):
            initial_decomposition(1.0, 0.0, a)


class TestAsymptoticPrediction:
    def test_single_input_spawns_the_other(self):
        # equal controls, single input: each output at half the input
        a = MixingAngles(theta=0.3, phi=math.pi / 4)
        r1, r3, _ = asymptotic_prediction(1.0, 0.0, a)
        assert r1 == pytest.approx(0.5, rel=1e-14)
        assert r3 == pytest.approx(0.5, rel=1e-14)

    def test_matched_inputs_fully_transparent(self, rng):
        u2, u4 = 2.7e-3, 3.1e-3 * cmath.exp(0.4j)
        a = MixingAngles.from_controls(u2, u4)
        q = 0.37 - 0.11j
        r1, r3, _ = asymptotic_prediction(q * u2, q * u4, a)
        assert r1 == pytest.approx(q * u2, rel=1e-12)
        assert r3 == pytest.approx(q * u4, rel=1e-12)

    def test_storage_phase_line(self):
        # equal controls, equal amplitudes, second signal phased: the
        # stored coherence argument is pi + phase/2
        a0 = MixingAngles(theta=0.5, phi=math.pi / 4)
        final = MixingAngles(theta=math.pi / 2, phi=math.pi / 4)
        for ph in (0.1, 1.0, 2.5, -2.0):
            _, _, sg = asymptotic_prediction(1.0, cmath.exp(1j * ph),
                                             a0, final)
            want = math.pi + ph / 2
            assert cmath.phase(sg * cmath.exp(-1j * want)) == pytest.approx(
                0.0, abs=1e-12)

    def test_transmission_bound_and_equality_condition(self, rng):
        # the dark projection is a contraction; equality iff no bright part
        for _ in range(20):
            a = MixingAngles(theta=rng.uniform(0.1, 1.4),
                             phi=rng.uniform(0.05, math.pi / 2 - 0.05))
            r1, r3 = rng.normal(size=2) + 1j * rng.normal(size=2)
            o1, o3, _ = asymptotic_prediction(r1, r3, a)
            e_in = abs(r1) ** 2 + abs(r3) ** 2
            e_out = abs(o1) ** 2 + abs(o3) ** 2
            assert e_out <= e_in * (1 + 1e-12)
        a = MixingAngles(theta=0.4, phi=0.6)
        matched = (math.cos(a.phi), math.sin(a.phi))
        o1, o3, _ = asymptotic_prediction(*matched, a)
        assert abs(o1) ** 2 + abs(o3) ** 2 == pytest.approx(1.0, rel=1e-12)

    def test_consistency_with_polariton_reconstruction(self, rng):
        # prediction == reconstruction of the pure dark part at final angles
        a0 = MixingAngles(theta=0.7, phi=0.5, arg_u2=0.3, arg_u4=-0.2)
        af = MixingAngles(theta=1.1, phi=0.5, arg_u2=0.3, arg_u4=-0.2)
        r1, r3 = rng.normal(size=2) + 1j * rng.normal(size=2)
        pred = asymptotic_prediction(r1, r3, a0, af)
        dark, _ = initial_decomposition(r1, r3, a0)
        zero = np.zeros_like(np.asarray(dark))
        recon = from_polaritons(PolaritonState(dark, zero, zero), af)
        np.testing.assert_allclose(pred, recon, rtol=1e-12)

    def test_final_phase_covariance(self):
        a0 = MixingAngles(theta=0.7, phi=0.5)
        alpha = 0.83
        af = MixingAngles(theta=0.7, phi=0.5, arg_u2=alpha)
        r1, r3, sg = asymptotic_prediction(0.4, 0.7j, a0, a0)
        r1a, r3a, sga = asymptotic_prediction(0.4, 0.7j, a0, af)
        assert r1a == pytest.approx(r1 * cmath.exp(1j * alpha), rel=1e-12)
        assert abs(r3a) == pytest.approx(abs(r3), rel=1e-12)
        assert sga == pytest.approx(sg, rel=1e-12)


class TestPeakPosition:
    def test_constant_velocity(self):
        a = MixingAngles.from_controls(2.7e-3, 3.0e-3)
        c2 = a.cos2_theta
        z = peak_position(2e10, 1e10, lambda t: c2)
        assert z == pytest.approx(AU.c * c2 * 1e10, rel=1e-10)

    def test_free_flight_before_entry(self):
        z = peak_position(0.5e10, 1e10, lambda t: 1.0)
        assert z == pytest.approx(-AU.c * 0.5e10, rel=1e-14)

    def test_frozen_after_switch_off(self):
        # velocity zero after the off time: position stops growing
        def c2(t):
            return 1e-5 if t < 5e10 else 0.0
        z1 = peak_position(6e10, 0.0, c2, points=[5e10])
        z2 = peak_position(9e10, 0.0, c2, points=[5e10])
        assert z1 == pytest.approx(AU.c * 1e-5 * 5e10, rel=1e-8)
        assert z2 == pytest.approx(z1, rel=1e-8)


class TestCompression:
    def test_unit_controls(self):
        a = MixingAngles.from_controls(1.0, 1.0)
        assert compression_factor(a) == pytest.approx(2.0 / 3.0, rel=1e-14)

    def test_strong_control_limit(self):
        a = MixingAngles.from_controls(3e3, 4e3)
        assert compression_factor(a) == pytest.approx(1.0, rel=1e-6)

    def test_reference_controls(self):
        # |U2|, |U4| of the reference control amplitudes; frozen golden
        a = MixingAngles.from_controls(2.7313710764801977e-3,
                                       2.9667652014305e-3)
        assert compression_factor(a) == pytest.approx(1.62618192668e-5,
                                                      rel=1e-9)

    def test_singular_at_zero_controls(self):
        with pytest.raises(SingularDecompositionError):
            compression_factor(MixingAngles.from_controls(0.0, 0.0))


def test_transit_delay_reference_value():
    a = MixingAngles.from_controls(2.7313710764801977e-3,
                                   2.9667652014305e-3)
    d = transit_delay(1e7, a)
    v = AU.c * a.cos2_theta
    assert d == pytest.approx(1e7 / v - 1e7 / AU.c, rel=1e-12)
    assert d == pytest.approx(4.4873e9, rel=1e-3)
