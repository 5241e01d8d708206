"""Pulse propagators against independent references.

The numerical integrator is validated three ways: the constant-generator
matrix exponential for rectangular detuned pulses, the Rosen-Zener and
Allen-Eberly closed forms for sech pulses, and scipy's own adaptive solver
on random pulse parameters.
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from cpgates.pulses import (
    ConstantDetuning,
    IntegratorConfig,
    IntegrationError,
    PulseSpec,
    constituent_propagator,
    integrate_pulse,
    integrate_pulse_grid,
    resonant_rect_propagator,
    transition_probability,
)

PI = math.pi
TIGHT = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)


def rect_oracle(area: float, delta_t: float, duration: float = 1.0):
    """Constant-generator reference: S(T) @ expm(-i H T) in one step."""
    omega = area / duration
    delta = delta_t / duration
    h = 0.5 * np.array([[-delta, omega], [omega, delta]], dtype=complex)
    u = expm(-1j * h * duration)
    s = np.diag(
        [np.exp(-0.5j * delta * duration), np.exp(0.5j * delta * duration)]
    )
    return s @ u


def scipy_reference(spec: PulseSpec):
    """Direct interaction-picture integration with scipy, as a cross-check."""
    if spec.shape == "rectangular":
        t0, t1 = 0.0, spec.duration
    else:
        t0 = -spec.window_half_width * spec.duration
        t1 = -t0
    width = spec.duration

    def envelope(t):
        if spec.shape == "rectangular":
            return spec.peak_rabi
        return spec.peak_rabi / np.cosh(t / width)

    def phase(t):
        model = spec.detuning_model
        if isinstance(model, ConstantDetuning):
            return model.detuning * (t - t0)
        lc = lambda x: abs(x) - math.log(2.0) + math.log1p(math.exp(-2.0 * abs(x)))
        return model.chirp_rate * width * (lc(t / width) - lc(t0 / width))

    def rhs(t, y):
        g = -0.5j * envelope(t) * np.exp(-1j * phase(t))
        return [g * y[1], -np.conj(g) * y[0]]

    sol = solve_ivp(rhs, (t0, t1), [1.0 + 0j, 0j], method="DOP853",
                    rtol=1e-12, atol=1e-14, max_step=2.0 * max(width, 1e-6))
    c1, c2 = sol.y[:, -1]
    return c1, -np.conj(c2)


class TestResonantRect:
    def test_pi_pulse_inverts(self):
        u = resonant_rect_propagator(PI)
        assert abs(u.a) < 1e-15
        assert abs(u.b + 1j) < 1e-15

    def test_zero_area_is_identity(self):
        u = resonant_rect_propagator(0.0)
        assert u.a == 1.0 and u.b == 0.0

    def test_two_pi_returns_with_sign(self):
        u = resonant_rect_propagator(2.0 * PI)
        assert abs(u.a + 1.0) < 1e-15
        assert abs(u.b) < 1e-15

    def test_transfer_follows_sine_squared(self):
        areas = np.linspace(0.0, 4.0 * PI, 57)
        for area in areas:
            p = transition_probability(resonant_rect_propagator(area))
            assert abs(p - math.sin(area / 2.0) ** 2) < 1e-14

    def test_negative_area_rejected(self):
        with pytest.raises(ValueError):
            resonant_rect_propagator(-0.1)


class TestTransitionProbability:
    def test_full_transfer(self):
        assert transition_probability(resonant_rect_propagator(PI)) == pytest.approx(1.0)

    def test_no_transfer(self):
        assert transition_probability(resonant_rect_propagator(0.0)) == 0.0

    def test_half_transfer_at_half_pi(self):
        p = transition_probability(resonant_rect_propagator(PI / 2))
        assert p == pytest.approx(0.5, abs=1e-14)


class TestPulseSpecValidation:
    def test_unknown_shape(self):
        with pytest.raises(ValueError, match="shape"):
            PulseSpec("gauss", 1.0, 1.0)

    def test_negative_rabi(self):
        with pytest.raises(ValueError, match="peak_rabi"):
            PulseSpec("sech", -1.0, 1.0)

    def test_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            PulseSpec("sech", float("nan"), 1.0)
        with pytest.raises(ValueError, match="finite"):
            PulseSpec("rectangular", 1.0, 1.0, ConstantDetuning(float("inf")))

    def test_window_floor(self):
        with pytest.raises(ValueError, match="window_half_width"):
            PulseSpec("sech", 1.0, 1.0, window_half_width=3.0)

    def test_sech_factory_rejects_double_detuning(self):
        with pytest.raises(ValueError, match="either"):
            PulseSpec.sech(1.0, detuning=0.5, chirp_rate=1.0)

    def test_area_definition(self):
        assert PulseSpec.rectangular(2.5, duration=2.0).area() == pytest.approx(2.5)
        assert PulseSpec.sech(1.5, width=2.0).area() == pytest.approx(3.0 * PI)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            IntegratorConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            IntegratorConfig(max_steps=0)


class TestIntegratedRectangular:
    def test_resonant_matches_closed_form(self):
        got = integrate_pulse(PulseSpec.rectangular(PI))
        want = resonant_rect_propagator(PI)
        assert abs(got.a - want.a) < 1e-9
        assert abs(got.b - want.b) < 1e-9

    @pytest.mark.parametrize(
        "area,delta_t",
        [(PI, 0.7), (0.4 * PI, -1.3), (2.3, 2.0), (3 * PI / 5, 0.2), (7.0, 9.5)],
    )
    def test_detuned_matches_matrix_exponential(self, area, delta_t):
        got = integrate_pulse(PulseSpec.rectangular(area, detuning=delta_t))
        want = rect_oracle(area, delta_t)
        assert abs(got.a - want[0, 0]) < 1e-9
        assert abs(got.b - want[0, 1]) < 1e-9

    def test_zero_duration_is_identity(self):
        got = integrate_pulse(PulseSpec("rectangular", 1.0, 0.0))
        assert got.a == 1.0 and got.b == 0.0


class TestIntegratedSech:
    def test_resonant_rosen_zener_amplitude(self):
        # on resonance a = cos(pi*Omega0*T/2)
        for rabi_t in (0.5, 1.0, 2.0, 3.3):
            got = integrate_pulse(PulseSpec.sech(rabi_t))
            assert abs(got.a - math.cos(PI * rabi_t / 2.0)) < 1e-8

    @pytest.mark.parametrize("rabi_t,delta_t", [(1.0, 0.5), (0.6, 1.5), (2.3, -0.8)])
    def test_detuned_rosen_zener_transfer(self, rabi_t, delta_t):
        got = integrate_pulse(PulseSpec.sech(rabi_t, detuning=delta_t))
        want = math.sin(PI * rabi_t / 2.0) ** 2 / math.cosh(PI * delta_t / 2.0) ** 2
        assert abs(transition_probability(got) - want) < 1e-8

    @pytest.mark.parametrize(
        "rabi_t,chirp_t",
        [(0.7, 1.0), (1.0, 1.0), (2.0, 1.0), (5.0, 1.0), (1.2, 2.5)],
    )
    def test_chirped_surviving_amplitude(self, rabi_t, chirp_t):
        # sech envelope with tanh-swept detuning has a closed-form |a|^2
        got = integrate_pulse(PulseSpec.sech(rabi_t, chirp_rate=chirp_t))
        root = np.sqrt(complex(rabi_t**2 - chirp_t**2))
        want = abs(np.cos(PI * root / 2.0)) ** 2 / math.cosh(PI * chirp_t / 2.0) ** 2
        assert abs(abs(got.a) ** 2 - want) < 1e-8

    def test_chirp_sign_symmetry(self):
        # symmetric envelope with antisymmetric detuning: |a| is even in the sweep
        for rabi_t in (0.8, 3.0, 11.0):
            up = integrate_pulse(PulseSpec.sech(rabi_t, chirp_rate=1.0), TIGHT)
            down = integrate_pulse(PulseSpec.sech(rabi_t, chirp_rate=-1.0), TIGHT)
            assert abs(abs(up.a) - abs(down.a)) < 1e-9

    def test_zero_rabi_is_identity(self):
        got = integrate_pulse(PulseSpec.sech(0.0, chirp_rate=1.0))
        assert got.a == 1.0 and got.b == 0.0

    def test_window_truncation_converged(self):
        # widening the default window must not move |a| or |b| above 1e-8;
        # entry phases are referenced to the window start and shift with it
        for rabi_t, chirp in ((1.0, None), (5.0, 1.0), (20.0, 1.0)):
            base = PulseSpec.sech(rabi_t, chirp_rate=chirp) if chirp else PulseSpec.sech(rabi_t)
            wide = PulseSpec(
                base.shape, base.peak_rabi, base.duration, base.detuning_model,
                window_half_width=35.0,
            )
            u0 = integrate_pulse(base, TIGHT)
            u1 = integrate_pulse(wide, TIGHT)
            assert abs(abs(u0.a) - abs(u1.a)) < 1e-8
            assert abs(abs(u0.b) - abs(u1.b)) < 1e-8


class TestIntegratorContract:
    def test_unitarity_within_ten_rel_tol(self):
        for spec in (
            PulseSpec.rectangular(2.0, detuning=5.0),
            PulseSpec.sech(12.0, chirp_rate=1.0),
            PulseSpec.sech(20.0, detuning=3.0),
        ):
            got = integrate_pulse(spec)
            assert got.unitarity_defect() < 10.0 * 1e-10

    def test_tightening_tolerance_barely_moves_entries(self):
        spec = PulseSpec.sech(2.0, chirp_rate=1.0)
        coarse = integrate_pulse(spec, IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10))
        fine = integrate_pulse(spec, IntegratorConfig(rel_tol=1e-9, abs_tol=1e-11))
        assert abs(coarse.a - fine.a) < 10.0 * 1e-8
        assert abs(coarse.b - fine.b) < 10.0 * 1e-8

    def test_matches_scipy_on_random_pulses(self):
        rng = np.random.default_rng(42)
        for _ in range(12):
            kind = rng.integers(0, 3)
            if kind == 0:
                spec = PulseSpec.rectangular(rng.uniform(0.1, 7.0),
                                             detuning=rng.uniform(-5.0, 5.0))
            elif kind == 1:
                spec = PulseSpec.sech(rng.uniform(0.1, 4.0),
                                      detuning=rng.uniform(-2.0, 2.0))
            else:
                spec = PulseSpec.sech(rng.uniform(0.1, 4.0),
                                      chirp_rate=rng.uniform(-2.0, 2.0))
            got = integrate_pulse(spec, TIGHT)
            ref_a, ref_b = scipy_reference(spec)
            assert abs(got.a - ref_a) < 1e-8
            assert abs(got.b - ref_b) < 1e-8

    def test_step_budget_exhaustion_raises(self):
        with pytest.raises(IntegrationError) as err:
            integrate_pulse(PulseSpec.sech(8.0, chirp_rate=1.0),
                            IntegratorConfig(max_steps=5))
        assert "rel_tol" in str(err.value)

    def test_batch_equals_single_evaluation(self):
        # chunk membership must not change any bits
        rabi = np.array([0.5, 1.5, 3.0, 7.5])
        a, b, ok = integrate_pulse_grid(
            "sech", "tanh_chirp", rabi, np.ones(4), np.ones(4), 25.0,
            IntegratorConfig(),
        )
        assert ok.all()
        for i, r in enumerate(rabi):
            single = integrate_pulse(PulseSpec.sech(r, chirp_rate=1.0))
            assert single.a == a[i]
            assert single.b == b[i]


class TestConstituentDispatch:
    def test_resonant_rect_takes_closed_form(self):
        spec = PulseSpec.rectangular(1.3)
        got = constituent_propagator(spec)
        want = resonant_rect_propagator(1.3)
        assert got.a == want.a and got.b == want.b

    def test_detuned_rect_is_integrated(self):
        spec = PulseSpec.rectangular(1.3, detuning=0.9)
        got = constituent_propagator(spec)
        want = rect_oracle(1.3, 0.9)
        assert abs(got.a - want[0, 0]) < 1e-9
        assert got.unitarity_defect() < 1e-9

    def test_sech_is_integrated(self):
        got = constituent_propagator(PulseSpec.sech(1.0))
        assert abs(got.a) < 1e-8
