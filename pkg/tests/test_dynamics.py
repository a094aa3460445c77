import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ampbound import dynamics as dyn
from ampbound.dynamics import (
    BogoliubovPair,
    IntegrationError,
    PumpError,
    PumpProfile,
    SingularPumpError,
    SqueezeTriple,
    closed_form_qm,
    desitter_exact_pair,
    extract_squeeze,
    integrate_qm,
    integrate_uv,
    reconstruct_pair,
    squeeze_flow_rhs,
    uv_trajectory,
)


def pulse_area(amplitude, center, width, t0, t1):
    # integral of the gaussian rate, the independent quadrature for r
    scale = amplitude * width * math.sqrt(math.pi / 2.0)
    return scale * (math.erf((t1 - center) / (math.sqrt(2) * width))
                    - math.erf((t0 - center) / (math.sqrt(2) * width)))


class TestPumpProfile:
    def test_constant_value(self):
        pump = PumpProfile.constant(0.5, theta_in=math.pi / 2)
        assert pump(3.0) == pytest.approx(0.5j, abs=1e-15)

    def test_gaussian_pulse_peak(self):
        pump = PumpProfile.gaussian_pulse(2.0, center=1.0, width=0.5)
        assert pump(1.0) == pytest.approx(2.0)
        assert abs(pump(10.0)) < 1e-60

    def test_de_sitter_sign(self):
        pump = PumpProfile.de_sitter()
        # expanding background: positive imaginary coupling on tau < 0
        assert pump(-2.0) == pytest.approx(0.5j)

    def test_de_sitter_singular_interval(self):
        with pytest.raises(SingularPumpError):
            integrate_uv(PumpProfile.de_sitter(), 1.0, -1.0, 1.0)

    def test_tabulated_interpolation_and_coverage(self):
        pump = PumpProfile.tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
        assert pump(0.5) == pytest.approx(0.5)
        with pytest.raises(PumpError):
            pump.validate_interval(-1.0, 1.0)

    def test_tabulated_requires_increasing_times(self):
        with pytest.raises(PumpError):
            PumpProfile.tabulated([0.0, 0.0], [1.0, 1.0])

    def test_config_roundtrip(self, tmp_path):
        specs = [
            {"kind": "constant", "q0": 0.5, "theta_in": 0.25},
            {"kind": "gaussian_pulse", "amplitude": 1.0, "center": 0.0, "width": 2.0},
            {"kind": "de_sitter", "strength": 0.5},
            {"kind": "tabulated", "samples": [[0.0, 0.1], [1.0, 0.2]], "theta_in": 0.0},
        ]
        for spec in specs:
            path = tmp_path / "pump.json"
            path.write_text(json.dumps(spec))
            pump = PumpProfile.from_config(path)
            assert pump.kind == spec["kind"]

    def test_unknown_kind(self):
        with pytest.raises(PumpError):
            PumpProfile.from_dict({"kind": "sawtooth"})


class TestIntegrateUv:
    def test_free_evolution(self):
        pair = integrate_uv(PumpProfile.constant(0.0), 2.0, 0.0, 1.5, tol=1e-12)
        assert pair.u == pytest.approx(np.exp(-2.0 * 1.5j), abs=1e-11)
        assert abs(pair.v) < 1e-12

    def test_resonant_constant_pump(self):
        # at omega = 0 the constant pump is exactly resonant: |v| = sinh(q dt)
        pair = integrate_uv(PumpProfile.constant(0.5), 0.0, 0.0, 2.0, tol=1e-12)
        assert pair.n_pairs == pytest.approx(math.sinh(1.0) ** 2, abs=1e-8)
        assert extract_squeeze(pair).r == pytest.approx(1.0, abs=1e-9)

    def test_unitarity_drift(self):
        pair = integrate_uv(PumpProfile.constant(0.5), 0.7, 0.0, 5.0, tol=1e-10)
        assert pair.unitarity_defect() < 1e-9

    def test_zero_length_interval(self):
        pair = integrate_uv(PumpProfile.constant(0.5), 1.0, 2.0, 2.0)
        assert (pair.u, pair.v) == (1.0, 0.0)

    def test_reversed_interval_rejected(self):
        with pytest.raises(ValueError):
            integrate_uv(PumpProfile.constant(0.5), 1.0, 1.0, 0.0)

    def test_time_reversal_returns_to_vacuum(self):
        # reflect the trajectory: negated pump and frequency, run forward
        pump = PumpProfile.gaussian_pulse(0.8, center=1.0, width=0.4)
        omega, t0, t1 = 1.3, 0.0, 2.0
        fwd = integrate_uv(pump, omega, t0, t1, tol=1e-10)

        def reflected(s):
            return -pump(t1 + t0 - s)

        y, _ = dyn._solve(dyn._uv_rhs(reflected, -omega),
                          [fwd.u.real, fwd.u.imag, fwd.v.real, fwd.v.imag],
                          t0, t1, 1e-10)
        back = BogoliubovPair(u=complex(y[0], y[1]), v=complex(y[2], y[3]))
        assert abs(back.u - 1.0) < 1e-7
        assert abs(back.v) < 1e-7


class TestQmSystem:
    def test_closed_form_against_integration(self):
        pump = PumpProfile.constant(0.5, theta_in=0.3)
        for dt in (0.0, 0.5, 2.0, 5.0):
            cf_s, cf_e = closed_form_qm(pump, 1.3, 0.9, 0.0, dt)
            it_s, it_e = integrate_qm(pump, 1.3, 0.9, 0.0, dt, tol=1e-12)
            for cf, it in ((cf_s, it_s), (cf_e, it_e)):
                assert abs(cf.u - it.u) < 1e-8
                assert abs(cf.v - it.v) < 1e-8

    def test_closed_form_nonzero_start(self):
        pump = PumpProfile.constant(0.4)
        cf_s, cf_e = closed_form_qm(pump, 1.1, 0.7, 0.6, 2.1)
        it_s, it_e = integrate_qm(pump, 1.1, 0.7, 0.6, 2.1, tol=1e-12)
        assert abs(cf_s.v - it_s.v) < 1e-8
        assert abs(cf_e.v - it_e.v) < 1e-8

    def test_closed_form_values(self):
        # q dt = 1 with theta_in = 0 gives r = 1 and squeeze phase pi/2
        pump = PumpProfile.constant(0.5)
        pair_s, _ = closed_form_qm(pump, 1.0, 1.0, 0.0, 2.0)
        triple = extract_squeeze(pair_s)
        assert triple.r == pytest.approx(1.0, rel=1e-12)
        assert triple.theta == pytest.approx(math.pi / 2.0, rel=1e-10)

    def test_squeeze_phase_is_quadrature_shifted(self):
        pump = PumpProfile.constant(0.5)
        pair_s, pair_e = closed_form_qm(pump, 1.0, 1.0, 0.0, 2.0)
        # theta = arg(v) - arg(u) is theta_in + pi/2 for both oscillators
        for pair in (pair_s, pair_e):
            theta = (np.angle(pair.v) - np.angle(pair.u)) % (2 * math.pi)
            assert theta == pytest.approx(math.pi / 2.0, rel=1e-10)

    def test_modulus_independent_of_frequency(self):
        pump = PumpProfile.constant(0.5)
        pair_a, _ = closed_form_qm(pump, 1.0, 1.0, 0.0, 2.0)
        pair_b, _ = closed_form_qm(pump, 7.0, 1.0, 0.0, 2.0)
        assert abs(pair_a.u) == pytest.approx(abs(pair_b.u), rel=1e-14)

    def test_identity_for_zero_rate(self):
        pair_s, pair_e = closed_form_qm(PumpProfile.constant(0.0), 1.0, 2.0, 0.0, 3.0)
        assert abs(pair_s.v) == 0.0
        assert abs(pair_s.u) == 1.0
        assert abs(pair_e.v) == 0.0

    def test_rejects_non_constant_pump(self):
        with pytest.raises(PumpError):
            closed_form_qm(PumpProfile.de_sitter(), 1.0, 1.0, -2.0, -1.0)

    def test_gaussian_pulse_amplitude_matches_quadrature(self):
        # the resonant system accumulates r = integral of the rate
        amplitude, center, width = 0.6, 1.5, 0.3
        pump = PumpProfile.gaussian_pulse(amplitude, center, width)
        pair_s, _ = integrate_qm(pump, 1.2, 0.8, 0.0, 3.0, tol=1e-12)
        r_expected = pulse_area(amplitude, center, width, 0.0, 3.0)
        assert extract_squeeze(pair_s).r == pytest.approx(r_expected, abs=1e-9)

    def test_tabulated_pump_tracks_its_source(self):
        # a finely sampled table of the gaussian rate reproduces the smooth
        # profile's amplitude; residual error is the interpolation's
        amplitude, center, width = 0.6, 1.5, 0.3
        times = np.linspace(0.0, 3.0, 4001)
        smooth = PumpProfile.gaussian_pulse(amplitude, center, width)
        table = PumpProfile.tabulated(times, np.real(smooth(times)))
        pair_s, _ = integrate_qm(table, 1.2, 0.8, 0.0, 3.0, tol=1e-10)
        r_expected = pulse_area(amplitude, center, width, 0.0, 3.0)
        assert extract_squeeze(pair_s).r == pytest.approx(r_expected, abs=1e-6)


class TestExtractSqueeze:
    def test_identity_pair(self):
        triple = extract_squeeze(BogoliubovPair(1.0, 0.0))
        assert (triple.r, triple.delta, triple.theta) == (0.0, 0.0, 0.0)

    def test_real_positive_pair(self):
        triple = extract_squeeze(BogoliubovPair(math.cosh(1.0), math.sinh(1.0)))
        assert triple.r == pytest.approx(1.0, rel=1e-12)
        assert triple.delta == 0.0
        assert triple.theta == 0.0

    @settings(max_examples=200, deadline=None)
    @given(
        r=st.floats(min_value=0.0, max_value=3.0),
        delta=st.floats(min_value=0.0, max_value=2 * math.pi - 1e-9),
        theta=st.floats(min_value=0.0, max_value=2 * math.pi - 1e-9),
    )
    def test_roundtrip(self, r, delta, theta):
        pair = reconstruct_pair(SqueezeTriple(r=r, delta=delta, theta=theta))
        back = reconstruct_pair(extract_squeeze(pair))
        assert abs(back.u - pair.u) < 1e-10
        assert abs(back.v - pair.v) < 1e-10


class TestDeSitter:
    def test_exact_pair_is_unitary(self):
        pair = desitter_exact_pair(1.0, -100.0, -0.01)
        assert pair.unitarity_defect() < 1e-9 * (abs(pair.u) ** 2)

    def test_integrator_matches_exact_modes(self):
        for (k, ti, tf) in [(1.0, -100.0, -0.01), (1.0, -50.0, -0.1), (2.0, -40.0, -0.05)]:
            exact = desitter_exact_pair(k, ti, tf)
            num = integrate_uv(PumpProfile.de_sitter(), k, ti, tf, tol=1e-12)
            assert num.n_pairs == pytest.approx(exact.n_pairs, rel=1e-6)

    def test_sub_horizon_mode_stays_empty(self):
        # mode that never crosses the horizon barely feels the pump
        pair = desitter_exact_pair(50.0, -10.0, -2.0)
        assert pair.n_pairs < 1e-3

    def test_long_oscillatory_run_passes_the_guard(self):
        # thousands of oscillation periods accumulate honest drift; the
        # step-scaled guard must accept the run and the answer stays exact
        k, ti, tf = 11.6, -400.0, -0.02
        num = integrate_uv(PumpProfile.de_sitter(), k, ti, tf, tol=1e-10)
        exact = desitter_exact_pair(k, ti, tf)
        assert num.n_pairs == pytest.approx(exact.n_pairs, rel=1e-6)

    def test_strength_restriction(self):
        with pytest.raises(ValueError):
            desitter_exact_pair(1.0, -10.0, -1.0, strength=0.5)


class TestSqueezeFlow:
    @staticmethod
    def residuals(pump, omega, t0, t1, samples=60001):
        times, u, v = uv_trajectory(pump, omega, t0, t1, tol=1e-12, samples=samples)
        r = np.arcsinh(np.abs(v))
        delta = np.unwrap(-np.angle(u))
        theta = np.unwrap(np.angle(v) - np.angle(u))
        h = times[1] - times[0]

        def diff5(f):
            return (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * h)

        hub = -np.imag(pump(times[2:-2]))
        dr, ddelta, dtheta = squeeze_flow_rhs(
            r[2:-2], delta[2:-2], theta[2:-2], omega, hub)
        mask = r[2:-2] >= 0.05
        return (
            np.abs(diff5(r) - dr)[mask].max(),
            np.abs(diff5(delta) - ddelta)[mask].max(),
            np.abs(diff5(theta) - dtheta)[mask].max(),
        )

    def test_flow_satisfied_on_de_sitter_trajectory(self):
        res = self.residuals(PumpProfile.de_sitter(), 1.0, -30.0, -0.8)
        assert max(res) < 1e-5

    def test_flow_satisfied_on_imaginary_constant_pump(self):
        pump = PumpProfile.constant(0.4, theta_in=-math.pi / 2.0)
        res = self.residuals(pump, 1.0, 0.0, 4.0)
        assert max(res) < 1e-5
