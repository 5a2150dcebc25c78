import math

import numpy as np
import pytest

from coolsim import (
    QubitParams,
    SteadyEnergyUndefinedError,
    closed_form_energy,
    co_counter_ratio,
    effective_beta,
    energy_estimate,
    recursion_step,
    rwa_amplitude_ratio,
    steady_energy,
)


def exact_iteration_energy(omega_s, omega_m, gamma, t, n_m, rho_s):
    """Independent 4x4 matrix-exponential oracle for one iteration."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2)
    h = (np.kron(omega_s / 2 * sz, eye) + np.kron(eye, omega_m / 2 * sz)
         + gamma / 2 * np.kron(sx, sx))
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * w * t)) @ v.conj().T
    rho = np.kron(rho_s, np.diag([n_m, 1 - n_m]).astype(complex))
    rho = u @ rho @ u.conj().T
    rho_s_next = np.einsum("aibi->ab", rho.reshape(2, 2, 2, 2))
    return rho_s_next, float(np.real(np.trace(omega_s / 2 * sz @ rho_s_next)))


class TestEnergyEstimate:
    def test_direct_value(self):
        assert energy_estimate(0.2, 10.0) == pytest.approx(0.14142135623730953)

    def test_gamma_zero(self):
        assert energy_estimate(0.0, 7.0) == pytest.approx(1.0 / 7.0)

    def test_long_time_limit(self):
        assert energy_estimate(0.3, 1e12) == pytest.approx(0.15, rel=1e-12)


class TestRecursionStep:
    def test_ground_input_only_counter_heating(self):
        p = QubitParams(1.0, 1.3, 0.1, 7.0)
        step = recursion_step(p, -p.omega_s_eff / 2)
        assert step.e_nu == pytest.approx(0.0, abs=1e-16)
        expected_mu = (p.gamma ** 2 / p.mu ** 2) * p.omega_s_eff * math.sin(
            p.mu * p.t_m / 2) ** 2
        assert step.e_mu == pytest.approx(expected_mu)
        assert step.e_mu >= 0

    def test_gamma_zero_is_identity(self):
        p = QubitParams(1.0, 1.3, 0.0, 7.0)
        assert recursion_step(p, 0.37).e_next == pytest.approx(0.37)

    def test_one_step_matches_exact_evolution(self):
        p = QubitParams(1.0, 1.0, 0.1, 20.0, 0.0)
        rho = np.diag([1.0, 0.0]).astype(complex)  # energy +1/2
        _, e_exact = exact_iteration_energy(1.0, 1.0, 0.1, 20.0, 0.0, rho)
        assert recursion_step(p, 0.5).e_next == pytest.approx(e_exact, abs=1e-10)


class TestClosedForm:
    def test_zero_iterations(self):
        p = QubitParams(1.0, 0.8, 0.2, 5.0)
        assert closed_form_energy(p, 0.31, 0) == pytest.approx(0.31)

    def test_matches_recursion(self):
        p = QubitParams(1.0, 1.0, 0.1, 20.0)
        e = 0.5
        for n in range(1, 51):
            e = recursion_step(p, e).e_next
            assert closed_form_energy(p, 0.5, n) == pytest.approx(e, abs=1e-12)

    def test_limit_is_steady_energy(self):
        p = QubitParams(1.0, 1.2, 0.15, 11.0)
        assert closed_form_energy(p, 0.4, 10 ** 7) == pytest.approx(
            steady_energy(p), abs=1e-12)

    def test_matches_exact_evolution_with_coherences(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            omega_s = rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
            omega_m = rng.uniform(0.1, 3.0)
            gamma = rng.uniform(1e-3, 0.3)
            t = rng.uniform(1.0, 100.0)
            n_m = float(rng.choice([0.0, 0.1, 0.25]))
            psi = rng.normal(size=2) + 1j * rng.normal(size=2)
            psi /= np.linalg.norm(psi)
            rho = np.outer(psi, psi.conj())
            sz = np.diag([1.0, -1.0])
            e0 = float(np.real(np.trace(omega_s / 2 * sz @ rho)))
            p = QubitParams(omega_s, omega_m, gamma, t, n_m)
            for n in range(1, 41):
                rho, e_exact = exact_iteration_energy(omega_s, omega_m, gamma, t, n_m, rho)
                assert abs(closed_form_energy(p, e0, n) - e_exact) <= 1e-10


class TestSteadyEnergy:
    def test_infinite_temperature_meter(self):
        p = QubitParams(1.0, 1.0, 0.1, 13.0, n_m=0.5)
        assert steady_energy(p) == pytest.approx(0.0, abs=1e-15)

    def test_resonant_cooling_reaches_ground(self):
        p = QubitParams(1.0, 1.0, 0.1, 25.0)  # nu t/2 = 1.25 rad, mu t >> 1
        assert steady_energy(p) == pytest.approx(-0.5, abs=2e-3)

    def test_revival_heats_to_inverted_value(self):
        p = QubitParams(1.0, 1.0, 0.1, 2 * math.pi / 0.1)  # sin(nu t/2) = sin(pi)
        assert steady_energy(p) == pytest.approx(+0.5, abs=1e-9)

    def test_undefined_at_exact_double_zero(self):
        with pytest.raises(SteadyEnergyUndefinedError):
            steady_energy(QubitParams(1.0, 1.0, 0.1, 0.0))

    def test_fixed_point_of_recursion(self):
        p = QubitParams(1.0, 1.4, 0.2, 9.0)
        e_inf = steady_energy(p)
        assert recursion_step(p, e_inf).e_next == pytest.approx(e_inf, abs=1e-12)

    def test_contraction_factor_bounded(self):
        rng = np.random.default_rng(22)
        for _ in range(200):
            p = QubitParams(rng.uniform(0.5, 2.0), rng.uniform(0.1, 3.0),
                            rng.uniform(0.0, 0.3), rng.uniform(0.1, 100.0))
            s2_mu = math.sin(p.mu * p.t_m / 2) ** 2
            s2_nu = math.sin(p.nu * p.t_m / 2) ** 2
            contraction = 1 - p.gamma ** 2 / p.mu ** 2 * s2_mu \
                - p.gamma ** 2 / p.nu ** 2 * s2_nu
            assert abs(contraction) <= 1.0 + 1e-12


class TestEffectiveBeta:
    def test_ground_state_meter(self):
        p = QubitParams(1.0, 1.0, 0.1, 10.0)
        assert math.isinf(effective_beta(p, math.inf))

    def test_resonance_identity(self):
        p = QubitParams(1.0, 1.0, 0.1, 10.0)
        assert effective_beta(p, 2.3) == pytest.approx(2.3)

    def test_off_resonant_rescaling(self):
        p = QubitParams(1.0, 2.0, 0.1, 10.0)
        assert effective_beta(p, 1.0) == pytest.approx(2.0)


class TestRwaAmplitudeRatio:
    def test_exact_resonance_vanishes(self):
        p = QubitParams(1.0, 1.0, 0.1, 10.0)
        for t in (0.5, 3.0, 100.0):
            assert rwa_amplitude_ratio(p, t) == 0.0

    def test_one_over_t_envelope(self):
        # peaks of |sin| probe the 1/t sinc envelope
        p = QubitParams(1.0, 1.0 - 1e-4, 0.05, 10.0)
        pref = abs((p.omega_s - p.omega_m) / (p.omega_s + p.omega_m))
        for k in (10, 40, 160):
            t_k = (2 * k + 1) * math.pi / (p.omega_s + p.omega_m)
            expected = pref * 2.0 / ((p.omega_s + p.omega_m) * t_k)
            assert rwa_amplitude_ratio(p, t_k) == pytest.approx(expected, rel=1e-3)

    def test_pole_at_revival(self):
        p = QubitParams(1.0, 0.6, 0.05, 10.0)
        t_rev = 4 * math.pi / (p.omega_s - p.omega_m)
        assert math.isinf(rwa_amplitude_ratio(p, t_rev))

    def test_sinc_zero_argument_limit(self):
        p = QubitParams(1.0, 0.5, 0.05, 10.0)
        # t -> 0: both sincs -> 1, ratio -> |(ws-wm)/(ws+wm)|
        assert rwa_amplitude_ratio(p, 1e-12) == pytest.approx(0.5 / 1.5)


class TestCoCounterRatio:
    def test_small_at_generic_resonant_times(self):
        p = QubitParams(1.0, 1.0, 0.1, 25.0)
        assert co_counter_ratio(p) < 1e-2

    def test_revival_sentinel(self):
        p = QubitParams(1.0, 1.0, 0.1, 2 * math.pi / 0.1)
        assert math.isinf(co_counter_ratio(p))

    def test_gamma_zero_convention(self):
        p = QubitParams(1.0, 1.0, 0.0, 10.0)
        assert co_counter_ratio(p) == 0.0

    def test_swapped_assignment_for_negative_splitting(self):
        p_pos = QubitParams(1.0, 1.0, 0.1, 25.0)
        p_neg = QubitParams(-1.0, 1.0, 0.1, 25.0)
        # mirrored systems expose the same magnitude ratio
        assert co_counter_ratio(p_neg) == pytest.approx(co_counter_ratio(p_pos))
