import math
import sys
import unittest

import numpy as np

sys.path.append('..')
from gravcorr import dynamics
from gravcorr import entanglement
from gravcorr import params
from gravcorr.entanglement import CovMatrix4
from gravcorr.utils import DomainError


def explicit_negativity(noise, coupling):
    return max(0.0, -math.log(math.sqrt(1.0 + coupling ** 2 + noise) -
                              coupling))


class TestLogNegativity(unittest.TestCase):

    def test_vacuum(self):
        cov = CovMatrix4.from_blocks(np.eye(2), np.eye(2), np.zeros((2, 2)), 1.0)
        report = entanglement.log_negativity(cov)
        self.assertEqual(report.e_n, 0.0)
        self.assertFalse(report.entangled)
        self.assertAlmostEqual(report.sigma, 2.0)
        self.assertAlmostEqual(report.det_v, 1.0)

    def test_unit_coupling_without_noise(self):
        cov = CovMatrix4.from_coefficients(0.0, 1.0, 0.0)
        report = entanglement.log_negativity(cov)
        self.assertAlmostEqual(report.e_n, 0.8814, places=4)
        self.assertAlmostEqual(report.e_n, -math.log(math.sqrt(2.0) - 1.0),
                               places=12)
        self.assertAlmostEqual(report.e_n_explicit, report.e_n, places=9)
        self.assertTrue(report.entangled)

    def test_noise_at_threshold(self):
        cov = CovMatrix4.from_coefficients(0.7j, 1.3, 2.6)
        report = entanglement.log_negativity(cov)
        self.assertEqual(report.e_n, 0.0)
        self.assertFalse(report.entangled)

    def test_coefficient_sweep(self):
        for k_value in np.linspace(0.0, 5.0, 10):
            for coupling in np.linspace(0.01, 3.0, 10):
                for noise in np.linspace(0.0, 6.0, 10):
                    cov = CovMatrix4.from_coefficients(1j * k_value, coupling,
                                                       noise)
                    report = entanglement.log_negativity(cov)
                    expected = explicit_negativity(noise, coupling)
                    self.assertAlmostEqual(report.e_n, expected, delta=1e-9)
                    self.assertEqual(report.entangled, noise < 2.0 * coupling)
                    self.assertAlmostEqual(
                        entanglement.negativity_from_symplectic(cov.v),
                        report.e_n, delta=1e-8)

    def test_monotone_in_occupation(self):
        values = []
        for n_th in np.linspace(0.0, 4.0, 41):
            cov = CovMatrix4.from_coefficients(2.0j, 1.5,
                                               (2.0 * n_th + 1.0) * 0.5)
            values.append(entanglement.log_negativity(cov).e_n)
        self.assertTrue(all(later <= earlier + 1e-12
                            for earlier, later in zip(values, values[1:])))
        self.assertGreater(values[0], 0.0)
        self.assertEqual(values[-1], 0.0)

    def test_random_states_against_partial_transpose(self):
        rng = np.random.default_rng(20240607)
        entangled = 0
        for _ in range(1000):
            v = entanglement.random_covariance(rng)
            self.assertTrue(entanglement.satisfies_uncertainty(v))
            report = entanglement.log_negativity(CovMatrix4(v, 1.0))
            self.assertAlmostEqual(report.e_n,
                                   entanglement.negativity_from_symplectic(v),
                                   delta=1e-8)
            self.assertEqual(report.entangled, report.e_n > 0)
            entangled += report.entangled
        self.assertGreater(entangled, 0)
        self.assertLess(entangled, 1000)

    def test_uncertainty_violation(self):
        self.assertFalse(entanglement.satisfies_uncertainty(0.5 * np.eye(4)))
        self.assertTrue(entanglement.satisfies_uncertainty(np.eye(4)))

    def test_symplectic_eigenvalues_of_thermal_state(self):
        v = np.diag([3.0, 3.0, 5.0, 5.0])
        np.testing.assert_allclose(entanglement.symplectic_eigenvalues(v),
                                   [3.0, 5.0])

    def test_invalid_matrices(self):
        with self.assertRaises(DomainError):
            CovMatrix4(np.eye(3), 1.0)
        asymmetric = np.eye(4)
        asymmetric[0, 1] = 0.5
        with self.assertRaises(DomainError):
            CovMatrix4(asymmetric, 1.0)
        with self.assertRaises(DomainError):
            CovMatrix4(np.eye(4), 0.0)


class TestResonanceCovariance(unittest.TestCase):

    def setUp(self):
        self.sys = params.reference_parameters()

    def test_room_temperature_is_separable(self):
        cov = entanglement.covariance_at_resonance(self.sys)
        report = entanglement.log_negativity(cov)
        self.assertEqual(report.e_n, 0.0)
        self.assertFalse(report.entangled)
        self.assertEqual(cov.delta_omega, self.sys.gamma_m)
        self.assertIsNotNone(cov.noise)

    def test_cross_block_holds_gravity_coupling(self):
        cov = entanglement.covariance_at_resonance(self.sys)
        self.assertAlmostEqual(abs(cov.block_ab[0, 1]) / cov.coupling, 1.0)
        self.assertAlmostEqual(cov.block_a[0, 0], 1.0)

    def test_sheared_imaginary_part_is_recorded(self):
        cov = entanglement.covariance_at_resonance(self.sys)
        k_coeff = dynamics.response_at(self.sys.omega_m, self.sys).K_a
        self.assertEqual(cov.k_imag, (k_coeff.imag, k_coeff.imag))
        self.assertNotEqual(k_coeff.imag, 0.0)
        # K is purely imaginary on resonance
        self.assertAlmostEqual(cov.block_a[0, 1], 0.0,
                               delta=1e-9 * abs(k_coeff.imag))

    def test_uncoupled_model(self):
        none = self.sys.replace(gravity_model='none')
        cov = entanglement.covariance_at_resonance(none)
        self.assertEqual(cov.coupling, 0.0)
        self.assertEqual(entanglement.log_negativity(cov).e_n, 0.0)

    def test_unequal_temperatures(self):
        mech_b = params.MechanicalParams(omega_m=self.sys.omega_m, Q_m=1e6,
                                         mass=1e-3, temperature=4.0)
        uneven = params.build_system(self.sys.cavity_a.mech,
                                     self.sys.cavity_a.optical, mech_b)
        cov = entanglement.covariance_at_resonance(uneven)
        self.assertIsNone(cov.noise)
        self.assertGreater(cov.block_a[1, 1], cov.block_b[1, 1])
        self.assertFalse(entanglement.log_negativity(cov).entangled)

    def test_unequal_coupling_rates(self):
        with self.assertRaises(DomainError):
            entanglement.covariance_at_resonance(self.sys.with_power_b(1.0))

    def test_bandwidth_below_damping_rate(self):
        with self.assertRaises(DomainError):
            entanglement.covariance_at_resonance(self.sys,
                                                 0.5 * self.sys.gamma_m)


class TestConditions(unittest.TestCase):

    def test_zero_temperature(self):
        cold = params.reference_parameters(temperature=0.0)
        condition = entanglement.entanglement_condition(cold)
        self.assertTrue(condition.reduced_satisfied)
        # |alpha|^2 alone already outweighs 2|G|
        self.assertFalse(condition.satisfied)

    def test_room_temperature(self):
        condition = entanglement.entanglement_condition(
            params.reference_parameters())
        self.assertFalse(condition.satisfied)
        self.assertFalse(condition.reduced_satisfied)

    def test_reduced_condition_boundary(self):
        base = params.reference_parameters().cavity_a.mech
        bound = params.entanglement_threshold(base).tq_bound

        def mech_at(ratio):
            return params.MechanicalParams(
                omega_m=base.omega_m, Q_m=base.Q_m, mass=base.mass,
                density=base.density, temperature=ratio * bound * base.Q_m)

        self.assertTrue(params.entanglement_threshold(mech_at(0.999)).satisfied)
        self.assertFalse(params.entanglement_threshold(mech_at(1.001)).satisfied)


class TestDecoherenceBound(unittest.TestCase):

    def setUp(self):
        self.mech = params.reference_parameters().cavity_a.mech
        self.d = (self.mech.mass / self.mech.density) ** (1.0 / 3.0)

    def test_gaussian_rates_cancel_spread(self):
        small = entanglement.decoherence_bound(self.mech, 'gaussian', self.d,
                                               1e-9)
        large = entanglement.decoherence_bound(self.mech, 'gaussian', self.d,
                                               1e-8)
        self.assertAlmostEqual(
            small.interaction_rate / small.decoherence_rate,
            large.interaction_rate / large.decoherence_rate)
        expected = (2.0 * params.CONSTANTS.hbar * params.CONSTANTS.G_newton *
                    self.mech.density /
                    (self.mech.gamma_m * params.CONSTANTS.k_B *
                     self.mech.temperature))
        self.assertAlmostEqual(
            small.interaction_rate / small.decoherence_rate / expected, 1.0)
        self.assertIsNone(small.chain)
        self.assertFalse(small.satisfied)

    def test_non_gaussian_chain(self):
        report = entanglement.decoherence_bound(self.mech, 'non_gaussian',
                                                self.d, 20.0 * self.d)
        self.assertEqual(report.regime, 'non-gaussian')
        first, second, third = report.chain
        self.assertLess(first, second)
        # at d^3 = m / rho the mass drops out
        self.assertAlmostEqual(second / third, 0.5)
        self.assertAlmostEqual(
            report.interaction_rate,
            params.CONSTANTS.G_newton * self.mech.mass ** 2 /
            (self.d * params.CONSTANTS.hbar))

    def test_regime_warning(self):
        with self.assertLogs('gravcorr.entanglement', level='WARNING'):
            entanglement.decoherence_bound(self.mech, 'gaussian', self.d,
                                           self.d)

    def test_invalid_inputs(self):
        with self.assertRaises(DomainError):
            entanglement.decoherence_bound(self.mech, 'mixed', self.d, 1e-9)
        with self.assertRaises(DomainError):
            entanglement.decoherence_bound(self.mech, 'gaussian', 0.0, 1e-9)


if __name__ == '__main__':
    unittest.main()
