import dataclasses
import math
import sys
import unittest

import numpy as np

sys.path.append('..')
from gravcorr import correlation
from gravcorr import dynamics
from gravcorr import params
from gravcorr.utils import ConfigurationError, DomainError


def optimized_reference(temperature=300.0):
    system = params.reference_parameters(temperature)
    return system.with_power_b(correlation.optimize_power_b(system))


class TestClosedForm(unittest.TestCase):

    def setUp(self):
        self.sys = optimized_reference()

    def test_one_year_for_unit_snr(self):
        result = correlation.required_tau(self.sys, 1.0)
        self.assertFalse(result.unreachable)
        self.assertAlmostEqual(result.tau_years, 1.0, delta=0.05)

    def test_optimized_b_cooperativity(self):
        self.assertAlmostEqual(self.sys.cooperativity_b, 0.5, places=9)

    def test_conventions_differ_by_sqrt_two(self):
        tau = params.SECONDS_PER_YEAR
        reference = correlation.snr_closed_form(self.sys, tau, 'reference')
        derived = correlation.snr_closed_form(self.sys, tau, 'derived')
        self.assertAlmostEqual(reference / derived, math.sqrt(2.0))

    def test_tau_scales_with_target_squared(self):
        one = correlation.required_tau(self.sys, 1.0).tau
        three = correlation.required_tau(self.sys, 3.0).tau
        self.assertAlmostEqual(three / one, 9.0)

    def test_unknown_convention(self):
        with self.assertRaises(DomainError):
            correlation.snr_closed_form(self.sys, 1e8, 'printed')

    def test_convention_alias(self):
        self.assertEqual(correlation.snr_closed_form(self.sys, 1e8, 'paper'),
                         correlation.snr_closed_form(self.sys, 1e8,
                                                     'reference'))

    def test_non_positive_target(self):
        for target in (0.0, -1.0):
            with self.assertRaises(DomainError):
                correlation.required_tau(self.sys, target)

    def test_non_positive_tau(self):
        with self.assertRaises(DomainError):
            correlation.snr_closed_form(self.sys, 0.0)

    def test_no_gravity_is_unreachable(self):
        for model in ('none', 'schroedinger_newton'):
            result = correlation.required_tau(
                self.sys.replace(gravity_model=model), 1.0)
            self.assertTrue(result.unreachable)
            self.assertTrue(math.isinf(result.tau))

    def test_short_tau_warns(self):
        with self.assertLogs('gravcorr.correlation', level='WARNING'):
            correlation.snr_closed_form(self.sys, 1.0)


class TestNumericSnr(unittest.TestCase):

    def setUp(self):
        self.sys = optimized_reference()
        self.tau = params.SECONDS_PER_YEAR

    def test_numeric_matches_derived_closed_form(self):
        numeric = correlation.snr_numeric(self.sys, self.tau)
        derived = correlation.snr_closed_form(self.sys, self.tau, 'derived')
        self.assertAlmostEqual(numeric / derived, 1.0, delta=0.01)

    def test_snr_grows_with_square_root_of_tau(self):
        one = correlation.snr_numeric(self.sys, self.tau)
        four = correlation.snr_numeric(self.sys, 4.0 * self.tau)
        self.assertAlmostEqual(four / one, 2.0, places=6)

    def test_no_quantum_coupling_gives_zero(self):
        sn = self.sys.replace(gravity_model='schroedinger_newton')
        self.assertEqual(correlation.snr_numeric(sn, self.tau), 0.0)

    def test_grid_must_cover_resonance(self):
        grid = np.linspace(0.1, 0.5 * self.sys.omega_m, 100)
        with self.assertRaises(ConfigurationError) as raised:
            correlation.snr_numeric(self.sys, self.tau, grid)
        self.assertEqual(raised.exception.field, 'grid')

    def test_low_quality_factor_uses_its_own_grid(self):
        mech = params.MechanicalParams(omega_m=self.sys.omega_m, Q_m=10.0,
                                       mass=1e-3, temperature=0.0)
        low_q = params.build_system(mech, self.sys.cavity_a.optical)
        correlation.check_grid(dynamics.frequency_grid(low_q), low_q)
        report = correlation.snr_report(low_q, 1e4)
        self.assertGreater(report.snr_numeric, 0.0)

    def test_grid_route_close_to_quadrature(self):
        grid = dynamics.frequency_grid(self.sys)
        on_grid = correlation.snr_on_grid(self.sys, self.tau, grid)
        numeric = correlation.snr_numeric(self.sys, self.tau)
        self.assertAlmostEqual(on_grid / numeric, 1.0, delta=0.03)


class TestFilterFunctional(unittest.TestCase):

    def setUp(self):
        self.sys = optimized_reference()
        self.spectra = dynamics.output_spectra(
            dynamics.frequency_grid(self.sys), self.sys)
        self.tau = params.SECONDS_PER_YEAR

    def test_optimal_filter_matches_grid_snr(self):
        filt = correlation.optimal_filter(self.spectra)
        self.assertAlmostEqual(
            correlation.snr_functional(filt, self.spectra, self.tau),
            correlation.snr_on_grid(self.sys, self.tau, self.spectra.grid))

    def test_filter_normalisation_does_not_change_snr(self):
        filt = correlation.optimal_filter(self.spectra)
        scaled = correlation.optimal_filter(self.spectra, normalization=1e-3)
        self.assertAlmostEqual(np.max(np.abs(filt)), 1.0)
        self.assertAlmostEqual(
            correlation.snr_functional(scaled, self.spectra, self.tau) /
            correlation.snr_functional(filt, self.spectra, self.tau), 1.0)

    def test_optimal_filter_beats_plain_matched_filter(self):
        optimal = correlation.snr_functional(
            correlation.optimal_filter(self.spectra), self.spectra, self.tau)
        plain = correlation.snr_functional(np.conj(self.spectra.s_xy),
                                           self.spectra, self.tau)
        self.assertGreaterEqual(optimal, plain * (1.0 - 1e-12))

    def test_optimal_filter_beats_random_perturbations(self):
        filt = correlation.optimal_filter(self.spectra)
        best = correlation.snr_functional(filt, self.spectra, self.tau)
        rng = np.random.default_rng(20240607)
        for _ in range(200):
            noise = rng.standard_normal((2, filt.size))
            perturbed = filt * (1.0 + 0.3 * (noise[0] + 1j * noise[1]))
            self.assertLessEqual(
                correlation.snr_functional(perturbed, self.spectra, self.tau),
                best * (1.0 + 1e-12))

    def test_exact_variance_lowers_snr(self):
        filt = correlation.optimal_filter(self.spectra)
        approximate = correlation.snr_functional(filt, self.spectra, self.tau)
        exact = correlation.snr_functional(filt, self.spectra, self.tau,
                                           exact_variance=True)
        self.assertLessEqual(exact, approximate)
        self.assertGreater(exact, 0.9 * approximate)

    def test_zero_filter(self):
        zero = np.zeros_like(self.spectra.s_xy)
        self.assertEqual(
            correlation.snr_functional(zero, self.spectra, self.tau), 0.0)


class TestOptimizedPower(unittest.TestCase):

    def setUp(self):
        self.sys = params.reference_parameters()
        self.power = correlation.optimize_power_b(self.sys)

    def test_three_point_scan(self):
        integrand = []
        snr = []
        for factor in (0.5, 1.0, 2.0):
            system = self.sys.with_power_b(factor * self.power)
            integrand.append(correlation.snr_integrand(system.omega_m, system))
            snr.append(correlation.snr_numeric(system,
                                               params.SECONDS_PER_YEAR))
        self.assertEqual(int(np.argmax(integrand)), 1)
        self.assertEqual(int(np.argmax(snr)), 1)

    def test_power_doubles_with_mass(self):
        mech = dataclasses.replace(self.sys.cavity_a.mech,
                                   mass=2.0 * self.sys.cavity_a.mech.mass)
        heavy = params.build_system(mech, self.sys.cavity_a.optical)
        self.assertAlmostEqual(correlation.optimize_power_b(heavy) /
                               self.power, 2.0, places=12)


class TestSnrReport(unittest.TestCase):

    def test_report_fields(self):
        system = params.reference_parameters()
        report = correlation.snr_report(system, params.SECONDS_PER_YEAR)
        self.assertIsNotNone(report.optimized_power_b)
        self.assertGreater(report.snr_closed_form, report.snr_numeric)
        fields = correlation.report_fields(
            report, system.with_power_b(report.optimized_power_b), {})
        self.assertAlmostEqual(fields['n_th_over_c'], 0.41, delta=0.041)
        self.assertAlmostEqual(fields['snr_closed_form'], 1.0, delta=0.03)


if __name__ == '__main__':
    unittest.main()
