import math
import sys
import unittest

sys.path.append('..')
from gravcorr import params
from gravcorr.utils import DomainError


class TestDerivedRates(unittest.TestCase):

    def setUp(self):
        self.sys = params.reference_parameters()

    def test_coupling_rate(self):
        """
        P = 2 kW, 1064 nm, m = 1 g, L = 1 m, omega_m = 2 pi gives ~1.939e6 rad/s
        """

        self.assertAlmostEqual(self.sys.omega_q_a / 1.939e6, 1.0, delta=1e-3)

    def test_power_for_omega_q_inverts_coupling_rate(self):
        optical = self.sys.cavity_a.optical
        mech = self.sys.cavity_a.mech
        power = params.power_for_omega_q(self.sys.omega_q_a, optical, mech)
        self.assertAlmostEqual(power / optical.power_cav, 1.0, places=12)

    def test_occupation_over_cooperativity(self):
        ratio = self.sys.n_th_a / self.sys.cooperativity_a
        self.assertAlmostEqual(ratio, 0.41, delta=0.041)

    def test_bandwidth_from_finesse(self):
        expected = math.pi * params.CONSTANTS.c / (2.0 * 1.0 * 6000.0)
        self.assertAlmostEqual(self.sys.gamma_a, expected)

    def cooperativity_for(self, length, finesse):
        mech = self.sys.cavity_a.mech
        optical = params.OpticalParams(power_cav=2000.0, cavity_length=length,
                                       finesse=finesse)
        omega_q = params.coupling_rate_omega_q(optical, mech)
        return params.cooperativity(omega_q, optical.bandwidth(),
                                    mech.gamma_m)

    def test_cooperativity_independent_of_length(self):
        base = self.cooperativity_for(1.0, 6000.0)
        self.assertAlmostEqual(base / self.sys.cooperativity_a, 1.0,
                               places=12)
        # at fixed finesse the cavity length cancels
        for length in (0.5, 2.0, 7.0):
            self.assertAlmostEqual(self.cooperativity_for(length, 6000.0) /
                                   base, 1.0, places=12)
        # gamma stays put when L doubles and finesse halves; C follows finesse
        self.assertAlmostEqual(self.cooperativity_for(2.0, 3000.0) / base,
                               0.5, places=12)

    def test_explicit_bandwidth_wins(self):
        optical = params.OpticalParams(power_cav=1.0, finesse=6000.0,
                                       cavity_bandwidth=123.0)
        self.assertEqual(optical.bandwidth(), 123.0)

    def test_zero_temperature_occupation(self):
        cold = params.reference_parameters(temperature=0.0)
        self.assertEqual(cold.n_th_a, 0.0)
        self.assertEqual(cold.n_th_b, 0.0)

    def test_gravity_rate(self):
        expected = math.sqrt(2.0 * params.CONSTANTS.G_newton * 19000.0)
        self.assertAlmostEqual(self.sys.gravity.omega_g, expected)

    def test_boost_keeps_gravity_relation(self):
        boosted = self.sys.with_boost(3.0)
        self.assertAlmostEqual(boosted.gravity.omega_g,
                               3.0 * self.sys.gravity.omega_g)
        self.assertAlmostEqual(boosted.gravity.lambda_form, 18.0)

    def test_model_controls_effective_rates(self):
        sn = self.sys.replace(gravity_model='schroedinger_newton')
        self.assertEqual(sn.effective_omega_g, 0.0)
        self.assertEqual(sn.thermal_cross_omega_g, 0.0)
        kept = sn.replace(sn_keep_thermal_cross=True)
        self.assertEqual(kept.thermal_cross_omega_g, self.sys.gravity.omega_g)
        none = self.sys.replace(gravity_model='none')
        self.assertEqual(none.effective_omega_g, 0.0)


class TestEntanglementThreshold(unittest.TestCase):

    def test_reference_bound(self):
        mech = params.reference_parameters().cavity_a.mech
        report = params.entanglement_threshold(mech)
        self.assertAlmostEqual(report.tq_bound / 1.5e-18, 1.0, delta=0.05)
        # T / Q_m = 3e-4 K is far above the bound
        self.assertFalse(report.satisfied)

    def test_zero_temperature_is_satisfied(self):
        mech = params.reference_parameters(temperature=0.0).cavity_a.mech
        self.assertTrue(params.entanglement_threshold(mech).satisfied)

    def test_bound_scales_inversely_with_frequency(self):
        mech = params.reference_parameters().cavity_a.mech
        doubled = params.MechanicalParams(omega_m=2.0 * mech.omega_m,
                                          Q_m=mech.Q_m, mass=mech.mass,
                                          density=mech.density,
                                          temperature=mech.temperature)
        base = params.entanglement_threshold(mech).tq_bound
        self.assertAlmostEqual(
            params.entanglement_threshold(doubled).tq_bound / base, 0.5)

    def test_rhs_follows_form_factor(self):
        mech = params.reference_parameters().cavity_a.mech
        two = params.entanglement_threshold(mech, 2.0)
        four = params.entanglement_threshold(mech, 4.0)
        self.assertAlmostEqual(four.rhs / two.rhs, 2.0)


class TestValidation(unittest.TestCase):

    def test_non_positive_inputs(self):
        with self.assertRaises(DomainError):
            params.MechanicalParams(omega_m=-1.0, Q_m=10.0, mass=1.0)
        with self.assertRaises(DomainError):
            params.MechanicalParams(omega_m=1.0, Q_m=0.5, mass=1.0)
        with self.assertRaises(DomainError):
            params.MechanicalParams(omega_m=1.0, Q_m=10.0, mass=1.0,
                                    temperature=-1.0)
        with self.assertRaises(DomainError):
            params.OpticalParams(power_cav=0.0, finesse=10.0)
        with self.assertRaises(DomainError):
            params.OpticalParams(power_cav=1.0)

    def test_unknown_gravity_model(self):
        with self.assertRaises(DomainError):
            params.reference_parameters().replace(gravity_model='classical')

    def test_cavities_share_frequency(self):
        mech_a = params.MechanicalParams(omega_m=1.0, Q_m=10.0, mass=1.0)
        mech_b = params.MechanicalParams(omega_m=2.0, Q_m=10.0, mass=1.0)
        optical = params.OpticalParams(power_cav=1.0, finesse=10.0)
        with self.assertRaises(DomainError):
            params.build_system(mech_a, optical, mech_b)

    def test_cooperativity_needs_bandwidths(self):
        with self.assertRaises(DomainError):
            params.cooperativity(1.0, 0.0, 1.0)


if __name__ == '__main__':
    unittest.main()
