import sys
import unittest

import numpy as np

sys.path.append('..')
from gravcorr import dynamics
from gravcorr import params
from gravcorr.utils import DomainError


class TestResponse(unittest.TestCase):

    def setUp(self):
        self.sys = params.reference_parameters()

    def test_susceptibility_on_resonance(self):
        mech = self.sys.cavity_a.mech
        chi = dynamics.susceptibility(mech.omega_m, mech)
        self.assertAlmostEqual(chi.real, 0.0)
        self.assertAlmostEqual(chi.imag * mech.gamma_m, 1.0)

    def test_susceptibility_static(self):
        mech = self.sys.cavity_a.mech
        chi = dynamics.susceptibility(0.0, mech)
        self.assertAlmostEqual(chi.real * mech.omega_m, 1.0)

    def test_array_shapes(self):
        grid = np.linspace(1.0, 10.0, 7)
        resp = dynamics.response_at(grid, self.sys)
        m_matrix, t_matrix = dynamics.transfer_matrices(resp)
        self.assertEqual(m_matrix.shape, (7, 4, 4))
        self.assertEqual(t_matrix.shape, (7, 4, 2))
        self.assertEqual(resp.G_cross.shape, (7,))

    def test_beta_over_alpha_on_resonance(self):
        resp = dynamics.response_at(self.sys.omega_m, self.sys)
        expected = self.sys.Q_m * self.sys.gravity.omega_g ** 2 / \
            self.sys.omega_m ** 2
        self.assertAlmostEqual(abs(resp.beta_b) / abs(resp.alpha_b) / expected,
                               1.0, places=9)

    def test_negative_frequencies_conjugate(self):
        omega = np.linspace(0.1, 3.0, 9) * self.sys.omega_m
        positive = dynamics.response_at(omega, self.sys)
        negative = dynamics.response_at(-omega, self.sys)
        for name in ('chi_qq', 'K_a', 'K_b', 'G_cross', 'alpha_a', 'alpha_b',
                     'beta_a', 'beta_b'):
            np.testing.assert_allclose(getattr(negative, name),
                                       np.conj(getattr(positive, name)),
                                       rtol=1e-12, err_msg=name)

    def test_cross_coupling_peak(self):
        for system in (self.sys, self.sys.with_power_b(500.0)):
            resp = dynamics.response_at(system.omega_m, system)
            expected = (2.0 * np.sqrt(system.cooperativity_a *
                                      system.cooperativity_b) * system.Q_m *
                        (system.effective_omega_g / system.omega_m) ** 2)
            self.assertAlmostEqual(abs(resp.G_cross) / expected, 1.0,
                                   places=9)

    def test_semiclassical_model_removes_cross_coupling(self):
        sn = self.sys.replace(gravity_model='schroedinger_newton')
        quantum = dynamics.response_at(self.sys.omega_m, self.sys)
        semiclassical = dynamics.response_at(self.sys.omega_m, sn)
        self.assertEqual(semiclassical.G_cross, 0.0)
        self.assertEqual(semiclassical.beta_b, 0.0)
        self.assertEqual(semiclassical.alpha_b, quantum.alpha_b)
        self.assertEqual(semiclassical.K_b, quantum.K_b)

    def test_adiabatic_warning(self):
        mech = params.MechanicalParams(omega_m=10.0, Q_m=10.0, mass=1.0)
        optical = params.OpticalParams(power_cav=1.0, cavity_bandwidth=20.0)
        narrow = params.build_system(mech, optical)
        with self.assertLogs('gravcorr.dynamics', level='WARNING'):
            dynamics.response_at(10.0, narrow)


class TestSpectra(unittest.TestCase):

    def setUp(self):
        self.sys = params.reference_parameters()
        self.grid = dynamics.frequency_grid(self.sys)

    def test_grid(self):
        self.assertTrue(np.all(np.diff(self.grid) > 0))
        self.assertTrue(np.all(self.grid > 0))
        near = np.abs(self.grid - self.sys.omega_m) < self.sys.gamma_m
        self.assertGreaterEqual(np.count_nonzero(near),
                                dynamics.POINTS_PER_GAMMA_M)

    def test_spectra_levels(self):
        spectra = dynamics.output_spectra(self.grid, self.sys)
        np.testing.assert_allclose(spectra.s_xx, 0.5)
        self.assertTrue(np.all(spectra.s_nn >= 0.5))
        self.assertTrue(np.all(spectra.s_yy >= spectra.s_nn * 0.5))
        resp = dynamics.response_at(self.grid, self.sys)
        np.testing.assert_allclose(spectra.s_xy, np.conj(resp.G_cross) / 2.0)

    def test_empty_grid(self):
        with self.assertRaises(DomainError):
            dynamics.output_spectra([], self.sys)

    def test_full_covariance_spectrum(self):
        omega = self.sys.omega_m * 1.0000001
        full = dynamics.full_output_covariance_spectrum(omega, self.sys)
        spectra = dynamics.output_spectra([omega], self.sys)
        np.testing.assert_allclose(full, np.conj(full.T), rtol=1e-12)
        self.assertTrue(np.all(np.linalg.eigvalsh(full) >= -1e-9 *
                               np.abs(full).max()))
        np.testing.assert_allclose(full[0, 3], np.conj(spectra.s_xy[0]),
                                   rtol=1e-12)
        np.testing.assert_allclose(full[3, 3].real, spectra.s_yy[0],
                                   rtol=1e-12)
        self.assertAlmostEqual(full[0, 0].real, 0.5)

    def test_uncoupled_spectrum_has_no_cross_terms(self):
        none = self.sys.replace(gravity_model='none')
        full = dynamics.full_output_covariance_spectrum(none.omega_m, none)
        self.assertEqual(np.abs(full[0:2, 2:4]).max(), 0.0)


if __name__ == '__main__':
    unittest.main()
