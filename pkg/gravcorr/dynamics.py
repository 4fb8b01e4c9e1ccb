"""
Frequency-domain linear response of the two cavities: mechanical
susceptibility, the 4x4 input-output transfer matrix with its thermal
columns, and the output spectral densities.

All spectral densities are double-sided: the vacuum level of a quadrature is
1/2 and a thermal force channel has n_th + 1/2.
"""

import dataclasses
import logging
import math

import numpy as np

from gravcorr import command
from gravcorr.utils import DomainError

LOGGER = logging.getLogger(__name__)

# points per gamma_m and half-width (in gamma_m) of the dense resonance window
POINTS_PER_GAMMA_M = 50
WINDOW_HALF_WIDTH = 20.0
# lowest grid frequency, in units of omega_m
GRID_FLOOR = 1e-6

SPECTRA_COLUMNS = ('freq_hz', 's_xx', 's_nn', 're_s_xy', 'im_s_xy', 'abs_g',
                   'abs_k', 'abs_alpha', 'abs_beta')


@dataclasses.dataclass(frozen=True)
class FrequencyResponse(object):
    """
    Coefficients of the input-output relation at one or more angular
    frequencies (scalars or numpy arrays of equal shape).
    """

    omega: object
    chi_qq: object
    K_a: object
    K_b: object
    G_cross: object
    alpha_a: object
    alpha_b: object
    beta_a: object
    beta_b: object


@dataclasses.dataclass(frozen=True)
class SpectraSet(object):
    """
    Output spectra on a grid of angular frequencies.  s_yy is the full
    phase-quadrature autospectrum of cavity B (signal plus noise).
    """

    grid: np.ndarray
    s_xx: np.ndarray
    s_nn: np.ndarray
    s_xy: np.ndarray
    s_yy: np.ndarray


def susceptibility(omega, mech):
    """
    Mechanical susceptibility -omega_m / (omega^2 - omega_m^2 + i gamma_m omega)

    Arguments:
    omega - angular frequency (scalar or array)
    mech - MechanicalParams
    """

    omega = np.asarray(omega, dtype=float)
    chi = -mech.omega_m / (omega ** 2 - mech.omega_m ** 2 +
                           1j * mech.gamma_m * omega)
    return chi if chi.ndim else complex(chi)


def _check_adiabatic(sys):
    for label, gamma in (('A', sys.gamma_a), ('B', sys.gamma_b)):
        if sys.omega_m > gamma / 10.0:
            LOGGER.warning('cavity %s bandwidth %.3g rad/s is not much larger '
                           'than omega_m %.3g rad/s; adiabatic elimination is '
                           'questionable', label, gamma, sys.omega_m)


def response_at(omega, sys, check=True):
    """
    Evaluates all input-output coefficients at omega.

    K = -4 omega_q^2 chi / gamma
    G = 4 omega_q^A omega_q^B omega_g^2 chi^2 / (gamma omega_m)
    alpha = 2 sqrt(2 gamma_m / gamma) omega_q chi
    beta = alpha chi omega_g^2 / omega_m

    With different bandwidths the G coefficient uses sqrt(gamma_A gamma_B).

    Arguments:
    omega - angular frequency (scalar or array)
    sys - SystemParams
    """

    if check:
        _check_adiabatic(sys)
    mech = sys.cavity_a.mech
    chi = susceptibility(omega, mech)
    omega_q_a, omega_q_b = sys.omega_q_a, sys.omega_q_b
    gamma_a, gamma_b = sys.gamma_a, sys.gamma_b
    omega_m, gamma_m = sys.omega_m, sys.gamma_m
    omega_g2 = sys.effective_omega_g ** 2
    omega_g2_thermal = sys.thermal_cross_omega_g ** 2

    alpha_a = 2.0 * math.sqrt(2.0 * gamma_m / gamma_a) * omega_q_a * chi
    alpha_b = 2.0 * math.sqrt(2.0 * gamma_m / gamma_b) * omega_q_b * chi
    return FrequencyResponse(
        omega=omega,
        chi_qq=chi,
        K_a=-4.0 * omega_q_a ** 2 * chi / gamma_a,
        K_b=-4.0 * omega_q_b ** 2 * chi / gamma_b,
        G_cross=(4.0 * omega_q_a * omega_q_b * omega_g2 * chi ** 2 /
                 (math.sqrt(gamma_a * gamma_b) * omega_m)),
        alpha_a=alpha_a,
        alpha_b=alpha_b,
        beta_a=alpha_a * chi * omega_g2_thermal / omega_m,
        beta_b=alpha_b * chi * omega_g2_thermal / omega_m)


def transfer_matrices(resp):
    """
    Builds the transfer matrix M (4x4, optical inputs) and T (4x2, thermal
    inputs) acting on (X_A, Y_A, X_B, Y_B)^in and (Q_A, Q_B)^th.  Array
    responses give stacked matrices with the frequency axis first.
    """

    chi = np.asarray(resp.chi_qq)
    shape = chi.shape
    zero = np.zeros(shape, dtype=complex)
    one = np.ones(shape, dtype=complex)

    def _b(value):
        return np.broadcast_to(np.asarray(value, dtype=complex), shape)

    m_rows = [[one, zero, zero, zero],
              [_b(resp.K_a), one, _b(resp.G_cross), zero],
              [zero, zero, one, zero],
              [_b(resp.G_cross), zero, _b(resp.K_b), one]]
    t_rows = [[zero, zero],
              [_b(resp.alpha_a), _b(resp.beta_a)],
              [zero, zero],
              [_b(resp.beta_b), _b(resp.alpha_b)]]
    m_matrix = np.moveaxis(np.array(m_rows), (0, 1), (-2, -1))
    t_matrix = np.moveaxis(np.array(t_rows), (0, 1), (-2, -1))
    return m_matrix, t_matrix


def output_spectra(grid, sys, check=True):
    """
    Output spectra on a grid:
    S_XY = G* / 2, S_XX = 1/2,
    S_NN = [1 + |K_B|^2 + (2 n_B + 1)(|alpha_B|^2 + |beta_B|^2)] / 2

    Arguments:
    grid - array of angular frequencies
    sys - SystemParams
    """

    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise DomainError('the frequency grid must not be empty')
    resp = response_at(grid, sys, check)
    n_a, n_b = sys.n_th_a, sys.n_th_b
    abs_g2 = np.abs(resp.G_cross) ** 2
    s_nn = 0.5 * (1.0 + np.abs(resp.K_b) ** 2 + (2.0 * n_b + 1.0) *
                  (np.abs(resp.alpha_b) ** 2 + np.abs(resp.beta_b) ** 2))
    s_yy = 0.5 * (1.0 + np.abs(resp.K_b) ** 2 + abs_g2) + \
        (n_a + 0.5) * np.abs(resp.beta_b) ** 2 + \
        (n_b + 0.5) * np.abs(resp.alpha_b) ** 2
    return SpectraSet(grid=grid,
                      s_xx=np.full(grid.shape, 0.5),
                      s_nn=s_nn,
                      s_xy=np.conj(resp.G_cross) / 2.0 * np.ones(grid.shape),
                      s_yy=s_yy)


def full_output_covariance_spectrum(omega, sys):
    """
    Double-sided cross-spectral matrix of (X_A, Y_A, X_B, Y_B)^out at omega,
    entry (i, j) = sum_k conj(M_ik) M_jk s_k over the six independent input
    channels.  Hermitian and positive semidefinite; entry (0, 3) is the
    conjugate of S_XY.
    """

    resp = response_at(float(omega), sys)
    m_matrix, t_matrix = transfer_matrices(resp)
    inputs = np.diag([0.5, 0.5, 0.5, 0.5])
    thermal = np.diag([sys.n_th_a + 0.5, sys.n_th_b + 0.5])
    return (np.conj(m_matrix) @ inputs @ m_matrix.T +
            np.conj(t_matrix) @ thermal @ t_matrix.T)


def resonance_window(sys, half_width=WINDOW_HALF_WIDTH):
    """
    (low, high) edges of omega_m +- half_width gamma_m, with low clipped to
    GRID_FLOOR omega_m
    """

    low = max(sys.omega_m - half_width * sys.gamma_m, sys.omega_m * GRID_FLOOR)
    return low, sys.omega_m + half_width * sys.gamma_m


def frequency_grid(sys, decades=3, coarse_points=400,
                   points_per_gamma=POINTS_PER_GAMMA_M,
                   half_width=WINDOW_HALF_WIDTH):
    """
    Positive-frequency grid: logarithmic coarse grid spanning `decades`
    around omega_m plus a dense linear window of +-half_width gamma_m around
    omega_m with points_per_gamma points per gamma_m.
    """

    omega_m, gamma_m = sys.omega_m, sys.gamma_m
    coarse = np.logspace(math.log10(omega_m) - decades,
                         math.log10(omega_m) + decades, coarse_points)
    low, high = resonance_window(sys, half_width)
    dense = np.linspace(low, high,
                        int(math.ceil(points_per_gamma * (high - low) /
                                      gamma_m)) + 1)
    return np.unique(np.concatenate([coarse, dense]))


class SpectraCommand(command.Command):
    """
    Emits the output spectra on a frequency grid as CSV
    """

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.description = 'Output spectra'
        self.grid = None

    def get_help_text(self):
        return 'Output spectral densities S_XX, S_NN, S_XY on a frequency grid'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--fmin-hz', type=float, default=None,
                            help='Lowest frequency (Hz) of a linear grid')
        parser.add_argument('--fmax-hz', type=float, default=None,
                            help='Highest frequency (Hz) of a linear grid')
        parser.add_argument('--points', type=int, default=2001,
                            help='Number of points of the linear grid')

    def _initialize(self, args):
        super()._initialize(args)
        if args.fmin_hz is not None or args.fmax_hz is not None:
            if args.fmin_hz is None or args.fmax_hz is None or \
                    not 0 <= args.fmin_hz < args.fmax_hz or args.points < 2:
                raise DomainError('--fmin-hz and --fmax-hz must both be given '
                                  'with 0 <= fmin < fmax and --points >= 2')
            self.grid = 2.0 * math.pi * np.linspace(args.fmin_hz, args.fmax_hz,
                                                    args.points)
        else:
            self.grid = frequency_grid(self.system)

    def _execute(self):
        spectra = output_spectra(self.grid, self.system)
        resp = response_at(self.grid, self.system)
        rows = []
        for index, omega in enumerate(self.grid):
            rows.append((omega / (2.0 * math.pi),
                         spectra.s_xx[index],
                         spectra.s_nn[index],
                         spectra.s_xy[index].real,
                         spectra.s_xy[index].imag,
                         abs(resp.G_cross[index]),
                         abs(resp.K_b[index]),
                         abs(resp.alpha_b[index]),
                         abs(resp.beta_b[index])))
        return command.CommandResult(
            columns=SPECTRA_COLUMNS, rows=rows,
            comments=['double-sided spectral densities; vacuum level 1/2',
                      'abs_k, abs_alpha, abs_beta refer to cavity B'])
