"""
Cross-correlation signal-to-noise ratio of the X_A / Y_B read-outs: optimal
filter, the frequency-domain SNR integral, the closed form, the read-out
power optimization and the integration time needed for a target SNR.

The estimator is C = sum_t sum_t' X_A(t) F(t - t') Y_B(t') without a 1/tau
prefactor; its mean and standard deviation both grow with tau and only their
ratio is meaningful.
"""

import dataclasses
import logging
import math

import numpy as np
from scipy import integrate

from gravcorr import command
from gravcorr import dynamics
from gravcorr import params
from gravcorr import utils
from gravcorr.utils import ConfigurationError, DomainError, adaptive_quad

LOGGER = logging.getLogger(__name__)

CONVENTIONS = ('reference', 'derived')

# tau below this many damping times violates the stationarity assumption
MIN_DAMPING_TIMES = 10.0


@dataclasses.dataclass(frozen=True)
class SnrReport(object):
    """
    SNR of the correlation measurement by both routes
    """

    snr_numeric: float
    snr_closed_form: float
    snr_closed_form_derived: float
    tau: float
    filter: np.ndarray
    grid: np.ndarray
    optimized_power_b: float = None


@dataclasses.dataclass(frozen=True)
class TauResult(object):
    """
    Integration time for a target SNR; unreachable when the correlation
    signal vanishes (tau is then infinite).
    """

    tau: float
    target_snr: float
    unreachable: bool = False

    @property
    def tau_years(self):
        return self.tau / params.SECONDS_PER_YEAR


def _double_sided_integral(values, grid):
    """
    int_{-inf}^{inf} dw / 2 pi of an even integrand sampled on a positive grid
    """

    return 2.0 * integrate.trapezoid(values, grid) / (2.0 * math.pi)


def optimal_filter(spectra, normalization=None):
    """
    Matched filter F ~ S_XY* / (S_XX S_NN), normalised to unit peak magnitude
    on the grid, or divided by `normalization` when given.

    Raises:
    DomainError - when S_XX or S_NN is not strictly positive on the grid
    """

    if np.any(spectra.s_xx <= 0) or np.any(spectra.s_nn <= 0):
        raise DomainError('S_XX and S_NN must be strictly positive on the grid')
    raw = np.conj(spectra.s_xy) / (spectra.s_xx * spectra.s_nn)
    peak = np.max(np.abs(raw)) if normalization is None else normalization
    if peak == 0:
        return np.zeros_like(raw)
    return raw / peak


def signal_mean(filt, spectra, tau):
    """
    mu = tau int dw / 2 pi Re[S_XY F]
    """

    return tau * _double_sided_integral(np.real(spectra.s_xy * filt),
                                        spectra.grid)


def noise_std(filt, spectra, tau, exact_variance=False):
    """
    sigma = [tau int dw / 2 pi S_XX S_NN |F|^2]^(1/2).

    With exact_variance the full Gaussian variance is used instead: S_NN is
    replaced by the full S_YY and the squared cross-spectrum term
    Re[(S_XY F)^2] is added.
    """

    if exact_variance:
        values = spectra.s_xx * spectra.s_yy * np.abs(filt) ** 2 + \
            np.real((spectra.s_xy * filt) ** 2)
    else:
        values = spectra.s_xx * spectra.s_nn * np.abs(filt) ** 2
    return math.sqrt(max(tau * _double_sided_integral(values, spectra.grid),
                         0.0))


def snr_functional(filt, spectra, tau, exact_variance=False):
    """
    SNR = mu / sigma for an arbitrary filter on the spectra grid
    """

    sigma = noise_std(filt, spectra, tau, exact_variance)
    if sigma == 0:
        return 0.0
    return signal_mean(filt, spectra, tau) / sigma


def check_tau(sys, tau):
    """
    Warns when tau is shorter than MIN_DAMPING_TIMES mechanical damping times.

    Raises:
    DomainError - when tau is not strictly positive
    """

    if not tau > 0:
        raise DomainError('tau must be strictly positive, got %r' % (tau,))
    floor = MIN_DAMPING_TIMES * 2.0 * math.pi / sys.gamma_m
    if tau < floor:
        LOGGER.warning('tau = %.3g s is shorter than %d damping times '
                       '(%.3g s); the stationary SNR formula is not reliable',
                       tau, MIN_DAMPING_TIMES, floor)


def check_grid(grid, sys):
    """
    Checks that the grid covers omega_m +- 20 gamma_m.

    Raises:
    ConfigurationError - when the resonance window is not covered
    """

    grid = np.asarray(grid, dtype=float)
    low, high = dynamics.resonance_window(sys)
    if grid.size == 0 or np.abs(grid).min() > low or np.abs(grid).max() < high:
        raise ConfigurationError('frequency grid must cover omega_m +- %g '
                                 'gamma_m (%.6g .. %.6g rad/s)' %
                                 (dynamics.WINDOW_HALF_WIDTH, low, high),
                                 field='grid')
    window = grid[(grid >= low) & (grid <= high)]
    if window.size < dynamics.POINTS_PER_GAMMA_M * (high - low) / sys.gamma_m:
        LOGGER.warning('frequency grid has fewer than %d points per gamma_m '
                       'around the resonance', dynamics.POINTS_PER_GAMMA_M)


def snr_integrand(omega, sys):
    """
    |S_XY|^2 / (S_XX S_NN) at omega (scalar or array)
    """

    spectra = dynamics.output_spectra(omega, sys, check=False)
    values = np.abs(spectra.s_xy) ** 2 / (spectra.s_xx * spectra.s_nn)
    return values if np.ndim(omega) else float(values[0])


def _quad(func, low, high, points=None, rel_tol=1e-9):
    return adaptive_quad(func, low, high, rel_tol=rel_tol, points=points,
                         label='SNR integral')[0]


def snr_numeric(sys, tau, grid=None):
    """
    SNR = sqrt(tau) [int dw / 2 pi |S_XY|^2 / (S_XX S_NN)]^(1/2) evaluated by
    adaptive quadrature, split at the edges of the resonance window.

    Arguments:
    sys - SystemParams
    tau - integration time (s)
    grid - optional frequency grid; it must resolve the resonance window

    Raises:
    ConfigurationError - when the grid misses the resonance window
    """

    check_tau(sys, tau)
    dynamics.response_at(sys.omega_m, sys)
    if grid is not None:
        check_grid(grid, sys)
    if sys.effective_omega_g == 0:
        return 0.0

    half = dynamics.WINDOW_HALF_WIDTH * sys.gamma_m
    low, high = max(sys.omega_m - half, 0.0), sys.omega_m + half

    def func(omega):
        return snr_integrand(omega, sys)

    total = _quad(func, low, high, points=[sys.omega_m])
    if low > 0:
        total += _quad(func, 0.0, low, rel_tol=1e-6)
    total += _quad(func, high, np.inf, rel_tol=1e-6)
    return math.sqrt(tau * 2.0 * total / (2.0 * math.pi))


def snr_on_grid(sys, tau, grid):
    """
    SNR from the optimal filter evaluated on a grid (trapezoid
    rule); equals snr_functional with the optimal filter.
    """

    spectra = dynamics.output_spectra(grid, sys)
    return snr_functional(optimal_filter(spectra), spectra, tau)


def optimize_power_b(sys):
    """
    B-side intra-cavity power maximising the on-resonance SNR integrand:
    omega_q^B = sqrt(gamma gamma_m / 4), i.e. C_B = 1/2.
    """

    mech, optical = sys.cavity_b.mech, sys.cavity_b.optical
    omega_q = math.sqrt(sys.gamma_b * mech.gamma_m / 4.0)
    return params.power_for_omega_q(omega_q, optical, mech, sys.constants)


def snr_squared_rate(sys, convention):
    convention = utils.canonical_convention(convention, CONVENTIONS)
    omega_g = sys.effective_omega_g
    omega_m = sys.omega_m
    rate = (sys.cooperativity_a * sys.Q_m * omega_g ** 4 /
            (2.0 * (sys.n_th_b + 1.0) * omega_m ** 3))
    if convention == 'derived':
        rate = rate / 2.0
    return rate


def _check_closed_form_assumptions(sys):
    if not math.isclose(sys.cooperativity_b, 0.5, rel_tol=1e-2):
        LOGGER.warning('cavity B cooperativity is %.3g, not the optimum 1/2; '
                       'the closed-form SNR assumes optimized read-out power',
                       sys.cooperativity_b)
    beta_over_alpha = sys.Q_m * sys.thermal_cross_omega_g ** 2 / sys.omega_m ** 2
    if beta_over_alpha > 0.1:
        LOGGER.warning('|beta/alpha| = %.3g at resonance is not small; '
                       'neglecting |beta_B|^2 is inaccurate', beta_over_alpha)


def snr_closed_form(sys, tau, convention='reference'):
    """
    SNR = [tau C_A Q_m omega_g^4 / (2 (n_th^B + 1) omega_m^3)]^(1/2).

    convention='reference' is the published expression; convention='derived'
    completes the on-resonance integral exactly, which halves SNR^2 and agrees
    with snr_numeric.
    """

    check_tau(sys, tau)
    _check_closed_form_assumptions(sys)
    return math.sqrt(tau * snr_squared_rate(sys, convention))


def required_tau(sys, target_snr, convention='reference'):
    """
    Integration time for target_snr from the closed form.

    Raises:
    DomainError - when target_snr is not strictly positive
    """

    if not target_snr > 0:
        raise DomainError('target SNR must be strictly positive, got %r' %
                          (target_snr,))
    _check_closed_form_assumptions(sys)
    rate = snr_squared_rate(sys, convention)
    if rate == 0:
        return TauResult(tau=math.inf, target_snr=target_snr, unreachable=True)
    return TauResult(tau=target_snr ** 2 / rate, target_snr=target_snr)


def snr_report(sys, tau, optimize_b=True, grid=None):
    """
    Evaluates both SNR routes and the optimal filter.  With optimize_b the
    B-side power is first set to its optimum.
    """

    power_b = None
    if optimize_b:
        power_b = optimize_power_b(sys)
        sys = sys.with_power_b(power_b)
    if grid is None:
        grid = dynamics.frequency_grid(sys)
    spectra = dynamics.output_spectra(grid, sys)
    return SnrReport(snr_numeric=snr_numeric(sys, tau, grid),
                     snr_closed_form=snr_closed_form(sys, tau, 'reference'),
                     snr_closed_form_derived=snr_closed_form(sys, tau,
                                                             'derived'),
                     tau=tau,
                     filter=optimal_filter(spectra),
                     grid=grid,
                     optimized_power_b=power_b)


def report_fields(report, sys, params_echo):
    """
    JSON fields shared by the snr and tau commands
    """

    return {
        'snr_numeric': report.snr_numeric,
        'snr_closed_form': report.snr_closed_form,
        'snr_closed_form_derived': report.snr_closed_form_derived,
        'tau_s': report.tau,
        'tau_years': report.tau / params.SECONDS_PER_YEAR,
        'power_b_opt_w': report.optimized_power_b,
        'cooperativity_a': sys.cooperativity_a,
        'n_th_b': sys.n_th_b,
        'n_th_over_c': sys.n_th_a / sys.cooperativity_a,
        'params_echo': params_echo,
    }


class SnrCommand(command.Command):
    """
    SNR after a given integration time
    """

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.description = 'Correlation SNR'

    def get_help_text(self):
        return 'SNR of the X_A / Y_B cross-correlation after --tau seconds'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--tau', type=float,
                            default=params.SECONDS_PER_YEAR,
                            help='Integration time in seconds (default 1 year)')
        parser.add_argument('--no-optimize-power-b', dest='optimize_power_b',
                            action='store_false', default=True,
                            help='Keep the configured B-side power')

    def _execute(self):
        report = snr_report(self.system, self.args.tau,
                            optimize_b=self.args.optimize_power_b)
        sys = self.system
        if report.optimized_power_b is not None:
            sys = sys.with_power_b(report.optimized_power_b)
        return command.CommandResult(
            report=report_fields(report, sys, self.manifest.params_echo))


class TauCommand(command.Command):
    """
    Integration time needed for a target SNR
    """

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.description = 'Required integration time'

    def get_help_text(self):
        return 'Integration time for --target-snr (closed form, B power optimized)'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--target-snr', type=float, default=1.0,
                            help='Target SNR (default 1)')
        parser.add_argument('--convention', choices=CONVENTIONS +
                            tuple(utils.CONVENTION_ALIASES),
                            default='reference',
                            help='Closed-form normalisation (default reference)')

    def _execute(self):
        power_b = optimize_power_b(self.system)
        sys = self.system.with_power_b(power_b)
        convention = utils.canonical_convention(self.args.convention,
                                                CONVENTIONS)
        result = required_tau(sys, self.args.target_snr, convention)
        if result.unreachable:
            fields = {'snr_numeric': 0.0, 'snr_closed_form': 0.0,
                      'snr_closed_form_derived': 0.0, 'tau_s': math.inf,
                      'tau_years': math.inf, 'power_b_opt_w': power_b,
                      'unreachable': True,
                      'params_echo': self.manifest.params_echo}
        else:
            report = snr_report(sys, result.tau, optimize_b=False)
            report = dataclasses.replace(report, optimized_power_b=power_b)
            fields = report_fields(report, sys, self.manifest.params_echo)
            fields['unreachable'] = False
        fields['target_snr'] = self.args.target_snr
        fields['convention'] = convention
        return command.CommandResult(report=fields)
