"""
Time-domain Monte Carlo of the cross-correlation estimator.

Six independent white Gaussian inputs (four vacuum quadratures and two
thermal forces) are synthesized in the frequency domain, propagated through
the input-output coefficients and transformed back.  The Gaussian classical
surrogate reproduces every symmetrized second moment of the quantum model.

Every trial draws from its own stream derived from (seed, trial index), so
ensembles do not depend on the number of workers or the order of trials.
"""

import dataclasses
import logging
import math

import numpy as np
from scipy import optimize
from scipy import signal

from gravcorr import command
from gravcorr import correlation
from gravcorr import dynamics
from gravcorr import params
from gravcorr import utils
from gravcorr import writers
from gravcorr.utils import DomainError

LOGGER = logging.getLogger(__name__)

MAX_SAMPLES = 2 ** 28
MIN_TRIALS_FOR_SNR = 50
PER_TRIAL_COLUMNS = ('trial', 'tau_s', 'c_xy')

# input channel order of the synthesis: X_A, Y_A, X_B, Y_B, Q_A, Q_B
CHANNELS = ('x_a', 'y_a', 'x_b', 'y_b', 'q_a', 'q_b')


@dataclasses.dataclass(frozen=True)
class NoiseModel(object):
    """
    White double-sided input levels: 1/2 for each vacuum quadrature and
    n_th + 1/2 for each thermal force.
    """

    vacuum: float = 0.5
    thermal_a: float = 0.5
    thermal_b: float = 0.5

    @classmethod
    def from_system(cls, sys):
        return cls(thermal_a=sys.n_th_a + 0.5, thermal_b=sys.n_th_b + 0.5)

    @property
    def levels(self):
        return np.array([self.vacuum] * 4 + [self.thermal_a, self.thermal_b])


@dataclasses.dataclass(frozen=True)
class TimeSeriesPair(object):
    """
    Simulated X_A^out and Y_B^out records of one trial
    """

    x_a: np.ndarray
    y_b: np.ndarray
    dt: float
    seed: int
    trial_index: int

    @property
    def n_samples(self):
        return len(self.x_a)

    @property
    def tau(self):
        return self.n_samples * self.dt


@dataclasses.dataclass(frozen=True)
class FilterKernel(object):
    """
    Time-domain optimal filter sampled at dt, odd length, lag 0 at the
    centre; normalization is the peak of the raw filter on a fine grid.
    """

    kernel: np.ndarray
    dt: float
    normalization: float


@dataclasses.dataclass(frozen=True)
class EnsembleResult(object):
    """
    Ensemble statistics per integration time.  snr_analytic is the quadrature
    SNR; snr_exact also includes the Gaussian terms it neglects and is the
    prediction for this finite-sample estimator.
    """

    n_trials: int
    tau_values: np.ndarray
    mu_hat: np.ndarray
    sigma_hat: np.ndarray
    snr_empirical: np.ndarray
    snr_analytic: np.ndarray
    snr_exact: np.ndarray
    mu_analytic: np.ndarray
    growth_exponent: float
    seed: int
    boost: float = 1.0
    values: list = None

    def relative_deviation(self):
        """
        (empirical - exact) / exact per tau
        """
        return (self.snr_empirical - self.snr_exact) / self.snr_exact


def trial_rng(seed, trial):
    """
    Independent generator for one trial of an ensemble
    """

    return np.random.default_rng(np.random.SeedSequence(seed,
                                                        spawn_key=(trial,)))


def _sample_count(dt, tau):
    if not dt > 0 or not tau > 0:
        raise DomainError('dt and tau must be strictly positive')
    count = int(round(tau / dt))
    if count < 2:
        raise DomainError('tau / dt must give at least two samples')
    if count > MAX_SAMPLES:
        raise DomainError('tau / dt = %d samples exceeds the limit of 2^28; '
                          'reduce tau or increase dt' % (count,))
    return count


def check_sampling(sys, dt, tau):
    """
    Raises:
    DomainError - when dt does not resolve the resonance or tau is shorter
                  than ten damping times
    """

    if dt > 2.0 * math.pi / (20.0 * sys.omega_m) * (1.0 + 1e-12):
        raise DomainError('dt = %.6g s does not resolve omega_m; need dt <= '
                          '%.6g s' % (dt, 2.0 * math.pi / (20.0 * sys.omega_m)))
    floor = correlation.MIN_DAMPING_TIMES * 2.0 * math.pi / sys.gamma_m
    if tau < floor * (1.0 - 1e-12):
        raise DomainError('tau = %.6g s is shorter than %d damping times '
                          '(%.6g s)' % (tau, correlation.MIN_DAMPING_TIMES,
                                        floor))


def synthesize_outputs(sys, dt, tau, seed, trial, check=True):
    """
    Simulates X_A^out and Y_B^out for one trial.  2N samples are synthesized
    on a periodic grid and the first half is discarded.

    Arguments:
    sys - SystemParams
    dt - sample interval (s)
    tau - record length (s); N = round(tau / dt)
    seed - unsigned 64-bit ensemble seed
    trial - trial index

    Raises:
    DomainError - on invalid sampling or more than 2^28 samples
    """

    count = _sample_count(dt, tau)
    if check:
        check_sampling(sys, dt, tau)
    total = 2 * count
    rng = trial_rng(seed, trial)
    levels = NoiseModel.from_system(sys).levels
    white = rng.standard_normal((len(CHANNELS), total)) * \
        np.sqrt(levels / dt)[:, np.newaxis]
    spectra = np.fft.rfft(white, axis=1)
    omega = 2.0 * math.pi * np.fft.rfftfreq(total, dt)
    resp = dynamics.response_at(omega, sys, check=False)
    # the numpy transform runs e^{-i w t}; the response is written for e^{+i w t}
    y_b = (np.conj(resp.G_cross) * spectra[0] + np.conj(resp.K_b) * spectra[2] +
           spectra[3] + np.conj(resp.beta_b) * spectra[4] +
           np.conj(resp.alpha_b) * spectra[5])
    x_a = np.fft.irfft(spectra[0], n=total)[count:]
    y_b = np.fft.irfft(y_b, n=total)[count:]
    return TimeSeriesPair(x_a=x_a, y_b=y_b, dt=dt, seed=seed,
                          trial_index=trial)


def filter_normalization(sys, grid=None):
    """
    Peak magnitude of the raw optimal filter on a fine grid
    """

    grid = dynamics.frequency_grid(sys) if grid is None else grid
    spectra = dynamics.output_spectra(grid, sys, check=False)
    raw = np.abs(spectra.s_xy) / (spectra.s_xx * spectra.s_nn)
    return float(raw.max())


def filter_kernel(sys, dt, n_samples, normalization=None):
    """
    Samples F(t) = int dw / 2 pi F(w) e^{i w t} on the record's own frequency
    grid, centred at lag 0 and truncated to odd length <= n_samples.
    """

    if normalization is None:
        normalization = filter_normalization(sys)
    omega = 2.0 * math.pi * np.fft.rfftfreq(n_samples, dt)
    spectra = dynamics.output_spectra(omega, sys, check=False)
    filt = correlation.optimal_filter(spectra, normalization)
    kernel = np.fft.fftshift(np.fft.irfft(filt, n=n_samples) / dt)
    if n_samples % 2 == 0:
        kernel = kernel[1:]
    return FilterKernel(kernel=kernel, dt=dt, normalization=normalization)


def estimator_cxy(pair, kernel):
    """
    C = sum_t sum_t' X_A(t) F(t - t') Y_B(t') dt^2 by FFT convolution.

    Arguments:
    pair - TimeSeriesPair
    kernel - FilterKernel or an odd-length array with lag 0 at the centre

    Raises:
    DomainError - when the kernel is longer than the records
    """

    taps = kernel.kernel if isinstance(kernel, FilterKernel) else \
        np.asarray(kernel, dtype=float)
    if len(taps) > pair.n_samples:
        raise DomainError('filter kernel (%d taps) is longer than the '
                          'records (%d samples)' % (len(taps), pair.n_samples))
    if len(taps) % 2 == 0:
        raise DomainError('filter kernel must have odd length')
    filtered = signal.fftconvolve(pair.y_b, taps, mode='same')
    return float(np.dot(pair.x_a, filtered) * pair.dt ** 2)


def analytic_prediction(sys, tau, normalization, grid=None):
    """
    Mean, Gaussian standard deviation and the quadrature SNR for the
    estimator with the normalised optimal filter.

    Returns:
    (mu, sigma_exact, snr_quadrature)
    """

    grid = dynamics.frequency_grid(sys) if grid is None else grid
    spectra = dynamics.output_spectra(grid, sys, check=False)
    filt = correlation.optimal_filter(spectra, normalization)
    mu = correlation.signal_mean(filt, spectra, tau)
    sigma = correlation.noise_std(filt, spectra, tau, exact_variance=True)
    quadrature = correlation.snr_functional(filt, spectra, tau)
    return mu, sigma, quadrature


def _aggregate(values):
    ordered = np.sort(np.asarray(values, dtype=float))
    mean = float(np.mean(ordered))
    std = float(np.std(ordered, ddof=1))
    return mean, std


def growth_exponent(tau_values, snr_values):
    """
    Slope of log SNR against log tau; None with fewer than two usable points
    """

    tau_values = np.asarray(tau_values, dtype=float)
    snr_values = np.asarray(snr_values, dtype=float)
    usable = snr_values > 0
    if np.count_nonzero(usable) < 2:
        return None
    return float(np.polyfit(np.log(tau_values[usable]),
                            np.log(snr_values[usable]), 1)[0])


def run_ensemble(sys, dt, tau_list, n_trials, seed, workers=1,
                 filter_system=None, boost=1.0, keep_values=False):
    """
    Runs n_trials independent trials for each tau and compares the empirical
    SNR with the analytic predictions.

    Arguments:
    sys - SystemParams that generates the data
    dt - sample interval (s)
    tau_list - integration times (s)
    n_trials - trials per tau, at least 2
    seed - ensemble seed
    workers - worker threads
    filter_system - SystemParams that defines the filter (default sys); null
                    models are analysed with the filter of the coupled model
    boost - recorded with the result
    keep_values - keep the per-trial estimator values
    """

    if n_trials < 2:
        raise DomainError('at least two trials are required')
    if n_trials < MIN_TRIALS_FOR_SNR:
        LOGGER.warning('%d trials are too few for SNR claims (need %d)',
                       n_trials, MIN_TRIALS_FOR_SNR)
    filter_system = filter_system or sys
    normalization = filter_normalization(filter_system)
    grid = dynamics.frequency_grid(sys)
    tau_values, mu_hat, sigma_hat = [], [], []
    snr_empirical, snr_analytic, snr_exact, mu_analytic = [], [], [], []
    per_tau_values = []

    for tau in tau_list:
        count = _sample_count(dt, tau)
        check_sampling(sys, dt, tau)
        kernel = filter_kernel(filter_system, dt, count, normalization)
        values = np.empty(n_trials)

        def _trial(index, kernel=kernel, tau=tau, values=values):
            pair = synthesize_outputs(sys, dt, tau, seed, index, check=False)
            values[index] = estimator_cxy(pair, kernel)

        utils.parallel_process_and_wait(
            ((_trial, (index,)) for index in range(n_trials)), workers, LOGGER)

        duration = count * dt
        mean, std = _aggregate(values)
        mu, sigma, quadrature = _predict(sys, filter_system, duration,
                                         normalization, grid)
        tau_values.append(duration)
        mu_hat.append(mean)
        sigma_hat.append(std)
        snr_empirical.append(mean / std if std > 0 else 0.0)
        snr_analytic.append(quadrature)
        snr_exact.append(mu / sigma if sigma > 0 else 0.0)
        mu_analytic.append(mu)
        per_tau_values.append(values)
        LOGGER.info('tau = %.6g s: empirical SNR %.4g, predicted %.4g',
                    duration, snr_empirical[-1], snr_exact[-1])

    return EnsembleResult(n_trials=n_trials,
                          tau_values=np.array(tau_values),
                          mu_hat=np.array(mu_hat),
                          sigma_hat=np.array(sigma_hat),
                          snr_empirical=np.array(snr_empirical),
                          snr_analytic=np.array(snr_analytic),
                          snr_exact=np.array(snr_exact),
                          mu_analytic=np.array(mu_analytic),
                          growth_exponent=growth_exponent(tau_values,
                                                          snr_empirical),
                          seed=seed,
                          boost=boost,
                          values=per_tau_values if keep_values else None)


def _predict(sys, filter_system, tau, normalization, grid):
    if filter_system is sys:
        return analytic_prediction(sys, tau, normalization, grid)
    # filter from the coupled model, statistics from the data model
    data = dynamics.output_spectra(grid, sys, check=False)
    filt = correlation.optimal_filter(
        dynamics.output_spectra(grid, filter_system, check=False),
        normalization)
    return (correlation.signal_mean(filt, data, tau),
            correlation.noise_std(filt, data, tau, exact_variance=True),
            correlation.snr_functional(filt, data, tau))


def desk_scale_boost(sys, tau, target_snr=5.0):
    """
    Factor on omega_g that makes the quadrature SNR equal target_snr at tau
    """

    rate = correlation.snr_squared_rate(sys, 'derived')
    if rate <= 0:
        raise DomainError('the system has no quantum gravitational coupling')
    guess = (target_snr ** 2 / (tau * rate)) ** 0.25

    def mismatch(log_boost):
        boosted = sys.with_boost(math.exp(log_boost))
        return math.log(correlation.snr_numeric(boosted, tau) / target_snr)

    low, high = math.log(guess) - 2.0, math.log(guess) + 2.0
    return math.exp(optimize.brentq(mismatch, low, high, xtol=1e-10))


def desk_scale_preset(omega_m_hz=10.0, q_m=100.0, target_snr=5.0,
                      damping_times=100.0, temperature=0.0):
    """
    Laboratory-scale system for validating the SNR formulas: the reference
    cavities with omega_m / 2 pi = omega_m_hz, the given Q_m, optimal B-side
    power and omega_g boosted so the quadrature SNR is target_snr after
    damping_times mechanical damping times.

    Returns:
    (SystemParams, boost, tau)
    """

    reference = params.reference_parameters(temperature)
    mech = dataclasses.replace(reference.cavity_a.mech,
                               omega_m=2.0 * math.pi * omega_m_hz, Q_m=q_m)
    sys = params.build_system(mech, reference.cavity_a.optical)
    sys = sys.with_power_b(correlation.optimize_power_b(sys))
    tau = damping_times * 2.0 * math.pi / sys.gamma_m
    boost = desk_scale_boost(sys, tau, target_snr)
    return sys.with_boost(boost), boost, tau


def _parse_tau_list(text):
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise DomainError('--tau must be a comma separated list of seconds')
    if not values or any(value <= 0 for value in values):
        raise DomainError('--tau values must be strictly positive')
    return values


class MonteCarloCommand(command.Command):
    """
    Ensemble run of the time-domain estimator
    """

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.description = 'Monte Carlo ensemble'

    def get_help_text(self):
        return 'Time-domain Monte Carlo of the correlation estimator'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--dt', type=float, default=None,
                            help='Sample interval in s (default 2 pi / 20 omega_m)')
        parser.add_argument('--tau', default=None,
                            help='Comma separated integration times in s '
                                 '(default 100 damping times)')
        parser.add_argument('--trials', type=int, default=200,
                            help='Trials per integration time (default 200)')
        parser.add_argument('--boost', type=float, default=None,
                            help='Factor on omega_g (default 1, or the '
                                 'desk-scale boost with --desk-preset)')
        parser.add_argument('--desk-preset', action='store_true',
                            default=False,
                            help='Use the boosted 10 Hz, Q_m = 100 preset')
        parser.add_argument('--per-trial-csv', default=None,
                            help='Write trial, tau_s, c_xy to this file')
        parser.add_argument('--workers', type=int, default=1,
                            help='Worker threads (default 1)')

    def _execute(self):
        sys = self.system
        boost = 1.0
        if self.args.desk_preset:
            sys, boost, _ = desk_scale_preset()
        if self.args.boost is not None:
            sys = sys.with_boost(self.args.boost / boost)
            boost = self.args.boost
        seed = self.args.seed if self.args.seed is not None else 0
        if not self.manifest.seeds:
            self.manifest.seeds.append(seed)
        dt = self.args.dt or 2.0 * math.pi / (20.0 * sys.omega_m)
        if self.args.tau:
            tau_list = _parse_tau_list(self.args.tau)
        else:
            tau_list = [100.0 * 2.0 * math.pi / sys.gamma_m]

        filter_system = sys
        if sys.gravity_model != 'quantum':
            filter_system = sys.replace(gravity_model='quantum')
        result = run_ensemble(sys, dt, tau_list, self.args.trials, seed,
                              self.args.workers, filter_system, boost,
                              keep_values=bool(self.args.per_trial_csv))

        if self.args.per_trial_csv:
            rows = [(index, tau, value)
                    for tau, values in zip(result.tau_values, result.values)
                    for index, value in enumerate(values)]
            writers.write_csv(self.args.per_trial_csv, PER_TRIAL_COLUMNS, rows,
                              ['boost %.6g; seed %d' % (boost, seed)])

        return command.CommandResult(
            report={
                'boost': boost,
                'seed': seed,
                'dt_s': dt,
                'n_trials': result.n_trials,
                'tau_s': result.tau_values,
                'mu_hat': result.mu_hat,
                'sigma_hat': result.sigma_hat,
                'snr_empirical': result.snr_empirical,
                'snr_analytic': result.snr_analytic,
                'snr_exact_variance': result.snr_exact,
                'mu_analytic': result.mu_analytic,
                'growth_exponent': result.growth_exponent,
                'filter_model': filter_system.gravity_model,
                'params_echo': self.manifest.params_echo,
            },
            extra_outputs=[self.args.per_trial_csv]
            if self.args.per_trial_csv else [])
