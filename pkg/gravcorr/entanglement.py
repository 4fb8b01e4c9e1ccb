"""
Two-mode covariance matrix of the outgoing fields at the mechanical
resonance, logarithmic negativity, the entanglement condition and the thermal
decoherence bounds for Gaussian and non-Gaussian test-mass states.

Covariance matrices use the vacuum-normalised convention: the vacuum is the
identity and [X, Y^dagger] = 2i.  Quadrature order is (X_A, Y_A, X_B, Y_B).
"""

import dataclasses
import logging
import math

import numpy as np

from gravcorr import command
from gravcorr import dynamics
from gravcorr import params
from gravcorr.utils import DomainError

LOGGER = logging.getLogger(__name__)

REGIMES = ('gaussian', 'non-gaussian')

# negativities below this are rounding noise of an exactly separable state
EN_ROUNDOFF = 1e-12
AGREEMENT_TOL = 1e-9

SYMPLECTIC_FORM = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
PARTIAL_TRANSPOSE = np.diag([1.0, 1.0, 1.0, -1.0])


def spectral_to_covariance(spectrum):
    """
    Converts a double-sided cross-spectral matrix (vacuum 1/2, entry
    (i, j) = <a_j a_i^dagger>) into the covariance matrix of the two-photon
    modes sqrt(delta_omega / pi) a(omega_m) (vacuum 1, entry (i, j) =
    <a_i a_j^dagger>).  The delta_omega of the mode definition cancels
    against delta(0) ~ 1 / delta_omega.
    """

    return 2.0 * np.conj(np.asarray(spectrum))


@dataclasses.dataclass(frozen=True)
class CovMatrix4(object):
    """
    Two-mode covariance matrix.

    v is the real symmetric view, hermitian the complex matrix in the
    <a a^dagger>_sym form.  The real view applies the local shear
    Y -> Y - i Im(K) X to each side, which keeps every determinant; k_imag
    records the removed Im(K) of each side.  coupling and noise hold |G| and
    (2 n_th + 1)(|alpha|^2 + |beta|^2) when both sides carry the same noise.
    """

    v: np.ndarray
    delta_omega: float
    hermitian: np.ndarray = None
    k_imag: tuple = (0.0, 0.0)
    coupling: float = None
    noise: float = None

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (4, 4):
            raise DomainError('covariance matrix must be 4x4, got %s' %
                              (v.shape,))
        if not np.allclose(v, v.T, rtol=1e-12, atol=0.0):
            raise DomainError('covariance matrix must be symmetric')
        if not self.delta_omega > 0:
            raise DomainError('delta_omega must be strictly positive')
        object.__setattr__(self, 'v', v)

    @property
    def block_a(self):
        return self.v[:2, :2]

    @property
    def block_b(self):
        return self.v[2:, 2:]

    @property
    def block_ab(self):
        return self.v[:2, 2:]

    @classmethod
    def from_blocks(cls, block_a, block_b, block_ab, delta_omega, **kwargs):
        """
        Assembles [[V_A, V_AB], [V_AB^T, V_B]] from real 2x2 blocks
        """

        block_ab = np.asarray(block_ab, dtype=float)
        v = np.block([[np.asarray(block_a, dtype=float), block_ab],
                      [block_ab.T, np.asarray(block_b, dtype=float)]])
        return cls(v=v, delta_omega=delta_omega, **kwargs)

    @classmethod
    def from_coefficients(cls, k_coeff, g_coeff, noise_a, noise_b=None,
                          delta_omega=1.0):
        """
        Builds V from the input-output coefficients at resonance:
        V_A = [[1, K*], [K, 1 + |K|^2 + |G|^2 + N_A]], V_AB = [[0, G*], [G, 0]].

        Arguments:
        k_coeff - K (complex), equal for both cavities
        g_coeff - G (complex)
        noise_a - thermal noise term of cavity A,
                  (2 n_th + 1)(|alpha|^2 + |beta|^2) for equal occupations
        noise_b - same for cavity B (default: noise_a)
        delta_omega - mode bandwidth (rad/s)
        """

        noise_b = noise_a if noise_b is None else noise_b
        k_coeff, g_coeff = complex(k_coeff), complex(g_coeff)
        base = 1.0 + abs(k_coeff) ** 2 + abs(g_coeff) ** 2

        def _hermitian_block(noise):
            return np.array([[1.0, k_coeff.conjugate()],
                             [k_coeff, base + noise]])

        hermitian_ab = np.array([[0.0, g_coeff.conjugate()], [g_coeff, 0.0]])
        hermitian = np.block([[_hermitian_block(noise_a), hermitian_ab],
                              [hermitian_ab.conj().T,
                               _hermitian_block(noise_b)]])

        def _real_block(noise):
            return np.array([[1.0, k_coeff.real],
                             [k_coeff.real, base + noise - k_coeff.imag ** 2]])

        real_ab = np.array([[0.0, g_coeff.real], [g_coeff.real, 0.0]])
        symmetric = math.isclose(noise_a, noise_b, rel_tol=1e-12, abs_tol=0.0)
        return cls.from_blocks(_real_block(noise_a), _real_block(noise_b),
                               real_ab, delta_omega,
                               hermitian=hermitian,
                               k_imag=(k_coeff.imag, k_coeff.imag),
                               coupling=abs(g_coeff),
                               noise=noise_a if symmetric else None)


@dataclasses.dataclass(frozen=True)
class NegativityReport(object):
    """
    Logarithmic negativity and the entanglement condition.  entangled,
    e_n > 0 and condition_lhs < condition_rhs always agree.

    When the matrix has the symmetric resonant structure the condition sides
    are (2 n_th + 1)(|alpha|^2 + |beta|^2) and 2|G|; otherwise they are the
    squared smallest partially transposed symplectic eigenvalue and 1.
    """

    e_n: float
    sigma: float
    det_v: float
    nu_minus: float
    entangled: bool
    condition_lhs: float
    condition_rhs: float
    e_n_explicit: float = None


@dataclasses.dataclass(frozen=True)
class ConditionReport(object):
    """
    Exact resonance condition and its reduced temperature form
    gamma_m k_B T <= hbar (Lambda / 2) G rho
    """

    satisfied: bool
    lhs: float
    rhs: float
    reduced_satisfied: bool
    reduced_lhs: float
    reduced_rhs: float


@dataclasses.dataclass(frozen=True)
class DecoherenceReport(object):
    """
    Interaction rate ||H_AB|| / hbar against the thermal decoherence rate.
    chain holds hbar G m / (2 d dx^2), hbar G m / (2 d^3) and hbar G rho for
    the non-Gaussian regime.
    """

    regime: str
    interaction_rate: float
    decoherence_rate: float
    satisfied: bool
    thermal_power: float
    chain: tuple = None


def covariance_at_resonance(sys, delta_omega=None):
    """
    Covariance matrix of the outgoing fields at omega_m.  Each side's noise
    uses its own thermal channel occupations.

    Arguments:
    sys - SystemParams with equal optical coupling on both sides
    delta_omega - mode bandwidth, at least gamma_m (default gamma_m)

    Raises:
    DomainError - when omega_q or the bandwidths differ between cavities or
                  delta_omega < gamma_m
    """

    delta_omega = sys.gamma_m if delta_omega is None else delta_omega
    if not delta_omega >= sys.gamma_m * (1.0 - 1e-12):
        raise DomainError('delta_omega must be at least gamma_m (%.6g rad/s)' %
                          (sys.gamma_m,))
    if not math.isclose(sys.omega_q_a, sys.omega_q_b, rel_tol=1e-9) or \
            not math.isclose(sys.gamma_a, sys.gamma_b, rel_tol=1e-9):
        raise DomainError('the covariance matrix needs equal optical powers '
                          'and bandwidths in both cavities; symmetrize first')

    resp = dynamics.response_at(sys.omega_m, sys)
    n_a, n_b = sys.n_th_a, sys.n_th_b
    alpha2, beta2 = abs(resp.alpha_a) ** 2, abs(resp.beta_a) ** 2
    noise_a = (2.0 * n_a + 1.0) * alpha2 + (2.0 * n_b + 1.0) * beta2
    noise_b = (2.0 * n_b + 1.0) * alpha2 + (2.0 * n_a + 1.0) * beta2
    cov = CovMatrix4.from_coefficients(resp.K_a, resp.G_cross, noise_a,
                                       noise_b, delta_omega)
    if cov.noise is None:
        return cov
    # equal occupations: the full output spectrum has no extra cross terms
    spectrum = dynamics.full_output_covariance_spectrum(sys.omega_m, sys)
    return dataclasses.replace(cov, hermitian=spectral_to_covariance(spectrum))


def _invariants(block_a, block_b, block_ab, full):
    sigma = (np.linalg.det(block_a) + np.linalg.det(block_b) -
             2.0 * np.linalg.det(block_ab))
    return float(np.real(sigma)), float(np.real(np.linalg.det(full)))


def _nu_minus_squared(sigma, det_v):
    discriminant = sigma ** 2 - 4.0 * det_v
    if discriminant < 0:
        if discriminant < -1e-12 * sigma ** 2:
            raise DomainError('non-physical covariance matrix: Sigma^2 < '
                              '4 det V (%.6g < %.6g)' % (sigma ** 2,
                                                         4.0 * det_v))
        discriminant = 0.0
    denominator = sigma + math.sqrt(discriminant)
    if denominator <= 0:
        raise DomainError('non-physical covariance matrix: Sigma <= 0')
    return 2.0 * det_v / denominator


def _clip_negativity(value):
    return value if value > EN_ROUNDOFF else 0.0


def _resolvable(matrix):
    """
    True when rounding in the determinant of matrix stays below
    AGREEMENT_TOL (machine epsilon times the condition number)
    """

    return np.finfo(float).eps * np.linalg.cond(matrix) <= AGREEMENT_TOL


def log_negativity(cov):
    """
    E_N = max{-(1/2) ln[(Sigma - sqrt(Sigma^2 - 4 det V)) / 2], 0} with
    Sigma = det V_A + det V_B - 2 det V_AB.

    For matrices built from coefficients the explicit form
    -ln[sqrt(det V_A) - |G|] and the complex <a a^dagger> form are both
    evaluated and must agree within 1e-9 whenever the matrix is well enough
    conditioned for that comparison to be meaningful.

    Raises:
    DomainError - when Sigma^2 < 4 det V
    ArithmeticError - when the equivalent forms disagree
    """

    sigma, det_v = _invariants(cov.block_a, cov.block_b, cov.block_ab, cov.v)
    nu2 = _nu_minus_squared(sigma, det_v)
    if nu2 <= 0:
        raise DomainError('non-physical covariance matrix: det V <= 0')
    e_n = _clip_negativity(-0.5 * math.log(nu2))

    checkable = _resolvable(cov.v)
    if not checkable:
        LOGGER.debug('covariance matrix too ill-conditioned to cross-check '
                     'E_N at %.1g', AGREEMENT_TOL)

    if checkable and cov.hermitian is not None and \
            _resolvable(cov.hermitian):
        herm = cov.hermitian
        h_sigma, h_det = _invariants(herm[:2, :2], herm[2:, 2:], herm[:2, 2:],
                                     herm)
        h_e_n = _clip_negativity(-0.5 * math.log(_nu_minus_squared(h_sigma,
                                                                   h_det)))
        if abs(h_e_n - e_n) > AGREEMENT_TOL * max(1.0, e_n):
            raise ArithmeticError('real and complex covariance forms disagree:'
                                  ' E_N %.12g vs %.12g' % (e_n, h_e_n))

    e_n_explicit = None
    if cov.noise is not None:
        det_a = float(np.linalg.det(cov.block_a))
        e_n_explicit = _clip_negativity(-math.log(math.sqrt(det_a) -
                                                  cov.coupling))
        if checkable and \
                abs(e_n_explicit - e_n) > AGREEMENT_TOL * max(1.0, e_n):
            raise ArithmeticError('logarithmic negativity %.12g disagrees with '
                                  'the explicit form %.12g' %
                                  (e_n, e_n_explicit))
        lhs, rhs = cov.noise, 2.0 * cov.coupling
        entangled = lhs < rhs
    else:
        lhs, rhs = nu2, 1.0
        entangled = e_n > 0

    if entangled != (e_n > 0):
        LOGGER.warning('entanglement verdicts disagree at the rounding level: '
                       'E_N = %.3g, condition %.17g < %.17g', e_n, lhs, rhs)
    return NegativityReport(e_n=e_n, sigma=sigma, det_v=det_v,
                            nu_minus=math.sqrt(nu2), entangled=entangled,
                            condition_lhs=lhs, condition_rhs=rhs,
                            e_n_explicit=e_n_explicit)


def symplectic_eigenvalues(v):
    """
    Symplectic eigenvalues of a 4x4 real covariance matrix, ascending
    """

    eigen = np.abs(np.linalg.eigvals(1j * SYMPLECTIC_FORM @ np.asarray(v)))
    return np.sort(eigen)[::2]


def negativity_from_symplectic(v):
    """
    E_N = max(0, -ln nu_minus) from the smallest symplectic eigenvalue of the
    partially transposed matrix P V P, P = diag(1, 1, 1, -1).
    """

    transposed = PARTIAL_TRANSPOSE @ np.asarray(v) @ PARTIAL_TRANSPOSE
    nu_minus = symplectic_eigenvalues(transposed)[0]
    return max(0.0, -math.log(nu_minus))


def satisfies_uncertainty(v, tol=1e-9):
    """
    True when V + i Omega >= 0 up to tol (relative to the largest entry)
    """

    v = np.asarray(v, dtype=float)
    eigen = np.linalg.eigvalsh(v + 1j * SYMPLECTIC_FORM)
    return bool(eigen.min() >= -tol * max(1.0, np.abs(v).max()))


def _rotation(theta):
    return np.array([[math.cos(theta), math.sin(theta)],
                     [-math.sin(theta), math.cos(theta)]])


def _squeezer(r):
    return np.diag([math.exp(r), math.exp(-r)])


def random_covariance(rng, max_squeezing=1.0, max_thermal=3.0):
    """
    Random physical two-mode covariance matrix S diag(n1, n1, n2, n2) S^T with
    S a product of local rotations and squeezers, a beam splitter and a
    two-mode squeezer.

    Arguments:
    rng - numpy Generator
    """

    nu_a, nu_b = 1.0 + rng.uniform(0.0, max_thermal, size=2)
    local = np.zeros((4, 4))
    local[:2, :2] = _rotation(rng.uniform(0, 2 * math.pi)) @ \
        _squeezer(rng.uniform(-max_squeezing, max_squeezing)) @ \
        _rotation(rng.uniform(0, 2 * math.pi))
    local[2:, 2:] = _rotation(rng.uniform(0, 2 * math.pi)) @ \
        _squeezer(rng.uniform(-max_squeezing, max_squeezing)) @ \
        _rotation(rng.uniform(0, 2 * math.pi))
    angle = rng.uniform(0, 2 * math.pi)
    splitter = np.block([[math.cos(angle) * np.eye(2),
                          math.sin(angle) * np.eye(2)],
                         [-math.sin(angle) * np.eye(2),
                          math.cos(angle) * np.eye(2)]])
    r_two = rng.uniform(0.0, max_squeezing)
    flip = np.diag([1.0, -1.0])
    two_mode = np.block([[math.cosh(r_two) * np.eye(2), math.sinh(r_two) * flip],
                         [math.sinh(r_two) * flip, math.cosh(r_two) * np.eye(2)]])
    transform = local @ splitter @ two_mode
    v = transform @ np.diag([nu_a, nu_a, nu_b, nu_b]) @ transform.T
    return 0.5 * (v + v.T)


def entanglement_condition(sys):
    """
    Exact resonance condition (2 n_th + 1)(|alpha|^2 + |beta|^2) < 2|G| and
    the reduced form gamma_m k_B T <= hbar (Lambda / 2) G rho.  The exact
    noise term uses cavity B's channels with their own occupations.
    """

    resp = dynamics.response_at(sys.omega_m, sys)
    lhs = ((2.0 * sys.n_th_b + 1.0) * abs(resp.alpha_b) ** 2 +
           (2.0 * sys.n_th_a + 1.0) * abs(resp.beta_b) ** 2)
    rhs = 2.0 * abs(resp.G_cross)
    mech = sys.cavity_a.mech
    threshold = params.entanglement_threshold(mech, sys.gravity.lambda_form,
                                              sys.constants)
    return ConditionReport(satisfied=lhs < rhs, lhs=lhs, rhs=rhs,
                           reduced_satisfied=threshold.satisfied,
                           reduced_lhs=threshold.lhs,
                           reduced_rhs=threshold.rhs)


def decoherence_bound(mech, regime, d, delta_xq,
                      lambda_form=params.DEFAULT_LAMBDA_FORM,
                      constants=params.CONSTANTS):
    """
    Compares the gravitational interaction rate with the thermal decoherence
    rate 2 m gamma_m k_B T dx^2 / hbar^2.

    gaussian: ||H_AB|| = 2 Lambda G m rho dx^2 (dx << d)
    non-gaussian: ||H_AB|| = G m^2 / d (dx >> d)

    Arguments:
    mech - MechanicalParams
    regime - 'gaussian' or 'non-gaussian'
    d - mean separation (m)
    delta_xq - characteristic quantum scale (m)

    Raises:
    DomainError - on an unknown regime or non-positive geometry
    """

    regime = regime.replace('_', '-')
    if regime not in REGIMES:
        raise DomainError('regime must be one of %s' % (', '.join(REGIMES),))
    if not d > 0 or not delta_xq > 0:
        raise DomainError('d and delta_xq must be strictly positive')

    hbar, grav = constants.hbar, constants.G_newton
    mass, rho = mech.mass, mech.density
    thermal_power = mech.gamma_m * constants.k_B * mech.temperature
    decoherence_rate = 2.0 * mass * thermal_power * delta_xq ** 2 / hbar ** 2
    ratio = delta_xq / d
    chain = None
    if regime == 'gaussian':
        if ratio > 0.1:
            LOGGER.warning('delta_xq / d = %.3g; the Gaussian interaction '
                           'energy needs delta_xq << d', ratio)
        energy = 2.0 * lambda_form * grav * mass * rho * delta_xq ** 2
    else:
        if ratio < 10.0:
            LOGGER.warning('delta_xq / d = %.3g; the non-Gaussian interaction '
                           'energy needs delta_xq >> d', ratio)
        energy = grav * mass ** 2 / d
        chain = (hbar * grav * mass / (2.0 * d * delta_xq ** 2),
                 hbar * grav * mass / (2.0 * d ** 3),
                 hbar * grav * rho)
    interaction_rate = energy / hbar
    return DecoherenceReport(regime=regime,
                             interaction_rate=interaction_rate,
                             decoherence_rate=decoherence_rate,
                             satisfied=interaction_rate >= decoherence_rate,
                             thermal_power=thermal_power,
                             chain=chain)


def _condition_fields(condition):
    return ({'lhs': condition.lhs, 'rhs': condition.rhs,
             'satisfied': condition.satisfied},
            {'lhs': condition.reduced_lhs, 'rhs': condition.reduced_rhs,
             'satisfied': condition.reduced_satisfied})


class NegativityCommand(command.Command):
    """
    Logarithmic negativity of the outgoing fields at resonance
    """

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.description = 'Logarithmic negativity'

    def get_help_text(self):
        return 'Logarithmic negativity and entanglement conditions at omega_m'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--delta-omega', type=float, default=None,
                            help='Mode bandwidth in rad/s (default gamma_m)')

    def _execute(self):
        sys = self.system
        cov = covariance_at_resonance(sys, self.args.delta_omega)
        report = log_negativity(cov)
        exact, reduced = _condition_fields(entanglement_condition(sys))
        threshold = params.entanglement_threshold(sys.cavity_a.mech,
                                                  sys.gravity.lambda_form,
                                                  sys.constants)
        return command.CommandResult(report={
            'e_n': report.e_n,
            'e_n_explicit': report.e_n_explicit,
            'sigma': report.sigma,
            'det_v': report.det_v,
            'nu_minus': report.nu_minus,
            'entangled': report.entangled,
            'condition_exact': exact,
            'condition_reduced': reduced,
            'tq_bound_k': threshold.tq_bound,
            'delta_omega': cov.delta_omega,
            'k_imag': list(cov.k_imag),
            'params_echo': self.manifest.params_echo,
        })


class ThresholdCommand(command.Command):
    """
    T / Q_m bound and the decoherence bound for a chosen regime
    """

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.description = 'Entanglement threshold'

    def get_help_text(self):
        return 'T/Q_m bound for gravity-mediated entanglement'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--regime', choices=REGIMES, default='gaussian',
                            help='Test-mass state regime (default gaussian)')
        parser.add_argument('--dxq', type=float, default=None,
                            help='Quantum scale delta_xq in m (default: '
                                 'zero-point spread sqrt(hbar / 2 m omega_m))')
        parser.add_argument('--d', type=float, default=None,
                            help='Mean separation in m (default (m / rho)^(1/3))')

    def _execute(self):
        sys = self.system
        mech = sys.cavity_a.mech
        constants = sys.constants
        threshold = params.entanglement_threshold(mech,
                                                  sys.gravity.lambda_form,
                                                  constants)
        delta_xq = self.args.dxq
        if delta_xq is None:
            delta_xq = math.sqrt(constants.hbar /
                                 (2.0 * mech.mass * mech.omega_m))
        separation = self.args.d
        if separation is None:
            separation = (mech.mass / mech.density) ** (1.0 / 3.0)
        bound = decoherence_bound(mech, self.args.regime, separation, delta_xq,
                                  sys.gravity.lambda_form, constants)
        return command.CommandResult(report={
            'tq_bound_k': threshold.tq_bound,
            'lhs_w': threshold.lhs,
            'rhs_w': threshold.rhs,
            'satisfied': threshold.satisfied,
            'decoherence': {
                'regime': bound.regime,
                'd_m': separation,
                'dxq_m': delta_xq,
                'interaction_rate': bound.interaction_rate,
                'decoherence_rate': bound.decoherence_rate,
                'satisfied': bound.satisfied,
                'chain': list(bound.chain) if bound.chain else None,
            },
            'params_echo': self.manifest.params_echo,
        })
