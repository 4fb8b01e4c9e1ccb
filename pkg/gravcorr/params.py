"""
Physical constants, system parameters and the derived rates consumed by the
rest of the package.

Conventions:
- SI units everywhere, angular frequencies (rad/s) internally.
- The cavity bandwidth gamma is the amplitude half-linewidth,
  gamma = pi c / (2 L finesse), when it is derived from the finesse.  With a
  1064 nm laser this reproduces n_th / C ~= 0.4 for the gram-scale parameter
  set (m = 1 g, P = 2 kW, finesse 6000, T = 300 K).
- The form factor Lambda defaults to 2.0, the value assumed for two closely
  spaced disks with R / h = 1.5.
"""

import dataclasses
import math

from gravcorr.utils import DomainError

GRAVITY_MODELS = ('quantum', 'schroedinger_newton', 'none')

DEFAULT_WAVELENGTH = 1064e-9
DEFAULT_CAVITY_LENGTH = 1.0
DEFAULT_DENSITY = 19000.0
DEFAULT_LAMBDA_FORM = 2.0

SECONDS_PER_YEAR = 365.25 * 86400.0


def _require_positive(name, value):
    if not value > 0 or not math.isfinite(value):
        raise DomainError('%s must be strictly positive, got %r' % (name, value))


@dataclasses.dataclass(frozen=True)
class PhysicalConstants(object):
    """
    Fundamental constants (SI)
    """

    G_newton: float = 6.674e-11
    hbar: float = 1.0546e-34
    k_B: float = 1.381e-23
    c: float = 2.998e8

    def __post_init__(self):
        for field in dataclasses.fields(self):
            _require_positive(field.name, getattr(self, field.name))


CONSTANTS = PhysicalConstants()


@dataclasses.dataclass(frozen=True)
class MechanicalParams(object):
    """
    Mechanical oscillator (test-mass mirror) parameters
    """

    omega_m: float
    Q_m: float
    mass: float
    density: float = DEFAULT_DENSITY
    temperature: float = 0.0

    def __post_init__(self):
        _require_positive('omega_m', self.omega_m)
        _require_positive('mass', self.mass)
        _require_positive('density', self.density)
        if not self.Q_m >= 1:
            raise DomainError('Q_m must be at least 1, got %r' % (self.Q_m,))
        if not self.temperature >= 0:
            raise DomainError('temperature must be non-negative, got %r' %
                              (self.temperature,))

    @property
    def gamma_m(self):
        """
        Mechanical damping rate omega_m / Q_m
        """
        return self.omega_m / self.Q_m


@dataclasses.dataclass(frozen=True)
class OpticalParams(object):
    """
    Optical cavity parameters.  Either finesse or cavity_bandwidth must be
    given; an explicit bandwidth wins.
    """

    power_cav: float
    laser_wavelength: float = DEFAULT_WAVELENGTH
    cavity_length: float = DEFAULT_CAVITY_LENGTH
    finesse: float = None
    cavity_bandwidth: float = None

    def __post_init__(self):
        _require_positive('power_cav', self.power_cav)
        _require_positive('laser_wavelength', self.laser_wavelength)
        _require_positive('cavity_length', self.cavity_length)
        if self.finesse is None and self.cavity_bandwidth is None:
            raise DomainError('either finesse or cavity_bandwidth is required')
        if self.finesse is not None:
            _require_positive('finesse', self.finesse)
        if self.cavity_bandwidth is not None:
            _require_positive('cavity_bandwidth', self.cavity_bandwidth)

    def omega_0(self, constants=CONSTANTS):
        """
        Laser angular frequency 2 pi c / lambda
        """
        return 2.0 * math.pi * constants.c / self.laser_wavelength

    def bandwidth(self, constants=CONSTANTS):
        """
        Cavity amplitude half-linewidth gamma (rad/s)
        """
        if self.cavity_bandwidth is not None:
            return self.cavity_bandwidth
        return math.pi * constants.c / (2.0 * self.cavity_length * self.finesse)


@dataclasses.dataclass(frozen=True)
class CavityParams(object):
    """
    One optomechanical cavity: its mirror oscillator and its optics
    """

    mech: MechanicalParams
    optical: OpticalParams


@dataclasses.dataclass(frozen=True)
class GravityCoupling(object):
    """
    Gravitational coupling between the two mirrors.  omega_g^2 = Lambda G rho.
    """

    lambda_form: float
    omega_g: float

    def __post_init__(self):
        _require_positive('lambda_form', self.lambda_form)
        _require_positive('omega_g', self.omega_g)

    @classmethod
    def from_form_factor(cls, lambda_form, density, constants=CONSTANTS):
        """
        Builds the coupling from the form factor and the mirror density.
        """
        _require_positive('lambda_form', lambda_form)
        _require_positive('density', density)
        return cls(lambda_form=lambda_form,
                   omega_g=math.sqrt(lambda_form * constants.G_newton * density))


@dataclasses.dataclass(frozen=True)
class SystemParams(object):
    """
    Full description of the two gravitationally coupled cavities.

    gravity_model selects how gravity couples the mirrors:
    quantum - Newtonian coupling of the position operators
    schroedinger_newton - semiclassical gravity sourced by the expectation
                          value; the coupling of quantum fluctuations vanishes
    none - no gravitational coupling
    sn_keep_thermal_cross keeps the thermally driven classical cross-talk
    (beta) in the schroedinger_newton model.
    """

    cavity_a: CavityParams
    cavity_b: CavityParams
    gravity: GravityCoupling
    gravity_model: str = 'quantum'
    sn_keep_thermal_cross: bool = False
    constants: PhysicalConstants = CONSTANTS

    def __post_init__(self):
        if self.gravity_model not in GRAVITY_MODELS:
            raise DomainError('gravity_model must be one of %s, got %r' %
                              (', '.join(GRAVITY_MODELS), self.gravity_model))
        mech_a, mech_b = self.cavity_a.mech, self.cavity_b.mech
        if not math.isclose(mech_a.omega_m, mech_b.omega_m, rel_tol=1e-12):
            raise DomainError('both oscillators must share omega_m')
        if not math.isclose(mech_a.mass, mech_b.mass, rel_tol=1e-12):
            raise DomainError('both oscillators must share the mass')

    @property
    def omega_m(self):
        return self.cavity_a.mech.omega_m

    @property
    def gamma_m(self):
        return self.cavity_a.mech.gamma_m

    @property
    def Q_m(self):
        return self.cavity_a.mech.Q_m

    @property
    def omega_q_a(self):
        return coupling_rate_omega_q(self.cavity_a.optical, self.cavity_a.mech,
                                     self.constants)

    @property
    def omega_q_b(self):
        return coupling_rate_omega_q(self.cavity_b.optical, self.cavity_b.mech,
                                     self.constants)

    @property
    def gamma_a(self):
        return self.cavity_a.optical.bandwidth(self.constants)

    @property
    def gamma_b(self):
        return self.cavity_b.optical.bandwidth(self.constants)

    @property
    def n_th_a(self):
        return thermal_occupation(self.cavity_a.mech, self.constants)

    @property
    def n_th_b(self):
        return thermal_occupation(self.cavity_b.mech, self.constants)

    @property
    def cooperativity_a(self):
        return cooperativity(self.omega_q_a, self.gamma_a,
                             self.cavity_a.mech.gamma_m)

    @property
    def cooperativity_b(self):
        return cooperativity(self.omega_q_b, self.gamma_b,
                             self.cavity_b.mech.gamma_m)

    @property
    def effective_omega_g(self):
        """
        omega_g seen by the coupling of quantum fluctuations; zero unless the
        gravity model is quantum.
        """
        if self.gravity_model == 'quantum':
            return self.gravity.omega_g
        return 0.0

    @property
    def thermal_cross_omega_g(self):
        """
        omega_g seen by the thermally driven cross-talk (beta).
        """
        if self.gravity_model == 'quantum':
            return self.gravity.omega_g
        if self.gravity_model == 'schroedinger_newton' and \
                self.sn_keep_thermal_cross:
            return self.gravity.omega_g
        return 0.0

    def replace(self, **changes):
        """
        Returns a copy with the given top-level fields replaced
        """
        return dataclasses.replace(self, **changes)

    def with_power_b(self, power_w):
        """
        Returns a copy with the B-side intra-cavity power replaced
        """
        optical = dataclasses.replace(self.cavity_b.optical, power_cav=power_w)
        return dataclasses.replace(
            self, cavity_b=dataclasses.replace(self.cavity_b, optical=optical))

    def with_power_a(self, power_w):
        """
        Returns a copy with the A-side intra-cavity power replaced
        """
        optical = dataclasses.replace(self.cavity_a.optical, power_cav=power_w)
        return dataclasses.replace(
            self, cavity_a=dataclasses.replace(self.cavity_a, optical=optical))

    def with_boost(self, boost):
        """
        Returns a copy whose omega_g is multiplied by boost (Lambda by
        boost^2), keeping omega_g^2 = Lambda G rho.
        """
        _require_positive('boost', boost)
        gravity = GravityCoupling(lambda_form=self.gravity.lambda_form * boost ** 2,
                                  omega_g=self.gravity.omega_g * boost)
        return dataclasses.replace(self, gravity=gravity)


def coupling_rate_omega_q(optical, mech, constants=CONSTANTS):
    """
    Optomechanical coupling rate sqrt(2 P omega_0 / (m c L omega_m)).

    Arguments:
    optical - OpticalParams
    mech - MechanicalParams
    constants - PhysicalConstants

    Raises:
    DomainError - when any input is not strictly positive
    """

    for name in ('power_cav', 'laser_wavelength', 'cavity_length'):
        _require_positive(name, getattr(optical, name))
    _require_positive('mass', mech.mass)
    _require_positive('omega_m', mech.omega_m)
    return math.sqrt(2.0 * optical.power_cav * optical.omega_0(constants) /
                     (mech.mass * constants.c * optical.cavity_length *
                      mech.omega_m))


def power_for_omega_q(omega_q, optical, mech, constants=CONSTANTS):
    """
    Inverse of coupling_rate_omega_q: the intra-cavity power giving omega_q.
    """

    _require_positive('omega_q', omega_q)
    return (omega_q ** 2 * mech.mass * constants.c * optical.cavity_length *
            mech.omega_m / (2.0 * optical.omega_0(constants)))


def cooperativity(omega_q, gamma, gamma_m):
    """
    Optomechanical cooperativity 2 omega_q^2 / (gamma gamma_m)
    """

    if not gamma > 0 or not gamma_m > 0:
        raise DomainError('gamma and gamma_m must be strictly positive')
    return 2.0 * omega_q ** 2 / (gamma * gamma_m)


def thermal_occupation(mech, constants=CONSTANTS):
    """
    High-temperature thermal occupation k_B T / (hbar omega_m)
    """

    if not mech.temperature >= 0:
        raise DomainError('temperature must be non-negative')
    return constants.k_B * mech.temperature / (constants.hbar * mech.omega_m)


@dataclasses.dataclass(frozen=True)
class ThresholdReport(object):
    """
    Both sides of gamma_m k_B T <= hbar (Lambda / 2) G rho and the largest
    T / Q_m satisfying it.
    """

    lhs: float
    rhs: float
    tq_bound: float

    @property
    def satisfied(self):
        return self.lhs <= self.rhs


def entanglement_threshold(mech, lambda_form=DEFAULT_LAMBDA_FORM,
                           constants=CONSTANTS):
    """
    Thermal-decoherence requirement for gravity-mediated entanglement.
    With the default Lambda = 2.0 the right hand side is hbar G rho.

    Arguments:
    mech - MechanicalParams
    lambda_form - form factor Lambda
    """

    _require_positive('lambda_form', lambda_form)
    lhs = mech.gamma_m * constants.k_B * mech.temperature
    rhs = constants.hbar * 0.5 * lambda_form * constants.G_newton * mech.density
    tq_bound = rhs / (constants.k_B * mech.omega_m)
    return ThresholdReport(lhs=lhs, rhs=rhs, tq_bound=tq_bound)


def build_system(mech_a, optical_a, mech_b=None, optical_b=None,
                 lambda_form=DEFAULT_LAMBDA_FORM, gravity_model='quantum',
                 sn_keep_thermal_cross=False, constants=CONSTANTS):
    """
    Convenience constructor; a missing B side mirrors the A side.
    """

    gravity = GravityCoupling.from_form_factor(lambda_form, mech_a.density,
                                               constants)
    return SystemParams(
        cavity_a=CavityParams(mech_a, optical_a),
        cavity_b=CavityParams(mech_b or mech_a, optical_b or optical_a),
        gravity=gravity,
        gravity_model=gravity_model,
        sn_keep_thermal_cross=sn_keep_thermal_cross,
        constants=constants)


def reference_parameters(temperature=300.0):
    """
    Gram-scale reference set: m = 1 g, P = 2 kW, finesse 6000, 1064 nm,
    omega_m / 2 pi = 1 Hz, Q_m = 1e6, rho = 19 g/cm^3, Lambda = 2.0.
    """

    mech = MechanicalParams(omega_m=2.0 * math.pi, Q_m=1e6, mass=1e-3,
                            density=DEFAULT_DENSITY, temperature=temperature)
    optical = OpticalParams(power_cav=2000.0, finesse=6000.0)
    return build_system(mech, optical)
