"""
Gravitational form factor Lambda of two identical coaxial test masses.

The axial Newtonian force between the bodies is reduced to a single adaptive
quadrature using the axial symmetry; Lambda follows from its derivative with
respect to the centre-to-centre separation d:

    Lambda = |dF/dd| / (2 m G rho)       (convention 'derived')

which gives omega_g^2 = Lambda G rho = G m / d^3 for point masses.  The
'reference' convention is twice that value (pi/3 for touching spheres).
"""

import dataclasses
import logging
import math

import numpy as np

from gravcorr import command
from gravcorr import params
from gravcorr import utils
from gravcorr.utils import DomainError

LOGGER = logging.getLogger(__name__)

SHAPES = ('sphere', 'disk')
CONVENTIONS = ('derived', 'reference')
CONVENTION_FACTOR = {'derived': 1.0, 'reference': 2.0}

FORCE_REL_TOL = 1e-6
DERIVATIVE_FORCE_REL_TOL = 1e-10
INITIAL_STEP = 1e-3
RICHARDSON_LEVELS = 3

FORMFACTOR_COLUMNS = {'disk': ('d_over_h', 'lambda', 'est_rel_err'),
                      'sphere': ('d_over_r', 'lambda', 'est_rel_err')}


@dataclasses.dataclass(frozen=True)
class BodyShape(object):
    """
    One of two identical coaxial bodies: a sphere of radius R or a disk
    (cylinder) of radius R and thickness h, uniform density.
    """

    kind: str
    radius: float
    thickness: float = None
    density: float = params.DEFAULT_DENSITY

    def __post_init__(self):
        if self.kind not in SHAPES:
            raise DomainError('shape must be one of %s, got %r' %
                              (', '.join(SHAPES), self.kind))
        if not self.radius > 0:
            raise DomainError('radius must be strictly positive')
        if self.kind == 'disk' and not (self.thickness or 0) > 0:
            raise DomainError('a disk needs a strictly positive thickness')
        if not self.density > 0:
            raise DomainError('density must be strictly positive')

    @property
    def volume(self):
        if self.kind == 'sphere':
            return 4.0 / 3.0 * math.pi * self.radius ** 3
        return math.pi * self.radius ** 2 * self.thickness

    @property
    def mass(self):
        return self.density * self.volume

    @property
    def contact(self):
        """
        Centre-to-centre separation at which the surfaces touch
        """
        return 2.0 * self.radius if self.kind == 'sphere' else self.thickness

    @property
    def scale(self):
        """
        Length used to make separations dimensionless (R or h)
        """
        return self.radius if self.kind == 'sphere' else self.thickness

    @classmethod
    def disk(cls, aspect, thickness=1.0, density=params.DEFAULT_DENSITY):
        """
        Disk with R / h = aspect
        """
        return cls(kind='disk', radius=aspect * thickness, thickness=thickness,
                   density=density)

    @classmethod
    def sphere(cls, radius=1.0, density=params.DEFAULT_DENSITY):
        return cls(kind='sphere', radius=radius, density=density)

    def scaled(self, factor):
        return dataclasses.replace(
            self, radius=self.radius * factor,
            thickness=None if self.thickness is None else
            self.thickness * factor)


@dataclasses.dataclass(frozen=True)
class FormFactorCurve(object):
    """
    Lambda sampled over centre-to-centre separations
    """

    shape: BodyShape
    separations: np.ndarray
    lambda_values: np.ndarray
    est_rel_err: np.ndarray
    forces: np.ndarray
    convention: str = 'derived'

    @property
    def argmax(self):
        return int(np.argmax(self.lambda_values))

    @property
    def d_max_lambda(self):
        return float(self.separations[self.argmax])

    def omega_g_squared(self, constants=params.CONSTANTS):
        return self.lambda_values * constants.G_newton * self.shape.density


def _check_separation(shape, d):
    if not d >= shape.contact * (1.0 - 1e-12):
        raise DomainError('separation %.6g m is below contact (%.6g m)' %
                          (d, shape.contact))


def _overlap_area(s, radius):
    ratio = min(s / (2.0 * radius), 1.0)
    return (2.0 * radius ** 2 * math.acos(ratio) -
            0.5 * s * math.sqrt(max(4.0 * radius ** 2 - s ** 2, 0.0)))


def _disk_axial_kernel(s, d, h):
    if s == 0.0:
        # finite limit for d > h, logarithmically singular at contact
        return math.log(d ** 2 / ((d - h) * (d + h))) if d > h else math.inf
    return (-math.asinh((d + h) / s) + 2.0 * math.asinh(d / s) -
            math.asinh((d - h) / s))


def _disk_force(shape, d, rel_tol):
    radius, h = shape.radius, shape.thickness

    def integrand(s):
        return (_disk_axial_kernel(s, d, h) * 2.0 * math.pi * s *
                _overlap_area(s, radius))

    points = sorted({d - h, h, d}) if d - h > 0 else [h]
    value, error = utils.adaptive_quad(integrand, 0.0, 2.0 * radius,
                                       rel_tol=rel_tol, points=points,
                                       label='disk force')
    return value, error


def _sphere_force(shape, d, rel_tol):
    radius = shape.radius

    def integrand(z):
        slab = math.sqrt(max(radius ** 2 - z ** 2, 0.0))
        gap = d - z
        return 2.0 * math.pi * (1.0 - gap / math.hypot(slab, gap))

    value, error = utils.adaptive_quad(integrand, -radius, radius,
                                       rel_tol=rel_tol, label='sphere force')
    # slab of sphere A on sphere B reduced to a point mass by the shell theorem
    return value * shape.mass, error * shape.mass


def axial_force_with_error(shape, d, rel_tol=FORCE_REL_TOL,
                           constants=params.CONSTANTS):
    """
    Attraction of two identical coaxial bodies at separation d and the
    quadrature error bound, both in N.

    Raises:
    DomainError - when d is below contact
    QuadratureError - when the quadrature does not converge
    """

    _check_separation(shape, d)
    if shape.kind == 'sphere':
        value, error = _sphere_force(shape, d, rel_tol)
        scale = constants.G_newton * shape.density
    else:
        value, error = _disk_force(shape, d, rel_tol)
        scale = constants.G_newton * shape.density ** 2
    return scale * value, scale * error


def axial_force(shape, d, rel_tol=FORCE_REL_TOL, constants=params.CONSTANTS):
    """
    Magnitude of the Newtonian attraction between two identical coaxial
    bodies, centre-to-centre separation d (m).
    """

    return axial_force_with_error(shape, d, rel_tol, constants)[0]


def _central_difference(func, x, step):
    return (func(x + step) - func(x - step)) / (2.0 * step)


def _forward_difference(func, x, step):
    return (-11.0 * func(x) + 18.0 * func(x + step) - 9.0 * func(x + 2 * step) +
            2.0 * func(x + 3 * step)) / (6.0 * step)


def richardson_derivative(func, x, step, levels=RICHARDSON_LEVELS,
                          one_sided=False):
    """
    Derivative by step halving and Richardson extrapolation of a central
    (error orders 2, 4, ...) or forward 4-point (orders 3, 4, ...) difference.

    Returns:
    (derivative, error estimate)
    """

    if one_sided:
        difference, orders = _forward_difference, [3 + k for k in range(levels)]
    else:
        difference, orders = _central_difference, [2 + 2 * k
                                                   for k in range(levels)]
    table = [[difference(func, x, step / 2.0 ** level)]
             for level in range(levels)]
    for level in range(1, levels):
        for column in range(1, level + 1):
            factor = 2.0 ** orders[column - 1]
            table[level].append((factor * table[level][column - 1] -
                                 table[level - 1][column - 1]) / (factor - 1.0))
    best = table[-1][-1]
    error = abs(best - table[-1][-2]) if levels > 1 else abs(best)
    return best, error


def form_factor_with_error(shape, d, convention='derived',
                           constants=params.CONSTANTS):
    """
    Lambda at separation d with its estimated relative error.  Central
    differences need room below d; closer to contact a forward stencil is
    used.

    Raises:
    DomainError - when d is below contact or the convention is unknown
    QuadratureError - propagated from the force quadrature
    """

    convention = utils.canonical_convention(convention, CONVENTIONS)
    _check_separation(shape, d)
    step = d * INITIAL_STEP
    one_sided = d - step < shape.contact
    quad_errors = []

    def force(separation):
        value, error = axial_force_with_error(shape, separation,
                                              DERIVATIVE_FORCE_REL_TOL,
                                              constants)
        quad_errors.append(error)
        return value

    slope, fd_error = richardson_derivative(force, d, step,
                                            one_sided=one_sided)
    smallest_step = step / 2.0 ** (RICHARDSON_LEVELS - 1)
    noise = max(quad_errors) * 4.0 / smallest_step
    denominator = 2.0 * shape.mass * constants.G_newton * shape.density
    value = CONVENTION_FACTOR[convention] * abs(slope) / denominator
    rel_err = (fd_error + noise) / abs(slope) if slope else math.inf
    return value, rel_err


def form_factor(shape, d, convention='derived', constants=params.CONSTANTS):
    """
    Dimensionless form factor Lambda at centre-to-centre separation d
    """

    return form_factor_with_error(shape, d, convention, constants)[0]


def point_mass_form_factor(shape, d):
    """
    Far-field limit V / d^3 ('derived' convention)
    """

    return shape.volume / d ** 3


def form_factor_curve(shape, d_min, d_max, n_points, convention='derived',
                      workers=1, constants=params.CONSTANTS):
    """
    Lambda on n_points evenly spaced separations in [d_min, d_max].  Points
    are independent; results are stored by index.

    Raises:
    DomainError - when d_min is below contact or the range is empty
    """

    convention = utils.canonical_convention(convention, CONVENTIONS)
    _check_separation(shape, d_min)
    if not d_max > d_min or n_points < 2:
        raise DomainError('need d_max > d_min and at least 2 points')
    separations = np.linspace(d_min, d_max, n_points)
    lambda_values = np.empty(n_points)
    errors = np.empty(n_points)
    forces = np.empty(n_points)

    def _evaluate(index):
        lambda_values[index], errors[index] = form_factor_with_error(
            shape, separations[index], convention, constants)
        forces[index] = axial_force(shape, separations[index],
                                    constants=constants)

    utils.parallel_process_and_wait(
        ((_evaluate, (index,)) for index in range(n_points)), workers, LOGGER)

    if np.any(np.diff(forces) > 0):
        LOGGER.warning('force is not monotonically decreasing over the curve')
    return FormFactorCurve(shape=shape, separations=separations,
                           lambda_values=lambda_values, est_rel_err=errors,
                           forces=forces, convention=convention)


class FormFactorCommand(command.Command):
    """
    Emits Lambda(d) as CSV
    """

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.description = 'Form factor curve'

    def get_help_text(self):
        return 'Gravitational form factor Lambda versus separation'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--shape', choices=SHAPES, default='disk',
                            help='Body shape (default disk)')
        parser.add_argument('--aspect', type=float, default=1.5,
                            help='Disk radius over thickness (default 1.5)')
        parser.add_argument('--radius', type=float, default=None,
                            help='Radius in m (default: disk thickness 1 cm '
                                 'times aspect, sphere 1 cm)')
        parser.add_argument('--dmin', type=float, default=None,
                            help='Smallest separation in m (default contact)')
        parser.add_argument('--dmax', type=float, default=None,
                            help='Largest separation in m (default 10 R or 10 h)')
        parser.add_argument('--points', type=int, default=50,
                            help='Number of separations (default 50)')
        parser.add_argument('--convention', choices=CONVENTIONS +
                            tuple(utils.CONVENTION_ALIASES),
                            default='derived',
                            help='Lambda normalisation (default derived)')
        parser.add_argument('--workers', type=int, default=1,
                            help='Worker threads (default 1)')

    def _shape(self):
        density = self.system.cavity_a.mech.density
        if self.args.shape == 'sphere':
            return BodyShape.sphere(self.args.radius or 0.01, density)
        if not self.args.aspect > 0:
            raise DomainError('--aspect must be strictly positive')
        radius = self.args.radius or 0.01 * self.args.aspect
        return BodyShape.disk(self.args.aspect, radius / self.args.aspect,
                              density)

    def _execute(self):
        shape = self._shape()
        d_min = self.args.dmin if self.args.dmin is not None else shape.contact
        d_max = self.args.dmax if self.args.dmax is not None \
            else 10.0 * shape.scale
        curve = form_factor_curve(shape, d_min, d_max, self.args.points,
                                  self.args.convention, self.args.workers,
                                  self.system.constants)
        rows = [(d / shape.scale, value, error) for d, value, error in
                zip(curve.separations, curve.lambda_values, curve.est_rel_err)]
        return command.CommandResult(
            columns=FORMFACTOR_COLUMNS[shape.kind], rows=rows,
            comments=['convention %s; separations centre to centre; '
                      'maximum at d = %.6g m' % (curve.convention,
                                                 curve.d_max_lambda)])
