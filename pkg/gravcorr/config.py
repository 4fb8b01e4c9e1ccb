"""
Configuration file handling: TOML or JSON documents describing the two
cavities, turned into validated SystemParams.

Sections and keys:
[mechanical_a] omega_m_hz, q_m, mass_kg, density_kg_m3, temperature_k
[optical_a]    power_w, wavelength_m, length_m, finesse | bandwidth_rad_s
[mechanical_b], [optical_b]  same keys; missing keys mirror the A side
[gravity]      lambda_form
[model]        gravity_model, sn_keep_thermal_cross
[logging]      optional logging.config.dictConfig dictionary
"""

import copy
import math

from gravcorr import params
from gravcorr.utils import Configuration, ConfigurationError, DomainError

REQUIRED = object()

MECHANICAL_KEYS = {
    'omega_m_hz': REQUIRED,
    'q_m': REQUIRED,
    'mass_kg': REQUIRED,
    'density_kg_m3': params.DEFAULT_DENSITY,
    'temperature_k': REQUIRED,
}

OPTICAL_KEYS = {
    'power_w': REQUIRED,
    'wavelength_m': params.DEFAULT_WAVELENGTH,
    'length_m': params.DEFAULT_CAVITY_LENGTH,
    'finesse': None,
    'bandwidth_rad_s': None,
}

SCHEMA = {
    'mechanical_a': MECHANICAL_KEYS,
    'mechanical_b': MECHANICAL_KEYS,
    'optical_a': OPTICAL_KEYS,
    'optical_b': OPTICAL_KEYS,
    'gravity': {'lambda_form': params.DEFAULT_LAMBDA_FORM},
    'model': {'gravity_model': 'quantum', 'sn_keep_thermal_cross': False},
}

# keys that may be zero
NON_NEGATIVE = ('temperature_k',)

MIRRORED = {'mechanical_b': 'mechanical_a', 'optical_b': 'optical_a'}

# the gram-scale reference parameters used when no file is given
DEFAULT_DOCUMENT = {
    'mechanical_a': {'omega_m_hz': 1.0, 'q_m': 1e6, 'mass_kg': 1e-3,
                     'density_kg_m3': 19000.0, 'temperature_k': 300.0},
    'optical_a': {'power_w': 2000.0, 'wavelength_m': 1064e-9, 'length_m': 1.0,
                  'finesse': 6000.0},
    'gravity': {'lambda_form': 2.0},
    'model': {'gravity_model': 'quantum'},
}


class SystemConfiguration(Configuration):
    """
    Validated configuration of the two cavity system
    """

    def __init__(self, config_file_path=None, document=None):
        if document is not None and 'params_echo' in document:
            document = document['params_echo']
        super().__init__(config_file_path=config_file_path, document=document)
        self.logging = self.document.get('logging')
        self.values = {}
        self.validate()
        self.system = self._build_system()

    def validate(self):
        """
        Checks section and key names, fills in defaults and checks values.

        Raises:
        ConfigurationError - naming the offending field
        """

        for section, value in self.document.items():
            if section == 'logging':
                if not isinstance(value, dict):
                    raise ConfigurationError('logging must be a table',
                                             field='logging')
                continue
            if section not in SCHEMA:
                raise ConfigurationError('unknown section [%s]' % (section,),
                                         field=section)
            if not isinstance(value, dict):
                raise ConfigurationError('[%s] must be a table' % (section,),
                                         field=section)
            for key in value:
                if key not in SCHEMA[section]:
                    raise ConfigurationError('unknown key %s.%s' %
                                             (section, key),
                                             field='%s.%s' % (section, key))

        for section in ('mechanical_a', 'optical_a'):
            if not self.has_section(section):
                raise ConfigurationError('missing required section [%s]' %
                                         (section,), field=section)

        for section, keys in SCHEMA.items():
            resolved = {}
            for key, default in keys.items():
                field = '%s.%s' % (section, key)
                mirror = MIRRORED.get(section)
                if key in ('gravity_model', 'sn_keep_thermal_cross'):
                    resolved[key] = self._model_value(section, key, default)
                    continue
                value = self.getfloat(section, key, None, mirror)
                if value is None:
                    if default is REQUIRED:
                        raise ConfigurationError('missing required key %s' %
                                                 (field,), field=field)
                    value = default
                if value is not None:
                    _check_value(field, key, value)
                resolved[key] = value
            self.values[section] = resolved

        for section in ('optical_a', 'optical_b'):
            if self.values[section]['finesse'] is None and \
                    self.values[section]['bandwidth_rad_s'] is None:
                raise ConfigurationError('%s needs finesse or bandwidth_rad_s' %
                                         (section,),
                                         field='%s.finesse' % (section,))

    def _model_value(self, section, key, default):
        if key == 'gravity_model':
            value = self.get(section, key, default)
            value = str(value).strip().lower().replace('-', '_')
            if value not in params.GRAVITY_MODELS:
                raise ConfigurationError(
                    '%s.%s must be one of %s' %
                    (section, key, ', '.join(params.GRAVITY_MODELS)),
                    field='%s.%s' % (section, key))
            return value
        return self.getboolean(section, key, default)

    def _build_system(self):
        mechs = {}
        opticals = {}
        for side in ('a', 'b'):
            mech = self.values['mechanical_' + side]
            optical = self.values['optical_' + side]
            mechs[side] = params.MechanicalParams(
                omega_m=2.0 * math.pi * mech['omega_m_hz'],
                Q_m=mech['q_m'],
                mass=mech['mass_kg'],
                density=mech['density_kg_m3'],
                temperature=mech['temperature_k'])
            opticals[side] = params.OpticalParams(
                power_cav=optical['power_w'],
                laser_wavelength=optical['wavelength_m'],
                cavity_length=optical['length_m'],
                finesse=optical['finesse'],
                cavity_bandwidth=optical['bandwidth_rad_s'])
        model = self.values['model']
        try:
            return params.build_system(
                mechs['a'], opticals['a'], mechs['b'], opticals['b'],
                lambda_form=self.values['gravity']['lambda_form'],
                gravity_model=model['gravity_model'],
                sn_keep_thermal_cross=model['sn_keep_thermal_cross'])
        except DomainError as domain_error:
            raise ConfigurationError(str(domain_error), field='mechanical_b')

    def echo(self):
        """
        Fully resolved parameters (defaults applied, B side explicit) as a
        document that parses back to the same SystemParams.
        """

        echo = {}
        for section, values in self.values.items():
            echo[section] = {key: value for key, value in values.items()
                             if value is not None}
        return echo


def _check_value(field, key, value):
    if not math.isfinite(value):
        raise ConfigurationError('%s must be finite' % (field,), field=field)
    if key in NON_NEGATIVE:
        if value < 0:
            raise ConfigurationError('%s must be non-negative, got %r' %
                                     (field, value), field=field)
    elif key == 'q_m':
        if value < 1:
            raise ConfigurationError('%s must be at least 1, got %r' %
                                     (field, value), field=field)
    elif value <= 0:
        raise ConfigurationError('%s must be strictly positive, got %r' %
                                 (field, value), field=field)


def load_configuration(path=None, document=None):
    """
    Loads a SystemConfiguration from a file, a document, or the built-in
    gram-scale defaults when neither is given.
    """

    if path is None and document is None:
        document = copy.deepcopy(DEFAULT_DOCUMENT)
    return SystemConfiguration(config_file_path=path, document=document)


def parse_config(path):
    """
    Parses a TOML or JSON configuration file into validated SystemParams.

    Raises:
    ConfigurationError - missing or unknown keys, invalid values
    """

    return load_configuration(path).system


def set_dotted(document, dotted_key, value):
    """
    Returns a deep copy of document with section.key set to value.

    Raises:
    ConfigurationError - when the key path does not name a numeric field
    """

    parts = dotted_key.split('.')
    if len(parts) != 2 or parts[0] not in SCHEMA or \
            parts[1] not in SCHEMA[parts[0]] or parts[0] == 'model':
        raise ConfigurationError('%s does not name a numeric configuration '
                                 'field' % (dotted_key,), field=dotted_key)
    updated = copy.deepcopy(document)
    updated.setdefault(parts[0], {})[parts[1]] = value
    return updated
