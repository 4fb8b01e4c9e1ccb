"""
Parameter sweeps: one configuration field varied over a list of values, one
scalar result per value, and the log-log slope of that result.
"""

import copy
import dataclasses
import logging
import math

import numpy as np

from gravcorr import command
from gravcorr import config
from gravcorr import correlation
from gravcorr import entanglement
from gravcorr import params
from gravcorr import utils
from gravcorr.utils import DomainError

LOGGER = logging.getLogger(__name__)

SWEEP_OUTPUTS = {
    'tau': ('tau_s', 'tau_years'),
    'snr': ('snr_numeric', 'snr_closed_form', 'snr_closed_form_derived'),
    'negativity': ('e_n', 'entangled'),
    'threshold': ('tq_bound_k',),
}


@dataclasses.dataclass(frozen=True)
class SweepResult(object):
    """
    Rows of (value, outputs...) and the fitted exponent of the first output
    """

    key: str
    command: str
    columns: tuple
    rows: list
    exponent: float = None


def _mirror_key(document, dotted_key, value):
    """
    Sets section.key; an explicit B-side copy of an A-side value follows it.
    """

    section, key = dotted_key.split('.')
    updated = config.set_dotted(document, dotted_key, value)
    twins = {source: target for target, source in config.MIRRORED.items()}
    twin = twins.get(section)
    if twin and key in document.get(twin, {}) and \
            document[twin][key] == document.get(section, {}).get(key):
        updated = config.set_dotted(updated, '%s.%s' % (twin, key), value)
    return updated


def _rescale_power_a(sys, ratio):
    """
    Returns sys with the A power set so that (n_th^B + 1) / C_A == ratio
    """

    current = (sys.n_th_b + 1.0) / sys.cooperativity_a
    power = sys.cavity_a.optical.power_cav * current / ratio
    return sys.with_power_a(power)


def _evaluate(sys, command_name, target_snr, tau):
    if command_name == 'tau':
        sys = sys.with_power_b(correlation.optimize_power_b(sys))
        result = correlation.required_tau(sys, target_snr)
        return (result.tau, result.tau_years)
    if command_name == 'snr':
        report = correlation.snr_report(sys, tau)
        return (report.snr_numeric, report.snr_closed_form,
                report.snr_closed_form_derived)
    if command_name == 'negativity':
        report = entanglement.log_negativity(
            entanglement.covariance_at_resonance(sys))
        return (report.e_n, report.entangled)
    threshold = params.entanglement_threshold(sys.cavity_a.mech,
                                              sys.gravity.lambda_form,
                                              sys.constants)
    return (threshold.tq_bound,)


def fit_exponent(values, outputs):
    """
    Slope of log |output| against log value; None when fewer than two
    finite, positive points are available.
    """

    values = np.asarray(values, dtype=float)
    outputs = np.asarray(outputs, dtype=float)
    usable = (values > 0) & (outputs > 0) & np.isfinite(outputs)
    if np.count_nonzero(usable) < 2:
        return None
    return float(np.polyfit(np.log(values[usable]), np.log(outputs[usable]),
                            1)[0])


def sweep(document, dotted_key, values, command_name='tau', hold_ratio=False,
          target_snr=1.0, tau=params.SECONDS_PER_YEAR, workers=1):
    """
    Evaluates command_name for each value of the configuration field
    dotted_key.

    Arguments:
    document - configuration document (sections of key/value pairs)
    dotted_key - section.key of a numeric field
    values - values to assign
    command_name - tau, snr, negativity or threshold
    hold_ratio - keep (n_th^B + 1) / C_A at its base value by rescaling the A
                 power
    target_snr - for tau
    tau - integration time for snr (s)
    workers - worker threads

    Raises:
    ConfigurationError - when dotted_key does not name a numeric field
    """

    if command_name not in SWEEP_OUTPUTS:
        raise DomainError('sweep command must be one of %s' %
                          (', '.join(sorted(SWEEP_OUTPUTS)),))
    values = [float(value) for value in values]
    if not values:
        raise DomainError('sweep needs at least one value')
    config.set_dotted(document, dotted_key, values[0])  # checks the key

    base = config.load_configuration(document=copy.deepcopy(document)).system
    base_ratio = (base.n_th_b + 1.0) / base.cooperativity_a
    outputs = [None] * len(values)

    def _point(index):
        updated = _mirror_key(document, dotted_key, values[index])
        sys = config.load_configuration(document=updated).system
        if hold_ratio:
            sys = _rescale_power_a(sys, base_ratio)
        outputs[index] = _evaluate(sys, command_name, target_snr, tau)

    utils.parallel_process_and_wait(
        ((_point, (index,)) for index in range(len(values))), workers, LOGGER)

    rows = [(value,) + tuple(output) for value, output in zip(values, outputs)]
    exponent = fit_exponent(values, [output[0] for output in outputs])
    return SweepResult(key=dotted_key, command=command_name,
                       columns=(dotted_key,) + SWEEP_OUTPUTS[command_name],
                       rows=rows, exponent=exponent)


def sweep_values(text=None, start=None, stop=None, num=None, log=False):
    """
    Values from a comma separated list or from start/stop/num
    """

    if text:
        try:
            return [float(item) for item in text.split(',') if item.strip()]
        except ValueError:
            raise DomainError('--values must be a comma separated list')
    if start is None or stop is None or not num or num < 2:
        raise DomainError('give --values or --start, --stop and --num >= 2')
    if log:
        if not start > 0 or not stop > 0:
            raise DomainError('a logarithmic sweep needs positive bounds')
        return list(np.logspace(math.log10(start), math.log10(stop), num))
    return list(np.linspace(start, stop, num))


class SweepCommand(command.Command):
    """
    Sweeps one configuration field and emits a CSV table
    """

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.description = 'Parameter sweep'

    def get_help_text(self):
        return 'Sweep a configuration field (section.key) for one command'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--param', required=True,
                            help='Dotted field name, e.g. mechanical_a.q_m')
        parser.add_argument('--values', default=None,
                            help='Comma separated values')
        parser.add_argument('--start', type=float, default=None)
        parser.add_argument('--stop', type=float, default=None)
        parser.add_argument('--num', type=int, default=None)
        parser.add_argument('--log', action='store_true', default=False,
                            help='Logarithmic spacing between start and stop')
        parser.add_argument('--sweep-command', dest='sweep_command',
                            choices=sorted(SWEEP_OUTPUTS), default='tau',
                            help='Command evaluated at each value (default tau)')
        parser.add_argument('--hold-ratio', action='store_true', default=False,
                            help='Keep (n_th + 1) / C_A fixed via the A power')
        parser.add_argument('--target-snr', type=float, default=1.0)
        parser.add_argument('--tau', type=float,
                            default=params.SECONDS_PER_YEAR,
                            help='Integration time for snr (s)')
        parser.add_argument('--workers', type=int, default=1)

    def _execute(self):
        values = sweep_values(self.args.values, self.args.start,
                              self.args.stop, self.args.num, self.args.log)
        result = sweep(self.configuration.document, self.args.param, values,
                       self.args.sweep_command, self.args.hold_ratio,
                       self.args.target_snr, self.args.tau, self.args.workers)
        comments = ['sweep of %s, command %s%s' %
                    (result.key, result.command,
                     ', (n_th + 1) / C_A held fixed' if self.args.hold_ratio
                     else '')]
        if result.exponent is not None:
            comments.append('log-log exponent of %s: %.6g' %
                            (result.columns[1], result.exponent))
        return command.CommandResult(columns=result.columns, rows=result.rows,
                                     comments=comments)
