"""
Command base class, command results and run manifests
"""

import dataclasses
import datetime
import logging
import logging.config

import dateutil.tz

import gravcorr
from gravcorr import config
from gravcorr import writers


def utc_now():
    """
    Current time in UTC without microseconds
    """

    return (datetime.datetime.utcnow()
            .replace(microsecond=0, tzinfo=dateutil.tz.tzutc()))


@dataclasses.dataclass
class CommandResult(object):
    """
    Output of one command: either a report (scalars) or a table (rows under
    columns), with optional comment lines for CSV headers.
    """

    report: dict = None
    columns: tuple = None
    rows: list = None
    comments: list = dataclasses.field(default_factory=list)
    extra_outputs: list = dataclasses.field(default_factory=list)

    @property
    def is_table(self):
        return self.columns is not None


@dataclasses.dataclass
class RunManifest(object):
    """
    Provenance of one command run.  Re-running the echoed parameters with the
    same flags and seeds reproduces the outputs.
    """

    command: str
    params_echo: dict
    flags: dict = dataclasses.field(default_factory=dict)
    tool_version: str = gravcorr.__version__
    seeds: list = dataclasses.field(default_factory=list)
    started: str = None
    finished: str = None
    outputs: list = dataclasses.field(default_factory=list)

    def start(self):
        self.started = utc_now().isoformat()

    def finish(self):
        self.finished = utc_now().isoformat()

    def as_dict(self):
        return dataclasses.asdict(self)


#pylint: disable=unused-argument
class Command(object):
    """
    This is the base class of each command implemented.
    """

    def __init__(self, **kwargs):
        super().__init__()

        self.verbose = False
        self.logger = logging.getLogger(__name__)
        self.description = kwargs.get('description', 'gravcorr command')
        self.name = kwargs.get('name', 'gcorr')
        self.configuration = None
        self.system = None
        self.manifest = None
        self.args = None

    def add_arguments(self, parser):
        """
        Adds this command's arguments to the argsparser object.  The global
        flags are shared by every command.

        Arguments:
        parser - the subparser where arguments are added
        """

        parser.add_argument('--config', dest='config_file_path', default=None,
                            help=('Path to a TOML or JSON configuration file '
                                  '(default: built-in gram-scale parameters)'))
        parser.add_argument('--out', default=None,
                            help='Output file path (default: stdout)')
        parser.add_argument('--format', choices=('json', 'csv'), default=None,
                            help='Output format (default depends on command)')
        parser.add_argument('--seed', type=int, default=None,
                            help='Random seed (unsigned 64-bit)')
        parser.add_argument('--verbose', action='store_true', default=False,
                            help='More output')

    def _initialize(self, args):
        """
        Loads the configuration and builds the system parameters.

        Arguments:
        args - the argparse namespace
        """

        path = getattr(args, 'config_file_path', None)
        self.configuration = config.load_configuration(path)
        self.system = self.configuration.system
        logging_section = self.configuration.logging
        if logging_section:
            logging.config.dictConfig(logging_section)
        self.manifest = RunManifest(command=self.name,
                                    params_echo=self.configuration.echo())
        seed = getattr(args, 'seed', None)
        if seed is not None:
            if not 0 <= seed < 2 ** 64:
                raise config.ConfigurationError('--seed must be an unsigned '
                                                '64-bit integer', field='seed')
            self.manifest.seeds.append(seed)

    def execute(self, args):
        """
        Execute this command with the given arguments and write its output.

        Arguments:
        args - the argparse namespace returned from argparser

        Returns:
        the CommandResult
        """

        self.args = args
        self._initialize(args)
        self.manifest.flags = _flags_echo(args)
        self.manifest.start()
        self.logger.info('Executing %s ...', self.description)
        result = self._execute()
        self.manifest.finish()
        out = getattr(args, 'out', None)
        self.manifest.outputs = [out or '<stdout>'] + list(result.extra_outputs)
        fmt = getattr(args, 'format', None) or self.default_format(result)
        with writers.get_writer(fmt, out) as writer:
            writer.write(result, self.manifest)
        return result

    def _execute(self):
        """
        Override this in the subclass to perform the command.
        """
        raise ValueError('command:_execute() should be implemented by subclass')

    def get_help_text(self):
        """
        Gets the text to display for this command.
        """

        return ''

    @staticmethod
    def default_format(result):
        """
        CSV for tables, JSON for reports
        """

        return 'csv' if result.is_table else 'json'


def _flags_echo(args):
    flags = {}
    for key, value in sorted(vars(args).items()):
        if key in ('config_file_path', 'out', 'command', 'verbose'):
            continue
        if isinstance(value, (str, int, float, bool, list, tuple)) or \
                value is None:
            flags[key] = value
    return flags
