#!/usr/bin/env python
"""
This is the top level script that runs "commands" for gravcorr.
Each command lives at the bottom of the module that owns its computation.
"""

from __future__ import print_function

import argparse
import importlib
import json
import logging
import re
import sys
import traceback

from gravcorr import utils
from gravcorr.utils import ConfigurationError, DomainError


# List of available commands to run.
INSTALLED_COMMANDS = {
    'spectra': (
        'gravcorr.dynamics',
        'SpectraCommand'
        ),
    'snr': (
        'gravcorr.correlation',
        'SnrCommand'
        ),
    'tau': (
        'gravcorr.correlation',
        'TauCommand'
        ),
    'negativity': (
        'gravcorr.entanglement',
        'NegativityCommand'
        ),
    'threshold': (
        'gravcorr.entanglement',
        'ThresholdCommand'
        ),
    'formfactor': (
        'gravcorr.geometry',
        'FormFactorCommand'
        ),
    'montecarlo': (
        'gravcorr.montecarlo',
        'MonteCarloCommand'
        ),
    'sweep': (
        'gravcorr.sweep',
        'SweepCommand'
        )
    }

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2


class UsageError(ValueError):
    """
    Raised for command line arguments argparse rejects
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ArgumentParser(argparse.ArgumentParser):
    """
    argparse parser whose usage errors end with a JSON error line on stderr
    """

    def error(self, message):
        self.print_usage(sys.stderr)
        match = (re.match(r"argument ([^:]+):", message) or
                 re.search(r"required: ([^,\s]+)", message))
        report_error(UsageError(message, match.group(1) if match else None))
        sys.exit(EXIT_INVALID)


def parse_args(argv=None):
    """
    Parse user arguments and return as parser object.
    """

    parser = ArgumentParser(
        description='Gravity-mediated optomechanical correlation toolkit')
    subparsers = parser.add_subparsers(
        dest='command',
        help=('Available commands.  Use \'gcorr <command name> -h\' to '
              'get help on an individual command'))
    subparsers.required = True

    for command_name in sorted(INSTALLED_COMMANDS):
        command = get_command_object(command_name)
        subparser = subparsers.add_parser(command_name,
                                          help=command.get_help_text())
        command.add_arguments(subparser)

    return parser.parse_args(argv)


def get_command_object(command_name):
    """
    Gets the command object from the command name
    Arguments:
    command_name - the installed commands command key
    """

    if command_name in INSTALLED_COMMANDS:
        details = INSTALLED_COMMANDS[command_name]
        command_module = importlib.import_module(details[0])
        class_name = details[1]
        return getattr(command_module, class_name)(name=command_name)

    else:
        raise ValueError('Command ' + str(command_name) + ' not found')


def report_error(error, stream=None):
    """
    Writes a machine readable error to stderr
    """

    stream = stream or sys.stderr
    stream.write(json.dumps({'error': type(error).__name__,
                             'message': str(error),
                             'field': getattr(error, 'field', None)}) + '\n')


def execute_command(command_name, args):
    """
    Executes a single command and maps failures to exit codes

    Arguments:
    command_name - the installed commands command key
    args - argparse namespace

    Returns:
    the process exit code
    """

    try:
        command_object = get_command_object(command_name)
        command_object.verbose = args.verbose
        command_object.execute(args)

    except (ConfigurationError, DomainError) as invalid_err:
        if args.verbose:
            traceback.print_exc()
        report_error(invalid_err)
        return EXIT_INVALID

    #pylint: disable=broad-except
    except Exception as command_err:
        if args.verbose:
            traceback.print_exc()
        report_error(command_err)
        return EXIT_FAILURE

    return EXIT_OK


def main(argv=None):
    """
    Main function
    """

    logging.basicConfig(format='%(levelname)s: %(message)s',
                        level=logging.WARNING)
    args = parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    utils.setup_signal_handlers(logging.getLogger())
    return execute_command(args.command, args)


if __name__ == '__main__':
    sys.exit(main())
