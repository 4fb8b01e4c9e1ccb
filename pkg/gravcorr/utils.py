"""
Utility functions and classes shared by all gravcorr commands.
"""

import json
import os.path
import signal
import sys
import threading
import traceback

import numpy as np
from scipy import integrate

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib


class DomainError(ValueError):
    """
    Raised when a physical input lies outside the domain of a formula
    """


class ConfigurationError(ValueError):
    """
    Raised when a configuration value is missing, unknown or invalid.

    Arguments:
    message - human readable message
    field - the dotted name of the offending field (section.key)
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


# alternative names accepted wherever a normalisation convention is chosen
CONVENTION_ALIASES = {'paper': 'reference'}


def canonical_convention(name, conventions):
    """
    Resolves an alias to its convention name.

    Raises:
    DomainError - when name is neither a convention nor an alias of one
    """

    name = CONVENTION_ALIASES.get(name, name)
    if name not in conventions:
        raise DomainError('convention must be one of %s' %
                          (', '.join(tuple(conventions) +
                                     tuple(CONVENTION_ALIASES)),))
    return name


class QuadratureError(ArithmeticError):
    """
    Raised when an adaptive quadrature did not converge.  Carries the best
    estimate found and its error bound.
    """

    def __init__(self, message, estimate, error_bound):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class InterruptedRunError(RuntimeError):
    """
    Raised when SIGINT/SIGTERM cancelled the workers before every work item
    was processed
    """


def adaptive_quad(func, low, high, rel_tol=1e-9, points=None, limit=500,
                  label='integral'):
    """
    scipy.integrate.quad with its diagnostics turned into exceptions.

    A round-off warning is accepted when the reported error is still within
    ten times the requested tolerance (and at least 1e-9 relative).

    Returns:
    (estimate, error_bound)

    Raises:
    QuadratureError - when QUADPACK reports failure
    """

    if points is not None:
        points = [point for point in points if low < point < high] or None
        if np.isinf(high) or np.isinf(low):
            points = None
    result = integrate.quad(func, low, high, points=points, limit=limit,
                            epsabs=0.0, epsrel=rel_tol, full_output=1)
    estimate, error_bound = result[0], result[1]
    if len(result) > 3:
        # quad appends a message only when QUADPACK flagged a problem
        roundoff_only = 'roundoff' in str(result[3])
        if not (roundoff_only and
                error_bound <= max(10.0 * rel_tol, 1e-9) * abs(estimate)):
            raise QuadratureError('%s did not converge: %s' %
                                  (label, result[3]), estimate, error_bound)
    return estimate, error_bound


def load_document(config_file_path):
    """
    Loads a TOML or JSON document into a dictionary.  The format is chosen by
    the file suffix; unknown suffixes are tried as TOML first, then JSON.

    Arguments:
    config_file_path - path to the file
    """

    if not os.path.exists(config_file_path):
        raise ConfigurationError('Configuration file %s does not exist' %
                                 (config_file_path,))

    with open(config_file_path, 'rb') as config_file:
        raw = config_file.read()

    text = raw.decode('utf-8')
    if config_file_path.lower().endswith('.json'):
        parsers = (json.loads,)
    elif config_file_path.lower().endswith('.toml'):
        parsers = (tomllib.loads,)
    else:
        parsers = (tomllib.loads, json.loads)

    last_error = None
    for parser in parsers:
        try:
            document = parser(text)
            break
        except ValueError as parse_error:
            last_error = parse_error
    else:
        raise ConfigurationError('Unable to parse %s: %s' %
                                 (config_file_path, last_error))

    if not isinstance(document, dict):
        raise ConfigurationError('%s must contain a table of sections' %
                                 (config_file_path,))
    return document


class Configuration(object):
    """
    Base class for configurations read from a TOML or JSON document made of
    sections of key/value pairs.
    """

    def __init__(self, config_file_path=None, document=None):
        super().__init__()
        if document is None:
            if config_file_path is None:
                raise ConfigurationError('Either a configuration file or a '
                                         'document is required')
            document = load_document(config_file_path)
        self.config_file_path = config_file_path
        self.document = document

    def sections(self):
        """
        Gets the list of section names in this configuration
        """

        return [name for name, value in self.document.items()
                if isinstance(value, dict)]

    def has_section(self, section):
        """
        Checks to see if the given section exists
        """

        return isinstance(self.document.get(section), dict)

    def get(self, section, key, default_value, default_section=None):
        """
        Gets a value from the configuration and returns the default if the
        section or key does not exist.

        Arguments:
        section - the section name
        key - the key in the section to retrieve
        default_value - the default value to return when section/key not found
        default_section - section consulted before falling back to the default
        """

        value = None
        if self.has_section(section):
            value = self.document[section].get(key)

        if value is None:
            if default_section:
                return self.get(default_section, key, default_value, None)
            return default_value
        return value

    def getfloat(self, section, key, default_value, default_section=None):
        """
        Gets a numeric value from the configuration as a float.

        Raises:
        ConfigurationError - when the stored value is not numeric
        """

        value = self.get(section, key, default_value, default_section)
        if value is None:
            return None
        if isinstance(value, bool):
            raise ConfigurationError('%s.%s must be a number' % (section, key),
                                     field='%s.%s' % (section, key))
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigurationError('%s.%s must be a number, got %r' %
                                     (section, key, value),
                                     field='%s.%s' % (section, key))

    def getboolean(self, section, key, default_value, default_section=None):
        """
        Gets a boolean value from the configuration.  Accepts native booleans
        and the strings true/false/yes/no/1/0.
        """

        value = self.get(section, key, default_value, default_section)
        if isinstance(value, bool) or value is None:
            return value
        lowered = str(value).strip().lower()
        if lowered in ('true', 'yes', 'on', '1'):
            return True
        if lowered in ('false', 'no', 'off', '0'):
            return False
        raise ConfigurationError('%s.%s must be a boolean, got %r' %
                                 (section, key, value),
                                 field='%s.%s' % (section, key))


class LockedIterator(object):
    """
    thread-safe iterator
    """

    def __init__(self, iterator):
        self.lock = threading.Lock()
        self.iterator = iter(iterator)

    def __iter__(self):
        return self

    def __next__(self):
        with self.lock:
            return next(self.iterator)


CANCEL_WORKERS_EVENT = threading.Event()
def parallel_process_and_wait(iterator, workers, logger=None):
    """
    Process an iterator of function pointers in parallel using the number
    of worker threads provided in the "workers" argument.
    Work is handed off to the 'worker' function in each new thread.
    Will wait for all threads to complete before returning.  The first
    exception raised by a work item is re-raised in the calling thread.

    Arguments:
    iterator - an iterable list of items to be passed to the worker routine
               each item should be a tuple of (function, (args))
    workers - number of workers (threads)
    logger - optional logger object

    Raises:
    InterruptedRunError - when the workers were cancelled with work left
    """

    locked_iterator = LockedIterator(iterator)
    failures = []
    group = []

    if workers <= 1:
        worker(locked_iterator, logger, failures)
    else:
        for _ in range(workers):
            thread = threading.Thread(target=worker,
                                      args=(locked_iterator, logger, failures))
            thread.daemon = True
            thread.start()
            group.append(thread)

        iterations = 0
        active = 1
        while active and group and not CANCEL_WORKERS_EVENT.is_set():
            iterations = iterations + 1
            active = 0
            for thread in group:
                thread.join(60.0)
                if thread.is_alive():
                    active = active + 1

            if logger and active:
                logger.debug('%d active thread(s) of %d total threads '
                             'remaining', active, len(group))
                if iterations % 5 == 0:
                    dump_stack_traces(logger)

    if failures:
        raise failures[0]

    if CANCEL_WORKERS_EVENT.is_set() and (
            not _exhausted(locked_iterator) or
            any(thread.is_alive() for thread in group)):
        raise InterruptedRunError('run cancelled before all work items '
                                  'completed')


def _exhausted(locked_iterator):
    try:
        next(locked_iterator)
    except StopIteration:
        return True
    return False

#pylint: disable=broad-except
def worker(locked_iterator, logger=None, failures=None):
    """
    Worker for each thread created in parallel_process_and_wait()
    Arguments:
    locked_iterator - LockedIterator (thread-safe) iterator
    logger - optional logger object
    failures - list collecting exceptions raised by work items
    """

    while not CANCEL_WORKERS_EVENT.is_set():
        try:
            call_details = next(locked_iterator)
        except StopIteration:
            break

        try:
            call_details[0](*call_details[1])
        except Exception as work_error:
            if logger:
                logger.exception('Failed to run thread worker')
            if failures is not None:
                failures.append(work_error)
            break

#pylint: disable=unused-argument
def interrupt_signal_handler(signalnum, frame):
    """
    Function that gets called when SIGINT signal is sent
    """

    sys.stderr.write('Stopping running threads ...\n')
    CANCEL_WORKERS_EVENT.set()

def setup_signal_handlers(logger):
    """
    Registers handlers for SIGINT and SIGTERM
    """

    signal.signal(signal.SIGINT, interrupt_signal_handler)
    signal.signal(signal.SIGTERM, interrupt_signal_handler)
    if logger:
        logger.debug('Signal handlers attached')

#pylint: disable=protected-access
def dump_stack_traces(logger=None):
    """
    Prints stack traces of all threads
    """

    out = []
    out.append('Threads: %d\n' % (threading.active_count()))
    for thread_id, stack in sys._current_frames().items():
        out.append('\n# Thread %s:' % thread_id)
        for filename, lineno, name, line in traceback.extract_stack(stack):
            out.append('File: "%s", line %d, in %s' % (filename, lineno, name))
            if line:
                out.append("  %s" % (line.strip()))

    if logger:
        logger.info('STACK TRACE:\n%s', '\n'.join(out))
    else:
        sys.stderr.write('STACK TRACE:\n%s\n' % ('\n'.join(out)))
