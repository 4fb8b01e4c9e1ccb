"""
This module contains the classes that write command results to their final
destination (a file or stdout).
"""

import csv
import io
import json
import math
import sys

import numpy as np


class OutputWriter(object):
    """
    Writer managing the output stream of one command.
    """

    def __init__(self, path=None):
        super().__init__()
        self.path = path
        self.stream = None
        self._owns_stream = False

    def write(self, result, manifest):
        """
        Writes the result and its manifest.

        Arguments:
        result - CommandResult
        manifest - RunManifest
        """

        for line in self._generate_lines(result, manifest):
            self.stream.write(line)
            self.stream.write('\n')
        self.stream.flush()

    def _generate_lines(self, result, manifest):
        """
        This should be overridden by the derived classes.
        """

        raise NotImplementedError()

    def start(self):
        """
        Open the output file (or attach to stdout)
        """

        if self.path:
            self.stream = open(self.path, 'w', newline='')
            self._owns_stream = True
        else:
            self.stream = sys.stdout

    def stop(self):
        """
        Close the output file
        """

        if self.stream is not None and self._owns_stream:
            self.stream.close()
        self.stream = None

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, the_type, value, traceback):
        self.stop()


class JsonWriter(OutputWriter):
    """
    Writes reports (and tables as lists of records) as one JSON object with
    the run manifest embedded.
    """

    def _generate_lines(self, result, manifest):
        if result.is_table:
            payload = {'columns': list(result.columns),
                       'rows': [dict(zip(result.columns, row))
                                for row in result.rows],
                       'comments': list(result.comments)}
        else:
            payload = dict(result.report)
        payload['manifest'] = manifest.as_dict()
        yield json.dumps(to_jsonable(payload), indent=2, sort_keys=False)


class CsvWriter(OutputWriter):
    """
    Writes tables (and reports as a single row) as CSV preceded by
    '#'-prefixed header lines carrying the run manifest.
    """

    def _generate_lines(self, result, manifest):
        yield '# ' + json.dumps(to_jsonable(manifest.as_dict()), sort_keys=True)
        for comment in result.comments:
            yield '# ' + comment

        if result.is_table:
            columns, rows = result.columns, result.rows
        else:
            flat = {key: value for key, value in result.report.items()
                    if not isinstance(value, (dict, list, tuple, np.ndarray))}
            columns, rows = tuple(flat.keys()), [tuple(flat.values())]

        buf = io.StringIO()
        csv_writer = csv.writer(buf, lineterminator='\n')
        csv_writer.writerow(columns)
        for row in rows:
            csv_writer.writerow([format_value(value) for value in row])
        yield buf.getvalue().rstrip('\n')


def format_value(value):
    """
    Formats a scalar for CSV output with full float precision
    """

    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return '' if value is None else str(value)


def to_jsonable(value):
    """
    Converts numpy scalars/arrays and non-finite floats into JSON-friendly
    values (infinity becomes the string "inf").
    """

    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        if math.isnan(value):
            return 'nan'
        return value
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': value.real, 'im': value.imag}
    return value


def get_writer(fmt, path=None):
    """
    Creates the writer for the given format ('json' or 'csv')
    """

    if fmt == 'json':
        return JsonWriter(path)
    if fmt == 'csv':
        return CsvWriter(path)
    raise ValueError('unknown output format %s' % (fmt,))


def write_csv(path, columns, rows, comments=()):
    """
    Writes a plain CSV side file (e.g. per-trial records)
    """

    with open(path, 'w', newline='') as out:
        for comment in comments:
            out.write('# %s\n' % (comment,))
        csv_writer = csv.writer(out, lineterminator='\n')
        csv_writer.writerow(columns)
        for row in rows:
            csv_writer.writerow([format_value(value) for value in row])
