"""
Fixed-schema result rows rendered as CSV, JSON or aligned text.

Rows are plain dicts keyed by CSV_FIELDS; missing keys are written empty.
Sweep footers are rows with an empty h column whose eps_g/eps_d hold the
fitted convergence slopes.
"""
import csv
import io
import json
import math

CSV_FIELDS = (
    'problem', 'basis', 'model', 'h', 'eta', 'nf',
    'eps_g', 'eps_d', 'fmin', 'gnorm', 'itns', 'qmfs',
)
INTEGER_FIELDS = frozenset({'nf', 'itns', 'qmfs'})
FLOAT_FIELDS = frozenset({'h', 'eta', 'eps_g', 'eps_d', 'fmin', 'gnorm'})

FORMAT_CSV = 'csv'
FORMAT_JSON = 'json'
FORMAT_TEXT = 'text'
FORMAT_CHOICES = (
    (FORMAT_TEXT, 'Aligned text'),
    (FORMAT_CSV, 'CSV'),
    (FORMAT_JSON, 'JSON'),
)


def format_value(field, value):
    if value is None:
        return ''
    if field in INTEGER_FIELDS:
        return str(int(value))
    if field in FLOAT_FIELDS:
        return f'{float(value):.9e}'
    return str(value)


def normalize_row(row):
    """Row restricted to the schema, in column order"""
    return {field: row.get(field) for field in CSV_FIELDS}


def render_csv(rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\r\n')
    writer.writerow(CSV_FIELDS)
    for row in rows:
        row = normalize_row(row)
        writer.writerow([format_value(field, row[field]) for field in CSV_FIELDS])
    return buffer.getvalue()


def _json_value(field, value):
    if value is None:
        return None
    if field in INTEGER_FIELDS:
        return int(value)
    if field in FLOAT_FIELDS:
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def render_json(rows):
    payload = [
        {field: _json_value(field, value) for field, value in normalize_row(row).items()}
        for row in rows
    ]
    return json.dumps(payload, indent=2) + '\n'


def render_text(rows):
    table = [list(CSV_FIELDS)]
    for row in rows:
        row = normalize_row(row)
        table.append([format_value(field, row[field]) or '-' for field in CSV_FIELDS])

    # Drop columns that are empty in every row
    keep = [i for i in range(len(CSV_FIELDS)) if any(line[i] != '-' for line in table[1:])]
    if not keep:
        keep = list(range(len(CSV_FIELDS)))
    widths = [max(len(line[i]) for line in table) for i in keep]
    lines = ['  '.join(line[i].rjust(width) for i, width in zip(keep, widths)) for line in table]
    return '\n'.join(lines) + '\n'


RENDERERS = {
    FORMAT_CSV: render_csv,
    FORMAT_JSON: render_json,
    FORMAT_TEXT: render_text,
}


def render(rows, output_format):
    return RENDERERS[output_format](list(rows))
