"""Delimited output and report serialization with stable formatting.

CSV numbers are written with 17 significant digits so round tripping
through text preserves the double exactly; JSON keys are sorted so two
runs of the same configuration produce byte identical reports.
"""

import json
from pathlib import Path


def format_number(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    return f"{float(x):.17g}"


def write_csv(path, header, rows):
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            cell if isinstance(cell, str) else format_number(cell)
            for cell in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path, payload):
    path = Path(path)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


def check_entry(name, measured, tolerance, passed=None):
    """One line of a run report's check table."""
    if passed is None:
        passed = bool(measured <= tolerance)
    return {
        "name": name,
        "measured": float(measured),
        "tolerance": float(tolerance),
        "pass": bool(passed),
    }
