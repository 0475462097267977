"""gnuplot scripts for result files written by the command-line driver."""

from __future__ import annotations

import csv
import json
import math
import os

from .errors import SchemaMismatch

PLOT_KINDS = ("ratio-curve", "residual", "sign-changes")

# columns each plot needs: (x, y)
_REQUIRED = {
    "ratio-curve": ("T", "ratio"),
    "residual": ("T", "residual"),
    "sign-changes": ("T", "value"),
}


def read_result(path: str) -> tuple[list[str], list[dict]]:
    """Columns and rows of a CSV or JSON result file."""
    with open(path, newline="") as f:
        text = f.read()
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
            rows = obj["results"]
        except (ValueError, KeyError, TypeError) as exc:
            raise SchemaMismatch(f"{path} is not a result file: {exc}") from exc
        cols = list(rows[0].keys()) if rows else []
        return cols, rows
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    if not body:
        raise SchemaMismatch(f"{path} has no header row")
    reader = csv.DictReader(body)
    return list(reader.fieldnames or []), list(reader)


def emit_plot_script(result_file: str, kind: str) -> str:
    """A standalone gnuplot script that reads only ``result_file``."""
    if kind not in PLOT_KINDS:
        raise SchemaMismatch(f"unknown plot kind {kind!r}")
    cols, rows = read_result(result_file)
    missing = [c for c in _REQUIRED[kind] if c not in cols]
    if missing:
        raise SchemaMismatch(f"{result_file} lacks column(s) {', '.join(missing)} needed for {kind}")
    xi, yi = (cols.index(c) + 1 for c in _REQUIRED[kind])
    name = os.path.basename(result_file)
    is_json = result_file.endswith(".json")
    lines = [
        "# gnuplot script",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        f"set xlabel '{_REQUIRED[kind][0]}'",
        f"set ylabel '{_REQUIRED[kind][1]}'",
        "set key top left",
    ]
    src = f"'{name}'"
    if is_json:
        # gnuplot cannot read JSON; the script expects the CSV twin of the file
        src = f"'{os.path.splitext(name)[0]}.csv'"
    if kind == "ratio-curve":
        lines.append(f"plot {src} using {xi}:{yi} every ::1 with linespoints title 'ratio'")
    elif kind == "residual":
        logT = math.log(float(rows[0]["T"])) if rows else 0.0
        lines.append(f"logT = {logT:.17g}")
        lines.append(f"plot {src} using {xi}:{yi} every ::1 with points title 'residual', \\")
        lines.append("     logT with lines dashtype 2 title 'log T', \\")
        lines.append("     -logT with lines dashtype 2 notitle")
    else:
        lines.append("set xzeroaxis")
        lines.append(f"plot {src} using {xi}:{yi} every ::1 with lines title 'value'")
    return "\n".join(lines) + "\n"
