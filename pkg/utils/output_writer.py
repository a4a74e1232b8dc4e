"""
Output rendering for experiment results.

Turns experiment payloads into JSON documents, CSV rows or Markdown-style
pipe tables, and writes them to stdout or a file.
"""

import csv
import io
import json
import sys
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .tool_config import ToolConfig

SIG_DIGITS = ToolConfig().FLOAT_SIG_DIGITS


def format_float(value: float, digits: int = SIG_DIGITS) -> str:
    """Float to `digits` significant digits, without a negative zero."""
    text = f"{float(value):.{digits}g}"
    return "0" if text in ("-0", "0") else text


def format_complex(value: complex, tol: float = 1e-15) -> str:
    re = 0.0 if abs(value.real) < tol else value.real
    im = 0.0 if abs(value.imag) < tol else value.imag
    if im == 0.0:
        return format_float(re)
    if re == 0.0:
        return f"{format_float(im)}i"
    sign = "-" if im < 0 else "+"
    return f"{format_float(re)}{sign}{format_float(abs(im))}i"


def format_fraction(value: Fraction) -> str:
    return str(Fraction(value))


def format_bool(value: bool) -> str:
    return "T" if value else "F"


def render_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Markdown pipe table with padded columns."""
    body = [[str(cell) for cell in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in body:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def line(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

    out = [line(headers), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    out.extend(line(row) for row in body)
    return "\n".join(out) + "\n"


def render_json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[object]],
               comments: Sequence[str] = ()) -> str:
    buffer = io.StringIO()
    for comment in comments:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def save_output(content: str, filename: Optional[str] = None) -> Optional[str]:
    """Write to `filename`, or to stdout when it is None."""
    if filename is None:
        sys.stdout.write(content)
        sys.stdout.flush()
        return None
    with open(filename, "w", encoding="utf-8", newline="") as f:
        f.write(content)
    return filename
