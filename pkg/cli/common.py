"""
CLI Common Module

Flag grammars shared by the SpinMate subcommands: spin values, magnetic
quantum numbers, axis specifiers, measurement sequences, initial states
and post-selection conditions.
"""

import argparse
from fractions import Fraction

from spin import Axis, Condition, Spin, SpinValidationError

# ==================== OUTPUT FORMATS ====================
FORMAT_TABLE = "table"
FORMAT_JSON = "json"
FORMAT_CSV = "csv"
FORMATS = (FORMAT_TABLE, FORMAT_JSON, FORMAT_CSV)

# Subcommands that have a CSV rendering
CSV_COMMANDS = {"simulate", "paradox"}

# ==================== EXIT CODES ====================
EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2

NAMED_AXIS_TOKENS = {"x", "y", "z"}


def _parse_half(text: str, what: str) -> int:
    """'2', '+2', '4/2', '-3/2', '1.5' -> twice the value, which must be an integer."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{what} must be an integer or half-integer, got {text!r}")
    doubled = 2 * value
    if doubled.denominator != 1:
        raise argparse.ArgumentTypeError(f"{what} must be an integer or half-integer, got {text!r}")
    return int(doubled)


def parse_spin(text: str) -> Spin:
    twice_s = _parse_half(text, "spin")
    if twice_s < 0:
        raise argparse.ArgumentTypeError(f"spin must be non-negative, got {text!r}")
    return Spin(twice_s)


def parse_twice_m(text: str) -> int:
    return _parse_half(text, "m")


def parse_axis(text: str) -> Axis:
    try:
        return Axis.parse(text)
    except SpinValidationError as e:
        raise argparse.ArgumentTypeError(str(e))


def parse_sequence(text: str) -> list[Axis]:
    """
    Comma-separated axes. Named axes take one token, general axes take two
    ('x,0.5,1.2,z' is x, (theta=0.5, phi=1.2), z).
    """
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    if not tokens:
        raise argparse.ArgumentTypeError("sequence must name at least one axis")
    axes, i = [], 0
    while i < len(tokens):
        if tokens[i].lower() in NAMED_AXIS_TOKENS:
            axes.append(parse_axis(tokens[i]))
            i += 1
        elif i + 1 < len(tokens):
            axes.append(parse_axis(f"{tokens[i]},{tokens[i + 1]}"))
            i += 2
        else:
            raise argparse.ArgumentTypeError(f"incomplete axis {tokens[i]!r} in sequence {text!r}")
    return axes


def parse_init(text: str) -> tuple[Axis, int]:
    """'z:+2' or 'theta,phi:m'."""
    if ":" not in text:
        raise argparse.ArgumentTypeError(f"initial state must look like 'z:+2', got {text!r}")
    axis_text, m_text = text.rsplit(":", 1)
    return parse_axis(axis_text), parse_twice_m(m_text)


def parse_condition(text: str) -> Condition:
    """'step=m', e.g. '0=+2'."""
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"condition must look like '0=+2', got {text!r}")
    step_text, m_text = text.split("=", 1)
    try:
        step = int(step_text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"condition step must be an integer, got {step_text!r}")
    return Condition(step, parse_twice_m(m_text))
