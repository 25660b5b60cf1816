"""Number parsing and deterministic CSV/JSON emission."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Iterable, TextIO

from .errors import DomainError


def parse_number(text: str) -> float:
    """Parse ``0.25``, ``1e-3`` or an exact fraction such as ``8/9``.

    Fractions are divided exactly before the single rounding to float.
    """
    text = text.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"not a number: {text!r}") from None
    return float(value)


def fmt_float(x: float) -> str:
    """Shortest decimal that round-trips to the same double; ``nan`` for undefined cells."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def fmt_bool(flag: bool) -> str:
    return "true" if flag else "false"


def write_csv(out: TextIO, header: Iterable[str], rows: Iterable[Iterable[str]]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(header))
    writer.writerows(rows)


def surface_csv(table) -> str:
    buf = io.StringIO()
    write_csv(buf, ("alpha", "beta", "gb"), ((fmt_float(a), fmt_float(b), fmt_float(g)) for a, b, g in table.rows()))
    return buf.getvalue()


def read_surface_csv(text: str) -> list[tuple[float, float, float]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != ["alpha", "beta", "gb"]:
        raise DomainError(f"unexpected surface header {header}")
    return [tuple(float(x) for x in row) for row in reader]


def dumps(obj) -> str:
    """Compact JSON with stable key order; NaN is not valid JSON so it is refused."""
    return json.dumps(obj, allow_nan=False)
