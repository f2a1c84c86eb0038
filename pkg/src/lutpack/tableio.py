"""Table file format: plain text, one hexadecimal value per line,
2^w_in lines.  w_in is inferred from the line count (which must be a power
of two); w_out is either given or inferred from the largest value.
"""
from __future__ import annotations

import numpy as np

from .errors import FormatError, UsageError
from .model import Table

DEFAULT_W_IN_CAP = 24


def parse_table(
    text: str, w_out: int | None = None, w_in_cap: int = DEFAULT_W_IN_CAP
):
    """Parse a table file.  Returns (table, inference_notes)."""
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(int(line, 16))
        except ValueError:
            raise FormatError(f"bad hex value {line!r}", line=lineno) from None
    count = len(values)
    if count == 0 or count & (count - 1):
        raise FormatError(
            f"table must have a power-of-two number of entries, got {count}"
        )
    w_in = count.bit_length() - 1
    if w_in < 1:
        raise FormatError("table must have at least 2 entries")
    if w_in > w_in_cap:
        raise UsageError(
            f"table needs w_in={w_in} but the cap is {w_in_cap}; "
            "raise it explicitly if you really want exhaustive work at this size"
        )
    notes = [f"w_in inferred from {count} lines: {w_in}"]
    if w_out is None:
        w_out = max(int(max(values)).bit_length(), 1)
        notes.append(f"w_out inferred from maximum value: {w_out}")
    else:
        notes.append(f"w_out given: {w_out}")
    return Table(w_in, w_out, np.array(values, dtype=np.int64)), notes


def table_to_text(table: Table) -> str:
    digits = max((table.w_out + 3) // 4, 1)
    return "".join(f"{int(v):0{digits}x}\n" for v in table.values)
