"""Care-mask construction from observed-input evidence, plus the text
formats for observation and mask files.

Observation files hold one address per line, either fixed-width binary
(exactly w_in digits) or hexadecimal prefixed with ``0x``; blank lines and
``#`` comments are ignored.  Mask files hold 2^w_in lines of ``0`` (don't
care) or ``1`` (care), line k describing address k.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import FormatError, UsageError
from .model import CareMask


def mask_from_observations(w_in: int, observed: Iterable[int]) -> CareMask:
    """Mark exactly the observed addresses as cares."""
    flags = np.zeros(1 << w_in, dtype=bool)
    for addr in observed:
        if not 0 <= addr < 1 << w_in:
            raise UsageError(f"observed address {addr} outside [0, {1 << w_in})")
        flags[addr] = True
    return CareMask(flags)


def care_fraction(mask: CareMask) -> float:
    return float(np.count_nonzero(mask.flags)) / len(mask)


def parse_observations(text: str, w_in: int) -> set[int]:
    """Parse an observation file into a set of addresses."""
    observed: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith(("0x", "0X")):
                addr = int(line, 16)
            else:
                if len(line) != w_in or set(line) - {"0", "1"}:
                    raise ValueError
                addr = int(line, 2)
        except ValueError:
            raise FormatError(
                f"expected {w_in}-digit binary or 0x-prefixed hex address, got {line!r}",
                line=lineno,
            ) from None
        if addr >= 1 << w_in:
            raise FormatError(
                f"address {line!r} does not fit in {w_in} bits", line=lineno
            )
        observed.add(addr)
    return observed


def mask_to_text(mask: CareMask) -> str:
    return "".join("1\n" if f else "0\n" for f in mask.flags)


def mask_from_text(text: str) -> CareMask:
    flags = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line not in ("0", "1"):
            raise FormatError(f"expected 0 or 1, got {line!r}", line=lineno)
        flags.append(line == "1")
    n = len(flags)
    if n == 0 or n & (n - 1):
        raise FormatError(f"mask must have a power-of-two line count, got {n}")
    return CareMask(np.array(flags, dtype=bool))
