"""Core table, mask and plan data types plus the reconstruction evaluator.

Everything here is immutable after construction: numpy arrays are stored
with the writeable flag cleared, so instances can be shared freely across
threads. ``evaluate`` is the universal oracle the rest of the package is
checked against.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AddressError, UsageError

MAX_W_OUT = 63


def frozen_array(values, dtype=np.int64) -> np.ndarray:
    """Copy `values` into a read-only numpy array."""
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Table:
    """A dense 2^w_in-entry table of w_out-bit unsigned values."""

    w_in: int
    w_out: int
    values: np.ndarray

    def __post_init__(self):
        if self.w_in < 1:
            raise UsageError(f"w_in must be >= 1, got {self.w_in}")
        if not 1 <= self.w_out <= MAX_W_OUT:
            raise UsageError(f"w_out must be in [1, {MAX_W_OUT}], got {self.w_out}")
        vals = frozen_array(self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != 1 << self.w_in:
            raise UsageError(
                f"table needs {1 << self.w_in} entries, got {len(vals)}"
            )
        if vals.size and (vals.min() < 0 or int(vals.max()) >= 1 << self.w_out):
            raise UsageError(f"table values do not fit in {self.w_out} bits")

    def __eq__(self, other):
        if not isinstance(other, Table):
            return NotImplemented
        return (
            self.w_in == other.w_in
            and self.w_out == other.w_out
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True, eq=False)
class CareMask:
    """Per-entry care flags aligned with a table (True = output is fixed)."""

    flags: np.ndarray

    def __post_init__(self):
        flags = frozen_array(self.flags, dtype=bool)
        object.__setattr__(self, "flags", flags)
        n = len(flags)
        if n == 0 or n & (n - 1):
            raise UsageError(f"mask length must be a power of two, got {n}")

    def __len__(self):
        return len(self.flags)

    def __eq__(self, other):
        if not isinstance(other, CareMask):
            return NotImplemented
        return np.array_equal(self.flags, other.flags)

    @classmethod
    def all_care(cls, w_in: int) -> "CareMask":
        return cls(np.ones(1 << w_in, dtype=bool))


@dataclass(frozen=True, eq=False)
class Decomposition:
    """A compressed table: bias + unique-sub-table + index + shift tables,
    plus an optional plainly stored lower-bits table.

    Reconstruction of an entry at address x, with x_hb the high
    ``w_in - w_lb_in`` address bits and x_lb the rest:

        hb = (t_ust[(t_idx[x_hb] << w_lb_in) | x_lb] >> t_rsh[x_hb]) + t_bias[x_hb]
        value = (hb << w_lb_out) | t_lb[x]
    """

    w_in: int
    w_out: int
    w_lb_in: int
    w_lb_out: int
    w_st: int
    t_bias: np.ndarray
    t_idx: np.ndarray
    t_rsh: np.ndarray
    t_ust: np.ndarray
    t_lb: np.ndarray | None = None

    def __post_init__(self):
        if not 1 <= self.w_lb_in <= self.w_in:
            raise UsageError(f"w_lb_in must be in [1, w_in], got {self.w_lb_in}")
        if not 0 <= self.w_lb_out < self.w_out:
            raise UsageError(
                f"w_lb_out must be in [0, w_out), got {self.w_lb_out}"
            )
        for name in ("t_bias", "t_idx", "t_rsh", "t_ust"):
            object.__setattr__(self, name, frozen_array(getattr(self, name)))
        if self.w_lb_out:
            if self.t_lb is None or len(self.t_lb) != 1 << self.w_in:
                raise UsageError("t_lb must hold 2^w_in entries when w_lb_out > 0")
            object.__setattr__(self, "t_lb", frozen_array(self.t_lb))
        else:
            object.__setattr__(self, "t_lb", None)
        n = self.n
        if not (len(self.t_bias) == len(self.t_idx) == len(self.t_rsh) == n):
            raise UsageError("bias/idx/rsh tables must have 2^(w_in-w_lb_in) entries")
        if len(self.t_ust) % self.m or len(self.t_ust) == 0:
            raise UsageError("t_ust length must be a positive multiple of 2^w_lb_in")
        if self.t_idx.size and int(self.t_idx.max()) >= self.n_ust:
            raise UsageError("t_idx entry out of range")
        if self.t_rsh.size and int(self.t_rsh.max()) > self.w_st:
            raise UsageError("t_rsh entry exceeds w_st")
        if self.t_ust.size and int(self.t_ust.max()) >= 1 << self.w_st:
            raise UsageError("t_ust entry does not fit in w_st bits")

    @property
    def m(self) -> int:
        """Entries per sub-table."""
        return 1 << self.w_lb_in

    @property
    def n(self) -> int:
        """Number of sub-tables."""
        return 1 << (self.w_in - self.w_lb_in)

    @property
    def n_ust(self) -> int:
        """Number of unique sub-tables stored in t_ust."""
        return len(self.t_ust) // self.m

    @property
    def w_out_hb(self) -> int:
        return self.w_out - self.w_lb_out

    def __eq__(self, other):
        if not isinstance(other, Decomposition):
            return NotImplemented
        if (self.w_in, self.w_out, self.w_lb_in, self.w_lb_out, self.w_st) != (
            other.w_in,
            other.w_out,
            other.w_lb_in,
            other.w_lb_out,
            other.w_st,
        ):
            return False
        if (self.t_lb is None) != (other.t_lb is None):
            return False
        return (
            np.array_equal(self.t_bias, other.t_bias)
            and np.array_equal(self.t_idx, other.t_idx)
            and np.array_equal(self.t_rsh, other.t_rsh)
            and np.array_equal(self.t_ust, other.t_ust)
            and (self.t_lb is None or np.array_equal(self.t_lb, other.t_lb))
        )


@dataclass(frozen=True, eq=False)
class Plan:
    """A complete compression outcome: either a plain table or a
    decomposition, together with the configuration that produced it."""

    exiguity: int
    w_lb_in: int | None = None
    w_lb_out: int | None = None
    plain: Table | None = None
    decomp: Decomposition | None = None

    def __post_init__(self):
        if (self.plain is None) == (self.decomp is None):
            raise UsageError("plan must hold exactly one of plain table / decomposition")

    @property
    def is_plain(self) -> bool:
        return self.plain is not None

    @property
    def w_in(self) -> int:
        return self.plain.w_in if self.plain is not None else self.decomp.w_in

    @property
    def w_out(self) -> int:
        return self.plain.w_out if self.plain is not None else self.decomp.w_out

    def __eq__(self, other):
        if not isinstance(other, Plan):
            return NotImplemented
        return (
            self.exiguity == other.exiguity
            and self.w_lb_in == other.w_lb_in
            and self.w_lb_out == other.w_lb_out
            and self.plain == other.plain
            and self.decomp == other.decomp
        )

    @classmethod
    def from_table(cls, table: Table, exiguity: int = 0) -> "Plan":
        return cls(exiguity=exiguity, plain=table)

    @classmethod
    def from_decomposition(
        cls, decomp: Decomposition, exiguity: int = 0
    ) -> "Plan":
        return cls(
            exiguity=exiguity,
            w_lb_in=decomp.w_lb_in,
            w_lb_out=decomp.w_lb_out,
            decomp=decomp,
        )


def evaluate(plan: Plan, x: int) -> int:
    """Reconstruct the table value at address x. Pure and total on
    [0, 2^w_in)."""
    if not 0 <= x < 1 << plan.w_in:
        raise AddressError(f"address {x} outside [0, {1 << plan.w_in})")
    if plan.plain is not None:
        return int(plan.plain.values[x])
    d = plan.decomp
    x_hb = x >> d.w_lb_in
    x_lb = x & (d.m - 1)
    ust = int(d.t_ust[(int(d.t_idx[x_hb]) << d.w_lb_in) | x_lb])
    hb = (ust >> int(d.t_rsh[x_hb])) + int(d.t_bias[x_hb])
    if d.w_lb_out:
        return (hb << d.w_lb_out) | int(d.t_lb[x])
    return hb


def reconstruction_values(plan: Plan) -> np.ndarray:
    """Vectorized evaluate over every address; agrees with `evaluate`."""
    if plan.plain is not None:
        return plan.plain.values
    d = plan.decomp
    x = np.arange(1 << d.w_in, dtype=np.int64)
    x_hb = x >> d.w_lb_in
    x_lb = x & (d.m - 1)
    ust = d.t_ust[(d.t_idx[x_hb] << d.w_lb_in) | x_lb]
    hb = (ust >> d.t_rsh[x_hb]) + d.t_bias[x_hb]
    if d.w_lb_out:
        return (hb << d.w_lb_out) | d.t_lb
    return hb


def reconstruction_table(plan: Plan) -> Table:
    """Materialize the table a plan evaluates to."""
    if plan.plain is not None:
        return plan.plain
    return Table(plan.w_in, plan.w_out, reconstruction_values(plan))


def identity_decomposition(table: Table) -> Decomposition:
    """The trivial decomposition: one unique sub-table holding the whole
    table, zero bias and shift. Round-trips exactly."""
    return Decomposition(
        w_in=table.w_in,
        w_out=table.w_out,
        w_lb_in=table.w_in,
        w_lb_out=0,
        w_st=max(int(table.values.max()).bit_length(), 0) if table.values.size else 0,
        t_bias=np.zeros(1, dtype=np.int64),
        t_idx=np.zeros(1, dtype=np.int64),
        t_rsh=np.zeros(1, dtype=np.int64),
        t_ust=table.values,
    )
