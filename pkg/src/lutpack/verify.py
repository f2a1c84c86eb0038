"""Independent checking: exhaustive plan verification against the source
table and mask, an exact small-instance minimizer used as a test oracle,
and a mini-interpreter for the emitted Verilog subset.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from .decompose import split_bias
from .errors import BoundsError, FormatError, UsageError
from .model import CareMask, Plan, Table, reconstruction_values

ORACLE_MAX_W_IN = 8
ORACLE_MAX_M = 4
ORACLE_MAX_DONTCARES = 12


@dataclass
class VerifyReport:
    """Outcome of exhaustively checking a plan against its source table."""

    total_checked: int
    care_mismatches: list[int] = field(default_factory=list)
    changed_dontcares: int = 0

    @property
    def ok(self) -> bool:
        return not self.care_mismatches


def verify_plan(table: Table, mask: CareMask, plan: Plan) -> VerifyReport:
    """Evaluate the plan at every address and compare against the table.

    Care addresses must match exactly; differing don't-care addresses are
    counted for information only.
    """
    if len(mask) != len(table.values):
        raise UsageError(
            f"mask has {len(mask)} entries but table has {len(table.values)}"
        )
    if plan.w_in != table.w_in or plan.w_out != table.w_out:
        raise UsageError("plan dimensions do not match the table")
    got = reconstruction_values(plan)
    diff = got != table.values
    mismatches = np.flatnonzero(diff & mask.flags)
    changed = int(np.count_nonzero(diff & ~mask.flags))
    return VerifyReport(
        total_checked=len(table.values),
        care_mismatches=[int(x) for x in mismatches],
        changed_dontcares=changed,
    )


def _min_cover(rows: list[int], n: int) -> int:
    """Exact minimum number of generator rows covering all n sub-tables.
    `rows[i]` is a bitmask of the sub-tables row i generates (self
    included). Branch and bound on the hardest-to-cover element."""
    full = (1 << n) - 1
    covers = [[i for i in range(n) if rows[i] >> j & 1] for j in range(n)]
    best = n
    order = sorted(range(n), key=lambda j: len(covers[j]))

    def dfs(covered: int, count: int) -> None:
        nonlocal best
        if count >= best:
            return
        if covered == full:
            best = count
            return
        for j in order:
            if not covered >> j & 1:
                for i in covers[j]:
                    dfs(covered | rows[i], count + 1)
                return

    dfs(0, 0)
    return best


def oracle_min_ust(table: Table, mask: CareMask, w_lb_in: int, w_st: int) -> int:
    """True minimum unique-sub-table count over every completion of the
    don't-care residuals, by exhaustive enumeration.

    Exponential; refuses instances outside w_in <= 8, M <= 4, and at most
    12 don't cares.
    """
    if table.w_in > ORACLE_MAX_W_IN:
        raise BoundsError(f"oracle limited to w_in <= {ORACLE_MAX_W_IN}")
    m = 1 << w_lb_in
    if m > ORACLE_MAX_M:
        raise BoundsError(f"oracle limited to sub-tables of <= {ORACLE_MAX_M} entries")
    if len(mask) != len(table.values):
        raise UsageError("mask/table size mismatch")
    dc_addrs = [int(a) for a in np.flatnonzero(~mask.flags)]
    if len(dc_addrs) > ORACLE_MAX_DONTCARES:
        raise BoundsError(
            f"oracle limited to <= {ORACLE_MAX_DONTCARES} don't cares"
        )
    residuals, _bias, w_st_real = split_bias(table.values, w_lb_in)
    shift_max = max(w_st, w_st_real)
    n = len(residuals)
    work = [[int(v) for v in row] for row in residuals]
    dc_pos = [(a >> w_lb_in, a & (m - 1)) for a in dc_addrs]
    best = n
    for combo in itertools.product(range(1 << w_st), repeat=len(dc_pos)):
        for (i, k), v in zip(dc_pos, combo):
            work[i][k] = v
        index: dict[tuple, list[int]] = {}
        for j, row in enumerate(work):
            index.setdefault(tuple(row), []).append(j)
        rows = [0] * n
        for i, row in enumerate(work):
            for t in range(shift_max + 1):
                for j in index.get(tuple(v >> t for v in row), ()):
                    rows[i] |= 1 << j
        best = min(best, _min_cover(rows, n))
        if best == 1:
            break
    return best


# ---------------------------------------------------------------------------
# Verilog mini-interpreter
#
# Understands exactly the combinational subset produced by emit_verilog:
# wire definitions, reg+case constant tables, part selects, concatenation,
# right shift and addition, with values truncated to declared widths.

_PORT_RE = re.compile(r"(input|output)\s+wire\s+\[(\d+):0\]\s+(\w+)")
_WIRE_RE = re.compile(r"wire\s+\[(\d+):0\]\s+(\w+)\s*=\s*(.+);")
_REG_RE = re.compile(r"reg\s+\[(\d+):0\]\s+(\w+);")
_CASE_RE = re.compile(r"case\s*\((\w+)\)")
_ITEM_RE = re.compile(r"(\d+)'h([0-9a-f]+)\s*:\s*(\w+)\s*=\s*(\d+)'h([0-9a-f]+);")
_ASSIGN_RE = re.compile(r"assign\s+data\s*=\s*(.+);")


class _VerilogModel:
    def __init__(self, text: str):
        self.w_in = None
        self.w_out = None
        self.widths: dict[str, int] = {}
        self.steps: list[tuple] = []  # ("wire", name, expr) | ("table", name, sel, dict)
        self.data_expr = None
        self._parse(text)

    def _parse(self, text: str) -> None:
        lines = text.splitlines()
        i = 0
        while i < len(lines):
            line = lines[i].strip()
            i += 1
            m = _PORT_RE.search(line)
            if m:
                if m.group(1) == "input":
                    self.w_in = int(m.group(2)) + 1
                else:
                    self.w_out = int(m.group(2)) + 1
                continue
            m = _WIRE_RE.search(line)
            if m:
                width, name, expr = int(m.group(1)) + 1, m.group(2), m.group(3)
                self.widths[name] = width
                self.steps.append(("wire", name, expr))
                continue
            m = _REG_RE.search(line)
            if m:
                self.widths[m.group(2)] = int(m.group(1)) + 1
                continue
            m = _CASE_RE.search(line)
            if m:
                sel = m.group(1)
                entries = {}
                target = None
                while i < len(lines):
                    item = lines[i].strip()
                    i += 1
                    if item.startswith("endcase"):
                        break
                    if item.startswith("default"):
                        continue
                    mi = _ITEM_RE.match(item)
                    if not mi:
                        raise FormatError(f"unrecognized case item: {item!r}", line=i)
                    target = mi.group(3)
                    entries[int(mi.group(2), 16)] = int(mi.group(5), 16)
                if target is None:
                    raise FormatError("empty case block", line=i)
                self.steps.append(("table", target, sel, entries))
                continue
            m = _ASSIGN_RE.search(line)
            if m:
                self.data_expr = m.group(1)
        if self.w_in is None or self.w_out is None or self.data_expr is None:
            raise FormatError("text is not a lutpack-emitted module")

    def _eval(self, expr: str, env: dict) -> np.ndarray:
        expr = expr.strip()
        m = re.fullmatch(r"\((\w+)\s*>>\s*(\w+)\)\s*\+\s*(\w+)", expr)
        if m:
            return (
                self._eval(m.group(1), env) >> self._eval(m.group(2), env)
            ) + self._eval(m.group(3), env)
        m = re.fullmatch(r"\{(\w+)\s*,\s*(\w+)\}", expr)
        if m:
            lo = m.group(2)
            return (self._eval(m.group(1), env) << self.widths[lo]) | self._eval(
                lo, env
            )
        m = re.fullmatch(r"(\w+)\[(\d+):(\d+)\]", expr)
        if m:
            hi, lo = int(m.group(2)), int(m.group(3))
            base = self._eval(m.group(1), env)
            return (base >> lo) & ((1 << (hi - lo + 1)) - 1)
        m = re.fullmatch(r"(\d+)'h([0-9a-f]+)", expr)
        if m:
            return np.int64(int(m.group(2), 16))
        if expr.isdigit():
            return np.int64(int(expr))
        if expr in env:
            return env[expr]
        raise FormatError(f"cannot evaluate expression {expr!r}")

    def table_values(self) -> np.ndarray:
        addresses = np.arange(1 << self.w_in, dtype=np.int64)
        env = {"address": addresses}
        for step in self.steps:
            if step[0] == "wire":
                _, name, expr = step
                value = self._eval(expr, env) & ((1 << self.widths[name]) - 1)
            else:
                _, name, sel, entries = step
                sel_values = env[sel]
                rom = np.zeros(int(sel_values.max()) + 1, dtype=np.int64)
                for k, v in entries.items():
                    if k < len(rom):
                        rom[k] = v
                value = rom[sel_values] & ((1 << self.widths[name]) - 1)
            env[name] = value
        return self._eval(self.data_expr, env) & ((1 << self.w_out) - 1)


def interpret_verilog(text: str) -> Table:
    """Evaluate an emitted module over every address, per Verilog
    semantics for the emitted subset, returning the implied table."""
    model = _VerilogModel(text)
    return Table(model.w_in, model.w_out, model.table_values())
