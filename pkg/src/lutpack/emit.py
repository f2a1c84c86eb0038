"""Plan serialization: synthesizable Verilog, a portable plan-file text
format, and human/machine readable cost reports.

All emitters are deterministic: identical plans produce identical bytes.
"""
from __future__ import annotations

import json
import re

import numpy as np

from .errors import FormatError, UsageError
from .model import Decomposition, Plan, Table
from .search import ConfigCost, CostReport, _clog2

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

PLAN_MAGIC = "lutpack-plan 1"


def _hex(value: int, width: int) -> str:
    digits = max((width + 3) // 4, 1)
    return f"{max(width, 1)}'h{value:0{digits}x}"


def _case_block(out, name, width, selector, sel_width, values) -> None:
    out.append(f"    reg [{max(width, 1) - 1}:0] {name};")
    out.append("    always @(*) begin")
    out.append(f"        case ({selector})")
    for addr, value in enumerate(values):
        out.append(
            f"            {_hex(addr, sel_width)}: {name} = {_hex(int(value), width)};"
        )
    out.append(f"            default: {name} = {_hex(0, width)};")
    out.append("        endcase")
    out.append("    end")
    out.append("")


def emit_verilog(plan: Plan, module_name: str) -> str:
    """Render a plan as one self-contained combinational Verilog module
    with input ``address`` and output ``data``."""
    if not _IDENT_RE.match(module_name):
        raise UsageError(f"invalid Verilog module name: {module_name!r}")
    if plan.plain is not None:
        return _emit_plain(plan.plain, module_name)
    return _emit_decomposition(plan.decomp, module_name)


def _module_header(name: str, w_in: int, w_out: int) -> list[str]:
    return [
        f"// {name}: {w_in}-bit address to {w_out}-bit data lookup",
        f"module {name} (",
        f"    input  wire [{w_in - 1}:0] address,",
        f"    output wire [{w_out - 1}:0] data",
        ");",
        "",
    ]


def _emit_plain(table: Table, name: str) -> str:
    out = _module_header(name, table.w_in, table.w_out)
    _case_block(out, "rom", table.w_out, "address", table.w_in, table.values)
    out.append("    assign data = rom;")
    out.append("")
    out.append("endmodule")
    out.append("")
    return "\n".join(out)


def _emit_decomposition(d: Decomposition, name: str) -> str:
    out = _module_header(name, d.w_in, d.w_out)
    hb_bits = d.w_in - d.w_lb_in
    idx_w = _clog2(d.n_ust)
    rsh_values = np.unique(d.t_rsh)
    variable_shift = len(rsh_values) > 1
    rsh_w = _clog2(d.w_st + 1)

    if hb_bits:
        out.append(
            f"    wire [{hb_bits - 1}:0] x_hb = address[{d.w_in - 1}:{d.w_lb_in}];"
        )
    out.append(f"    wire [{d.w_lb_in - 1}:0] x_lb = address[{d.w_lb_in - 1}:0];")
    out.append("")

    def scalar_or_case(sig, width, values):
        if hb_bits:
            _case_block(out, sig, width, "x_hb", hb_bits, values)
        else:
            out.append(
                f"    wire [{max(width, 1) - 1}:0] {sig} = {_hex(int(values[0]), width)};"
            )
            out.append("")

    scalar_or_case("bias", d.w_out_hb, d.t_bias)
    if idx_w:
        scalar_or_case("idx", idx_w, d.t_idx)
    if variable_shift:
        scalar_or_case("rsh", rsh_w, d.t_rsh)

    if d.w_st:
        if idx_w:
            ust_addr_w = idx_w + d.w_lb_in
            out.append(
                f"    wire [{ust_addr_w - 1}:0] ust_addr = {{idx, x_lb}};"
            )
            out.append("")
            _case_block(out, "ust", d.w_st, "ust_addr", ust_addr_w, d.t_ust)
        else:
            _case_block(out, "ust", d.w_st, "x_lb", d.w_lb_in, d.t_ust)
        shift_expr = "rsh" if variable_shift else str(int(rsh_values[0]))
        out.append(
            f"    wire [{d.w_out_hb - 1}:0] hb_val = (ust >> {shift_expr}) + bias;"
        )
    else:
        out.append(f"    wire [{d.w_out_hb - 1}:0] hb_val = bias;")
    out.append("")

    if d.w_lb_out:
        _case_block(out, "lb", d.w_lb_out, "address", d.w_in, d.t_lb)
        out.append("    assign data = {hb_val, lb};")
    else:
        out.append("    assign data = hb_val;")
    out.append("")
    out.append("endmodule")
    out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# plan files


def _dump_table(out, name, values) -> None:
    out.append(f"[table {name}]")
    values = list(values)
    for start in range(0, len(values), 16):
        out.append(" ".join(f"{int(v):x}" for v in values[start : start + 16]))


def emit_plan_file(plan: Plan, report: CostReport) -> str:
    """Serialize a plan and its cost report as portable UTF-8 text."""
    out = [PLAN_MAGIC, "[config]"]
    out.append(f"kind = {'plain' if plan.is_plain else 'compressed'}")
    out.append(f"w_in = {plan.w_in}")
    out.append(f"w_out = {plan.w_out}")
    out.append(f"exiguity = {plan.exiguity}")
    if plan.plain is not None:
        _dump_table(out, "values", plan.plain.values)
    else:
        d = plan.decomp
        out.append(f"w_lb_in = {d.w_lb_in}")
        out.append(f"w_lb_out = {d.w_lb_out}")
        out.append(f"w_st = {d.w_st}")
        _dump_table(out, "t_bias", d.t_bias)
        _dump_table(out, "t_idx", d.t_idx)
        _dump_table(out, "t_rsh", d.t_rsh)
        _dump_table(out, "t_ust", d.t_ust)
        if d.t_lb is not None:
            _dump_table(out, "t_lb", d.t_lb)
    out.append("[report]")
    out.append(f"w_in = {report.w_in}")
    out.append(f"w_out = {report.w_out}")
    out.append(f"chosen = {report.chosen}")
    for note in report.notes:
        out.append(f"note = {note}")
    for row in report.rows:
        fields = " ".join(
            f"{k}={_opt(v)}"
            for k, v in (
                ("label", row.label),
                ("w_lb_in", row.w_lb_in),
                ("w_lb_out", row.w_lb_out),
                ("bits_lb", row.bits_lb),
                ("bits_bias", row.bits_bias),
                ("bits_idx", row.bits_idx),
                ("bits_rsh", row.bits_rsh),
                ("bits_ust", row.bits_ust),
                ("bits_total", row.bits_total),
                ("pluts", row.pluts),
                ("ust_before", row.ust_before),
                ("ust_after", row.ust_after),
            )
        )
        out.append(f"row {fields}")
    out.append("[end]")
    out.append("")
    return "\n".join(out)


def _opt(v):
    return "-" if v is None else v


class _PlanParser:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def error(self, message: str) -> FormatError:
        return FormatError(message, line=self.pos)

    def next_line(self):
        while self.pos < len(self.lines):
            self.pos += 1
            line = self.lines[self.pos - 1].strip()
            if line:
                return line
        return None

    def peek(self):
        pos = self.pos
        line = self.next_line()
        self.pos = pos
        return line

    def expect_kv(self, key: str) -> str:
        line = self.next_line()
        if line is None or "=" not in line:
            raise self.error(f"expected '{key} = ...'")
        k, v = (part.strip() for part in line.split("=", 1))
        if k != key:
            raise self.error(f"expected key {key!r}, got {k!r}")
        return v

    def read_table(self, name: str) -> np.ndarray:
        line = self.next_line()
        if line != f"[table {name}]":
            raise self.error(f"missing section [table {name}]")
        values = []
        while True:
            nxt = self.peek()
            if nxt is None or nxt.startswith("["):
                break
            self.next_line()
            try:
                values.extend(int(tok, 16) for tok in nxt.split())
            except ValueError:
                raise self.error(f"bad hex value in table {name}") from None
        return np.array(values, dtype=np.int64)


def load_plan_file(text: str):
    """Parse a plan file back into (Plan, CostReport)."""
    p = _PlanParser(text)
    if p.next_line() != PLAN_MAGIC:
        raise p.error(f"missing header {PLAN_MAGIC!r}")
    if p.next_line() != "[config]":
        raise p.error("missing section [config]")
    kind = p.expect_kv("kind")
    if kind not in ("plain", "compressed"):
        raise p.error(f"unknown plan kind {kind!r}")
    w_in = int(p.expect_kv("w_in"))
    w_out = int(p.expect_kv("w_out"))
    exiguity = int(p.expect_kv("exiguity"))
    if kind == "plain":
        values = p.read_table("values")
        plan = Plan.from_table(Table(w_in, w_out, values), exiguity=exiguity)
    else:
        w_lb_in = int(p.expect_kv("w_lb_in"))
        w_lb_out = int(p.expect_kv("w_lb_out"))
        w_st = int(p.expect_kv("w_st"))
        t_bias = p.read_table("t_bias")
        t_idx = p.read_table("t_idx")
        t_rsh = p.read_table("t_rsh")
        t_ust = p.read_table("t_ust")
        t_lb = p.read_table("t_lb") if w_lb_out else None
        plan = Plan.from_decomposition(
            Decomposition(
                w_in=w_in,
                w_out=w_out,
                w_lb_in=w_lb_in,
                w_lb_out=w_lb_out,
                w_st=w_st,
                t_bias=t_bias,
                t_idx=t_idx,
                t_rsh=t_rsh,
                t_ust=t_ust,
                t_lb=t_lb,
            ),
            exiguity=exiguity,
        )
    if p.next_line() != "[report]":
        raise p.error("missing section [report]")
    report = CostReport(
        w_in=int(p.expect_kv("w_in")),
        w_out=int(p.expect_kv("w_out")),
        chosen=p.expect_kv("chosen"),
    )
    while True:
        line = p.next_line()
        if line is None:
            raise p.error("missing section [end]")
        if line == "[end]":
            break
        if line.startswith("note = "):
            report.notes.append(line[len("note = ") :])
            continue
        if not line.startswith("row "):
            raise p.error(f"unexpected report line {line!r}")
        fields = {}
        for token in line[4:].split():
            if "=" not in token:
                raise p.error(f"bad report field {token!r}")
            k, v = token.split("=", 1)
            fields[k] = v

        def geti(key):
            try:
                return None if fields[key] == "-" else int(fields[key])
            except (KeyError, ValueError):
                raise p.error(f"bad or missing report field {key!r}") from None

        report.rows.append(
            ConfigCost(
                label=fields.get("label", ""),
                w_lb_in=geti("w_lb_in"),
                w_lb_out=geti("w_lb_out"),
                bits_lb=geti("bits_lb"),
                bits_bias=geti("bits_bias"),
                bits_idx=geti("bits_idx"),
                bits_rsh=geti("bits_rsh"),
                bits_ust=geti("bits_ust"),
                bits_total=geti("bits_total"),
                pluts=geti("pluts"),
                ust_before=geti("ust_before"),
                ust_after=geti("ust_after"),
            )
        )
    return plan, report


# ---------------------------------------------------------------------------
# reports


def render_report(report: CostReport) -> str:
    """Human-readable cost report."""
    out = [
        f"lutpack cost report: {report.w_in}-bit address, {report.w_out}-bit output",
        f"chosen plan: {report.chosen}",
    ]
    for note in report.notes:
        out.append(f"note: {note}")
    out.append("")
    header = (
        f"{'configuration':<24} {'bits':>8} {'pluts':>7} {'ust_before':>10} "
        f"{'ust_after':>9}"
    )
    out.append(header)
    out.append("-" * len(header))
    for row in report.rows:
        marker = " *" if row.label == report.chosen else ""
        out.append(
            f"{row.label:<24} {row.bits_total:>8} {row.pluts:>7} "
            f"{row.ust_before:>10} {row.ust_after:>9}{marker}"
        )
    chosen = report.chosen_row
    out.append("")
    out.append(
        "chosen bits: "
        f"total={chosen.bits_total} lb={chosen.bits_lb} bias={chosen.bits_bias} "
        f"idx={chosen.bits_idx} rsh={chosen.bits_rsh} ust={chosen.bits_ust}"
    )
    out.append("")
    return "\n".join(out)


def report_to_dict(report: CostReport) -> dict:
    return {
        "w_in": report.w_in,
        "w_out": report.w_out,
        "chosen": report.chosen,
        "notes": list(report.notes),
        "rows": [vars(row).copy() for row in report.rows],
    }


def render_report_json(report: CostReport) -> str:
    """Machine-readable report."""
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
