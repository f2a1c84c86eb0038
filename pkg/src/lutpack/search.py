"""Configuration sweep: try every sub-table size and higher-bit split,
cost each candidate plan, and keep the cheapest (plain tabulation is always
a candidate, so the result never costs more than the input table).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import decompose
from .dontcare import FreezeMask, reduce_unique
from .errors import UsageError
from .model import CareMask, Decomposition, Plan, Table

DEFAULT_EXIGUITY = 250
DEFAULT_PLUT_INPUTS = 6


@dataclass(frozen=True)
class SearchConfig:
    """Sweep parameters.  Ranges are inclusive; None picks the default
    ([2, w_in-2] sub-table exponents, [0, w_out-1] higher-bit splits)."""

    w_lb_in_range: tuple[int, int] | None = None
    w_lb_out_range: tuple[int, int] | None = None
    exiguity: int = DEFAULT_EXIGUITY
    use_similarity: bool = True
    use_higher_bits: bool = True
    use_dontcares: bool = True
    passes: int = 1
    plut_inputs: int = DEFAULT_PLUT_INPUTS

    def w_lb_in_values(self, w_in: int) -> list[int]:
        lo, hi = self.w_lb_in_range or (2, w_in - 2)
        if self.w_lb_in_range is not None and not 1 <= lo <= hi <= w_in - 1:
            raise UsageError(
                f"w_lb_in range [{lo}, {hi}] invalid for w_in={w_in}"
            )
        return [w for w in range(lo, hi + 1) if 1 <= w <= w_in - 1]

    def w_lb_out_values(self, w_out: int) -> list[int]:
        if not self.use_higher_bits:
            return [0]
        lo, hi = self.w_lb_out_range or (0, w_out - 1)
        if self.w_lb_out_range is not None and not 0 <= lo <= hi <= w_out - 1:
            raise UsageError(
                f"w_lb_out range [{lo}, {hi}] invalid for w_out={w_out}"
            )
        return [w for w in range(lo, hi + 1) if 0 <= w <= w_out - 1]


@dataclass(frozen=True)
class ConfigCost:
    """Stored-bit and estimated-P-LUT costs of one candidate plan."""

    label: str
    w_lb_in: int | None
    w_lb_out: int | None
    bits_lb: int
    bits_bias: int
    bits_idx: int
    bits_rsh: int
    bits_ust: int
    bits_total: int
    pluts: int
    ust_before: int
    ust_after: int


@dataclass
class CostReport:
    """Per-configuration costs plus which plan the sweep selected."""

    w_in: int
    w_out: int
    chosen: str
    rows: list[ConfigCost] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def chosen_row(self) -> ConfigCost:
        for row in self.rows:
            if row.label == self.chosen:
                return row
        raise UsageError(f"report has no row labelled {self.chosen!r}")

    def __eq__(self, other):
        if not isinstance(other, CostReport):
            return NotImplemented
        return (
            self.w_in == other.w_in
            and self.w_out == other.w_out
            and self.chosen == other.chosen
            and self.rows == other.rows
            and self.notes == other.notes
        )


def _clog2(x: int) -> int:
    """ceil(log2(x)): bits needed to address x distinct values."""
    return (x - 1).bit_length() if x > 1 else 0


def cost_components(d: Decomposition) -> dict[str, int]:
    """Stored bits per component table of a decomposition."""
    n = d.n
    idx_w = _clog2(d.n_ust)
    rsh_values = np.unique(d.t_rsh)
    rsh_bits = 0 if len(rsh_values) <= 1 else n * _clog2(d.w_st + 1)
    return {
        "lb": (1 << d.w_in) * d.w_lb_out,
        "bias": n * d.w_out_hb,
        "idx": n * idx_w,
        "rsh": rsh_bits,
        "ust": d.n_ust * d.m * d.w_st,
    }


def cost_bits(d: Decomposition) -> int:
    """Total stored bits of a decomposition (the primary objective)."""
    return sum(cost_components(d).values())


def plain_cost_bits(table: Table) -> int:
    return (1 << table.w_in) * table.w_out


def table_pluts(addr_bits: int, out_bits: int, k: int) -> int:
    """Heuristic physical-LUT count of one stored table under k-input
    physical LUTs.  A ranking proxy, not a synthesis predictor."""
    if out_bits <= 0:
        return 0
    return out_bits * max(1, 1 << max(addr_bits - k, 0))


def cost_pluts(plan: Plan, k: int = DEFAULT_PLUT_INPUTS) -> int:
    """Estimated physical LUTs for a plan: per-table ROM cost plus
    w_out_hb glue per arithmetic stage (variable shift, bias add)."""
    if k < 2:
        raise UsageError(f"physical LUT input size must be >= 2, got {k}")
    if plan.plain is not None:
        return table_pluts(plan.plain.w_in, plan.plain.w_out, k)
    d = plan.decomp
    hb_addr = d.w_in - d.w_lb_in
    idx_w = _clog2(d.n_ust)
    total = table_pluts(d.w_in, d.w_lb_out, k)
    total += table_pluts(hb_addr, d.w_out_hb, k)
    total += table_pluts(hb_addr, idx_w, k)
    variable_shift = len(np.unique(d.t_rsh)) > 1
    if variable_shift:
        total += table_pluts(hb_addr, _clog2(d.w_st + 1), k)
    if d.w_st:
        total += table_pluts(idx_w + d.w_lb_in, d.w_st, k)
    stages = int(variable_shift) + int(bool(d.t_bias.any()))
    total += stages * d.w_out_hb
    return total


def _build_config(
    table: Table,
    mask: CareMask,
    cfg: SearchConfig,
    w_lb_in: int,
    w_lb_out: int,
):
    """Run decompose -> dontcare -> assemble for one configuration.

    Returns (decomposition, ust_before, ust_after).  If the don't-care
    stage does not pay off in stored bits for this configuration, the
    pre-optimization decomposition is kept (never-worse per configuration).
    """
    hb_values = table.values >> w_lb_out
    w_out_hb = table.w_out - w_lb_out
    residuals, t_bias, w_st = decompose.split_bias(hb_values, w_lb_in)
    if cfg.use_similarity:
        state = decompose.select_unique(
            decompose.similarity_matrix(residuals, w_st)
        )
    else:
        state = decompose.all_unique_state(len(residuals))
    before = len(state.i_ust)
    d = decompose.assemble(table, w_lb_in, w_lb_out, state, residuals, t_bias, w_st)
    after = before
    run_dontcares = (
        cfg.use_dontcares
        and cfg.use_similarity
        and not bool(mask.flags.all())
    )
    if run_dontcares:
        freeze = FreezeMask.from_care_mask(mask, w_lb_in)
        st, res, frz = state, residuals, freeze
        for _ in range(max(cfg.passes, 1)):
            st, res, frz = reduce_unique(
                st, res, frz, cfg.exiguity, w_st, w_out_hb, t_bias
            )
        after = len(st.i_ust)
        d_opt = decompose.assemble(table, w_lb_in, w_lb_out, st, res, t_bias, w_st)
        if cost_bits(d_opt) <= cost_bits(d):
            d = d_opt
    return d, before, after


def compress(table: Table, mask: CareMask, cfg: SearchConfig | None = None):
    """Sweep every configuration, including plain tabulation, and return
    the minimum-cost plan together with the full cost report.

    Selection key: stored bits, then estimated physical LUTs, then smaller
    sub-table exponent, then smaller higher-bit split.  Deterministic.
    """
    cfg = cfg or SearchConfig()
    if len(mask) != 1 << table.w_in:
        raise UsageError(
            f"mask has {len(mask)} entries but table has {1 << table.w_in}"
        )
    report = CostReport(w_in=table.w_in, w_out=table.w_out, chosen="plain")
    plain_plan = Plan.from_table(table, exiguity=cfg.exiguity)
    plain_bits = plain_cost_bits(table)
    plain_pluts = cost_pluts(plain_plan, cfg.plut_inputs)
    report.rows.append(
        ConfigCost(
            label="plain",
            w_lb_in=None,
            w_lb_out=None,
            bits_lb=plain_bits,
            bits_bias=0,
            bits_idx=0,
            bits_rsh=0,
            bits_ust=0,
            bits_total=plain_bits,
            pluts=plain_pluts,
            ust_before=0,
            ust_after=0,
        )
    )
    big = float("inf")
    best_key = (plain_bits, plain_pluts, big, big)
    best_plan = plain_plan
    best_label = "plain"
    for w_lb_in in cfg.w_lb_in_values(table.w_in):
        for w_lb_out in cfg.w_lb_out_values(table.w_out):
            d, before, after = _build_config(table, mask, cfg, w_lb_in, w_lb_out)
            comps = cost_components(d)
            bits = sum(comps.values())
            plan = Plan.from_decomposition(d, exiguity=cfg.exiguity)
            pluts = cost_pluts(plan, cfg.plut_inputs)
            label = f"w_lb_in={w_lb_in},w_lb_out={w_lb_out}"
            report.rows.append(
                ConfigCost(
                    label=label,
                    w_lb_in=w_lb_in,
                    w_lb_out=w_lb_out,
                    bits_lb=comps["lb"],
                    bits_bias=comps["bias"],
                    bits_idx=comps["idx"],
                    bits_rsh=comps["rsh"],
                    bits_ust=comps["ust"],
                    bits_total=bits,
                    pluts=pluts,
                    ust_before=before,
                    ust_after=after,
                )
            )
            key = (bits, pluts, w_lb_in, w_lb_out)
            if key < best_key:
                best_key = key
                best_plan = plan
                best_label = label
    report.chosen = best_label
    return best_plan, report
