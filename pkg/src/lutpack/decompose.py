"""Table decomposition core: sub-table split with bias extraction,
right-shift similarity detection, and greedy unique-sub-table selection.

Sub-table i covers addresses [i*M, (i+1)*M) of the value array being
decomposed, with M = 2^w_lb_in.  Similarity is exact match after an
arithmetic right shift: generator ST_i produces target ST_j at shift t when
ST_i[k] >> t == ST_j[k] for every k.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantError, UsageError
from .model import Decomposition, Table


@dataclass
class SimilarityState:
    """Similarity matrix plus the evolving unique-sub-table selection.

    `rows[i]` maps each target j that sub-table i can generate to the
    smallest working shift; `cols` is the reverse index.  Both shrink to
    empty as `select_unique` covers sub-tables.  `i_ust` lists unique
    sub-tables in selection order and `deps[u]` the (target, shift) pairs
    assigned to unique sub-table u.
    """

    n: int
    rows: dict[int, dict[int, int]] = field(default_factory=dict)
    cols: dict[int, set[int]] = field(default_factory=dict)
    i_ust: list[int] = field(default_factory=list)
    deps: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    def similar(self, i: int, j: int) -> bool:
        return j in self.rows.get(i, ())

    def shift(self, i: int, j: int) -> int | None:
        return self.rows.get(i, {}).get(j)

    def sv(self, i: int) -> int:
        """Count of sub-tables currently generatable from sub-table i."""
        return len(self.rows.get(i, ()))

    def dep_count(self, u: int) -> int:
        """Dependency count of a unique sub-table, self included."""
        return 1 + len(self.deps.get(u, ()))

    def clone(self) -> "SimilarityState":
        return SimilarityState(
            n=self.n,
            rows={i: dict(r) for i, r in self.rows.items()},
            cols={j: set(c) for j, c in self.cols.items()},
            i_ust=list(self.i_ust),
            deps={u: list(d) for u, d in self.deps.items()},
        )


def split_bias(values: np.ndarray, w_lb_in: int):
    """Split a value array into 2^w_lb_in-entry sub-tables, extracting each
    sub-table's minimum into a bias table.

    Returns (residuals, t_bias, w_st) where residuals has shape (n, M),
    t_bias has shape (n,) and w_st is the bit width needed by the largest
    residual (0 for a per-sub-table-constant array).
    """
    values = np.asarray(values, dtype=np.int64)
    size = len(values)
    m = 1 << w_lb_in
    if w_lb_in < 1 or m >= size:
        raise UsageError(f"w_lb_in {w_lb_in} invalid for a {size}-entry array")
    sub = values.reshape(-1, m)
    t_bias = sub.min(axis=1)
    residuals = sub - t_bias[:, None]
    w_st = int(residuals.max()).bit_length()
    return residuals, t_bias, w_st


def similarity_matrix(residuals: np.ndarray, w_st: int) -> SimilarityState:
    """Build the right-shift similarity relation over sub-table residuals.

    Shifts t in [0, w_st] are scanned in ascending order so the smallest
    working shift is recorded for each (generator, target) pair.
    """
    residuals = np.asarray(residuals, dtype=np.int64)
    n = len(residuals)
    index: dict[bytes, list[int]] = {}
    for j in range(n):
        index.setdefault(residuals[j].tobytes(), []).append(j)
    rows: dict[int, dict[int, int]] = {i: {} for i in range(n)}
    cols: dict[int, set[int]] = {j: set() for j in range(n)}
    for t in range(w_st + 1):
        shifted = residuals >> t
        for i in range(n):
            for j in index.get(shifted[i].tobytes(), ()):
                if j not in rows[i]:
                    rows[i][j] = t
                    cols[j].add(i)
    return SimilarityState(n=n, rows=rows, cols=cols)


def _cover(state: SimilarityState, i: int) -> None:
    """Record i as unique, assign everything it generates, and zero the
    similarity rows and columns of the whole covered group."""
    targets = sorted(j for j in state.rows[i] if j != i)
    state.i_ust.append(i)
    state.deps[i] = [(j, state.rows[i][j]) for j in targets]
    covered = [i] + targets
    for c in covered:
        for j in state.rows.pop(c, ()):
            state.cols[j].discard(c)
    for c in covered:
        for r in state.cols.pop(c, ()):
            state.rows[r].pop(c, None)


def select_unique(state: SimilarityState) -> SimilarityState:
    """Greedy unique-sub-table selection: repeatedly pick the sub-table
    that generates the most others (ties to the lowest index) until the
    similarity matrix is empty. Mutates and returns `state`."""
    while state.rows:
        best = None
        best_sv = 0
        for i, row in state.rows.items():
            sv = len(row)
            if sv > best_sv or (sv == best_sv and (best is None or i < best)):
                best, best_sv = i, sv
        if best_sv <= 1:
            # only self-similarities remain; everything left is unique
            for i in sorted(state.rows):
                state.i_ust.append(i)
                state.deps[i] = []
            state.rows.clear()
            state.cols.clear()
            break
        _cover(state, best)
    return state


def all_unique_state(n: int) -> SimilarityState:
    """Selection result with self-similarity detection disabled: every
    sub-table is its own unique sub-table at shift 0."""
    return SimilarityState(
        n=n, i_ust=list(range(n)), deps={i: [] for i in range(n)}
    )


def assemble(
    table: Table,
    w_lb_in: int,
    w_lb_out: int,
    state: SimilarityState,
    residuals: np.ndarray,
    t_bias: np.ndarray,
    w_st: int,
) -> Decomposition:
    """Build the final decomposition from a completed selection.

    Every recorded assignment is re-verified elementwise; a mismatch means
    an internal bug and raises InvariantError.
    """
    n, m = residuals.shape
    pos = {u: p for p, u in enumerate(state.i_ust)}
    t_idx = np.zeros(n, dtype=np.int64)
    t_rsh = np.zeros(n, dtype=np.int64)
    seen = 0
    for u in state.i_ust:
        t_idx[u] = pos[u]
        seen += 1
        for j, t in state.deps.get(u, ()):
            if not np.array_equal(residuals[u] >> t, residuals[j]):
                raise InvariantError(
                    f"sub-table {j} does not equal its generator {u} >> {t}"
                )
            t_idx[j] = pos[u]
            t_rsh[j] = t
            seen += 1
    if seen != n:
        raise InvariantError(f"selection covers {seen} of {n} sub-tables")
    t_ust = np.concatenate([residuals[u] for u in state.i_ust])
    t_lb = None
    if w_lb_out:
        t_lb = table.values & ((1 << w_lb_out) - 1)
    return Decomposition(
        w_in=table.w_in,
        w_out=table.w_out,
        w_lb_in=w_lb_in,
        w_lb_out=w_lb_out,
        w_st=w_st,
        t_bias=t_bias,
        t_idx=t_idx,
        t_rsh=t_rsh,
        t_ust=t_ust,
        t_lb=t_lb,
    )
