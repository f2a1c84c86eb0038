"""Unique-sub-table reduction via don't-care rewriting.

Starting from a completed greedy selection, the optimizer walks the unique
sub-tables from fewest to most dependencies and tries to make each one
generatable from another unique sub-table by rewriting its modifiable
(don't-care) entries.  A successful elimination must also re-home every
dependent of the eliminated sub-table; otherwise all provisional rewrites
are rolled back.  Entries that took part in a committed match are frozen
against further modification.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decompose import SimilarityState
from .model import CareMask


@dataclass
class FreezeMask:
    """Per-residual-entry modifiability flags, shape (n, M).

    Care entries are born frozen; don't-care entries freeze once they have
    participated in a committed match.  Frozen entries never change value.
    """

    frozen: np.ndarray

    @classmethod
    def from_care_mask(cls, mask: CareMask, w_lb_in: int) -> "FreezeMask":
        return cls(np.array(mask.flags, dtype=bool).reshape(-1, 1 << w_lb_in))

    def copy(self) -> "FreezeMask":
        return FreezeMask(self.frozen.copy())


def match_with_dontcares(
    target: np.ndarray,
    target_frozen: np.ndarray,
    generator: np.ndarray,
    w_st: int,
    w_out_hb: int,
    bias: int,
):
    """Find the smallest shift t such that generator >> t agrees with
    target on every frozen entry, rewriting the unfrozen entries to
    generator >> t.

    Rewritten entries must still fit the output range once the bias is
    added back (rewritten + bias < 2^w_out_hb); shifts violating that are
    rejected.  Returns (t, rewritten) or None.
    """
    target = np.asarray(target, dtype=np.int64)
    generator = np.asarray(generator, dtype=np.int64)
    frozen = np.asarray(target_frozen, dtype=bool)
    limit = 1 << w_out_hb
    free = ~frozen
    for t in range(w_st + 1):
        cand = generator >> t
        if not np.array_equal(cand[frozen], target[frozen]):
            continue
        if np.any(cand[free] + bias >= limit):
            continue
        return t, np.where(frozen, target, cand)
    return None


def _match_shifts(target, frozen, gens, w_st, limit, bias):
    """Vectorized variant of match_with_dontcares over a (g, M) stack of
    generators: returns the smallest qualifying shift per generator, or -1."""
    best = np.full(len(gens), -1, dtype=np.int64)
    free = ~frozen
    has_frozen = bool(frozen.any())
    has_free = bool(free.any())
    for t in range(w_st + 1):
        cand = gens >> t
        ok = np.ones(len(gens), dtype=bool)
        if has_frozen:
            ok &= (cand[:, frozen] == target[frozen]).all(axis=1)
        if has_free:
            ok &= (cand[:, free] + bias < limit).all(axis=1)
        best = np.where((best < 0) & ok, t, best)
        if not has_frozen and best.min() >= 0:
            break
    return best


class _Reducer:
    """One reduction pass; owns the working copies and the rollback journal."""

    def __init__(self, state, residuals, frozen, exiguity, w_st, w_out_hb, t_bias):
        self.state = state
        self.residuals = residuals
        self.frozen = frozen
        self.exiguity = exiguity
        self.w_st = w_st
        self.w_out_hb = w_out_hb
        self.limit = 1 << w_out_hb
        self.t_bias = t_bias
        self.journal: list[tuple[int, np.ndarray]] = []

    def _write(self, row: int, values: np.ndarray) -> None:
        self.journal.append((row, self.residuals[row].copy()))
        self.residuals[row] = values

    def _rollback(self) -> None:
        for row, old in reversed(self.journal):
            self.residuals[row] = old
        self.journal.clear()

    def _generators(self, exclude: int) -> list[int]:
        """Candidate generators in descending dependency count, ties to the
        lower index."""
        gens = [g for g in self.state.i_ust if g != exclude]
        gens.sort(key=lambda g: (-self.state.dep_count(g), g))
        return gens

    def _rehome(self, j: int, gens: list[int]):
        """Find a new generator for dependent j among the remaining unique
        sub-tables: first requiring an exact match, then permitting
        rewrites of j's unfrozen entries."""
        if not gens:
            return None
        stack = self.residuals[gens]
        target = self.residuals[j]
        exact = _match_shifts(
            target, np.ones_like(target, dtype=bool), stack, self.w_st, self.limit, 0
        )
        for p, g in enumerate(gens):
            if exact[p] >= 0:
                return g, int(exact[p])
        if self.frozen[j].all():
            return None
        loose = _match_shifts(
            target, self.frozen[j], stack, self.w_st, self.limit, int(self.t_bias[j])
        )
        for p, g in enumerate(gens):
            if loose[p] >= 0:
                t = int(loose[p])
                self._write(j, np.where(self.frozen[j], target, stack[p] >> t))
                return g, t
        return None

    def _try_eliminate(self, u: int) -> bool:
        state = self.state
        gens = self._generators(u)
        if not gens:
            return False
        shifts = _match_shifts(
            self.residuals[u],
            self.frozen[u],
            self.residuals[gens],
            self.w_st,
            self.limit,
            int(self.t_bias[u]),
        )
        for p, g in enumerate(gens):
            if shifts[p] < 0:
                continue
            t0 = int(shifts[p])
            self._write(
                u,
                np.where(self.frozen[u], self.residuals[u], self.residuals[g] >> t0),
            )
            assignments = [(u, g, t0)]
            ok = True
            for j, _old in state.deps[u]:
                hit = self._rehome(j, gens)
                if hit is None:
                    ok = False
                    break
                assignments.append((j, hit[0], hit[1]))
            if not ok:
                self._rollback()
                continue
            # commit: merge dependency records and freeze participants
            state.i_ust.remove(u)
            del state.deps[u]
            for j, g2, t2 in assignments:
                state.deps[g2].append((j, t2))
                self.frozen[j] = True
                self.frozen[g2] = True
            self.journal.clear()
            return True
        return False

    def run(self) -> None:
        order = sorted(
            self.state.i_ust, key=lambda u: (self.state.dep_count(u), u)
        )
        for u in order:
            if u not in self.state.deps:  # eliminated earlier in this pass
                continue
            if self.state.dep_count(u) > self.exiguity:
                continue
            self._try_eliminate(u)


def reduce_unique(
    state: SimilarityState,
    residuals: np.ndarray,
    freeze: FreezeMask,
    exiguity: int,
    w_st: int,
    w_out_hb: int,
    t_bias: np.ndarray,
):
    """One traversal of the unique-sub-table list attempting to eliminate
    each eligible entry in turn.

    Returns (state', residuals', freeze'); inputs are left untouched.  The
    unique count never increases, care entries never change, and a failed
    attempt leaves no trace.
    """
    if freeze.frozen.all():
        return state, residuals, freeze
    state = state.clone()
    residuals = np.array(residuals, dtype=np.int64)
    freeze = freeze.copy()
    reducer = _Reducer(
        state, residuals, freeze.frozen, exiguity, w_st, w_out_hb, t_bias
    )
    reducer.run()
    return state, residuals, freeze
