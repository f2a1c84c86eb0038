import numpy as np
import pytest

from lutpack import (
    CareMask,
    Decomposition,
    Plan,
    SearchConfig,
    Table,
    UsageError,
    compress,
    cost_bits,
    cost_components,
    cost_pluts,
    plain_cost_bits,
    reconstruction_values,
    table_pluts,
)
from conftest import random_mask, random_table


def all_care(w_in):
    return CareMask(np.ones(1 << w_in, dtype=bool))


class TestCostModel:
    def test_plain_bits(self):
        assert plain_cost_bits(Table(8, 8, np.zeros(256, dtype=int))) == 2048

    def test_component_bits(self):
        d = Decomposition(
            w_in=4, w_out=4, w_lb_in=2, w_lb_out=0, w_st=4,
            t_bias=[0, 0, 0, 0],
            t_idx=[0, 0, 0, 0],
            t_rsh=[2, 1, 0, 3],
            t_ust=[0, 6, 8, 15],
        )
        comps = cost_components(d)
        assert comps == {"lb": 0, "bias": 16, "idx": 0, "rsh": 12, "ust": 16}
        assert cost_bits(d) == 44

    def test_single_entry_index_table_is_free(self):
        # one unique sub-table needs no index bits
        d = Decomposition(
            w_in=4, w_out=2, w_lb_in=2, w_lb_out=0, w_st=1,
            t_bias=[0, 1, 2, 0],
            t_idx=[0, 0, 0, 0],
            t_rsh=[0, 0, 0, 0],
            t_ust=[0, 1, 1, 0],
        )
        comps = cost_components(d)
        assert comps["idx"] == 0
        assert comps["rsh"] == 0  # constant shift is wired, not stored

    def test_table_pluts(self):
        assert table_pluts(6, 1, 6) == 1
        assert table_pluts(4, 1, 6) == 1  # small tables round up to one
        assert table_pluts(8, 4, 6) == 16
        assert table_pluts(12, 2, 6) == 128
        assert table_pluts(10, 3, 4) == 3 * 64

    def test_cost_pluts_plain(self):
        plan = Plan.from_table(Table(12, 2, np.zeros(4096, dtype=int)))
        assert cost_pluts(plan, 6) == 128

    def test_cost_pluts_rejects_tiny_k(self):
        plan = Plan.from_table(Table(4, 2, np.zeros(16, dtype=int)))
        with pytest.raises(UsageError):
            cost_pluts(plan, 1)


class TestCompress:
    def test_family(self, family_table, family_mask):
        plan, report = compress(family_table, family_mask)
        row = report.chosen_row
        assert (row.w_lb_in, row.w_lb_out) == (2, 0)
        assert row.bits_total == 44
        assert (row.ust_before, row.ust_after) == (2, 1)
        values = reconstruction_values(plan)
        # the care entries survive; the single don't care was rewritten
        assert np.array_equal(values[family_mask.flags],
                              family_table.values[family_mask.flags])
        assert values[1] == 1

    def test_constant_table_collapses(self):
        table = Table(6, 4, np.full(64, 9))
        plan, report = compress(table, all_care(6))
        row = report.chosen_row
        assert row.bits_total == 16  # one zero-width sub-table, 4 biases
        assert row.w_lb_in == 4
        assert np.array_equal(reconstruction_values(plan), table.values)

    def test_never_worse_than_plain(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            table = random_table(rng, 7, 5)
            plan, report = compress(table, all_care(7))
            assert report.chosen_row.bits_total <= plain_cost_bits(table)
            assert np.array_equal(reconstruction_values(plan), table.values)

    def test_incompressible_noise_falls_back_to_plain(self):
        # four distinct single-bit sub-table patterns: any decomposition
        # pays bias/index overhead the plain 16-bit form does not
        values = [0, 1, 1, 0, 0, 0, 1, 1, 0, 1, 0, 1, 1, 1, 0, 1]
        table = Table(4, 1, values)
        plan, report = compress(table, all_care(4))
        assert report.chosen == "plain"
        assert plan.plain is not None

    def test_report_enumerates_the_whole_sweep(self):
        table = Table(6, 4, np.arange(64) % 16)
        cfg = SearchConfig()
        plan, report = compress(table, all_care(6), cfg)
        # plain + (w_lb_in in 2..4) x (w_lb_out in 0..3)
        assert len(report.rows) == 1 + 3 * 4
        labels = [r.label for r in report.rows]
        assert len(labels) == len(set(labels))
        assert report.chosen in labels

    def test_explicit_ranges_and_flags(self):
        table = Table(6, 4, np.arange(64) % 16)
        cfg = SearchConfig(
            w_lb_in_range=(3, 3), w_lb_out_range=(0, 0), use_dontcares=False
        )
        _, report = compress(table, all_care(6), cfg)
        assert len(report.rows) == 2
        cfg = SearchConfig(use_higher_bits=False)
        _, report = compress(table, all_care(6), cfg)
        assert all(r.w_lb_out in (None, 0) for r in report.rows)

    def test_bad_range_rejected(self):
        table = Table(6, 4, np.arange(64) % 16)
        with pytest.raises(UsageError):
            compress(table, all_care(6), SearchConfig(w_lb_in_range=(0, 9)))
        with pytest.raises(UsageError):
            compress(table, all_care(6), SearchConfig(w_lb_out_range=(0, 4)))

    def test_mask_size_mismatch(self):
        table = Table(6, 4, np.arange(64) % 16)
        with pytest.raises(UsageError):
            compress(table, all_care(4))

    def test_no_similarity_keeps_every_subtable(self):
        table = Table(6, 4, np.arange(64) % 16)
        cfg = SearchConfig(use_similarity=False)
        _, report = compress(table, all_care(6), cfg)
        for row in report.rows:
            if row.w_lb_in is not None:
                assert row.ust_before == 1 << (6 - row.w_lb_in)
                assert row.ust_after == row.ust_before

    def test_dontcares_never_hurt_chosen_cost(self):
        rng = np.random.default_rng(29)
        for _ in range(8):
            table = random_table(rng, 7, 4)
            mask = random_mask(rng, 7, 0.5)
            _, with_dc = compress(table, mask)
            _, without = compress(table, mask, SearchConfig(use_dontcares=False))
            assert (
                with_dc.chosen_row.bits_total <= without.chosen_row.bits_total
            )

    def test_deterministic(self):
        rng = np.random.default_rng(31)
        table = random_table(rng, 8, 6)
        mask = random_mask(rng, 8, 0.25)
        plan_a, report_a = compress(table, mask)
        plan_b, report_b = compress(table, mask)
        assert report_a == report_b
        assert plan_a == plan_b
