import pytest

from meff.catalog import (
    BALANCE_CONSTANT,
    CSV_HEADER,
    Order,
    csv_rows,
    dominant_family,
    list_terms,
    parity_filter,
    power_count,
    predicted_order,
)


class TestRows:
    def test_row_count(self):
        assert len(list_terms()) == 38

    def test_group_sizes(self):
        per_table = {}
        for t in list_terms():
            per_table[t.table_row[0]] = per_table.get(t.table_row[0], 0) + 1
        assert per_table == {1: 2, 2: 8, 3: 10, 4: 8, 5: 10}

    def test_keys_unique(self):
        keys = [t.key for t in list_terms()]
        assert len(keys) == len(set(keys))

    def test_table2_row4(self):
        t = next(t for t in list_terms() if t.table_row == (2, 4))
        assert t.key == (4, 1, 4)
        assert (t.sigma_b_count, t.pf_count, t.h0inv_count) == (0, 2, 3)
        assert t.predicted_order is Order.SQRT
        assert t.printed_order.startswith("+")

    def test_table5_row10_is_the_quadratic_row(self):
        t = next(t for t in list_terms() if t.table_row == (5, 10))
        assert t.key == (16, 1, 2)
        assert (t.sigma_b_count, t.pf_count, t.h0inv_count) == (4, 2, 5)
        assert t.predicted_order is Order.MINUS_LAMBDA2
        assert t.dominant_label == "E4"

    def test_exactly_one_quadratic_row(self):
        quad = [t for t in list_terms()
                if t.predicted_order in (Order.LAMBDA2, Order.MINUS_LAMBDA2)]
        assert len(quad) == 1 and quad[0].table_row == (5, 10)

    def test_vanishing_rows_have_rationales(self):
        zeros = [t for t in list_terms() if t.predicted_order is Order.ZERO]
        assert sorted(t.table_row for t in zeros) == [(5, 3), (5, 4), (5, 5),
                                                      (5, 7)]
        for t in zeros:
            assert t.note
        pf_zero = [t for t in zeros if t.table_row[1] in (3, 4, 5)]
        assert all("P_f A phi_0" in t.note for t in pf_zero)

    def test_balance_rule_constant(self):
        # Every row satisfies h0inv - (sigmaB + Pf)/2 == 2: the marginal
        # (log^2) power counting.  A uniform constant, but 2, not 3.
        constants = {t.h0inv_count - (t.sigma_b_count + t.pf_count) / 2
                     for t in list_terms()}
        assert constants == {BALANCE_CONSTANT} == {2}


class TestLookups:
    def test_predicted_order_examples(self):
        assert predicted_order(1, 4, 1) is Order.LOG2
        assert predicted_order(10, 1, 2) is Order.ZERO
        assert predicted_order(6, 3, 2) is Order.MINUS_SQRT

    def test_unknown_triple(self):
        with pytest.raises(KeyError):
            predicted_order(9, 9, 9)

    def test_power_count_flags(self):
        assert power_count(
            next(t for t in list_terms() if t.key == (16, 1, 2))).asymmetric
        assert power_count(
            next(t for t in list_terms() if t.key == (4, 1, 4))).collinear
        log2 = power_count(next(t for t in list_terms() if t.key == (1, 4, 1)))
        assert not (log2.collinear or log2.asymmetric)
        assert all(power_count(t).naive_order is Order.LOG2
                   for t in list_terms())


class TestParity:
    def test_survivor_counts(self):
        summary = parity_filter()
        assert summary.total_terms == 76
        assert summary.survivors == 38
        assert summary.dropped_odd == 38
        assert summary.group_sizes == (4, 16, 20, 16, 20)
        assert summary.group_survivors == (2, 8, 10, 8, 10)

    def test_even_spin_counts_only(self):
        assert parity_filter().sigma_b_values == (0, 2, 4)


class TestDominantFamily:
    def test_labels_and_rows(self):
        fam = {t.dominant_label: t.table_row for t in dominant_family()}
        assert fam == {"E0": (3, 9), "E1": (4, 8), "E2": (2, 8),
                       "E3": (3, 10), "E4": (5, 10)}

    def test_four_spin_vertices_or_e2_constant(self):
        for t in dominant_family():
            assert t.sigma_b_count == 4 or t.dominant_label == "E0"


class TestCsv:
    def test_header_and_row_count(self):
        rows = csv_rows()
        assert len(rows) == 38
        assert CSV_HEADER.count(",") == rows[0].count(",")
        assert all(r.count(",") == CSV_HEADER.count(",") for r in rows)
