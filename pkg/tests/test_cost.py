import csv
import io
import math
from fractions import Fraction as F

import pytest

from bqdsynth import cost
from bqdsynth.cost import CostMethod, CostQuery
from bqdsynth.errors import RangeError, UnsupportedError
from reference_tables import (
    BOLD_LEVELS,
    BQD_CNOTS,
    CNOT_TABLE,
    CSD_IMPROVED_CNOTS,
    CSD_ORIGINAL_CNOTS,
    ONE_QUBIT_TABLE,
    QSD_CITED_CNOTS,
    TOTAL_TABLE,
)


def cells(table):
    for l, row in table.items():
        if l == "qsd":
            continue
        for n, v in row.items():
            yield n, l, v


@pytest.mark.parametrize("n,l,v", list(cells(CNOT_TABLE)))
def test_cnot_cells(n, l, v):
    assert cost.cnot_count_bqd(n, l) == v


@pytest.mark.parametrize("n,l,v", list(cells(ONE_QUBIT_TABLE)))
def test_one_qubit_cells(n, l, v):
    assert cost.onequbit_count_bqd(n, l) == v


@pytest.mark.parametrize("n", range(2, 13))
def test_recursion_agrees_with_closed_form(n):
    for l in range(2, n + 1):
        assert cost.recursive_counts_bqd(n, l) == (cost.cnot_count_bqd(n, l), cost.onequbit_count_bqd(n, l))


@pytest.mark.parametrize("n", range(4, 13))
def test_level_free_closed_form(n):
    k = math.ceil(2 * n / 3)
    assert cost.closed_form_counts(n) == (cost.cnot_count_bqd(n, k), cost.onequbit_count_bqd(n, k))


def test_basic_block_counts():
    assert cost.basic_block_counts(2) == (3, 6)
    assert cost.basic_block_counts(3) == (21, 28)
    assert cost.basic_block_counts(4) == (105, 120)


def test_bold_levels_are_cnot_optimal():
    for n, bold in BOLD_LEVELS.items():
        assert cost.best_level(n) == bold[0] == math.ceil(2 * n / 3)
        best = min(CNOT_TABLE[l][n] for l in range(3, n + 1))
        assert all(CNOT_TABLE[l][n] == best for l in bold)


def test_comparison_rows():
    for n in range(2, 11):
        assert cost.comparison_counts(CostQuery(n, CostMethod.CSD_ORIGINAL)) == CSD_ORIGINAL_CNOTS[n]
        assert cost.comparison_counts(CostQuery(n, CostMethod.CSD_IMPROVED)) == CSD_IMPROVED_CNOTS[n]
        assert cost.comparison_counts(CostQuery(n, CostMethod.QSD_CITED)) == QSD_CITED_CNOTS[n]
    for n, v in BQD_CNOTS.items():
        assert cost.comparison_counts(CostQuery(n, CostMethod.BQD, math.ceil(2 * n / 3))) == v
    assert cost.comparison_counts(CostQuery(5, CostMethod.LOWER_BOUND)) == 252
    assert cost.comparison_counts(CostQuery(3, CostMethod.QSD_CONSTRUCTED)) == 23


def test_comparison_errors():
    with pytest.raises(UnsupportedError):
        cost.comparison_onequbit_counts(CostQuery(4, CostMethod.CSD_ORIGINAL))
    with pytest.raises(UnsupportedError):
        cost.comparison_onequbit_counts(CostQuery(4, CostMethod.LOWER_BOUND))
    with pytest.raises(UnsupportedError):
        cost.asymptotic_only("knill")
    with pytest.raises(RangeError):
        CostQuery(4, CostMethod.BQD)
    with pytest.raises(RangeError):
        CostQuery(4, CostMethod.QSD_CITED, 3)
    with pytest.raises(RangeError):
        cost.cnot_count_bqd(4, 5)


def test_tables_csv():
    t = cost.generate_tables()
    rows = list(csv.DictReader(io.StringIO(t[3])))
    seen = 0
    for r in rows:
        n = int(r["n"])
        key = "qsd" if r["l"] == "qsd" else int(r["l"])
        assert int(r["cnot"]) == CNOT_TABLE[key][n]
        assert int(r["one_qubit"]) == ONE_QUBIT_TABLE[key][n]
        assert int(r["total"]) == TOTAL_TABLE[key][n]
        seen += 1
    assert seen == sum(len(v) for v in TOTAL_TABLE.values())
    assert t[1] == t[2] == t[3]


def test_improvement_percentages_frozen():
    # positive = BQD saves; values pinned from exact fractions
    p = cost.improvement_percentages()
    assert p["cnot"] == pytest.approx(-4.363449, abs=1e-5)
    assert p["one_qubit"] == pytest.approx(28.824750, abs=1e-5)
    assert p["total"] == pytest.approx(15.435969, abs=1e-5)
    m = cost.improvement_percentages(pooled=False)
    assert m["cnot"] == pytest.approx(-5.895173, abs=1e-5)
    assert m["one_qubit"] == pytest.approx(24.451436, abs=1e-5)
    assert m["total"] == pytest.approx(12.292912, abs=1e-5)


# -- LNN, recomputed in sixths with plain integers -------------------------------

def block_sixths(l, s):
    return 5 * 2**l + 12 * l - 36 * s - (2 if l % 2 == 0 else 10)


def mux_sixths(n):
    even = n % 2 == 0
    return 5 * 2**n + 12 * n - (38 if even else 46), 5 * 2**n + 18 * n - (44 if even else 46)


def delta_sixths(l):
    tail = 35 * l - 82 if l % 2 == 0 else 37 * l - 84
    return 10 * 2**l + 9 * l * l - tail


@pytest.mark.parametrize("l", range(2, 13))
def test_lnn_block_cost(l):
    for s in range(1, math.ceil(l / 2) + 1):
        assert cost.lnn_block_cost(l, s) == F(block_sixths(l, s), 6)
    with pytest.raises(RangeError):
        cost.lnn_block_cost(l, math.ceil(l / 2) + 1)
    with pytest.raises(RangeError):
        cost.lnn_block_cost(l, 0)


@pytest.mark.parametrize("n", range(2, 13))
def test_lnn_mux_costs(n):
    cb, cr = cost.lnn_mux_costs(n)
    eb, er = mux_sixths(n)
    assert (cb, cr) == (F(eb, 6), F(er, 6))


@pytest.mark.parametrize("n", range(4, 10))
def test_lnn_cross_identity(n):
    assert cost.lnn_mux_costs(n)[0] == cost.lnn_block_cost(n, 1)


def test_lnn_examples():
    assert cost.lnn_block_cost(4, 1) == 15
    assert cost.lnn_block_cost(5, 1) == 29
    assert cost.lnn_block_cost(4, 2) == 9
    assert cost.lnn_mux_costs(4) == (15, 18)
    assert cost.lnn_mux_costs(5)[0] == 29
    assert cost.lnn_diagonal_cost(4) == 41
    assert cost.lnn_diagonal_cost(5) == 74


@pytest.mark.parametrize("l", range(2, 17))
def test_lnn_diagonal_cost(l):
    assert cost.lnn_diagonal_cost(l) == F(delta_sixths(l), 6)


def test_lnn_diagonal_growth():
    r = [cost.lnn_diagonal_cost(l) / 2**l for l in range(8, 17)]
    assert all(a > b for a, b in zip(r, r[1:]))
    assert abs(r[-1] - F(5, 3)) < F(1, 100)


def test_lnn_report_aggregation():
    rep = cost.lnn_inflation_report(6, 4)
    # blocks: 15 per s=1 target, 9 per s=2 target; targets by ruler(i) on 4 wires
    per_block = sum(15 if cost.target_depth(4 - (i & -i).bit_length() + 1, 4) == 1 else 9 for i in range(1, 16))
    expected = 4**2 * per_block
    for i in (5, 6):
        cb, cr = cost.lnn_mux_costs(i)
        expected += 4 ** (6 - i) * (2 * cr + cb)
    expected += cost.lnn_diagonal_cost(4)
    assert rep.lnn_cnots == expected
    assert rep.cnots == 1976
    assert rep.ratio == expected / 1976


def test_lnn_table_rows():
    text = cost.lnn_table()
    for row in ("block,l=4;s=1,15", "mux_u2,n=4,15", "mux_rz,n=4,18", "delta,l=4,41", "delta,l=5,74"):
        assert row in text.splitlines()
