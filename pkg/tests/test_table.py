from dataclasses import replace
from math import comb

import mpmath
import pytest

from qsystem.dynkin import Weight, build_dynkin
from qsystem.io import (qtable_from_json, qtable_to_csv, qtable_to_json,
                        qtable_to_text)
from qsystem.qdim import QDimValue, qdim_affine
from qsystem.table import (build_qtable, forced_tail_report, kr_decompose,
                           kr_term_count, midpoint_checks,
                           rebuild_from_first_row, verify_kns, verify_qsystem)


@pytest.fixture(scope="module")
def d5():
    return build_dynkin("D", 5)


@pytest.fixture(scope="module")
def d5_table(d5):
    return build_qtable(d5, 4)


# --- decomposition -----------------------------------------------------------

def test_decompose_tips_and_a_family():
    d5 = build_dynkin("D", 5)
    for a in (4, 5):
        dec = kr_decompose(a, 3, d5)
        assert dec.terms == (Weight(tuple(3 * (i == a - 1) for i in range(5))),)
    a3 = build_dynkin("A", 3)
    for a in (1, 2, 3):
        assert len(kr_decompose(a, 5, a3).terms) == 1


def test_decompose_even_node(d5):
    dec = kr_decompose(2, 1, d5)
    assert dec.terms == (Weight((0, 1, 0, 0, 0)), Weight((0, 0, 0, 0, 0)))


def test_decompose_odd_node_order(d5):
    # lexicographically descending in (k_3, k_1)
    dec = kr_decompose(3, 2, d5)
    assert dec.terms == (
        Weight((0, 0, 2, 0, 0)),
        Weight((1, 0, 1, 0, 0)),
        Weight((2, 0, 0, 0, 0)),
    )


def test_decompose_m_zero(d5):
    for a in range(1, 6):
        dec = kr_decompose(a, 0, d5)
        assert dec.terms == (Weight((0,) * 5),)


@pytest.mark.parametrize("rank", [4, 6, 8])
def test_term_count_stars_and_bars(rank):
    d = build_dynkin("D", rank)
    for a in range(1, rank + 1):
        for m in range(0, 7):
            n = len(kr_decompose(a, m, d).terms)
            assert n == kr_term_count(a, m, d)
            if a <= rank - 2:
                assert n == comb(m + a // 2, a // 2)
            else:
                assert n == 1


def test_decompose_bad_node(d5):
    with pytest.raises(ValueError):
        kr_decompose(0, 1, d5)
    with pytest.raises(ValueError):
        kr_decompose(6, 1, d5)
    with pytest.raises(ValueError):
        kr_decompose(1, -1, d5)


# --- the D5 level-4 reference table ------------------------------------------

def test_provenance_levels(d5, d5_table):
    for (a, m), summands in d5_table.provenance.items():
        assert len(summands) == kr_term_count(a, m, d5)
        for aw in summands:
            assert sum(x * y for x, y in zip(d5.marks, aw.coords)) == 4
    # negative zeroth coordinates occur and are kept
    assert any(aw.coords[0] < 0
               for summands in d5_table.provenance.values() for aw in summands)


def test_cells_equal_provenance_sums(d5, d5_table):
    from qsystem.qdim import precision_bits
    with mpmath.workprec(precision_bits()):
        tol = mpmath.mpf(10) ** -25
        for (a, m), summands in d5_table.provenance.items():
            direct = sum((qdim_affine(w, d5).numeric for w in summands), mpmath.mpf(0))
            assert abs(direct - d5_table.value(a, m)) < tol * (1 + abs(direct))


def test_zero_window_certified(d5_table):
    for a in range(1, 6):
        for m in range(5, 12):
            cell = d5_table.cell(a, m)
            assert cell.exact == 0 and cell.numeric == 0
            assert d5_table.reduced[(a, m)] == ()


def test_boundary_rows_are_unit(d5_table):
    for a in range(1, 6):
        assert d5_table.cell(a, 0).exact == 1
        assert d5_table.cell(a, 4).exact == 1
        assert d5_table.cell(a, 12).exact == 1


def test_row_twelve_equals_row_four(d5_table):
    for a in range(1, 6):
        assert d5_table.value(a, 12) == d5_table.value(a, 4)
    # node 1 revisits the single dominant representative 4*omega_1-hat
    assert [(w.coords, s) for w, s in d5_table.reduced[(1, 12)]] == \
        [((0, 4, 0, 0, 0, 0), 1)]


EXPECTED_REDUCED = {
    (2, 0): {(4, 0, 0, 0, 0, 0)},
    (2, 1): {(4, 0, 0, 0, 0, 0), (2, 0, 1, 0, 0, 0)},
    (2, 2): {(4, 0, 0, 0, 0, 0), (0, 0, 2, 0, 0, 0), (2, 0, 1, 0, 0, 0)},
    (2, 3): {(4, 0, 0, 0, 0, 0), (2, 0, 1, 0, 0, 0)},
    (2, 4): {(4, 0, 0, 0, 0, 0)},
    (3, 0): {(4, 0, 0, 0, 0, 0)},
    (3, 1): {(3, 1, 0, 0, 0, 0), (2, 0, 0, 1, 0, 0)},
    (3, 2): {(2, 2, 0, 0, 0, 0), (0, 0, 0, 2, 0, 0), (1, 1, 0, 1, 0, 0)},
    (3, 3): {(1, 3, 0, 0, 0, 0), (0, 2, 0, 1, 0, 0)},
    (3, 4): {(0, 4, 0, 0, 0, 0)},
}


def test_reduced_terms_match_reference(d5_table):
    for key, expected in EXPECTED_REDUCED.items():
        got = d5_table.reduced[key]
        assert {w.coords for w, _ in got} == expected, key
        assert all(mult == 1 for _, mult in got)


def test_symmetry_of_reference_table(d5_table):
    for a in range(1, 6):
        for m in (1, 2, 3):
            assert abs(d5_table.value(a, m) - d5_table.value(a, 4 - m)) < 1e-9


# --- verification suites ------------------------------------------------------

@pytest.mark.parametrize("family,rank,k", [("D", 4, 3), ("A", 2, 2), ("A", 3, 4)])
def test_qsystem_residuals(family, rank, k):
    d = build_dynkin(family, rank)
    table = build_qtable(d, k)
    report = verify_qsystem(table, d)
    assert report.passed
    assert report.max_residual < 1e-9


def test_qsystem_detects_perturbation():
    d4 = build_dynkin("D", 4)
    table = build_qtable(d4, 3)
    broken = dict(table.cells)
    target = (2, 4)
    bad = broken[target].numeric + mpmath.mpf("1e-3")
    broken[target] = QDimValue(exact=None, numeric=bad)
    report = verify_qsystem(replace(table, cells=broken), d4)
    assert not report.passed
    # residuals localise at equations touching the perturbed cell
    touched = {(a, m) for (a, m), res in report.residuals.items() if res > 1e-6}
    assert touched
    for a, m in touched:
        assert abs(m - target[1]) <= 1 and (a == target[0] or abs(m - target[1]) == 0)


def test_kns_passes_d5(d5_table):
    report = verify_kns(d5_table)
    assert report.passed
    assert [c.name for c in report.checks] == [
        "positivity", "symmetry", "unit_boundary", "unimodality",
        "zero_window", "top_row"]


def test_kns_d6_k3_fork_sign():
    d6 = build_dynkin("D", 6)
    table = build_qtable(d6, 3)
    assert verify_kns(table).passed
    assert table.cell(5, 3 + d6.coxeter).exact == -1
    assert table.cell(6, 3 + d6.coxeter).exact == -1


def test_kns_level_one_degenerate():
    d4 = build_dynkin("D", 4)
    report = verify_kns(build_qtable(d4, 1))
    assert report.passed  # symmetry and unimodality ranges are empty


def test_kns_a_family_skips_top_row():
    a2 = build_dynkin("A", 2)
    report = verify_kns(build_qtable(a2, 2))
    assert report.passed
    assert not report.check("top_row").applicable


def test_kns_detects_broken_positivity(d5, d5_table):
    broken = dict(d5_table.cells)
    broken[(2, 1)] = QDimValue(exact=None, numeric=-broken[(2, 1)].numeric)
    report = verify_kns(replace(d5_table, cells=broken))
    assert not report.passed
    assert not report.check("positivity").passed


# --- midpoint equalities -------------------------------------------------------

def test_midpoint_odd_level():
    d5 = build_dynkin("D", 5)
    table = build_qtable(d5, 3, m_max=3)
    assert abs(table.value(2, 1) - table.value(2, 2)) < 1e-12
    assert midpoint_checks(table).passed


def test_midpoint_even_level(d5_table):
    assert abs(d5_table.value(3, 1) - d5_table.value(3, 3)) < 1e-12
    assert midpoint_checks(d5_table).passed


def test_midpoint_boundary_cells():
    d4 = build_dynkin("D", 4)
    table = build_qtable(d4, 2, m_max=2)
    assert table.value(2, 0) == 1 and table.value(2, 2) == 1
    assert midpoint_checks(table).passed


# --- recursion closure ----------------------------------------------------------

def test_rebuild_from_first_row():
    for family, rank, k in [("D", 4, 3), ("D", 5, 4), ("A", 3, 5)]:
        d = build_dynkin(family, rank)
        table = build_qtable(d, k, m_max=k)
        regrown = rebuild_from_first_row(table, d)
        for a in range(1, rank + 1):
            for m in range(k + 1):
                rel = abs(regrown[(a, m)] - table.value(a, m)) / table.value(a, m)
                assert rel < 1e-8


def test_forced_tail(d5_table):
    report = forced_tail_report(d5_table)
    assert report.applicable and report.passed
    assert report.zero_mismatches == ()
    assert report.top_row_mismatches == ()
    assert report.fork_consistent


def test_forced_tail_not_applicable_for_a():
    a2 = build_dynkin("A", 2)
    report = forced_tail_report(build_qtable(a2, 2))
    assert not report.applicable and report.passed


# --- serialization ---------------------------------------------------------------

def test_json_round_trip(d5_table):
    back = qtable_from_json(qtable_to_json(d5_table))
    assert back == d5_table  # reduced is excluded from equality


def test_csv_shape(d5_table):
    lines = qtable_to_csv(d5_table).strip().splitlines()
    assert lines[0] == "a,m,value,exact_tag"
    assert len(lines) == 1 + 5 * 13
    assert any(",0" == line[-2:] for line in lines[1:])


def test_text_layout(d5_table):
    text = qtable_to_text(d5_table)
    rows = text.strip().splitlines()
    assert "a=1" in rows[1] and "a=5" in rows[1]
    assert len(rows) == 3 + 13
