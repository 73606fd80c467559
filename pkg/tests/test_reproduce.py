from fractions import Fraction

import pytest

from distinguish.reproduce import Cell, _status, load_reference, table1, table2


def test_reference_file_is_consistent():
    ref = load_reference()
    assert {e["N"] for e in ref["success"]} == set(range(2, 9))
    for e in ref["success"]:
        Fraction(e["value"])
        assert e["network"] in {"qft", "constant_depth"}
    assert {e["N"] for e in ref["ambiguous"]} == {2, 3, 4, 5}


def test_status_logic():
    assert _status(0.5, Fraction(1, 2), 1e-9, None) == ("PASS", "")
    assert _status(0.4, Fraction(1, 2), 1e-9, None)[0] == "FAIL"
    assert _status(0.4, Fraction(1, 2), 1e-9, 0.4)[0] == "WARN"
    assert _status(0.5, Fraction(1, 2), 1e-9, 0.4)[0] == "WARN"


def test_table1_small():
    cells = table1(range(2, 5))
    assert cells and all(c.status == "PASS" for c in cells), [c.line() for c in cells if c.status != "PASS"]


def test_table1_n5_warns_not_fails():
    cells = table1([5])
    assert not [c for c in cells if c.status == "FAIL"]
    warned = {(c.network, c.column) for c in cells if c.status == "WARN"}
    assert warned == {("constant_depth", "best"), ("constant_depth", "avg")}


@pytest.mark.slow
def test_table1_large():
    cells = table1(range(6, 9))
    assert all(c.status == "PASS" for c in cells), [c.line() for c in cells if c.status != "PASS"]


def test_table2():
    checks = table2(range(2, 6))
    assert len(checks) == 8
    assert all(c.status == "PASS" for c in checks), [c.line() for c in checks]


def test_cell_line():
    line = Cell(1, 3, "qft", "d", "value", 2 / 3, Fraction(2, 3), "PASS").line()
    assert line.startswith("PASS table1 N=3") and "2/3" in line
