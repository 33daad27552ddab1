import random

import pytest

from concatft.algebra import BitMatrix
from concatft.codes import make_css
from concatft.oracle import logical_action, logical_target, transversal_circuit
from concatft.transversal import (
    DiagonalPattern,
    LogicalDiagonalAction,
    check_cnot_transversal,
    check_diagonal_transversal,
    check_h_transversal,
    check_pauli_transversal,
    compose_diagonal,
    find_uniform_pattern,
)


def code(name, steane, rm15):
    return {"steane": steane, "rm15": rm15}[name]


@pytest.mark.parametrize(
    "name, k, gate",
    [
        ("steane", -2, "S"),
        ("steane", 2, "Sdg"),
        ("steane", 4, "Z"),
        ("steane", 0, "I"),
        ("rm15", -1, "T"),
        ("rm15", 1, "Tdg"),
        ("rm15", -2, "S"),
        ("rm15", 2, "Sdg"),
        ("rm15", 0, "I"),
    ],
)
def test_uniform_diagonal_actions(name, k, gate, steane, rm15):
    c = code(name, steane, rm15)
    act = check_diagonal_transversal(c, DiagonalPattern.uniform(c.n, k))
    assert act is not None and act.name == gate


@pytest.mark.parametrize("k", [1, -1, 3, -3])
def test_steane_has_no_uniform_t(k, steane):
    assert check_diagonal_transversal(steane, DiagonalPattern.uniform(7, k)) is None


def test_find_uniform_pattern(steane, rm15):
    assert find_uniform_pattern(rm15, "T").exponents == (-1,) * 15
    assert find_uniform_pattern(steane, "S").exponents == (-2,) * 7
    assert find_uniform_pattern(steane, "T") is None


def test_pattern_phases_add(rm15):
    rng = random.Random(7)
    for _ in range(30):
        a = DiagonalPattern(tuple(rng.randrange(8) for _ in range(15)))
        b = DiagonalPattern(tuple(rng.randrange(8) for _ in range(15)))
        ra = check_diagonal_transversal(rm15, a)
        rb = check_diagonal_transversal(rm15, b)
        rab = check_diagonal_transversal(rm15, a + b)
        if ra is not None and rb is not None:
            assert rab is not None
            assert rab.relative == (ra.relative + rb.relative) % 16


@pytest.mark.parametrize("k", [-2, -1, 1, 2, 3])
def test_diagonal_agrees_with_oracle(k, rm15):
    pat = DiagonalPattern.uniform(15, k)
    act = check_diagonal_transversal(rm15, pat)
    orc = logical_action(rm15, transversal_circuit(rm15, "T", pat.exponents))
    assert orc.preserved == (act is not None)
    if act is not None:
        assert orc.matches(act.matrix())


def test_composition_gives_global_s(steane, rm15):
    acts = {k: compose_diagonal(steane, rm15, DiagonalPattern.uniform(15, k)) for k in (2, -2)}
    assert acts[2].name == "S"
    assert acts[-2].name == "Sdg"


def test_logical_action_names():
    assert LogicalDiagonalAction(14, 0).name == "T"
    assert LogicalDiagonalAction(3, 3).name == "I"


@pytest.mark.parametrize("name, want", [("steane", True), ("rm15", False)])
def test_h_transversal(name, want, steane, rm15):
    assert check_h_transversal(code(name, steane, rm15)) is want


@pytest.mark.parametrize("name", ["steane", "rm15"])
def test_cnot_transversal(name, steane, rm15):
    assert check_cnot_transversal(code(name, steane, rm15))


@pytest.mark.parametrize("name", ["steane", "rm15"])
@pytest.mark.parametrize("letter", "XYZ")
def test_pauli_transversal(name, letter, steane, rm15):
    assert check_pauli_transversal(code(name, steane, rm15), letter)


def test_cnot_on_repetition_code():
    rep = make_css("rep3", BitMatrix.empty(3), BitMatrix.from_rows(["110", "011"]))
    assert check_cnot_transversal(rep)


def test_h_rejected_when_rowspaces_differ():
    rep = make_css("rep3", BitMatrix.empty(3), BitMatrix.from_rows(["110", "011"]))
    assert not check_h_transversal(rep)
