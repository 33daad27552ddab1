import itertools
import random

import pytest

from concatft.algebra import BitMatrix, BitVector, Pauli, pauli_commutes, pauli_mul, popcount, row_space
from concatft.codes import (
    ContractError,
    CssCode,
    UnsupportedCode,
    build_steane,
    commutes_with_all,
    concatenate,
    distance,
    distance9_witness,
    distance_xz,
    dumps_code,
    loads_code,
    logical_class,
    make_css,
    syndrome,
    validate,
)


def brute_distance(c):
    """Independent check: scan all 2**n supports."""
    in_x = set(row_space(c.hx))
    in_z = set(row_space(c.hz))
    dx = min(popcount(v) for v in range(1, 1 << c.n) if c.hz.mul_vec(v) == 0 and v not in in_x)
    dz = min(popcount(v) for v in range(1, 1 << c.n) if c.hx.mul_vec(v) == 0 and v not in in_z)
    return dx, dz


def test_steane_catalog(steane):
    assert (steane.n, steane.k) == (7, 1)
    assert steane.generator_count == 6
    assert validate(steane) == []
    assert steane.hx.to_strings() == ["1010101", "0110011", "0001111"]
    assert steane.label(distance(steane)) == "[[7,1,3]]"


def test_rm15_catalog(rm15):
    assert (rm15.n, rm15.k) == (15, 1)
    assert rm15.generator_count == 14
    assert (rm15.hx.nrows, rm15.hz.nrows) == (4, 10)
    assert validate(rm15) == []
    assert rm15.label(distance(rm15)) == "[[15,1,3]]"


@pytest.mark.parametrize("name, want", [("steane", (3, 3)), ("rm15", (7, 3))])
def test_distances_match_brute_force(name, want, steane, rm15):
    c = {"steane": steane, "rm15": rm15}[name]
    assert distance_xz(c) == want
    assert brute_distance(c) == want


def test_rm15_logical_x_weights(rm15):
    # the whole logical-X coset, scanned independently of the representative choice
    coset = {v ^ rm15.lx[0].bits for v in row_space(rm15.hx)}
    assert sorted({popcount(v) for v in coset}) == [7, 15]
    assert rm15.lx[0].weight == 7
    assert rm15.lz[0].weight == 3


def test_canonical_logicals(steane, rm15):
    assert steane.lx[0].to_string() == "0010110"
    assert steane.lz[0].to_string() == "0010110"
    assert rm15.lx[0].to_string() == "001011001101001"
    assert rm15.lz[0].to_string() == "000000100011000"


def test_validate_flags_css_violation(steane):
    rows = list(steane.hx.rows)
    rows[0] ^= 1
    bad = CssCode("bad", 7, 1, BitMatrix(tuple(rows), 7), steane.hz, steane.lx, steane.lz)
    problems = validate(bad)
    assert any(p.startswith("css:") for p in problems)


def test_validate_flags_stabilizer_as_logical(steane):
    stab = BitVector(steane.hx.rows[0], 7)
    bad = CssCode("bad", 7, 1, steane.hx, steane.hz, (stab,), steane.lz)
    assert any(p.startswith("logical:") for p in validate(bad))


def test_syndrome_examples(steane, rm15):
    assert syndrome(steane, Pauli.identity(7)).bits == 0
    for j in range(7):
        s = syndrome(steane, Pauli.single(7, j, "X"))
        assert s.bits == j + 1  # Z-check bits spell the column index
    for g in steane.stabilizers() + rm15.stabilizers():
        c = steane if g.n == 7 else rm15
        assert syndrome(c, g).bits == 0
    assert syndrome(rm15, rm15.logical_x()).bits == 0


@pytest.mark.parametrize("name, cases", [("steane", 21), ("rm15", 45)])
def test_weight_one_syndromes_distinct(name, cases, steane, rm15):
    c = {"steane": steane, "rm15": rm15}[name]
    errs = [Pauli.single(c.n, q, a) for q in range(c.n) for a in "XYZ"]
    assert len(errs) == cases
    syns = [syndrome(c, e).bits for e in errs]
    assert all(syns)
    assert len(set(syns)) == len(syns)


def test_syndrome_linear(rm15):
    rng = random.Random(3)
    for _ in range(100):
        a = Pauli(rng.getrandbits(15), rng.getrandbits(15), 15)
        b = Pauli(rng.getrandbits(15), rng.getrandbits(15), 15)
        assert syndrome(rm15, pauli_mul(a, b)).bits == syndrome(rm15, a).bits ^ syndrome(rm15, b).bits


def test_logical_class(steane):
    assert logical_class(steane, Pauli.identity(7)) == (0, 0)
    assert logical_class(steane, steane.logical_x()) == (1, 0)
    assert logical_class(steane, steane.logical_z()) == (0, 1)
    stab = pauli_mul(steane.stabilizers()[0], steane.stabilizers()[4])
    assert logical_class(steane, stab) == (0, 0)
    with pytest.raises(ContractError):
        logical_class(steane, Pauli.single(7, 0, "X"))


def test_repetition_orientation():
    # Z-type checks only: the X checks are empty
    zz = BitMatrix.from_rows(["110", "011"])
    rep = make_css("rep3", BitMatrix.empty(3), zz)
    assert validate(rep) == []
    assert distance_xz(rep) == (3, 1)
    # the transposed orientation: X-type checks only
    flip = make_css("rep3x", zz, BitMatrix.empty(3))
    assert distance_xz(flip) == (1, 3)


def test_concat_layout(layout):
    assert (layout.n, layout.k, layout.block_count) == (105, 1, 7)
    assert layout.qubit(3, 4) == 49
    assert layout.block_of(49) == 3
    assert len(layout.lifted_stabilizers()) == 104
    flat = layout.code
    assert validate(flat) == []
    assert (flat.n, flat.k) == (105, 1)


def test_lifted_stabilizers_commute(layout):
    gens = layout.lifted_stabilizers()
    for a, b in itertools.combinations(gens, 2):
        assert pauli_commutes(a, b) == 0


def test_lifted_outer_weights(layout):
    weights = [g.weight for g in layout.outer_stabilizers()]
    assert len(weights) == 6
    # Z checks lift with the weight-3 inner Z, X checks with the weight-7 inner X
    assert sorted(weights) == [12, 12, 12, 28, 28, 28]


def test_distance9_witness(layout):
    w = distance9_witness(layout)
    assert w.weight == 9
    assert w.x == 0
    assert commutes_with_all(w, layout.lifted_stabilizers())
    assert pauli_commutes(w, layout.logical_x()) == 1
    assert logical_class(layout.code, w) == (0, 1)
    # three blocks, three qubits each
    assert sorted({layout.block_of(q) for q in range(105) if (w.z >> q) & 1}) == [2, 4, 5]


def test_concatenate_requires_k1(steane):
    two = make_css("two", BitMatrix.empty(2), BitMatrix.empty(2))
    assert two.k == 2
    with pytest.raises(UnsupportedCode):
        concatenate(steane, two)


@pytest.mark.parametrize("builder", ["steane", "rm15"])
def test_text_roundtrip(builder, steane, rm15):
    c = {"steane": steane, "rm15": rm15}[builder]
    text = dumps_code(c)
    assert text.splitlines()[0] == f"{c.n} 1"
    back = loads_code(text, c.name)
    assert back == c


def test_loads_rejects_garbage():
    with pytest.raises(ValueError):
        loads_code("seven one\n")
    with pytest.raises(ValueError):
        loads_code("3 1\n111\n")
