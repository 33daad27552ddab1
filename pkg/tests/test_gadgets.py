import pytest

from concatft.algebra import Pauli
from concatft.circuit import FaultEvent, Location, propagate
from concatft.codes import build_rm15, build_steane, concatenate
from concatft.gadgets import (
    INNER_ONLY,
    INNER_THEN_OUTER,
    UnsupportedLayout,
    build_exrec,
    build_identity_gadget,
    build_inner_ec,
    build_logical_CNOT_gadget,
    build_logical_H_gadget,
    build_logical_S_gadget,
    build_logical_T_gadget,
    build_outer_ec,
    fig2_blocks,
    is_block_transversal,
    is_globally_transversal,
    literal_fig2_blocks,
    logical_S_candidates,
    max_observable_weight,
)
from concatft.oracle import CNOT, logical_action, logical_target
from concatft.decode import residual_logical_action


def test_t_gadget_shape(layout):
    g = build_logical_T_gadget(layout)
    kinds = [s.kind for s in g.circuit.steps]
    assert kinds.count("CNOT") == 60
    assert kinds.count("Tdg") == 15
    assert g.ec_schedule == INNER_ONLY
    assert [op.kind for op in g.block_ops] == ["CNOT", "CNOT", "T", "CNOT", "CNOT"]
    assert is_block_transversal(g)


def test_fig2_wiring(layout, steane):
    assert fig2_blocks(steane) == (0, 5, 6)
    assert literal_fig2_blocks() == (0, 1, 6)


def test_bare_t_reduction(layout, steane):
    bare = build_logical_T_gadget(layout).bare_circuit()
    assert bare.n == 7
    assert logical_action(steane, bare).matches(logical_target("T"))


def test_literal_figure_labels_fail_the_oracle(layout, steane):
    bare = build_logical_T_gadget(layout, literal_fig2_blocks()).bare_circuit()
    assert not logical_action(steane, bare).preserved


def test_t_gadget_rejects_swapped_layout(steane, rm15):
    with pytest.raises(UnsupportedLayout):
        build_logical_T_gadget(concatenate(rm15, steane))


def test_h_gadget(layout):
    g = build_logical_H_gadget(layout)
    assert len(g.block_ops) == 7
    assert all(not op.transversal for op in g.block_ops)
    assert g.circuit is None
    assert g.fault_model == "block"
    assert g.ec_schedule == INNER_THEN_OUTER
    assert not is_block_transversal(g)


def test_cnot_gadget(layout, steane):
    g = build_logical_CNOT_gadget(layout)
    assert g.n == 210
    assert len(g.circuit) == 105
    assert is_block_transversal(g)
    assert logical_action(steane, g.bare_circuit(), blocks=2).matches(CNOT)


def test_cnot_spreads_one_per_register(layout):
    g = build_logical_CNOT_gadget(layout)
    q = layout.qubit(3, 8)
    f = FaultEvent(Location("input", q, (q,)), Pauli.single(210, q, "X"))
    (br,) = propagate(g.circuit, f)
    assert br.residual.weight == 2
    assert br.residual.x == (1 << q) | (1 << (105 + q))


def test_s_gadget(layout, steane):
    g = build_logical_S_gadget(layout)
    assert set(s.kind for s in g.circuit.steps) == {"S"}
    assert len(g.circuit) == 105
    assert is_block_transversal(g)
    assert logical_action(steane, g.bare_circuit()).matches(logical_target("S"))
    # diagonal: Z-type errors pass straight through
    z = Pauli(0, 0b1011 << 20, 105)
    assert [b.residual for b in propagate(g.circuit, FaultEvent(Location("input", 20, (20,)), z))] == [z]


def test_s_candidates(layout):
    cands = logical_S_candidates(layout)
    assert set(cands) == {"S", "Sdg"}
    assert cands["S"].exponents == (2,) * 15


def test_inner_ec_slice(layout):
    ec = build_inner_ec(layout, 2)
    kinds = [s.kind for s in ec.circuit.steps]
    assert kinds == ["MeasurePauli"] * 14 + ["CorrectPauli"]
    assert ec.circuit.steps[-1].qubits == tuple(range(30, 45))
    assert is_globally_transversal(ec)


@pytest.mark.parametrize("q", range(15))
def test_inner_ec_fixes_single_x(layout, q):
    ec = build_inner_ec(layout, 0)
    f = FaultEvent(Location("input", q, (q,)), Pauli.single(105, q, "X"))
    (br,) = propagate(ec.circuit, f)
    assert br.residual.is_identity


def test_inner_ec_outcome_flip_is_cancelled(layout):
    ec = build_inner_ec(layout, 1)
    for bit in range(14):
        (br,) = propagate(ec.circuit, FaultEvent(Location("flip", bit)))
        assert not br.residual.is_identity
        assert residual_logical_action(layout, [br.residual]).passed


def test_outer_ec_slice(layout, rm15):
    ec = build_outer_ec(layout)
    kinds = [s.kind for s in ec.circuit.steps]
    assert kinds == ["MeasurePauli"] * 6 + ["CorrectPauli"]
    assert is_globally_transversal(ec)
    assert max_observable_weight(ec) == 28
    assert all(not br.flips for br in propagate(ec.circuit))
    lx = rm15.logical_x().embed(layout.block_qubits(4), 105)
    (br,) = propagate(ec.circuit, FaultEvent(Location("input", 60, (60,)), lx))
    assert br.residual.is_identity


def test_gadget_gates_are_not_ec(layout):
    assert not is_globally_transversal(build_logical_T_gadget(layout))


@pytest.mark.parametrize(
    "name, n_ec, steps",
    [("T", 7, 75), ("H", 8, 0), ("CNOT", 14, 105), ("S", 7, 105), ("EC", 7, 0)],
)
def test_exrec_composition(name, n_ec, steps, exrecs):
    e = exrecs[name]
    assert len(e.ec) == n_ec
    assert e.gadget_steps == steps
    assert len(e.circuit) == steps + sum(len(ec.circuit) for ec in e.ec)


def test_exrec_header(exrecs):
    head = exrecs["H"].to_text().splitlines()[:3]
    assert head == ["# exrec H", "# ec_schedule inner+outer", "# ideal_round inner+outer"]
    assert exrecs["T"].gadget.to_text().startswith("# gadget T\n# ec_schedule inner\nCNOT 0 75\n")


def test_identity_gadget(layout):
    g = build_identity_gadget(layout)
    assert len(g.circuit) == 0
    assert g.bare_circuit().steps == ()
