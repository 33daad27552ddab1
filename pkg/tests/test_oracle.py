import itertools

import numpy as np
import pytest

from concatft.algebra import Pauli, row_space
from concatft.circuit import CircuitBuilder, Gate, conjugate_pauli
from concatft.codes import BudgetExceeded, build_steane
from concatft.oracle import (
    CNOT,
    GATE_MATRICES,
    StateVector,
    UnsupportedCircuit,
    apply_circuit,
    apply_pauli,
    circuit_unitary,
    encode_logical,
    equal_up_to_phase,
    logical_action,
    logical_target,
    pauli_matrix,
    transversal_circuit,
)

rng = np.random.default_rng(11)


def random_state(n):
    a = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, a / np.linalg.norm(a))


def test_steane_zero_state(steane):
    s = encode_logical(steane, 1, 0)
    nz = np.abs(s.amps) > 1e-12
    assert nz.sum() == 8
    assert np.allclose(np.abs(s.amps[nz]), 1 / np.sqrt(8))


@pytest.mark.parametrize("amp0, amp1", [(1, 0), (0, 1), (1 / np.sqrt(2), 1j / np.sqrt(2)), (0.6, 0.8)])
def test_encoded_states_are_stabilized(amp0, amp1, steane, rm15):
    for c in (steane, rm15):
        s = encode_logical(c, amp0, amp1)
        assert abs(s.norm() - 1) < 1e-10
        for g in c.stabilizers():
            assert np.allclose(apply_pauli(s, g).amps, s.amps)


def test_unnormalised_amplitudes_rejected(steane):
    with pytest.raises(ValueError):
        encode_logical(steane, 1, 1)


def test_dense_ceiling():
    with pytest.raises(BudgetExceeded):
        StateVector(17, np.zeros(1 << 17, dtype=complex))


def test_empty_circuit_is_identity():
    s = random_state(3)
    assert np.allclose(apply_circuit(s, CircuitBuilder(3).build()).amps, s.amps)


def test_h_twice():
    s = random_state(4)
    c = CircuitBuilder(4).gate("H", 2).gate("H", 2).build()
    assert np.allclose(apply_circuit(s, c).amps, s.amps, atol=1e-10)


def test_t_eight_times():
    b = CircuitBuilder(1)
    for _ in range(8):
        b.gate("T", 0)
    assert equal_up_to_phase(circuit_unitary(b.build()), np.eye(2))


def test_measurement_refused():
    b = CircuitBuilder(2)
    b.measure(Pauli.from_string("ZZ"))
    with pytest.raises(UnsupportedCircuit):
        apply_circuit(StateVector.basis(2), b.build())


def test_qubit_zero_is_most_significant():
    c = CircuitBuilder(3).gate("X", 0).build()
    out = apply_circuit(StateVector.basis(3), c)
    assert out.amps[0b100] == 1


def test_cnot_unitary():
    c = CircuitBuilder(2).gate("CNOT", 0, 1).build()
    assert np.allclose(circuit_unitary(c), CNOT)


@pytest.mark.parametrize("gate", ["X", "Y", "Z", "H", "S", "Sdg"])
@pytest.mark.parametrize("letter", "XYZ")
def test_single_qubit_conjugation(gate, letter):
    p = Pauli.from_string(letter)
    (img,) = conjugate_pauli(Gate(gate, (0,)), p)
    u = GATE_MATRICES[gate]
    assert np.allclose(u @ pauli_matrix(p) @ u.conj().T, pauli_matrix(img))


@pytest.mark.parametrize("a, b", [(a, b) for a, b in itertools.product("IXYZ", repeat=2) if a + b != "II"])
def test_cnot_conjugation(a, b):
    p = Pauli.from_string(a + b)
    (img,) = conjugate_pauli(Gate("CNOT", (0, 1)), p)
    assert np.allclose(CNOT @ pauli_matrix(p) @ CNOT, pauli_matrix(img))


@pytest.mark.parametrize("gate", ["T", "Tdg"])
def test_t_branch_set_spans_conjugate(gate):
    u = GATE_MATRICES[gate]
    conj = u @ pauli_matrix(Pauli.from_string("X")) @ u.conj().T
    branches = conjugate_pauli(Gate(gate, (0,)), Pauli.from_string("X"))
    assert [b.to_string(signed=False) for b in branches] == ["X", "Y"]
    # T X T^dagger lies in the span of the branch operators
    basis = np.array([pauli_matrix(b).ravel() for b in branches]).T
    coef, *_ = np.linalg.lstsq(basis, conj.ravel(), rcond=None)
    assert np.allclose(basis @ coef, conj.ravel())


def test_conjugation_on_random_states():
    # (gate, P, gate^dagger) applied to random states equals the conjugated Pauli
    for kind, qubits in [("H", (1,)), ("S", (0,)), ("CNOT", (2, 0)), ("Sdg", (2,))]:
        g = Gate(kind, qubits)
        for p in (Pauli.from_string(s) for s in ("XIY", "ZZI", "YXZ", "IIX")):
            (img,) = conjugate_pauli(g, p)
            u = circuit_unitary(CircuitBuilder(3).gate(kind, *qubits).build())
            s = random_state(3)
            lhs = u @ (pauli_matrix(p) @ (u.conj().T @ s.amps))
            assert np.allclose(lhs, apply_pauli(s, img).amps)


@pytest.mark.parametrize(
    "code, gate, target",
    [("steane", "H", "H"), ("steane", "X", "X"), ("steane", "S", "Sdg"), ("rm15", "Z", "Z"), ("rm15", "Tdg", "T")],
)
def test_transversal_logical_actions(code, gate, target, steane, rm15):
    c = {"steane": steane, "rm15": rm15}[code]
    assert logical_action(c, transversal_circuit(c, gate)).matches(logical_target(target))


def test_rm15_h_leaves_codespace(rm15):
    act = logical_action(rm15, transversal_circuit(rm15, "H"))
    assert not act.preserved
    assert act.residual > 1e-8


@pytest.mark.parametrize("code", ["steane", "rm15"])
def test_two_block_cnot(code, steane, rm15):
    c = {"steane": steane, "rm15": rm15}[code]
    assert logical_action(c, transversal_circuit(c, "CNOT"), blocks=2).matches(CNOT)


def test_logical_action_width_mismatch(steane):
    with pytest.raises(ValueError):
        logical_action(steane, CircuitBuilder(5).build())


def test_equal_up_to_phase():
    assert equal_up_to_phase(np.eye(2) * 1j, np.eye(2))
    assert not equal_up_to_phase(np.diag([1, 1j]), np.diag([1, -1j]))
