"""Statevector ground truth for logical actions of small circuits.

Dense amplitudes index qubit 0 as the most significant bit, so the index of
a computational basis state ``v`` (bit j = qubit j) is ``lex_key(v, n)``.
Wider circuits whose states stay sparse (e.g. two RM15 blocks) use a
dictionary backend with a term ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import Pauli, lex_key, row_space
from .circuit import Circuit, Gate
from .codes import BudgetExceeded, CssCode

MAX_DENSE_QUBITS = 16
MAX_SPARSE_TERMS = 1 << 16
TOL = 1e-8

_S2 = 1 / np.sqrt(2)
_W = np.exp(1j * np.pi / 4)
GATE_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.diag([1, 1j]),
    "Sdg": np.diag([1, -1j]),
    "T": np.diag([1, _W]),
    "Tdg": np.diag([1, np.conj(_W)]),
}
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def logical_target(name: str) -> np.ndarray:
    return CNOT if name == "CNOT" else GATE_MATRICES[name]


class UnsupportedCircuit(ValueError):
    pass


@dataclass
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.n > MAX_DENSE_QUBITS:
            raise BudgetExceeded(f"{self.n} qubits exceed the dense ceiling of {MAX_DENSE_QUBITS}")
        if self.amps.shape != (1 << self.n,):
            raise ValueError("amplitude vector has the wrong length")

    @classmethod
    def basis(cls, n: int, v: int = 0) -> StateVector:
        a = np.zeros(1 << n, dtype=complex)
        a[lex_key(v, n)] = 1
        return cls(n, a)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def _apply_1q(amps: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    t = amps.reshape(1 << q, 2, 1 << (n - q - 1))
    return np.einsum("ab,ibj->iaj", u, t).reshape(-1)


def _apply_2q(amps: np.ndarray, n: int, q0: int, q1: int, u: np.ndarray) -> np.ndarray:
    t = amps.reshape((2,) * n)
    t = np.moveaxis(t, (q0, q1), (0, 1))
    t = np.tensordot(u.reshape(2, 2, 2, 2), t, axes=([2, 3], [0, 1]))
    return np.moveaxis(t, (0, 1), (q0, q1)).reshape(-1)


def _check_unitary(g: Gate) -> None:
    if g.kind in ("MeasurePauli", "CorrectPauli"):
        raise UnsupportedCircuit(f"oracle cannot simulate {g.kind}")


def apply_gate(s: StateVector, g: Gate) -> StateVector:
    _check_unitary(g)
    if g.kind == "CNOT":
        return StateVector(s.n, _apply_2q(s.amps, s.n, *g.qubits, CNOT))
    return StateVector(s.n, _apply_1q(s.amps, s.n, g.qubits[0], GATE_MATRICES[g.kind]))


def apply_circuit(s: StateVector, c: Circuit) -> StateVector:
    if c.n != s.n:
        raise ValueError(f"circuit on {c.n} qubits applied to {s.n}-qubit state")
    for g in c.steps:
        _check_unitary(g)
    for g in c.steps:
        s = apply_gate(s, g)
    return s


def apply_pauli(s: StateVector, p: Pauli) -> StateVector:
    amps = s.amps
    for q in range(p.n):
        letter = p.letter(q)
        if letter != "I":
            amps = _apply_1q(amps, s.n, q, GATE_MATRICES[letter])
    return StateVector(s.n, amps * (1j ** p.phase))


def pauli_matrix(p: Pauli) -> np.ndarray:
    m = np.array([[1]], dtype=complex)
    for q in range(p.n):
        m = np.kron(m, GATE_MATRICES[p.letter(q)])
    return m * (1j ** p.phase)


def circuit_unitary(c: Circuit) -> np.ndarray:
    cols = [apply_circuit(StateVector.basis(c.n, _from_index(i, c.n)), c).amps for i in range(1 << c.n)]
    return np.array(cols).T


def _from_index(i: int, n: int) -> int:
    return lex_key(i, n)  # the bit reversal is its own inverse


# Sparse backend: {packed basis state: amplitude}.

def _sparse_apply(state: dict, g: Gate) -> dict:
    _check_unitary(g)
    out: dict = {}
    if g.kind == "CNOT":
        c, t = g.qubits
        return {(v ^ (((v >> c) & 1) << t)): a for v, a in state.items()}
    (q,) = g.qubits
    u = GATE_MATRICES[g.kind]
    bit = 1 << q
    for v, a in state.items():
        b = (v >> q) & 1
        for nb in (0, 1):
            coef = u[nb, b]
            if coef != 0:
                w = (v & ~bit) | (nb << q)
                out[w] = out.get(w, 0) + coef * a
    out = {v: a for v, a in out.items() if abs(a) > 1e-14}
    if len(out) > MAX_SPARSE_TERMS:
        raise BudgetExceeded(f"sparse state exceeds {MAX_SPARSE_TERMS} terms")
    return out


def _coset_state(c: CssCode, bit: int) -> dict:
    words = row_space(c.hx)
    shift = c.lx[0].bits if bit else 0
    amp = 1 / np.sqrt(len(words))
    return {w ^ shift: amp for w in words}


def encode_logical(c: CssCode, amp0: complex, amp1: complex) -> StateVector:
    """``amp0 |0_L> + amp1 |1_L>`` with CSS coset states."""
    if c.k != 1:
        raise ValueError("encode_logical needs k = 1")
    if abs(abs(amp0) ** 2 + abs(amp1) ** 2 - 1) > 1e-10:
        raise ValueError("amplitudes are not normalised")
    s = StateVector(c.n, np.zeros(1 << c.n, dtype=complex))
    for bit, amp in ((0, amp0), (1, amp1)):
        for v, a in _coset_state(c, bit).items():
            s.amps[lex_key(v, c.n)] += amp * a
    return s


def _product_basis(c: CssCode, blocks: int, j: int) -> dict:
    """|j_L> on ``blocks`` copies; block 0 carries the most significant logical bit."""
    state = {0: 1.0 + 0j}
    for blk in range(blocks):
        bit = (j >> (blocks - 1 - blk)) & 1
        part = _coset_state(c, bit)
        state = {v | (w << (blk * c.n)): a * b for v, a in state.items() for w, b in part.items()}
    return state


@dataclass(frozen=True)
class OracleAction:
    preserved: bool
    matrix: np.ndarray | None
    residual: float

    def matches(self, target: np.ndarray, tol: float = TOL) -> bool:
        return self.preserved and equal_up_to_phase(self.matrix, target, tol)


def _run(circ: Circuit, state: dict, dense: bool) -> dict:
    if dense:
        s = StateVector(circ.n, np.zeros(1 << circ.n, dtype=complex))
        for v, a in state.items():
            s.amps[lex_key(v, circ.n)] = a
        s = apply_circuit(s, circ)
        nz = np.nonzero(np.abs(s.amps) > 1e-14)[0]
        return {lex_key(int(i), circ.n): complex(s.amps[i]) for i in nz}
    for g in circ.steps:
        _check_unitary(g)
    for g in circ.steps:
        state = _sparse_apply(state, g)
    return state


def _inner(a: dict, b: dict) -> complex:
    if len(a) > len(b):
        a, b = b, a
    return sum(np.conj(x) * b.get(v, 0) for v, x in a.items())


def logical_action(c: CssCode, circ: Circuit, blocks: int = 1) -> OracleAction:
    """Matrix of ``circ`` on the logical basis of ``blocks`` copies of ``c``,
    normalised so the first nonzero entry is real positive; ``preserved`` is
    False when an image leaves the codespace."""
    if circ.n != blocks * c.n:
        raise ValueError(f"circuit width {circ.n} != {blocks} x {c.n}")
    dense = circ.n <= MAX_DENSE_QUBITS
    dim = 1 << blocks
    basis = [_product_basis(c, blocks, j) for j in range(dim)]
    m = np.zeros((dim, dim), dtype=complex)
    worst = 0.0
    images = []
    for j in range(dim):
        img = _run(circ, basis[j], dense)
        images.append(img)
        for i in range(dim):
            m[i, j] = _inner(basis[i], img)
        resid = sum(abs(a) ** 2 for a in img.values()) - float(np.sum(np.abs(m[:, j]) ** 2))
        worst = max(worst, abs(resid))
    # linearity check on the uniform superposition
    plus = {}
    for b in basis:
        for v, a in b.items():
            plus[v] = plus.get(v, 0) + a / np.sqrt(dim)
    pimg = _run(circ, plus, dense)
    want = m @ (np.ones(dim) / np.sqrt(dim))
    got = np.array([_inner(b, pimg) for b in basis])
    worst = max(worst, float(np.max(np.abs(got - want))))
    if worst > TOL:
        return OracleAction(False, None, worst)
    return OracleAction(True, fix_phase(m), worst)


def fix_phase(m: np.ndarray) -> np.ndarray:
    flat = m.reshape(-1)
    nz = np.nonzero(np.abs(flat) > TOL)[0]
    if not len(nz):
        return m
    ph = flat[nz[0]] / abs(flat[nz[0]])
    return m / ph


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> bool:
    if a is None or b is None or a.shape != b.shape:
        return False
    return bool(np.max(np.abs(fix_phase(a) - fix_phase(b))) < tol)


def transversal_circuit(c: CssCode, gate: str, pattern: Sequence[int] | None = None) -> Circuit:
    """``gate`` on every qubit (pairwise across two blocks for CNOT). With a
    ``pattern``, qubit j gets ``T**pattern[j]`` expressed in T/S/Z gates."""
    from .circuit import CircuitBuilder
    from .gadgets import t_power_gates

    n = c.n
    if gate == "CNOT":
        b = CircuitBuilder(2 * n)
        for q in range(n):
            b.gate("CNOT", q, n + q)
        return b.build()
    b = CircuitBuilder(n)
    for q in range(n):
        kinds = t_power_gates(pattern[q]) if pattern is not None else (gate,)
        for kind in kinds:
            b.gate(kind, q)
    return b.build()


def oracle_transversal(c: CssCode, gate: str) -> bool:
    """Statevector verdict: whether the transversal circuit (any uniform
    power of T for S and T) acts as logical ``gate``."""
    target = logical_target(gate)
    if gate in ("S", "T"):
        return any(
            logical_action(c, transversal_circuit(c, gate, (k,) * c.n)).matches(target) for k in range(1, 8)
        )
    blocks = 2 if gate == "CNOT" else 1
    return logical_action(c, transversal_circuit(c, gate), blocks).matches(target)
