"""Flat opcode tapes for batch Pauli-frame simulation of an exRec.

A tape is the exRec circuit followed by the ideal round (inner then outer
decoding, fault-free) and one CLASS op per global logical bit.  Phases are
dropped: the correctness predicate only depends on the X/Z frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit, CircuitBuilder, FaultEvent, fault_position
from .gadgets import ExRec, ec_gadgets

OP_NOP, OP_H, OP_S, OP_CNOT, OP_T, OP_MEAS, OP_CORR, OP_CLASS = range(8)

_OPCODE = {
    "X": OP_NOP, "Y": OP_NOP, "Z": OP_NOP,
    "H": OP_H, "S": OP_S, "Sdg": OP_S,
    "T": OP_T, "Tdg": OP_T, "CNOT": OP_CNOT,
    "MeasurePauli": OP_MEAS, "CorrectPauli": OP_CORR,
}


@dataclass(eq=False)
class Tape:
    n: int
    nbits: int
    nclass: int
    fault_steps: int  # ops [0, fault_steps) belong to the faulty circuit
    op: np.ndarray
    a: np.ndarray
    b: np.ndarray
    obs_ptr: np.ndarray  # CSR over observables; obs_t bit 0 = X part, bit 1 = Z part
    obs_q: np.ndarray
    obs_t: np.ndarray
    corr_qptr: np.ndarray
    corr_q: np.ndarray
    corr_bptr: np.ndarray
    corr_b: np.ndarray
    corr_table: np.ndarray
    tab_off: np.ndarray
    tab_width: np.ndarray
    tab_x: np.ndarray
    tab_z: np.ndarray
    max_t: int
    _cache: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.op)


class _ObsPool:
    def __init__(self):
        self.ptr, self.q, self.t = [0], [], []

    def add(self, x: int, z: int) -> int:
        sup = x | z
        while sup:
            low = sup & -sup
            q = low.bit_length() - 1
            self.q.append(q)
            self.t.append(((x >> q) & 1) | (((z >> q) & 1) << 1))
            sup ^= low
        self.ptr.append(len(self.q))
        return len(self.ptr) - 2


def compile_circuit(c: Circuit, class_masks: Sequence[tuple[int, int]] = (), fault_steps: int | None = None) -> Tape:
    """``class_masks[i] = (x, z)``: class bit i is the commutation parity of
    the final frame with that Pauli."""
    ops, aa, bb = [], [], []
    obs = _ObsPool()
    cqptr, cq, cbptr, cb, ctab = [0], [], [0], [], []
    tables: dict[int, int] = {}
    toff, twidth, tx, tz = [], [], [], []
    pos = 0
    for g in c.steps:
        code = _OPCODE[g.kind]
        a = b = 0
        if code in (OP_H, OP_S, OP_T, OP_NOP):
            a = g.qubits[0]
        elif code == OP_CNOT:
            a, b = g.qubits
        elif code == OP_MEAS:
            a, b = obs.add(g.observable.x, g.observable.z), g.bit
        else:
            key = id(g.table)
            width = len(g.qubits)
            if key not in tables:
                tables[key] = len(toff)
                toff.append(pos)
                twidth.append(width)
                for ex, ez in g.table.entries:
                    tx.extend((ex >> k) & 1 for k in range(width))
                    tz.extend((ez >> k) & 1 for k in range(width))
                pos += len(g.table.entries) * width
            elif twidth[tables[key]] != width:
                raise ValueError("correction table reused with a different width")
            a = len(ctab)
            ctab.append(tables[key])
            cq.extend(g.qubits)
            cqptr.append(len(cq))
            cb.extend(g.bits)
            cbptr.append(len(cb))
        ops.append(code)
        aa.append(a)
        bb.append(b)
    for i, (x, z) in enumerate(class_masks):
        ops.append(OP_CLASS)
        aa.append(obs.add(x, z))
        bb.append(i)

    def i32(v):
        return np.asarray(v, dtype=np.int32)

    return Tape(
        n=c.n,
        nbits=c.num_bits,
        nclass=len(class_masks),
        fault_steps=len(c.steps) if fault_steps is None else fault_steps,
        op=i32(ops), a=i32(aa), b=i32(bb),
        obs_ptr=i32(obs.ptr), obs_q=i32(obs.q), obs_t=i32(obs.t),
        corr_qptr=i32(cqptr), corr_q=i32(cq), corr_bptr=i32(cbptr), corr_b=i32(cb),
        corr_table=i32(ctab), tab_off=i32(toff), tab_width=i32(twidth),
        tab_x=np.asarray(tx, dtype=np.uint8), tab_z=np.asarray(tz, dtype=np.uint8),
        max_t=sum(1 for o in ops if o == OP_T),
    )


def global_class_masks(exrec: ExRec) -> list[tuple[int, int]]:
    """Per register: (x, z) masks whose parities give (a, b) of the global class."""
    layout = exrec.layout
    lz = layout.logical_z()
    lx = layout.logical_x()
    out = []
    for r in range(exrec.registers):
        off = r * layout.n
        # a = x . LZ  (commutation with Z-type LZ)
        out.append((0, lz.z << off))
        # b = z . LX
        out.append((lx.x << off, 0))
    return out


def exrec_with_ideal_round(exrec: ExRec) -> Circuit:
    b = CircuitBuilder(exrec.circuit.n)
    b.extend(exrec.circuit)
    for ec in ec_gadgets(exrec.layout, ("inner", "outer"), exrec.registers):
        b.extend(ec.circuit)
    return b.build()


def compile_exrec(exrec: ExRec) -> Tape:
    full = exrec_with_ideal_round(exrec)
    return compile_circuit(full, global_class_masks(exrec), fault_steps=len(exrec.circuit))


@dataclass
class CaseBatch:
    """Fault injections for a batch of cases, CSR by case and sorted by position."""

    case_ptr: np.ndarray
    pos: np.ndarray
    kind: np.ndarray  # 0 = Pauli on qubit ``target``, 1 = flip bit ``target``
    target: np.ndarray
    xbit: np.ndarray
    zbit: np.ndarray

    def __len__(self) -> int:
        return len(self.case_ptr) - 1


def encode_cases(c: Circuit, cases: Sequence[Sequence[FaultEvent]]) -> CaseBatch:
    mstep = c.measure_step()
    ptr, pos, kind, tgt, xb, zb = [0], [], [], [], [], []
    for faults in cases:
        items = []
        for f in faults:
            p = fault_position(c, f, mstep)
            if f.pauli is None:
                items.append((p, 1, f.location.index, 0, 0))
                continue
            sup = f.pauli.x | f.pauli.z
            while sup:
                low = sup & -sup
                q = low.bit_length() - 1
                items.append((p, 0, q, (f.pauli.x >> q) & 1, (f.pauli.z >> q) & 1))
                sup ^= low
        items.sort(key=lambda t: t[0])
        for it in items:
            pos.append(it[0])
            kind.append(it[1])
            tgt.append(it[2])
            xb.append(it[3])
            zb.append(it[4])
        ptr.append(len(pos))
    i32 = lambda v: np.asarray(v, dtype=np.int32)
    return CaseBatch(i32(ptr), i32(pos), i32(kind), i32(tgt),
                     np.asarray(xb, dtype=np.uint8), np.asarray(zb, dtype=np.uint8))


def block_error_batch(exrec: ExRec, reps: Sequence[tuple[int, int, int]]) -> CaseBatch:
    """``reps`` are ``(block, x, z)`` with x/z packed over the block, injected at position 0."""
    m = exrec.layout.block_size
    ptr, pos, kind, tgt, xb, zb = [0], [], [], [], [], []
    for blk, x, z in reps:
        sup = x | z
        while sup:
            low = sup & -sup
            k = low.bit_length() - 1
            pos.append(0)
            kind.append(0)
            tgt.append(blk * m + k)
            xb.append((x >> k) & 1)
            zb.append((z >> k) & 1)
            sup ^= low
        ptr.append(len(pos))
    i32 = lambda v: np.asarray(v, dtype=np.int32)
    return CaseBatch(i32(ptr), i32(pos), i32(kind), i32(tgt),
                     np.asarray(xb, dtype=np.uint8), np.asarray(zb, dtype=np.uint8))


def slice_batch(batch: CaseBatch, start: int, stop: int) -> CaseBatch:
    lo, hi = int(batch.case_ptr[start]), int(batch.case_ptr[stop])
    return CaseBatch(
        batch.case_ptr[start:stop + 1] - lo,
        batch.pos[lo:hi], batch.kind[lo:hi], batch.target[lo:hi],
        batch.xbit[lo:hi], batch.zbit[lo:hi],
    )
