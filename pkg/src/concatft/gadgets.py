"""Logical gate gadgets and error-correction gadgets on the concatenated code.

Registers of the concatenated code are laid out consecutively: register ``r``
occupies physical qubits ``[r * layout.n, (r + 1) * layout.n)`` and its
blocks are numbered ``r * outer.n + b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .algebra import Pauli, parity
from .circuit import Circuit, CircuitBuilder, CorrectionTable
from .codes import ConcatLayout, CssCode, syndrome_int
from .decode import lookup_for
from .transversal import check_diagonal_transversal, compose_diagonal, find_uniform_pattern, DiagonalPattern

INNER_ONLY = ("inner",)
INNER_THEN_OUTER = ("inner", "outer")

# Rows of the three wires used in the logical-T figure, counted from the top.
FIG2_ROWS = (1, 2, 7)

# Single-qubit gate realising T**k (up to global phase) for each exponent mod 8.
_T_POWER_GATES = {0: (), 1: ("T",), 2: ("S",), 3: ("S", "T"), 4: ("Z",), 5: ("Z", "T"), 6: ("Sdg",), 7: ("Tdg",)}


class UnsupportedLayout(ValueError):
    pass


@dataclass(frozen=True)
class BlockOp:
    """A logical gate of the inner code applied to whole blocks."""

    kind: str
    blocks: tuple[int, ...]
    transversal: bool


@dataclass(frozen=True)
class Gadget:
    name: str
    layout: ConcatLayout
    registers: int
    block_ops: tuple[BlockOp, ...]
    circuit: Circuit | None
    ec_schedule: tuple[str, ...]
    fault_model: str = "circuit"  # "block": an arbitrary Pauli on one block

    @property
    def n(self) -> int:
        return self.registers * self.layout.n

    @property
    def block_count(self) -> int:
        return self.registers * self.layout.block_count

    def bare_circuit(self) -> Circuit:
        """Replace every block by one qubit and every block gate by the bare gate."""
        b = CircuitBuilder(self.block_count)
        for op in self.block_ops:
            if op.kind == "I":
                continue
            b.gate(op.kind, *op.blocks)
        return b.build()

    def to_text(self) -> str:
        head = f"# gadget {self.name}\n# ec_schedule {'+'.join(self.ec_schedule) or 'none'}\n"
        return head + (self.circuit.to_text() if self.circuit is not None else "")


def t_power_gates(k: int) -> tuple[str, ...]:
    return _T_POWER_GATES[k % 8]


def _check_layout(layout: ConcatLayout) -> None:
    if layout.outer.k != 1 or layout.inner.k != 1:
        raise UnsupportedLayout("gadgets need k = 1 codes")


def fig2_blocks(outer: CssCode) -> tuple[int, int, int]:
    """Blocks for the figure's wires (top, middle, bottom).

    The top and bottom wires keep their positions (first and last block);
    the middle wire is the block completing a weight-3 logical Z support, so
    that the parity collected on the bottom wire is the logical value.
    """
    first, last = 0, outer.n - 1
    for mid in range(1, last):
        v = (1 << first) | (1 << mid) | (1 << last)
        if not outer.hx.mul_vec(v) and parity(v & outer.lx[0].bits):
            return first, mid, last
    raise UnsupportedLayout(f"{outer.name}: no weight-3 logical Z through blocks {first} and {last}")


def literal_fig2_blocks() -> tuple[int, int, int]:
    """The figure's row numbers read directly as block indices."""
    return tuple(r - 1 for r in FIG2_ROWS)


def _block_cnot(b: CircuitBuilder, layout: ConcatLayout, src: int, dst: int) -> None:
    m = layout.block_size
    for p in range(m):
        b.gate("CNOT", src * m + p, dst * m + p)


def _block_diagonal(b: CircuitBuilder, layout: ConcatLayout, block: int, pat: DiagonalPattern) -> None:
    m = layout.block_size
    for p, k in enumerate(pat.exponents):
        for kind in t_power_gates(k):
            b.gate(kind, block * m + p)


def build_logical_T_gadget(layout: ConcatLayout, blocks: tuple[int, int, int] | None = None) -> Gadget:
    """Two nested block-CNOT pairs around one block-T on the bottom wire."""
    _check_layout(layout)
    t_pat = find_uniform_pattern(layout.inner, "T")
    if t_pat is None:
        raise UnsupportedLayout(f"{layout.inner.name} has no transversal logical T")
    a, m, c = blocks if blocks is not None else fig2_blocks(layout.outer)
    ops = (
        BlockOp("CNOT", (a, m), True),
        BlockOp("CNOT", (m, c), True),
        BlockOp("T", (c,), True),
        BlockOp("CNOT", (m, c), True),
        BlockOp("CNOT", (a, m), True),
    )
    b = CircuitBuilder(layout.n)
    for op in ops:
        if op.kind == "CNOT":
            _block_cnot(b, layout, *op.blocks)
        else:
            _block_diagonal(b, layout, op.blocks[0], t_pat)
    return Gadget("T", layout, 1, ops, b.build(), INNER_ONLY)


def build_logical_H_gadget(layout: ConcatLayout) -> Gadget:
    """One black-box logical H per block; faults inside are arbitrary block Paulis."""
    _check_layout(layout)
    ops = tuple(BlockOp("H", (blk,), False) for blk in range(layout.block_count))
    return Gadget("H", layout, 1, ops, None, INNER_THEN_OUTER, fault_model="block")


def build_logical_CNOT_gadget(layout: ConcatLayout) -> Gadget:
    _check_layout(layout)
    nb = layout.block_count
    ops = tuple(BlockOp("CNOT", (blk, nb + blk), True) for blk in range(nb))
    b = CircuitBuilder(2 * layout.n)
    for q in range(layout.n):
        b.gate("CNOT", q, layout.n + q)
    return Gadget("CNOT", layout, 2, ops, b.build(), INNER_ONLY)


def logical_S_candidates(layout: ConcatLayout) -> dict[str, DiagonalPattern]:
    """Uniform per-qubit S and Sdg patterns, keyed by the global logical gate
    each one realises on the concatenated code."""
    out = {}
    for k in (2, -2):
        pat = DiagonalPattern.uniform(layout.inner.n, k)
        act = compose_diagonal(layout.outer, layout.inner, pat)
        if act is not None:
            out[act.name] = pat
    return out


def build_logical_S_gadget(layout: ConcatLayout) -> Gadget:
    _check_layout(layout)
    cands = logical_S_candidates(layout)
    if "S" not in cands:
        raise UnsupportedLayout("no uniform S/Sdg pattern realises logical S")
    pat = cands["S"]
    block_act = check_diagonal_transversal(layout.inner, pat)
    ops = tuple(BlockOp(block_act.name, (blk,), True) for blk in range(layout.block_count))
    b = CircuitBuilder(layout.n)
    for blk in range(layout.block_count):
        _block_diagonal(b, layout, blk, pat)
    return Gadget("S", layout, 1, ops, b.build(), INNER_ONLY)


def build_identity_gadget(layout: ConcatLayout) -> Gadget:
    """No logical gate: the exRec is error correction alone."""
    _check_layout(layout)
    return Gadget("EC", layout, 1, (), Circuit(layout.n), INNER_ONLY)


@lru_cache(maxsize=None)
def inner_correction_table(inner: CssCode) -> CorrectionTable:
    t = lookup_for(inner)
    return CorrectionTable(f"{inner.name}-lookup", tuple(zip(t.cx, t.cz)))


@lru_cache(maxsize=None)
def outer_correction_table(layout: ConcatLayout) -> CorrectionTable:
    """Outer syndrome -> lifted logical correction over one register."""
    t = lookup_for(layout.outer)
    entries = []
    for s in range(len(t)):
        lifted = layout.lift_pauli(t[s])
        entries.append((lifted.x, lifted.z))
    return CorrectionTable(f"{layout.outer.name}-lifted-lookup", tuple(entries))


def build_inner_ec(layout: ConcatLayout, block: int, registers: int = 1) -> Gadget:
    """Atomic slice measuring every inner generator of ``block``, then the
    lookup correction on that block. ``block`` counts across registers."""
    n = registers * layout.n
    m = layout.block_size
    base = block * m
    b = CircuitBuilder(n)
    bits = [b.measure(g.embed(range(base, base + m), n)) for g in layout.inner.stabilizers()]
    b.correct(range(base, base + m), bits, inner_correction_table(layout.inner))
    return Gadget(f"inner_ec[{block}]", layout, registers, (), b.build(), ())


def build_outer_ec(layout: ConcatLayout, register: int = 0, registers: int = 1) -> Gadget:
    """Atomic slice measuring the lifted outer generators of one register,
    then block-level logical corrections."""
    n = registers * layout.n
    off = register * layout.n
    qubits = range(off, off + layout.n)
    b = CircuitBuilder(n)
    bits = [b.measure(g.embed(qubits, n)) for g in layout.outer_stabilizers()]
    b.correct(qubits, bits, outer_correction_table(layout))
    return Gadget(f"outer_ec[{register}]", layout, registers, (), b.build(), ())


def ec_gadgets(layout: ConcatLayout, schedule: tuple[str, ...], registers: int = 1) -> list[Gadget]:
    out = []
    for step in schedule:
        if step == "inner":
            out += [build_inner_ec(layout, blk, registers) for blk in range(registers * layout.block_count)]
        elif step == "outer":
            out += [build_outer_ec(layout, r, registers) for r in range(registers)]
        else:
            raise ValueError(f"unknown EC step {step!r}")
    return out


@dataclass(frozen=True)
class ExRec:
    """A gadget, its error correction, and (implicitly) the ideal decoder.

    ``circuit`` holds the faulty part: the gadget's physical circuit (empty
    for block-abstract gadgets) followed by its EC schedule.  The trailing
    ideal round is applied by the correctness predicate only.
    """

    name: str
    gadget: Gadget
    circuit: Circuit
    ec: tuple[Gadget, ...]
    gadget_steps: int

    @property
    def layout(self) -> ConcatLayout:
        return self.gadget.layout

    @property
    def registers(self) -> int:
        return self.gadget.registers

    @property
    def fault_model(self) -> str:
        return self.gadget.fault_model

    def to_text(self) -> str:
        head = f"# exrec {self.name}\n# ec_schedule {'+'.join(self.gadget.ec_schedule)}\n# ideal_round inner+outer\n"
        return head + self.circuit.to_text()


def build_exrec(g: Gadget) -> ExRec:
    ecs = ec_gadgets(g.layout, g.ec_schedule, g.registers)
    b = CircuitBuilder(g.n)
    steps = 0
    if g.circuit is not None:
        b.extend(g.circuit)
        steps = len(g.circuit)
    for ec in ecs:
        b.extend(ec.circuit)
    return ExRec(g.name, g, b.build(), tuple(ecs), steps)


GADGET_BUILDERS = {
    "T": build_logical_T_gadget,
    "H": build_logical_H_gadget,
    "CNOT": build_logical_CNOT_gadget,
    "S": build_logical_S_gadget,
    "EC": build_identity_gadget,
}


def is_block_transversal(g: Gadget) -> bool:
    """Every physical gate touches at most one qubit of any block."""
    if g.circuit is None:
        return False
    m = g.layout.block_size
    for step in g.circuit.steps:
        blocks = [q // m for q in step.qubits]
        if len(set(blocks)) != len(blocks):
            return False
    return True


def is_globally_transversal(ec: Gadget) -> bool:
    """Only Pauli measurements and Pauli corrections, and every measured
    observable restricted to a block commutes with that block's checks."""
    m = ec.layout.block_size
    inner = ec.layout.inner
    mask = (1 << m) - 1
    for step in ec.circuit.steps:
        if step.kind == "CorrectPauli":
            continue
        if step.kind != "MeasurePauli":
            return False
        obs = step.observable
        for blk in range(ec.block_count):
            x = (obs.x >> (blk * m)) & mask
            z = (obs.z >> (blk * m)) & mask
            if syndrome_int(inner, x, z):
                return False
    return True


def max_observable_weight(ec: Gadget) -> int:
    return max((s.observable.weight for s in ec.circuit.steps if s.kind == "MeasurePauli"), default=0)
