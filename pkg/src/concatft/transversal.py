"""Transversality checks for CSS codes.

Diagonal phases are exact integers in units of pi/8, reduced mod 16.
``T**k`` on a qubit in state ``|v>`` contributes ``k * (2v - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import BitMatrix, Pauli, gf2_row_reduce, parity, row_space, same_row_space
from .codes import ENUM_LIMIT_BITS, BudgetExceeded, CssCode, logical_class, syndrome

PHASE_MOD = 16

# Relative logical phase (units of pi/8) -> gate name, up to global phase.
DIAGONAL_NAMES = {0: "I", 2: "T", 4: "S", 8: "Z", 12: "Sdg", 14: "Tdg"}
GATE_RELATIVE_PHASE = {v: k for k, v in DIAGONAL_NAMES.items()}


@dataclass(frozen=True)
class DiagonalPattern:
    """Per-qubit exponents ``k_j``: the gate on qubit ``j`` is ``T**k_j``."""

    exponents: tuple[int, ...]

    @classmethod
    def uniform(cls, n: int, k: int) -> DiagonalPattern:
        return cls((k,) * n)

    def __len__(self) -> int:
        return len(self.exponents)

    def __add__(self, other: DiagonalPattern) -> DiagonalPattern:
        return DiagonalPattern(tuple(a + b for a, b in zip(self.exponents, other.exponents, strict=True)))

    def phases(self) -> tuple[tuple[int, int], ...]:
        """Per-qubit ``(phase on |0>, phase on |1>)``."""
        return tuple((-k % PHASE_MOD, k % PHASE_MOD) for k in self.exponents)


@dataclass(frozen=True)
class LogicalDiagonalAction:
    """Logical ``diag(e^{i pi p0/8}, e^{i pi p1/8})``; ``relative = p1 - p0``."""

    phase0: int
    phase1: int

    @property
    def relative(self) -> int:
        return (self.phase1 - self.phase0) % PHASE_MOD

    @property
    def name(self) -> str:
        return DIAGONAL_NAMES.get(self.relative, f"diag(1, e^(i pi {self.relative}/8))")

    def matrix(self) -> np.ndarray:
        return np.diag(np.exp(1j * np.pi * np.array([self.phase0, self.phase1]) / 8))


def _coset_words(c: CssCode) -> tuple[list[int], int]:
    reduced, rank = gf2_row_reduce(c.hx)
    if rank > ENUM_LIMIT_BITS:
        raise BudgetExceeded(f"2^{rank} codewords per coset exceed enumeration budget")
    return row_space(c.hx), c.lx[0].bits


def diagonal_action(c: CssCode, qubit_phases: Sequence[tuple[int, int]]) -> LogicalDiagonalAction | None:
    """Logical action of a product of single-qubit diagonal gates, or None
    if the phase is not constant on the codewords of each logical state."""
    if c.k != 1:
        raise ValueError("diagonal checks require k = 1")
    if len(qubit_phases) != c.n:
        raise ValueError(f"pattern length {len(qubit_phases)} != n = {c.n}")
    words, lx = _coset_words(c)
    out = []
    for shift in (0, lx):
        seen = set()
        for v in words:
            w = v ^ shift
            total = sum(p1 if (w >> j) & 1 else p0 for j, (p0, p1) in enumerate(qubit_phases))
            seen.add(total % PHASE_MOD)
            if len(seen) > 1:
                return None
        out.append(seen.pop())
    return LogicalDiagonalAction(out[0], out[1])


def check_diagonal_transversal(c: CssCode, pat: DiagonalPattern) -> LogicalDiagonalAction | None:
    return diagonal_action(c, pat.phases())


def find_uniform_pattern(c: CssCode, gate: str) -> DiagonalPattern | None:
    """The uniform ``T**k`` pattern (k in 1..7, smallest |k| first) realising
    logical ``gate``; None if no uniform pattern does."""
    want = GATE_RELATIVE_PHASE[gate]
    for k in (1, -1, 2, -2, 3, -3, 4):
        pat = DiagonalPattern.uniform(c.n, k)
        act = check_diagonal_transversal(c, pat)
        if act is not None and act.relative == want:
            return pat
    return None


def compose_diagonal(outer: CssCode, inner: CssCode, inner_pattern: DiagonalPattern) -> LogicalDiagonalAction | None:
    """Action on the concatenated code of ``inner_pattern`` applied to every
    inner block: the blocks' logical actions form a diagonal pattern on the
    outer code."""
    block = check_diagonal_transversal(inner, inner_pattern)
    if block is None:
        return None
    return diagonal_action(outer, [(block.phase0, block.phase1)] * outer.n)


def _stabilizer_rows(c: CssCode, blocks: int):
    """Symplectic rows ``(x, z)`` of ``blocks`` copies of the code."""
    rows = []
    for b in range(blocks):
        sh = b * c.n
        rows += [(r << sh, 0) for r in c.hx.rows]
        rows += [(0, r << sh) for r in c.hz.rows]
    return rows


def _in_group(p: tuple[int, int], rows, width: int) -> bool:
    packed = BitMatrix(tuple(x | (z << width) for x, z in rows), 2 * width)
    target = p[0] | (p[1] << width)
    base = packed.rank()
    return BitMatrix(packed.rows + (target,), 2 * width).rank() == base


def _cnot_image(p: tuple[int, int], n: int) -> tuple[int, int]:
    """Transversal CNOT from block 0 to block 1 (Pauli frame form)."""
    x, z = p
    mask = (1 << n) - 1
    x ^= (x & mask) << n
    z ^= (z >> n) & mask
    return x, z


def check_cnot_transversal(c: CssCode) -> bool:
    n = c.n
    rows = _stabilizer_rows(c, 2)
    for p in rows:
        if not _in_group(_cnot_image(p, n), rows, 2 * n):
            return False
    for i in range(c.k):
        lx, lz = c.lx[i].bits, c.lz[i].bits
        expected = {
            (lx, 0): (lx | (lx << n), 0),
            (lx << n, 0): (lx << n, 0),
            (0, lz): (0, lz),
            (0, lz << n): (0, lz | (lz << n)),
        }
        for src, want in expected.items():
            got = _cnot_image(src, n)
            diff = (got[0] ^ want[0], got[1] ^ want[1])
            if not _in_group(diff, rows, 2 * n):
                return False
    return True


def check_h_transversal(c: CssCode) -> bool:
    """H on every qubit swaps X and Z supports; it is a logical H iff the two
    check row spaces coincide and logical X maps into the logical Z class."""
    if c.hx.nrows == 0 and c.hz.nrows == 0:
        return False
    if not same_row_space(c.hx, c.hz):
        return False
    for lx, lz in zip(c.lx, c.lz):
        swapped_x = Pauli(0, lx.bits, c.n)
        swapped_z = Pauli(lz.bits, 0, c.n)
        if syndrome(c, swapped_x).bits or syndrome(c, swapped_z).bits:
            return False
        if logical_class(c, swapped_x) != (0, 1) or logical_class(c, swapped_z) != (1, 0):
            return False
    return True


def check_pauli_transversal(c: CssCode, letter: str) -> bool:
    """Whether ``letter`` applied to every qubit is the matching logical Pauli."""
    ones = (1 << c.n) - 1
    xb = ones if letter in "XY" else 0
    zb = ones if letter in "ZY" else 0
    p = Pauli(xb, zb, c.n)
    if syndrome(c, p).bits:
        return False
    want = {"X": (1, 0), "Z": (0, 1), "Y": (1, 1)}[letter]
    return logical_class(c, p) == want


def is_transversal(c: CssCode, gate: str) -> bool:
    """Combinatorial verdict for ``gate`` in {X, Y, Z, S, T, H, CNOT}; S and T
    count as transversal when some uniform power of T realises them."""
    if gate in ("X", "Y", "Z"):
        return check_pauli_transversal(c, gate)
    if gate in ("S", "T"):
        return find_uniform_pattern(c, gate) is not None
    if gate == "H":
        return check_h_transversal(c)
    if gate == "CNOT":
        return check_cnot_transversal(c)
    raise ValueError(f"no transversality check for {gate!r}")
