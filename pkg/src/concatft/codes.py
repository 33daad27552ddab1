"""CSS codes: Steane, the 15-qubit Reed-Muller code, and their concatenation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .algebra import (
    BitMatrix,
    BitVector,
    Pauli,
    ShapeError,
    gf2_nullspace,
    gf2_row_reduce,
    in_row_space,
    lex_key,
    parity,
    popcount,
    row_space,
    symplectic,
)


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class BudgetExceeded(RuntimeError):
    """Exhaustive enumeration would exceed the configured budget."""


class UnsupportedCode(ValueError):
    pass


# 2**ENUM_LIMIT_BITS is the largest coset enumeration attempted.
ENUM_LIMIT_BITS = 20


@dataclass(frozen=True)
class CssCode:
    name: str
    n: int
    k: int
    hx: BitMatrix
    hz: BitMatrix
    lx: tuple[BitVector, ...]
    lz: tuple[BitVector, ...]

    @property
    def generator_count(self) -> int:
        return self.hx.nrows + self.hz.nrows

    @property
    def syndrome_bits(self) -> int:
        return self.hz.nrows + self.hx.nrows

    def stabilizers(self) -> list[Pauli]:
        """Generators in syndrome order: Z-type rows first, then X-type."""
        return [Pauli(0, r, self.n) for r in self.hz.rows] + [Pauli(r, 0, self.n) for r in self.hx.rows]

    def logical_x(self, i: int = 0) -> Pauli:
        return Pauli.x_type(self.lx[i])

    def logical_z(self, i: int = 0) -> Pauli:
        return Pauli.z_type(self.lz[i])

    def label(self, distance: int | None = None) -> str:
        return f"[[{self.n},{self.k},{'?' if distance is None else distance}]]"


def _hamming_rows(m: int) -> tuple[int, ...]:
    """m rows over 2**m - 1 columns; column j holds the binary digits of j + 1."""
    n = (1 << m) - 1
    return tuple(sum(1 << j for j in range(n) if ((j + 1) >> i) & 1) for i in range(m))


def canonical_logicals(hx: BitMatrix, hz: BitMatrix) -> tuple[tuple[BitVector, ...], tuple[BitVector, ...]]:
    """Minimal-weight, lexicographically least logical supports (k = 1),
    or a symplectically paired nullspace basis when k > 1."""
    n = hx.ncols
    kx = gf2_nullspace(hz)
    kz = gf2_nullspace(hx)
    k = n - hx.rank() - hz.rank()
    if k <= 0:
        return (), ()
    if k == 1:
        lx = _least_outside(kx, hx)
        lz = _least_outside(kz, hz)
        return (BitVector(lx, n),), (BitVector(lz, n),)
    return _paired_basis(kx, hx, kz, hz, k)


def _least_outside(kernel: BitMatrix, stab: BitMatrix) -> int:
    if kernel.nrows > ENUM_LIMIT_BITS:
        raise BudgetExceeded(f"2^{kernel.nrows} kernel words exceed enumeration budget")
    n = kernel.ncols
    best = None
    for v in row_space(kernel):
        if v and not in_row_space(v, stab):
            key = (popcount(v), lex_key(v, n))
            if best is None or key < best[0]:
                best = (key, v)
    if best is None:
        raise ContractError("no logical operator outside the stabilizer row space")
    return best[1]


def _paired_basis(kx, hx, kz, hz, k):
    n = hx.ncols
    xs = [v for v in kx.rows if not in_row_space(v, hx)]
    zs = [v for v in kz.rows if not in_row_space(v, hz)]
    lx, lz = [], []
    while len(lx) < k:
        if not xs:
            raise ContractError("could not pair logical operators")
        a = xs.pop(0)
        j = next((j for j, b in enumerate(zs) if parity(a & b)), None)
        if j is None:
            continue
        b = zs.pop(j)
        xs = [v ^ a if parity(v & b) else v for v in xs]
        zs = [w ^ b if parity(w & a) else w for w in zs]
        lx.append(a)
        lz.append(b)
    return tuple(BitVector(v, n) for v in lx), tuple(BitVector(v, n) for v in lz)


def make_css(name: str, hx: BitMatrix, hz: BitMatrix, lx=None, lz=None) -> CssCode:
    if hx.ncols != hz.ncols:
        raise ShapeError("hx and hz must have the same number of columns")
    n = hx.ncols
    if lx is None or lz is None:
        lx, lz = canonical_logicals(hx, hz)
    k = n - hx.rank() - hz.rank()
    return CssCode(name, n, k, hx, hz, tuple(lx), tuple(lz))


def build_steane() -> CssCode:
    rows = _hamming_rows(3)
    h = BitMatrix(rows, 7)
    return make_css("steane", h, h)


def build_rm15() -> CssCode:
    base = _hamming_rows(4)
    hx = BitMatrix(base, 15)
    pairs = tuple(base[a] & base[b] for a, b in itertools.combinations(range(4), 2))
    hz = BitMatrix(base + pairs, 15)
    return make_css("rm15", hx, hz)


def validate(c: CssCode) -> list[str]:
    """Every violated invariant, as human-readable strings. Empty means valid."""
    problems: list[str] = []
    if c.hx.ncols != c.n or c.hz.ncols != c.n:
        problems.append(f"check matrices must have {c.n} columns")
        return problems
    for i, a in enumerate(c.hx.rows):
        for j, b in enumerate(c.hz.rows):
            if parity(a & b):
                problems.append(f"css: hx row {i} and hz row {j} overlap oddly")
    expected_k = c.n - c.hx.rank() - c.hz.rank()
    if c.k != expected_k:
        problems.append(f"k={c.k} but n - rank(hx) - rank(hz) = {expected_k}")
    if len(c.lx) != c.k or len(c.lz) != c.k:
        problems.append(f"expected {c.k} logical pairs, got {len(c.lx)} X and {len(c.lz)} Z")
    for i, v in enumerate(c.lx):
        if v.n != c.n:
            problems.append(f"lx[{i}] has length {v.n}")
            continue
        if c.hz.mul_vec(v):
            problems.append(f"logical: lx[{i}] anticommutes with a Z check")
    for i, v in enumerate(c.lz):
        if v.n != c.n:
            problems.append(f"lz[{i}] has length {v.n}")
            continue
        if c.hx.mul_vec(v):
            problems.append(f"logical: lz[{i}] anticommutes with an X check")
    for i, a in enumerate(c.lx):
        for j, b in enumerate(c.lz):
            if a.n != c.n or b.n != c.n:
                continue
            want = int(i == j)
            if a.dot(b) != want:
                kind = "anticommute" if want else "commute"
                problems.append(f"logical: lx[{i}] and lz[{j}] should {kind}")
    return problems


def syndrome(c: CssCode, e: Pauli) -> BitVector:
    """``hz . e.x`` followed by ``hx . e.z``."""
    if e.n != c.n:
        raise ShapeError(f"error acts on {e.n} qubits, code has {c.n}")
    sx = c.hz.mul_vec(e.x)
    sz = c.hx.mul_vec(e.z)
    return BitVector(sx | (sz << c.hz.nrows), c.syndrome_bits)


def syndrome_int(c: CssCode, x: int, z: int) -> int:
    return c.hz.mul_vec(x) | (c.hx.mul_vec(z) << c.hz.nrows)


def logical_class(c: CssCode, e: Pauli) -> tuple[int, ...]:
    """Bits ``(a_1, b_1, ...)``: ``a_i`` is X-logical content, ``b_i`` Z-logical."""
    if syndrome(c, e).bits:
        raise ContractError("logical class is only defined for zero-syndrome operators")
    out = []
    for lx, lz in zip(c.lx, c.lz):
        out.append(parity(e.x & lz.bits))
        out.append(parity(e.z & lx.bits))
    return tuple(out)


def _min_logical_weight(kernel_of: BitMatrix, stab: BitMatrix) -> int:
    kernel = gf2_nullspace(kernel_of)
    if kernel.nrows > ENUM_LIMIT_BITS:
        raise BudgetExceeded(f"2^{kernel.nrows} codewords exceed enumeration budget")
    weights = [popcount(v) for v in row_space(kernel) if v and not in_row_space(v, stab)]
    if not weights:
        raise ContractError("code encodes no logical qubit")
    return min(weights)


def distance_xz(c: CssCode) -> tuple[int, int]:
    """Exact ``(dx, dz)`` by enumerating the two kernels."""
    dx = _min_logical_weight(c.hz, c.hx)
    dz = _min_logical_weight(c.hx, c.hz)
    return dx, dz


def distance(c: CssCode) -> int:
    return min(distance_xz(c))


@dataclass(frozen=True)
class ConcatLayout:
    """``outer`` code whose qubits are each encoded in a block of ``inner``.

    Physical qubit of (block ``b``, position ``p``) is ``b * inner.n + p``.
    """

    outer: CssCode
    inner: CssCode

    @property
    def block_count(self) -> int:
        return self.outer.n

    @property
    def block_size(self) -> int:
        return self.inner.n

    @property
    def n(self) -> int:
        return self.outer.n * self.inner.n

    @property
    def k(self) -> int:
        return 1

    def qubit(self, block: int, pos: int) -> int:
        if not 0 <= block < self.outer.n or not 0 <= pos < self.inner.n:
            raise IndexError((block, pos))
        return block * self.inner.n + pos

    def block_of(self, qubit: int) -> int:
        return qubit // self.inner.n

    def block_qubits(self, block: int) -> range:
        return range(block * self.inner.n, (block + 1) * self.inner.n)

    def block_mask(self, block: int) -> int:
        return ((1 << self.inner.n) - 1) << (block * self.inner.n)

    def place(self, block: int, local: int) -> int:
        return local << (block * self.inner.n)

    def lift_x(self, outer_bits: int) -> int:
        """X support of the inner logical X placed on every block in ``outer_bits``."""
        lx = self.inner.lx[0].bits
        return sum(self.place(b, lx) for b in range(self.outer.n) if (outer_bits >> b) & 1)

    def lift_z(self, outer_bits: int) -> int:
        lz = self.inner.lz[0].bits
        return sum(self.place(b, lz) for b in range(self.outer.n) if (outer_bits >> b) & 1)

    def lift_pauli(self, outer: Pauli) -> Pauli:
        return Pauli(self.lift_x(outer.x), self.lift_z(outer.z), self.n)

    def inner_stabilizers(self) -> list[Pauli]:
        out = []
        for b in range(self.outer.n):
            for r in self.inner.hz.rows:
                out.append(Pauli(0, self.place(b, r), self.n))
            for r in self.inner.hx.rows:
                out.append(Pauli(self.place(b, r), 0, self.n))
        return out

    def outer_stabilizers(self) -> list[Pauli]:
        """Outer generators in outer syndrome order, lifted to physical qubits."""
        return [Pauli(0, self.lift_z(r), self.n) for r in self.outer.hz.rows] + [
            Pauli(self.lift_x(r), 0, self.n) for r in self.outer.hx.rows
        ]

    def lifted_stabilizers(self) -> list[Pauli]:
        return self.inner_stabilizers() + self.outer_stabilizers()

    def logical_x(self) -> Pauli:
        return Pauli(self.lift_x(self.outer.lx[0].bits), 0, self.n)

    def logical_z(self) -> Pauli:
        return Pauli(0, self.lift_z(self.outer.lz[0].bits), self.n)

    @cached_property
    def code(self) -> CssCode:
        """The concatenated code as a flat CSS code."""
        hx = [p.x for p in self.lifted_stabilizers() if p.x]
        hz = [p.z for p in self.lifted_stabilizers() if p.z]
        return CssCode(
            f"{self.outer.name}*{self.inner.name}",
            self.n,
            1,
            BitMatrix(tuple(hx), self.n),
            BitMatrix(tuple(hz), self.n),
            (BitVector(self.logical_x().x, self.n),),
            (BitVector(self.logical_z().z, self.n),),
        )


def concatenate(outer: CssCode, inner: CssCode) -> ConcatLayout:
    if outer.k != 1 or inner.k != 1:
        raise UnsupportedCode("concatenation is implemented for k = 1 codes only")
    return ConcatLayout(outer, inner)


def distance9_witness(layout: ConcatLayout) -> Pauli:
    """Inner minimal logical Z on every block of the outer minimal logical Z."""
    return layout.logical_z()


def commutes_with_all(p: Pauli, ops) -> bool:
    return all(not symplectic(p, q) for q in ops)


def dumps_code(c: CssCode) -> str:
    lines = [f"{c.n} {c.k}"]
    lines += c.hx.to_strings()
    lines.append("")
    lines += c.hz.to_strings()
    lines.append("")
    lines += [v.to_string() for v in c.lx] + [v.to_string() for v in c.lz]
    return "\n".join(lines) + "\n"


def loads_code(text: str, name: str = "loaded") -> CssCode:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    try:
        n, k = (int(t) for t in lines[0].split())
    except (IndexError, ValueError) as exc:
        raise ValueError("first line must be 'n k'") from exc
    sections: list[list[str]] = [[]]
    for line in lines[1:]:
        if line.strip() == "":
            sections.append([])
        else:
            sections[-1].append(line.strip())
    if len(sections) != 3:
        raise ValueError(f"expected 3 blank-separated sections, found {len(sections)}")
    hx = BitMatrix.from_rows(sections[0], ncols=n) if sections[0] else BitMatrix.empty(n)
    hz = BitMatrix.from_rows(sections[1], ncols=n) if sections[1] else BitMatrix.empty(n)
    logicals = [BitVector.from_bits(s) for s in sections[2]]
    if len(logicals) != 2 * k or any(v.n != n for v in logicals):
        raise ValueError(f"expected {2 * k} logical rows of length {n}")
    return CssCode(name, n, k, hx, hz, tuple(logicals[:k]), tuple(logicals[k:]))
