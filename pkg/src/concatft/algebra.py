"""GF(2) linear algebra and Pauli-group arithmetic.

Bit vectors are packed into Python integers: bit ``j`` of the integer is
position ``j`` (qubit ``j``).  Text renderings put position 0 leftmost.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class ShapeError(ValueError):
    """Raised for ragged matrices or mismatched operand lengths."""


def popcount(v: int) -> int:
    return v.bit_count()


def parity(v: int) -> int:
    return v.bit_count() & 1


def lex_key(v: int, n: int) -> int:
    """Integer whose order matches string order with position 0 leftmost."""
    return int(format(v, f"0{n}b")[::-1], 2) if n else 0


def _bits_from(seq: Iterable[int] | str) -> tuple[int, int]:
    if isinstance(seq, str):
        seq = [int(ch) for ch in seq.strip()]
    value = 0
    n = 0
    for j, b in enumerate(seq):
        if b not in (0, 1):
            raise ValueError(f"bit {j} is {b!r}, expected 0 or 1")
        value |= b << j
        n = j + 1
    return value, n


@dataclass(frozen=True)
class BitVector:
    bits: int
    n: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n:
            raise ShapeError(f"value {self.bits:#x} does not fit in {self.n} bits")

    @classmethod
    def from_bits(cls, seq: Iterable[int] | str) -> BitVector:
        value, n = _bits_from(seq)
        return cls(value, n)

    @classmethod
    def zeros(cls, n: int) -> BitVector:
        return cls(0, n)

    @classmethod
    def from_support(cls, support: Iterable[int], n: int) -> BitVector:
        value = 0
        for j in support:
            value |= 1 << j
        return cls(value, n)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.n:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __iter__(self):
        return (((self.bits >> j) & 1) for j in range(self.n))

    def __xor__(self, other: BitVector) -> BitVector:
        _same_length(self.n, other.n)
        return BitVector(self.bits ^ other.bits, self.n)

    __add__ = __xor__

    def __and__(self, other: BitVector) -> BitVector:
        _same_length(self.n, other.n)
        return BitVector(self.bits & other.bits, self.n)

    def dot(self, other: BitVector) -> int:
        _same_length(self.n, other.n)
        return parity(self.bits & other.bits)

    @property
    def weight(self) -> int:
        return popcount(self.bits)

    def support(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if (self.bits >> j) & 1)

    def to_string(self) -> str:
        return "".join(str(b) for b in self)

    def __str__(self) -> str:
        return self.to_string()


def _same_length(a: int, b: int) -> None:
    if a != b:
        raise ShapeError(f"length mismatch: {a} != {b}")


@dataclass(frozen=True)
class BitMatrix:
    """Rows stored as packed integers over ``ncols`` columns."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise ShapeError(f"row {r:#x} wider than {self.ncols} columns")

    @classmethod
    def from_rows(cls, rows: Sequence[Iterable[int] | str | BitVector], ncols: int | None = None) -> BitMatrix:
        packed = []
        widths = set()
        for row in rows:
            if isinstance(row, BitVector):
                packed.append(row.bits)
                widths.add(row.n)
            else:
                value, n = _bits_from(row)
                packed.append(value)
                widths.add(n)
        if ncols is not None:
            widths.add(ncols)
        if len(widths) > 1:
            raise ShapeError(f"ragged matrix: row lengths {sorted(widths)}")
        if not widths:
            raise ShapeError("cannot infer width of an empty matrix; pass ncols")
        return cls(tuple(packed), widths.pop())

    @classmethod
    def empty(cls, ncols: int) -> BitMatrix:
        return cls((), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    def row(self, i: int) -> BitVector:
        return BitVector(self.rows[i], self.ncols)

    def __iter__(self):
        return (BitVector(r, self.ncols) for r in self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def mul_vec(self, v: BitVector | int) -> int:
        """Return ``M v`` packed with bit ``i`` = row ``i`` parity."""
        bits = v.bits if isinstance(v, BitVector) else v
        out = 0
        for i, r in enumerate(self.rows):
            out |= parity(r & bits) << i
        return out

    def column(self, j: int) -> int:
        return sum(((r >> j) & 1) << i for i, r in enumerate(self.rows))

    def rank(self) -> int:
        return gf2_row_reduce(self)[1]

    def vstack(self, other: BitMatrix) -> BitMatrix:
        _same_length(self.ncols, other.ncols)
        return BitMatrix(self.rows + other.rows, self.ncols)

    def to_strings(self) -> list[str]:
        return [BitVector(r, self.ncols).to_string() for r in self.rows]


def gf2_row_reduce(m: BitMatrix) -> tuple[BitMatrix, int]:
    """Reduced row echelon form; pivots scan columns from position 0."""
    rows = list(m.rows)
    rank = 0
    for col in range(m.ncols):
        bit = 1 << col
        pivot = next((i for i in range(rank, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i] ^= rows[rank]
        rank += 1
    return BitMatrix(tuple(rows[:rank]) + (0,) * (len(rows) - rank), m.ncols), rank


def pivot_columns(rref: BitMatrix) -> list[int]:
    cols = []
    for r in rref.rows:
        if r:
            cols.append((r & -r).bit_length() - 1)
    return cols


def gf2_nullspace(m: BitMatrix) -> BitMatrix:
    """Basis of ``{v : m v = 0}``, one basis vector per free column."""
    rref, rank = gf2_row_reduce(m)
    pivots = pivot_columns(rref)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivot_set:
            continue
        v = 1 << free
        for r, p in zip(rref.rows[:rank], pivots):
            if (r >> free) & 1:
                v |= 1 << p
        basis.append(v)
    return BitMatrix(tuple(basis), m.ncols)


def row_space(m: BitMatrix, limit: int = 1 << 20) -> list[int]:
    """Every element of the row space (enumerated from an echelon basis)."""
    rref, rank = gf2_row_reduce(m)
    if (1 << rank) > limit:
        raise OverflowError(f"row space of rank {rank} exceeds enumeration limit")
    span = [0]
    for r in rref.rows[:rank]:
        span += [v ^ r for v in span]
    return span


def in_row_space(v: int, m: BitMatrix) -> bool:
    rref, rank = gf2_row_reduce(m)
    for r in rref.rows[:rank]:
        lead = r & -r
        if v & lead:
            v ^= r
    return v == 0


def same_row_space(a: BitMatrix, b: BitMatrix) -> bool:
    _same_length(a.ncols, b.ncols)
    ra, rb = a.rank(), b.rank()
    return ra == rb == a.vstack(b).rank()


# Single-qubit letters indexed by (x, z).
_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_FROM_LETTER = {v: k for k, v in _LETTER.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class Pauli:
    """``i**phase`` times a tensor product of I, X, Y, Z.

    ``(x_j, z_j) = (1, 1)`` denotes Y itself (Hermitian form), so every
    phase-0 Pauli is Hermitian.
    """

    x: int
    z: int
    n: int
    phase: int = 0

    def __post_init__(self):
        if (self.x >> self.n) or (self.z >> self.n) or self.x < 0 or self.z < 0:
            raise ShapeError(f"Pauli bits exceed {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> Pauli:
        return cls(0, 0, n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> Pauli:
        if not 0 <= qubit < n:
            raise ShapeError(f"qubit {qubit} out of range for {n} qubits")
        xb, zb = _FROM_LETTER[letter]
        return cls(xb << qubit, zb << qubit, n)

    @classmethod
    def from_string(cls, text: str) -> Pauli:
        text = text.strip()
        phase = 0
        for prefix, ph in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2), ("i", 1)):
            if text.startswith(prefix):
                phase = ph
                text = text[len(prefix):]
                break
        x = z = 0
        for j, ch in enumerate(text):
            xb, zb = _FROM_LETTER[ch.upper()]
            x |= xb << j
            z |= zb << j
        return cls(x, z, len(text), phase)

    @classmethod
    def from_sparse(cls, n: int, factors: dict[int, str]) -> Pauli:
        x = z = 0
        for q, letter in factors.items():
            if not 0 <= q < n:
                raise ShapeError(f"qubit {q} out of range for {n} qubits")
            xb, zb = _FROM_LETTER[letter]
            x |= xb << q
            z |= zb << q
        return cls(x, z, n)

    @classmethod
    def x_type(cls, v: BitVector) -> Pauli:
        return cls(v.bits, 0, v.n)

    @classmethod
    def z_type(cls, v: BitVector) -> Pauli:
        return cls(0, v.bits, v.n)

    @property
    def xv(self) -> BitVector:
        return BitVector(self.x, self.n)

    @property
    def zv(self) -> BitVector:
        return BitVector(self.z, self.n)

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    def letter(self, q: int) -> str:
        return _LETTER[((self.x >> q) & 1, (self.z >> q) & 1)]

    def unsigned(self) -> Pauli:
        return Pauli(self.x, self.z, self.n) if self.phase else self

    @property
    def is_identity(self) -> bool:
        return not (self.x or self.z)

    def restrict(self, qubits: Sequence[int]) -> Pauli:
        """Local Pauli on ``qubits`` (phase kept only if nothing else is dropped)."""
        x = z = 0
        for k, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << k
            z |= ((self.z >> q) & 1) << k
        return Pauli(x, z, len(qubits))

    def embed(self, qubits: Sequence[int], n: int) -> Pauli:
        if len(qubits) != self.n:
            raise ShapeError("embedding needs one target per local qubit")
        x = z = 0
        for k, q in enumerate(qubits):
            x |= ((self.x >> k) & 1) << q
            z |= ((self.z >> k) & 1) << q
        return Pauli(x, z, n, self.phase)

    def __mul__(self, other: Pauli) -> Pauli:
        return pauli_mul(self, other)

    def to_string(self, signed: bool = True) -> str:
        body = "".join(self.letter(q) for q in range(self.n))
        return (_PHASE_PREFIX[self.phase] + body) if signed else body

    def sparse(self) -> str:
        parts = [f"{self.letter(q)}{q}" for q in range(self.n) if (self.support >> q) & 1]
        return "*".join(parts) if parts else "I"

    def __str__(self) -> str:
        return self.to_string()


def _check_pair(p: Pauli, q: Pauli) -> None:
    if p.n != q.n:
        raise ShapeError(f"Pauli length mismatch: {p.n} != {q.n}")


def symplectic(p: Pauli, q: Pauli) -> int:
    return parity((p.x & q.z) ^ (p.z & q.x))


def pauli_commutes(p: Pauli, q: Pauli) -> int:
    """0 when ``p`` and ``q`` commute, 1 when they anticommute."""
    _check_pair(p, q)
    return symplectic(p, q)


def pauli_mul(p: Pauli, q: Pauli) -> Pauli:
    _check_pair(p, q)
    px, pz, qx, qz = p.x, p.z, q.x, q.z
    pX, pY, pZ = px & ~pz, px & pz, pz & ~px
    qX, qY, qZ = qx & ~qz, qx & qz, qz & ~qx
    # XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i.
    plus = popcount((pX & qY) | (pY & qZ) | (pZ & qX))
    minus = popcount((pX & qZ) | (pY & qX) | (pZ & qY))
    return Pauli(px ^ qx, pz ^ qz, p.n, p.phase + q.phase + plus - minus)


def pauli_weight(p: Pauli) -> int:
    return p.weight
