"""Two-level lookup decoding for the concatenated code."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .algebra import Pauli, lex_key
from .codes import BudgetExceeded, ConcatLayout, CssCode, logical_class, syndrome_int

# Largest qubit count for which the full 2**n coset tables are built.
LOOKUP_MAX_QUBITS = 16


@dataclass(frozen=True, eq=False)
class LookupTable:
    """Minimum-weight correction for every syndrome of ``code``.

    ``cx[s]``/``cz[s]`` are the packed X and Z parts of the correction for the
    syndrome whose packed value is ``s`` (``syndrome_int`` ordering).
    """

    code: CssCode
    cx: tuple[int, ...]
    cz: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.cx)

    def __getitem__(self, s: int) -> Pauli:
        return Pauli(self.cx[s], self.cz[s], self.code.n)

    def correct(self, x: int, z: int) -> tuple[int, int]:
        s = syndrome_int(self.code, x, z)
        return x ^ self.cx[s], z ^ self.cz[s]

    def export_text(self) -> str:
        width = max(1, (self.code.syndrome_bits + 3) // 4)
        lines = [f"{s:0{width}x} {self[s].to_string(signed=False)}" for s in range(len(self))]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.export_text().encode()).hexdigest()


def _popcount_array(v: np.ndarray) -> np.ndarray:
    out = np.zeros(v.shape, dtype=np.int64)
    w = v.copy()
    while w.any():
        out += w & 1
        w >>= 1
    return out


def _parity_rows(vals: np.ndarray, rows: Sequence[int]) -> np.ndarray:
    s = np.zeros(vals.shape, dtype=np.int64)
    for i, r in enumerate(rows):
        s |= (_popcount_array(vals & r) & 1) << i
    return s


def build_lookup(c: CssCode) -> LookupTable:
    """For each syndrome: the minimum-weight Pauli, ties broken by the
    lexicographic order of (x-bits, z-bits) with qubit 0 leftmost.

    Weight is ``|supp x | supp z|``, so the search runs over X-coset
    candidates ``x`` and, per candidate, the best completion ``z`` for every
    Z-syndrome at once.
    """
    n = c.n
    if n > LOOKUP_MAX_QUBITS:
        raise BudgetExceeded(f"lookup tables are limited to {LOOKUP_MAX_QUBITS} qubits")
    mz, mx = c.hz.nrows, c.hx.nrows
    allv = np.arange(1 << n, dtype=np.int64)
    weight = _popcount_array(allv)
    lex = np.array([lex_key(int(v), n) for v in allv], dtype=np.int64)
    from_lex = np.empty_like(allv)
    from_lex[lex] = allv
    sx_of = _parity_rows(allv, c.hz.rows)
    sz_of = _parity_rows(allv, c.hx.rows)

    nsx, nsz = 1 << mz, 1 << mx
    big = np.iinfo(np.int64).max
    wx_min = np.full(nsx, big)
    np.minimum.at(wx_min, sx_of, weight)
    wz_min = np.full(nsz, big)
    np.minimum.at(wz_min, sz_of, weight)
    reach_z = wz_min < big
    slack = int(wz_min[reach_z].max())

    # z values grouped by Z-syndrome for a segmented minimum.
    z_order = np.argsort(sz_of, kind="stable")
    z_sorted = allv[z_order]
    z_lex_sorted = lex[z_order]
    starts = np.searchsorted(sz_of[z_order], np.arange(nsz))
    present = np.isin(np.arange(nsz), sz_of)
    shift = n + 1
    full = (1 << n) - 1

    best_cost = np.full((nsx, nsz), big)
    best_xlex = np.full((nsx, nsz), big)
    best_zlex = np.full((nsx, nsz), big)
    x_by_lex = from_lex  # iterate x in lexicographic order
    for x in x_by_lex:
        x = int(x)
        sx = int(sx_of[x])
        wx = int(weight[x])
        if wx > wx_min[sx] + slack:
            continue
        extra = weight[z_sorted & (full ^ x)]
        key = ((wx + extra) << shift) | z_lex_sorted
        seg = np.minimum.reduceat(key, starts[present])
        cost = seg >> shift
        zl = seg & ((1 << shift) - 1)
        cols = np.nonzero(present)[0]
        cur = best_cost[sx, cols]
        better = cost < cur
        if better.any():
            idx = cols[better]
            best_cost[sx, idx] = cost[better]
            best_xlex[sx, idx] = lex[x]
            best_zlex[sx, idx] = zl[better]

    size = 1 << (mz + mx)
    cx = [0] * size
    cz = [0] * size
    for sx in range(nsx):
        for sz in range(nsz):
            s = sx | (sz << mz)
            if best_cost[sx, sz] == big:
                # unreachable syndrome (dependent checks): keep identity
                continue
            cx[s] = int(from_lex[best_xlex[sx, sz]])
            cz[s] = int(from_lex[best_zlex[sx, sz]])
    return LookupTable(c, tuple(cx), tuple(cz))


@lru_cache(maxsize=None)
def _cached_lookup(code: CssCode) -> LookupTable:
    return build_lookup(code)


def lookup_for(code: CssCode) -> LookupTable:
    """Process-wide memoised :func:`build_lookup`."""
    return _cached_lookup(code)


@dataclass(frozen=True)
class DecodeOutcome:
    block: int
    syndrome: int
    correction: Pauli
    residual: Pauli
    logical_class: tuple[int, int]


def decode_inner(layout: ConcatLayout, residual: Pauli, offset: int = 0) -> list[DecodeOutcome]:
    """Decode each inner block of one register independently.

    ``offset`` is the first physical qubit of the register inside ``residual``.
    """
    table = lookup_for(layout.inner)
    m = layout.inner.n
    mask = (1 << m) - 1
    out = []
    for b in range(layout.block_count):
        sh = offset + b * m
        x = (residual.x >> sh) & mask
        z = (residual.z >> sh) & mask
        s = syndrome_int(layout.inner, x, z)
        corr = table[s]
        rx, rz = x ^ corr.x, z ^ corr.z
        res = Pauli(rx, rz, m)
        out.append(DecodeOutcome(b, s, corr, res, logical_class(layout.inner, res)))
    return out


@dataclass(frozen=True)
class OuterOutcome:
    correction: Pauli
    global_class: tuple[int, int]


def decode_outer(layout: ConcatLayout, block_classes: Sequence[tuple[int, int]]) -> OuterOutcome:
    """Treat per-block logical classes as an error on the outer code."""
    outer = layout.outer
    ex = sum(a << b for b, (a, _) in enumerate(block_classes))
    ez = sum(c << b for b, (_, c) in enumerate(block_classes))
    table = lookup_for(outer)
    corr = table[syndrome_int(outer, ex, ez)]
    residual = Pauli(ex ^ corr.x, ez ^ corr.z, outer.n)
    return OuterOutcome(corr, logical_class(outer, residual))


def apply_inner_ec(layout: ConcatLayout, p: Pauli, registers: int = 1) -> Pauli:
    x, z = p.x, p.z
    for r in range(registers):
        off = r * layout.n
        for o in decode_inner(layout, p, off):
            sh = off + o.block * layout.block_size
            x ^= o.correction.x << sh
            z ^= o.correction.z << sh
    return Pauli(x, z, p.n)


def apply_outer_ec(layout: ConcatLayout, p: Pauli, registers: int = 1) -> Pauli:
    """Measure the lifted outer checks on ``p`` and apply the lifted correction."""
    x, z = p.x, p.z
    outer_table = lookup_for(layout.outer)
    for r in range(registers):
        off = r * layout.n
        s = 0
        for i, q in enumerate(layout.outer_stabilizers()):
            anti = ((p.x >> off) & q.z) ^ ((p.z >> off) & q.x)
            s |= (anti.bit_count() & 1) << i
        lifted = layout.lift_pauli(outer_table[s])
        x ^= lifted.x << off
        z ^= lifted.z << off
    return Pauli(x, z, p.n)


def ideal_round(layout: ConcatLayout, p: Pauli, registers: int = 1) -> tuple[int, ...]:
    """Ideal inner then outer decoding; returns the global class per register."""
    p = apply_inner_ec(layout, p, registers)
    out: list[int] = []
    for r in range(registers):
        classes = [o.logical_class for o in decode_inner(layout, p, r * layout.n)]
        out.extend(decode_outer(layout, classes).global_class)
    return tuple(out)


@dataclass(frozen=True)
class ActionResult:
    passed: bool
    branch: int | None = None
    residual: Pauli | None = None
    logical_class: tuple[int, ...] | None = None


def residual_logical_action(
    layout: ConcatLayout,
    branches: Iterable[Pauli],
    schedule: Sequence[str] = (),
    registers: int = 1,
) -> ActionResult:
    """Run ``schedule`` ('inner' / 'outer' decoding steps) and the ideal round
    on every branch; fails on the first branch left with a logical fault."""
    for i, p in enumerate(branches):
        q = p
        for step in schedule:
            if step == "inner":
                q = apply_inner_ec(layout, q, registers)
            elif step == "outer":
                q = apply_outer_ec(layout, q, registers)
            else:
                raise ValueError(f"unknown EC step {step!r}")
        cls = ideal_round(layout, q, registers)
        if any(cls):
            return ActionResult(False, i, p, cls)
    return ActionResult(True)
