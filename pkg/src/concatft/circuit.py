"""Gate-level circuits with enumerable fault locations and Pauli propagation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .algebra import Pauli, ShapeError, pauli_mul, symplectic

CLIFFORD_1Q = ("X", "Y", "Z", "H", "S", "Sdg")
DIAGONAL_NON_CLIFFORD = ("T", "Tdg")
GATE_KINDS = CLIFFORD_1Q + DIAGONAL_NON_CLIFFORD + ("CNOT", "MeasurePauli", "CorrectPauli")


@dataclass(frozen=True, eq=False)
class CorrectionTable:
    """Syndrome-indexed corrections on the qubits a CorrectPauli acts on.

    ``entries[s]`` is ``(x, z)`` packed over the gate's qubit list.
    """

    name: str
    entries: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    observable: Pauli | None = None  # MeasurePauli: full-width observable
    bit: int | None = None  # MeasurePauli: output classical bit
    bits: tuple[int, ...] = ()  # CorrectPauli: syndrome bits, bit i -> 2**i
    table: CorrectionTable | None = None  # CorrectPauli

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} acts on repeated qubits {self.qubits}")
        arity = 2 if self.kind == "CNOT" else 1
        if self.kind in CLIFFORD_1Q + DIAGONAL_NON_CLIFFORD + ("CNOT",) and len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s)")
        if self.kind == "MeasurePauli" and (self.observable is None or self.bit is None):
            raise ValueError("MeasurePauli needs an observable and an output bit")
        if self.kind == "CorrectPauli" and self.table is None:
            raise ValueError("CorrectPauli needs a correction table")

    @property
    def is_data_gate(self) -> bool:
        return self.kind != "MeasurePauli"


@dataclass(frozen=True)
class Circuit:
    n: int
    steps: tuple[Gate, ...] = ()
    num_bits: int = 0

    def __post_init__(self):
        written: set[int] = set()
        for i, g in enumerate(self.steps):
            if any(not 0 <= q < self.n for q in g.qubits):
                raise ShapeError(f"step {i}: qubit out of range for {self.n} qubits")
            if g.kind == "MeasurePauli":
                if g.observable.n != self.n:
                    raise ShapeError(f"step {i}: observable width {g.observable.n}")
                if not 0 <= g.bit < self.num_bits or g.bit in written:
                    raise ValueError(f"step {i}: bit {g.bit} invalid or written twice")
                written.add(g.bit)
            elif g.kind == "CorrectPauli":
                missing = [b for b in g.bits if b not in written]
                if missing:
                    raise ValueError(f"step {i}: reads bits {missing} before they are written")

    def __len__(self) -> int:
        return len(self.steps)

    def measure_step(self) -> dict[int, int]:
        return {g.bit: i for i, g in enumerate(self.steps) if g.kind == "MeasurePauli"}

    def to_text(self) -> str:
        return "".join(format_gate(g) + "\n" for g in self.steps)


class CircuitBuilder:
    def __init__(self, n: int):
        self.n = n
        self.steps: list[Gate] = []
        self.num_bits = 0

    def gate(self, kind: str, *qubits: int) -> CircuitBuilder:
        self.steps.append(Gate(kind, tuple(qubits)))
        return self

    def measure(self, observable: Pauli) -> int:
        bit = self.num_bits
        self.num_bits += 1
        support = tuple(q for q in range(self.n) if (observable.support >> q) & 1)
        self.steps.append(Gate("MeasurePauli", support, observable=observable, bit=bit))
        return bit

    def correct(self, qubits: Sequence[int], bits: Sequence[int], table: CorrectionTable) -> CircuitBuilder:
        self.steps.append(Gate("CorrectPauli", tuple(qubits), bits=tuple(bits), table=table))
        return self

    def extend(self, other: Circuit) -> CircuitBuilder:
        """Append ``other`` with its classical bits renumbered after ours."""
        if other.n != self.n:
            raise ShapeError("circuits must have the same width")
        off = self.num_bits
        for g in other.steps:
            if g.kind == "MeasurePauli":
                g = Gate(g.kind, g.qubits, observable=g.observable, bit=g.bit + off)
            elif g.kind == "CorrectPauli":
                g = Gate(g.kind, g.qubits, bits=tuple(b + off for b in g.bits), table=g.table)
            self.steps.append(g)
        self.num_bits += other.num_bits
        return self

    def build(self) -> Circuit:
        return Circuit(self.n, tuple(self.steps), self.num_bits)


def format_gate(g: Gate) -> str:
    if g.kind == "MeasurePauli":
        return f"MeasurePauli {g.observable.sparse()} {g.bit}"
    if g.kind == "CorrectPauli":
        return f"CorrectPauli {g.table.name} {','.join(map(str, g.bits))} {','.join(map(str, g.qubits))}"
    return " ".join([g.kind, *map(str, g.qubits)])


def parse_circuit(text: str, n: int, tables: Mapping[str, CorrectionTable] | None = None) -> Circuit:
    steps = []
    num_bits = 0
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        kind = parts[0]
        if kind == "MeasurePauli":
            factors = {}
            if parts[1] != "I":
                for f in parts[1].split("*"):
                    factors[int(f[1:])] = f[0]
            obs = Pauli.from_sparse(n, factors)
            bit = int(parts[2])
            num_bits = max(num_bits, bit + 1)
            steps.append(Gate(kind, tuple(sorted(factors)), observable=obs, bit=bit))
        elif kind == "CorrectPauli":
            if tables is None or parts[1] not in tables:
                raise ValueError(f"line {lineno}: unknown correction table {parts[1]!r}")
            bits = tuple(int(b) for b in parts[2].split(","))
            qubits = tuple(int(q) for q in parts[3].split(","))
            steps.append(Gate(kind, qubits, bits=bits, table=tables[parts[1]]))
        else:
            steps.append(Gate(kind, tuple(int(q) for q in parts[1:])))
    return Circuit(n, tuple(steps), num_bits)


@dataclass(frozen=True)
class Location:
    """A fault site.

    ``kind`` is ``input`` (before step 0), ``after_gate`` (after step
    ``index``), ``flip`` (outcome of bit ``index``) or ``block`` (an arbitrary
    error on block ``index`` under the block error model).
    """

    kind: str
    index: int
    qubits: tuple[int, ...] = ()

    def describe(self) -> str:
        q = ",".join(map(str, self.qubits))
        return f"{self.kind}:{self.index}" + (f"@{q}" if q else "")


@dataclass(frozen=True)
class FaultEvent:
    location: Location
    pauli: Pauli | None = None  # None for an outcome flip

    def describe(self) -> str:
        what = "flip" if self.pauli is None else self.pauli.restrict(self.location.qubits).to_string(signed=False)
        return f"{self.location.describe()}={what}"


def enumerate_locations(c: Circuit) -> list[Location]:
    """Inputs, then after-gate sites in step order, then outcome flips."""
    locs = [Location("input", q, (q,)) for q in range(c.n)]
    for i, g in enumerate(c.steps):
        if g.kind == "MeasurePauli":
            continue
        if g.kind == "CorrectPauli":
            # a correction is a layer of single-qubit gates
            locs += [Location("after_gate", i, (q,)) for q in g.qubits]
        else:
            locs.append(Location("after_gate", i, g.qubits))
    bits = sorted(c.measure_step())
    locs += [Location("flip", b) for b in bits]
    return locs


_LETTERS = "IXYZ"


def fault_alphabet(loc: Location, n: int) -> list[FaultEvent]:
    """The nontrivial faults at ``loc``: 3 per qubit, 15 per qubit pair, one flip."""
    if loc.kind == "flip":
        return [FaultEvent(loc)]
    events = []
    if len(loc.qubits) == 1:
        for a in "XYZ":
            events.append(FaultEvent(loc, Pauli.single(n, loc.qubits[0], a)))
    elif len(loc.qubits) == 2:
        q0, q1 = loc.qubits
        for a in _LETTERS:
            for b in _LETTERS:
                if a == b == "I":
                    continue
                factors = {}
                if a != "I":
                    factors[q0] = a
                if b != "I":
                    factors[q1] = b
                events.append(FaultEvent(loc, Pauli.from_sparse(n, factors)))
    else:
        raise ValueError(f"no fault alphabet for {len(loc.qubits)}-qubit location")
    return events


def enumerate_faults(c: Circuit) -> list[FaultEvent]:
    return [f for loc in enumerate_locations(c) for f in fault_alphabet(loc, c.n)]


def fault_position(c: Circuit, f: FaultEvent, _mstep: dict | None = None) -> int:
    """Index of the first step that sees ``f``."""
    loc = f.location
    if loc.kind in ("input", "block"):
        return 0
    if loc.kind == "after_gate":
        return loc.index + 1
    if loc.kind == "flip":
        mstep = _mstep if _mstep is not None else c.measure_step()
        return mstep[loc.index] + 1
    raise ValueError(f"unknown location kind {loc.kind!r}")


# Exact images of X_q and Z_q under single-qubit Cliffords.
_CLIFFORD_IMAGES = {
    "X": {"X": "+X", "Z": "-Z"},
    "Y": {"X": "-X", "Z": "-Z"},
    "Z": {"X": "-X", "Z": "+Z"},
    "H": {"X": "+Z", "Z": "+X"},
    "S": {"X": "+Y", "Z": "+Z"},
    "Sdg": {"X": "-Y", "Z": "+Z"},
}


def _image(n: int, q: int, rule: str) -> Pauli:
    p = Pauli.single(n, q, rule[1])
    return Pauli(p.x, p.z, n, 0 if rule[0] == "+" else 2)


def _conjugate_clifford(g: Gate, p: Pauli) -> Pauli:
    # p = i^(phase + #Y) * prod X^x * prod Z^z, then map each generator.
    n = p.n
    active = 0
    for q in g.qubits:
        active |= 1 << q
    if not (p.support & active):
        return p
    rest = Pauli(p.x & ~active, p.z & ~active, n)
    local_y = ((p.x & p.z) & active).bit_count()
    result = pauli_mul(Pauli(0, 0, n, p.phase + local_y), rest)
    if g.kind == "CNOT":
        c, t = g.qubits
        images = {
            ("X", c): Pauli((1 << c) | (1 << t), 0, n),
            ("X", t): Pauli(1 << t, 0, n),
            ("Z", c): Pauli(0, 1 << c, n),
            ("Z", t): Pauli(0, (1 << c) | (1 << t), n),
        }
    else:
        (q,) = g.qubits
        rule = _CLIFFORD_IMAGES[g.kind]
        images = {("X", q): _image(n, q, rule["X"]), ("Z", q): _image(n, q, rule["Z"])}
    # Local part is (prod X^x)(prod Z^z); map X generators first.
    xs = [q for q in g.qubits if (p.x >> q) & 1]
    zs = [q for q in g.qubits if (p.z >> q) & 1]
    for q in xs:
        result = pauli_mul(result, images[("X", q)])
    for q in zs:
        result = pauli_mul(result, images[("Z", q)])
    return result


def conjugate_pauli(g: Gate, p: Pauli) -> list[Pauli]:
    """``g p g^dagger`` for Cliffords; the {X, Y} branch set for T/Tdg on a
    qubit with X content (branch phases dropped)."""
    if g.kind in ("MeasurePauli", "CorrectPauli"):
        return [p]
    if g.kind in DIAGONAL_NON_CLIFFORD:
        (q,) = g.qubits
        bit = 1 << q
        if not p.x & bit:
            return [p]
        return [Pauli(p.x, p.z & ~bit, p.n), Pauli(p.x, p.z | bit, p.n)]
    return [_conjugate_clifford(g, p)]


@dataclass(frozen=True)
class Branch:
    residual: Pauli
    flips: int  # bit b set when outcome b differs from the fault-free run


def _apply_correction(g: Gate, p: Pauli, flips: int) -> Pauli:
    s = 0
    for i, b in enumerate(g.bits):
        s |= ((flips >> b) & 1) << i
    cx, cz = g.table.entries[s]
    if not (cx or cz):
        return p
    x = z = 0
    for k, q in enumerate(g.qubits):
        x |= ((cx >> k) & 1) << q
        z |= ((cz >> k) & 1) << q
    return pauli_mul(p, Pauli(x, z, p.n))


def propagate(c: Circuit, *faults: FaultEvent) -> list[Branch]:
    """Push faults to the end of ``c``; one Branch per T-gate branch choice.

    Branches are ordered lexicographically by their choices (X before Y).
    """
    mstep = c.measure_step()
    pending: dict[int, list[FaultEvent]] = {}
    for f in faults:
        pending.setdefault(fault_position(c, f, mstep), []).append(f)
    start = min(pending, default=len(c.steps))
    branches = [Branch(Pauli.identity(c.n), 0)]

    def inject(bs: list[Branch], fs: Iterable[FaultEvent]) -> list[Branch]:
        out = []
        for b in bs:
            p, fl = b.residual, b.flips
            for f in fs:
                if f.pauli is None:
                    fl ^= 1 << f.location.index
                else:
                    if f.pauli.n != c.n:
                        raise ShapeError("fault width does not match circuit")
                    p = pauli_mul(p, f.pauli)
            out.append(Branch(p, fl))
        return out

    for i in range(start, len(c.steps)):
        if i in pending:
            branches = inject(branches, pending[i])
        g = c.steps[i]
        nxt = []
        for b in branches:
            if g.kind == "MeasurePauli":
                nxt.append(Branch(b.residual, b.flips ^ (symplectic(b.residual, g.observable) << g.bit)))
            elif g.kind == "CorrectPauli":
                nxt.append(Branch(_apply_correction(g, b.residual, b.flips), b.flips))
            else:
                nxt += [Branch(p, b.flips) for p in conjugate_pauli(g, b.residual)]
        branches = nxt
    if len(c.steps) in pending:
        branches = inject(branches, pending[len(c.steps)])
    return branches
