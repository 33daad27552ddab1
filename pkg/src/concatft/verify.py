"""Exhaustive fault campaigns over exRecs and the weight-2 witness search."""

from __future__ import annotations

import hashlib
import itertools
import json
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .algebra import Pauli
from .circuit import FaultEvent, Location, enumerate_faults, enumerate_locations, fault_alphabet, propagate
from .decode import lookup_for, residual_logical_action
from .gadgets import ExRec
from .tape import CaseBatch, Tape, block_error_batch, compile_exrec, encode_cases, slice_batch

CHUNK = 8192
DEFAULT_BUDGET = 10_000_000


@dataclass
class Failure:
    faults: tuple[FaultEvent, ...]
    branch: int
    residual: Pauli
    logical_class: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "faults": [f.describe() for f in self.faults],
            "branch": self.branch,
            "residual_pauli": self.residual.sparse(),
            "logical_class": list(self.logical_class),
        }


@dataclass
class VerificationReport:
    gadget: str
    campaign: str
    cases: int
    passes: int
    failures: list[Failure]
    config_hash: str
    status: str  # "pass", "fail", "witness" or "exhausted"
    wall_clock: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        # wall-clock time stays out of the JSON so reports are byte-identical
        return {
            "gadget": self.gadget,
            "campaign": self.campaign,
            "status": self.status,
            "cases": self.cases,
            "passes": self.passes,
            "failures": [f.to_dict() for f in self.failures],
            "config_hash": self.config_hash,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def config_hash(exrec: ExRec, campaign: str, **extra) -> str:
    h = hashlib.sha256()
    h.update(json.dumps({"campaign": campaign, **extra}, sort_keys=True).encode())
    h.update(exrec.to_text().encode())
    h.update(lookup_for(exrec.layout.inner).digest().encode())
    h.update(lookup_for(exrec.layout.outer).digest().encode())
    return h.hexdigest()


# Worker state is inherited through fork; nothing is pickled per task.
_WORKER: dict = {}


def _work(span: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    tape, batch = _WORKER["tape"], _WORKER["batch"]
    return _kernels.run_batch(tape, slice_batch(batch, *span))


def _run(tape: Tape, batch: CaseBatch, jobs: int = 1) -> tuple[np.ndarray, np.ndarray]:
    n = len(batch)
    if jobs <= 1 or n <= CHUNK:
        return _kernels.run_batch(tape, batch)
    spans = [(lo, min(lo + CHUNK, n)) for lo in range(0, n, CHUNK)]
    _WORKER.update(tape=tape, batch=batch)
    try:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            parts = list(pool.map(_work, spans))
    finally:
        _WORKER.clear()
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _unpack_class(packed: int, width: int) -> tuple[int, ...]:
    return tuple((packed >> i) & 1 for i in range(width))


def replay(exrec: ExRec, faults: Sequence[FaultEvent]):
    """Reference evaluation through ``propagate`` and the decoding pipeline."""
    branches = propagate(exrec.circuit, *faults)
    return residual_logical_action(exrec.layout, [b.residual for b in branches], (), exrec.registers)


def _failure(exrec: ExRec, faults: Sequence[FaultEvent], branch: int, packed: int, nclass: int) -> Failure:
    res = replay(exrec, faults)
    want = _unpack_class(packed, nclass)
    if res.passed or res.branch != branch or tuple(res.logical_class) != want:
        raise RuntimeError(f"kernel and reference disagree on {[f.describe() for f in faults]}")
    return Failure(tuple(faults), branch, res.residual, want)


def _report(exrec, campaign, cases, case_faults, fail, klass, tape, chash, status=None, t0=0.0):
    failures = [
        _failure(exrec, case_faults(i), int(fail[i]), int(klass[i]), tape.nclass)
        for i in np.nonzero(fail >= 0)[0]
    ]
    if status is None:
        status = "fail" if failures else "pass"
    return VerificationReport(exrec.name, campaign, cases, cases - len(failures), failures, chash, status,
                              time.perf_counter() - t0)


def single_fault_cases(exrec: ExRec) -> list[FaultEvent]:
    if exrec.fault_model != "circuit":
        raise ValueError(f"{exrec.name} uses the {exrec.fault_model} fault model")
    return enumerate_faults(exrec.circuit)


def run_single_fault_campaign(exrec: ExRec, jobs: int = 1) -> VerificationReport:
    """Every location, every nontrivial fault there, every T branch."""
    t0 = time.perf_counter()
    faults = single_fault_cases(exrec)
    tape = compile_exrec(exrec)
    fail, klass = _run(tape, encode_cases(exrec.circuit, [[f] for f in faults]), jobs)
    chash = config_hash(exrec, "single")
    return _report(exrec, "single", len(faults), lambda i: (faults[i],), fail, klass, tape, chash, t0=t0)


def coset_representatives(layout) -> tuple[np.ndarray, np.ndarray]:
    """``(x, z)`` packed over one block, ordered by (syndrome, class); the
    class index ``c`` multiplies in ``LX**(c & 1) * LZ**(c >> 1)``."""
    t = lookup_for(layout.inner)
    lx, lz = layout.inner.lx[0].bits, layout.inner.lz[0].bits
    cx = np.asarray(t.cx, dtype=np.int64)
    cz = np.asarray(t.cz, dtype=np.int64)
    c = np.arange(4)
    x = (cx[:, None] ^ (lx * (c & 1))[None, :]).ravel()
    z = (cz[:, None] ^ (lz * (c >> 1))[None, :]).ravel()
    return x, z


def _block_batch(layout, blocks: np.ndarray, xs: np.ndarray, zs: np.ndarray) -> CaseBatch:
    """One case per row; ``blocks[i]``, ``xs[i]``, ``zs[i]`` may hold several
    block errors (columns), all injected at position 0."""
    m = layout.block_size
    ks = np.arange(m)
    xb = ((xs[..., None] >> ks) & 1).astype(np.uint8)
    zb = ((zs[..., None] >> ks) & 1).astype(np.uint8)
    qubit = (blocks[..., None] * m + ks).astype(np.int32)
    ncase = xs.shape[0]
    xb, zb, qubit = xb.reshape(ncase, -1), zb.reshape(ncase, -1), qubit.reshape(ncase, -1)
    keep = (xb | zb).astype(bool)
    counts = keep.sum(axis=1)
    ptr = np.zeros(ncase + 1, dtype=np.int32)
    np.cumsum(counts, out=ptr[1:])
    tot = int(ptr[-1])
    return CaseBatch(ptr, np.zeros(tot, dtype=np.int32), np.zeros(tot, dtype=np.int32),
                     qubit[keep], xb[keep], zb[keep])


def block_fault(layout, block: int, x: int, z: int) -> FaultEvent:
    m = layout.block_size
    qubits = tuple(range(block * m, (block + 1) * m))
    return FaultEvent(Location("block", block, qubits), Pauli(int(x) << (block * m), int(z) << (block * m), layout.n))


def run_block_error_campaign(exrec: ExRec, jobs: int = 1) -> VerificationReport:
    """Every coset representative of every block, injected after the gadget."""
    if exrec.fault_model != "block":
        raise ValueError(f"{exrec.name} does not use the block fault model")
    t0 = time.perf_counter()
    layout = exrec.layout
    rx, rz = coset_representatives(layout)
    nb = layout.block_count
    blocks = np.repeat(np.arange(nb), len(rx))[:, None]
    xs = np.tile(rx, nb)[:, None]
    zs = np.tile(rz, nb)[:, None]
    tape = compile_exrec(exrec)
    fail, klass = _run(tape, _block_batch(layout, blocks, xs, zs), jobs)

    def faults(i):
        return (block_fault(layout, int(blocks[i, 0]), xs[i, 0], zs[i, 0]),)

    chash = config_hash(exrec, "block")
    return _report(exrec, "block", len(xs), faults, fail, klass, tape, chash, t0=t0)


def _location_blocks(exrec: ExRec, loc: Location) -> frozenset[int]:
    m = exrec.layout.block_size
    if loc.kind == "flip":
        step = exrec.circuit.steps[exrec.circuit.measure_step()[loc.index]]
        sup = step.observable.support
        return frozenset(q // m for q in range(exrec.circuit.n) if (sup >> q) & 1)
    return frozenset(q // m for q in loc.qubits)


def circuit_fault_pairs(exrec: ExRec) -> Iterator[tuple[FaultEvent, FaultEvent]]:
    """Pairs of faults at distinct locations: pairs whose locations share a
    block first, then the rest; each group in lexicographic location order."""
    locs = enumerate_locations(exrec.circuit)
    blocks = [_location_blocks(exrec, loc) for loc in locs]
    alph = [fault_alphabet(loc, exrec.circuit.n) for loc in locs]
    for shared in (True, False):
        for i, j in itertools.combinations(range(len(locs)), 2):
            if bool(blocks[i] & blocks[j]) != shared:
                continue
            for f in alph[i]:
                for g in alph[j]:
                    yield f, g


def _nonidentity_block_pairs(layout) -> Iterator[tuple[int, int, int, int, int, int]]:
    rx, rz = coset_representatives(layout)
    idx = range(1, len(rx))  # representative 0 is the identity
    for b1, b2 in itertools.combinations(range(layout.block_count), 2):
        for r1 in idx:
            for r2 in idx:
                yield b1, int(rx[r1]), int(rz[r1]), b2, int(rx[r2]), int(rz[r2])


def search_double_fault_counterexample(exrec: ExRec, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> VerificationReport:
    """First fault pair (in search order) leaving a global logical fault, or
    an 'exhausted' report if none is found within ``budget`` cases."""
    t0 = time.perf_counter()
    layout = exrec.layout
    tape = compile_exrec(exrec)
    chash = config_hash(exrec, "double", budget=budget)
    block_model = exrec.fault_model == "block"
    if block_model:
        source = _nonidentity_block_pairs(layout)
    else:
        source = circuit_fault_pairs(exrec)
    seen = 0
    step = CHUNK * max(1, jobs)
    while seen < budget:
        chunk = list(itertools.islice(source, min(step, budget - seen)))
        if not chunk:
            break
        if block_model:
            arr = np.asarray(chunk, dtype=np.int64)
            batch = _block_batch(layout, arr[:, [0, 3]], arr[:, [1, 4]], arr[:, [2, 5]])
            to_faults = lambda t: (block_fault(layout, t[0], t[1], t[2]), block_fault(layout, t[3], t[4], t[5]))
        else:
            batch = encode_cases(exrec.circuit, chunk)
            to_faults = lambda t: t
        fail, klass = _run(tape, batch, jobs)
        hits = np.nonzero(fail >= 0)[0]
        if len(hits):
            i = int(hits[0])
            w = _failure(exrec, to_faults(chunk[i]), int(fail[i]), int(klass[i]), tape.nclass)
            cases = seen + i + 1
            return VerificationReport(exrec.name, "double", cases, cases - 1, [w], chash, "witness",
                                      time.perf_counter() - t0)
        seen += len(chunk)
    return VerificationReport(exrec.name, "double", seen, seen, [], chash, "exhausted", time.perf_counter() - t0)


def expected_case_count(exrec: ExRec) -> int:
    """Sum of alphabet sizes over locations, counted from the location list."""
    return sum(1 if loc.kind == "flip" else 3 if len(loc.qubits) == 1 else 15 for loc in enumerate_locations(exrec.circuit))
