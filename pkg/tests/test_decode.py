import itertools
import random

import pytest

from concatft.algebra import Pauli, lex_key
from concatft.codes import BudgetExceeded, logical_class, syndrome_int
from concatft.decode import (
    build_lookup,
    decode_inner,
    decode_outer,
    ideal_round,
    lookup_for,
    residual_logical_action,
)


def brute_table(c, max_weight):
    """Weight-by-weight scan, keeping the (weight, x, z)-least Pauli per syndrome."""
    best = {0: (0, 0, 0, 0, 0)}
    for w in range(1, max_weight + 1):
        for sup in itertools.combinations(range(c.n), w):
            for letters in itertools.product((1, 2, 3), repeat=w):
                x = z = 0
                for q, l in zip(sup, letters):
                    if l & 1:
                        x |= 1 << q
                    if l & 2:
                        z |= 1 << q
                s = syndrome_int(c, x, z)
                key = (w, lex_key(x, c.n), lex_key(z, c.n), x, z)
                if s not in best or key < best[s]:
                    best[s] = key
    return best


def test_steane_table_against_scan(steane):
    t = lookup_for(steane)
    best = brute_table(steane, 3)
    assert len(best) == 64
    for s, (w, _, _, x, z) in best.items():
        assert (t.cx[s], t.cz[s]) == (x, z)


def test_rm15_table_against_scan(rm15):
    t = lookup_for(rm15)
    best = brute_table(rm15, 5)
    assert len(best) == len(t) == 1 << 14
    # every syndrome, not just a sample: the scan is already complete
    for s, (_, _, _, x, z) in best.items():
        assert (t.cx[s], t.cz[s]) == (x, z)
    assert max(t[s].weight for s in range(len(t))) == 5


def test_table_entries_reproduce_syndrome(rm15):
    t = lookup_for(rm15)
    for s in range(len(t)):
        assert syndrome_int(rm15, t.cx[s], t.cz[s]) == s


def test_table_examples(steane, rm15):
    assert lookup_for(steane)[0].is_identity
    s = syndrome_int(steane, 1, 0)
    assert lookup_for(steane)[s] == Pauli.single(7, 0, "X")
    t = lookup_for(rm15)
    xs = [syndrome_int(rm15, 1 << q, 0) for q in range(15)]
    zs = [syndrome_int(rm15, 0, 1 << q) for q in range(15)]
    ys = [syndrome_int(rm15, 1 << q, 1 << q) for q in range(15)]
    entries = xs + zs + ys
    assert len(set(t[s] for s in entries)) == 45


def test_rebuild_is_identical(steane):
    a, b = build_lookup(steane), build_lookup(steane)
    assert a.digest() == b.digest()
    assert a.export_text().splitlines()[0] == "00 IIIIIII"


def test_lookup_refuses_large_codes(layout):
    with pytest.raises(BudgetExceeded):
        build_lookup(layout.code)


def test_decode_inner_examples(layout, rm15):
    assert all(o.logical_class == (0, 0) for o in decode_inner(layout, Pauli.identity(105)))
    e = Pauli.single(105, layout.qubit(2, 9), "X")
    outs = decode_inner(layout, e)
    assert outs[2].correction == Pauli.single(15, 9, "X")
    assert all(o.residual.is_identity for o in outs)
    lz = rm15.logical_z().embed(layout.block_qubits(4), 105)
    outs = decode_inner(layout, lz)
    assert outs[4].syndrome == 0
    assert outs[4].logical_class == (0, 1)


def test_inner_decoding_is_blockwise(layout):
    rng = random.Random(9)
    e = Pauli(rng.getrandbits(105), rng.getrandbits(105), 105)
    outs = decode_inner(layout, e)
    for o in outs:
        alone = Pauli(e.x & layout.block_mask(o.block), e.z & layout.block_mask(o.block), 105)
        assert decode_inner(layout, alone)[o.block] == o


def test_decode_outer_examples(layout, steane):
    assert decode_outer(layout, [(0, 0)] * 7).global_class == (0, 0)
    one = [(0, 0)] * 7
    one[3] = (1, 0)
    out = decode_outer(layout, one)
    assert out.correction == Pauli.single(7, 3, "X")
    assert out.global_class == (0, 0)
    supp = steane.lx[0].support()
    three = [(1, 0) if b in supp else (0, 0) for b in range(7)]
    assert decode_outer(layout, three).global_class == (1, 0)


def test_inner_correctable_errors_pass(layout):
    rng = random.Random(2)
    for _ in range(50):
        e = Pauli.identity(105)
        for b in range(7):
            if rng.random() < 0.7:
                e = e * Pauli.single(105, layout.qubit(b, rng.randrange(15)), rng.choice("XYZ"))
        assert ideal_round(layout, e) == (0, 0)


def test_residual_logical_action_examples(layout, steane, rm15):
    assert residual_logical_action(layout, [Pauli.identity(105)]).passed
    supp = steane.lx[0].support()
    bad = Pauli.identity(105)
    for b in supp:
        bad = bad * rm15.logical_x().embed(layout.block_qubits(b), 105)
    res = residual_logical_action(layout, [Pauli.identity(105), bad])
    assert not res.passed
    assert res.branch == 1
    assert res.logical_class == (1, 0)
