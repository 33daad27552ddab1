"""Pure-Python tape runner; Python ints serve as bit sets over qubits."""

from __future__ import annotations

import sys

import numpy as np

OP_NOP, OP_H, OP_S, OP_CNOT, OP_T, OP_MEAS, OP_CORR, OP_CLASS = range(8)


def _masks(tape, i):
    x = z = 0
    for k in range(int(tape.obs_ptr[i]), int(tape.obs_ptr[i + 1])):
        q, t = int(tape.obs_q[k]), int(tape.obs_t[k])
        if t & 1:
            x |= 1 << q
        if t & 2:
            z |= 1 << q
    return x, z


def _program(tape):
    prog = tape._cache.get("py")
    if prog is not None:
        return prog
    tables = {}
    prog = []
    for i in range(len(tape.op)):
        o, a, b = int(tape.op[i]), int(tape.a[i]), int(tape.b[i])
        if o in (OP_MEAS, OP_CLASS):
            ox, oz = _masks(tape, a)
            prog.append((o, ox, oz, b))
        elif o == OP_CORR:
            qs = [int(q) for q in tape.corr_q[tape.corr_qptr[a]:tape.corr_qptr[a + 1]]]
            bits = [int(v) for v in tape.corr_b[tape.corr_bptr[a]:tape.corr_bptr[a + 1]]]
            t = int(tape.corr_table[a])
            key = (t, tuple(qs))
            if key not in tables:
                w, off = int(tape.tab_width[t]), int(tape.tab_off[t])
                nent = 1 << len(bits)
                tx = tape.tab_x[off:off + nent * w].reshape(nent, w)
                tz = tape.tab_z[off:off + nent * w].reshape(nent, w)
                weights = np.array([1 << q for q in qs], dtype=object)
                tables[key] = ([int(v) for v in tx.astype(object) @ weights],
                               [int(v) for v in tz.astype(object) @ weights])
            prog.append((o, bits, *tables[key]))
        else:
            prog.append((o, a, b, 0))
    tape._cache["py"] = prog
    return prog


def _run(prog, pc, x, z, bits, cls, inj, ii, state):
    """Depth-first over T branches; returns True at the first failing leaf."""
    n_ops = len(prog)
    n_inj = len(inj)
    while True:
        while ii < n_inj and inj[ii][0] == pc:
            _, kind, tgt, xb, zb = inj[ii]
            if kind:
                bits ^= 1 << tgt
            else:
                x ^= xb << tgt
                z ^= zb << tgt
            ii += 1
        if pc == n_ops:
            state[0] += 1
            if cls:
                state[1] = cls
                return True
            return False
        o, a, b, c = prog[pc]
        pc += 1
        if o == OP_NOP:
            continue
        if o == OP_H:
            bx, bz = (x >> a) & 1, (z >> a) & 1
            if bx != bz:
                x ^= 1 << a
                z ^= 1 << a
        elif o == OP_S:
            z ^= ((x >> a) & 1) << a
        elif o == OP_CNOT:
            x ^= ((x >> a) & 1) << b
            z ^= ((z >> b) & 1) << a
        elif o == OP_T:
            if (x >> a) & 1:
                bit = 1 << a
                if _run(prog, pc, x, z & ~bit, bits, cls, inj, ii, state):
                    return True
                z |= bit
        elif o == OP_MEAS:
            bits ^= (((x & b) ^ (z & a)).bit_count() & 1) << c
        elif o == OP_CORR:
            s = 0
            for i, v in enumerate(a):
                s |= ((bits >> v) & 1) << i
            x ^= b[s]
            z ^= c[s]
        else:
            cls |= (((x & b) ^ (z & a)).bit_count() & 1) << c


def run_batch(tape, batch):
    """Per case: index of the first failing branch (-1 if all pass) and the
    packed global class of that branch (0 on pass)."""
    prog = _program(tape)
    ncase = len(batch.case_ptr) - 1
    fail = np.full(ncase, -1, dtype=np.int64)
    klass = np.zeros(ncase, dtype=np.int64)
    limit = sys.getrecursionlimit()
    if tape.max_t + 50 > limit:
        sys.setrecursionlimit(tape.max_t + 100)
    for k in range(ncase):
        lo, hi = int(batch.case_ptr[k]), int(batch.case_ptr[k + 1])
        inj = [(int(batch.pos[i]), int(batch.kind[i]), int(batch.target[i]),
                int(batch.xbit[i]), int(batch.zbit[i])) for i in range(lo, hi)]
        start = inj[0][0] if inj else len(prog)
        state = [0, 0]
        if _run(prog, start, 0, 0, 0, 0, inj, 0, state):
            fail[k] = state[0] - 1
            klass[k] = state[1]
    return fail, klass
