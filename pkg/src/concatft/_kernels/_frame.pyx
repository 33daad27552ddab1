# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled tape runner: byte-per-qubit frames, depth-first over T branches."""

import numpy as np
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

cdef enum:
    OP_NOP = 0
    OP_H = 1
    OP_S = 2
    OP_CNOT = 3
    OP_T = 4
    OP_MEAS = 5
    OP_CORR = 6
    OP_CLASS = 7


cdef class _Runner:
    cdef const int[::1] op, a, b, obs_ptr, obs_q, obs_t
    cdef const int[::1] corr_qptr, corr_q, corr_bptr, corr_b, corr_table, tab_off, tab_width
    cdef const unsigned char[::1] tab_x, tab_z
    cdef const int[::1] pos, kind, target
    cdef const unsigned char[::1] xbit, zbit
    cdef int n, nbits, nclass, nops, stride
    cdef unsigned char* buf
    cdef long leaves
    cdef long fail_cls

    def __cinit__(self, tape, batch):
        self.op = tape.op
        self.a = tape.a
        self.b = tape.b
        self.obs_ptr = tape.obs_ptr
        self.obs_q = tape.obs_q
        self.obs_t = tape.obs_t
        self.corr_qptr = tape.corr_qptr
        self.corr_q = tape.corr_q
        self.corr_bptr = tape.corr_bptr
        self.corr_b = tape.corr_b
        self.corr_table = tape.corr_table
        self.tab_off = tape.tab_off
        self.tab_width = tape.tab_width
        self.tab_x = tape.tab_x
        self.tab_z = tape.tab_z
        self.pos = batch.pos
        self.kind = batch.kind
        self.target = batch.target
        self.xbit = batch.xbit
        self.zbit = batch.zbit
        self.n = tape.n
        self.nbits = tape.nbits
        self.nclass = tape.nclass
        self.nops = len(tape.op)
        self.stride = 2 * self.n + self.nbits + self.nclass
        self.buf = <unsigned char*> malloc((tape.max_t + 1) * self.stride + 1)
        if self.buf == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.buf)

    cdef bint _run(self, int pc, int depth, int ii, int iend) nogil:
        cdef unsigned char* st = self.buf + depth * self.stride
        cdef unsigned char* x = st
        cdef unsigned char* z = st + self.n
        cdef unsigned char* bits = st + 2 * self.n
        cdef unsigned char* cls = bits + self.nbits
        cdef int o, qa, qb, k, t, q, ci, tb, w, base, j, qs, s
        cdef unsigned char p
        cdef long packed
        while True:
            while ii < iend and self.pos[ii] == pc:
                if self.kind[ii]:
                    bits[self.target[ii]] ^= 1
                else:
                    x[self.target[ii]] ^= self.xbit[ii]
                    z[self.target[ii]] ^= self.zbit[ii]
                ii += 1
            if pc == self.nops:
                self.leaves += 1
                packed = 0
                for k in range(self.nclass):
                    packed |= (<long> cls[k]) << k
                if packed:
                    self.fail_cls = packed
                    return True
                return False
            o = self.op[pc]
            qa = self.a[pc]
            qb = self.b[pc]
            pc += 1
            if o == OP_H:
                p = x[qa]
                x[qa] = z[qa]
                z[qa] = p
            elif o == OP_S:
                z[qa] ^= x[qa]
            elif o == OP_CNOT:
                x[qb] ^= x[qa]
                z[qa] ^= z[qb]
            elif o == OP_T:
                if x[qa]:
                    memcpy(st + self.stride, st, self.stride)
                    (st + self.stride + self.n)[qa] = 0
                    if self._run(pc, depth + 1, ii, iend):
                        return True
                    z[qa] = 1
            elif o == OP_MEAS or o == OP_CLASS:
                p = 0
                for k in range(self.obs_ptr[qa], self.obs_ptr[qa + 1]):
                    q = self.obs_q[k]
                    t = self.obs_t[k]
                    p ^= (x[q] & (t >> 1)) ^ (z[q] & t)
                if o == OP_MEAS:
                    bits[qb] ^= p & 1
                else:
                    cls[qb] ^= p & 1
            elif o == OP_CORR:
                s = 0
                for k in range(self.corr_bptr[qa], self.corr_bptr[qa + 1]):
                    s |= bits[self.corr_b[k]] << (k - self.corr_bptr[qa])
                tb = self.corr_table[qa]
                w = self.tab_width[tb]
                base = self.tab_off[tb] + s * w
                qs = self.corr_qptr[qa]
                for j in range(w):
                    q = self.corr_q[qs + j]
                    x[q] ^= self.tab_x[base + j]
                    z[q] ^= self.tab_z[base + j]

    cdef void run_all(self, const int[::1] case_ptr, long[::1] fail, long[::1] klass) nogil:
        cdef Py_ssize_t c
        cdef int lo, hi, start
        for c in range(case_ptr.shape[0] - 1):
            lo = case_ptr[c]
            hi = case_ptr[c + 1]
            start = self.pos[lo] if hi > lo else self.nops
            memset(self.buf, 0, self.stride)
            self.leaves = 0
            self.fail_cls = 0
            if self._run(start, 0, lo, hi):
                fail[c] = self.leaves - 1
                klass[c] = self.fail_cls
            else:
                fail[c] = -1
                klass[c] = 0


def run_batch(tape, batch):
    """Per case: index of the first failing branch (-1 if all pass) and the
    packed global class of that branch (0 on pass)."""
    ncase = len(batch.case_ptr) - 1
    fail = np.full(ncase, -1, dtype=np.int64)
    klass = np.zeros(ncase, dtype=np.int64)
    if ncase == 0:
        return fail, klass
    cdef _Runner r = _Runner(tape, batch)
    cdef long[::1] fv = fail
    cdef long[::1] kv = klass
    cdef const int[::1] cp = np.ascontiguousarray(batch.case_ptr, dtype=np.int32)
    with nogil:
        r.run_all(cp, fv, kv)
    return fail, klass
