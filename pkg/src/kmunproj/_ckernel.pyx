# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled reduction kernel over F_p (p < 2**31).

Same monomial key encoding and API as ``_pykernel``; see that module for the
description.  Keys are stored as int32 slots, coefficients as uint32.
"""

from libc.stdlib cimport malloc, free, realloc
from libc.string cimport memcpy
from libc.stdint cimport int32_t, uint32_t, uint64_t, int64_t

BACKEND = "cython"

cdef enum:
    EXP_LIMIT = 65535


cdef class KPoly:
    cdef public int n
    cdef int S
    cdef int32_t* keys
    cdef uint32_t* coefs
    cdef uint64_t lmask

    def __cinit__(self):
        self.n = 0
        self.keys = NULL
        self.coefs = NULL
        self.lmask = 0

    def __dealloc__(self):
        if self.keys != NULL:
            free(self.keys)
        if self.coefs != NULL:
            free(self.coefs)

    def __len__(self):
        return self.n


cdef inline int key_cmp(const int32_t* a, const int32_t* b, int S) nogil:
    cdef int s
    for s in range(S):
        if a[s] != b[s]:
            return -1 if a[s] < b[s] else 1
    return 0


cdef inline uint64_t hash_key(const int32_t* a, int S) nogil:
    cdef uint64_t h = 1469598103934665603ULL
    cdef int s
    for s in range(S):
        h ^= <uint64_t><uint32_t>a[s]
        h *= 1099511628211ULL
    h ^= h >> 29
    return h


cdef uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) nogil:
    cdef uint64_t r = 1
    a %= p
    while e:
        if e & 1:
            r = r * a % p
        a = a * a % p
        e >>= 1
    return r


cdef class _Acc:
    """Hash-indexed accumulator with a heap giving the largest monomial."""
    cdef int S
    cdef int n
    cdef int cap
    cdef int32_t* mons
    cdef uint64_t* cf
    cdef int tsize
    cdef int32_t* table
    cdef int32_t* heap
    cdef int hn

    def __cinit__(self, int S, int cap):
        self.S = S
        self.n = 0
        self.cap = cap
        self.mons = <int32_t*>malloc(sizeof(int32_t) * S * cap)
        self.cf = <uint64_t*>malloc(sizeof(uint64_t) * cap)
        self.heap = <int32_t*>malloc(sizeof(int32_t) * cap)
        self.tsize = 1
        while self.tsize < 2 * cap:
            self.tsize <<= 1
        self.table = <int32_t*>malloc(sizeof(int32_t) * self.tsize)
        cdef int i
        for i in range(self.tsize):
            self.table[i] = -1
        self.hn = 0

    def __dealloc__(self):
        free(self.mons)
        free(self.cf)
        free(self.heap)
        free(self.table)

    cdef void reset(self):
        cdef int i
        for i in range(self.tsize):
            self.table[i] = -1
        self.n = 0
        self.hn = 0

    cdef void grow(self):
        cdef int newcap = self.cap * 2
        self.mons = <int32_t*>realloc(self.mons, sizeof(int32_t) * self.S * newcap)
        self.cf = <uint64_t*>realloc(self.cf, sizeof(uint64_t) * newcap)
        self.heap = <int32_t*>realloc(self.heap, sizeof(int32_t) * newcap)
        self.cap = newcap
        free(self.table)
        self.tsize = 1
        while self.tsize < 2 * newcap:
            self.tsize <<= 1
        self.table = <int32_t*>malloc(sizeof(int32_t) * self.tsize)
        cdef int i
        cdef uint64_t mask = self.tsize - 1
        cdef uint64_t h
        for i in range(self.tsize):
            self.table[i] = -1
        for i in range(self.n):
            h = hash_key(self.mons + i * self.S, self.S) & mask
            while self.table[h] != -1:
                h = (h + 1) & mask
            self.table[h] = i

    cdef void heap_push(self, int idx):
        cdef int S = self.S
        cdef int i = self.hn
        cdef int parent
        self.hn += 1
        while i > 0:
            parent = (i - 1) >> 1
            if key_cmp(self.mons + self.heap[parent] * S, self.mons + idx * S, S) <= 0:
                break
            self.heap[i] = self.heap[parent]
            i = parent
        self.heap[i] = idx

    cdef int heap_pop(self):
        cdef int S = self.S
        cdef int top = self.heap[0]
        self.hn -= 1
        if self.hn == 0:
            return top
        cdef int last = self.heap[self.hn]
        cdef int i = 0
        cdef int child
        cdef int n = self.hn
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and key_cmp(self.mons + self.heap[child + 1] * S, self.mons + self.heap[child] * S, S) < 0:
                child += 1
            if key_cmp(self.mons + last * S, self.mons + self.heap[child] * S, S) <= 0:
                break
            self.heap[i] = self.heap[child]
            i = child
        self.heap[i] = last
        return top

    cdef void add_term(self, const int32_t* key, uint64_t c, uint64_t p):
        """Add ``c`` (already < p) to the coefficient of ``key``."""
        cdef int S = self.S
        cdef uint64_t mask
        cdef uint64_t h
        cdef int idx
        if self.n + 1 > self.cap // 2 * 1 + self.cap // 4:
            self.grow()
        mask = self.tsize - 1
        h = hash_key(key, S) & mask
        while True:
            idx = self.table[h]
            if idx == -1:
                break
            if key_cmp(self.mons + idx * S, key, S) == 0:
                self.cf[idx] = (self.cf[idx] + c) % p
                return
            h = (h + 1) & mask
        idx = self.n
        self.n += 1
        memcpy(self.mons + idx * S, key, sizeof(int32_t) * S)
        self.cf[idx] = c
        self.table[h] = idx
        self.heap_push(idx)


cdef class Context:
    cdef public int nvars
    cdef public int S
    cdef public object weights
    cdef public object blocks
    cdef public object layout
    cdef public object p
    cdef uint64_t pp
    cdef int32_t* slot_var      # variable index of slot, or -1 for a degree slot
    cdef int32_t* var_slot
    cdef int64_t* wslot         # weight of the variable in each slot
    cdef int32_t* tmp
    cdef int32_t* tmp2
    cdef _Acc acc

    def __cinit__(self, weights, blocks, p):
        if p is None or p >= 2**31:
            raise ValueError("compiled kernel supports prime fields F_p with p < 2**31 only")
        self.weights = tuple(int(w) for w in weights)
        self.blocks = [tuple(b) for b in blocks]
        self.nvars = len(self.weights)
        if sorted(v for b in self.blocks for v in b) != list(range(self.nvars)):
            raise ValueError("blocks must partition the variables")
        self.p = int(p)
        self.pp = <uint64_t>p
        layout = []
        for bi, b in enumerate(self.blocks):
            layout.append(-1 - bi)
            layout.extend(reversed(b))
        self.layout = tuple(layout)
        self.S = len(layout)
        self.slot_var = <int32_t*>malloc(sizeof(int32_t) * self.S)
        self.var_slot = <int32_t*>malloc(sizeof(int32_t) * max(1, self.nvars))
        self.wslot = <int64_t*>malloc(sizeof(int64_t) * self.S)
        self.tmp = <int32_t*>malloc(sizeof(int32_t) * self.S)
        self.tmp2 = <int32_t*>malloc(sizeof(int32_t) * self.S)
        cdef int s
        for s in range(self.S):
            v = layout[s]
            self.slot_var[s] = v if v >= 0 else -1
            self.wslot[s] = self.weights[v] if v >= 0 else 0
            if v >= 0:
                self.var_slot[v] = s
        self.acc = _Acc(self.S, 1024)

    def __dealloc__(self):
        free(self.slot_var)
        free(self.var_slot)
        free(self.wslot)
        free(self.tmp)
        free(self.tmp2)

    # -- conversion -----------------------------------------------------------

    def encode(self, exps):
        w = self.weights
        key = []
        for b in self.blocks:
            key.append(-sum(w[v] * exps[v] for v in b))
            key.extend(exps[v] for v in reversed(b))
        return tuple(key)

    def decode(self, key):
        return tuple(key[self.var_slot[v]] for v in range(self.nvars))

    cdef KPoly _alloc(self, int n):
        cdef KPoly f = KPoly.__new__(KPoly)
        f.n = n
        f.S = self.S
        f.keys = <int32_t*>malloc(sizeof(int32_t) * self.S * max(n, 1))
        f.coefs = <uint32_t*>malloc(sizeof(uint32_t) * max(n, 1))
        return f

    cdef uint64_t _mask(self, const int32_t* key):
        cdef uint64_t m = 0
        cdef int s
        for s in range(self.S):
            if self.slot_var[s] >= 0 and key[s] > 0:
                m |= (<uint64_t>1) << (self.slot_var[s] % 63)
        return m

    def make(self, terms):
        p = self.p
        items = []
        for e, c in terms:
            c = int(c) % p
            if c:
                if any(x > EXP_LIMIT for x in e):
                    raise OverflowError("exponent exceeds 16 bits")
                items.append((self.encode(e), c))
        items.sort()
        cdef int n = len(items)
        cdef KPoly f = self._alloc(n)
        cdef int i, s
        for i in range(n):
            k, c = items[i]
            for s in range(self.S):
                f.keys[i * self.S + s] = k[s]
            f.coefs[i] = c
        if n:
            f.lmask = self._mask(f.keys)
        return f

    def terms(self, KPoly f):
        cdef int i, s
        out = []
        for i in range(f.n):
            key = tuple(f.keys[i * self.S + s] for s in range(self.S))
            out.append((self.decode(key), f.coefs[i]))
        return out

    def lead(self, KPoly f):
        cdef int s
        return tuple(f.keys[self.var_slot[v]] for v in range(self.nvars))

    def lead_degree(self, KPoly f):
        cdef int s
        cdef int64_t d = 0
        for s in range(self.S):
            if self.slot_var[s] < 0:
                d -= f.keys[s]
        return d

    def is_zero(self, KPoly f):
        return f.n == 0

    def nterms(self, KPoly f):
        return f.n

    def monic(self, KPoly f):
        if f.n == 0:
            return f
        cdef uint64_t inv = powmod(f.coefs[0], self.pp - 2, self.pp)
        cdef KPoly g = self._alloc(f.n)
        memcpy(g.keys, f.keys, sizeof(int32_t) * self.S * f.n)
        cdef int i
        for i in range(f.n):
            g.coefs[i] = <uint32_t>(f.coefs[i] * inv % self.pp)
        g.lmask = f.lmask
        return g

    def mul(self, KPoly f, KPoly g):
        cdef _Acc acc = self.acc
        cdef int S = self.S
        cdef int i, j, s
        cdef uint64_t p = self.pp
        acc.reset()
        for i in range(f.n):
            for j in range(g.n):
                for s in range(S):
                    self.tmp[s] = f.keys[i * S + s] + g.keys[j * S + s]
                    if self.slot_var[s] >= 0 and self.tmp[s] > EXP_LIMIT:
                        raise OverflowError("exponent exceeds 16 bits")
                acc.add_term(self.tmp, <uint64_t>f.coefs[i] * g.coefs[j] % p, p)
        return self._drain(acc)

    cdef KPoly _drain(self, _Acc acc):
        # pop everything in order, keeping nonzero coefficients
        cdef int S = self.S
        cdef int cnt = 0
        cdef int idx
        cdef int32_t* order = <int32_t*>malloc(sizeof(int32_t) * max(acc.n, 1))
        while acc.hn > 0:
            idx = acc.heap_pop()
            if acc.cf[idx] % self.pp:
                order[cnt] = idx
                cnt += 1
        cdef KPoly f = self._alloc(cnt)
        cdef int i
        for i in range(cnt):
            memcpy(f.keys + i * S, acc.mons + order[i] * S, sizeof(int32_t) * S)
            f.coefs[i] = <uint32_t>(acc.cf[order[i]] % self.pp)
        free(order)
        if cnt:
            f.lmask = self._mask(f.keys)
        return f

    # -- reduction ------------------------------------------------------------

    def normal_form(self, KPoly f, basis):
        cdef _Acc acc = self.acc
        cdef int i
        acc.reset()
        for i in range(f.n):
            acc.add_term(f.keys + i * self.S, f.coefs[i], self.pp)
        return self._reduce(basis)

    def spoly_nf(self, KPoly f, KPoly g, basis):
        cdef _Acc acc = self.acc
        cdef int S = self.S
        cdef int i, s
        cdef uint64_t p = self.pp
        cdef int32_t* qf = self.tmp
        cdef int32_t* qg = self.tmp2
        cdef int32_t* key = <int32_t*>malloc(sizeof(int32_t) * S)
        cdef int32_t e
        # lcm of leading monomials, then quotients, all in key space
        for s in range(S):
            if self.slot_var[s] >= 0:
                e = f.keys[s] if f.keys[s] > g.keys[s] else g.keys[s]
                key[s] = e
        self._fill_degrees(key)
        for s in range(S):
            qf[s] = key[s] - f.keys[s]
            qg[s] = key[s] - g.keys[s]
        acc.reset()
        for i in range(1, f.n):
            for s in range(S):
                key[s] = qf[s] + f.keys[i * S + s]
            acc.add_term(key, f.coefs[i], p)
        for i in range(1, g.n):
            for s in range(S):
                key[s] = qg[s] + g.keys[i * S + s]
            acc.add_term(key, (p - g.coefs[i]) % p, p)
        free(key)
        return self._reduce(basis)

    cdef void _fill_degrees(self, int32_t* key):
        # recompute the (negated) block degree slots from the exponent slots
        cdef int s = 0
        cdef int start
        cdef int64_t d
        while s < self.S:
            start = s
            s += 1
            d = 0
            while s < self.S and self.slot_var[s] >= 0:
                d += self.wslot[s] * key[s]
                s += 1
            key[start] = <int32_t>(-d)

    cdef KPoly _reduce(self, basis):
        cdef _Acc acc = self.acc
        cdef int S = self.S
        cdef uint64_t p = self.pp
        cdef int nb = len(basis)
        cdef int32_t** rkeys = <int32_t**>malloc(sizeof(int32_t*) * max(nb, 1))
        cdef uint32_t** rcoefs = <uint32_t**>malloc(sizeof(uint32_t*) * max(nb, 1))
        cdef int* rlen = <int*>malloc(sizeof(int) * max(nb, 1))
        cdef uint64_t* rmask = <uint64_t*>malloc(sizeof(uint64_t) * max(nb, 1))
        cdef KPoly g
        cdef int i, j, s, idx, found, ok
        cdef uint64_t c, mm, cc
        cdef int outcap = 64
        cdef int outn = 0
        cdef int32_t* outkeys = <int32_t*>malloc(sizeof(int32_t) * S * outcap)
        cdef uint32_t* outcoefs = <uint32_t*>malloc(sizeof(uint32_t) * outcap)
        cdef int32_t* m
        cdef int32_t* gk
        cdef int32_t* q = self.tmp
        cdef int32_t* key = self.tmp2
        for i in range(nb):
            g = basis[i]
            rkeys[i] = g.keys
            rcoefs[i] = g.coefs
            rlen[i] = g.n
            rmask[i] = g.lmask
        try:
            while acc.hn > 0:
                idx = acc.heap_pop()
                c = acc.cf[idx] % p
                if c == 0:
                    continue
                m = acc.mons + idx * S
                mm = self._mask(m)
                found = -1
                for i in range(nb):
                    if rmask[i] & ~mm:
                        continue
                    gk = rkeys[i]
                    ok = 1
                    for s in range(S):
                        if self.slot_var[s] >= 0 and gk[s] > m[s]:
                            ok = 0
                            break
                    if ok:
                        found = i
                        break
                if found < 0:
                    if outn == outcap:
                        outcap *= 2
                        outkeys = <int32_t*>realloc(outkeys, sizeof(int32_t) * S * outcap)
                        outcoefs = <uint32_t*>realloc(outcoefs, sizeof(uint32_t) * outcap)
                    memcpy(outkeys + outn * S, m, sizeof(int32_t) * S)
                    outcoefs[outn] = <uint32_t>c
                    outn += 1
                    continue
                gk = rkeys[found]
                for s in range(S):
                    q[s] = m[s] - gk[s]
                for j in range(1, rlen[found]):
                    for s in range(S):
                        key[s] = q[s] + gk[j * S + s]
                    cc = (p - (c * rcoefs[found][j]) % p) % p
                    # add_term may move the arena; m is not used after this point
                    acc.add_term(key, cc, p)
            g = self._alloc(outn)
            if outn:
                memcpy(g.keys, outkeys, sizeof(int32_t) * S * outn)
                memcpy(g.coefs, outcoefs, sizeof(uint32_t) * outn)
                g.lmask = self._mask(g.keys)
            return g
        finally:
            free(rkeys)
            free(rcoefs)
            free(rlen)
            free(rmask)
            free(outkeys)
            free(outcoefs)

