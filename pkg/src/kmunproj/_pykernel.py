"""Pure-Python reduction kernel (fallback for the compiled ``_ckernel``).

Monomials are encoded as integer tuples ("keys") such that

* the product of monomials is the componentwise sum of keys,
* the tuple order (smallest first) is the *descending* monomial order.

For each block of the order the key holds ``-W`` (minus the weighted degree
of the block) followed by the block's exponents, last variable first.  This
realises a block order with weighted reverse lexicographic order inside each
block, and makes ``heapq`` pop the largest monomial first.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from operator import add, le

BACKEND = "python"


class KPoly:
    __slots__ = ("keys", "coefs", "exps", "masks")

    def __init__(self, keys, coefs, exps, masks):
        self.keys = keys
        self.coefs = coefs
        self.exps = exps
        self.masks = masks

    def __len__(self):
        return len(self.keys)


class Context:
    """Arithmetic context: variable weights, block order and coefficient field."""

    def __init__(self, weights, blocks, p):
        self.weights = tuple(weights)
        self.blocks = [tuple(b) for b in blocks]
        self.nvars = len(self.weights)
        if sorted(v for b in self.blocks for v in b) != list(range(self.nvars)):
            raise ValueError("blocks must partition the variables")
        self.p = p
        layout = []  # per slot: -1-block for a degree slot, variable index otherwise
        for bi, b in enumerate(self.blocks):
            layout.append(-1 - bi)
            layout.extend(reversed(b))
        self.layout = tuple(layout)
        self.var_slot = [0] * self.nvars
        for s, v in enumerate(layout):
            if v >= 0:
                self.var_slot[v] = s

    # -- conversion -----------------------------------------------------------

    def encode(self, exps):
        w = self.weights
        key = []
        for b in self.blocks:
            key.append(-sum(w[v] * exps[v] for v in b))
            key.extend(exps[v] for v in reversed(b))
        return tuple(key)

    def decode(self, key):
        return tuple(key[s] for s in self.var_slot)

    def _mask(self, exps):
        m = 0
        for i, e in enumerate(exps):
            if e:
                m |= 1 << (i % 63)
        return m

    def make(self, terms):
        """Build a kernel polynomial from (exponents, coefficient) pairs."""
        p = self.p
        items = []
        for e, c in terms:
            c = c % p if p is not None else Fraction(c)
            if c:
                items.append((self.encode(e), c, tuple(e)))
        items.sort()
        return KPoly([k for k, _, _ in items], [c for _, c, _ in items], [e for _, _, e in items], [self._mask(e) for _, _, e in items])

    def _from_keys(self, keys, coefs):
        exps = [self.decode(k) for k in keys]
        return KPoly(keys, coefs, exps, [self._mask(e) for e in exps])

    def terms(self, f):
        return list(zip(f.exps, f.coefs))

    def lead(self, f):
        return f.exps[0]

    def lead_degree(self, f):
        return -sum(f.keys[0][s] for s, v in enumerate(self.layout) if v < 0)

    def is_zero(self, f):
        return not f.keys

    def nterms(self, f):
        return len(f.keys)

    def monic(self, f):
        if not f.keys:
            return f
        p = self.p
        if p is None:
            inv = 1 / f.coefs[0]
            coefs = [c * inv for c in f.coefs]
        else:
            inv = pow(f.coefs[0], -1, p)
            coefs = [c * inv % p for c in f.coefs]
        return KPoly(f.keys, coefs, f.exps, f.masks)

    def mul(self, f, g):
        p = self.p
        acc = {}
        for ka, ca in zip(f.keys, f.coefs):
            for kb, cb in zip(g.keys, g.coefs):
                k = tuple(map(add, ka, kb))
                acc[k] = acc.get(k, 0) + ca * cb
        items = sorted((k, c % p if p is not None else c) for k, c in acc.items())
        items = [(k, c) for k, c in items if c]
        return self._from_keys([k for k, _ in items], [c for _, c in items])

    # -- reduction ------------------------------------------------------------

    def normal_form(self, f, basis):
        """Fully reduced remainder of ``f`` modulo the monic polynomials ``basis``."""
        return self._reduce(zip(f.keys, f.coefs), basis)

    def spoly_nf(self, f, g, basis):
        """Normal form of the S-polynomial of monic ``f`` and ``g``."""
        lf, lg = f.keys[0], g.keys[0]
        lcm_e = tuple(max(a, b) for a, b in zip(f.exps[0], g.exps[0]))
        lk = self.encode(lcm_e)
        qf = tuple(a - b for a, b in zip(lk, lf))
        qg = tuple(a - b for a, b in zip(lk, lg))
        p = self.p
        init = [(tuple(map(add, qf, k)), c) for k, c in zip(f.keys[1:], f.coefs[1:])]
        if p is None:
            init += [(tuple(map(add, qg, k)), -c) for k, c in zip(g.keys[1:], g.coefs[1:])]
        else:
            init += [(tuple(map(add, qg, k)), p - c) for k, c in zip(g.keys[1:], g.coefs[1:])]
        return self._reduce(init, basis)

    def _reduce(self, init, basis):
        p = self.p
        acc: dict = {}
        heap: list = []
        push = heapq.heappush
        pop = heapq.heappop
        for k, c in init:
            v = acc.get(k)
            if v is None:
                acc[k] = c
                push(heap, k)
            else:
                acc[k] = v + c
        reducers = [(g.exps[0], g.masks[0], g.keys[0], g) for g in basis]
        decode = self.decode
        out_keys, out_coefs = [], []
        while heap:
            m = pop(heap)
            c = acc.pop(m)
            if p is not None:
                c %= p
            if not c:
                continue
            me = decode(m)
            mm = 0
            for i, e in enumerate(me):
                if e:
                    mm |= 1 << (i % 63)
            red = None
            for ge, gm, gk, g in reducers:
                if gm & ~mm == 0 and all(map(le, ge, me)):
                    red = (gk, g)
                    break
            if red is None:
                out_keys.append(m)
                out_coefs.append(c)
                continue
            gk, g = red
            q = tuple(a - b for a, b in zip(m, gk))
            gkeys, gcoefs = g.keys, g.coefs
            for idx in range(1, len(gkeys)):
                k = tuple(map(add, q, gkeys[idx]))
                v = acc.get(k)
                if v is None:
                    acc[k] = -c * gcoefs[idx]
                    push(heap, k)
                else:
                    acc[k] = v - c * gcoefs[idx]
        return self._from_keys(out_keys, out_coefs)
