"""Groebner bases, normal forms, elimination, saturation and Hilbert series.

The driver is a Buchberger loop with the sugar strategy and the
Gebauer-Moeller installation of the coprime and chain criteria.  Reduction
itself runs in the kernel selected by :mod:`kmunproj.kernel`.

Orders
------
``wdegrevlex``
    weighted degree, ties broken by reverse lexicographic order.
``elimination``
    block order; the monomials of the eliminated block are compared first
    (by their weighted degree and then revlex), wdegrevlex on the rest.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Sequence

from . import kernel
from .poly import GradedRing, NotHomogeneousError, Polynomial, PolynomialError, RingMismatchError

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    """The reduction budget ran out; the answer is unknown, not negative."""

    def __init__(self, budget: int):
        super().__init__(f"Groebner computation exceeded its budget of {budget} reductions")
        self.budget = budget


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "wdegrevlex"
    block: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("wdegrevlex", "elimination"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "block", tuple(sorted(set(self.block))))
        if self.kind == "wdegrevlex" and self.block:
            raise ValueError("wdegrevlex takes no block")

    @classmethod
    def eliminating(cls, block: Iterable[int]) -> "MonomialOrder":
        block = tuple(block)
        return cls("elimination", block) if block else cls()

    def blocks(self, nvars: int) -> list[tuple[int, ...]]:
        if self.kind == "wdegrevlex":
            return [tuple(range(nvars))]
        if any(not 0 <= v < nvars for v in self.block):
            raise ValueError("elimination block out of range")
        rest = tuple(v for v in range(nvars) if v not in self.block)
        return [b for b in (self.block, rest) if b]


WDEGREVLEX = MonomialOrder()


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


_FIELD = 17  # 16 exponent bits plus a guard bit


class _Packer:
    """Exponent vectors packed into one integer so divisibility is a subtraction."""

    def __init__(self, n):
        self.guard = sum(1 << (_FIELD * i + _FIELD - 1) for i in range(n))

    @staticmethod
    def pack(e):
        v = 0
        for i, x in enumerate(e):
            v |= x << (_FIELD * i)
        return v

    def divides(self, pa, pb):
        g = self.guard
        return ((pb | g) - pa) & g == g


class _Builder:
    """State of one Buchberger run."""

    def __init__(self, ctx, weights, budget):
        self.ctx = ctx
        self.weights = weights
        self.budget = budget
        self.used = 0
        self.packer = _Packer(len(weights))
        self.polys = []     # KPoly, monic
        self.leads = []
        self.packed = []
        self.sugar = []
        self.live = []      # not made redundant by a later lead
        self.pairs = {}     # id -> (i, j, lcm, packed lcm)
        self.heap = []      # (sugar, lcm degree, i, j, id)
        self.next_id = 0

    def wdeg(self, e):
        return sum(w * x for w, x in zip(self.weights, e))

    def insert(self, h, sugar):
        lh = self.ctx.lead(h)
        ph = _Packer.pack(lh)
        div = self.packer.divides
        k = len(self.polys)
        leads, packed = self.leads, self.packed
        # chain criterion on the old pairs
        dead = []
        for pid, (i, j, lij, pij) in self.pairs.items():
            if div(ph, pij) and _lcm(leads[i], lh) != lij and _lcm(leads[j], lh) != lij:
                dead.append(pid)
        for pid in dead:
            del self.pairs[pid]
        # new pairs, Gebauer-Moeller style
        dh = self.wdeg(lh)
        cand = []
        for i in range(k):
            if not self.live[i]:
                continue
            li = leads[i]
            lij = _lcm(li, lh)
            coprime = not any(a and b for a, b in zip(li, lh))
            d = self.wdeg(lij)
            s = max(self.sugar[i] + d - self.wdeg(li), sugar + d - dh)
            cand.append((d, lij, _Packer.pack(lij), coprime, s, i))
        cand.sort(key=lambda c: c[0])
        groups: dict = {}
        minimal = []
        for d, lij, pij, coprime, s, i in cand:
            if lij in groups:
                groups[lij].append((coprime, s, i, pij, d))
                continue
            if any(div(pm, pij) for pm in minimal):
                continue
            minimal.append(pij)
            groups[lij] = [(coprime, s, i, pij, d)]
        for lij, items in groups.items():
            if any(c[0] for c in items):
                continue
            _, s, i, pij, d = min(items, key=lambda t: (t[1], t[2]))
            pid = self.next_id
            self.next_id += 1
            self.pairs[pid] = (i, k, lij, pij)
            heapq.heappush(self.heap, (s, d, i, k, pid))
        for i in range(k):
            if self.live[i] and div(ph, packed[i]):
                self.live[i] = False
        self.polys.append(h)
        self.leads.append(lh)
        self.packed.append(ph)
        self.sugar.append(sugar)
        self.live.append(True)

    def reducers(self):
        return [self.polys[i] for i in range(len(self.polys)) if self.live[i]]

    def tick(self):
        self.used += 1
        if self.used > self.budget:
            raise BudgetExceeded(self.budget)

    def _next_pair(self):
        heap = self.heap
        while heap and heap[0][4] not in self.pairs:
            heapq.heappop(heap)
        return heap[0] if heap else None

    def run(self, gens):
        ctx = self.ctx
        # generators are queued by sugar alongside the pairs
        pending = sorted(((self._sugar_of(g), n, g) for n, g in enumerate(gens)), key=lambda t: (t[0], t[1]))
        pending.reverse()
        while True:
            best = self._next_pair()
            if best is None and not pending:
                break
            if pending and (best is None or pending[-1][0] <= best[0]):
                s, _, g = pending.pop()
                self.tick()
                h = ctx.normal_form(g, self.reducers())
            else:
                heapq.heappop(self.heap)
                s, _, i, j, pid = best
                del self.pairs[pid]
                self.tick()
                h = ctx.spoly_nf(self.polys[i], self.polys[j], self.reducers())
            if ctx.nterms(h):
                self.insert(ctx.monic(h), s)
        return self.reduced()

    def _sugar_of(self, g):
        return max(self.wdeg(e) for e, _ in self.ctx.terms(g))

    def reduced(self):
        ctx = self.ctx
        idx = [i for i in range(len(self.polys)) if self.live[i]]
        # live leads are pairwise non-dividing except for equal leads
        minimal = []
        seen = set()
        for i in idx:
            if self.leads[i] in seen:
                continue
            seen.add(self.leads[i])
            minimal.append(i)
        out = []
        for i in minimal:
            others = [self.polys[j] for j in minimal if j != i]
            out.append(ctx.monic(ctx.normal_form(self.polys[i], others)))
        out.sort(key=lambda f: ctx.encode(ctx.lead(f)))
        return out


def _to_kernel(ctx, f: Polynomial):
    return ctx.make(f.terms.items())


def _from_kernel(ctx, ring: GradedRing, h) -> Polynomial:
    return Polynomial(ring, dict(ctx.terms(h)), _clean=True)


def groebner_kernel(ring: GradedRing, gens: Sequence[Polynomial], order: MonomialOrder = WDEGREVLEX,
                    budget: int = DEFAULT_BUDGET, backend: str | None = None):
    """Reduced basis as kernel objects, together with the kernel context."""
    ctx = kernel.make_context(ring.weights, order.blocks(ring.nvars), ring.field.p, backend)
    kgens = [_to_kernel(ctx, g) for g in gens if not g.is_zero()]
    return ctx, _Builder(ctx, ring.weights, budget).run(kgens)


def groebner_basis(gens: Sequence[Polynomial], order: MonomialOrder = WDEGREVLEX, budget: int = DEFAULT_BUDGET,
                   backend: str | None = None) -> list[Polynomial]:
    gens = list(gens)
    if not gens:
        return []
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise RingMismatchError("generators live in different rings")
    ctx, basis = groebner_kernel(ring, gens, order, budget, backend)
    return [_from_kernel(ctx, ring, h) for h in basis]


class Ideal:
    """Ideal of a graded ring with cached reduced Groebner bases (one per order)."""

    def __init__(self, ring: GradedRing, generators: Iterable[Polynomial] = (), budget: int = DEFAULT_BUDGET):
        self.ring = ring
        gens = []
        for g in generators:
            if g.ring != ring:
                raise RingMismatchError("generator is not in the ideal's ring")
            if not g.is_zero():
                gens.append(g)
        self.generators = tuple(gens)
        self.budget = budget
        self._cache: dict = {}

    @classmethod
    def from_strings(cls, ring: GradedRing, texts: Iterable[str], **kw) -> "Ideal":
        return cls(ring, [ring.parse(t) for t in texts], **kw)

    @classmethod
    def from_json(cls, data) -> "Ideal":
        ring = GradedRing.from_json(data["ring"])
        return cls.from_strings(ring, data["generators"])

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "generators": [str(g) for g in self.generators]}

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.generators))})"

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    def _kernel_basis(self, order: MonomialOrder = WDEGREVLEX):
        hit = self._cache.get(order)
        if hit is None:
            hit = groebner_kernel(self.ring, self.generators, order, self.budget)
            self._cache[order] = hit
        return hit

    def groebner_basis(self, order: MonomialOrder = WDEGREVLEX) -> list[Polynomial]:
        ctx, basis = self._kernel_basis(order)
        return [_from_kernel(ctx, self.ring, h) for h in basis]

    def leading_monomials(self, order: MonomialOrder = WDEGREVLEX) -> list[tuple[int, ...]]:
        ctx, basis = self._kernel_basis(order)
        return [ctx.lead(h) for h in basis]

    def normal_form(self, f: Polynomial, order: MonomialOrder = WDEGREVLEX) -> Polynomial:
        if f.ring != self.ring:
            raise RingMismatchError("polynomial is not in the ideal's ring")
        ctx, basis = self._kernel_basis(order)
        return _from_kernel(ctx, self.ring, ctx.normal_form(_to_kernel(ctx, f), basis))

    def __contains__(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def contains(self, other: "Ideal | Iterable[Polynomial]") -> bool:
        """True when every generator of ``other`` lies in this ideal."""
        gens = other.generators if isinstance(other, Ideal) else list(other)
        return all(g in self for g in gens)

    def is_unit(self) -> bool:
        return any(g.is_constant() for g in self.groebner_basis())

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise RingMismatchError("ideals live in different rings")
        return Ideal(self.ring, self.generators + other.generators, self.budget)

    def __eq__(self, other):
        if not isinstance(other, Ideal) or other.ring != self.ring:
            return NotImplemented
        return self.contains(other) and other.contains(self)

    __hash__ = None


def contains(I: Ideal, J: Ideal) -> bool:
    """``J`` is contained in ``I``."""
    return I.contains(J)


def normal_form(f: Polynomial, I: Ideal) -> Polynomial:
    return I.normal_form(f)


# -- elimination and saturation ---------------------------------------------------


def eliminate(I: Ideal, block: Iterable[int | str]) -> Ideal:
    """``I`` intersected with the subring of the variables outside ``block``."""
    ring = I.ring
    idx = sorted({ring.index(v) if isinstance(v, str) else int(v) for v in block})
    if not idx:
        return Ideal(ring, I.groebner_basis(), I.budget)
    order = MonomialOrder.eliminating(idx)
    sub = GradedRing(tuple(v for i, v in enumerate(ring.variables) if i not in idx),
                     tuple(w for i, w in enumerate(ring.weights) if i not in idx), ring.field)
    # leading_monomial() uses the ring order, so test every term
    keep = [g for g in I.groebner_basis(order) if not any(e[i] for e in g.terms for i in idx)]
    return Ideal(sub, [g.restrict(sub) for g in keep], I.budget)


def _strip_last(f: Polynomial) -> Polynomial:
    # divide out the largest power of the last variable
    k = min(e[-1] for e in f.terms)
    if not k:
        return f
    return Polynomial(f.ring, {e[:-1] + (e[-1] - k,): c for e, c in f.terms.items()}, _clean=True)


def saturate_by_element(I: Ideal, g: Polynomial) -> Ideal:
    """The saturation I : g^infinity.

    For homogeneous data a new variable z of weight deg g is adjoined with the
    relation z - g; in the reverse lexicographic order with z last, dividing
    a Groebner basis by powers of z saturates by z.  Inhomogeneous data goes
    through the elimination of y from I + (1 - y g).
    """
    ring = I.ring
    if g.ring != ring:
        raise RingMismatchError("saturating element is not in the ideal's ring")
    if g.is_zero():
        return Ideal(ring, [ring.one()], I.budget)
    if g.is_constant():
        return I
    if I.is_homogeneous() and g.is_homogeneous():
        z = ring.fresh_name("z")
        big = ring.adjoin(z, g.degree())
        zv = big.var(z)
        gens = [f.embed(big) for f in I.generators] + [zv - g.embed(big)]
        basis = groebner_basis(gens, WDEGREVLEX, I.budget)
        images = list(big.gens()[:-1]) + [g.embed(big)]
        out = [(_strip_last(b)).substitute(images, big).restrict(ring) for b in basis]
        return Ideal(ring, list(I.generators) + out, I.budget)
    y = ring.fresh_name("y")
    big = ring.adjoin(y, 1)
    gens = [f.embed(big) for f in I.generators] + [big.one() - big.var(y) * g.embed(big)]
    E = eliminate(Ideal(big, gens, I.budget), [y])
    pos = [ring.index(v) for v in E.ring.variables]
    return Ideal(ring, [h.embed(ring, pos) for h in E.generators], I.budget)


def intersect(I: Ideal, J: Ideal) -> Ideal:
    """Intersection via elimination of t from t I + (1 - t) J."""
    ring = I.ring
    if J.ring != ring:
        raise RingMismatchError("ideals live in different rings")
    t = ring.fresh_name("t")
    big = ring.adjoin(t, 1)
    tv = big.var(t)
    gens = [tv * f.embed(big) for f in I.generators] + [(big.one() - tv) * f.embed(big) for f in J.generators]
    E = eliminate(Ideal(big, gens, I.budget), [t])
    pos = [ring.index(v) for v in E.ring.variables]
    return Ideal(ring, [h.embed(ring, pos) for h in E.generators], I.budget)


def saturate(I: Ideal, J: Ideal | Sequence[Polynomial]) -> Ideal:
    """I : J^infinity as the intersection of the saturations by the generators of J."""
    gens = J.generators if isinstance(J, Ideal) else list(J)
    parts = [saturate_by_element(I, g) for g in gens]
    if not parts:
        return I
    out = parts[0]
    for P in parts[1:]:
        out = intersect(out, P)
    return out


def saturation_components(I: Ideal, J: Ideal | Sequence[Polynomial]) -> list[Ideal]:
    """The ideals I : g^infinity for the generators g of J (their intersection is I : J^infinity)."""
    gens = J.generators if isinstance(J, Ideal) else list(J)
    return [saturate_by_element(I, g) for g in gens]


# -- Hilbert series, dimension and degree ----------------------------------------


def _poly_add(a: dict, b: dict, shift: int = 0, sign: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k + shift] = out.get(k + shift, 0) + sign * v
        if not out[k + shift]:
            del out[k + shift]
    return out


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _minimalise(mons):
    mons = sorted(set(mons), key=sum)
    out = []
    for m in mons:
        if not any(_divides(o, m) for o in out):
            out.append(m)
    return out


def hilbert_numerator(mons: Sequence[tuple[int, ...]], weights: Sequence[int]) -> dict[int, int]:
    """Numerator N(t) of the Hilbert series N(t) / prod(1 - t^w) of R / (mons)."""
    n = len(weights)
    memo: dict = {}

    def deg(m):
        return sum(w * e for w, e in zip(weights, m))

    def rec(ms):
        ms = tuple(sorted(_minimalise(ms)))
        if ms in memo:
            return memo[ms]
        if not ms:
            res = {0: 1}
        elif all(not any(a and b for a, b in zip(x, y)) for i, x in enumerate(ms) for y in ms[i + 1:]):
            res = {0: 1}
            for m in ms:
                res = _poly_mul(res, {0: 1, deg(m): -1})
        else:
            # pivot on a variable of a mixed generator; a pure power never divides the pivot
            mixed = [m for m in ms if sum(1 for a in m if a) > 1]
            counts = [sum(1 for m in mixed if m[v]) for v in range(n)]
            v = max(range(n), key=lambda i: (counts[i], -i))
            exps = sorted(m[v] for m in mixed if m[v])
            e = exps[len(exps) // 2]
            pivot = tuple(e if i == v else 0 for i in range(n))
            plus = rec(ms + (pivot,))
            colon = rec(tuple(tuple(max(a - b, 0) for a, b in zip(m, pivot)) for m in ms))
            res = _poly_add(plus, colon, shift=deg(pivot))
        memo[ms] = res
        return res

    return rec(tuple(mons))


def _divide_by_one_minus_t(num: dict) -> dict:
    # exact division of a polynomial vanishing at t = 1 by (1 - t)
    top = max(num)
    coeffs = [num.get(i, 0) for i in range(top + 1)]
    q = [0] * top
    acc = 0
    for i in range(top):
        acc += coeffs[i]
        q[i] = acc
    return {i: c for i, c in enumerate(q) if c}


def dimension_and_degree_of_monomials(mons, weights) -> tuple[int, Fraction | None]:
    """Krull dimension of R/(mons) and the weighted degree (leading Hilbert coefficient)."""
    n = len(weights)
    num = hilbert_numerator(mons, weights)
    order = 0
    while num and sum(num.values()) == 0:
        num = _divide_by_one_minus_t(num)
        order += 1
    krull = n - order
    if krull == 0 or not num:
        return 0, None
    return krull, Fraction(sum(num.values()), prod(weights))


def projective_dimension_and_degree(I: Ideal) -> tuple[int, int | Fraction | None]:
    """(projective dimension, degree) of Proj(R/I); dimension -1 means empty."""
    if not I.is_homogeneous():
        raise NotHomogeneousError("ideal is not homogeneous for the ring weights")
    if not I.generators:
        krull, deg = I.ring.nvars, Fraction(1, prod(I.ring.weights))
    else:
        krull, deg = dimension_and_degree_of_monomials(I.leading_monomials(), I.ring.weights)
    if krull == 0:
        return -1, None
    if deg is not None and deg.denominator == 1:
        deg = int(deg)
    return krull - 1, deg


def independent_set_dimension(I: Ideal) -> int:
    """Krull dimension as the largest set of variables free of leading monomials."""
    leads = I.leading_monomials()
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in leads]
    n = I.ring.nvars
    best = 0

    def rec(i, chosen):
        nonlocal best
        if len(chosen) + (n - i) <= best:
            return
        if i == n:
            best = max(best, len(chosen))
            return
        cand = chosen | {i}
        if not any(s <= cand for s in supports):
            rec(i + 1, cand)
        rec(i + 1, chosen)

    rec(0, frozenset())
    return best


def is_irrelevant(I: Ideal) -> bool:
    """Whether V(I) in weighted projective space is empty (I contains a power of every variable)."""
    leads = I.leading_monomials()
    n = I.ring.nvars
    for v in range(n):
        if not any(m[v] and sum(m) == m[v] for m in leads):
            return False
    return True


__all__ = [
    "BudgetExceeded", "DEFAULT_BUDGET", "Ideal", "MonomialOrder", "WDEGREVLEX", "contains", "eliminate",
    "groebner_basis", "hilbert_numerator", "independent_set_dimension", "intersect", "is_irrelevant",
    "normal_form", "projective_dimension_and_degree", "saturate", "saturate_by_element",
    "saturation_components", "PolynomialError",
]
