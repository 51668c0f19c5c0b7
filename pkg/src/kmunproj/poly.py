"""Sparse multivariate polynomials over F_p or Q with weighted gradings.

Polynomials are immutable values.  Exponent vectors are plain tuples and the
canonical term order is weighted-degree reverse lexicographic, which is also
the default order of the Groebner engine.
"""

from __future__ import annotations

import hashlib
import itertools
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

EXPONENT_LIMIT = 0xFFFF
DEFAULT_PRIME = 101


class PolynomialError(ValueError):
    pass


class RingMismatchError(PolynomialError):
    pass


class NotHomogeneousError(PolynomialError):
    pass


class ExponentOverflowError(PolynomialError):
    pass


class UnknownVariableError(PolynomialError):
    pass


class PolynomialSyntaxError(PolynomialError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Field:
    """Either the prime field F_p (``p`` set) or the rationals (``p is None``)."""

    p: int | None = DEFAULT_PRIME

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def parse(cls, text: str) -> "Field":
        text = text.strip()
        if text in ("Q", "QQ"):
            return cls(None)
        m = re.fullmatch(r"(?:F|GF|ZZ/)(\d+)", text)
        if not m:
            raise ValueError(f"unknown field descriptor {text!r}")
        return cls(int(m.group(1)))

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    def __str__(self):
        return "Q" if self.p is None else f"F{self.p}"

    def __call__(self, value):
        if self.p is None:
            return Fraction(value)
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def inv(self, a):
        if self.p is None:
            return 1 / Fraction(a)
        return pow(a, -1, self.p)

    def signed(self, a):
        """Representative used for printing: symmetric range for F_p."""
        if self.p is None:
            return a
        return a - self.p if a > self.p // 2 else a


@dataclass(frozen=True)
class GradedRing:
    """Polynomial ring with positively weighted variables."""

    variables: tuple[str, ...]
    weights: tuple[int, ...]
    field: Field = Field()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.variables) != len(self.weights):
            raise ValueError("variables and weights differ in length")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variable names must be unique")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        for v in self.variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise ValueError(f"bad variable name {v!r}")

    @classmethod
    def standard(cls, weights: Sequence[int], prefix: str = "x", field: Field | None = None):
        return cls(tuple(f"{prefix}{i}" for i in range(len(weights))), tuple(weights), field or Field())

    @classmethod
    def from_json(cls, data: Mapping) -> "GradedRing":
        return cls(tuple(data["vars"]), tuple(data["weights"]), Field.parse(str(data.get("field", "F101"))))

    def to_json(self) -> dict:
        return {"vars": list(self.variables), "weights": list(self.weights), "field": str(self.field)}

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def adjoin(self, name: str, weight: int) -> "GradedRing":
        """Ring with one extra variable appended (e.g. the unprojection variable)."""
        return GradedRing(self.variables + (name,), self.weights + (weight,), self.field)

    def with_field(self, field: Field) -> "GradedRing":
        return GradedRing(self.variables, self.weights, field)

    def fresh_name(self, stem: str) -> str:
        if stem not in self._index:
            return stem
        for k in itertools.count(1):
            if f"{stem}{k}" not in self._index:
                return f"{stem}{k}"

    # -- elements -------------------------------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: c})

    def var(self, name_or_index) -> "Polynomial":
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self) -> list["Polynomial"]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(exps): coeff})

    def monomials_of_degree(self, degree: int) -> list[tuple[int, ...]]:
        """All exponent vectors of the given weighted degree, canonical order."""
        return monomials_of_degree(self.weights, degree)

    def parse(self, text: str) -> "Polynomial":
        return parse(text, self)

    def monomial_degree(self, exps: Sequence[int]) -> int:
        return sum(w * e for w, e in zip(self.weights, exps))

    def __str__(self):
        ws = ",".join(map(str, self.weights))
        return f"{self.field}[{','.join(self.variables)}] weights ({ws})"


def monomials_of_degree(weights: Sequence[int], degree: int) -> list[tuple[int, ...]]:
    n = len(weights)
    out: list[tuple[int, ...]] = []

    def rec(i, left, acc):
        if i == n - 1:
            if left % weights[i] == 0:
                out.append(tuple(acc + [left // weights[i]]))
            return
        for e in range(left // weights[i], -1, -1):
            rec(i + 1, left - e * weights[i], acc + [e])

    if degree < 0:
        return []
    if n == 0:
        return [()] if degree == 0 else []
    rec(0, degree, [])
    out.sort(key=lambda e: order_key(weights, e), reverse=True)
    return out


def order_key(weights: Sequence[int], exps: Sequence[int]):
    """Sort key of the weighted degree reverse lexicographic order."""
    return (sum(w * e for w, e in zip(weights, exps)), tuple(-e for e in reversed(exps)))


_BITS = 18  # room for the sum of two 16-bit exponents


def _pack(e) -> int:
    k = 0
    for i, x in enumerate(e):
        k |= x << (_BITS * i)
    return k


def _unpack(k: int, n: int) -> tuple[int, ...]:
    mask = (1 << _BITS) - 1
    return tuple((k >> (_BITS * i)) & mask for i in range(n))


class _OverflowMasks(dict):
    def __missing__(self, n):
        high = ((1 << _BITS) - 1) ^ EXPONENT_LIMIT
        v = sum(high << (_BITS * i) for i in range(n))
        self[n] = v
        return v


_OVERFLOW_MASK = _OverflowMasks()


_KERNEL_MUL_THRESHOLD = 400
_MUL_CONTEXTS: dict = {}


def _mul_context(ring):
    """Compiled arithmetic context for large products, or None without the extension."""
    key = (ring.weights, ring.field.p)
    if key not in _MUL_CONTEXTS:
        from . import kernel

        ctx = None
        if kernel.default_backend() == "cython" and ring.field.p < 2**31:
            ctx = kernel.make_context(ring.weights, [tuple(range(ring.nvars))], ring.field.p)
        _MUL_CONTEXTS[key] = ctx
    return _MUL_CONTEXTS[key]


class Polynomial:
    """Immutable sparse polynomial: a map from exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: GradedRing, terms: Mapping[tuple[int, ...], object] | None = None, *, _clean=False):
        self.ring = ring
        self._hash = None
        if _clean:
            self._terms = dict(terms)
            return
        field = ring.field
        n = ring.nvars
        clean: dict[tuple[int, ...], object] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise PolynomialError(f"exponent tuple {exps} does not match ring arity {n}")
            if any(e < 0 for e in exps):
                raise PolynomialError("negative exponent")
            if any(e > EXPONENT_LIMIT for e in exps):
                raise ExponentOverflowError(f"exponent exceeds {EXPONENT_LIMIT}")
            c = field(c)
            if c:
                clean[exps] = c
        self._terms = clean

    # -- basic access ---------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], object]:
        return dict(self._terms)

    def items(self):
        """Terms as (exponents, coefficient), largest monomial first."""
        w = self.ring.weights
        return sorted(self._terms.items(), key=lambda t: order_key(w, t[0]), reverse=True)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def coefficient(self, exps: Sequence[int]):
        return self._terms.get(tuple(exps), self.ring.field(0))

    def leading_monomial(self) -> tuple[int, ...]:
        if not self._terms:
            raise PolynomialError("zero polynomial has no leading monomial")
        w = self.ring.weights
        return max(self._terms, key=lambda e: order_key(w, e))

    def leading_coefficient(self):
        return self._terms[self.leading_monomial()]

    def support_variables(self) -> set[int]:
        return {i for e in self._terms for i, k in enumerate(e) if k}

    # -- grading --------------------------------------------------------------

    def degrees(self) -> set[int]:
        w = self.ring.weights
        return {sum(a * b for a, b in zip(w, e)) for e in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        """Common weighted degree of all terms."""
        if not self._terms:
            raise PolynomialError("the zero polynomial has no degree")
        ds = self.degrees()
        if len(ds) != 1:
            raise NotHomogeneousError(f"polynomial is not homogeneous (degrees {sorted(ds)})")
        return ds.pop()

    def max_degree(self) -> int:
        if not self._terms:
            raise PolynomialError("the zero polynomial has no degree")
        return max(self.degrees())

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if other.ring != self.ring:
            raise RingMismatchError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.field.p
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if p is not None:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial(self.ring, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.field.p
        if p is None:
            return Polynomial(self.ring, {e: -c for e, c in self._terms.items()}, _clean=True)
        return Polynomial(self.ring, {e: p - c for e, c in self._terms.items()}, _clean=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "Polynomial":
        field = self.ring.field
        c = field(c)
        if not c:
            return self.ring.zero()
        p = field.p
        if p is None:
            return Polynomial(self.ring, {e: v * c for e, v in self._terms.items()}, _clean=True)
        return Polynomial(self.ring, {e: v * c % p for e, v in self._terms.items()}, _clean=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self._terms or not other._terms:
            return self.ring.zero()
        p = self.ring.field.p
        n = self.ring.nvars
        if p is not None and len(self._terms) * len(other._terms) >= _KERNEL_MUL_THRESHOLD:
            ctx = _mul_context(self.ring)
            if ctx is not None:
                try:
                    h = ctx.mul(ctx.make(self._terms.items()), ctx.make(other._terms.items()))
                except OverflowError as exc:
                    raise ExponentOverflowError(str(exc)) from None
                return Polynomial(self.ring, dict(ctx.terms(h)), _clean=True)
        # exponents packed into integers: a product of monomials is one addition
        a_items = [(_pack(e), c) for e, c in self._terms.items()]
        b_items = [(_pack(e), c) for e, c in other._terms.items()]
        out: dict = {}
        get = out.get
        for ka, ca in a_items:
            for kb, cb in b_items:
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        clean = {}
        for k, c in out.items():
            if p is not None:
                c %= p
            if c:
                if k & _OVERFLOW_MASK[n]:
                    raise ExponentOverflowError(f"exponent exceeds {EXPONENT_LIMIT}")
                clean[_unpack(k, n)] = c
        return Polynomial(self.ring, clean, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def monic(self) -> "Polynomial":
        if not self._terms:
            return self
        return self.scale(self.ring.field.inv(self.leading_coefficient()))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and substitution -------------------------------------------

    def derivative(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to variable ``index``."""
        if not 0 <= index < self.ring.nvars:
            raise IndexError(f"variable index {index} out of range")
        field = self.ring.field
        out = {}
        for e, c in self._terms.items():
            k = e[index]
            if k == 0:
                continue
            v = field(c * k)
            if v:
                ne = list(e)
                ne[index] = k - 1
                out[tuple(ne)] = v
        return Polynomial(self.ring, out, _clean=True)

    def evaluate(self, point: Sequence):
        field = self.ring.field
        total = field(0)
        for e, c in self._terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x**k
            total += term
        return field(total)

    def substitute(self, images: Sequence["Polynomial"], ring: GradedRing | None = None) -> "Polynomial":
        """Ring map sending variable i to ``images[i]`` (all in ``ring``)."""
        target = ring or images[0].ring
        result = target.zero()
        cache: dict[tuple[int, int], Polynomial] = {}
        for e, c in self._terms.items():
            term = target.constant(c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            result = result + term
        return result

    def embed(self, ring: GradedRing, positions: Sequence[int] | None = None) -> "Polynomial":
        """Same polynomial viewed in a ring with more variables.

        ``positions[i]`` is the index in ``ring`` of variable ``i`` of
        ``self.ring``; by default variables are matched by name.
        """
        if positions is None:
            positions = [ring.index(v) for v in self.ring.variables]
        n = ring.nvars
        out = {}
        for e, c in self._terms.items():
            ne = [0] * n
            for i, k in enumerate(e):
                ne[positions[i]] = k
            out[tuple(ne)] = c
        return Polynomial(ring, out, _clean=True)

    def restrict(self, ring: GradedRing) -> "Polynomial":
        """Inverse of :meth:`embed` for polynomials not involving the dropped variables."""
        pos = [self.ring.index(v) for v in ring.variables]
        keep = set(pos)
        out = {}
        for e, c in self._terms.items():
            if any(k for i, k in enumerate(e) if i not in keep):
                raise PolynomialError("polynomial involves variables outside the target ring")
            out[tuple(e[i] for i in pos)] = c
        return Polynomial(ring, out, _clean=True)

    # -- printing -------------------------------------------------------------

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


# -- text format ---------------------------------------------------------------


def _format_monomial(ring: GradedRing, exps) -> str:
    parts = []
    for name, k in zip(ring.variables, exps):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_polynomial(f: Polynomial) -> str:
    """Canonical text form: terms in decreasing order, ``+ - * ^`` syntax."""
    if f.is_zero():
        return "0"
    field = f.ring.field
    out = []
    for exps, c in f.items():
        c = field.signed(c)
        neg = c < 0
        a = -c if neg else c
        mono = _format_monomial(f.ring, exps)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()/]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolynomialSyntaxError(f"unexpected character {text[start]!r}", start)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: GradedRing):
        self.tokens = _tokenize(text)
        self.i = 0
        self.ring = ring

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise PolynomialSyntaxError(f"expected {op!r}", pos)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise PolynomialSyntaxError("empty expression", 0)
        f = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolynomialSyntaxError(f"unexpected token {val!r}", pos)
        return f

    def expr(self) -> Polynomial:
        f = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                g = self.term()
                f = f + g if val == "+" else f - g
            else:
                return f

    def term(self) -> Polynomial:
        f = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                f = f * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                k, d, pos = self.take()
                if k != "int" or d == 0:
                    raise PolynomialSyntaxError("division only by a nonzero integer literal", pos)
                f = f.scale(self.ring.field.inv(self.ring.field(d)))
            else:
                return f

    def factor(self) -> Polynomial:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            f = self.factor()
            return -f if val == "-" else f
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k, e, pos = self.take()
            if k != "int":
                raise PolynomialSyntaxError("exponent must be a non-negative integer", pos)
            if e > EXPONENT_LIMIT:
                raise ExponentOverflowError(f"exponent exceeds {EXPONENT_LIMIT}")
            return base**e
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "int":
            return self.ring.constant(val)
        if kind == "name":
            if val not in self.ring._index:
                raise UnknownVariableError(f"unknown variable {val!r} at position {pos}")
            return self.ring.var(val)
        if kind == "op" and val == "(":
            f = self.expr()
            self.expect_op(")")
            return f
        raise PolynomialSyntaxError("expected a number, variable or '('" if kind != "end" else "unexpected end of input", pos)


def parse(text: str, ring: GradedRing) -> Polynomial:
    """Parse ``text`` (integers, variables, ``+ - * ^`` and parentheses)."""
    return _Parser(text, ring).parse()


# -- seeded randomness -----------------------------------------------------------


def _label_key(label) -> int:
    digest = hashlib.sha256(repr(label).encode()).digest()
    return int.from_bytes(digest[:8], "little")


def rng_for(seed: int, *labels) -> np.random.Generator:
    """Deterministic generator for the stream named by ``labels`` under ``seed``.

    Streams for distinct label paths are independent; the mapping is stable
    across processes.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_label_key(lab) for lab in labels))
    return np.random.default_rng(ss)


def random_coefficients(field: Field, count: int, rng: np.random.Generator) -> list:
    if field.p is not None:
        return [int(c) for c in rng.integers(1, field.p, size=count)]
    vals = rng.integers(1, 100, size=count) * rng.choice([-1, 1], size=count)
    return [Fraction(int(v)) for v in vals]


def random_form(ring: GradedRing, degree: int, seed: int | np.random.Generator, *labels) -> Polynomial:
    """Dense random homogeneous form of the given weighted degree.

    Every monomial of that degree gets a nonzero coefficient.  When no
    monomial has the requested degree the zero polynomial is returned and a
    :class:`EmptyDegreeWarning` is emitted.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed, "form", degree, *labels)
    basis = ring.monomials_of_degree(degree)
    if not basis:
        warnings.warn(f"no monomials of degree {degree} in {ring}", EmptyDegreeWarning, stacklevel=2)
        return ring.zero()
    coeffs = random_coefficients(ring.field, len(basis), rng)
    return Polynomial(ring, dict(zip(basis, coeffs)), _clean=True)


class EmptyDegreeWarning(UserWarning):
    pass


def random_linear_combination(polys: Iterable[Polynomial], rng: np.random.Generator) -> Polynomial:
    polys = list(polys)
    coeffs = random_coefficients(polys[0].ring.field, len(polys), rng)
    out = polys[0].ring.zero()
    for c, f in zip(coeffs, polys):
        out = out + f.scale(c)
    return out
