"""Ambient spaces, variety presentations and dualizing-degree bookkeeping.

A variety is presented inside a weighted projective space by a list of
pieces that meet generically: hypersurfaces of given degrees and matrix
formats (maximal Pfaffians of an antisymmetric matrix with a degree profile,
or the Tom and Jerry Segre cones).  Each piece contributes a codimension, a
Hilbert-series numerator and a top shift ``sigma`` of its resolution; the
dualizing sheaf of the intersection is ``O(sum sigma - sum weights)``.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import prod
from typing import Sequence

from .grobner import Ideal
from .poly import Field, GradedRing, Polynomial, random_form, rng_for


class SpecError(ValueError):
    pass


class UnprojectionHypothesisError(SpecError):
    """k_X <= k_D: no unprojection variable of positive weight exists."""


MATRIX_KINDS = ("pfaffian", "tom", "jerry")

# Betti numbers of the Segre cones over P2xP2 and P1xP1xP1: 1, 9@2, 16@3, 9@4, 1@6
SEGRE_NUMERATOR = {0: 1, 2: -9, 3: 16, 4: -9, 6: 1}


@dataclass(frozen=True)
class MatrixFormat:
    """A matrix format piece.

    ``profile`` lists the upper-triangle entry degrees row by row; ``None``
    means all entries linear.  ``entry_set`` records a printed label such as
    WPf(1,2) whose profile is fixed later by the construction.
    """

    kind: str = "pfaffian"
    profile: tuple[tuple[int, ...], ...] | None = None
    entry_set: tuple[int, ...] | None = None
    size: int = 5

    def __post_init__(self):
        if self.kind not in MATRIX_KINDS:
            raise SpecError(f"unknown matrix format {self.kind!r}")
        if self.profile is not None:
            prof = tuple(tuple(int(d) for d in row) for row in self.profile)
            object.__setattr__(self, "profile", prof)
            object.__setattr__(self, "size", len(prof) + 1)
            for i, row in enumerate(prof):
                if len(row) != self.size - 1 - i:
                    raise SpecError("profile must be the upper triangle of a square matrix")
        if self.kind == "pfaffian" and self.size % 2 == 0:
            raise SpecError("Pfaffian formats need an odd matrix size")
        if self.kind != "pfaffian" and self.size != 5:
            raise SpecError("Tom and Jerry formats are 5x5")

    @property
    def label(self) -> str:
        if self.kind == "tom":
            return "Tom"
        if self.kind == "jerry":
            return "Jerry"
        degs = self.entry_degrees()
        if degs == (1,):
            return "Pf" if self.size == 5 else f"Pf{self.size}"
        return "WPf(" + ",".join(map(str, degs)) + ")"

    def entry_degrees(self) -> tuple[int, ...]:
        if self.profile is None:
            return tuple(self.entry_set) if self.entry_set else (1,)
        return tuple(sorted({d for row in self.profile for d in row}))

    def entry_degree(self, i: int, j: int) -> int:
        if i == j:
            raise SpecError("diagonal entries vanish")
        if i > j:
            i, j = j, i
        if self.profile is None:
            return 1
        return self.profile[i][j - i - 1]

    def row_weights(self) -> tuple[Fraction, ...]:
        """Weights w with w_i + w_j = deg(i, j); may be half-integers."""
        n = self.size
        d = self.entry_degree
        w0 = Fraction(d(0, 1) + d(0, 2) - d(1, 2), 2)
        w = (w0,) + tuple(d(0, j) - w0 for j in range(1, n))
        for i in range(n):
            for j in range(i + 1, n):
                if w[i] + w[j] != d(i, j):
                    raise SpecError(f"degree profile is not of the form w_i + w_j at entry ({i + 1},{j + 1})")
        return w

    @property
    def codim(self) -> int:
        return 3 if self.kind == "pfaffian" else 4

    def generator_degrees(self) -> tuple[int, ...]:
        if self.kind != "pfaffian":
            return (2,) * 9
        if self.profile is None and self.entry_set and self.entry_set != (1,):
            raise SpecError(f"{self.label} has no fixed degree profile")
        w = self.row_weights()
        total = sum(w)
        degs = []
        for i in range(self.size):
            v = total - w[i]
            if v.denominator != 1:
                raise SpecError("Pfaffian degrees are not integral")
            degs.append(int(v))
        return tuple(degs)

    def top_shift(self) -> Fraction:
        """Degree shift of the last module in the resolution."""
        if self.kind != "pfaffian":
            return Fraction(6)
        if self.size not in (5, 7):
            raise SpecError("dualizing degree is only defined for 5x5 and 7x7 Pfaffian formats")
        self.generator_degrees()
        return 2 * sum(self.row_weights())

    def numerator(self) -> dict[int, int]:
        if self.kind != "pfaffian":
            return dict(SEGRE_NUMERATOR)
        sigma = int(self.top_shift())
        num: Counter = Counter({0: 1})
        for f in self.generator_degrees():
            num[f] -= 1
            num[sigma - f] += 1
        num[sigma] -= 1
        return {k: v for k, v in num.items() if v}

    def to_json(self):
        out = {"kind": self.kind}
        if self.profile is not None:
            out["profile"] = [list(r) for r in self.profile]
        if self.entry_set is not None:
            out["entry_set"] = list(self.entry_set)
        if self.size != 5 and self.profile is None:
            out["size"] = self.size
        return out

    @classmethod
    def from_json(cls, data) -> "MatrixFormat":
        if isinstance(data, str):
            return parse_format(data)
        prof = data.get("profile")
        es = data.get("entry_set")
        return cls(data.get("kind", "pfaffian"), tuple(map(tuple, prof)) if prof else None,
                   tuple(es) if es else None, data.get("size", 5))


LINEAR_PF = MatrixFormat()


def parse_format(text: str) -> MatrixFormat:
    text = text.strip()
    if text == "Pf":
        return LINEAR_PF
    m = re.fullmatch(r"Pf(\d+)", text)
    if m:
        return MatrixFormat("pfaffian", size=int(m.group(1)))
    if text == "Tom":
        return MatrixFormat("tom")
    if text == "Jerry":
        return MatrixFormat("jerry")
    m = re.fullmatch(r"WPf\(([\d,\s]+)\)", text)
    if m:
        degs = tuple(sorted(int(x) for x in m.group(1).split(",")))
        return MatrixFormat("pfaffian", None, degs)
    raise SpecError(f"unknown matrix format {text!r}")


def _profile_numerator(degrees: Sequence[int], formats: Sequence[MatrixFormat]) -> dict[int, int]:
    num = {0: 1}
    for d in degrees:
        num = _mul(num, {0: 1, d: -1})
    for f in formats:
        num = _mul(num, f.numerator())
    return num


def _mul(a, b):
    out: Counter = Counter()
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] += x * y
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class AmbientSpace:
    """Weighted projective space, possibly cut by generic constraints (the T of the tables)."""

    weights: tuple[int, ...]
    constraints: tuple[int, ...] = ()
    formats: tuple[MatrixFormat, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "constraints", tuple(int(d) for d in self.constraints))
        object.__setattr__(self, "formats", tuple(self.formats))
        if not self.weights or any(w <= 0 for w in self.weights):
            raise SpecError("weights must be positive")

    @property
    def plain(self) -> "AmbientSpace":
        return AmbientSpace(self.weights)

    def ring(self, field: Field | None = None, names: Sequence[str] | None = None) -> GradedRing:
        names = names or tuple(f"x{i}" for i in range(len(self.weights)))
        return GradedRing(tuple(names), self.weights, field or Field())

    def extend(self, weight: int) -> "AmbientSpace":
        return replace(self, weights=self.weights + (int(weight),))

    def notation(self) -> str:
        return format_wps(self.weights)

    def to_json(self):
        out = {"weights": list(self.weights), "constraints": list(self.constraints)}
        if self.formats:
            out["formats"] = [f.to_json() for f in self.formats]
        return out

    @classmethod
    def from_json(cls, data) -> "AmbientSpace":
        return cls(tuple(data["weights"]), tuple(data.get("constraints", ())),
                   tuple(MatrixFormat.from_json(f) for f in data.get("formats", ())))


@dataclass(frozen=True)
class VarietySpec:
    """A variety in an ambient space: generic hypersurfaces, matrix formats or explicit equations."""

    ambient: AmbientSpace
    ci: tuple[int, ...] = ()
    formats: tuple[MatrixFormat, ...] = ()
    name: str = ""
    generators: tuple[str, ...] | None = None
    variables: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "ci", tuple(int(d) for d in self.ci))
        object.__setattr__(self, "formats", tuple(self.formats))
        if self.generators is not None:
            object.__setattr__(self, "generators", tuple(self.generators))

    # -- presentation data ---------------------------------------------------

    @property
    def is_explicit(self) -> bool:
        return self.generators is not None

    def ring(self, field: Field | None = None) -> GradedRing:
        return self.ambient.ring(field, self.variables)

    def explicit_ideal(self, field: Field | None = None) -> Ideal:
        R = self.ring(field)
        return Ideal.from_strings(R, self.generators)

    def all_degrees(self) -> tuple[int, ...]:
        if self.is_explicit:
            return tuple(g.degree() for g in self.explicit_ideal().generators)
        return self.ambient.constraints + self.ci

    def all_formats(self) -> tuple[MatrixFormat, ...]:
        if self.is_explicit:
            return ()
        return self.ambient.formats + self.formats

    @property
    def codim(self) -> int:
        return len(self.all_degrees()) + sum(f.codim for f in self.all_formats())

    @property
    def dimension(self) -> int:
        return len(self.ambient.weights) - 1 - self.codim

    def numerator(self) -> dict[int, int]:
        return _profile_numerator(self.all_degrees(), self.all_formats())

    def check_degrees(self):
        """Every declared degree must be realised by at least one monomial."""
        weights = self.ambient.weights
        R = GradedRing.standard(weights)
        for d in self.all_degrees():
            if d <= 0 or not R.monomials_of_degree(d):
                raise SpecError(f"no monomial of degree {d} in {format_wps(weights)}")
        for f in self.all_formats():
            if f.kind == "pfaffian" and f.profile is not None:
                for row in f.profile:
                    for d in row:
                        if d > 0 and not R.monomials_of_degree(d):
                            raise SpecError(f"no monomial of degree {d} in {format_wps(weights)}")

    def notation(self) -> str:
        parts = []
        degs = self.all_degrees()
        if degs:
            head = self.name[0] if self.name and self.name[0] in "DXYT" else "V"
            parts.append(f"{head}_{{{','.join(map(str, degs))}}}" if len(degs) > 1 else f"{head}_{degs[0]}")
        parts += [f.label for f in self.all_formats()]
        return " ∩ ".join(parts) + " ⊂ " + self.ambient.notation()

    def to_json(self):
        out = {"ambient": self.ambient.to_json(), "ci": list(self.ci), "name": self.name}
        if self.formats:
            out["formats"] = [f.to_json() for f in self.formats]
        if self.generators is not None:
            out["generators"] = list(self.generators)
            out["vars"] = list(self.variables or self.ring().variables)
        return out

    @classmethod
    def from_json(cls, data) -> "VarietySpec":
        return cls(AmbientSpace.from_json(data["ambient"]), tuple(data.get("ci", ())),
                   tuple(MatrixFormat.from_json(f) for f in data.get("formats", ())), data.get("name", ""),
                   tuple(data["generators"]) if "generators" in data else None,
                   tuple(data["vars"]) if "vars" in data else None)


# -- bookkeeping ------------------------------------------------------------------


def dualizing_degree(V: VarietySpec) -> int | Fraction:
    """k with omega = O(k): sum of the top shifts of the pieces minus the sum of the weights."""
    sigma = Fraction(sum(V.all_degrees()))
    for f in V.all_formats():
        sigma += f.top_shift()
    k = sigma - sum(V.ambient.weights)
    return int(k) if k.denominator == 1 else k


def unprojection_weight(X: VarietySpec, D: VarietySpec) -> int:
    if X.ambient.weights != D.ambient.weights:
        raise SpecError("X and D must live in the same ambient space")
    kx, kd = dualizing_degree(X), dualizing_degree(D)
    if kx <= kd:
        raise UnprojectionHypothesisError(f"k_X = {kx} is not larger than k_D = {kd}")
    s = kx - kd
    if Fraction(s).denominator != 1:
        raise SpecError("unprojection weight is not integral")
    return int(s)


def hilbert_degree(numerator: dict[int, int], weights: Sequence[int]) -> tuple[int, Fraction]:
    """(projective dimension, degree) read off a Hilbert-series numerator."""
    num = dict(numerator)
    order = 0
    while num and sum(num.values()) == 0:
        top = max(num)
        coeffs = [num.get(i, 0) for i in range(top + 1)]
        acc, q = 0, {}
        for i in range(top):
            acc += coeffs[i]
            if acc:
                q[i] = acc
        num = q
        order += 1
    return len(weights) - order - 1, Fraction(sum(num.values()), prod(weights))


def degree(V: VarietySpec) -> Fraction:
    return hilbert_degree(V.numerator(), V.ambient.weights)[1]


def delpezzo_degree(D: VarietySpec) -> int:
    """Anticanonical degree of a del Pezzo surface presented by D."""
    k = dualizing_degree(D)
    if k != -1:
        raise SpecError(f"not anticanonically embedded: k_D = {k}")
    d = degree(D)
    if d.denominator != 1:
        raise SpecError(f"del Pezzo degree {d} is not an integer")
    return int(d)


# -- instantiation ---------------------------------------------------------------


def random_matrix_format(ring: GradedRing, fmt: MatrixFormat, seed, *labels) -> list[list[Polynomial]]:
    """Generic antisymmetric matrix with the format's degree profile."""
    n = fmt.size
    M = [[ring.zero()] * n for _ in range(n)]
    rng = rng_for(seed, "matrix", *labels)
    for i in range(n):
        for j in range(i + 1, n):
            d = fmt.entry_degree(i, j)
            f = random_form(ring, d, rng) if d >= 0 else ring.zero()
            M[i][j] = f
            M[j][i] = -f
    return M


def format_generators(ring: GradedRing, fmt: MatrixFormat, seed, *labels) -> list[Polynomial]:
    from .unprojection import maximal_pfaffians, segre_generic

    if fmt.kind == "pfaffian":
        return maximal_pfaffians(random_matrix_format(ring, fmt, seed, *labels))
    return segre_generic(ring, "P2xP2" if fmt.kind == "tom" else "P1xP1xP1", seed, *labels)


def instantiate(V: VarietySpec, seed: int, field: Field | None = None) -> Ideal:
    """Explicit ideal of a generic member, all choices drawn from ``seed``."""
    if V.is_explicit:
        return V.explicit_ideal(field)
    V.check_degrees()
    R = V.ring(field)
    gens = []
    for n, d in enumerate(V.all_degrees()):
        gens.append(random_form(R, d, seed, "ci", n))
    for n, f in enumerate(V.all_formats()):
        gens.extend(format_generators(R, f, seed, "format", n))
    return Ideal(R, gens)


# -- notation ---------------------------------------------------------------------


def format_wps(weights: Sequence[int]) -> str:
    weights = list(weights)
    if all(w == 1 for w in weights):
        return f"P^{len(weights) - 1}"
    counts = Counter(weights)
    parts = [f"{w}^{c}" if c > 1 else f"{w}" for w, c in sorted(counts.items())]
    return "P(" + ",".join(parts) + ")"


def parse_wps(text: str) -> tuple[int, ...]:
    text = text.strip().replace(" ", "")
    m = re.fullmatch(r"P\^\{?(\d+)\}?", text)
    if m:
        return (1,) * (int(m.group(1)) + 1)
    m = re.fullmatch(r"P\(([\d^,]+)\)", text)
    if not m:
        raise SpecError(f"cannot parse weighted projective space {text!r}")
    out = []
    for part in m.group(1).split(","):
        w, _, c = part.partition("^")
        out.extend([int(w)] * (int(c) if c else 1))
    return tuple(sorted(out))


_GRASSMANNIAN = {"G(2,5)": ((1,) * 10, (LINEAR_PF,))}


@dataclass
class Notation:
    """A parsed table entry such as ``D_{2,3,6} ⊂ P(1^2,2^2,3^2)``."""

    letter: str
    degrees: tuple[int, ...]
    formats: tuple[MatrixFormat, ...]
    weights: tuple[int, ...]
    ambient_formats: tuple[MatrixFormat, ...] = field(default=())


def parse_notation(text: str) -> Notation:
    text = text.strip()
    if "⊂" not in text:
        ambient = text
        body = ""
    else:
        body, ambient = (s.strip() for s in text.rsplit("⊂", 1))
    ambient_formats: tuple = ()
    if ambient in _GRASSMANNIAN:
        weights, ambient_formats = _GRASSMANNIAN[ambient]
    else:
        weights = parse_wps(ambient)
    letter = ""
    degrees: list[int] = []
    formats = []
    for part in (p.strip() for p in body.split("∩")) if body else ():
        m = re.fullmatch(r"([A-Z])_\{?([\d,\s]+)\}?", part)
        if m:
            letter = m.group(1)
            degrees += [int(x) for x in m.group(2).split(",")]
        else:
            formats.append(parse_format(part))
    return Notation(letter, tuple(degrees), tuple(formats), tuple(weights), ambient_formats)


def ambient_from_notation(text: str) -> AmbientSpace:
    """The T column: ``T_6 ⊂ P(1^2,2^2,3^2)``, ``Pf ⊂ P^7`` or a bare space."""
    n = parse_notation(text)
    return AmbientSpace(n.weights, n.degrees, n.ambient_formats + n.formats)


def spec_in(ambient: AmbientSpace, text: str, name: str | None = None) -> VarietySpec:
    """Spec for a table entry, splitting off the pieces already in ``ambient``.

    Raises :class:`SpecError` if the entry does not contain the ambient's
    constraints or lives in a different weighted projective space.
    """
    n = parse_notation(text)
    if n.weights != tuple(sorted(ambient.weights)):
        raise SpecError(f"{text!r} is not in {format_wps(ambient.weights)}")
    degs = Counter(n.degrees)
    for d in ambient.constraints:
        if degs[d] <= 0:
            raise SpecError(f"{text!r} does not contain the constraint of degree {d}")
        degs[d] -= 1
    fmts = list(n.ambient_formats + n.formats)
    for f in ambient.formats:
        if f in fmts:
            fmts.remove(f)
        else:
            raise SpecError(f"{text!r} does not contain the ambient format {f.label}")
    rest = []
    for d in n.degrees:
        if degs[d] > 0:
            rest.append(d)
            degs[d] -= 1
    return VarietySpec(ambient, tuple(rest), tuple(fmts), name or text)
