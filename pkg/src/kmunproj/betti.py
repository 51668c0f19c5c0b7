"""Graded Betti table arithmetic for linkage.

Tables are stored as {(i, j): beta_ij} and displayed Macaulay2-style:
column i, row j - i.

Linkage: if D of codimension c lies in a complete intersection of degrees
e with sum sigma, the linked scheme S has a (possibly non-minimal)
resolution with shifts

    G_0 = {0}
    G_i = (sigma - F_{c+1-i})  u  (sigma - K_{c-i})     for 1 <= i <= c-1
    G_c = sigma - F_1

where F is the resolution of D and K the Koszul complex of e.  This is
the dual of the mapping cone of K -> F, twisted by sigma.  Two kinds of
cancellation make it minimal:

* a CI generator of degree d that is also a minimal generator of D gives
  a unit in the comparison map, cancelling sigma - d in G_c and G_{c-1};
* afterwards equal shifts in consecutive positions are cancelled
  (consecutive cancellation).  When one shift could cancel against both
  neighbours the result is flagged ambiguous.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence


class BettiError(ValueError):
    pass


class BettiTable:
    def __init__(self, entries: Mapping[tuple[int, int], int] | None = None, nvars: int | None = None,
                 codim: int | None = None):
        clean = {}
        for (i, j), b in (entries or {}).items():
            if b < 0:
                raise BettiError(f"negative Betti number at ({i}, {j})")
            if b:
                clean[(int(i), int(j))] = int(b)
        self.entries = dict(sorted(clean.items()))
        self.nvars = nvars
        self.codim = codim

    # -- constructors ------------------------------------------------------------

    @classmethod
    def from_shifts(cls, shifts: Sequence[Iterable[int]], **kw) -> "BettiTable":
        """shifts[i] is the multiset of degrees of the i-th free module."""
        c: Counter = Counter()
        for i, degs in enumerate(shifts):
            for j in degs:
                c[(i, j)] += 1
        return cls(c, **kw)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], **kw) -> "BettiTable":
        """Rows in the displayed layout: rows[r][i] = beta_{i, i + r}."""
        c = {}
        for r, row in enumerate(rows):
            for i, b in enumerate(row):
                if b:
                    c[(i, i + r)] = b
        return cls(c, **kw)

    # -- access -----------------------------------------------------------------

    def __getitem__(self, ij) -> int:
        return self.entries.get(ij, 0)

    def __eq__(self, other):
        if not isinstance(other, BettiTable):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(tuple(self.entries.items()))

    @property
    def length(self) -> int:
        return max((i for i, _ in self.entries), default=-1)

    @property
    def regularity(self) -> int:
        return max((j - i for i, j in self.entries), default=0)

    def shifts(self, i: int) -> list[int]:
        return sorted(j for (k, j), b in self.entries.items() if k == i for _ in range(b))

    def all_shifts(self) -> list[list[int]]:
        return [self.shifts(i) for i in range(self.length + 1)]

    def ranks(self) -> list[int]:
        return [len(s) for s in self.all_shifts()]

    def rows(self) -> list[list[int]]:
        n = self.length + 1
        return [[self[(i, i + r)] for i in range(n)] for r in range(self.regularity + 1)]

    def hilbert_numerator(self) -> dict[int, int]:
        num: Counter = Counter()
        for (i, j), b in self.entries.items():
            num[j] += (-1) ** i * b
        return {k: v for k, v in sorted(num.items()) if v}

    def alternating_rank_sum(self) -> int:
        return sum((-1) ** i * b for (i, _), b in self.entries.items())

    def is_gorenstein_symmetric(self) -> bool:
        """beta_{i,j} = beta_{c-i, sigma-j} with c the length and sigma the top shift."""
        c = self.length
        top = self.shifts(c)
        if len(top) != 1 or self[(0, 0)] != 1:
            return False
        sigma = top[0]
        return all(self[(c - i, sigma - j)] == b for (i, j), b in self.entries.items())

    # -- I/O -----------------------------------------------------------------

    def to_json(self):
        out = {"layout": "rows are j-i, columns are i", "rows": self.rows()}
        if self.nvars is not None:
            out["nvars"] = self.nvars
        if self.codim is not None:
            out["codim"] = self.codim
        return out

    @classmethod
    def from_json(cls, data) -> "BettiTable":
        if isinstance(data, list):
            return cls.from_rows(data)
        return cls.from_rows(data["rows"], nvars=data.get("nvars"), codim=data.get("codim"))

    def show(self) -> str:
        rows = self.rows()
        width = max((len(str(b)) for row in rows for b in row), default=1)
        head = "      " + " ".join(str(i).rjust(width) for i in range(self.length + 1))
        lines = [head]
        for r, row in enumerate(rows):
            cells = " ".join((str(b) if b else ".").rjust(width) for b in row)
            lines.append(f"{r:>4}: {cells}")
        return "\n".join(lines)

    def __str__(self):
        return self.show()

    def __repr__(self):
        return f"BettiTable(rows={self.rows()})"


# -- Koszul complexes ---------------------------------------------------------------


def koszul_betti(degrees: Sequence[int]) -> BettiTable:
    """Betti table of R/(f_1..f_k) for a regular sequence of the given degrees."""
    degrees = list(degrees)
    if any(d <= 0 for d in degrees):
        raise BettiError("degrees must be positive")
    shifts = [[sum(s) for s in itertools.combinations(degrees, i)] for i in range(len(degrees) + 1)]
    return BettiTable.from_shifts(shifts, codim=len(degrees))


# -- linkage -------------------------------------------------------------------------


@dataclass
class LinkageSteps:
    cone: BettiTable
    after_units: BettiTable
    minimal: BettiTable
    ambiguous: bool
    sigma: int


def _cancel_consecutive(shifts: list[Counter]) -> tuple[list[Counter], bool]:
    """Cancel equal degrees between positions i and i+1; returns (result, ambiguous)."""
    c = len(shifts) - 1
    # a degree present in three consecutive positions can cancel either way
    ambiguous = any(shifts[i - 1][j] and shifts[i + 1][j] for i in range(2, c) for j in shifts[i])
    for i in range(1, c):
        for j in sorted(set(shifts[i]) & set(shifts[i + 1])):
            m = min(shifts[i][j], shifts[i + 1][j])
            shifts[i][j] -= m
            shifts[i + 1][j] -= m
    return [+s for s in shifts], ambiguous


def link_steps(B_D: BettiTable, ci_degrees: Sequence[int], codim: int | None = None,
               minimal_ci: Sequence[int] | None = None) -> LinkageSteps:
    """Linkage of D through a complete intersection of the given degrees, with intermediate tables.

    ``minimal_ci`` lists the CI degrees that are minimal generators of D.
    By default a generic CI element of degree d is taken to be minimal
    when D has minimal generators in degree d (at most beta_{1,d} of them).
    """
    ci = sorted(ci_degrees)
    c = len(ci)
    length = B_D.length
    if codim is not None and codim != c:
        raise BettiError(f"CI has {c} equations but codimension {codim} was declared")
    if B_D.codim is not None and B_D.codim != c:
        raise BettiError(f"D has codimension {B_D.codim}, the CI has {c}")
    if length > c:
        raise BettiError(f"D is not Cohen-Macaulay of codimension {c} (resolution length {length})")
    if B_D[(0, 0)] != 1 or len(B_D.shifts(0)) != 1:
        raise BettiError("D must be cyclic (beta_00 = 1)")
    sigma = sum(ci)
    F = [B_D.shifts(i) for i in range(c + 1)]
    K = [[sum(s) for s in itertools.combinations(ci, i)] for i in range(c + 1)]
    G = [Counter({0: 1})]
    for i in range(1, c):
        G.append(Counter([sigma - f for f in F[c + 1 - i]] + [sigma - k for k in K[c - i]]))
    G.append(Counter(sigma - f for f in F[1]))
    cone = BettiTable.from_shifts([list(g.elements()) for g in G], codim=c)
    if minimal_ci is None:
        avail = Counter(F[1])
        minimal_ci = []
        for d in ci:
            if avail[d] > 0:
                avail[d] -= 1
                minimal_ci.append(d)
    for d in minimal_ci:
        j = sigma - d
        if G[c][j] <= 0 or G[c - 1][j] <= 0:
            raise BettiError(f"CI generator of degree {d} cannot cancel")
        G[c][j] -= 1
        G[c - 1][j] -= 1
    G = [+g for g in G]
    after = BettiTable.from_shifts([list(g.elements()) for g in G], codim=c)
    G, ambiguous = _cancel_consecutive(G)
    minimal = BettiTable.from_shifts([list(g.elements()) for g in G], codim=c)
    if minimal.alternating_rank_sum() != 0 or minimal[(0, 0)] != 1:
        raise BettiError("linkage bookkeeping produced an inexact table")
    return LinkageSteps(cone, after, minimal, ambiguous, sigma)


def link_betti(B_D: BettiTable, ci_degrees: Sequence[int], codim: int | None = None,
               minimal_ci: Sequence[int] | None = None, minimize: bool = True) -> BettiTable:
    steps = link_steps(B_D, ci_degrees, codim, minimal_ci)
    return steps.minimal if minimize else steps.cone


# -- the degree-6 del Pezzo ---------------------------------------------------------


DATA_DIR = Path(__file__).resolve().parent / "data"

DELPEZZO6_KINDS = ("P2xP2", "P1xP1xP1")


def delpezzo6_betti(kind: str = "P2xP2") -> BettiTable:
    """Betti table of the codimension-4 Segre input: a hyperplane section of P2xP2 in P^8
    (kind ``P2xP2``) or P1xP1xP1 in P^7 (kind ``P1xP1xP1``).

    The values are frozen output of ``oracles/betti_koszul_homology.py``.
    """
    data = json.loads((DATA_DIR / "delpezzo6_betti.json").read_text())
    if kind not in data["tables"]:
        raise BettiError(f"unknown del Pezzo input {kind!r}")
    entry = data["tables"][kind]
    return BettiTable.from_rows(entry["rows"], nvars=entry["nvars"], codim=4)


DOUBLE_LINKS = ((2, 2, 2, 3), (2, 2, 3, 3))

DOUBLE_LINK_ROWS = ((1, 0, 0, 0, 0), (0, 2, 0, 0, 0), (0, 8, 18, 8, 0), (0, 0, 0, 2, 0), (0, 0, 0, 0, 1))


def double_link(B: BettiTable, links: Sequence[Sequence[int]] = DOUBLE_LINKS) -> list[LinkageSteps]:
    out = []
    for ci in links:
        step = link_steps(B, ci)
        out.append(step)
        B = step.minimal
    return out


def double_link_table(kind: str = "P2xP2") -> BettiTable:
    """Double linkage of the degree-6 del Pezzo input through X_{2,2,3} cut by a quadric, then a cubic."""
    return double_link(delpezzo6_betti(kind))[-1].minimal
