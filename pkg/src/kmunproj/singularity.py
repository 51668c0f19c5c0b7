"""Jacobian criterion on the affine cone, quasi-smoothness verdicts and node counts.

The singular scheme of V(I) of codimension c is I plus the c x c minors of
the Jacobian of the generators.  Its projective dimension and degree come
from the Hilbert series of the initial ideal, so saturating by the
irrelevant ideal is never needed.

Before the full computation a cheap certificate is tried: restrict the
Jacobian to the stratum where every weight-1 coordinate vanishes.  A
nonempty restricted singular scheme proves singularity outright.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

from .geometry import VarietySpec, instantiate
from .grobner import BudgetExceeded, DEFAULT_BUDGET, Ideal, projective_dimension_and_degree
from .poly import Field, GradedRing, NotHomogeneousError, Polynomial

VERDICTS = ("smooth", "isolated", "positive-dimensional", "singular", "inconclusive")


class NonIntegralBezoutError(ValueError):
    pass


@dataclass
class SingularityReport:
    """Outcome of a singularity check.

    ``verdict`` is one of smooth, isolated (``count`` nodes, as scheme
    degree), positive-dimensional, singular (proved by the stratum
    certificate, extent unknown) or inconclusive (budget exhausted).
    """

    verdict: str
    dimension: int | None = None
    degree: int | Fraction | None = None
    method: str = "full"
    ideal: Ideal | None = field(default=None, repr=False)
    seed: int | None = None
    seconds: float = 0.0

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "smooth" and self.dimension != -1:
            raise ValueError("smooth reports have dimension -1")
        if self.verdict == "isolated" and self.dimension != 0:
            raise ValueError("isolated reports have dimension 0")

    @property
    def count(self):
        return self.degree if self.verdict == "isolated" else None

    @property
    def is_smooth(self) -> bool:
        return self.verdict == "smooth"

    @property
    def is_singular(self) -> bool:
        return self.verdict in ("isolated", "positive-dimensional", "singular")

    def to_json(self):
        deg = self.degree
        if isinstance(deg, Fraction):
            deg = deg.numerator if deg.denominator == 1 else str(deg)
        return {"verdict": self.verdict, "dimension": self.dimension, "degree": deg, "method": self.method,
                "seed": self.seed, "seconds": round(self.seconds, 3)}


# -- Jacobian --------------------------------------------------------------------------


def jacobian(gens: Sequence[Polynomial]) -> list[list[Polynomial]]:
    n = gens[0].ring.nvars
    return [[g.derivative(v) for v in range(n)] for g in gens]


def _det(M: list[list[Polynomial]], ring: GradedRing) -> Polynomial:
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = ring.zero()
    for j in range(n):
        if M[0][j].is_zero():
            continue
        term = M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]], ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobian_minors(J: list[list[Polynomial]], size: int, ring: GradedRing) -> list[Polynomial]:
    """All nonzero size x size minors of J (each listed once, duplicates removed)."""
    rows = len(J)
    cols = len(J[0]) if J else 0
    if size > rows or size > cols:
        return []
    zero_col = [all(J[r][c].is_zero() for r in range(rows)) for c in range(cols)]
    live = [c for c in range(cols) if not zero_col[c]]
    out: dict = {}
    for rs in itertools.combinations(range(rows), size):
        for cs in itertools.combinations(live, size):
            m = _det([[J[r][c] for c in cs] for r in rs], ring)
            if not m.is_zero():
                out.setdefault(m.monic(), None)
    return list(out)


def singular_scheme(I: Ideal, codim: int) -> Ideal:
    """I plus the codim x codim minors of the Jacobian of its generators."""
    if not I.is_homogeneous():
        raise NotHomogeneousError("singular_scheme needs a homogeneous ideal")
    if codim < 1:
        raise ValueError("codimension must be positive")
    gens = list(I.generators)
    minors = jacobian_minors(jacobian(gens), codim, I.ring)
    return Ideal(I.ring, gens + minors, I.budget)


# -- stratum certificate --------------------------------------------------------------


def stratum_singular_scheme(I: Ideal, codim: int, zero_vars: Sequence[int]) -> Ideal | None:
    """Singular scheme intersected with {x_v = 0 for v in zero_vars}, in the remaining variables.

    Returns None when no variables remain.
    """
    R = I.ring
    zero = set(zero_vars)
    keep = [v for v in range(R.nvars) if v not in zero]
    if not keep:
        return None
    sub = GradedRing(tuple(R.variables[v] for v in keep), tuple(R.weights[v] for v in keep), R.field)
    images = [R.zero() if v in zero else R.var(v) for v in range(R.nvars)]

    def restrict(f):
        g = f.substitute(images) if not f.is_zero() else f
        return g.restrict(sub) if not g.is_zero() else sub.zero()

    gens = list(I.generators)
    J = [[restrict(e) for e in row] for row in jacobian(gens)]
    restricted = [restrict(g) for g in gens]
    minors = jacobian_minors(J, codim, sub)
    return Ideal(sub, restricted + minors, I.budget)


def high_weight_stratum(ring: GradedRing) -> list[int]:
    """Indices of the weight-1 variables (the ones set to zero on the orbifold stratum)."""
    return [i for i, w in enumerate(ring.weights) if w == 1]


def check_singularity(I: Ideal, codim: int, seed=None, stratum: bool = True) -> SingularityReport:
    t0 = time.perf_counter()
    try:
        if stratum:
            zero = high_weight_stratum(I.ring)
            if 0 < len(zero) < I.ring.nvars:
                S = stratum_singular_scheme(I, codim, zero)
                if S is not None:
                    dim, _ = projective_dimension_and_degree(S)
                    if dim >= 0:
                        return SingularityReport("singular", None, None, "stratum", S, seed,
                                                 time.perf_counter() - t0)
        S = singular_scheme(I, codim)
        dim, deg = projective_dimension_and_degree(S)
    except BudgetExceeded:
        return SingularityReport("inconclusive", None, None, "full", None, seed, time.perf_counter() - t0)
    dt = time.perf_counter() - t0
    if dim < 0:
        return SingularityReport("smooth", -1, None, "full", S, seed, dt)
    if dim == 0:
        return SingularityReport("isolated", 0, deg, "full", S, seed, dt)
    return SingularityReport("positive-dimensional", dim, deg, "full", S, seed, dt)


def quasi_smooth(V: VarietySpec, seed: int, field: Field | None = None, budget: int = DEFAULT_BUDGET,
                 stratum: bool = True) -> SingularityReport:
    """Jacobian check of a generic member of ``V`` on its affine cone minus the origin."""
    I = instantiate(V, seed, field)
    I.budget = budget
    return check_singularity(I, V.codim, seed, stratum)


def node_count(I: Ideal, codim: int) -> int | Fraction:
    """Degree of the zero-dimensional singular scheme; raises if it is not zero-dimensional."""
    rep = check_singularity(I, codim, stratum=False)
    if rep.verdict != "isolated":
        raise ValueError(f"singular scheme is not zero-dimensional ({rep.verdict})")
    return rep.degree


def node_count_bezout(degrees: Sequence[int], weights: Sequence[int] | None = None) -> int:
    """prod(degrees) / prod(weights) for len(degrees) forms in P(weights) of matching dimension."""
    degrees = list(degrees)
    if any(d == 0 for d in degrees):
        return 0
    if weights is None:
        weights = (1,) * (len(degrees) + 1)
    if len(weights) != len(degrees) + 1:
        raise ValueError("Bezout count needs as many forms as the ambient dimension")
    n = Fraction(prod(degrees), prod(weights))
    if n.denominator != 1:
        raise NonIntegralBezoutError(f"Bezout count {n} is not an integer; use the Groebner degree")
    return int(n)


def count_projective_points(gens: Sequence[Polynomial]) -> int:
    """Number of F_p-points of V(gens) in P^n with all weights one (brute force)."""
    R = gens[0].ring
    p = R.field.p
    if p is None or any(w != 1 for w in R.weights):
        raise ValueError("point counting needs F_p and a standard grading")
    import numpy as np

    n = R.nvars
    total = 0
    for lead in range(n):
        # chart: x_lead = 1, earlier coordinates 0
        free = n - lead - 1
        grids = np.indices((p,) * free).reshape(free, -1) if free else np.zeros((0, 1), dtype=np.int64)
        pts = np.zeros((n, grids.shape[1]), dtype=np.int64)
        pts[lead] = 1
        pts[lead + 1:] = grids
        ok = np.ones(grids.shape[1], dtype=bool)
        for g in gens:
            val = np.zeros(grids.shape[1], dtype=np.int64)
            for e, c in g.items():
                term = np.full(grids.shape[1], int(c) % p, dtype=np.int64)
                for i, k in enumerate(e):
                    if k:
                        term = term * pow_mod(pts[i], k, p) % p
                val = (val + term) % p
            ok &= val == 0
        total += int(ok.sum())
    return total


def pow_mod(a, k, p):
    out = a % p
    for _ in range(k - 1):
        out = out * a % p
    return out
