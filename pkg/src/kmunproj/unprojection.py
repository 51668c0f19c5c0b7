"""Kustin-Miller unprojection constructors.

* ``unproject_codim2``: Reid's Ax - By trick.  From X = (q1 a1 + q2 a2)
  containing D = (q1, q2) it builds Y = (s q1 + a2, s q2 - a1).
* ``km_matrix_codim3`` / ``unproject_codim3``: the 5x5 antisymmetric matrix
  whose Pfaffians unproject D = (q1, q2, q3) from X = (sum a q, sum b q).
* ``unproject_pfaffian_extension``: the (n+2)x(n+2) matrix N built from a
  Pfaffian D of size n.
* ``tom_matrix`` / ``jerry_matrix`` and the Segre cones that are the
  results of those unprojections.

Pfaffians are expanded recursively along the first row,
Pf(A) = sum_j (-1)^j a_{0j} Pf(A minus rows/cols 0, j) with 0-based j.
The k-th maximal Pfaffian of an odd matrix is taken with sign (-1)^k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .grobner import Ideal
from .poly import GradedRing, NotHomogeneousError, Polynomial, random_form, rng_for


class UnprojectionError(ValueError):
    pass


class DegreeMismatchError(UnprojectionError):
    pass


# -- antisymmetric matrices ------------------------------------------------------


class AntisymmetricMatrix:
    """Square antisymmetric matrix of polynomials in a common ring."""

    def __init__(self, ring: GradedRing, entries: Sequence[Sequence[Polynomial]]):
        n = len(entries)
        self.ring = ring
        self.n = n
        rows = [list(r) for r in entries]
        for i in range(n):
            if len(rows[i]) != n:
                raise UnprojectionError("matrix is not square")
            if not rows[i][i].is_zero():
                raise UnprojectionError("diagonal entries must vanish")
            for j in range(i + 1, n):
                if rows[i][j] != -rows[j][i]:
                    raise UnprojectionError(f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) are not opposite")
        self.entries = tuple(tuple(r) for r in rows)
        self._memo: dict = {}

    @classmethod
    def from_upper(cls, ring: GradedRing, upper: Sequence[Sequence[Polynomial]]) -> "AntisymmetricMatrix":
        """Build from the strict upper triangle given row by row."""
        n = len(upper) + 1
        M = [[ring.zero()] * n for _ in range(n)]
        for i, row in enumerate(upper):
            if len(row) != n - 1 - i:
                raise UnprojectionError("upper triangle has the wrong shape")
            for k, f in enumerate(row):
                j = i + 1 + k
                M[i][j] = f
                M[j][i] = -f
        return cls(ring, M)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def upper(self) -> list[list[Polynomial]]:
        return [[self.entries[i][j] for j in range(i + 1, self.n)] for i in range(self.n - 1)]

    def degree_profile(self) -> list[list[int | None]]:
        """Entry degrees of the upper triangle (None for zero entries)."""
        out = []
        for row in self.upper():
            out.append([None if f.is_zero() else f.degree() for f in row])
        return out

    def row_weights(self) -> tuple[Fraction, ...]:
        """Weights w with deg(i, j) = w_i + w_j on the nonzero entries."""
        n = self.n
        deg = {}
        for i in range(n):
            for j in range(i + 1, n):
                f = self.entries[i][j]
                if not f.is_zero():
                    if not f.is_homogeneous():
                        raise NotHomogeneousError(f"entry ({i + 1},{j + 1}) is not homogeneous")
                    deg[(i, j)] = f.degree()
        w: list = [None] * n
        # seed from a triangle of nonzero entries, then propagate
        for i, j, k in itertools.combinations(range(n), 3):
            if (i, j) in deg and (i, k) in deg and (j, k) in deg:
                w[i] = Fraction(deg[(i, j)] + deg[(i, k)] - deg[(j, k)], 2)
                break
        else:
            raise UnprojectionError("cannot determine row weights")
        changed = True
        while changed:
            changed = False
            for (i, j), d in deg.items():
                if w[i] is not None and w[j] is None:
                    w[j] = d - w[i]
                    changed = True
                elif w[j] is not None and w[i] is None:
                    w[i] = d - w[j]
                    changed = True
        if any(x is None for x in w):
            raise UnprojectionError("cannot determine row weights")
        for (i, j), d in deg.items():
            if w[i] + w[j] != d:
                raise DegreeMismatchError(f"entry ({i + 1},{j + 1}) breaks the degree profile")
        return tuple(w)

    def pfaffian(self, delete: Sequence[int] = ()) -> Polynomial:
        """Pfaffian of the submatrix with the given rows and columns removed."""
        keep = tuple(i for i in range(self.n) if i not in set(delete))
        if len(keep) % 2:
            raise UnprojectionError("Pfaffian of an odd-sized matrix")
        return self._pf(keep)

    def _pf(self, idx: tuple[int, ...]) -> Polynomial:
        if not idx:
            return self.ring.one()
        hit = self._memo.get(idx)
        if hit is not None:
            return hit
        first = idx[0]
        total = self.ring.zero()
        for pos in range(1, len(idx)):
            a = self.entries[first][idx[pos]]
            if a.is_zero():
                continue
            rest = idx[1:pos] + idx[pos + 1:]
            term = a * self._pf(rest)
            total = total + term if pos % 2 else total - term
        self._memo[idx] = total
        return total

    def maximal_pfaffians(self) -> list[Polynomial]:
        if self.n % 2 == 0:
            raise UnprojectionError("maximal Pfaffians need an odd matrix size")
        return [self.pfaffian([k]) if k % 2 == 0 else -self.pfaffian([k]) for k in range(self.n)]

    def determinant(self) -> Polynomial:
        """Cofactor expansion (used as an oracle for small matrices)."""
        return _det([list(r) for r in self.entries], self.ring)

    def to_json(self):
        return {"size": self.n, "upper": [[str(f) for f in row] for row in self.upper()]}

    def __str__(self):
        return "\n".join("[" + ", ".join(str(f) for f in row) + "]" for row in self.entries)


def _det(M, ring):
    n = len(M)
    if n == 0:
        return ring.one()
    if n == 1:
        return M[0][0]
    total = ring.zero()
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def pfaffian(M: AntisymmetricMatrix, delete: Sequence[int] = ()) -> Polynomial:
    return M.pfaffian(delete)


def maximal_pfaffians(M) -> list[Polynomial]:
    if not isinstance(M, AntisymmetricMatrix):
        M = AntisymmetricMatrix(M[0][0].ring, M)
    return M.maximal_pfaffians()


# -- results ---------------------------------------------------------------------


@dataclass
class UnprojectionResult:
    """Y in the ring extended by the unprojection variable, with its exceptional data."""

    ring: GradedRing
    variable: str
    weight: int
    generators: list[Polynomial]
    exceptional: list[Polynomial]
    x_generators: list[Polynomial]
    matrix: AntisymmetricMatrix | None = None
    provenance: dict = field(default_factory=dict)
    generic: bool = True

    @property
    def base_ring(self) -> GradedRing:
        return self.exceptional[0].ring if self.exceptional else self.x_generators[0].ring

    @property
    def ideal(self) -> Ideal:
        return Ideal(self.ring, self.generators)

    @property
    def point(self) -> tuple[int, ...]:
        """The unprojection point: every original coordinate zero, the new one equal to 1."""
        i = self.ring.index(self.variable)
        return tuple(1 if k == i else 0 for k in range(self.ring.nvars))

    def to_json(self):
        out = {
            "ring": self.ring.to_json(),
            "variable": self.variable,
            "weight": self.weight,
            "generators": [str(g) for g in self.generators],
            "degrees": [g.degree() for g in self.generators if not g.is_zero()],
            "exceptional": [str(g) for g in self.exceptional],
            "x_generators": [str(g) for g in self.x_generators],
            "point": list(self.point),
            "generic": self.generic,
            "provenance": self.provenance,
        }
        if self.matrix is not None:
            out["matrix"] = self.matrix.to_json()
        return out


def _degree(f: Polynomial, what: str) -> int:
    if f.is_zero():
        raise DegreeMismatchError(f"{what} is zero")
    return f.degree()


# -- codimension 2 ----------------------------------------------------------------


def unproject_codim2(q1: Polynomial, q2: Polynomial, a1: Polynomial, a2: Polynomial, name: str = "s",
                     provenance: dict | None = None) -> UnprojectionResult:
    """Unproject D = V(q1, q2) from X = V(q1 a1 + q2 a2)."""
    R = q1.ring
    d1, d2 = _degree(q1, "q1"), _degree(q2, "q2")
    k1, k2 = _degree(a1, "a1"), _degree(a2, "a2")
    if k1 + d1 != k2 + d2:
        raise DegreeMismatchError("q1 a1 and q2 a2 have different degrees")
    w = k1 - d2
    if w <= 0:
        raise DegreeMismatchError(f"unprojection variable would have weight {w}")
    name = name if name not in R.variables else R.fresh_name(name)
    S = R.adjoin(name, w)
    s = S.var(name)
    Q1, Q2, A1, A2 = (f.embed(S) for f in (q1, q2, a1, a2))
    gens = [s * Q1 + A2, s * Q2 - A1]
    return UnprojectionResult(S, name, w, gens, [q1, q2], [q1 * a1 + q2 * a2], None,
                              provenance or {"constructor": "codim2"})


# -- codimension 3 ----------------------------------------------------------------


def km_matrix_codim3(q: Sequence[Polynomial], a: Sequence[Polynomial], b: Sequence[Polynomial],
                     name: str = "t", t_weight: int | None = None) -> tuple[AntisymmetricMatrix, GradedRing]:
    """The 5x5 matrix with rows (0, t, a), (-t, 0, b) and the cross-product block of q.

    Returns the matrix over the ring extended by ``t`` together with that ring.
    """
    if len(q) != 3 or len(a) != 3 or len(b) != 3:
        raise UnprojectionError("need three q, a and b")
    R = q[0].ring
    d = [_degree(x, f"q{i + 1}") for i, x in enumerate(q)]
    e1 = {x.degree() + d[i] for i, x in enumerate(a) if not x.is_zero()}
    e2 = {x.degree() + d[i] for i, x in enumerate(b) if not x.is_zero()}
    if len(e1) > 1 or len(e2) > 1:
        raise DegreeMismatchError("the a's (or b's) do not give homogeneous sums")
    if t_weight is None:
        if not e1 or not e2:
            raise DegreeMismatchError("t weight undetermined for vanishing a or b; pass t_weight")
        t_weight = e1.pop() + e2.pop() - sum(d)
    elif e1 and e2 and t_weight != min(e1) + min(e2) - sum(d):
        raise DegreeMismatchError("t weight disagrees with the degree profile")
    if t_weight <= 0:
        raise DegreeMismatchError(f"t would have weight {t_weight}")
    name = name if name not in R.variables else R.fresh_name(name)
    S = R.adjoin(name, t_weight)
    t = S.var(name)
    A = [x.embed(S) for x in a]
    B = [x.embed(S) for x in b]
    Q = [x.embed(S) for x in q]
    upper = [
        [t, A[0], A[1], A[2]],
        [B[0], B[1], B[2]],
        [Q[2], -Q[1]],
        [Q[0]],
    ]
    return AntisymmetricMatrix.from_upper(S, upper), S


def km_expected_pfaffians(q, a, b, t) -> list[Polynomial]:
    """{sum b q, sum a q, t q_i - (a_j b_k - a_k b_j)} for cyclic (i, j, k)."""
    out = [sum((b[i] * q[i] for i in range(3)), t.ring.zero()), sum((a[i] * q[i] for i in range(3)), t.ring.zero())]
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        out.append(t * q[i] - (a[j] * b[k] - a[k] * b[j]))
    return out


def unproject_codim3(q, a, b, name: str = "t", t_weight: int | None = None,
                     provenance: dict | None = None) -> UnprojectionResult:
    M, S = km_matrix_codim3(q, a, b, name, t_weight)
    R = q[0].ring
    h1 = sum((a[i] * q[i] for i in range(3)), R.zero())
    h2 = sum((b[i] * q[i] for i in range(3)), R.zero())
    generic = not any(x.is_zero() for x in list(a) + list(b))
    var = S.variables[-1]
    return UnprojectionResult(S, var, S.weights[-1], M.maximal_pfaffians(), list(q), [h1, h2], M,
                              provenance or {"constructor": "codim3"}, generic)


# -- Pfaffian extension ---------------------------------------------------------


def unproject_pfaffian_extension(M: AntisymmetricMatrix, a: Sequence[Polynomial], b: Sequence[Polynomial],
                                 name: str = "t", provenance: dict | None = None) -> UnprojectionResult:
    """Unproject D = (maximal Pfaffians f of M) from X = (sum a f, sum b f).

    N has rows (0, t, a), (-t, 0, b) and M in the lower right block.
    """
    n = M.n
    if len(a) != n or len(b) != n:
        raise UnprojectionError("need one a and one b per row of M")
    R = M.ring
    f = M.maximal_pfaffians()
    h1 = sum((a[i] * f[i] for i in range(n)), R.zero())
    h2 = sum((b[i] * f[i] for i in range(n)), R.zero())
    if h1.is_zero() or h2.is_zero() or not h1.is_homogeneous() or not h2.is_homogeneous():
        raise DegreeMismatchError("sum a f and sum b f must be nonzero and homogeneous")
    sigma2 = 2 * sum(x.degree() for x in f)
    if sigma2 % (n - 1):
        raise DegreeMismatchError("Pfaffian degrees of M are inconsistent")
    w = h1.degree() + h2.degree() - sigma2 // (n - 1)
    if w <= 0:
        raise DegreeMismatchError(f"t would have weight {w}")
    name = name if name not in R.variables else R.fresh_name(name)
    S = R.adjoin(name, w)
    t = S.var(name)
    full = [[S.zero()] * (n + 2) for _ in range(n + 2)]
    full[0][1], full[1][0] = t, -t
    for i in range(n):
        full[0][i + 2], full[i + 2][0] = a[i].embed(S), -a[i].embed(S)
        full[1][i + 2], full[i + 2][1] = b[i].embed(S), -b[i].embed(S)
        for j in range(n):
            full[i + 2][j + 2] = M.entries[i][j].embed(S)
    N = AntisymmetricMatrix(S, full)
    return UnprojectionResult(S, name, w, N.maximal_pfaffians(), f, [h1, h2], N,
                              provenance or {"constructor": "extend", "n": n})


# -- Tom and Jerry -----------------------------------------------------------------


def _linear(fs, what):
    for f in fs:
        if f.is_zero() or not f.is_homogeneous() or f.degree() != 1:
            raise DegreeMismatchError(f"{what} must be nonzero linear forms")


def tom_matrix(l: Sequence[Polynomial], h: Sequence[Polynomial]) -> AntisymmetricMatrix:
    """First row (0, h1, h2, h3, h4); l1, l2 / l3, l4 in the 2x2 block of rows 2-3 and columns 4-5."""
    if len(l) != 4 or len(h) != 4:
        raise UnprojectionError("Tom needs four l and four h")
    _linear(l, "l")
    _linear([x for x in h if not x.is_zero()], "h")
    R = l[0].ring
    z = R.zero()
    upper = [
        [h[0], h[1], h[2], h[3]],
        [z, l[0], l[1]],
        [l[2], l[3]],
        [z],
    ]
    return AntisymmetricMatrix.from_upper(R, upper)


def jerry_matrix(l: Sequence[Polynomial], h: Sequence[Polynomial], variant: str = "printed") -> AntisymmetricMatrix:
    """The Jerry matrix.

    ``variant="printed"`` reuses l3 at entries (1,4) and (2,4);
    ``variant="l5"`` puts a fifth form ``l[4]`` at entry (2,4).
    """
    if variant not in ("printed", "l5"):
        raise UnprojectionError(f"unknown Jerry variant {variant!r}")
    need = 5 if variant == "l5" else 4
    if len(l) != need or len(h) != 3:
        raise UnprojectionError(f"Jerry ({variant}) needs {need} l and three h")
    _linear(l, "l")
    _linear(h, "h")
    R = l[0].ring
    z = R.zero()
    l24 = l[4] if variant == "l5" else l[2]
    upper = [
        [l[0], l[1], l[2], z],
        [z, l24, l[3]],
        [h[0], h[1]],
        [h[2]],
    ]
    return AntisymmetricMatrix.from_upper(R, upper)


# -- Segre cones -----------------------------------------------------------------


SEGRE_KINDS = ("P2xP2", "P1xP1xP1")


def segre_ring(kind: str, field=None) -> GradedRing:
    from .poly import Field

    field = field or Field()
    if kind == "P2xP2":
        names = tuple(f"z{i}{j}" for i in range(3) for j in range(3)) + ("v",)
    elif kind == "P1xP1xP1":
        names = tuple(f"z{i}{j}{k}" for i in range(2) for j in range(2) for k in range(2)) + ("v",)
    else:
        raise UnprojectionError(f"unknown Segre cone {kind!r}")
    return GradedRing(names, (1,) * len(names), field)


def _segre_quadrics(coords, kind):
    """Quadrics of the Segre variety in the given coordinate forms (vertex excluded)."""
    if kind == "P2xP2":
        Z = [coords[3 * i:3 * i + 3] for i in range(3)]
        out = []
        for (i, k), (j, m) in itertools.product(itertools.combinations(range(3), 2), repeat=2):
            out.append(Z[i][j] * Z[k][m] - Z[i][m] * Z[k][j])
        return out
    # P1xP1xP1: the three 2x4 flattenings, 18 minors spanning 9 quadrics
    def z(i, j, k):
        return coords[4 * i + 2 * j + k]

    cols = list(itertools.product(range(2), repeat=2))
    out = []
    for axis in range(3):
        def entry(r, c):
            idx = [0, 0, 0]
            idx[axis] = r
            others = [p for p in range(3) if p != axis]
            idx[others[0]], idx[others[1]] = c
            return z(*idx)

        for c1, c2 in itertools.combinations(cols, 2):
            out.append(entry(0, c1) * entry(1, c2) - entry(0, c2) * entry(1, c1))
    return out


def _independent(polys: list[Polynomial]) -> list[Polynomial]:
    """A maximal linearly independent subfamily, chosen greedily in order."""
    chosen: list[Polynomial] = []
    span: list[Polynomial] = []
    pivots: list[tuple] = []
    for f in polys:
        g = f
        for p, b in zip(pivots, span):
            c = g.coefficient(p)
            if c:
                g = g - b.scale(c)
        if g.is_zero():
            continue
        g = g.monic()
        p = g.leading_monomial()
        span = [b - g.scale(b.coefficient(p)) if b.coefficient(p) else b for b in span]
        span.append(g)
        pivots.append(p)
        chosen.append(f)
    return chosen


def segre_cone_ideal(kind: str, field=None) -> Ideal:
    """Ideal of the cone over the Segre embedding; the last variable ``v`` is the vertex direction."""
    R = segre_ring(kind, field)
    coords = R.gens()[:-1]
    return Ideal(R, _independent(_segre_quadrics(coords, kind)))


def segre_generic(ring: GradedRing, kind: str, seed, *labels) -> list[Polynomial]:
    """Segre quadrics in generic linear forms of ``ring``."""
    if kind not in SEGRE_KINDS:
        raise UnprojectionError(f"unknown Segre cone {kind!r}")
    n = 9 if kind == "P2xP2" else 8
    rng = rng_for(seed, "segre", kind, *labels)
    coords = [random_form(ring, 1, rng) for _ in range(n)]
    quads = _segre_quadrics(coords, kind)
    return _independent(quads)


# -- generic instances -------------------------------------------------------------


def generic_forms(ring: GradedRing, degrees: Sequence[int], seed, label: str) -> list[Polynomial]:
    rng = rng_for(seed, label, tuple(degrees))
    return [random_form(ring, d, rng) for d in degrees]


def codim2_instance(ring: GradedRing, q_degrees: Sequence[int], d: int, seed, constraints=()) -> UnprojectionResult:
    """Generic codim-2 data: q of the given degrees, a_i of degree d - d_i."""
    d1, d2 = q_degrees
    q1, q2 = generic_forms(ring, (d1, d2), seed, "q")
    a1, a2 = generic_forms(ring, (d - d1, d - d2), seed, "a")
    res = unproject_codim2(q1, q2, a1, a2, provenance={"constructor": "codim2", "seed": seed,
                                                        "q_degrees": [d1, d2], "d": d})
    return res


def codim3_instance(ring: GradedRing, q_degrees: Sequence[int], e: Sequence[int], seed) -> UnprojectionResult:
    q = generic_forms(ring, q_degrees, seed, "q")
    a = generic_forms(ring, [e[0] - x for x in q_degrees], seed, "a")
    b = generic_forms(ring, [e[1] - x for x in q_degrees], seed, "b")
    return unproject_codim3(q, a, b, provenance={"constructor": "codim3", "seed": seed,
                                                 "q_degrees": list(q_degrees), "e": list(e)})


def extension_instance(ring: GradedRing, n: int, e: Sequence[int], seed) -> UnprojectionResult:
    """Generic linear n x n matrix M and generic a, b with sum a f, sum b f of degrees e."""
    rng = rng_for(seed, "extend", n)
    upper = [[random_form(ring, 1, rng) for _ in range(n - 1 - i)] for i in range(n - 1)]
    M = AntisymmetricMatrix.from_upper(ring, upper)
    fdeg = (n - 1) // 2
    a = [random_form(ring, e[0] - fdeg, rng) for _ in range(n)]
    b = [random_form(ring, e[1] - fdeg, rng) for _ in range(n)]
    return unproject_pfaffian_extension(M, a, b, provenance={"constructor": "extend", "seed": seed, "n": n,
                                                             "e": list(e)})


# -- verification hooks ------------------------------------------------------------


def check_codim2_identity(res: UnprojectionResult) -> bool:
    """q2 g1 - q1 g2 equals the equation of X exactly."""
    q1, q2 = (f.embed(res.ring) for f in res.exceptional)
    g1, g2 = res.generators
    return q2 * g1 - q1 * g2 == res.x_generators[0].embed(res.ring)


def _same_up_to_sign(f: Polynomial, g: Polynomial) -> bool:
    return f == g or f == -g


def check_pfaffian_identity(res: UnprojectionResult) -> bool:
    """Maximal Pfaffians of N against the expected ones, up to sign.

    Deleting row 1 gives sum b f, deleting row 2 gives sum a f, and
    deleting row i + 2 gives t f_i plus terms free of t.
    """
    if res.matrix is None:
        raise UnprojectionError("no matrix to check")
    S = res.ring
    pf = res.matrix.maximal_pfaffians()
    h1, h2 = (h.embed(S) for h in res.x_generators)
    if not (_same_up_to_sign(pf[0], h2) and _same_up_to_sign(pf[1], h1)):
        return False
    ti = S.index(res.variable)
    t = S.var(ti)
    for p, f in zip(pf[2:], res.exceptional):
        tf = t * f.embed(S)
        if not any(all(e[ti] == 0 for e, _ in (p - sign * tf).items()) for sign in (1, -1)):
            return False
    return True


def check_containment(res: UnprojectionResult) -> bool:
    """The equations of X lie in the ideal of D."""
    D = Ideal(res.base_ring, res.exceptional)
    return all(h in D for h in res.x_generators)


def elimination_roundtrip(res: UnprojectionResult, budget: int | None = None) -> bool:
    """Eliminate the unprojection variable, saturate by the ideal of D and compare with X."""
    from .grobner import eliminate, saturate

    Y = res.ideal
    if budget is not None:
        Y.budget = budget
    E = eliminate(Y, [res.variable])
    R = res.base_ring
    E = Ideal(R, [g.embed(R) for g in E.generators], Y.budget)
    sat = saturate(E, res.exceptional)
    return sat == Ideal(R, res.x_generators, Y.budget)
