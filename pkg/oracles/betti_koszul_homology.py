"""Independent Betti-number oracle: Koszul homology of an Artinian reduction.

For a Cohen-Macaulay R/I of Krull dimension k, cutting by k generic linear
forms keeps the graded Betti numbers.  The reduction A is finite
dimensional, so beta_{i,j} = dim H_i(K(y) (x) A)_j is plain linear algebra.

Groebner bases and normal forms come from sympy (not from kmunproj), ranks
from Gaussian elimination mod p in numpy.  Running this script rewrites
src/kmunproj/data/delpezzo6_betti.json.

    python3 oracles/betti_koszul_homology.py
"""

import itertools
import json
import sys
from pathlib import Path

import numpy as np
import sympy

P = 101


def rank_mod_p(M, p=P):
    M = np.array(M, dtype=np.int64) % p
    if M.size == 0:
        return 0
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        piv = np.nonzero(M[r:, c])[0]
        if piv.size == 0:
            continue
        k = r + piv[0]
        M[[r, k]] = M[[k, r]]
        M[r] = M[r] * pow(int(M[r, c]), p - 2, p) % p
        others = np.nonzero(M[:, c])[0]
        others = others[others != r]
        if others.size:
            M[others] = (M[others] - np.outer(M[others, c], M[r])) % p
        r += 1
        if r == rows:
            break
    return r


def artinian_reduction(gens, xs, cut, seed=0, p=P):
    """Substitute a random coordinate change and kill the last ``cut`` coordinates."""
    rng = np.random.default_rng(seed)
    n = len(xs)
    keep = xs[: n - cut]
    A = rng.integers(0, p, size=(n, n - cut))
    images = {x: sum(int(A[i, j]) * keep[j] for j in range(n - cut)) for i, x in enumerate(xs)}
    out = [sympy.expand(g.subs(images, simultaneous=True)) for g in gens]
    return [g for g in out if g != 0], keep


def betti_numbers(gens, ys, p=P):
    """Graded Betti numbers of k[ys]/(gens), which must be Artinian."""
    G = sympy.groebner(gens, *ys, modulus=p, order="grevlex")
    leads = [sympy.Poly(g, *ys).monoms(order="grevlex")[0] for g in G.exprs]

    def standard(m):
        return not any(all(a <= b for a, b in zip(l, m)) for l in leads)

    n = len(ys)
    basis = {0: [(0,) * n]}
    d = 0
    while basis[d]:
        d += 1
        nxt = set()
        for m in basis[d - 1]:
            for v in range(n):
                e = list(m)
                e[v] += 1
                e = tuple(e)
                if standard(e):
                    nxt.add(e)
        basis[d] = sorted(nxt)
    top = d - 1
    index = {deg: {m: k for k, m in enumerate(ms)} for deg, ms in basis.items()}

    def times(v, m):
        """Coordinates of y_v * m in the standard basis of degree deg(m) + 1."""
        e = list(m)
        e[v] += 1
        expr = sympy.Mul(*[y ** k for y, k in zip(ys, e)])
        _, r = G.reduce(expr)
        vec = [0] * len(basis.get(sum(e), []))
        if r == 0:
            return vec
        for mono, c in sympy.Poly(r, *ys, modulus=p).terms():
            vec[index[sum(e)][mono]] = int(c) % p
        return vec

    mult = {}
    for deg in range(top):
        for m in basis[deg]:
            for v in range(n):
                mult[(v, m)] = times(v, m)

    def differential(i, j):
        """Matrix of K_i -> K_{i-1} in internal degree j (rows index the target)."""
        src = [(S, m) for S in itertools.combinations(range(n), i) for m in basis.get(j - i, [])]
        tgt = [(S, m) for S in itertools.combinations(range(n), i - 1) for m in basis.get(j - i + 1, [])]
        tpos = {t: k for k, t in enumerate(tgt)}
        M = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for col, (S, m) in enumerate(src):
            for k, s in enumerate(S):
                rest = S[:k] + S[k + 1:]
                sign = 1 if k % 2 == 0 else -1
                for idx, c in enumerate(mult.get((s, m), ())):
                    if c:
                        row = tpos[(rest, basis[j - i + 1][idx])]
                        M[row, col] = (M[row, col] + sign * c) % p
        return M, len(src)

    betti = {}
    for i in range(n + 1):
        for j in range(i, i + top + 1):
            dim = len(list(itertools.combinations(range(n), i))) * len(basis.get(j - i, []))
            if not dim:
                continue
            r_out = rank_mod_p(differential(i, j)[0], p) if i > 0 else 0
            r_in = rank_mod_p(differential(i + 1, j)[0], p) if i < n else 0
            b = dim - r_out - r_in
            if b:
                betti[(i, j)] = b
    return betti


def rows_of(betti):
    length = max(i for i, _ in betti)
    reg = max(j - i for i, j in betti)
    return [[betti.get((i, i + r), 0) for i in range(length + 1)] for r in range(reg + 1)]


def segre_p2p2_section():
    """P2 x P2 in P^8 (2x2 minors) cut by a generic hyperplane, as an ideal in 8 variables."""
    z = sympy.symbols("z0:9")
    Z = [z[3 * i:3 * i + 3] for i in range(3)]
    minors = [Z[i][j] * Z[k][m] - Z[i][m] * Z[k][j]
              for i, k in itertools.combinations(range(3), 2) for j, m in itertools.combinations(range(3), 2)]
    rng = np.random.default_rng(5)
    c = rng.integers(1, P, size=8)
    last = sum(int(c[k]) * z[k] for k in range(8))
    return [sympy.expand(f.subs(z[8], last)) for f in minors], list(z[:8])


def segre_p1p1p1():
    """P1 x P1 x P1 in P^7: kernel of the degree-2 part of the trilinear parametrisation."""
    z = sympy.symbols("z0:8")
    s = sympy.symbols("s0:2 t0:2 u0:2")
    param = [s[i] * s[2 + j] * s[4 + k] for i in range(2) for j in range(2) for k in range(2)]
    quads = [z[a] * z[b] for a, b in itertools.combinations_with_replacement(range(8), 2)]
    images = [sympy.Poly(sympy.expand(param[a] * param[b]), *s)
              for a, b in itertools.combinations_with_replacement(range(8), 2)]
    monos = sorted({m for f in images for m in f.monoms()})
    mat = sympy.Matrix([[f.coeff_monomial(m) for f in images] for m in monos])
    kernel = mat.nullspace()
    gens = [sympy.expand(sum(v[k] * quads[k] for k in range(len(quads)))) for v in kernel]
    gens = [sympy.expand(g * sympy.ilcm(*[sympy.fraction(c)[1] for c in sympy.Poly(g, *z).coeffs()])) for g in gens]
    return gens, list(z)


def compute():
    out = {}
    for kind, (gens, xs) in (("P2xP2", segre_p2p2_section()), ("P1xP1xP1", segre_p1p1p1())):
        reduced, ys = artinian_reduction(gens, xs, cut=4)
        betti = betti_numbers(reduced, ys)
        out[kind] = {"nvars": len(xs), "rows": rows_of(betti), "generators": len(gens)}
    return out


def main(argv=None):
    tables = compute()
    target = Path(__file__).resolve().parents[1] / "src" / "kmunproj" / "data" / "delpezzo6_betti.json"
    payload = {
        "oracle": "oracles/betti_koszul_homology.py (sympy Groebner bases, Artinian reduction, Koszul homology mod 101)",
        "tables": {k: {"nvars": v["nvars"], "rows": v["rows"]} for k, v in tables.items()},
    }
    for kind, v in tables.items():
        print(kind, v["generators"], "quadrics", v["rows"])
    if "--check" not in (argv or sys.argv[1:]):
        target.write_text(json.dumps(payload, indent=1) + "\n")


if __name__ == "__main__":
    main()
