"""Numerical invariants of Calabi-Yau threefolds and their change under unprojection.

For a complete intersection of degrees d in P(w) the total Chern class is
prod(1 + w_i H) / prod(1 + d_j H); truncating at H^3 and multiplying the
coefficients by H^3 = prod d / prod w gives c2.H and the Euler number.

For any Gorenstein presentation with known Hilbert numerator, h0 is the
coefficient of t in the Hilbert series and Riemann-Roch on a Calabi-Yau
threefold, h0 = H^3/6 + c2.H/12, gives c2.H.  That formula assumes the
variety misses the orbifold points of the ambient.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import prod
from typing import Sequence

from .geometry import VarietySpec, dualizing_degree, hilbert_degree


class InvariantError(ValueError):
    pass


@dataclass(frozen=True)
class InvariantSet:
    H3: Fraction
    c2H: Fraction | None
    h0: int
    chi: int | None = None
    h11: int | None = None
    h12: int | None = None
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "H3", Fraction(self.H3))
        if self.c2H is not None:
            object.__setattr__(self, "c2H", Fraction(self.c2H))
        if self.chi is None and self.h11 is not None and self.h12 is not None:
            object.__setattr__(self, "chi", 2 * (self.h11 - self.h12))

    def key(self) -> tuple:
        """(H^3, c2.H, h0): the data the transition arithmetic sees."""
        return (self.H3, self.c2H, self.h0)

    def to_json(self):
        def num(x):
            if x is None:
                return None
            x = Fraction(x)
            return x.numerator if x.denominator == 1 else str(x)

        out = {"H3": num(self.H3), "c2H": num(self.c2H), "h0": self.h0, "chi": self.chi}
        if self.h11 is not None:
            out["h11"] = self.h11
        if self.h12 is not None:
            out["h12"] = self.h12
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    @classmethod
    def from_json(cls, data) -> "InvariantSet":
        c2 = data.get("c2H")
        return cls(Fraction(data["H3"]), None if c2 is None else Fraction(c2), int(data["h0"]),
                   data.get("chi"), data.get("h11"), data.get("h12"), tuple(data.get("notes", ())))


def chern_series(weights: Sequence[int], degrees: Sequence[int], order: int = 3) -> list[Fraction]:
    """Coefficients c_0..c_order of prod(1 + w H) / prod(1 + d H)."""
    c = [Fraction(0)] * (order + 1)
    c[0] = Fraction(1)
    for w in weights:
        for k in range(order, 0, -1):
            c[k] += w * c[k - 1]
    for d in degrees:
        # multiply by 1/(1 + dH) = sum (-d H)^k
        for k in range(1, order + 1):
            c[k] -= d * c[k - 1]
    return c


def ci_invariants(weights: Sequence[int], degrees: Sequence[int]) -> InvariantSet:
    """Invariants of a quasi-smooth complete intersection threefold.

    h0 counts weight-1 coordinates not killed by linear equations.  For a
    non Calabi-Yau input only H^3 and h0 are returned.
    """
    weights, degrees = list(weights), list(degrees)
    if len(weights) - len(degrees) != 4:
        raise InvariantError("not a threefold: need exactly four more variables than equations")
    H3 = Fraction(prod(degrees), prod(weights))
    h0 = sum(1 for w in weights if w == 1) - sum(1 for d in degrees if d == 1)
    if sum(degrees) != sum(weights):
        return InvariantSet(H3, None, h0, None, notes=("not Calabi-Yau",))
    c = chern_series(weights, degrees)
    chi = c[3] * H3
    if chi.denominator != 1:
        raise InvariantError(f"Euler number {chi} is not an integer")
    return InvariantSet(H3, c[2] * H3, h0, int(chi))


def hilbert_h0(numerator: dict[int, int], weights: Sequence[int]) -> int:
    """Coefficient of t in N(t) / prod(1 - t^w)."""
    ones = sum(1 for w in weights if w == 1)
    return numerator.get(0, 0) * ones + numerator.get(1, 0)


def riemann_roch_c2H(H3, h0) -> Fraction:
    return 12 * (Fraction(h0) - Fraction(H3) / 6)


def spec_invariants(V: VarietySpec) -> InvariantSet:
    """H^3 and h0 from the Hilbert series; c2.H by Riemann-Roch when Calabi-Yau.

    Complete intersections in a plain ambient also get the Euler number.
    """
    if V.dimension != 3:
        raise InvariantError(f"{V.name or V.notation()} is not a threefold")
    num = V.numerator()
    weights = V.ambient.weights
    dim, H3 = hilbert_degree(num, weights)
    h0 = hilbert_h0(num, weights)
    if dualizing_degree(V) != 0:
        return InvariantSet(H3, None, h0, None, notes=("not Calabi-Yau",))
    chi = None
    if not V.all_formats():
        chi = ci_invariants(weights, V.all_degrees()).chi
    return InvariantSet(H3, riemann_roch_c2H(H3, h0), h0, chi)


# -- transitions ---------------------------------------------------------------------


DIRECTIONS = ("unproject", "project")


def transition_invariants(inv: InvariantSet, d: int, direction: str = "unproject") -> InvariantSet:
    """Invariants across an unprojection contracting a degree-d del Pezzo.

    Unprojecting gains +d in H^3, +12-2d in c2.H and +1 in h0; projecting
    reverses this.  The Euler number is not determined.
    """
    if not 1 <= d <= 9:
        raise InvariantError(f"del Pezzo degree {d} out of range 1..9")
    if direction not in DIRECTIONS:
        raise InvariantError(f"direction must be one of {DIRECTIONS}")
    sign = 1 if direction == "unproject" else -1
    c2 = None if inv.c2H is None else inv.c2H + sign * (12 - 2 * d)
    return InvariantSet(inv.H3 + sign * d, c2, inv.h0 + sign)


def cascade(start: InvariantSet, d: int, steps: int, direction: str = "unproject") -> list[InvariantSet]:
    """[start, T(start), T(T(start)), ...] with ``steps`` applications of the transition."""
    if steps < 0:
        raise InvariantError("steps must be non-negative")
    out = [start]
    for _ in range(steps):
        out.append(transition_invariants(out[-1], d, direction))
    return out


def same_transition_data(a: InvariantSet, b: InvariantSet) -> bool:
    return a.H3 == b.H3 and a.h0 == b.h0 and (a.c2H is None or b.c2H is None or a.c2H == b.c2H)


def with_chi(inv: InvariantSet, chi: int | None) -> InvariantSet:
    return replace(inv, chi=chi)
