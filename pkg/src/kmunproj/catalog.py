"""Catalog of Calabi-Yau families and the web of transitions between them.

The tables ship as JSON under ``data/`` with the LaTeX cells as printed.
``reproduce_tables`` re-derives the bookkeeping of every row (ambient
weights, unprojection weight, dualizing degrees, del Pezzo degree and the
transition arithmetic of the invariants) and reports per-row results.

Families are identified up to the obvious isomorphism: a generic equation
of degree w in a variable of weight w solves for that variable, so such a
(degree, weight) pair is dropped.  ``Y_{2,2,6} ⊂ P(1^5,2,3)`` and
``X_{2,6} ⊂ P(1^5,3)`` are the same family, and so are
``X_{1,2,2} ⊂ G(2,5)`` and ``X_{2,2} ∩ Pf ⊂ P^8``.
"""

from __future__ import annotations

import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import (AmbientSpace, MatrixFormat, SpecError, VarietySpec, ambient_from_notation, delpezzo_degree,
                       dualizing_degree, hilbert_degree, parse_notation, spec_in, unprojection_weight)
from .invariants import InvariantError, InvariantSet, ci_invariants, riemann_roch_c2H, spec_invariants, \
    transition_invariants

DATA_DIR = Path(__file__).resolve().parent / "data"

TABLES = ("codim2", "codim3", "tomjerry", "cascade")

MECHANISMS = ("codim2", "codim3", "pfaffian-extension", "tom", "jerry", "cascade")

# degree 8 is left out by default: one of its two types is the Hirzebruch surface F_1
DEFAULT_ALLOWED = frozenset({1, 2, 3, 4, 5, 6, 7, 9})


class CatalogError(ValueError):
    pass


def load_table(name: str) -> dict:
    path = DATA_DIR / f"{name}.json"
    if not path.exists():
        raise CatalogError(f"no table named {name!r}")
    return json.loads(path.read_text())


def notation_from_latex(text: str) -> str:
    """``X_{4}\\cap Pf \\subset\\mathbb{P}(1^7,2)`` -> ``X_{4} ∩ Pf ⊂ P(1^7,2)``."""
    s = text.replace("$", "")
    s = re.sub(r"\\mathbb\{P\}", "P", s)
    s = s.replace("\\subset", " ⊂ ").replace("\\cap", " ∩ ")
    s = re.sub(r"\s+", " ", s).strip()
    return re.sub(r"\s*([_^])\s*", r"\1", s)


def parse_entry(text: str, name: str = "") -> VarietySpec | None:
    """Spec of a printed entry in its plain ambient, or None for families without equations."""
    try:
        n = parse_notation(text)
    except SpecError:
        return None
    return spec_in(AmbientSpace(n.weights), text, name or n.letter or "X")


def normalize(V: VarietySpec) -> VarietySpec:
    """Drop (degree w equation, weight w variable) pairs; linear equations are the case w = 1."""
    weights = sorted(V.ambient.weights)
    degs = sorted(V.all_degrees())
    changed = True
    while changed:
        changed = False
        for d in degs:
            if d in weights:
                degs.remove(d)
                weights.remove(d)
                changed = True
                break
    fmts = tuple(sorted(V.all_formats(), key=lambda f: (f.label, str(f.profile))))
    return VarietySpec(AmbientSpace(tuple(weights)), tuple(degs), fmts, "X")


def family_key(V: VarietySpec) -> str:
    return normalize(V).notation()


# -- records --------------------------------------------------------------------------


def _num(x):
    if x is None:
        return None
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


@dataclass
class FamilyRecord:
    """A family of Calabi-Yau threefolds; ``spec`` is None for families named without equations."""

    name: str
    spec: VarietySpec | None
    invariants: InvariantSet | None
    provenance: list[dict] = field(default_factory=list)
    annotations: dict = field(default_factory=dict)
    aliases: list[str] = field(default_factory=list)
    prose: list[str] = field(default_factory=list)

    def to_json(self):
        return {
            "name": self.name,
            "spec": self.spec.to_json() if self.spec is not None else None,
            "invariants": self.invariants.to_json() if self.invariants is not None else None,
            "provenance": self.provenance,
            "annotations": self.annotations,
            "aliases": self.aliases,
            "prose": self.prose,
        }

    @classmethod
    def from_json(cls, data) -> "FamilyRecord":
        spec = VarietySpec.from_json(data["spec"]) if data.get("spec") else None
        inv = InvariantSet.from_json(data["invariants"]) if data.get("invariants") else None
        return cls(data["name"], spec, inv, list(data.get("provenance", [])), dict(data.get("annotations", {})),
                   list(data.get("aliases", [])), list(data.get("prose", [])))


@dataclass(frozen=True)
class TransitionEdge:
    """X -> Y: Y is the smoothing of the unprojection of a degree-d del Pezzo in X."""

    source: str
    target: str
    d: int
    mechanism: str
    verified: bool = False
    provenance: tuple = ()

    def __post_init__(self):
        if self.mechanism not in MECHANISMS:
            raise CatalogError(f"unknown mechanism {self.mechanism!r}")
        if not 1 <= self.d <= 9:
            raise CatalogError(f"del Pezzo degree {self.d} out of range")

    @property
    def ident(self) -> tuple:
        return (self.source, self.target, self.d, self.mechanism)

    def to_json(self):
        return {"source": self.source, "target": self.target, "d": self.d, "mechanism": self.mechanism,
                "verified": self.verified, "provenance": [dict(p) for p in self.provenance]}

    @classmethod
    def from_json(cls, data) -> "TransitionEdge":
        prov = tuple(_freeze(p) for p in data.get("provenance", ()))
        return cls(data["source"], data["target"], int(data["d"]), data["mechanism"], bool(data.get("verified")),
                   prov)


class _FrozenDict(dict):
    def __hash__(self):
        return hash(json.dumps(self, sort_keys=True))


def _freeze(d: dict) -> _FrozenDict:
    return _FrozenDict({k: (tuple(v) if isinstance(v, list) else v) for k, v in d.items()})


# -- row analysis ---------------------------------------------------------------------


@dataclass
class RowCheck:
    """Outcome of re-deriving one printed row."""

    table: str
    row: object
    checks: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    annotations: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.checks.values())

    def failed_checks(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def to_json(self):
        return {"table": self.table, "row": self.row, "passed": self.passed, "checks": self.checks,
                "details": self.details, "annotations": self.annotations, "error": self.error}


@dataclass
class _RowData:
    """What a row contributes to the catalog."""

    check: RowCheck
    X: VarietySpec | None = None
    targets: list = field(default_factory=list)    # (mechanism, spec, printed latex)
    d: int | None = None
    construction: dict = field(default_factory=dict)


def _same_pieces(a: VarietySpec, b: VarietySpec) -> bool:
    return (sorted(a.ambient.weights) == sorted(b.ambient.weights)
            and sorted(a.all_degrees()) == sorted(b.all_degrees())
            and sorted(f.label for f in a.all_formats()) == sorted(f.label for f in b.all_formats()))


def _invariant_checks(chk: RowCheck, X: VarietySpec, Y: VarietySpec, d: int):
    inv_x, inv_y = spec_invariants(X), spec_invariants(Y)
    chk.details["X_invariants"] = inv_x.to_json()
    chk.details["Y_invariants"] = inv_y.to_json()
    chk.checks["transition"] = transition_invariants(inv_x, d).key() == inv_y.key()
    if not X.all_formats() and not Y.all_formats():
        # cross-check against the Chern series where both ends are complete intersections
        cx = ci_invariants(X.ambient.weights, X.all_degrees())
        cy = ci_invariants(Y.ambient.weights, Y.all_degrees())
        chk.checks["chern_series"] = cx.key() == inv_x.key() and cy.key() == inv_y.key()
        chk.checks["chern_transition"] = transition_invariants(cx, d).key() == cy.key()


def _read_row(chk: RowCheck, row: dict, columns: Sequence[str]):
    texts = {c: notation_from_latex(row[c]) for c in columns}
    chk.details["notation"] = texts
    ambient = ambient_from_notation(texts["T"])
    try:
        D = spec_in(ambient, texts["D"], "D")
        X = spec_in(ambient, texts["X"], "X")
        chk.checks["constraints_contained"] = True
    except SpecError as exc:
        if "inconsistent_ambient_constraint" not in chk.annotations:
            raise
        # the annotated reading: drop the constraint the entries do not carry
        chk.details["reading"] = f"plain ambient ({exc})"
        ambient = ambient.plain
        D = spec_in(ambient, texts["D"], "D")
        X = spec_in(ambient, texts["X"], "X")
    return texts, ambient, D, X


def _common_checks(chk: RowCheck, D: VarietySpec, X: VarietySpec) -> tuple[int, int]:
    kd, kx = dualizing_degree(D), dualizing_degree(X)
    chk.checks["k_D=-1"] = kd == -1
    chk.checks["k_X=0"] = kx == 0
    chk.checks["D_surface"] = D.dimension == 2
    chk.checks["X_threefold"] = X.dimension == 3
    s = unprojection_weight(X, D)
    d = delpezzo_degree(D)
    chk.details["s"] = s
    chk.details["d"] = d
    chk.checks["delpezzo_degree"] = 1 <= d <= 9
    return s, d


def _compare_printed(chk: RowCheck, name: str, predicted: VarietySpec, printed_text: str):
    printed = parse_entry(printed_text, "Y")
    chk.details[f"{name}_predicted"] = predicted.notation()
    chk.checks[f"{name}_ambient"] = sorted(printed.ambient.weights) == sorted(predicted.ambient.weights)
    chk.checks[f"{name}_pieces"] = _same_pieces(predicted, printed)
    chk.checks[f"k_{name}=0"] = dualizing_degree(predicted) == 0


def analyse_codim2(row: dict) -> _RowData:
    chk = RowCheck("codim2", row["row"], annotations=dict(row.get("annotations", {})))
    out = _RowData(chk)
    try:
        texts, ambient, D, X = _read_row(chk, row, ("T", "D", "X", "Y"))
        chk.checks["D_two_equations"] = len(D.ci) == 2 and not D.formats
        chk.checks["X_one_equation"] = len(X.ci) == 1 and not X.formats
        s, d = _common_checks(chk, D, X)
        (d1, d2), (e,) = D.ci, X.ci
        chk.checks["s_formula"] = s == e - d1 - d2
        Y = VarietySpec(ambient.extend(s), (e - d2, e - d1), (), "Y")
        _compare_printed(chk, "Y", Y, texts["Y"])
        _invariant_checks(chk, X, Y, d)
        out.X, out.d = X, d
        out.targets.append(("codim2", Y, row["Y"]))
        out.construction = {"weights": list(ambient.weights), "q": [d1, d2], "e": e}
    except (SpecError, InvariantError) as exc:
        chk.error = str(exc)
    return out


def codim3_profile(q: Sequence[int], e: Sequence[int], t: int) -> tuple:
    """Entry degrees of the 5x5 matrix with rows (0, t, a), (-t, 0, b) and the q block."""
    a = [e[0] - x for x in q]
    b = [e[1] - x for x in q]
    return ((t, a[0], a[1], a[2]), (b[0], b[1], b[2]), (q[2], q[1]), (q[0],))


def analyse_codim3(row: dict) -> _RowData:
    chk = RowCheck("codim3", row["row"], annotations=dict(row.get("annotations", {})))
    out = _RowData(chk)
    try:
        texts, ambient, D, X = _read_row(chk, row, ("T", "D", "X", "Y"))
        chk.checks["D_three_equations"] = len(D.ci) == 3 and not D.formats
        chk.checks["X_two_equations"] = len(X.ci) == 2 and not X.formats
        s, d = _common_checks(chk, D, X)
        q, e = D.ci, X.ci
        chk.checks["t_formula"] = s == sum(e) - sum(q)
        fmt = MatrixFormat("pfaffian", codim3_profile(q, e, s))
        chk.details["profile"] = [list(r) for r in fmt.profile]
        Y = VarietySpec(ambient.extend(s), (), (fmt,), "Y")
        _compare_printed(chk, "Y", Y, texts["Y"])
        _invariant_checks(chk, X, Y, d)
        out.X, out.d = X, d
        out.targets.append(("codim3", Y, row["Y"]))
        out.construction = {"weights": list(ambient.weights), "q": list(q), "e": list(e)}
    except (SpecError, InvariantError) as exc:
        chk.error = str(exc)
    return out


def analyse_tomjerry(row: dict) -> _RowData:
    chk = RowCheck("tomjerry", row["row"], annotations=dict(row.get("annotations", {})))
    out = _RowData(chk)
    try:
        texts, ambient, D, X = _read_row(chk, row, ("T", "D", "X", "Tom", "Jerry"))
        chk.checks["D_four_linear"] = D.ci == (1, 1, 1, 1) and not D.formats
        chk.checks["X_one_pfaffian"] = not X.ci and [f.label for f in X.formats] == ["Pf"]
        s, d = _common_checks(chk, D, X)
        for kind, col in (("tom", "Tom"), ("jerry", "Jerry")):
            Y = VarietySpec(ambient.extend(s), (), (MatrixFormat(kind),), "Y")
            _compare_printed(chk, col, Y, texts[col])
            inv_x, inv_y = spec_invariants(X), spec_invariants(Y)
            chk.details[f"{col}_invariants"] = inv_y.to_json()
            chk.checks[f"{col}_transition"] = transition_invariants(inv_x, d).key() == inv_y.key()
            out.targets.append((kind, Y, row[col]))
        chk.details["X_invariants"] = spec_invariants(X).to_json()
        out.X, out.d = X, d
        out.construction = {"weights": list(ambient.weights)}
    except (SpecError, InvariantError) as exc:
        chk.error = str(exc)
    return out


def _printed_invariants(row: dict) -> InvariantSet:
    return InvariantSet(row["H3"], row["c2H"], row["dimH"], row["chi"])


def analyse_cascade(table: dict) -> list[RowCheck]:
    d = table["d"]
    rows = table["rows"]
    out = []
    for n, row in enumerate(rows):
        chk = RowCheck("cascade", row["row"], annotations=dict(row.get("annotations", {})))
        printed = _printed_invariants(row)
        V = parse_entry(notation_from_latex(row["description"]))
        chk.details["spec"] = V.notation() if V is not None else None
        try:
            if V is not None:
                chk.checks["k=0"] = dualizing_degree(V) == 0
                inv = spec_invariants(V)
                chk.details["computed"] = inv.to_json()
                chk.checks["recomputed"] = inv.key() == printed.key()
                if not V.all_formats():
                    ci = ci_invariants(V.ambient.weights, V.all_degrees())
                    chk.checks["recomputed_ci"] = ci.key() == printed.key() and ci.chi == printed.chi
            if n:
                prev = _printed_invariants(rows[n - 1])
                chk.checks["lemma_chain"] = transition_invariants(prev, d).key() == printed.key()
        except (SpecError, InvariantError) as exc:
            chk.error = str(exc)
        out.append(chk)
    return out


def _betti_invariants(rows, nvars) -> InvariantSet:
    from .betti import BettiTable

    num = BettiTable.from_rows(rows).hilbert_numerator()
    weights = (1,) * nvars
    _, H3 = hilbert_degree(num, weights)
    h0 = num.get(0, 0) * nvars + num.get(1, 0)
    return InvariantSet(H3, riemann_roch_c2H(H3, h0), h0)


def analyse_examples(table: dict, codim3: dict) -> tuple[list[RowCheck], list[dict]]:
    rows3 = {r["row"]: r for r in codim3["rows"]}
    checks, discrepancies = [], []
    for ex in table["examples"]:
        chk = RowCheck("examples", ex["id"], annotations=dict(ex.get("annotations", {})))
        try:
            kind = ex["kind"]
            if kind == "codim3":
                data = analyse_codim3(rows3[ex["codim3_row"]])
                chk.checks["row_passes"] = data.check.passed
                chk.checks["profile"] = data.check.details.get("profile") == ex["profile"]
                printed = InvariantSet.from_json(ex["invariants"])
                inv_x = spec_invariants(data.X)
                inv_y = spec_invariants(data.targets[0][1])
                from_x = transition_invariants(inv_x, data.d)
                chk.details.update({"X_invariants": inv_x.to_json(), "Y_invariants": inv_y.to_json(),
                                    "d": data.d})
                chk.checks["Y_H3_c2H"] = (inv_y.H3, inv_y.c2H) == (printed.H3, printed.c2H)
                chk.checks["lemma_H3_c2H"] = (from_x.H3, from_x.c2H) == (printed.H3, printed.c2H)
                if printed.chi != 2 * (printed.h11 - printed.h12):
                    # printed data, not computed: report the clash and keep the values
                    discrepancies.append({
                        "id": ex["id"], "field": "chi", "printed": printed.chi,
                        "from_hodge_numbers": 2 * (printed.h11 - printed.h12),
                        "note": f"chi is printed as {printed.chi} but 2(h11 - h12) = "
                                f"{2 * (printed.h11 - printed.h12)}"})
                if "discrepancy" in chk.annotations:
                    stated = replace(inv_x, h0=inv_x.h0 + 1) if ex["id"] == "x44_pfaffian" else inv_x
                    discrepancies.append({
                        "id": ex["id"], "field": "h0", "printed": printed.h0,
                        "lemma_from_stated_source": transition_invariants(stated, data.d).h0,
                        "lemma_from_computed_source": from_x.h0, "computed": inv_y.h0,
                        "note": chk.annotations["discrepancy"]})
                else:
                    chk.checks["h0"] = inv_y.h0 == printed.h0 == from_x.h0
            elif kind in ("pfaffian-extension", "bitransition"):
                X, Y = parse_entry(notation_from_latex(ex["X"])), parse_entry(notation_from_latex(ex["Y"]))
                if "D" in ex:
                    D = parse_entry(notation_from_latex(ex["D"]), "D")
                    chk.checks["k_D=-1"] = dualizing_degree(D) == -1
                    chk.checks["delpezzo_degree"] = delpezzo_degree(D) == ex["d"]
                chk.checks["k_Y=0"] = dualizing_degree(Y) == 0
                chk.checks["transition"] = transition_invariants(spec_invariants(X), ex["d"]).key() == \
                    spec_invariants(Y).key()
                chk.details["X_invariants"] = spec_invariants(X).to_json()
                chk.details["Y_invariants"] = spec_invariants(Y).to_json()
            elif kind == "linkage":
                X = parse_entry(notation_from_latex(ex["X"]))
                inv_y = _betti_invariants(ex["betti"], len(X.ambient.weights) + 1)
                chk.details["Y_invariants"] = inv_y.to_json()
                chk.checks["transition"] = transition_invariants(spec_invariants(X), ex["d"]).key() == inv_y.key()
            elif kind == "conifold":
                X = parse_entry(notation_from_latex(ex["X"]))
                D = parse_entry(notation_from_latex(ex["D"]), "D")
                chk.checks["k_X=0"] = dualizing_degree(X) == 0
                chk.checks["D_plane"] = D.dimension == 2 and D.numerator() == {0: 1, 1: -2, 2: 1}
                chk.details["nodes"] = ex["nodes"]
        except (SpecError, InvariantError, KeyError) as exc:
            chk.error = str(exc)
        checks.append(chk)
    return checks, discrepancies


def _row_signature(row: dict, columns: Sequence[str]) -> tuple:
    sig = []
    for c in columns:
        n = parse_notation(notation_from_latex(row[c]))
        sig.append((n.letter, tuple(sorted(n.degrees)), tuple(sorted(f.label for f in n.formats)),
                    tuple(sorted(n.weights))))
    return tuple(sig)


def find_duplicates(table: dict) -> list[tuple[int, int]]:
    """Pairs (first, later) of rows printing the same entries up to the order of subscripts."""
    columns = table["columns"]
    seen: dict = {}
    out = []
    for row in table["rows"]:
        sig = _row_signature(row, columns)
        if sig in seen:
            out.append((seen[sig], row["row"]))
        else:
            seen[sig] = row["row"]
    return out


# -- reproduction report -----------------------------------------------------------------


@dataclass
class TableReport:
    rows: list[RowCheck]
    duplicates: list[dict]
    discrepancies: list[dict]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and all(d["annotated"] for d in self.duplicates)

    def table_rows(self, table: str) -> list[RowCheck]:
        return [r for r in self.rows if r.table == table]

    def summary(self) -> dict:
        out = {}
        for r in self.rows:
            ok, total = out.get(r.table, (0, 0))
            out[r.table] = (ok + r.passed, total + 1)
        return out

    def lines(self) -> list[str]:
        out = []
        for r in self.rows:
            status = "pass" if r.passed else "FAIL"
            note = ""
            if r.error:
                note = f"  error: {r.error}"
            elif not r.passed:
                note = "  failed: " + ", ".join(r.failed_checks())
            if r.annotations:
                note += "  [" + ", ".join(sorted(r.annotations)) + "]"
            out.append(f"{r.table:<9} {str(r.row):<22} {status}{note}")
        for d in self.duplicates:
            out.append(f"duplicate {d['table']} rows {d['rows'][0]} and {d['rows'][1]}"
                       f"{'' if d['annotated'] else '  (not annotated)'}")
        for d in self.discrepancies:
            if "lemma_from_stated_source" in d:
                out.append(f"discrepancy {d['id']} {d['field']}: printed {d['printed']}, "
                           f"lemma from stated source {d['lemma_from_stated_source']}, "
                           f"lemma from computed source {d['lemma_from_computed_source']}")
            else:
                out.append(f"discrepancy {d['id']} {d['field']}: {d['note']}")
        return out

    def to_json(self):
        return {"passed": self.passed, "summary": {k: list(v) for k, v in self.summary().items()},
                "rows": [r.to_json() for r in self.rows], "duplicates": self.duplicates,
                "discrepancies": self.discrepancies}


_ANALYSERS = {"codim2": analyse_codim2, "codim3": analyse_codim3, "tomjerry": analyse_tomjerry}


def reproduce_tables(tables: Iterable[str] = TABLES, examples: bool = True) -> TableReport:
    rows: list[RowCheck] = []
    duplicates: list[dict] = []
    for name in tables:
        table = load_table(name)
        if name == "cascade":
            rows.extend(analyse_cascade(table))
            continue
        rows.extend(_ANALYSERS[name](row).check for row in table["rows"])
        annotated = {(r["annotations"]["duplicate_of"], r["row"]) for r in table["rows"]
                     if "duplicate_of" in r.get("annotations", {})}
        found = find_duplicates(table)
        for pair in found:
            duplicates.append({"table": name, "rows": list(pair), "annotated": pair in annotated})
        for pair in sorted(annotated - set(found)):
            duplicates.append({"table": name, "rows": list(pair), "annotated": False, "missing": True})
    discrepancies: list[dict] = []
    if examples:
        ex_rows, discrepancies = analyse_examples(load_table("examples"), load_table("codim3"))
        rows.extend(ex_rows)
    return TableReport(rows, duplicates, discrepancies)


# -- the catalog ------------------------------------------------------------------------


class Catalog:
    def __init__(self):
        self.families: dict[str, FamilyRecord] = {}
        self.edges: list[TransitionEdge] = []

    def __len__(self):
        return len(self.families)

    def __contains__(self, key):
        return self.resolve(key) is not None

    def resolve(self, name: str) -> str | None:
        """Catalog key of a family given by its key, an alias or any printed notation."""
        if name in self.families:
            return name
        for key, rec in self.families.items():
            if name in rec.aliases:
                return key
        V = parse_entry(notation_from_latex(name))
        if V is not None:
            key = family_key(V)
            if key in self.families:
                return key
        return None

    def family(self, name: str) -> FamilyRecord:
        key = self.resolve(name)
        if key is None:
            raise CatalogError(f"unknown family {name!r}")
        return self.families[key]

    def add_family(self, spec: VarietySpec | None, provenance: dict, alias: str | None = None,
                   invariants: InvariantSet | None = None, annotations: dict | None = None,
                   prose: str | None = None) -> str:
        if spec is not None:
            key = family_key(spec)
        elif alias:
            key = alias
        else:
            raise CatalogError("a family needs a spec or a name")
        rec = self.families.get(key)
        if rec is None:
            inv = spec_invariants(spec) if spec is not None else None
            prov = [{"source": "computed", "operation": "spec_invariants"}] if inv is not None else []
            rec = FamilyRecord(key, spec, inv, prov)
            self.families[key] = rec
        if rec.invariants is None and invariants is not None:
            rec.invariants = invariants
        elif invariants is not None:
            rec.invariants = _merge_invariants(rec, invariants)
        rec.provenance.append(dict(provenance))
        if alias and alias != key and alias not in rec.aliases:
            rec.aliases.append(alias)
        if annotations:
            rec.annotations.update(annotations)
        if prose and prose not in rec.prose:
            rec.prose.append(prose)
        return key

    def add_edge(self, edge: TransitionEdge):
        for n, old in enumerate(self.edges):
            if old.ident == edge.ident:
                prov = old.provenance + tuple(p for p in edge.provenance if p not in old.provenance)
                self.edges[n] = replace(old, verified=old.verified or edge.verified, provenance=prov)
                return
        self.edges.append(edge)

    # -- loading ------------------------------------------------------------

    @classmethod
    def shipped(cls, tables: Iterable[str] = TABLES + ("examples",)) -> "Catalog":
        cat = cls()
        for name in tables:
            table = load_table(name)
            if name == "cascade":
                cat._load_cascade(table)
            elif name == "examples":
                cat._load_examples(table)
            else:
                for row in table["rows"]:
                    cat._load_row(name, row, _ANALYSERS[name](row))
        return cat

    def _load_row(self, table: str, row: dict, data: _RowData):
        if data.check.error is not None:
            raise CatalogError(f"{table} row {row['row']}: {data.check.error}")
        where = {"source": "table", "table": table, "row": row["row"]}
        prose = row.get("prose", {})
        src = self.add_family(data.X, {**where, "column": "X", "text": row["X"]},
                              notation_from_latex(row["X"]), prose=prose.get("X"))
        for mech, Y, text in data.targets:
            col = {"tom": "Tom", "jerry": "Jerry"}.get(mech, "Y")
            dst = self.add_family(Y, {**where, "column": col, "text": text}, notation_from_latex(text),
                                  prose=prose.get("Y"))
            prov = _freeze({"table": table, "row": row["row"], **data.construction})
            self.add_edge(TransitionEdge(src, dst, data.d, mech, False, (prov,)))

    def _load_cascade(self, table: dict):
        keys = []
        for row in table["rows"]:
            text = notation_from_latex(row["description"])
            V = parse_entry(text)
            printed = _printed_invariants(row)
            prov = {"source": "table", "table": "cascade", "row": row["row"], "column": "description",
                    "text": row["description"]}
            keys.append(self.add_family(V, prov, text, invariants=printed))
        for n in range(1, len(keys)):
            prov = _freeze({"table": "cascade", "row": table["rows"][n]["row"]})
            self.add_edge(TransitionEdge(keys[n - 1], keys[n], table["d"], "cascade", False, (prov,)))

    def _load_examples(self, table: dict):
        for ex in table["examples"]:
            where = {"source": "example", "id": ex["id"]}
            if ex["kind"] == "codim3":
                row = next(r for r in load_table("codim3")["rows"] if r["row"] == ex["codim3_row"])
                data = analyse_codim3(row)
                Y = data.targets[0][1]
                self.add_family(Y, where, notation_from_latex(row["Y"]),
                                invariants=InvariantSet.from_json(ex["invariants"]),
                                annotations=ex.get("annotations"))
            elif ex["kind"] == "pfaffian-extension":
                X = parse_entry(notation_from_latex(ex["X"]))
                Y = parse_entry(notation_from_latex(ex["Y"]))
                src = self.add_family(X, where, notation_from_latex(ex["X"]))
                dst = self.add_family(Y, where, notation_from_latex(ex["Y"]), prose=ex.get("prose"))
                prov = _freeze({"example": ex["id"], "weights": list(X.ambient.weights), "n": 5,
                                "e": list(X.ci)})
                self.add_edge(TransitionEdge(src, dst, ex["d"], "pfaffian-extension", False, (prov,)))
            elif ex["kind"] == "bitransition":
                for col in ("X", "Y"):
                    self.add_family(parse_entry(notation_from_latex(ex[col])), where,
                                    notation_from_latex(ex[col]), prose=ex.get("prose"))

    # -- serialisation -------------------------------------------------------

    def to_json(self):
        return {"families": [self.families[k].to_json() for k in sorted(self.families)],
                "edges": [e.to_json() for e in sorted(self.edges, key=_edge_order)]}

    @classmethod
    def from_json(cls, data) -> "Catalog":
        cat = cls()
        for f in data.get("families", []):
            rec = FamilyRecord.from_json(f)
            cat.families[rec.name] = rec
        for e in data.get("edges", []):
            cat.edges.append(TransitionEdge.from_json(e))
        return cat


def _merge_invariants(rec: FamilyRecord, printed: InvariantSet) -> InvariantSet:
    """Add printed Hodge data to computed invariants; a clash is recorded, not resolved."""
    inv = rec.invariants
    if inv.key() != printed.key():
        rec.annotations.setdefault("discrepancy", f"computed {inv.to_json()} but printed {printed.to_json()}")
    if inv.chi is not None and printed.chi is not None and inv.chi != printed.chi:
        rec.annotations.setdefault("discrepancy", f"computed chi {inv.chi} but printed {printed.chi}")
    chi = inv.chi if inv.chi is not None else printed.chi
    return replace(inv, chi=chi, h11=inv.h11 if inv.h11 is not None else printed.h11,
                   h12=inv.h12 if inv.h12 is not None else printed.h12)


def _edge_order(e: TransitionEdge):
    return (e.source, e.target, e.d, MECHANISMS.index(e.mechanism))


# -- candidates -----------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    family: str
    d: int
    direction: str


def candidates(catalog: Catalog, family: str, allowed: Iterable[int] = DEFAULT_ALLOWED) -> list[Candidate]:
    """Families whose invariants match the transition arithmetic from ``family`` for some allowed d."""
    allowed = sorted(set(allowed))
    rec = catalog.family(family)
    inv = rec.invariants
    if inv is None or inv.c2H is None:
        return []
    out = []
    for key in sorted(catalog.families):
        if key == rec.name:
            continue
        other = catalog.families[key].invariants
        if other is None or other.c2H is None:
            continue
        for d in allowed:
            for direction in ("unproject", "project"):
                if transition_invariants(inv, d, direction).key() == other.key():
                    out.append(Candidate(key, d, direction))
    return out


# -- the web ----------------------------------------------------------------------------


@dataclass
class Web:
    nodes: list[dict]
    edges: list[TransitionEdge]

    def node_names(self) -> list[str]:
        return [n["name"] for n in self.nodes]

    def components(self) -> list[list[str]]:
        parent = {n: n for n in self.node_names()}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = find(e.source), find(e.target)
            if a != b:
                parent[max(a, b)] = min(a, b)
        groups = defaultdict(list)
        for n in self.node_names():
            groups[find(n)].append(n)
        return sorted((sorted(g) for g in groups.values()), key=lambda g: (-len(g), g))

    def is_path(self) -> bool:
        """Edges form a single simple path through every node."""
        if len(self.edges) != len(self.nodes) - 1 or len(self.components()) != 1:
            return False
        deg = Counter()
        for e in self.edges:
            deg[e.source] += 1
            deg[e.target] += 1
        return all(v <= 2 for v in deg.values())

    def to_json(self):
        return {"nodes": self.nodes, "edges": [e.to_json() for e in self.edges]}

    @classmethod
    def from_json(cls, data) -> "Web":
        return cls([dict(n) for n in data["nodes"]], [TransitionEdge.from_json(e) for e in data["edges"]])

    def __eq__(self, other):
        if not isinstance(other, Web):
            return NotImplemented
        return self.to_json() == other.to_json()

    def to_dot(self) -> str:
        lines = ["digraph transitions {", "  rankdir=LR;", "  node [shape=box];"]
        ids = {n["name"]: f"n{i}" for i, n in enumerate(self.nodes)}
        for n in self.nodes:
            label = n["name"]
            inv = n.get("invariants")
            if inv:
                label += f"\\nH3={inv['H3']} c2H={inv['c2H']} h0={inv['h0']}"
            lines.append(f'  {ids[n["name"]]} [label="{_dot_escape(label)}"];')
        for e in self.edges:
            style = "" if e.verified else ", style=dashed"
            lines.append(f'  {ids[e.source]} -> {ids[e.target]} [label="{e.mechanism} d={e.d}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace('"', '\\"')


def verify_edge(edge: TransitionEdge, seed: int = 0) -> bool:
    """Run the constructor checks of the edge's mechanism on a generic instance."""
    from .poly import GradedRing
    from . import unprojection as U

    if edge.mechanism == "cascade":
        return False
    prov = next((p for p in edge.provenance if "weights" in p), None)
    if prov is None:
        return False
    R = GradedRing.standard(tuple(prov["weights"]))
    try:
        if edge.mechanism == "codim2":
            res = U.codim2_instance(R, prov["q"], prov["e"], seed)
            return U.check_codim2_identity(res) and U.check_containment(res)
        if edge.mechanism == "codim3":
            res = U.codim3_instance(R, prov["q"], prov["e"], seed)
            return U.check_pfaffian_identity(res) and U.check_containment(res)
        if edge.mechanism == "pfaffian-extension":
            res = U.extension_instance(R, prov["n"], prov["e"], seed)
            return U.check_pfaffian_identity(res) and U.check_containment(res)
        # Tom and Jerry: the format must contain D = (l1..l4)
        from .grobner import Ideal
        from .poly import random_form

        l = [R.var(i) for i in range(4)]
        if edge.mechanism == "tom":
            M = U.tom_matrix(l, [random_form(R, 1, seed, "h", i) for i in range(4)])
        else:
            M = U.jerry_matrix(l, [random_form(R, 1, seed, "h", i) for i in range(3)])
        return Ideal(R, l).contains(M.maximal_pfaffians())
    except (U.UnprojectionError, SpecError):
        return False


def build_web(catalog: Catalog | None = None, verify: bool = False, seed: int = 0) -> Web:
    catalog = Catalog.shipped() if catalog is None else catalog
    nodes = []
    for key in sorted(catalog.families):
        rec = catalog.families[key]
        nodes.append({"name": key, "spec": rec.spec.notation() if rec.spec is not None else None,
                      "invariants": rec.invariants.to_json() if rec.invariants is not None else None})
    edges = []
    for e in sorted(catalog.edges, key=_edge_order):
        if verify and not e.verified and verify_edge(e, seed):
            e = replace(e, verified=True, provenance=e.provenance + (_freeze({"verified_seed": seed}),))
        edges.append(e)
    return Web(nodes, edges)


EXPORT_FORMATS = ("json", "dot")


def export(web: Web, fmt: str = "json") -> bytes:
    fmt = fmt.lower()
    if fmt == "json":
        return (json.dumps(web.to_json(), indent=1, sort_keys=True) + "\n").encode()
    if fmt == "dot":
        return web.to_dot().encode()
    raise CatalogError(f"unknown export format {fmt!r}")


def import_web(data: bytes | str) -> Web:
    if isinstance(data, bytes):
        data = data.decode()
    return Web.from_json(json.loads(data))
