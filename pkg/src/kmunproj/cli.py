"""Command line interface.

Exit codes: 0 pass, 1 check failure, 2 inconclusive (budget or genericity),
3 usage or input error.  The default prime comes from ``KMUNPROJ_PRIME``
(101 if unset).  JSON output is sorted and free of timings, so repeated runs
with the same options give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog as cat
from . import reproduce as rp
from .betti import (DELPEZZO6_KINDS, BettiError, BettiTable, delpezzo6_betti, koszul_betti, link_steps,
                    double_link_table)
from .geometry import SpecError, VarietySpec, dualizing_degree
from .grobner import BudgetExceeded, DEFAULT_BUDGET, Ideal, eliminate, projective_dimension_and_degree
from .invariants import InvariantError, InvariantSet, cascade, ci_invariants, spec_invariants, transition_invariants
from .poly import DEFAULT_PRIME, Field, GradedRing, PolynomialError, random_form
from .singularity import check_singularity, quasi_smooth
from .unprojection import (UnprojectionError, check_codim2_identity, check_containment, check_pfaffian_identity,
                           codim2_instance, codim3_instance, extension_instance, jerry_matrix, tom_matrix)

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_prime() -> int:
    value = os.environ.get("KMUNPROJ_PRIME", str(DEFAULT_PRIME))
    try:
        return int(value)
    except ValueError:
        raise UsageError(f"KMUNPROJ_PRIME={value!r} is not an integer")


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def weights_arg(text: str) -> tuple[int, ...]:
    """Weights as ``1,1,1,2`` or in exponent form ``1^5,2``."""
    out = []
    for part in text.replace(" ", "").split(","):
        w, _, c = part.partition("^")
        try:
            out += [int(w)] * (int(c) if c else 1)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad weight list {text!r}")
    return tuple(out)


# -- output ------------------------------------------------------------------------


def _plain(obj):
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else str(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items() if "seconds" not in str(k)}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def emit(args, payload: dict, text: str | None = None):
    """Print the payload as JSON or as text; also write the JSON to --output when given."""
    payload = {"config": config_json(args), **payload}
    if getattr(args, "output", None):
        Path(args.output).write_text(dumps(payload))
    if args.format == "json":
        sys.stdout.write(dumps(payload))
    else:
        sys.stdout.write((text if text is not None else dumps(payload)).rstrip("\n") + "\n")


def config_json(args) -> dict:
    return {"prime": args.prime, "seed": args.seed, "budget": args.budget}


# -- rings and ideals ----------------------------------------------------------------


def make_ring(args) -> GradedRing:
    field = Field(args.prime)
    names = [v for v in (args.vars or "").replace(" ", "").split(",") if v]
    if args.weights and not names:
        return GradedRing.standard(args.weights, field=field)
    if not names:
        raise UsageError("give --vars (and optionally --weights)")
    weights = args.weights or (1,) * len(names)
    if len(weights) != len(names):
        raise UsageError("--vars and --weights differ in length")
    return GradedRing(tuple(names), tuple(weights), field)


def make_ideal(args) -> Ideal:
    if args.input:
        data = json.loads(Path(args.input).read_text())
        # the output of 'gb --format json' is accepted as input too
        gens = data.get("generators", data.get("groebner_basis"))
        if "ring" not in data or gens is None:
            raise UsageError("ideal JSON needs 'ring' and 'generators'")
        R = GradedRing.from_json(data["ring"])
        if R.field.p != args.prime:
            R = R.with_field(Field(args.prime))
        return Ideal.from_strings(R, gens, budget=args.budget)
    R = make_ring(args)
    if not args.gens:
        raise UsageError("no generators given")
    return Ideal.from_strings(R, args.gens, budget=args.budget)


def cmd_gb(args):
    I = make_ideal(args)
    G = I.groebner_basis()
    emit(args, {"ring": I.ring.to_json(), "groebner_basis": [str(g) for g in G]}, "\n".join(str(g) for g in G))
    return EXIT_PASS


def cmd_nf(args):
    I = make_ideal(args)
    f = I.ring.parse(args.poly)
    r = I.normal_form(f)
    emit(args, {"polynomial": str(f), "normal_form": str(r), "member": r.is_zero()}, str(r))
    return EXIT_PASS


def cmd_eliminate(args):
    I = make_ideal(args)
    E = eliminate(I, [v for v in args.variables.split(",") if v])
    emit(args, {"eliminated": args.variables, "ring": E.ring.to_json(), "generators": [str(g) for g in E.generators]},
         "\n".join(str(g) for g in E.generators))
    return EXIT_PASS


def cmd_dimdeg(args):
    I = make_ideal(args)
    dim, deg = projective_dimension_and_degree(I)
    emit(args, {"dimension": dim, "degree": deg}, f"dimension {dim}\ndegree {_plain(deg)}")
    return EXIT_PASS


# -- unprojection ------------------------------------------------------------------


def construction(args):
    """Instance for the unproject and verify subcommands."""
    kind = args.kind
    field = Field(args.prime)
    if getattr(args, "row", None) is not None:
        table = {"codim2": "codim2", "codim3": "codim3"}.get(kind)
        if table is None:
            raise UsageError("--row applies to codim2 and codim3")
        row = next((r for r in cat.load_table(table)["rows"] if r["row"] == args.row), None)
        if row is None:
            raise UsageError(f"no row {args.row} in the {table} table")
        data = (cat.analyse_codim2 if kind == "codim2" else cat.analyse_codim3)(row)
        c = data.construction
        args.weights, args.q, args.e = tuple(c["weights"]), c["q"], c["e"] if kind == "codim3" else [c["e"]]
    if not args.weights:
        raise UsageError("give --weights or --row")
    R = GradedRing.standard(args.weights, field=field)
    if kind == "codim2":
        if not args.q or len(args.q) != 2 or not args.e or len(args.e) != 1:
            raise UsageError("codim2 needs --q d1,d2 and --e d")
        return codim2_instance(R, args.q, args.e[0], args.seed)
    if kind == "codim3":
        if not args.q or len(args.q) != 3 or not args.e or len(args.e) != 2:
            raise UsageError("codim3 needs --q q1,q2,q3 and --e e1,e2")
        return codim3_instance(R, args.q, args.e, args.seed)
    if kind == "extend":
        if not args.e or len(args.e) != 2:
            raise UsageError("extend needs --e e1,e2")
        return extension_instance(R, args.n, args.e, args.seed)
    raise UsageError(f"unknown construction {kind!r}")


def segre_format(args):
    field = Field(args.prime)
    weights = args.weights or (1,) * 10
    R = GradedRing.standard(weights, field=field)
    if R.nvars < 4:
        raise UsageError("Tom and Jerry need at least four variables")
    l = [R.var(i) for i in range(4)]
    if args.kind == "tom":
        h = [random_form(R, 1, args.seed, "tom", i) for i in range(4)]
        return R, l, tom_matrix(l, h)
    h = [random_form(R, 1, args.seed, "jerry", i) for i in range(3)]
    return R, l, jerry_matrix(l, h)


def cmd_unproject(args):
    if args.kind in ("tom", "jerry"):
        R, l, M = segre_format(args)
        pf = M.maximal_pfaffians()
        D = Ideal(R, l)
        ok = D.contains(pf)
        emit(args, {"kind": args.kind, "matrix": M.to_json(), "pfaffians": [str(p) for p in pf],
                    "D": [str(x) for x in l], "contains_D": ok},
             f"{args.kind} matrix\n{M}\nPfaffians in (x0..x3): {ok}")
        return EXIT_PASS if ok else EXIT_FAIL
    res = construction(args)
    emit(args, {"result": res.to_json()},
         "\n".join([f"{res.variable} of weight {res.weight}", "X: " + ", ".join(map(str, res.x_generators)),
                    "D: " + ", ".join(map(str, res.exceptional)), "Y:"] + [f"  {g}" for g in res.generators]))
    return EXIT_PASS


# -- invariants ----------------------------------------------------------------------


def inv_from_args(args) -> InvariantSet:
    if args.H3 is None or args.h0 is None:
        raise UsageError("give --H3, --c2H and --h0")
    return InvariantSet(Fraction(args.H3), None if args.c2H is None else Fraction(args.c2H), args.h0)


def cmd_invariants(args):
    if args.kind == "ci":
        if args.spec:
            V = parse_spec(args.spec)
            inv = spec_invariants(V)
            if not V.all_formats():
                inv = ci_invariants(V.ambient.weights, V.all_degrees())
        else:
            if not args.weights or not args.degrees:
                raise UsageError("give a spec or --weights and --degrees")
            inv = ci_invariants(args.weights, args.degrees)
        emit(args, {"invariants": inv.to_json()}, _inv_text(inv))
        return EXIT_PASS
    start = inv_from_args(args)
    if args.kind == "lemma":
        out = transition_invariants(start, args.d, args.direction)
        emit(args, {"source": start.to_json(), "d": args.d, "direction": args.direction,
                    "target": out.to_json()}, _inv_text(out))
        return EXIT_PASS
    chain = cascade(start, args.d, args.steps, args.direction)
    emit(args, {"d": args.d, "cascade": [c.to_json() for c in chain]},
         "\n".join(f"{n}: {_inv_text(c)}" for n, c in enumerate(chain)))
    return EXIT_PASS


def _inv_text(inv: InvariantSet) -> str:
    j = _plain(inv.to_json())
    return " ".join(f"{k}={j[k]}" for k in ("H3", "c2H", "h0", "chi") if j[k] is not None)


def parse_spec(text: str) -> VarietySpec:
    path = Path(text)
    if text.endswith(".json") and path.exists():
        return VarietySpec.from_json(json.loads(path.read_text()))
    V = cat.parse_entry(cat.notation_from_latex(text), "Y")
    if V is None:
        raise UsageError(f"cannot read a variety from {text!r}")
    return V


# -- verification --------------------------------------------------------------------


def _seeds(args) -> list[int]:
    return list(range(args.seed, args.seed + args.seeds))


def cmd_verify(args):
    if args.check == "smoothness":
        V = parse_spec(args.spec)
        reps = [quasi_smooth(V, s, Field(args.prime), args.budget) for s in _seeds(args)]
        emit(args, {"spec": V.notation(), "k": dualizing_degree(V), "reports": [r.to_json() for r in reps]},
             "\n".join(f"seed {r.seed}: {r.verdict} ({r.method}, {r.seconds:.2f} s)" for r in reps))
        if any(r.verdict == "inconclusive" for r in reps):
            return EXIT_INCONCLUSIVE
        if args.expect is None:
            return EXIT_PASS
        want = {"smooth": lambda r: r.is_smooth, "singular": lambda r: r.is_singular}[args.expect]
        return EXIT_PASS if all(want(r) for r in reps) else EXIT_FAIL
    if args.check == "nodes":
        out = []
        for s in _seeds(args):
            args.seed = s
            res = construction(args)
            I = Ideal(res.base_ring, res.x_generators, args.budget)
            rep = check_singularity(I, len(res.x_generators), s, stratum=False)
            out.append(rep)
        emit(args, {"reports": [r.to_json() for r in out]},
             "\n".join(f"seed {r.seed}: {r.verdict} {_plain(r.degree) if r.degree is not None else ''}"
                       for r in out))
        if any(r.verdict == "inconclusive" for r in out):
            return EXIT_INCONCLUSIVE
        if args.expect_nodes is None:
            return EXIT_PASS
        return EXIT_PASS if all(r.count == args.expect_nodes for r in out) else EXIT_FAIL
    results = []
    for s in _seeds(args):
        args.seed = s
        if args.kind in ("tom", "jerry"):
            R, l, M = segre_format(args)
            ok = Ideal(R, l).contains(M.maximal_pfaffians())
        else:
            res = construction(args)
            if args.check == "containment":
                ok = check_containment(res)
            elif res.matrix is not None:
                ok = check_pfaffian_identity(res)
            else:
                ok = check_codim2_identity(res)
        results.append({"seed": s, "ok": ok})
    emit(args, {"check": args.check, "kind": args.kind, "results": results},
         "\n".join(f"seed {r['seed']}: {'pass' if r['ok'] else 'FAIL'}" for r in results))
    return EXIT_PASS if all(r["ok"] for r in results) else EXIT_FAIL


# -- Betti tables --------------------------------------------------------------------


def load_betti(args) -> BettiTable:
    if args.input:
        return BettiTable.from_json(json.loads(Path(args.input).read_text()))
    if args.delpezzo6:
        return delpezzo6_betti(args.delpezzo6)
    raise UsageError("give --input or --delpezzo6")


def cmd_betti(args):
    if args.kind == "koszul":
        if not args.degrees:
            raise UsageError("give --degrees")
        B = koszul_betti(args.degrees)
        emit(args, {"betti": B.to_json()}, B.show())
        return EXIT_PASS
    if args.kind == "show":
        B = double_link_table(args.delpezzo6 or "P2xP2") if args.double_link else load_betti(args)
        emit(args, {"betti": B.to_json()}, B.show())
        return EXIT_PASS
    B = load_betti(args)
    if not args.ci:
        raise UsageError("give at least one --ci")
    steps = []
    for ci in args.ci:
        st = link_steps(B, ci)
        steps.append({"ci": ci, "cone": st.cone.to_json(), "minimal": st.minimal.to_json(),
                      "ambiguous": st.ambiguous})
        B = st.minimal
    emit(args, {"steps": steps, "result": B.to_json()}, B.show())
    return EXIT_PASS


# -- the web -------------------------------------------------------------------------


def load_catalog(args) -> cat.Catalog:
    if getattr(args, "catalog", None):
        return cat.Catalog.from_json(json.loads(Path(args.catalog).read_text()))
    tables = tuple(args.tables.split(",")) if getattr(args, "tables", None) else cat.TABLES + ("examples",)
    return cat.Catalog.shipped(tables)


def cmd_web(args):
    if args.action == "reproduce":
        rep = cat.reproduce_tables()
        emit(args, {"report": rep.to_json()}, "\n".join(rep.lines()))
        return EXIT_PASS if rep.passed else EXIT_FAIL
    C = load_catalog(args)
    if args.action == "candidates":
        found = cat.candidates(C, args.family, args.allowed or cat.DEFAULT_ALLOWED)
        emit(args, {"family": C.resolve(args.family), "candidates": [vars(c) for c in found]},
             "\n".join(f"{c.direction:<9} d={c.d}  {c.family}" for c in found) or "no candidates")
        return EXIT_PASS
    web = cat.build_web(C, verify=args.verify, seed=args.seed)
    if args.action == "build":
        comps = web.components()
        emit(args, {"catalog": C.to_json(), "web": web.to_json(), "components": comps},
             f"{len(web.nodes)} families, {len(web.edges)} transitions, {len(comps)} component(s), "
             f"{sum(e.verified for e in web.edges)} verified")
        return EXIT_PASS
    data = cat.export(web, "dot" if args.format == "dot" else "json")
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.write(data.decode())
    return EXIT_PASS


# -- reproduce-paper -------------------------------------------------------------------


def cmd_reproduce(args):
    cfg = rp.RunConfig(args.prime, args.seed, args.budget)
    try:
        ids = rp.select(args.only)
    except KeyError as exc:
        raise UsageError(f"unknown check {exc.args[0]!r}; choose from ids 1-10, "
                         f"{', '.join(n for n, _ in rp.CHECKS.values())} or {', '.join(rp.GROUPS)}")
    results = []
    for i in ids:
        r = rp.run_check(i, cfg)
        results.append(r)
        if args.format == "text":
            print(f"{r.line()}  ({r.seconds:.1f} s)", flush=True)
    code = rp.exit_status(results)
    payload = {"config": cfg.to_json(), "checks": [r.to_json() for r in results],
               "status": {0: "pass", 1: "fail", 2: "inconclusive"}[code]}
    Path(args.report).write_text(dumps(payload))
    if args.format == "json":
        sys.stdout.write(dumps(payload))
    else:
        print(f"overall: {payload['status']} (report written to {args.report})")
    return code


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = Parser(add_help=False)
    common.add_argument("--prime", type=int, default=None, help="field characteristic (default $KMUNPROJ_PRIME or 101)")
    common.add_argument("--seed", type=int, default=1, help="seed for every random choice (default 1)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="Groebner reduction budget")
    common.add_argument("--format", choices=("json", "text", "dot"), default="text",
                        help="output format; dot only for web export")
    common.add_argument("-o", "--output", help="also write the JSON result here")

    ideal = Parser(add_help=False)
    ideal.add_argument("gens", nargs="*", help="generators, e.g. 'x^2 - y*z'")
    ideal.add_argument("--vars", help="comma-separated variable names")
    ideal.add_argument("--weights", type=weights_arg, help="variable weights, e.g. 1^5,2")
    ideal.add_argument("--input", help="ideal as JSON {ring, generators}")

    build = Parser(add_help=False)
    build.add_argument("--weights", type=weights_arg, help="ambient weights, e.g. 1^5,2")
    build.add_argument("--q", type=int_list, help="degrees of the equations of D")
    build.add_argument("--e", type=int_list, help="degrees of the equations of X")
    build.add_argument("--n", type=int, default=5, help="matrix size for extend")
    build.add_argument("--row", type=int, help="take the degrees from a table row")

    top = Parser(prog="kmunproj", description="Unprojection, Groebner bases and Calabi-Yau transition webs.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("gb", parents=[common, ideal], help="reduced Groebner basis")
    p.set_defaults(func=cmd_gb)
    p = sub.add_parser("nf", parents=[common, ideal], help="normal form of --poly")
    p.add_argument("--poly", required=True)
    p.set_defaults(func=cmd_nf)
    p = sub.add_parser("eliminate", parents=[common, ideal], help="eliminate variables")
    p.add_argument("--variables", required=True, help="comma-separated names to eliminate")
    p.set_defaults(func=cmd_eliminate)
    p = sub.add_parser("dimdeg", parents=[common, ideal], help="projective dimension and degree")
    p.set_defaults(func=cmd_dimdeg)

    p = sub.add_parser("unproject", parents=[common, build], help="build Y from generic data")
    p.add_argument("kind", choices=("codim2", "codim3", "extend", "tom", "jerry"))
    p.set_defaults(func=cmd_unproject)

    p = sub.add_parser("invariants", parents=[common], help="Calabi-Yau invariants")
    p.add_argument("kind", choices=("ci", "lemma", "cascade"))
    p.add_argument("spec", nargs="?", help="variety, e.g. 'X_{3,4} ⊂ P(1^5,2)'")
    p.add_argument("--weights", type=weights_arg)
    p.add_argument("--degrees", type=int_list)
    p.add_argument("--H3")
    p.add_argument("--c2H")
    p.add_argument("--h0", type=int)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--direction", choices=("unproject", "project"), default="unproject")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("verify", parents=[common, build], help="smoothness, nodes and identities")
    p.add_argument("check", choices=("smoothness", "nodes", "containment", "pfaffian-identity"))
    p.add_argument("spec", nargs="?", help="variety for smoothness")
    p.add_argument("--kind", choices=("codim2", "codim3", "extend", "tom", "jerry"), default="codim3")
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    p.add_argument("--expect", choices=("smooth", "singular"))
    p.add_argument("--expect-nodes", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("betti", parents=[common], help="Betti tables and linkage")
    p.add_argument("kind", choices=("koszul", "link", "show"))
    p.add_argument("--degrees", type=int_list)
    p.add_argument("--input", help="Betti table JSON")
    p.add_argument("--delpezzo6", choices=DELPEZZO6_KINDS)
    p.add_argument("--ci", type=int_list, action="append", help="linking complete intersection (repeatable)")
    p.add_argument("--double-link", action="store_true", help="show the double-link result")
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("web", parents=[common], help="catalog and transition web")
    p.add_argument("action", choices=("build", "candidates", "export", "reproduce"))
    p.add_argument("family", nargs="?", help="family for candidates")
    p.add_argument("--tables", help="comma-separated subset of codim2,codim3,tomjerry,cascade,examples")
    p.add_argument("--catalog", help="catalog JSON written by 'web build'")
    p.add_argument("--allowed", type=int_list, help="del Pezzo degrees to try")
    p.add_argument("--verify", action="store_true", help="run the constructor checks on each edge")
    p.set_defaults(func=cmd_web)

    p = sub.add_parser("reproduce-paper", parents=[common], help="run the numbered reproduction checks")
    p.add_argument("--only", help="comma-separated check ids, names or groups")
    p.add_argument("--report", default="kmunproj-report.json")
    p.set_defaults(func=cmd_reproduce)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.prime is None:
            args.prime = default_prime()
        Field(args.prime)
        if args.format == "dot" and not (args.command == "web" and args.action == "export"):
            raise UsageError("--format dot only applies to web export")
        if args.command == "web" and args.action == "candidates" and not args.family:
            raise UsageError("candidates needs a family")
        if args.command == "verify" and args.check == "smoothness" and not args.spec:
            raise UsageError("smoothness needs a variety")
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (UsageError, SpecError, PolynomialError, InvariantError, BettiError, UnprojectionError, cat.CatalogError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
