import json

import pytest
from hypothesis import given, strategies as st

from kmunproj.catalog import (DEFAULT_ALLOWED, EXPORT_FORMATS, TABLES, Catalog, CatalogError, TransitionEdge, Web,
                              build_web, candidates, export, family_key, find_duplicates, import_web, load_table,
                              normalize, notation_from_latex, parse_entry, reproduce_tables, verify_edge)
from kmunproj.geometry import AmbientSpace, spec_in
from kmunproj.invariants import spec_invariants

CATALOG = Catalog.shipped()
FAMILIES = sorted(k for k, r in CATALOG.families.items() if r.invariants is not None and r.invariants.c2H is not None)


def test_notation_from_latex():
    assert notation_from_latex(r"$X_{4}\cap Pf \subset\mathbb{P}(1^7,2)$") == "X_{4} ∩ Pf ⊂ P(1^7,2)"
    assert notation_from_latex(r"X_ {2,2}\subset \mathbb{P}^ 5") == "X_{2,2} ⊂ P^5"


def test_parse_entry():
    V = parse_entry("X_{2,4} ⊂ P^5")
    assert V.all_degrees() == (2, 4) and V.ambient.weights == (1,) * 6
    assert parse_entry("a sextic double solid, no equations here") is None


def test_normalize_drops_linear_and_redundant_pairs():
    A = AmbientSpace((1,) * 5 + (2,))
    V = spec_in(A, "X_{2,5} ⊂ P(1^5,2)")
    assert family_key(V) == "X_5 ⊂ P^4"
    assert family_key(spec_in(AmbientSpace((1,) * 6), "X_{1,5} ⊂ P^5")) == "X_5 ⊂ P^4"


@pytest.mark.parametrize("text", ["X_{2,5} ⊂ P(1^5,2)", "X_{1,2,4} ⊂ P^6", "X_{3,6} ⊂ P(1^5,3)",
                                  "X_{1,3} ∩ Pf ⊂ P^8"])
def test_normalize_preserves_invariants(text):
    V = parse_entry(text)
    assert spec_invariants(normalize(V)).key() == spec_invariants(V).key()


def test_reproduce_tables():
    report = reproduce_tables()
    assert report.passed
    summary = report.summary()
    assert summary["codim2"] == (21, 21) and summary["codim3"] == (7, 7)
    assert summary["tomjerry"] == (2, 2) and summary["cascade"] == (9, 9)
    assert report.lines()
    json.dumps(report.to_json())


def test_duplicates():
    assert find_duplicates(load_table("codim2")) == [(3, 17), (10, 18)]
    assert find_duplicates(load_table("codim3")) == []


def test_printed_discrepancies_are_reported_not_failed():
    report = reproduce_tables()
    kinds = {(d["id"], d["field"]) for d in report.discrepancies}
    assert kinds == {("x34_pfaffian", "chi"), ("x44_pfaffian", "chi"), ("x44_pfaffian", "h0")}


def test_unknown_table():
    with pytest.raises(CatalogError):
        load_table("codim9")


def test_resolve_aliases_and_printed_notation():
    assert CATALOG.resolve("X_{5}\\subset\\mathbb{P}^4") == "X_5 ⊂ P^4"
    assert CATALOG.resolve("X_{2,5} ⊂ P(1^5,2)") == "X_5 ⊂ P^4"
    assert CATALOG.resolve("no such family") is None
    with pytest.raises(CatalogError):
        CATALOG.family("no such family")


def test_catalog_json_roundtrip():
    again = Catalog.from_json(json.loads(json.dumps(CATALOG.to_json())))
    assert sorted(again.families) == sorted(CATALOG.families)
    assert sorted(e.ident for e in again.edges) == sorted(e.ident for e in CATALOG.edges)


def test_edge_validation_and_merge():
    with pytest.raises(CatalogError):
        TransitionEdge("a", "b", 3, "teleport")
    with pytest.raises(CatalogError):
        TransitionEdge("a", "b", 10, "codim2")
    cat = Catalog()
    cat.add_edge(TransitionEdge("a", "b", 3, "codim2"))
    cat.add_edge(TransitionEdge("a", "b", 3, "codim2", verified=True))
    assert len(cat.edges) == 1 and cat.edges[0].verified


def test_quintic_candidates():
    found = {(c.family, c.d, c.direction) for c in candidates(CATALOG, "X_5 ⊂ P^4")}
    assert ("X_{2,4} ⊂ P^5", 3, "unproject") in found
    assert ("X_{3,3} ⊂ P^5", 4, "unproject") in found
    assert ("X_6 ⊂ P(1^4,2)", 2, "project") in found


def test_degree_eight_is_excluded_by_default():
    assert 8 not in DEFAULT_ALLOWED
    assert all(c.d != 8 for f in FAMILIES for c in candidates(CATALOG, f))


@given(st.sampled_from(FAMILIES), st.sampled_from(sorted(DEFAULT_ALLOWED)))
def test_candidates_are_symmetric(fam, d):
    ups = {c.family for c in candidates(CATALOG, fam, {d}) if c.direction == "unproject"}
    for other in ups:
        back = {(c.family, c.direction) for c in candidates(CATALOG, other, {d})}
        assert (fam, "project") in back


def test_web_is_connected():
    web = build_web(CATALOG)
    assert len(web.components()) == 1
    assert set(web.node_names()) == set(CATALOG.families)


def test_cascade_web_is_a_path():
    web = build_web(Catalog.shipped(("cascade",)))
    assert web.is_path() and len(web.nodes) == 9


@pytest.mark.parametrize("fmt", EXPORT_FORMATS)
def test_export_is_deterministic(fmt):
    assert export(build_web(CATALOG), fmt) == export(build_web(Catalog.shipped()), fmt)


def test_export_json_roundtrip():
    web = build_web(CATALOG)
    assert import_web(export(web, "json")) == web
    assert import_web(export(web, "json").decode()) == web


def test_export_dot():
    text = export(build_web(Catalog.shipped(("cascade",))), "dot").decode()
    assert text.startswith("digraph transitions {") and text.rstrip().endswith("}")
    assert text.count("->") == 8
    with pytest.raises(CatalogError):
        export(build_web(CATALOG), "graphml")


@pytest.mark.parametrize("mechanism", ["codim2", "codim3", "pfaffian-extension", "tom", "jerry"])
def test_verify_edge(mechanism):
    edge = next(e for e in CATALOG.edges if e.mechanism == mechanism)
    assert verify_edge(edge, seed=1)


def test_cascade_edges_are_not_verifiable():
    edge = next(e for e in CATALOG.edges if e.mechanism == "cascade")
    assert not verify_edge(edge)


def test_web_from_json_tables_listed():
    assert set(TABLES) == {"codim2", "codim3", "tomjerry", "cascade"}
    assert Web.from_json({"nodes": [], "edges": []}).components() == []
