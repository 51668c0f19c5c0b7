"""The ten acceptance criteria, each at its stated tolerance.

Every test appends the check's one-line verdict to the acceptance log, which
is printed in the terminal summary.
"""

import pytest

from kmunproj import reproduce as rp

CONFIG = rp.RunConfig()


@pytest.fixture
def check(acceptance_log):
    def run(i):
        res = rp.run_check(i, CONFIG)
        acceptance_log.append(f"{res.line()}  ({res.seconds:.1f} s)")
        return res

    return run


def test_01_pfaffian_identities(check):
    res = check(1)
    assert res.status == "pass", res.details
    assert res.details["max_seconds_per_seed"] < 1


def test_02_codim2_identity(check):
    res = check(2)
    assert res.status == "pass", res.details
    assert res.details["rows"] == 21 and res.details["max_seconds"] < 1


def test_03_elimination_roundtrip(check):
    res = check(3)
    assert res.status == "pass", res.details
    assert len(res.details["instances"]) == 3
    assert all(v["equal"] and v["seconds"] < 60 for v in res.details["instances"].values())


def test_04_node_counts(check):
    res = check(4)
    assert res.status == "pass", res.details
    for name, want in res.details["expected"].items():
        runs = res.details["instances"][name]
        assert [r["nodes"] for r in runs] == [want] * 3
        assert all(r["seconds"] < 60 for r in runs)


def test_05_ci_invariants(check):
    res = check(5)
    assert res.status == "pass", res.details
    assert res.seconds < 1


def test_06_lemma(check):
    res = check(6)
    assert res.status == "pass", res.details
    assert res.seconds < 1


def test_07_smoothness(check):
    res = check(7)
    assert res.status == "pass", res.details
    assert [r["verdict"] for r in res.details["pfaffian_Y"]] == ["smooth"] * 3
    assert len(res.details["Y_6_Pf"]) == 20
    assert all(r["verdict"] in ("singular", "isolated", "positive-dimensional") for r in res.details["Y_6_Pf"])
    assert all(r["seconds"] < 120 for r in res.details["pfaffian_Y"] + res.details["Y_6_Pf"])


def test_08_betti(check):
    res = check(8)
    assert res.status == "pass", res.details
    assert res.details["equal"] and res.seconds < 1


def test_09_catalog(check):
    res = check(9)
    assert res.status == "pass", res.details
    report = res.details["report"]
    assert [tuple(d["rows"]) for d in report["duplicates"]] == [(3, 17), (10, 18)]
    assert any(d["id"] == "x44_pfaffian" and d["field"] == "h0" for d in report["discrepancies"])


def test_10_properties(check):
    res = check(10)
    assert res.status == "pass", res.details
    assert res.details["membership_mismatches"] == 0 and res.details["pf_det_failures"] == 0
    assert res.seconds < 60
