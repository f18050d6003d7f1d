import json

import numpy as np
import pytest

from oracles import NaiveLattice, example2_closed_form, naive_eq3, table2
from twouninorm import fixtures
from twouninorm.construct import (
    ConditionsNotMet,
    ConstructionError,
    KindMismatch,
    construct_2uninorm,
    construct_alt_form,
    construct_chain_form,
    construct_variant,
    optable_from_json,
    write_table,
)
from twouninorm.genfun import load_generator
from twouninorm.lattice import chain, parse_lattice
from twouninorm.verify import classify, verify_full


@pytest.fixture(scope="module")
def U(table1):
    return construct_2uninorm(table1)


def test_table2_golden(U):
    L = U.lattice
    gold = table2()
    got = {(L.label(x), L.label(y)): L.label(U(x, y)) for x in range(L.size) for y in range(L.size)}
    assert got == gold


@pytest.mark.parametrize(
    "x, y, want",
    [("x3", "x3", "x4"), ("x3", "x4", "a"), ("x1", "x1", "0"), ("x2", "x2", "x1"), ("e1", "x8", "a"),
     ("x9", "x10", "x10"), ("x9", "e2", "x9")],
)
def test_table2_spot_cells(U, x, y, want):
    L = U.lattice
    assert L.label(U(L.id(x), L.id(y))) == want


def test_branch_map(U):
    L = U.lattice
    assert (U.table[U.branches == 3] == L.id("a")).all()
    ones = U.branches == 1
    assert np.array_equal(ones, ones.T)
    assert U.branches[L.id("e1"), L.id("x8")] == 3
    assert U.branches[L.id("x9"), L.id("x10")] == 4
    assert U.branches[L.id("x9"), L.id("e2")] == 5
    assert U.provenance == "eq3"


def test_empty_convention_never_fires_on_table1(U):
    assert not U.empty_convention.any()


def test_matches_naive_rule(table1, U):
    L = table1.lattice
    NL = NaiveLattice(L.to_spec())
    f = {L.label(i): v for i, v in enumerate(table1.values)}
    ref = naive_eq3(NL, f, "e1", "a", "e2")
    assert all(L.label(U(L.id(x), L.id(y))) == v for (x, y), v in ref.items())


def test_duality_and_alt_form(table1, U):
    D = construct_2uninorm(table1.negated())
    assert D.provenance == "eq4" and D.same_cells(U)
    assert construct_alt_form(table1).same_cells(U)
    assert construct_alt_form(table1.negated()).same_cells(U)


def test_enforcement_and_override():
    G = fixtures.generator("f1")
    with pytest.raises(ConditionsNotMet) as info:
        construct_2uninorm(G)
    assert info.value.report.failed() == ["i"]
    T = construct_2uninorm(G, override=True)
    L = G.lattice
    assert L.label(T(L.id("x3"), L.id("x3"))) == "e1"


def test_alt_form_reports_missing_case():
    with pytest.raises(ConstructionError):
        construct_alt_form(fixtures.generator("f1"), override=True)


def test_example2_truncation_closed_form():
    L, G = fixtures.example2()
    assert L.size > 150
    T = construct_2uninorm(G)
    cell = example2_closed_form(L, fixtures.index_of)
    bad = [(x, y) for x in range(L.size) for y in range(L.size) if T(x, y) != cell(x, y)]
    assert bad == []
    assert construct_alt_form(G).same_cells(T)
    assert construct_2uninorm(G.negated()).same_cells(T)


def test_example2_incomparable_sets():
    L, _ = fixtures.example2()
    lab = lambda s: {L.label(x) for x in s}
    assert lab(L.incomparable_set(L.id("x4"))) == {"x2.8", "x2.85", "x2.9", "x2.91", "x2.95", "x2.99"}
    assert lab(L.incomparable_set(L.id("x7"))) == {"x5.51", "x5.55", "x5.6", "x5.8", "x5.85", "x5.9"}


# --- specializations ---------------------------------------------------------------


def test_uni_nullnorm_fixture():
    G = fixtures.generator("uni-nullnorm")
    T = construct_variant(G, "uni-nullnorm")
    assert T.same_cells(construct_2uninorm(G))
    assert classify(T) == "uni-nullnorm"


@pytest.mark.parametrize("kind", ["null-uninorm", "nullnorm", "uninorm", "t-norm", "t-conorm"])
def test_degenerate_fixtures(kind):
    G = fixtures.degenerate(kind)
    T = construct_variant(G, kind)
    assert T.same_cells(construct_2uninorm(G))
    assert classify(T) == kind
    D = G.negated()
    assert construct_variant(D, kind).same_cells(T)


def test_small_chain_uninorm():
    L = chain(["0", "e", "1"])
    G = load_generator(L, {"0": -1, "e": 0, "1": 2}, "increasing", "e", "1", "1")
    T = construct_variant(G, "uninorm")
    assert T.same_cells(construct_2uninorm(G))
    assert classify(T) == "uninorm"


def test_lukasiewicz_style_tnorm():
    L = chain(["0", "m", "1"])
    G = load_generator(L, {"0": -2, "m": -1, "1": 0}, "increasing", "1", "1", "1")
    T = construct_variant(G, "t-norm")
    assert T(L.id("m"), L.id("m")) == L.bottom
    assert classify(T) == "t-norm"


def test_kind_mismatch(table1):
    for kind in ("uni-nullnorm", "null-uninorm", "nullnorm", "uninorm", "t-norm", "t-conorm"):
        with pytest.raises(KindMismatch):
            construct_variant(table1, kind)
    with pytest.raises(KindMismatch):
        construct_variant(table1, "semigroup")


def test_chain_form():
    L = chain([f"c{i}" for i in range(6)])
    G = load_generator(L, dict(enumerate([-4, -2, 0, 2, 4, 5])), "increasing", 2, 4, 4 + 1)
    assert construct_chain_form(G).same_cells(construct_2uninorm(G))
    with pytest.raises(KindMismatch):
        construct_chain_form(fixtures.generator("table1"))


def test_a_equal_e2_below_top_breaks_upper_neutrality():
    # the rule sends T(a, x) to a above a, so e2 = a is not neutral there
    L = chain(["0", "1"])
    G = load_generator(L, {"0": 0, "1": 1}, "increasing", "0", "0", "0")
    T = construct_2uninorm(G)
    assert T(0, 1) == 0
    assert verify_full(T).entry("neutral-upper").status.value == "fail"


def test_tconorm_needs_a_at_top():
    L = chain(["0", "m", "1"])
    G = load_generator(L, {"0": 0, "m": 1, "1": 2}, "increasing", "0", "0", "0")
    assert not verify_full(construct_2uninorm(G)).passed
    G = load_generator(L, {"0": 0, "m": 1, "1": 2}, "increasing", "0", "1", "1")
    T = construct_2uninorm(G)
    assert classify(T) == "t-conorm"
    assert T(L.id("m"), L.id("m")) == L.top


# --- serialisation -----------------------------------------------------------------


def test_text_layout(U):
    text = write_table(U, "text")
    lines = text.splitlines()
    assert lines[0].split("|")[1].split() == list(U.lattice.elements)
    assert lines[2].split("|")[0].strip() == "0"
    assert len(lines) == 2 + U.lattice.size


def test_csv_round_trip(U):
    rows = [r.split(",") for r in write_table(U, "csv").splitlines()]
    gold = table2()
    assert all(gold[r[0], c] == v for r in rows[1:] for c, v in zip(rows[0][1:], r[1:]))


def test_json_round_trip_with_permuted_order(U):
    doc = json.loads(write_table(U, "json"))
    assert doc["provenance"] == "eq3" and len(doc["branches"]) == 16
    order = list(reversed(doc["elements"]))
    pos = {e: i for i, e in enumerate(doc["elements"])}
    doc2 = {
        "elements": order,
        "table": [[doc["table"][pos[r]][pos[c]] for c in order] for r in order],
        "anchors": doc["anchors"],
    }
    again = optable_from_json(U.lattice, doc2)
    assert again.same_cells(U) and again.anchors == U.anchors


def test_json_reader_errors(U):
    doc = json.loads(write_table(U, "json"))
    with pytest.raises(ValueError):
        optable_from_json(U.lattice, {**doc, "table": doc["table"][:3]})
    with pytest.raises(ValueError):
        optable_from_json(U.lattice, {"table": doc["table"]})
    with pytest.raises(ValueError):
        write_table(U, "xml")
