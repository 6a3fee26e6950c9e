from collections import Counter
from fractions import Fraction

import pytest

from polycontact.census import CensusResult, census_from_walks, class_filter, enumerate_preimages, run_census
from polycontact.checks import consistency_check, inverse_degeneracy_sum, walk_buckets
from polycontact.contact import ContactMatrix, ContactRule, build_contact_matrix
from polycontact.lattice import EnumerationBudgetError, Walk, enumerate_walks
from polycontact.schemas import validate_document


def brute_census(model, dim, N, rule=None):
    rule = ContactRule.parse(rule) if rule else ContactRule.coincidence()
    return Counter(build_contact_matrix(w, rule).key for w in enumerate_walks(model, dim, N))


def test_n2_examples():
    c2 = run_census("srw", 2, 2)
    assert c2.num_matrices == 2 and sorted(c2.degeneracies()) == [4, 12]
    c3 = run_census("srw", 2, 3)
    assert sorted(c3.degeneracies()) == [4, 12, 12, 36]
    keys = {tuple(c3.matrix(k).pairs()) for k in c3.classes}
    assert keys == {(), ((0, 2),), ((1, 3),), ((0, 2), (1, 3))}


@pytest.mark.parametrize("N", range(1, 9))
def test_one_dimensional_count(N):
    assert run_census("srw", 1, N).num_matrices == 2 ** (N - 1)


@pytest.mark.parametrize("model,dim,N,rule", [
    ("srw", 2, 5, None), ("srw", 3, 3, None), ("saw", 2, 7, "adjacency"), ("baw", 2, 6, "adjacency"),
    ("srw", 2, 4, "threshold:1.5"), ("saw", 3, 4, "adjacency"),
])
def test_matches_brute_force(model, dim, N, rule):
    c = run_census(model, dim, N, rule)
    want = brute_census(model, dim, N, rule)
    assert {k: r.degeneracy for k, r in c.classes.items()} == dict(want)
    assert c.total_walks == sum(want.values())


def test_threads_do_not_change_result():
    a = run_census("srw", 2, 7)
    b = run_census("srw", 2, 7, threads=3)
    assert a.to_json() == b.to_json()
    for k in a.classes:
        assert a.classes[k].representative_walk == b.classes[k].representative_walk


def test_representative_is_first_in_order():
    c = run_census("srw", 2, 3)
    first = {}
    for w in enumerate_walks("srw", 2, 3):
        first.setdefault(build_contact_matrix(w).key, w)
    assert {k: r.representative_walk for k, r in c.classes.items()} == first


def test_coincidence_class_range_constant(census_cache):
    c = census_cache("srw", 2, 6)
    for rec in c.classes.values():
        assert rec.min_intersections == rec.max_intersections
        assert rec.range_of_representative == 7 - rec.min_intersections


def test_inverse_degeneracy_sum():
    c = run_census("srw", 2, 5)
    assert inverse_degeneracy_sum(c) == Fraction(c.num_matrices)


def test_zero_length_census():
    c = run_census("srw", 2, 0)
    assert c.total_walks == 1 and c.num_matrices == 1


def test_budget_exceeded():
    with pytest.raises(EnumerationBudgetError):
        run_census("srw", 2, 8, max_walks=1000)


def test_json_roundtrip():
    c = run_census("saw", 2, 5, "adjacency")
    doc = c.to_dict({"note": "x"})
    validate_document(doc)
    back = CensusResult.from_dict(doc)
    assert back.to_dict({"note": "x"}) == doc
    assert [row["key_hex"] for row in doc["classes"]] == sorted(row["key_hex"] for row in doc["classes"])
    assert c.to_csv().splitlines()[0] == "key_hex,degeneracy,range"


def test_census_from_walks():
    walks = list(enumerate_walks("srw", 2, 4))
    assert census_from_walks(walks).to_json() == run_census("srw", 2, 4).to_json()


def test_preimage_examples():
    assert len(enumerate_preimages(ContactMatrix.zeros(3), 2)) == 12
    ws = enumerate_preimages(ContactMatrix.from_pairs(3, [(0, 2)]), 2)
    assert len(ws) == 4 and len(ws) <= 4 ** 2
    assert enumerate_preimages(ContactMatrix.from_pairs(2, [(0, 1)]), 2) == []


def test_preimage_inconsistent_matrix():
    # (0,2) and (2,4) imply (0,4) by transitivity
    C = ContactMatrix.from_pairs(5, [(0, 2), (2, 4)])
    assert enumerate_preimages(C, 2) == []


@pytest.mark.parametrize("dim,N", [(2, 5), (3, 3), (1, 6)])
def test_preimages_reproduce_buckets(dim, N):
    for key, walks in walk_buckets("srw", dim, N).items():
        got = enumerate_preimages(ContactMatrix(N + 1, key), dim)
        assert sorted(w.points for w in got) == sorted(w.points for w in walks)


def test_preimages_adjacency_by_filtering():
    buckets = walk_buckets("saw", 2, 5, ContactRule.adjacency())
    for key, walks in buckets.items():
        got = enumerate_preimages(ContactMatrix(6, key, ContactRule.adjacency()), 2, "saw", ContactRule.adjacency())
        assert sorted(w.points for w in got) == sorted(w.points for w in walks)


def test_class_filter_examples():
    c = run_census("srw", 2, 2)
    full = class_filter(c, (0, 1))
    assert full.n_walks == 16 and full.n_matrices == 2 and full.mean_degeneracy == 8
    ret = class_filter(c, (Fraction(1, 3), 1))
    assert (ret.n_walks, ret.n_matrices, ret.mean_degeneracy) == (4, 1, 4)
    empty = class_filter(c, (0.9, 1))
    assert empty.n_walks == 0 and empty.n_matrices == 0
    with pytest.raises(ValueError):
        class_filter(c, (0.5, 0.2))
    with pytest.raises(ValueError):
        class_filter(run_census("saw", 2, 3, "adjacency"), (0, 1))


@pytest.mark.parametrize("model,rule", [("srw", None), ("saw", "adjacency"), ("srw", "threshold:1.5")])
def test_consistency_check_passes(model, rule):
    res = consistency_check(model, 2, 5, rule)
    assert all(r["ok"] for r in res.values()), res
