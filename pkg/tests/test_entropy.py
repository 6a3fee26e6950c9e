import math

import pytest
from hypothesis import given, settings, strategies as st

from polycontact.census import CensusResult, ClassRecord, run_census
from polycontact.contact import ContactRule
from polycontact.entropy import check_supermultiplicativity, entropy_report, gamma_table, shannon, srw_W_table
from polycontact.lattice import WalkModel


def test_shannon_examples():
    assert shannon([0.25] * 4) == pytest.approx(math.log(4), rel=1e-15)
    assert shannon([1.0, 0.0]) == 0.0
    assert shannon([0.75, 0.25]) == pytest.approx(0.562335, abs=1e-6)
    with pytest.raises(ValueError):
        shannon([0.5, 0.6])
    with pytest.raises(ValueError):
        shannon([])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.001, 10), min_size=1, max_size=40))
def test_shannon_bounds(weights):
    total = math.fsum(weights)
    h = shannon([x / total for x in weights])
    assert -1e-12 <= h <= math.log(len(weights)) + 1e-12


def test_n2_report():
    r = entropy_report(run_census("srw", 2, 2))
    assert r.S == pytest.approx(math.log(16))
    assert r.S_C == pytest.approx(0.56234, abs=1e-5)
    assert r.delta == pytest.approx(0.20282, abs=1e-5)
    assert r.gamma == pytest.approx(0.25, rel=1e-15)
    assert r.S_hat_C_discrepancy < 1e-12


def test_one_dimensional_gamma():
    r = entropy_report(run_census("srw", 1, 3))
    assert r.gamma == pytest.approx(2 / 3)


def test_lossless_census():
    # one walk per class
    recs = {bytes([i]): ClassRecord(1, None, 1, 0, 0) for i in range(5)}
    c = CensusResult(WalkModel.SRW, 2, 3, ContactRule(), 5, recs)
    r = entropy_report(c)
    assert r.delta == pytest.approx(1.0) and r.gamma == pytest.approx(1.0)


def test_degenerate_zero_length():
    r = entropy_report(run_census("srw", 2, 0))
    assert r.degenerate and r.delta is None and r.gamma is None and r.S == 0


@pytest.mark.parametrize("model,dim,N,rule", [("srw", 2, 6, None), ("srw", 3, 3, None), ("saw", 2, 8, "adjacency")])
def test_identities_and_chain(model, dim, N, rule):
    r = entropy_report(run_census(model, dim, N, rule))
    assert r.S_C + r.S_hat_C == pytest.approx(r.S, rel=1e-12)
    assert r.S_C == pytest.approx(r.S - r.mean_log_deg, rel=1e-12)
    assert r.jensen_lower <= r.delta + 1e-12
    assert r.delta <= r.gamma + 1e-12 <= 1 + 2e-12


def test_supermultiplicativity_examples():
    assert not check_supermultiplicativity({1: 1, 2: 2, 3: 4}, 2)
    v = check_supermultiplicativity({1: 3, 2: 4}, 2)
    assert v.supermultiplicativity == [(1, 1)]


def test_real_table_has_no_violations():
    assert not check_supermultiplicativity(srw_W_table(2, 7), 2)


def test_gamma_table_rows():
    rows = gamma_table("srw", 2, 4)
    assert [r.N for r in rows] == [1, 2, 3, 4]
    assert [r.W for r in rows[:3]] == [1, 2, 4]
    assert rows[1].gamma == pytest.approx(0.25)
