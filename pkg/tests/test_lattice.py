import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polycontact.lattice import (
    Cube,
    EnumerationBudgetError,
    Walk,
    WalkModel,
    concat_walks,
    count_walks,
    enumerate_walks,
    format_walks,
    neighbors,
    parse_walks,
    step_prefixes,
    validate_walk,
)


def brute_force(model, dim, N):
    """Filter all (2n)^N step sequences by the model's avoidance condition."""
    out = []
    for steps in itertools.product(range(2 * dim), repeat=N):
        w = Walk.from_steps(steps, dim, model)
        if validate_walk(w):
            out.append(w)
    return out


def test_neighbors_order():
    assert neighbors((0, 0)) == [(1, 0), (-1, 0), (0, 1), (0, -1)]
    assert len(neighbors((0, 0, 0))) == 6


def test_tokens_roundtrip():
    w = Walk.from_tokens("+1,+2,-1", 2)
    assert w.points == ((0, 0), (1, 0), (1, 1), (0, 1))
    assert w.to_tokens() == "+1,+2,-1"


def test_validate_examples():
    assert validate_walk(Walk(((0, 0), (1, 0), (0, 0)), "srw"))
    v = validate_walk(Walk(((0, 0), (1, 0), (0, 0)), "saw"))
    assert not v and v.indices == (0, 2)
    # bond (0,0)-(1,0) traversed twice
    assert not validate_walk(Walk(((0, 0), (1, 0), (0, 0)), "baw"))
    assert not validate_walk(Walk(((0, 0), (2, 0)), "srw"))
    assert not validate_walk(Walk(((1, 0), (2, 0)), "srw"))


def test_small_counts():
    assert count_walks("srw", 2, 3) == 64
    assert count_walks("saw", 2, 4) == 100
    assert count_walks("baw", 2, 2) == 12
    assert count_walks("saw", 3, 3) == 150


@pytest.mark.parametrize("model,dim,N", [("srw", 2, 3), ("saw", 2, 5), ("baw", 2, 5), ("saw", 3, 3), ("baw", 1, 4)])
def test_enumeration_matches_brute_force(model, dim, N):
    got = list(enumerate_walks(model, dim, N))
    want = brute_force(model, dim, N)
    assert got == want  # same set, same lexicographic order


def test_prefix_partition():
    full = list(enumerate_walks("saw", 2, 5))
    parts = []
    for p in step_prefixes("saw", 2, 2, 5):
        parts.extend(enumerate_walks("saw", 2, 5, prefix=p))
    assert parts == full


def test_budget():
    with pytest.raises(EnumerationBudgetError):
        list(enumerate_walks("srw", 2, 6, max_walks=100))


def test_zero_length():
    assert list(enumerate_walks("saw", 3, 0)) == [Walk(((0, 0, 0),), "saw")]


def test_concat():
    a = Walk.from_tokens("+1,+2", 2)
    b = Walk.from_tokens("-1", 2)
    c = concat_walks(a, b)
    assert c.to_tokens() == "+1,+2,-1"
    with pytest.raises(ValueError):
        concat_walks(a, Walk.from_tokens("+1", 3))


def test_cube_classify():
    D = Cube((0, 0), 2)
    assert D.classify((1, 1)) == "interior"
    assert D.classify((0, 1)) == "boundary"
    assert D.classify((3, 0)) == "outside"
    assert D.is_vertex((2, 2))


def test_walk_file_roundtrip(tmp_path):
    walks = list(enumerate_walks("saw", 2, 3))
    text = format_walks(walks)
    assert text.startswith("# model=saw dim=2 n_steps=3")
    assert parse_walks(text) == walks


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 5), max_size=30))
def test_array_roundtrip(steps):
    w = Walk.from_steps(steps, 3)
    assert Walk.from_array(w.as_array()) == w
    assert w.steps == tuple(steps)
    assert np.abs(np.diff(w.as_array(), axis=0)).sum(axis=1).tolist() == [1] * len(steps)


def test_model_parse():
    assert WalkModel.parse("SAW") is WalkModel.SAW
    with pytest.raises(ValueError):
        WalkModel.parse("lattice")
