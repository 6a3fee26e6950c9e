"""Input validation helpers for the estimator layer."""

from __future__ import annotations

from typing import Any

import numpy as np

from .contact import ContactRule
from .lattice import Walk, WalkModel, validate_walk


def check_walks(X: Any, *, model=None, dimension: int | None = None, same_length: bool = True) -> list[Walk]:
    """Coerce ``X`` to a list of valid walks.

    Accepts a :class:`Walk`, an iterable of walks, an iterable of point
    sequences, or an integer array of shape ``(n_walks, N+1, n)``. When
    ``model`` is given every walk is re-tagged with it before validation.
    """
    if isinstance(X, Walk):
        X = [X]
    if isinstance(X, np.ndarray):
        if X.ndim != 3:
            raise ValueError(f"expected an array of shape (n_walks, N+1, n), got {X.shape}")
        walks = [Walk.from_array(a) for a in X]
    else:
        walks = [x if isinstance(x, Walk) else Walk(tuple(map(tuple, x))) for x in X]
    if not walks:
        raise ValueError("no walks given")
    if model is not None:
        m = WalkModel.parse(model)
        walks = [w if w.model is m else w.with_model(m) for w in walks]
    for i, w in enumerate(walks):
        if dimension is not None and w.dimension != dimension:
            raise ValueError(f"walk {i} has dimension {w.dimension}, expected {dimension}")
        verdict = validate_walk(w)
        if not verdict:
            raise ValueError(f"walk {i} is invalid: {verdict.message}")
    if same_length and len({w.n_steps for w in walks}) > 1:
        raise ValueError("walks have different lengths")
    if len({w.dimension for w in walks}) > 1:
        raise ValueError("walks have different dimensions")
    return walks


def check_rule(rule, model="srw") -> ContactRule:
    """Parse a rule, defaulting to coincidence for SRW and adjacency otherwise."""
    if rule is None:
        return ContactRule.coincidence() if WalkModel.parse(model) is WalkModel.SRW else ContactRule.adjacency()
    return ContactRule.parse(rule)


def check_positive_int(value, name: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)
