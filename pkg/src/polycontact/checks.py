"""Consistency and transform-invariance checks shared by the CLI and the test suite."""

from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction

from .census import CensusResult, enumerate_preimages, run_census
from .contact import COINCIDENCE, ContactRule, build_contact_matrix
from .entropy import entropy_report
from .lattice import Walk, WalkModel, count_walks, enumerate_step_sequences, enumerate_walks, validate_walk
from .montecarlo import sample_srw
from .patterns import (
    OriginSwapError,
    apply_site_swap,
    default_swap_pattern,
    find_free_4_loops,
    find_kesten_occurrences,
    find_pattern_occurrences,
    kesten_paths,
    reverse_loop,
    rotation_orbit,
)


def walk_buckets(model, dimension: int, N: int, rule=None) -> dict[bytes, list[Walk]]:
    """Group walks by contact-matrix key, by direct enumeration."""
    rule = ContactRule.parse(rule) if rule is not None else ContactRule()
    out: dict[bytes, list[Walk]] = defaultdict(list)
    for w in enumerate_walks(model, dimension, N):
        out[build_contact_matrix(w, rule).key].append(w)
    return dict(out)


def inverse_degeneracy_sum(census: CensusResult) -> Fraction:
    """sum over walks of 1/deg C(w), walking the space again independently of the census engine."""
    degs = {k: r.degeneracy for k, r in census.classes.items()}
    lcm = 1
    for d in set(degs.values()):
        lcm = lcm * d // math.gcd(lcm, d)
    num = 0
    for w in enumerate_walks(census.model, census.dimension, census.N):
        num += lcm // degs[build_contact_matrix(w, census.rule).key]
    return Fraction(num, lcm)


def _result(ok: bool, **detail) -> dict:
    return {"ok": bool(ok), **detail}


def consistency_check(model, dimension: int, N: int, rule=None, *, threads: int = 1,
                      walk_pass_limit: int = 2_000_000, preimage_limit: int = 20_000) -> dict:
    """Exact census identities, entropy identities and (small N) the preimage oracle."""
    model = WalkModel.parse(model)
    census = run_census(model, dimension, N, rule, threads=threads)
    rule = census.rule
    out: dict[str, dict] = {}
    degs = census.degeneracies()
    expected_total = count_walks(model, dimension, N)
    out["partition"] = _result(sum(degs) == census.total_walks == expected_total,
                               total_walks=census.total_walks, expected=expected_total)
    if census.total_walks <= walk_pass_limit:
        s = inverse_degeneracy_sum(census)
        out["inverse_degeneracy_sum"] = _result(s == census.num_matrices, value=str(s),
                                                num_matrices=census.num_matrices)
    if rule.kind == COINCIDENCE:
        bad = [k.hex() for k, c in census.classes.items()
               if c.degeneracy > (2 * dimension) ** c.range_of_representative]
        out["degeneracy_bound"] = _result(not bad, violations=bad)
        mixed = [k.hex() for k, c in census.classes.items() if c.min_intersections != c.max_intersections]
        out["class_range_constant"] = _result(not mixed, violations=mixed)
    if census.total_walks > 1:
        rep = entropy_report(census)
        tol = 1e-12 * rep.S
        out["entropy_decomposition"] = _result(abs(rep.S_C + rep.S_hat_C_direct - rep.S) <= tol,
                                               residual=rep.S_C + rep.S_hat_C_direct - rep.S)
        out["jensen_equality"] = _result(abs(rep.S_C - (rep.S - rep.mean_log_deg)) <= tol,
                                         residual=rep.S_C - (rep.S - rep.mean_log_deg))
        eps = 1e-12
        chain = rep.jensen_lower <= rep.delta + eps and rep.delta <= rep.gamma + eps and rep.gamma <= 1 + eps
        out["entropy_chain"] = _result(chain, jensen_lower=rep.jensen_lower, delta=rep.delta, gamma=rep.gamma)
    if rule.kind == COINCIDENCE and model is WalkModel.SRW and census.total_walks <= preimage_limit:
        buckets = walk_buckets(model, dimension, N, rule)
        bad = []
        for k, members in buckets.items():
            pre = enumerate_preimages(census.matrix(k), dimension, model, rule)
            if {w.points for w in pre} != {w.points for w in members} or \
                    census.classes[k].degeneracy != len(members):
                bad.append(k.hex())
        out["preimage_oracle"] = _result(not bad and len(buckets) == census.num_matrices, violations=bad)
    return out


def transform_check_srw(dimension: int, N: int, samples: int, seed: int) -> dict:
    """Apply every site swap and free-4-loop reversal on sampled SRW and compare matrices."""
    pattern = default_swap_pattern(dimension)
    rule = ContactRule.coincidence()
    counts = {"walks": samples, "swaps": 0, "origin_swaps_skipped": 0, "loop_reversals": 0, "failures": 0}
    failures = []
    for k in range(samples):
        w = sample_srw(dimension, N, seed, k)
        key = build_contact_matrix(w, rule).key
        occs = find_pattern_occurrences(w, pattern) if pattern else []
        for occ in occs:
            try:
                w2 = apply_site_swap(w, occ)
            except OriginSwapError:
                counts["origin_swaps_skipped"] += 1
                continue
            counts["swaps"] += 1
            if not validate_walk(w2) or build_contact_matrix(w2, rule).key != key:
                failures.append({"sample": k, "kind": "swap", "at": occ.label})
        for occ in find_free_4_loops(w):
            counts["loop_reversals"] += 1
            w2 = reverse_loop(w, occ)
            if not validate_walk(w2) or w2 == w or build_contact_matrix(w2, rule).key != key:
                failures.append({"sample": k, "kind": "free4", "at": occ.label})
    counts["failures"] = len(failures)
    return {"ok": not failures, "counts": counts, "failures": failures[:20]}


def kesten_check(dimension: int, max_length: int, *, b: int = 3, model="saw", min_length: int | None = None) -> dict:
    """Rotate every construction-path occurrence in every enumerated walk up to ``max_length``."""
    model = WalkModel.parse(model)
    rule = ContactRule.adjacency()
    fixtures = kesten_paths(dimension, b, model.value)
    k = fixtures[0].n_steps if fixtures else 0
    lo = k if min_length is None else min_length
    counts = {"walks_scanned": 0, "walks_with_occurrence": 0, "rotations": 0}
    failures = []
    wants = [bytes(p.path.steps) for p in fixtures]
    for N in range(lo, max_length + 1):
        for steps in enumerate_step_sequences(model, dimension, N):
            counts["walks_scanned"] += 1
            s = bytes(steps)
            if not any(want in s for want in wants):
                continue
            w = Walk.from_steps(steps, dimension, model)
            occs = [o for p in fixtures for o in find_kesten_occurrences(w, p)]
            if not occs:
                continue
            counts["walks_with_occurrence"] += 1
            key = build_contact_matrix(w, rule).key
            for occ in occs:
                orbit = rotation_orbit(w, occ)
                counts["rotations"] += len(orbit)
                ok = orbit[-1] == w and len({o.points for o in orbit}) == dimension
                ok = ok and all(validate_walk(o) and build_contact_matrix(o, rule).key == key for o in orbit)
                if not ok:
                    failures.append({"steps": list(steps), "r": occ.index})
    return {"ok": not failures and counts["walks_with_occurrence"] > 0, "counts": counts,
            "failures": failures[:20]}
