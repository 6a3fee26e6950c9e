"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected in ``RESULTS`` and printed in the pytest terminal
summary (see ``conftest.py``). The gamma tables of criterion 12 are written
to ``artifacts/``.
"""

import math
import os
import time
from fractions import Fraction
from pathlib import Path

import pytest

from polycontact.census import enumerate_preimages, run_census
from polycontact.checks import inverse_degeneracy_sum, kesten_check, transform_check_srw, walk_buckets
from polycontact.contact import ContactMatrix, build_contact_matrix
from polycontact.entropy import check_supermultiplicativity, entropy_report
from polycontact.lattice import count_walks, enumerate_walks
from polycontact.montecarlo import (
    M1_P,
    M1_Q,
    estimate_mean_range,
    estimate_pattern_density,
    estimate_return_probability,
)
from polycontact.patterns import certificate_variants, degeneracy_certificate

THREADS = max(1, min(8, os.cpu_count() or 1))
ARTIFACTS = Path(__file__).resolve().parents[1] / "artifacts"

RESULTS: list[str] = []
_censuses = {}


def census(model, dim, N, rule=None):
    key = (model, dim, N, rule)
    if key not in _censuses:
        _censuses[key] = run_census(model, dim, N, rule, threads=THREADS)
    return _censuses[key]


def report(tag, ok, detail, t0):
    line = f"{tag} {'PASS' if ok else 'FAIL'}  {detail}  ({time.perf_counter() - t0:.1f} s)"
    RESULTS.append(line)
    assert ok, line


def test_ac01_one_dimensional_count():
    t0 = time.perf_counter()
    bad = [N for N in range(2, 17) if census("srw", 1, N).num_matrices != 2 ** (N - 1)]
    report("AC1", not bad and time.perf_counter() - t0 < 60,
           f"W(N) = 2^(N-1) on Z^1 for N=2..16, mismatches={bad}", t0)


SIZES = [(2, N) for N in range(1, 11)] + [(3, N) for N in range(1, 7)]


def test_ac02_census_identities():
    t0 = time.perf_counter()
    bad = []
    for dim, N in SIZES:
        c = census("srw", dim, N)
        if sum(c.degeneracies()) != (2 * dim) ** N or c.total_walks != (2 * dim) ** N:
            bad.append((dim, N, "sum"))
        if inverse_degeneracy_sum(c) != Fraction(c.num_matrices):
            bad.append((dim, N, "inverse"))
    report("AC2", not bad and time.perf_counter() - t0 < 600,
           f"sum deg = (2n)^N and sum 1/deg = W(N) exactly, n=2 N<=10, n=3 N<=6; violations={bad}", t0)


def test_ac03_degeneracy_bound():
    t0 = time.perf_counter()
    bad = []
    n_classes = 0
    for dim, N in SIZES:
        for key, rec in census("srw", dim, N).classes.items():
            n_classes += 1
            if rec.degeneracy > (2 * dim) ** rec.range_of_representative:
                bad.append((dim, N, key.hex()))
    report("AC3", not bad, f"deg <= (2n)^R on {n_classes} classes; violations={len(bad)}", t0)


def test_ac04_preimage_oracle():
    t0 = time.perf_counter()
    bad = []
    n_classes = 0
    for N in range(1, 8):
        buckets = walk_buckets("srw", 2, N)
        if set(buckets) != set(census("srw", 2, N).classes):
            bad.append((N, "keys"))
        for key, walks in buckets.items():
            n_classes += 1
            got = enumerate_preimages(ContactMatrix(N + 1, key), 2)
            if sorted(w.points for w in got) != sorted(w.points for w in walks):
                bad.append((N, key.hex()))
    report("AC4", not bad, f"preimages equal census buckets as walk sets, n=2 N<=7, {n_classes} classes; "
           f"mismatches={bad}", t0)


def test_ac05_entropy_identities():
    t0 = time.perf_counter()
    bad = []
    runs = [("srw", d, N, None) for d, N in SIZES] + [("saw", 2, N, "adjacency") for N in range(1, 11)]
    for model, dim, N, rule in runs:
        r = entropy_report(census(model, dim, N, rule))
        if not math.isclose(r.S_C + r.S_hat_C, r.S, rel_tol=1e-12):
            bad.append((model, dim, N, "decomposition"))
        if not math.isclose(r.S_C, r.S - r.mean_log_deg, rel_tol=1e-12, abs_tol=1e-12 * r.S):
            bad.append((model, dim, N, "jensen equality"))
        if not (r.jensen_lower <= r.delta + 1e-12 and r.delta <= r.gamma + 1e-12 and r.gamma <= 1 + 1e-12):
            bad.append((model, dim, N, "chain"))
    r2 = entropy_report(census("srw", 2, 2))
    spot = abs(r2.delta - 0.20282) <= 1e-4 and r2.gamma == 0.25
    report("AC5", not bad and spot, f"identities to 1e-12 rel and chain on {len(runs)} censuses, violations={bad}; "
           f"n=2 N=2 delta={r2.delta:.6f} gamma={r2.gamma!r}", t0)


def test_ac06_supermultiplicativity():
    t0 = time.perf_counter()
    table = {N: census("srw", 2, N).num_matrices for N in range(1, 12)}
    v = check_supermultiplicativity(table, 2)
    gam = [math.log(table[N]) / (N * math.log(4)) for N in range(1, 11)]
    mono_bad = [N + 1 for N in range(9) if gam[N + 1] < gam[N]]
    report("AC6", not v.supermultiplicativity and not mono_bad,
           f"W(N1+N2) >= W(N1)W(N2) for N1+N2<=11 on Z^2 (W(11)={table[11]}), violations={v.supermultiplicativity}; "
           f"gamma monotone N=1..10, violations={mono_bad}", t0)


def test_ac07_transform_invariance():
    t0 = time.perf_counter()
    r2 = transform_check_srw(2, 200, 10_000, seed=2024)
    r3 = transform_check_srw(3, 200, 10_000, seed=2024)
    rk = kesten_check(2, 12)
    ok = r2["ok"] and r3["ok"] and rk["ok"] and rk["counts"]["rotations"] > 0 and time.perf_counter() - t0 < 300
    report("AC7", ok, f"n=2 {r2['counts']}; n=3 {r3['counts']}; SAW b=3 N<=12 {rk['counts']}", t0)


def test_ac08_certificate_soundness():
    t0 = time.perf_counter()
    unsound = []
    dup = []
    n = 0
    for N in range(1, 9):
        c = census("srw", 2, N)
        for w in enumerate_walks("srw", 2, N):
            n += 1
            cert = degeneracy_certificate(w)
            if cert.bound > c.degeneracy_of(w):
                unsound.append(w.to_tokens())
            variants = certificate_variants(cert)
            if len(set(variants)) != cert.bound:
                dup.append(w.to_tokens())
    report("AC8", not unsound and not dup,
           f"{n} walks n=2 N<=8: bound>deg in {len(unsound)}, non-distinct variants in {len(dup)}", t0)


def test_ac09_mean_range():
    t0 = time.perf_counter()
    N = 100_000
    est = estimate_mean_range(2, N, 2000, seed=9, n_jobs=THREADS)
    ref = math.pi * N / math.log(8 * N)
    rel = est.mean / ref - 1
    report("AC9", abs(rel) <= 0.15 and time.perf_counter() - t0 < 600,
           f"E(R_N)={est.mean:.1f}+-{est.stderr:.1f} vs pi N/ln 8N={ref:.1f} ({rel:+.1%})", t0)


def test_ac10_pattern_densities():
    t0 = time.perf_counter()
    p = estimate_pattern_density(3, 100_000, "p", 1000, seed=7, n_jobs=THREADS)
    q = estimate_pattern_density(2, 1_000_000, "q", 200, seed=7, n_jobs=THREADS)
    pn, qn = p.metadata["normalized"], q.metadata["normalized"]
    ok_p = abs(pn / M1_P - 1) <= 0.30
    ok_q = 0.5 <= qn / M1_Q <= 2.0
    report("AC10", ok_p and ok_q and time.perf_counter() - t0 < 1800,
           f"P/N={pn:.3e} (ref {M1_P:.2e}, {pn / M1_P - 1:+.1%}); "
           f"Q normalized={qn:.3e} (ref {M1_Q:.2e}, ratio {qn / M1_Q:.2f})", t0)


def test_ac11_return_probabilities():
    t0 = time.perf_counter()
    parts = []
    ok = True
    for steps, exact in ((2, 1 / 4), (4, 36 / 256)):
        est = estimate_return_probability(2, steps, 1_000_000, seed=11)
        z = (est.mean - exact) / est.stderr
        ok &= abs(z) <= 4
        parts.append(f"steps={steps}: {est.mean:.5f} vs {exact:.5f} (z={z:+.2f})")
    report("AC11", ok, "; ".join(parts), t0)


def _write_gamma(path, rows):
    with open(path, "w") as fh:
        fh.write("N,W,total_walks,S,S_C,delta,gamma\n")
        for N, r in rows:
            fh.write(f"{N},{r.num_matrices},{r.total_walks},{r.S!r},{r.S_C!r},{r.delta!r},{r.gamma!r}\n")


def test_ac12_saw_lossy():
    t0 = time.perf_counter()
    bad = []
    saw_rows = []
    for N in range(1, 13):
        r = entropy_report(census("saw", 2, N, "adjacency"))
        saw_rows.append((N, r))
        if 6 <= N and not (r.num_matrices < r.total_walks and r.gamma < 1):
            bad.append(N)
    srw_rows = [(N, entropy_report(census("srw", 2, N))) for N in range(1, 12)]
    ARTIFACTS.mkdir(exist_ok=True)
    _write_gamma(ARTIFACTS / "gamma_saw_adjacency_z2.csv", saw_rows)
    _write_gamma(ARTIFACTS / "gamma_srw_coincidence_z2.csv", srw_rows)
    trend = ", ".join(f"{N}:{r.gamma:.3f}" for N, r in saw_rows[5:])
    report("AC12", not bad and count_walks("saw", 2, 12) == saw_rows[-1][1].total_walks,
           f"SAW adjacency Z^2 N=6..12: W<|Omega| and gamma<1, violations={bad}; gamma {trend}; "
           f"tables in artifacts/", t0)
