"""Information-theoretic summaries of a contact-matrix census (in nats)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .census import CensusResult, run_census
from .lattice import WalkModel


def shannon(dist: Iterable[float], *, atol: float = 1e-9) -> float:
    """-sum p ln p with 0 ln 0 = 0."""
    p = np.asarray(list(dist), dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("expected a non-empty probability vector")
    if (p < 0).any():
        raise ValueError("probabilities must be non-negative")
    if abs(p.sum() - 1.0) > atol:
        raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
    nz = p[p > 0]
    return float(-math.fsum(nz * np.log(nz)))


@dataclass(frozen=True)
class EntropyReport:
    N: int
    total_walks: int
    num_matrices: int
    S: float
    S_C: float
    S_hat_C: float
    S_hat_C_direct: float
    S_hat_C_discrepancy: float
    S_bar_C: float
    mean_log_deg: float
    delta: float | None
    gamma: float | None
    jensen_lower: float | None
    degenerate: bool = False
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def entropy_report(census: CensusResult, provenance: Mapping | None = None) -> EntropyReport:
    """Fine and coarse-grained entropies of the uniform measure on a census.

    ``S_hat_C`` is ``S - S_C``; ``S_hat_C_direct`` evaluates the average
    conditional entropy class by class, and the discrepancy between the two is
    reported. A census with a single walk (N = 0) is degenerate: S = 0 and
    the ratios are ``None``.
    """
    T = census.total_walks
    degs = census.degeneracies()
    if sum(degs) != T:
        raise ValueError("census degeneracies do not sum to total_walks")
    S = math.log(T)
    S_C = shannon(d / T for d in degs)
    # uniform conditional measure on each class: its entropy is ln deg
    S_hat_direct = math.fsum((d / T) * math.log(d) for d in degs)
    mean_log_deg = math.fsum(d * math.log(d) for d in degs) / T
    S_hat = S - S_C
    S_bar = math.log(census.num_matrices)
    degenerate = T <= 1
    if degenerate:
        delta = gamma = jensen = None
    else:
        delta = S_C / S
        gamma = S_bar / S
        jensen = 1.0 - mean_log_deg / S
    return EntropyReport(
        N=census.N,
        total_walks=T,
        num_matrices=census.num_matrices,
        S=S,
        S_C=S_C,
        S_hat_C=S_hat,
        S_hat_C_direct=S_hat_direct,
        S_hat_C_discrepancy=abs(S_hat - S_hat_direct),
        S_bar_C=S_bar,
        mean_log_deg=mean_log_deg,
        delta=delta,
        gamma=gamma,
        jensen_lower=jensen,
        degenerate=degenerate,
        provenance=dict(provenance or {}),
    )


@dataclass
class Violations:
    supermultiplicativity: list[tuple[int, int]] = field(default_factory=list)
    monotonicity: list[int] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.supermultiplicativity or self.monotonicity)


def check_supermultiplicativity(W_table: Mapping[int, int], dimension: int) -> Violations:
    """Find pairs with ``W(N1+N2) < W(N1) W(N2)`` and N with ``gamma_(N+1) < gamma_N``.

    ``gamma_N = ln W(N) / (N ln 2n)`` for SRW. Pairs are reported with
    ``N1 <= N2`` and only where ``N1 + N2`` is in the table.
    """
    table = {int(k): int(v) for k, v in W_table.items()}
    out = Violations()
    Ns = sorted(n for n in table if n >= 1)
    for i, n1 in enumerate(Ns):
        for n2 in Ns[i:]:
            if n1 + n2 in table and table[n1 + n2] < table[n1] * table[n2]:
                out.supermultiplicativity.append((n1, n2))
    log2n = math.log(2 * dimension)
    gamma = {n: math.log(table[n]) / (n * log2n) for n in Ns}
    for n in Ns:
        # ratio of integer logs: allow float rounding at equality
        if n + 1 in gamma and gamma[n + 1] < gamma[n] - 1e-12:
            out.monotonicity.append(n)
    return out


@dataclass(frozen=True)
class GammaRow:
    N: int
    W: int
    S: float
    S_C: float
    delta: float | None
    gamma: float | None


def gamma_table(model, dimension: int, max_length: int, rule=None, *, min_length: int = 1,
                threads: int = 1) -> list[GammaRow]:
    rows = []
    for N in range(min_length, max_length + 1):
        rep = entropy_report(run_census(model, dimension, N, rule, threads=threads))
        rows.append(GammaRow(N, rep.num_matrices, rep.S, rep.S_C, rep.delta, rep.gamma))
    return rows


def srw_W_table(dimension: int, max_length: int, *, threads: int = 1) -> dict[int, int]:
    return {N: run_census(WalkModel.SRW, dimension, N, threads=threads).num_matrices
            for N in range(0, max_length + 1)}
