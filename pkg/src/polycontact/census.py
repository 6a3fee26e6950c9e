"""Exhaustive partition of walk space into contact-matrix classes."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .contact import (
    COINCIDENCE,
    ContactMatrix,
    ContactRule,
    build_contact_matrix,
    key_length,
    linear_index,
    rule_is_conventional,
)
from .lattice import (
    DEFAULT_MAX_WALKS,
    EnumerationBudgetError,
    Walk,
    WalkModel,
    enumerate_walks,
    neighbors,
    origin,
    step_prefixes,
    validate_walk,
)
from .schemas import SCHEMA_VERSION


@dataclass
class ClassRecord:
    degeneracy: int
    representative_walk: Walk | None
    range_of_representative: int
    min_intersections: int
    max_intersections: int


@dataclass
class CensusResult:
    model: WalkModel
    dimension: int
    N: int
    rule: ContactRule
    total_walks: int
    classes: dict[bytes, ClassRecord] = field(default_factory=dict)

    @property
    def num_matrices(self) -> int:
        return len(self.classes)

    @property
    def n_positions(self) -> int:
        return self.N + 1

    def degeneracies(self) -> list[int]:
        return [c.degeneracy for c in self.classes.values()]

    def matrix(self, key: bytes) -> ContactMatrix:
        return ContactMatrix(self.n_positions, key, self.rule)

    def degeneracy_of(self, w: Walk) -> int:
        """deg C(w); 0 if the walk's matrix is not in the census."""
        rec = self.classes.get(build_contact_matrix(w, self.rule).key)
        return rec.degeneracy if rec else 0

    def sorted_keys(self) -> list[bytes]:
        return sorted(self.classes)

    def to_dict(self, config: dict | None = None) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "kind": "census",
            "model": self.model.value,
            "dim": self.dimension,
            "N": self.N,
            "rule": str(self.rule),
            "conventional_rule": rule_is_conventional(self.model, self.rule),
            "total_walks": self.total_walks,
            "num_matrices": self.num_matrices,
            "classes": [
                {
                    "key_hex": k.hex(),
                    "degeneracy": self.classes[k].degeneracy,
                    "range": self.classes[k].range_of_representative,
                }
                for k in self.sorted_keys()
            ],
        }
        if config is not None:
            doc["config"] = config
        return doc

    def to_json(self, config: dict | None = None) -> str:
        return json.dumps(self.to_dict(config), indent=1, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key_hex", "degeneracy", "range"])
        for k in self.sorted_keys():
            rec = self.classes[k]
            writer.writerow([k.hex(), rec.degeneracy, rec.range_of_representative])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, doc: dict) -> "CensusResult":
        N = int(doc["N"])
        classes = {}
        for row in doc["classes"]:
            R = int(row["range"])
            I = N + 1 - R
            classes[bytes.fromhex(row["key_hex"])] = ClassRecord(int(row["degeneracy"]), None, R, I, I)
        res = cls(
            WalkModel.parse(doc["model"]),
            int(doc["dim"]),
            N,
            ContactRule.parse(doc["rule"]),
            int(doc["total_walks"]),
            classes,
        )
        if res.num_matrices != int(doc["num_matrices"]):
            raise ValueError("num_matrices disagrees with the class list")
        return res

    @classmethod
    def from_json(cls, text: str) -> "CensusResult":
        return cls.from_dict(json.loads(text))


# -- enumeration engine -----------------------------------------------------
#
# Sites are packed into integers in balanced base B, so that neighbour lookups
# are integer additions. B is wide enough that no walk of N steps (plus the
# contact radius) can alias.


def _site_codec(dimension: int, N: int, radius: int):
    B = 2 * (N + radius) + 3
    powers = [B**a for a in range(dimension)]

    def encode(v):
        return sum(c * p for c, p in zip(v, powers))

    return encode, powers


def _subtree(model: WalkModel, dimension: int, N: int, rule: ContactRule,
             prefix: Sequence[int], max_walks: int) -> dict[int, list]:
    """Census of the walks below ``prefix``; values are ``[deg, steps, R, Imin, Imax]``."""
    radius = int(math.ceil(rule.a)) + 1
    encode, powers = _site_codec(dimension, N, radius)
    deltas = []
    for p in powers:
        deltas += [p, -p]
    offs = [encode(v) for v in rule.offsets(dimension)]
    gap = rule.min_gap
    M = N + 1
    top = 8 * key_length(M) - 1
    bit = [[0] * M for _ in range(M)]
    for i in range(M):
        for j in range(i + 1, M):
            bit[i][j] = 1 << (top - linear_index(i, j, M))

    saw = model is WalkModel.SAW
    baw = model is WalkModel.BAW
    n_dir = 2 * dimension
    where: dict[int, list[int]] = {0: [0]}
    bonds: set = set()
    steps: list[int] = []
    classes: dict[int, list] = {}
    counter = [0]

    def contacts(q, k):
        add = 0
        for o in offs:
            lst = where.get(q + o)
            if lst:
                for i in lst:
                    if k - i >= gap:
                        add |= bit[i][k]
        return add

    def place(q, p, d):
        lst = where.get(q)
        if lst is None:
            where[q] = [len(steps) + 1]
        else:
            lst.append(len(steps) + 1)
        steps.append(d)
        if baw:
            bonds.add((p, q) if p < q else (q, p))

    def unplace(q, p):
        lst = where[q]
        lst.pop()
        if not lst:
            del where[q]
        steps.pop()
        if baw:
            bonds.discard((p, q) if p < q else (q, p))

    def rec(k, p, key):
        last = k == N
        for d in range(n_dir):
            q = p + deltas[d]
            if saw and q in where:
                continue
            if baw and ((p, q) if p < q else (q, p)) in bonds:
                continue
            nk = key | contacts(q, k)
            if last:
                if saw or baw:
                    counter[0] += 1
                    if counter[0] > max_walks:
                        raise EnumerationBudgetError(f"more than {max_walks} walks")
                R = len(where) + (0 if q in where else 1)
                I = M - R
                rec_ = classes.get(nk)
                if rec_ is None:
                    classes[nk] = [1, tuple(steps) + (d,), R, I, I]
                else:
                    rec_[0] += 1
                    if I < rec_[3]:
                        rec_[3] = I
                    elif I > rec_[4]:
                        rec_[4] = I
            else:
                place(q, p, d)
                rec(k + 1, q, nk)
                unplace(q, p)

    # walk down the prefix
    p, key = 0, 0
    for d in prefix:
        if d >= n_dir:
            return {}
        q = p + deltas[d]
        if saw and q in where:
            return {}
        if baw and ((p, q) if p < q else (q, p)) in bonds:
            return {}
        key |= contacts(q, len(steps) + 1)
        place(q, p, d)
        p = q
    k = len(steps) + 1
    if k > N:
        R = len(where)
        classes[key] = [1, tuple(steps), R, M - R, M - R]
    else:
        rec(k, p, key)
    return classes


def _subtree_job(args):
    return _subtree(*args)


def _merge(parts: Sequence[dict[int, list]]) -> dict[int, list]:
    out: dict[int, list] = {}
    for part in parts:
        for k, v in part.items():
            cur = out.get(k)
            if cur is None:
                out[k] = list(v)
            else:
                cur[0] += v[0]
                cur[3] = min(cur[3], v[3])
                cur[4] = max(cur[4], v[4])
    return out


def run_census(model, dimension: int, N: int, rule=None, *, threads: int = 1,
               max_walks: int = DEFAULT_MAX_WALKS) -> CensusResult:
    """Enumerate every walk and group the walks by contact matrix.

    With ``threads > 1`` the walk tree is split by step prefixes over worker
    processes; the result does not depend on the number of workers.
    """
    model = WalkModel.parse(model)
    rule = ContactRule.parse(rule) if rule is not None else (
        ContactRule.coincidence() if model is WalkModel.SRW else ContactRule.adjacency())
    if N < 0:
        raise ValueError("N must be >= 0")
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if model is WalkModel.SRW and (2 * dimension) ** N > max_walks:
        raise EnumerationBudgetError(f"(2n)^N = {(2 * dimension) ** N} exceeds the budget of {max_walks}")

    if threads == 1 or N < 2:
        raw = _subtree(model, dimension, N, rule, (), max_walks)
    else:
        depth = 1
        while (2 * dimension) ** depth < 8 * threads and depth < N - 1:
            depth += 1
        prefixes = step_prefixes(model, dimension, depth, N)
        jobs = [(model, dimension, N, rule, pre, max_walks) for pre in prefixes]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_subtree_job, jobs))
        raw = _merge(parts)

    nbytes = key_length(N + 1)
    classes = {}
    total = 0
    for k, (deg, steps, R, imin, imax) in raw.items():
        total += deg
        classes[k.to_bytes(nbytes, "big")] = ClassRecord(
            deg, Walk.from_steps(steps, dimension, model), R, imin, imax)
    if total > max_walks:
        raise EnumerationBudgetError(f"{total} walks exceed the budget of {max_walks}")
    return CensusResult(model, dimension, N, rule, total, classes)


def census_from_walks(walks: Sequence[Walk], rule=None) -> CensusResult:
    """Group an explicit ensemble of equal-length walks, each counted once."""
    if not walks:
        raise ValueError("no walks given")
    w0 = walks[0]
    rule = ContactRule.parse(rule) if rule is not None else ContactRule()
    classes: dict[bytes, ClassRecord] = {}
    for w in walks:
        if (w.n_steps, w.dimension) != (w0.n_steps, w0.dimension):
            raise ValueError("walks differ in length or dimension")
        key = build_contact_matrix(w, rule).key
        R = len(set(w.points))
        I = len(w.points) - R
        rec = classes.get(key)
        if rec is None:
            classes[key] = ClassRecord(1, w, R, I, I)
        else:
            rec.degeneracy += 1
            rec.min_intersections = min(rec.min_intersections, I)
            rec.max_intersections = max(rec.max_intersections, I)
    return CensusResult(w0.model, w0.dimension, w0.n_steps, rule, len(walks), classes)


# -- preimages --------------------------------------------------------------


def enumerate_preimages(C: ContactMatrix, dimension: int, model="srw", rule=None, *,
                        max_walks: int = DEFAULT_MAX_WALKS) -> list[Walk]:
    """All walks of ``model`` whose contact matrix equals ``C``.

    For the coincidence rule the walks are rebuilt step by step: position k
    is forced onto the site of any earlier i with ``C[i, k] = 1``, and
    otherwise branches over the fresh neighbours of position k-1. At most
    ``2n`` choices arise per fresh step, so the output has at most
    ``(2n)^(R-1)`` walks. Other rules fall back to filtered enumeration.
    An infeasible matrix gives an empty list.
    """
    model = WalkModel.parse(model)
    rule = ContactRule.parse(rule) if rule is not None else C.rule
    if rule != C.rule:
        raise ValueError(f"matrix was built under {C.rule}, not {rule}")
    N = C.n_steps
    if rule.kind != COINCIDENCE:
        return [w for w in enumerate_walks(model, dimension, N, max_walks=max_walks)
                if build_contact_matrix(w, rule).key == C.key]

    earlier: list[list[int]] = [[] for _ in range(N + 1)]
    for i, j in C.pairs():
        earlier[j].append(i)
    if any(k - 1 in earlier[k] for k in range(1, N + 1)):
        return []

    pts = [origin(dimension)]
    where: dict[tuple, list[int]] = {pts[0]: [0]}
    found: list[Walk] = []

    def rec(k):
        if k > N:
            w = Walk(tuple(pts), WalkModel.SRW, dimension)
            if build_contact_matrix(w, rule).key == C.key:
                if model is WalkModel.SRW:
                    found.append(w)
                else:
                    w = w.with_model(model)
                    if validate_walk(w):
                        found.append(w)
            return
        prev = pts[-1]
        if earlier[k]:
            q = pts[earlier[k][0]]
            if q not in neighbors(prev) or where.get(q) != earlier[k]:
                return
            candidates = [q]
        else:
            candidates = [q for q in neighbors(prev) if q not in where]
        for q in candidates:
            pts.append(q)
            where.setdefault(q, []).append(k)
            rec(k + 1)
            lst = where[q]
            lst.pop()
            if not lst:
                del where[q]
            pts.pop()

    rec(1)
    return found


# -- interval filter --------------------------------------------------------


@dataclass(frozen=True)
class FilterSummary:
    """Walks and matrices with intersection fraction ``I_N / N`` inside J."""

    interval: tuple[Fraction, Fraction]
    n_walks: int
    n_matrices: int
    mean_degeneracy: float
    log_mean_degeneracy_rate: float | None


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def class_filter(census: CensusResult, J: tuple) -> FilterSummary:
    """Restrict a coincidence census to classes with ``I_N / N`` in ``[k0, k1]``.

    Returns the number of walks ``|Lambda_N(J)|``, the number of matrices
    ``W(N)_J``, their ratio (the mean degeneracy) and ``ln(mean) / N``.
    """
    if census.rule.kind != COINCIDENCE:
        raise ValueError("interval filtering needs a coincidence-rule census")
    k0, k1 = (_as_fraction(x) for x in J)
    if not 0 <= k0 <= k1 <= 1:
        raise ValueError("J must be a closed sub-interval of [0, 1]")
    N = census.N
    walks = mats = 0
    for rec in census.classes.values():
        frac = Fraction(rec.min_intersections, N) if N else Fraction(0)
        if k0 <= frac <= k1:
            walks += rec.degeneracy
            mats += 1
    if mats == 0:
        return FilterSummary((k0, k1), 0, 0, 0.0, None)
    mean = walks / mats
    rate = math.log(mean) / N if N else None
    return FilterSummary((k0, k1), walks, mats, mean, rate)
