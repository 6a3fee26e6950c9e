"""Contact matrices of lattice walks.

The upper triangle of an ``M x M`` contact matrix (``M = N + 1`` positions)
is linearised row by row,

    L(i, j) = i*M - i*(i+1)/2 + (j - i - 1),    i < j,

and packed most-significant-bit first into ``ceil(M(M-1)/2 / 8)`` bytes.
That byte string is the canonical key: two matrices with the same number of
positions are equal iff their keys are equal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .lattice import Walk, WalkModel

COINCIDENCE = "coincidence"
ADJACENCY = "adjacency"
THRESHOLD = "threshold"


@dataclass(frozen=True)
class ContactRule:
    """When positions i and j count as "in contact".

    coincidence: same site, i != j.
    adjacency: Euclidean distance exactly 1 and |i - j| > 1.
    threshold: Euclidean distance <= ``a``, i != j.
    """

    kind: str = COINCIDENCE
    a: float = 0.0

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in (COINCIDENCE, ADJACENCY, THRESHOLD):
            raise ValueError(f"unknown contact rule {self.kind!r}")
        if self.a < 0:
            raise ValueError("threshold distance must be non-negative")
        object.__setattr__(self, "kind", kind)
        if kind != THRESHOLD:
            object.__setattr__(self, "a", 0.0)

    @classmethod
    def coincidence(cls) -> "ContactRule":
        return cls(COINCIDENCE)

    @classmethod
    def adjacency(cls) -> "ContactRule":
        return cls(ADJACENCY)

    @classmethod
    def threshold(cls, a: float) -> "ContactRule":
        return cls(THRESHOLD, float(a))

    @classmethod
    def parse(cls, value: "ContactRule | str") -> "ContactRule":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text.startswith(THRESHOLD):
            _, _, a = text.partition(":")
            if not a:
                raise ValueError("threshold rule needs a distance, e.g. 'threshold:1.5'")
            return cls.threshold(float(a))
        return cls(text)

    def __str__(self) -> str:
        if self.kind == THRESHOLD:
            return f"{THRESHOLD}:{self.a:g}"
        return self.kind

    @property
    def min_gap(self) -> int:
        """Smallest |i - j| that may carry a contact."""
        return 2 if self.kind == ADJACENCY else 1

    def offsets(self, dimension: int) -> list[tuple[int, ...]]:
        """Lattice displacement vectors that make two positions a contact."""
        if self.kind == COINCIDENCE:
            return [(0,) * dimension]
        if self.kind == ADJACENCY:
            out = []
            for axis in range(dimension):
                for s in (1, -1):
                    v = [0] * dimension
                    v[axis] = s
                    out.append(tuple(v))
            return out
        r = int(math.floor(self.a))
        a2 = self.a * self.a
        return [v for v in itertools.product(range(-r, r + 1), repeat=dimension)
                if sum(c * c for c in v) <= a2 + 1e-12]


def rule_is_conventional(model, rule: ContactRule) -> bool:
    """Coincidence goes with SRW studies, adjacency with SAW/BAW studies."""
    model = WalkModel.parse(model)
    if model is WalkModel.SRW:
        return rule.kind == COINCIDENCE
    return rule.kind == ADJACENCY


def n_pair_bits(n_positions: int) -> int:
    return n_positions * (n_positions - 1) // 2


def key_length(n_positions: int) -> int:
    return (n_pair_bits(n_positions) + 7) // 8


def linear_index(i: int, j: int, n_positions: int) -> int:
    if not 0 <= i < j < n_positions:
        raise IndexError(f"pair ({i}, {j}) outside the upper triangle of size {n_positions}")
    return i * n_positions - i * (i + 1) // 2 + (j - i - 1)


def pack_pairs(pairs: Iterable[tuple[int, int]], n_positions: int) -> bytes:
    nbytes = key_length(n_positions)
    bits = np.zeros(nbytes * 8, dtype=np.uint8)
    for i, j in pairs:
        bits[linear_index(i, j, n_positions)] = 1
    return np.packbits(bits).tobytes()


def unpack_pairs(key: bytes, n_positions: int) -> list[tuple[int, int]]:
    if len(key) != key_length(n_positions):
        raise ValueError(f"key has {len(key)} bytes, expected {key_length(n_positions)}")
    bits = np.unpackbits(np.frombuffer(key, dtype=np.uint8))
    total = n_pair_bits(n_positions)
    if bits[total:].any():
        raise ValueError("padding bits of the key are not zero")
    set_bits = set(np.flatnonzero(bits[:total]).tolist())
    out = []
    L = 0
    for i in range(n_positions):
        for j in range(i + 1, n_positions):
            if L in set_bits:
                out.append((i, j))
            L += 1
    return out


@dataclass(frozen=True)
class ContactMatrix:
    """Upper-triangular boolean contact matrix stored as its canonical key."""

    n_positions: int
    key: bytes
    rule: ContactRule = ContactRule()

    def __post_init__(self):
        if self.n_positions < 1:
            raise ValueError("a contact matrix covers at least one position")
        if len(self.key) != key_length(self.n_positions):
            raise ValueError("key length does not match n_positions")

    @classmethod
    def from_pairs(cls, n_positions: int, pairs: Iterable[tuple[int, int]], rule=None) -> "ContactMatrix":
        rule = ContactRule.parse(rule) if rule is not None else ContactRule()
        norm = [(min(i, j), max(i, j)) for i, j in pairs]
        return cls(n_positions, pack_pairs(norm, n_positions), rule)

    @classmethod
    def zeros(cls, n_positions: int, rule=None) -> "ContactMatrix":
        return cls.from_pairs(n_positions, (), rule)

    @property
    def n_steps(self) -> int:
        return self.n_positions - 1

    def pairs(self) -> list[tuple[int, int]]:
        return unpack_pairs(self.key, self.n_positions)

    def __getitem__(self, ij) -> bool:
        i, j = ij
        if i == j:
            return False
        if i > j:
            i, j = j, i
        L = linear_index(i, j, self.n_positions)
        return bool(self.key[L // 8] >> (7 - L % 8) & 1)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_positions, self.n_positions), dtype=bool)
        for i, j in self.pairs():
            out[i, j] = out[j, i] = True
        return out

    def to_text(self) -> str:
        return f"{self.n_positions}:{self.key.hex()}"

    @classmethod
    def from_text(cls, text: str, rule=None) -> "ContactMatrix":
        head, sep, hexpart = text.strip().partition(":")
        if not sep:
            raise ValueError(f"contact matrix text must look like 'M:hex', got {text!r}")
        rule = ContactRule.parse(rule) if rule is not None else ContactRule()
        return cls(int(head), bytes.fromhex(hexpart), rule)

    def __str__(self) -> str:
        return self.to_text()


def contact_pairs(points: Sequence[Sequence[int]], rule: ContactRule) -> list[tuple[int, int]]:
    """All pairs ``i < j`` in contact under ``rule``, sorted."""
    pts = [tuple(p) for p in points]
    if not pts:
        return []
    offsets = rule.offsets(len(pts[0]))
    gap = rule.min_gap
    where: dict[tuple, list[int]] = {}
    out = []
    for k, p in enumerate(pts):
        for v in offsets:
            q = tuple(a + b for a, b in zip(p, v))
            for i in where.get(q, ()):
                if k - i >= gap:
                    out.append((i, k))
        where.setdefault(p, []).append(k)
    out.sort()
    return out


def build_contact_matrix(w: Walk, rule=None) -> ContactMatrix:
    """Contact matrix of ``w`` under ``rule`` (coincidence by default)."""
    rule = ContactRule.parse(rule) if rule is not None else ContactRule()
    return ContactMatrix.from_pairs(len(w.points), contact_pairs(w.points, rule), rule)


def canonical_key(C: ContactMatrix) -> bytes:
    return C.key


def range_and_intersections(w: Walk) -> tuple[int, int]:
    """(R, I): number of distinct visited sites and ``N + 1 - R``."""
    R = len(set(w.points))
    return R, len(w.points) - R
