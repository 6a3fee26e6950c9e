"""Support patterns, contact-preserving rewrites and degeneracy certificates.

Three rewrites leave a walk's contact matrix unchanged:

* site swap: when a pattern such as Q (Z^2) or P (Z^3) appears at ``x``,
  the site ``x + swap_from`` is a dead end reached only from one neighbour,
  and every visit to it can be moved to ``x + swap_to`` (coincidence rule);
* free-4-loop reversal: a unit square whose three inner sites are visited
  only by the loop can be traversed the other way round (coincidence rule);
* cube rotation: inside an isolated copy of a Kesten path, the interior of
  the cube can be rotated about its diagonal (adjacency rule, SAW/BAW).

Site-disjoint rewrites commute, so ``m`` of them certify at least ``2^m``
(or ``n^m`` for rotations) walks with the same matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .contact import ADJACENCY, ContactRule
from .lattice import Cube, Point, Walk, WalkModel, add, neighbors, origin, sub, validate_walk


class StaleOccurrenceError(ValueError):
    """The occurrence was detected on a different walk."""


class OriginSwapError(ValueError):
    """A site swap would move the starting point of the walk."""


class MalformedPatternError(ValueError):
    pass


@dataclass(frozen=True)
class PatternSpec:
    visited: tuple[Point, ...]
    unvisited: tuple[Point, ...]
    swap_from: Point | None = None
    swap_to: Point | None = None
    name: str = ""

    def __post_init__(self):
        v = tuple(tuple(p) for p in self.visited)
        u = tuple(tuple(p) for p in self.unvisited)
        if set(v) & set(u):
            raise MalformedPatternError("visited and unvisited offsets overlap")
        dims = {len(p) for p in v + u}
        if len(dims) > 1:
            raise MalformedPatternError("offsets of mixed dimension")
        object.__setattr__(self, "visited", v)
        object.__setattr__(self, "unvisited", u)
        if (self.swap_from is None) != (self.swap_to is None):
            raise MalformedPatternError("swap_from and swap_to go together")
        if self.swap_from is not None:
            object.__setattr__(self, "swap_from", tuple(self.swap_from))
            object.__setattr__(self, "swap_to", tuple(self.swap_to))
            if self.swap_from not in v or self.swap_to not in u:
                raise MalformedPatternError("swap must move a visited offset onto an unvisited one")

    @property
    def dimension(self) -> int:
        return len((self.visited + self.unvisited)[0])

    @property
    def can_swap(self) -> bool:
        return self.swap_from is not None

    @property
    def offsets(self) -> tuple[Point, ...]:
        return self.visited + self.unvisited

    def reach(self) -> int:
        return max((abs(c) for p in self.offsets for c in p), default=0)


PATTERN_Q = PatternSpec(
    visited=((0, 0), (-1, 0)),
    unvisited=((1, 0), (0, -1), (0, 1), (-1, 1)),
    swap_from=(0, 0),
    swap_to=(-1, 1),
    name="q",
)

PATTERN_P = PatternSpec(
    visited=((0, 0, 0), (-1, 0, 0)),
    unvisited=((1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1), (-1, 1, 0)),
    swap_from=(0, 0, 0),
    swap_to=(-1, 1, 0),
    name="p",
)

BUILTIN_PATTERNS = {"q": PATTERN_Q, "p": PATTERN_P}


def default_swap_pattern(dimension: int) -> PatternSpec | None:
    return {2: PATTERN_Q, 3: PATTERN_P}.get(dimension)


# -- array kernels ----------------------------------------------------------


class SiteIndex:
    """Sorted integer codes of a walk's support for vectorised membership tests.

    Codes are exact for every point within ``pad`` of the walk's bounding box.
    """

    def __init__(self, points: np.ndarray, pad: int = 2):
        points = np.asarray(points, dtype=np.int64)
        self.lo = points.min(axis=0) - pad
        ext = points.max(axis=0) - self.lo + pad + 1
        self.mult = np.concatenate(([1], np.cumprod(ext[:-1]))).astype(np.int64)
        self.codes = self.encode(points)
        self.support, self.inverse, self.counts = np.unique(
            self.codes, return_inverse=True, return_counts=True)

    def encode(self, pts: np.ndarray) -> np.ndarray:
        return ((np.asarray(pts, dtype=np.int64) - self.lo) * self.mult).sum(axis=-1)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        c = self.encode(pts)
        i = np.searchsorted(self.support, c)
        i[i >= len(self.support)] = 0
        return self.support[i] == c

    @property
    def range(self) -> int:
        return len(self.support)


def _lexsorted(points: np.ndarray) -> np.ndarray:
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def pattern_centers(points: np.ndarray, pattern: PatternSpec, index: SiteIndex | None = None) -> np.ndarray:
    """Centers x at which ``pattern`` appears in the support, lexicographically sorted."""
    points = np.asarray(points, dtype=np.int64)
    if not pattern.visited:
        raise MalformedPatternError("a pattern needs at least one visited offset")
    if points.shape[1] != pattern.dimension:
        raise ValueError(f"pattern is {pattern.dimension}-dimensional, walk is {points.shape[1]}-dimensional")
    idx = index if index is not None else SiteIndex(points, pad=2 * pattern.reach() + 1)
    uniq = points[np.unique(idx.codes, return_index=True)[1]]
    z0 = np.array(pattern.visited[0])
    cand = uniq - z0
    ok = np.ones(len(cand), dtype=bool)
    for z in pattern.visited[1:]:
        ok &= idx.contains(cand + np.array(z))
    for z in pattern.unvisited:
        ok &= ~idx.contains(cand + np.array(z))
    return _lexsorted(cand[ok])


def free_loop_starts(points: np.ndarray, index: SiteIndex | None = None) -> np.ndarray:
    """Start indices t of the free-4-loops of a walk given as an ``(N+1, n)`` array."""
    points = np.asarray(points, dtype=np.int64)
    N = len(points) - 1
    if N < 4:
        return np.zeros(0, dtype=np.int64)
    idx = index if index is not None else SiteIndex(points)
    c = idx.codes
    mult = idx.counts[idx.inverse]
    t = np.arange(N - 3)
    ok = (c[t] == c[t + 4]) & (c[t + 2] != c[t]) & (c[t + 3] != c[t + 1])
    ok &= (mult[t + 1] == 1) & (mult[t + 2] == 1) & (mult[t + 3] == 1)
    return t[ok]


# -- occurrences ------------------------------------------------------------


@dataclass(frozen=True)
class KestenPattern:
    """A path from a cube vertex to the opposite vertex, inside the cube.

    ``path`` starts at the origin, which is a vertex of ``cube``. For BAW
    paths the walk may also use the shell ``outer`` (default: the cube grown
    by one in every direction).
    """

    path: Walk
    cube: Cube
    outer: Cube | None = None

    def __post_init__(self):
        pts = self.path.points
        if pts[0] != origin(self.path.dimension):
            raise MalformedPatternError("a Kesten path starts at the origin")
        if self.cube.dimension != self.path.dimension:
            raise MalformedPatternError("cube and path dimensions differ")
        if self.cube.edge < 3:
            raise MalformedPatternError("the cube edge must be at least 3")
        if not (self.cube.is_vertex(pts[0]) and self.cube.is_vertex(pts[-1])):
            raise MalformedPatternError("the path must start and end at cube vertices")
        if any(a == b for a, b in zip(pts[0], pts[-1])):
            raise MalformedPatternError("the path must end at the vertex opposite its start")
        if not validate_walk(self.path):
            raise MalformedPatternError("path is not a valid walk of its model")
        if self.path.model is WalkModel.BAW:
            shell = self.outer or self.cube.grown(1)
            if any(p not in shell for p in pts):
                raise MalformedPatternError("BAW path leaves the outer cube")
        elif any(p not in self.cube for p in pts):
            raise MalformedPatternError("path leaves the cube")

    @property
    def n_steps(self) -> int:
        return self.path.n_steps

    def rotated(self, times: int = 1) -> "KestenPattern":
        v0, v1 = self.path.points[0], self.path.points[-1]
        pts = [_rotate_point(p, self.cube, v0, v1, times) for p in self.path.points]
        return KestenPattern(self.path.with_points(pts), self.cube, self.outer)


def kesten_path(dimension: int, b: int = 3, interior: Sequence[int] | None = None, model="saw") -> KestenPattern:
    """The proof's construction: corner -> (1,..,1) -> interior -> (b-1,..,b-1) -> far corner.

    ``interior`` gives the direction indices of the interior segment; the
    default is the staircase that raises the coordinates in turn.
    """
    if b < 3:
        raise MalformedPatternError("the cube edge must be at least 3")
    if interior is None:
        interior = [2 * a for _ in range(b - 2) for a in range(dimension)]
    lead = [2 * a for a in range(dimension)]
    steps = lead + list(interior) + lead
    path = Walk.from_steps(steps, dimension, model)
    cube = Cube(origin(dimension), b)
    inner = path.points[dimension: len(path.points) - dimension]
    if inner[0] != (1,) * dimension or inner[-1] != (b - 1,) * dimension:
        raise MalformedPatternError("interior segment must join (1,..,1) to (b-1,..,b-1)")
    if any(not cube.is_interior(p) for p in inner):
        raise MalformedPatternError("interior segment leaves the cube interior")
    return KestenPattern(path, cube)


def kesten_paths(dimension: int, b: int = 3, model="saw") -> list[KestenPattern]:
    """Every construction path whose interior segment is a SAW in the open cube."""
    start, goal = (1,) * dimension, (b - 1,) * dimension
    cube = Cube(origin(dimension), b)
    out = []
    steps: list[int] = []
    seen = {start}

    def rec(p):
        if p == goal:
            out.append(kesten_path(dimension, b, list(steps), model))
            return
        for d, q in enumerate(neighbors(p)):
            if q not in seen and cube.is_interior(q):
                seen.add(q)
                steps.append(d)
                rec(q)
                steps.pop()
                seen.discard(q)

    rec(start)
    return out


def _pattern_present(w: Walk, center: Point, pattern: PatternSpec) -> bool:
    support = set(w.points)
    return (all(add(center, z) in support for z in pattern.visited)
            and not any(add(center, z) in support for z in pattern.unvisited))


def _free_loop_at(w: Walk, t: int) -> bool:
    pts = w.points
    if t < 0 or t + 4 >= len(pts) or pts[t] != pts[t + 4]:
        return False
    if pts[t + 2] == pts[t] or pts[t + 3] == pts[t + 1]:
        return False
    inner = {pts[t + 1], pts[t + 2], pts[t + 3]}
    for i, p in enumerate(pts):
        if p in inner and not t < i < t + 4:
            return False
    return True


def _kesten_at(w: Walk, r: int, pattern: KestenPattern) -> bool:
    pts = w.points
    k = pattern.n_steps
    if r < 0 or r + k >= len(pts):
        return False
    base = pts[r]
    for j, x in enumerate(pattern.path.points):
        if sub(pts[r + j], base) != x:
            return False
    D = pattern.cube.translated(base)
    return not any(p in D for i, p in enumerate(pts) if not r <= i <= r + k)


@dataclass(frozen=True, eq=False)
class Occurrence:
    """A verified occurrence on ``walk``; construction fails if it is absent.

    ``kind`` is ``"pattern"`` (center x), ``"free4"`` (start index t) or
    ``"kesten"`` (step index r, center = walk point r).
    """

    walk: Walk
    center: Point
    kind: str
    index: int | None = None
    pattern: PatternSpec | KestenPattern | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(self.center))
        if self.kind == "pattern":
            ok = isinstance(self.pattern, PatternSpec) and _pattern_present(self.walk, self.center, self.pattern)
        elif self.kind == "free4":
            ok = self.index is not None and _free_loop_at(self.walk, self.index) \
                and self.walk.points[self.index] == self.center
        elif self.kind == "kesten":
            ok = isinstance(self.pattern, KestenPattern) and self.index is not None \
                and _kesten_at(self.walk, self.index, self.pattern) \
                and self.walk.points[self.index] == self.center
        else:
            raise ValueError(f"unknown occurrence kind {self.kind!r}")
        if not ok:
            raise ValueError(f"no {self.kind} occurrence at {self.center} (index {self.index})")

    @property
    def label(self) -> str:
        if self.kind == "pattern":
            return "(" + ",".join(map(str, self.center)) + ")"
        return str(self.index)


def _check_fresh(w: Walk, occ: Occurrence, kind: str) -> None:
    if occ.kind != kind:
        raise ValueError(f"expected a {kind} occurrence, got {occ.kind}")
    if occ.walk != w:
        raise StaleOccurrenceError("occurrence was detected on a different walk")


# -- detectors --------------------------------------------------------------


def find_pattern_occurrences(w: Walk, pattern: PatternSpec) -> list[Occurrence]:
    """Every center at which ``pattern`` appears in the support of ``w``."""
    centers = pattern_centers(w.as_array(), pattern)
    return [Occurrence(w, tuple(c), "pattern", pattern=pattern) for c in centers.tolist()]


def find_free_4_loops(w: Walk) -> list[Occurrence]:
    """Free-4-loops: unit squares ``w[t..t+4]`` whose three inner sites no other step visits.

    The base site ``w[t]`` may be visited elsewhere. ``len(result)`` is F(w).
    """
    starts = free_loop_starts(w.as_array())
    return [Occurrence(w, w.points[t], "free4", index=int(t)) for t in starts.tolist()]


def find_kesten_occurrences(w: Walk, path: Walk | KestenPattern, cube: Cube | None = None,
                            outer: Cube | None = None) -> list[Occurrence]:
    """Steps r at which the translated path occurs and ``w`` meets the cube nowhere else."""
    pattern = path if isinstance(path, KestenPattern) else KestenPattern(path, cube, outer)
    if pattern.path.dimension != w.dimension:
        raise ValueError("pattern and walk dimensions differ")
    k = pattern.n_steps
    N = w.n_steps
    if N < k:
        return []
    steps = np.array(w.steps, dtype=np.int64)
    want = np.array(pattern.path.steps, dtype=np.int64)
    windows = np.lib.stride_tricks.sliding_window_view(steps, k) if k else np.zeros((N + 1, 0))
    hits = np.flatnonzero((windows == want).all(axis=1))
    out = []
    for r in hits.tolist():
        if _kesten_at(w, r, pattern):
            out.append(Occurrence(w, w.points[r], "kesten", index=r, pattern=pattern))
    return out


# -- rewrites ---------------------------------------------------------------


def _swap_points(points: Sequence[Point], zeta: Point, target: Point) -> list[Point]:
    return [target if p == zeta else p for p in points]


def _reverse_loop_points(points: Sequence[Point], t: int) -> list[Point]:
    pts = list(points)
    pts[t + 1], pts[t + 3] = pts[t + 3], pts[t + 1]
    return pts


def _rotate_point(p: Point, cube: Cube, v0: Point, v1: Point, times: int = 1) -> Point:
    if not cube.is_interior(p):
        return p
    sign = [1 if b > a else -1 for a, b in zip(v0, v1)]
    u = [s * (x - a) for s, x, a in zip(sign, p, v0)]
    n = len(u)
    times %= n
    if times:
        u = u[-times:] + u[:-times]
    return tuple(a + s * c for a, s, c in zip(v0, sign, u))


def _rotate_points(points: Sequence[Point], r: int, pattern: KestenPattern, times: int = 1) -> list[Point]:
    base = points[r]
    D = pattern.cube.translated(base)
    v0 = add(pattern.path.points[0], base)
    v1 = add(pattern.path.points[-1], base)
    return [_rotate_point(p, D, v0, v1, times) for p in points]


def apply_site_swap(w: Walk, occ: Occurrence) -> Walk:
    """Move every visit of ``center + swap_from`` to ``center + swap_to``."""
    _check_fresh(w, occ, "pattern")
    pat = occ.pattern
    if not pat.can_swap:
        raise ValueError(f"pattern {pat.name or pat} has no swap")
    zeta = add(occ.center, pat.swap_from)
    if zeta == w.points[0]:
        raise OriginSwapError("the swapped site is the walk's starting point")
    return w.with_points(_swap_points(w.points, zeta, add(occ.center, pat.swap_to)))


def reverse_loop(w: Walk, occ: Occurrence) -> Walk:
    """Traverse the free-4-loop at ``occ.index`` in the opposite orientation."""
    _check_fresh(w, occ, "free4")
    return w.with_points(_reverse_loop_points(w.points, occ.index))


def rotate_cube_interior(w: Walk, occ: Occurrence) -> Walk:
    """Cyclically permute coordinates of the cube interior about its diagonal."""
    _check_fresh(w, occ, "kesten")
    if w.model is WalkModel.SRW:
        raise ValueError("cube rotation applies to SAW and BAW walks")
    return w.with_points(_rotate_points(w.points, occ.index, occ.pattern))


def rotation_orbit(w: Walk, occ: Occurrence) -> list[Walk]:
    """The walks after 1, 2, ..., n rotations; the last one is ``w`` again."""
    _check_fresh(w, occ, "kesten")
    out = []
    cur, cur_occ = w, occ
    for i in range(w.dimension):
        nxt = rotate_cube_interior(cur, cur_occ)
        out.append(nxt)
        pat = occ.pattern.rotated(i + 1)
        cur, cur_occ = nxt, Occurrence(nxt, nxt.points[occ.index], "kesten", occ.index, pat)
    return out


# -- certificates -----------------------------------------------------------


@dataclass(frozen=True)
class DegeneracyCertificate:
    """``m`` site-disjoint rewrites proving ``deg C(w) >= base ** m``."""

    walk: Walk
    rule: ContactRule
    base: int
    transforms: tuple[Occurrence, ...] = field(default_factory=tuple)

    @property
    def m(self) -> int:
        return len(self.transforms)

    @property
    def bound(self) -> int:
        return self.base ** self.m


def _greedy(cands: list[tuple]) -> list[tuple]:
    used: set = set()
    chosen = []
    for c in sorted(cands, key=lambda c: c[0]):
        fp = c[1]
        if used.isdisjoint(fp):
            used |= fp
            chosen.append(c)
    return chosen


def _coincidence_candidates(points: np.ndarray, patterns: Iterable[PatternSpec]) -> list[tuple]:
    """(sort key, footprint, kind, payload) for swaps and free-4-loops of a point array."""
    pts = np.asarray(points, dtype=np.int64)
    start = tuple(pts[0].tolist())
    reach = max([p.reach() for p in patterns] + [1])
    idx = SiteIndex(pts, pad=2 * reach + 1)
    cands = []
    for pi, pat in enumerate(patterns):
        if not pat.can_swap:
            continue
        for c in pattern_centers(pts, pat, idx).tolist():
            c = tuple(c)
            if add(c, pat.swap_from) == start:
                continue
            fp = frozenset(add(c, z) for z in pat.offsets)
            cands.append(((c, 0, pi), fp, "pattern", (c, pat)))
    for t in free_loop_starts(pts, idx).tolist():
        square = [tuple(pts[t + j].tolist()) for j in range(4)]
        cands.append(((square[0], 1, t), frozenset(square), "free4", t))
    return cands


def certificate_size(points: np.ndarray, patterns: Sequence[PatternSpec] | None = None) -> int:
    """Number m of greedily chosen disjoint swaps and loops (coincidence rule)."""
    pts = np.asarray(points, dtype=np.int64)
    if patterns is None:
        dflt = default_swap_pattern(pts.shape[1])
        patterns = [dflt] if dflt else []
    return len(_greedy(_coincidence_candidates(pts, patterns)))


def degeneracy_certificate(w: Walk, rule=None, *, patterns=None) -> DegeneracyCertificate:
    """Lower-bound certificate for deg C(w).

    Coincidence rule: disjoint site swaps (Q on Z^2, P on Z^3, or the given
    ``patterns``; swaps that would move the origin are skipped) and free-4-loops,
    bound ``2^m``. Adjacency rule: disjoint Kesten cube occurrences (by default
    every b = 3 construction path), bound ``n^m``. Candidates are scanned in
    lexicographic order of their centers and kept when their sites are disjoint
    from those already kept.
    """
    rule = ContactRule.parse(rule) if rule is not None else (
        ContactRule.coincidence() if w.model is WalkModel.SRW else ContactRule.adjacency())
    if rule.kind == ADJACENCY:
        if patterns is None:
            patterns = kesten_paths(w.dimension, 3, "baw" if w.model is WalkModel.BAW else "saw")
        cands = []
        for pi, pat in enumerate(patterns):
            for occ in find_kesten_occurrences(w, pat):
                D = pat.cube.translated(occ.center)
                if w.model is WalkModel.BAW:
                    D = (pat.outer or pat.cube.grown(1)).translated(occ.center)
                fp = frozenset(product(*[range(c, c + D.edge + 1) for c in D.corner]))
                cands.append(((occ.center, occ.index, pi), fp, occ))
        chosen = [c[2] for c in _greedy(cands)]
        return DegeneracyCertificate(w, rule, w.dimension, tuple(chosen))

    if patterns is None:
        dflt = default_swap_pattern(w.dimension)
        patterns = [dflt] if dflt else []
    chosen = []
    for _, _, kind, payload in _greedy(_coincidence_candidates(w.as_array(), patterns)):
        if kind == "pattern":
            c, pat = payload
            chosen.append(Occurrence(w, c, "pattern", pattern=pat))
        else:
            chosen.append(Occurrence(w, w.points[payload], "free4", index=payload))
    return DegeneracyCertificate(w, rule, 2, tuple(chosen))


def certificate_variants(cert: DegeneracyCertificate) -> list[Walk]:
    """All ``base ** m`` walks reachable by applying the certified rewrites independently."""
    w = cert.walk
    choices = range(cert.base)
    out = []
    for combo in product(choices, repeat=cert.m):
        pts = list(w.points)
        for occ, c in zip(cert.transforms, combo):
            if c == 0:
                continue
            if occ.kind == "pattern":
                pat = occ.pattern
                pts = _swap_points(pts, add(occ.center, pat.swap_from), add(occ.center, pat.swap_to))
            elif occ.kind == "free4":
                pts = _reverse_loop_points(pts, occ.index)
            else:
                pts = _rotate_points(pts, occ.index, occ.pattern, c)
        out.append(w.with_points(pts))
    return out
