"""Lattice geometry and nearest-neighbour walks on Z^n.

Walks start at the origin and are stored as tuples of integer points. Steps
are encoded as direction indices ``d`` in ``0 .. 2n-1``, where ``d = 2*a``
is ``+e_(a+1)`` and ``d = 2*a + 1`` is ``-e_(a+1)``. This is also the
order in which :func:`neighbors` lists sites and in which enumeration
branches, so enumeration order is lexicographic in the step string.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

Point = tuple[int, ...]

DEFAULT_MAX_WALKS = 10**8


class EnumerationBudgetError(RuntimeError):
    """Raised when an enumeration would emit more walks than allowed."""


class ModelMismatchError(ValueError):
    pass


class WalkModel(str, enum.Enum):
    SRW = "srw"
    SAW = "saw"
    BAW = "baw"

    @classmethod
    def parse(cls, value: "WalkModel | str") -> "WalkModel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown walk model {value!r}; expected srw, saw or baw") from None


def origin(dimension: int) -> Point:
    return (0,) * dimension


def unit_steps(dimension: int) -> list[Point]:
    """The 2n unit vectors in direction-index order (+e1, -e1, +e2, ...)."""
    steps = []
    for axis in range(dimension):
        for sign in (1, -1):
            v = [0] * dimension
            v[axis] = sign
            steps.append(tuple(v))
    return steps


def neighbors(p: Sequence[int]) -> list[Point]:
    """Return the 2n nearest neighbours of ``p`` in direction-index order."""
    p = tuple(int(c) for c in p)
    out = []
    for axis in range(len(p)):
        for sign in (1, -1):
            q = list(p)
            q[axis] += sign
            out.append(tuple(q))
    return out


def add(p: Sequence[int], q: Sequence[int]) -> Point:
    return tuple(a + b for a, b in zip(p, q))


def sub(p: Sequence[int], q: Sequence[int]) -> Point:
    return tuple(a - b for a, b in zip(p, q))


def step_direction(p: Sequence[int], q: Sequence[int]) -> int | None:
    """Direction index of the unit step p -> q, or None if not a unit step."""
    axis = None
    for a, (x, y) in enumerate(zip(p, q)):
        if x != y:
            if axis is not None or abs(x - y) != 1:
                return None
            axis = a
    if axis is None:
        return None
    return 2 * axis + (0 if q[axis] > p[axis] else 1)


# -- tokens -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"^([+-])(\d+)$")


def direction_to_token(d: int) -> str:
    return f"{'+' if d % 2 == 0 else '-'}{d // 2 + 1}"


def token_to_direction(token: str, dimension: int) -> int:
    m = _TOKEN_RE.match(token.strip())
    if not m:
        raise ValueError(f"bad step token {token!r}")
    axis = int(m.group(2)) - 1
    if not 0 <= axis < dimension:
        raise ValueError(f"step token {token!r} out of range for dimension {dimension}")
    return 2 * axis + (0 if m.group(1) == "+" else 1)


# -- cubes ------------------------------------------------------------------


@dataclass(frozen=True)
class Cube:
    """Axis-aligned lattice cube ``{x : c_i <= x_i <= c_i + b}``."""

    corner: Point
    edge: int

    def __post_init__(self):
        object.__setattr__(self, "corner", tuple(int(c) for c in self.corner))
        if self.edge < 1:
            raise ValueError("cube edge must be a positive integer")

    @property
    def dimension(self) -> int:
        return len(self.corner)

    def classify(self, p: Sequence[int]) -> str:
        """Return ``"interior"``, ``"boundary"`` or ``"outside"``."""
        on_face = False
        for x, c in zip(p, self.corner):
            if x < c or x > c + self.edge:
                return "outside"
            if x == c or x == c + self.edge:
                on_face = True
        return "boundary" if on_face else "interior"

    def __contains__(self, p) -> bool:
        return self.classify(p) != "outside"

    def is_interior(self, p: Sequence[int]) -> bool:
        return self.classify(p) == "interior"

    def is_vertex(self, p: Sequence[int]) -> bool:
        return all(x == c or x == c + self.edge for x, c in zip(p, self.corner))

    def translated(self, offset: Sequence[int]) -> "Cube":
        return Cube(add(self.corner, offset), self.edge)

    def grown(self, margin: int = 1) -> "Cube":
        """The concentric cube with every face pushed out by ``margin``."""
        return Cube(tuple(c - margin for c in self.corner), self.edge + 2 * margin)


# -- walks ------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    ok: bool
    message: str = "ok"
    indices: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Walk:
    """A nearest-neighbour lattice path ``points[0..N]`` tagged with its model.

    Construction does not validate; use :func:`validate_walk`.
    """

    points: tuple[Point, ...]
    model: WalkModel = WalkModel.SRW
    dimension: int = field(default=0)

    def __post_init__(self):
        pts = tuple(tuple(int(c) for c in p) for p in self.points)
        if not pts:
            raise ValueError("a walk has at least one point")
        dim = self.dimension or len(pts[0])
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "model", WalkModel.parse(self.model))
        object.__setattr__(self, "dimension", dim)

    @classmethod
    def from_steps(cls, steps: Iterable[int], dimension: int, model="srw") -> "Walk":
        units = unit_steps(dimension)
        p = origin(dimension)
        pts = [p]
        for d in steps:
            p = add(p, units[d])
            pts.append(p)
        return cls(tuple(pts), model, dimension)

    @classmethod
    def from_tokens(cls, text: str, dimension: int, model="srw") -> "Walk":
        text = text.strip()
        tokens = [t for t in text.split(",") if t.strip()] if text else []
        return cls.from_steps([token_to_direction(t, dimension) for t in tokens], dimension, model)

    @classmethod
    def from_array(cls, arr, model="srw") -> "Walk":
        arr = np.asarray(arr)
        return cls(tuple(map(tuple, arr.tolist())), model, arr.shape[1])

    @property
    def n_steps(self) -> int:
        return len(self.points) - 1

    def __len__(self) -> int:
        return len(self.points)

    @property
    def steps(self) -> tuple[int, ...]:
        """Direction indices; raises if some consecutive pair is not a unit step."""
        out = []
        for i in range(self.n_steps):
            d = step_direction(self.points[i], self.points[i + 1])
            if d is None:
                raise ValueError(f"points {i} and {i + 1} are not lattice neighbours")
            out.append(d)
        return tuple(out)

    def to_tokens(self) -> str:
        return ",".join(direction_to_token(d) for d in self.steps)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64).reshape(len(self.points), self.dimension)

    def with_model(self, model) -> "Walk":
        return Walk(self.points, model, self.dimension)

    def with_points(self, points) -> "Walk":
        return Walk(tuple(points), self.model, self.dimension)

    def translated(self, offset: Sequence[int]) -> "Walk":
        return self.with_points(add(p, offset) for p in self.points)


def validate_walk(w: Walk) -> Verdict:
    """Check the invariants of ``w`` for its model; report the first failure."""
    pts = w.points
    if any(len(p) != w.dimension for p in pts):
        return Verdict(False, "inconsistent point dimension")
    if pts[0] != origin(w.dimension):
        return Verdict(False, "walk does not start at the origin", (0, 0))
    for i in range(w.n_steps):
        if step_direction(pts[i], pts[i + 1]) is None:
            return Verdict(False, f"points {i} and {i + 1} are not lattice neighbours", (i, i + 1))
    if w.model is WalkModel.SAW:
        seen: dict[Point, int] = {}
        for j, p in enumerate(pts):
            if p in seen:
                return Verdict(False, f"site {p} revisited at indices {seen[p]},{j}", (seen[p], j))
            seen[p] = j
    elif w.model is WalkModel.BAW:
        bonds: dict[frozenset, int] = {}
        for j in range(w.n_steps):
            b = frozenset((pts[j], pts[j + 1]))
            if b in bonds:
                i = bonds[b]
                return Verdict(False, f"bond {{{pts[j]},{pts[j + 1]}}} reused at steps {i},{j}", (i, j))
            bonds[b] = j
    return Verdict(True)


def concat_walks(w1: Walk, w2: Walk) -> Walk:
    """Follow ``w1`` and then ``w2`` translated to start at ``w1``'s endpoint."""
    if w1.model is not WalkModel.SRW or w2.model is not WalkModel.SRW:
        raise ModelMismatchError("concatenation is only closed for SRW")
    if w1.dimension != w2.dimension:
        raise ModelMismatchError("walks have different dimensions")
    end = w1.points[-1]
    start = w2.points[0]
    tail = [add(end, sub(p, start)) for p in w2.points[1:]]
    return Walk(w1.points + tuple(tail), WalkModel.SRW, w1.dimension)


# -- enumeration ------------------------------------------------------------


def _check_args(dimension: int, length: int) -> None:
    if length < 0:
        raise ValueError("length must be >= 0")
    if dimension < 1:
        raise ValueError("dimension must be >= 1")


def _dfs_steps(model: WalkModel, dimension: int, length: int, prefix: Sequence[int] = ()) -> Iterator[tuple[int, ...]]:
    """Yield step tuples of every valid walk extending ``prefix``, in lexicographic order.

    Pruning uses a visited-site set (SAW) or a used-bond set (BAW).
    """
    units = unit_steps(dimension)
    n_dir = 2 * dimension
    pos = [origin(dimension)]
    steps: list[int] = []
    sites = {pos[0]}
    bonds: set = set()

    def legal(p, q):
        if model is WalkModel.SAW:
            return q not in sites
        if model is WalkModel.BAW:
            return frozenset((p, q)) not in bonds
        return True

    def push(d):
        p = pos[-1]
        q = add(p, units[d])
        pos.append(q)
        steps.append(d)
        if model is WalkModel.SAW:
            sites.add(q)
        elif model is WalkModel.BAW:
            bonds.add(frozenset((p, q)))

    def pop():
        q = pos.pop()
        steps.pop()
        if model is WalkModel.SAW:
            sites.discard(q)
        elif model is WalkModel.BAW:
            bonds.discard(frozenset((pos[-1], q)))

    for d in prefix:
        if d >= n_dir or len(steps) >= length or not legal(pos[-1], add(pos[-1], units[d])):
            return
        push(d)

    def rec():
        if len(steps) == length:
            yield tuple(steps)
            return
        p = pos[-1]
        for d in range(n_dir):
            if legal(p, add(p, units[d])):
                push(d)
                yield from rec()
                pop()

    yield from rec()


def enumerate_walks(
    model,
    dimension: int,
    length: int,
    *,
    prefix: Sequence[int] = (),
    max_walks: int = DEFAULT_MAX_WALKS,
) -> Iterator[Walk]:
    """Yield every walk of the model with ``length`` steps, depth first.

    ``prefix`` restricts the stream to walks whose first steps match it, which
    is how work is split between independent workers. Raises
    :class:`EnumerationBudgetError` once more than ``max_walks`` walks would be
    produced (up front for SRW, where the count is known).
    """
    model = WalkModel.parse(model)
    _check_args(dimension, length)
    if model is WalkModel.SRW and (2 * dimension) ** max(length - len(prefix), 0) > max_walks:
        raise EnumerationBudgetError(f"(2n)^N exceeds the budget of {max_walks} walks")
    emitted = 0
    for steps in _dfs_steps(model, dimension, length, prefix):
        emitted += 1
        if emitted > max_walks:
            raise EnumerationBudgetError(f"more than {max_walks} walks")
        yield Walk.from_steps(steps, dimension, model)


def enumerate_step_sequences(model, dimension: int, length: int, *, prefix: Sequence[int] = ()) -> Iterator[tuple[int, ...]]:
    """Like :func:`enumerate_walks` but yields bare direction-index tuples."""
    model = WalkModel.parse(model)
    _check_args(dimension, length)
    return _dfs_steps(model, dimension, length, prefix)


def count_walks(model, dimension: int, length: int, *, max_walks: int = DEFAULT_MAX_WALKS) -> int:
    """|Omega_N| for the model. Exact closed form for SRW, enumeration otherwise."""
    model = WalkModel.parse(model)
    _check_args(dimension, length)
    if model is WalkModel.SRW:
        return (2 * dimension) ** length
    total = 0
    for _ in _dfs_steps(model, dimension, length):
        total += 1
        if total > max_walks:
            raise EnumerationBudgetError(f"more than {max_walks} walks")
    return total


def step_prefixes(model, dimension: int, depth: int, length: int | None = None) -> list[tuple[int, ...]]:
    """Valid step prefixes of the given depth, in enumeration order.

    The subtrees below these prefixes partition the walk space; ``depth`` is
    clipped to ``length`` when that is given.
    """
    model = WalkModel.parse(model)
    if length is not None:
        depth = min(depth, length)
    return list(_dfs_steps(model, dimension, depth))


# -- text format ------------------------------------------------------------

_HEADER_RE = re.compile(r"^#\s*(.*)$")


def format_walks(walks: Sequence[Walk]) -> str:
    """Serialise walks sharing model, dimension and length to the text format."""
    if not walks:
        raise ValueError("no walks to write")
    w0 = walks[0]
    for w in walks:
        if (w.model, w.dimension, w.n_steps) != (w0.model, w0.dimension, w0.n_steps):
            raise ValueError("all walks in a file share model, dimension and length")
    lines = [f"# model={w0.model.value} dim={w0.dimension} n_steps={w0.n_steps}"]
    lines.extend(w.to_tokens() for w in walks)
    return "\n".join(lines) + "\n"


def parse_walks(text: str) -> list[Walk]:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty walk file")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ValueError("walk file must start with a '# model=... dim=... n_steps=...' header")
    fields = dict(kv.split("=", 1) for kv in m.group(1).split())
    try:
        model = WalkModel.parse(fields["model"])
        dim = int(fields["dim"])
        n_steps = int(fields["n_steps"])
    except KeyError as exc:
        raise ValueError(f"walk file header lacks {exc.args[0]!r}") from None
    walks = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() and n_steps > 0:
            continue
        w = Walk.from_tokens(line, dim, model)
        if w.n_steps != n_steps:
            raise ValueError(f"line {lineno}: expected {n_steps} steps, got {w.n_steps}")
        walks.append(w)
    return walks


def read_walks(path) -> list[Walk]:
    with open(path) as fh:
        return parse_walks(fh.read())


def write_walks(path, walks: Sequence[Walk]) -> None:
    with open(path, "w") as fh:
        fh.write(format_walks(walks))
