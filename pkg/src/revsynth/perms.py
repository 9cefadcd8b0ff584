"""Permutations on {1..N}, their cycle-notation codec, and the bridge to
0-based truth-table specifications.

A permutation acts on the points 1..N and is stored as the tuple of images of
1, 2, ..., N.  A specification is the truth table of a reversible function on
N values: outputs[v] is the output for input v, both 0-based.  The two views
differ only by the one-based shift, so converting between them never touches
the underlying bijection.

Composition is written in cascade order: compose(p, q) applies p first and q
second.  This matches how circuits are read, with the leftmost gate acting
first, and is kept consistent everywhere in this package.
"""

from __future__ import annotations

from dataclasses import dataclass


class CycleParseError(ValueError):
    """Malformed cycle notation; position is the character offset at fault."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Permutation:
    """Bijection on {1..n_points}, stored as the tuple of images of 1, 2, ..."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"images are not a permutation of 1..{n}: {self.images!r}")

    @property
    def n_points(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        """Image of one point."""
        if not 1 <= point <= len(self.images):
            raise ValueError(f"point {point} out of range 1..{len(self.images)}")
        return self.images[point - 1]

    def is_identity(self) -> bool:
        return all(x == i + 1 for i, x in enumerate(self.images))

    def __str__(self) -> str:
        return format_cycles(self)


@dataclass(frozen=True)
class Specification:
    """Truth table of a reversible function: outputs[v] for each input v."""

    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.outputs)
        if sorted(self.outputs) != list(range(n)):
            raise ValueError(f"outputs are not a permutation of 0..{n - 1}: {self.outputs!r}")

    @property
    def n_values(self) -> int:
        return len(self.outputs)


def identity(n_points: int) -> Permutation:
    """The identity permutation on {1..n_points}."""
    if n_points < 1:
        raise ValueError("n_points must be positive")
    return Permutation(tuple(range(1, n_points + 1)))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Cascade product: the permutation that applies p first, then q."""
    if p.n_points != q.n_points:
        raise ValueError(f"point counts differ: {p.n_points} vs {q.n_points}")
    qi = q.images
    return Permutation(tuple(qi[x - 1] for x in p.images))


def inverse(p: Permutation) -> Permutation:
    """The inverse permutation."""
    inv = [0] * p.n_points
    for i, x in enumerate(p.images):
        inv[x - 1] = i + 1
    return Permutation(tuple(inv))


def parse_cycles(text: str, n_points: int) -> Permutation:
    """Parse cycle notation such as "(1,3,5,6)(7,8)" on the points 1..n_points.

    The identity is written "()".  Whitespace between tokens is accepted;
    every point must lie in 1..n_points and may appear at most once.
    """
    if n_points < 1:
        raise ValueError("n_points must be positive")
    pos = 0
    end = len(text)

    def skip_ws() -> None:
        nonlocal pos
        while pos < end and text[pos].isspace():
            pos += 1

    def expect(ch: str) -> None:
        nonlocal pos
        skip_ws()
        if pos >= end or text[pos] != ch:
            raise CycleParseError(f"expected {ch!r}", pos)
        pos += 1

    def read_point() -> int:
        nonlocal pos
        skip_ws()
        start = pos
        while pos < end and text[pos].isdigit():
            pos += 1
        if pos == start:
            raise CycleParseError("expected a point", start)
        value = int(text[start:pos])
        if not 1 <= value <= n_points:
            raise CycleParseError(f"point {value} out of range 1..{n_points}", start)
        if value in seen:
            raise CycleParseError(f"point {value} repeated", start)
        seen.add(value)
        return value

    images = list(range(1, n_points + 1))
    seen: set[int] = set()
    first = True
    while True:
        skip_ws()
        if pos >= end:
            if first:
                raise CycleParseError("empty input", pos)
            break
        expect("(")
        skip_ws()
        if first and pos < end and text[pos] == ")":
            pos += 1
            skip_ws()
            if pos != end:
                raise CycleParseError("trailing text after identity", pos)
            break
        cycle = [read_point()]
        skip_ws()
        while pos < end and text[pos] == ",":
            pos += 1
            cycle.append(read_point())
            skip_ws()
        if len(cycle) < 2:
            raise CycleParseError("cycle needs at least two points", pos)
        expect(")")
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            images[a - 1] = b
        first = False
    return Permutation(tuple(images))


def format_cycles(p: Permutation) -> str:
    """Canonical cycle notation: cycles ordered by smallest point, each cycle
    starting at its smallest point, fixed points omitted, identity "()"."""
    chunks = []
    visited = [False] * p.n_points
    for start in range(1, p.n_points + 1):
        if visited[start - 1] or p.images[start - 1] == start:
            continue
        cycle = [start]
        visited[start - 1] = True
        point = p.images[start - 1]
        while point != start:
            visited[point - 1] = True
            cycle.append(point)
            point = p.images[point - 1]
        chunks.append("(" + ",".join(str(x) for x in cycle) + ")")
    return "".join(chunks) if chunks else "()"


def spec_to_perm(spec: Specification) -> Permutation:
    """Reinterpret a 0-based truth table as a permutation on {1..N}."""
    return Permutation(tuple(v + 1 for v in spec.outputs))


def perm_to_spec(p: Permutation) -> Specification:
    """Reinterpret a permutation on {1..N} as a 0-based truth table."""
    return Specification(tuple(x - 1 for x in p.images))
