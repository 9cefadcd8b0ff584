"""Deterministic Schreier-Sims stabilizer chains for permutation groups given
by labeled generators.

The chain fixes one base point per level.  Level i holds the orbit of its
base point under every generator stored at level i or deeper (a generator
fixing the first i base points still moves other orbit points, so deeper
generators take part), together with a transversal: for each orbit point, one
representative mapping the base point there.  Every group element then
factors uniquely as cascade(u_k, ..., u_1) with u_i drawn from level i's
transversal, which gives the group order as the product of orbit sizes, a
membership test (sifting: divide the representatives back out and check what
remains), and a factorization of any member over the original generators.

Determinism is part of the contract: a new level's base is the smallest point
moved by the residue that opens it, orbits grow breadth-first scanning
generators own-level-first in the order they were added, the first
representative reaching an orbit point is kept for good, and incoming
generators (original ones and sifted Schreier generators alike) are installed
at the level whose base orbit their sift residue escapes.  Two builds from
the same generator list produce identical chains, words included.

Words are tuples of signed generator indexes internally; the public surface
renders them as label sequences, marking inverses only for generators that
are not involutions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .perms import Permutation

Word = tuple[int, ...]


class NotInGroupError(ValueError):
    """Factorization target is outside the group; carries the sift residue."""

    def __init__(self, message: str, residue: Permutation) -> None:
        super().__init__(message)
        self.residue = residue


@dataclass(frozen=True)
class SiftResult:
    """Outcome of sifting: the residue left after dividing out transversal
    representatives, and the factorization word when the residue is trivial."""

    is_member: bool
    residue: Permutation
    word: tuple[str, ...] | None


def _mult(p, q):
    """Cascade product on raw image tuples: p first, then q."""
    return tuple(q[x - 1] for x in p)


def _inv(p):
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x - 1] = i + 1
    return tuple(out)


def _inv_word(word: Word) -> Word:
    return tuple(-x for x in reversed(word))


class ChainLevel:
    """One chain level: base point, installed generators, orbit, transversal."""

    def __init__(self, base_point: int):
        self.base_point = base_point
        self.gens: list[tuple[tuple[int, ...], Word]] = []
        self.points: list[int] = []
        self.reps: dict[int, tuple[int, ...]] = {}
        self.rep_invs: dict[int, tuple[int, ...]] = {}
        self.rep_words: dict[int, Word] = {}

    def orbit_size(self) -> int:
        return len(self.points)


class StabilizerChain:
    """Stabilizer chain over a fixed, labeled generator list."""

    def __init__(self, n_points: int, generators: tuple[Permutation, ...], labels: tuple[str, ...]):
        self.n_points = n_points
        self.generators = generators
        self.labels = labels
        self.levels: list[ChainLevel] = []
        self._identity = tuple(range(1, n_points + 1))
        self._involution = tuple(
            _mult(g.images, g.images) == self._identity for g in generators
        )

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(level.base_point for level in self.levels)

    def orbit_sizes(self) -> tuple[int, ...]:
        return tuple(level.orbit_size() for level in self.levels)

    def word_labels(self, word: Word) -> tuple[str, ...]:
        """Render a signed-index word as labels, marking non-involution inverses."""
        out = []
        for index in word:
            label = self.labels[abs(index) - 1]
            if index < 0 and not self._involution[abs(index) - 1]:
                label += "^-1"
            out.append(label)
        return tuple(out)

    def _acting_gens(self, i: int) -> list[tuple[tuple[int, ...], Word]]:
        """Generators acting at level i: its own, then every deeper level's."""
        acting = []
        for level in self.levels[i:]:
            acting.extend(level.gens)
        return acting


def build_chain(generators: list[tuple[Permutation, str]]) -> StabilizerChain:
    """Build the deterministic stabilizer chain for labeled generators."""
    if not generators:
        raise ValueError("at least one generator is required")
    perms = tuple(p for p, _ in generators)
    labels = tuple(label for _, label in generators)
    if len(set(labels)) != len(labels):
        raise ValueError("generator labels must be distinct")
    n_points = perms[0].n_points
    if any(p.n_points != n_points for p in perms):
        raise ValueError("generators act on different point counts")
    chain = StabilizerChain(n_points, perms, labels)
    for index, perm in enumerate(perms):
        _add_generator(chain, 0, perm.images, (index + 1,))
    return chain


def _sift_images(chain: StabilizerChain, start: int, images, word):
    """Divide out transversal representatives from level start downward.

    Returns (None, None, None) when the element sifts to the identity, else
    (level, residue, word) naming the first level whose base orbit the
    residue escapes (len(levels) means a brand-new level is needed).
    """
    current, current_word = images, word
    for j in range(start, len(chain.levels)):
        if current == chain._identity:
            return None, None, None
        level = chain.levels[j]
        image = current[level.base_point - 1]
        if image not in level.reps:
            return j, current, current_word
        current = _mult(current, level.rep_invs[image])
        current_word = current_word + _inv_word(level.rep_words[image])
    if current == chain._identity:
        return None, None, None
    return len(chain.levels), current, current_word


def _rebuild_orbit(chain: StabilizerChain, i: int) -> None:
    """Recompute level i's orbit and transversal from scratch, breadth-first."""
    level = chain.levels[i]
    acting = chain._acting_gens(i)
    level.points = [level.base_point]
    level.reps = {level.base_point: chain._identity}
    level.rep_invs = {level.base_point: chain._identity}
    level.rep_words = {level.base_point: ()}
    head = 0
    while head < len(level.points):
        point = level.points[head]
        head += 1
        rep = level.reps[point]
        rep_word = level.rep_words[point]
        for gen_images, gen_word in acting:
            image = gen_images[point - 1]
            if image not in level.reps:
                new_rep = _mult(rep, gen_images)
                level.points.append(image)
                level.reps[image] = new_rep
                level.rep_invs[image] = _inv(new_rep)
                level.rep_words[image] = rep_word + gen_word


def _schreier_close(chain: StabilizerChain, i: int) -> None:
    """Push level i's Schreier generators into the deeper chain.

    The generator snapshot taken here generates the level's full group (later
    additions below are products of it), so closing over snapshot pairs
    against the current transversal is enough for a strong generating set.
    """
    level = chain.levels[i]
    acting = chain._acting_gens(i)
    for point in level.points:
        rep = level.reps[point]
        rep_word = level.rep_words[point]
        for gen_images, gen_word in acting:
            image = gen_images[point - 1]
            schreier = _mult(_mult(rep, gen_images), level.rep_invs[image])
            if schreier == chain._identity:
                continue
            word = rep_word + gen_word + _inv_word(level.rep_words[image])
            _add_generator(chain, i + 1, schreier, word)


def _add_generator(chain: StabilizerChain, entry: int, images, word) -> None:
    """Sift an incoming generator from the entry level and install the residue.

    A surviving residue strictly grows the group at its placement level, and
    can also widen base orbits at the levels its sift passed through, so each
    level on the path is rebuilt and re-closed, deepest first.
    """
    j, residue, residue_word = _sift_images(chain, entry, images, word)
    if j is None:
        return
    if j == len(chain.levels):
        moved = next(i + 1 for i, x in enumerate(residue) if x != i + 1)
        chain.levels.append(ChainLevel(moved))
    chain.levels[j].gens.append((residue, residue_word))
    for i in range(j, entry - 1, -1):
        _rebuild_orbit(chain, i)
        _schreier_close(chain, i)


def group_order(chain: StabilizerChain) -> int:
    """Product of the orbit sizes along the chain."""
    order = 1
    for level in chain.levels:
        order *= level.orbit_size()
    return order


def sift(chain: StabilizerChain, p: Permutation) -> SiftResult:
    """Sift a permutation through the chain.

    A member leaves the identity residue and yields the factorization word
    cascade(u_k, ..., u_1) rendered over generator labels; a non-member's
    residue is whatever survives the divisions.
    """
    if p.n_points != chain.n_points:
        raise ValueError(f"permutation acts on {p.n_points} points, chain on {chain.n_points}")
    current = p.images
    parts = []
    for level in chain.levels:
        image = current[level.base_point - 1]
        if image not in level.reps:
            return SiftResult(False, Permutation(current), None)
        parts.append(level.rep_words[image])
        current = _mult(current, level.rep_invs[image])
    if current != chain._identity:
        return SiftResult(False, Permutation(current), None)
    word: Word = ()
    for part in reversed(parts):
        word += part
    return SiftResult(True, Permutation(current), chain.word_labels(word))


def factorize(chain: StabilizerChain, p: Permutation) -> tuple[str, ...]:
    """Factor a member over the original generator labels, first factor first."""
    result = sift(chain, p)
    if not result.is_member:
        raise NotInGroupError(
            f"{p} is not in the group; residue {result.residue}", result.residue
        )
    return result.word


def chain_to_json(chain: StabilizerChain) -> dict:
    """JSON-ready diagnostic dump: base, orbits, transversal words as labels."""
    return {
        "n_points": chain.n_points,
        "labels": list(chain.labels),
        "base": list(chain.base),
        "order": group_order(chain),
        "levels": [
            {
                "base_point": level.base_point,
                "orbit": list(level.points),
                "transversal": {
                    str(point): list(chain.word_labels(level.rep_words[point]))
                    for point in level.points
                },
            }
            for level in chain.levels
        ],
    }
