"""Finite groups and truncated free groups with their Cayley word metrics.

Finite group elements are dense integer indices 0..N-1; free-group elements
are canonical reduced words stored as tuples of nonzero letters in
{-k..-1, 1..k}.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

Word = tuple[int, ...]

EMPTY_WORD: Word = ()

DEFAULT_WORD_BUDGET = 200_000


class GroupError(ValueError):
    """Raised when a table fails the group axioms or a construction is invalid."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table on indices 0..order-1."""

    order: int
    table: np.ndarray  # shape (N, N), table[a, b] = index of a*b
    identity: int
    inverse: np.ndarray  # shape (N,), inverse[a] = index of a^-1
    labels: Optional[tuple[str, ...]] = None

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        """True iff ``subset`` is closed under product and inverse and has e."""
        members = set(int(s) for s in subset)
        if self.identity not in members:
            return False
        for a in members:
            if self.inv(a) not in members:
                return False
            for b in members:
                if self.mul(a, b) not in members:
                    return False
        return True

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


def _validate_table(table: np.ndarray) -> tuple[int, np.ndarray]:
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise GroupError("multiplication table must be square")
    n = table.shape[0]
    if n == 0:
        raise GroupError("group must be nonempty")
    if table.min() < 0 or table.max() >= n:
        raise GroupError("table entries must be element indices 0..N-1")

    full = np.arange(n)
    for i in range(n):
        if not np.array_equal(np.sort(table[i]), full):
            raise GroupError(f"row {i} is not a permutation")
        if not np.array_equal(np.sort(table[:, i]), full):
            raise GroupError(f"column {i} is not a permutation")

    # identity: a row equal to (0..N-1) that is also the matching column
    identity = -1
    for i in range(n):
        if np.array_equal(table[i], full) and np.array_equal(table[:, i], full):
            identity = i
            break
    if identity < 0:
        raise GroupError("no two-sided identity element")

    # associativity, all triples
    for a in range(n):
        ab = table[a]
        if not np.array_equal(table[ab], table[a][table]):
            # table[ab][c] vs table[a][table[b,c]] for all b, c
            raise GroupError(f"associativity fails at element {a}")

    inverse = np.empty(n, dtype=np.int64)
    for a in range(n):
        hits = np.where(table[a] == identity)[0]
        if len(hits) != 1 or table[hits[0], a] != identity:
            raise GroupError(f"element {a} has no two-sided inverse")
        inverse[a] = hits[0]
    return identity, inverse


def build_from_table(table: Sequence[Sequence[int]],
                     labels: Optional[Sequence[str]] = None) -> FiniteGroup:
    """Validate an explicit multiplication table and wrap it as a FiniteGroup."""
    arr = np.asarray(table, dtype=np.int64)
    identity, inverse = _validate_table(arr)
    arr.setflags(write=False)
    inverse.setflags(write=False)
    return FiniteGroup(order=arr.shape[0], table=arr, identity=identity,
                       inverse=inverse,
                       labels=tuple(labels) if labels is not None else None)


def build_cyclic(n: int) -> FiniteGroup:
    """Additive group of integers mod n."""
    if n < 1:
        raise GroupError("cyclic order must be >= 1")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    inverse = (-idx) % n
    table.setflags(write=False)
    inverse.setflags(write=False)
    return FiniteGroup(order=n, table=table, identity=0, inverse=inverse)


def word_length(group: FiniteGroup, generators: Iterable[int]):
    """Breadth-first Cayley distance from the identity.

    The generating set is symmetrized before the search.  Raises GroupError
    if some element is unreachable.
    """
    from .cocycles import LengthFunction

    gens = set(int(g) for g in generators)
    gens |= {group.inv(g) for g in gens}
    gens.discard(group.identity)
    if not gens and group.order > 1:
        raise GroupError("generating set is trivial")

    dist = np.full(group.order, -1, dtype=np.int64)
    dist[group.identity] = 0
    queue = deque([group.identity])
    while queue:
        a = queue.popleft()
        for s in gens:
            b = group.mul(a, s)
            if dist[b] < 0:
                dist[b] = dist[a] + 1
                queue.append(b)
    if (dist < 0).any():
        missing = int(np.where(dist < 0)[0][0])
        raise GroupError(f"generators do not generate: element {missing} unreachable")
    return LengthFunction(group=group, values=dist.astype(float))


def reduce_word(letters: Iterable[int]) -> Word:
    """Free reduction: cancel adjacent inverse pairs."""
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise GroupError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def word_mul(g: Word, h: Word) -> Word:
    return reduce_word(g + h)


def word_inv(g: Word) -> Word:
    return tuple(-x for x in reversed(g))


def prefix_geq(g: Word, h: Word) -> bool:
    """True iff h is a prefix of g (h lies on the geodesic from e to g)."""
    return len(h) <= len(g) and g[: len(h)] == h


@dataclass(frozen=True, eq=False)
class FreeGroupBall:
    """All reduced words of length <= radius in the free group on k generators."""

    k: int
    radius: int
    words: tuple[Word, ...]  # sorted by (length, letters)
    index: dict[Word, int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.words)

    def length(self, g: Word) -> int:
        return len(g)

    def parent(self, g: Word) -> Word:
        """Delete the last letter; parent of e is e."""
        return g[:-1]

    def contains(self, g: Word) -> bool:
        return g in self.index

    def mul(self, g: Word, h: Word) -> tuple[Optional[Word], bool]:
        """Reduced product and an in-ball flag; None when the product leaves the ball."""
        w = word_mul(g, h)
        if len(w) <= self.radius:
            return w, True
        return None, False

    def mul_unrestricted(self, g: Word, h: Word) -> Word:
        """Reduced product as a plain word, ignoring the ball radius."""
        return word_mul(g, h)

    def generators(self) -> list[Word]:
        return [(s,) for s in range(1, self.k + 1)] + [(-s,) for s in range(1, self.k + 1)]

    def __repr__(self) -> str:
        return f"FreeGroupBall(k={self.k}, radius={self.radius}, size={self.size})"


def expected_ball_size(k: int, radius: int) -> int:
    return 1 + sum(2 * k * (2 * k - 1) ** (r - 1) for r in range(1, radius + 1))


def build_free_ball(k: int, radius: int,
                    word_budget: int = DEFAULT_WORD_BUDGET) -> FreeGroupBall:
    """Enumerate all reduced words of length <= radius."""
    if k < 1:
        raise GroupError("need at least one generator")
    if radius < 0:
        raise GroupError("radius must be >= 0")
    total = expected_ball_size(k, radius)
    if total > word_budget:
        raise GroupError(
            f"ball of size {total} exceeds word budget {word_budget}")

    letters = list(range(1, k + 1)) + list(range(-k, 0))
    letters.sort(key=abs)
    words: list[Word] = [EMPTY_WORD]
    frontier: list[Word] = [EMPTY_WORD]
    for _ in range(radius):
        nxt: list[Word] = []
        for w in frontier:
            for s in letters:
                if w and w[-1] == -s:
                    continue
                nxt.append(w + (s,))
        words.extend(nxt)
        frontier = nxt
    assert len(words) == total
    index = {w: i for i, w in enumerate(words)}
    return FreeGroupBall(k=k, radius=radius, words=tuple(words), index=index)


def free_word_length(ball: FreeGroupBall):
    """Word-length function |g| on the ball."""
    from .cocycles import LengthFunction

    values = np.array([len(w) for w in ball.words], dtype=float)
    return LengthFunction(group=ball, values=values, name="word")


def group_from_json_dict(data: dict):
    """Build a group or ball from the JSON definition format."""
    kind = data.get("kind")
    if kind == "cyclic":
        return build_cyclic(int(data["n"]))
    if kind == "table":
        return build_from_table(data["table"], labels=data.get("labels"))
    if kind == "free-ball":
        return build_free_ball(int(data["k"]), int(data["radius"]))
    raise GroupError(f"unknown group kind {kind!r}")
