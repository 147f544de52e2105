"""Whitehead-automorphism length reduction and the diskbusting test."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .freegroup import (
    Alphabet,
    Automorphism,
    Word,
    WordError,
    apply_automorphism,
    are_independent,
    cyclic_reduce,
    letter_name,
)
from .graphprops import cut_vertices, is_connected
from .whitehead import whitehead_graph


@dataclass(frozen=True)
class WhiteheadMove:
    """A Whitehead automorphism.

    ``kind == "II"``: multiplier letter ``m`` and subset ``A`` of letters with
    ``m`` in A and ``m^-1`` not in A. A generator ``x`` other than ``m^{±1}``
    is sent to ``x``, ``x m``, ``m^-1 x`` or ``m^-1 x m`` according to which of
    ``x``, ``x^-1`` lie in A.

    ``kind == "I"``: a signed permutation of the basis, ``perm[i]`` being the
    image letter of generator ``i + 1``.
    """

    kind: str
    rank: int
    multiplier: int = 0
    subset: frozenset = frozenset()
    perm: tuple[int, ...] = ()

    def automorphism(self) -> Automorphism:
        images = []
        for x in range(1, self.rank + 1):
            if self.kind == "I":
                images.append(Word((self.perm[x - 1],), self.rank))
                continue
            m = self.multiplier
            if x == abs(m):
                images.append(Word((x,), self.rank))
                continue
            img = [x]
            if x in self.subset:
                img.append(m)
            if -x in self.subset:
                img.insert(0, -m)
            images.append(Word.from_letters(img, self.rank))
        return Automorphism(tuple(images))

    def inverse(self) -> "WhiteheadMove":
        if self.kind == "I":
            inv = [0] * self.rank
            for i, y in enumerate(self.perm, start=1):
                inv[abs(y) - 1] = i if y > 0 else -i
            return WhiteheadMove("I", self.rank, perm=tuple(inv))
        m = self.multiplier
        return WhiteheadMove("II", self.rank, -m, (self.subset - {m}) | {-m})

    def __call__(self, w: Word) -> Word:
        return apply_automorphism(self.automorphism(), w)

    def to_json(self) -> dict:
        if self.kind == "I":
            return {"kind": "I", "images": [letter_name(y) for y in self.perm]}
        return {
            "kind": "II",
            "multiplier": letter_name(self.multiplier),
            "subset": [letter_name(x) for x in _ordered(self.subset)],
        }

    def __str__(self) -> str:
        if self.kind == "I":
            return "perm(" + "".join(letter_name(y) for y in self.perm) + ")"
        return f"({letter_name(self.multiplier)}, {{{','.join(letter_name(x) for x in _ordered(self.subset))}}})"


def _ordered(letters) -> list[int]:
    return sorted(letters, key=lambda x: (abs(x), x < 0))


def enumerate_whitehead_moves(alphabet: Alphabet | int, include_type_one: bool = True) -> list[WhiteheadMove]:
    """All nontrivial type II moves, then generating type I moves.

    Type II: for each multiplier (order a, A, b, B, ...) every nonempty subset
    of the letters other than ``m^{±1}``, by size then letter order; ``m``
    itself is implicit in A. Type I: each single inversion, then each
    transposition of two generators. Rank 1 has no moves.
    """
    rank = alphabet.rank if isinstance(alphabet, Alphabet) else alphabet
    if rank < 2:
        return []
    letters = Alphabet(rank).letters()
    moves = []
    for m in letters:
        pool = [x for x in letters if abs(x) != abs(m)]
        for size in range(1, len(pool) + 1):
            for sub in combinations(pool, size):
                moves.append(WhiteheadMove("II", rank, m, frozenset(sub) | {m}))
    if include_type_one:
        ident = list(range(1, rank + 1))
        for i in range(rank):
            p = ident.copy()
            p[i] = -p[i]
            moves.append(WhiteheadMove("I", rank, perm=tuple(p)))
        for i, j in combinations(range(rank), 2):
            p = ident.copy()
            p[i], p[j] = p[j], p[i]
            moves.append(WhiteheadMove("I", rank, perm=tuple(p)))
    return moves


def total_length(words: Sequence[Word]) -> int:
    return sum(len(cyclic_reduce(w)) for w in words)


@dataclass(frozen=True)
class ReductionTrace:
    initial: tuple[Word, ...]
    steps: tuple[tuple[WhiteheadMove, int], ...]
    final: tuple[Word, ...]

    @property
    def initial_length(self) -> int:
        return total_length(self.initial)

    @property
    def final_length(self) -> int:
        return total_length(self.final)

    def automorphism(self) -> Automorphism:
        rank = max(w.rank for w in self.initial)
        phi = Automorphism.identity(rank)
        for move, _ in self.steps:
            phi = phi.then(move.automorphism())
        return phi

    def to_json(self) -> dict:
        return {
            "op": "minimize",
            "initial": [str(w) for w in self.initial],
            "initial_length": self.initial_length,
            "steps": [{"move": m.to_json(), "length": n} for m, n in self.steps],
            "final": [str(w) for w in self.final],
            "final_length": self.final_length,
        }


def minimize(words: Sequence[Word] | Word) -> ReductionTrace:
    """Greedy descent: apply the first length-reducing move until none exists.

    The move applied last is retried first, then the canonical order; a run
    of one repeated move realises automorphisms like ``a -> a b^-k``. Type I
    moves never change length, so only type II moves are tried.
    """
    if isinstance(words, Word):
        words = (words,)
    rank = max(w.rank for w in words)
    current = tuple(cyclic_reduce(w.with_rank(rank)) for w in words)
    initial = current
    steps = []
    moves = enumerate_whitehead_moves(rank, include_type_one=False)
    length = total_length(current)
    last = None
    while True:
        order = moves if last is None else [last] + moves
        for move in order:
            phi = move.automorphism()
            image = tuple(cyclic_reduce(apply_automorphism(phi, w)) for w in current)
            new_length = total_length(image)
            if new_length < length:
                current, length = image, new_length
                steps.append((move, new_length))
                last = move
                break
        else:
            return ReductionTrace(initial, tuple(steps), current)


@dataclass(frozen=True)
class DiskbustingVerdict:
    diskbusting: bool
    minimized: tuple[Word, ...]
    connected: bool
    cut_vertices: tuple[int, ...]
    trace: ReductionTrace

    def __bool__(self) -> bool:
        return self.diskbusting

    def to_json(self) -> dict:
        return {
            "op": "is_diskbusting",
            "value": self.diskbusting,
            "minimized": [str(w) for w in self.minimized],
            "connected": self.connected,
            "cut_vertices": [letter_name(v) for v in self.cut_vertices],
        }


def is_diskbusting(words: Sequence[Word] | Word, rank: int | None = None) -> DiskbustingVerdict:
    """Minimize, then test W(minimized U) for connectivity and cut vertices."""
    if isinstance(words, Word):
        words = (words,)
    if any(not w.letters for w in words):
        raise WordError("empty word in set")
    if not are_independent(words):
        raise WordError("word set is not independent")
    rank = max([w.rank for w in words] + [rank or 1])
    trace = minimize([w.with_rank(rank) for w in words])
    g = whitehead_graph(trace.final)
    connected = is_connected(g)
    cuts = cut_vertices(g)
    ordered = tuple(v for v in g.vertices if v in cuts)
    return DiskbustingVerdict(connected and not cuts, trace.final, connected, ordered, trace)
