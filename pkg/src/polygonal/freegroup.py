"""Words in a free group of finite rank.

A letter is a nonzero signed integer: ``+i`` is the generator ``a_i`` and
``-i`` its inverse. The text syntax writes generators as ``a``..``z`` and
inverses as ``A``..``Z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

MAX_TEXT_RANK = 26


class WordError(ValueError):
    """Raised for malformed word text or letters outside the rank."""


def letter_name(x: int) -> str:
    if x > 0:
        return chr(ord("a") + x - 1)
    return chr(ord("A") - x - 1)


def letter_from_char(ch: str) -> int:
    if "a" <= ch <= "z":
        return ord(ch) - ord("a") + 1
    if "A" <= ch <= "Z":
        return -(ord(ch) - ord("A") + 1)
    raise WordError(f"unknown character {ch!r}")


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Alphabet:
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise WordError(f"rank must be positive, got {self.rank}")

    def generators(self) -> tuple[int, ...]:
        return tuple(range(1, self.rank + 1))

    def letters(self) -> tuple[int, ...]:
        """All of S and S^-1, ordered a, A, b, B, ..."""
        return tuple(x for i in self.generators() for x in (i, -i))

    def __contains__(self, x: int) -> bool:
        return x != 0 and abs(x) <= self.rank


@dataclass(frozen=True)
class Word:
    """A freely reduced word. Construct through :func:`parse_word` or :meth:`from_letters`."""

    letters: tuple[int, ...]
    rank: int

    @classmethod
    def from_letters(cls, letters: Iterable[int], rank: int | None = None) -> "Word":
        letters = tuple(letters)
        if any(x == 0 for x in letters):
            raise WordError("0 is not a letter")
        needed = max((abs(x) for x in letters), default=1)
        if rank is None:
            rank = needed
        elif needed > rank:
            raise WordError(f"generator {letter_name(needed)} outside rank {rank}")
        return cls(free_reduce(letters), rank)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.rank)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __str__(self) -> str:
        return "".join(letter_name(x) for x in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, rank={self.rank})"

    def __mul__(self, other: "Word") -> "Word":
        return Word.from_letters(self.letters + other.letters, max(self.rank, other.rank))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** -n
        return Word.from_letters(self.letters * n, self.rank)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)), self.rank)

    def rotate(self, k: int) -> "Word":
        if not self.letters:
            return self
        k %= len(self.letters)
        return Word(self.letters[k:] + self.letters[:k], self.rank)

    def with_rank(self, rank: int) -> "Word":
        return Word.from_letters(self.letters, rank)

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]


def parse_word(text: str, rank: int | Alphabet | None = None) -> Word:
    """Parse ASCII word text; the result is freely reduced.

    With ``rank=None`` the rank is the highest generator that appears.
    """
    if isinstance(rank, Alphabet):
        rank = rank.rank
    if rank is not None and not 1 <= rank <= MAX_TEXT_RANK:
        raise WordError(f"text syntax supports rank 1..{MAX_TEXT_RANK}, got {rank}")
    letters = [letter_from_char(ch) for ch in text.strip()]
    return Word.from_letters(letters, rank)


def cyclic_reduce(w: Word) -> Word:
    letters = w.letters
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return Word(letters[i:j], w.rank)


def primitive_root(w: Word) -> tuple[Word, int]:
    """Return ``(root, exponent)`` with ``w == root ** exponent`` and exponent maximal."""
    if not w.letters:
        raise WordError("the empty word has no root")
    if not w.is_cyclically_reduced():
        raise WordError(f"{w} is not cyclically reduced")
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w.letters[:d] * (n // d) == w.letters:
            return Word(w.letters[:d], w.rank), n // d
    raise AssertionError("unreachable")


def cyclic_equal(u: Word, v: Word) -> bool:
    """True iff ``v`` is a rotation of ``u``."""
    if len(u) != len(v):
        return False
    if not u.letters:
        return True
    doubled = u.letters + u.letters
    n = len(u)
    return any(doubled[k:k + n] == v.letters for k in range(n))


def conjugate_cyclic_words(u: Word, v: Word) -> bool:
    """Cyclic equality up to rotation and inversion."""
    return cyclic_equal(u, v) or cyclic_equal(u, v.inverse())


def are_independent(words: Sequence[Word]) -> bool:
    """No two distinct members have conjugate nontrivial powers.

    Nonzero powers of ``u`` and ``v`` are conjugate iff their primitive roots
    agree as cyclic words up to inversion.
    """
    roots = []
    for w in words:
        if not w.letters:
            raise WordError("empty word in set")
        roots.append(primitive_root(cyclic_reduce(w))[0])
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if conjugate_cyclic_words(roots[i], roots[j]):
                return False
    return True


@dataclass(frozen=True)
class Automorphism:
    """An endomorphism of F given by the images of the generators.

    ``images[i]`` is the image of generator ``i + 1``. Whether the images
    form a basis is not checked here; Whitehead moves are automorphisms by
    construction.
    """

    images: tuple[Word, ...]

    @classmethod
    def identity(cls, rank: int) -> "Automorphism":
        return cls(tuple(Word((i,), rank) for i in range(1, rank + 1)))

    @classmethod
    def from_text(cls, images: Sequence[str], rank: int | None = None) -> "Automorphism":
        rank = rank if rank is not None else len(images)
        return cls(tuple(parse_word(t, rank) for t in images))

    @property
    def rank(self) -> int:
        return len(self.images)

    def image_letters(self, x: int) -> tuple[int, ...]:
        img = self.images[abs(x) - 1].letters
        if x > 0:
            return img
        return tuple(-y for y in reversed(img))

    def __call__(self, w: Word) -> Word:
        return apply_automorphism(self, w)

    def then(self, other: "Automorphism") -> "Automorphism":
        """The composite ``other ∘ self`` (apply self first)."""
        return Automorphism(tuple(other(img) for img in self.images))

    def __str__(self) -> str:
        return ", ".join(f"{letter_name(i + 1)}->{img}" for i, img in enumerate(self.images))


def apply_automorphism(phi: Automorphism, w: Word) -> Word:
    if w.rank > phi.rank and any(abs(x) > phi.rank for x in w.letters):
        raise WordError(f"automorphism of rank {phi.rank} applied to {w}")
    out: list[int] = []
    for x in w.letters:
        out.extend(phi.image_letters(x))
    rank = max(phi.rank, w.rank)
    return Word(free_reduce(out), rank)
