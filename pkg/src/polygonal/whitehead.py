"""Whitehead graphs W(f(U)) with edge provenance and the connecting map."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .freegroup import Alphabet, Word, WordError, letter_name


@dataclass(frozen=True)
class Polynomial:
    """A nonzero polynomial ``sum c_ij x_i^j`` with nonnegative coefficients.

    ``terms`` holds ``(word_index, exponent, coefficient)`` triples with a
    0-based word index, sorted, and only positive coefficients kept.
    """

    terms: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        cleaned = tuple(sorted(t for t in self.terms if t[2] > 0))
        for i, j, c in cleaned:
            if i < 0 or j < 1:
                raise ValueError(f"bad term {(i, j, c)}")
        if len({(i, j) for i, j, _ in cleaned}) != len(cleaned):
            raise ValueError("repeated monomial")
        if not cleaned:
            raise ValueError("polynomial must be nonzero")
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def from_dict(cls, coeffs: Mapping[tuple[int, int], int]) -> "Polynomial":
        return cls(tuple((i, j, c) for (i, j), c in coeffs.items()))

    @classmethod
    def monomial(cls, exponent: int = 1, word_index: int = 0, coefficient: int = 1) -> "Polynomial":
        return cls(((word_index, exponent, coefficient),))

    def coefficient(self, word_index: int, exponent: int) -> int:
        for i, j, c in self.terms:
            if (i, j) == (word_index, exponent):
                return c
        return 0

    @property
    def num_terms(self) -> int:
        return sum(c for _, _, c in self.terms)

    def edge_count(self, words: Sequence[Word]) -> int:
        return sum(c * j * len(words[i]) for i, j, c in self.terms)

    def summands(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(i, j, k)`` for every copy, in lexicographic order."""
        for i, j, c in self.terms:
            for k in range(c):
                yield i, j, k

    def format(self, num_words: int = 1) -> str:
        parts = []
        for i, j, c in self.terms:
            var = "x" if num_words == 1 else f"x{i + 1}"
            mono = var if j == 1 else f"{var}^{j}"
            parts.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.format(1 + max(i for i, _, _ in self.terms))

    def to_json(self) -> list[dict]:
        return [{"word": i, "exponent": j, "coefficient": c} for i, j, c in self.terms]


@dataclass(frozen=True)
class WGEdge:
    id: int
    ends: tuple[int, int]  # (v_p, v_{p+1}^-1)
    word_index: int
    exponent: int
    copy: int
    position: int

    def other_end(self, v: int) -> int:
        if v == self.ends[0]:
            return self.ends[1]
        if v == self.ends[1]:
            return self.ends[0]
        raise KeyError(f"{letter_name(v)} is not an end of edge {self.id}")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "ends": [letter_name(v) for v in self.ends],
            "word": self.word_index,
            "exponent": self.exponent,
            "copy": self.copy,
            "position": self.position,
        }


Incidence = tuple[int, int]  # (edge id, vertex)


@dataclass(frozen=True)
class Summand:
    """One term ``w_i^j`` (copy ``k``) of W(f(U)); its edges are ``offset .. offset+len-1``."""

    word_index: int
    exponent: int
    copy: int
    word: Word
    offset: int

    @property
    def length(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class WhiteheadGraph:
    alphabet: Alphabet
    words: tuple[Word, ...]
    polynomial: Polynomial
    summands: tuple[Summand, ...]
    edges: tuple[WGEdge, ...]
    sigma_map: Mapping[Incidence, int] = field(repr=False)

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.alphabet.letters()

    @cached_property
    def _incidences(self) -> dict[int, tuple[Incidence, ...]]:
        at: dict[int, list[Incidence]] = {v: [] for v in self.vertices}
        for e in self.edges:
            for v in e.ends:
                at[v].append((e.id, v))
        return {v: tuple(incs) for v, incs in at.items()}

    def incidences_at(self, v: int) -> tuple[Incidence, ...]:
        if v not in self.alphabet:
            raise KeyError(f"{v} is not a vertex")
        return self._incidences[v]

    def degree(self, v: int) -> int:
        return len(self.incidences_at(v))

    def degrees(self) -> dict[int, int]:
        return {v: self.degree(v) for v in self.vertices}

    def sigma(self, inc: Incidence) -> int:
        try:
            return self.sigma_map[inc]
        except KeyError:
            raise KeyError(f"invalid incidence {inc}") from None

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [e.ends for e in self.edges]

    def to_dot(self, name: str = "W") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            lines.append(f'  "{letter_name(v)}";')
        for e in self.edges:
            u, v = e.ends
            lines.append(f'  "{letter_name(u)}" -- "{letter_name(v)}" [label="{e.id}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "vertices": [letter_name(v) for v in self.vertices],
            "edges": [e.to_json() for e in self.edges],
            "sigma": [
                {"edge": e, "vertex": letter_name(v), "image": img}
                for (e, v), img in sorted(self.sigma_map.items(), key=lambda kv: (kv[0][0], _vkey(kv[0][1])))
            ],
        }


def _vkey(v: int) -> tuple[int, int]:
    return abs(v), 0 if v > 0 else 1


def whitehead_graph(words: Sequence[Word] | Word, f: Polynomial | None = None) -> WhiteheadGraph:
    """Build W(f(U)) as an edge-disjoint union of W(w_i^j) over all summands.

    Edge ``e_p`` of a summand reading ``v_0 v_1 ... v_{L-1}`` joins ``v_p`` and
    ``v_{p+1}^-1``; ``sigma(e_p, v_p) = e_{p-1}`` and
    ``sigma(e_p, v_{p+1}^-1) = e_{p+1}`` with indices mod L.
    """
    if isinstance(words, Word):
        words = (words,)
    words = tuple(words)
    if not words:
        raise WordError("need at least one word")
    if f is None:
        f = Polynomial.monomial()
    rank = max(w.rank for w in words)
    for w in words:
        if not w.letters:
            raise WordError("empty word")
        if not w.is_cyclically_reduced():
            raise WordError(f"{w} is not cyclically reduced")
    if max(i for i, _, _ in f.terms) >= len(words):
        raise ValueError("polynomial refers to a missing word")

    summands = []
    edges = []
    sigma: dict[Incidence, int] = {}
    offset = 0
    for i, j, k in f.summands():
        u = words[i] ** j
        n = len(u)
        summands.append(Summand(i, j, k, u, offset))
        for p in range(n):
            head = u[p]
            tail = -u[(p + 1) % n]
            edges.append(WGEdge(offset + p, (head, tail), i, j, k, p))
            sigma[(offset + p, head)] = offset + (p - 1) % n
            sigma[(offset + p, tail)] = offset + (p + 1) % n
        offset += n
    return WhiteheadGraph(Alphabet(rank), words, f, tuple(summands), tuple(edges), sigma)


def sigma(g: WhiteheadGraph, inc: Incidence) -> int:
    return g.sigma(inc)


def incidences_at(g: WhiteheadGraph, v: int) -> tuple[Incidence, ...]:
    return g.incidences_at(v)


def check_sigma_involution(g: WhiteheadGraph) -> bool:
    for (e, v), img in g.sigma_map.items():
        if -v not in g.edges[img].ends:
            return False
        if g.sigma_map[(img, -v)] != e:
            return False
    return True


def vertex_names(vs: Iterable[int]) -> list[str]:
    return [letter_name(v) for v in vs]
