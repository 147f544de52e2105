"""Search for polygonality certificates through cycle decompositions of W(f(U)).

A transition system pairs up the edge-incidences at each generator vertex
``a_q``; the connecting map carries that pairing to ``a_q^-1``. Following the
pairs traces the graph into closed walks. When every walk is a simple cycle
and at least one is longer than a bigon, the walks are the vertex links of a
surface glued from polygons reading the summands of ``f`` with
``euler < m``.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence

import networkx as nx

from .freegroup import Word, WordError, are_independent, letter_name, primitive_root
from .surface import CycleDecomposition, SurfaceReport, build_surface, check_decomposition
from .whitehead import Incidence, Polynomial, WhiteheadGraph, whitehead_graph

JOBS_ENV = "POLYGONAL_JOBS"


@dataclass(frozen=True)
class SearchBounds:
    max_exponent: int = 2
    max_coefficient: int = 2
    max_edges: int = 64
    time_budget: float | None = None

    def __post_init__(self):
        if min(self.max_exponent, self.max_coefficient, self.max_edges) < 1:
            raise ValueError("search bounds must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time budget must be positive")

    def to_json(self) -> dict:
        return {
            "max_exponent": self.max_exponent,
            "max_coefficient": self.max_coefficient,
            "max_edges": self.max_edges,
            "time_budget": self.time_budget,
        }


def enumerate_polynomials(word_lengths: Sequence[int], bounds: SearchBounds) -> Iterator[Polynomial]:
    """All polynomials within bounds, by edge count and then coefficient vector.

    The coefficient vector lists ``c_ij`` by word index, then exponent, so for
    equal edge counts higher powers come before more copies (``x^2`` before
    ``2x``).
    """
    slots = [(i, j) for i in range(len(word_lengths)) for j in range(1, bounds.max_exponent + 1)]
    found = []
    for vec in product(range(bounds.max_coefficient + 1), repeat=len(slots)):
        if not any(vec):
            continue
        edges = sum(c * j * word_lengths[i] for c, (i, j) in zip(vec, slots))
        if edges <= bounds.max_edges:
            found.append((edges, vec))
    found.sort()
    for _, vec in found:
        yield Polynomial(tuple((i, j, c) for c, (i, j) in zip(vec, slots) if c))


@dataclass(frozen=True)
class TransitionSystem:
    """Perfect matchings of incidences at each generator vertex.

    ``pairs[q]`` lists edge-id pairs matched at vertex ``q > 0``; the pairs at
    ``-q`` are induced through the connecting map.
    """

    pairs: dict[int, tuple[tuple[int, int], ...]]

    def partner_map(self, g: WhiteheadGraph) -> dict[Incidence, Incidence]:
        partner: dict[Incidence, Incidence] = {}
        for q, pairs in self.pairs.items():
            for e1, e2 in pairs:
                partner[(e1, q)] = (e2, q)
                partner[(e2, q)] = (e1, q)
                f1, f2 = g.sigma((e1, q)), g.sigma((e2, q))
                partner[(f1, -q)] = (f2, -q)
                partner[(f2, -q)] = (f1, -q)
        return partner

    def induced(self, g: WhiteheadGraph) -> dict[int, tuple[tuple[int, int], ...]]:
        """Matchings at every vertex, including the derived ones at inverses."""
        out = {}
        for q, pairs in self.pairs.items():
            out[q] = pairs
            out[-q] = tuple(tuple(sorted((g.sigma((e1, q)), g.sigma((e2, q))))) for e1, e2 in pairs)
        return out

    def to_json(self) -> dict:
        return {letter_name(q): [list(p) for p in pairs] for q, pairs in sorted(self.pairs.items())}


def perfect_matchings(items: Sequence) -> Iterator[tuple[tuple, ...]]:
    """Perfect matchings in canonical order: the first item is paired with each later one in turn."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest)):
        for tail in perfect_matchings(rest[:k] + rest[k + 1:]):
            yield ((first, rest[k]),) + tail


def odd_generator(g: WhiteheadGraph) -> int | None:
    for q in g.alphabet.generators():
        if g.degree(q) % 2:
            return q
    return None


def enumerate_transition_systems(g: WhiteheadGraph) -> Iterator[TransitionSystem]:
    """Every transition system of ``g`` (empty when some generator has odd degree)."""
    if odd_generator(g) is not None:
        return
    gens = [q for q in g.alphabet.generators() if g.degree(q)]
    per_vertex = [list(perfect_matchings([e for e, _ in g.incidences_at(q)])) for q in gens]
    for choice in product(*per_vertex):
        yield TransitionSystem(dict(zip(gens, choice)))


def count_transition_systems(g: WhiteheadGraph) -> int:
    if odd_generator(g) is not None:
        return 0
    total = 1
    for q in g.alphabet.generators():
        for k in range(g.degree(q) - 1, 0, -2):
            total *= k
    return total


def _trace(g: WhiteheadGraph, partner: dict[Incidence, Incidence]) -> CycleDecomposition:
    used = set()
    cycles, vertices = [], []
    for e0 in g.edges:
        if e0.id in used:
            continue
        edges, verts = [], []
        cur, at = e0.id, e0.ends[1]
        while True:
            used.add(cur)
            edges.append(cur)
            verts.append(at)
            nxt = partner[(cur, at)][0]
            if nxt == e0.id:
                break
            at = g.edges[nxt].other_end(at)
            cur = nxt
        cycles.append(tuple(edges))
        vertices.append(tuple(verts))
    return CycleDecomposition(tuple(cycles), tuple(vertices))


def trace_cycles(g: WhiteheadGraph, ts: TransitionSystem) -> tuple[CycleDecomposition | None, str | None]:
    """Trace ``ts`` into closed walks.

    Returns ``(decomposition, None)`` when every walk is simple and one is
    longer than two, else ``(None, reason)`` with reason ``"non-simple"`` or
    ``"all-bigons"``.
    """
    dec = _trace(g, ts.partner_map(g))
    if not dec.all_simple():
        return None, "non-simple"
    if not dec.has_non_bigon():
        return None, "all-bigons"
    return dec, None


def support_has_long_cycle(g: WhiteheadGraph) -> bool:
    """Whether the underlying simple graph has any cycle (necessarily of length >= 3)."""
    h = nx.Graph()
    h.add_edges_from(e.ends for e in g.edges)
    return not nx.is_forest(h)


class SearchTimeout(Exception):
    pass


class _Backtracker:
    """Enumerate accepted transition systems of one graph in canonical order.

    Choices are made at generator vertices in order, smallest unmatched
    incidence first, so solutions appear in the same order as
    :func:`enumerate_transition_systems`. A branch is cut as soon as some
    partial walk repeats a vertex.
    """

    def __init__(self, g: WhiteheadGraph, deadline: float | None = None):
        self.g = g
        self.deadline = deadline
        self.order: list[Incidence] = [inc for q in g.alphabet.generators() for inc in g.incidences_at(q)]
        self.partner: dict[Incidence, Incidence] = {}
        self.nodes = 0

    def candidates(self, inc: Incidence) -> list[Incidence]:
        q = inc[1]
        return [x for x in self.g.incidences_at(q) if x[0] > inc[0] and x not in self.partner]

    def _assign(self, a: Incidence, b: Incidence) -> list[Incidence]:
        q = a[1]
        fa, fb = (self.g.sigma(a), -q), (self.g.sigma(b), -q)
        for x, y in ((a, b), (fa, fb)):
            self.partner[x] = y
            self.partner[y] = x
        return [a, b, fa, fb]

    def _undo(self, incs: list[Incidence]) -> None:
        for x in incs:
            del self.partner[x]

    def _walk(self, e: int, v: int) -> tuple[list[int], int, bool]:
        """Leave edge ``e`` through ``v``; return joint vertices, final vertex, closed flag."""
        joints = []
        cur, at = e, v
        while True:
            inc = (cur, at)
            if inc not in self.partner:
                return joints, at, False
            joints.append(at)
            nxt = self.partner[inc][0]
            if nxt == e:
                return joints, at, True
            at = self.g.edges[nxt].other_end(at)
            cur = nxt

    def _component_ok(self, e: int) -> bool:
        ends = self.g.edges[e].ends
        joints, _, closed = self._walk(e, ends[1])
        if closed:
            return len(set(joints)) == len(joints)
        back, x0, _ = self._walk(e, ends[0])
        _, xk, _ = self._walk(e, ends[1])
        internal = back + joints
        if len(set(internal)) != len(internal):
            return False
        return x0 not in internal and xk not in internal

    def _consistent(self, incs: list[Incidence]) -> bool:
        return all(self._component_ok(e) for e, _ in incs)

    def solutions(self, first_choice: int | None = None) -> Iterator[dict[Incidence, Incidence]]:
        """Yield partner maps of accepted systems; ``first_choice`` fixes the very first pairing."""
        yield from self._extend(0, first_choice)

    def _extend(self, idx: int, forced: int | None) -> Iterator[dict[Incidence, Incidence]]:
        while idx < len(self.order) and self.order[idx] in self.partner:
            idx += 1
        if idx == len(self.order):
            if any(len(c) > 2 for c in _trace(self.g, self.partner).cycles):
                yield dict(self.partner)
            return
        self.nodes += 1
        if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise SearchTimeout
        inc = self.order[idx]
        cands = self.candidates(inc)
        if forced is not None:
            cands = cands[forced:forced + 1]
        for other in cands:
            incs = self._assign(inc, other)
            if self._consistent(incs):
                yield from self._extend(idx + 1, None)
            self._undo(incs)

    def first_branch_count(self) -> int:
        return len(self.candidates(self.order[0])) if self.order else 0


def _system_from_partner(g: WhiteheadGraph, partner: dict[Incidence, Incidence]) -> TransitionSystem:
    pairs = {}
    for q in g.alphabet.generators():
        ps = sorted({tuple(sorted((e, partner[(e, q)][0]))) for e, _ in g.incidences_at(q)})
        if ps:
            pairs[q] = tuple(ps)
    return TransitionSystem(pairs)


@dataclass(frozen=True)
class PolygonalityCertificate:
    kind: str  # "proper_power" or "surface"
    words: tuple[Word, ...]
    word_index: int | None = None
    root: Word | None = None
    exponent: int | None = None
    polynomial: Polynomial | None = None
    transition_system: TransitionSystem | None = None
    decomposition: CycleDecomposition | None = None
    surface: SurfaceReport | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        if self.kind == "proper_power":
            return {
                "kind": "proper_power",
                "word": str(self.words[self.word_index]),
                "root": str(self.root),
                "exponent": self.exponent,
            }
        return {
            "kind": "surface",
            "f": self.polynomial.format(len(self.words)),
            "coefficients": self.polynomial.to_json(),
            "matchings": self.transition_system.to_json(),
            "cycles": self.decomposition.to_json(),
            "cycle_lengths": self.decomposition.length_profile(),
            "surface": self.surface.to_json(),
        }


@dataclass
class SearchResult:
    status: str  # "found", "exhausted" or "timeout"
    certificates: list[PolygonalityCertificate]
    bounds: SearchBounds
    polynomials_tried: list[tuple[Polynomial, str]]

    @property
    def certificate(self) -> PolygonalityCertificate | None:
        return self.certificates[0] if self.certificates else None

    def to_json(self) -> dict:
        n = len(self.certificates[0].words) if self.certificates else 1
        return {
            "op": "search_certificate",
            "status": self.status,
            "bounds": self.bounds.to_json(),
            "polynomials": [{"f": f.format(n), "outcome": why} for f, why in self.polynomials_tried],
            "certificates": [c.to_json() for c in self.certificates],
        }


def _certify(words, g: WhiteheadGraph, partner) -> PolygonalityCertificate:
    ts = _system_from_partner(g, partner)
    dec = _trace(g, partner)
    problems = check_decomposition(g, dec)
    if problems:
        raise AssertionError(f"accepted decomposition violates: {problems}")
    report = build_surface(g, dec)
    if not report.immersed or not report.euler < report.m:
        raise AssertionError("surface from accepted decomposition is not polygonal")
    if (report.euler < report.m) != (2 * dec.t < sum(dec.lengths())):
        raise AssertionError("euler count disagrees with cycle lengths")
    return PolygonalityCertificate(
        "surface", tuple(words), polynomial=g.polynomial, transition_system=ts, decomposition=dec, surface=report
    )


def _branch_worker(args):
    words, f, branch, deadline, collect_all = args
    g = whitehead_graph(words, f)
    bt = _Backtracker(g, deadline)
    out = []
    try:
        for partner in bt.solutions(branch):
            out.append(partner)
            if not collect_all:
                break
    except SearchTimeout:
        return out, True
    return out, False


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def _check_input(words: Sequence[Word]) -> tuple[Word, ...]:
    words = tuple(words)
    if not words:
        raise WordError("empty word set")
    for w in words:
        if not w.letters:
            raise WordError("empty word in set")
        if not w.is_cyclically_reduced():
            raise WordError(f"{w} is not cyclically reduced")
    if not are_independent(words):
        raise WordError("word set is not independent")
    rank = max(w.rank for w in words)
    return tuple(w.with_rank(rank) for w in words)


def search_surface(
    words: Sequence[Word] | Word,
    bounds: SearchBounds = SearchBounds(),
    jobs: int | None = None,
    find_all: bool = False,
) -> SearchResult:
    """Search polynomials and transition systems for a surface certificate.

    Proper powers get no special treatment here. The first certificate in
    canonical order is returned regardless of ``jobs``; ``find_all`` collects
    every accepted decomposition within bounds.
    """
    if isinstance(words, Word):
        words = (words,)
    words = _check_input(words)
    jobs = default_jobs() if jobs is None else max(1, jobs)
    deadline = None if bounds.time_budget is None else time.monotonic() + bounds.time_budget
    certificates: list[PolygonalityCertificate] = []
    tried: list[tuple[Polynomial, str]] = []
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for f in enumerate_polynomials([len(w) for w in words], bounds):
            g = whitehead_graph(words, f)
            q = odd_generator(g)
            if q is not None:
                tried.append((f, f"odd degree at {letter_name(q)}"))
                continue
            if not support_has_long_cycle(g):
                tried.append((f, "support is a forest: only bigons"))
                continue
            branches = _Backtracker(g).first_branch_count()
            tasks = [(words, f, b, deadline, find_all) for b in range(branches)]
            results = pool.map(_branch_worker, tasks) if pool else map(_branch_worker, tasks)
            found_here = 0
            timed_out = False
            for partners, hit_deadline in results:
                for partner in partners:
                    certificates.append(_certify(words, g, partner))
                    found_here += 1
                if hit_deadline:
                    timed_out = True
                    break
                if found_here and not find_all:
                    break
            if timed_out:
                tried.append((f, "timeout"))
                return SearchResult("timeout" if not certificates else "found", certificates, bounds, tried)
            tried.append((f, f"{found_here} accepted" if found_here else "no decomposition"))
            if certificates and not find_all:
                return SearchResult("found", certificates, bounds, tried)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return SearchResult("found" if certificates else "exhausted", certificates, bounds, tried)


def search(
    words: Sequence[Word] | Word,
    bounds: SearchBounds = SearchBounds(),
    jobs: int | None = None,
    find_all: bool = False,
) -> SearchResult:
    """Proper-power shortcut, then :func:`search_surface`."""
    if isinstance(words, Word):
        words = (words,)
    words = _check_input(words)
    for i, w in enumerate(words):
        root, k = primitive_root(w)
        if k >= 2:
            cert = PolygonalityCertificate("proper_power", words, word_index=i, root=root, exponent=k)
            return SearchResult("found", [cert], bounds, [])
    return search_surface(words, bounds, jobs, find_all)


def search_certificate(
    words: Sequence[Word] | Word, bounds: SearchBounds = SearchBounds(), jobs: int | None = None
) -> PolygonalityCertificate | None:
    """First certificate in canonical order, or None when bounds are exhausted.

    ``None`` does not prove the set non-polygonal.
    """
    return search(words, bounds, jobs).certificate
