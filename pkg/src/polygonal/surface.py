"""Closed surfaces glued from labelled polygons.

A polygon reads a cyclic word; boundary edge ``p`` carries letter ``p`` and
runs from corner ``p`` to corner ``p + 1``. Corner ``c`` sits between edges
``c - 1`` and ``c`` and corresponds to Whitehead-graph edge ``c - 1`` of the
polygon's summand. Paired edges carry the same generator and are glued
head-to-head with respect to their generator orientation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Sequence

from .freegroup import Word, WordError, letter_name
from .whitehead import WhiteheadGraph

ORACLE_MAX_EDGES = 20

BoundaryEdge = tuple[int, int]  # (polygon index, position)


class SidePairingError(ValueError):
    pass


class LabelMismatch(SidePairingError):
    def __init__(self, pair, labels):
        self.pair = pair
        self.labels = labels
        super().__init__(f"pair {pair} joins edges labelled {labels[0]} and {labels[1]}")


class ForbiddenFold(SidePairingError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"pair {pair} folds consecutive edges about their common vertex")


class NotAPartition(SidePairingError):
    pass


class InconsistentDecomposition(ValueError):
    pass


@dataclass(frozen=True)
class PolygonSpec:
    word_index: int
    exponent: int
    copy: int
    letters: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def reading(self) -> str:
        return "".join(letter_name(x) for x in self.letters)

    def to_json(self) -> dict:
        return {"word": self.word_index, "exponent": self.exponent, "copy": self.copy, "reads": self.reading()}


def polygons_for(words: Sequence[Word] | Word, f=None) -> list[PolygonSpec]:
    """One polygon per summand of ``f``, in the same order as :func:`whitehead_graph`."""
    from .whitehead import Polynomial

    if isinstance(words, Word):
        words = (words,)
    f = f or Polynomial.monomial()
    return [PolygonSpec(i, j, k, (words[i] ** j).letters) for i, j, k in f.summands()]


@dataclass(frozen=True)
class CycleDecomposition:
    """Closed edge sequences in a Whitehead graph.

    ``vertices[h][s]`` is the vertex shared by ``cycles[h][s]`` and
    ``cycles[h][s + 1]`` (cyclically).
    """

    cycles: tuple[tuple[int, ...], ...]
    vertices: tuple[tuple[int, ...], ...]

    def lengths(self) -> list[int]:
        return [len(c) for c in self.cycles]

    def length_profile(self) -> list[int]:
        return sorted(self.lengths(), reverse=True)

    @property
    def t(self) -> int:
        return len(self.cycles)

    def is_simple(self, h: int) -> bool:
        vs = self.vertices[h]
        return len(set(vs)) == len(vs)

    def all_simple(self) -> bool:
        return all(self.is_simple(h) for h in range(self.t))

    def has_non_bigon(self) -> bool:
        return any(len(c) > 2 for c in self.cycles)

    def matchings(self) -> dict[int, set[frozenset]]:
        """Consecutive pairs at each vertex, as sets of ``{(e, v), (e', v)}``."""
        out: dict[int, set[frozenset]] = {}
        for cyc, vs in zip(self.cycles, self.vertices):
            n = len(cyc)
            for s in range(n):
                v = vs[s]
                out.setdefault(v, set()).add(frozenset({(cyc[s], v), (cyc[(s + 1) % n], v)}))
        return out

    def canonical(self) -> "CycleDecomposition":
        forms = []
        for cyc, vs in zip(self.cycles, self.vertices):
            n = len(cyc)
            options = []
            for r in range(n):
                options.append(tuple((cyc[(r + s) % n], vs[(r + s) % n]) for s in range(n)))
                # reversed traversal: edge order flips, shared vertices shift by one
                rev_e = [cyc[(r - s) % n] for s in range(n)]
                rev_v = [vs[(r - s - 1) % n] for s in range(n)]
                options.append(tuple(zip(rev_e, rev_v)))
            forms.append(min(options))
        forms.sort()
        return CycleDecomposition(
            tuple(tuple(e for e, _ in f) for f in forms),
            tuple(tuple(v for _, v in f) for f in forms),
        )

    def to_json(self) -> list[dict]:
        return [
            {"edges": list(c), "vertices": [letter_name(v) for v in vs], "length": len(c)}
            for c, vs in zip(self.cycles, self.vertices)
        ]


def check_decomposition(g: WhiteheadGraph, dec: CycleDecomposition, require_non_bigon: bool = True) -> list[str]:
    """Check the four cycle conditions independently; return the violations found."""
    problems = []
    used = Counter(e for c in dec.cycles for e in c)
    if set(used) != {e.id for e in g.edges} or any(n != 1 for n in used.values()):
        problems.append("cycles do not partition the edge set")
        return problems
    walks_ok = True
    for h, (cyc, vs) in enumerate(zip(dec.cycles, dec.vertices)):
        n = len(cyc)
        for s in range(n):
            v = vs[s]
            if v not in g.edges[cyc[s]].ends or v not in g.edges[cyc[(s + 1) % n]].ends:
                problems.append(f"cycle {h} is not a closed walk at step {s}")
                walks_ok = False
                break
        else:
            # consecutive edges must leave through their other end
            for s in range(n):
                if g.edges[cyc[s]].other_end(vs[s - 1]) != vs[s]:
                    problems.append(f"cycle {h} is not a closed walk at step {s}")
                    walks_ok = False
                    break
        if not dec.is_simple(h):
            problems.append(f"cycle {h} is not simple")
    if not walks_ok:
        # matchings are meaningless on broken walks
        return problems
    matched = dec.matchings()
    for v, pairs in matched.items():
        for pair in pairs:
            (e1, _), (e2, _) = sorted(pair)
            image = frozenset({(g.sigma((e1, v)), -v), (g.sigma((e2, v)), -v)})
            if image not in matched.get(-v, set()):
                problems.append(f"sigma does not carry pair {sorted(pair)} at {letter_name(v)} to a consecutive pair")
    if require_non_bigon and not dec.has_non_bigon():
        problems.append("every cycle is a bigon")
    return problems


@dataclass(frozen=True)
class SurfaceReport:
    t: int
    edge_count: int
    m: int
    euler: int
    links: tuple[tuple[tuple[int, int], ...], ...]
    immersed: bool
    links_simple: bool
    orientable: bool
    components: int
    decomposition: CycleDecomposition
    polygons: tuple[PolygonSpec, ...] = field(repr=False)
    pairing: tuple[tuple[BoundaryEdge, BoundaryEdge], ...] = field(repr=False)

    @property
    def polygonal(self) -> bool:
        return self.immersed and self.euler < self.m

    @property
    def doubled_euler(self) -> int:
        return doubled_euler(self)

    @property
    def cover_degree_hint(self) -> int:
        return self.t

    @property
    def genus(self) -> int | None:
        if self.components != 1:
            return None
        return (2 - self.euler) // 2 if self.orientable else 2 - self.euler

    def to_json(self) -> dict:
        return {
            "polygons": [p.to_json() for p in self.polygons],
            "pairs": [[list(a), list(b)] for a, b in self.pairing],
            "t": self.t,
            "edge_count": self.edge_count,
            "m": self.m,
            "euler": self.euler,
            "doubled_euler": self.doubled_euler,
            "cover_degree_hint": self.cover_degree_hint,
            "immersed": self.immersed,
            "polygonal": self.polygonal,
            "orientable": self.orientable,
            "components": self.components,
            "genus": self.genus,
            "links": [[{"polygon": p, "corner": c} for p, c in link] for link in self.links],
            "cycles": self.decomposition.to_json(),
            "cycle_lengths": self.decomposition.length_profile(),
        }


def doubled_euler(report: SurfaceReport) -> int:
    return 2 * (report.euler - report.m)


def _validate_pairing(polygons: Sequence[PolygonSpec], pairs) -> dict[BoundaryEdge, BoundaryEdge]:
    partner: dict[BoundaryEdge, BoundaryEdge] = {}
    all_edges = {(i, p) for i, poly in enumerate(polygons) for p in range(len(poly))}
    for pair in pairs:
        a, b = (tuple(x) for x in pair)
        if a == b:
            raise NotAPartition(f"edge {a} paired with itself")
        for x in (a, b):
            if x not in all_edges:
                raise NotAPartition(f"no boundary edge {x}")
            if x in partner:
                raise NotAPartition(f"edge {x} appears in two pairs")
        partner[a], partner[b] = b, a
    missing = all_edges - set(partner)
    if missing:
        raise NotAPartition(f"unpaired edges {sorted(missing)}")
    for a, b in pairs:
        la, lb = polygons[a[0]].letters[a[1]], polygons[b[0]].letters[b[1]]
        if abs(la) != abs(lb):
            raise LabelMismatch((a, b), (letter_name(la), letter_name(lb)))
        if a[0] == b[0]:
            n = len(polygons[a[0]])
            for x, y in ((a, b), (b, a)):
                if (x[1] + 1) % n == y[1]:
                    # common vertex: end of x, start of y; fixed iff both heads or both tails
                    lx, ly = polygons[x[0]].letters[x[1]], polygons[y[0]].letters[y[1]]
                    if (lx > 0) != (ly > 0):
                        raise ForbiddenFold((a, b))
    return partner


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def verify_side_pairing(polygons: Sequence[PolygonSpec], pairs) -> SurfaceReport:
    """Glue the polygons along ``pairs`` and report on the resulting closed surface.

    ``pairs`` holds ``((polygon, position), (polygon, position))`` entries with
    0-based positions. The links of the surface's vertices are returned both as
    corner sequences and as a cycle decomposition of the Whitehead graph of the
    polygons' summands.
    """
    polygons = tuple(polygons)
    pairs = tuple((tuple(a), tuple(b)) for a, b in pairs)
    partner = _validate_pairing(polygons, pairs)
    sizes = [len(p) for p in polygons]
    offsets = [sum(sizes[:i]) for i in range(len(sizes))]

    def start(x):
        return (x[0], x[1])

    def end(x):
        return (x[0], (x[1] + 1) % sizes[x[0]])

    def head(x):
        return end(x) if polygons[x[0]].letters[x[1]] > 0 else start(x)

    def tail(x):
        return start(x) if polygons[x[0]].letters[x[1]] > 0 else end(x)

    corners = [(i, c) for i, n in enumerate(sizes) for c in range(n)]
    uf = _UnionFind(corners)
    for a, b in pairs:
        uf.union(head(a), head(b))
        uf.union(tail(a), tail(b))
    classes = sorted({uf.find(c) for c in corners})
    t = len(classes)

    # immersion: at most one incoming and one outgoing S-edge per label at each vertex
    ends = Counter()
    for a, b in pairs:
        q = abs(polygons[a[0]].letters[a[1]])
        ends[(uf.find(head(a)), q, "in")] += 1
        ends[(uf.find(tail(a)), q, "out")] += 1
    immersed = all(n <= 1 for n in ends.values())

    # link walks; a step crosses an S-edge end, landing on the partner's matching corner
    seen = set()
    links = []
    cycles = []
    cycle_vertices = []
    for c0 in corners:
        if c0 in seen:
            continue
        link = []
        w_edges = []
        w_vertices = []
        corner, side = c0, "right"
        while True:
            seen.add(corner)
            link.append(corner)
            i, c = corner
            w_edges.append(offsets[i] + (c - 1) % sizes[i])
            if side == "right":
                x = (i, c)
                role = "tail" if polygons[i].letters[c] > 0 else "head"
            else:
                x = (i, (c - 1) % sizes[i])
                role = "head" if polygons[i].letters[x[1]] > 0 else "tail"
            q = abs(polygons[i].letters[x[1]])
            w_vertices.append(q if role == "head" else -q)
            y = partner[x]
            target = head(y) if role == "head" else tail(y)
            if target == start(y):
                corner, side = start(y), "left"
            else:
                corner, side = end(y), "right"
            if corner == c0:
                break
        links.append(tuple(link))
        cycles.append(tuple(w_edges))
        cycle_vertices.append(tuple(w_vertices))
    if len(links) != t:
        raise AssertionError("link count disagrees with vertex count")
    # w_vertices[s] is the vertex crossed after w_edges[s], i.e. shared with w_edges[s+1]
    dec = CycleDecomposition(tuple(cycles), tuple(cycle_vertices))

    edge_count = sum(sizes) // 2
    m = len(polygons)
    orientable, components = _orientability(polygons, pairs)
    return SurfaceReport(
        t=t,
        edge_count=edge_count,
        m=m,
        euler=t - edge_count + m,
        links=tuple(links),
        immersed=immersed,
        links_simple=dec.all_simple(),
        orientable=orientable,
        components=components,
        decomposition=dec,
        polygons=polygons,
        pairing=pairs,
    )


def _orientability(polygons, pairs) -> tuple[bool, int]:
    """Two-colour polygon orientations so every glued edge is traversed oppositely."""
    adj = {i: [] for i in range(len(polygons))}
    for a, b in pairs:
        # same relative sign means orientations must differ
        flip = (polygons[a[0]].letters[a[1]] > 0) == (polygons[b[0]].letters[b[1]] > 0)
        adj[a[0]].append((b[0], flip))
        adj[b[0]].append((a[0], flip))
    sign: dict[int, bool] = {}
    orientable = True
    components = 0
    for s in adj:
        if s in sign:
            continue
        components += 1
        sign[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for v, flip in adj[u]:
                want = sign[u] != flip
                if v not in sign:
                    sign[v] = want
                    stack.append(v)
                elif sign[v] != want:
                    orientable = False
    return orientable, components


def side_pairing_from_decomposition(g: WhiteheadGraph, dec: CycleDecomposition) -> list[tuple[BoundaryEdge, BoundaryEdge]]:
    """Pair boundary edges whose terminal corners are consecutive at a generator vertex."""
    summand_of = {}
    for s_idx, s in enumerate(g.summands):
        for p in range(s.length):
            summand_of[s.offset + p] = (s_idx, p)

    def terminal_edge(e: int, q: int) -> BoundaryEdge:
        s_idx, p = summand_of[e]
        letters = g.summands[s_idx].word.letters
        if letters[p] == q:
            return (s_idx, p)
        return (s_idx, (p + 1) % len(letters))

    pairs = []
    matched = dec.matchings()
    for q in g.alphabet.generators():
        for pair in sorted(tuple(sorted(pr)) for pr in matched.get(q, ())):
            (e1, _), (e2, _) = pair
            pairs.append((terminal_edge(e1, q), terminal_edge(e2, q)))
    return pairs


def build_surface(g: WhiteheadGraph, dec: CycleDecomposition) -> SurfaceReport:
    """Assemble the surface whose vertex links are the cycles of ``dec``.

    ``dec`` must partition the edges into simple closed walks whose consecutive
    pairs are carried to consecutive pairs by the connecting map; all-bigon
    decompositions are accepted and give ``euler == m``.
    """
    problems = check_decomposition(g, dec, require_non_bigon=False)
    if problems:
        raise InconsistentDecomposition("; ".join(problems))
    polygons = [PolygonSpec(s.word_index, s.exponent, s.copy, s.word.letters) for s in g.summands]
    report = verify_side_pairing(polygons, side_pairing_from_decomposition(g, dec))
    if report.decomposition.canonical() != dec.canonical():
        raise AssertionError("links of the glued surface differ from the decomposition")
    return report


def _perfect_matchings(items: Sequence) -> Iterator[list[tuple]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest)):
        for tail in _perfect_matchings(rest[:k] + rest[k + 1:]):
            yield [(first, rest[k])] + tail


def oracle_pairings(polygons: Sequence[PolygonSpec]) -> Iterator[list[tuple[BoundaryEdge, BoundaryEdge]]]:
    """Every label-respecting pairing of the polygons' boundary edges."""
    groups: dict[int, list[BoundaryEdge]] = {}
    for i, poly in enumerate(polygons):
        for p, x in enumerate(poly.letters):
            groups.setdefault(abs(x), []).append((i, p))
    if any(len(g) % 2 for g in groups.values()):
        return
    per_label = [list(_perfect_matchings(groups[q])) for q in sorted(groups)]
    for choice in product(*per_label):
        yield [pair for part in choice for pair in part]


def oracle_enumerate(w: Word, exponent: int = 1, copies: int = 1) -> list[SurfaceReport]:
    """Brute force: glue ``copies`` polygons reading ``w**exponent`` in every admissible way."""
    if not w.letters or not w.is_cyclically_reduced():
        raise WordError(f"{w} must be nonempty and cyclically reduced")
    total = copies * exponent * len(w)
    if total > ORACLE_MAX_EDGES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_EDGES} boundary edges, got {total}")
    polygons = [PolygonSpec(0, exponent, k, (w ** exponent).letters) for k in range(copies)]
    reports = []
    for pairs in oracle_pairings(polygons):
        try:
            reports.append(verify_side_pairing(polygons, pairs))
        except ForbiddenFold:
            continue
    return reports
