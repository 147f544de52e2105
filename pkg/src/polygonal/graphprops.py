"""Graph analyses on (Whitehead) multigraphs.

All functions accept a :class:`Multigraph` or anything exposing ``vertices``
and ``edge_pairs()``, such as :class:`~polygonal.whitehead.WhiteheadGraph`.
Parallel edges are kept; loops are allowed in :class:`Multigraph` but never
occur in Whitehead graphs of cyclically reduced words.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Hashable, Sequence

import networkx as nx

from .freegroup import Word
from .whitehead import whitehead_graph

MAX_ISO_VERTICES = 16


@dataclass(frozen=True)
class Multigraph:
    vertices: tuple
    edges: tuple[tuple[Hashable, Hashable], ...]

    def edge_pairs(self):
        return list(self.edges)


def as_multigraph(g) -> Multigraph:
    if isinstance(g, Multigraph):
        return g
    return Multigraph(tuple(g.vertices), tuple(tuple(e) for e in g.edge_pairs()))


def complete_bipartite(m: int, n: int) -> Multigraph:
    left = [("L", i) for i in range(m)]
    right = [("R", j) for j in range(n)]
    return Multigraph(tuple(left + right), tuple((u, v) for u in left for v in right))


def _adjacency(g: Multigraph) -> dict:
    adj = {v: [] for v in g.vertices}
    for u, v in g.edges:
        adj[u].append(v)
        if u != v:
            adj[v].append(u)
    return adj


def degrees(g) -> dict:
    g = as_multigraph(g)
    deg = {v: 0 for v in g.vertices}
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def _components(vertices, adj, removed=None) -> int:
    seen = set() if removed is None else {removed}
    count = 0
    for s in vertices:
        if s in seen:
            continue
        count += 1
        seen.add(s)
        stack = [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return count


def is_connected(g) -> bool:
    g = as_multigraph(g)
    if not g.vertices:
        return True
    return _components(g.vertices, _adjacency(g)) == 1


def cut_vertices(g) -> set:
    """Articulation points: vertices whose removal increases the component count."""
    g = as_multigraph(g)
    adj = _adjacency(g)
    disc: dict = {}
    low: dict = {}
    cuts = set()
    timer = 0
    for root in g.vertices:
        if root in disc:
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        # frames: (vertex, parent, neighbour iterator); parallel edges to the
        # parent are harmless for articulation points
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent or w == v:
                    continue
                if w in disc:
                    low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = timer
                    timer += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, v, iter(adj[w])))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if parent is not None:
                low[parent] = min(low[parent], low[v])
                if parent != root and low[v] >= disc[parent]:
                    cuts.add(parent)
        if root_children >= 2:
            cuts.add(root)
    return cuts


def _max_flow_unit(g: Multigraph, s, t) -> int:
    """Max number of edge-disjoint s-t paths in an undirected multigraph."""
    index = {v: i for i, v in enumerate(g.vertices)}
    n = len(index)
    cap = [dict() for _ in range(n)]
    for u, v in g.edges:
        a, b = index[u], index[v]
        if a == b:
            continue
        cap[a][b] = cap[a].get(b, 0) + 1
        cap[b][a] = cap[b].get(a, 0) + 1
    src, dst = index[s], index[t]
    flow = 0
    while True:
        prev = [-1] * n
        prev[src] = src
        queue = deque([src])
        while queue and prev[dst] == -1:
            x = queue.popleft()
            for y, c in cap[x].items():
                if c > 0 and prev[y] == -1:
                    prev[y] = x
                    queue.append(y)
        if prev[dst] == -1:
            return flow
        y = dst
        while y != src:
            x = prev[y]
            cap[x][y] -= 1
            cap[y][x] = cap[y].get(x, 0) + 1
            y = x
        flow += 1


def edge_connectivity(g) -> int:
    """Minimum number of edges whose removal disconnects ``g`` (0 if already disconnected)."""
    g = as_multigraph(g)
    if len(g.vertices) < 2 or not is_connected(g):
        return 0
    s = g.vertices[0]
    return min(_max_flow_unit(g, s, t) for t in g.vertices[1:])


def simple_graph(g) -> nx.Graph:
    g = as_multigraph(g)
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from((u, v) for u, v in g.edges if u != v)
    return h


def euler_bound_nonplanar(g) -> bool:
    """Cheap sufficient test for non-planarity: simple, connected, V >= 3 and E > 3V - 6."""
    h = simple_graph(g)
    h.remove_nodes_from([v for v, d in h.degree() if d == 0])
    n, m = h.number_of_nodes(), h.number_of_edges()
    return n >= 3 and nx.is_connected(h) and m > 3 * n - 6


def is_planar(g) -> bool:
    """Planarity of the underlying simple graph; parallel edges never matter."""
    if euler_bound_nonplanar(g):
        return False
    planar, _ = nx.check_planarity(simple_graph(g))
    return planar


def is_k_valent(g) -> int | None:
    degs = set(degrees(g).values())
    if len(degs) == 1:
        return degs.pop()
    return None


@dataclass(frozen=True)
class ManningVerdict:
    applies: bool
    k: int | None
    k_valent: bool
    k_edge_connected: bool
    non_planar: bool
    edge_connectivity: int

    def to_json(self) -> dict:
        return {
            "op": "manning_obstruction",
            "applies": self.applies,
            "k": self.k,
            "witness": {
                "k_valent": self.k_valent,
                "k_edge_connected": self.k_edge_connected,
                "non_planar": self.non_planar,
                "edge_connectivity": self.edge_connectivity,
            },
        }


def manning_obstruction(w: Word) -> ManningVerdict:
    """Check whether W(w) is k-valent, k-edge-connected and non-planar for some k >= 3.

    A positive verdict certifies that ``w`` is not virtually geometric; a
    negative one is inconclusive. Runs on W(w) of the word exactly as given.
    """
    g = whitehead_graph(w)
    k = is_k_valent(g)
    lam = edge_connectivity(g)
    non_planar = not is_planar(g)
    valent = k is not None and k >= 3
    connected = valent and lam >= k
    return ManningVerdict(
        applies=valent and connected and non_planar,
        k=k,
        k_valent=valent,
        k_edge_connected=connected,
        non_planar=non_planar,
        edge_connectivity=lam,
    )


def _refine(vertices: Sequence, mult: dict) -> dict:
    """Colour refinement on edge multiplicities; returns vertex -> colour id."""
    colour = {v: 0 for v in vertices}
    while True:
        sig = {
            v: (colour[v], tuple(sorted(Counter((colour[u], m) for u, m in mult[v].items()).items())))
            for v in vertices
        }
        palette = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        new = {v: palette[sig[v]] for v in vertices}
        if len(set(new.values())) == len(set(colour.values())):
            return new
        colour = new


def _multiplicities(g: Multigraph) -> dict:
    mult = {v: Counter() for v in g.vertices}
    for u, v in g.edges:
        mult[u][v] += 1
        if u != v:
            mult[v][u] += 1
    return mult


def isomorphic_to(g, h) -> bool:
    """Multigraph isomorphism by colour-refined backtracking (at most 16 vertices each)."""
    g, h = as_multigraph(g), as_multigraph(h)
    if len(g.vertices) > MAX_ISO_VERTICES or len(h.vertices) > MAX_ISO_VERTICES:
        raise ValueError(f"isomorphism search limited to {MAX_ISO_VERTICES} vertices")
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return False
    # refine jointly so colour ids are comparable across the two graphs
    tagged = Multigraph(
        tuple((0, v) for v in g.vertices) + tuple((1, v) for v in h.vertices),
        tuple(((0, u), (0, v)) for u, v in g.edges) + tuple(((1, u), (1, v)) for u, v in h.edges),
    )
    mult = _multiplicities(tagged)
    colour = _refine(tagged.vertices, mult)
    cg = Counter(colour[(0, v)] for v in g.vertices)
    ch = Counter(colour[(1, v)] for v in h.vertices)
    if cg != ch:
        return False
    order = sorted(g.vertices, key=lambda v: (cg[colour[(0, v)]], -sum(mult[(0, v)].values())))
    candidates = {v: [u for u in h.vertices if colour[(1, u)] == colour[(0, v)]] for v in g.vertices}
    mapping: dict = {}
    used: set = set()

    def consistent(v, u) -> bool:
        if mult[(0, v)][(0, v)] != mult[(1, u)][(1, u)]:
            return False
        for v2, u2 in mapping.items():
            if mult[(0, v)][(0, v2)] != mult[(1, u)][(1, u2)]:
                return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for u in candidates[v]:
            if u in used or not consistent(v, u):
                continue
            mapping[v] = u
            used.add(u)
            if extend(i + 1):
                return True
            del mapping[v]
            used.discard(u)
        return False

    return extend(0)


def graph_summary(g) -> dict:
    from .freegroup import letter_name

    degs = degrees(g)
    name = letter_name if all(isinstance(v, int) for v in degs) else str
    cuts = cut_vertices(g)
    return {
        "vertices": len(degs),
        "edges": len(as_multigraph(g).edges),
        "degrees": {name(v): d for v, d in degs.items()},
        "connected": {"op": "is_connected", "value": is_connected(g)},
        "cut_vertices": {"op": "cut_vertices", "value": [name(v) for v in degs if v in cuts]},
        "edge_connectivity": {"op": "edge_connectivity", "value": edge_connectivity(g)},
        "planar": {"op": "is_planar", "value": is_planar(g)},
        "valence": {"op": "is_k_valent", "value": is_k_valent(g)},
    }
