"""Acceptance suite: one PASS/FAIL line per criterion, printed in the terminal summary.

All quantities are integers, so comparisons are exact; only runtimes carry limits.
"""

import io
import json
import os
import random
import subprocess
import sys
import time

import pytest

import conftest
from polygonal.cli import main
from polygonal.freegroup import Automorphism, Word, apply_automorphism, cyclic_equal, cyclic_reduce, parse_word, primitive_root
from polygonal.graphprops import complete_bipartite, isomorphic_to, manning_obstruction
from polygonal.polygon import SearchBounds, count_transition_systems, search, search_certificate, search_surface
from polygonal.reduce import minimize
from polygonal.surface import oracle_enumerate, polygons_for, verify_side_pairing
from polygonal.whitehead import Polynomial, check_sigma_involution, whitehead_graph

from oracles import cyclically_reduced_words

W1, W2 = "bbaaccabc", "aabbacbccadbdcdd"
PAIRS_W1 = "1-2,3-7,4-16,5-15,6-18,8-11,9-14,10-17,12-13"
PAIRS_W2 = "1-2,3-12,4-7,5-10,6-14,8-9,11-16,13-15"

LIMIT_FAST = 1.0
LIMIT_SEARCH = 10.0
LIMIT_SWEEP = 300.0
RANDOM_WORDS = 1000
SEED = 20240611


def record(n, ok, detail):
    conftest.ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
    assert ok, detail


def cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, json.loads(out.getvalue())


def timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def test_criterion_1_whitehead_goldens():
    def run():
        return (
            isomorphic_to(whitehead_graph(parse_word(W1)), complete_bipartite(3, 3)),
            isomorphic_to(whitehead_graph(parse_word(W2)), complete_bipartite(4, 4)),
        )

    (k33, k44), dt = timed(run)
    record(1, k33 and k44 and dt < LIMIT_FAST, f"W(w1)~K3,3={k33} W(w2)~K4,4={k44} in {dt:.3f}s (<{LIMIT_FAST}s)")


def test_criterion_2_reference_certificates():
    def run():
        return cli("verify", W1, "--power", "2", "--pairs", PAIRS_W1), cli("verify", W2, "--pairs", PAIRS_W2)

    ((c1, s1), (c2, s2)), dt = timed(run)
    got = [(s["polygonal"], s["euler"], s["t"], s["doubled_euler"]) for s in (s1, s2)]
    ok = c1 == c2 == 0 and got == [(True, -4, 4, -10), (True, -3, 4, -8)] and dt < LIMIT_FAST
    record(2, ok, f"(polygonal, chi, t, 2(chi-m)) = {got} in {dt:.3f}s (<{LIMIT_FAST}s)")


@pytest.mark.parametrize(
    "word,argv,f,profile,space",
    [(W1, ["--max-exp", "2"], "x^2", [6, 4, 4, 4], 3375), (W2, [], "x", [4, 4, 4, 4], 81)],
)
def test_criterion_3_search(word, argv, f, profile, space):
    (code, data), dt = timed(lambda: cli("search", word, *argv))
    cert = data["certificates"][0] if data["certificates"] else {}
    g = whitehead_graph(parse_word(word), Polynomial.monomial(2 if f == "x^2" else 1))
    ok = (
        code == 0
        and cert.get("f") == f
        and cert.get("cycle_lengths") == profile
        and count_transition_systems(g) == space
        and dt < LIMIT_SEARCH
    )
    record(3, ok, f"search {word}: f={cert.get('f')} cycles={cert.get('cycle_lengths')} space={space} in {dt:.3f}s (<{LIMIT_SEARCH}s)")


def test_criterion_4_manning():
    (v1, v2), dt = timed(lambda: (manning_obstruction(parse_word(W1)), manning_obstruction(parse_word(W2))))
    ok = v1.applies and v1.k == 3 and v2.applies and v2.k == 4 and dt < LIMIT_FAST
    record(4, ok, f"w1 applies={v1.applies} k={v1.k}; w2 applies={v2.applies} k={v2.k} in {dt:.3f}s (<{LIMIT_FAST}s)")


def test_criterion_5_positive_corpus():
    aabb = search_certificate(parse_word("aabb"))
    abaab = search_certificate(parse_word("aBaab"))
    abab = search_certificate(parse_word("abab"))
    ok = (
        aabb is not None
        and aabb.kind == "surface"
        and aabb.surface.polygonal
        and abaab is not None
        and abaab.kind == "surface"
        and abaab.surface.polygonal
        and abab is not None
        and abab.kind == "proper_power"
    )
    kinds = [c.kind if c else None for c in (aabb, abaab, abab)]
    record(5, ok, f"aabb, aBaab, abab -> {kinds} under default bounds")


def test_criterion_6_negative_at_bound():
    bounds = SearchBounds(max_exponent=2, max_coefficient=2, max_edges=64)
    result = search(parse_word("ababbabbb"), bounds)
    covered = len(result.polynomials_tried)
    ok = result.status == "exhausted" and not result.certificates and covered == 8
    record(6, ok, f"ababbabbb J<=2 C<=2: status={result.status}, {covered}/8 polynomials, no certificate")


def test_criterion_7_reduction():
    w = parse_word("ababbabbb")
    trace = minimize(w)
    phi = Automorphism.from_text(["aBB", "b"])
    target = cyclic_reduce(apply_automorphism(phi, w))
    final = trace.final[0]
    ok = trace.final_length == 5 and (cyclic_equal(final, target) or cyclic_equal(final.inverse(), target))
    record(7, ok, f"minimize -> {final} (length {trace.final_length}), phi image {target}")


@pytest.mark.slow
def test_criterion_8_oracle_equivalence():
    fx = SearchBounds(max_exponent=1, max_coefficient=1, max_edges=64)
    start = time.perf_counter()
    checked = root_free = accepted = 0
    mismatches = []
    for w in cyclically_reduced_words(2, 6):
        truth = any(r.polygonal for r in oracle_enumerate(w))
        accepted += truth
        surface = search_surface(w, fx).status == "found"
        if surface != truth:
            mismatches.append(str(w))
        if primitive_root(w)[1] == 1:
            root_free += 1
            if (search_certificate(w, fx) is not None) != truth:
                mismatches.append(str(w))
        checked += 1
    dt = time.perf_counter() - start
    ok = not mismatches and dt < LIMIT_SWEEP
    record(
        8,
        ok,
        f"{checked} words ({root_free} root-free, {accepted} polygonal via x), mismatches={mismatches[:5]} in {dt:.1f}s (<{LIMIT_SWEEP:.0f}s)",
    )


def random_word(rng, rank, max_len):
    while True:
        letters = [rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(rng.randint(1, max_len))]
        w = cyclic_reduce(Word.from_letters(letters, rank))
        if w.letters:
            return w


def random_pairing(rng, polygons):
    groups = {}
    for i, poly in enumerate(polygons):
        for p, x in enumerate(poly.letters):
            groups.setdefault(abs(x), []).append((i, p))
    pairs = []
    for q in sorted(groups):
        edges = groups[q]
        if len(edges) % 2:
            return None
        rng.shuffle(edges)
        pairs += list(zip(edges[::2], edges[1::2]))
    return pairs


@pytest.mark.slow
def test_criterion_9_invariants():
    rng = random.Random(SEED)
    graphs = surfaces = 0
    failures = []
    for _ in range(RANDOM_WORDS):
        rank = rng.randint(1, 4)
        w = random_word(rng, rank, 30)
        for f in (Polynomial.monomial(1), Polynomial.monomial(2), Polynomial.monomial(1, coefficient=2)):
            g = whitehead_graph(w, f)
            graphs += 1
            if not check_sigma_involution(g):
                failures.append(f"sigma {w}")
            if any(g.degree(v) != g.degree(-v) for v in g.alphabet.generators()):
                failures.append(f"degree {w}")
            if sum(g.degree(v) for v in g.vertices) != 2 * len(g.edges):
                failures.append(f"graph handshake {w}")
            polygons = polygons_for(w, f)
            pairs = random_pairing(rng, polygons)
            if pairs is None:
                continue
            r = verify_side_pairing(polygons, pairs)
            surfaces += 1
            boundary = sum(len(p) for p in polygons)
            if r.edge_count * 2 != boundary or r.euler != r.t - r.edge_count + r.m:
                failures.append(f"euler {w}")
            if sum(len(link) for link in r.links) != 2 * r.edge_count:
                failures.append(f"surface handshake {w}")
            if r.immersed != r.links_simple:
                failures.append(f"immersion {w}")
    for text, budget in ((W1, 18), (W2, 16), ("aabb", 4), ("aBaab", 10)):
        bounds = SearchBounds(max_edges=budget)
        for cert in search_surface(parse_word(text), bounds, find_all=True).certificates:
            r = cert.surface
            surfaces += 1
            if r.euler != r.t - r.edge_count + r.m or sum(len(link) for link in r.links) != 2 * r.edge_count:
                failures.append(f"certificate {text}")
    ok = not failures
    record(9, ok, f"{RANDOM_WORDS} words, {graphs} graphs, {surfaces} surfaces, failures={failures[:5]}")


DETERMINISM_RUNS = [
    ["analyze", W1],
    ["analyze", W2],
    ["verify", W1, "--power", "2", "--pairs", PAIRS_W1],
    ["verify", W2, "--pairs", PAIRS_W2],
    ["search", W1, "--max-exp", "2"],
    ["search", W2],
    ["search", "aabb"],
    ["search", "aBaab"],
    ["search", "abab"],
    ["search", "ababbabbb"],
    ["reduce", "ababbabbb"],
]


@pytest.mark.slow
def test_criterion_10_determinism():
    script = (
        "import sys; from polygonal.cli import main\n"
        "for argv in " + repr(DETERMINISM_RUNS) + ":\n"
        "    main(argv)\n"
    )
    outputs = []
    for seed in ("0", "1", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run([sys.executable, "-c", script], capture_output=True, env=env, check=True)
        outputs.append(proc.stdout)
    jobs = subprocess.run(
        [sys.executable, "-c", script], capture_output=True, env=dict(os.environ, POLYGONAL_JOBS="2"), check=True
    ).stdout
    ok = len(set(outputs + [jobs])) == 1 and len(outputs[0]) > 0
    record(10, ok, f"{len(DETERMINISM_RUNS)} commands x 3 hash seeds + jobs=2: identical={ok}, {len(outputs[0])} bytes")
