import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from polygonal.freegroup import Word, WordError, cyclic_reduce, parse_word
from polygonal.polygon import (
    SearchBounds,
    TransitionSystem,
    _Backtracker,
    _trace,
    count_transition_systems,
    enumerate_polynomials,
    enumerate_transition_systems,
    perfect_matchings,
    search,
    search_certificate,
    search_surface,
    trace_cycles,
)
from polygonal.surface import polygons_for, verify_side_pairing
from polygonal.whitehead import Polynomial, whitehead_graph

from oracles import naive_search

W1, W2 = "bbaaccabc", "aabbacbccadbdcdd"
PAIRS_W1 = [(1, 2), (3, 7), (4, 16), (5, 15), (6, 18), (8, 11), (9, 14), (10, 17), (12, 13)]
PAIRS_W2 = [(1, 2), (3, 12), (4, 7), (5, 10), (6, 14), (8, 9), (11, 16), (13, 15)]


def system_from_pairing(text, power, pairs):
    w = parse_word(text)
    f = Polynomial.monomial(power)
    report = verify_side_pairing(polygons_for(w, f), [((0, a - 1), (0, b - 1)) for a, b in pairs])
    matched = report.decomposition.matchings()
    g = whitehead_graph(w, f)
    ts = TransitionSystem(
        {q: tuple(sorted(tuple(sorted(e for e, _ in pr)) for pr in matched[q])) for q in g.alphabet.generators()}
    )
    return g, ts


class TestPolynomials:
    def test_order(self):
        got = [f.format(1) for f in enumerate_polynomials([3], SearchBounds(2, 2, 64))]
        assert got == ["x", "x^2", "2x", "x + x^2", "2x^2", "2x + x^2", "x + 2x^2", "2x + 2x^2"]

    def test_powers_only(self):
        got = [f.format(1) for f in enumerate_polynomials([4], SearchBounds(2, 1, 64))]
        assert got == ["x", "x^2", "x + x^2"]

    def test_copies_only(self):
        assert [f.format(1) for f in enumerate_polynomials([4], SearchBounds(1, 2, 64))] == ["x", "2x"]

    def test_edge_budget(self):
        assert [f.format(1) for f in enumerate_polynomials([9], SearchBounds(2, 2, 9))] == ["x"]

    def test_two_words(self):
        got = [f.format(2) for f in enumerate_polynomials([2, 3], SearchBounds(1, 1, 64))]
        assert got == ["x1", "x2", "x1 + x2"]

    @given(st.lists(st.integers(1, 6), min_size=1, max_size=2), st.integers(1, 2), st.integers(1, 2), st.integers(1, 30))
    def test_sorted_and_bounded(self, lengths, J, C, E):
        fs = list(enumerate_polynomials(lengths, SearchBounds(J, C, E)))
        counts = [sum(c * j * lengths[i] for i, j, c in f.terms) for f in fs]
        assert counts == sorted(counts)
        assert all(c <= E for c in counts)
        assert len(set(fs)) == len(fs)


class TestTransitionSystems:
    def test_perfect_matchings(self):
        assert list(perfect_matchings([1, 2, 3, 4])) == [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))]
        assert len(list(perfect_matchings(list(range(6))))) == 15

    def test_w1_square_count(self):
        g = whitehead_graph(parse_word(W1), Polynomial.monomial(2))
        assert count_transition_systems(g) == 15 ** 3 == 3375
        assert sum(1 for _ in enumerate_transition_systems(g)) == 3375

    def test_w2_count(self):
        g = whitehead_graph(parse_word(W2))
        assert count_transition_systems(g) == 3 ** 4 == 81
        assert sum(1 for _ in enumerate_transition_systems(g)) == 81

    def test_odd_degree(self):
        g = whitehead_graph(parse_word("aba"))
        assert count_transition_systems(g) == 0
        assert list(enumerate_transition_systems(g)) == []

    def test_pairing_w1(self):
        g, ts = system_from_pairing(W1, 2, PAIRS_W1)
        dec, why = trace_cycles(g, ts)
        assert why is None and dec.length_profile() == [6, 4, 4, 4]

    def test_pairing_w2(self):
        g, ts = system_from_pairing(W2, 1, PAIRS_W2)
        dec, why = trace_cycles(g, ts)
        assert why is None and dec.length_profile() == [4, 4, 4, 4]

    def test_doubling_is_all_bigons(self):
        w = parse_word(W1)
        g = whitehead_graph(w, Polynomial.monomial(1, coefficient=2))
        n = len(w)
        ts = TransitionSystem(
            {q: tuple((e, e + n) for e, _ in g.incidences_at(q) if e < n) for q in g.alphabet.generators()}
        )
        assert trace_cycles(g, ts) == (None, "all-bigons")


class TestBacktracker:
    @pytest.mark.parametrize(
        "text,f",
        [
            ("aabb", Polynomial.monomial(1)),
            ("abAB", Polynomial.monomial(1)),
            ("aBaab", Polynomial.monomial(2)),
            (W2, Polynomial.monomial(1)),
            ("aabb", Polynomial.monomial(1, coefficient=2)),
        ],
    )
    def test_matches_naive(self, text, f):
        g = whitehead_graph(parse_word(text), f)
        naive = [dec.canonical() for _, dec in naive_search(g)]
        fast = [_trace(g, p).canonical() for p in _Backtracker(g).solutions()]
        assert fast == naive

    def test_w1_square_matches_naive(self):
        g = whitehead_graph(parse_word(W1), Polynomial.monomial(2))
        naive = naive_search(g)
        fast = list(_Backtracker(g).solutions())
        assert len(fast) == len(naive) > 0
        assert _trace(g, fast[0]).canonical() == naive[0][1].canonical()

    @settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
    @given(
        st.lists(st.integers(1, 3).flatmap(lambda i: st.sampled_from([i, -i])), min_size=2, max_size=8),
        st.sampled_from([(1, 1), (2, 1), (1, 2)]),
    )
    def test_random_matches_naive(self, letters, jc):
        w = cyclic_reduce(Word.from_letters(letters, 3))
        assume(len(w) > 0)
        g = whitehead_graph(w, Polynomial.monomial(jc[0], coefficient=jc[1]))
        assume(count_transition_systems(g) <= 3000)
        naive = [dec.canonical() for _, dec in naive_search(g)]
        fast = [_trace(g, p).canonical() for p in _Backtracker(g).solutions()]
        assert fast == naive


class TestSearch:
    def test_w1(self):
        result = search(parse_word(W1))
        cert = result.certificate
        assert result.status == "found"
        assert cert.polynomial.format(1) == "x^2"
        assert cert.decomposition.length_profile() == [6, 4, 4, 4]
        assert cert.surface.euler == -4
        assert result.polynomials_tried[0][1].startswith("odd degree")

    def test_w2(self):
        cert = search_certificate(parse_word(W2))
        assert cert.polynomial.format(1) == "x"
        assert cert.surface.euler == -3 and cert.surface.polygonal

    def test_aBaab(self):
        cert = search_certificate(parse_word("aBaab"))
        assert cert.polynomial.format(1) == "x^2"
        assert cert.decomposition.length_profile() == [4, 3, 3]

    def test_proper_power(self):
        cert = search_certificate(parse_word("abab"))
        assert cert.kind == "proper_power" and cert.exponent == 2 and str(cert.root) == "ab"

    def test_surface_search_ignores_power(self):
        # W(f(abab)) has forest support for every f, so only the shortcut certifies it
        result = search_surface(parse_word("abab"))
        assert result.status == "exhausted"
        assert search(parse_word("abab")).status == "found"

    def test_exhausted(self):
        result = search(parse_word("ababbabbb"), SearchBounds(2, 2, 64))
        assert result.status == "exhausted" and result.certificate is None
        assert all(why.startswith(("odd degree", "support is a forest")) for _, why in result.polynomials_tried)

    def test_rejects_dependent(self):
        with pytest.raises(WordError):
            search([parse_word("ab"), parse_word("abab")])

    def test_rejects_unreduced(self):
        with pytest.raises(WordError):
            search(Word((1, 2, -1), 2))

    def test_jobs_agree(self):
        one = search_surface(parse_word(W1), SearchBounds(), jobs=1)
        two = search_surface(parse_word(W1), SearchBounds(), jobs=2)
        assert one.to_json() == two.to_json()

    def test_find_all(self):
        bounds = SearchBounds(1, 1, 64)
        result = search_surface(parse_word(W2), bounds, find_all=True)
        g = whitehead_graph(parse_word(W2))
        assert len(result.certificates) == len(naive_search(g))
        assert result.certificates[0].to_json() == search_surface(parse_word(W2), bounds).certificate.to_json()

    def test_certificate_json(self):
        data = search(parse_word(W2)).to_json()
        assert data["op"] == "search_certificate"
        cert = data["certificates"][0]
        assert cert["f"] == "x" and cert["surface"]["euler"] == -3

    def test_timeout(self):
        result = search_surface(parse_word(W1), SearchBounds(2, 2, 64, time_budget=1e-9))
        assert result.status in ("timeout", "found")
