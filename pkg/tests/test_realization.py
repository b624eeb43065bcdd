import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclepoly.cycle_polytope import RationalVector, cycle_vector
from cyclepoly.errors import InvalidInputError, NotInPolytopeError
from cyclepoly.multigraph import Cycle, Walk, enumerate_simple_cycles, overlap_graph, walk_of_permutation
from cyclepoly.perm_core import (
    Permutation,
    all_permutations,
    cocc,
    cocc_counts,
    cocc_tilde,
    occ_tilde,
)
from cyclepoly.realization import (
    convex_mix,
    cycle_sequence,
    mixing_inflation,
    realize_walk,
    realize_walk_trace,
    superpermutation,
    target_sequence,
    target_sequence_of_size,
)

from oracles import cocc_brute, random_walk

P = Permutation.parse
F = Fraction


class TestRealizeWalk:
    def test_identity(self):
        assert realize_walk(["123"] * 4, 3) == P("123456")

    def test_single_edge(self):
        assert realize_walk(["132"], 3) == P("132")

    def test_round_trip_of_example(self):
        sigma = P("72638145")
        w = walk_of_permutation(sigma, 3)
        tau = realize_walk(w, 3)
        assert walk_of_permutation(tau, 3) == w
        assert len(tau) == 8

    def test_inconsistent_walk(self):
        with pytest.raises(InvalidInputError):
            realize_walk(["132", "132"], 3)

    def test_trace_reports_progress(self):
        calls = []
        trace = realize_walk_trace(Walk(("123",) * 5000), 3, progress=lambda a, b: calls.append((a, b)))
        assert trace.permutation == Permutation(tuple(range(1, 5003)))
        assert calls[-1] == (5000, 5000)

    @settings(max_examples=100)
    @given(st.integers(0, 10**9), st.integers(2, 5), st.integers(1, 60))
    def test_random_walks(self, seed, k, length):
        g = overlap_graph(k)
        w = random_walk(random.Random(seed), g, length)
        sigma = realize_walk(w, k)
        assert len(sigma) == length + k - 1
        assert walk_of_permutation(sigma, k).edges == w
        for pi in all_permutations(k):
            assert cocc_brute(pi.values, sigma.values) == w.count(str(pi))

    def test_long_walk_keeps_denominators_bounded(self):
        # each step lands between the previous two values, halving their gap
        trace = realize_walk_trace(Walk(("132", "312") * 2000), 3)
        assert max(v.denominator for v in trace.values).bit_length() <= 4000 // 8 + 1
        assert walk_of_permutation(trace.permutation, 3).edges == ("132", "312") * 2000


class TestSuperpermutation:
    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_every_pattern_once(self, k):
        sigma = superpermutation(k)
        size = len(all_permutations(k)) + k - 1
        assert len(sigma) == size
        counts = cocc_counts(sigma, k)
        assert all(counts[pi] == 1 for pi in all_permutations(k))

    def test_deterministic(self):
        assert superpermutation(4) == superpermutation(4)

    def test_out_of_range(self):
        with pytest.raises(InvalidInputError):
            superpermutation(1)


class TestCycleSequence:
    def test_loop(self):
        assert cycle_sequence(["123"], 5) == P("1234567")

    def test_two_cycle(self):
        sigma = cycle_sequence(["132", "213"], 3)
        assert len(sigma) == 8
        assert walk_of_permutation(sigma, 3).edges == ("132", "213") * 3

    def test_rejects_non_cycle(self):
        with pytest.raises(InvalidInputError):
            cycle_sequence(["132"], 2)
        with pytest.raises(InvalidInputError):
            cycle_sequence(["123"], 0)

    @pytest.mark.parametrize("k", [3, 4])
    def test_proportions_approach_cycle_vector(self, k):
        g = overlap_graph(k)
        for c in list(enumerate_simple_cycles(g))[:20]:
            sigma = cycle_sequence(c, 50, k)
            target = cycle_vector(c, g)
            for e in g.edges:
                gap = abs(cocc_tilde(e.label, sigma) - target[e.id])
                assert gap <= F(k - 1, len(sigma))


class TestBlendAndMix:
    def test_convex_mix_shape(self):
        sigma = convex_mix("12", "21", 1, 1)
        # two copies of each part, since both have size two
        assert sigma == P("12346587")
        assert len(convex_mix("132", "21", 2, 3)) == 2 * 2 * 3 + 3 * 3 * 2

    def test_convex_mix_error_term(self):
        rng = random.Random(5)
        for _ in range(20):
            s1 = Permutation(tuple(rng.sample(range(1, 6), 5)))
            s2 = Permutation(tuple(rng.sample(range(1, 4), 3)))
            s, t = rng.randint(1, 3), rng.randint(1, 3)
            sm, tm = s * len(s2), t * len(s1)
            mixed = convex_mix(s1, s2, s, t)
            for pi in all_permutations(3):
                er = cocc(pi, mixed) - sm * cocc(pi, s1) - tm * cocc(pi, s2)
                assert 0 <= er <= (sm + tm - 1) * 3

    def test_mixing_inflation_example(self):
        sigma = mixing_inflation("12", "21")
        assert sigma == P("3412")
        assert abs(occ_tilde("21", sigma) - occ_tilde("21", "21")) == F(1, 3)
        assert F(1, 3) <= F(2 * 1, 2 * 2)

    def test_bad_weights(self):
        with pytest.raises(InvalidInputError):
            convex_mix("1", "1", 0, 1)


def point(g, mapping):
    return RationalVector.from_mapping(g, mapping)


class TestTargetSequence:
    def test_single_cycle_is_a_repeated_cycle(self):
        g = overlap_graph(3)
        r = target_sequence(point(g, {"132": F(1, 2), "213": F(1, 2)}), 4)
        assert r.blocks == ((Cycle(("132", "213")), 4),)
        assert r.permutation == cycle_sequence(["132", "213"], 4)
        assert r.deviation <= r.bound

    def test_loop_target(self):
        g = overlap_graph(3)
        r = target_sequence(point(g, {"123": 1}), 10)
        assert r.permutation == Permutation(tuple(range(1, 13)))
        assert r.bound == F(2, 12)

    def test_outside_point(self):
        g = overlap_graph(3)
        with pytest.raises(NotInPolytopeError) as info:
            target_sequence(point(g, {"123": 2, "321": -1}), 3)
        assert "negative" in info.value.violation

    def test_unbalanced_point(self):
        g = overlap_graph(3)
        with pytest.raises(NotInPolytopeError):
            target_sequence(point(g, {"132": 1}), 3)

    def test_bad_m(self):
        g = overlap_graph(3)
        with pytest.raises(InvalidInputError):
            target_sequence(point(g, {"123": 1}), 0)

    def test_of_size(self):
        g = overlap_graph(3)
        uniform = RationalVector(g, (F(1, 6),) * 6)
        r = target_sequence_of_size(uniform, 10_000)
        assert r.size >= 10_000
        assert r.deviation <= r.bound
        assert r.bound <= F(1, 500)

    def test_json(self):
        g = overlap_graph(3)
        obj = target_sequence(point(g, {"123": 1}), 3).to_json_obj()
        assert obj["size"] == 5 and obj["target"]["123"] == "1"

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**9), st.integers(1, 12))
    def test_random_convex_combinations(self, seed, m):
        rng = random.Random(seed)
        k = rng.choice([3, 4])
        g = overlap_graph(k)
        cycles = list(enumerate_simple_cycles(g))
        chosen = rng.sample(cycles, rng.randint(1, 3))
        weights = [rng.randint(1, 4) for _ in chosen]
        total = sum(weights)
        coords = [F(0)] * len(g.edges)
        for c, w in zip(chosen, weights):
            for i, x in enumerate(cycle_vector(c, g).coords):
                coords[i] += F(w, total) * x
        target = RationalVector(g, tuple(coords))
        r = target_sequence(target, m)
        counts = cocc_counts(r.permutation, k)
        for e in g.edges:
            exact = F(counts.get(e.label, 0), r.size)
            assert r.achieved[e.id] == exact
            assert abs(exact - target[e.id]) <= r.bound
        bigger = target_sequence(target, 4 * m)
        assert bigger.bound < r.bound
