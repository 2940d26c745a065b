"""Bit-packed GF(2) linear algebra, orthogonal group, stabilizer cases."""

import itertools
import random

import pytest

from crosscap_calc import gf2
from crosscap_calc.gf2 import (
    CASE_ALPHA1,
    CASE_ALPHA12,
    CASE_ALPHA_ALL,
    CapExceededError,
    F2Matrix,
    F2Vector,
    NotInGroupError,
    STABILIZER_CASES,
    dot,
    enumerate_o2,
    evaluate_word,
    express_as_word,
    generate_group,
    is_orthogonal,
    stabilizer_case_check,
    standard_twist_generators,
    twist_transvection,
    word_table,
)

# orders of the orthogonal groups, frozen from the frame enumeration
O2_ORDERS = {3: 6, 4: 48, 5: 720, 6: 23040}


def permutation_matrices(g):
    return frozenset(
        F2Matrix.from_columns(g, [1 << p[i] for i in range(g)])
        for p in itertools.permutations(range(g))
    )


class TestF2Vector:
    def test_unit_and_indices(self):
        v = F2Vector.unit(5, 3)
        assert v.bits == 0b100
        assert v.indices() == (3,)

    def test_from_indices_and_weight(self):
        v = F2Vector.from_indices(5, (1, 4))
        assert v.weight() == 2
        assert v.indices() == (1, 4)

    def test_xor(self):
        u = F2Vector.from_indices(4, (1, 2))
        v = F2Vector.from_indices(4, (2, 3))
        assert (u ^ v).indices() == (1, 3)

    def test_dot(self):
        u = F2Vector.from_indices(4, (1, 2))
        v = F2Vector.from_indices(4, (2, 3))
        assert dot(u, v) == 1
        assert dot(u, u) == 0  # even weight is isotropic

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            F2Vector(3, 0b1000)

    def test_to_string(self):
        assert F2Vector.from_indices(4, (1, 3)).to_string() == "1010"


class TestF2Matrix:
    def test_identity_and_columns(self):
        m = F2Matrix.identity(4)
        assert m.is_identity()
        assert m.column(2) == 0b10

    def test_from_columns_transpose_round_trip(self):
        cols = [0b011, 0b101, 0b110]
        m = F2Matrix.from_columns(3, cols)
        assert [m.column(j) for j in (1, 2, 3)] == cols
        assert m.transpose().transpose() == m

    def test_multiplication_matches_apply(self):
        rng = random.Random(5)
        for _ in range(20):
            g = rng.choice((3, 4, 5))
            a = twist_transvection(g, (1, 2))
            b = twist_transvection(g, tuple(sorted(rng.sample(range(1, g + 1), 2))))
            v = F2Vector(g, rng.randrange(1 << g))
            assert (a * b).apply(v) == a.apply(b.apply(v))

    def test_json_round_trip(self):
        m = twist_transvection(4, (1, 2, 3, 4))
        assert F2Matrix.from_json(m.to_json()) == m
        assert all(set(row) <= set("01") for row in m.to_json()["rows"])


class TestTransvections:
    def test_rejects_odd_subsets(self):
        with pytest.raises(ValueError):
            twist_transvection(4, (1, 2, 3))
        with pytest.raises(ValueError):
            twist_transvection(4, ())

    def test_fixes_its_own_vector_and_orthogonal_complement(self):
        g = 5
        sub = (2, 4)
        t = twist_transvection(g, sub)
        v = F2Vector.from_indices(g, sub)
        assert t.apply(v) == v
        for bits in range(1 << g):
            x = F2Vector(g, bits)
            expected = x ^ v if dot(x, v) else x
            assert t.apply(x) == expected

    def test_transvections_are_orthogonal_involutions(self):
        for sub in ((1, 2), (1, 3), (2, 3, 4, 5)):
            t = twist_transvection(5, sub)
            assert is_orthogonal(t)
            assert (t * t).is_identity()


class TestOrthogonalGroup:
    def test_enumeration_orders_frozen(self):
        for g, order in O2_ORDERS.items():
            assert len(enumerate_o2(g)) == order

    def test_enumeration_capped(self):
        with pytest.raises(CapExceededError):
            enumerate_o2(7)

    def test_generation_matches_enumeration(self):
        for g in (3, 4, 5):
            gens = standard_twist_generators(g)
            assert generate_group(g, gens.values()) == enumerate_o2(g)

    def test_genus3_is_symmetric_group(self):
        assert enumerate_o2(3) == permutation_matrices(3)

    def test_every_element_orthogonal(self):
        for m in enumerate_o2(4):
            assert is_orthogonal(m)
            assert (m * m.transpose()).is_identity()

    def test_empty_generators_give_trivial_group(self):
        assert generate_group(4, []) == frozenset({F2Matrix.identity(4)})


class TestWordTable:
    def test_identity_gets_empty_word(self):
        gens = standard_twist_generators(3, sizes=(2,))
        table = word_table(3, gens)
        assert table[F2Matrix.identity(3)] == ()

    def test_words_remultiply(self):
        gens = standard_twist_generators(4)
        table = word_table(4, gens)
        assert len(table) == O2_ORDERS[4]
        for target, w in table.items():
            assert evaluate_word(4, gens, w) == target

    def test_words_are_shortest_by_independent_bfs(self):
        gens = standard_twist_generators(3, sizes=(2,))
        table = word_table(3, gens)
        # plain BFS distance map, no word bookkeeping
        dist = {F2Matrix.identity(3): 0}
        frontier = [F2Matrix.identity(3)]
        while frontier:
            new = []
            for a in frontier:
                for m in gens.values():
                    b = a * m
                    if b not in dist:
                        dist[b] = dist[a] + 1
                        new.append(b)
            frontier = new
        assert set(table) == set(dist)
        for target, w in table.items():
            assert len(w) == dist[target]

    def test_express_as_word_round_trip(self):
        gens = standard_twist_generators(4)
        target = twist_transvection(4, (1, 2)) * twist_transvection(4, (2, 3))
        w = express_as_word(target, gens)
        assert evaluate_word(4, gens, w) == target

    def test_express_outside_subgroup_raises(self):
        target = twist_transvection(4, (1, 2))
        with pytest.raises(NotInGroupError):
            express_as_word(target, standard_twist_generators(4), lambda s, m: False)


class TestStabilizerCases:
    def test_all_cases_exhaustive_small(self):
        for g in (3, 4):
            for case in STABILIZER_CASES:
                rep = stabilizer_case_check(g, case)
                assert rep.ok, (g, case, rep.failures[:3])

    def test_sampled_genus5(self):
        for case in STABILIZER_CASES:
            rep = stabilizer_case_check(5, case, sample_count=60, seed=1)
            assert rep.ok, (case, rep.failures[:3])

    def test_stabilizer_orders_frozen(self):
        # independent of the check: count fixed points of the case vectors
        vectors = {
            CASE_ALPHA1: lambda g: F2Vector.unit(g, 1),
            CASE_ALPHA12: lambda g: F2Vector.from_indices(g, (1, 2)),
            CASE_ALPHA_ALL: lambda g: F2Vector(g, (1 << g) - 1),
        }
        orders = {
            (3, CASE_ALPHA1): 2,
            (3, CASE_ALPHA12): 2,
            (3, CASE_ALPHA_ALL): 6,
            (4, CASE_ALPHA1): 6,
            (4, CASE_ALPHA12): 8,
            (4, CASE_ALPHA_ALL): 48,
            (5, CASE_ALPHA1): 48,
            (5, CASE_ALPHA12): 48,
            (5, CASE_ALPHA_ALL): 720,
        }
        for (g, case), order in orders.items():
            v = vectors[case](g)
            stab = [a for a in enumerate_o2(g) if a.apply(v) == v]
            assert len(stab) == order

    def test_unknown_case_rejected(self):
        with pytest.raises(ValueError):
            stabilizer_case_check(4, "alpha99")

    def test_capped_genus(self):
        with pytest.raises(CapExceededError):
            stabilizer_case_check(6, CASE_ALPHA1)

    def test_report_carries_scale_caveat(self):
        rep = stabilizer_case_check(3, CASE_ALPHA1)
        assert rep.caveats
