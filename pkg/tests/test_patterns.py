import random

import pytest


from unicount.engine import census
from unicount.oracle import orbit_of_vector
from unicount.patterns import (Poset, UnsupportedAntichain, antichains, chain,
                               choose_order, encode_pattern, normal_closure,
                               pattern_census, stabilizer_data,
                               top_and_closure, unitriangular_census)
from unicount.polyring import CountPoly

from conftest import random_poset_pairs


class TestPoset:
    def test_rejects_reflexive(self):
        with pytest.raises(Exception):
            Poset([1, 2], [(1, 1)])

    def test_rejects_intransitive(self):
        with pytest.raises(Exception):
            Poset([1, 2, 3], [(1, 2), (2, 3)])

    def test_json_round_trip(self):
        p = chain(4)
        assert Poset.from_json(p.to_json()) == p


class TestTopAndClosure:
    def test_chain_prefix(self):
        p = chain(3)
        top, clos = top_and_closure({1, 2}, p.rel, p.elems)
        assert top == {2} and clos == {1, 2}

    def test_empty(self):
        p = chain(3)
        assert top_and_closure(set(), p.rel, p.elems) == (set(), set())

    def test_vee(self):
        p = Poset([1, 2, 3], [(1, 3), (2, 3)])
        top, clos = top_and_closure({3}, p.rel, p.elems)
        assert top == {3} and clos == {1, 2, 3}


class TestNormalClosure:
    def test_total_order_is_fixed_point(self):
        p = chain(3)
        assert normal_closure(p.rel, [1, 2, 3]) == p.rel

    def test_single_pair_completes(self):
        out = normal_closure(frozenset({(1, 3)}), [1, 2, 3])
        assert out == frozenset({(1, 2), (1, 3), (2, 3)})

    def test_empty_relation_completes(self):
        out = normal_closure(frozenset(), [1, 2, 3])
        assert out == frozenset({(1, 2), (1, 3), (2, 3)})

    def test_result_transitive_and_contains_input(self):
        rng = random.Random(17)
        for _ in range(40):
            m, rel = random_poset_pairs(rng)
            order = choose_order(range(1, m + 1), frozenset(rel))
            out = normal_closure(frozenset(rel), order)
            assert frozenset(rel) <= out
            for a, b in out:
                for c, d in out:
                    if b == c:
                        assert (a, d) in out


class TestAntichains:
    def test_chain_gives_singletons(self):
        p = chain(3)
        out = antichains(p.elems, p.rel)
        assert len(out) == 4
        assert frozenset() in out

    def test_discrete_poset_gives_all_subsets(self):
        out = antichains([1, 2], frozenset())
        assert len(out) == 4
        assert frozenset({1, 2}) in out

    def test_empty_ground(self):
        assert antichains([], frozenset()) == [frozenset()]

    def test_counts(self):
        # n-chain has n+1 antichains; m-element antichain has 2^m
        for n in range(1, 6):
            assert len(antichains(range(n), frozenset())) == 2**n
            p = chain(n)
            assert len(antichains(p.elems, p.rel)) == n + 1


class TestEncodePattern:
    def test_two_chain(self):
        data = encode_pattern(chain(2))
        assert len(data.basis) == 1 and not data.prods

    def test_three_chain_is_heisenberg(self):
        data = encode_pattern(chain(3))
        assert len(data.basis) == 3
        assert len(data.prods) == 1

    def test_chain_dimension(self):
        assert len(encode_pattern(chain(13)).basis) == 78

    def test_parameter_free(self):
        data = encode_pattern(chain(5))
        assert data.params == () and data.satisfies_nz()


class TestStabilizerData:
    def test_empty_antichain_is_full_complement(self):
        p = chain(4)
        data = stabilizer_data(p, 1, frozenset())
        assert data == encode_pattern(chain(3))  # relabelled [2,4] chain

    def test_singleton_strips_column(self):
        p = chain(4)
        data = stabilizer_data(p, 1, frozenset({3}))
        # rows 2..4 with the (2,3) entry removed: edges (2,4), (3,4)
        assert len(data.basis) == 2
        assert not data.prods

    def test_large_antichain_rejected(self):
        p = Poset([1, 2, 3, 4, 5], [(1, 2), (1, 3), (1, 4), (1, 5)])
        with pytest.raises(UnsupportedAntichain):
            stabilizer_data(p, 1, frozenset({2, 3, 4}))

    def test_pair_matches_bruteforce_annihilator(self):
        # poset 1 < {2, 3} merged columns: compare with explicit linear algebra
        p = Poset([1, 2, 3, 4], [(1, 2), (1, 3), (1, 4), (4, 2), (4, 3)])
        data = stabilizer_data(p, 1, frozenset({2, 3}))
        data.validate()
        # L has basis e_{4,2}, e_{4,3}; the annihilator of e_2 - e_3 forces
        # a_{42} = a_{43}: dimension 1, zero multiplication
        assert len(data.basis) == 1
        assert not data.prods

    def test_pair_products_close(self):
        rng = random.Random(23)
        for _ in range(40):
            m, rel = random_poset_pairs(rng, max_elems=6)
            p = Poset(range(1, m + 1), rel)
            minimals = [e for e in p.elems if not any(b == e for _, b in rel)]
            c0 = minimals[0]
            D = sorted(d for d in p.elems if (c0, d) in p.rel)
            pairs = [(a, b) for i, a in enumerate(D) for b in D[i + 1:]
                     if (a, b) not in rel and (b, a) not in rel]
            for pair in pairs[:2]:
                data = stabilizer_data(p, c0, frozenset(pair))
                data.validate()


def brute_force_annihilator_dimension(p: Poset, c0: int, u_coeffs: dict, q: int) -> int:
    """dim of Ann_L(u) for u in F_q^D, by row reduction over F_q."""
    from unicount.ffield import get_field
    f = get_field(q)
    D = sorted(d for d in p.elems if (c0, d) in p.rel)
    L_pairs = [(a, b) for (a, b) in sorted(p.rel) if a != c0 and b != c0]
    # constraint per row d in D: sum_j a_{dj} u_j = 0
    rows = []
    for d in D:
        row = []
        for (a, b) in L_pairs:
            row.append(u_coeffs.get(b, 0) if a == d and b in D else 0)
        rows.append(row)
    # rank over F_q
    rank = 0
    ncols = len(L_pairs)
    pivot_col = 0
    rows = [r[:] for r in rows]
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][col]:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = f.inv(rows[rank][col])
        rows[rank] = [f.mul(inv, x) for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                c = rows[r][col]
                rows[r] = [f.sub(x, f.mul(c, y)) for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return ncols - rank


def test_pair_stabilizer_dimension_matches_linear_algebra():
    rng = random.Random(29)
    checked = 0
    while checked < 12:
        m, rel = random_poset_pairs(rng, max_elems=6)
        p = Poset(range(1, m + 1), rel)
        minimals = [e for e in p.elems if not any(b == e for _, b in rel)]
        c0 = minimals[0]
        D = sorted(d for d in p.elems if (c0, d) in p.rel)
        pairs = [(a, b) for i, a in enumerate(D) for b in D[i + 1:]
                 if (a, b) not in rel and (b, a) not in rel]
        if not pairs:
            continue
        k, ll = pairs[0]
        data = stabilizer_data(p, c0, frozenset({k, ll}))
        want = brute_force_annihilator_dimension(p, c0, {k: 1, ll: 1}, 2)
        assert len(data.basis) == want
        checked += 1


class TestPatternCensus:
    def test_zero_relation_base_case(self, ctx):
        # T_{C, empty} is the zero algebra: exactly one character
        out = pattern_census(Poset([1, 2, 3, 4], []), ctx)
        assert out.resolved == CountPoly.one()

    def test_three_chain(self, ctx):
        out = unitriangular_census(3, ctx)
        assert out.resolved.terms == {(2, 0): 1, (1, 1): 1, (0, 1): -1}

    def test_agrees_with_general_engine(self, shared_ctx):
        for n in range(1, 7):
            fast = unitriangular_census(n, shared_ctx)
            slow = census(encode_pattern(chain(n)), shared_ctx)
            assert fast == slow, f"paths disagree at n={n}"

    def test_nonchain_poset_against_class_count(self, shared_ctx):
        from unicount.oracle import verify_census
        rng = random.Random(31)
        checked = 0
        while checked < 15:
            m, rel = random_poset_pairs(rng, max_elems=5)
            p = Poset(range(1, m + 1), rel)
            if len(rel) > 6:
                continue
            out = pattern_census(p, shared_ctx)
            data = encode_pattern(p)
            for q0 in (2, 3):
                rep = verify_census(data, out, q0)
                assert rep["pass"], (p, rep)
            checked += 1


class TestReversedLabels:
    """Poset element labels need not align with the ambient int order."""

    def test_census_against_brute_force(self, shared_ctx):
        from unicount.oracle import verify_census
        p = Poset([1, 2, 3, 4, 5], [(5, 3), (3, 1), (5, 1), (5, 2)])
        out = pattern_census(p, shared_ctx)
        data = encode_pattern(p)
        for q0 in (2, 3):
            assert verify_census(data, out, q0)["pass"]

    def test_pair_stabilizer_reordered_when_needed(self, shared_ctx):
        from unicount.oracle import verify_census
        rel = [(9, 7), (9, 8), (9, 2), (9, 1), (7, 2), (7, 1), (8, 2), (8, 1)]
        p = Poset([1, 2, 7, 8, 9], rel)
        data = stabilizer_data(p, 9, frozenset({1, 2}))
        data.validate()
        out = census(data, shared_ctx)
        for q0 in (2, 3):
            assert verify_census(data, out, q0)["pass"]


class TestOrbitSizes:
    def test_orbit_sizes(self):
        rng = random.Random(37)
        for _ in range(60):
            m, rel = random_poset_pairs(rng, max_elems=5)
            p = Poset(range(1, m + 1), rel)
            for q in (2, 3):
                u = {e: rng.randrange(q) for e in p.elems}
                orbit = orbit_of_vector(p.rel, p.elems, u, q)
                supp = {e for e, c in u.items() if c}
                top, _ = top_and_closure(supp, p.rel, p.elems)
                _, clos = top_and_closure(top, p.rel, p.elems)
                assert len(orbit) == q ** len(clos - top)

    def test_zero_vector_is_fixed(self):
        p = chain(4)
        assert orbit_of_vector(p.rel, p.elems, {}, 3) == {(0, 0, 0, 0)}
