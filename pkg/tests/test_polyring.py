import random

import pytest
from hypothesis import given, strategies as st

from unicount.polyring import (CountPoly, ParamPoly, poly_add, poly_eval,
                               poly_scale, shifted_coeffs)


def qp(dq, c=1, dt=0):
    return CountPoly({(dq, dt): c})


class TestCountPoly:
    def test_add_mixed_degrees(self):
        a = qp(9)
        b = CountPoly({(9, 1): 7, (8, 1): -6, (7, 1): -1})
        out = poly_add(a, b)
        assert out.terms == {(9, 0): 1, (9, 1): 7, (8, 1): -6, (7, 1): -1}

    def test_add_zero_identity(self):
        f = CountPoly({(3, 2): 5, (0, 0): -1})
        assert poly_add(f, CountPoly.zero()) == f

    def test_add_cancels_to_canonical(self):
        # (q - 1) + 1 = q, and the zero coefficient is not stored
        f = CountPoly({(1, 0): 1, (0, 0): -1})
        out = poly_add(f, CountPoly.one())
        assert out.terms == {(1, 0): 1}

    def test_scale_exceptional_family_shape(self):
        # q (q-1)^13 t^16 from the unit polynomial
        out = poly_scale(CountPoly.one(), 13, 1, 16)
        assert out.coeff_of_t(16).eval_at(5) == 5 * 4**13
        assert out.terms[(14, 16)] == 1
        assert out.terms[(1, 16)] == -1
        assert sum(c for (dq, dt), c in out.terms.items()) == 0  # value at q=1

    def test_scale_identity(self):
        f = CountPoly({(2, 1): 3, (0, 0): 1})
        assert poly_scale(f, 0, 0, 0) == f

    def test_scale_distributes(self):
        f = CountPoly({(1, 0): 1, (0, 1): 1})  # q + t
        out = poly_scale(f, 1, 0, 1)
        # (q-1)q t + (q-1)t^2
        assert out.terms == {(2, 1): 1, (1, 1): -1, (1, 2): 1, (0, 2): -1}

    def test_eval_sum_counts_classes_of_u3(self):
        f = CountPoly({(2, 0): 1, (1, 1): 1, (0, 1): -1})  # q^2 + (q-1)t
        assert poly_eval(f, 2, "sum") == 5

    def test_eval_weighted_gives_group_order(self):
        f = CountPoly({(2, 0): 1, (1, 1): 1, (0, 1): -1})
        assert poly_eval(f, 2, "weight_q2e") == 8

    def test_eval_zero(self):
        assert poly_eval(CountPoly.zero(), 7, "sum") == 0

    def test_eval_at_t_value(self):
        f = CountPoly({(0, 2): 1})
        assert poly_eval(f, 3, 5) == 25

    def test_eval_rejects_tiny_q(self):
        with pytest.raises(ValueError):
            poly_eval(CountPoly.one(), 1, "sum")

    def test_weight_formal(self):
        f = CountPoly({(2, 0): 1, (1, 1): 1, (0, 1): -1})
        assert f.weight_formal().terms == {(3, 0): 1}  # q^2 + (q-1)q^2 = q^3

    def test_json_round_trip(self):
        f = CountPoly({(9, 0): 1, (3, 2): -4})
        obj = f.to_json()
        assert {"q": 9, "t": 0, "c": 1} in obj["terms"]
        assert CountPoly.from_json(obj) == f

    def test_shifted_coeffs(self):
        # q^2 - 2q + 1 = (q-1)^2 -> t^2 under q := t+1
        p = CountPoly({(2, 0): 1, (1, 0): -2, (0, 0): 1})
        assert shifted_coeffs(p) == {2: 1}


@st.composite
def count_polys(draw):
    n = draw(st.integers(0, 6))
    terms = {}
    for _ in range(n):
        dq = draw(st.integers(0, 6))
        dt = draw(st.integers(0, 4))
        c = draw(st.integers(-50, 50))
        terms[(dq, dt)] = c
    return CountPoly(terms)


@given(count_polys(), count_polys(), count_polys())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@given(count_polys(), count_polys())
def test_canonical_equality(a, b):
    assert (a == b) == ((a - b).is_zero())


@given(count_polys(), count_polys(), st.integers(2, 7),
       st.sampled_from(["sum", "weight_q2e", 3]))
def test_eval_additive(a, b, q0, mode):
    assert (a + b).eval_at(q0, mode) == a.eval_at(q0, mode) + b.eval_at(q0, mode)


@st.composite
def param_polys(draw):
    n = draw(st.integers(0, 5))
    terms = {}
    for _ in range(n):
        syms = draw(st.lists(st.tuples(st.integers(0, 4), st.integers(1, 3)),
                             max_size=3, unique_by=lambda p: p[0]))
        terms[tuple(sorted(syms))] = draw(st.integers(-9, 9))
    return ParamPoly(terms)


@given(param_polys(), param_polys(), param_polys())
def test_param_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@given(param_polys())
def test_param_decompose_reassembles(p):
    parts = p.decompose(0)
    x = ParamPoly.var(0)
    acc = ParamPoly.zero()
    for d, g in parts.items():
        acc = acc + g * x.pow(d)
    assert acc == p


def test_param_content_and_division():
    rng = random.Random(7)
    g = ParamPoly({((0, 1),): 1, ((1, 2),): -3, (): 2})
    for _ in range(50):
        base = ParamPoly.monomial([rng.randrange(3) for _ in range(rng.randint(0, 3))])
        p = base * g
        content = p.content()
        q = p.divide_monomial(content)
        assert ParamPoly({tuple(sorted(content.items())): 1}) * q == p
        assert not q.content()  # nothing left to divide out
