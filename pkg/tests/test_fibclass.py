import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import monotone_maps, posets
from fibcalc.corpus import q_fib, q_prime_fib
from fibcalc.errors import UnknownMorphism
from fibcalc.fibclass import (
    Edges,
    TwoVarFib,
    classify,
    cross_check,
    edge_class,
    fib_from_json,
    fib_to_json,
    interpolating_edges,
)
from fibcalc.fincat import FinFunctor, discrete, poset, product, thin_functor, walking
from fibcalc.twistfree import arrow_cat


def _cartesian_oracle(p, f):
    """f: x -> y is cartesian when every g: z -> y with p g = p f o u
    factors uniquely as f o h with p h = u."""
    e, b = p.source, p.target
    x, y = int(e.src[f]), int(e.tgt[f])
    for z in range(e.n_obj):
        for g in e.hom(z, y):
            for u in b.hom(int(p.obj[z]), int(p.obj[x])):
                if b.compose(int(p.mor[f]), u) != int(p.mor[g]):
                    continue
                hs = [h for h in e.hom(z, x) if e.compose(f, h) == g and int(p.mor[h]) == u]
                if len(hs) != 1:
                    return False
    return True


def _cocartesian_oracle(p, f):
    e, b = p.source, p.target
    x, y = int(e.src[f]), int(e.tgt[f])
    for z in range(e.n_obj):
        for g in e.hom(x, z):
            for u in b.hom(int(p.obj[y]), int(p.obj[z])):
                if b.compose(u, int(p.mor[f])) != int(p.mor[g]):
                    continue
                hs = [h for h in e.hom(y, z) if e.compose(h, f) == g and int(p.mor[h]) == u]
                if len(hs) != 1:
                    return False
    return True


@given(posets(4), st.integers(1, 2), st.data())
def test_edge_flags_match_oracle(e, n, data):
    b = walking(n)
    img = data.draw(st.sampled_from(monotone_maps(e, b)))
    p = thin_functor(e, b, img)
    ed = Edges(p)
    for k in range(e.n_mor):
        assert bool(ed.cart[k]) == _cartesian_oracle(p, k)
        assert bool(ed.cocart[k]) == _cocartesian_oracle(p, k)


def test_edge_class_examples():
    # E = [2] -> [1] collapsing 0,1 to 0
    e, b = walking(2), walking(1)
    p = thin_functor(e, b, [0, 0, 1])
    ec = edge_class(p, (1, 2))
    assert ec.cocartesian and ec.cartesian
    ec = edge_class(p, (0, 2))
    assert not ec.cartesian and ec.cocartesian
    ec = edge_class(p, (0, 1))
    assert not (ec.cartesian or ec.cocartesian or ec.locally_cartesian)
    with pytest.raises(UnknownMorphism):
        edge_class(p, 99)


def test_lift_is_normalised():
    e, b = walking(2), walking(1)
    p = thin_functor(e, b, [0, 0, 1])
    ed = Edges(p)
    for x in range(e.n_obj):
        u = int(b.ident[p.obj[x]])
        assert ed.lift(x, u, "cocart") == int(e.ident[x])


def test_q_classification():
    tx = classify(q_fib())
    for flag in ("bicartesian", "curved_ortho", "gray", "op_gray"):
        assert tx.flags[flag], flag
    assert not tx.ortho and not tx.bifib


def test_q_prime_classification():
    tx = classify(q_prime_fib())
    assert not tx.cocartesian_fib
    assert tx.gray


def test_arrow_category_is_a_bifibration():
    tx = classify(arrow_cat(walking(1)).fib)
    assert tx.cart_over_A and tx.cocart_over_B
    assert tx.ortho and tx.bifib
    assert not tx.bicartesian and not tx.gray


def test_interpolating_diagrams_q():
    p = q_fib()
    ds = interpolating_edges(p, "crvortho")
    assert ds
    assert any(not p.total.is_iso(d.edge) for d in ds)
    with pytest.raises(ValueError):
        interpolating_edges(p, "bogus")


def test_cross_check_agrees_on_examples():
    for p in (q_fib(), q_prime_fib(), arrow_cat(walking(2)).fib):
        for rec in cross_check(p):
            assert rec.agree, (p.name, rec.name, rec.values)


def test_empty_total_category():
    e = discrete([])
    b = walking(1)
    p = TwoVarFib.one_variable(FinFunctor(e, b, np.zeros(0), np.zeros(0)))
    assert all(classify(p).flags.values())


def test_json_round_trip():
    p = q_fib()
    data = json.loads(json.dumps(fib_to_json(p)))
    back = fib_from_json(data)
    assert back.total.n_mor == p.total.n_mor
    assert classify(back).flags == classify(p).flags


def test_constant_projection_is_cartesian():
    c = walking(1)
    pp = product(c, c)
    p = TwoVarFib(pp, c, c, thin_functor(pp, c, [0, 0, 1, 1]), thin_functor(pp, c, [0, 1, 0, 1]))
    tx = classify(p)
    assert tx.left_fib and tx.right_fib and tx.ortho and tx.bifib


def test_fibre_of_poset():
    e = poset(["a", "b", "c"], [("a", "b")])
    p = TwoVarFib.one_variable(thin_functor(e, walking(1), [0, 0, 1]))
    sub, oi, _ = p.fibre(a=0)
    assert sub.n_obj == 2 and list(oi) == [0, 1]
