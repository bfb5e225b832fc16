import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import monotone_maps, posets
from fibcalc.fibclass import TwoVarFib, classify
from fibcalc.fincat import (
    discrete,
    group_cat,
    identity_functor,
    poset,
    product,
    thin_functor,
    walking,
)
from fibcalc.twistfree import (
    ar_tw_duality,
    arrow_cat,
    corr,
    corr_b_check,
    corr_cart_check,
    corr_cocart_check,
    dual_of_free_check,
    fibrewise_cartesian_check,
    free_fib,
    free_universality,
    tw,
    tw_cartesian_lemma,
    tw_localisation,
)


def _tw_morphism_count(c):
    """Morphisms f -> g of Tw(C) are pairs (a, b) with g = b f a."""
    n = 0
    for f in range(c.n_mor):
        for a in range(c.n_mor):
            if c.tgt[a] != c.src[f]:
                continue
            for b in range(c.n_mor):
                if c.src[b] == c.tgt[f]:
                    n += 1
    return n


@given(posets(4))
def test_twisted_arrow_counts(c):
    for variant in ("left", "right"):
        t = tw(c, variant)
        assert t.cat.n_obj == c.n_mor
        assert t.cat.n_mor == _tw_morphism_count(c)


def test_twisted_arrow_of_group():
    g = group_cat(2)
    t = tw(g, "left")
    assert t.cat.n_obj == 2 and t.cat.n_mor == 8


def test_tw_projection_is_left_fibration():
    for c in (walking(2), poset(["a", "b", "t"], [("a", "t"), ("b", "t")])):
        assert classify(tw(c, "left").fib).left_fib
        assert classify(tw(c, "right").fib).right_fib


def test_tw_bad_variant():
    with pytest.raises(ValueError):
        tw(walking(1), "middle")


def test_arrow_category_counts():
    a = arrow_cat(walking(2))
    assert a.cat.n_obj == 6
    # commuting squares in [2] are pairs of comparable intervals
    assert a.cat.n_mor == sum(1 for (i, j), (k, l) in itertools.product(
        [(i, j) for i in range(3) for j in range(i, 3)], repeat=2) if i <= k and j <= l)


@pytest.mark.parametrize("c", [walking(0), walking(1), walking(2), discrete(["a", "b"]),
                               group_cat(2)], ids=lambda c: c.name or str(c.objects))
def test_ar_tw_duality(c):
    assert ar_tw_duality(c) == {"right": True, "left": True}


@given(posets(3), st.data())
def test_free_fibration_objects(e, data):
    b = walking(1)
    phi = thin_functor(e, b, data.draw(st.sampled_from(monotone_maps(e, b))))
    for variance in ("cocart", "cart"):
        free = free_fib(phi, variance)
        if variance == "cocart":
            want = sum(len(b.hom(int(phi.obj[x]), y)) for x in range(e.n_obj) for y in range(b.n_obj))
        else:
            want = sum(len(b.hom(y, int(phi.obj[x]))) for x in range(e.n_obj) for y in range(b.n_obj))
        assert free.total.n_obj == want
        tx = classify(TwoVarFib.one_variable(free.proj))
        assert tx.cocartesian_fib if variance == "cocart" else tx.cartesian_fib
        assert free.unit.then(free.proj).same_as(phi)


def test_free_universality_examples():
    b = walking(1)
    pt = walking(0)
    phi = thin_functor(pt, b, [1])
    p = identity_functor(b)
    r = free_universality(phi, phi, p, "cart")
    assert r["extension_valid"] and r["preserves_edges"] and r["restricts_to_f"]
    assert r["all_iso"]
    phi0 = thin_functor(pt, b, [0])
    r = free_universality(phi0, phi0, p, "cocart")
    assert r["all_iso"] and r["n_found"] >= 1


@pytest.mark.parametrize("variance", ["cart", "cocart"])
def test_dual_of_free(variance):
    b = walking(1)
    e = walking(1)
    for img in ([0, 0], [0, 1], [1, 1]):
        assert dual_of_free_check(thin_functor(e, b, img), variance)


def test_corr_objects_are_arrows_across():
    e = walking(2)
    p = thin_functor(e, walking(1), [0, 1, 1])
    c = corr(p)
    assert c.total.n_obj == 2  # 0 -> 1 and 0 -> 2
    assert c.is_left_fibration()


@given(posets(4), st.data())
def test_corr_count_oracle(e, data):
    one = walking(1)
    p = thin_functor(e, one, data.draw(st.sampled_from(monotone_maps(e, one))))
    c = corr(p)
    want = sum(len(e.hom(x, y)) for x in range(e.n_obj) for y in range(e.n_obj)
               if p.obj[x] == 0 and p.obj[y] == 1)
    assert c.total.n_obj == want
    assert c.is_left_fibration()


def test_corr_pullback_along_transport():
    e = walking(2)
    one = walking(1)
    p = thin_functor(e, one, [0, 1, 1])
    assert corr_cocart_check(p)
    q = thin_functor(e, one, [0, 0, 1])
    assert corr_cart_check(q)


def test_corr_b_two_routes():
    a = arrow_cat(walking(1)).fib
    r = corr_b_check(a)
    assert r["direct_left_fib"] and r["fibrewise_left_fib"] and r["agree"]


def test_tw_cartesian_lemma():
    e = walking(2)
    p = thin_functor(e, walking(1), [0, 0, 1])
    r = tw_cartesian_lemma(p)
    assert r["hypothesis"] > 0
    assert r["cartesian"] == r["hypothesis"] and r["counterexample"] is None


def test_fibrewise_cartesian_identity():
    e = product(walking(1), walking(1))
    p = thin_functor(e, walking(1), [0, 0, 1, 1])
    r = fibrewise_cartesian_check(identity_functor(e), p, p)
    assert r["hypotheses"] and r["checked"] > 0 and r["failures"] == 0


def test_tw_localisation_examples():
    assert tw_localisation(walking(1)) == (True, True)
    assert tw_localisation(walking(2)) == (True, True)
    inverts, _ = tw_localisation(poset(["a", "b", "t"], [("a", "t"), ("b", "t")]))
    assert inverts
