import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibcalc.corpus import one_variable_corpus, q_fib, q_prime_fib
from fibcalc.errors import NotAFibration
from fibcalc.fibclass import TwoVarFib, classify
from fibcalc.fincat import FinFunctor, isomorphic, product, thin_functor, walking
from fibcalc.grothendieck import (
    CONTRA,
    COV,
    constant,
    dualize,
    dualize_one_variable,
    fib_equivalent,
    fibre_identity,
    from_functor_family,
    reindex_base,
    round_trip,
    straighten,
    unstraighten,
)
from fibcalc.twistfree import arrow_cat

CORPUS = one_variable_corpus()


def test_constant_unstraightens_to_product():
    x, b = walking(1), walking(2)
    p = unstraighten(constant(x, b))
    assert isomorphic(p.total, product(b, x)) is not None
    assert classify(p).bicartesian


def test_arrow_target_straightens_to_slices():
    c = walking(1)
    ar = arrow_cat(c).fib
    t = TwoVarFib.one_variable(ar.p2)
    F = straighten(t, COV, "A")
    assert [f.n_obj for f in F.fibres] == [1, 2]
    u = c.mor((0, 1))
    img = int(F.transport[u].obj[0])
    # id_0 is sent to the object 0 -> 1 of the slice over 1
    assert F.fibres[1].objects[img] == (0, 1)


def test_three_object_unstraightening():
    b = walking(1)
    pt, two = walking(0), walking(1)
    f = thin_functor(pt, two, [1])
    fam = from_functor_family(b, [pt, two], [FinFunctor(pt, pt, [0], [0]), f,
                                             FinFunctor(two, two, [0, 1], [0, 1, 2])])
    p = unstraighten(fam)
    assert p.total.n_obj == 3
    tx = classify(p)
    assert tx.cocartesian_fib
    # fibre labels collide, so objects are tagged by base object
    assert p.total.objects == ((0, 0), (1, 0), (1, 1))


def test_unstraighten_label_levels():
    p = unstraighten(constant(walking(1), walking(1)))
    labels = p.total.morphisms
    assert len(set(labels)) == len(labels)


@settings(max_examples=25)
@given(st.sampled_from(CORPUS))
def test_round_trip_cocartesian(p):
    tx = classify(p)
    if tx.cocart_over_A:
        back, w = round_trip(p, COV, "A", (16, 200))
        assert w is not None
    if tx.cart_over_A:
        back, w = round_trip(p, CONTRA, "A", (16, 200))
        assert w is not None


@settings(max_examples=25)
@given(st.sampled_from(CORPUS))
def test_dualisation_involution(p):
    if not classify(p).cocartesian_fib:
        return
    d = dualize(p, "A", "ct")
    assert fibre_identity(p, d)
    assert classify(d).cartesian_fib
    back = reindex_base(dualize(d, "A", "cc"), p.base_a, p.base_b)
    assert fib_equivalent(p, back, ("cocart",), (16, 200)) is not None


def test_dualize_rejects_non_fibration():
    ar = arrow_cat(walking(1)).fib
    with pytest.raises(NotAFibration) as exc:
        dualize(ar, "A", "ct")
    assert exc.value.witness is not None


def test_dualize_one_variable_lands_over_opposite():
    ar = arrow_cat(walking(1)).fib
    q = dualize_one_variable(ar.p2, "ct")
    assert q.target.n_obj == 2
    assert q.source.n_obj == ar.total.n_obj


def test_q_dualises_to_q_prime():
    q, qp = q_fib(), q_prime_fib()
    d = dualize(q, "A", "cc")
    r = reindex_base(d, qp.base_a, qp.base_b)
    assert fib_equivalent(r, qp, ("l_cocart", "r_cocart")) is not None
    assert classify(r).gray and not classify(r).cocartesian_fib


def test_q_transport_is_coface():
    F = straighten(q_fib(), CONTRA, "A")
    u = F.base.mor((0, 1))
    t = F.transport[u]
    assert t.source.objects == ("00", "01")
    assert t.target.objects == ("10", "11", "11'")
    assert [t.target.objects[i] for i in t.obj] == ["10", "11"]


def test_q_is_not_the_product_projection():
    q = q_fib()
    c = walking(1)
    pp = product(c, c)
    proj = reindex_base(TwoVarFib(pp, c, c, thin_functor(pp, c, [0, 0, 1, 1]),
                                  thin_functor(pp, c, [0, 1, 0, 1])), q.base_a, q.base_b)
    assert proj.total.n_obj != q.total.n_obj or fib_equivalent(q, proj) is None
