import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibcalc import corpus as K
from fibcalc import mates as M
from fibcalc.errors import NotFibrewiseLeftAdjoint
from fibcalc.fincat import (
    identity_functor,
    identity_nat,
    product,
    thin_functor,
    walking,
)

CASES = K.mate_cases()


def _label(pa, u, y):
    nat = pa.lam[u]
    cat = nat.source.target
    return cat.morphisms[int(nat.comp[y])]


def test_identity_family():
    b = walking(1)
    u = b.mor((0, 1))
    pc = K.poset_family(b, [walking(1), walking(1)], {u: (0, 1)})
    flag, per, wit = M.is_param_right_adjoint(identity_functor(pc.source), pc, pc)
    assert flag and wit is None
    pa = M.adj(identity_functor(pc.source), pc, pc)
    assert M.verify_mate(pa)["ok"]
    assert all(pa.lam[k].is_identity() for k in range(b.n_mor) if b.is_identity(k))


def test_mate_example_lambda():
    c = K.mate_example()
    flag, per, _ = M.is_param_right_adjoint(c.g, c.pc, c.pd)
    assert flag
    pa = M.adj(c.g, c.pc, c.pd)
    # f_1 = const 0
    assert list(pa.per_fibre[1].left.obj) == [0, 0]
    u = c.base.mor((0, 1))
    # lambda at y is the arrow 0 <= y in the fibre over 1
    assert _label(pa, u, 0) == ((1, 1), (0, 0))
    assert _label(pa, u, 1) == ((1, 1), (0, 1))
    rep = M.verify_mate(pa)
    assert rep["ok"]
    assert {r["morphism"] for r in rep["rows"]} == set(c.base.morphisms)


def test_non_adjoint_witness():
    c = K.non_adjoint_example()
    flag, _, wit = M.is_param_right_adjoint(c.g, c.pc, c.pd)
    assert not flag and wit == 1


def test_beck_chevalley_of_identity_square():
    c = K.mate_example()
    pa = M.adj(c.g, c.pc, c.pd)
    a = pa.per_fibre[0]
    push = identity_functor(a.right.target)
    push_c = identity_functor(a.right.source)
    rho = identity_nat(a.right)
    bc = M.beck_chevalley(rho, a, a, push, push_c)
    assert bc.is_identity()


def test_point_base_is_ordinary_adjoint():
    b = walking(0)
    pc = K.poset_family(b, [walking(0)], {})
    pd = K.poset_family(b, [walking(1)], {})
    g = K.fibrewise_map(pc, pd, [(1,)])
    pa = M.adj(g, pc, pd)
    assert list(pa.per_fibre[0].left.obj) == [0, 0]
    assert M.verify_mate(pa)["ok"]
    assert M.ParamUnit(pa).report()["fibre_restriction"]


def test_param_adjunction_json():
    c = K.mate_example()
    data = M.adj(c.g, c.pc, c.pd).to_json()
    assert set(data) == {"base", "per_fibre", "rho", "lambda"}
    assert data["lambda"]["1"]["morphism"] == "(0,1)"


@settings(max_examples=30)
@given(st.sampled_from(CASES))
def test_mate_identity_on_corpus(case):
    pa = M.adj(case.g, case.pc, case.pd)
    assert M.verify_mate(pa)["ok"]
    assert M.adj_oracle_check(pa)
    assert M.involution_check(pa)


@settings(max_examples=15)
@given(st.sampled_from(CASES))
def test_unit_and_counit_on_corpus(case):
    pa = M.adj(case.g, case.pc, case.pd)
    pu = M.ParamUnit(pa)
    assert all(pu.report().values())
    cou = M.param_counit(pa)
    assert cou["fibre_restriction"] and cou["two_formulas_agree"]
    _, _, commutes, _ = M.pass_to_adjoint(pa, pu)
    assert commutes and M.hom_bijection_oracle(pa, pu)


def test_conjugation_on_chain():
    cases = [c for c in CASES if c.base.name == "[2]"][:10]
    assert cases
    for c in cases:
        r = M.conjugation_identities(M.adj(c.g, c.pc, c.pd))
        assert r["checked"] > 0 and r["failures"] == 0


def _heyting():
    p = K.heyting_chain()
    pp = product(p, p)
    f = thin_functor(pp, p, [min(x, b) for x in range(3) for b in range(3)])
    return p, M.two_var_adjoint(f, p, p)


def test_heyting_implication():
    p, r = _heyting()
    assert len(r.bijection) == 27 and r.natural
    assert all(a == b for a, b in r.bijection.values())
    # G(y, b) is b => y
    for y in range(3):
        for b in range(3):
            assert int(r.G.obj[y * 3 + b]) == (2 if b <= y else y)
    assert [int(r.G.obj[d * 3 + 2]) for d in range(3)] == [0, 1, 2]
    assert r.tw_functor.is_valid()


def test_two_var_adjoint_rejects_non_left_adjoint():
    p = K.heyting_chain()
    pp = product(p, p)
    # F(x, b) = max(x, b) preserves no bottom, so F(-, 2) = const 2 has no right adjoint
    f = thin_functor(pp, p, [max(x, b) for x in range(3) for b in range(3)])
    with pytest.raises(NotFibrewiseLeftAdjoint):
        M.two_var_adjoint(f, p, p)


def test_corr_pullback_on_example():
    c = K.mate_example()
    r = M.corr_pullback_checks(M.adj(c.g, c.pc, c.pd))
    assert r["left_fibrations"] and r["adjunct_iso"] and r["equivalence_found"]
