import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import monotone_maps, posets
from fibcalc.errors import (
    DanglingEndpoint,
    MissingComposite,
    MissingIdentity,
    NonAssociative,
    SearchCapExceeded,
)
from fibcalc.fincat import (
    core,
    discrete,
    find_adjoint,
    find_equivalence,
    from_json,
    group_cat,
    isomorphic,
    localization_certificate,
    monoid_cat,
    opposite,
    poset,
    product,
    search_functors,
    thin_functor,
    walking,
)


def test_walking_counts():
    for n in range(4):
        c = walking(n)
        assert c.n_obj == n + 1
        assert c.n_mor == (n + 1) * (n + 2) // 2


def test_missing_identity():
    with pytest.raises(MissingIdentity):
        from_json({"objects": ["a"], "morphisms": [{"id": "f", "src": "a", "tgt": "a"}],
                   "identities": {}})


def test_dangling_endpoint():
    with pytest.raises(DanglingEndpoint):
        from_json({"objects": ["a"], "morphisms": [{"id": "f", "src": "a", "tgt": "b"}]})


def test_missing_composite():
    data = {"objects": ["a", "b", "c"],
            "morphisms": [{"id": "f", "src": "a", "tgt": "b"},
                          {"id": "g", "src": "b", "tgt": "c"}]}
    with pytest.raises(MissingComposite) as exc:
        from_json(data)
    assert exc.value.witness == ("g", "f")


def test_non_associative():
    # e idempotent-like table that breaks associativity
    table = [[0, 1, 2], [1, 2, 0], [2, 2, 2]]
    with pytest.raises(NonAssociative):
        monoid_cat(table)


def test_group_and_core():
    g = group_cat(3)
    assert g.is_groupoid()
    assert core(g).n_mor == 3
    c = core(walking(2))
    assert c.n_mor == 3 and c.is_groupoid()


def test_opposite_involution():
    c = walking(2)
    assert opposite(opposite(c)).same_as(c)


def test_product_counts():
    c = product(walking(1), walking(2))
    assert c.n_obj == 6 and c.n_mor == 18
    c.validate()


def test_json_round_trip():
    c = product(walking(1), walking(1))
    data = json.loads(json.dumps(c.to_json()))
    back = from_json(data)
    assert back.n_obj == c.n_obj and back.n_mor == c.n_mor
    assert isomorphic(c, back) is not None


def test_json_auto_identities():
    c = from_json({"objects": ["a", "b"], "morphisms": [{"id": "f", "src": "a", "tgt": "b"}]})
    assert c.n_mor == 3
    assert c.morphisms[c.ident[0]] == "id_a"


def _adjoint_oracle(g, c, d):
    """All left adjoints of a monotone map g: d -> c between posets, by
    checking f y <= x iff y <= g x over every monotone f."""
    found = []
    for f in monotone_maps(c, d):
        if all(bool(d.hom(f[y], x)) == bool(c.hom(y, int(g.obj[x])))
               for y in range(c.n_obj) for x in range(d.n_obj)):
            found.append(f)
    return found


@given(posets(3), posets(3), st.data())
def test_left_adjoint_matches_oracle(c, d, data):
    maps = monotone_maps(d, c)
    img = data.draw(st.sampled_from(maps))
    g = thin_functor(d, c, img)
    adj = find_adjoint(g, "left")
    oracle = _adjoint_oracle(g, c, d)
    assert (adj is not None) == bool(oracle)
    if adj is not None:
        assert tuple(adj.left.obj.tolist()) in oracle
        assert adj.triangle_failures() == []
        assert adj.hom_bijection_ok() and adj.naturality_ok()


@given(posets(3), posets(3), st.data())
def test_right_adjoint_matches_oracle(c, d, data):
    img = data.draw(st.sampled_from(monotone_maps(d, c)))
    g = thin_functor(d, c, img)
    adj = find_adjoint(g, "right")
    oracle = _adjoint_oracle(g.op(), opposite(c), opposite(d))
    assert (adj is not None) == bool(oracle)
    if adj is not None:
        assert adj.left is g
        assert adj.triangle_failures() == []


def test_diagonal_adjoints():
    # [1] -> [1]x[1] diagonal has both adjoints (meet and join)
    c = walking(1)
    pp = product(c, c)
    proj = thin_functor(pp, c, [min(a, b) for a in range(2) for b in range(2)])
    assert find_adjoint(proj, "left") is not None


def test_no_left_adjoint():
    # the inclusion of the discrete pair into the span apex-free cospan
    c = poset(["a", "b", "t"], [("a", "t"), ("b", "t")])
    d = discrete(["a", "b"])
    g = thin_functor(d, c, [0, 1])
    assert find_adjoint(g, "left") is None


def test_find_adjoint_deterministic():
    c = walking(2)
    g = thin_functor(c, c, [0, 2, 2])
    a1, a2 = find_adjoint(g, "left"), find_adjoint(g, "left")
    assert (a1 is None) == (a2 is None)
    if a1 is not None:
        assert a1.left.same_as(a2.left)


def test_localisation_certificate_examples():
    c = walking(1)
    t = thin_functor(c, walking(0), [0, 0])
    assert localization_certificate(t, [c.mor((0, 1))]) == (True, True)
    g = thin_functor(c, c, [0, 1])
    assert localization_certificate(g, [c.mor((0, 1))]) == (False, True)


def test_search_caps():
    big = walking(8)
    with pytest.raises(SearchCapExceeded):
        find_equivalence(big, big)


def test_equivalence_of_isomorphic_objects():
    chaotic = from_json({
        "objects": ["a", "b"],
        "morphisms": [{"id": "ab", "src": "a", "tgt": "b"}, {"id": "ba", "src": "b", "tgt": "a"}],
        "compose": [["ba", "ab", "id_a"], ["ab", "ba", "id_b"]]})
    eq = find_equivalence(chaotic, walking(0))
    assert eq is not None


@given(posets(3))
def test_functor_count_matches_monotone_maps(p):
    q = walking(1)
    found = list(search_functors(p, q))
    assert len(found) == len(monotone_maps(p, q))
