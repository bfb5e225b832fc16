import itertools
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fibcalc import graytensor as G
from fibcalc.corpus import q_prime_fib
from fibcalc.errors import CapExceeded
from fibcalc.fincat import walking


def _chain_oracle(x, y):
    """Chains from x to y in the product order, by brute force over
    subsets of the interval."""
    inner = [(i, j) for i in range(x[0], y[0] + 1) for j in range(x[1], y[1] + 1)
             if (i, j) not in (x, y)]
    total = maximal = 0
    for r in range(len(inner) + 1):
        for sub in itertools.combinations(inner, r):
            pts = sorted(sub)
            if all(a[0] <= b[0] and a[1] <= b[1] for a, b in zip(pts, pts[1:])):
                total += 1
                if r == (y[0] - x[0]) + (y[1] - x[1]) - 1:
                    maximal += 1
    return total, maximal


grid_pairs = st.tuples(st.integers(0, 3), st.integers(0, 3)).flatmap(
    lambda mn: st.tuples(st.just(mn),
                         st.tuples(st.integers(0, mn[0]), st.integers(0, mn[1])),
                         st.tuples(st.integers(0, mn[0]), st.integers(0, mn[1]))))


@given(grid_pairs)
def test_chain_counts(args):
    (m, n), x, y = args
    if not (x[0] <= y[0] and x[1] <= y[1]) or x == y:
        return
    ch, mx, _ = G.chain_posets(m, n, x, y)
    total, maximal = _chain_oracle(x, y)
    assert len(ch.chains) == total
    assert mx.n_obj == maximal == comb(y[0] - x[0] + y[1] - x[1], y[0] - x[0])


@given(grid_pairs)
def test_max_certificate(args):
    (m, n), x, y = args
    if not (x[0] <= y[0] and x[1] <= y[1]):
        return
    cert = G.max_certificate(*G.chain_posets(m, n, x, y))
    assert cert["ok"] and cert["marked_to_identity"] and cert["surjective"] and cert["fibres"]


def test_square_chains():
    ch, mx, fmax = G.chain_posets(1, 1, (0, 0), (1, 1))
    assert len(ch.chains) == 3
    assert mx.objects == ("00<01<11", "00<10<11")
    assert mx.hom(mx.obj("00<10<11"), mx.obj("00<01<11"))
    # the chain 00<11 completes to the least maximal chain
    assert [mx.objects[i] for i in fmax.obj] == ["00<10<11", "00<01<11", "00<10<11"]


def test_max_is_not_a_fibration_in_general():
    cert = G.max_certificate(*G.chain_posets(2, 1, (0, 0), (2, 1)))
    assert cert["ok"]
    assert not cert["cartesian"] and not cert["cocartesian"]


def test_bad_endpoints():
    with pytest.raises(ValueError):
        G.chain_posets(1, 1, (1, 1), (0, 0))


@pytest.mark.parametrize("m,n", [(m, n) for m in range(3) for n in range(3)])
def test_gray_simplices_laws(m, n):
    assert all(G.gray_simplices(m, n).check().values())


def test_square_hom():
    h = G.gray_simplices(1, 1).hom[("00", "11")]
    assert h.n_obj == 2
    assert sum(1 for k in range(h.n_mor) if not h.is_identity(k)) == 1


def test_gray_cap():
    with pytest.raises(CapExceeded):
        G.gray_simplices(4, 1)


@pytest.mark.parametrize("m,n", [(1, 0), (1, 1), (2, 1), (2, 2), (0, 2)])
def test_collapse(m, n):
    r = G.collapse_report(G.collapse_to_delta2(m, n))
    assert r["two_functor"] and r["vertical_inverted"] and r["horizontal_kept"]
    assert r["certificates"]


def test_scaling_of_square():
    d1 = G.nerve(walking(1))
    r = G.gray_scaling_report(d1, d1)
    assert r["nondegenerate"] == 2 and r["nondegenerate_scaled"] == 1
    assert r["predicate_agrees"] and r["faces"] and r["degeneracies"]
    assert G.unit_check(d1)


def test_scaling_flat_has_no_nondegenerate_scaled():
    d1 = G.nerve(walking(1), sharp=False)
    d2 = G.nerve(walking(2), sharp=False)
    r = G.gray_scaling_report(d2, d1)
    assert r["predicate_agrees"] and r["degenerate_scaled"]
    assert G.unit_check(d2)


def test_classifier_on_q_prime():
    r = G.loc_cocart_gray_classifier(q_prime_fib())
    assert r["agrees_with_gray"] and r["gray_flag"]


def test_non_gray_example():
    r = G.loc_cocart_gray_classifier(G.non_gray_example())
    assert r["locally_cocartesian"] and not r["gray_flag"]
    assert r["cond1"] and r["cond3"] and not r["cond2"]
    assert r["agrees_with_gray"] and r["closure_implied"]
    assert "2" in r["witnesses"]
