"""Arrow and twisted arrow categories, free fibrations, and the
correspondence attached to a functor over [1] x B."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadInput, InconsistentCriteria, SearchCapExceeded
from .fibclass import Edges, TwoVarFib, classify, factor_unique
from .fincat import (
    FinCat,
    FinFunctor,
    _check_caps,
    localization_certificate,
    opposite,
    product,
    product_functor,
    pullback,
    search_functors,
)
from .grothendieck import (
    COV,
    PseudoFunctor,
    dualize,
    fib_equivalent,
    reindex_base,
    straighten,
    unstraighten,
)

# ------------------------------------------------------------ arrow category


@dataclass
class ArrowCat:
    cat: FinCat
    base: FinCat
    s: FinFunctor
    t: FinFunctor
    index: dict          # (f, f2, a, b) -> morphism index

    @property
    def fib(self) -> TwoVarFib:
        return TwoVarFib(self.cat, self.base, self.base, self.s, self.t, "Ar")


def arrow_cat(c: FinCat) -> ArrowCat:
    """Ar(C): objects are morphisms of C, morphisms are commuting squares
    (a, b) from f to f2 with b f = f2 a."""
    mors = []
    for f in range(c.n_mor):
        x, y = int(c.src[f]), int(c.tgt[f])
        for a in np.nonzero(c.src == x)[0].tolist():
            for b in np.nonzero(c.src == y)[0].tolist():
                bf = int(c.comp[b, f])
                for f2 in c.hom(int(c.tgt[a]), int(c.tgt[b])):
                    if c.comp[f2, a] == bf:
                        mors.append((f, f2, a, b))
    index = {m: i for i, m in enumerate(mors)}
    n = len(mors)
    by_src: dict[int, list[int]] = {}
    for i, (f, _, _, _) in enumerate(mors):
        by_src.setdefault(f, []).append(i)
    comp = np.full((n, n), -1, dtype=np.int64)
    for i, (f, f2, a, b) in enumerate(mors):
        for j in by_src.get(f2, []):
            _, f3, a2, b2 = mors[j]
            comp[j, i] = index[(f, f3, c.compose(a2, a), c.compose(b2, b))]
    ident = [index[(f, f, int(c.ident[c.src[f]]), int(c.ident[c.tgt[f]]))] for f in range(c.n_mor)]
    labels = [(c.morphisms[f], c.morphisms[f2], c.morphisms[a], c.morphisms[b]) for f, f2, a, b in mors]
    arr = lambda k: np.array([m[k] for m in mors], dtype=np.int64).reshape(n)
    ar = FinCat(c.morphisms, labels, arr(0), arr(1), ident, comp, check=False,
                name=f"Ar({c.name})" if c.name else "Ar")
    s = FinFunctor(ar, c, c.src, arr(2))
    t = FinFunctor(ar, c, c.tgt, arr(3))
    return ArrowCat(ar, c, s, t, index)


# ---------------------------------------------------------- twisted arrows


@dataclass
class TwistedArrowCat:
    variant: str
    cat: FinCat
    base: FinCat
    s: FinFunctor
    t: FinFunctor
    index: dict          # (f, a, b) -> morphism index; f the source in Tw^l

    @property
    def fib(self) -> TwoVarFib:
        return TwoVarFib(self.cat, self.s.target, self.t.target, self.s, self.t, f"Tw^{self.variant[0]}")

    @property
    def proj(self) -> FinFunctor:
        return self.fib.proj


def _tw_left(c: FinCat) -> TwistedArrowCat:
    # f -> f2 is (a: x2 -> x, b: y -> y2) with f2 = b f a
    mors = []
    for f in range(c.n_mor):
        x, y = int(c.src[f]), int(c.tgt[f])
        for a in np.nonzero(c.tgt == x)[0].tolist():
            for b in np.nonzero(c.src == y)[0].tolist():
                mors.append((f, a, b))
    index = {m: i for i, m in enumerate(mors)}
    n = len(mors)
    tgt = np.array([c.chain(b, f, a) for f, a, b in mors], dtype=np.int64).reshape(n)
    src = np.array([m[0] for m in mors], dtype=np.int64).reshape(n)
    by_src: dict[int, list[int]] = {}
    for i in range(n):
        by_src.setdefault(int(src[i]), []).append(i)
    comp = np.full((n, n), -1, dtype=np.int64)
    for i, (f, a, b) in enumerate(mors):
        for j in by_src.get(int(tgt[i]), []):
            _, a2, b2 = mors[j]
            comp[j, i] = index[(f, c.compose(a, a2), c.compose(b2, b))]
    ident = [index[(f, int(c.ident[c.src[f]]), int(c.ident[c.tgt[f]]))] for f in range(c.n_mor)]
    labels = [(c.morphisms[f], c.morphisms[a], c.morphisms[b]) for f, a, b in mors]
    tw = FinCat(c.morphisms, labels, src, tgt, ident, comp, check=False,
                name=f"Tw^l({c.name})" if c.name else "Tw^l")
    aa = np.array([m[1] for m in mors], dtype=np.int64).reshape(n)
    bb = np.array([m[2] for m in mors], dtype=np.int64).reshape(n)
    s = FinFunctor(tw, opposite(c), c.src, aa)
    t = FinFunctor(tw, c, c.tgt, bb)
    return TwistedArrowCat("left", tw, c, s, t, index)


def _tw_right(c: FinCat) -> TwistedArrowCat:
    # f -> f2 is (a: x -> x2, b: y2 -> y) with f = b f2 a, labelled by (f2, a, b)
    mors = []
    for f2 in range(c.n_mor):
        x2, y2 = int(c.src[f2]), int(c.tgt[f2])
        for a in np.nonzero(c.tgt == x2)[0].tolist():
            for b in np.nonzero(c.src == y2)[0].tolist():
                mors.append((f2, a, b))
    index = {m: i for i, m in enumerate(mors)}
    n = len(mors)
    src = np.array([c.chain(b, f2, a) for f2, a, b in mors], dtype=np.int64).reshape(n)
    tgt = np.array([m[0] for m in mors], dtype=np.int64).reshape(n)
    by_src: dict[int, list[int]] = {}
    for i in range(n):
        by_src.setdefault(int(src[i]), []).append(i)
    comp = np.full((n, n), -1, dtype=np.int64)
    for i, (f2, a, b) in enumerate(mors):
        for j in by_src.get(f2, []):
            f3, a2, b2 = mors[j]
            comp[j, i] = index[(f3, c.compose(a2, a), c.compose(b, b2))]
    ident = [index[(f, int(c.ident[c.src[f]]), int(c.ident[c.tgt[f]]))] for f in range(c.n_mor)]
    labels = [(c.morphisms[f2], c.morphisms[a], c.morphisms[b]) for f2, a, b in mors]
    tw = FinCat(c.morphisms, labels, src, tgt, ident, comp, check=False,
                name=f"Tw^r({c.name})" if c.name else "Tw^r")
    aa = np.array([m[1] for m in mors], dtype=np.int64).reshape(n)
    bb = np.array([m[2] for m in mors], dtype=np.int64).reshape(n)
    s = FinFunctor(tw, c, c.src, aa)
    t = FinFunctor(tw, opposite(c), c.tgt, bb)
    return TwistedArrowCat("right", tw, c, s, t, index)


def tw(c: FinCat, variant: str = "left") -> TwistedArrowCat:
    """Tw^l(C) -> C^op x C, or Tw^r(C) -> C x C^op.  The right variant is
    built on its own and checked to be the opposite of the left one."""
    if variant == "left":
        return _tw_left(c)
    if variant != "right":
        raise ValueError("variant must be 'left' or 'right'")
    r = _tw_right(c)
    left = _tw_left(c).cat
    if not _same_by_labels(r.cat, opposite(left)):
        raise InconsistentCriteria("Tw^r differs from (Tw^l)^op", c.name)
    return r


def _same_by_labels(c: FinCat, d: FinCat) -> bool:
    from .fincat import is_isomorphic_by_identity
    return is_isomorphic_by_identity(c, d)


def tw_functor(f: FinFunctor, src: TwistedArrowCat | None = None,
               tgt: TwistedArrowCat | None = None) -> FinFunctor:
    """Tw^l(F): Tw^l(C) -> Tw^l(D)."""
    src = src or tw(f.source, "left")
    tgt = tgt or tw(f.target, "left")
    obj = f.mor.copy()
    mor = np.array([tgt.index[(int(f.mor[a]), int(f.mor[b]), int(f.mor[c]))]
                    for (a, b, c) in sorted(src.index, key=src.index.get)], dtype=np.int64)
    return FinFunctor(src.cat, tgt.cat, obj, mor.reshape(src.cat.n_mor))


def tw_localisation(b: FinCat) -> tuple[bool, bool]:
    """Certificate for t: Tw^r(B) -> B^op at the edges over identities."""
    r = tw(b, "right")
    w = [k for k in range(r.cat.n_mor) if r.t.target.is_identity(int(r.t.mor[k]))]
    return localization_certificate(r.t, w)


def ar_tw_duality(c: FinCat, caps=(16, 200)) -> dict:
    """Dualise (s, t): Ar(C) -> C x C over each factor and compare with the
    twisted arrow categories over the same bases."""
    ar = arrow_cat(c).fib
    out = {}
    for side, direction, variant, kind in (("B", "ct", "right", "cart"), ("A", "cc", "left", "cocart")):
        d = dualize(ar, side, direction)
        t = tw(c, variant).fib
        d = reindex_base(d, t.base_a, t.base_b)
        out[variant] = fib_equivalent(d, t, (kind,), caps) is not None
    return out


# ---------------------------------------------------------- free fibrations


@dataclass
class FreeFib:
    variance: str
    total: FinCat
    proj: FinFunctor     # to B
    unit: FinFunctor     # E -> total, e |-> (e, id)
    pr_e: FinFunctor
    pr_ar: FinFunctor
    ar: ArrowCat

    def obj_index(self, e: int, f: int) -> int:
        return self._oidx[(e, f)]


def free_fib(phi: FinFunctor, variance: str = "cocart") -> FreeFib:
    """E x_B Ar(B) along ev_0 (cocart, projecting by ev_1) or along ev_1
    (cart, projecting by ev_0)."""
    b = phi.target
    ar = arrow_cat(b)
    leg, other = (ar.s, ar.t) if variance == "cocart" else (ar.t, ar.s)
    if variance not in ("cocart", "cart"):
        raise ValueError("variance must be 'cocart' or 'cart'")
    p, pr_e, pr_ar = pullback(phi, leg)
    proj = pr_ar.then(other)
    oidx = {(int(pr_e.obj[k]), int(pr_ar.obj[k])): k for k in range(p.n_obj)}
    midx = {(int(pr_e.mor[k]), int(pr_ar.mor[k])): k for k in range(p.n_mor)}
    e = phi.source
    uo = [oidx[(x, int(b.ident[phi.obj[x]]))] for x in range(e.n_obj)]
    um = []
    for h in range(e.n_mor):
        i0, i1 = int(b.ident[phi.obj[e.src[h]]]), int(b.ident[phi.obj[e.tgt[h]]])
        ph = int(phi.mor[h])
        um.append(midx[(h, ar.index[(i0, i1, ph, ph)])])
    out = FreeFib(variance, p, proj, FinFunctor(e, p, uo, um), pr_e, pr_ar, ar)
    out._oidx = oidx
    return out


def extend_to_free(f: FinFunctor, phi: FinFunctor, p: FinFunctor, variance: str = "cart",
                   free: FreeFib | None = None) -> FinFunctor:
    """The extension of f: E -> E' over B to the free fibration, sending
    (e, beta) to the chosen lift of beta at f(e)."""
    free = free or free_fib(phi, variance)
    e2, b = p.source, p.target
    ed = Edges(p)
    tot = free.total
    kind = variance
    lifts = []
    for z in range(tot.n_obj):
        x, beta = int(free.pr_e.obj[z]), int(free.pr_ar.obj[z])
        l = ed.lift(int(f.obj[x]), beta, kind)
        if l is None:
            raise BadInput(f"target has no {kind}esian lift of {b.morphisms[beta]!r}")
        lifts.append(l)
    end = e2.src if kind == "cart" else e2.tgt
    obj = np.array([int(end[l]) for l in lifts], dtype=np.int64)
    mor = np.zeros(tot.n_mor, dtype=np.int64)
    ar = free.ar
    for k in range(tot.n_mor):
        z, z2 = int(tot.src[k]), int(tot.tgt[k])
        h, sq = int(free.pr_e.mor[k]), int(free.pr_ar.mor[k])
        over = int(ar.s.mor[sq]) if kind == "cart" else int(ar.t.mor[sq])
        fh = int(f.mor[h])
        allowed = lambda m, u=over: p.mor[m] == u
        if kind == "cart":
            mor[k] = factor_unique(e2, lifts[z2], e2.compose(fh, lifts[z]), "cart", allowed)
        else:
            mor[k] = factor_unique(e2, lifts[z], e2.compose(lifts[z2], fh), "cocart", allowed)
    return FinFunctor(tot, e2, obj, mor, check=True)


def _nat_iso_over(g: FinFunctor, h: FinFunctor, p: FinFunctor, fixed) -> bool:
    """Is there a natural iso g => h with components over identities, and
    identity components on ``fixed`` objects?"""
    c, d = g.source, g.target
    cands = []
    for z in range(c.n_obj):
        opts = [m for m in d.isos(int(g.obj[z]), int(h.obj[z])) if p.target.is_identity(int(p.mor[m]))]
        if z in fixed:
            opts = [m for m in opts if d.is_identity(m)]
        if not opts:
            return False
        cands.append(opts)
    comp = [-1] * c.n_obj

    def ok(z):
        for m in range(c.n_mor):
            s, t = int(c.src[m]), int(c.tgt[m])
            if max(s, t) != z or comp[s] < 0 or comp[t] < 0:
                continue
            if d.compose(int(h.mor[m]), comp[s]) != d.compose(comp[t], int(g.mor[m])):
                return False
        return True

    def dfs(z):
        if z == c.n_obj:
            return True
        for m in cands[z]:
            comp[z] = m
            if ok(z) and dfs(z + 1):
                return True
        comp[z] = -1
        return False

    return dfs(0)


def free_universality(f: FinFunctor, phi: FinFunctor, p: FinFunctor, variance: str = "cart",
                      caps=(12, 120), limit: int = 200) -> dict:
    """Exhaustive check that every edge-preserving extension of f over B
    agrees with the chosen one up to iso over B fixing E."""
    free = free_fib(phi, variance)
    ext = extend_to_free(f, phi, p, variance, free)
    _check_caps([free.total, p.source], caps)
    src_fl = Edges(free.proj).flags(variance)
    tgt_fl = Edges(p).flags(variance)
    unit_o = {int(free.unit.obj[x]): int(f.obj[x]) for x in range(f.source.n_obj)}
    unit_m = {int(free.unit.mor[h]): int(f.mor[h]) for h in range(f.source.n_mor)}

    def obj_ok(z, w):
        if p.obj[w] != free.proj.obj[z]:
            return False
        return unit_o.get(z, w) == w

    def mor_ok(m, n):
        if p.mor[n] != free.proj.mor[m]:
            return False
        if src_fl[m] and not tgt_fl[n]:
            return False
        return unit_m.get(m, n) == n

    found = list(search_functors(free.total, p.source, obj_ok, mor_ok, limit=limit))
    fixed = set(unit_o)
    isos = [_nat_iso_over(g, ext, p, fixed) for g in found]
    preserves = bool((~src_fl | tgt_fl[ext.mor]).all())
    return {"extension_valid": ext.is_valid(), "preserves_edges": preserves,
            "restricts_to_f": free.unit.then(ext).same_as(f),
            "n_found": len(found), "all_iso": all(isos) and bool(found)}


def dual_of_free(phi: FinFunctor, variance: str = "cart"):
    """Dual of the free cartesian (resp. cocartesian) fibration next to
    E x_B Tw^l(B) -> B^op (resp. E x_B Tw^r(B) -> B^op)."""
    free = free_fib(phi, variance)
    one = TwoVarFib.one_variable(free.proj, "free")
    direction = "cc" if variance == "cart" else "ct"
    lhs = dualize(one, "A", direction)
    b = phi.target
    if variance == "cart":
        t_ = tw(b, "left")
        pb, pr_e, pr_tw = pullback(phi, t_.t)
        proj = pr_tw.then(t_.s)
    else:
        t_ = tw(b, "right")
        pb, pr_e, pr_tw = pullback(phi, t_.s)
        proj = pr_tw.then(t_.t)
    rhs = reindex_base(TwoVarFib.one_variable(proj, "ExTw"), lhs.base_a, lhs.base_b)
    return lhs, rhs


def dual_of_free_check(phi: FinFunctor, variance: str = "cart", caps=(16, 200)) -> bool:
    lhs, rhs = dual_of_free(phi, variance)
    kind = "cocart" if variance == "cart" else "cart"
    return fib_equivalent(lhs, rhs, (kind,), caps) is not None


# ------------------------------------------------------------ correspondences


@dataclass
class Correspondence:
    total: FinCat
    proj: FinFunctor     # to the base
    name: str = "corr"

    @property
    def base(self) -> FinCat:
        return self.proj.target

    @property
    def fib(self) -> TwoVarFib:
        return TwoVarFib.one_variable(self.proj, self.name)

    def is_left_fibration(self) -> bool:
        return bool(classify(self.fib).left_fib)


def _fibre_parts(p: FinFunctor, one: FinCat):
    """Fibres of p: E -> [1] over 0 and 1 as (cat, oi, mi)."""
    e = p.source
    out = []
    for i in range(2):
        from .fincat import subcategory
        om = p.obj == i
        mm = p.mor == one.ident[i]
        out.append(subcategory(e, om, mm))
    return out


def corr(p: FinFunctor) -> Correspondence:
    """Pullback of Tw^l(E) -> E^op x E along E_0^op x E_1."""
    e, one = p.source, p.target
    (e0, oi0, mi0), (e1, oi1, mi1) = _fibre_parts(p, one)
    t_ = tw(e, "left")
    tp = t_.proj
    i0 = FinFunctor(opposite(e0), t_.s.target, oi0, mi0)
    i1 = FinFunctor(e1, e, oi1, mi1)
    inc = product_functor(i0, i1, tgt=tp.target)
    pb, pr_tw, pr_base = pullback(tp, inc)
    out = Correspondence(pb, pr_base, "corr")
    out.parts = (t_, pr_tw, (e0, oi0, mi0), (e1, oi1, mi1))
    return out


def _dual_of_op(fp: FinFunctor):
    """(E^op)^vee -> B for a cocartesian fibration E -> B, with the fibre
    (cat, oi, mi) lists used by its Grothendieck index."""
    e, b = fp.source, fp.target
    eop = FinFunctor(opposite(e), opposite(b), fp.obj, fp.mor)
    one = TwoVarFib.one_variable(eop)
    d = dualize(one, "A", "cc", check=False)
    fibs = [one.fibre(a=c) for c in range(b.n_obj)]
    return FinFunctor(d.total, b, d.p1.obj, d.p1.mor), d, fibs


class RelCorr:
    """Data shared by both constructions of corr_B for E -> [1] x B."""

    def __init__(self, p: TwoVarFib):
        if p.base_a.n_obj != 2 or p.base_a.n_mor != 3:
            raise BadInput("corr_B needs a functor to [1] x B")
        tax = classify(p)
        if not tax.cocart_over_B:
            raise BadInput("E -> [1] x B needs cocartesian lifts over iota[1] x B")
        self.p = p
        self.e = p.total
        self.b = p.base_b
        f0, oi0, mi0, ed0 = p.fibre_over_b(0)
        f1, oi1, mi1, ed1 = p.fibre_over_b(1)
        self.f0, self.oi0, self.mi0, self.ed0 = f0, oi0, mi0, ed0
        self.f1, self.oi1, self.mi1 = f1, oi1, mi1
        self.dual0, self.d0, self.d0_fibs = _dual_of_op(f0)
        base, pr0, pr1 = pullback(self.dual0, f1)
        self.base, self.pr0, self.pr1 = base, pr0, pr1
        self.base_oidx = {(int(pr0.obj[k]), int(pr1.obj[k])): k for k in range(base.n_obj)}
        self.base_midx = {(int(pr0.mor[k]), int(pr1.mor[k])): k for k in range(base.n_mor)}
        self.e1_mor = {int(m): i for i, m in enumerate(mi1)}
        self.u01 = p.base_a.mor((0, 1))

    def d0_to_e(self, i: int) -> int:
        """Object of (E_0^op)^vee as an object of E."""
        c, x = self.d0.groth.fibre_obj(i)
        return int(self.oi0[self.d0_fibs[c][1][x]])

    def d0_mor(self, k: int):
        """Morphism of (E_0^op)^vee over beta as (beta, chi, a): chi the
        chosen lift e0 -> beta_! e0 and a: e0' -> beta_! e0, both in E."""
        u, x, x2, f = self.d0.groth.mors[k]
        c, c2 = int(self.b.src[u]), int(self.b.tgt[u])
        fib2 = self.d0_fibs[c2]
        a = int(self.mi0[fib2[2][f]])
        e0 = int(self.oi0[self.d0_fibs[c][1][x]])
        chi = self.ed0.lift(int(np.nonzero(self.oi0 == e0)[0][0]), u, "cocart")
        return u, int(self.mi0[chi]), a

    def act(self, m: int, h: int) -> int:
        """The base morphism m moves h: e0 -> e1 to h': e0' -> e1'."""
        e, p = self.e, self.p
        m0, m1 = int(self.pr0.mor[m]), int(self.pr1.mor[m])
        u, chi, a = self.d0_mor(m0)
        if self.e.tgt[chi] != self.e.tgt[a]:
            raise InconsistentCriteria("dual transport differs from the chosen lift")
        w = int(self.mi1[m1])
        b2 = int(self.b.tgt[u])
        over = p.base_mor(self.u01, int(self.b.ident[b2]))
        k = factor_unique(e, chi, e.compose(w, h), "cocart", lambda q: p.proj.mor[q] == over)
        return e.compose(k, a)

    def fibre_hom(self, k: int) -> tuple[int, ...]:
        e0 = self.d0_to_e(int(self.pr0.obj[k]))
        e1 = int(self.oi1[self.pr1.obj[k]])
        return self.e.hom(e0, e1)

    def e_to_d0(self, e0: int) -> int:
        j = int(np.nonzero(self.oi0 == e0)[0][0])
        c = int(self.f0.obj[j])
        x = int(np.nonzero(self.d0_fibs[c][1] == j)[0][0])
        return self.d0.groth.obj(c, x)

    def d0_morphism(self, u: int, e0: int, e0p: int, a: int) -> int:
        """The morphism of (E_0^op)^vee over u from e0 to e0' whose fibre
        part is a: e0' -> u_! e0."""
        j0 = int(np.nonzero(self.oi0 == e0)[0][0])
        j1 = int(np.nonzero(self.oi0 == e0p)[0][0])
        c, c2 = int(self.f0.obj[j0]), int(self.f0.obj[j1])
        fc, fc2 = self.d0_fibs[c], self.d0_fibs[c2]
        x = int(np.nonzero(fc[1] == j0)[0][0])
        x2 = int(np.nonzero(fc2[1] == j1)[0][0])
        ja = int(np.nonzero(self.mi0 == a)[0][0])
        f = int(np.nonzero(fc2[2] == ja)[0][0])
        key = (u, x, x2, f)
        if key not in self.d0.groth.index:
            raise InconsistentCriteria("dual transport differs from the chosen lift", key)
        return self.d0.groth.index[key]


def corr_b_direct(p: TwoVarFib) -> Correspondence:
    """corr_B(E) as the category of elements of (e0, e1) |-> Hom_E(e0, e1)
    over (E_0^op)^vee x_B E_1, transports by unique factorisation."""
    rc = p if isinstance(p, RelCorr) else RelCorr(p)
    base, e = rc.base, rc.e
    objs = [(k, h) for k in range(base.n_obj) for h in rc.fibre_hom(k)]
    oidx = {o: i for i, o in enumerate(objs)}
    mors = []
    for m in range(base.n_mor):
        k = int(base.src[m])
        for h in rc.fibre_hom(k):
            mors.append((m, h, rc.act(m, h)))
    midx = {(m, h): i for i, (m, h, _) in enumerate(mors)}
    n = len(mors)
    src = np.array([oidx[(int(base.src[m]), h)] for m, h, _ in mors], dtype=np.int64).reshape(n)
    tgt = np.array([oidx[(int(base.tgt[m]), h2)] for m, _, h2 in mors], dtype=np.int64).reshape(n)
    comp = np.full((n, n), -1, dtype=np.int64)
    for i, (m, h, h2) in enumerate(mors):
        for m2 in range(base.n_mor):
            if base.comp[m2, m] >= 0 and (m2, h2) in midx:
                comp[midx[(m2, h2)], i] = midx[(int(base.comp[m2, m]), h)]
    ident = [midx[(int(base.ident[k]), h)] for k, h in objs]
    olab = [(base.objects[k], e.morphisms[h]) for k, h in objs]
    mlab = [(base.morphisms[m], e.morphisms[h]) for m, h, _ in mors]
    tot = FinCat(olab, mlab, src, tgt, ident, comp, check=True, name="corr_B")
    proj = FinFunctor(tot, base, [k for k, _ in objs], [m for m, _, _ in mors], check=True)
    return Correspondence(tot, proj, "corr_B")


def corr_b_fibrewise(p: TwoVarFib) -> Correspondence:
    """corr_B(E) by taking corr of each fibre E_b -> [1] and reassembling
    over B along the transports of E."""
    from .fincat import NatTransf
    rc = p if isinstance(p, RelCorr) else RelCorr(p)
    p = rc.p
    e, b, one = rc.e, rc.b, p.base_a
    F = straighten(p, COV, "B")
    fibs = [p.fibre(b=c) for c in range(b.n_obj)]
    cors = []
    for c in range(b.n_obj):
        cat, oi, mi = fibs[c]
        cors.append(corr(FinFunctor(cat, one, p.p1.obj[oi], p.p1.mor[mi])))
    info = [_CorrInfo(cr) for cr in cors]

    def corr_map(c, c2, fun):
        src, dst = info[c], info[c2]
        obj = [dst.obj_key(int(fun.mor[src.tw_obj(k)]), int(fun.obj[src.end0(k)]),
                           int(fun.obj[src.end1(k)]))
               for k in range(src.cr.total.n_obj)]
        mor = []
        for k in range(src.cr.total.n_mor):
            f_, a_, b_ = src.tw_mor(k)
            mor.append(dst.mor_key((int(fun.mor[f_]), int(fun.mor[a_]), int(fun.mor[b_]))))
        return FinFunctor(src.cr.total, dst.cr.total, obj, mor)

    trans = []
    for u in range(b.n_mor):
        trans.append(corr_map(int(b.src[u]), int(b.tgt[u]), F.transport[u]))
    units = []
    for c in range(b.n_obj):
        if not F.unit_isos[c].is_identity():
            raise InconsistentCriteria("cleavage is not normalised")
        t_id = trans[int(b.ident[c])]
        units.append(NatTransf(t_id, t_id, cors[c].total.ident.copy()))
    comp_isos = {}
    for v in range(b.n_mor):
        for u in range(b.n_mor):
            if b.comp[v, u] < 0:
                continue
            vu = int(b.comp[v, u])
            c0, c2 = int(b.src[u]), int(b.tgt[v])
            mu = F.comp_isos[(v, u)]
            fib2 = fibs[c2][0]
            src, dst = info[c0], info[c2]
            comps = []
            for k in range(src.cr.total.n_obj):
                h = int(F.transport[vu].mor[src.tw_obj(k)])
                a_ = int(fib2.inverse[mu.comp[src.end0(k)]])
                b_ = int(mu.comp[src.end1(k)])
                comps.append(dst.mor_key((h, a_, b_)))
            comp_isos[(v, u)] = NatTransf(trans[vu], trans[u].then(trans[v]), comps)
    G = PseudoFunctor(b, COV, [cr.total for cr in cors], trans, units, comp_isos).validate()
    un = unstraighten(G, name="corr_B")
    tot = un.total
    obj = np.zeros(tot.n_obj, dtype=np.int64)
    for i in range(tot.n_obj):
        c, k = un.groth.fibre_obj(i)
        e0 = int(fibs[c][1][info[c].end0(k)])
        e1 = int(fibs[c][1][info[c].end1(k)])
        obj[i] = rc.base_oidx[(rc.e_to_d0(e0), int(np.nonzero(rc.oi1 == e1)[0][0]))]
    mor = np.zeros(tot.n_mor, dtype=np.int64)
    for i, (u, x, x2, f) in enumerate(un.groth.mors):
        c, c2 = int(b.src[u]), int(b.tgt[u])
        _, a_, b_ = info[c2].tw_mor(f)
        a = int(fibs[c2][2][a_])                # e0' -> u_! e0
        cm = int(fibs[c2][2][b_])               # u_! e1 -> e1'
        e0 = int(fibs[c][1][info[c].end0(x)])
        e1 = int(fibs[c][1][info[c].end1(x)])
        e0p = int(fibs[c2][1][info[c2].end0(x2)])
        lift1 = p.edges.lift(e1, p.base_mor(int(one.ident[1]), u), "cocart")
        w = e.compose(cm, lift1)
        mor[i] = rc.base_midx[(rc.d0_morphism(u, e0, e0p, a), rc.e1_mor[w])]
    proj = FinFunctor(tot, rc.base, obj, mor, check=True)
    return Correspondence(tot, proj, "corr_B")


class _CorrInfo:
    """Index bookkeeping for corr(E_b) built on local fibre indices."""

    def __init__(self, cr: Correspondence):
        self.cr = cr
        t_, pr_tw, (e0, oi0, mi0), (e1, oi1, mi1) = cr.parts
        self.t_, self.pr_tw = t_, pr_tw
        self.e0, self.oi0, self.mi0 = e0, oi0, mi0
        self.e1, self.oi1, self.mi1 = e1, oi1, mi1
        self.keys = sorted(t_.index, key=t_.index.get)
        self._o = {(int(pr_tw.obj[k]), int(cr.proj.obj[k])): k for k in range(cr.total.n_obj)}
        self._m = {int(pr_tw.mor[k]): k for k in range(cr.total.n_mor)}
        self._o0 = {int(o): i for i, o in enumerate(oi0)}
        self._o1 = {int(o): i for i, o in enumerate(oi1)}

    def tw_obj(self, k: int) -> int:
        return int(self.pr_tw.obj[k])

    def end0(self, k: int) -> int:
        return int(self.oi0[int(self.cr.proj.obj[k]) // self.e1.n_obj])

    def end1(self, k: int) -> int:
        return int(self.oi1[int(self.cr.proj.obj[k]) % self.e1.n_obj])

    def tw_mor(self, k: int):
        return self.keys[int(self.pr_tw.mor[k])]

    def obj_key(self, h: int, x0: int, x1: int) -> int:
        return self._o[(h, self._o0[x0] * self.e1.n_obj + self._o1[x1])]

    def mor_key(self, key) -> int:
        # the Tw morphism determines the base morphism here
        return self._m[self.t_.index[key]]


def corr_b_check(p: TwoVarFib, caps=(40, 400)) -> dict:
    """Both constructions of corr_B agree over (E_0^op)^vee x_B E_1."""
    rc = RelCorr(p)
    direct = corr_b_direct(rc)
    fw = corr_b_fibrewise(rc)
    try:
        w = fib_equivalent(direct.fib, fw.fib, ("cocart",), caps)
        agree = w is not None
    except SearchCapExceeded:
        agree = None
    return {"direct_left_fib": direct.is_left_fibration(),
            "fibrewise_left_fib": fw.is_left_fibration(), "agree": agree}


def corr_cocart_check(p: FinFunctor, caps=(40, 400)) -> bool:
    """For E -> [1] cocartesian with transport g: corr(E) is the pullback
    of Tw^l(E_1) along g^op x id."""
    return _corr_pullback(p, "cocart", caps)


def corr_cart_check(p: FinFunctor, caps=(40, 400)) -> bool:
    """For E -> [1] cartesian with transport g: corr(E) is the pullback of
    Tw^l(E_0) along id x g."""
    return _corr_pullback(p, "cart", caps)


def _corr_pullback(p: FinFunctor, kind: str, caps) -> bool:
    from .fibclass import transport
    one = p.target
    c = corr(p)
    q = TwoVarFib.one_variable(p)
    f0, f1 = q.fibre(a=0), q.fibre(a=1)
    u = one.mor((0, 1))
    if kind == "cocart":
        g = transport(q, f0, f1, lambda x: q.edges.lift(x, u, "cocart"), "cocart")
        t_ = tw(f1[0], "left")
        leg = product_functor(g.op(), FinFunctor(f1[0], f1[0], np.arange(f1[0].n_obj),
                                                 np.arange(f1[0].n_mor)),
                              src=product(opposite(f0[0]), f1[0]), tgt=t_.proj.target)
    else:
        g = transport(q, f1, f0, lambda x: q.edges.lift(x, u, "cart"), "cart")
        t_ = tw(f0[0], "left")
        leg = product_functor(FinFunctor(opposite(f0[0]), opposite(f0[0]), np.arange(f0[0].n_obj),
                                         np.arange(f0[0].n_mor)), g,
                              src=product(opposite(f0[0]), f1[0]), tgt=t_.proj.target)
    pb, _, pr_base = pullback(t_.proj, FinFunctor(c.base, t_.proj.target, leg.obj, leg.mor))
    other = Correspondence(pb, pr_base, "pullback")
    return fib_equivalent(c.fib, other.fib, ("cocart",), caps) is not None


# -------------------------------------------------------- cartesian lemmas

def tw_cartesian_lemma(p: FinFunctor) -> dict:
    """A Tw^l(E) morphism (a, b) with a p-cocartesian and b p-cartesian is
    Tw^l(p)-cartesian; returns counts and any counterexample."""
    te, tb = tw(p.source, "left"), tw(p.target, "left")
    tp = tw_functor(p, te, tb)
    ed = Edges(p)
    fl = Edges(tp).cart
    keys = sorted(te.index, key=te.index.get)
    hyp = ok = 0
    bad = None
    for k, (f, a, b_) in enumerate(keys):
        if ed.cocart[a] and ed.cart[b_]:
            hyp += 1
            if fl[k]:
                ok += 1
            elif bad is None:
                bad = te.cat.morphisms[k]
    return {"hypothesis": hyp, "cartesian": ok, "counterexample": bad, "tw_p": tp}


def fibrewise_cartesian_check(g: FinFunctor, p: FinFunctor, q: FinFunctor) -> dict:
    """In a square g over f with p, q cocartesian and g preserving
    cocartesian edges: an edge of a fibre E_x that is g_x-cartesian is
    g-cartesian."""
    from .fincat import subcategory
    ep, eq = Edges(p), Edges(q)
    hyp_ok = ep.is_fibration("cocart") and eq.is_fibration("cocart")
    hyp_ok &= bool((~ep.cocart | eq.cocart[g.mor]).all())
    g_cart = Edges(g).cart
    e, f_ = g.source, g.target
    checked = failures = 0
    for x in range(p.target.n_obj):
        ex, oi, mi = subcategory(e, p.obj == x, p.mor == p.target.ident[x])
        if ex.n_obj == 0:
            continue
        y = int(q.obj[g.obj[oi[0]]])
        fy, foi, fmi = subcategory(f_, q.obj == y, q.mor == q.target.ident[y])
        fo = {int(o): i for i, o in enumerate(foi)}
        fm = {int(m): i for i, m in enumerate(fmi)}
        gx = FinFunctor(ex, fy, [fo[int(g.obj[o])] for o in oi], [fm[int(g.mor[m])] for m in mi])
        loc = Edges(gx).cart
        for j, m in enumerate(mi):
            if loc[j]:
                checked += 1
                if not g_cart[m]:
                    failures += 1
    return {"hypotheses": bool(hyp_ok), "checked": checked, "failures": failures}


__all__ = [
    "ArrowCat", "TwistedArrowCat", "FreeFib", "Correspondence", "RelCorr", "arrow_cat", "tw",
    "ar_tw_duality", "tw_functor", "tw_localisation", "free_fib", "extend_to_free", "free_universality",
    "dual_of_free", "dual_of_free_check", "corr", "corr_b_direct", "corr_b_fibrewise",
    "corr_b_check", "corr_cocart_check", "corr_cart_check", "tw_cartesian_lemma",
    "fibrewise_cartesian_check",
]
