"""Straightening, unstraightening and dualisation of fibrations over a
product, with equivalence witnesses over the base."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotAFibration, SearchCapExceeded
from .fibclass import Edges, TwoVarFib, classify, factor_unique, transport
from .fincat import (
    DEFAULT_CAPS,
    FinCat,
    FinFunctor,
    NatTransf,
    identity_functor,
    opposite,
    point,
    quasi_inverse,
    search_functors,
)

COV, CONTRA = "covariant", "contravariant"


@dataclass
class PseudoFunctor:
    """Base-indexed fibres with transports.  Covariant: F(u): F(c) -> F(c')
    for u: c -> c'; contravariant: F(u): F(c') -> F(c).  Each fibre lies
    over ``other`` via ``over`` and every transport commutes with it."""
    base: FinCat
    variance: str
    fibres: list
    transport: list
    unit_isos: list                       # F(id_c) => id
    comp_isos: dict                       # (g, f) -> F(gf) => F(g)F(f), or F(f)F(g) if contravariant
    other: FinCat = field(default_factory=point)
    over: list = field(default_factory=list)
    side: str = "A"

    def __post_init__(self):
        if not self.over:
            pt = self.other
            self.over = [FinFunctor(c, pt, np.zeros(c.n_obj), np.zeros(c.n_mor)) for c in self.fibres]

    def ends(self, u: int) -> tuple[int, int]:
        """(source fibre, target fibre) of F(u)."""
        s, t = int(self.base.src[u]), int(self.base.tgt[u])
        return (s, t) if self.variance == COV else (t, s)

    def validate(self) -> "PseudoFunctor":
        b = self.base
        for u in range(b.n_mor):
            f = self.transport[u].validate()
            s, t = self.ends(u)
            if f.source is not self.fibres[s] or f.target is not self.fibres[t]:
                raise ValueError(f"transport of {b.morphisms[u]!r} has the wrong fibres")
            if not f.then(self.over[t]).same_as(self.over[s]):
                raise ValueError(f"transport of {b.morphisms[u]!r} is not over the other factor")
        for c in range(b.n_obj):
            eps = self.unit_isos[c]
            eps.validate()
            if not eps.is_iso():
                raise ValueError("unit coherence is not invertible")
        for (g, f), mu in self.comp_isos.items():
            mu.validate()
            if not mu.is_iso():
                raise ValueError("composition coherence is not invertible")
        bad = self.coherence_failures()
        if bad:
            raise ValueError(f"coherence fails at {bad[0]!r}")
        return self

    def coherence_failures(self) -> list:
        b = self.base
        out = []
        cov = self.variance == COV
        for h in range(b.n_mor):
            for g in range(b.n_mor):
                if b.comp[h, g] < 0:
                    continue
                hg = int(b.comp[h, g])
                for f in range(b.n_mor):
                    if b.comp[g, f] < 0:
                        continue
                    gf = int(b.comp[g, f])
                    if cov:
                        fib = self.fibres[int(b.tgt[h])]
                        for x in range(self.fibres[int(b.src[f])].n_obj):
                            lhs = fib.compose(int(self.transport[h].mor[self.comp_isos[(g, f)].comp[x]]),
                                              int(self.comp_isos[(h, gf)].comp[x]))
                            fx = int(self.transport[f].obj[x])
                            rhs = fib.compose(int(self.comp_isos[(h, g)].comp[fx]),
                                              int(self.comp_isos[(hg, f)].comp[x]))
                            if lhs != rhs:
                                out.append((b.morphisms[h], b.morphisms[g], b.morphisms[f]))
                    else:
                        fib = self.fibres[int(b.src[f])]
                        for x in range(self.fibres[int(b.tgt[h])].n_obj):
                            lhs = fib.compose(int(self.transport[f].mor[self.comp_isos[(h, g)].comp[x]]),
                                              int(self.comp_isos[(hg, f)].comp[x]))
                            hx = int(self.transport[h].obj[x])
                            rhs = fib.compose(int(self.comp_isos[(g, f)].comp[hx]),
                                              int(self.comp_isos[(h, gf)].comp[x]))
                            if lhs != rhs:
                                out.append((b.morphisms[h], b.morphisms[g], b.morphisms[f]))
        return out

    def flipped(self) -> "PseudoFunctor":
        """The same data read over the opposite base with the other variance."""
        comp = {(f, g): mu for (g, f), mu in self.comp_isos.items()}
        return PseudoFunctor(opposite(self.base), CONTRA if self.variance == COV else COV,
                             self.fibres, self.transport, self.unit_isos, comp, self.other,
                             self.over, self.side)

    def to_json(self) -> dict:
        from .fincat import label_str
        b = self.base
        return {
            "base": b.to_json(),
            "variance": self.variance,
            "fibres": {label_str(b.objects[c]): self.fibres[c].to_json() for c in range(b.n_obj)},
            "transport": {label_str(b.morphisms[u]): {
                "objects": {label_str(self.transport[u].source.objects[i]):
                            label_str(self.transport[u].target.objects[j])
                            for i, j in enumerate(self.transport[u].obj)},
                "morphisms": {label_str(self.transport[u].source.morphisms[i]):
                              label_str(self.transport[u].target.morphisms[j])
                              for i, j in enumerate(self.transport[u].mor)}}
                for u in range(b.n_mor)},
            "unit_isos": {label_str(b.objects[c]): [label_str(self.fibres[c].morphisms[k])
                                                     for k in self.unit_isos[c].comp]
                          for c in range(b.n_obj)},
            "comp_isos": [[label_str(b.morphisms[g]), label_str(b.morphisms[f]),
                           [label_str(mu.source.target.morphisms[k]) for k in mu.comp]]
                          for (g, f), mu in sorted(self.comp_isos.items())],
        }


def as_two_var(p) -> TwoVarFib:
    return p if isinstance(p, TwoVarFib) else TwoVarFib.one_variable(p)


def straighten(p, variance: str = COV, side: str = "A") -> PseudoFunctor:
    """Straighten over the named factor using the fixed cleavage."""
    p = as_two_var(p)
    q = p if side == "A" else p.swap()
    kind = "cocart" if variance == COV else "cart"
    mask = q.mask_a_core_b
    wit = q.edges.missing_lift(kind, mask)
    if wit is not None:
        raise NotAFibration(f"no {kind}esian lift over the {side} factor", wit)
    base, other = q.base_a, q.base_b
    e = q.total
    fibs = [q.fibre(a=c) for c in range(base.n_obj)]
    over = [FinFunctor(f[0], other, q.p2.obj[f[1]], q.p2.mor[f[2]]) for f in fibs]
    local = [{int(o): i for i, o in enumerate(f[1])} for f in fibs]
    local_m = [{int(m): i for i, m in enumerate(f[2])} for f in fibs]

    def lift(x, u):
        return q.edges.lift(x, q.base_mor(u, int(other.ident[q.p2.obj[x]])), kind)

    trans = []
    lifts = {}
    for u in range(base.n_mor):
        s, t = int(base.src[u]), int(base.tgt[u])
        if variance == CONTRA:
            s, t = t, s
        trans.append(transport(q, fibs[s], fibs[t], lambda x, u=u: lift(x, u), kind))
        for x in fibs[s][1]:
            lifts[(int(x), u)] = lift(int(x), u)

    units = []
    for c in range(base.n_obj):
        cat, oi, mi = fibs[c]
        u = int(base.ident[c])
        comps = []
        for x in oi:
            l = lifts[(int(x), u)]
            if variance == COV:
                k = factor_unique(e, l, int(e.ident[x]), "cocart", lambda m: int(m) in local_m[c])
            else:
                k = l
            comps.append(local_m[c][int(k)])
        units.append(NatTransf(trans[u], identity_functor(cat), comps))

    comp_isos = {}
    for v in range(base.n_mor):
        for u in range(base.n_mor):
            if base.comp[v, u] < 0:
                continue
            vu = int(base.comp[v, u])
            if variance == COV:
                c0, c2 = int(base.src[u]), int(base.tgt[v])
                comps = []
                for x in fibs[c0][1]:
                    x = int(x)
                    lu = lifts[(x, u)]
                    lv = lifts[(int(e.tgt[lu]), v)]
                    k = factor_unique(e, lifts[(x, vu)], e.compose(lv, lu), "cocart",
                                      lambda m: int(m) in local_m[c2])
                    comps.append(local_m[c2][k])
                src_f, tgt_f = trans[vu], trans[u].then(trans[v])
            else:
                c0, c2 = int(base.src[u]), int(base.tgt[v])
                comps = []
                for x in fibs[c2][1]:
                    x = int(x)
                    lv = lifts[(x, v)]
                    lu = lifts[(int(e.src[lv]), u)]
                    k = factor_unique(e, e.compose(lv, lu), lifts[(x, vu)], "cart",
                                      lambda m: int(m) in local_m[c0])
                    comps.append(local_m[c0][k])
                src_f, tgt_f = trans[vu], trans[v].then(trans[u])
            comp_isos[(v, u)] = NatTransf(src_f, tgt_f, comps)
    del local
    return PseudoFunctor(base, variance, [f[0] for f in fibs], trans, units, comp_isos,
                         other, over, side)


def unstraighten(F: PseudoFunctor, name: str = "") -> TwoVarFib:
    """Grothendieck construction; the result lies over (base, other), or
    (other, base) when F was straightened over the second factor."""
    b, other = F.base, F.other
    cov = F.variance == COV
    fibs = F.fibres
    disjoint_o = len({o for c in fibs for o in c.objects}) == sum(c.n_obj for c in fibs)
    objects, where = [], {}
    for c in range(b.n_obj):
        for x in range(fibs[c].n_obj):
            where[(c, x)] = len(objects)
            objects.append(fibs[c].objects[x] if disjoint_o else (b.objects[c], fibs[c].objects[x]))
    # a morphism (u, f): cov f: F(u)x -> x' in F(c'); contra f: x -> F(u)x' in F(c)
    mors = []
    for u in range(b.n_mor):
        c, c2 = int(b.src[u]), int(b.tgt[u])
        fu = F.transport[u]
        for x in range(fibs[c].n_obj):
            for x2 in range(fibs[c2].n_obj):
                if cov:
                    hom = fibs[c2].hom(int(fu.obj[x]), x2)
                else:
                    hom = fibs[c].hom(x, int(fu.obj[x2]))
                for f in hom:
                    mors.append((u, x, x2, f))
    def label(u, x, x2, f, level):
        # level 0: fibre label over identities; 1: tagged by u; 2: also by
        # the end a non-injective transport forgets
        fc = fibs[int(b.tgt[u])] if cov else fibs[int(b.src[u])]
        if level == 0:
            return fc.morphisms[f]
        if level == 1:
            return (b.morphisms[u], fc.morphisms[f])
        end = fibs[int(b.src[u])].objects[x] if cov else fibs[int(b.tgt[u])].objects[x2]
        return (b.morphisms[u], end, fc.morphisms[f])

    for lid, lother in ((0, 1), (0, 2), (1, 1), (1, 2)):
        if lid == 0 and not disjoint_o:
            continue
        labels = [label(u, x, x2, f, lid if b.is_identity(u) else lother) for u, x, x2, f in mors]
        if len(set(labels)) == len(labels):
            break
    index = {(u, x, x2, f): i for i, (u, x, x2, f) in enumerate(mors)}
    m = len(mors)
    src = np.array([where[(int(b.src[u]), x)] for u, x, _, _ in mors], dtype=np.int64).reshape(m)
    tgt = np.array([where[(int(b.tgt[u]), x2)] for u, _, x2, _ in mors], dtype=np.int64).reshape(m)
    by_src: dict[int, list[int]] = {}
    for i in range(m):
        by_src.setdefault(int(src[i]), []).append(i)
    comp = np.full((m, m), -1, dtype=np.int64)
    for i1, (u, x, x1, f) in enumerate(mors):
        for i2 in by_src.get(int(tgt[i1]), []):
            v, _, x2, g = mors[i2]
            vu = int(b.comp[v, u])
            mu = F.comp_isos[(v, u)]
            if cov:
                fc2 = fibs[int(b.tgt[v])]
                # F(vu)x -> F(v)F(u)x -> F(v)x1 -> x2
                h = fc2.chain(g, int(F.transport[v].mor[f]), int(mu.comp[x]))
            else:
                fc0 = fibs[int(b.src[u])]
                # x -> F(u)x1 -> F(u)F(v)x2 -> F(vu)x2
                inv = int(fc0.inverse[mu.comp[x2]])
                h = fc0.chain(inv, int(F.transport[u].mor[g]), f)
            comp[i2, i1] = index[(vu, x, x2, h)]
    ident = []
    for c in range(b.n_obj):
        u = int(b.ident[c])
        eps = F.unit_isos[c]
        for x in range(fibs[c].n_obj):
            k = int(eps.comp[x])
            f = k if cov else int(fibs[c].inverse[k])
            ident.append(index[(u, x, x, f)])
    total = FinCat(objects, labels, src, tgt, ident, comp, check=False, name=name)
    obj_b = np.array([c for c in range(b.n_obj) for _ in range(fibs[c].n_obj)], dtype=np.int64)
    obj_o = np.array([int(F.over[c].obj[x]) for c in range(b.n_obj) for x in range(fibs[c].n_obj)],
                     dtype=np.int64)
    mor_b = np.array([u for u, _, _, _ in mors], dtype=np.int64).reshape(m)
    mor_o = np.array([int(F.over[int(b.tgt[u]) if cov else int(b.src[u])].mor[f])
                      for u, _, _, f in mors], dtype=np.int64).reshape(m)
    pb = FinFunctor(total, b, obj_b, mor_b)
    po = FinFunctor(total, other, obj_o, mor_o)
    if F.side == "A":
        out = TwoVarFib(total, b, other, pb, po, name)
    else:
        out = TwoVarFib(total, other, b, po, pb, name)
    out.groth = GrothIndex(F, where, index, mors)
    return out


@dataclass
class GrothIndex:
    """How the total category of an unstraightening is addressed: object
    (c, x) and morphism (u, x, x2, f), indices into base and fibres."""
    F: PseudoFunctor
    where: dict
    index: dict
    mors: list

    def obj(self, c: int, x: int) -> int:
        return self.where[(c, x)]

    def fibre_obj(self, i: int) -> tuple[int, int]:
        if not hasattr(self, "_rev"):
            self._rev = {v: k for k, v in self.where.items()}
        return self._rev[i]

    def fibre_mor(self, c: int, f: int) -> int:
        """The morphism of the total category given by f in fibre c
        (transports along identities are identities here)."""
        fc = self.F.fibres[c]
        return self.index[(int(self.F.base.ident[c]), int(fc.src[f]), int(fc.tgt[f]), f)]


def constant(x: FinCat, base: FinCat) -> PseudoFunctor:
    """The constant pseudofunctor at x with identity transports."""
    fibs = [x] * base.n_obj
    idf = identity_functor(x)
    trans = [idf] * base.n_mor
    units = [NatTransf(idf, idf, x.ident.copy()) for _ in range(base.n_obj)]
    comp = {(v, u): NatTransf(idf, idf, x.ident.copy())
            for v in range(base.n_mor) for u in range(base.n_mor) if base.comp[v, u] >= 0}
    return PseudoFunctor(base, COV, fibs, trans, units, comp)


def from_functor_family(base: FinCat, fibres: list, functors: list, variance: str = COV,
                        other: FinCat | None = None, over: list | None = None) -> PseudoFunctor:
    """A strict functor into Cat given by fibres and transports; the
    coherence isos are identities and strictness is checked."""
    units, comp = [], {}
    for c in range(base.n_obj):
        f = functors[int(base.ident[c])]
        units.append(NatTransf(f, identity_functor(fibres[c]), fibres[c].ident.copy()))
    for v in range(base.n_mor):
        for u in range(base.n_mor):
            if base.comp[v, u] < 0:
                continue
            vu = int(base.comp[v, u])
            both = functors[u].then(functors[v]) if variance == COV else functors[v].then(functors[u])
            if not both.same_as(functors[vu]):
                raise ValueError("transport family is not strictly functorial")
            comp[(v, u)] = NatTransf(functors[vu], both, both.target.ident[both.obj])
    if other is None:
        return PseudoFunctor(base, variance, list(fibres), list(functors), units, comp).validate()
    return PseudoFunctor(base, variance, list(fibres), list(functors), units, comp,
                         other, list(over)).validate()


# ------------------------------------------------------------- dualisation

REQUIRED = {("A", "ct"): "gray", ("A", "cc"): "curved_ortho",
            ("B", "ct"): "curved_ortho", ("B", "cc"): "op_gray"}


def dualize(p, side: str = "A", direction: str = "ct", check: bool = True) -> TwoVarFib:
    """Straighten over the named factor and unstraighten with the opposite
    variance over its opposite."""
    p = as_two_var(p)
    if check:
        need = REQUIRED[(side, direction)]
        probe = p if not (side == "B" and direction == "cc") else p.swap()
        tax = classify(probe)
        if not tax.flags[need]:
            raise NotAFibration(f"dualize {direction} over {side} needs {need}", tax.witnesses.get(need))
    variance = COV if direction == "ct" else CONTRA
    F = straighten(p, variance, side)
    return unstraighten(F.flipped(), name=f"D{direction}({p.name})")


def dualize_one_variable(p: FinFunctor, direction: str = "ct") -> FinFunctor:
    """Ordinary dualisation of a (co)cartesian fibration p: E -> C,
    landing over C^op."""
    q = dualize(TwoVarFib.one_variable(p), "A", direction, check=False)
    return q.p1


# ------------------------------------------------------- equivalence search

@dataclass
class FibEquivalence:
    forward: FinFunctor
    backward: FinFunctor
    unit: NatTransf
    counit: NatTransf
    preserved_edges: tuple

    def check(self, p: TwoVarFib, q: TwoVarFib) -> bool:
        ok = self.forward.is_valid() and self.backward.is_valid()
        ok &= not self.unit.naturality_failures() and not self.counit.naturality_failures()
        ok &= self.unit.is_iso() and self.counit.is_iso()
        ok &= bool((p.proj.mor[self.unit.comp] == p.base.ident[p.proj.obj]).all())
        ok &= bool((q.proj.mor[self.counit.comp] == q.base.ident[q.proj.obj]).all())
        ok &= self.forward.then(q.proj).same_as(p.proj) and self.backward.then(p.proj).same_as(q.proj)
        for kind in self.preserved_edges:
            ok &= _preserves(self.forward, edge_flags(p, kind), edge_flags(q, kind))
            ok &= _preserves(self.backward, edge_flags(q, kind), edge_flags(p, kind))
        return bool(ok)


def edge_flags(p: TwoVarFib, kind: str) -> np.ndarray:
    """Named edge class: cocart, cart, loc_cocart, loc_cart, r_cocart,
    r_cart, l_cocart, l_cart."""
    if kind in ("cocart", "cart"):
        return p.edges.flags(kind)
    if kind.startswith("loc_"):
        return p.edges.flags(kind[4:], True)
    side, k = kind.split("_")
    return p.restricted_flags(side, k)


def _preserves(f: FinFunctor, a: np.ndarray, b: np.ndarray) -> bool:
    return bool((~a | b[f.mor]).all())


def same_base(p: TwoVarFib, q: TwoVarFib) -> bool:
    return (p.base.objects == q.base.objects and p.base.morphisms == q.base.morphisms
            and np.array_equal(p.base.comp, q.base.comp))


def fib_equivalent(p: TwoVarFib, q: TwoVarFib, edges=("cocart",), caps=DEFAULT_CAPS,
                   limit: int = 2000) -> FibEquivalence | None:
    """Bounded search for an equivalence over the base preserving the named
    edge classes in both directions."""
    p, q = as_two_var(p), as_two_var(q)
    if not same_base(p, q):
        raise ValueError("fibrations lie over different bases")
    no, nm = caps
    for e in (p.total, q.total):
        if e.n_obj > no or e.n_mor > nm:
            raise SearchCapExceeded(f"{e!r} exceeds caps {caps}", (e.n_obj, e.n_mor))
    e1, e2 = p.total, q.total
    # cheap invariant: fibre sizes up to isomorphism classes
    for c in range(p.base.n_obj):
        if (p.proj.obj == c).sum() == 0 and (q.proj.obj == c).sum() > 0:
            return None
        if (q.proj.obj == c).sum() == 0 and (p.proj.obj == c).sum() > 0:
            return None
    fp = [edge_flags(p, k) for k in edges]
    fq = [edge_flags(q, k) for k in edges]

    def obj_ok(x, y):
        return p.proj.obj[x] == q.proj.obj[y]

    def mor_ok(m, n):
        if p.proj.mor[m] != q.proj.mor[n]:
            return False
        return all((not a[m]) or b[n] for a, b in zip(fp, fq))

    def iso_ok(k):
        return q.base.is_identity(int(q.proj.mor[k]))

    for F in search_functors(e1, e2, obj_ok, mor_ok, fully_faithful=True, limit=limit):
        eq = quasi_inverse(F, iso_ok)
        if eq is None:
            continue
        w = FibEquivalence(eq.forward, eq.backward, eq.unit, eq.counit, tuple(edges))
        if w.check(p, q):
            return w
    return None


def identity_equivalence(p: TwoVarFib, edges=("cocart",)) -> FibEquivalence:
    idf = identity_functor(p.total)
    nat = NatTransf(idf, idf, p.total.ident.copy())
    return FibEquivalence(idf, idf, nat, nat, tuple(edges))


def fibre_identity(p: TwoVarFib, q: TwoVarFib) -> bool:
    """Every fibre of q over (a, b) equals that of p by identifiers."""
    from .fincat import is_isomorphic_by_identity
    for a in range(p.base_a.n_obj):
        for b in range(p.base_b.n_obj):
            if not is_isomorphic_by_identity(p.fibre(a, b)[0], q.fibre(a, b)[0]):
                return False
    return True


def reindex_base(p: TwoVarFib, base_a: FinCat, base_b: FinCat, name: str = "") -> TwoVarFib:
    """The same functor viewed over index-identical bases (e.g. (A^op)^op = A)."""
    return TwoVarFib(p.total, base_a, base_b,
                     FinFunctor(p.total, base_a, p.p1.obj, p.p1.mor),
                     FinFunctor(p.total, base_b, p.p2.obj, p.p2.mor), name or p.name)


def square_comparison(c: TwoVarFib, caps=DEFAULT_CAPS) -> dict:
    """For a cocartesian fibration c over A^op x B: dualise over A^op then
    over B, and compare with one-variable dualisation over A^op x B."""
    ortho = dualize(c, "A", "ct")                # over (A, B)
    two_step = dualize(ortho, "B", "ct")         # over (A, B^op)
    one = dualize(TwoVarFib.one_variable(c.proj), "A", "ct", check=False)
    base_a, base_b = two_step.base_a, two_step.base_b
    direct = TwoVarFib.from_functor(
        FinFunctor(one.total, two_step.base, one.p1.obj, one.p1.mor), base_a, base_b, "direct")
    try:
        w = fib_equivalent(two_step, direct, ("cart",), caps)
    except SearchCapExceeded as exc:
        return {"agree": None, "reason": str(exc)}
    return {"agree": w is not None, "ortho": classify(ortho).ortho,
            "cartesian": classify(direct).cartesian_fib}


def round_trip(p, variance: str = COV, side: str = "A", caps=DEFAULT_CAPS):
    p = as_two_var(p)
    back = unstraighten(straighten(p, variance, side), name=f"Un(Str({p.name}))")
    kind = "cocart" if variance == COV else "cart"
    return back, fib_equivalent(p, back, (kind,), caps)


__all__ = [
    "PseudoFunctor", "FibEquivalence", "straighten", "unstraighten", "dualize",
    "dualize_one_variable", "fib_equivalent", "constant", "from_functor_family",
    "fibre_identity", "identity_equivalence", "square_comparison", "round_trip",
    "edge_flags", "reindex_base", "Edges", "GrothIndex",
]
