"""Edge classes and the taxonomy of functors into a product A x B."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import BadInput, InconsistentCriteria, NoLift, NonUniqueFactorisation, UnknownMorphism
from .fincat import (
    FinCat,
    FinFunctor,
    arrow_functor,
    from_json,
    label_str,
    point,
    opposite,
    pairing,
    poset,
    product,
    projections,
    pullback,
    subcategory,
    triangle_functor,
)

# ------------------------------------------------------------------ edges


def _flags(p: FinFunctor, kind: str) -> np.ndarray:
    e, b = p.source, p.target
    if kind == "cart":
        return K.cartesian_flags(e.src, e.tgt, e.comp, b.src, b.tgt, b.comp, p.obj, p.mor)
    return K.cartesian_flags(e.tgt, e.src, e.comp.T, b.tgt, b.src, b.comp.T, p.obj, p.mor)


class Edges:
    """Lazily computed (co)cartesian and locally (co)cartesian flags of p."""

    def __init__(self, p: FinFunctor):
        self.p = p
        self._flags: dict[str, np.ndarray] = {}

    def flags(self, kind: str, local: bool = False) -> np.ndarray:
        key = kind + ("_loc" if local else "")
        if key not in self._flags:
            self._flags[key] = self._local(kind) if local else _flags(self.p, kind)
        return self._flags[key]

    @property
    def cart(self) -> np.ndarray:
        return self.flags("cart")

    @property
    def cocart(self) -> np.ndarray:
        return self.flags("cocart")

    def _local(self, kind: str) -> np.ndarray:
        # (co)cartesian in the pullback along the base edge [1] -> B
        p = self.p
        e, b = p.source, p.target
        out = np.zeros(e.n_mor, dtype=bool)
        for u in np.unique(p.mor):
            u = int(u)
            arr = arrow_functor(b, u)
            pb, pr_e, pr_1 = pullback(p, arr)
            one = arr.source
            up = one.mor((0, 1))
            fl = _flags(pr_1, kind)
            for k in range(pb.n_mor):
                if pr_1.mor[k] == up:
                    out[int(pr_e.mor[k])] |= bool(fl[k])
        return out

    def lift(self, x: int, u: int, kind: str, local: bool = False) -> int | None:
        """Chosen lift of u starting (cocart) or ending (cart) at x: the
        identity over identities, otherwise least target (resp. source)
        index, then least morphism index."""
        e = self.p.source
        if self.p.target.is_identity(u) and self.p.obj[x] == self.p.target.src[u]:
            return int(e.ident[x])  # normalised cleavage
        fl = self.flags(kind, local)
        end = e.src if kind == "cocart" else e.tgt
        other = e.tgt if kind == "cocart" else e.src
        cand = np.nonzero((end == x) & (self.p.mor == u) & fl)[0]
        if cand.size == 0:
            return None
        best = min(cand.tolist(), key=lambda k: (int(other[k]), k))
        return int(best)

    def missing_lift(self, kind: str, base_mask=None, local: bool = False):
        """First (object, base morphism) pair without a lift, or None."""
        p = self.p
        e, b = p.source, p.target
        fl = self.flags(kind, local)
        end = e.src if kind == "cocart" else e.tgt
        bend = b.src if kind == "cocart" else b.tgt
        have = set(zip(end[fl].tolist(), p.mor[fl].tolist()))
        mask = np.ones(b.n_mor, dtype=bool) if base_mask is None else np.asarray(base_mask, bool)
        for x in range(e.n_obj):
            px = int(p.obj[x])
            for u in np.nonzero((bend == px) & mask)[0].tolist():
                if (x, u) not in have:
                    return (e.objects[x], b.morphisms[u])
        return None

    def is_fibration(self, kind: str, base_mask=None, local: bool = False) -> bool:
        return self.missing_lift(kind, base_mask, local) is None


def factor_unique(e: FinCat, through: int, h: int, kind: str, allowed=None) -> int:
    """The unique k with k o through = h (cocart) or through o k = h (cart),
    k restricted to the ``allowed`` morphism mask."""
    if kind == "cocart":
        hom = e.hom(int(e.tgt[through]), int(e.tgt[h]))
        ks = [k for k in hom if e.comp[k, through] == h]
    else:
        hom = e.hom(int(e.src[h]), int(e.src[through]))
        ks = [k for k in hom if e.comp[through, k] == h]
    if allowed is not None:
        ks = [k for k in ks if allowed(k)]
    if len(ks) != 1:
        raise NonUniqueFactorisation(
            f"{len(ks)} factorisations of {e.morphisms[h]!r} through {e.morphisms[through]!r}",
            (e.morphisms[h], e.morphisms[through]))
    return ks[0]


@dataclass
class EdgeClass:
    cartesian: bool
    cocartesian: bool
    locally_cartesian: bool
    locally_cocartesian: bool
    functor: str = "p"


def edge_class(p: FinFunctor | Edges, e, name: str = "p") -> EdgeClass:
    edges = p if isinstance(p, Edges) else Edges(p)
    cat = edges.p.source
    k = e if isinstance(e, (int, np.integer)) else cat.mor(e)
    if not 0 <= k < cat.n_mor:
        raise UnknownMorphism(f"no morphism with index {k}", k)
    return EdgeClass(bool(edges.cart[k]), bool(edges.cocart[k]),
                     bool(edges.flags("cart", True)[k]), bool(edges.flags("cocart", True)[k]), name)


# ----------------------------------------------------------- two variables

class TwoVarFib:
    """A functor p = (p1, p2): E -> A x B with its derived restrictions."""

    def __init__(self, total: FinCat, base_a: FinCat, base_b: FinCat,
                 p1: FinFunctor, p2: FinFunctor, name: str = ""):
        self.total, self.base_a, self.base_b = total, base_a, base_b
        self.p1, self.p2 = p1, p2
        self.name = name
        self.base = product(base_a, base_b)
        self.proj = pairing(p1, p2, self.base)
        self.pr1, self.pr2 = projections(base_a, base_b, self.base)
        self.edges = Edges(self.proj)
        self.e1 = Edges(p1)
        self.e2 = Edges(p2)
        ia, ib = base_a.iso_flags, base_b.iso_flags
        mb = base_b.n_mor
        self.mask_a_core_b = (ib[np.arange(self.base.n_mor) % mb])   # A x iota B
        self.mask_core_a_b = (ia[np.arange(self.base.n_mor) // mb])  # iota A x B
        self._res: dict[str, tuple] = {}
        self._cache: dict = {}

    @classmethod
    def from_functor(cls, p: FinFunctor, base_a: FinCat, base_b: FinCat, name: str = "") -> "TwoVarFib":
        nb, mb = base_b.n_obj, base_b.n_mor
        p1 = FinFunctor(p.source, base_a, p.obj // nb, p.mor // mb)
        p2 = FinFunctor(p.source, base_b, p.obj % nb, p.mor % mb)
        return cls(p.source, base_a, base_b, p1, p2, name)

    @classmethod
    def one_variable(cls, p: FinFunctor, name: str = "") -> "TwoVarFib":
        """Regard p: E -> A as a functor to A x [0]."""
        from .fincat import point
        pt = point()
        return cls(p.source, p.target, pt, p,
                   FinFunctor(p.source, pt, np.zeros(p.source.n_obj), np.zeros(p.source.n_mor)), name)

    def op(self) -> "TwoVarFib":
        e = opposite(self.total)
        a, b = opposite(self.base_a), opposite(self.base_b)
        return TwoVarFib(e, a, b, FinFunctor(e, a, self.p1.obj, self.p1.mor),
                         FinFunctor(e, b, self.p2.obj, self.p2.mor), self.name + "^op")

    def swap(self) -> "TwoVarFib":
        return TwoVarFib(self.total, self.base_b, self.base_a, self.p2, self.p1, self.name)

    # restrictions over A x iota B (left) and iota A x B (right)
    def restriction(self, side: str):
        if side not in self._res:
            mask = self.mask_a_core_b if side == "l" else self.mask_core_a_b
            base_sub, boi, bmi = subcategory(self.base, np.ones(self.base.n_obj, bool), mask)
            emask = mask[self.proj.mor]
            sub, oi, mi = subcategory(self.total, np.ones(self.total.n_obj, bool), emask)
            back = np.full(self.base.n_mor, -1, dtype=np.int64)
            back[bmi] = np.arange(bmi.size)
            f = FinFunctor(sub, base_sub, self.proj.obj[oi], back[self.proj.mor[mi]])
            self._res[side] = (f, oi, mi, Edges(f))
        return self._res[side]

    @property
    def p_l(self) -> FinFunctor:
        return self.restriction("l")[0]

    @property
    def p_r(self) -> FinFunctor:
        return self.restriction("r")[0]

    def restricted_flags(self, side: str, kind: str) -> np.ndarray:
        """Flags of p_l / p_r pushed back to morphisms of E (False off the subcategory)."""
        f, oi, mi, ed = self.restriction(side)
        out = np.zeros(self.total.n_mor, dtype=bool)
        out[mi] = ed.flags(kind)
        return out

    def fibre(self, a: int | None = None, b: int | None = None):
        """Fibre of p1 over a, of p2 over b, or of p over (a, b)."""
        e = self.total
        om = np.ones(e.n_obj, bool)
        mm = np.ones(e.n_mor, bool)
        if a is not None:
            om &= self.p1.obj == a
            mm &= self.p1.mor == self.base_a.ident[a]
        if b is not None:
            om &= self.p2.obj == b
            mm &= self.p2.mor == self.base_b.ident[b]
        return subcategory(e, om, mm)

    def fibre_over_b(self, a: int):
        """X_a -> B together with its edge data, cached."""
        key = ("fa", a)
        if key not in self._cache:
            sub, oi, mi = self.fibre(a=a)
            f = FinFunctor(sub, self.base_b, self.p2.obj[oi], self.p2.mor[mi])
            self._cache[key] = (f, oi, mi, Edges(f))
        return self._cache[key]

    def fibre_over_a(self, b: int):
        """X_b -> A together with its edge data, cached."""
        key = ("fb", b)
        if key not in self._cache:
            sub, oi, mi = self.fibre(b=b)
            f = FinFunctor(sub, self.base_a, self.p1.obj[oi], self.p1.mor[mi])
            self._cache[key] = (f, oi, mi, Edges(f))
        return self._cache[key]

    def base_mor(self, fa: int, fb: int) -> int:
        return fa * self.base_b.n_mor + fb

    def __repr__(self) -> str:
        return f"<TwoVarFib {self.name} {self.total!r} over {self.base_a!r} x {self.base_b!r}>"


# ------------------------------------------------------------------ json


def _functor_to_json(f: FinFunctor) -> dict:
    c, d = f.source, f.target
    return {"obj": {label_str(c.objects[x]): label_str(d.objects[f.obj[x]]) for x in range(c.n_obj)},
            "mor": {label_str(c.morphisms[k]): label_str(d.morphisms[f.mor[k]]) for k in range(c.n_mor)}}


def _functor_from_json(c: FinCat, d: FinCat, data) -> FinFunctor:
    """Object map required; the morphism map may be omitted when d is thin."""
    if not isinstance(data, dict) or "obj" not in data:
        raise BadInput("functor needs an object map")
    do = {label_str(o): i for i, o in enumerate(d.objects)}
    cm = {label_str(m): i for i, m in enumerate(c.morphisms)}
    dm = {label_str(m): i for i, m in enumerate(d.morphisms)}
    try:
        obj = np.array([do[label_str(data["obj"][label_str(o)])] for o in c.objects], dtype=np.int64)
    except KeyError as exc:
        raise BadInput(f"object map incomplete or unknown label {exc}") from None
    if "mor" in data:
        mor = np.zeros(c.n_mor, dtype=np.int64)
        try:
            for k, lab in data["mor"].items():
                mor[cm[label_str(k)]] = dm[label_str(lab)]
        except KeyError as exc:
            raise BadInput(f"unknown morphism label {exc}") from None
        if len(data["mor"]) != c.n_mor:
            raise BadInput("morphism map incomplete")
    else:
        mor = np.zeros(c.n_mor, dtype=np.int64)
        for k in range(c.n_mor):
            hs = d.hom(int(obj[c.src[k]]), int(obj[c.tgt[k]]))
            if len(hs) != 1:
                raise BadInput(f"morphism map needed for {c.morphisms[k]!r}")
            mor[k] = hs[0]
    try:
        return FinFunctor(c, d, obj, mor, check=True)
    except ValueError as exc:
        raise BadInput(f"not a functor: {exc}") from None


def fib_from_json(data: dict, name: str = "") -> TwoVarFib:
    """Read {"total", "base_a", "base_b", "p1", "p2"}; base_b and p2 may be
    omitted for a functor over a single base."""
    if not isinstance(data, dict) or "total" not in data or "base_a" not in data:
        raise BadInput("fibration needs total and base_a")
    e, a = from_json(data["total"]), from_json(data["base_a"])
    b = from_json(data["base_b"]) if "base_b" in data else point()
    p1 = _functor_from_json(e, a, data.get("p1"))
    if "p2" in data:
        p2 = _functor_from_json(e, b, data["p2"])
    elif b.n_obj == 1 and b.n_mor == 1:
        p2 = FinFunctor(e, b, np.zeros(e.n_obj), np.zeros(e.n_mor))
    else:
        raise BadInput("p2 missing")
    return TwoVarFib(e, a, b, p1, p2, name or data.get("name", ""))


def fib_to_json(p: TwoVarFib) -> dict:
    return {"name": p.name, "total": p.total.to_json(), "base_a": p.base_a.to_json(),
            "base_b": p.base_b.to_json(), "p1": _functor_to_json(p.p1), "p2": _functor_to_json(p.p2)}


FLAG_NAMES = (
    "cartesian_fib", "cocartesian_fib", "locally_cocartesian_fib", "locally_cartesian_fib",
    "left_fib", "right_fib", "bicartesian", "cocart_over_A", "cart_over_A", "cocart_over_B",
    "cart_over_B", "curved_ortho", "gray", "op_gray", "ortho", "bifib", "conservative",
)


@dataclass
class FibTaxonomy:
    flags: dict[str, bool]
    witnesses: dict[str, object] = field(default_factory=dict)

    def __getattr__(self, name):
        flags = self.__dict__.get("flags", {})
        if name in flags:
            return flags[name]
        raise AttributeError(name)


def _first_bad(mask, cat: FinCat):
    bad = np.nonzero(~np.asarray(mask, bool))[0]
    return cat.morphisms[int(bad[0])] if bad.size else None


def classify(p: TwoVarFib) -> FibTaxonomy:
    """Decide every taxonomy flag; equivalent formulations are computed
    independently and must agree."""
    e = p.total
    ed = p.edges
    fl: dict[str, bool] = {}
    wit: dict[str, object] = {}

    def put(name, witness):
        fl[name] = witness is None
        if witness is not None:
            wit[name] = witness

    put("cocartesian_fib", ed.missing_lift("cocart"))
    put("cartesian_fib", ed.missing_lift("cart"))
    put("locally_cocartesian_fib", ed.missing_lift("cocart", local=True))
    put("locally_cartesian_fib", ed.missing_lift("cart", local=True))
    put("conservative", _first_bad(~p.base.iso_flags[p.proj.mor] | e.iso_flags, e))
    put("left_fib", wit.get("cocartesian_fib") or _first_bad(ed.cocart, e))
    put("right_fib", wit.get("cartesian_fib") or _first_bad(ed.cart, e))
    fl["bicartesian"] = fl["cartesian_fib"] and fl["cocartesian_fib"]
    if not fl["bicartesian"]:
        wit["bicartesian"] = wit.get("cartesian_fib") or wit.get("cocartesian_fib")
    put("cocart_over_A", ed.missing_lift("cocart", p.mask_a_core_b))
    put("cart_over_A", ed.missing_lift("cart", p.mask_a_core_b))
    put("cocart_over_B", ed.missing_lift("cocart", p.mask_core_a_b))
    put("cart_over_B", ed.missing_lift("cart", p.mask_core_a_b))
    pr_ed = p.restriction("r")[3]
    pl_ed = p.restriction("l")[3]
    put("curved_ortho", wit.get("cart_over_A") or wit.get("cocart_over_B"))
    put("gray", wit.get("cocart_over_A") or pr_ed.missing_lift("cocart"))
    put("op_gray", wit.get("cart_over_A") or pr_ed.missing_lift("cart"))
    put("bifib", wit.get("curved_ortho") or wit.get("conservative"))
    if fl["curved_ortho"]:
        bad = [d for d in interpolating_edges(p, "crvortho") if not e.is_iso(d.edge)]
        put("ortho", (bad[0].x_label, bad[0].alpha, bad[0].beta) if bad else None)
    else:
        put("ortho", wit["curved_ortho"])

    _check_curved_ortho(p, fl["curved_ortho"], pl_ed, pr_ed)
    _check_bifib(p, fl, pl_ed, pr_ed)
    _check_one_var(p, fl)
    return FibTaxonomy(fl, wit)


def _agree(name: str, values: dict) -> None:
    if len(set(values.values())) > 1:
        raise InconsistentCriteria(f"{name}: equivalent criteria disagree", values)


def _maps_to(p: TwoVarFib, flags_e: np.ndarray, side: int) -> bool:
    """Does p send every flagged edge to an iso in the other factor?"""
    other = p.base_b if side == 1 else p.base_a
    pm = p.p2.mor if side == 1 else p.p1.mor
    return bool((~flags_e | other.iso_flags[pm]).all())


def _fibres_are(p: TwoVarFib, over: str, kind: str) -> bool:
    if over == "b":
        return all(p.fibre_over_b(a)[3].is_fibration(kind) for a in range(p.base_a.n_obj))
    return all(p.fibre_over_a(b)[3].is_fibration(kind) for b in range(p.base_b.n_obj))


def _check_curved_ortho(p: TwoVarFib, flag: bool, pl_ed: Edges, pr_ed: Edges) -> None:
    e1, e2 = p.e1, p.e2
    c2 = (e1.is_fibration("cart") and _maps_to(p, e1.cart, 1) and _fibres_are(p, "b", "cocart"))
    c3 = p.edges.is_fibration("cart", p.mask_a_core_b) and pr_ed.is_fibration("cocart")
    c4 = (e2.is_fibration("cocart") and _maps_to(p, e2.cocart, 2) and _fibres_are(p, "a", "cart"))
    c5 = p.edges.is_fibration("cocart", p.mask_core_a_b) and pl_ed.is_fibration("cart")
    _agree("curved orthofibration", {"definition": flag, "p1 cartesian, fibres over B": c2,
                                     "cartesian over A, p_r": c3, "p2 cocartesian, fibres over A": c4,
                                     "cocartesian over B, p_l": c5})


def _check_bifib(p: TwoVarFib, fl: dict, pl_ed: Edges, pr_ed: Edges) -> None:
    co = fl["curved_ortho"]
    groupoid_fibres = all(p.fibre(a, b)[0].is_groupoid()
                          for a in range(p.base_a.n_obj) for b in range(p.base_b.n_obj))
    # p_l is cartesian and p_r cocartesian here, so with discrete fibres
    # they are right and left fibrations respectively
    pl_right = pl_ed.is_fibration("cart") and bool(pl_ed.cart.all())
    pr_left = pr_ed.is_fibration("cocart") and bool(pr_ed.cocart.all())
    e1, e2 = p.e1, p.e2
    iso_b = p.base_b.iso_flags[p.p2.mor]
    iso_a = p.base_a.iso_flags[p.p1.mor]
    c5 = (e1.is_fibration("cart") and bool((e1.cart == iso_b).all())
          and e2.is_fibration("cocart") and bool((e2.cocart == iso_a).all()))
    _agree("bifibration", {"conservative": fl["bifib"], "groupoid fibres": co and groupoid_fibres,
                           "p_l right": co and pl_right, "p_r left": co and pr_left,
                           "projection criteria": c5})


def _check_one_var(p: TwoVarFib, fl: dict) -> None:
    """Three forms of being cocartesian over A, and the dual forms."""
    e1 = p.e1
    c2 = e1.is_fibration("cocart") and _maps_to(p, e1.cocart, 1)
    pr1 = Edges(p.pr1)
    img_ok = bool((~e1.cocart | pr1.cocart[p.proj.mor]).all())
    c3 = e1.is_fibration("cocart") and img_ok
    _agree("cocartesian over A", {"lifts": fl["cocart_over_A"], "p1 over isos": c2, "pr1 images": c3})
    d2 = e1.is_fibration("cart") and _maps_to(p, e1.cart, 1)
    _agree("cartesian over A", {"lifts": fl["cart_over_A"], "p1 over isos": d2})
    e2 = p.e2
    b2 = e2.is_fibration("cocart") and _maps_to(p, e2.cocart, 2)
    _agree("cocartesian over B", {"lifts": fl["cocart_over_B"], "p2 over isos": b2})


# ------------------------------------------------------------ interpolation

Q_SHAPE = poset(["00", "01", "10", "11", "11'"],
                [("10", "00"), ("00", "01"), ("10", "11'"), ("11'", "11"), ("11", "01")])
Q_PRIME_SHAPE = poset(["00", "01", "10", "11", "11'"],
                      [("00", "10"), ("00", "01"), ("10", "11'"), ("01", "11"), ("11'", "11")])


@dataclass
class InterpolationDiagram:
    shape: str
    image: FinFunctor
    edge: int
    alpha: object
    beta: object
    x_label: object
    objects: dict


def _diagram(shape: FinCat, e: FinCat, objs: dict, gens: dict) -> FinFunctor:
    obj = np.array([objs[o] for o in shape.objects], dtype=np.int64)
    mor = np.zeros(shape.n_mor, dtype=np.int64)
    # every relation is a composite of generators along any path
    succ: dict = {}
    for (a, b) in gens:
        succ.setdefault(a, []).append(b)

    def path(a, b):
        if a == b:
            return int(e.ident[objs[a]])
        for c in succ.get(a, []):
            if (c, b) in shape._midx or c == b:
                rest = path(c, b)
                if rest is not None:
                    return e.compose(rest, gens[(a, c)])
        return None

    for k, (a, b) in enumerate(shape.morphisms):
        mor[k] = path(a, b)
    return FinFunctor(shape, e, obj, mor, check=True)


def interpolating_edges(p: TwoVarFib, mode: str) -> list[InterpolationDiagram]:
    """All Q-diagrams (mode 'crvortho') or Q'-diagrams (mode 'gray')."""
    if mode == "crvortho":
        return _crvortho_diagrams(p)
    if mode == "gray":
        return _gray_diagrams(p)
    raise ValueError("mode must be 'crvortho' or 'gray'")


def _need(k, what):
    if k is None:
        raise NoLift(f"no chosen lift for {what}", what)
    return k


def _crvortho_diagrams(p: TwoVarFib) -> list[InterpolationDiagram]:
    e, a_cat, b_cat = p.total, p.base_a, p.base_b
    ed = p.edges
    out = []
    for x in range(e.n_obj):
        a, b = int(p.p1.obj[x]), int(p.p2.obj[x])
        for al in [k for k in range(a_cat.n_mor) if a_cat.tgt[k] == a]:
            a2 = int(a_cat.src[al])
            for be in [k for k in range(b_cat.n_mor) if b_cat.src[k] == b]:
                b2 = int(b_cat.tgt[be])
                u_a = p.base_mor(al, int(b_cat.ident[b]))
                u_b = p.base_mor(int(a_cat.ident[a]), be)
                c = _need(ed.lift(x, u_a, "cart"), (e.objects[x], "cart", al))
                x10 = int(e.src[c])
                d = _need(ed.lift(x, u_b, "cocart"), (e.objects[x], "cocart", be))
                x01 = int(e.tgt[d])
                ee = _need(ed.lift(x10, p.base_mor(int(a_cat.ident[a2]), be), "cocart"),
                           (e.objects[x10], "cocart", be))
                x11p = int(e.tgt[ee])
                f = _need(ed.lift(x01, p.base_mor(al, int(b_cat.ident[b2])), "cart"),
                          (e.objects[x01], "cart", al))
                x11 = int(e.src[f])
                dc = e.compose(d, c)
                over = lambda u: (lambda k: p.proj.mor[k] == u)
                id11 = p.base_mor(int(a_cat.ident[a2]), int(b_cat.ident[b2]))
                # recipe 1: horizontal dotted through f, then through ee
                h = factor_unique(e, f, dc, "cart", over(p.base_mor(int(a_cat.ident[a2]), be)))
                k1 = factor_unique(e, ee, h, "cocart", over(id11))
                # recipe 2: vertical dotted through ee, then through f
                v = factor_unique(e, ee, dc, "cocart", over(p.base_mor(al, int(b_cat.ident[b2]))))
                k2 = factor_unique(e, f, v, "cart", over(id11))
                if k1 != k2:
                    raise InconsistentCriteria("the two interpolation recipes differ",
                                               (e.morphisms[k1], e.morphisms[k2]))
                objs = {"00": x, "10": x10, "01": x01, "11'": x11p, "11": x11}
                gens = {("10", "00"): c, ("00", "01"): d, ("10", "11'"): ee,
                        ("11'", "11"): k1, ("11", "01"): f}
                img = _diagram(Q_SHAPE, e, objs, gens)
                out.append(InterpolationDiagram("Q", img, k1, a_cat.morphisms[al],
                                                b_cat.morphisms[be], e.objects[x], objs))
    return out


def _gray_diagrams(p: TwoVarFib) -> list[InterpolationDiagram]:
    e, a_cat, b_cat = p.total, p.base_a, p.base_b
    ed = p.edges
    r_cocart = p.restricted_flags("r", "cocart")
    out = []

    def r_lift(x, u):
        if p.base.is_identity(u):
            return int(e.ident[x])
        cand = [k for k in range(e.n_mor) if e.src[k] == x and p.proj.mor[k] == u and r_cocart[k]]
        return min(cand, key=lambda k: (int(e.tgt[k]), k)) if cand else None

    for x in range(e.n_obj):
        a, b = int(p.p1.obj[x]), int(p.p2.obj[x])
        for al in [k for k in range(a_cat.n_mor) if a_cat.src[k] == a]:
            a2 = int(a_cat.tgt[al])
            for be in [k for k in range(b_cat.n_mor) if b_cat.src[k] == b]:
                b2 = int(b_cat.tgt[be])
                c1 = _need(ed.lift(x, p.base_mor(al, int(b_cat.ident[b])), "cocart"), (x, al))
                c2 = _need(r_lift(x, p.base_mor(int(a_cat.ident[a]), be)), (x, be))
                x10, x01 = int(e.tgt[c1]), int(e.tgt[c2])
                c3 = _need(r_lift(x10, p.base_mor(int(a_cat.ident[a2]), be)), (x10, be))
                c4 = _need(ed.lift(x01, p.base_mor(al, int(b_cat.ident[b2])), "cocart"), (x01, al))
                x11p, x11 = int(e.tgt[c3]), int(e.tgt[c4])
                id11 = p.base_mor(int(a_cat.ident[a2]), int(b_cat.ident[b2]))
                k = factor_unique(e, e.compose(c3, c1), e.compose(c4, c2), "cocart",
                                  lambda m: p.proj.mor[m] == id11)
                objs = {"00": x, "10": x10, "01": x01, "11'": x11p, "11": x11}
                gens = {("00", "10"): c1, ("00", "01"): c2, ("10", "11'"): c3,
                        ("01", "11"): c4, ("11'", "11"): k}
                img = _diagram(Q_PRIME_SHAPE, e, objs, gens)
                out.append(InterpolationDiagram("Q'", img, k, a_cat.morphisms[al],
                                                b_cat.morphisms[be], e.objects[x], objs))
    return out


# ------------------------------------------------------------- transports

def transport(p: TwoVarFib, src_fib, tgt_fib, lift_of, kind: str) -> FinFunctor:
    """Transport functor between fibres (subcategories of E, given as
    (cat, oi, mi)) built from chosen lifts and unique factorisations."""
    e = p.total
    s_cat, s_oi, s_mi = src_fib
    t_cat, t_oi, t_mi = tgt_fib
    t_obj = {int(o): i for i, o in enumerate(t_oi)}
    t_mor = {int(m): i for i, m in enumerate(t_mi)}
    lifts = [_need(lift_of(int(x)), (e.objects[int(x)], kind)) for x in s_oi]
    end = e.tgt if kind == "cocart" else e.src
    obj = np.array([t_obj[int(end[l])] for l in lifts], dtype=np.int64)
    mor = np.zeros(s_cat.n_mor, dtype=np.int64)
    allowed = lambda k: k in t_mor
    for j, m in enumerate(s_mi):
        m = int(m)
        x, y = int(s_cat.src[j]), int(s_cat.tgt[j])
        if kind == "cocart":
            k = factor_unique(e, lifts[x], e.compose(lifts[y], m), "cocart", allowed)
        else:
            k = factor_unique(e, lifts[y], e.compose(m, lifts[x]), "cart", allowed)
        mor[j] = t_mor[k]
    return FinFunctor(s_cat, t_cat, obj, mor)


def alpha_pull(p: TwoVarFib, al: int) -> FinFunctor:
    """alpha^*: X_a -> X_a' for alpha: a' -> a, from p-cartesian lifts over (alpha, id)."""
    a_cat, b_cat = p.base_a, p.base_b
    a, a2 = int(a_cat.tgt[al]), int(a_cat.src[al])
    fa, fa2 = p.fibre(a=a), p.fibre(a=a2)
    lift = lambda x: p.edges.lift(x, p.base_mor(al, int(b_cat.ident[p.p2.obj[x]])), "cart")
    return transport(p, fa, fa2, lift, "cart")


def alpha_push(p: TwoVarFib, al: int) -> FinFunctor:
    """alpha_!: X_a -> X_a' for alpha: a -> a', from p-cocartesian lifts over (alpha, id)."""
    a_cat, b_cat = p.base_a, p.base_b
    fa, fa2 = p.fibre(a=int(a_cat.src[al])), p.fibre(a=int(a_cat.tgt[al]))
    lift = lambda x: p.edges.lift(x, p.base_mor(al, int(b_cat.ident[p.p2.obj[x]])), "cocart")
    return transport(p, fa, fa2, lift, "cocart")


def beta_push(p: TwoVarFib, be: int) -> FinFunctor:
    """beta_!: X_b -> X_b' from p-cocartesian lifts over (id, beta)."""
    a_cat, b_cat = p.base_a, p.base_b
    fb, fb2 = p.fibre(b=int(b_cat.src[be])), p.fibre(b=int(b_cat.tgt[be]))
    lift = lambda x: p.edges.lift(x, p.base_mor(int(a_cat.ident[p.p1.obj[x]]), be), "cocart")
    return transport(p, fb, fb2, lift, "cocart")


def _preserves(fun: FinFunctor, src_flags: np.ndarray, tgt_flags: np.ndarray) -> bool:
    return bool((~src_flags | tgt_flags[fun.mor]).all())


# -------------------------------------------------------------- cross check

@dataclass
class CheckRecord:
    name: str
    values: dict
    agree: bool


def cross_check(p: TwoVarFib, tax: FibTaxonomy | None = None) -> list[CheckRecord]:
    """Agreement of the equivalent criteria for orthofibrations, for Gray
    fibrations being cocartesian, and for left fibrations."""
    tax = tax or classify(p)
    out: list[CheckRecord] = []
    e = p.total
    a_cat, b_cat = p.base_a, p.base_b
    if tax.curved_ortho:
        interp = all(e.is_iso(d.edge) for d in interpolating_edges(p, "crvortho"))
        pull_ok = True
        for al in range(a_cat.n_mor):
            f = alpha_pull(p, al)
            src = p.fibre_over_b(int(a_cat.tgt[al]))[3].cocart
            tgt = p.fibre_over_b(int(a_cat.src[al]))[3].cocart
            pull_ok &= _preserves(f, src, tgt)
        push_ok = True
        for be in range(b_cat.n_mor):
            f = beta_push(p, be)
            src = p.fibre_over_a(int(b_cat.src[be]))[3].cart
            tgt = p.fibre_over_a(int(b_cat.tgt[be]))[3].cart
            push_ok &= _preserves(f, src, tgt)
        vals = {"interpolating invertible": interp, "alpha^* preserves cocartesian": pull_ok,
                "beta_! preserves cartesian": push_ok}
        out.append(CheckRecord("ortho", vals, len(set(vals.values())) == 1))
    if tax.gray:
        out.append(gray_five(p, tax))
        left = tax.left_fib
        groupoids = all(p.fibre(a, b)[0].is_groupoid()
                        for a in range(a_cat.n_obj) for b in range(b_cat.n_obj))
        vals = {"left fibration": left, "conservative": tax.conservative,
                "groupoid fibres": groupoids}
        out.append(CheckRecord("gray left", vals, len(set(vals.values())) == 1))
    out.append(projection_cocart_check(p))
    if tax.locally_cocartesian_fib:
        out.append(local_composition_check(p.edges))
    return out


def gray_five(p: TwoVarFib, tax: FibTaxonomy) -> CheckRecord:
    e = p.total
    a_cat, b_cat = p.base_a, p.base_b
    c1 = tax.cocartesian_fib
    c2 = True
    for al in range(a_cat.n_mor):
        for be in range(b_cat.n_mor):
            u = p.base_mor(int(a_cat.ident[a_cat.src[al]]), be)
            v = p.base_mor(al, int(b_cat.ident[b_cat.tgt[be]]))
            c2 &= cocartesian_over_triangle(p.proj, u, v)
    c3 = all(e.is_iso(d.edge) for d in interpolating_edges(p, "gray"))
    c4 = True
    for al in range(a_cat.n_mor):
        f = alpha_push(p, al)
        src = p.fibre_over_b(int(a_cat.src[al]))[3].cocart
        tgt = p.fibre_over_b(int(a_cat.tgt[al]))[3].cocart
        c4 &= _preserves(f, src, tgt)
    from .grothendieck import straighten
    pf = straighten(p, "covariant", "A")
    c5 = True
    for al in range(a_cat.n_mor):
        s, t = int(a_cat.src[al]), int(a_cat.tgt[al])
        fs = Edges(pf.over[s]).cocart
        ft = Edges(pf.over[t]).cocart
        c5 &= _preserves(pf.transport[al], fs, ft)
    vals = {"cocartesian": c1, "triangle": c2, "interpolating invertible": c3,
            "alpha_! preserves cocartesian": c4, "straightening lands in Cocart(B)": c5}
    return CheckRecord("gray cocartesian", vals, len(set(vals.values())) == 1)


def cocartesian_over_triangle(p: FinFunctor, u: int, v: int) -> bool:
    """Is the pullback of p along the triangle (u, then v) a cocartesian fibration?"""
    tri = triangle_functor(p.target, u, v)
    pb, _, q = pullback(p, tri)
    return Edges(q).is_fibration("cocart")


def projection_cocart_check(p: TwoVarFib) -> CheckRecord:
    """Edges over an iso in A: p-cocartesian iff p2-cocartesian."""
    over_iso = p.base_a.iso_flags[p.p1.mor]
    a = p.edges.cocart[over_iso]
    b = p.e2.cocart[over_iso]
    return CheckRecord("p-cocartesian vs p2-cocartesian", {"mismatches": int((a != b).sum())},
                       bool((a == b).all()))


def local_composition_check(ed: Edges) -> CheckRecord:
    """A locally cocartesian f is cocartesian iff g f stays locally
    cocartesian for every locally cocartesian g out of its target."""
    e = ed.p.source
    loc = ed.flags("cocart", True)
    mism = 0
    for f in np.nonzero(loc)[0].tolist():
        gs = [g for g in np.nonzero(loc)[0].tolist() if e.src[g] == e.tgt[f]]
        crit = all(loc[e.comp[g, f]] for g in gs)
        if crit != bool(ed.cocart[f]):
            mism += 1
    return CheckRecord("locally cocartesian composites", {"mismatches": mism}, mism == 0)
