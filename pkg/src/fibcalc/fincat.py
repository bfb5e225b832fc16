"""Finite categories stored as composition tables, with functors,
natural transformations, adjoint search and equivalence search."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from . import _kernels as K
from .errors import (
    AmbiguousInitial,
    BadInput,
    DanglingEndpoint,
    MissingComposite,
    MissingIdentity,
    NonAssociative,
    SearchCapExceeded,
    UnknownMorphism,
)

Label = Hashable

DEFAULT_CAPS = (6, 40)


def label_str(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(label_str(v) for v in x) + ")"
    return str(x)


class FinCat:
    """A finite category.  Objects and morphisms are addressed by index;
    labels are kept for display and lookups."""

    def __init__(self, objects: Sequence[Label], morphisms: Sequence[Label],
                 src, tgt, ident, comp, check: bool = True, name: str = ""):
        self.objects = tuple(objects)
        self.morphisms = tuple(morphisms)
        self.src = np.asarray(src, dtype=np.int64)
        self.tgt = np.asarray(tgt, dtype=np.int64)
        self.ident = np.asarray(ident, dtype=np.int64)
        self.comp = np.asarray(comp, dtype=np.int64).reshape(len(self.morphisms), len(self.morphisms))
        self.name = name
        self._oidx = {o: i for i, o in enumerate(self.objects)}
        self._midx = {m: i for i, m in enumerate(self.morphisms)}
        self._hom = None
        self._inv = None
        if check:
            self.validate()

    # -- basic access
    @property
    def n_obj(self) -> int:
        return len(self.objects)

    @property
    def n_mor(self) -> int:
        return len(self.morphisms)

    def obj(self, label) -> int:
        try:
            return self._oidx[label]
        except KeyError:
            raise DanglingEndpoint(f"unknown object {label!r}", label) from None

    def mor(self, label) -> int:
        try:
            return self._midx[label]
        except KeyError:
            raise UnknownMorphism(f"unknown morphism {label!r}", label) from None

    def hom(self, x: int, y: int) -> tuple[int, ...]:
        if self._hom is None:
            h: dict[tuple[int, int], list[int]] = {}
            for k in range(self.n_mor):
                h.setdefault((int(self.src[k]), int(self.tgt[k])), []).append(k)
            self._hom = {key: tuple(v) for key, v in h.items()}
        return self._hom.get((x, y), ())

    def compose(self, g: int, f: int) -> int:
        c = int(self.comp[g, f])
        if c < 0:
            raise ValueError(f"not composable: {self.morphisms[g]!r} after {self.morphisms[f]!r}")
        return c

    def chain(self, *ms: int) -> int:
        """Compose right to left: chain(h, g, f) = h o g o f."""
        out = ms[-1]
        for g in reversed(ms[:-1]):
            out = self.compose(g, out)
        return out

    @property
    def inverse(self) -> np.ndarray:
        if self._inv is None:
            self._inv = K.inverses(self.comp, self.src, self.tgt, self.ident)
        return self._inv

    @property
    def iso_flags(self) -> np.ndarray:
        return self.inverse >= 0

    def is_iso(self, m: int) -> bool:
        return bool(self.inverse[m] >= 0)

    def is_identity(self, m: int) -> bool:
        return int(self.ident[self.src[m]]) == m

    def is_groupoid(self) -> bool:
        return bool(self.iso_flags.all())

    def is_thin(self) -> bool:
        return all(len(self.hom(int(self.src[k]), int(self.tgt[k]))) == 1 for k in range(self.n_mor))

    def isos(self, x: int, y: int) -> list[int]:
        return [k for k in self.hom(x, y) if self.inverse[k] >= 0]

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<FinCat{tag} {self.n_obj} obj, {self.n_mor} mor>"

    def same_as(self, other: "FinCat") -> bool:
        return (self.objects == other.objects and self.morphisms == other.morphisms
                and np.array_equal(self.src, other.src) and np.array_equal(self.tgt, other.tgt)
                and np.array_equal(self.comp, other.comp) and np.array_equal(self.ident, other.ident))

    # -- validation
    def validate(self) -> "FinCat":
        n, m = self.n_obj, self.n_mor
        if len(self._oidx) != n or len(self._midx) != m:
            raise BadInput("duplicate identifiers")
        for k in range(m):
            if not (0 <= self.src[k] < n and 0 <= self.tgt[k] < n):
                raise DanglingEndpoint(f"morphism {self.morphisms[k]!r} has a dangling endpoint",
                                       self.morphisms[k])
        if self.ident.shape[0] != n:
            raise MissingIdentity("identity table has wrong length")
        for x in range(n):
            i = int(self.ident[x])
            if not (0 <= i < m) or self.src[i] != x or self.tgt[i] != x:
                raise MissingIdentity(f"no identity at {self.objects[x]!r}", self.objects[x])
        composable = self.src[:, None] == self.tgt[None, :]
        defined = self.comp >= 0
        if (composable & ~defined).any():
            g, f = map(int, np.argwhere(composable & ~defined)[0])
            raise MissingComposite(
                f"missing composite {self.morphisms[g]!r} o {self.morphisms[f]!r}",
                (self.morphisms[g], self.morphisms[f]))
        if (~composable & defined).any():
            g, f = map(int, np.argwhere(~composable & defined)[0])
            raise BadInput(f"composite given for non-composable pair "
                           f"{self.morphisms[g]!r}, {self.morphisms[f]!r}")
        gs, fs = np.nonzero(composable)
        gf = self.comp[gs, fs]
        if (gf >= m).any() or (self.src[gf] != self.src[fs]).any() or (self.tgt[gf] != self.tgt[gs]).any():
            raise DanglingEndpoint("composite has wrong endpoints")
        u = K.unit_violation(self.comp, self.src, self.tgt, self.ident)
        if u >= 0:
            x = int(self.src[u])
            raise MissingIdentity(f"unit law fails at {self.morphisms[u]!r}", self.objects[x])
        bad = K.assoc_violation(self.comp, self.src, self.tgt)
        if bad is not None:
            raise NonAssociative("associativity fails",
                                 tuple(self.morphisms[i] for i in bad))
        return self

    # -- serialisation
    def to_json(self) -> dict:
        return {
            "objects": [label_str(o) for o in self.objects],
            "morphisms": [{"id": label_str(self.morphisms[k]),
                           "src": label_str(self.objects[self.src[k]]),
                           "tgt": label_str(self.objects[self.tgt[k]])} for k in range(self.n_mor)],
            "identities": {label_str(self.objects[x]): label_str(self.morphisms[self.ident[x]])
                           for x in range(self.n_obj)},
            "compose": [[label_str(self.morphisms[g]), label_str(self.morphisms[f]),
                         label_str(self.morphisms[self.comp[g, f]])]
                        for g, f in zip(*np.nonzero(self.comp >= 0))],
        }


# ------------------------------------------------------------------ builders

def from_json(data: dict) -> FinCat:
    """Build a category from the table or poset JSON form."""
    if not isinstance(data, dict):
        raise BadInput("category must be a JSON object")
    if "poset" in data:
        p = data["poset"]
        return poset(p.get("elements", []), [tuple(r) for r in p.get("leq", [])])
    try:
        objects = list(data["objects"])
        mors = data["morphisms"]
        compose = data.get("compose", [])
    except (KeyError, TypeError) as exc:
        raise BadInput(f"malformed category: {exc}") from None
    oidx = {o: i for i, o in enumerate(objects)}
    labels, src, tgt = [], [], []
    for rec in mors:
        try:
            mid, s, t = rec["id"], rec["src"], rec["tgt"]
        except (KeyError, TypeError):
            raise BadInput(f"malformed morphism record {rec!r}") from None
        if s not in oidx or t not in oidx:
            raise DanglingEndpoint(f"morphism {mid!r} has a dangling endpoint", mid)
        labels.append(mid)
        src.append(oidx[s])
        tgt.append(oidx[t])
    ids = data.get("identities")
    auto = ids is None
    if auto:
        ids = {}
        for o in objects:
            name = f"id_{o}"
            if name not in labels:
                labels.append(name)
                src.append(oidx[o])
                tgt.append(oidx[o])
            ids[o] = name
    midx = {m: i for i, m in enumerate(labels)}
    if len(midx) != len(labels):
        raise BadInput("duplicate morphism identifiers")
    ident = []
    for o in objects:
        if o not in ids or ids[o] not in midx:
            raise MissingIdentity(f"no identity at {o!r}", o)
        ident.append(midx[ids[o]])
    m = len(labels)
    comp = np.full((m, m), -1, dtype=np.int64)
    for row in compose:
        try:
            g, f, gf = row
        except (TypeError, ValueError):
            raise BadInput(f"malformed compose row {row!r}") from None
        for lab in (g, f, gf):
            if lab not in midx:
                raise DanglingEndpoint(f"compose row names unknown morphism {lab!r}", lab)
        comp[midx[g], midx[f]] = midx[gf]
    src_a, tgt_a = np.array(src, dtype=np.int64), np.array(tgt, dtype=np.int64)
    for x, i in enumerate(ident):
        for k in range(m):
            if tgt_a[k] == x and comp[i, k] < 0:
                comp[i, k] = k
            if src_a[k] == x and comp[k, i] < 0:
                comp[k, i] = k
    return FinCat(objects, labels, src_a, tgt_a, ident, comp)


def poset(elements: Sequence[Label], leq: Iterable[tuple]) -> FinCat:
    """Thin category on a preorder; morphism labels are pairs (a, b)."""
    elements = list(elements)
    n = len(elements)
    idx = {e: i for i, e in enumerate(elements)}
    rel = np.eye(n, dtype=bool)
    for a, b in leq:
        if a not in idx or b not in idx:
            raise DanglingEndpoint(f"unknown element in {a!r} <= {b!r}", (a, b))
        rel[idx[a], idx[b]] = True
    for k in range(n):  # transitive closure
        rel |= rel[:, k:k + 1] & rel[k:k + 1, :]
    return thin_from_matrix(elements, rel)


def thin_from_matrix(elements: Sequence[Label], rel: np.ndarray) -> FinCat:
    n = len(elements)
    pairs = [(i, j) for i in range(n) for j in range(n) if rel[i, j]]
    pidx = {p: k for k, p in enumerate(pairs)}
    m = len(pairs)
    src = np.array([p[0] for p in pairs], dtype=np.int64)
    tgt = np.array([p[1] for p in pairs], dtype=np.int64)
    comp = np.full((m, m), -1, dtype=np.int64)
    for g, (b, c) in enumerate(pairs):
        for f, (a, b2) in enumerate(pairs):
            if b == b2:
                comp[g, f] = pidx[(a, c)]
    ident = [pidx[(i, i)] for i in range(n)]
    labels = [(elements[i], elements[j]) for i, j in pairs]
    return FinCat(elements, labels, src, tgt, ident, comp, check=False)


def walking(n: int) -> FinCat:
    """The ordinal [n] = {0 < 1 < ... < n}."""
    cat = poset(range(n + 1), [(i, i + 1) for i in range(n)])
    cat.name = f"[{n}]"
    return cat


def point() -> FinCat:
    return walking(0)


def discrete(labels: Sequence[Label]) -> FinCat:
    return poset(labels, [])


def group_cat(order: int, obj: Label = "*") -> FinCat:
    """Cyclic group of the given order as a one-object category."""
    labels = [f"g{k}" for k in range(order)]
    comp = np.array([[(a + b) % order for b in range(order)] for a in range(order)], dtype=np.int64)
    return FinCat([obj], labels, np.zeros(order), np.zeros(order), [0], comp)


def monoid_cat(table: Sequence[Sequence[int]], obj: Label = "*") -> FinCat:
    """One-object category from a monoid multiplication table with unit 0."""
    m = len(table)
    labels = [f"m{k}" for k in range(m)]
    return FinCat([obj], labels, np.zeros(m), np.zeros(m), [0], np.array(table, dtype=np.int64))


# ------------------------------------------------------------- constructions

def opposite(c: FinCat) -> FinCat:
    out = FinCat(c.objects, c.morphisms, c.tgt, c.src, c.ident, c.comp.T.copy(), check=False,
                 name=f"{c.name}^op" if c.name else "")
    return out


def product(c: FinCat, d: FinCat) -> FinCat:
    """Componentwise product; object (i, j) has index i * |D| + j and
    morphism (f, g) index f * |Mor D| + g."""
    nd, md = d.n_obj, d.n_mor
    objects = [(a, b) for a in c.objects for b in d.objects]
    labels = [(f, g) for f in c.morphisms for g in d.morphisms]
    src = (c.src[:, None] * nd + d.src[None, :]).ravel()
    tgt = (c.tgt[:, None] * nd + d.tgt[None, :]).ravel()
    ident = (c.ident[:, None] * md + d.ident[None, :]).ravel()
    c1 = c.comp[:, None, :, None]
    c2 = d.comp[None, :, None, :]
    both = (c1 >= 0) & (c2 >= 0)
    comp = np.where(both, c1 * md + c2, -1).reshape(c.n_mor * md, c.n_mor * md)
    name = f"{c.name}x{d.name}" if c.name and d.name else ""
    return FinCat(objects, labels, src, tgt, ident, comp, check=False, name=name)


def subcategory(c: FinCat, obj_keep, mor_keep) -> tuple[FinCat, np.ndarray, np.ndarray]:
    """Subcategory on the given object and morphism masks.  Returns the
    category with the index arrays back into ``c``."""
    obj_keep = np.asarray(obj_keep, dtype=bool)
    mor_keep = np.asarray(mor_keep, dtype=bool) & obj_keep[c.src] & obj_keep[c.tgt]
    mor_keep[c.ident[obj_keep]] = True
    oi = np.nonzero(obj_keep)[0]
    mi = np.nonzero(mor_keep)[0]
    onew = np.full(c.n_obj, -1, dtype=np.int64)
    onew[oi] = np.arange(oi.size)
    mnew = np.full(c.n_mor, -1, dtype=np.int64)
    mnew[mi] = np.arange(mi.size)
    sub = c.comp[np.ix_(mi, mi)]
    comp = np.where(sub >= 0, mnew[np.maximum(sub, 0)], -1)
    if ((sub >= 0) & (comp < 0)).any():
        raise BadInput("morphism set is not closed under composition")
    out = FinCat([c.objects[i] for i in oi], [c.morphisms[k] for k in mi],
                 onew[c.src[mi]], onew[c.tgt[mi]], mnew[c.ident[oi]], comp, check=False)
    return out, oi, mi


def full_subcategory(c: FinCat, obj_keep) -> tuple[FinCat, np.ndarray, np.ndarray]:
    return subcategory(c, obj_keep, np.ones(c.n_mor, dtype=bool))


def core(c: FinCat) -> FinCat:
    return subcategory(c, np.ones(c.n_obj, dtype=bool), c.iso_flags)[0]


def core_inclusion(c: FinCat) -> "FinFunctor":
    sub, oi, mi = subcategory(c, np.ones(c.n_obj, dtype=bool), c.iso_flags)
    return FinFunctor(sub, c, oi, mi)


# ------------------------------------------------------------------ functors

class FinFunctor:
    def __init__(self, source: FinCat, target: FinCat, obj, mor, check: bool = False):
        self.source = source
        self.target = target
        self.obj = np.asarray(obj, dtype=np.int64)
        self.mor = np.asarray(mor, dtype=np.int64)
        if check:
            self.validate()

    def validate(self) -> "FinFunctor":
        c, d = self.source, self.target
        if self.obj.shape != (c.n_obj,) or self.mor.shape != (c.n_mor,):
            raise BadInput("functor tables have the wrong shape")
        if c.n_obj and ((self.obj < 0).any() or (self.obj >= d.n_obj).any()):
            raise BadInput("object map leaves the target")
        if c.n_mor and ((self.mor < 0).any() or (self.mor >= d.n_mor).any()):
            raise BadInput("morphism map leaves the target")
        if (d.src[self.mor] != self.obj[c.src]).any() or (d.tgt[self.mor] != self.obj[c.tgt]).any():
            raise BadInput("functor does not preserve endpoints")
        if (self.mor[c.ident] != d.ident[self.obj]).any():
            raise BadInput("functor does not preserve identities")
        gs, fs = np.nonzero(c.comp >= 0)
        lhs = self.mor[c.comp[gs, fs]]
        rhs = d.comp[self.mor[gs], self.mor[fs]]
        if (lhs != rhs).any():
            k = int(np.nonzero(lhs != rhs)[0][0])
            raise BadInput("functor does not preserve composition",
                           (c.morphisms[gs[k]], c.morphisms[fs[k]]))
        return self

    def is_valid(self) -> bool:
        try:
            self.validate()
        except BadInput:
            return False
        return True

    def then(self, other: "FinFunctor") -> "FinFunctor":
        """Diagrammatic composite: first self, then other."""
        return FinFunctor(self.source, other.target, other.obj[self.obj], other.mor[self.mor])

    def op(self) -> "FinFunctor":
        return FinFunctor(opposite(self.source), opposite(self.target), self.obj, self.mor)

    def restrict(self, oi, mi, sub: FinCat) -> "FinFunctor":
        return FinFunctor(sub, self.target, self.obj[oi], self.mor[mi])

    def same_as(self, other: "FinFunctor") -> bool:
        return np.array_equal(self.obj, other.obj) and np.array_equal(self.mor, other.mor)

    def is_conservative(self) -> bool:
        img_iso = self.target.iso_flags[self.mor]
        return bool((~img_iso | self.source.iso_flags).all())

    def is_fully_faithful(self) -> bool:
        c, d = self.source, self.target
        for x in range(c.n_obj):
            for y in range(c.n_obj):
                img = sorted(int(self.mor[k]) for k in c.hom(x, y))
                if img != sorted(d.hom(int(self.obj[x]), int(self.obj[y]))):
                    return False
        return True

    def fibre(self, b: int) -> tuple[FinCat, np.ndarray, np.ndarray]:
        """Fibre over object b: objects over b, morphisms over id_b."""
        t = self.target
        return subcategory(self.source, self.obj == b, self.mor == t.ident[b])

    def __repr__(self) -> str:
        return f"<FinFunctor {self.source!r} -> {self.target!r}>"


def identity_functor(c: FinCat) -> FinFunctor:
    return FinFunctor(c, c, np.arange(c.n_obj), np.arange(c.n_mor))


def constant_functor(c: FinCat, d: FinCat, y: int) -> FinFunctor:
    return FinFunctor(c, d, np.full(c.n_obj, y), np.full(c.n_mor, d.ident[y]))


def terminal_functor(c: FinCat) -> FinFunctor:
    return constant_functor(c, point(), 0)


def projections(c: FinCat, d: FinCat, prod: FinCat | None = None):
    prod = prod or product(c, d)
    nd, md = d.n_obj, d.n_mor
    oi = np.arange(prod.n_obj)
    mi = np.arange(prod.n_mor)
    return (FinFunctor(prod, c, oi // nd, mi // md), FinFunctor(prod, d, oi % nd, mi % md))


def pairing(f: FinFunctor, g: FinFunctor, prod: FinCat | None = None) -> FinFunctor:
    """(f, g): X -> C x D."""
    prod = prod or product(f.target, g.target)
    return FinFunctor(f.source, prod, f.obj * g.target.n_obj + g.obj, f.mor * g.target.n_mor + g.mor)


def product_functor(f: FinFunctor, g: FinFunctor, src: FinCat | None = None,
                    tgt: FinCat | None = None) -> FinFunctor:
    src = src or product(f.source, g.source)
    tgt = tgt or product(f.target, g.target)
    obj = (f.obj[:, None] * g.target.n_obj + g.obj[None, :]).ravel()
    mor = (f.mor[:, None] * g.target.n_mor + g.mor[None, :]).ravel()
    return FinFunctor(src, tgt, obj, mor)


def pullback(f: FinFunctor, g: FinFunctor):
    """Strict fibre product C x_B D of f: C -> B and g: D -> B.
    Returns (P, pr_C, pr_D)."""
    c, d = f.source, g.source
    pairs_o = [(i, j) for i in range(c.n_obj) for j in range(d.n_obj) if f.obj[i] == g.obj[j]]
    oidx = {p: k for k, p in enumerate(pairs_o)}
    pairs_m = [(a, b) for a in range(c.n_mor) for b in range(d.n_mor) if f.mor[a] == g.mor[b]]
    midx = {p: k for k, p in enumerate(pairs_m)}
    m = len(pairs_m)
    pa = np.array([p[0] for p in pairs_m], dtype=np.int64).reshape(m)
    pb = np.array([p[1] for p in pairs_m], dtype=np.int64).reshape(m)
    src = np.array([oidx[(int(c.src[a]), int(d.src[b]))] for a, b in pairs_m], dtype=np.int64).reshape(m)
    tgt = np.array([oidx[(int(c.tgt[a]), int(d.tgt[b]))] for a, b in pairs_m], dtype=np.int64).reshape(m)
    ident = [midx[(int(c.ident[i]), int(d.ident[j]))] for i, j in pairs_o]
    comp = np.full((m, m), -1, dtype=np.int64)
    if m:
        ca = c.comp[pa[:, None], pa[None, :]]
        cb = d.comp[pb[:, None], pb[None, :]]
        gs, fs = np.nonzero((ca >= 0) & (cb >= 0))
        for g_, f_ in zip(gs, fs):
            comp[g_, f_] = midx[(int(ca[g_, f_]), int(cb[g_, f_]))]
    objects = [(c.objects[i], d.objects[j]) for i, j in pairs_o]
    labels = [(c.morphisms[a], d.morphisms[b]) for a, b in pairs_m]
    p = FinCat(objects, labels, src, tgt, ident, comp, check=False)
    po = np.array([q[0] for q in pairs_o], dtype=np.int64).reshape(len(pairs_o))
    qo = np.array([q[1] for q in pairs_o], dtype=np.int64).reshape(len(pairs_o))
    return p, FinFunctor(p, c, po, pa), FinFunctor(p, d, qo, pb)


def arrow_functor(b: FinCat, u: int) -> FinFunctor:
    """The functor [1] -> B picking out the morphism u."""
    one = walking(1)
    obj = [int(b.src[u]), int(b.tgt[u])]
    mor = np.zeros(one.n_mor, dtype=np.int64)
    for k, (i, j) in enumerate(one.morphisms):
        mor[k] = b.ident[obj[0]] if (i, j) == (0, 0) else b.ident[obj[1]] if (i, j) == (1, 1) else u
    return FinFunctor(one, b, obj, mor)


def triangle_functor(b: FinCat, u: int, v: int) -> FinFunctor:
    """[2] -> B sending 0 -> 1 to u and 1 -> 2 to v."""
    two = walking(2)
    vu = b.compose(v, u)
    obj = [int(b.src[u]), int(b.tgt[u]), int(b.tgt[v])]
    table = {(0, 1): u, (1, 2): v, (0, 2): vu}
    mor = [table.get((i, j), b.ident[obj[i]] if i == j else -1) for i, j in two.morphisms]
    return FinFunctor(two, b, obj, mor)


# ------------------------------------------------------ natural transformations

class NatTransf:
    def __init__(self, source: FinFunctor, target: FinFunctor, comp, check: bool = False):
        self.source = source
        self.target = target
        self.comp = np.asarray(comp, dtype=np.int64)
        if check:
            self.validate()

    def validate(self) -> "NatTransf":
        f, g = self.source, self.target
        c, d = f.source, f.target
        if self.comp.shape != (c.n_obj,):
            raise BadInput("component table has the wrong length")
        for x in range(c.n_obj):
            k = int(self.comp[x])
            if d.src[k] != f.obj[x] or d.tgt[k] != g.obj[x]:
                raise BadInput(f"component at {c.objects[x]!r} has wrong endpoints")
        bad = self.naturality_failures()
        if bad:
            raise BadInput("naturality fails", bad[0])
        return self

    def naturality_failures(self) -> list:
        f, g = self.source, self.target
        c, d = f.source, f.target
        out = []
        for m in range(c.n_mor):
            x, y = int(c.src[m]), int(c.tgt[m])
            if d.comp[g.mor[m], self.comp[x]] != d.comp[self.comp[y], f.mor[m]]:
                out.append(c.morphisms[m])
        return out

    def is_iso(self) -> bool:
        return bool(self.source.target.iso_flags[self.comp].all())

    def is_identity(self) -> bool:
        d = self.source.target
        return bool((self.comp == d.ident[self.source.obj]).all())

    def vcomp(self, other: "NatTransf") -> "NatTransf":
        """self after other."""
        d = self.source.target
        return NatTransf(other.source, self.target,
                         [d.compose(int(a), int(b)) for a, b in zip(self.comp, other.comp)])

    def whisker_left(self, h: FinFunctor) -> "NatTransf":
        """self * h : F h => G h."""
        return NatTransf(h.then(self.source), h.then(self.target), self.comp[h.obj])

    def whisker_right(self, h: FinFunctor) -> "NatTransf":
        """h * self : h F => h G."""
        return NatTransf(self.source.then(h), self.target.then(h), h.mor[self.comp])


def identity_nat(f: FinFunctor) -> NatTransf:
    return NatTransf(f, f, f.target.ident[f.obj])


# -------------------------------------------------------------- adjunctions

@dataclass
class Adjunction:
    left: FinFunctor    # f : C -> D
    right: FinFunctor   # g : D -> C
    unit: NatTransf     # id_C => g f
    counit: NatTransf   # f g => id_D

    def triangle_failures(self) -> list:
        f, g = self.left, self.right
        c, d = f.source, f.target
        out = []
        for y in range(c.n_obj):  # eps_{fy} o f(eta_y) = id
            k = d.compose(int(self.counit.comp[f.obj[y]]), int(f.mor[self.unit.comp[y]]))
            if k != d.ident[f.obj[y]]:
                out.append(("left", c.objects[y]))
        for x in range(d.n_obj):  # g(eps_x) o eta_{gx} = id
            k = c.compose(int(g.mor[self.counit.comp[x]]), int(self.unit.comp[g.obj[x]]))
            if k != c.ident[g.obj[x]]:
                out.append(("right", d.objects[x]))
        return out

    def transpose(self, y: int, x: int, phi: int) -> int:
        """f y -> x  to  y -> g x."""
        c = self.left.source
        return c.compose(int(self.right.mor[phi]), int(self.unit.comp[y]))

    def transpose_back(self, y: int, x: int, psi: int) -> int:
        """y -> g x  to  f y -> x."""
        d = self.left.target
        return d.compose(int(self.counit.comp[x]), int(self.left.mor[psi]))

    def hom_bijection_ok(self) -> bool:
        f, g = self.left, self.right
        c, d = f.source, f.target
        for y in range(c.n_obj):
            for x in range(d.n_obj):
                lhs = d.hom(int(f.obj[y]), x)
                rhs = c.hom(y, int(g.obj[x]))
                if len(lhs) != len(rhs):
                    return False
                img = {self.transpose(y, x, p) for p in lhs}
                if img != set(rhs):
                    return False
                if any(self.transpose_back(y, x, self.transpose(y, x, p)) != p for p in lhs):
                    return False
        return True

    def naturality_ok(self) -> bool:
        """Every naturality square of the hom bijection, in both variables."""
        f, g = self.left, self.right
        c, d = f.source, f.target
        for y in range(c.n_obj):
            for x in range(d.n_obj):
                for phi in d.hom(int(f.obj[y]), x):
                    t = self.transpose(y, x, phi)
                    for v in range(d.n_mor):  # post-compose in D
                        if d.src[v] != x:
                            continue
                        x2 = int(d.tgt[v])
                        if self.transpose(y, x2, d.compose(v, phi)) != c.compose(int(g.mor[v]), t):
                            return False
                    for u in range(c.n_mor):  # pre-compose in C
                        if c.tgt[u] != y:
                            continue
                        y2 = int(c.src[u])
                        lhs = self.transpose(y2, x, d.compose(phi, int(f.mor[u])))
                        if lhs != c.compose(t, u):
                            return False
        return True


def comma_under(y: int, g: FinFunctor):
    """Objects (x, u: y -> g x) of the comma category (y | g)."""
    c = g.target
    return [(x, u) for x in range(g.source.n_obj) for u in c.hom(y, int(g.obj[x]))]


def _comma_maps(g: FinFunctor, a, b) -> list[int]:
    (x, u), (x2, u2) = a, b
    c, d = g.target, g.source
    return [h for h in d.hom(x, x2) if c.compose(int(g.mor[h]), u) == u2]


def comma_initial(y: int, g: FinFunctor):
    """Initial object of (y | g), ties broken by least (object, morphism)
    index; None when there is none."""
    objs = comma_under(y, g)
    initial = [a for a in objs if all(len(_comma_maps(g, a, b)) == 1 for b in objs)]
    if not initial:
        return None
    first = initial[0]
    for other in initial[1:]:
        there = _comma_maps(g, first, other)
        back = _comma_maps(g, other, first)
        if not (there and back and g.source.is_iso(there[0])):
            raise AmbiguousInitial("non-isomorphic initial objects", (first, other))
    return first


def find_adjoint(g: FinFunctor, side: str = "left") -> Adjunction | None:
    """Left (or right) adjoint of g, or None when it does not exist."""
    if side == "right":
        adj = find_adjoint(g.op(), "left")
        if adj is None:
            return None
        # adj: f^op -| g^op; so g -| f with swapped unit/counit
        f = FinFunctor(g.target, g.source, adj.left.obj, adj.left.mor)
        unit = NatTransf(identity_functor(g.source), g.then(f), adj.counit.comp)
        counit = NatTransf(f.then(g), identity_functor(g.target), adj.unit.comp)
        return Adjunction(g, f, unit, counit)
    if side != "left":
        raise ValueError("side must be 'left' or 'right'")
    c, d = g.target, g.source
    fo = np.zeros(c.n_obj, dtype=np.int64)
    eta = np.zeros(c.n_obj, dtype=np.int64)
    for y in range(c.n_obj):
        ini = comma_initial(y, g)
        if ini is None:
            return None
        fo[y], eta[y] = ini
    fm = np.zeros(c.n_mor, dtype=np.int64)
    for v in range(c.n_mor):
        y, y2 = int(c.src[v]), int(c.tgt[v])
        # unique h: f y -> f y2 with g(h) eta_y = eta_y2 v
        hs = [h for h in d.hom(int(fo[y]), int(fo[y2]))
              if c.compose(int(g.mor[h]), int(eta[y])) == c.compose(int(eta[y2]), v)]
        fm[v] = hs[0]
    f = FinFunctor(c, d, fo, fm)
    eps = np.zeros(d.n_obj, dtype=np.int64)
    for x in range(d.n_obj):
        gx = int(g.obj[x])
        hs = [h for h in d.hom(int(fo[gx]), x)
              if c.compose(int(g.mor[h]), int(eta[gx])) == c.ident[gx]]
        eps[x] = hs[0]
    adj = Adjunction(f, g, NatTransf(identity_functor(c), f.then(g), eta),
                     NatTransf(g.then(f), identity_functor(d), eps))
    if adj.triangle_failures():
        raise AmbiguousInitial("assembled adjunction violates a triangle identity",
                               adj.triangle_failures()[0])
    return adj


def localization_certificate(F: FinFunctor, W: Iterable[int]) -> tuple[bool, bool]:
    """(F inverts W, F has a fully faithful left or right adjoint)."""
    iso = F.target.iso_flags
    inverts = all(bool(iso[F.mor[w]]) for w in W)
    reflective = False
    for side in ("left", "right"):
        adj = find_adjoint(F, side)
        if adj is not None:
            other = adj.left if side == "left" else adj.right
            if other.is_fully_faithful():
                reflective = True
                break
    return inverts, reflective


def is_isomorphic_by_identity(c: FinCat, d: FinCat) -> bool:
    """True when the identity on labels is an isomorphism c -> d."""
    if set(c.objects) != set(d.objects) or set(c.morphisms) != set(d.morphisms):
        return False
    try:
        obj = np.array([d.obj(o) for o in c.objects], dtype=np.int64)
        mor = np.array([d.mor(m) for m in c.morphisms], dtype=np.int64)
    except (DanglingEndpoint, UnknownMorphism):
        return False
    return FinFunctor(c, d, obj, mor).is_valid()


# ---------------------------------------------------------- functor search

def _check_caps(cats: Sequence[FinCat], caps) -> None:
    no, nm = caps
    for c in cats:
        if c.n_obj > no or c.n_mor > nm:
            raise SearchCapExceeded(f"{c!r} exceeds caps {caps}", (c.n_obj, c.n_mor))


def search_functors(c: FinCat, d: FinCat, obj_ok: Callable[[int, int], bool] | None = None,
                    mor_ok: Callable[[int, int], bool] | None = None,
                    fully_faithful: bool = False, limit: int | None = None):
    """Yield functors c -> d subject to per-object and per-morphism
    admissibility predicates, by backtracking with composite propagation."""
    obj_ok = obj_ok or (lambda x, y: True)
    mor_ok = mor_ok or (lambda m, n: True)
    cands = [[y for y in range(d.n_obj) if obj_ok(x, y)] for x in range(c.n_obj)]
    hc = {(x, y): len(c.hom(x, y)) for x in range(c.n_obj) for y in range(c.n_obj)}
    order = sorted(range(c.n_mor), key=lambda k: (c.is_identity(k) is False, k))
    nonid = [k for k in order if not c.is_identity(k)]
    triples = [[] for _ in range(c.n_mor)]
    gs, fs = np.nonzero(c.comp >= 0)
    for g_, f_ in zip(gs.tolist(), fs.tolist()):
        gf = int(c.comp[g_, f_])
        for k in {g_, f_, gf}:
            triples[k].append((g_, f_, gf))
    found = 0
    obj = np.full(c.n_obj, -1, dtype=np.int64)

    def obj_dfs(i):
        if i == c.n_obj:
            yield from mor_stage()
            return
        for y in cands[i]:
            if fully_faithful:
                ok = True
                for j in range(i + 1):
                    yj = y if j == i else int(obj[j])
                    if len(d.hom(y, yj)) != hc[(i, j)] or len(d.hom(yj, y)) != hc[(j, i)]:
                        ok = False
                        break
                if not ok:
                    continue
            obj[i] = y
            yield from obj_dfs(i + 1)
            obj[i] = -1

    def mor_stage():
        mor = np.full(c.n_mor, -1, dtype=np.int64)
        for x in range(c.n_obj):
            mor[c.ident[x]] = d.ident[obj[x]]
        for x in range(c.n_obj):
            if not mor_ok(int(c.ident[x]), int(mor[c.ident[x]])):
                return
        yield from mor_dfs(0, mor)

    def consistent(k, mor):
        for g_, f_, gf in triples[k]:
            a, b, ab = mor[g_], mor[f_], mor[gf]
            if a >= 0 and b >= 0 and ab >= 0 and d.comp[a, b] != ab:
                return False
        return True

    def mor_dfs(i, mor):
        nonlocal found
        if limit is not None and found >= limit:
            return
        if i == len(nonid):
            found += 1
            yield FinFunctor(c, d, obj.copy(), mor.copy())
            return
        k = nonid[i]
        if mor[k] >= 0:
            yield from mor_dfs(i + 1, mor)
            return
        x, y = int(obj[c.src[k]]), int(obj[c.tgt[k]])
        used = set()
        if fully_faithful:
            used = {int(mor[j]) for j in c.hom(int(c.src[k]), int(c.tgt[k])) if mor[j] >= 0}
        for n in d.hom(x, y):
            if n in used or not mor_ok(k, n):
                continue
            mor[k] = n
            if consistent(k, mor):
                # propagate composites that become determined
                forced = _propagate(c, d, mor, triples, k)
                if forced is not None:
                    yield from mor_dfs(i + 1, mor)
                    for j in forced:
                        mor[j] = -1
            mor[k] = -1

    def _propagate(c, d, mor, triples, k):
        changed = []
        stack = [k]
        while stack:
            j = stack.pop()
            for g_, f_, gf in triples[j]:
                if mor[g_] >= 0 and mor[f_] >= 0:
                    val = int(d.comp[mor[g_], mor[f_]])
                    if mor[gf] < 0:
                        if not mor_ok(gf, val):
                            for q in changed:
                                mor[q] = -1
                            return None
                        mor[gf] = val
                        changed.append(gf)
                        stack.append(gf)
                    elif mor[gf] != val:
                        for q in changed:
                            mor[q] = -1
                        return None
        if fully_faithful:
            for j in changed:
                same = [q for q in c.hom(int(c.src[j]), int(c.tgt[j])) if mor[q] >= 0]
                if len({int(mor[q]) for q in same}) != len(same):
                    for q in changed:
                        mor[q] = -1
                    return None
        return changed

    yield from obj_dfs(0)


@dataclass
class Equivalence:
    forward: FinFunctor
    backward: FinFunctor
    unit: NatTransf      # id => backward o forward
    counit: NatTransf    # forward o backward => id


def quasi_inverse(F: FinFunctor, iso_ok: Callable[[int], bool] | None = None) -> Equivalence | None:
    """Quasi-inverse of a fully faithful functor that is essentially
    surjective through isos satisfying ``iso_ok``; None otherwise."""
    c, d = F.source, F.target
    iso_ok = iso_ok or (lambda m: True)
    go = np.zeros(d.n_obj, dtype=np.int64)
    eps = np.zeros(d.n_obj, dtype=np.int64)
    for y in range(d.n_obj):
        hit = None
        for x in range(c.n_obj):
            for m in d.isos(int(F.obj[x]), y):
                if iso_ok(m):
                    hit = (x, m)
                    break
            if hit:
                break
        if hit is None:
            return None
        go[y], eps[y] = hit
    lookup = {}
    for k in range(c.n_mor):
        lookup[(int(c.src[k]), int(c.tgt[k]), int(F.mor[k]))] = k
    gm = np.zeros(d.n_mor, dtype=np.int64)
    inv = d.inverse
    for v in range(d.n_mor):
        y, y2 = int(d.src[v]), int(d.tgt[v])
        want = d.chain(int(inv[eps[y2]]), v, int(eps[y]))
        key = (int(go[y]), int(go[y2]), want)
        if key not in lookup:
            return None
        gm[v] = lookup[key]
    G = FinFunctor(d, c, go, gm)
    unit = np.zeros(c.n_obj, dtype=np.int64)
    for x in range(c.n_obj):
        fx = int(F.obj[x])
        key = (x, int(go[fx]), int(inv[eps[fx]]))
        if key not in lookup:
            return None
        unit[x] = lookup[key]
    return Equivalence(F, G, NatTransf(identity_functor(c), F.then(G), unit),
                       NatTransf(G.then(F), identity_functor(d), eps))


def find_equivalence(c: FinCat, d: FinCat, obj_ok=None, mor_ok=None, iso_ok=None,
                     caps=DEFAULT_CAPS) -> Equivalence | None:
    """Bounded search for an equivalence c -> d with explicit quasi-inverse."""
    _check_caps([c, d], caps)
    if c.n_obj == 0 or d.n_obj == 0:
        if c.n_obj == d.n_obj:
            e = FinFunctor(c, d, [], [])
            b = FinFunctor(d, c, [], [])
            return Equivalence(e, b, NatTransf(identity_functor(c), e.then(b), []),
                               NatTransf(b.then(e), identity_functor(d), []))
        return None
    if len(_iso_classes(c)) != len(_iso_classes(d)):
        return None
    for F in search_functors(c, d, obj_ok, mor_ok, fully_faithful=True):
        eq = quasi_inverse(F, iso_ok)
        if eq is not None:
            return eq
    return None


def _iso_classes(c: FinCat) -> list[list[int]]:
    seen, out = set(), []
    for x in range(c.n_obj):
        if x in seen:
            continue
        cls = [y for y in range(c.n_obj) if c.isos(x, y)]
        seen.update(cls)
        out.append(cls)
    return out


def isomorphic(c: FinCat, d: FinCat, caps=DEFAULT_CAPS) -> FinFunctor | None:
    """An isomorphism c -> d, by bounded search."""
    _check_caps([c, d], caps)
    if c.n_obj != d.n_obj or c.n_mor != d.n_mor:
        return None
    def obj_ok(x, y):
        return len(c.hom(x, x)) == len(d.hom(y, y))

    for F in search_functors(c, d, obj_ok, fully_faithful=True):
        if len(set(F.obj.tolist())) == c.n_obj:
            return F
    return None


def thin_functor(c: FinCat, d: FinCat, obj) -> FinFunctor:
    """The functor determined by an object map into a thin category."""
    obj = np.asarray(obj, dtype=np.int64)
    mor = np.zeros(c.n_mor, dtype=np.int64)
    for k in range(c.n_mor):
        hs = d.hom(int(obj[c.src[k]]), int(obj[c.tgt[k]]))
        if len(hs) != 1:
            raise BadInput(f"no unique image for {c.morphisms[k]!r}")
        mor[k] = hs[0]
    return FinFunctor(c, d, obj, mor, check=True)
