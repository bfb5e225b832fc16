"""Chain posets in a grid, the strict Gray tensor [m] x [n] of simplices,
the collapse onto [m]([n], ..., [n]), Gray scalings and the locally
cocartesian classifier over a product."""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import CapExceeded, NonFunctorial
from .fibclass import Edges, TwoVarFib, classify, cocartesian_over_triangle
from .fincat import FinCat, FinFunctor, point, poset, product, thin_functor, walking

DEFAULT_GRAY_CAP = 3


def gray_cap() -> int:
    """Largest m, n accepted; FIBCALC_CAPS may carry a third entry."""
    raw = os.environ.get("FIBCALC_CAPS", "")
    parts = [p for p in raw.replace(";", ",").split(",") if p.strip()]
    if len(parts) >= 3:
        return int(parts[2])
    return DEFAULT_GRAY_CAP


def _check_cap(*sizes, cap=None):
    cap = gray_cap() if cap is None else cap
    if any(s > cap for s in sizes):
        raise CapExceeded(f"grid size {sizes} exceeds cap {cap}", sizes)


# ----------------------------------------------------------- chain posets

Point = tuple  # (x0, x1): x0 to the right, x1 downwards


def pt_label(p: Point) -> str:
    return f"{p[0]}{p[1]}"


def _leq(a: Point, b: Point) -> bool:
    return a[0] <= b[0] and a[1] <= b[1]


def _chains(x: Point, y: Point) -> list[tuple]:
    """Nondegenerate chains x = x_0 < ... < x_t = y, sorted by length."""
    if x == y:
        return [(x,)]
    inner = [(i, j) for i in range(x[0], y[0] + 1) for j in range(x[1], y[1] + 1)
             if (i, j) not in (x, y)]
    out = []
    for r in range(len(inner) + 1):
        for sub in itertools.combinations(inner, r):
            pts = sorted(sub)
            if all(_leq(a, b) for a, b in zip(pts, pts[1:])):
                out.append((x, *pts, y))
    return out


def _is_maximal(ch: tuple) -> bool:
    return all(b[0] - a[0] + b[1] - a[1] == 1 for a, b in zip(ch, ch[1:]))


def _complete(ch: tuple) -> tuple:
    """Replace every step by its right steps followed by its down steps."""
    out = [ch[0]]
    for a, b in zip(ch, ch[1:]):
        for i in range(a[0] + 1, b[0] + 1):
            out.append((i, a[1]))
        for j in range(a[1] + 1, b[1] + 1):
            out.append((b[0], j))
    return tuple(out)


def _marked(sub: tuple, ch: tuple) -> bool:
    """sub arises from ch by removing one x_i with x_i^0 = x_{i+1}^0 or
    x_{i-1}^1 = x_i^1."""
    if len(sub) != len(ch) - 1:
        return False
    for i in range(1, len(ch) - 1):
        if ch[:i] + ch[i + 1:] == sub:
            return ch[i][0] == ch[i + 1][0] or ch[i - 1][1] == ch[i][1]
    return False


def chain_label(ch: tuple) -> str:
    return "<".join(pt_label(p) for p in ch)


@dataclass
class ChainPoset:
    grid: tuple
    x: Point
    y: Point
    chains: list            # index -> chain (tuple of points)
    cat: FinCat             # subchain inclusion
    marked: np.ndarray      # per morphism of cat

    def index(self, ch: tuple) -> int:
        return self.chains.index(ch)


def _swap_order(maxch: list[tuple]) -> np.ndarray:
    """Order on maximal chains generated by right-then-down <= down-then-right,
    the direction of the 2-cells in the grid."""
    n = len(maxch)
    idx = {c: i for i, c in enumerate(maxch)}
    rel = np.eye(n, dtype=bool)
    for i, c in enumerate(maxch):
        for k in range(1, len(c) - 1):
            a, m, b = c[k - 1], c[k], c[k + 1]
            if m[0] == a[0] and b[1] == m[1] and b[0] == a[0] + 1 and b[1] == a[1] + 1:
                # a -> down -> m -> right -> b  becomes  a -> right -> b
                rel[idx[c[:k] + ((a[0] + 1, a[1]),) + c[k + 1:]], i] = True
    for k in range(n):
        rel |= rel[:, k:k + 1] & rel[k:k + 1, :]
    return rel


def chain_posets(m: int, n: int, x: Point, y: Point):
    """(Ch, MaxCh, max) for endpoints x <= y of the grid [m] x [n]."""
    if not _leq(x, y) or not (0 <= x[0] <= m and 0 <= y[0] <= m and 0 <= x[1] <= n and 0 <= y[1] <= n):
        raise ValueError("endpoints must satisfy x <= y inside the grid")
    chs = _chains(x, y)
    labels = [chain_label(c) for c in chs]
    sets = [set(c) for c in chs]
    ch_cat = poset(labels, [(labels[i], labels[j]) for i in range(len(chs))
                            for j in range(len(chs)) if i != j and sets[i] <= sets[j]])
    marked = np.zeros(ch_cat.n_mor, dtype=bool)
    for k in range(ch_cat.n_mor):
        marked[k] = _marked(chs[int(ch_cat.src[k])], chs[int(ch_cat.tgt[k])])
    ch = ChainPoset((m, n), x, y, chs, ch_cat, marked)
    maxch = [c for c in chs if _is_maximal(c)]
    from .fincat import thin_from_matrix
    mx = thin_from_matrix([chain_label(c) for c in maxch], _swap_order(maxch))
    mx.chains = maxch
    midx = {c: i for i, c in enumerate(maxch)}
    fmax = thin_functor(ch_cat, mx, [midx[_complete(c)] for c in chs])
    return ch, mx, fmax


def max_certificate(ch: ChainPoset, mx: FinCat, fmax: FinFunctor) -> dict:
    """Checks on max: monotone (by construction), marked arrows to
    identities, surjective, (co)cartesian fibration, and for each maximal
    chain tau a maximal element tau of the preimage reached from every
    other element by marked inclusions."""
    c = ch.cat
    marked_to_id = all(mx.is_identity(int(fmax.mor[k])) for k in np.nonzero(ch.marked)[0])
    surjective = set(fmax.obj.tolist()) == set(range(mx.n_obj))
    ed = Edges(fmax)
    cart, cocart = ed.is_fibration("cart"), ed.is_fibration("cocart")
    fibres = True
    for t, tau in enumerate(mx.chains):
        top = ch.index(tau)
        pre = [i for i in range(c.n_obj) if fmax.obj[i] == t]
        fibres &= top in pre and all(c.hom(i, top) for i in pre)
        # reach tau from each sigma through marked single insertions
        reach = {top}
        frontier = [top]
        while frontier:
            j = frontier.pop()
            for k in range(c.n_mor):
                if ch.marked[k] and int(c.tgt[k]) == j and int(c.src[k]) not in reach:
                    reach.add(int(c.src[k]))
                    frontier.append(int(c.src[k]))
        fibres &= set(pre) <= reach
    ok = marked_to_id and surjective and fibres
    return {"marked_to_identity": bool(marked_to_id), "surjective": bool(surjective),
            "cartesian": bool(cart), "cocartesian": bool(cocart), "fibres": bool(fibres),
            "ok": bool(ok)}


# ------------------------------------------------------- strict 2-categories


@dataclass
class Strict2Cat:
    """Objects, hom posets for pairs with a hom, horizontal composition
    on objects and morphisms of homs, identities."""
    objects: list
    hom: dict                    # (x, y) -> FinCat
    comp1: dict                  # (x, y, z) -> FinFunctor hom(y,z) x hom(x,y) -> hom(x,z)
    ident: dict                  # x -> object of hom(x, x)
    name: str = ""

    def homs(self):
        return sorted(self.hom)

    def check(self) -> dict:
        """Composition functors valid (interchange), associativity on
        objects and 2-cells of homs, unitality."""
        ok_f = all(f.is_valid() for f in self.comp1.values())
        assoc = unit = True
        objs = self.objects
        for (x, y), hxy in self.hom.items():
            hxx = self.hom[(x, x)]
            hyy = self.hom[(y, y)]
            # unit laws, on objects and 2-cells
            lu = self.comp1[(x, y, y)]
            ru = self.comp1[(x, x, y)]
            iy = hyy.ident[self.ident[y]]
            ix = hxx.ident[self.ident[x]]
            for a in range(hxy.n_mor):
                unit &= int(lu.mor[iy * hxy.n_mor + a]) == a
                unit &= int(ru.mor[a * hxx.n_mor + ix]) == a
            for z in objs:
                if (y, z) not in self.hom:
                    continue
                hyz = self.hom[(y, z)]
                for w in objs:
                    if (z, w) not in self.hom:
                        continue
                    hzw = self.hom[(z, w)]
                    c_yz_w = self.comp1[(y, z, w)]
                    c_x_yw = self.comp1[(x, y, w)]
                    c_x_yz = self.comp1[(x, y, z)]
                    c_xz_w = self.comp1[(x, z, w)]
                    for a in range(hzw.n_mor):
                        for b in range(hyz.n_mor):
                            ab = int(c_yz_w.mor[a * hyz.n_mor + b])
                            for cc in range(hxy.n_mor):
                                left = int(c_x_yw.mor[ab * hxy.n_mor + cc])
                                bc = int(c_x_yz.mor[b * hxy.n_mor + cc])
                                right = int(c_xz_w.mor[a * self.hom[(x, z)].n_mor + bc])
                                assoc &= left == right
        return {"interchange": bool(ok_f), "associative": bool(assoc), "unital": bool(unit)}

    def to_json(self) -> dict:
        from .fincat import label_str
        out = {"objects": [label_str(o) for o in self.objects], "homs": [], "compose": []}
        for (x, y) in self.homs():
            h = self.hom[(x, y)]
            out["homs"].append({"src": label_str(x), "tgt": label_str(y),
                                "objects": [label_str(o) for o in h.objects],
                                "leq": [[label_str(h.objects[int(h.src[k])]), label_str(h.objects[int(h.tgt[k])])]
                                        for k in range(h.n_mor) if not h.is_identity(k)]})
        for (x, y, z), f in sorted(self.comp1.items()):
            hyz, hxy, hxz = self.hom[(y, z)], self.hom[(x, y)], self.hom[(x, z)]
            for a in range(hyz.n_obj):
                for b in range(hxy.n_obj):
                    out["compose"].append([label_str(hyz.objects[a]), label_str(hxy.objects[b]),
                                           label_str(hxz.objects[int(f.obj[a * hxy.n_obj + b])])])
        return out


def _concat(g: tuple, f: tuple) -> tuple:
    return f + g[1:]


def _assemble(objects, homs: dict, compose_obj, ident_obj, name: str) -> Strict2Cat:
    """Build composition functors from an object-level composite on thin homs."""
    comp1 = {}
    ident = {}
    for x in objects:
        ident[x] = homs[(x, x)].obj(ident_obj(x))
    for (x, y), hxy in homs.items():
        for z in objects:
            if (y, z) not in homs:
                continue
            hyz, hxz = homs[(y, z)], homs[(x, z)]
            pr = product(hyz, hxy)
            obj = [hxz.obj(compose_obj(hyz.objects[a], hxy.objects[b]))
                   for a in range(hyz.n_obj) for b in range(hxy.n_obj)]
            try:
                comp1[(x, y, z)] = thin_functor(pr, hxz, obj)
            except Exception as e:
                raise NonFunctorial("horizontal composition is not monotone", (x, y, z)) from e
    return Strict2Cat(list(objects), homs, comp1, ident, name)


def gray_simplices(m: int, n: int, cap: int | None = None) -> Strict2Cat:
    """[m] x [n] in the strict oplax Gray tensor: hom posets MaxCh,
    composition by concatenation."""
    _check_cap(m, n, cap=cap)
    pts = [(i, j) for i in range(m + 1) for j in range(n + 1)]
    homs, chains_of = {}, {}
    for x in pts:
        for y in pts:
            if _leq(x, y):
                _, mx, _ = chain_posets(m, n, x, y)
                homs[(pt_label(x), pt_label(y))] = mx
                for c in mx.chains:
                    chains_of[chain_label(c)] = c

    def compose(g, f):
        return chain_label(_concat(chains_of[g], chains_of[f]))

    s = _assemble([pt_label(p) for p in pts], homs, compose,
                  lambda x: chain_label(((int(x[0]), int(x[1])),)), f"[{m}]x[{n}]")
    s.chains = chains_of
    return s


def theta_cell(m: int, widths: list[int], cap: int | None = None) -> Strict2Cat:
    """[m]([n_1], ..., [n_m]): hom(i, j) is the product of the chains
    [n_{i+1}], ..., [n_j]; composition concatenates tuples."""
    _check_cap(m, *widths, cap=cap)
    if len(widths) != m:
        raise ValueError("need one width per step")
    homs = {}
    for i in range(m + 1):
        for j in range(i, m + 1):
            ws = widths[i:j]
            elems = list(itertools.product(*[range(w + 1) for w in ws]))
            labels = [tuple(e) for e in elems]
            homs[(i, j)] = poset(labels, [(a, b) for a in labels for b in labels
                                          if a != b and all(p <= q for p, q in zip(a, b))])
    return _assemble(list(range(m + 1)), homs, lambda g, f: tuple(f) + tuple(g),
                     lambda x: (), f"[{m}]({','.join(map(str, widths))})")


@dataclass
class Collapse:
    source: Strict2Cat
    target: Strict2Cat
    obj: dict                    # grid point -> object
    hom: dict                    # (x, y) -> FinFunctor on hom posets
    certificates: dict           # (x, y) with x < y -> max certificate


def collapse_to_delta2(m: int, n: int, cap: int | None = None) -> Collapse:
    """The 2-functor [m] x [n] -> [m]([n], ..., [n]) sending (i, j) to i; a
    maximal chain goes to the rows of its horizontal steps."""
    src = gray_simplices(m, n, cap)
    tgt = theta_cell(m, [n] * m, cap)
    obj = {pt_label((i, j)): i for i in range(m + 1) for j in range(n + 1)}
    hom, certs = {}, {}
    for (x, y), h in src.hom.items():
        i, i2 = obj[x], obj[y]
        ht = tgt.hom[(i, i2)]
        img = []
        for c in h.chains:
            rows = tuple(a[1] for a, b in zip(c, c[1:]) if b[0] == a[0] + 1)
            img.append(ht.obj(rows))
        hom[(x, y)] = thin_functor(h, ht, img)
        px, py = (int(x[0]), int(x[1])), (int(y[0]), int(y[1]))
        if px != py:
            certs[(x, y)] = max_certificate(*chain_posets(m, n, px, py))
    return Collapse(src, tgt, obj, hom, certs)


def collapse_report(col: Collapse) -> dict:
    """2-functoriality, and which generating 1-morphisms become identities."""
    src, tgt = col.source, col.target
    functorial = True
    for (x, y, z), f in src.comp1.items():
        i, j, k = col.obj[x], col.obj[y], col.obj[z]
        g = tgt.comp1[(i, j, k)]
        hyz, hxy = src.hom[(y, z)], src.hom[(x, y)]
        for a in range(hyz.n_obj):
            for b in range(hxy.n_obj):
                lhs = int(col.hom[(x, z)].obj[f.obj[a * hxy.n_obj + b]])
                ra, rb = int(col.hom[(y, z)].obj[a]), int(col.hom[(x, y)].obj[b])
                functorial &= lhs == int(g.obj[ra * tgt.hom[(i, j)].n_obj + rb])
    for x, ix in src.ident.items():
        functorial &= int(col.hom[(x, x)].obj[ix]) == tgt.ident[col.obj[x]]
    vertical, horizontal = [], []
    for (x, y), h in src.hom.items():
        a, b = (int(x[0]), int(x[1])), (int(y[0]), int(y[1]))
        if b[0] - a[0] + b[1] - a[1] != 1:
            continue
        img = int(col.hom[(x, y)].obj[0])
        ident = col.obj[x] == col.obj[y] and img == tgt.ident[col.obj[x]]
        (vertical if a[0] == b[0] else horizontal).append(ident)
    return {"two_functor": bool(functorial),
            "vertical_inverted": bool(all(vertical)),
            "horizontal_kept": bool(not any(horizontal)),
            "certificates": bool(all(c["ok"] for c in col.certificates.values())),
            "hom_pairs": len(col.certificates)}


# --------------------------------------------------------- scaled complexes


@dataclass
class ScaledComplex:
    """Nerve of a preorder truncated at dimension 3; a simplex is its
    vertex sequence.  `scaled` holds 2-simplices."""
    vertices: list
    simplices: dict              # dim -> list of vertex tuples
    scaled: set = field(default_factory=set)

    def degenerate(self, s: tuple) -> bool:
        return any(a == b for a, b in zip(s, s[1:]))

    def check(self) -> dict:
        have = {d: set(v) for d, v in self.simplices.items()}
        faces = all(s[:i] + s[i + 1:] in have[d - 1]
                    for d in range(1, 4) for s in self.simplices.get(d, []) for i in range(d + 1))
        degs = all(s[:i + 1] + s[i:] in have[d + 1]
                   for d in range(0, 3) for s in self.simplices.get(d, []) for i in range(d + 1))
        contains = all(s in self.scaled for s in self.simplices[2] if self.degenerate(s))
        return {"faces": faces, "degeneracies": degs, "degenerate_scaled": contains}

    def to_json(self) -> dict:
        lab = lambda v: v if isinstance(v, str) else "".join(map(str, v)) if isinstance(v, tuple) else str(v)
        return {"simplices": {str(d): [[lab(v) for v in s] for s in ss] for d, ss in self.simplices.items()},
                "scaled": sorted([[lab(v) for v in s] for s in self.scaled])}


def nerve(c: FinCat, sharp: bool = True) -> ScaledComplex:
    """Nerve of a thin category up to dimension 3; sharp scales every
    2-simplex, otherwise only degenerate ones."""
    vs = list(c.objects)
    le = lambda a, b: bool(c.hom(c.obj(a), c.obj(b)))
    simp = {0: [(v,) for v in vs]}
    for d in range(1, 4):
        simp[d] = [s + (v,) for s in simp[d - 1] for v in vs if le(s[-1], v)]
    out = ScaledComplex(vs, simp)
    out.scaled = {s for s in simp[2] if sharp or out.degenerate(s)}
    return out


def _s0(s):
    return (s[0], s[0], s[1])


def _s1(s):
    return (s[0], s[1], s[1])


def gray_scaling(x: ScaledComplex, y: ScaledComplex) -> ScaledComplex:
    """Product complex scaled by (s1 alpha, tau) for tau in T and
    (sigma, s0 beta) for sigma in S."""
    verts = [(a, b) for a in x.vertices for b in y.vertices]
    simp = {d: [tuple(zip(s, t)) for s in x.simplices[d] for t in y.simplices[d]] for d in range(4)}
    scaled = set()
    for al in x.simplices[1]:
        for tau in y.scaled:
            scaled.add(tuple(zip(_s1(al), tau)))
    for sg in x.scaled:
        for be in y.simplices[1]:
            scaled.add(tuple(zip(sg, _s0(be))))
    out = ScaledComplex(verts, simp, scaled)
    out.scaled |= {s for s in simp[2] if out.degenerate(s)}
    return out


def in_gray_scaling(s: tuple, x: ScaledComplex, y: ScaledComplex) -> bool:
    """Membership by matching the two forms on the components."""
    a = tuple(v[0] for v in s)
    b = tuple(v[1] for v in s)
    first = a[1] == a[2] and b in y.scaled
    second = b[0] == b[1] and a in x.scaled
    return bool(first or second or (a[0] == a[1] and b[0] == b[1]) or (a[1] == a[2] and b[1] == b[2]))


def gray_scaling_report(x: ScaledComplex, y: ScaledComplex) -> dict:
    g = gray_scaling(x, y)
    agree = all((s in g.scaled) == in_gray_scaling(s, x, y) for s in g.simplices[2])
    nondeg = [s for s in g.simplices[2] if not g.degenerate(s)]
    return {"predicate_agrees": bool(agree), **g.check(),
            "nondegenerate": len(nondeg), "nondegenerate_scaled": sum(s in g.scaled for s in nondeg)}


def unit_check(x: ScaledComplex) -> bool:
    """X tensor the point is X with the same scaling."""
    pt = nerve(point())
    g = gray_scaling(x, pt)
    strip = lambda s: tuple(v[0] for v in s)
    return ({strip(s) for s in g.scaled} == x.scaled
            and all([strip(s) for s in g.simplices[d]] == x.simplices[d] for d in range(4)))


# ------------------------------------------------------ the classifier


def _triangles(c: FinCat, scaled: set | None):
    """Composable pairs (u, v) of c whose vertex sequence is scaled (all
    pairs when scaled is None)."""
    out = []
    for u in range(c.n_mor):
        for v in range(c.n_mor):
            if c.comp[v, u] < 0:
                continue
            s = (c.objects[int(c.src[u])], c.objects[int(c.tgt[u])], c.objects[int(c.tgt[v])])
            if scaled is None or s in scaled:
                out.append((u, v))
    return out


def loc_cocart_gray_classifier(p: TwoVarFib, s: set | None = None, t: set | None = None) -> dict:
    """Conditions (1)-(3) for a locally cocartesian p: E -> X x Y with
    scalings S on X and T on Y (None meaning every triangle), the closure
    over the whole Gray scaling, and the taxonomy gray flag."""
    x, y = p.base_a, p.base_b
    q = p.proj
    loc = p.edges.is_fibration("cocart", local=True)
    bm = p.base_mor
    wit = {}

    def over(u, v):
        return cocartesian_over_triangle(q, u, v)

    c1 = True
    for a in range(x.n_obj):
        for (u, v) in _triangles(y, t):
            if not over(bm(int(x.ident[a]), u), bm(int(x.ident[a]), v)):
                c1 = False
                wit.setdefault("1", (x.objects[a], y.morphisms[u], y.morphisms[v]))
    c2 = True
    for b in range(y.n_obj):
        for (u, v) in _triangles(x, s):
            if not over(bm(u, int(y.ident[b])), bm(v, int(y.ident[b]))):
                c2 = False
                wit.setdefault("2", (x.morphisms[u], x.morphisms[v], y.objects[b]))
    c3 = True
    for al in range(x.n_mor):
        for be in range(y.n_mor):
            u = bm(al, int(y.ident[y.src[be]]))
            v = bm(int(x.ident[x.tgt[al]]), be)
            if not over(u, v):
                c3 = False
                wit.setdefault("3", (x.morphisms[al], y.morphisms[be]))
    # every triangle of the Gray scaling on the product
    tx, ty = _triangles(x, s), _triangles(y, t)
    all_x = _triangles(x, None)
    all_y = _triangles(y, None)
    closure = True
    for (u1, v1) in all_x:
        for (u2, v2) in all_y:
            first = x.is_identity(v1) and (u2, v2) in ty
            second = y.is_identity(u2) and (u1, v1) in tx
            if first or second:
                closure &= over(bm(u1, u2), bm(v1, v2))
    conds = loc and c1 and c2 and c3
    gray = bool(classify(p).gray)
    return {"locally_cocartesian": bool(loc), "cond1": c1, "cond2": c2, "cond3": c3,
            "closure": bool(closure), "closure_implied": bool(closure or not conds),
            "gray_flag": gray, "agrees_with_gray": (conds == gray) if s is None and t is None else None,
            "witnesses": wit}


def non_gray_example() -> TwoVarFib:
    """A locally cocartesian fibration over [2] x [1] which is not Gray: the
    product of a non-cocartesian locally cocartesian q: E -> [2] with [1]."""
    e = poset(["a", "b", "c'", "c"], [("a", "b"), ("b", "c"), ("a", "c'"), ("c'", "c")])
    qq = thin_functor(e, walking(2), [0, 1, 2, 2])
    one = walking(1)
    tot = product(e, one)
    from .fincat import identity_functor, product_functor
    pr = product_functor(qq, identity_functor(one), tot, product(walking(2), one))
    return TwoVarFib.from_functor(pr, walking(2), one, "non-gray")


__all__ = [
    "ChainPoset", "Strict2Cat", "ScaledComplex", "Collapse", "chain_posets", "max_certificate",
    "gray_simplices", "theta_cell", "collapse_to_delta2", "collapse_report", "nerve",
    "gray_scaling", "in_gray_scaling", "gray_scaling_report", "unit_check",
    "loc_cocart_gray_classifier", "non_gray_example", "gray_cap", "DEFAULT_GRAY_CAP",
]
