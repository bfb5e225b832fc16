"""Bundled examples and the generated corpus used by the test suites."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .fibclass import Q_PRIME_SHAPE, Q_SHAPE, TwoVarFib, fib_from_json
from .fincat import (
    FinCat,
    FinFunctor,
    discrete,
    from_json,
    identity_functor,
    opposite,
    point,
    poset,
    product,
    thin_functor,
    walking,
)
from .grothendieck import CONTRA, COV, from_functor_family, unstraighten
from .twistfree import arrow_cat, tw

# ------------------------------------------------------------------ bases


def square() -> FinCat:
    cat = product(walking(1), walking(1))
    cat.name = "[1]x[1]"
    return cat


def small_bases() -> list[FinCat]:
    """Bases with at most three objects used across the suites."""
    vee = poset(["l", "m", "r"], [("m", "l"), ("m", "r")])
    vee.name = "span"
    cospan = poset(["l", "m", "r"], [("l", "m"), ("r", "m")])
    cospan.name = "cospan"
    return [point(), walking(1), walking(2), vee, cospan]


def heyting_chain() -> FinCat:
    cat = walking(2)
    cat.name = "P"
    return cat


# ------------------------------------------------------- families of posets


def _monotone_maps(p: FinCat, q: FinCat) -> list[tuple[int, ...]]:
    out = []
    for img in itertools.product(range(q.n_obj), repeat=p.n_obj):
        if all(q.hom(img[int(p.src[k])], img[int(p.tgt[k])]) for k in range(p.n_mor)):
            out.append(img)
    return out


def poset_family(base: FinCat, fibres: list[FinCat], maps: dict) -> FinFunctor:
    """Cocartesian fibration over a thin base from monotone transports;
    `maps` sends each non-identity morphism index to an object map."""
    funs = []
    for u in range(base.n_mor):
        s, t = int(base.src[u]), int(base.tgt[u])
        if base.is_identity(u):
            funs.append(identity_functor(fibres[s]))
        else:
            funs.append(thin_functor(fibres[s], fibres[t], maps[u]))
    F = from_functor_family(base, fibres, funs, COV)
    return unstraighten(F, name="fam").p1


def _families(base: FinCat, fibres: list[FinCat]):
    """Every strictly functorial family of monotone transports over a thin
    base: maps are chosen on indecomposable arrows and composed."""
    non_id = [u for u in range(base.n_mor) if not base.is_identity(u)]
    composite = set()
    for v in non_id:
        for u in non_id:
            if base.comp[v, u] >= 0:
                composite.add(int(base.comp[v, u]))
    gens = [u for u in non_id if u not in composite]
    # order the rest so that each factors through earlier arrows
    rest, done = [u for u in non_id if u in composite], set(gens)
    plan = []
    while rest:
        for w in rest:
            fac = next(((v, u) for v in done for u in done if base.comp[v, u] == w), None)
            if fac is not None:
                plan.append((w, fac))
                done.add(w)
                rest.remove(w)
                break
        else:
            raise ValueError("base is not generated by its indecomposable arrows")
    choices = [_monotone_maps(fibres[int(base.src[u])], fibres[int(base.tgt[u])]) for u in gens]
    for pick in itertools.product(*choices):
        maps = dict(zip(gens, pick))
        for w, (v, u) in plan:
            maps[w] = tuple(maps[v][i] for i in maps[u])
        if all(tuple(maps[v][i] for i in maps[u]) == maps[int(base.comp[v, u])]
               for v in non_id for u in non_id if base.comp[v, u] >= 0):
            yield maps


@dataclass
class MateCase:
    name: str
    base: FinCat
    g: FinFunctor
    pc: FinFunctor
    pd: FinFunctor


def fibrewise_map(pc: FinFunctor, pd: FinFunctor, maps: list) -> FinFunctor:
    """The functor C -> D over a thin base acting by maps[b] on each fibre
    of poset families; raises BadInput when it is not monotone."""
    c, d = pc.source, pd.source
    b = pc.target
    d_at = {}
    for i in range(d.n_obj):
        d_at.setdefault(int(pd.obj[i]), []).append(i)
    c_at = {}
    for i in range(c.n_obj):
        c_at.setdefault(int(pc.obj[i]), []).append(i)
    obj = np.zeros(c.n_obj, dtype=np.int64)
    for k in range(b.n_obj):
        for j, i in enumerate(c_at.get(k, [])):
            obj[i] = d_at[k][maps[k][j]]
    return thin_functor(c, d, obj)


def mate_example() -> MateCase:
    """B = [1], fibres [1], g_0 = id, g_1 = const 1, transports identity."""
    b = walking(1)
    u = b.mor((0, 1))
    one = walking(1)
    pc = poset_family(b, [one, one], {u: (0, 1)})
    pd = poset_family(b, [one, one], {u: (0, 1)})
    g = fibrewise_map(pc, pd, [(0, 1), (1, 1)])
    return MateCase("mate_example", b, g, pc, pd)


def non_adjoint_example() -> MateCase:
    """g_1 = const 0 on [1] has no left adjoint; g_0 picks the top."""
    b = walking(1)
    u = b.mor((0, 1))
    pc = poset_family(b, [walking(0), walking(1)], {u: (0,)})
    pd = poset_family(b, [walking(1), walking(1)], {u: (0, 0)})
    g = fibrewise_map(pc, pd, [(1,), (0, 0)])
    return MateCase("non_adjoint", b, g, pc, pd)


def _right_adjoints(p: FinCat, q: FinCat) -> list[tuple[int, ...]]:
    """Monotone maps p -> q with a left adjoint, by brute force."""
    out = []
    for gm in _monotone_maps(p, q):
        ok = True
        for y in range(q.n_obj):
            ups = [x for x in range(p.n_obj) if q.hom(y, gm[x])]
            least = [x for x in ups if all(p.hom(x, z) for z in ups)]
            if not least:
                ok = False
                break
        if ok:
            out.append(gm)
    return out


def _lax(b: FinCat, fd: list, mc: dict, md: dict, gm) -> bool:
    """u_! g_b(x) <= g_b'(u_! x) for every base arrow u and x in C_b."""
    for u, cmap in mc.items():
        s, t = int(b.src[u]), int(b.tgt[u])
        for x, ux in enumerate(cmap):
            if not fd[t].hom(md[u][gm[s][x]], gm[t][ux]):
                return False
    return True


def mate_descriptors(b: FinCat, shapes=None):
    """Every (fibres of C, fibres of D, transports, fibrewise right
    adjoints) over the thin base b with g lax, in a fixed order."""
    shapes = shapes or [walking(0), walking(1)]
    for fc in itertools.product(shapes, repeat=b.n_obj):
        for fd in itertools.product(shapes, repeat=b.n_obj):
            fc, fd = list(fc), list(fd)
            gs = [_right_adjoints(fc[k], fd[k]) for k in range(b.n_obj)]
            for mc in _families(b, fc):
                for md in _families(b, fd):
                    for gm in itertools.product(*gs):
                        if _lax(b, fd, mc, md, gm):
                            yield fc, fd, mc, md, gm


def build_case(b: FinCat, desc, name: str) -> MateCase:
    fc, fd, mc, md, gm = desc
    pc = poset_family(b, fc, mc)
    pd = poset_family(b, fd, md)
    return MateCase(name, b, fibrewise_map(pc, pd, list(gm)), pc, pd)


MATE_SAMPLE = {"[1]": None, "[2]": 60, "[1]x[1]": 60}


def mate_cases_for_base(b: FinCat, sample: int | None = 60, seed: int = 0) -> list[MateCase]:
    """Cases over a user-supplied thin base, sampled like mate_cases."""
    import random
    if not b.is_thin():
        from .errors import BadInput
        raise BadInput("mate corpus needs a thin base")
    descs = list(mate_descriptors(b))
    idx = range(len(descs)) if sample is None or sample >= len(descs) else \
        sorted(random.Random(seed).sample(range(len(descs)), sample))
    return [build_case(b, descs[i], f"{b.name}#{i}") for i in idx]


def mate_cases(sample: dict | None = None, seed: int = 0) -> list[MateCase]:
    """Parametrised right adjoints between poset families with fibres [0]
    or [1] over [1], [2] and [1]x[1].  A base mapped to None keeps every
    case; otherwise a fixed-seed sample of that many is drawn."""
    import random
    sample = MATE_SAMPLE if sample is None else sample
    out = []
    for b in (walking(1), walking(2), square()):
        if b.name not in sample:
            continue
        descs = list(mate_descriptors(b))
        k = sample[b.name]
        idx = range(len(descs)) if k is None or k >= len(descs) else \
            sorted(random.Random(seed).sample(range(len(descs)), k))
        out.extend(build_case(b, descs[i], f"{b.name}#{i}") for i in idx)
    return out


# ---------------------------------------------------------- bundled inputs


def _coords(shape: FinCat, base: FinCat, a: FinCat, b: FinCat, name: str) -> TwoVarFib:
    """Objects "ij" (and "11'") of the shape sit over (i, j)."""
    obj = [base.obj((int(o[0]), int(o[1]))) for o in shape.objects]
    return TwoVarFib.from_functor(thin_functor(shape, base, obj), a, b, name)


def q_fib() -> TwoVarFib:
    """Q over [1]^op x [1]."""
    a, b = opposite(walking(1)), walking(1)
    return _coords(Q_SHAPE, product(a, b), a, b, "Q")


def q_prime_fib() -> TwoVarFib:
    """Q' over [1] x [1]."""
    a, b = walking(1), walking(1)
    return _coords(Q_PRIME_SHAPE, product(a, b), a, b, "Q'")


def load_json(name: str) -> dict:
    """A bundled data file by name, e.g. "q.json"."""
    return json.loads(resources.files("fibcalc.data").joinpath(name).read_text())


def load_fib(path: str) -> TwoVarFib:
    from .errors import BadInput
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError:
        if path in bundled_names():
            data = load_json(path)
        else:
            raise BadInput(f"cannot read {path}") from None
    except json.JSONDecodeError as exc:
        raise BadInput(f"{path}: {exc}") from None
    return fib_from_json(data, name=data.get("name", path) if isinstance(data, dict) else path)


def load_cat(path: str) -> FinCat:
    from .errors import BadInput
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError:
        if path in bundled_names():
            data = load_json(path)
        else:
            raise BadInput(f"cannot read {path}") from None
    except json.JSONDecodeError as exc:
        raise BadInput(f"{path}: {exc}") from None
    cat = from_json(data)
    cat.name = data.get("name", path) if isinstance(data, dict) else path
    return cat


def load_mate_case(path: str) -> MateCase:
    """{"source": fibration, "target": fibration, "g": functor} with both
    fibrations over the same single base."""
    from .errors import BadInput
    from .fibclass import _functor_from_json
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError:
        if path not in bundled_names():
            raise BadInput(f"cannot read {path}") from None
        data = load_json(path)
    except json.JSONDecodeError as exc:
        raise BadInput(f"{path}: {exc}") from None
    if not isinstance(data, dict) or not {"source", "target", "g"} <= set(data):
        raise BadInput("mate case needs source, target and g")
    c, d = fib_from_json(data["source"]), fib_from_json(data["target"])
    if c.base_a.objects != d.base_a.objects or c.base_a.morphisms != d.base_a.morphisms:
        raise BadInput("source and target lie over different bases")
    g = _functor_from_json(c.total, d.total, data["g"])
    pd = FinFunctor(d.total, c.base_a, d.p1.obj, d.p1.mor)
    if not g.then(pd).same_as(c.p1):
        raise BadInput("g does not lie over the base")
    return MateCase(data.get("name", path), c.base_a, g, c.p1, pd)


def bundled_names() -> list[str]:
    return sorted(f.name for f in resources.files("fibcalc.data").iterdir() if f.name.endswith(".json"))


def bundled_fibrations() -> list[TwoVarFib]:
    """Q, Q', Ar and Tw of [1] and [2], and a constant projection."""
    out = [q_fib(), q_prime_fib()]
    for c in (walking(1), walking(2)):
        ar = arrow_cat(c).fib
        ar.name = f"Ar({c.name})"
        out.append(ar)
        for v in ("left", "right"):
            t = tw(c, v).fib
            t.name = f"Tw^{v[0]}({c.name})"
            out.append(t)
    a, b = walking(1), walking(1)
    x = walking(1)
    e = product(x, product(a, b))
    ab = product(a, b)
    pr = FinFunctor(e, ab, np.arange(e.n_obj) % ab.n_obj, np.arange(e.n_mor) % ab.n_mor)
    out.append(TwoVarFib.from_functor(pr, a, b, "[1]x([1]x[1])"))
    return out


# ------------------------------------------------------ generated corpus

SHAPES = ("[0]", "[1]", "[0]+[0]")


def shape(name: str) -> FinCat:
    return {"[0]": walking(0), "[1]": walking(1), "[0]+[0]": discrete(["a", "b"])}[name]


def _family_fibs(base: FinCat, shapes, variance: str):
    """Strict families of the named fibre shapes; a contravariant family
    on base is read off a covariant one on its opposite."""
    fam_base = base if variance == COV else opposite(base)
    for fs in itertools.product(shapes, repeat=base.n_obj):
        fibres = [shape(n) for n in fs]
        for maps in _families(fam_base, fibres):
            funs = []
            for u in range(base.n_mor):
                s_, t_ = int(fam_base.src[u]), int(fam_base.tgt[u])
                if base.is_identity(u):
                    funs.append(identity_functor(fibres[s_]))
                else:
                    funs.append(thin_functor(fibres[s_], fibres[t_], maps[u]))
            yield "/".join(fs), maps, from_functor_family(base, fibres, funs, variance)


def one_variable_corpus(bases=None) -> list[TwoVarFib]:
    """Every cocartesian and cartesian family of the shapes [0], [1],
    [0]+[0] over the small bases, with strict transports."""
    out = []
    for b in bases or small_bases():
        for variance in (COV, CONTRA):
            for tag, maps, F in _family_fibs(b, SHAPES, variance):
                p = unstraighten(F).p1
                out.append(TwoVarFib.one_variable(p, f"{variance[:3]}:{b.name}:{tag}:{sorted(maps.items())}"))
    return out


TWO_VAR_SAMPLE = 80


def two_variable_corpus(sample: int | None = TWO_VAR_SAMPLE, seed: int = 0) -> list[TwoVarFib]:
    """Cocartesian families over A x B for A, B in {[0], [1]} and over
    [1] x [2], read as functors into the product.  Each base keeps a
    fixed-seed sample of at most `sample` families."""
    import random
    out = []
    pairs = [(walking(0), walking(1)), (walking(1), walking(0)), (walking(1), walking(1)),
             (walking(1), walking(2))]
    for a, b in pairs:
        ab = product(a, b)
        ab.name = f"{a.name}x{b.name}"
        fams = list(_family_fibs(ab, SHAPES if ab.n_obj <= 4 else SHAPES[:2], COV))
        idx = range(len(fams))
        if sample is not None and len(fams) > sample:
            idx = sorted(random.Random(seed).sample(range(len(fams)), sample))
        for i in idx:
            tag, maps, F = fams[i]
            p = unstraighten(F).p1
            q = FinFunctor(p.source, ab, p.obj, p.mor)
            out.append(TwoVarFib.from_functor(q, a, b, f"cov:{ab.name}:{tag}:{sorted(maps.items())}"))
    return out


def small_posets() -> list[FinCat]:
    """Every poset on at most three elements, up to isomorphism."""
    out = [walking(0), walking(1), discrete(["a", "b"]), walking(2),
           poset("abc", [("a", "b"), ("a", "c")]), poset("abc", [("b", "a"), ("c", "a")]),
           poset("abc", [("a", "b")]), discrete(["a", "b", "c"])]
    return out


def functor_corpus() -> list[TwoVarFib]:
    """Every monotone map from a poset with at most three elements into
    [1] x [1]; most are not fibrations of any kind."""
    a, b = walking(1), walking(1)
    ab = product(a, b)
    out = []
    for k, e in enumerate(small_posets()):
        for img in _monotone_maps(e, ab):
            p = thin_functor(e, ab, img)
            out.append(TwoVarFib.from_functor(p, a, b, f"map:{k}:{img}"))
    return out


def fibration_corpus() -> list[TwoVarFib]:
    return bundled_fibrations() + one_variable_corpus() + two_variable_corpus() + functor_corpus()


def corpus_categories() -> list[FinCat]:
    """Categories used for Ar, Tw and localisation checks."""
    out = [walking(0), walking(1), walking(2), *small_bases()[3:], square(),
           discrete(["a", "b"])]
    from .fincat import group_cat
    out.append(group_cat(2))
    return out
