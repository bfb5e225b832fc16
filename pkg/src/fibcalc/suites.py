"""Named verification suites.  Each suite returns a list of records; a
record fails only when its status is "fail"."""
from __future__ import annotations

import functools
import time
from dataclasses import dataclass, field

from . import corpus as K
from . import graytensor as G
from . import mates as M
from .errors import FibcalcError, SearchCapExceeded
from .fibclass import classify, cross_check
from .fincat import FinCat, thin_functor, product, walking
from .grothendieck import (
    CONTRA,
    COV,
    dualize,
    fib_equivalent,
    fibre_identity,
    reindex_base,
    round_trip,
    square_comparison,
)
from .twistfree import ar_tw_duality, tw_localisation

PASS, FAIL, INFO = "pass", "fail", "info"


@dataclass
class Record:
    suite: str
    anchor: str
    check: str
    status: str
    cases: int = 0
    witness: object = None
    seconds: float = field(default=0.0, compare=False)

    def to_json(self, timings: bool = False) -> dict:
        out = {"suite": self.suite, "anchor": self.anchor, "check": self.check,
               "status": self.status, "cases": self.cases, "witness": _plain(self.witness)}
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


def _plain(x):
    """JSON-safe copy with tuples as lists and numpy scalars as ints."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "item"):
        return x.item()
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


class _Tally:
    """Counts cases for one check and keeps the first failing witness."""

    def __init__(self, suite: str, anchor: str, check: str, informational: bool = False):
        self.suite, self.anchor, self.check = suite, anchor, check
        self.informational = informational
        self.cases = 0
        self.bad = 0
        self.witness = None
        self.t0 = time.perf_counter()

    def add(self, ok: bool, witness=None) -> None:
        self.cases += 1
        if not ok:
            self.bad += 1
            if self.witness is None:
                self.witness = witness
        return ok

    def record(self) -> Record:
        if self.bad == 0:
            status = PASS
        else:
            status = INFO if self.informational else FAIL
        wit = None if self.bad == 0 else {"failures": self.bad, "first": self.witness}
        return Record(self.suite, self.anchor, self.check, status, self.cases, wit,
                      time.perf_counter() - self.t0)


# ------------------------------------------------------------------ corpora


@functools.lru_cache(maxsize=None)
def fibrations():
    """The fibration corpus with its taxonomies."""
    base = K.fibration_corpus()
    out = [(p, classify(p)) for p in base]
    for p, tx in list(out):
        if tx.gray and p.base_b.n_obj > 1:
            d = dualize(p, "A", "ct", check=False)
            out.append((d, classify(d)))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def param_adjunctions(base_key: str | None = None):
    if base_key is None:
        cases = K.mate_cases()
    else:
        cases = K.mate_cases_for_base(_BASES[base_key])
    return tuple((c, M.adj(c.g, c.pc, c.pd)) for c in cases)


_BASES: dict[str, FinCat] = {}


def register_base(b: FinCat) -> str:
    key = f"{b.name}:{b.objects}:{b.morphisms}"
    _BASES[key] = b
    return key


# ------------------------------------------------------------------ suites


def taxonomy(opts) -> list[Record]:
    t = time.perf_counter()
    implications = [
        ("bifib implies ortho", lambda f: not f["bifib"] or f["ortho"]),
        ("ortho implies curved ortho", lambda f: not f["ortho"] or f["curved_ortho"]),
        ("cocartesian implies gray", lambda f: not f["cocartesian_fib"] or f["gray"]),
        ("gray implies locally cocartesian", lambda f: not f["gray"] or f["locally_cocartesian_fib"]),
        ("left iff cocartesian and conservative",
         lambda f: f["left_fib"] == (f["cocartesian_fib"] and f["conservative"])),
    ]
    tallies = [_Tally("taxonomy", "taxonomy/lattice", name) for name, _ in implications]
    for p, tx in fibrations():
        for (name, rule), tl in zip(implications, tallies):
            tl.add(rule(tx.flags), p.name)
    out = [tl.record() for tl in tallies]
    out.append(Record("taxonomy", "taxonomy/lattice", "classified", PASS, len(fibrations()),
                      None, time.perf_counter() - t))
    return out


def roundtrip(opts) -> list[Record]:
    caps = opts.get("caps", (16, 200))
    out = []
    for variance, flag in ((COV, "cocart_over_A"), (CONTRA, "cart_over_A")):
        tl = _Tally("roundtrip", "straighten/round-trip", f"{variance} over A")
        for p, tx in fibrations():
            if not tx.flags[flag]:
                continue
            try:
                _, w = round_trip(p, variance, "A", caps)
                tl.add(w is not None, p.name)
            except SearchCapExceeded:
                tl.add(False, f"{p.name}: cap")
        out.append(tl.record())
    return out


def dualisation(opts) -> list[Record]:
    caps = opts.get("caps", (16, 200))
    inv = _Tally("dualisation", "dualise/involution", "cc after ct and ct after cc")
    fib = _Tally("dualisation", "dualise/fibres", "fibres preserved by identifiers")
    for p, tx in fibrations():
        for flag, first, second, kinds in (("gray", "ct", "cc", ("l_cocart", "r_cocart")),
                                           ("curved_ortho", "cc", "ct", ("l_cart", "r_cocart"))):
            if not tx.flags[flag]:
                continue
            d = dualize(p, "A", first)
            fib.add(fibre_identity(p, d), p.name)
            back = reindex_base(dualize(d, "A", second), p.base_a, p.base_b)
            try:
                inv.add(fib_equivalent(p, back, kinds, caps) is not None, p.name)
            except SearchCapExceeded:
                inv.add(False, f"{p.name}: cap")
    return [inv.record(), fib.record()]


def artw(opts) -> list[Record]:
    tl = _Tally("artw", "dualise/arrow-twisted", "Ar dualises to Tw")
    for c in K.corpus_categories():
        if c.n_obj > 4:
            continue
        r = ar_tw_duality(c)
        tl.add(all(r.values()), {"category": c.name or str(c.objects), "result": r})
    return [tl.record()]


def criteria(opts) -> list[Record]:
    tallies: dict[str, _Tally] = {}
    for p, tx in fibrations():
        for rec in cross_check(p, tx):
            tl = tallies.setdefault(rec.name, _Tally("criteria", "classify/cross-check", rec.name))
            tl.add(rec.agree, {"fibration": p.name, "values": rec.values})
    return [tallies[k].record() for k in sorted(tallies)]


def mates(opts) -> list[Record]:
    key = opts.get("base_key")
    mate = _Tally("mates", "mates/beck-chevalley", "lambda is the mate of rho and back")
    orc = _Tally("mates", "mates/pipeline-vs-stitched", "pipeline left adjoint matches fibrewise oracle")
    inv = _Tally("mates", "mates/involution", "adj twice is the identity")
    for c, pa in param_adjunctions(key):
        r = M.verify_mate(pa)
        mate.add(r["ok"], {"case": c.name, "rows": r["rows"]})
        orc.add(bool(M.adj_oracle_check(pa)), c.name)
        inv.add(bool(M.involution_check(pa)), c.name)
    out = [mate.record(), orc.record(), inv.record()]
    neg = K.non_adjoint_example()
    flag, _, wit = M.is_param_right_adjoint(neg.g, neg.pc, neg.pd)
    out.append(Record("mates", "mates/detect", "non-adjoint family rejected with witness",
                      PASS if (not flag and wit is not None) else FAIL, 1, None if not flag else wit))
    return out


def _heyting():
    p = K.heyting_chain()
    pp = product(p, p)
    f = thin_functor(pp, p, [min(x, b) for x in range(3) for b in range(3)])
    return M.two_var_adjoint(f, p, p)


def mapping(opts) -> list[Record]:
    key = opts.get("base_key")
    out = []
    t = time.perf_counter()
    r = _heyting()
    bij = all(a == b for a, b in r.bijection.values())
    ok = bij and r.natural and len(r.bijection) == 27
    out.append(Record("mapping", "mapping/heyting", "two-variable bijection natural on 27 triples",
                      PASS if ok else FAIL, len(r.bijection),
                      None if ok else {"bijection": bij, "natural": r.natural},
                      time.perf_counter() - t))
    tl = _Tally("mapping", "mapping/left-fibration-equivalence", "adjunct pullbacks equivalent")
    for c, pa in param_adjunctions(key):
        cp = M.corr_pullback_checks(pa)
        tl.add(bool(cp["left_fibrations"] and cp["adjunct_iso"] and cp["equivalence_found"]),
               {"case": c.name, "report": {k: v for k, v in cp.items() if k != "objects"}})
    out.append(tl.record())
    return out


def unit(opts) -> list[Record]:
    key = opts.get("base_key")
    res = _Tally("unit", "unit/fibre-restriction", "unit restricts to the fibre units")
    law = _Tally("unit", "unit/functorial", "unit functor, naturality and both formulas")
    cou = _Tally("unit", "unit/counit", "counit restricts and both formulas agree")
    conj = _Tally("unit", "unit/conjugation", "conjugation identities on composable pairs")
    adj = _Tally("unit", "unit/adjuncts", "adjunct map commutes and matches hom bijection")
    for c, pa in param_adjunctions(key):
        pu = M.ParamUnit(pa)
        rep = pu.report()
        res.add(rep["fibre_restriction"], c.name)
        law.add(all(v for k, v in rep.items() if k != "fibre_restriction"), {"case": c.name, "report": rep})
        cr = M.param_counit(pa)
        cou.add(cr["fibre_restriction"] and cr["two_formulas_agree"], c.name)
        if _has_composable_pair(c.base):
            ci = M.conjugation_identities(pa)
            conj.add(ci["failures"] == 0 and ci["checked"] > 0, {"case": c.name, **ci})
        _, _, commutes, _ = M.pass_to_adjoint(pa, pu)
        adj.add(bool(commutes and M.hom_bijection_oracle(pa, pu)), c.name)
    return [res.record(), law.record(), cou.record(), conj.record(), adj.record()]


def _has_composable_pair(b: FinCat) -> bool:
    non_id = [u for u in range(b.n_mor) if not b.is_identity(u)]
    return any(b.comp[v, u] >= 0 for v in non_id for u in non_id)


def gray(opts) -> list[Record]:
    out = []
    laws = _Tally("gray", "gray/strict-2-category", "strict 2-category laws for m, n <= 2")
    for m in range(3):
        for n in range(3):
            r = G.gray_simplices(m, n).check()
            laws.add(all(r.values()), {"m": m, "n": n, **r})
    out.append(laws.record())
    h = G.gray_simplices(1, 1).hom[("00", "11")]
    non_id = sum(1 for k in range(h.n_mor) if not h.is_identity(k))
    ok = h.n_obj == 2 and non_id == 1
    out.append(Record("gray", "gray/hom-count", "hom(00,11) of [1]x[1] has 2 objects, 1 arrow",
                      PASS if ok else FAIL, 1, None if ok else {"objects": h.n_obj, "arrows": non_id}))
    col = _Tally("gray", "gray/collapse", "collapse inverts exactly the vertical generators")
    for m in range(3):
        for n in range(3):
            r = G.collapse_report(G.collapse_to_delta2(m, n))
            col.add(r["two_functor"] and r["vertical_inverted"] and r["horizontal_kept"]
                    and r["certificates"], {"m": m, "n": n, **r})
    out.append(col.record())
    mx = _Tally("gray", "gray/max", "max monotone, marked to identities, surjective up to 3x3")
    for a in range(4):
        for b in range(4):
            pts = [(i, j) for i in range(a + 1) for j in range(b + 1)]
            for x in pts:
                for y in pts:
                    if x[0] <= y[0] and x[1] <= y[1]:
                        c = G.max_certificate(*G.chain_posets(a, b, x, y))
                        mx.add(c["ok"], {"grid": (a, b), "x": x, "y": y})
    out.append(mx.record())
    d1 = G.nerve(walking(1))
    sc = G.gray_scaling_report(d1, d1)
    ok = sc["nondegenerate"] == 2 and sc["nondegenerate_scaled"] == 1 and sc["predicate_agrees"] \
        and sc["degenerate_scaled"] and G.unit_check(d1)
    out.append(Record("gray", "gray/scaling", "square scales 1 of 2 nondegenerate triangles",
                      PASS if ok else FAIL, 1, None if ok else sc))
    cl = _Tally("gray", "gray/classifier", "triangle conditions agree with the gray flag")
    for p in [K.q_prime_fib(), G.non_gray_example()] + \
            [p for p, tx in fibrations() if tx.locally_cocartesian_fib and p.base_b.n_obj > 1]:
        r = G.loc_cocart_gray_classifier(p)
        cl.add(r["agrees_with_gray"] and r["closure_implied"], p.name)
    out.append(cl.record())
    ng = G.loc_cocart_gray_classifier(G.non_gray_example())
    ok = not ng["gray_flag"] and any(not ng[f"cond{i}"] for i in (1, 2, 3))
    out.append(Record("gray", "gray/counterexample", "locally cocartesian non-gray example detected",
                      PASS if ok else FAIL, 1, ng["witnesses"]))
    return out


def localisation(opts) -> list[Record]:
    strict = opts.get("strict", False)
    inv = _Tally("localisation", "localise/inverts", "t inverts the edges over identities")
    ref = _Tally("localisation", "localise/reflective", "t has a fully faithful adjoint",
                 informational=not strict)
    for c in K.corpus_categories():
        a, b = tw_localisation(c)
        name = c.name or str(c.objects)
        inv.add(a, name)
        ref.add(b, name)
    return [inv.record(), ref.record()]


def square(opts) -> list[Record]:
    strict = opts.get("strict", False)
    tl = _Tally("square", "dualise/square", "two-step dualisation matches one-step",
                informational=not strict)
    skipped = 0
    for p, tx in fibrations():
        if not (tx.cocartesian_fib and p.base_b.n_obj > 1):
            continue
        r = square_comparison(p, opts.get("caps", (16, 200)))
        if r["agree"] is None:
            skipped += 1
            continue
        tl.add(r["agree"], p.name)
    rec = tl.record()
    if skipped:
        rec.witness = {**(rec.witness or {}), "skipped_over_caps": skipped}
    return [rec]


SUITES = {
    "taxonomy": (1, taxonomy),
    "roundtrip": (2, roundtrip),
    "dualisation": (3, dualisation),
    "artw": (4, artw),
    "criteria": (5, criteria),
    "mates": (6, mates),
    "mapping": (7, mapping),
    "unit": (8, unit),
    "gray": (9, gray),
    "localisation": (10, localisation),
    "square": (11, square),
}


def run_suite(name: str, opts: dict | None = None) -> list[Record]:
    opts = opts or {}
    t = time.perf_counter()
    try:
        recs = SUITES[name][1](opts)
    except FibcalcError as exc:
        recs = [Record(name, "plumbing", "suite raised", FAIL, 0,
                       {"error": type(exc).__name__, "detail": str(exc)})]
    for r in recs:
        if r.seconds == 0.0:
            r.seconds = time.perf_counter() - t
    return recs


def normalise(records: list[Record]) -> list[Record]:
    order = {n: i for i, n in enumerate(SUITES)}
    return sorted(records, key=lambda r: (order.get(r.suite, 99), r.anchor, r.check))
