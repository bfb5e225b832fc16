"""Command-line front end."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import corpus as K
from . import suites as S
from .errors import BadInput, CapExceeded, FibcalcError, NotAFibration, SearchCapExceeded, UsageError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3
SCHEMA_VERSION = 1
COMMANDS = ("classify", "straighten", "dualize", "mate", "unit", "gray", "scaling", "verify")


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    caps: tuple = (16, 200)
    suites: tuple = ()
    format: str = "text"
    jobs: int = 1
    strict: bool = False
    timings: bool = False
    options: dict = field(default_factory=dict)


@dataclass
class Report:
    records: list = field(default_factory=list)
    result: object = None

    @property
    def failed(self) -> bool:
        return any(r.status == S.FAIL for r in self.records)


def env_caps(default=(16, 200)) -> tuple:
    """Object and morphism caps from FIBCALC_CAPS ("objs,mors[,gray]")."""
    raw = os.environ.get("FIBCALC_CAPS", "").strip()
    if not raw:
        return default
    parts = [p.strip() for p in raw.replace(";", ",").split(",") if p.strip()]
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"FIBCALC_CAPS must be integers, got {raw!r}") from None
    if len(vals) < 2 or any(v <= 0 for v in vals):
        raise UsageError("FIBCALC_CAPS needs at least two positive entries")
    return tuple(vals[:2])


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fibcalc", description="Fibration calculus on finite categories.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--strict", action="store_true", help="treat informational records as failures")
    common.add_argument("--timings", action="store_true", help="include wall times in records")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="fibration taxonomy of a functor")
    p.add_argument("--fib", required=True, help="fibration JSON file or bundled name")

    p = sub.add_parser("straighten", parents=[common], help="straighten over one factor")
    p.add_argument("--fib", required=True)
    p.add_argument("--variance", choices=("covariant", "contravariant"), default="covariant")
    p.add_argument("--side", choices=("A", "B"), default="A")

    p = sub.add_parser("dualize", parents=[common], help="dualise over one factor")
    p.add_argument("--fib", required=True)
    p.add_argument("--side", choices=("A", "B"), default="A")
    p.add_argument("--direction", choices=("ct", "cc"), default="ct")

    for name, text in (("mate", "parametrised left adjoint and mates"), ("unit", "parametrised unit")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--case", help="JSON with source, target fibrations and g; default bundled example")

    p = sub.add_parser("gray", parents=[common], help="the strict 2-category [m] x [n]")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)

    p = sub.add_parser("scaling", parents=[common], help="Gray scaling of two nerves")
    p.add_argument("--left", help="poset JSON; default [1]")
    p.add_argument("--right", help="poset JSON; default [1]")
    p.add_argument("--flat-left", action="store_true", help="scale only degenerate triangles")
    p.add_argument("--flat-right", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", action="append", help="suite name or all; repeatable")
    p.add_argument("--base", help="base category JSON for the mate suites")
    p.add_argument("--jobs", type=int, default=1)
    return ap


def parse_args(argv) -> RunConfig:
    ap = _parser()
    ns = ap.parse_args(argv)
    cfg = RunConfig(ns.command, format=ns.format, strict=ns.strict, timings=ns.timings)
    cfg.caps = env_caps()
    if ns.command in ("classify", "straighten", "dualize"):
        cfg.inputs["fib"] = ns.fib
    if ns.command == "straighten":
        cfg.options.update(variance=ns.variance, side=ns.side)
    if ns.command == "dualize":
        cfg.options.update(side=ns.side, direction=ns.direction)
    if ns.command in ("mate", "unit") and ns.case:
        cfg.inputs["case"] = ns.case
    if ns.command == "gray":
        if ns.m < 0 or ns.n < 0:
            raise UsageError("m and n must be non-negative")
        cfg.options.update(m=ns.m, n=ns.n)
    if ns.command == "scaling":
        cfg.inputs.update({k: v for k, v in (("left", ns.left), ("right", ns.right)) if v})
        cfg.options.update(flat_left=ns.flat_left, flat_right=ns.flat_right)
    if ns.command == "verify":
        names = ns.suite or ["all"]
        for n in names:
            if n != "all" and n not in S.SUITES:
                raise UsageError(f"unknown suite {n!r}; choose from all, {', '.join(S.SUITES)}")
        cfg.suites = tuple(S.SUITES) if "all" in names else tuple(dict.fromkeys(names))
        if ns.jobs < 1:
            raise UsageError("--jobs must be positive")
        cfg.jobs = ns.jobs
        if ns.base:
            cfg.inputs["base"] = ns.base
    return cfg


# ------------------------------------------------------------------ commands


def _rec(suite, anchor, check, ok, witness=None, informational=False, cases=1):
    status = S.PASS if ok else (S.INFO if informational else S.FAIL)
    return S.Record(suite, anchor, check, status, cases, None if ok else witness)


def _classify(cfg: RunConfig) -> Report:
    from .fibclass import classify, cross_check
    p = K.load_fib(cfg.inputs["fib"])
    tx = classify(p)
    recs = [S.Record("classify", "classify/flag", name, S.INFO, 1,
                     {"value": tx.flags[name], "witness": tx.witnesses.get(name)})
            for name in sorted(tx.flags)]
    for r in cross_check(p, tx):
        recs.append(_rec("classify", "classify/cross-check", r.name, r.agree, r.values))
    return Report(recs, {"fibration": p.name, "flags": {k: tx.flags[k] for k in sorted(tx.flags)}})


def _straighten(cfg: RunConfig) -> Report:
    from .grothendieck import straighten
    p = K.load_fib(cfg.inputs["fib"])
    F = straighten(p, cfg.options["variance"], cfg.options["side"])
    return Report([_rec("straighten", "straighten/coherence", "pseudofunctor valid", True)], F.to_json())


# (flag, checked on the factor-swapped output)
OUTPUT_FLAG = {("A", "ct"): ("curved_ortho", False), ("A", "cc"): ("gray", False),
               ("B", "ct"): ("op_gray", True), ("B", "cc"): ("curved_ortho", False)}


def _dualize(cfg: RunConfig) -> Report:
    from .fibclass import classify, fib_to_json
    from .grothendieck import dualize, fibre_identity
    p = K.load_fib(cfg.inputs["fib"])
    side, direction = cfg.options["side"], cfg.options["direction"]
    d = dualize(p, side, direction)
    want, swapped = OUTPUT_FLAG[(side, direction)]
    tx = classify(d.swap() if swapped else d)
    recs = [_rec("dualize", "dualise/fibres", "fibres preserved by identifiers", fibre_identity(p, d)),
            _rec("dualize", "dualise/output", f"output is {'swapped ' if swapped else ''}{want}", tx.flags[want], tx.witnesses.get(want))]
    return Report(recs, fib_to_json(d))


def _load_case(cfg: RunConfig):
    if "case" not in cfg.inputs:
        return K.mate_example()
    return K.load_mate_case(cfg.inputs["case"])


def _mate(cfg: RunConfig) -> Report:
    from . import mates as M
    from .fincat import label_str
    c = _load_case(cfg)
    flag, _, wit = M.is_param_right_adjoint(c.g, c.pc, c.pd)
    if not flag:
        return Report([_rec("mate", "mates/detect", "fibrewise right adjoint", False, {"fibre": wit})])
    pa = M.adj(c.g, c.pc, c.pd)
    r = M.verify_mate(pa)
    recs = []
    for row in r["rows"]:
        for k, v in row.items():
            if k != "morphism":
                recs.append(_rec("mate", "mates/beck-chevalley", f"{k} at {label_str(row['morphism'])}", v))
    recs.append(_rec("mate", "mates/pipeline-vs-stitched", "pipeline matches fibrewise oracle",
                     bool(M.adj_oracle_check(pa))))
    recs.append(_rec("mate", "mates/involution", "adj twice is the identity", bool(M.involution_check(pa))))
    return Report(recs, pa.to_json())


def _unit(cfg: RunConfig) -> Report:
    from . import mates as M
    c = _load_case(cfg)
    pa = M.adj(c.g, c.pc, c.pd)
    pu = M.ParamUnit(pa)
    recs = [_rec("unit", "unit/report", k, bool(v)) for k, v in pu.report().items()]
    ci = M.conjugation_identities(pa)
    recs.append(_rec("unit", "unit/conjugation", "conjugation identities", ci["failures"] == 0, ci,
                     cases=ci["checked"]))
    return Report(recs, pu.to_json())


def _gray(cfg: RunConfig) -> Report:
    from . import graytensor as G
    m, n = cfg.options["m"], cfg.options["n"]
    s = G.gray_simplices(m, n)
    recs = [_rec("gray", "gray/strict-2-category", k, v) for k, v in s.check().items()]
    return Report(recs, s.to_json())


def _scaling(cfg: RunConfig) -> Report:
    from . import graytensor as G
    from .fincat import walking
    cats = [K.load_cat(cfg.inputs[k]) if k in cfg.inputs else walking(1) for k in ("left", "right")]
    for c in cats:
        if not c.is_thin():
            raise BadInput("scaling needs posets")
    x = G.nerve(cats[0], sharp=not cfg.options["flat_left"])
    y = G.nerve(cats[1], sharp=not cfg.options["flat_right"])
    rep = G.gray_scaling_report(x, y)
    recs = [_rec("scaling", "gray/scaling", k, v) for k, v in rep.items() if isinstance(v, bool)]
    recs.append(S.Record("scaling", "gray/scaling", "nondegenerate scaled", S.INFO, 1,
                         {"nondegenerate": rep["nondegenerate"], "scaled": rep["nondegenerate_scaled"]}))
    return Report(recs, G.gray_scaling(x, y).to_json())


def _suite_job(args):
    name, opts = args
    if opts.get("base_json") is not None:
        from .fincat import from_json
        b = from_json(opts["base_json"])
        b.name = opts.get("base_name", "")
        opts = {**opts, "base_key": S.register_base(b)}
    return S.run_suite(name, opts)


def _verify(cfg: RunConfig) -> Report:
    opts = {"caps": cfg.caps, "strict": cfg.strict}
    if "base" in cfg.inputs:
        b = K.load_cat(cfg.inputs["base"])
        opts["base_json"] = b.to_json()
        opts["base_name"] = b.name
    jobs = [(name, opts) for name in cfg.suites]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_suite_job, jobs))
    else:
        results = [_suite_job(j) for j in jobs]
    return Report(S.normalise([r for rs in results for r in rs]))


HANDLERS = {"classify": _classify, "straighten": _straighten, "dualize": _dualize, "mate": _mate,
            "unit": _unit, "gray": _gray, "scaling": _scaling, "verify": _verify}


def run(cfg: RunConfig) -> Report:
    rep = HANDLERS[cfg.command](cfg)
    if cfg.strict:
        for r in rep.records:
            if r.status == S.INFO and r.witness is not None and r.anchor in STRICT_ANCHORS:
                r.status = S.FAIL
    return rep


# informational records that --strict promotes when they carry a failure
STRICT_ANCHORS = {"dualise/square", "localise/reflective"}


def emit(rep: Report, fmt: str = "json", timings: bool = False) -> bytes:
    """Report bytes without a trailing newline.  JSON is compact with the
    version first and every nested object key-sorted."""
    if fmt == "json":
        dump = lambda x: json.dumps(x, sort_keys=True, separators=(",", ":"))
        recs = ",".join(dump(r.to_json(timings)) for r in rep.records)
        out = f'{{"version":{SCHEMA_VERSION},"records":[{recs}]'
        if rep.result is not None:
            out += f',"result":{dump(S._plain(rep.result))}'
        return (out + "}").encode()
    lines = []
    for r in rep.records:
        line = f"{r.status.upper():4} {r.suite}: {r.check} [{r.anchor}] cases={r.cases}"
        if timings:
            line += f" {r.seconds:.2f}s"
        if r.witness is not None:
            line += f" :: {json.dumps(S._plain(r.witness), sort_keys=True)}"
        lines.append(line)
    if rep.result is not None and not rep.records:
        lines.append(json.dumps(S._plain(rep.result), sort_keys=True))
    n_fail = sum(r.status == S.FAIL for r in rep.records)
    lines.append(f"{len(rep.records)} records, {n_fail} failing")
    return "\n".join(lines).encode()


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:          # argparse usage errors
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    except UsageError as exc:
        print(f"fibcalc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rep = run(cfg)
    except (BadInput, CapExceeded, SearchCapExceeded) as exc:
        print(f"fibcalc: bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotAFibration as exc:
        rep = Report([S.Record(cfg.command, "plumbing", "input meets the precondition", S.FAIL, 1,
                               {"error": str(exc), "witness": exc.witness})])
    except UsageError as exc:
        print(f"fibcalc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FibcalcError as exc:
        rep = Report([S.Record(cfg.command, "plumbing", "internal consistency", S.FAIL, 1,
                               {"error": type(exc).__name__, "detail": str(exc)})])
    sys.stdout.buffer.write(emit(rep, cfg.format, cfg.timings) + b"\n")
    sys.stdout.flush()
    return EXIT_FAIL if rep.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
