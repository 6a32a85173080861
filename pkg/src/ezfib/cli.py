"""Command line front end.

Exit status: 0 pass, 1 checked failure (with witness), 2 usage or parse
error, 3 boundary-limited.  Reports are plain text with a fixed field
order; ``--timing`` appends an uncertified footer.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import homotopy, lifting, minimal, shape, universe
from .io import (
    FunctorialityError,
    NaturalityError,
    ParseError,
    format_morphism,
    format_presheaf,
    parse_morphism,
    parse_presheaf,
)
from .presheaf import (
    PresheafError,
    identity_map,
    terminal_map,
    truncate,
    truncate_map,
    yoneda_map,
)

EXIT = {lifting.PASS: 0, lifting.FAIL: 1, lifting.LIMITED: 3}


class UsageError(Exception):
    pass


class Report:
    def __init__(self, verb: str, inputs: list[str]):
        self.verb = verb
        self.inputs = inputs
        self.truncation = None
        self.lines: list[str] = []
        self.status = 0

    def add(self, *lines: str):
        self.lines.extend(lines)

    def verdict(self, name: str, v: lifting.Verdict):
        self.add(f"{name}: {v.status}")
        if v.witness is not None:
            self.add(f"  witness: {v.witness}")
        self.add(*(f"  note: {n}" for n in v.notes))
        self.merge(EXIT[v.status])

    def merge(self, code: int):
        # a failure outranks a boundary-limited verdict, which outranks a pass
        rank = {0: 0, 3: 1, 1: 2, 2: 3}
        if rank[code] > rank[self.status]:
            self.status = code

    def certificate(self, cert: minimal.Certificate):
        for name, v in cert.items:
            self.verdict(name, v)

    def text(self) -> str:
        head = [f"verb: {self.verb}", "inputs: " + " ".join(self.inputs)]
        if self.truncation is not None:
            head.append(f"truncation: {self.truncation}")
        return "\n".join(head + self.lines + [f"status: {self.status}"]) + "\n"


# -- loading -------------------------------------------------------------------------

def _load(path: str, args, cache: dict):
    """Parse a ``.psh`` or ``.map`` file, applying shape and truncation flags."""
    key = os.path.abspath(path)
    if key in cache:
        return cache[key]
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if path.endswith(".map"):
        base = os.path.dirname(path)
        obj = parse_morphism(text, path, lambda rel: _load(os.path.join(base, rel), args, cache)).morphism
        X = obj.source
    else:
        obj = parse_presheaf(text, path)
        X = obj
    if args.shape and X.kind != args.shape:
        raise UsageError(f"{path} has shape {X.kind}, expected {args.shape}")
    if args.truncation is not None and args.truncation != X.N:
        obj = truncate_map(obj, args.truncation) if path.endswith(".map") else truncate(obj, args.truncation)
    cache[key] = obj
    return obj


def _as_map(obj):
    return obj if hasattr(obj, "levels") else terminal_map(obj)


def _sizes(X) -> str:
    return " ".join(str(X.size(d)) for d in range(X.N + 1))


def _write_outputs(args, report: Report, presheaves: dict, maps: dict):
    """Write ``name.psh`` / ``name.map`` files under ``--out``."""
    if not args.out:
        return
    os.makedirs(args.out, exist_ok=True)
    for name, X in presheaves.items():
        with open(os.path.join(args.out, f"{name}.psh"), "w", encoding="utf-8") as fh:
            fh.write(format_presheaf(X))
        report.add(f"wrote: {name}.psh")
    for name, (f, src, tgt) in maps.items():
        with open(os.path.join(args.out, f"{name}.map"), "w", encoding="utf-8") as fh:
            fh.write(format_morphism(f, f"{src}.psh", f"{tgt}.psh"))
        report.add(f"wrote: {name}.map")


# -- verbs ---------------------------------------------------------------------------

def cmd_validate(args, r, load):
    try:
        obj = load(args.inputs[0])
    except (FunctorialityError, NaturalityError) as exc:
        r.add("functoriality: fail", f"  witness: {exc}")
        r.status = 1
        return
    X = obj.source if hasattr(obj, "levels") else obj
    r.truncation = X.N
    r.add(f"shape: {X.kind}", f"sections: {_sizes(X)}",
          "nondegenerate: " + " ".join(str(len(X.nondegenerate(d))) for d in range(X.N + 1)),
          "functoriality: pass")
    if hasattr(obj, "levels"):
        r.add("naturality: pass", f"target sections: {_sizes(obj.target)}")


def cmd_check_fib(args, r, load, family="anodynes"):
    p = _as_map(load(args.inputs[0]))
    r.truncation = p.source.N
    fam = lifting.GeneratingFamily(family, p.source.N)
    v = lifting.has_rlp(p, fam)
    r.verdict("fibration" if family == "anodynes" else "trivial fibration", v)
    if v.status == lifting.FAIL and args.out:
        _write_square(args, r, p, fam, v.witness)


def _write_square(args, r, p, fam, square):
    """Serialize an unsolved square: generator, top and bottom maps."""
    gen = next(g for g in fam.members(p.source.kind, p.source.N) if g.name == square.generator)
    for sq, top, y in lifting.unsolved_squares(p, gen)[0]:
        K, inc = gen.sub.to_presheaf()
        bottom = yoneda_map(p.target, gen.dim, y)
        _write_outputs(args, r, {"witness-domain": K, "witness-cell": inc.target,
                                 "source": p.source, "target": p.target},
                       {"witness-generator": (inc, "witness-domain", "witness-cell"),
                        "witness-top": (top, "witness-domain", "source"),
                        "witness-bottom": (bottom, "witness-cell", "target")})


def cmd_factor(args, r, load):
    p = _as_map(load(args.inputs[0]))
    r.truncation = p.source.N
    fam = lifting.GeneratingFamily(args.family, p.source.N)
    res = lifting.bounded_soa_factorize(p, fam, args.budget)
    r.add(*res.lines())
    if not res.success:
        r.status = 1
        return
    r.add(f"middle sections: {_sizes(res.j.target)}")
    _write_outputs(args, r, {"source": p.source, "middle": res.j.target, "target": p.target},
                   {"left": (res.j, "source", "middle"), "right": (res.q, "middle", "target")})


def cmd_bdeq(args, r, load):
    if len(args.inputs) not in (2, 4):
        raise UsageError("bdeq FILE DIM [ID ID]")
    obj = load(args.inputs[0])
    X, p = (obj.source, obj) if hasattr(obj, "levels") else (obj, None)
    r.truncation = X.N
    try:
        n = int(args.inputs[1])
    except ValueError:
        raise UsageError("dimension must be an integer") from None
    if not 0 <= n <= X.N:
        raise UsageError(f"dimension {n} outside 0..{X.N}")
    if len(args.inputs) == 4:
        try:
            x, y = X.index(n, args.inputs[2]), X.index(n, args.inputs[3])
        except (KeyError, PresheafError, ValueError):
            raise UsageError("unknown section id") from None
        v = homotopy.boundary_equivalent(X, n, x, y, p)
        r.verdict("boundary-equivalent", lifting.Verdict(v.status, None, v.notes, v.checked))
        if v.status == lifting.PASS and args.out:
            h = v.witness.h
            _write_outputs(args, r, {"cylinder": h.source, "input": X},
                           {"homotopy": (h, "cylinder", "input")})
        return
    part = homotopy.partition_by_boundary_equivalence(X, n, p)
    for b in part.blocks:
        r.add("block: " + " ".join(X.ids[n][j] for j in b))
    if not part.is_equivalence:
        status = lifting.FAIL
    else:
        status = lifting.LIMITED if part.limited else lifting.PASS
    r.verdict("equivalence relation", lifting.Verdict(status, None, part.notes if part.limited else []))


def cmd_weq(args, r, load):
    f = load(args.inputs[0])
    if not hasattr(f, "levels"):
        raise UsageError("weq needs a morphism file")
    r.truncation = f.source.N
    if len(args.inputs) == 3:
        p, q = load(args.inputs[1]), load(args.inputs[2])
        r.verdict("fiberwise weak equivalence", homotopy.is_weak_equivalence_fiberwise(f, p, q))
        return
    inv = homotopy.homotopy_inverse_search(f)
    if inv is None:
        r.verdict("homotopy equivalence", lifting.Verdict(lifting.FAIL, "no homotopy inverse exists"))
    else:
        r.verdict("homotopy equivalence", lifting.Verdict(lifting.PASS))
        g = inv.g.levels[0]
        r.add("inverse on vertices:" + "".join(
            f" {f.target.ids[0][k]}->{f.source.ids[0][g[k]]}" for k in range(len(g))))


def cmd_minimal_model(args, r, load):
    X = load(args.inputs[0])
    if hasattr(X, "levels"):
        raise UsageError("minimal-model needs a presheaf file; use min-factor for maps")
    r.truncation = X.N
    mm = minimal.minimal_model(X, order=args.order)
    r.add(f"model sections: {_sizes(mm.S)}",
          "model vertices: " + " ".join(mm.S.ids[0]))
    r.add(*(f"note: {n}" for n in mm.notes))
    r.certificate(minimal.certify_minimal_model(mm))
    _write_outputs(args, r, {"input": X, "model": mm.S},
                   {"inclusion": (mm.i, "model", "input"), "retraction": (mm.r, "input", "model")})


def cmd_min_factor(args, r, load):
    p = _as_map(load(args.inputs[0]))
    r.truncation = p.source.N
    fac = minimal.minimal_fibration_factorization(p, args.order)
    r.add(f"model sections: {_sizes(fac.S)}")
    r.certificate(minimal.certify_minimal_model(fac.model))
    r.verdict("q is a retract of p", fac.retract_diagram())
    _write_outputs(args, r, {"source": p.source, "model": fac.S, "base": p.target},
                   {"trivial": (fac.r, "source", "model"), "minimal": (fac.q, "model", "base")})


def _scenario(args, load):
    if len(args.inputs) != 4:
        raise UsageError(f"{args.verb} P0.map W.map J.map P1EXT.map")
    return [load(x) for x in args.inputs]


def cmd_glue(args, r, load):
    p0, w, j, p1_ext = _scenario(args, load)
    r.truncation = p0.source.N
    try:
        p1, i1, w1 = minimal.factor_through_pullback(p0, w, j, p1_ext)
        g = minimal.glue_equivalence_extension(p0, w1, p1, j, p1_ext, i1)
    except minimal.PreconditionError as exc:
        r.verdict("preconditions", lifting.Verdict(lifting.FAIL, str(exc)))
        return
    r.add(f"extended sections: {_sizes(g.p0_ext.source)}")
    r.certificate(g.certificate)
    _write_outputs(args, r, {"extended": g.p0_ext.source, "base": g.p0_ext.target,
                             "x0": p0.source, "x1": p1_ext.source},
                   {"extended-fibration": (g.p0_ext, "extended", "base"),
                    "extended-equivalence": (g.w_ext, "extended", "x1"),
                    "inclusion": (g.i0, "x0", "extended")})


def cmd_classify(args, r, load):
    p = _as_map(load(args.inputs[0]))
    r.truncation = p.source.N
    try:
        y = universe.hs_classify(p, args.kappa)
    except universe.KappaError as exc:
        r.verdict("kappa-small", lifting.Verdict(lifting.FAIL, str(exc)))
        return
    r.add(f"kappa: {args.kappa}")
    Y = p.target
    for d in range(Y.N + 1):
        for s in range(Y.size(d)):
            e = y.values[d][s]
            r.add(f"section {Y.ids[d][s]}: dim {e.dim}, global elements {e.global_sections()}, "
                  f"largest fiber {e.max_fiber()}")
    r.verdict("classifier is natural", lifting.Verdict(
        lifting.PASS if y.is_natural() else lifting.FAIL))
    r.verdict("values in the fibration part", y.membership())
    r.verdict("realization is isomorphic to the input", lifting.Verdict(
        lifting.PASS if universe.canonical_iso(p, args.kappa).is_iso() else lifting.FAIL))


def cmd_realize(args, r, load):
    p = _as_map(load(args.inputs[0]))
    r.truncation = p.source.N
    y = universe.hs_classify(p, args.kappa)
    R = universe.realize(y)
    iso = universe.canonical_iso(p, args.kappa)
    r.add(f"realized sections: {_sizes(R.source)}")
    r.verdict("canonical map is an isomorphism over the base", lifting.Verdict(
        lifting.PASS if iso.is_iso() and iso.is_natural() and iso.then(R) == p else lifting.FAIL))
    r.verdict("classifying the realization gives the classifier back", lifting.Verdict(
        lifting.PASS if universe.hs_classify(R, args.kappa) == y else lifting.FAIL))
    _write_outputs(args, r, {"realized": R.source, "base": R.target},
                   {"realized": (R, "realized", "base")})


def cmd_eq(args, r, load):
    if len(args.inputs) != 2:
        raise UsageError("eq P.map Q.map")
    p, q = (_as_map(load(x)) for x in args.inputs)
    r.truncation = p.source.N
    E = universe.eq_subobject(p, q)
    r.add(f"hom sections: {_sizes(E.hom.total)}",
          "equivalence sections: " + " ".join(str(len(k)) for k in E.sub.keep))
    r.verdict("closed under restriction", lifting.Verdict(
        lifting.PASS if E.is_action_closed() else lifting.FAIL))
    if E.is_action_closed():
        if p == q:
            s = universe.identity_section(p, E)
            ok = s.is_natural() and s.then(E.structure) == identity_map(p.target)
            r.verdict("identity section", lifting.Verdict(lifting.PASS if ok else lifting.FAIL))
        r.verdict("structure map is a fibration", lifting.is_fibration(E.structure))


def cmd_univalence(args, r, load):
    p0, e, j, p1_ext = _scenario(args, load)
    r.truncation = p0.source.N
    try:
        w = universe.univalence_from_maps(p0, e, j, p1_ext, args.kappa)
    except (minimal.PreconditionError, universe.KappaError) as exc:
        r.verdict("preconditions", lifting.Verdict(lifting.FAIL, str(exc)))
        return
    r.add(f"kappa: {args.kappa}")
    r.certificate(w.certificate)


def cmd_verify_ez(args, r, load):
    if len(args.inputs) != 2:
        raise UsageError("verify-ez KIND DIM")
    kind = args.inputs[0]
    if kind not in shape.KINDS:
        raise UsageError(f"unknown shape {kind!r}")
    try:
        n = int(args.inputs[1])
    except ValueError:
        raise UsageError("dimension must be an integer") from None
    rep = shape.verify_ez_axioms(kind, n)
    r.add(*rep.lines())
    r.merge(0 if rep.passed else 1)


def _report_one(path: str) -> list[str]:
    ns = argparse.Namespace(shape=None, truncation=None)
    try:
        obj = _load(path, ns, {})
    except (ParseError, PresheafError, UsageError) as exc:
        return [f"{os.path.basename(path)}: parse error: {exc}"]
    p = _as_map(obj)
    v = lifting.is_fibration(p)
    return [f"{os.path.basename(path)}: sections {_sizes(p.source)}; fibration {v.status}"]


def cmd_report(args, r, load):
    if len(args.inputs) != 1 or not os.path.isdir(args.inputs[0]):
        raise UsageError("report DIR")
    files = sorted(os.path.join(args.inputs[0], f) for f in os.listdir(args.inputs[0])
                   if f.endswith((".psh", ".map")))
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        for lines in pool.map(_report_one, files):
            r.add(*lines)
    if any("parse error" in line for line in r.lines):
        r.status = 2


VERBS = {
    "validate": (cmd_validate, "parse and check functoriality of a presheaf or morphism file"),
    "check-fib": (cmd_check_fib, "right lifting property against open boxes / horns"),
    "check-trivfib": (lambda a, r, l: cmd_check_fib(a, r, l, "cofibrations"),
                      "right lifting property against boundary inclusions"),
    "factor": (cmd_factor, "bounded small-object factorization"),
    "bdeq": (cmd_bdeq, "boundary-equivalence classes or a single pair"),
    "weq": (cmd_weq, "homotopy inverse search (or fiberwise over two structure maps)"),
    "minimal-model": (cmd_minimal_model, "minimal model with certificate"),
    "min-factor": (cmd_min_factor, "trivial fibration followed by a minimal fibration"),
    "glue": (cmd_glue, "extend a fiberwise equivalence along a mono"),
    "classify": (cmd_classify, "classifying map into the size-bounded universe"),
    "realize": (cmd_realize, "realize a classifier and compare with the input"),
    "eq": (cmd_eq, "relative hom and its equivalence subobject"),
    "univalence": (cmd_univalence, "extend a classifier-equivalence triple along a mono"),
    "verify-ez": (cmd_verify_ez, "exhaustive check of the EZ axioms"),
    "report": (cmd_report, "fibration summary for every file in a directory"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ezfib", description=__doc__.splitlines()[0])
    ap.add_argument("verb", choices=sorted(VERBS))
    ap.add_argument("inputs", nargs="*")
    ap.add_argument("--truncation", type=int, help="lower the truncation of every input")
    ap.add_argument("--kappa", type=int, default=universe.DEFAULT_KAPPA)
    ap.add_argument("--budget", type=int, default=3)
    ap.add_argument("--family", choices=("anodynes", "cofibrations"), default="anodynes")
    ap.add_argument("--shape", choices=shape.KINDS)
    ap.add_argument("--order", choices=("least", "greatest"), default="least")
    ap.add_argument("--out", help="directory for output files")
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--timing", action="store_true", help="append elapsed time")
    return ap


def run(argv: list[str]) -> tuple[str, int]:
    """Run one command; returns the report text and the exit status."""
    ap = build_parser()
    try:
        args = ap.parse_intermixed_args(argv)
    except SystemExit as exc:
        return "", 2 if exc.code else 0
    r = Report(args.verb, args.inputs)
    cache: dict = {}
    start = time.perf_counter()
    try:
        VERBS[args.verb][0](args, r, lambda path: _load(path, args, cache))
    except (ParseError, UsageError, PresheafError) as exc:
        r.add(f"error: {exc}")
        r.status = 2
    except (minimal.InvariantViolation, universe.KappaError) as exc:
        r.add(f"error: {exc}")
        r.status = 1
    except IndexError:
        r.add("error: missing input file")
        r.status = 2
    text = r.text()
    if args.timing:
        text += f"-- elapsed {time.perf_counter() - start:.3f}s\n"
    return text, r.status


def main(argv: list[str] | None = None) -> int:
    text, status = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
