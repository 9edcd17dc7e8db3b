"""Command line front end.

Exit status: 0 on success or a passing check, 1 when a check fails
(invalid input polytope or map, no certificate, failed construction),
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import io
from .charmap import CharMap, singularity_order, validate_rchar
from .constructions import (
    WedgeParams,
    blowdown,
    blowup,
    k_wedge,
    k_wedge_char,
    restrict_char,
    wedge_char_on_product,
)
from .errors import (
    CharMapError,
    ConstructionError,
    PolytopeError,
    QTorsionError,
    RestrictionError,
    SchemaError,
)
from .polytope import CombinatorialPolytope, face_counts, face_from_facets, product_with_simplex, validate
from .retraction import (
    enumerate_retractions,
    find_p_clean_retraction,
    retraction_from_order,
    singularity_trace,
)
from .simplicial import SimplicialError, dual_of_polytope, simplicial_k_wedge
from .torsion import (
    all_prime_scan,
    blowdown_torsion_check,
    check_plain,
    kwedge_torsion_check,
    plain_prime_scan,
)

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


# ----------------------------------------------------------------------------
# rendering

def _table(headers, rows) -> str:
    cells = [list(map(str, headers))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_sequence(seq, trace=None) -> str:
    P = seq.polytope
    rows = []
    for i, s in enumerate(seq.steps):
        row = [i + 1, P.vertex_label(s.vertex), s.max_face.label(P), s.max_face.dim]
        if trace is not None:
            row.append(trace[i])
        rows.append(row)
    headers = ["step", "vertex", "face", "dim"] + (["order"] if trace is not None else [])
    return _table(headers, rows)


def render_certificate(cert) -> str:
    p = cert.prime
    out = [f"prime {p}  kind {cert.kind}  conclusion {cert.conclusion}"]
    if cert.source is not None and cert.source.sequence is not None:
        tr = cert.source.trace
        bad = [x for x in tr if x % p == 0]
        out.append(f"A1 {'pass' if not bad else 'fail'}: source trace {list(tr)}")
    if cert.kind == "blowdown" and cert.a2 is not None:
        a2 = cert.a2
        if a2.combination is None:
            out.append(f"A2 fail: {a2.reason}")
        else:
            comb = a2.combination
            P = cert.source.polytope
            terms = " + ".join(f"({c})*{P.facet_names[g]}" for g, c in zip(comb.combo, comb.coeffs))
            out.append(f"A2 {'pass' if a2.passed else 'fail'}: {P.facet_names[comb.target]} = {terms}"
                       f"  gcd(den, p) = {list(a2.gcds)}")
    if cert.d_values:
        d = ", ".join(f"d_{t + 1}={v} (gcd {g})" for (t, v), g in
                      zip(sorted(cert.d_values.items()), [cert.a3_gcds[t] for t in sorted(cert.d_values)]))
        ok = all(g == 1 for g in cert.a3_gcds.values())
        out.append(f"A3 {'pass' if ok else 'fail'}: {d}")
    if cert.stage:
        out.append(f"failed at {cert.stage}: {cert.reason}")
    if cert.sequence is not None:
        out.append(render_sequence(cert.sequence, cert.trace))
    return "\n".join(out)


def _emit(args, text: str, data) -> None:
    if args.format == "json":
        sys.stdout.write(io.dump_json(data))
    else:
        print(text)


# ----------------------------------------------------------------------------
# argument helpers

def _load(args, need_valid=True, need_char=False):
    P, lam = io.load_polytope(args.input)
    if need_valid:
        rep = validate(P)
        if not rep:
            raise CheckFailed(f"invalid polytope ({rep.violation}): {rep.message}")
    if need_char:
        if lam is None:
            raise UsageError("input has no 'char' entry")
        rep = validate_rchar(P, lam)
        if not rep:
            raise CheckFailed(f"invalid characteristic map: {rep.message}")
    return P, lam


def _facet(P: CombinatorialPolytope, name: Optional[str], flag="--facet") -> int:
    if name is None:
        raise UsageError(f"{flag} is required")
    if name not in P.facet_names:
        raise UsageError(f"unknown facet {name!r}")
    return P.facet_index(name)


def _face(P: CombinatorialPolytope, spec: Optional[str]):
    if spec is None:
        raise UsageError("--face is required")
    names = [s.strip() for s in spec.split(",") if s.strip()]
    for n in names:
        if n not in P.facet_names:
            raise UsageError(f"unknown facet {n!r} in --face")
    F = face_from_facets(P, [P.facet_index(n) for n in names])
    if F is None:
        raise CheckFailed(f"facets {spec} do not meet")
    return F


def _vertices(P: CombinatorialPolytope, spec: Optional[str]) -> list:
    if not spec:
        return []
    out = []
    for tok in spec.split(","):
        tok = tok.strip()
        try:
            out.append(P.vertex_index(tok))
        except (PolytopeError, ValueError):
            raise UsageError(f"unknown vertex {tok!r}") from None
    return out


def _write(args, data) -> None:
    if args.output:
        io.dump_json(data, args.output)


# ----------------------------------------------------------------------------
# verbs

def cmd_validate(args) -> int:
    P, lam = _load(args, need_valid=False)
    rep = validate(P)
    lines = [f"polytope: {'ok' if rep else 'FAIL'}" + ("" if rep else f" ({rep.violation}) {rep.message}")]
    data = {"polytope": {"ok": rep.ok, "violation": rep.violation, "message": rep.message}}
    ok = rep.ok
    if lam is not None and rep:
        crep = validate_rchar(P, lam)
        lines.append(f"char: {'ok' if crep else 'FAIL ' + crep.message}")
        data["char"] = {"ok": crep.ok, "message": crep.message}
        ok = ok and crep.ok
    _emit(args, "\n".join(lines), data)
    return OK if ok else FAIL


def cmd_info(args) -> int:
    P, lam = _load(args, need_valid=True)
    counts = face_counts(P)
    rows = []
    for v in range(P.n_vertices):
        row = [P.vertex_name(v), P.vertex_label(v)]
        if lam is not None:
            row.append(singularity_order(P, lam, v))
        rows.append(row)
    text = (f"dimension {P.dim}, {P.n_facets} facets, {P.n_vertices} vertices\n"
            f"f-vector {list(counts)}\n"
            + _table(["vertex", "facets"] + (["order"] if lam is not None else []), rows))
    data = {"dim": P.dim, "facets": list(P.facet_names), "f_vector": list(counts),
            "vertices": [{"name": r[0], "facets": r[1].split("^"),
                          **({"order": r[2]} if lam is not None else {})} for r in rows]}
    _emit(args, text, data)
    return OK


def cmd_product(args) -> int:
    P, lam = _load(args)
    out = product_with_simplex(P, args.k)
    lo = None
    if lam is not None and args.facet is not None:
        if not validate_rchar(P, lam):
            raise CheckFailed("invalid characteristic map")
        lo = wedge_char_on_product(P, lam, _facet(P, args.facet), WedgeParams(args.k, args.a))
    data = io.polytope_to_json(out, lo)
    _write(args, data)
    _emit(args, f"{out.dim}-polytope with {out.n_facets} facets and {out.n_vertices} vertices", data)
    return OK


def cmd_wedge(args) -> int:
    P, lam = _load(args)
    f = _facet(P, args.facet)
    W = k_wedge(P, f, args.k)
    lw = None
    if lam is not None:
        if not validate_rchar(P, lam):
            raise CheckFailed("invalid characteristic map")
        lw = k_wedge_char(P, lam, f, WedgeParams(args.k, args.a))
    data = io.polytope_to_json(W, lw)
    _write(args, data)
    _emit(args, f"{W.dim}-polytope with {W.n_facets} facets and {W.n_vertices} vertices", data)
    return OK


def _parse_vector(spec: str, n: int) -> tuple:
    try:
        v = tuple(int(x) for x in spec.split(","))
    except ValueError:
        raise UsageError(f"bad vector {spec!r}") from None
    if len(v) != n:
        raise UsageError(f"vector needs {n} entries")
    return v


def cmd_blowup(args) -> int:
    P, lam = _load(args)
    F = _face(P, args.face)
    res = blowup(P, F)
    new_lam = None
    if lam is not None and args.vector:
        new_lam = CharMap(P.dim, list(lam.vectors) + [_parse_vector(args.vector, P.dim)])
        rep = validate_rchar(res.result, new_lam)
        if not rep:
            raise CheckFailed(f"extended map is not R-characteristic: {rep.message}")
    data = io.polytope_to_json(res.result, new_lam)
    _write(args, data)
    Q = res.result
    _emit(args, f"new facet {Q.facet_names[res.new_facet]}; {Q.n_facets} facets, "
                f"{Q.n_vertices} vertices", data)
    return OK


def cmd_blowdown(args) -> int:
    P, lam = _load(args)
    f = _facet(P, args.facet)
    F = _face(P, args.face)
    bd = blowdown(P, f, F)
    Q = bd.result
    lq = None
    if lam is not None:
        if not validate_rchar(P, lam):
            raise CheckFailed("invalid characteristic map")
        lq = restrict_char(lam, bd)
    rows = [[P.facet_names[i], "->", Q.facet_names[j]] for i, j in sorted(bd.facet_map.items())]
    rows.append([P.facet_names[f], "->", bd.image_face.label(Q)])
    data = io.polytope_to_json(Q, lq)
    _write(args, data)
    _emit(args, _table(["facet", "", "image"], rows), {"facet_map": {r[0]: r[2] for r in rows},
                                                      "result": data})
    return OK


def _sequence(args, P, lam):
    if getattr(args, "order", None):
        return retraction_from_order(P, _vertices(P, args.order))
    start = _vertices(P, args.start)
    defer = _vertices(P, args.defer)
    kw = dict(start=start[0] if start else None, defer=defer, seed=args.seed)
    if getattr(args, "prime", None) and lam is not None:
        return find_p_clean_retraction(P, lam, args.prime, **kw)
    return next(enumerate_retractions(P, **kw), None)


def cmd_retract(args) -> int:
    P, lam = _load(args)
    seq = _sequence(args, P, lam)
    if seq is None:
        raise CheckFailed("no retraction sequence satisfies the constraints")
    trace = None
    if lam is not None and validate_rchar(P, lam):
        trace = singularity_trace(P, lam, seq)
    data = {"sequence": seq.to_json(), "trace": list(trace) if trace is not None else None}
    _write(args, data)
    _emit(args, render_sequence(seq, trace), data)
    return OK


def cmd_trace(args) -> int:
    P, lam = _load(args, need_char=True)
    seq = _sequence(args, P, lam)
    if seq is None:
        raise CheckFailed("no retraction sequence satisfies the constraints")
    trace = singularity_trace(P, lam, seq)
    data = {"sequence": seq.to_json(), "trace": list(trace)}
    _write(args, data)
    _emit(args, render_sequence(seq, trace), data)
    return OK


def cmd_torsion(args) -> int:
    P, lam = _load(args, need_char=True)
    if args.prime is None:
        raise UsageError("--prime is required")
    if args.blowdown and args.wedge:
        raise UsageError("choose one of --blowdown and --wedge")
    if args.blowdown:
        cert = blowdown_torsion_check(P, lam, _facet(P, args.facet), _face(P, args.face), args.prime,
                                      seed=args.seed)
    elif args.wedge:
        cert = kwedge_torsion_check(P, lam, _facet(P, args.facet), args.a, args.prime)
    else:
        cert = check_plain(P, lam, args.prime, seed=args.seed)
    data = cert.to_json()
    _write(args, data)
    _emit(args, render_certificate(cert), data)
    return OK if cert.certified else FAIL


def cmd_scan(args) -> int:
    P, lam = _load(args, need_char=True)
    if args.facet or args.face:
        scan = all_prime_scan(P, lam, _facet(P, args.facet), _face(P, args.face), seed=args.seed)
    else:
        scan = plain_prime_scan(P, lam, seed=args.seed)
    rows = [[p, c.conclusion, c.stage or "", c.reason] for p, c in sorted(scan.certificates.items())]
    text = (f"relevant primes: {list(scan.primes) or 'none'}\n"
            + (_table(["prime", "conclusion", "stage", "reason"], rows) + "\n" if rows else "")
            + f"torsion free: {'yes' if scan.torsion_free else 'not certified'}")
    data = scan.to_json()
    _write(args, data)
    _emit(args, text, data)
    return OK if scan.torsion_free else FAIL


def cmd_dualize(args) -> int:
    P, _ = _load(args)
    K = dual_of_polytope(P)
    data = io.complex_to_json(K)
    _write(args, data)
    _emit(args, f"{len(K.vertices)} vertices, {len(K.maximal)} maximal simplices", data)
    return OK


def cmd_swedge(args) -> int:
    K = io.load_complex(args.input)
    if args.vertex is None:
        raise UsageError("--vertex is required")
    if args.vertex not in K.vertices:
        raise UsageError(f"unknown vertex {args.vertex!r}")
    W = simplicial_k_wedge(K, args.vertex, args.k, literal=args.literal)
    data = io.complex_to_json(W)
    _write(args, data)
    _emit(args, f"{len(W.vertices)} vertices, {len(W.maximal)} maximal simplices, "
                f"{'pure' if W.is_pure else 'not pure'}", data)
    return OK


# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qtorsion",
                                 description="Simple polytopes, characteristic maps and torsion certificates.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="polytope JSON file (complex JSON for swedge)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("-o", "--output", help="write the result as JSON to this path")
    common.add_argument("--seed", type=int, default=None, help="shuffle search order reproducibly")
    sub = ap.add_subparsers(dest="verb", required=True, metavar="VERB")

    def add(name, func, help_, *flags):
        p = sub.add_parser(name, parents=[common], help=help_)
        for f in flags:
            f(p)
        p.set_defaults(func=func)
        return p

    facet = lambda p: p.add_argument("--facet", help="facet name")
    face = lambda p: p.add_argument("--face", help='comma separated facet names, e.g. "Ft,F1"')
    k = lambda p: p.add_argument("--k", type=int, default=1)
    a = lambda p: p.add_argument("--a", type=int, default=0)
    prime = lambda p: p.add_argument("--prime", type=int)

    def search(p):
        p.add_argument("--start", help="first vertex (v3 or A^B^C)")
        p.add_argument("--defer", help='vertices to retract last, e.g. "v3,v7"')
        p.add_argument("--order", help="explicit vertex order instead of a search")

    add("validate", cmd_validate, "check simplicity and the characteristic map")
    add("info", cmd_info, "face counts and vertex orders")
    add("product", cmd_product, "product with a simplex", k, facet, a)
    add("wedge", cmd_wedge, "polytopal k-wedge at a facet", facet, k, a)
    add("blowup", cmd_blowup, "truncate a face",
        face, lambda p: p.add_argument("--vector", help="vector for the new facet, e.g. 2,5,2"))
    add("blowdown", cmd_blowdown, "collapse a facet onto a face", facet, face)
    add("retract", cmd_retract, "find a retraction sequence", search, prime)
    add("trace", cmd_trace, "singularity orders along a retraction", search, prime)
    add("torsion", cmd_torsion, "certificate for one prime", prime, facet, face, a,
        lambda p: p.add_argument("--blowdown", action="store_true"),
        lambda p: p.add_argument("--wedge", action="store_true"))
    add("scan", cmd_scan, "certify every relevant prime", facet, face)
    add("dualize", cmd_dualize, "dual simplicial complex")
    add("swedge", cmd_swedge, "simplicial k-wedge at a vertex", k,
        lambda p: p.add_argument("--vertex"),
        lambda p: p.add_argument("--literal", action="store_true",
                                 help="single new vertices in the second join (not pure)"))
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SchemaError, SimplicialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return FAIL
    except (ConstructionError, RestrictionError, CharMapError, PolytopeError) as exc:
        print(f"check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return FAIL
    except QTorsionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
