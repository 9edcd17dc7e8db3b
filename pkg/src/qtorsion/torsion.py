"""Certificates for the absence of p-torsion.

Three routes are covered: a plain retraction whose orders avoid ``p``,
a blowdown (hypotheses A1 to A3 on the blown-up side) and the 2-wedge.
A certificate stores every intermediate value it relied on, and
``verify_certificate`` recomputes them from scratch.  "inconclusive" is
never a claim that torsion exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from math import gcd
from typing import Mapping, Optional

from .charmap import CharMap, singularity_order, validate_rchar
from .constructions import (
    ProductStructure,
    WedgeParams,
    _resolve_face,
    blowdown,
    detect_product_structure,
    k_wedge,
    k_wedge_char,
    restrict_char,
)
from .errors import CharMapError, QTorsionError, RetractionError, SchemaError, WedgeParameterError
from .lattice import solve_rational
from .polytope import CombinatorialPolytope, Face
from .retraction import (
    RetractionSequence,
    enumerate_retractions,
    induced_retraction_2wedge,
    induced_retraction_blowdown,
    p_clean_retractions,
    retraction_from_order,
    singularity_trace,
    verify_retraction,
)

__all__ = [
    "RationalCombination",
    "A2Result",
    "TorsionCertificate",
    "PrimeScan",
    "check_A2",
    "check_plain",
    "blowdown_torsion_check",
    "kwedge_torsion_check",
    "all_prime_scan",
    "plain_prime_scan",
    "verify_certificate",
    "prime_factors",
]

NO_TORSION = "no-p-torsion"
INCONCLUSIVE = "inconclusive"

# cap on retractions tried before giving up; the search itself is exhaustive
DEFAULT_ATTEMPTS = 200


def prime_factors(n: int) -> set:
    n = abs(int(n))
    out, q = set(), 2
    while q * q <= n:
        while n % q == 0:
            out.add(q)
            n //= q
        q += 1
    if n > 1:
        out.add(n)
    return out


def _check_prime(p: int):
    if p < 2 or prime_factors(p) != {p}:
        raise ValueError(f"{p} is not a prime")


@dataclass(frozen=True)
class RationalCombination:
    """``lam[target] == sum(c * lam[g] for g, c in zip(combo, coeffs))`` with every ``c != 0``."""

    target: int
    combo: tuple
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if any(c == 0 for c in self.coeffs):
            raise ValueError("zero coefficients are not stored")
        if len(self.coeffs) != len(self.combo):
            raise ValueError("one coefficient per facet")

    def holds(self, lam: CharMap) -> bool:
        total = [sum(c * lam[g][i] for g, c in zip(self.combo, self.coeffs)) for i in range(lam.rank)]
        return tuple(total) == tuple(Fraction(x) for x in lam[self.target])

    def coefficient(self, facet: int) -> Fraction:
        return dict(zip(self.combo, self.coeffs)).get(facet, Fraction(0))

    @property
    def denominators(self) -> tuple:
        return tuple(c.denominator for c in self.coeffs)

    def to_json(self, P: CombinatorialPolytope) -> dict:
        return {
            "target": P.facet_names[self.target],
            "combo": [P.facet_names[g] for g in self.combo],
            "coeffs": [str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, P: CombinatorialPolytope, data: Mapping) -> "RationalCombination":
        return cls(P.facet_index(data["target"]),
                   tuple(P.facet_index(g) for g in data["combo"]),
                   tuple(Fraction(c) for c in data["coeffs"]))


@dataclass(frozen=True)
class A2Result:
    combination: Optional[RationalCombination]
    passed: bool
    gcds: tuple
    reason: str


def check_A2(P: CombinatorialPolytope, lam: CharMap, big_facet, ps: ProductStructure, p: int) -> A2Result:
    """Write the collapsed facet's vector over the product facets; denominators must avoid ``p``."""
    big = P.facet_index(big_facet)
    combo = ps.p_facets
    sol = solve_rational([lam[g] for g in combo], lam[big])
    if sol is None:
        return A2Result(None, False, (),
                        f"{P.facet_names[big]} is not a rational combination of "
                        + ", ".join(P.facet_names[g] for g in combo))
    kept = [(g, c) for g, c in zip(combo, sol) if c != 0]
    comb = RationalCombination(big, tuple(g for g, _ in kept), tuple(c for _, c in kept))
    gcds = tuple(gcd(d, p) for d in comb.denominators)
    ok = all(g == 1 for g in gcds)
    reason = "denominators coprime to p" if ok else f"a denominator is divisible by {p}"
    return A2Result(comb, ok, gcds, reason)


@dataclass(frozen=True)
class SourceData:
    """What a derived certificate was built from; enough to rebuild it."""

    polytope: CombinatorialPolytope
    char: CharMap
    sequence: Optional[RetractionSequence]
    trace: tuple
    facet: Optional[int] = None
    face: Optional[frozenset] = None
    a: Optional[int] = None


@dataclass(frozen=True)
class TorsionCertificate:
    """Evidence for one prime.

    ``polytope``/``char``/``sequence``/``trace`` describe the space the
    conclusion is about (the blowdown or the wedge for derived kinds).
    ``stage`` names the hypothesis that failed when inconclusive.
    """

    prime: int
    kind: str
    conclusion: str
    polytope: CombinatorialPolytope
    char: CharMap
    sequence: Optional[RetractionSequence] = None
    trace: tuple = ()
    stage: Optional[str] = None
    reason: str = ""
    a2: Optional[A2Result] = None
    d_values: Mapping[int, int] = field(default_factory=dict)
    source: Optional[SourceData] = None
    attempts: int = 0

    @property
    def certified(self) -> bool:
        return self.conclusion == NO_TORSION

    @property
    def a3_gcds(self) -> dict:
        return {t: gcd(d, self.prime) for t, d in self.d_values.items()}

    def to_json(self) -> dict:
        from .io import polytope_to_json

        out = {
            "prime": self.prime,
            "kind": self.kind,
            "sequence": self.sequence.to_json() if self.sequence is not None else None,
            "trace": list(self.trace),
            "a2": None,
            "a3": {"d_values": {str(t + 1): d for t, d in sorted(self.d_values.items())},
                   "gcds": {str(t + 1): g for t, g in sorted(self.a3_gcds.items())}},
            "conclusion": self.conclusion,
            "stage": self.stage,
            "reason": self.reason,
            "polytope": polytope_to_json(self.polytope, self.char),
        }
        if self.a2 is not None and self.a2.combination is not None:
            out["a2"] = dict(self.a2.combination.to_json(self.source.polytope),
                             gcds=list(self.a2.gcds))
        if self.source is not None:
            S = self.source
            src = {
                "polytope": polytope_to_json(S.polytope, S.char),
                "sequence": S.sequence.to_json() if S.sequence is not None else None,
                "trace": list(S.trace),
            }
            if S.facet is not None:
                src["facet"] = S.polytope.facet_names[S.facet]
            if S.face is not None:
                src["face"] = [S.polytope.facet_names[f] for f in sorted(S.face)]
            if S.a is not None:
                src["a"] = S.a
            out["source"] = src
        return out


def _p_clean(trace, p) -> bool:
    return all(gcd(x, p) == 1 for x in trace)


def _require_valid(P, lam):
    rep = validate_rchar(P, lam)
    if not rep:
        raise CharMapError(rep.message)


def check_plain(P: CombinatorialPolytope, lam: CharMap, p: int, **search) -> TorsionCertificate:
    """A1 alone: search for a retraction whose every order is prime to ``p``."""
    _check_prime(p)
    _require_valid(P, lam)
    seq = next(p_clean_retractions(P, lam, p, **search), None)
    if seq is None:
        return TorsionCertificate(p, "plain", INCONCLUSIVE, P, lam, stage="A1",
                                  reason=f"no retraction with all orders prime to {p}")
    return TorsionCertificate(p, "plain", NO_TORSION, P, lam, seq, singularity_trace(P, lam, seq),
                              reason="every step order is prime to p", attempts=1)


def blowdown_torsion_check(P: CombinatorialPolytope, lam: CharMap, big_facet, F, p: int, *,
                           sequence: Optional[RetractionSequence] = None,
                           max_attempts: int = DEFAULT_ATTEMPTS, **search) -> TorsionCertificate:
    """Certify the blowdown of ``big_facet`` onto ``F`` has no ``p``-torsion.

    Raises if ``lam`` is not R-characteristic, if the blowdown does not
    exist, or if ``lam`` does not restrict to it.  Hypothesis failures give
    an inconclusive certificate whose ``stage`` is A1, A2, A3 or
    ``induced trace``.  With ``sequence`` only that retraction is tried.
    """
    _check_prime(p)
    _require_valid(P, lam)
    big = P.facet_index(big_facet)
    face = _resolve_face(P, F)
    ps = detect_product_structure(P, big, face)
    bd = blowdown(P, structure=ps)
    lam_q = restrict_char(lam, bd)
    Q = bd.result

    def inconclusive(stage, reason, a2=None, attempts=0, seq=None, trace=(), src_seq=None,
                     src_trace=(), dvals=None):
        src = SourceData(P, lam, src_seq, src_trace, big, face.facets)
        return TorsionCertificate(p, "blowdown", INCONCLUSIVE, Q, lam_q, seq, trace, stage, reason,
                                  a2, dvals or {}, src, attempts)

    a2 = check_A2(P, lam, big, ps, p)
    if not a2.passed:
        return inconclusive("A2", a2.reason, a2)
    coeffs = [a2.combination.coefficient(g) for g in ps.p_facets]

    if sequence is not None:
        tr = singularity_trace(P, lam, sequence)
        candidates = iter([sequence]) if _p_clean(tr, p) else iter(())
    else:
        candidates = islice(p_clean_retractions(P, lam, p, **search), max_attempts)

    first = None
    attempts = 0
    for seq in candidates:
        attempts += 1
        src_trace = singularity_trace(P, lam, seq)
        rep = induced_retraction_blowdown(P, seq, bd, lam, coeffs)
        trace = singularity_trace(Q, lam_q, rep.sequence)
        bad_d = {t: d for t, d in rep.d_values.items() if gcd(d, p) != 1}
        if rep.d_undefined:
            t = min(rep.d_undefined)
            failure = ("A3", f"d_{t + 1} is undefined: {rep.d_undefined[t]}")
        elif bad_d:
            t, d = min(bad_d.items())
            failure = ("A3", f"d_{t + 1} = {d} is divisible by {p}")
        elif not _p_clean(trace, p):
            i = next(i for i, x in enumerate(trace) if gcd(x, p) != 1)
            failure = ("induced trace", f"induced order {trace[i]} at step {i + 1} is divisible by {p}")
        else:
            src = SourceData(P, lam, seq, src_trace, big, face.facets)
            return TorsionCertificate(p, "blowdown", NO_TORSION, Q, lam_q, rep.sequence, trace,
                                      reason="A1, A2 and A3 hold", a2=a2, d_values=rep.d_values,
                                      source=src, attempts=attempts)
        if first is None:
            first = (failure, seq, src_trace, rep, trace)
    if first is None:
        return inconclusive("A1", f"no retraction of the source with all orders prime to {p}", a2)
    (stage, reason), seq, src_trace, rep, trace = first
    if attempts > 1:
        reason += f" (first of {attempts} retractions tried, none passed)"
    return inconclusive(stage, reason, a2, attempts, rep.sequence, trace, seq, src_trace, rep.d_values)


def kwedge_torsion_check(P: CombinatorialPolytope, lam: CharMap, F, a: int, p: int, *,
                         max_attempts: int = DEFAULT_ATTEMPTS) -> TorsionCertificate:
    """Certify the 2-wedge at the facet ``F`` with parameter ``a`` has no ``p``-torsion."""
    _check_prime(p)
    WedgeParams(2, a).check_char()
    _require_valid(P, lam)
    f = P.facet_index(F)
    W = k_wedge(P, f, 2)
    lw = k_wedge_char(P, lam, f, WedgeParams(2, a))
    if gcd(abs(1 - a), p) != 1:
        return TorsionCertificate(p, "2-wedge", INCONCLUSIVE, W, lw, stage="precondition",
                                  reason=f"|1 - a| = {abs(1 - a)} is divisible by {p}",
                                  source=SourceData(P, lam, None, (), f, None, a))
    attempts = 0
    last_err = None
    defer = P.facet_vertices[f]
    for seq in islice(p_clean_retractions(P, lam, p, defer=defer, strict_defer=True), max_attempts):
        attempts += 1
        try:
            _, _, wseq, trace = induced_retraction_2wedge(P, seq, f, lam, a)
        except RetractionError as exc:
            last_err = str(exc)
            continue
        src = SourceData(P, lam, seq, singularity_trace(P, lam, seq), f, None, a)
        if _p_clean(trace, p):
            return TorsionCertificate(p, "2-wedge", NO_TORSION, W, lw, wseq, trace,
                                      reason="lifted retraction is p-clean", source=src,
                                      attempts=attempts)
        last_err = "lifted trace is not p-clean"
    return TorsionCertificate(
        p, "2-wedge", INCONCLUSIVE, W, lw, stage="A1",
        reason=last_err or f"no retraction of the source retracting {P.facet_names[f]} last "
                           f"with all orders prime to {p}",
        source=SourceData(P, lam, None, (), f, None, a), attempts=attempts)


# ----------------------------------------------------------------------------
# prime scans

@dataclass(frozen=True)
class PrimeScan:
    """Per-prime certificates over a finite set of primes that can matter.

    For a prime outside ``primes`` every order, denominator and ``d_t``
    involved is a unit, so the hypotheses hold with any retraction.
    """

    primes: tuple
    certificates: Mapping[int, TorsionCertificate]
    justification: str

    @property
    def torsion_free(self) -> bool:
        return all(c.certified for c in self.certificates.values())

    def to_json(self) -> dict:
        return {
            "relevant_primes": list(self.primes),
            "justification": self.justification,
            "torsion_free": self.torsion_free,
            "certificates": {str(p): c.to_json() for p, c in sorted(self.certificates.items())},
        }


def _vertex_order_primes(P, lam) -> set:
    out = set()
    for v in range(P.n_vertices):
        out |= prime_factors(singularity_order(P, lam, v))
    return out


def plain_prime_scan(P: CombinatorialPolytope, lam: CharMap, **search) -> PrimeScan:
    _require_valid(P, lam)
    primes = tuple(sorted(_vertex_order_primes(P, lam)))
    certs = {p: check_plain(P, lam, p, **search) for p in primes}
    return PrimeScan(primes, certs,
                     "every face order divides a vertex order, so only primes of vertex orders matter")


def all_prime_scan(P: CombinatorialPolytope, lam: CharMap, big_facet, F, **search) -> PrimeScan:
    """Run ``blowdown_torsion_check`` for every prime that could fail.

    The set is the primes of the vertex orders on both sides, of the
    numerators and denominators of the combination, and of the ``d_t``
    of the first retraction found.  Each ``d_t`` times the image order
    equals ``|c|`` times the source order, so its primes are already in
    the set; including them is only a safeguard.
    """
    _require_valid(P, lam)
    big = P.facet_index(big_facet)
    face = _resolve_face(P, F)
    ps = detect_product_structure(P, big, face)
    bd = blowdown(P, structure=ps)
    lam_q = restrict_char(lam, bd)
    primes = _vertex_order_primes(P, lam) | _vertex_order_primes(bd.result, lam_q)
    sol = solve_rational([lam[g] for g in ps.p_facets], lam[big])
    if sol is not None:
        for c in sol:
            if c:
                primes |= prime_factors(c.numerator) | prime_factors(c.denominator)
        seq = next(enumerate_retractions(P), None)
        if seq is not None:
            rep = induced_retraction_blowdown(P, seq, bd, lam, list(sol))
            for d in rep.d_values.values():
                primes |= prime_factors(d)
    primes = tuple(sorted(primes))
    certs = {p: blowdown_torsion_check(P, lam, big, face, p, **search) for p in primes}
    why = ("primes of vertex orders (source and blowdown), of the coefficients of the "
           "rational combination, and of the reduction factors")
    if sol is None:
        why += "; no rational combination exists, so A2 fails for every prime"
    return PrimeScan(primes, certs, why)


# ----------------------------------------------------------------------------
# replay

@dataclass(frozen=True)
class Verification:
    ok: bool
    problems: tuple

    def __bool__(self):
        return self.ok


def _replay(P, data) -> RetractionSequence:
    order = [P.vertex_index(step["vertex"]) for step in data]
    seq = retraction_from_order(P, order)
    for step, item in zip(seq.steps, data):
        want = sorted(P.facet_index(f) for f in item["max_face_facets"])
        if sorted(step.max_face.facets) != want:
            raise RetractionError(f"recorded face at {item['vertex']} differs from the replayed one")
    return seq


def _certificate_from_json(data: Mapping) -> TorsionCertificate:
    from .io import polytope_from_json

    try:
        Q, lq = polytope_from_json(data["polytope"])
        seq = _replay(Q, data["sequence"]) if data.get("sequence") else None
        src = None
        if data.get("source"):
            s = data["source"]
            P, lam = polytope_from_json(s["polytope"])
            sseq = _replay(P, s["sequence"]) if s.get("sequence") else None
            facet = P.facet_index(s["facet"]) if "facet" in s else None
            face = frozenset(P.facet_index(f) for f in s["face"]) if "face" in s else None
            src = SourceData(P, lam, sseq, tuple(s.get("trace", ())), facet, face, s.get("a"))
        a2 = None
        if data.get("a2"):
            comb = RationalCombination.from_json(src.polytope, data["a2"])
            a2 = A2Result(comb, True, tuple(data["a2"].get("gcds", ())), "")
        dv = {int(t) - 1: int(d) for t, d in (data.get("a3") or {}).get("d_values", {}).items()}
        return TorsionCertificate(int(data["prime"]), data["kind"], data["conclusion"], Q, lq, seq,
                                  tuple(data.get("trace", ())), data.get("stage"),
                                  data.get("reason", ""), a2, dv, src)
    except (KeyError, TypeError, AttributeError) as exc:
        raise SchemaError(f"malformed certificate: {exc}") from exc


def verify_certificate(cert) -> Verification:
    """Recompute a certificate's claims without any search.

    Accepts a ``TorsionCertificate`` or its JSON form.  Every order, gcd
    and reduction factor is rederived; a positive conclusion must follow
    from them.
    """
    if not isinstance(cert, TorsionCertificate):
        try:
            cert = _certificate_from_json(cert)
        except QTorsionError as exc:
            return Verification(False, (str(exc),))
    problems = []
    p = cert.prime
    if prime_factors(p) != {p}:
        problems.append(f"{p} is not prime")
    if cert.conclusion not in (NO_TORSION, INCONCLUSIVE):
        problems.append(f"unknown conclusion {cert.conclusion!r}")
    if cert.conclusion == INCONCLUSIVE:
        return Verification(not problems, tuple(problems))
    Q, lq = cert.polytope, cert.char
    if not validate_rchar(Q, lq):
        problems.append("characteristic map is not R-characteristic")
        return Verification(False, tuple(problems))
    if cert.sequence is None:
        problems.append("positive conclusion without a retraction")
        return Verification(False, tuple(problems))
    ok, msg = verify_retraction(Q, cert.sequence)
    if not ok:
        problems.append(f"retraction does not replay: {msg}")
    trace = singularity_trace(Q, lq, cert.sequence)
    if tuple(trace) != tuple(cert.trace):
        problems.append(f"recorded trace {tuple(cert.trace)} differs from recomputed {trace}")
    if not _p_clean(trace, p):
        problems.append("trace is not prime to p")

    S = cert.source
    if cert.kind == "blowdown":
        if S is None or S.sequence is None or cert.a2 is None or cert.a2.combination is None:
            problems.append("blowdown certificate lacks its source data")
            return Verification(False, tuple(problems))
        P, lam = S.polytope, S.char
        if not validate_rchar(P, lam):
            problems.append("source map is not R-characteristic")
        ok, msg = verify_retraction(P, S.sequence)
        if not ok:
            problems.append(f"source retraction does not replay: {msg}")
        if not _p_clean(singularity_trace(P, lam, S.sequence), p):
            problems.append("A1 fails on the source retraction")
        comb = cert.a2.combination
        if not comb.holds(lam):
            problems.append("A2 identity does not hold")
        if any(gcd(d, p) != 1 for d in comb.denominators):
            problems.append("A2 denominator divisible by p")
        face = Face(S.face, frozenset.intersection(*(P.facet_vertices[f] for f in S.face)),
                    P.dim - len(S.face))
        ps = detect_product_structure(P, S.facet, face)
        bd = blowdown(P, structure=ps)
        if bd.result.vertices != Q.vertices or bd.result.facet_names != Q.facet_names:
            problems.append("blowdown does not reproduce the recorded polytope")
            return Verification(False, tuple(problems))
        if restrict_char(lam, bd) != lq:
            problems.append("restricted map differs from the recorded one")
        rep = induced_retraction_blowdown(P, S.sequence, bd, lam,
                                          [comb.coefficient(g) for g in ps.p_facets])
        if rep.sequence.order != cert.sequence.order:
            problems.append("induced retraction differs from the recorded one")
        if dict(rep.d_values) != dict(cert.d_values):
            problems.append(f"reduction factors {dict(rep.d_values)} differ from recorded "
                            f"{dict(cert.d_values)}")
        if rep.d_undefined or any(gcd(d, p) != 1 for d in rep.d_values.values()):
            problems.append("A3 fails")
    elif cert.kind == "2-wedge":
        if S is None or S.sequence is None or S.a is None or S.facet is None:
            problems.append("2-wedge certificate lacks its source data")
            return Verification(False, tuple(problems))
        P, lam = S.polytope, S.char
        if gcd(abs(1 - S.a), p) != 1:
            problems.append("|1 - a| is divisible by p")
        try:
            W = k_wedge(P, S.facet, 2)
            lw = k_wedge_char(P, lam, S.facet, WedgeParams(2, S.a))
        except (WedgeParameterError, QTorsionError) as exc:
            problems.append(f"cannot rebuild the wedge: {exc}")
            return Verification(False, tuple(problems))
        if W.vertices != Q.vertices or lw != lq:
            problems.append("wedge does not reproduce the recorded data")
        if not _p_clean(singularity_trace(P, lam, S.sequence), p):
            problems.append("source retraction is not prime to p")
    elif cert.kind != "plain":
        problems.append(f"unknown kind {cert.kind!r}")
    return Verification(not problems, tuple(problems))
