"""The 2-adic isomorphism verifier: parity probes, residual-field
determination, order-6 and order-4 elimination by irreducibility witnesses,
the deviation-group computation, and certificate emission."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import permutations
from math import gcd, isqrt
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import cohomology
from .cohomology import MissingTrace, TraceRow
from .ff import IntPolynomial, Ramified, factor_degrees, legendre

BAD_SET = (2, 5, 11)
PARITY_PROBES = (29, 31, 37)
QUARTIC_PROBES = (43, 47, 59, 83)
FINAL_TRACE_SET = (29, 31, 37, 43, 47, 59, 83)

DETERMINANT_ASSUMPTION = ("both representations have determinant chi_2^3 "
                          "(cyclotomic cube); provenance: assumed, not "
                          "recomputed")


class NoField(Exception):
    """No cubic candidate matches the probe factorization pattern."""


class MultipleFields(Exception):
    """Several cubic candidates match; determination failed."""


class EliminationGap(Exception):
    """A candidate survives every probe prime."""


class PropertyFailure(Exception):
    """An exhaustively checked group property failed."""


@dataclass(frozen=True)
class NumberFieldEntry:
    label: str
    polynomial: IntPolynomial
    group_tag: str
    ramification_support: Tuple[int, ...]
    provenance: str

    @property
    def degree(self) -> int:
        return self.polynomial.degree


@dataclass(frozen=True)
class TraceSource:
    label: str
    values: Dict[int, int] = field(compare=False)
    provenance: Dict[int, str] = field(compare=False, default=None)

    def at(self, p: int) -> int:
        if p not in self.values:
            raise MissingTrace(f"{self.label} trace missing at p={p}")
        return self.values[p]


# ------------------------------------------------------------ data ingestion

def _no_rational_root(coeffs: Sequence[int]) -> bool:
    c0 = coeffs[0]
    lead = coeffs[-1]
    if c0 == 0:
        return False
    cands = set()
    for r in range(1, abs(c0) + 1):
        if c0 % r == 0:
            cands.update((r, -r))
    # monic entries only (lead == 1), so candidate roots divide c0
    assert lead == 1
    for r in cands:
        if sum(c * r ** k for k, c in enumerate(coeffs)) == 0:
            return False
    return True


def _no_quadratic_factor(coeffs: Sequence[int]) -> bool:
    """Monic quartic x^4 + c3 x^3 + c2 x^2 + c1 x + c0: exclude integer
    factorizations (x^2 + ax + b)(x^2 + cx + d) by divisor-pair search."""
    c0, c1, c2, c3, _ = coeffs
    divisors = [d for d in range(1, abs(c0) + 1) if c0 % d == 0]
    pairs = []
    for b in divisors + [-d for d in divisors]:
        d, rem = divmod(c0, b)
        if rem == 0:
            pairs.append((b, d))
    for b, d in pairs:
        if b != d:
            num = c1 - c3 * b
            if num % (d - b):
                continue
            a = num // (d - b)
            c = c3 - a
            if b + d + a * c == c2:
                return False
        else:
            if c1 != b * c3:
                continue
            # a + c = c3, a*c = c2 - 2b: integer roots of the resolvent
            disc = c3 * c3 - 4 * (c2 - 2 * b)
            if disc >= 0 and isqrt(disc) ** 2 == disc:
                if (c3 + isqrt(disc)) % 2 == 0:
                    return False
    return True


_FIELDS: Optional[List[NumberFieldEntry]] = None


def load_number_fields() -> List[NumberFieldEntry]:
    """Entries from the data file, with light irreducibility screening:
    no rational root for every entry, no integer quadratic factor for the
    quartics; beyond that the entries are trusted with provenance noted."""
    global _FIELDS
    if _FIELDS is not None:
        return _FIELDS
    path = resources.files("hmquintic").joinpath("data/number_fields.json")
    raw = json.loads(path.read_text(encoding="utf-8"))
    entries = []
    for rec in raw["entries"]:
        coeffs = tuple(int(c) for c in rec["coefficients"])
        if not _no_rational_root(coeffs):
            raise ValueError(f"{rec['label']}: rational root; not a field")
        if len(coeffs) == 5 and not _no_quadratic_factor(coeffs):
            raise ValueError(f"{rec['label']}: quadratic factor; reducible")
        entries.append(NumberFieldEntry(
            label=str(rec["label"]),
            polynomial=IntPolynomial(coeffs),
            group_tag=str(rec["group_tag"]),
            ramification_support=tuple(int(v) for v in
                                       rec["ramification_support"]),
            provenance=str(rec.get("provenance", "external"))))
    _FIELDS = entries
    return entries


def quartic_entries() -> List[NumberFieldEntry]:
    return [e for e in load_number_fields()
            if e.degree == 4 and set(e.ramification_support) <= set(BAD_SET)]


# ----------------------------------------------------------------- parities

def parity_check(sources: Sequence[TraceSource],
                 probes: Sequence[int] = PARITY_PROBES) -> bool:
    """All values odd and pairwise equal across sources at every probe."""
    for p in probes:
        vals = [s.at(p) for s in sources]
        if any(v % 2 == 0 for v in vals):
            return False
        if len(set(vals)) != 1:
            return False
    return True


# ----------------------------------------------------------- residual field

def cubic_discriminant(poly: IntPolynomial) -> int:
    """Discriminant of a depressed cubic x^3 + ax + b."""
    c = poly.coefficients
    if len(c) != 4 or c[3] != 1 or c[2] != 0:
        raise ValueError("expected a monic depressed cubic")
    a, b = c[1], c[0]
    return -4 * a ** 3 - 27 * b ** 2


def square_class(n: int) -> int:
    if n == 0:
        return 0
    d = 2
    while d * d <= abs(n):
        while n % (d * d) == 0:
            n //= d * d
        d += 1
    return n


def residual_field(probes: Sequence[int] = PARITY_PROBES) -> str:
    """The unique cubic entry, ramified only inside the bad set, that stays
    irreducible (pattern [3]) at every probe; its quadratic resolvent must
    reproduce the x^2 + 110 entry's square class."""
    cubics = [e for e in load_number_fields()
              if e.degree == 3 and set(e.ramification_support) <= set(BAD_SET)]
    matches = []
    for entry in cubics:
        if all(factor_degrees(entry.polynomial, p) == [3] for p in probes):
            matches.append(entry)
    if not matches:
        raise NoField(f"no cubic with pattern [3] at all of {tuple(probes)}")
    if len(matches) > 1:
        raise MultipleFields(f"cubics {[e.label for e in matches]} all match")
    winner = matches[0]
    disc = cubic_discriminant(winner.polynomial)
    resolvent_d = square_class(disc)
    quads = [e for e in load_number_fields()
             if e.degree == 2 and set(e.ramification_support) <= set(BAD_SET)]
    for q in quads:
        # x^2 + c0 defines Q(sqrt(-c0))
        if square_class(-q.polynomial.coefficients[0]) == resolvent_d:
            return winner.label
    raise NoField(
        f"resolvent square class {resolvent_d} of {winner.label} matches no "
        "quadratic entry")


# -------------------------------------------------------------- elimination

def quadratic_candidates() -> List[int]:
    """All squarefree d != 1 supported on {-1, 2, 5, 11}: fifteen values."""
    ds = []
    for mask in range(8):
        d = 1
        for bit, q in enumerate((2, 5, 11)):
            if mask >> bit & 1:
                d *= q
        for sign in (1, -1):
            if sign * d != 1:
                ds.append(sign * d)
    return sorted(ds, key=abs)


def eliminate_order6(probes: Sequence[int] = PARITY_PROBES,
                     ) -> Dict[int, Union[int, str]]:
    """For each quadratic candidate d, the least probe with (d|p) = -1.

    d = -110 is the square class of the cubic's own resolvent; odd traces
    force Frobenius into A_3 at every probe, so (d|p) = +1 identically and
    no Legendre witness can exist.  That candidate is eliminated by the
    residual-field step instead and recorded as "resolvent".
    """
    winner_label = residual_field(probes)
    winner = next(e for e in load_number_fields() if e.label == winner_label)
    resolvent_d = square_class(cubic_discriminant(winner.polynomial))
    out: Dict[int, Union[int, str]] = {}
    gaps = []
    for d in quadratic_candidates():
        witness = next((p for p in probes if legendre(d % p, p) == -1), None)
        if witness is not None:
            out[d] = witness
        elif d == resolvent_d:
            out[d] = "resolvent"
        else:
            gaps.append(d)
    if gaps:
        raise EliminationGap(f"quadratic candidates {gaps} survive {tuple(probes)}")
    return out


def eliminate_order4(probes: Sequence[int] = QUARTIC_PROBES,
                     ) -> Dict[str, int]:
    """For each quartic entry, the least probe with pattern [4]; ramified
    probes are skipped for that entry."""
    out: Dict[str, int] = {}
    gaps = []
    for entry in quartic_entries():
        witness = None
        for p in probes:
            try:
                if factor_degrees(entry.polynomial, p) == [4]:
                    witness = p
                    break
            except Ramified:
                continue
        if witness is None:
            gaps.append(entry.label)
        else:
            out[entry.label] = witness
    if gaps:
        raise EliminationGap(f"quartics {gaps} survive {tuple(probes)}")
    return out


# ------------------------------------------------------------ G-tilde check

def _mul2(a, b):
    return tuple(tuple((a[i][0] * b[0][j] + a[i][1] * b[1][j]) % 2
                       for j in range(2)) for i in range(2))


def _add2(a, b):
    return tuple(tuple((a[i][j] + b[i][j]) % 2 for j in range(2))
                 for i in range(2))


def _inv2(c):
    # det = 1 in GL_2(F_2), so the adjugate is the inverse
    return ((c[1][1], c[0][1]), (c[1][0], c[0][0]))


def _tilde_elements():
    trace0 = []
    for a in range(2):
        for b in range(2):
            for c in range(2):
                trace0.append(((a, b), (c, a)))
    gl2 = []
    for bits in range(16):
        m = ((bits >> 3 & 1, bits >> 2 & 1), (bits >> 1 & 1, bits & 1))
        if (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % 2:
            gl2.append(m)
    return [(A, C) for A in trace0 for C in gl2]


def _tilde_op(g, h):
    A, C = g
    B, D = h
    return _add2(A, _mul2(_mul2(C, B), _inv2(C))), _mul2(C, D)


def _s4xc2_orders() -> Dict[int, int]:
    perms = list(permutations(range(4)))

    def pcompose(p, q):
        return tuple(p[q[i]] for i in range(4))

    ident = tuple(range(4))
    hist: Dict[int, int] = {}
    for perm in perms:
        o = 1
        cur = perm
        while cur != ident:
            cur = pcompose(cur, perm)
            o += 1
        for bit in (0, 1):
            total = o * 2 // gcd(o, 2) if bit else o
            hist[total] = hist.get(total, 0) + 1
    return hist


def tilde_group_check() -> dict:
    """Exhaustive verification of the deviation group G-tilde: 48 elements
    (A, C) with A trace-zero over F_2 and C invertible, under
    (A, C)(B, D) = (A + C B C^-1, C D); order histogram cross-checked
    against an independently built S4 x C2, and tau(A, C) = tr(AC) nonzero
    exactly at orders above 3.

    The composition with second component B D is not even closed (take
    B = 0); the counterexample is recorded in the report.
    """
    elements = _tilde_elements()
    n = len(elements)
    index = {g: i for i, g in enumerate(elements)}
    if n != 48:
        raise PropertyFailure(f"|G| = {n} != 48")
    table = [[index[_tilde_op(elements[i], elements[j])] for j in range(n)]
             for i in range(n)]
    zero = ((0, 0), (0, 0))
    ident_mat = ((1, 0), (0, 1))
    e = index[(zero, ident_mat)]
    for i in range(n):
        if table[e][i] != i or table[i][e] != i:
            raise PropertyFailure(f"identity fails at element {elements[i]}")
    for i in range(n):
        if e not in table[i]:
            raise PropertyFailure(f"no inverse for {elements[i]}")
    for i in range(n):
        for j in range(n):
            tij = table[i][j]
            row_i = table[i]
            for k in range(n):
                if table[tij][k] != row_i[table[j][k]]:
                    raise PropertyFailure(
                        f"associativity fails at {(i, j, k)}")
    orders = []
    for i in range(n):
        o = 1
        cur = i
        while cur != e:
            cur = table[cur][i]
            o += 1
        orders.append(o)
    hist: Dict[int, int] = {}
    for o in orders:
        hist[o] = hist.get(o, 0) + 1
    ref = _s4xc2_orders()
    if hist != ref:
        raise PropertyFailure(
            f"order histogram {hist} differs from S4 x C2 {ref}")
    for i, (A, C) in enumerate(elements):
        tau = (A[0][0] * C[0][0] + A[0][1] * C[1][0]
               + A[1][0] * C[0][1] + A[1][1] * C[1][1]) % 2
        if (tau != 0) != (orders[i] > 3):
            raise PropertyFailure(
                f"tau support mismatch at {(A, C)}: tau={tau}, "
                f"order={orders[i]}")
    bad = _mul2(zero, ident_mat)
    return {
        "size": n,
        "order_histogram": hist,
        "s4xc2_histogram": ref,
        "tau_support_ok": True,
        "axioms_ok": True,
        "displayed_op_counterexample": {
            "note": "second component B*D with B = 0 leaves the group",
            "g": ((0, 0), (0, 0), (1, 0), (0, 1)),
            "h": ((0, 0), (0, 0), (1, 0), (0, 1)),
            "bd_product_det": (bad[0][0] * bad[1][1]
                               - bad[0][1] * bad[1][0]) % 2,
        },
    }


# -------------------------------------------------------------- certificate

@dataclass(frozen=True)
class IsomorphismCertificate:
    bad_set: Tuple[int, ...]
    parity_probes: Tuple[int, ...]
    parity_ok: Optional[bool]
    residual_field_label: Optional[str]
    resolvent_square_class: Optional[int]
    order6_witnesses: Optional[Dict[int, Union[int, str]]]
    order4_witnesses: Optional[Dict[str, int]]
    group_check: Optional[dict]
    final_trace_set: Tuple[int, ...]
    final_traces: Optional[Dict[int, Tuple[int, int]]]
    assumptions: Tuple[str, ...]
    verdict: str
    failing_step: Optional[str]


def form_trace_source(primes: Sequence[int] = FINAL_TRACE_SET) -> TraceSource:
    values = {}
    provenance = {}
    for p in primes:
        entry = cohomology.form_coefficient(p)
        if entry is None:
            raise MissingTrace(f"form coefficient missing at p={p}")
        values[p], provenance[p] = entry
    return TraceSource("modular_form", values, provenance)


def geometric_trace_source(rows: Sequence[TraceRow]) -> TraceSource:
    return TraceSource("geometric", {row.p: row.tr_v for row in rows})


def run_serre_schuett(geometric: TraceSource, form: TraceSource,
                      parity_probes: Sequence[int] = PARITY_PROBES,
                      quartic_probes: Sequence[int] = QUARTIC_PROBES,
                      final_set: Sequence[int] = FINAL_TRACE_SET,
                      ) -> IsomorphismCertificate:
    """Execute every elimination step in order; the verdict is isomorphic
    iff all pass.  Missing traces violate preconditions and raise; any
    step-level failure yields an inconclusive certificate naming the step."""
    for p in tuple(parity_probes) + tuple(final_set):
        geometric.at(p)
        form.at(p)

    state = dict(parity_ok=None, residual_field_label=None,
                 resolvent_square_class=None, order6_witnesses=None,
                 order4_witnesses=None, group_check=None, final_traces=None)
    failing: Optional[str] = None

    state["parity_ok"] = parity_check((geometric, form), parity_probes)
    if not state["parity_ok"]:
        failing = "parity"

    if failing is None:
        try:
            label = residual_field(parity_probes)
            state["residual_field_label"] = label
            winner = next(e for e in load_number_fields()
                          if e.label == label)
            state["resolvent_square_class"] = square_class(
                cubic_discriminant(winner.polynomial))
        except (NoField, MultipleFields):
            failing = "residual_field"

    if failing is None:
        try:
            state["order6_witnesses"] = eliminate_order6(parity_probes)
        except EliminationGap:
            failing = "order6"

    if failing is None:
        try:
            state["order4_witnesses"] = eliminate_order4(quartic_probes)
        except EliminationGap:
            failing = "order4"

    if failing is None:
        try:
            state["group_check"] = tilde_group_check()
        except PropertyFailure:
            failing = "group_check"

    if failing is None:
        traces = {p: (geometric.at(p), form.at(p)) for p in final_set}
        state["final_traces"] = traces
        if any(g != f for g, f in traces.values()):
            failing = "final_equality"

    return IsomorphismCertificate(
        bad_set=BAD_SET,
        parity_probes=tuple(parity_probes),
        parity_ok=state["parity_ok"],
        residual_field_label=state["residual_field_label"],
        resolvent_square_class=state["resolvent_square_class"],
        order6_witnesses=state["order6_witnesses"],
        order4_witnesses=state["order4_witnesses"],
        group_check=state["group_check"],
        final_trace_set=tuple(final_set),
        final_traces=state["final_traces"],
        assumptions=(DETERMINANT_ASSUMPTION,),
        verdict="isomorphic" if failing is None else "inconclusive",
        failing_step=failing)


def serialize_certificate(cert: IsomorphismCertificate) -> str:
    """Deterministic structured-text rendering: fixed key order, sorted
    maps, no timestamps, so identical inputs give identical bytes."""

    def maybe_map(m, key=None):
        if m is None:
            return None
        return {str(k): m[k] for k in sorted(m, key=key)}

    payload = {
        "certificate": "serre-schuett-2adic",
        "bad_set": list(cert.bad_set),
        "parity_probes": list(cert.parity_probes),
        "parity_ok": cert.parity_ok,
        "residual_field": cert.residual_field_label,
        "resolvent_square_class": cert.resolvent_square_class,
        "order6_witnesses": maybe_map(cert.order6_witnesses),
        "order4_witnesses": maybe_map(cert.order4_witnesses),
        "group_check": cert.group_check,
        "final_trace_set": list(cert.final_trace_set),
        "final_traces": maybe_map(
            {p: list(v) for p, v in cert.final_traces.items()}
        ) if cert.final_traces is not None else None,
        "assumptions": list(cert.assumptions),
        "verdict": cert.verdict,
        "failing_step": cert.failing_step,
    }
    return json.dumps(payload, indent=2) + "\n"


def write_certificate(cert: IsomorphismCertificate, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_certificate(cert))
