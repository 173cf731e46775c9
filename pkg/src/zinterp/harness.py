"""Witness synthesis, semantic ground truth, and end-to-end verification.

Every formula family in the library is backed here by two independent
things: a synthesizer that builds an explicit witness from the defining
data (an integer index, a target polynomial, a Frobenius exponent), and a
semantic checker that decides the intended relation directly, with no
formula evaluation.  Tests drive both against check_sat to confirm that
the formulas define exactly what they should at desk scale.

e2e_verify ties the pipeline together: it translates a closed sentence of
the star language through the standard pair encoding, converts an integer
witness into polynomial values for every bound variable of the output, and
reports pass or fail for each instantiated clause.  Synthesis failures are
reported, never raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .algebra import (
    Poly,
    frob_pow,
    poly_compose,
    poly_divrem,
    poly_extgcd,
)
from .buchi import ge_p_check
from .formula import (
    Exists,
    Formula,
    IntStructure,
    LANG_STAR,
    Var,
    bound_vars,
    check_sat,
    parse,
    print_formula,
)
from .interp import (
    _ordered_bound,
    frob_powers_of_t,
    ge_p_full,
    instantiate,
    nonzero,
    pell_domain,
    pell_interpretation,
    positive_powers_of_t,
    translate_with_trace,
)
from .pell import pell_index_recognize, pell_pair


FAMILIES = ("nu", "beta", "phi", "psi", "theta")

# Bound-variable order of the three chain certificates inside the full
# power certificate, shared by the synthesizer and the clause assembler.
_CHAIN_SUFFIXES = ("a", "b", "c")


@dataclass(frozen=True)
class Witness:
    """A full assignment for one formula family's bound variables."""

    family: str
    p: int
    assignment: dict


def family_formula(family: str) -> Formula:
    """The closed sentence a family witness is checked against."""
    if family == "theta":
        return Exists(("x", "y"), pell_domain())
    if family == "nu":
        return Exists(("x",), nonzero("x"))
    if family == "beta":
        return Exists(("x", "y"), ge_p_full(Var("x"), Var("y")))
    if family == "phi":
        return Exists(("f",), frob_powers_of_t("f"))
    if family == "psi":
        return Exists(("f",), positive_powers_of_t("f"))
    raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")


def check_witness(w: Witness) -> bool:
    """Exact-coverage check followed by satisfaction."""
    phi = family_formula(w.family)
    need = bound_vars(phi)
    got = set(w.assignment)
    if need != got:
        missing = sorted(need - got)
        extra = sorted(got - need)
        raise ValueError(
            f"assignment must cover exactly the bound variables; "
            f"missing {missing}, extra {extra}"
        )
    return check_sat(phi, w.assignment, w.p)


# -- elementary helpers ------------------------------------------------------------

def _offset_quotient(x: Poly, p: int) -> Poly:
    """The z with x = 1 + (t-1)z; requires x(1) = 1."""
    t = Poly.gen(p)
    one = Poly.one(p)
    q, r = poly_divrem(x - one, t - one)
    if not r.is_zero():
        raise ValueError("no quotient: the argument is not 1 at t = 1")
    return q


def _strip_factor(f: Poly, d: Poly) -> tuple:
    """(k, g) with f = d^k * g and d not dividing g."""
    k = 0
    g = f
    while True:
        q, r = poly_divrem(g, d)
        if not r.is_zero() or q.is_zero():
            return k, g
        k += 1
        g = q


# -- per-family synthesis -----------------------------------------------------------

def synth_nonzero(f: Poly, p: int) -> Witness:
    """Witness (a, b, c) certifying f != 0.

    Factor f = t^alpha (t-1)^beta G with G coprime to t(t-1); then the two
    Bezout identities t*u + ((t-1)^beta G)*v = 1 and
    (t-1)*s + (t^alpha G)*r = 1 give a = -u, b = -s, c = G*v*r.
    """
    if f.is_zero():
        raise ValueError("no witness: the target is zero")
    t = Poly.gen(p)
    one = Poly.one(p)
    tm1 = t - one
    alpha, g1 = _strip_factor(f, t)
    beta, gamma = _strip_factor(g1, tm1)
    cof_t = tm1 ** beta * gamma
    cof_tm1 = t ** alpha * gamma
    gcd1, u, v = poly_extgcd(t, cof_t)
    gcd2, s, r = poly_extgcd(tm1, cof_tm1)
    if gcd1 != one or gcd2 != one:
        raise ValueError("factor stripping left a common divisor")
    return Witness("nu", p, {
        "x": f, "a": -u, "b": -s, "c": gamma * v * r,
    })


def synth_pair(n: int, p: int) -> Witness:
    """Domain witness (x, y, z) for the pair encoding the integer n."""
    if p == 2:
        raise ValueError("the pair domain uses the conic form; p must be odd")
    pair = pell_pair(n, p)
    return Witness("theta", p, {
        "x": pair.x, "y": pair.y, "z": _offset_quotient(pair.x, p),
    })


def decode_pair(x: Poly, y: Poly) -> Optional[int]:
    """The integer encoded by (x, y), or None; raises off the conic."""
    return pell_index_recognize(x, y)


def _ge_p_values(g: Poly, r: int, p: int) -> list:
    """Values for the full power certificate's bound variables beyond the
    two related elements, in binder order: the conic point (u, v), then the
    three chains (17 sequence terms and a quotient each) for bases t, t*g,
    and g."""
    t = Poly.gen(p)
    one = Poly.one(p)
    q = p ** r
    out = [Poly.monomial(1, q, p), (t * t - one) ** ((q - 1) // 2)]
    for base in (t, t * g, g):
        for i in range(17):
            s = base + Poly.monomial(i, 0, p)
            out.append(frob_pow(s, r) * s)
        out.append(base ** (q - 1))
    return out


def synth_ge_p(g: Poly, r: int, p: int) -> Witness:
    """Witness for the full certificate of g^(p^r) against g.

    The sequence values are (i - 1 + base)^(p^r + 1); their second
    difference is 2 in any odd characteristic, and the three pin equations
    hold identically for x = y^(p^r).  The pinning argument that forces
    the converse needs 17 terms, hence the fixed chain length.
    """
    if p < 3 or p % 2 == 0:
        raise ValueError("odd characteristic required")
    if r < 0:
        raise ValueError("the Frobenius exponent must be nonnegative")
    assignment = {"x": frob_pow(g, r), "y": g}
    values = _ge_p_values(g, r, p)
    names = ["u", "v"]
    for suffix in _CHAIN_SUFFIXES:
        names.extend(f"u{i}{suffix}" for i in range(1, 18))
        names.append(f"z{suffix}")
    assignment.update(zip(names, values))
    return Witness("beta", p, assignment)


def synth_frob_power(r: int, p: int) -> Witness:
    """Witness that t^(p^r) lies in the Frobenius-power set, r >= 0."""
    if p < 3 or p % 2 == 0:
        raise ValueError("odd characteristic required")
    if r < 0:
        raise ValueError("the Frobenius exponent must be nonnegative")
    q = p ** r
    pair = pell_pair(q, p)
    t = Poly.gen(p)
    one = Poly.one(p)
    return Witness("phi", p, {
        "f": pair.x,
        "y": pair.y,
        "h": _offset_quotient(pair.x, p),
        "u": pair.x + one,
        "v": poly_compose(pair.y, t + one),
        "g": Poly.monomial(1, q - 1, p),
    })


def synth_positive_power(k: int, r: int, p: int) -> Witness:
    """Witness that t^k lies in the positive-power set, via t^k | t^(p^r).

    Requires 1 <= k <= p^r so the quotient t^(p^r - k) exists.
    """
    q = p ** r
    if not 1 <= k <= q:
        raise ValueError(f"k must satisfy 1 <= k <= {q}")
    inner = synth_frob_power(r, p).assignment
    f = Poly.monomial(1, k, p)
    return Witness("psi", p, {
        "f": f,
        "h": inner["f"],
        "y0": inner["y"],
        "h0": inner["h"],
        "u0": inner["u"],
        "v0": inner["v"],
        "g0": inner["g"],
        "w1": Poly.monomial(1, q - k, p),
        "w2": Poly.monomial(1, k - 1, p),
        "w3": _offset_quotient(f, p),
    })


# -- semantic ground truth ----------------------------------------------------------

def is_frob_power_of_t(f: Poly, p: int) -> bool:
    """Membership in {t^(p^r) : r >= 0}, decided from the coefficients."""
    d = f.degree
    if not isinstance(d, int) or d < 1:
        return False
    coeffs = f.coeffs
    if coeffs[-1] != 1 or any(coeffs[:-1]):
        return False
    while d > 1 and d % p == 0:
        d //= p
    return d == 1


def is_positive_power_of_t(f: Poly) -> bool:
    """Membership in {t^k : k >= 1}: a monic monomial of positive degree."""
    d = f.degree
    if not isinstance(d, int) or d < 1:
        return False
    return f.coeffs[-1] == 1 and not any(f.coeffs[:-1])


def semantic_check(relation: str, args, p: int):
    """Ground-truth decision with no formula evaluation.

    Polynomial relations: "F" and "P" (the two power sets), "ge_p"
    (f = g^(p^r)), "theta_decode" (pair to integer, or None).  Integer
    relations act on decoded values: "+" is the ternary graph check, the
    rest ("=", "!=", "|", "|*", "|_p", "T") follow the integer structure.
    """
    if relation == "F":
        return is_frob_power_of_t(args[0], p)
    if relation == "P":
        return is_positive_power_of_t(args[0])
    if relation == "ge_p":
        return ge_p_check(args[0], args[1], p) is not None
    if relation == "theta_decode":
        return decode_pair(args[0], args[1])
    if relation == "+":
        return args[0] + args[1] == args[2]
    return IntStructure(p).relation(relation, tuple(args))


# -- end-to-end verification ---------------------------------------------------------

@dataclass(frozen=True)
class ClauseReport:
    kind: str
    values: tuple
    ok: bool
    note: str = ""


@dataclass(frozen=True)
class E2EReport:
    sentence: str
    p: int
    ok: bool
    clauses: tuple = ()
    error: str = ""
    formula_text: str = ""
    witness: Optional[dict] = field(default=None, repr=False)


def _frob_exponent(a: int, b: int, p: int) -> int:
    """The r with |b| = p^r |a|, for arguments already known related."""
    if a == 0:
        return 0
    r = 0
    scale = abs(a)
    while scale < abs(b):
        scale *= p
        r += 1
    return r


def _clause_values(kind: str, ms: list, p: int, pairs: dict) -> tuple:
    """(semantic truth, bound values in binder order) for one clause of
    the standard pair interpretation."""
    zero = Poly.zero(p)
    ints = IntStructure(p)

    def quot(m):
        return _offset_quotient(pairs[m].x, p)

    if kind == "domain":
        return True, [quot(ms[0])]
    if kind == "0":
        return ms[0] == 0, []
    if kind == "1":
        return ms[0] == 1, []
    if kind == "+":
        return ms[0] + ms[1] == ms[2], [quot(ms[0]), quot(ms[1])]
    if kind == "=":
        return ms[0] == ms[1], [quot(ms[0]), quot(ms[1])]
    if kind == "|":
        a, b = ms
        ok = ints.relation("|", (a, b))
        z = zero
        if ok and a != 0:
            z, rem = poly_divrem(pairs[b].y, pairs[a].y)
            if not rem.is_zero():
                return False, [zero, quot(a), quot(b)]
        return ok, [z, quot(a), quot(b)]
    if kind == "|*":
        a, b = ms
        ok = ints.relation("|*", (a, b))
        if ok:
            r = _frob_exponent(a, b, p)
            tail = _ge_p_values(pairs[a].x, r, p)
        else:
            tail = [zero] * 56
        return ok, [quot(a), quot(b)] + tail
    if kind == "!=":
        a, b = ms
        ok = a != b
        first = [zero] * 3
        second = [zero] * 3
        if pairs[a].x != pairs[b].x:
            w = synth_nonzero(pairs[a].x - pairs[b].x, p).assignment
            first = [w["a"], w["b"], w["c"]]
        elif pairs[a].y != pairs[b].y:
            w = synth_nonzero(pairs[a].y - pairs[b].y, p).assignment
            second = [w["a"], w["b"], w["c"]]
        return ok, [quot(a), quot(b)] + first + second
    raise ValueError(f"no clause synthesis for symbol {kind!r}")


def relation_instance(kind: str, ints, p: int):
    """One pair-encoded clause as a closed formula plus a full witness.

    kind is a star-language symbol or "domain"; ints are the integers the
    clause speaks about, operands first and function value last.  Returns
    (truth, formula, witness): truth is the direct semantic verdict, and
    the witness covers every bound variable of the formula whenever the
    clause is true (placeholder zeros otherwise).
    """
    interp = pell_interpretation()
    of = interp.domain if kind == "domain" else interp.symbols[kind]
    pairs = {m: pell_pair(m, p) for m in set(ints)}
    coords = []
    witness = {}
    for i, m in enumerate(ints):
        base = f"m{i}"
        coords.extend((f"{base}.1", f"{base}.2"))
        witness[f"{base}.1"] = pairs[m].x
        witness[f"{base}.2"] = pairs[m].y
    if 2 * len(ints) != len(of.params):
        raise ValueError(
            f"symbol {kind!r} speaks about {len(of.params) // 2} integers, "
            f"got {len(ints)}"
        )
    body = instantiate(of, tuple(coords))
    ok, bound_values = _clause_values(kind, list(ints), p, pairs)
    names = _ordered_bound(body)
    if len(names) != len(bound_values):
        raise RuntimeError(
            f"clause synthesis for {kind!r} produced {len(bound_values)} "
            f"values for {len(names)} bound names"
        )
    witness.update(zip(names, bound_values))
    return ok, Exists(tuple(coords), body), witness


def e2e_verify(sentence, int_witness: Mapping, p: int) -> E2EReport:
    """Translate a closed star-language sentence through the standard pair
    interpretation, build the polynomial witness from an integer witness
    (one integer per source variable), and check satisfaction.

    The report carries one line per instantiated clause with its semantic
    truth value.  Under a source-level disjunction the untaken branch's
    clauses may read as failed while the sentence still verifies; the
    overall flag is the satisfaction check of the full translated sentence.
    """
    phi = parse(sentence, LANG_STAR) if isinstance(sentence, str) else sentence
    text = print_formula(phi)
    out, trace = translate_with_trace(pell_interpretation(), phi)
    formula_text = print_formula(out)

    values = {}
    for cname, base in trace.constants:
        values[base] = int(cname)
    missing = sorted(
        {src for src, _ in trace.variables} - set(int_witness)
    )
    if missing:
        return E2EReport(
            text, p, False,
            error=f"integer witness missing variables {missing}",
            formula_text=formula_text,
        )
    for src, base in trace.variables:
        values[base] = int(int_witness[src])
    for rec in trace.instantiations:
        if rec.kind == "+":
            bases = [rec.args[i].rsplit(".", 1)[0] for i in (0, 2, 4)]
            if (bases[2] not in values and bases[0] in values
                    and bases[1] in values):
                values[bases[2]] = values[bases[0]] + values[bases[1]]
    underived = [b for b, _ in trace.fresh if b not in values]
    if underived:
        return E2EReport(
            text, p, False,
            error=f"could not derive values for {underived}",
            formula_text=formula_text,
        )

    pairs = {m: pell_pair(m, p) for m in set(values.values())}
    witness = {}
    for base, m in values.items():
        witness[f"{base}.1"] = pairs[m].x
        witness[f"{base}.2"] = pairs[m].y

    clauses = []
    for rec in trace.instantiations:
        bases = [rec.args[i].rsplit(".", 1)[0] for i in range(0, len(rec.args), 2)]
        ms = [values[b] for b in bases]
        ok, bound_values = _clause_values(rec.kind, ms, p, pairs)
        if len(bound_values) != len(rec.bound):
            raise AssertionError(
                f"clause synthesis for {rec.kind!r} produced "
                f"{len(bound_values)} values for {len(rec.bound)} slots"
            )
        witness.update(zip(rec.bound, bound_values))
        clauses.append(ClauseReport(rec.kind, tuple(ms), ok))

    overall = check_sat(out, witness, p)
    return E2EReport(
        text, p, overall, tuple(clauses),
        formula_text=formula_text, witness=witness,
    )
