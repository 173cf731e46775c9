"""Interpretations: encode integer sentences as polynomial-ring sentences.

An Interpretation maps a source language into a target language: each source
element is represented by a dim-tuple of target elements cut out by a domain
formula, and every source symbol gets a target formula of matching arity.
translate() rewrites a closed positive-existential source sentence into a
closed positive-existential target sentence; compose() chains two
interpretations; dispatch() merges per-characteristic interpretations behind
guard sentences that test the characteristic.

The builders in this module construct the concrete formula families used by
the standard integers-to-polynomials interpretation: the Pell-pair domain
(solutions of X^2 - (t^2-1)Y^2 = 1 with X congruent to 1 mod t-1), graph
formulas for 0, 1, +, divisibility, the Frobenius-power relation, equality
and inequality, a positive nonzero test, chain formulas certifying f = g^(p^r)
through square sequences, definitions of the sets {t^(p^r)} and {t^k : k >= 1},
and the characteristic guards.  All target formulas stay inside the language
{0, 1, t, +, *, =}: subtraction is eliminated by moving terms across the
equality, never by a minus sign.

Naming scheme for generated variables: a source variable n becomes the tuple
n.1 ... n.dim; intermediate tuples are w1, w2, ...; the shared tuple for a
constant c is named c<c>; bound variables of an instantiated library formula
get a #k suffix, one fresh k per instantiation.  All counters are local to a
single translate call, so identical inputs give identical outputs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .algebra import is_prime
from .formula import (
    And,
    App,
    Atom,
    Const,
    Exists,
    Formula,
    LANG_D,
    LANG_STAR,
    LANG_T,
    Lang,
    Or,
    TRUE,
    Term,
    Var,
    free_vars,
    parse,
    print_formula,
    print_term,
    substitute,
    term_vars,
    walk,
)


# -- term shorthand -------------------------------------------------------------

T_CONST = Const("t")
ONE = Const("1")
ZERO = Const("0")


def _v(x) -> Term:
    return Var(x) if isinstance(x, str) else x


def _mul(a, b) -> Term:
    return App("*", (_v(a), _v(b)))


def _add(a, b) -> Term:
    return App("+", (_v(a), _v(b)))


def _eq(a, b) -> Formula:
    return Atom("=", (_v(a), _v(b)))


def _ordered_bound(phi: Formula) -> tuple:
    """Bound variable names in binder order (top-down, left to right)."""
    out = []
    for node in walk(phi):
        if isinstance(node, Exists):
            out.extend(node.names)
    return tuple(out)


def _guard_bound_names(names, *args) -> None:
    incoming = set()
    for a in args:
        incoming |= term_vars(_v(a))
    clash = incoming & set(names)
    if clash:
        raise ValueError(
            f"argument variables {sorted(clash)} collide with bound names; "
            "pass a different suffix"
        )


# -- formula builders -------------------------------------------------------------

def conic_atom(x, y, shifted=False) -> Formula:
    """The norm-one conic as an equation without subtraction.

    Plain form: x^2 - (t^2-1)y^2 = 1, written x*x + y*y = 1 + t^2*(y*y).
    Shifted form (t replaced by t+1): x^2 - ((t+1)^2-1)y^2 = 1, written
    x*x = 1 + (t^2+t+t)*(y*y).
    """
    x = _v(x)
    y = _v(y)
    if shifted:
        factor = _add(_mul(T_CONST, T_CONST), _add(T_CONST, T_CONST))
        return _eq(_mul(x, x), _add(ONE, _mul(factor, _mul(y, y))))
    lhs = _add(_mul(x, x), _mul(y, y))
    rhs = _add(ONE, _mul(_mul(T_CONST, T_CONST), _mul(y, y)))
    return _eq(lhs, rhs)


def unit_offset_atom(x, z) -> Formula:
    """x = 1 + (t-1)z without subtraction: x + z = 1 + t*z."""
    x = _v(x)
    z = _v(z)
    return _eq(_add(x, z), _add(ONE, _mul(T_CONST, z)))


def pell_domain(x="x", y="y", z="z") -> Formula:
    """The domain formula: (x, y) solves the conic and x is 1 mod t-1."""
    _guard_bound_names((z,), x, y)
    body = And((conic_atom(x, y), unit_offset_atom(x, Var(z))))
    return Exists((z,), body)


def zero_pair(x="x", y="y") -> Formula:
    return And((_eq(x, ONE), _eq(y, ZERO)))


def one_pair(x="x", y="y") -> Formula:
    return And((_eq(x, T_CONST), _eq(y, ONE)))


def add_graph(x="x", y="y", u="u", v="v", f="f", g="g") -> Formula:
    """Graph of addition on encoded integers.

    f = xu + (t^2-1)yv becomes f + yv = xu + t^2*(yv); g = xv + yu is
    already subtraction-free.
    """
    sum_x = _eq(
        _add(f, _mul(y, v)),
        _add(_mul(x, u), _mul(_mul(T_CONST, T_CONST), _mul(y, v))),
    )
    sum_y = _eq(g, _add(_mul(x, v), _mul(y, u)))
    return And((
        pell_domain(x, y, "z1"),
        pell_domain(u, v, "z2"),
        sum_x,
        sum_y,
    ))


def divides_graph(x="x", y="y", u="u", v="v") -> Formula:
    """Graph of divisibility on encoded integers: v = yz for some z."""
    _guard_bound_names(("z", "z1", "z2"), x, y, u, v)
    body = And((
        pell_domain(x, y, "z1"),
        pell_domain(u, v, "z2"),
        _eq(v, _mul(y, Var("z"))),
    ))
    return Exists(("z",), body)


def nonzero(x="x", suffix="") -> Formula:
    """Positive test for x != 0: (ta+1)((t-1)b+1) = xc for some a, b, c.

    Written without subtraction as (ta+1)(tb+1) = xc + (ta+1)b.
    """
    a, b, c = f"a{suffix}", f"b{suffix}", f"c{suffix}"
    _guard_bound_names((a, b, c), x)
    ta1 = _add(_mul(T_CONST, Var(a)), ONE)
    tb1 = _add(_mul(T_CONST, Var(b)), ONE)
    body = _eq(
        _mul(ta1, tb1),
        _add(_mul(x, Var(c)), _mul(ta1, Var(b))),
    )
    return Exists((a, b, c), body)


def nonzero_difference(x, u, suffix="") -> Formula:
    """Positive test for x != u, the nonzero test applied to x - u.

    (ta+1)((t-1)b+1) = (x-u)c becomes (ta+1)(tb+1) + uc = xc + (ta+1)b.
    """
    a, b, c = f"a{suffix}", f"b{suffix}", f"c{suffix}"
    _guard_bound_names((a, b, c), x, u)
    ta1 = _add(_mul(T_CONST, Var(a)), ONE)
    tb1 = _add(_mul(T_CONST, Var(b)), ONE)
    body = _eq(
        _add(_mul(ta1, tb1), _mul(u, Var(c))),
        _add(_mul(x, Var(c)), _mul(ta1, Var(b))),
    )
    return Exists((a, b, c), body)


def ge_p_chain(x, y, suffix="") -> Formula:
    """Chain certificate for x = y^(p^r) when x or y is non-constant.

    Seventeen terms u_n with second difference 2 (u_{n+2} - 2u_{n+1} + u_n
    = 2, written u_{n+2} + u_n = 1+1 + u_{n+1}+u_{n+1}), pinned by
    xy = u_1, x + y = u_2 - u_1 - 1 (written x+y+u_1+1 = u_2), and y | x.
    """
    x = _v(x)
    y = _v(y)
    us = tuple(f"u{n}{suffix}" for n in range(1, 18))
    z = f"z{suffix}"
    _guard_bound_names(us + (z,), x, y)
    two = _add(ONE, ONE)
    parts = []
    for n in range(15):
        lhs = _add(Var(us[n + 2]), Var(us[n]))
        rhs = _add(two, _add(Var(us[n + 1]), Var(us[n + 1])))
        parts.append(_eq(lhs, rhs))
    parts.append(_eq(_mul(x, y), Var(us[0])))
    parts.append(_eq(_add(_add(_add(x, y), Var(us[0])), ONE), Var(us[1])))
    parts.append(_eq(x, _mul(y, Var(z))))
    return Exists(us + (z,), And(tuple(parts)))


def ge_p_full(x, y, u="u", v="v", suffix="") -> Formula:
    """Full certificate for x = y^(p^r), valid for constants too.

    Adjoins a conic point (u, v) and three chain certificates: u against t,
    ux against ty, and x against y.
    """
    x = _v(x)
    y = _v(y)
    _guard_bound_names((u, v), x, y)
    parts = (
        conic_atom(Var(u), Var(v)),
        ge_p_chain(Var(u), T_CONST, suffix="a" + suffix),
        ge_p_chain(_mul(Var(u), x), _mul(T_CONST, y), suffix="b" + suffix),
        ge_p_chain(x, y, suffix="c" + suffix),
    )
    return Exists((u, v), And(parts))


def frob_divides_graph(x="x", y="y", u="u", v="v") -> Formula:
    """Graph of the power-divisibility relation on encoded integers.

    Holds for encoded (m, n) when n = (+-p^r) m, certified by the first
    coordinate of the second pair being a p-power of the first pair's.
    """
    return And((
        pell_domain(x, y, "z1"),
        pell_domain(u, v, "z2"),
        ge_p_full(Var(u), Var(x), u="u0", v="v0"),
    ))


def equal_graph(x="x", y="y", u="u", v="v") -> Formula:
    return And((
        pell_domain(x, y, "z1"),
        pell_domain(u, v, "z2"),
        _eq(x, u),
        _eq(y, v),
    ))


def unequal_graph(x="x", y="y", u="u", v="v") -> Formula:
    """Graph of inequality: some coordinate differs, witnessed positively."""
    differ = Or((
        nonzero_difference(_v(x), _v(u), suffix="1"),
        nonzero_difference(_v(y), _v(v), suffix="2"),
    ))
    return And((
        pell_domain(x, y, "z1"),
        pell_domain(u, v, "z2"),
        differ,
    ))


def frob_powers_of_t(f="f", suffix="") -> Formula:
    """Defines {t^(p^r) : r >= 0} among polynomials (odd characteristic).

    f lies on the conic with x-congruence, and f+1 lies on the shifted
    conic with its own congruence u = 1 + tg.
    """
    y, h, u, v, g = (name + suffix for name in ("y", "h", "u", "v", "g"))
    _guard_bound_names((y, h, u, v, g), f)
    parts = (
        conic_atom(_v(f), Var(y)),
        unit_offset_atom(_v(f), Var(h)),
        conic_atom(Var(u), Var(v), shifted=True),
        _eq(u, _add(ONE, _mul(T_CONST, Var(g)))),
        _eq(u, _add(_v(f), ONE)),
    )
    return Exists((y, h, u, v, g), And(parts))


def positive_powers_of_t(f="f") -> Formula:
    """Defines {t^k : k >= 1}: f divides some t^(p^r), t divides f, and
    f is 1 at t = 1.  Divisibility a | b is spelled out as a quotient."""
    _guard_bound_names(("h", "w1", "w2", "w3"), f)
    div_f_h = Exists(("w1",), _eq("h", _mul(f, Var("w1"))))
    div_t_f = Exists(("w2",), _eq(f, _mul(T_CONST, Var("w2"))))
    div_offset = Exists(("w3",), unit_offset_atom(_v(f), Var("w3")))
    body = And((
        frob_powers_of_t(Var("h"), suffix="0"),
        div_f_h,
        div_t_f,
        div_offset,
    ))
    return Exists(("h",), body)


def sym_frob_divides(x="x", y="y") -> Formula:
    """Symmetrized power divisibility over the star language."""
    x = _v(x)
    y = _v(y)
    return Or((Atom("|*", (x, y)), Atom("|*", (y, x))))


def outside_units(x="x") -> Formula:
    """x is not -1, 0, or 1, over the star language."""
    x = _v(x)
    return And((
        Atom("!=", (_add(x, ONE), ZERO)),
        Atom("!=", (x, ZERO)),
        Atom("!=", (x, ONE)),
    ))


def _ones(count: int) -> Term:
    term = ONE
    for _ in range(count - 1):
        term = App("+", (ONE, term))
    return term


def _copies(name: str, count: int) -> Term:
    term = Var(name)
    for _ in range(count - 1):
        term = App("+", (Var(name), term))
    return term


def char_is(n: int) -> Formula:
    """Guard sentence: 1 summed n times equals 0."""
    if n < 1:
        raise ValueError("the count must be at least 1")
    return _eq(_ones(n), ZERO)


def char_at_least(p: int) -> Formula:
    """Guard sentence: every prime below p is invertible."""
    if p < 3:
        raise ValueError("the threshold must be at least 3")
    primes = [q for q in range(2, p) if is_prime(q)]
    names = tuple(f"z{j}" for j in range(1, len(primes) + 1))
    parts = tuple(
        _eq(_copies(name, q), ONE) for name, q in zip(names, primes)
    )
    return Exists(names, And(parts))


def formula_library() -> dict:
    """Named builders for every formula family used by the interpreter."""
    return {
        "domain": pell_domain,
        "zero": zero_pair,
        "one": one_pair,
        "add": add_graph,
        "divides": divides_graph,
        "frob_divides": frob_divides_graph,
        "equal": equal_graph,
        "unequal": unequal_graph,
        "nonzero": nonzero,
        "nonzero_difference": nonzero_difference,
        "ge_p_chain": ge_p_chain,
        "ge_p": ge_p_full,
        "frob_powers_of_t": frob_powers_of_t,
        "positive_powers_of_t": positive_powers_of_t,
        "sym_frob_divides": sym_frob_divides,
        "outside_units": outside_units,
        "char_is": char_is,
        "char_at_least": char_at_least,
    }


# -- interpretation objects --------------------------------------------------------

def _check_term_lang(term: Term, lang: Lang, where: str) -> None:
    if isinstance(term, Var):
        return
    if isinstance(term, Const):
        if not lang.is_constant(term.name):
            raise ValueError(
                f"{where}: constant {term.name!r} not in language {lang.name}"
            )
        return
    arity = lang.function_arity(term.fn)
    if arity is None:
        raise ValueError(
            f"{where}: function {term.fn!r} not in language {lang.name}"
        )
    if arity != len(term.args):
        raise ValueError(f"{where}: function {term.fn!r} arity mismatch")
    for a in term.args:
        _check_term_lang(a, lang, where)


def _check_formula_lang(phi: Formula, lang: Lang, where: str) -> None:
    for node in walk(phi):
        if isinstance(node, Atom):
            arity = lang.relation_arity(node.rel)
            if arity is None:
                raise ValueError(
                    f"{where}: relation {node.rel!r} not in language "
                    f"{lang.name}"
                )
            if arity != len(node.args):
                raise ValueError(
                    f"{where}: relation {node.rel!r} arity mismatch"
                )
            for a in node.args:
                _check_term_lang(a, lang, where)


@dataclass(frozen=True)
class OpenFormula:
    """A formula together with an ordered list of its free parameters.

    Bound names must be pairwise distinct and disjoint from the parameters,
    so that a flat witness map can address every quantifier unambiguously.
    """

    params: tuple
    body: Formula

    def __post_init__(self):
        if len(set(self.params)) != len(self.params):
            raise ValueError("duplicate parameter name")
        bound = _ordered_bound(self.body)
        if len(set(bound)) != len(bound):
            raise ValueError("a bound name is reused inside the body")
        if set(bound) & set(self.params):
            raise ValueError("a bound name shadows a parameter")
        extra = free_vars(self.body) - set(self.params)
        if extra:
            raise ValueError(
                f"body has free variables outside params: {sorted(extra)}"
            )

    @property
    def arity(self) -> int:
        return len(self.params)


def _rename_all(phi: Formula, name_map: dict) -> Formula:
    """Rename variables everywhere, binders included.  Safe only when the
    new names are fresh and bound names are never shadowed, which the
    OpenFormula invariants guarantee."""
    sub = {old: Var(new) for old, new in name_map.items()}
    if isinstance(phi, Atom):
        return substitute(phi, sub)
    if isinstance(phi, (And, Or)):
        parts = tuple(_rename_all(f, name_map) for f in phi.parts)
        return And(parts) if isinstance(phi, And) else Or(parts)
    names = tuple(name_map.get(n, n) for n in phi.names)
    return Exists(names, _rename_all(phi.body, name_map))


def instantiate(of: OpenFormula, args, tag=None) -> Formula:
    """Substitute arguments for the parameters.  With a tag, bound names
    get a #tag suffix first, keeping instantiations witness-disjoint."""
    if len(args) != len(of.params):
        raise ValueError(
            f"expected {len(of.params)} arguments, got {len(args)}"
        )
    body = of.body
    if tag is not None:
        bound = _ordered_bound(body)
        if bound:
            body = _rename_all(body, {b: f"{b}#{tag}" for b in bound})
    mapping = {p: _v(a) for p, a in zip(of.params, args)}
    return substitute(body, mapping)


class Interpretation:
    """A dimension, a domain formula, and one formula per source symbol.

    An n-ary source relation's formula has n*dim parameters, an n-ary
    function's has (n+1)*dim (inputs then output), and a constant's has dim.
    """

    def __init__(self, name, source_lang, target_lang, dim, domain, symbols):
        if dim < 1:
            raise ValueError("dimension must be at least 1")
        expected = set(source_lang.constants)
        expected |= {n for n, _ in source_lang.functions}
        expected |= {n for n, _ in source_lang.relations}
        missing = expected - set(symbols)
        if missing:
            raise ValueError(f"symbols without a formula: {sorted(missing)}")
        stray = set(symbols) - expected
        if stray:
            raise ValueError(
                f"formulas for undeclared symbols: {sorted(stray)}"
            )
        if domain.arity != dim:
            raise ValueError("domain formula must have dim parameters")
        _check_formula_lang(domain.body, target_lang, f"{name} domain")
        for sym, of in symbols.items():
            want = dim * self._elements(source_lang, sym)
            if of.arity != want:
                raise ValueError(
                    f"formula for {sym!r} has {of.arity} parameters, "
                    f"expected {want}"
                )
            _check_formula_lang(of.body, target_lang, f"{name} symbol {sym}")
        self.name = name
        self.source_lang = source_lang
        self.target_lang = target_lang
        self.dim = dim
        self.domain = domain
        self.symbols = dict(symbols)

    @staticmethod
    def _elements(lang: Lang, sym: str) -> int:
        """How many source elements the symbol's formula relates."""
        if lang.is_constant(sym):
            return 1
        arity = lang.function_arity(sym)
        if arity is not None:
            return arity + 1
        arity = lang.relation_arity(sym)
        if arity is not None:
            return arity
        raise ValueError(f"{sym!r} is not a symbol of {lang.name}")

    def element_count(self, sym: str) -> int:
        return self._elements(self.source_lang, sym)


def pell_interpretation() -> Interpretation:
    """The standard interpretation of the star-language integers inside
    polynomial rings, with integers encoded as conic solution pairs."""
    symbols = {
        "0": OpenFormula(("x", "y"), zero_pair()),
        "1": OpenFormula(("x", "y"), one_pair()),
        "+": OpenFormula(("x", "y", "u", "v", "f", "g"), add_graph()),
        "=": OpenFormula(("x", "y", "u", "v"), equal_graph()),
        "|": OpenFormula(("x", "y", "u", "v"), divides_graph()),
        "|*": OpenFormula(("x", "y", "u", "v"), frob_divides_graph()),
        "!=": OpenFormula(("x", "y", "u", "v"), unequal_graph()),
    }
    domain = OpenFormula(("x", "y"), pell_domain())
    return Interpretation(
        "pell-pairs", LANG_STAR, LANG_T, 2, domain, symbols
    )


def identity_interpretation(lang: Lang) -> Interpretation:
    """The neutral interpretation of a language in itself, dimension 1."""
    symbols = {}
    for c in lang.constants:
        symbols[c] = OpenFormula(("x1",), _eq(Var("x1"), Const(c)))
    for fname, k in lang.functions:
        params = tuple(f"x{i}" for i in range(1, k + 1)) + ("y",)
        args = tuple(Var(f"x{i}") for i in range(1, k + 1))
        symbols[fname] = OpenFormula(params, _eq(Var("y"), App(fname, args)))
    for rname, k in lang.relations:
        params = tuple(f"x{i}" for i in range(1, k + 1))
        args = tuple(Var(p) for p in params)
        symbols[rname] = OpenFormula(params, Atom(rname, args))
    domain = OpenFormula(("x1",), TRUE)
    return Interpretation(
        f"identity({lang.name})", lang, lang, 1, domain, symbols
    )


def divisibility_in_star() -> Interpretation:
    """The divisibility language rewritten inside the star language,
    dimension 1: symmetrized power divisibility and the non-unit test
    become star formulas, everything else passes through."""
    symbols = {
        "0": OpenFormula(("x",), _eq(Var("x"), ZERO)),
        "1": OpenFormula(("x",), _eq(Var("x"), ONE)),
        "+": OpenFormula(
            ("x", "y", "s"), _eq(Var("s"), _add(Var("x"), Var("y")))
        ),
        "=": OpenFormula(("x", "y"), _eq(Var("x"), Var("y"))),
        "|": OpenFormula(("x", "y"), Atom("|", (Var("x"), Var("y")))),
        "|_p": OpenFormula(("x", "y"), sym_frob_divides("x", "y")),
        "T": OpenFormula(("x",), outside_units("x")),
    }
    domain = OpenFormula(("x",), TRUE)
    return Interpretation(
        "divisibility-to-star", LANG_D, LANG_STAR, 1, domain, symbols
    )


# -- translation -----------------------------------------------------------------

RESERVED_MARKS = (".", "#", "'")


@dataclass(frozen=True)
class InstRecord:
    """One library-formula instantiation inside a translation."""

    kind: str      # "domain" or a source symbol name
    args: tuple    # flat target coordinate names, element-major
    tag: int
    bound: tuple   # bound names after the #tag rename, binder order


@dataclass(frozen=True)
class TranslationTrace:
    variables: tuple       # (source variable, tuple base)
    constants: tuple       # (constant symbol, tuple base)
    fresh: tuple           # (tuple base, source term text)
    instantiations: tuple  # InstRecord, in emission order

    @property
    def intermediate_pairs(self) -> int:
        """Tuples introduced beyond the source variables' own."""
        return len(self.fresh) + len(self.constants)


class _Translator:
    def __init__(self, interp: Interpretation, source_names):
        self.interp = interp
        self.source_names = set(source_names)
        self.assigned = set()
        self.counter = 0
        self.fresh_counter = 0
        self.const_bases = {}
        self.const_order = []
        self.variables = []
        self.fresh = []
        self.instantiations = []

    def tuple_names(self, base: str) -> tuple:
        return tuple(f"{base}.{i}" for i in range(1, self.interp.dim + 1))

    def var_base(self, name: str) -> str:
        base = name
        while base in self.assigned:
            base += "'"
        self.assigned.add(base)
        self.variables.append((name, base))
        return base

    def fresh_base(self, term_text: str) -> str:
        while True:
            self.fresh_counter += 1
            base = f"w{self.fresh_counter}"
            if base not in self.assigned and base not in self.source_names:
                self.assigned.add(base)
                self.fresh.append((base, term_text))
                return base

    def const_base(self, cname: str) -> str:
        if cname in self.const_bases:
            return self.const_bases[cname]
        base = f"c{cname}"
        while base in self.assigned or base in self.source_names:
            base += "_"
        self.assigned.add(base)
        self.const_bases[cname] = base
        self.const_order.append(cname)
        return base

    def inst(self, kind: str, of: OpenFormula, names: tuple) -> Formula:
        self.counter += 1
        tag = self.counter
        bound = _ordered_bound(of.body)
        body = of.body
        if bound:
            body = _rename_all(body, {b: f"{b}#{tag}" for b in bound})
        mapping = {p: Var(n) for p, n in zip(of.params, names)}
        out = substitute(body, mapping)
        self.instantiations.append(
            InstRecord(kind, names, tag, tuple(f"{b}#{tag}" for b in bound))
        )
        return out

    def domain_parts(self, base: str) -> list:
        if self.interp.domain.body == TRUE:
            return []
        return [self.inst("domain", self.interp.domain,
                          self.tuple_names(base))]

    def symbol_inst(self, sym: str, names: tuple) -> Formula:
        return self.inst(sym, self.interp.symbols[sym], names)

    def flatten(self, term: Term, env, parts, local) -> str:
        """Reduce a term to a tuple base, innermost first, appending the
        constraining parts for any intermediate tuple introduced."""
        if isinstance(term, Var):
            return env[term.name]
        if isinstance(term, Const):
            return self.const_base(term.name)
        arg_names = []
        for sub in term.args:
            base = self.flatten(sub, env, parts, local)
            arg_names.extend(self.tuple_names(base))
        w = self.fresh_base(print_term(term))
        local.append(w)
        parts.extend(self.domain_parts(w))
        parts.append(
            self.symbol_inst(term.fn, tuple(arg_names) + self.tuple_names(w))
        )
        return w

    def wrap(self, parts, local) -> Formula:
        body = parts[0] if len(parts) == 1 else And(tuple(parts))
        if not local:
            return body
        names = []
        for base in local:
            names.extend(self.tuple_names(base))
        return Exists(tuple(names), And(tuple(parts)))

    def graph_equals(self, term: Term, var: Var, env) -> Formula:
        """Equality between a variable and a constant or application: the
        top symbol's formula writes straight into the variable's tuple."""
        target = self.tuple_names(env[var.name])
        if isinstance(term, Const):
            return self.symbol_inst(term.name, target)
        parts = []
        local = []
        arg_names = []
        for sub in term.args:
            base = self.flatten(sub, env, parts, local)
            arg_names.extend(self.tuple_names(base))
        parts.append(self.symbol_inst(term.fn, tuple(arg_names) + target))
        return self.wrap(parts, local)

    def atom(self, node: Atom, env) -> Formula:
        if node.rel == "=":
            a, b = node.args
            if isinstance(a, Var) and not isinstance(b, Var):
                return self.graph_equals(b, a, env)
            if isinstance(b, Var) and not isinstance(a, Var):
                return self.graph_equals(a, b, env)
        parts = []
        local = []
        names = []
        for term in node.args:
            base = self.flatten(term, env, parts, local)
            names.extend(self.tuple_names(base))
        parts.append(self.symbol_inst(node.rel, tuple(names)))
        return self.wrap(parts, local)

    def go(self, phi: Formula, env) -> Formula:
        if isinstance(phi, Atom):
            return self.atom(phi, env)
        if isinstance(phi, (And, Or)):
            parts = tuple(self.go(f, env) for f in phi.parts)
            return And(parts) if isinstance(phi, And) else Or(parts)
        inner = dict(env)
        names = []
        parts = []
        for n in phi.names:
            base = self.var_base(n)
            inner[n] = base
            names.extend(self.tuple_names(base))
            parts.extend(self.domain_parts(base))
        parts.append(self.go(phi.body, inner))
        return Exists(tuple(names), And(tuple(parts)))

    def hoist_constants(self, core: Formula) -> Formula:
        if not self.const_order:
            return core
        names = []
        parts = []
        for cname in self.const_order:
            base = self.const_bases[cname]
            names.extend(self.tuple_names(base))
            parts.extend(self.domain_parts(base))
            parts.append(self.symbol_inst(cname, self.tuple_names(base)))
        return Exists(tuple(names), And(tuple(parts) + (core,)))

    def trace(self) -> TranslationTrace:
        constants = tuple(
            (c, self.const_bases[c]) for c in self.const_order
        )
        return TranslationTrace(
            tuple(self.variables),
            constants,
            tuple(self.fresh),
            tuple(self.instantiations),
        )


def _collect_names(phi: Formula) -> set:
    names = set(free_vars(phi)) | set(_ordered_bound(phi))
    for name in names:
        for mark in RESERVED_MARKS:
            if mark in name:
                raise ValueError(
                    f"variable name {name!r} uses the reserved mark "
                    f"{mark!r}"
                )
    return names


def translate_with_trace(interp: Interpretation, phi: Formula):
    """Translate a closed source sentence; also return the trace recording
    every tuple and library instantiation, for witness synthesis."""
    stray = free_vars(phi)
    if stray:
        raise ValueError(f"sentence is not closed; free: {sorted(stray)}")
    _check_formula_lang(phi, interp.source_lang, "translate input")
    tr = _Translator(interp, _collect_names(phi))
    core = tr.go(phi, {})
    out = tr.hoist_constants(core)
    if free_vars(out):
        raise AssertionError("translation produced an open formula")
    return out, tr.trace()


def translate(interp: Interpretation, phi: Formula) -> Formula:
    out, _ = translate_with_trace(interp, phi)
    return out


def translate_open(interp: Interpretation, of: OpenFormula) -> OpenFormula:
    """Translate a formula with free parameters: each parameter expands to
    a tuple, relativized to the domain.  Used by compose."""
    _check_formula_lang(of.body, interp.source_lang, "translate_open input")
    tr = _Translator(interp, _collect_names(of.body) | set(of.params))
    env = {}
    params = []
    parts = []
    for pname in of.params:
        base = tr.var_base(pname)
        env[pname] = base
        params.extend(tr.tuple_names(base))
        parts.extend(tr.domain_parts(base))
    parts.append(tr.go(of.body, env))
    body = tr.hoist_constants(And(tuple(parts)))
    return OpenFormula(tuple(params), body)


def compose(first: Interpretation, second: Interpretation) -> Interpretation:
    """Chain two interpretations; the result's dimension is the product."""
    if first.target_lang != second.source_lang:
        raise ValueError(
            f"language mismatch: {first.name} targets "
            f"{first.target_lang.name}, {second.name} reads "
            f"{second.source_lang.name}"
        )
    domain = translate_open(second, first.domain)
    symbols = {
        sym: translate_open(second, of)
        for sym, of in first.symbols.items()
    }
    return Interpretation(
        f"compose({first.name},{second.name})",
        first.source_lang,
        second.target_lang,
        first.dim * second.dim,
        domain,
        symbols,
    )


# -- characteristic dispatch --------------------------------------------------------

def _pad_and_rename(of: OpenFormula, dim: int, full_dim: int,
                    branch: int) -> tuple:
    """Canonicalize a branch formula: bound names suffixed with the branch
    index, parameters renamed to x1..xN element-major, missing coordinates
    padded with atoms pinning them to the element's first coordinate."""
    elements = len(of.params) // dim
    bound = _ordered_bound(of.body)
    body = of.body
    if bound:
        body = _rename_all(body, {b: f"{b}!{branch}" for b in bound})
    mapping = {}
    pads = []
    for e in range(elements):
        for c in range(dim):
            old = of.params[e * dim + c]
            mapping[old] = Var(f"x{e * full_dim + c + 1}")
        first = f"x{e * full_dim + 1}"
        for c in range(dim, full_dim):
            pads.append(_eq(Var(f"x{e * full_dim + c + 1}"), Var(first)))
    body = substitute(body, mapping)
    if pads:
        body = And((body,) + tuple(pads))
    params = tuple(f"x{i}" for i in range(1, elements * full_dim + 1))
    return params, body


def dispatch(branches) -> Interpretation:
    """Merge guarded interpretations into one: every symbol formula becomes
    the disjunction over branches of (guard and branch formula)."""
    branches = list(branches)
    if not branches:
        raise ValueError("empty branch list")
    guards = [g for g, _ in branches]
    interps = [i for _, i in branches]
    src = interps[0].source_lang
    tgt = interps[0].target_lang
    for i in interps[1:]:
        if i.source_lang != src or i.target_lang != tgt:
            raise ValueError("branches must share source and target languages")
    for g in guards:
        if free_vars(g):
            raise ValueError("guard sentences must be closed")
        _check_formula_lang(g, tgt, "dispatch guard")
    if len(branches) == 1 and guards[0] == TRUE:
        return interps[0]
    full_dim = max(i.dim for i in interps)

    def merged(pick) -> OpenFormula:
        params = None
        alternatives = []
        for idx, (guard, interp) in enumerate(zip(guards, interps), start=1):
            of = pick(interp)
            p, body = _pad_and_rename(of, interp.dim, full_dim, idx)
            params = p if params is None or len(p) > len(params) else params
            gbound = _ordered_bound(guard)
            g = guard
            if gbound:
                g = _rename_all(guard, {b: f"{b}!g{idx}" for b in gbound})
            alternatives.append(And((g, body)))
        return OpenFormula(params, Or(tuple(alternatives)))

    domain = merged(lambda i: i.domain)
    symbols = {
        sym: merged(lambda i, s=sym: i.symbols[s])
        for sym in interps[0].symbols
    }
    name = "dispatch(" + "|".join(i.name for i in interps) + ")"
    return Interpretation(name, src, tgt, full_dim, domain, symbols)


# -- interpretation bundles ----------------------------------------------------------

def _lang_to_json(lang: Lang) -> dict:
    return {
        "name": lang.name,
        "constants": list(lang.constants),
        "functions": [[n, a] for n, a in lang.functions],
        "relations": [[n, a] for n, a in lang.relations],
    }


def _lang_from_json(data: dict) -> Lang:
    return Lang(
        data["name"],
        tuple(data["constants"]),
        tuple((n, a) for n, a in data["functions"]),
        tuple((n, a) for n, a in data["relations"]),
    )


def save_bundle(interp: Interpretation, path) -> Path:
    """Write an interpretation to a directory: manifest.json plus one
    s-expression file per formula."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    (path / "domain.sexp").write_text(
        print_formula(interp.domain.body) + "\n"
    )
    symbols = {}
    for idx, sym in enumerate(sorted(interp.symbols)):
        of = interp.symbols[sym]
        fname = f"symbol-{idx:02d}.sexp"
        (path / fname).write_text(print_formula(of.body) + "\n")
        symbols[sym] = {"file": fname, "params": list(of.params)}
    manifest = {
        "name": interp.name,
        "dim": interp.dim,
        "source_lang": _lang_to_json(interp.source_lang),
        "target_lang": _lang_to_json(interp.target_lang),
        "domain": {
            "file": "domain.sexp",
            "params": list(interp.domain.params),
        },
        "symbols": symbols,
    }
    (path / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    return path


def load_bundle(path) -> Interpretation:
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    source_lang = _lang_from_json(manifest["source_lang"])
    target_lang = _lang_from_json(manifest["target_lang"])

    def read_open(entry) -> OpenFormula:
        text = (path / entry["file"]).read_text()
        return OpenFormula(tuple(entry["params"]), parse(text, target_lang))

    symbols = {
        sym: read_open(entry)
        for sym, entry in manifest["symbols"].items()
    }
    return Interpretation(
        manifest["name"],
        source_lang,
        target_lang,
        manifest["dim"],
        read_open(manifest["domain"]),
        symbols,
    )
