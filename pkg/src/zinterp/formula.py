"""Positive-existential formulas: syntax, s-expression parsing, evaluation.

The formula type has exactly four constructors: atoms, conjunction,
disjunction, and existential quantification.  Negation, implication, and
universal quantification do not exist as nodes, so everything built here is
positive-existential by construction.  Inequality, where needed, is an
ordinary relation symbol with registered semantics, not a negation.

Terms and formulas are written as s-expressions:

    (exists (y) (= (* y y) (+ 1 1)))
    (and (= x 1) (rel "|" x h))
    (or (!= x 0) (| x y))

Relation heads may appear bare, as in (= ...) or (| ...), or quoted through
the rel keyword; the printer always emits the bare form.  The keywords
exists, and, or, rel are reserved.

Evaluation is parameterized by a structure: a universe with constant values,
function values, and relation callbacks.  PolyStructure evaluates over
F_p[t] (equality, divisibility, inequality, and the Frobenius-power
relation); IntStructure evaluates over the integers with the p-power
divisibility relation b = +-(p^r) * a as the |* semantics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

from .algebra import Poly, poly_divides
from .buchi import ge_p_check


# -- abstract syntax -----------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple


Term = Union[Var, Const, App]


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Exists:
    names: tuple
    body: "Formula"


Formula = Union[Atom, And, Or, Exists]

TRUE = And(())

KEYWORDS = ("exists", "and", "or", "rel")


# -- languages -----------------------------------------------------------------

@dataclass(frozen=True)
class Lang:
    """Symbol table: constants, function symbols with arity, relation symbols
    with arity.  Stored as tuples of (name, arity) pairs to stay hashable."""

    name: str
    constants: tuple
    functions: tuple
    relations: tuple

    def __post_init__(self):
        names = list(self.constants)
        names += [n for n, _ in self.functions]
        names += [n for n, _ in self.relations]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate symbol in language {self.name}")
        for n in names:
            if n in KEYWORDS:
                raise ValueError(f"symbol {n!r} is a reserved keyword")

    def function_arity(self, name: str) -> Optional[int]:
        for n, a in self.functions:
            if n == name:
                return a
        return None

    def relation_arity(self, name: str) -> Optional[int]:
        for n, a in self.relations:
            if n == name:
                return a
        return None

    def is_constant(self, name: str) -> bool:
        return name in self.constants


LANG_RING = Lang("ring", ("0", "1"), (("+", 2), ("*", 2)), (("=", 2),))

LANG_T = Lang("t-ring", ("0", "1", "t"), (("+", 2), ("*", 2)), (("=", 2),))

# The same term language extended with the semantic relations used by
# checkers and the CLI; target formulas proper stay within LANG_T.
LANG_T_SEM = Lang(
    "t-ring-sem",
    ("0", "1", "t"),
    (("+", 2), ("*", 2)),
    (("=", 2), ("|", 2), ("!=", 2), ("|*", 2)),
)

LANG_STAR = Lang(
    "star",
    ("0", "1"),
    (("+", 2),),
    (("=", 2), ("|", 2), ("|*", 2), ("!=", 2)),
)

LANG_D = Lang(
    "divisibility",
    ("0", "1"),
    (("+", 2),),
    (("=", 2), ("|", 2), ("|_p", 2), ("T", 1)),
)


# -- parsing ---------------------------------------------------------------------

_TOKEN_RE = re.compile(r'\(|\)|"[^"]*"|[^\s()"]+')


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ValueError(f"unreadable character {ch!r} at position {pos}")
        tokens.append((m.group(0), pos))
        pos = m.end()
    return tokens


class _TokenStream:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.i = 0
        self.text = text

    def peek(self):
        if self.i >= len(self.tokens):
            raise ValueError("unexpected end of input")
        return self.tokens[self.i]

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, want):
        tok, pos = self.next()
        if tok != want:
            raise ValueError(f"expected {want!r} at position {pos}, got {tok!r}")
        return tok


def _parse_term(ts: _TokenStream, lang: Lang) -> Term:
    tok, pos = ts.next()
    if tok == ")":
        raise ValueError(f"unexpected ')' at position {pos}")
    if tok == "(":
        head, hpos = ts.next()
        arity = lang.function_arity(head)
        if arity is None:
            raise ValueError(
                f"unknown function symbol {head!r} at position {hpos}"
            )
        args = []
        while ts.peek()[0] != ")":
            args.append(_parse_term(ts, lang))
        ts.expect(")")
        if len(args) != arity:
            raise ValueError(
                f"function {head!r} at position {hpos} takes {arity} "
                f"arguments, got {len(args)}"
            )
        return App(head, tuple(args))
    if tok.startswith('"'):
        raise ValueError(f"string where a term was expected at position {pos}")
    if lang.is_constant(tok):
        return Const(tok)
    if tok in KEYWORDS or lang.function_arity(tok) is not None \
            or lang.relation_arity(tok) is not None:
        raise ValueError(f"symbol {tok!r} cannot be a variable (position {pos})")
    return Var(tok)


def _parse_formula(ts: _TokenStream, lang: Lang) -> Formula:
    ts.expect("(")
    head, hpos = ts.next()
    if head == "exists":
        ts.expect("(")
        names = []
        while ts.peek()[0] != ")":
            name, npos = ts.next()
            if name == "(" or name.startswith('"'):
                raise ValueError(f"bad bound variable at position {npos}")
            if name in KEYWORDS or lang.is_constant(name) \
                    or lang.function_arity(name) is not None \
                    or lang.relation_arity(name) is not None:
                raise ValueError(
                    f"bound name {name!r} collides with a symbol "
                    f"(position {npos})"
                )
            names.append(name)
        ts.expect(")")
        body = _parse_formula(ts, lang)
        ts.expect(")")
        return Exists(tuple(names), body)
    if head in ("and", "or"):
        parts = []
        while ts.peek()[0] != ")":
            parts.append(_parse_formula(ts, lang))
        ts.expect(")")
        return And(tuple(parts)) if head == "and" else Or(tuple(parts))
    if head == "rel":
        name_tok, npos = ts.next()
        if not name_tok.startswith('"'):
            raise ValueError(
                f"rel needs a quoted relation name at position {npos}"
            )
        rel = name_tok[1:-1]
    else:
        rel = head
    arity = lang.relation_arity(rel)
    if arity is None:
        raise ValueError(f"unknown relation {rel!r} at position {hpos}")
    args = []
    while ts.peek()[0] != ")":
        args.append(_parse_term(ts, lang))
    ts.expect(")")
    if len(args) != arity:
        raise ValueError(
            f"relation {rel!r} at position {hpos} takes {arity} "
            f"arguments, got {len(args)}"
        )
    return Atom(rel, tuple(args))


def parse(text: str, lang: Lang) -> Formula:
    ts = _TokenStream(_tokenize(text), text)
    out = _parse_formula(ts, lang)
    if ts.i != len(ts.tokens):
        tok, pos = ts.tokens[ts.i]
        raise ValueError(f"trailing input {tok!r} at position {pos}")
    return out


def print_term(term: Term) -> str:
    if isinstance(term, (Var, Const)):
        return term.name
    inner = " ".join(print_term(a) for a in term.args)
    return f"({term.fn} {inner})"


def print_formula(phi: Formula) -> str:
    if isinstance(phi, Atom):
        if phi.args:
            inner = " ".join(print_term(a) for a in phi.args)
            return f"({phi.rel} {inner})"
        return f"({phi.rel})"
    if isinstance(phi, And):
        inner = " ".join(print_formula(f) for f in phi.parts)
        return f"(and {inner})" if phi.parts else "(and)"
    if isinstance(phi, Or):
        inner = " ".join(print_formula(f) for f in phi.parts)
        return f"(or {inner})" if phi.parts else "(or)"
    if isinstance(phi, Exists):
        names = " ".join(phi.names)
        return f"(exists ({names}) {print_formula(phi.body)})"
    raise TypeError(f"not a formula: {phi!r}")


# -- structures ------------------------------------------------------------------

class PolyStructure:
    """F_p[t] (or Z[t] for p = 0) with the standard symbol meanings.

    Relations: exact equality, divisibility (zero divides only zero),
    inequality, and |* where (|* g f) holds when f = g^(p^r) for some r.
    Further relations can be registered as callbacks.
    """

    def __init__(self, p: int):
        self.p = p
        self._relations: dict[str, Callable] = {
            "=": lambda a, b: a == b,
            "|": lambda a, b: poly_divides(a, b),
            "!=": lambda a, b: a != b,
        }
        if p != 0:
            self._relations["|*"] = (
                lambda a, b: ge_p_check(b, a, p) is not None
            )

    def register_relation(self, name: str, fn: Callable) -> None:
        self._relations[name] = fn

    def constant(self, name: str):
        if name == "0":
            return Poly.zero(self.p)
        if name == "1":
            return Poly.one(self.p)
        if name == "t":
            return Poly.gen(self.p)
        raise ValueError(f"no constant {name!r} in F_p[t]")

    def function(self, name: str, args):
        if name == "+":
            return args[0] + args[1]
        if name == "*":
            return args[0] * args[1]
        raise ValueError(f"no function {name!r} in F_p[t]")

    def relation(self, name: str, args) -> bool:
        fn = self._relations.get(name)
        if fn is None:
            raise ValueError(f"relation {name!r} has no registered semantics")
        return fn(*args)


class IntStructure:
    """The integers with 0, 1, +, =, divisibility, inequality, and the
    p-power divisibility |*: (|* a b) holds when b = +-(p^r) * a, r >= 0."""

    def __init__(self, p: int):
        if p < 2:
            raise ValueError("the integer structure carries a prime p")
        self.p = p

    def constant(self, name: str) -> int:
        if name == "0":
            return 0
        if name == "1":
            return 1
        raise ValueError(f"no constant {name!r} over the integers")

    def function(self, name: str, args) -> int:
        if name == "+":
            return args[0] + args[1]
        if name == "*":
            return args[0] * args[1]
        raise ValueError(f"no function {name!r} over the integers")

    def _p_power_divides(self, a: int, b: int) -> bool:
        if a == 0:
            return b == 0
        q, scale = abs(a), abs(b)
        while q <= scale:
            if q == scale:
                return True
            q *= self.p
        return False

    def relation(self, name: str, args) -> bool:
        if name == "=":
            return args[0] == args[1]
        if name == "!=":
            return args[0] != args[1]
        if name == "|":
            a, b = args
            return b == 0 if a == 0 else b % a == 0
        if name == "|*":
            return self._p_power_divides(args[0], args[1])
        if name == "|_p":
            return (self._p_power_divides(args[0], args[1])
                    or self._p_power_divides(args[1], args[0]))
        if name == "T":
            return args[0] not in (-1, 0, 1)
        raise ValueError(f"relation {name!r} has no registered semantics")


# -- evaluation ------------------------------------------------------------------

def _eval_term(term: Term, env: Mapping, structure) -> object:
    if isinstance(term, Var):
        if term.name not in env:
            raise ValueError(f"unassigned variable {term.name!r}")
        return env[term.name]
    if isinstance(term, Const):
        return structure.constant(term.name)
    return structure.function(
        term.fn, [_eval_term(a, env, structure) for a in term.args]
    )


def _eval(phi: Formula, env: dict, witness: Mapping, structure) -> bool:
    if isinstance(phi, Atom):
        args = [_eval_term(a, env, structure) for a in phi.args]
        return structure.relation(phi.rel, args)
    if isinstance(phi, And):
        return all(_eval(f, env, witness, structure) for f in phi.parts)
    if isinstance(phi, Or):
        return any(_eval(f, env, witness, structure) for f in phi.parts)
    if isinstance(phi, Exists):
        inner = dict(env)
        for name in phi.names:
            if name not in witness:
                raise ValueError(
                    f"witness does not assign bound variable {name!r}"
                )
            inner[name] = witness[name]
        return _eval(phi.body, inner, witness, structure)
    raise TypeError(f"not a formula: {phi!r}")


def eval_qf(matrix: Formula, assignment: Mapping, p: int,
            structure=None) -> bool:
    """Truth value of a quantifier-free formula under a total assignment."""
    if structure is None:
        structure = PolyStructure(p)
    if any(isinstance(f, Exists) for f in walk(matrix)):
        raise ValueError("matrix must be quantifier-free")
    return _eval(matrix, dict(assignment), {}, structure)


def check_sat(phi: Formula, witness: Mapping, p: int, structure=None) -> bool:
    """Does the closed formula hold with its existentials bound as in the
    witness?  Every bound variable must be assigned up front; disjunction
    branches are all evaluated with the same witness, so untaken branches
    need (any) values too."""
    if structure is None:
        structure = PolyStructure(p)
    free = free_vars(phi)
    if free:
        raise ValueError(f"formula is not closed; free: {sorted(free)}")
    unassigned = bound_vars(phi) - set(witness)
    if unassigned:
        raise ValueError(
            f"witness does not assign bound variables {sorted(unassigned)}"
        )
    return _eval(phi, {}, witness, structure)


# -- utilities --------------------------------------------------------------------

def walk(phi: Formula):
    yield phi
    if isinstance(phi, (And, Or)):
        for f in phi.parts:
            yield from walk(f)
    elif isinstance(phi, Exists):
        yield from walk(phi.body)


def term_vars(term: Term) -> set:
    if isinstance(term, Var):
        return {term.name}
    if isinstance(term, Const):
        return set()
    out = set()
    for a in term.args:
        out |= term_vars(a)
    return out


def free_vars(phi: Formula) -> set:
    if isinstance(phi, Atom):
        out = set()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, (And, Or)):
        out = set()
        for f in phi.parts:
            out |= free_vars(f)
        return out
    if isinstance(phi, Exists):
        return free_vars(phi.body) - set(phi.names)
    raise TypeError(f"not a formula: {phi!r}")


def bound_vars(phi: Formula) -> set:
    out = set()
    for node in walk(phi):
        if isinstance(node, Exists):
            out |= set(node.names)
    return out


def _subst_term(term: Term, mapping: Mapping) -> Term:
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    if isinstance(term, Const):
        return term
    return App(term.fn, tuple(_subst_term(a, mapping) for a in term.args))


def substitute(phi: Formula, mapping: Mapping) -> Formula:
    """Replace free variables by terms, renaming bound variables that would
    capture a variable of an inserted term."""
    mapping = {k: v for k, v in mapping.items()}
    if isinstance(phi, Atom):
        return Atom(phi.rel, tuple(_subst_term(a, mapping) for a in phi.args))
    if isinstance(phi, (And, Or)):
        parts = tuple(substitute(f, mapping) for f in phi.parts)
        return And(parts) if isinstance(phi, And) else Or(parts)
    if isinstance(phi, Exists):
        live = {k: v for k, v in mapping.items() if k not in phi.names}
        if not live:
            return phi
        incoming = set()
        for v in live.values():
            incoming |= term_vars(v)
        taken = incoming | free_vars(phi) | set(phi.names) | set(live)
        renames = {}
        new_names = []
        for name in phi.names:
            if name in incoming:
                fresh = name
                k = 1
                while fresh in taken:
                    fresh = f"{name}_{k}"
                    k += 1
                taken.add(fresh)
                renames[name] = Var(fresh)
                new_names.append(fresh)
            else:
                new_names.append(name)
        body = phi.body
        if renames:
            body = substitute(body, renames)
        return Exists(tuple(new_names), substitute(body, live))
    raise TypeError(f"not a formula: {phi!r}")


def conjoin(parts) -> Formula:
    """n-ary conjunction; flattens nested conjunctions; empty input is TRUE."""
    flat = []
    for f in parts:
        if isinstance(f, And):
            flat.extend(f.parts)
        else:
            flat.append(f)
    return And(tuple(flat))


def disjoin(parts) -> Formula:
    flat = []
    for f in parts:
        if isinstance(f, Or):
            flat.extend(f.parts)
        else:
            flat.append(f)
    return Or(tuple(flat))
