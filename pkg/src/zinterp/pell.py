"""Polynomial Pell pairs in both characteristics, with a brute-force oracle.

The conic X^2 - (t^2 - 1) Y^2 = 1 over F_p[t] (p odd, or integer
coefficients for p = 0) has the fundamental solution (t, 1).  Writing
s^2 = t^2 - 1, multiplying x + y s by t + s gives

    (t x + (t^2 - 1) y) + (x + t y) s,

which is the step recurrence used here; powers of t + s enumerate the full
solution family up to sign.  In characteristic 2 that conic degenerates and
the right form is X^2 + t X Y + Y^2 = 1: with a root alpha of
Z^2 = t Z + 1, multiplying x + y alpha by alpha gives y + (x + t y) alpha,
and by alpha^(-1) = t + alpha gives (t x + y) + x alpha, the two char-2
step directions.

Pairs at large indices are assembled by binary doubling through the
bilinear index-addition laws; the stepwise and doubling paths are
cross-checked in the tests.
"""

from __future__ import annotations

import itertools
import multiprocessing
from dataclasses import dataclass
from typing import Optional

from .algebra import FeasibilityError, Poly, _check_modulus
from .buchi import square_root_poly

MODE_CONIC = "char-ne-2"
MODE_CHAR2 = "char2"

STEP_LIMIT = 64
ORACLE_CASE_LIMIT = 10 ** 7


@dataclass(frozen=True)
class PellPair:
    """Solution pair with its index: the n-th power of the fundamental unit."""

    n: int
    x: Poly
    y: Poly
    mode: str

    @property
    def p(self) -> int:
        return self.x.modulus


def _infer_mode(p: int, mode: Optional[str]) -> str:
    if mode is None:
        return MODE_CHAR2 if p == 2 else MODE_CONIC
    if mode not in (MODE_CONIC, MODE_CHAR2):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == MODE_CHAR2 and p != 2:
        raise ValueError("char2 mode needs modulus 2")
    if mode == MODE_CONIC and p == 2:
        raise ValueError("the conic form degenerates at modulus 2")
    return mode


def _raw_add_conic(a, b, t2m1):
    xa, ya = a
    xb, yb = b
    return (xa * xb + t2m1 * (ya * yb), xa * yb + xb * ya)


def _raw_add_char2(a, b, t):
    xa, ya = a
    xb, yb = b
    yy = ya * yb
    return (xa * xb + yy, xa * yb + xb * ya + t * yy)


def _raw_negate(pair, mode, t):
    x, y = pair
    if mode == MODE_CHAR2:
        return (x + t * y, y)
    return (x, -y)


def _pair_by_doubling(n_abs: int, p: int, mode: str):
    t = Poly.gen(p)
    one = Poly.one(p)
    if mode == MODE_CHAR2:
        add = lambda a, b: _raw_add_char2(a, b, t)
        base = (Poly.zero(p), one)
    else:
        t2m1 = t * t - one
        add = lambda a, b: _raw_add_conic(a, b, t2m1)
        base = (t, one)
    acc = (one, Poly.zero(p))
    for bit in bin(n_abs)[2:]:
        acc = add(acc, acc)
        if bit == "1":
            acc = add(acc, base)
    return acc


def _pair_by_steps(n_abs: int, p: int, mode: str):
    t = Poly.gen(p)
    x, y = Poly.one(p), Poly.zero(p)
    if mode == MODE_CHAR2:
        for _ in range(n_abs):
            x, y = y, x + t * y
    else:
        t2m1 = t * t - Poly.one(p)
        for _ in range(n_abs):
            x, y = t * x + t2m1 * y, x + t * y
    return (x, y)


def pell_pair(n: int, p: int, mode: Optional[str] = None) -> PellPair:
    """The index-n solution pair over F_p[t] (or Z[t] when p = 0).

    Index 0 is (1, 0) and index 1 the fundamental pair; negative indices
    invert: (x, -y) in the conic form, (x + t y, y) in char 2.
    """
    _check_modulus(p)
    mode = _infer_mode(p, mode)
    n_abs = abs(n)
    if n_abs <= STEP_LIMIT:
        pair = _pair_by_steps(n_abs, p, mode)
    else:
        pair = _pair_by_doubling(n_abs, p, mode)
    if n < 0:
        pair = _raw_negate(pair, mode, Poly.gen(p))
    return PellPair(n, pair[0], pair[1], mode)


def pell_verify(x: Poly, y: Poly, mode: Optional[str] = None) -> bool:
    """Exact check of the defining equation for (x, y)."""
    if x.modulus != y.modulus:
        raise ValueError("moduli disagree")
    p = x.modulus
    mode = _infer_mode(p, mode)
    t = Poly.gen(p)
    one = Poly.one(p)
    if mode == MODE_CHAR2:
        return x * x + t * x * y + y * y == one
    return x * x - (t * t - one) * (y * y) == one


def pell_add(a: PellPair, b: PellPair) -> PellPair:
    """Index addition through the bilinear law

        x_{m+n} = x_m x_n + (t^2 - 1) y_m y_n,
        y_{m+n} = x_m y_n + x_n y_m.

    Stated for the conic form only; the char-2 analogue is internal to
    pell_pair and not part of this operation.
    """
    if a.mode != MODE_CONIC or b.mode != MODE_CONIC:
        raise ValueError("index addition is defined for the conic form only")
    if a.p != b.p:
        raise ValueError("moduli disagree")
    p = a.p
    t = Poly.gen(p)
    t2m1 = t * t - Poly.one(p)
    x, y = _raw_add_conic((a.x, a.y), (b.x, b.y), t2m1)
    return PellPair(a.n + b.n, x, y, MODE_CONIC)


def pell_index_recognize(x: Poly, y: Poly) -> Optional[int]:
    """The unique n with (x, y) = pell_pair(n), or None for the (-x_n, y_n)
    solutions that are not power pairs.

    Conic form: deg x determines |n|; x(1) = 1 holds for every power pair
    and fails on its negative, which settles the sign of x; the sign of n
    comes from comparing y against both candidates.  Raises if (x, y) is
    not a solution at all.
    """
    if x.modulus != y.modulus:
        raise ValueError("moduli disagree")
    p = x.modulus
    mode = _infer_mode(p, None)
    if not pell_verify(x, y, mode):
        raise ValueError("not a solution of the Pell equation")
    if mode == MODE_CHAR2:
        if not y.coeffs:
            return 0
        n_abs = (y.degree if isinstance(y.degree, int) else 0) + 1
        for cand_n in (n_abs, -n_abs):
            cand = pell_pair(cand_n, p, mode)
            if cand.x == x and cand.y == y:
                return cand_n
        return None
    if not y.coeffs:
        return 0 if x == Poly.one(p) else None
    if x.evaluate(1) != 1:
        return None
    n_abs = x.degree
    cand = pell_pair(n_abs, p, mode)
    if cand.x != x:
        return None
    if cand.y == y:
        return n_abs
    if cand.y == -y:
        return -n_abs
    return None


def _conic_solutions_for_y(y: Poly, t2m1: Poly, one: Poly):
    u = one + t2m1 * (y * y)
    s = square_root_poly(u)
    if s is None:
        return []
    return [(s, y), (-s, y)]


def _oracle_chunk_conic(args):
    """All solutions whose y has the given constant coefficient.

    Returns coefficient tuples so the sweep can cross process boundaries.
    """
    p, max_deg, const = args
    t = Poly.gen(p)
    one = Poly.one(p)
    t2m1 = t * t - one
    found = []
    for rest in itertools.product(range(p), repeat=max_deg):
        y = Poly((const,) + rest, p)
        for x, yy in _conic_solutions_for_y(y, t2m1, one):
            found.append((x.coeffs, yy.coeffs))
    return found


def _oracle_chunk_char2(args):
    """Char-2 sweep block: for each y, x is swept over deg x <= deg y + 1.

    The degree cap is forced by the equation: if deg x > deg y + 1, the
    leading term of x^2 dominates t x y + y^2 + 1 and cannot cancel.
    """
    p, max_deg, const = args
    t = Poly.gen(p)
    one = Poly.one(p)
    found = []
    for rest in itertools.product(range(p), repeat=max_deg):
        y = Poly((const,) + rest, p)
        for x_coeffs in itertools.product(range(p), repeat=max_deg + 2):
            x = Poly(x_coeffs, p)
            if x * x + t * x * y + y * y == one:
                found.append((x.coeffs, y.coeffs))
    return found


def pell_enumerate_oracle(
    p: int,
    max_y_degree: int,
    mode: Optional[str] = None,
    workers: Optional[int] = None,
) -> frozenset:
    """Every solution pair with deg y <= max_y_degree, by brute force.

    Conic form: sweep y and test 1 + (t^2 - 1) y^2 for a polynomial square
    root.  Char 2: sweep y and x, with deg x capped at deg y + 1 by the
    leading-term argument documented on the chunk worker.  Independent of
    pell_pair, so the two can be compared as generator versus oracle.
    """
    if p < 2:
        raise ValueError("the oracle sweeps a finite field; p must be prime")
    mode = _infer_mode(p, mode)
    cases = p ** (max_y_degree + 1)
    if mode == MODE_CHAR2:
        cases *= p ** (max_y_degree + 2)
    if cases > ORACLE_CASE_LIMIT:
        raise FeasibilityError(
            f"{cases} candidate pairs exceed the sweep limit {ORACLE_CASE_LIMIT}"
        )
    chunk = _oracle_chunk_char2 if mode == MODE_CHAR2 else _oracle_chunk_conic
    blocks = [(p, max_y_degree, c) for c in range(p)]
    if workers and workers > 1:
        with multiprocessing.Pool(workers) as pool:
            results = pool.map(chunk, blocks)
    else:
        results = [chunk(b) for b in blocks]
    return frozenset(
        (Poly(xc, p), Poly(yc, p))
        for block in results
        for xc, yc in block
    )
