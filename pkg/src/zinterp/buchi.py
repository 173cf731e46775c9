"""Square sequences with constant second difference, and Frobenius-power order.

A sequence u_1, u_2, ... of polynomials over F_p satisfying
u_{n+2} - 2u_{n+1} + u_n = 2 consists of consecutive values of a quadratic;
the interesting families are u_n = (n + v)^(p^r + 1), which are squares of
(n + v)^((p^r + 1)/2) for odd p.  This module generates those families,
checks the defining second-difference identity symbolically, extracts
polynomial square roots and k-th roots by coefficient matching, decides the
Frobenius-power order (is f = g^(p^r)?), and runs a desk-scale search oracle
that sweeps all square seed pairs and matches every surviving family back to
a generated one.
"""

from __future__ import annotations

import itertools
import multiprocessing
from dataclasses import dataclass
from typing import Optional

from .algebra import (
    FeasibilityError,
    Poly,
    frob_pow,
    kth_roots_mod,
    sqrt_mod,
)

SEARCH_DEGREE_CAP = 2


@dataclass(frozen=True)
class BuchiSeq:
    """Finite sequence u_1..u_M over F_p, flagged valid when the second
    differences all equal 2."""

    terms: tuple[Poly, ...]
    p: int
    valid: bool

    @property
    def length(self) -> int:
        return len(self.terms)


def second_differences_equal_two(terms: tuple[Poly, ...], p: int) -> bool:
    two = Poly.const(2, p)
    return all(
        terms[i + 2] - terms[i + 1] - terms[i + 1] + terms[i] == two
        for i in range(len(terms) - 2)
    )


def buchi_generate(v: Poly, r: int, length: int, p: int) -> BuchiSeq:
    """The family u_n = (n + v)^(p^r + 1) for n = 1..length.

    Each term is computed as frob_pow(n + v, r) * (n + v), which is the same
    polynomial as the power but linear in the output size.  The returned
    sequence carries the result of an exact second-difference check.
    """
    if p < 3:
        raise ValueError("square-sequence families need an odd prime modulus")
    if v.modulus != p:
        raise ValueError("v must be a polynomial over F_p")
    if r < 0:
        raise ValueError("Frobenius exponent must be nonnegative")
    terms = []
    for n in range(1, length + 1):
        base = Poly.const(n, p) + v
        terms.append(frob_pow(base, r) * base)
    terms = tuple(terms)
    return BuchiSeq(terms, p, second_differences_equal_two(terms, p))


def ge_p_check(f: Poly, g: Poly, p: Optional[int] = None) -> Optional[int]:
    """Least r >= 0 with f = g^(p^r), or None if no such r exists.

    Over F_p the p-th power map fixes constants, so for deg g = 0 the answer
    is 0 or nothing; for deg g >= 1 the degree ratio pins down the only
    candidate r, which is then checked exactly.
    """
    if p is None:
        p = f.modulus
    if f.modulus != p or g.modulus != p:
        raise ValueError("moduli disagree")
    if p == 0:
        raise ValueError("Frobenius-power order needs a prime modulus")
    if f == g:
        return 0
    dg = g.degree
    if not isinstance(dg, int) or dg == 0:
        return None
    df = f.degree
    if not isinstance(df, int) or df % dg:
        return None
    ratio, r = df // dg, 0
    while ratio > 1:
        if ratio % p:
            return None
        ratio //= p
        r += 1
    return r if r > 0 and frob_pow(g, r) == f else None


def poly_kth_root(f: Poly, k: int) -> Optional[Poly]:
    """A polynomial g with g^k = f, or None.

    Requires a prime modulus not dividing k, so the leading coefficient of
    the candidate root enters the top cross term with an invertible factor
    k * lc^(k-1) and coefficients can be matched from the top degree down.
    The lowest coefficients are not pinned by the descent, so the candidate
    is verified exactly before being returned.
    """
    p = f.modulus
    if p == 0:
        raise ValueError("root extraction needs a prime modulus")
    if k < 1:
        raise ValueError("root index must be positive")
    if k % p == 0:
        raise ValueError(f"root index {k} is divisible by the characteristic")
    if not f.coeffs:
        return Poly.zero(p)
    df = f.degree
    if df % k:
        return None
    m = df // k
    for lc in kth_roots_mod(f.leading_coeff(), k, p):
        g = [0] * (m + 1)
        g[m] = lc
        inv_top = pow(k * pow(lc, k - 1, p) % p, -1, p)
        for j in range(1, m + 1):
            partial = Poly(tuple(g), p) ** k
            delta = (f.coeff(k * m - j) - partial.coeff(k * m - j)) % p
            g[m - j] = delta * inv_top % p
        cand = Poly(tuple(g), p)
        if cand ** k == f:
            return cand
    return None


def square_root_poly(u: Poly) -> Optional[Poly]:
    """s with s^2 = u over F_p (p odd), leading coefficient normalized into
    the half-system 1..(p-1)/2, or None when u is not a square."""
    p = u.modulus
    if p == 0 or p == 2:
        raise ValueError("square roots are extracted over F_p with p odd")
    s = poly_kth_root(u, 2)
    if s is None or not s.coeffs:
        return s
    if s.leading_coeff() > (p - 1) // 2:
        s = -s
    return s


# -- search oracle -------------------------------------------------------------

@dataclass(frozen=True)
class BuchiFamily:
    """A retained search family: its square seeds and, when the family
    matches a generated one, the parameters (v, r) it matches."""

    u1: Poly
    u2: Poly
    v: Optional[Poly]
    r: Optional[int]

    @property
    def matched(self) -> bool:
        return self.v is not None


@dataclass(frozen=True)
class BuchiOracleReport:
    p: int
    degree_bound: int
    seeds_scanned: int
    retained: tuple[BuchiFamily, ...]
    constant_families: int

    @property
    def flagged(self) -> tuple[BuchiFamily, ...]:
        return tuple(f for f in self.retained if not f.matched)


def _extend_all_squares(u1: Poly, u2: Poly, length: int, p: int):
    """Follow u_{n+2} = 2u_{n+1} - u_n + 2 from (u1, u2); return the full
    term list if every term is a square, else None (early exit)."""
    two = Poly.const(2, p)
    terms = [u1, u2]
    while len(terms) < length:
        nxt = terms[-1] + terms[-1] - terms[-2] + two
        if square_root_poly(nxt) is None:
            return None
        terms.append(nxt)
    return terms


def _match_family(terms: list[Poly], p: int) -> Optional[tuple[Poly, int]]:
    """Find (v, r) with terms[n-1] = (n + v)^(p^r + 1), if any.

    The first term pins deg v via deg u1 = (p^r + 1) deg v, so only finitely
    many r are possible; each candidate root of u1 is adjusted by the
    (p^r + 1)-th roots of unity before the whole sequence is compared.
    """
    u1 = terms[0]
    d1 = u1.degree
    if not isinstance(d1, int) or d1 == 0:
        return None
    r = 0
    while True:
        k = p ** r + 1
        if k > d1:
            return None
        if d1 % k == 0:
            w = poly_kth_root(u1, k)
            if w is not None:
                for unit in kth_roots_mod(1, k, p):
                    v = Poly.const(unit, p) * w - Poly.one(p)
                    seq = buchi_generate(v, r, len(terms), p)
                    if list(seq.terms) == terms:
                        return v, r
        r += 1


def _scan_seed_block(args) -> tuple[int, list, list]:
    """Sweep all (s1, s2) with the constant coefficient of s1 fixed.

    Returns primitive data (coefficient tuples) so results cross process
    boundaries without custom pickling: (seeds scanned, retained family
    records, constant family keys).  Keys rather than counts, because the
    same family surfaces in the blocks of both s1 and -s1 and the caller
    dedupes globally.
    """
    p, d, s1_const, length = args
    scanned = 0
    retained = []
    constants = []
    seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    for s1_rest in itertools.product(range(p), repeat=d):
        s1 = Poly((s1_const,) + s1_rest, p)
        u1 = s1 * s1
        for s2_coeffs in itertools.product(range(p), repeat=d + 1):
            scanned += 1
            s2 = Poly(s2_coeffs, p)
            u2 = s2 * s2
            key = (u1.coeffs, u2.coeffs)
            if key in seen:
                continue
            seen.add(key)
            terms = _extend_all_squares(u1, u2, length, p)
            if terms is None:
                continue
            if all(not isinstance(t.degree, int) or t.degree == 0
                   for t in terms):
                constants.append(key)
                continue
            match = _match_family(terms, p)
            if match is None:
                retained.append((u1.coeffs, u2.coeffs, None, None))
            else:
                v, r = match
                retained.append((u1.coeffs, u2.coeffs, v.coeffs, r))
    return scanned, retained, constants


def buchi_search_oracle(
    p: int, d: int, workers: Optional[int] = None
) -> BuchiOracleReport:
    """Sweep every seed pair u1 = s1^2, u2 = s2^2 with deg s_i <= d over F_p,
    keep the seeds whose recurrence extension stays square through p terms
    with some nonconstant term, and match each survivor to a generated
    family.  Families the matcher cannot explain are retained unmatched
    (see BuchiOracleReport.flagged) for manual review rather than asserted
    away.

    Restricted to p = 17: it is the smallest modulus where the length-17
    all-squares condition is the meaningful one.  Deduplication is by the
    seed squares themselves, so sign choices of s1, s2 collapse.
    """
    if p != 17:
        raise ValueError("the seed sweep is specified for p = 17 only")
    if d > SEARCH_DEGREE_CAP:
        raise FeasibilityError(
            f"seed degree {d} exceeds the sweep cap {SEARCH_DEGREE_CAP}"
        )
    blocks = [(p, d, c, p) for c in range(p)]
    if workers and workers > 1:
        with multiprocessing.Pool(workers) as pool:
            results = pool.map(_scan_seed_block, blocks)
    else:
        results = [_scan_seed_block(b) for b in blocks]

    scanned = sum(r[0] for r in results)
    constant_keys: set[tuple] = set()
    merged: dict[tuple, tuple] = {}
    for _, retained, constants in results:
        constant_keys.update(constants)
        for u1c, u2c, vc, r in retained:
            merged[(u1c, u2c)] = (vc, r)
    families = []
    for (u1c, u2c) in sorted(merged):
        vc, r = merged[(u1c, u2c)]
        families.append(
            BuchiFamily(
                Poly(u1c, p),
                Poly(u2c, p),
                None if vc is None else Poly(vc, p),
                r,
            )
        )
    return BuchiOracleReport(
        p, d, scanned, tuple(families), len(constant_keys)
    )
