"""Exact univariate polynomial arithmetic over prime fields and the integers.

A polynomial is a dense, ascending tuple of coefficients: ``coeffs[i]`` is the
coefficient of ``t^i``, the zero polynomial is the empty tuple, and the leading
coefficient of a nonzero polynomial is always nonzero.  The coefficient ring is
selected by the ``modulus`` attribute: a prime ``p`` gives the field of ``p``
elements with coefficients stored reduced to ``range(p)``, and ``0`` gives the
ring of integers with arbitrary Python ints.

The degree of the zero polynomial is the sentinel ``NEG_INFINITY`` (never -1),
so degree comparisons behave correctly without special-casing.

Everything here is exact; there are no floats anywhere in this package's core.
Multiplication has two interchangeable paths: schoolbook convolution, and (for
large dense operands over a prime field) Kronecker substitution, which packs
the coefficient vector into a single big integer so that Python's native
bignum multiplication does the convolution.  Both paths are cross-checked in
the test suite.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

NEG_INFINITY = float("-inf")

_KRONECKER_MIN_LEN = 96  # combined operand length above which packing wins


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Deterministic primality by trial division (moduli here are small)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _check_modulus(p: int) -> None:
    if p == 0:
        return
    if p < 2 or not is_prime(p):
        raise ValueError(f"modulus must be 0 (integers) or a prime, got {p}")


class FeasibilityError(ValueError):
    """A brute-force sweep was asked to cover more cases than the guard allows."""


def sqrt_mod(a: int, p: int) -> Optional[int]:
    """A square root of a modulo the prime p, or None if a is a non-residue.

    Tonelli-Shanks; for p = 2 every residue is its own square root.
    """
    _check_modulus(p)
    if p == 0:
        raise ValueError("square roots modulo 0 are not defined")
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # write p-1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def kth_roots_mod(a: int, k: int, p: int) -> list[int]:
    """All k-th roots of a modulo the prime p, ascending.

    Brute force over the field; the moduli used by the oracles are tiny.
    """
    _check_modulus(p)
    if p == 0:
        raise ValueError("k-th roots modulo 0 are not defined")
    a %= p
    return [c for c in range(p) if pow(c, k, p) == a]


@dataclass(frozen=True)
class FieldElem:
    """An element of the prime field F_p, stored reduced to range(p)."""

    residue: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2 or not is_prime(self.modulus):
            raise ValueError(f"modulus must be prime, got {self.modulus}")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other
        if isinstance(other, int):
            return FieldElem(other, self.modulus)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.residue + other.residue, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(-self.residue, self.modulus)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.residue - other.residue, self.modulus)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.residue * other.residue, self.modulus)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if self.residue == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElem(pow(self.residue, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def sqrt(self) -> Optional["FieldElem"]:
        r = sqrt_mod(self.residue, self.modulus)
        return None if r is None else FieldElem(r, self.modulus)

    def is_zero(self) -> bool:
        return self.residue == 0

    def __str__(self) -> str:
        return str(self.residue)


def _normalize(coeffs: Iterable[int], p: int) -> tuple[int, ...]:
    cs = [c % p for c in coeffs] if p else list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


class Poly:
    """Dense univariate polynomial over F_p (modulus p) or Z (modulus 0).

    Immutable.  Arithmetic operators accept plain ints, coercing them to
    constant polynomials with the same modulus.
    """

    __slots__ = ("coeffs", "modulus")

    def __init__(self, coeffs: Iterable[int] = (), modulus: int = 0):
        _check_modulus(modulus)
        object.__setattr__(self, "coeffs", _normalize(coeffs, modulus))
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "Poly":
        return cls((), p)

    @classmethod
    def one(cls, p: int) -> "Poly":
        return cls((1,), p)

    @classmethod
    def const(cls, c: int, p: int) -> "Poly":
        return cls((c,), p)

    @classmethod
    def gen(cls, p: int) -> "Poly":
        """The generator t."""
        return cls((0, 1), p)

    @classmethod
    def monomial(cls, c: int, k: int, p: int) -> "Poly":
        """c * t^k."""
        return cls((0,) * k + (c,), p)

    # -- basic queries -----------------------------------------------------

    @property
    def degree(self):
        """Degree, with NEG_INFINITY (not -1) for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else NEG_INFINITY

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading_coeff(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def _same_ring(self, other: "Poly") -> None:
        if self.modulus != other.modulus:
            raise ValueError(
                f"mixed moduli: {self.modulus} and {other.modulus}"
            )

    def _coerce(self, other):
        if isinstance(other, Poly):
            self._same_ring(other)
            return other
        if isinstance(other, int):
            return Poly((other,), self.modulus)
        return NotImplemented

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for i, c in enumerate(b):
            cs[i] += c
        return Poly(cs, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.modulus)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(self.modulus)
        p = self.modulus
        if p and len(a) + len(b) >= _KRONECKER_MIN_LEN:
            return Poly(_kronecker_mul(a, b, p), p)
        return Poly(_schoolbook_mul(a, b), p)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = Poly.one(self.modulus)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_divrem(self, other)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly((other,), self.modulus)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.modulus == other.modulus and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.modulus))

    # -- evaluation and composition ----------------------------------------

    def evaluate(self, x: int) -> int:
        """Value at the scalar x (reduced when the modulus is a prime)."""
        acc = 0
        p = self.modulus
        for c in reversed(self.coeffs):
            acc = acc * x + c
            if p:
                acc %= p
        return acc

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({list(self.coeffs)!r}, {self.modulus})"


def _schoolbook_mul(a: tuple[int, ...], b: tuple[int, ...]) -> list[int]:
    res = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] += ai * bj
    return res


def _kronecker_mul(a: tuple[int, ...], b: tuple[int, ...], p: int) -> list[int]:
    # slot width chosen so convolution sums never carry between slots
    bound = (p - 1) * (p - 1) * min(len(a), len(b))
    width = max(1, (bound.bit_length() + 7) // 8)
    abig = int.from_bytes(
        b"".join(c.to_bytes(width, "little") for c in a), "little"
    )
    bbig = int.from_bytes(
        b"".join(c.to_bytes(width, "little") for c in b), "little"
    )
    n = len(a) + len(b) - 1
    raw = (abig * bbig).to_bytes(width * (n + 1), "little")
    return [
        int.from_bytes(raw[i * width : (i + 1) * width], "little") % p
        for i in range(n)
    ]


def poly_mul(a: Poly, b: Poly) -> Poly:
    return a * b


def poly_divrem(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    """Quotient and remainder with deg r < deg b.

    Over a prime field any nonzero divisor works; over the integers the
    divisor's leading coefficient must be a unit (+-1) so the division is
    exact at every step.
    """
    a._same_ring(b)
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    p = a.modulus
    lb = b.leading_coeff()
    if p:
        inv = pow(lb, -1, p)
    elif lb in (1, -1):
        inv = lb
    else:
        raise ValueError("integer division requires a monic (unit-lead) divisor")
    rem = list(a.coeffs)
    db = len(b.coeffs) - 1
    if len(rem) <= db:
        return Poly.zero(p), a
    quot = [0] * (len(rem) - db)
    bcs = b.coeffs
    for i in range(len(rem) - db - 1, -1, -1):
        c = rem[i + db]
        if c:
            q = c * inv % p if p else c * inv
            quot[i] = q
            for j, bc in enumerate(bcs):
                rem[i + j] -= q * bc
                if p:
                    rem[i + j] %= p
    return Poly(quot, p), Poly(rem[:db], p)


def poly_divides(a: Poly, b: Poly) -> bool:
    """Whether a divides b (with 0 | b exactly when b = 0)."""
    a._same_ring(b)
    if a.is_zero():
        return b.is_zero()
    if b.is_zero():
        return True
    if a.modulus == 0 and a.leading_coeff() not in (1, -1):
        raise ValueError("integer divisibility needs a unit-lead divisor")
    return poly_divrem(b, a)[1].is_zero()


def poly_extgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """(g, u, v) with u*a + v*b = g, g the monic gcd.  Prime fields only."""
    a._same_ring(b)
    if a.modulus == 0:
        raise ValueError("extended gcd requires field coefficients")
    p = a.modulus
    r0, r1 = a, b
    u0, u1 = Poly.one(p), Poly.zero(p)
    v0, v1 = Poly.zero(p), Poly.one(p)
    while not r1.is_zero():
        q, r = poly_divrem(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if r0.is_zero():
        return r0, u0, v0
    lead_inv = Poly.const(pow(r0.leading_coeff(), -1, p), p)
    return lead_inv * r0, lead_inv * u0, lead_inv * v0


def poly_compose(f: Poly, g: Poly) -> Poly:
    """f(g(t)) by Horner's scheme in the polynomial ring."""
    f._same_ring(g)
    acc = Poly.zero(f.modulus)
    for c in reversed(f.coeffs):
        acc = acc * g + c
    return acc


def poly_shift(f: Poly) -> Poly:
    """f(t+1)."""
    return poly_compose(f, Poly((1, 1), f.modulus))


def frob_pow(f: Poly, r: int) -> Poly:
    """f^(p^r) over F_p, by coefficient spreading.

    Over the prime field the Frobenius fixes every scalar, so the p-th power
    just sends t^i to t^(i*p); r successive applications multiply exponents
    by p^r.  Linear time, no multiplications.
    """
    if f.modulus == 0:
        raise ValueError("Frobenius powers require a prime modulus")
    if r < 0:
        raise ValueError("negative Frobenius exponent")
    if r == 0 or f.is_zero():
        return f
    q = f.modulus**r
    cs = [0] * ((len(f.coeffs) - 1) * q + 1)
    for i, c in enumerate(f.coeffs):
        cs[i * q] = c
    return Poly(cs, f.modulus)


# -- text format ------------------------------------------------------------

_TERM_RE = re.compile(
    r"^(?:(?P<coeff>\d+)\s*\*?\s*)?(?:(?P<var>[A-Za-z]\w*)(?:\^(?P<exp>\d+))?)?$"
)


def parse_poly(text: str, p: int, var: str = "t") -> Poly:
    """Parse either a coefficient list ``[c0,c1,...]`` or a symbolic sum.

    Symbolic terms look like ``4*t^3``, ``2t``, ``t^2``, ``t``, or ``7``;
    terms are joined by ``+`` and ``-``.  The variable name is configurable
    so the same syntax serves both t-polynomials and q-expansions.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    if s.startswith("["):
        if not s.endswith("]"):
            raise ValueError(f"unterminated coefficient list: {text!r}")
        inner = s[1:-1].strip()
        if not inner:
            return Poly.zero(p)
        return Poly([int(c) for c in inner.split(",")], p)
    coeffs: dict[int, int] = {}
    pos = 0
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        pos = 1
    while pos <= len(s):
        nxt = len(s)
        for i in range(pos, len(s)):
            if s[i] in "+-":
                nxt = i
                break
        term = s[pos:nxt].strip()
        m = _TERM_RE.match(term)
        if not m or not term:
            raise ValueError(f"bad polynomial term {term!r} in {text!r}")
        coeff_s, var_s, exp_s = m.group("coeff"), m.group("var"), m.group("exp")
        if coeff_s is None and var_s is None:
            raise ValueError(f"bad polynomial term {term!r} in {text!r}")
        if var_s is not None and var_s != var:
            raise ValueError(
                f"unexpected variable {var_s!r} (want {var!r}) in {text!r}"
            )
        c = sign * (int(coeff_s) if coeff_s is not None else 1)
        k = 0 if var_s is None else (int(exp_s) if exp_s is not None else 1)
        coeffs[k] = coeffs.get(k, 0) + c
        if nxt == len(s):
            break
        sign = -1 if s[nxt] == "-" else 1
        pos = nxt + 1
    deg = max(coeffs) if coeffs else 0
    return Poly([coeffs.get(k, 0) for k in range(deg + 1)], p)


def format_poly(f: Poly, var: str = "t") -> str:
    """Symbolic text, descending powers: ``4*t^3 + 2*t``; zero prints ``0``."""
    if f.is_zero():
        return "0"
    parts: list[str] = []
    for k in range(len(f.coeffs) - 1, -1, -1):
        c = f.coeffs[k]
        if c == 0:
            continue
        neg = c < 0
        mag = -c if neg else c
        if k == 0:
            body = str(mag)
        else:
            power = var if k == 1 else f"{var}^{k}"
            body = power if mag == 1 else f"{mag}*{power}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)
