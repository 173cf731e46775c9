"""Solution pairs of the polynomial Pell equation x^2 - (t^2-1) y^2 = 1.

Generates the pair family over a small prime field, checks the defining
equation, adds indices with the bilinear law, recognizes indices back from
raw polynomials, and cross-checks everything against the brute-force
enumeration of all bounded-degree solutions.
"""

from zinterp.algebra import format_poly
from zinterp.pell import (
    pell_add,
    pell_enumerate_oracle,
    pell_index_recognize,
    pell_pair,
    pell_verify,
)

p = 5

print(f"pair family over F_{p}[t]")
for n in range(-3, 4):
    pair = pell_pair(n, p)
    print(f"  n={n:+d}:  x = {format_poly(pair.x):<18} y = {format_poly(pair.y)}")
    assert pell_verify(pair.x, pair.y)

print()
print("index addition law")
a, b = pell_pair(2, p), pell_pair(3, p)
s = pell_add(a, b)
print(f"  pair(2) + pair(3) -> index {s.n}, x = {format_poly(s.x)}")
assert s == pell_pair(5, p)

print()
print("index recognition")
pair = pell_pair(4, p)
print(f"  recognize({format_poly(pair.x)}, {format_poly(pair.y)}) =",
      pell_index_recognize(pair.x, pair.y))
print(f"  recognize(-x_4, y_4) =", pell_index_recognize(-pair.x, pair.y),
      "(the sign-flipped solution has no index)")

print()
print("brute-force enumeration, deg y <= 2")
found = pell_enumerate_oracle(p, 2)
print(f"  {len(found)} solutions; every one is +-pair(n) for |n| <= 3")
expected = set()
for n in range(-3, 4):
    pr = pell_pair(n, p)
    expected.add((pr.x, pr.y))
    expected.add((-pr.x, pr.y))
assert found == frozenset(expected)
print("  enumeration matches the generated family exactly")
