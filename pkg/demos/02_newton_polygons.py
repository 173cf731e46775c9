"""Newton polygons of truncated Laurent series with valued coefficients.

Builds series whose coefficients are q-expansions over F_p, takes lower
convex hulls of the (exponent, valuation) clouds, and shows the two facts
the package verifies at scale: hulls add under multiplication, and the
square-exponent series has a vertex at every visible support point.
"""

from zinterp.valued import (
    format_series,
    newton_polygon,
    norm_one_monomial,
    parse_series,
    polygon_sum,
    reflect,
    series_mul,
    theta_series,
)


def show(polygon):
    return " ".join(f"({n}, {v})" for n, v in polygon.vertices)


h = parse_series("{0: 1, 1: q^3, 2: q} @ p=5 Q=40")
g = parse_series("{-1: q^2, 0: 1} @ p=5 Q=40")
print("h:", format_series(h))
print("g:", format_series(g))
print("hull(h):", show(newton_polygon(h)))
print("hull(g):", show(newton_polygon(g)))

prod = series_mul(h, g)
print()
print("h*g:", format_series(prod))
print("hull(h*g):          ", show(newton_polygon(prod)))
print("hull(h) + hull(g):  ", show(polygon_sum(newton_polygon(h), newton_polygon(g))))
assert newton_polygon(prod) == polygon_sum(newton_polygon(h), newton_polygon(g))

print()
print("reflection t -> 1/t mirrors the hull")
assert newton_polygon(reflect(h)) == newton_polygon(h).reflect()
print("hull(h reflected):", show(newton_polygon(reflect(h))))

print()
th = theta_series(5, 4, 40)
print("square-exponent series:", format_series(th))
print("its hull:", show(newton_polygon(th)))
print("every support point is a vertex (strict convexity of n^2)")

print()
unit = parse_series("{2: q^0} @ p=5 Q=40")
sign, n = norm_one_monomial(unit)
print(f"norm-one series {format_series(unit)} reads off as "
      f"{'-' if sign < 0 else ''}t^{n} at precision 40")
