"""Tests for square-sequence families, polynomial roots, and the seed sweep."""

import pytest

from zinterp.algebra import FeasibilityError, Poly, frob_pow
from zinterp.buchi import (
    BuchiSeq,
    _extend_all_squares,
    _match_family,
    buchi_generate,
    buchi_search_oracle,
    ge_p_check,
    poly_kth_root,
    second_differences_equal_two,
    square_root_poly,
)

from conftest import random_poly


def poly_of(coeffs, p):
    return Poly(tuple(coeffs), p)


# -- generation ----------------------------------------------------------------

def test_generate_squares_of_integers():
    seq = buchi_generate(Poly.zero(17), 0, 5, 17)
    assert [t.coeffs for t in seq.terms] == [(1,), (4,), (9,), (16,), (8,)]
    assert seq.valid and seq.length == 5


def test_generate_linear_shift():
    seq = buchi_generate(Poly.gen(17), 0, 17, 17)
    assert seq.terms[0] == poly_of([1, 2, 1], 17)
    assert seq.valid


def test_generate_with_frobenius_power():
    seq = buchi_generate(Poly.gen(17), 1, 17, 17)
    assert seq.valid
    assert seq.terms[0].degree == 18
    assert seq.terms[0] == frob_pow(Poly((1, 1), 17), 1) * Poly((1, 1), 17)


def test_second_difference_identity_grid(rng):
    for p in (17, 19, 23):
        for r in (0, 1):
            for _ in range(6):
                v = random_poly(rng, p, 3)
                seq = buchi_generate(v, r, 17, p)
                assert seq.valid
                assert second_differences_equal_two(seq.terms, p)


def test_generate_rejects_bad_inputs():
    with pytest.raises(ValueError):
        buchi_generate(Poly.gen(2), 0, 5, 2)
    with pytest.raises(ValueError):
        buchi_generate(Poly.gen(17), 0, 5, 19)
    with pytest.raises(ValueError):
        buchi_generate(Poly.gen(17), -1, 5, 17)


# -- Frobenius-power order -------------------------------------------------------

def test_ge_p_check_examples():
    assert ge_p_check(poly_of([0, 0, 1], 2), Poly.gen(2)) == 1
    assert ge_p_check(Poly.gen(5), Poly.gen(5)) == 0
    assert ge_p_check(poly_of([0, 0, 0, 1], 3), Poly.gen(3)) == 1
    assert ge_p_check(poly_of([0, 0, 0, 1], 2), Poly.gen(2)) is None


def test_ge_p_check_constants_and_zero():
    assert ge_p_check(Poly.const(3, 5), Poly.const(3, 5)) == 0
    assert ge_p_check(Poly.const(2, 5), Poly.const(3, 5)) is None
    assert ge_p_check(Poly.zero(5), Poly.zero(5)) == 0
    assert ge_p_check(Poly.gen(5), Poly.zero(5)) is None


def test_ge_p_check_transitive_with_added_exponents(rng):
    for _ in range(50):
        p = rng.choice([2, 3, 5])
        h = random_poly(rng, p, 3, nonzero=True) + Poly.gen(p)
        if h.degree < 1:
            continue
        r1, r2 = rng.randrange(3), rng.randrange(3)
        g = frob_pow(h, r2)
        f = frob_pow(g, r1)
        assert ge_p_check(g, h) == r2
        assert ge_p_check(f, h) == r1 + r2


def test_ge_p_check_validates_moduli():
    with pytest.raises(ValueError):
        ge_p_check(Poly.gen(5), Poly.gen(7))
    with pytest.raises(ValueError):
        ge_p_check(Poly.gen(0), Poly.gen(0))


# -- root extraction -------------------------------------------------------------

def test_square_root_examples():
    assert square_root_poly(poly_of([1, 2, 1], 17)) == poly_of([1, 1], 17)
    assert square_root_poly(Poly.gen(17)) is None
    assert square_root_poly(Poly.zero(17)) == Poly.zero(17)


def test_square_root_normalization():
    p = 7
    s = poly_of([3, 5], p)
    root = square_root_poly(s * s)
    assert root in (s, -s)
    assert 1 <= root.leading_coeff() <= (p - 1) // 2


def test_square_root_of_generated_term():
    p, r = 17, 1
    v = poly_of([2, 1], p)
    seq = buchi_generate(v, r, 3, p)
    base = Poly.const(3, p) + v
    w = base ** ((p ** r + 1) // 2)
    got = square_root_poly(seq.terms[2])
    assert got in (w, -w)


def test_square_root_random_roundtrip(rng):
    hits = 0
    for _ in range(200):
        p = rng.choice([3, 5, 17])
        s = random_poly(rng, p, 4)
        root = square_root_poly(s * s)
        assert root is not None and root * root == s * s
        if s.coeffs:
            hits += 1
            assert root in (s, -s)
    assert hits > 150


def test_square_root_rejects_nonsquares(rng):
    p = 5
    missed = 0
    for _ in range(100):
        f = random_poly(rng, p, 5, nonzero=True)
        root = square_root_poly(f)
        if root is None:
            missed += 1
            s = square_root_poly(f * f)
            assert s is not None
    assert missed > 50


def test_square_root_needs_odd_prime():
    with pytest.raises(ValueError):
        square_root_poly(Poly.gen(2))
    with pytest.raises(ValueError):
        square_root_poly(Poly.gen(0))


def test_kth_root_examples():
    assert poly_kth_root(Poly.monomial(1, 18, 17), 18) == Poly.gen(17)
    # 6^18 = 6^2 = 2 mod 17, so 2*t^18 has the root 6t
    assert poly_kth_root(Poly.monomial(2, 18, 17), 18) == Poly.monomial(6, 1, 17)
    # 3 is a quadratic non-residue mod 17 and 18th powers are the squares
    assert poly_kth_root(Poly.monomial(3, 18, 17), 18) is None
    assert poly_kth_root(Poly.monomial(1, 19, 17), 18) is None
    assert poly_kth_root(poly_of([1, 3, 3, 1], 7), 3) == poly_of([1, 1], 7)
    assert poly_kth_root(Poly.gen(7), 3) is None
    assert poly_kth_root(Poly.zero(7), 4) == Poly.zero(7)


def test_kth_root_random_roundtrip(rng):
    for _ in range(100):
        p = rng.choice([5, 7, 17])
        k = rng.choice([2, 3, 4, 6])
        if k % p == 0:
            continue
        g = random_poly(rng, p, 3, nonzero=True)
        root = poly_kth_root(g ** k, k)
        assert root is not None
        assert root ** k == g ** k


def test_kth_root_index_divisible_by_characteristic():
    with pytest.raises(ValueError):
        poly_kth_root(Poly.gen(5), 10)


# -- search oracle ----------------------------------------------------------------

def test_oracle_rejects_wrong_modulus_and_big_degree():
    with pytest.raises(ValueError):
        buchi_search_oracle(19, 0)
    with pytest.raises(FeasibilityError):
        buchi_search_oracle(17, 3)


def test_oracle_constant_seeds():
    report = buchi_search_oracle(17, 0)
    assert report.seeds_scanned == 289
    assert report.retained == ()
    assert report.constant_families == 17


def test_oracle_degree_one_sweep():
    report = buchi_search_oracle(17, 1)
    assert report.seeds_scanned == 83521
    assert len(report.retained) == 272
    assert report.constant_families == 17
    assert report.flagged == ()
    for fam in report.retained:
        assert fam.matched
        assert fam.r == 0
        assert fam.v.degree == 1
        regen = buchi_generate(fam.v, fam.r, 17, 17)
        assert regen.terms[0] == fam.u1 and regen.terms[1] == fam.u2


def test_oracle_seeded_positive_is_retained():
    seq = buchi_generate(Poly.gen(17), 0, 2, 17)
    report = buchi_search_oracle(17, 1)
    assert any(
        fam.u1 == seq.terms[0] and fam.u2 == seq.terms[1]
        for fam in report.retained
    )


def test_oracle_workers_agree_with_serial():
    serial = buchi_search_oracle(17, 1)
    parallel = buchi_search_oracle(17, 1, workers=2)
    assert serial == parallel


def test_no_false_rejects_on_seeded_positives(rng):
    count = 0
    while count < 100:
        r = rng.choice([0, 1])
        v = random_poly(rng, 17, 3)
        if not isinstance(v.degree, int) or v.degree < 1:
            continue
        count += 1
        seq = buchi_generate(v, r, 17, 17)
        terms = _extend_all_squares(seq.terms[0], seq.terms[1], 17, 17)
        assert terms is not None
        assert tuple(terms) == seq.terms
        assert _match_family(terms, 17) == (v, r)


def test_sequence_type_flags_invalid():
    bad = BuchiSeq((Poly.one(17), Poly.one(17), Poly.one(17)), 17, False)
    assert not second_differences_equal_two(bad.terms, 17)
