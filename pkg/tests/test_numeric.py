import functools

import pytest
from gmpy2 import mpq, mpz
from hypothesis import given, settings
from hypothesis import strategies as st

from spacings import (
    TruncatedPoly1,
    TruncatedPoly2,
    binomial,
    factorial,
    poly1_mul,
    poly2_mul,
    product_tree,
    rational,
)
from spacings.numeric import _conv_direct, _conv_packed_nonneg, conv_int


def pascal(a, b):
    if b < 0 or b > a:
        return 0
    row = [1]
    for _ in range(a):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    return row[b]


class TestBinomial:
    def test_small(self):
        assert binomial(4, 2) == 6

    def test_identity(self):
        for n in (0, 1, 7, 40):
            assert binomial(n, 0) == 1

    def test_out_of_range(self):
        assert binomial(5, -1) == 0
        assert binomial(5, 6) == 0

    def test_against_pascal_recurrence(self):
        assert binomial(52, 5) == pascal(52, 5) == 2598960
        for a in range(12):
            for b in range(-1, a + 2):
                assert binomial(a, b) == pascal(a, b)


class TestRational:
    def test_lowest_terms_and_positive_denominator(self):
        q = rational(-6, -4)
        assert q.numerator == 3 and q.denominator == 2
        q = rational("10/15")
        assert q.numerator == 2 and q.denominator == 3

    def test_float_is_exact(self):
        assert rational(0.5) == mpq(1, 2)
        assert rational(0.1) == mpq(*((0.1).as_integer_ratio()))

    def test_factorial(self):
        assert factorial(6) == 720
        with pytest.raises(ValueError):
            factorial(-1)


def p2(rows, mx, my):
    return TruncatedPoly2.from_coeffs(rows, mx, my)


class TestPoly2Mul:
    def test_hand_expansion(self):
        a = p2([[1], [1]], 1, 1)          # 1 + x
        b = p2([[1, 1]], 1, 1)            # 1 + y
        c = poly2_mul(a, b, 1, 1)
        assert c[0, 0] == 1 and c[1, 0] == 1 and c[0, 1] == 1 and c[1, 1] == 1

    def test_identity(self):
        a = p2([[1, 2], [3, mpq(5, 7)]], 3, 3)
        one = TruncatedPoly2.one(3, 3)
        assert poly2_mul(a, one, 3, 3).coeffs == a.coeffs

    def test_schoolbook_square(self):
        geo = p2([[1], [1], [1], [1]], 3, 0)   # 1 + x + x^2 + x^3
        sq = poly2_mul(geo, geo, 3, 0)
        assert [sq[s, 0] for s in range(4)] == [1, 2, 3, 4]

    def test_under_truncated_inputs_rejected(self):
        a = p2([[1]], 1, 1)
        with pytest.raises(ValueError):
            poly2_mul(a, a, 2, 2)


def random_poly2(rng, mx, my):
    rows = [
        [mpq(int(rng.integers(-6, 7)), int(rng.integers(1, 5))) for _ in range(my + 1)]
        for _ in range(mx + 1)
    ]
    return TruncatedPoly2.from_coeffs(rows, mx, my)


class TestProductTree:
    def test_singleton(self):
        import numpy as np

        a = random_poly2(np.random.default_rng(0), 2, 2)
        assert product_tree([a], 2, 2).coeffs == a.coeffs

    def test_identical_factors_match_repeated_squaring(self):
        import numpy as np

        a = random_poly2(np.random.default_rng(1), 2, 2)
        tree = product_tree([a] * 5, 2, 2)
        sq = a
        out = None
        e = 5
        while e:
            if e & 1:
                out = sq if out is None else poly2_mul(out, sq, 2, 2)
            e >>= 1
            if e:
                sq = poly2_mul(sq, sq, 2, 2)
        assert tree.coeffs == out.coeffs

    def test_matches_sequential_fold(self):
        import numpy as np

        rng = np.random.default_rng(7)
        polys = [random_poly2(rng, 2, 2) for _ in range(3)]
        folded = functools.reduce(lambda a, b: poly2_mul(a, b, 2, 2), polys)
        assert product_tree(polys, 2, 2).coeffs == folded.coeffs

    def test_order_independence(self):
        import numpy as np

        rng = np.random.default_rng(9)
        polys = [random_poly2(rng, 2, 3) for _ in range(4)]
        forward = product_tree(polys, 2, 3)
        backward = product_tree(polys[::-1], 2, 3)
        assert forward.coeffs == backward.coeffs

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            product_tree([], 1, 1)

    def test_associativity_random(self):
        import numpy as np

        rng = np.random.default_rng(11)
        a, b, c = (random_poly2(rng, 3, 2) for _ in range(3))
        left = poly2_mul(poly2_mul(a, b, 3, 2), c, 3, 2)
        right = poly2_mul(a, poly2_mul(b, c, 3, 2), 3, 2)
        assert left.coeffs == right.coeffs


class TestPoly1:
    def test_mul_and_identity(self):
        a = TruncatedPoly1.from_coeffs([1, 1, 1, 1])
        sq = poly1_mul(a, a, 3)
        assert list(sq.coeffs) == [1, 2, 3, 4]
        one = TruncatedPoly1.one(3)
        assert poly1_mul(a, one, 3).coeffs == a.coeffs


@given(
    st.lists(st.integers(min_value=0, max_value=10 ** 12), min_size=1, max_size=12),
    st.lists(st.integers(min_value=0, max_value=10 ** 12), min_size=1, max_size=12),
    st.integers(min_value=1, max_value=24),
)
@settings(max_examples=60, deadline=None)
def test_packed_conv_matches_direct_nonneg(a, b, out_len):
    az = [mpz(x) for x in a]
    bz = [mpz(x) for x in b]
    assert _conv_packed_nonneg(az, bz, out_len) == _conv_direct(az, bz, out_len)


@given(
    st.lists(st.integers(min_value=-10 ** 9, max_value=10 ** 9), min_size=1, max_size=10),
    st.lists(st.integers(min_value=-10 ** 9, max_value=10 ** 9), min_size=1, max_size=10),
)
@settings(max_examples=60, deadline=None)
def test_conv_int_signed_matches_direct(a, b):
    az = [mpz(x) for x in a]
    bz = [mpz(x) for x in b]
    import spacings.numeric as num

    old = num._PACK_THRESHOLD
    num._PACK_THRESHOLD = 0  # force the packed path
    try:
        packed = conv_int(az, bz, len(a) + len(b) - 1)
    finally:
        num._PACK_THRESHOLD = old
    assert packed == _conv_direct(az, bz, len(a) + len(b) - 1)
