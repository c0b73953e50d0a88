"""Exact rational arithmetic and truncated polynomial algebra.

Everything downstream (moment sequences, Bernstein masses, tail
probabilities) is computed over arbitrary-precision rationals; floating
point enters only when a finished quantity is handed to the user.  gmpy2
supplies the integer and rational kernels.

Large truncated products are routed through a Kronecker-substitution
multiply: coefficients are packed into fixed-width slots of a single big
integer, multiplied once by GMP, and unpacked.  This is exact and much
faster than coefficient-by-coefficient convolution once operands carry
thousands of coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import gmpy2
from gmpy2 import mpq, mpz

Rational = mpq

_PACK_THRESHOLD = 200_000  # direct-convolution multiply count above which we pack


def rational(value, den=None) -> mpq:
    """Coerce ints, strings ("3/4"), floats and Fractions to an exact mpq."""
    if den is not None:
        return mpq(value, den)
    if isinstance(value, float):
        return mpq(*value.as_integer_ratio())
    return mpq(value)


def binomial(a: int, b: int) -> mpz:
    """Exact binomial coefficient; zero outside the Pascal triangle."""
    if b < 0 or b > a:
        return mpz(0)
    return gmpy2.bincoef(a, b)


def factorial(n: int) -> mpz:
    if n < 0:
        raise ValueError("factorial of negative integer")
    return gmpy2.fac(n)


# ---------------------------------------------------------------------------
# integer convolution kernels (exact; direct loops or Kronecker packing)
# ---------------------------------------------------------------------------

def _pack(values: Sequence[mpz], width_bytes: int) -> mpz:
    buf = bytearray(width_bytes * len(values))
    for i, x in enumerate(values):
        if x:
            bs = int(x).to_bytes((x.bit_length() + 7) >> 3, "little")
            off = i * width_bytes
            buf[off:off + len(bs)] = bs
    return mpz(int.from_bytes(buf, "little"))


def _unpack(product: mpz, width_bytes: int, slots: int, count: int) -> list[mpz]:
    raw = int(product).to_bytes(width_bytes * slots, "little")
    return [
        mpz(int.from_bytes(raw[i * width_bytes:(i + 1) * width_bytes], "little"))
        for i in range(count)
    ]


def _conv_packed_nonneg(a: Sequence[mpz], b: Sequence[mpz], out_len: int) -> list[mpz]:
    bits_a = max(x.bit_length() for x in a)
    bits_b = max(x.bit_length() for x in b)
    width = bits_a + bits_b + min(len(a), len(b)).bit_length() + 1
    width_bytes = (width + 7) >> 3
    prod = _pack(a, width_bytes) * _pack(b, width_bytes)
    full = len(a) + len(b) - 1
    out = _unpack(prod, width_bytes, full, min(out_len, full))
    out.extend(mpz(0) for _ in range(out_len - len(out)))
    return out


def _conv_direct(a: Sequence[mpz], b: Sequence[mpz], out_len: int) -> list[mpz]:
    out = [mpz(0)] * out_len
    for i, ai in enumerate(a):
        if not ai or i >= out_len:
            continue
        jmax = min(len(b) - 1, out_len - 1 - i)
        for j in range(jmax + 1):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return out


def conv_int(a: Sequence[mpz], b: Sequence[mpz], out_len: int) -> list[mpz]:
    """Exact truncated convolution of integer sequences."""
    if not a or not b:
        return [mpz(0)] * out_len
    if len(a) * len(b) < _PACK_THRESHOLD:
        return _conv_direct(a, b, out_len)
    neg_a = any(x < 0 for x in a)
    neg_b = any(x < 0 for x in b)
    if not neg_a and not neg_b:
        return _conv_packed_nonneg(a, b, out_len)
    ap = [x if x > 0 else mpz(0) for x in a]
    an = [-x if x < 0 else mpz(0) for x in a]
    bp = [x if x > 0 else mpz(0) for x in b]
    bn = [-x if x < 0 else mpz(0) for x in b]
    pp = _conv_packed_nonneg(ap, bp, out_len)
    nn = _conv_packed_nonneg(an, bn, out_len)
    pn = _conv_packed_nonneg(ap, bn, out_len)
    np_ = _conv_packed_nonneg(an, bp, out_len)
    return [pp[i] + nn[i] - pn[i] - np_[i] for i in range(out_len)]


def conv2_int(
    a: Sequence[Sequence[mpz]],
    b: Sequence[Sequence[mpz]],
    out_rows: int,
    out_cols: int,
) -> list[list[mpz]]:
    """Exact truncated 2-D convolution via row-major flattening.

    Rows index x-degree, columns y-degree.  The flattened column stride is
    the full (untruncated) product width so slot indices never collide.
    """
    rows_a, cols_a = len(a), len(a[0])
    rows_b, cols_b = len(b), len(b[0])
    stride = cols_a + cols_b - 1
    flat_a = [x for row in a for x in _padded(row, stride)]
    flat_b = [x for row in b for x in _padded(row, stride)]
    full_rows = rows_a + rows_b - 1
    flat = conv_int(flat_a, flat_b, full_rows * stride)
    return [
        [flat[r * stride + c] for c in range(min(out_cols, stride))]
        + [mpz(0)] * max(0, out_cols - stride)
        for r in range(min(out_rows, full_rows))
    ] + [[mpz(0)] * out_cols for _ in range(out_rows - full_rows)]


def _padded(row: Sequence[mpz], width: int) -> list[mpz]:
    return list(row) + [mpz(0)] * (width - len(row))


# ---------------------------------------------------------------------------
# truncated polynomials over exact rationals
# ---------------------------------------------------------------------------

def _clear_denominators(coeffs: Sequence[mpq]) -> tuple[list[mpz], mpz]:
    den = mpz(1)
    for c in coeffs:
        den = gmpy2.lcm(den, c.denominator)
    return [mpz(c.numerator * (den // c.denominator)) for c in coeffs], den


@dataclass(frozen=True)
class TruncatedPoly1:
    """Univariate polynomial truncated at max_deg, dense mpq coefficients."""

    max_deg: int
    coeffs: tuple[mpq, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.max_deg + 1:
            raise ValueError("coefficient length must be max_deg + 1")

    @classmethod
    def from_coeffs(cls, coeffs, max_deg=None) -> "TruncatedPoly1":
        cs = [mpq(c) for c in coeffs]
        if max_deg is None:
            max_deg = len(cs) - 1
        cs = cs[: max_deg + 1] + [mpq(0)] * (max_deg + 1 - len(cs))
        return cls(max_deg, tuple(cs))

    @classmethod
    def one(cls, max_deg: int) -> "TruncatedPoly1":
        return cls(max_deg, (mpq(1),) + (mpq(0),) * max_deg)

    def __getitem__(self, deg: int) -> mpq:
        return self.coeffs[deg] if deg <= self.max_deg else mpq(0)


def poly1_mul(a: TruncatedPoly1, b: TruncatedPoly1, max_deg: int) -> TruncatedPoly1:
    if a.max_deg < max_deg or b.max_deg < max_deg:
        raise ValueError("inputs truncated below the requested degree")
    ia, da = _clear_denominators(a.coeffs[: max_deg + 1])
    ib, db = _clear_denominators(b.coeffs[: max_deg + 1])
    raw = conv_int(ia, ib, max_deg + 1)
    den = da * db
    return TruncatedPoly1(max_deg, tuple(mpq(x, den) for x in raw))


@dataclass(frozen=True)
class TruncatedPoly2:
    """Bivariate polynomial truncated at (max_deg_x, max_deg_y).

    coeffs[s][t] is the coefficient of x^s y^t; entries beyond the
    truncation are implicitly zero.
    """

    max_deg_x: int
    max_deg_y: int
    coeffs: tuple[tuple[mpq, ...], ...]

    def __post_init__(self):
        if len(self.coeffs) != self.max_deg_x + 1 or any(
            len(row) != self.max_deg_y + 1 for row in self.coeffs
        ):
            raise ValueError("coefficient array must be (max_deg_x+1) x (max_deg_y+1)")

    @classmethod
    def from_coeffs(cls, rows, max_deg_x: int, max_deg_y: int) -> "TruncatedPoly2":
        out = []
        for s in range(max_deg_x + 1):
            row = rows[s] if s < len(rows) else []
            cs = [mpq(c) for c in row[: max_deg_y + 1]]
            out.append(tuple(cs + [mpq(0)] * (max_deg_y + 1 - len(cs))))
        return cls(max_deg_x, max_deg_y, tuple(out))

    @classmethod
    def one(cls, max_deg_x: int, max_deg_y: int) -> "TruncatedPoly2":
        return cls.from_coeffs([[mpq(1)]], max_deg_x, max_deg_y)

    def __getitem__(self, key) -> mpq:
        s, t = key
        if s > self.max_deg_x or t > self.max_deg_y:
            return mpq(0)
        return self.coeffs[s][t]


def poly2_mul(
    a: TruncatedPoly2, b: TruncatedPoly2, max_deg_x: int, max_deg_y: int
) -> TruncatedPoly2:
    """Exact truncated product of two bivariate polynomials."""
    if a.max_deg_x < max_deg_x or a.max_deg_y < max_deg_y:
        raise ValueError("left factor truncated below the requested degrees")
    if b.max_deg_x < max_deg_x or b.max_deg_y < max_deg_y:
        raise ValueError("right factor truncated below the requested degrees")
    flat_a = [c for row in a.coeffs[: max_deg_x + 1] for c in row[: max_deg_y + 1]]
    flat_b = [c for row in b.coeffs[: max_deg_x + 1] for c in row[: max_deg_y + 1]]
    ia, da = _clear_denominators(flat_a)
    ib, db = _clear_denominators(flat_b)
    rows_a = [ia[s * (max_deg_y + 1):(s + 1) * (max_deg_y + 1)] for s in range(max_deg_x + 1)]
    rows_b = [ib[s * (max_deg_y + 1):(s + 1) * (max_deg_y + 1)] for s in range(max_deg_x + 1)]
    raw = conv2_int(rows_a, rows_b, max_deg_x + 1, max_deg_y + 1)
    den = da * db
    rows = tuple(tuple(mpq(x, den) for x in row) for row in raw)
    return TruncatedPoly2(max_deg_x, max_deg_y, rows)


def product_tree(
    polys: Sequence[TruncatedPoly2], max_deg_x: int, max_deg_y: int
) -> TruncatedPoly2:
    """Product of all factors via a balanced binary multiplication tree.

    Runs of identical factors are raised to their power by repeated
    squaring first; the result is coefficient-identical to a left fold.
    """
    if not polys:
        raise ValueError("product_tree requires a non-empty factor list")
    level: list[TruncatedPoly2] = []
    i = 0
    while i < len(polys):
        j = i
        while j + 1 < len(polys) and polys[j + 1] is polys[i]:
            j += 1
        level.append(_poly2_pow(polys[i], j - i + 1, max_deg_x, max_deg_y))
        i = j + 1
    while len(level) > 1:
        nxt = [
            poly2_mul(level[i], level[i + 1], max_deg_x, max_deg_y)
            for i in range(0, len(level) - 1, 2)
        ]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def _poly2_pow(p: TruncatedPoly2, e: int, mx: int, my: int) -> TruncatedPoly2:
    result = None
    base = p
    while e:
        if e & 1:
            result = base if result is None else poly2_mul(result, base, mx, my)
        e >>= 1
        if e:
            base = poly2_mul(base, base, mx, my)
    return result
