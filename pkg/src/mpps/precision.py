"""Arbitrary-precision complex matrices with explicit rounding contexts.

Every arithmetic operation takes a PrecisionCtx and rounds each scalar
result (round-to-nearest, ties-to-even) at that context, so a sequence of
calls reproduces the standard floating-point model op by op.  Matrices are
immutable; all functions are pure and thread-safe (gmpy2 contexts are used
through explicit method calls, never through the thread-global context).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Sequence, Tuple

import gmpy2
from gmpy2 import mpc, mpfr, mpz


class DimensionError(ValueError):
    """Operand shapes are incompatible."""


@dataclass(frozen=True)
class PrecisionCtx:
    """A working precision expressed in decimal digits.

    The unit roundoff is u = 10^(-d); internally scalars carry
    ceil(d*log2(10)) bits of mantissa, so the true binary roundoff is at
    most 10^(-d) and the decimal figure can be used in error bounds.
    """

    decimal_digits: int

    def __post_init__(self):
        if self.decimal_digits < 1:
            raise ValueError("decimal_digits must be >= 1")

    @property
    def binary_precision(self) -> int:
        return math.ceil(self.decimal_digits * math.log2(10))

    @property
    def unit_roundoff(self) -> mpfr:
        return _pow10(-self.decimal_digits)

    @property
    def gmp(self) -> gmpy2.context:
        return _gmp_context(self.binary_precision)

    def __repr__(self):
        return f"PrecisionCtx(d={self.decimal_digits})"


@lru_cache(maxsize=None)
def _gmp_context(bits: int) -> gmpy2.context:
    return gmpy2.context(precision=bits, allow_complex=True)


@lru_cache(maxsize=None)
def _pow10(e: int) -> mpfr:
    return gmpy2.context(precision=64).exp10(e)


#: Fixed context for norm computation; only the order of magnitude of a
#: norm is ever consumed, so 16 digits is always enough.
NORM_CTX = PrecisionCtx(16)

#: Fixed context for evaluating error bounds (diagnostics, not results).
BOUND_CTX = PrecisionCtx(32)


def as_mpc(x, ctx: PrecisionCtx) -> mpc:
    """Round a scalar (int, float, complex, Fraction, mpfr, mpc) at ctx."""
    p = ctx.binary_precision
    if isinstance(x, Fraction):
        re = ctx.gmp.div(mpz(x.numerator), mpz(x.denominator))
        return mpc(re, precision=p)
    if isinstance(x, complex):
        return mpc(mpfr(x.real), mpfr(x.imag), precision=p)
    return mpc(x, precision=p)


class MPMatrix:
    """Immutable dense complex matrix tagged with its producing context."""

    __slots__ = ("rows", "n_rows", "n_cols", "produced_at")

    def __init__(self, rows: Sequence[Sequence[mpc]], produced_at: PrecisionCtx,
                 _trusted: bool = False):
        if _trusted:
            self.rows = rows
        else:
            self.rows = tuple(
                tuple(as_mpc(e, produced_at) for e in row) for row in rows)
        self.n_rows = len(self.rows)
        self.n_cols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.n_cols for r in self.rows):
            raise DimensionError("ragged rows")
        self.produced_at = produced_at

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, MPMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows)
            for a, b in zip(ra, rb))

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        return f"MPMatrix({self.n_rows}x{self.n_cols} @ {self.produced_at})"


def from_rows(rows: Sequence[Sequence], ctx: PrecisionCtx) -> MPMatrix:
    return MPMatrix(rows, ctx)


def identity(n: int, ctx: PrecisionCtx) -> MPMatrix:
    one, zero = as_mpc(1, ctx), as_mpc(0, ctx)
    return MPMatrix(
        tuple(tuple(one if i == j else zero for j in range(n))
              for i in range(n)), ctx, _trusted=True)


def zeros(n_rows: int, n_cols: int, ctx: PrecisionCtx) -> MPMatrix:
    zero = as_mpc(0, ctx)
    return MPMatrix(tuple(tuple(zero for _ in range(n_cols))
                          for _ in range(n_rows)), ctx, _trusted=True)


def scalar_matrix(alpha, n: int, ctx: PrecisionCtx) -> MPMatrix:
    """fl_ctx(alpha*I)."""
    a, zero = as_mpc(alpha, ctx), as_mpc(0, ctx)
    return MPMatrix(tuple(tuple(a if i == j else zero for j in range(n))
                          for i in range(n)), ctx, _trusted=True)


def round_to(A: MPMatrix, ctx: PrecisionCtx) -> MPMatrix:
    """Round every entry to nearest at ctx.  Idempotent."""
    p = ctx.binary_precision
    rows = tuple(tuple(mpc(e, precision=p) for e in row) for row in A.rows)
    return MPMatrix(rows, ctx, _trusted=True)


def mat_mul(A: MPMatrix, B: MPMatrix, ctx: PrecisionCtx) -> MPMatrix:
    """fl_ctx(A*B) with a fixed sequential inner product.

    Each scalar multiply and each add rounds at ctx, so the classical
    elementwise bound |fl(AB) - AB| <= gamma_n |A||B| applies.
    """
    if A.n_cols != B.n_rows:
        raise DimensionError(f"mat_mul: {A.shape} x {B.shape}")
    g = ctx.gmp
    mul, add = g.mul, g.add
    n = A.n_cols
    # Transposed view of B for contiguous access in the inner loop.
    bt = tuple(tuple(B.rows[k][j] for k in range(n)) for j in range(B.n_cols))
    rows = []
    for i in range(A.n_rows):
        ai = A.rows[i]
        row = []
        for j in range(B.n_cols):
            bj = bt[j]
            acc = mul(ai[0], bj[0])
            for k in range(1, n):
                acc = add(acc, mul(ai[k], bj[k]))
            row.append(acc)
        rows.append(tuple(row))
    return MPMatrix(tuple(rows), ctx, _trusted=True)


def mat_axpy(alpha, A: MPMatrix, B: MPMatrix, ctx: PrecisionCtx) -> MPMatrix:
    """fl_ctx(alpha*A + B): one rounding per multiply, one per add."""
    if A.shape != B.shape:
        raise DimensionError(f"mat_axpy: {A.shape} vs {B.shape}")
    g = ctx.gmp
    mul, add = g.mul, g.add
    a = as_mpc(alpha, ctx)
    rows = tuple(
        tuple(add(mul(a, x), y) for x, y in zip(ra, rb))
        for ra, rb in zip(A.rows, B.rows))
    return MPMatrix(rows, ctx, _trusted=True)


def mat_add(A: MPMatrix, B: MPMatrix, ctx: PrecisionCtx) -> MPMatrix:
    """fl_ctx(A + B)."""
    if A.shape != B.shape:
        raise DimensionError(f"mat_add: {A.shape} vs {B.shape}")
    add = ctx.gmp.add
    rows = tuple(tuple(add(x, y) for x, y in zip(ra, rb))
                 for ra, rb in zip(A.rows, B.rows))
    return MPMatrix(rows, ctx, _trusted=True)


def mat_sub(A: MPMatrix, B: MPMatrix, ctx: PrecisionCtx) -> MPMatrix:
    """fl_ctx(A - B)."""
    if A.shape != B.shape:
        raise DimensionError(f"mat_sub: {A.shape} vs {B.shape}")
    sub = ctx.gmp.sub
    rows = tuple(tuple(sub(x, y) for x, y in zip(ra, rb))
                 for ra, rb in zip(A.rows, B.rows))
    return MPMatrix(rows, ctx, _trusted=True)


def scale_pow2(A: MPMatrix, ell: int) -> MPMatrix:
    """Entrywise multiply by 2^(-ell).  Exact in binary floating point."""
    g = A.produced_at.gmp
    rows = tuple(tuple(g.div_2exp(e, ell) for e in row) for row in A.rows)
    return MPMatrix(rows, A.produced_at, _trusted=True)


def entrywise_abs(A: MPMatrix, ctx: PrecisionCtx = NORM_CTX) -> MPMatrix:
    """|A| at ctx (moduli of the entries)."""
    g = ctx.gmp
    rows = tuple(tuple(mpc(g.abs(e), precision=ctx.binary_precision)
                       for e in row) for row in A.rows)
    return MPMatrix(rows, ctx, _trusted=True)


def one_norm(A: MPMatrix) -> mpfr:
    """Maximum absolute column sum, computed at 16 decimal digits.

    The planner only consumes orders of magnitude, so a short fixed
    context is always sufficient (and keeps the norm cost negligible).
    """
    g = NORM_CTX.gmp
    best = mpfr(0)
    for j in range(A.n_cols):
        s = mpfr(0)
        for i in range(A.n_rows):
            s = g.add(s, g.abs(A.rows[i][j]))
        if s > best:
            best = s
    return best


# ---------------------------------------------------------------------------
# Serialization: decimal strings with two guard digits, so binary values
# round-trip exactly through text.

def fmt_sci(x: mpfr, sig_digits: int) -> str:
    """Scientific-notation decimal string with sig_digits significant
    digits, built from mpfr_get_str (correctly rounded)."""
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "-inf" if x < 0 else "inf"
    if x == 0:
        return "0.0e0"
    ds, exp, _ = x.digits(10, sig_digits)
    sign = ""
    if ds.startswith("-"):
        sign, ds = "-", ds[1:]
    return f"{sign}{ds[0]}.{ds[1:]}e{exp - 1}"


def _fmt_real(x: mpfr, digits: int) -> str:
    return fmt_sci(x, digits + 2)


def _entry_to_str(e: mpc, digits: int) -> str:
    re, im = e.real, e.imag
    if im == 0:
        return _fmt_real(re, digits)
    im_s = _fmt_real(im, digits)  # fmt_sci carries the sign itself
    sign = "" if im_s.startswith("-") else "+"
    return f"{_fmt_real(re, digits)}{sign}{im_s}j"


def _entry_from_str(s: str, ctx: PrecisionCtx) -> mpc:
    s = s.strip()
    p = ctx.binary_precision
    if s.endswith("j"):
        body = s[:-1]
        # split at the sign separating real and imaginary parts (skip the
        # leading sign and any exponent signs, which follow 'e'/'E')
        for idx in range(len(body) - 1, 0, -1):
            ch = body[idx]
            if ch in "+-" and body[idx - 1] not in "eE":
                re = mpfr(body[:idx], p)
                im = mpfr(body[idx:], p)
                return mpc(re, im, precision=p)
        raise ValueError(f"malformed complex entry: {s!r}")
    return mpc(mpfr(s, p), precision=p)


def matrix_to_json(A: MPMatrix) -> str:
    d = A.produced_at.decimal_digits
    return json.dumps({
        "n_rows": A.n_rows,
        "n_cols": A.n_cols,
        "decimal_digits": d,
        "entries": [_entry_to_str(e, d) for row in A.rows for e in row],
    })


def matrix_from_json(text: str) -> MPMatrix:
    obj = json.loads(text)
    ctx = PrecisionCtx(obj["decimal_digits"])
    nr, nc = obj["n_rows"], obj["n_cols"]
    ent = obj["entries"]
    if len(ent) != nr * nc:
        raise ValueError("entry count mismatch")
    rows = tuple(
        tuple(_entry_from_str(ent[i * nc + j], ctx) for j in range(nc))
        for i in range(nr))
    return MPMatrix(rows, ctx, _trusted=True)


def matrix_to_csv(A: MPMatrix) -> str:
    d = A.produced_at.decimal_digits
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["digits", d])
    for row in A.rows:
        w.writerow([_entry_to_str(e, d) for e in row])
    return buf.getvalue()


def matrix_from_csv(text: str) -> MPMatrix:
    rows_in = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows_in or rows_in[0][0] != "digits":
        raise ValueError("missing digits header row")
    ctx = PrecisionCtx(int(rows_in[0][1]))
    rows = tuple(tuple(_entry_from_str(s, ctx) for s in r) for r in rows_in[1:])
    return MPMatrix(rows, ctx, _trusted=True)
