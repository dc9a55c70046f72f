"""Deterministic test-matrix generators.

Every generator is a pure function of its arguments (plus an explicit
seed for the random one), so serialized experiments are reproducible.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from gmpy2 import mpc, mpfr

from .precision import MPMatrix, NORM_CTX, PrecisionCtx, as_mpc

#: Default generation context; generators of rational-entry matrices round
#: once here unless the caller asks for another precision.
GEN_CTX = PrecisionCtx(40)


def gen_cauchy(n: int, ctx: PrecisionCtx = GEN_CTX) -> MPMatrix:
    """A(i,j) = 1/(i+j), 1-based (Cauchy matrix with x = y = 1..n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = [[as_mpc(Fraction(1, i + j), ctx) for j in range(1, n + 1)]
            for i in range(1, n + 1)]
    return MPMatrix(rows, ctx, _trusted=True)


def gen_ward(ctx: PrecisionCtx = GEN_CTX) -> MPMatrix:
    """The classic 3x3 stiff test matrix with integer entries."""
    data = [[-131, 19, 18], [-390, 56, 54], [-387, 57, 52]]
    return MPMatrix(data, ctx)


def gen_nonnormal2(ctx: PrecisionCtx = GEN_CTX) -> MPMatrix:
    """2x2 defective matrix with a huge (1,2) entry but decaying powers."""
    return MPMatrix([[-0.1, 10 ** 6], [0, -0.1]], ctx)


def gen_lotkin(n: int, ctx: PrecisionCtx = GEN_CTX) -> MPMatrix:
    """Hilbert matrix with its first row replaced by ones."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = [[as_mpc(1, ctx)] * n]
    for i in range(2, n + 1):
        rows.append([as_mpc(Fraction(1, i + j - 1), ctx)
                     for j in range(1, n + 1)])
    return MPMatrix(rows[:n], ctx, _trusted=True)


def gen_triu_rand(n: int, scale: float = 100.0, seed: int = 0,
                  ctx: PrecisionCtx = GEN_CTX) -> MPMatrix:
    """Strictly upper triangular standard-normal entries times scale.

    Nilpotent by construction; deterministic given (n, scale, seed)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    rows = [[as_mpc(scale * g[i][j], ctx) if j > i else as_mpc(0, ctx)
             for j in range(n)] for i in range(n)]
    return MPMatrix(rows, ctx, _trusted=True)


def gen_smoke(n: int, ctx: PrecisionCtx = GEN_CTX) -> MPMatrix:
    """Roots-of-unity diagonal, ones on the superdiagonal, and a one in
    the (n,1) corner (perturbed bidiagonal)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    g = ctx.gmp
    two_pi = g.mul(mpfr(2), g.const_pi())
    rows = []
    for i in range(n):
        row = [as_mpc(0, ctx)] * n
        ang = g.div(g.mul(two_pi, mpfr(i)), mpfr(n))
        row[i] = mpc(g.cos(ang), g.sin(ang),
                     precision=ctx.binary_precision)
        if i + 1 < n:
            row[i + 1] = as_mpc(1, ctx)
        rows.append(row)
    rows[n - 1][0] = as_mpc(1, ctx)
    return MPMatrix(rows, ctx, _trusted=True)


GENERATORS = {
    "cauchy": gen_cauchy,
    "lotkin": gen_lotkin,
    "smoke": gen_smoke,
    "ward": gen_ward,
    "nonnormal2": gen_nonnormal2,
    "triu_rand": gen_triu_rand,
}


def generate(name: str, n: int = 0, seed: int = 0, scale: float = 100.0,
             ctx: PrecisionCtx = GEN_CTX) -> MPMatrix:
    """Dispatch by generator name with the common argument set."""
    if name == "ward":
        return gen_ward(ctx)
    if name == "nonnormal2":
        return gen_nonnormal2(ctx)
    if name == "triu_rand":
        return gen_triu_rand(n, scale, seed, ctx)
    if name in GENERATORS:
        return GENERATORS[name](n, ctx)
    raise KeyError(f"unknown generator {name!r}")
