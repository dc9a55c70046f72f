"""Exact-rational coefficient series for the approximant families.

Coefficients are stored as Fractions in lowest terms and rounded into a
precision context only at evaluation time, so one series object serves
every working precision and golden tests can compare exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Tuple

from gmpy2 import mpfr, mpz

from .precision import PrecisionCtx

VAR_X = "X"
VAR_X_SQUARED = "X^2"

FAMILIES = ("taylor_exp", "pade_exp_num", "pade_exp_den",
            "taylor_cos_in_x_squared", "custom")


@dataclass(frozen=True)
class CoefficientSeries:
    coeffs: Tuple[Fraction, ...]
    family: str = "custom"
    variable_note: str = VAR_X

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not self.coeffs:
            raise ValueError("series needs at least one coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def truncate(self, m: int) -> "CoefficientSeries":
        if m > self.degree:
            raise ValueError("cannot truncate upward")
        return CoefficientSeries(self.coeffs[:m + 1], self.family,
                                 self.variable_note)


def taylor_exp_coeffs(m: int) -> CoefficientSeries:
    """b_i = 1/i!, i = 0..m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return CoefficientSeries(
        tuple(Fraction(1, factorial(i)) for i in range(m + 1)), "taylor_exp")


def pade_exp_coeffs(k: int, m: int):
    """Numerator and denominator series of the [k/m] Pade approximant of exp.

    Normalised so that p_0 = q_0 = 1:
        p_j = (k+m-j)! k! / ((k+m)! j! (k-j)!),  j = 0..k
        q_j = (k+m-j)! m! (-1)^j / ((k+m)! j! (m-j)!),  j = 0..m
    """
    if k < 0 or m < 0:
        raise ValueError("k, m must be >= 0")
    fkm = factorial(k + m)
    p = tuple(
        Fraction(factorial(k + m - j) * factorial(k),
                 fkm * factorial(j) * factorial(k - j)) for j in range(k + 1))
    q = tuple(
        Fraction((-1) ** j * factorial(k + m - j) * factorial(m),
                 fkm * factorial(j) * factorial(m - j)) for j in range(m + 1))
    return (CoefficientSeries(p, "pade_exp_num"),
            CoefficientSeries(q, "pade_exp_den"))


def taylor_cos_coeffs(m: int) -> CoefficientSeries:
    """Cosine Maclaurin coefficients (-1)^k/(2k)! as a polynomial in X^2."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return CoefficientSeries(
        tuple(Fraction((-1) ** kk, factorial(2 * kk)) for kk in range(m + 1)),
        "taylor_cos_in_x_squared", VAR_X_SQUARED)


def eval_coeff(q: Fraction, ctx: PrecisionCtx) -> mpfr:
    """Correctly rounded value of an exact rational at ctx."""
    return ctx.gmp.div(mpz(q.numerator), mpz(q.denominator))


# ---------------------------------------------------------------------------
# JSON interchange: arrays of "num/den" strings.

def series_to_json(s: CoefficientSeries) -> str:
    return json.dumps({
        "family": s.family,
        "variable": s.variable_note,
        "coeffs": [f"{c.numerator}/{c.denominator}" for c in s.coeffs],
    })


def series_from_json(text: str) -> CoefficientSeries:
    obj = json.loads(text)
    coeffs = []
    for item in obj["coeffs"]:
        num, _, den = item.partition("/")
        coeffs.append(Fraction(int(num), int(den) if den else 1))
    return CoefficientSeries(tuple(coeffs), obj.get("family", "custom"),
                             obj.get("variable", VAR_X))
