"""A-priori rounding error bounds and decay diagnostics.

All bound values are evaluated at a fixed 32-digit context: they are
diagnostics, not results, and their own rounding is immaterial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import factorial
from typing import List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr, mpz

from .precision import BOUND_CTX, NORM_CTX, MPMatrix, PrecisionCtx, \
    entrywise_abs, mat_mul, one_norm

_G = BOUND_CTX.gmp


class BoundInvalidError(ArithmeticError):
    """k*u >= 1: the gamma constant (and any bound built on it) is vacuous."""


def _f(x) -> mpfr:
    return mpfr(x, BOUND_CTX.binary_precision)


def gamma(k, u) -> mpfr:
    """gamma_k = k*u/(1 - k*u), valid for k*u < 1."""
    ku = _G.mul(_f(k), _f(u))
    if ku >= 1:
        raise BoundInvalidError(f"k*u = {ku} >= 1")
    return _G.div(ku, _G.sub(_f(1), ku))


@dataclass(frozen=True)
class BoundInputs:
    """Inputs for the mixed-Horner forward error bound.

    precisions and norm_bs run over levels nu-1 .. r (base level first,
    so precisions[0] is the working roundoff of the final summation).
    """
    n: int
    precisions: Tuple
    norm_y: object
    norm_bs: Tuple
    s: int = 0
    r: int = 0
    nu: int = 1
    sigma: Optional[object] = None

    def __post_init__(self):
        if len(self.precisions) != len(self.norm_bs):
            raise ValueError("precisions and norm_bs must align")
        for a, b in zip(self.precisions, self.precisions[1:]):
            if _f(b) < _f(a):
                raise ValueError("precisions must ascend outward")


def f_constants_closed(precisions: Sequence, n: int) -> List[mpfr]:
    """Accumulated error multipliers f_{nu-1}..f_r, closed form.

    precisions[0] is the base (working) roundoff; the outermost level has
    the leading coefficient n, inner low-precision levels n+2, and the
    base level contributes the constant 2.
    """
    us = [_f(u) for u in precisions]
    L = len(us) - 1
    fs = [_f(2)]
    base = us[0]
    for j in range(1, L + 1):
        lead = n if j == L else n + 2
        acc = _G.mul(_f(lead), _G.div(us[j], base))
        for t in range(1, j):
            acc = _G.add(acc, _G.mul(_f(n + 1), _G.div(us[t], base)))
        fs.append(_G.add(acc, _f(1)))
    return fs


def f_constants_inductive(precisions: Sequence, n: int) -> List[mpfr]:
    """Same multipliers via the level-by-level recurrence
    f_{t-1,j} = theta_{t,t-1} * (n + f_{t,j}) + 1, started one level below
    the outermost one."""
    us = [_f(u) for u in precisions]
    L = len(us) - 1
    if L == 0:
        return [_f(2)]
    # level L-1: outer term n*theta + 1, own term 2
    f = {L: _G.add(_G.mul(_f(n), _G.div(us[L], us[L - 1])), _f(1)), L - 1: _f(2)}
    for t in range(L - 2, -1, -1):
        theta = _G.div(us[t + 1], us[t])
        f = {j: _G.add(_G.mul(theta, _G.add(_f(n), f[j])), _f(1))
             for j in range(t + 1, L + 1)}
        f[t] = _f(2)
    return [f[j] for j in range(L + 1)]


def thm21_bound(inp: BoundInputs) -> mpfr:
    """Forward error bound for the mixed-precision Horner stage:
    sum_i gamma_{f_i}(u_base) * ||Y||^(i-base) * ||B_i||."""
    fs = f_constants_closed(inp.precisions, inp.n)
    u_base = inp.precisions[0]
    y = _f(inp.norm_y)
    total = _f(0)
    ypow = _f(1)
    for i, (fi, nb) in enumerate(zip(fs, inp.norm_bs)):
        term = _G.mul(gamma(fi, u_base), _G.mul(ypow, _f(nb)))
        total = _G.add(total, term)
        ypow = _G.mul(ypow, y)
    return total


def power_error_bound(n: int, t: int, u) -> mpfr:
    """Repeated-multiplication power bound constant gamma_{(t-1)n};
    |fl(X^t) - X^t| <= gamma_{(t-1)n} |X|^t elementwise."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return gamma((t - 1) * n, u)


def assembly_error_bound(abs_coeffs: Sequence, absX_powers_norms: Sequence,
                         n: int, s: int, u) -> mpfr:
    """Uniform majorant for assembling a coefficient block from computed
    powers: gamma_{(s-2)n+2} * sum_j |b_j| * || |X|^j ||."""
    if s == 1:
        return _f(0)  # single rounded term a_0*I: the j=0 constant is gamma_0
    g = gamma((s - 2) * n + 2, u)
    acc = _f(0)
    for b, pn in zip(abs_coeffs, absX_powers_norms):
        acc = _G.add(acc, _G.mul(_f(b), _f(pn)))
    return _G.mul(g, acc)


def assembly_error_bound_per_term(abs_coeffs: Sequence,
                                  absX_powers_norms: Sequence,
                                  n: int, u) -> mpfr:
    """Finer per-term variant: gamma_t |a_0| + sum_j gamma_{(j-1)(n-1)+t+1}
    |a_j| * || |X|^j ||, with t the block degree."""
    t = len(abs_coeffs) - 1
    acc = _G.mul(gamma(t, u), _f(abs_coeffs[0]))
    for j in range(1, t + 1):
        g = gamma((j - 1) * (n - 1) + t + 1, u)
        acc = _G.add(acc, _G.mul(g, _G.mul(_f(abs_coeffs[j]),
                                           _f(absX_powers_norms[j]))))
    return acc


def tau_sequence(norm_bs: Sequence, norm_y) -> List[mpfr]:
    """Decay ratios tau_i = ||B_i|| * ||Y|| / ||B_{i-1}||, i = 1..r.

    A zero denominator yields an infinite tau (flagged level)."""
    y = _f(norm_y)
    out = []
    for prev, cur in zip(norm_bs, norm_bs[1:]):
        if _f(prev) == 0:
            out.append(mpfr("inf"))
        else:
            out.append(_G.div(_G.mul(_f(cur), y), _f(prev)))
    return out


def gamma_si(s: int, i: int, sigma) -> mpfr:
    """Decay majorant for the exponential-Taylor ratios tau_i, i >= 2:
    a ratio of truncated factorial sums that behaves like 1.58 * i^(-s)."""
    if i < 2:
        raise ValueError("i must be >= 2")
    sig = _f(sigma)
    if sig > _G.add(_G.div(_f(s), _G.exp(_f(1))), _f("1e-12")):
        raise ValueError("requires sigma <= s/e")
    r2 = _G.div(sig, _f(i * s + 1))
    num_sum = _f(0)
    term = _f(1)
    for _ in range(s):
        num_sum = _G.add(num_sum, term)
        term = _G.mul(term, r2)
    num = _G.mul(_G.div(_f(factorial(s)), _f(factorial(i * s))), num_sum)
    r1 = _G.div(sig, _f((i - 1) * s + 2))
    den_sum = _f(0)
    term = _f(1)
    for _ in range(s - 1):
        den_sum = _G.add(den_sum, term)
        term = _G.mul(term, r1)
    den = _G.sub(_G.div(_f(1), _f(factorial((i - 1) * s))),
                 _G.mul(_G.div(sig, _f(factorial((i - 1) * s + 1))), den_sum))
    if den <= 0:
        raise BoundInvalidError("denominator of gamma(s,i) not positive")
    return _G.div(num, den)


def alpha_m(X: MPMatrix, m: int) -> Tuple[mpfr, int]:
    """Norm surrogate used by degree selection: the larger of
    ||X^d||^(1/d) and ||X^(d+1)||^(1/(d+1)) at d = floor((1+sqrt(4m+5))/2).

    Powers are formed at 16 digits; this is a magnitude diagnostic."""
    if m < 1:
        raise ValueError("m must be >= 1")
    d_star = int((1 + math.isqrt(4 * m + 5)) // 2)
    while (d_star + 1) * d_star <= m + 1:
        d_star += 1
    while d_star * (d_star - 1) > m + 1:
        d_star -= 1
    P = X
    for _ in range(d_star - 1):
        P = mat_mul(P, X, NORM_CTX)
    nd = one_norm(P)
    P = mat_mul(P, X, NORM_CTX)
    nd1 = one_norm(P)
    g = NORM_CTX.gmp
    a = max(g.root(nd, d_star), g.root(nd1, d_star + 1))
    return a, d_star


def extra_squarings(normX, s: int) -> int:
    """Additional scaling steps needed to bring ||X|| below s/e:
    max(0, ceil(log2(e*||X||/s)))."""
    if s < 1:
        raise ValueError("s must be >= 1")
    x = _f(normX)
    if x <= 0:
        raise ValueError("normX must be > 0")
    arg = _G.div(_G.mul(_G.exp(_f(1)), x), _f(s))
    if arg <= 1:
        return 0
    return int(gmpy2.ceil(_G.log2(arg)))


def b0_condition_ratio(norm_b_base, u_base, n: int, tau) -> mpfr:
    """Diagnostic ratio ((1+tau)n + 2) * ||B_{nu-1}|| * u_{nu-1}; the error
    analysis needs it well below 1.  Reported, never asserted."""
    c = _G.add(_G.mul(_G.add(_f(1), _f(tau)), _f(n)), _f(2))
    return _G.mul(c, _G.mul(_f(norm_b_base), _f(u_base)))


def y_accuracy_ok(s: int, n: int, tau_nu, normX, normY) -> bool:
    """Warning flag for the accuracy condition on the computed s-th power:
    s*n*tau_nu*||X||^s should not exceed ||X^s|| by a large factor."""
    lhs = _G.mul(_f(s * n), _G.mul(_f(tau_nu), _G.exp(
        _G.mul(_f(s), _G.log(_f(normX)))))) if _f(normX) > 0 else _f(0)
    return bool(lhs <= _G.mul(_f(10), _f(normY)))
