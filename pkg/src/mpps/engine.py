"""Paterson-Stockmeyer evaluators: fixed precision, the mixed-precision
exponential-Taylor variant (with the optional block-size growth branch),
and the general decaying-coefficient variant, plus the precision planner
and the digit-weighted cost model.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from .bounds import BoundInputs, tau_sequence, thm21_bound
from .coefficients import CoefficientSeries, eval_coeff, taylor_exp_coeffs
from .precision import (BOUND_CTX, NORM_CTX, DimensionError, MPMatrix,
                        PrecisionCtx, fmt_sci, identity, mat_add, mat_axpy,
                        mat_mul, one_norm, round_to, scalar_matrix)

_G = BOUND_CTX.gmp


def _fmt(x) -> str:
    return fmt_sci(mpfr(x, 64), 7)


@dataclass(frozen=True)
class EvaluationPlan:
    """PS parameters plus the per-level precision schedule.

    Level digits/roundoffs are indexed 1..r (stored 0-based); levels below
    nu run at the working precision.
    """
    s: int
    r: int
    nu: int
    d_working: int
    level_digits: Tuple[int, ...]
    level_roundoffs: Tuple[mpfr, ...]
    tau_seq: Tuple[mpfr, ...]
    norm_bs: Tuple[mpfr, ...]
    norm_y: mpfr
    delta: float = 10.0
    fix_params: bool = True
    degenerate_levels: Tuple[int, ...] = ()
    nilpotent: bool = False
    explicit_powers: bool = False

    def __post_init__(self):
        if not (1 <= self.s):
            raise ValueError("s must be >= 1")
        if not (1 <= self.nu <= self.r + 1):
            raise ValueError("nu out of range")
        if len(self.level_digits) != self.r:
            raise ValueError("need r level digits")
        for a, b in zip(self.level_digits, self.level_digits[1:]):
            if a < b:
                raise ValueError("digit schedule must be non-increasing")

    def level_ctx(self, i: int) -> PrecisionCtx:
        """Context of Horner level i, with level 0 = working precision."""
        if i == 0:
            return PrecisionCtx(self.d_working)
        return PrecisionCtx(self.level_digits[i - 1])

    def to_dict(self) -> dict:
        return {
            "s": self.s, "r": self.r, "nu": self.nu,
            "working_digits": self.d_working,
            "digits": list(self.level_digits),
            "roundoffs": [_fmt(u) for u in self.level_roundoffs],
            "tau": [_fmt(t) for t in self.tau_seq],
            "norm_bs": [_fmt(b) for b in self.norm_bs],
            "norm_y": _fmt(self.norm_y),
            "delta": self.delta, "fix_params": self.fix_params,
            "degenerate_levels": list(self.degenerate_levels),
            "nilpotent": self.nilpotent,
            "explicit_powers": self.explicit_powers,
        }


@dataclass
class EvaluationReport:
    result: MPMatrix
    plan: EvaluationPlan
    matmuls_by_digits: Dict[int, int]
    cost_ratio: float
    savings: float
    timing_buckets: Dict[str, float]
    bound: Optional[mpfr] = None
    diagnostics: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "plan": self.plan.to_dict(),
            "matmuls_by_digits": {str(k): v
                                  for k, v in self.matmuls_by_digits.items()},
            "cost_ratio": self.cost_ratio,
            "savings": self.savings,
            "timing_buckets": self.timing_buckets,
            "bound": None if self.bound is None else _fmt(self.bound),
            "diagnostics": self.diagnostics,
        })


def default_block_size(m: int) -> int:
    return math.ceil(math.sqrt(m))


# ---------------------------------------------------------------------------
# Building blocks

def form_powers(X: MPMatrix, s: int, ctx: PrecisionCtx) -> List[MPMatrix]:
    """[I, X, fl(X^2), .., fl(X^s)] by repeated multiplication at ctx."""
    X = round_to(X, ctx)
    powers = [identity(X.n_rows, ctx), X]
    for _ in range(s - 1):
        powers.append(mat_mul(powers[-1], X, ctx))
    return powers


def assemble_block(series: CoefficientSeries, i: int, s: int,
                   powers: Sequence[MPMatrix], ctx: PrecisionCtx) -> MPMatrix:
    """B_i = sum_j b_{s*i+j} X^j from precomputed powers, accumulated in
    index order with one rounding per scale and per add."""
    m = series.degree
    hi = s - 1 if i < m // s else m - s * (m // s)
    n = powers[1].n_rows
    acc = scalar_matrix(eval_coeff(series.coeffs[s * i], ctx), n, ctx)
    for j in range(1, hi + 1):
        b = eval_coeff(series.coeffs[s * i + j], ctx)
        acc = mat_axpy(b, powers[j], acc, ctx)
    return acc


def eval_b0_and_power(X: MPMatrix, s: int, series: CoefficientSeries,
                      ctx: PrecisionCtx):
    """Interleaved power formation and leading-block accumulation:
    returns (powers [I..X^s], B0 = sum_{j<s} b_j X^j, Y = X^s)."""
    if not (1 <= s <= series.degree):
        raise ValueError("need 1 <= s <= series degree")
    X = round_to(X, ctx)
    n = X.n_rows
    powers = [identity(n, ctx), X]
    B0 = scalar_matrix(eval_coeff(series.coeffs[0], ctx), n, ctx)
    for j in range(1, s):
        B0 = mat_axpy(eval_coeff(series.coeffs[j], ctx), powers[j], B0, ctx)
        powers.append(mat_mul(powers[j], X, ctx))
    return powers, B0, powers[s]


def plan_precisions(norm_bs: Sequence, norm_y, ctx: PrecisionCtx,
                    delta: float = 10.0, *, s: int,
                    apply_switch: bool = True,
                    fix_params: bool = True) -> EvaluationPlan:
    """Choose per-level digits from the block norms.

    Uses the telescoped rule u_i = ||B_0|| u / (||B_i|| ||Y||^i), clamped
    to the working roundoff, converted to digits, with the delta rule
    selecting the switch index nu and a running maximum enforcing a
    monotone schedule.
    """
    d = ctx.decimal_digits
    r = len(norm_bs) - 1
    norm_bs = tuple(mpfr(b, 64) for b in norm_bs)
    norm_y = mpfr(norm_y, 64)
    taus = tuple(tau_sequence(norm_bs, norm_y))
    degenerate = tuple(i for i, b in enumerate(norm_bs) if b == 0)

    if norm_y == 0:
        # Nilpotent fast path: p_m(X) = B_0, every level saturates coarse.
        return EvaluationPlan(
            s=s, r=r, nu=1, d_working=d, level_digits=(1,) * r,
            level_roundoffs=(_G.exp10(-1),) * r, tau_seq=taus,
            norm_bs=norm_bs, norm_y=norm_y, delta=delta,
            fix_params=fix_params, degenerate_levels=degenerate,
            nilpotent=True)

    log_b0 = _G.log10(norm_bs[0]) if norm_bs[0] > 0 else mpfr(0)
    log_y = _G.log10(norm_y)
    digits = []
    qualifies = []
    # -log10(u_i) = d - log10||B0|| + log10||B_i|| + i*log10||Y||
    for i in range(1, r + 1):
        if norm_bs[i] == 0 or norm_bs[0] == 0:
            digits.append(1)
            qualifies.append(True)
            continue
        e = _G.add(_G.sub(mpfr(d), log_b0),
                   _G.add(_G.log10(norm_bs[i]), _G.mul(mpfr(i), log_y)))
        e = float(_G.add(e, mpfr("1e-9")))
        digits.append(max(1, min(d, math.floor(e))))
        # u_i >= delta*u  <=>  -log10(u_i) <= d - log10(delta)
        qualifies.append(e <= d - math.log10(delta))

    nu = r + 1
    for i in range(1, r + 1):
        if qualifies[i - 1]:
            nu = i
            break
    if apply_switch:
        for i in range(1, nu):
            digits[i - 1] = d
    for i in range(r - 2, -1, -1):
        digits[i] = max(digits[i], digits[i + 1])
    return EvaluationPlan(
        s=s, r=r, nu=nu, d_working=d, level_digits=tuple(digits),
        level_roundoffs=tuple(_G.exp10(-k) for k in digits), tau_seq=taus,
        norm_bs=norm_bs, norm_y=norm_y, delta=delta, fix_params=fix_params,
        degenerate_levels=degenerate)


def snap_to_lattice(plan: EvaluationPlan,
                    lattice: Sequence[int]) -> EvaluationPlan:
    """Snap each level to the smallest lattice digit count >= its own
    (i.e. to the nearest available finer roundoff)."""
    lat = sorted(set(int(x) for x in lattice))
    if not lat:
        raise ValueError("empty lattice")
    if plan.d_working not in lat:
        raise ValueError("lattice must contain the working digits")
    snapped = []
    for di in plan.level_digits:
        up = [x for x in lat if x >= di]
        if not up:
            raise ValueError(f"no lattice member >= {di}")
        snapped.append(up[0])
    return EvaluationPlan(
        s=plan.s, r=plan.r, nu=plan.nu, d_working=plan.d_working,
        level_digits=tuple(snapped),
        level_roundoffs=tuple(_G.exp10(-k) for k in snapped),
        tau_seq=plan.tau_seq, norm_bs=plan.norm_bs, norm_y=plan.norm_y,
        delta=plan.delta, fix_params=plan.fix_params,
        degenerate_levels=plan.degenerate_levels, nilpotent=plan.nilpotent,
        explicit_powers=plan.explicit_powers)


def horner_mixed(Bs: Sequence[MPMatrix], Y: MPMatrix,
                 plan: EvaluationPlan) -> MPMatrix:
    """phi_{j-1} = fl_{j-1}(B_{j-1} + fl_j(Y*phi_j)), j = r..1."""
    if len(Bs) != plan.r + 1:
        raise ValueError("need r+1 coefficient blocks")
    phi = Bs[plan.r]
    for j in range(plan.r, 0, -1):
        phi = mat_mul(Y, phi, plan.level_ctx(j))
        phi = mat_add(Bs[j - 1], phi, plan.level_ctx(j - 1))
    return phi


def cost_ratio(plan: EvaluationPlan) -> Tuple[float, float]:
    """Digit-weighted matmul cost of the plan over the all-working-digit
    cost: ((s-1)*d + sum d_i) / ((s+r-1)*d)."""
    s, r, d = plan.s, plan.r, plan.d_working
    if s + r - 1 <= 0:
        return 1.0, 0.0
    cr = Fraction((s - 1) * d + sum(plan.level_digits), (s + r - 1) * d)
    return float(cr), float(1 - cr)


# ---------------------------------------------------------------------------
# Evaluators

def _timed(bucket, t0, timings):
    timings[bucket] = timings.get(bucket, 0.0) + (time.perf_counter() - t0)


def _fractions(timings: Dict[str, float]) -> Dict[str, float]:
    total = sum(timings.values())
    if total <= 0:
        return {k: 0.0 for k in ("power_formation", "norm_estimation",
                                 "mixed_horner", "coefficient_assembly")}
    out = {k: timings.get(k, 0.0) / total
           for k in ("power_formation", "norm_estimation", "mixed_horner",
                     "coefficient_assembly")}
    return out


def _bound_for(plan: EvaluationPlan, n: int) -> mpfr:
    u = PrecisionCtx(plan.d_working).unit_roundoff
    nu = plan.nu
    precisions = [u] + [plan.level_roundoffs[i - 1]
                        for i in range(nu, plan.r + 1)]
    norm_bs = list(plan.norm_bs[nu - 1:])
    inp = BoundInputs(n=n, precisions=tuple(precisions),
                      norm_y=plan.norm_y, norm_bs=tuple(norm_bs),
                      s=plan.s, r=plan.r, nu=nu)
    return thm21_bound(inp)


def _finish(result, plan, counts, timings, with_bound) -> EvaluationReport:
    cr, sav = cost_ratio(plan)
    bound = _bound_for(plan, result.n_rows) if with_bound else None
    return EvaluationReport(result=result, plan=plan,
                            matmuls_by_digits=dict(counts), cost_ratio=cr,
                            savings=sav, timing_buckets=_fractions(timings),
                            bound=bound)


def ps_fixed(X: MPMatrix, series: CoefficientSeries,
             ctx: PrecisionCtx, with_bound: bool = False) -> EvaluationReport:
    """Fixed-precision Paterson-Stockmeyer with s = ceil(sqrt(m))."""
    if X.n_rows != X.n_cols:
        raise DimensionError("X must be square")
    m = series.degree
    d = ctx.decimal_digits
    timings: Dict[str, float] = {}
    if m == 0:
        result = scalar_matrix(eval_coeff(series.coeffs[0], ctx),
                               X.n_rows, ctx)
        plan = EvaluationPlan(s=1, r=0, nu=1, d_working=d, level_digits=(),
                              level_roundoffs=(), tau_seq=(),
                              norm_bs=(one_norm(result),), norm_y=mpfr(0))
        return _finish(result, plan, {}, timings, False)
    s = default_block_size(m)
    r = m // s

    t0 = time.perf_counter()
    powers = form_powers(X, s, ctx)
    Y = powers[s]
    _timed("power_formation", t0, timings)

    t0 = time.perf_counter()
    Bs = [assemble_block(series, i, s, powers, ctx) for i in range(r + 1)]
    _timed("coefficient_assembly", t0, timings)

    t0 = time.perf_counter()
    norm_bs = tuple(one_norm(B) for B in Bs)
    norm_y = one_norm(Y)
    _timed("norm_estimation", t0, timings)

    plan = EvaluationPlan(
        s=s, r=r, nu=r + 1, d_working=d, level_digits=(d,) * r,
        level_roundoffs=(ctx.unit_roundoff,) * r,
        tau_seq=tuple(tau_sequence(norm_bs, norm_y)),
        norm_bs=norm_bs, norm_y=norm_y)

    t0 = time.perf_counter()
    result = horner_mixed(Bs, Y, plan)
    _timed("mixed_horner", t0, timings)
    return _finish(result, plan, {d: s - 1 + r}, timings, with_bound)


def ps_mixed_general(X: MPMatrix, series: CoefficientSeries,
                     ctx: PrecisionCtx, delta: float = 10.0,
                     with_bound: bool = False) -> EvaluationReport:
    """Mixed-precision PS for general decaying scalar coefficients."""
    if X.n_rows != X.n_cols:
        raise DimensionError("X must be square")
    m = series.degree
    if m < 1:
        raise ValueError("series degree must be >= 1")
    d = ctx.decimal_digits
    timings: Dict[str, float] = {}
    s = default_block_size(m)
    r = m // s

    t0 = time.perf_counter()
    powers, B0, Y = eval_b0_and_power(X, s, series, ctx)
    _timed("power_formation", t0, timings)

    t0 = time.perf_counter()
    Bs = [B0] + [assemble_block(series, i, s, powers, ctx)
                 for i in range(1, r + 1)]
    _timed("coefficient_assembly", t0, timings)

    t0 = time.perf_counter()
    norm_bs = tuple(one_norm(B) for B in Bs)
    norm_y = one_norm(Y)
    _timed("norm_estimation", t0, timings)

    plan = plan_precisions(norm_bs, norm_y, ctx, delta, s=s,
                           apply_switch=True, fix_params=True)
    if plan.nilpotent:
        return _finish(B0, plan, {d: s - 1}, timings, False)

    t0 = time.perf_counter()
    result = horner_mixed(Bs, Y, plan)
    _timed("mixed_horner", t0, timings)
    counts: Dict[int, int] = {d: s - 1}
    for di in plan.level_digits:
        counts[di] = counts.get(di, 0) + 1
    return _finish(result, plan, counts, timings, with_bound)


def ps_mixed_exp(X: MPMatrix, m: int, ctx: PrecisionCtx,
                 fix_params: bool = True, delta: float = 10.0,
                 with_bound: bool = False) -> EvaluationReport:
    """Mixed-precision PS for the order-m Taylor approximant of exp.

    With fix_params=False and ||X||_1 <= s/e the block size s grows until
    ||X^s|| drops below ||B_0|| ||X||^s, absorbing each displaced power
    into B_0; otherwise the fixed-s branch with the delta switch rule is
    used.
    """
    if X.n_rows != X.n_cols:
        raise DimensionError("X must be square")
    if m < 1:
        raise ValueError("m must be >= 1")
    d = ctx.decimal_digits
    series = taylor_exp_coeffs(m)
    timings: Dict[str, float] = {}
    s = default_block_size(m)

    t0 = time.perf_counter()
    powers, B0, Y = eval_b0_and_power(X, s, series, ctx)
    _timed("power_formation", t0, timings)

    t0 = time.perf_counter()
    norm_x = one_norm(X)
    _timed("norm_estimation", t0, timings)

    grow = (not fix_params) and norm_x <= s / math.e
    apply_switch = not grow
    if grow:
        g16 = NORM_CTX.gmp
        while s < m:
            t0 = time.perf_counter()
            xs = g16.exp(g16.mul(mpfr(s), g16.log(norm_x))) \
                if norm_x > 0 else mpfr(0)
            decayed = one_norm(Y) <= g16.mul(one_norm(B0), xs)
            _timed("norm_estimation", t0, timings)
            if decayed:
                break
            t0 = time.perf_counter()
            B0 = mat_axpy(eval_coeff(series.coeffs[s], ctx), Y, B0, ctx)
            _timed("coefficient_assembly", t0, timings)
            t0 = time.perf_counter()
            powers.append(mat_mul(X, Y, ctx))
            Y = powers[-1]
            s += 1
            _timed("power_formation", t0, timings)
    r = m // s

    if s == m:
        # PS degenerates to the explicit-powers sum: p = B_0 + b_m * Y.
        t0 = time.perf_counter()
        result = mat_axpy(eval_coeff(series.coeffs[m], ctx), Y, B0, ctx)
        _timed("coefficient_assembly", t0, timings)
        t0 = time.perf_counter()
        norm_bs = (one_norm(B0),
                   NORM_CTX.gmp.abs(eval_coeff(series.coeffs[m], NORM_CTX)))
        norm_y = one_norm(Y)
        _timed("norm_estimation", t0, timings)
        plan = plan_precisions(norm_bs, norm_y, ctx, delta, s=s,
                               apply_switch=apply_switch,
                               fix_params=fix_params)
        plan = EvaluationPlan(
            s=plan.s, r=plan.r, nu=plan.nu, d_working=plan.d_working,
            level_digits=plan.level_digits,
            level_roundoffs=plan.level_roundoffs, tau_seq=plan.tau_seq,
            norm_bs=plan.norm_bs, norm_y=plan.norm_y, delta=delta,
            fix_params=fix_params, degenerate_levels=plan.degenerate_levels,
            nilpotent=plan.nilpotent, explicit_powers=True)
        return _finish(result, plan, {d: s - 1}, timings, False)

    t0 = time.perf_counter()
    Bs = [B0] + [assemble_block(series, i, s, powers, ctx)
                 for i in range(1, r + 1)]
    _timed("coefficient_assembly", t0, timings)

    t0 = time.perf_counter()
    norm_bs = tuple(one_norm(B) for B in Bs)
    norm_y = one_norm(Y)
    _timed("norm_estimation", t0, timings)

    plan = plan_precisions(norm_bs, norm_y, ctx, delta, s=s,
                           apply_switch=apply_switch, fix_params=fix_params)
    if plan.nilpotent:
        return _finish(B0, plan, {d: s - 1}, timings, False)

    t0 = time.perf_counter()
    result = horner_mixed(Bs, Y, plan)
    _timed("mixed_horner", t0, timings)
    counts: Dict[int, int] = {d: s - 1}
    for di in plan.level_digits:
        counts[di] = counts.get(di, 0) + 1
    return _finish(result, plan, counts, timings, with_bound)


def plan_only(X: MPMatrix, series: CoefficientSeries, ctx: PrecisionCtx,
              delta: float = 10.0, fix_params: bool = True) -> EvaluationPlan:
    """Run only the precision planner.

    Powers and blocks are formed at the 16-digit norm context; the planner
    consumes orders of magnitude, so this reproduces the full schedule at
    a tiny fraction of the cost of an actual evaluation.
    """
    m = series.degree
    if m < 1:
        raise ValueError("series degree must be >= 1")
    s = default_block_size(m)
    r = m // s
    powers = form_powers(X, s, NORM_CTX)
    Bs = [assemble_block(series, i, s, powers, NORM_CTX)
          for i in range(r + 1)]
    norm_bs = tuple(one_norm(B) for B in Bs)
    norm_y = one_norm(powers[s])
    return plan_precisions(norm_bs, norm_y, ctx, delta, s=s,
                           apply_switch=True, fix_params=fix_params)
