"""Self-verification suite.

Each criterion is a standalone function returning a CriterionResult, so
the checks can run from the test suite and from the command line alike.
The checks pin down the load-bearing numerical claims of the library:
exact coefficient values, planner schedules, cost arithmetic, accuracy
statistics, and a-priori bound containment.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Tuple

from gmpy2 import mpfr

from .bounds import (BoundInputs, alpha_m, assembly_error_bound,
                     extra_squarings, f_constants_closed,
                     f_constants_inductive, gamma, thm21_bound)
from .coefficients import CoefficientSeries, eval_coeff, pade_exp_coeffs
from .engine import (EvaluationPlan, assemble_block, cost_ratio,
                     eval_b0_and_power, form_powers, horner_mixed, ps_fixed,
                     ps_mixed_general)
from .gallery import gen_nonnormal2, gen_ward, generate
from .harness import ExperimentConfig, run_compare, run_table1
from .precision import (BOUND_CTX, NORM_CTX, MPMatrix, PrecisionCtx,
                        entrywise_abs, mat_add, mat_axpy, mat_mul, mat_sub,
                        one_norm, round_to, scalar_matrix, scale_pow2)

_G = BOUND_CTX.gmp


@dataclass
class CriterionResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.detail}"


# ---------------------------------------------------------------------------
# 1. Pade coefficient golden values

_PADE_GOLDEN = (Fraction(1, 2), Fraction(3, 25), Fraction(11, 600),
                Fraction(11, 5520), Fraction(3, 18400), Fraction(1, 96600),
                Fraction(1, 1932000))


def check_pade_golden() -> CriterionResult:
    num, _ = pade_exp_coeffs(13, 13)
    got = num.coeffs[1:8]
    ok = got == _PADE_GOLDEN and num.coeffs[0] == 1
    return CriterionResult(
        "pade_coefficient_golden", ok,
        f"numerator j=1..7 = {[str(c) for c in got]}")


# ---------------------------------------------------------------------------
# 2. Ward block-norm example

def check_ward_example() -> CriterionResult:
    ctx = PrecisionCtx(64)
    X = round_to(scale_pow2(gen_ward(ctx), 6), ctx)
    num, _ = pade_exp_coeffs(13, 13)
    s = 4
    powers, B0, Y = eval_b0_and_power(X, s, num, ctx)
    B1 = assemble_block(num, 1, s, powers, ctx)
    nb0 = float(one_norm(B0))
    prod = float(NORM_CTX.gmp.mul(one_norm(B1), one_norm(Y)))
    tau1 = prod / nb0
    ok = (1.0e1 <= nb0 <= 1.2e1 and 8.2e-3 <= prod <= 9.0e-3
          and 7.4e-4 <= tau1 <= 8.2e-4)
    return CriterionResult(
        "ward_block_norms", ok,
        f"||B0||={nb0:.4g} (want [10,12]), ||B1||*||X^4||={prod:.4g} "
        f"(want [8.2e-3,9.0e-3]), tau1={tau1:.4g} (want [7.4e-4,8.2e-4])")


# ---------------------------------------------------------------------------
# 3. Cost-ratio arithmetic on the published schedules

_TABLE1 = (
    (32, 42, 7, 6, (30, 25, 18, 11, 3, 1), 0.271),
    (64, 64, 8, 8, (61, 55, 47, 38, 28, 18, 7, 1), 0.268),
    (128, 100, 10, 10, (124, 115, 104, 92, 78, 64, 49, 34, 18, 1), 0.247),
    (256, 182, 14, 13,
     (248, 234, 217, 197, 176, 154, 131, 107, 82, 57, 31, 4, 1), 0.254),
)


def _plan_from_schedule(s: int, r: int, d: int,
                        schedule: Tuple[int, ...]) -> EvaluationPlan:
    return EvaluationPlan(
        s=s, r=r, nu=1, d_working=d, level_digits=schedule,
        level_roundoffs=tuple(_G.exp10(-k) for k in schedule),
        tau_seq=(), norm_bs=(mpfr(1),) * (r + 1), norm_y=mpfr(1))


def check_cost_ratio() -> CriterionResult:
    worst = 0.0
    details = []
    for d, m, s, r, schedule, want in _TABLE1:
        _, sav = cost_ratio(_plan_from_schedule(s, r, d, schedule))
        worst = max(worst, abs(sav - want))
        details.append(f"d={d}: {100 * sav:.1f}% vs {100 * want:.1f}%")
    return CriterionResult(
        "cost_ratio_formula", worst <= 0.001 + 1e-12,
        "; ".join(details) + f" (max dev {100 * worst:.2f} pts)")


# ---------------------------------------------------------------------------
# 4. Planner schedule reproduction on cauchy(100)

def check_planner_table1() -> CriterionResult:
    cfg = ExperimentConfig(matrix="cauchy", n=100, family="taylor_exp",
                           m=42, digits=32)
    rows = run_table1(cfg, [d for d, *_ in _TABLE1],
                      m_list=[m for _, m, *_ in _TABLE1])
    problems = []
    for row, (d, m, s, r, schedule, want) in zip(rows, _TABLE1):
        if (row["s"], row["r"]) != (s, r):
            problems.append(f"d={d}: (s,r)=({row['s']},{row['r']})")
            continue
        dev = max(abs(a - b) for a, b in zip(row["schedule"], schedule))
        if dev > 2:
            problems.append(f"d={d}: schedule off by {dev}")
        if any(a < b for a, b in
               zip(row["schedule"], row["schedule"][1:])):
            problems.append(f"d={d}: schedule not monotone")
        if row["schedule"][-1] > 2:
            problems.append(f"d={d}: final level {row['schedule'][-1]} > 2")
        if abs(row["savings"] - want) > 0.03:
            problems.append(f"d={d}: savings {row['savings']:.3f}")
    return CriterionResult(
        "planner_schedule_reproduction", not problems,
        "; ".join(problems) if problems else
        "all four schedules within +-2 digits, savings within 3 points")


# ---------------------------------------------------------------------------
# 5. Nonnormal 2x2 diagnostics

def check_nonnormal_diagnostics() -> CriterionResult:
    X = scale_pow2(gen_nonnormal2(), 1)
    a, d_star = alpha_m(X, 42)
    nx = one_norm(X)
    # max column sum is |1e6|/2 + |-0.1|/2 on the second column
    norm_ok = float(nx) == 500000.05 and round(float(nx), -4) == 5e5
    ell0 = extra_squarings(nx, 7)
    a = float(a)
    ok = (d_star == 7 and 0.61 <= a <= 0.71 and norm_ok and ell0 == 18)
    return CriterionResult(
        "nonnormal_diagnostics", ok,
        f"d*={d_star} (want 7), alpha_m={a:.4f} (want [0.61,0.71]), "
        f"||X||_1={float(nx)} (5e5 at 2 sig figs), extra_squarings={ell0} "
        f"(want 18)")


# ---------------------------------------------------------------------------
# 6. Accuracy statistics of the mixed evaluator

def _accuracy_configs() -> List[ExperimentConfig]:
    fams = [("taylor_exp", 20), ("pade_exp_num", 13), ("pade_exp_den", 13),
            ("taylor_cos", 8)]
    cfgs = []
    for gi, gen in enumerate(("cauchy", "lotkin", "smoke", "triu_rand")):
        for ni, n in enumerate((8, 20)):
            for fi in range(3):
                fam, m = fams[(gi + ni + fi) % 4]
                cfgs.append(ExperimentConfig(
                    matrix=gen, n=n, seed=gi * 7 + ni, triu_scale=1.0,
                    family=fam, m=m, digits=32 if fi % 2 == 0 else 64))
    for gi, gen in enumerate(("cauchy", "lotkin", "smoke", "triu_rand")):
        fam, m = fams[gi]
        cfgs.append(ExperimentConfig(matrix=gen, n=50, seed=gi,
                                     triu_scale=1.0, family=fam, m=m,
                                     digits=32))
    for gi, gen in enumerate(("cauchy", "lotkin", "smoke", "triu_rand")):
        fam, m = fams[(gi + 1) % 4]
        cfgs.append(ExperimentConfig(matrix=gen, n=8, seed=gi + 100,
                                     triu_scale=1.0, family=fam, m=m,
                                     digits=64))
    return cfgs


def check_accuracy_suite() -> CriterionResult:
    cfgs = _accuracy_configs()
    n_soft = 0
    hard_fail = []
    for cfg in cfgs:
        rec = run_compare(cfg)
        if rec.eps_mixed <= 10.0 * rec.rnu:
            n_soft += 1
        if rec.eps_mixed > max(10.0 * rec.rnu, 10.0 * rec.eps_fixed):
            hard_fail.append(cfg.matrix_id())
    frac = n_soft / len(cfgs)
    ok = frac >= 0.95 and not hard_fail
    return CriterionResult(
        "accuracy_suite", ok,
        f"{len(cfgs)} runs, eps_v <= 10*r*n*u in {100 * frac:.0f}%, "
        f"hard failures: {hard_fail or 'none'}")


# ---------------------------------------------------------------------------
# 7. A-priori bound containment

def _rand_matrix(rng: random.Random, n: int, ctx: PrecisionCtx,
                 scale: float = 1.0) -> MPMatrix:
    return MPMatrix([[rng.uniform(-scale, scale) for _ in range(n)]
                     for _ in range(n)], ctx)


def _wide_oracle_horner(Bs, Y, digits: int) -> MPMatrix:
    ctx = PrecisionCtx(digits)
    phi = round_to(Bs[-1], ctx)
    for B in reversed(Bs[:-1]):
        phi = mat_mul(round_to(Y, ctx), phi, ctx)
        phi = mat_add(round_to(B, ctx), phi, ctx)
    return phi


def check_bound_containment() -> CriterionResult:
    rng = random.Random(20240517)
    bad = []

    # (a) mixed Horner vs Theorem bound, exact inputs at each level
    for trial in range(100):
        n = rng.randint(2, 8)
        r = rng.randint(1, 4)
        d = rng.randint(10, 24)
        ladder = sorted([rng.randint(2, d) for _ in range(r)], reverse=True)
        plan_ctxs = [PrecisionCtx(d)] + [PrecisionCtx(k) for k in ladder]
        # inputs exact at the coarsest precision so the hypotheses hold
        # with zero input error
        coarse = plan_ctxs[-1]
        Y = _rand_matrix(rng, n, coarse, 0.5)
        Bs = [_rand_matrix(rng, n, coarse, 2.0 ** -(3 * i))
              for i in range(r + 1)]
        plan = EvaluationPlan(
            s=2, r=r, nu=1, d_working=d, level_digits=tuple(ladder),
            level_roundoffs=tuple(PrecisionCtx(k).unit_roundoff
                                  for k in ladder),
            tau_seq=(), norm_bs=tuple(one_norm(B) for B in Bs),
            norm_y=one_norm(Y))
        got = horner_mixed(Bs, Y, plan)
        oracle = _wide_oracle_horner(Bs, Y, 4 * d)
        err = one_norm(mat_sub(round_to(got, PrecisionCtx(4 * d)), oracle,
                               PrecisionCtx(4 * d)))
        inp = BoundInputs(
            n=n, precisions=(PrecisionCtx(d).unit_roundoff,)
            + tuple(PrecisionCtx(k).unit_roundoff for k in ladder),
            norm_y=plan.norm_y, norm_bs=plan.norm_bs, s=2, r=r, nu=1)
        bound = thm21_bound(inp)
        if not err <= bound:
            bad.append(f"horner#{trial}: err={err} > bound={bound}")

    # (b) repeated-multiplication powers vs the elementwise power bound
    for trial in range(100):
        n = rng.randint(2, 6)
        t = rng.randint(2, 6)
        d = rng.randint(8, 20)
        ctx = PrecisionCtx(d)
        X = _rand_matrix(rng, n, ctx, 2.0)
        wide = PrecisionCtx(4 * d)
        hat = X
        exact = round_to(X, wide)
        absX = entrywise_abs(X, wide)
        abs_pow = absX
        for _ in range(t - 1):
            hat = mat_mul(hat, X, ctx)
            exact = mat_mul(exact, round_to(X, wide), wide)
            abs_pow = mat_mul(abs_pow, absX, wide)
        g = gamma((t - 1) * n, ctx.unit_roundoff)
        wg = wide.gmp
        for i in range(n):
            for j in range(n):
                lhs = wg.abs(wg.sub(hat.rows[i][j], exact.rows[i][j]))
                rhs = wg.mul(g, wg.abs(abs_pow.rows[i][j]))
                if not lhs <= rhs:
                    bad.append(f"power#{trial}@({i},{j})")

    # (c) block assembly vs the uniform assembly bound
    for trial in range(100):
        n = rng.randint(2, 6)
        s = rng.randint(2, 6)
        d = rng.randint(8, 20)
        ctx = PrecisionCtx(d)
        wide = PrecisionCtx(4 * d)
        X = _rand_matrix(rng, n, ctx, 1.0)
        coeffs = tuple(Fraction(rng.randint(-999, 999),
                                rng.randint(1, 10) * 4 ** j)
                       for j in range(s))
        series = CoefficientSeries(coeffs)
        powers = form_powers(X, s - 1, ctx)
        Bhat = assemble_block(series, 0, s, powers, ctx)
        # exact block from exact powers, and |X|^j majorants
        absX = entrywise_abs(X, wide)
        Xw = round_to(X, wide)
        P, Pa = round_to(powers[0], wide), round_to(powers[0], wide)
        exact = scalar_matrix(eval_coeff(coeffs[0], wide), n, wide)
        major = scalar_matrix(eval_coeff(abs(coeffs[0]), wide), n, wide)
        for j in range(1, s):
            P = mat_mul(P, Xw, wide)
            Pa = mat_mul(Pa, absX, wide)
            exact = mat_axpy(eval_coeff(coeffs[j], wide), P, exact, wide)
            major = mat_axpy(eval_coeff(abs(coeffs[j]), wide), Pa, major,
                             wide)
        g = gamma(max(0, (s - 2) * n + 2), ctx.unit_roundoff) if s >= 2 \
            else gamma(1, ctx.unit_roundoff)
        wg = wide.gmp
        for i in range(n):
            for j in range(n):
                lhs = wg.abs(wg.sub(round_to(Bhat, wide).rows[i][j],
                                    exact.rows[i][j]))
                rhs = wg.mul(g, wg.abs(major.rows[i][j]))
                if not lhs <= rhs:
                    bad.append(f"assembly#{trial}@({i},{j})")

    return CriterionResult(
        "bound_containment", not bad,
        f"300 randomized trials, violations: {bad[:3] or 'none'}")


# ---------------------------------------------------------------------------
# 8. Degenerate plans reduce bitwise to fixed precision

def check_degenerate_equivalence() -> CriterionResult:
    flat = lambda m: CoefficientSeries(tuple(Fraction(1)
                                             for _ in range(m + 1)))
    configs = []
    for gen in ("cauchy", "lotkin", "smoke"):
        for n in (3, 4, 5):
            for m in (5, 9):
                configs.append((gen, n, m, 20))
    configs = configs[:18] + [("smoke", 6, 12, 32), ("cauchy", 6, 7, 32)]
    mismatches = []
    not_clamped = []
    for gen, n, m, d in configs:
        ctx = PrecisionCtx(d)
        X = round_to(generate(gen, n), ctx)
        series = flat(m)
        mixed = ps_mixed_general(X, series, ctx)
        fixed = ps_fixed(X, series, ctx)
        if mixed.plan.nu != mixed.plan.r + 1 or any(
                k != d for k in mixed.plan.level_digits):
            not_clamped.append(f"{gen}(n={n},m={m})")
            continue
        if mixed.result != fixed.result:
            mismatches.append(f"{gen}(n={n},m={m})")
    ok = not mismatches and not not_clamped
    return CriterionResult(
        "degenerate_equivalence", ok,
        f"20 clamped configs, bitwise mismatches: {mismatches or 'none'}"
        + (f"; not clamped: {not_clamped}" if not_clamped else ""))


# ---------------------------------------------------------------------------
# 9. Closed-form vs inductive error multipliers

def check_f_recurrence() -> CriterionResult:
    rng = random.Random(7)
    worst = mpfr(0)
    for _ in range(50):
        r = rng.randint(1, 6)
        n = rng.randint(1, 200)
        base = rng.randint(16, 64)
        ladder = sorted([rng.randint(1, base) for _ in range(r)],
                        reverse=True)
        us = [PrecisionCtx(base).unit_roundoff] + \
            [PrecisionCtx(k).unit_roundoff for k in ladder]
        a = f_constants_closed(us, n)
        b = f_constants_inductive(us, n)
        for x, y in zip(a, b):
            rel = _G.div(_G.abs(_G.sub(x, y)), _G.abs(x))
            worst = max(worst, rel)
    ok = worst <= mpfr("1e-26")
    return CriterionResult(
        "f_constant_recurrence", ok,
        f"50 ladders, worst relative deviation {float(worst):.2e}")


ALL_CRITERIA: Tuple[Callable[[], CriterionResult], ...] = (
    check_pade_golden,
    check_ward_example,
    check_cost_ratio,
    check_planner_table1,
    check_nonnormal_diagnostics,
    check_accuracy_suite,
    check_bound_containment,
    check_degenerate_equivalence,
    check_f_recurrence,
)


def run_all(verbose: bool = True) -> List[CriterionResult]:
    results = []
    for fn in ALL_CRITERIA:
        res = fn()
        results.append(res)
        if verbose:
            print(res.line())
    return results
