"""Experiment runners: reference oracle, mixed-vs-fixed comparison, and
the precision-schedule table over a list of working precisions."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpfr

from .coefficients import (CoefficientSeries, VAR_X_SQUARED,
                           pade_exp_coeffs, taylor_cos_coeffs,
                           taylor_exp_coeffs)
from .engine import (EvaluationPlan, EvaluationReport, cost_ratio,
                     plan_only, ps_fixed, ps_mixed_exp, ps_mixed_general,
                     snap_to_lattice)
from .gallery import generate
from .precision import (MPMatrix, NORM_CTX, PrecisionCtx, mat_mul, mat_sub,
                        one_norm, round_to, scale_pow2)


def make_series(family: str, m: int) -> CoefficientSeries:
    if family == "taylor_exp":
        return taylor_exp_coeffs(m)
    if family == "pade_exp_num":
        return pade_exp_coeffs(m, m)[0]
    if family == "pade_exp_den":
        return pade_exp_coeffs(m, m)[1]
    if family == "taylor_cos":
        return taylor_cos_coeffs(m)
    raise KeyError(f"unknown series family {family!r}")


@dataclass
class ExperimentConfig:
    matrix: str = "cauchy"          # generator name
    n: int = 10
    seed: int = 0
    triu_scale: float = 100.0
    scale_l: int = 0                # X = 2^(-l) * A, exact binary scaling
    family: str = "taylor_exp"
    m: int = 16
    digits: int = 32
    delta: float = 10.0
    fix_params: bool = True
    lattice: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.digits < 1:
            raise ValueError("n, m, digits must be >= 1")

    @property
    def ctx(self) -> PrecisionCtx:
        return PrecisionCtx(self.digits)

    def matrix_id(self) -> str:
        tag = f"{self.matrix}(n={self.n}"
        if self.matrix == "triu_rand":
            tag += f",seed={self.seed},scale={self.triu_scale}"
        tag += ")"
        if self.scale_l:
            tag += f"/2^{self.scale_l}"
        return tag


@dataclass
class ComparisonRecord:
    matrix_id: str
    eps_mixed: float
    eps_fixed: float
    rnu: float
    savings: float
    plan: dict
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "matrix_id": self.matrix_id,
            "eps_mixed": self.eps_mixed,
            "eps_fixed": self.eps_fixed,
            "rnu": self.rnu,
            "savings": self.savings,
            "plan": self.plan,
            "seed": self.seed,
        }


def build_argument(cfg: ExperimentConfig) -> Tuple[MPMatrix, CoefficientSeries]:
    """Generate, scale, and round the evaluation argument at the working
    precision; for the cosine family the polynomial variable is X^2."""
    ctx = cfg.ctx
    A = generate(cfg.matrix, cfg.n, cfg.seed, cfg.triu_scale, ctx)
    if cfg.scale_l:
        A = scale_pow2(A, cfg.scale_l)
    X = round_to(A, ctx)
    series = make_series(cfg.family, cfg.m)
    if series.variable_note == VAR_X_SQUARED:
        X = mat_mul(X, X, ctx)
    return X, series


def reference_eval(X: MPMatrix, series: CoefficientSeries,
                   ctx: PrecisionCtx) -> MPMatrix:
    """Fixed-precision PS at twice the digits, rounded back to ctx."""
    wide = PrecisionCtx(2 * ctx.decimal_digits)
    return round_to(ps_fixed(X, series, wide).result, ctx)


def relative_error(approx: MPMatrix, truth: MPMatrix) -> float:
    """1-norm relative error, with the difference taken well above the
    operand precisions so it measures the operands, not itself."""
    wide = PrecisionCtx(2 * max(approx.produced_at.decimal_digits,
                                truth.produced_at.decimal_digits))
    denom = one_norm(truth)
    if denom == 0:
        return float(one_norm(mat_sub(approx, truth, wide)))
    return float(NORM_CTX.gmp.div(one_norm(mat_sub(approx, truth, wide)),
                                  denom))


def run_eval(cfg: ExperimentConfig, with_bound: bool = False) -> EvaluationReport:
    """One mixed-precision evaluation per the config."""
    X, series = build_argument(cfg)
    if cfg.family == "taylor_exp":
        rep = ps_mixed_exp(X, cfg.m, cfg.ctx, cfg.fix_params, cfg.delta,
                           with_bound)
    else:
        rep = ps_mixed_general(X, series, cfg.ctx, cfg.delta, with_bound)
    if cfg.lattice:
        rep.diagnostics["lattice"] = list(cfg.lattice)
        rep.diagnostics["snapped_digits"] = list(
            snap_to_lattice(rep.plan, cfg.lattice).level_digits)
    return rep


def run_compare(cfg: ExperimentConfig) -> ComparisonRecord:
    """Mixed vs fixed vs the 2x-digit reference."""
    X, series = build_argument(cfg)
    ctx = cfg.ctx
    if cfg.family == "taylor_exp":
        mixed = ps_mixed_exp(X, cfg.m, ctx, cfg.fix_params, cfg.delta)
    else:
        mixed = ps_mixed_general(X, series, ctx, cfg.delta)
    fixed = ps_fixed(X, series, ctx)
    ref = reference_eval(X, series, ctx)
    eps_v = relative_error(mixed.result, ref)
    eps_f = relative_error(fixed.result, ref)
    rnu = float(mixed.plan.r * X.n_rows) * 10.0 ** (-cfg.digits)
    return ComparisonRecord(
        matrix_id=cfg.matrix_id(), eps_mixed=eps_v, eps_fixed=eps_f,
        rnu=rnu, savings=mixed.savings, plan=mixed.plan.to_dict(),
        seed=cfg.seed)


def run_table1(cfg: ExperimentConfig, digits_list: Sequence[int],
               m_list: Optional[Sequence[int]] = None) -> List[dict]:
    """Planner schedules and savings across working precisions.

    The approximant degree is an input per precision (degree selection is
    out of scope); by default the same cfg.m is reused for every row."""
    if m_list is None:
        m_list = [cfg.m] * len(digits_list)
    if len(m_list) != len(digits_list):
        raise ValueError("m_list and digits_list must align")
    rows = []
    for d, m in zip(digits_list, m_list):
        sub = ExperimentConfig(
            matrix=cfg.matrix, n=cfg.n, seed=cfg.seed,
            triu_scale=cfg.triu_scale, scale_l=cfg.scale_l,
            family=cfg.family, m=m, digits=d, delta=cfg.delta,
            fix_params=cfg.fix_params, lattice=cfg.lattice)
        X, series = build_argument(sub)
        plan = plan_only(X, series, sub.ctx, sub.delta, sub.fix_params)
        if sub.lattice:
            plan = snap_to_lattice(plan, sub.lattice)
        cr, sav = cost_ratio(plan)
        rows.append({
            "digits": d, "m": m, "s": plan.s, "r": plan.r,
            "schedule": list(plan.level_digits),
            "cost_ratio": cr, "savings": sav,
        })
    return rows


def table_to_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["digits", "m", "s", "r", "schedule", "cost_ratio", "savings"])
    for row in rows:
        w.writerow([row["digits"], row["m"], row["s"], row["r"],
                    " ".join(str(x) for x in row["schedule"]),
                    f"{row['cost_ratio']:.4f}", f"{row['savings']:.4f}"])
    return buf.getvalue()
