"""Mixed-precision Paterson-Stockmeyer evaluation of matrix polynomials
with decaying scalar coefficients, with a-priori error bounds and a small
experiment harness.
"""

from .precision import (BOUND_CTX, NORM_CTX, DimensionError, MPMatrix,
                        PrecisionCtx, from_rows, identity, mat_add, mat_axpy,
                        mat_mul, mat_sub, matrix_from_csv, matrix_from_json,
                        matrix_to_csv, matrix_to_json, one_norm, round_to,
                        scale_pow2, zeros)
from .coefficients import (CoefficientSeries, eval_coeff, pade_exp_coeffs,
                           series_from_json, series_to_json,
                           taylor_cos_coeffs, taylor_exp_coeffs)
from .engine import (EvaluationPlan, EvaluationReport, cost_ratio,
                     eval_b0_and_power, horner_mixed, plan_only,
                     plan_precisions, ps_fixed, ps_mixed_exp,
                     ps_mixed_general, snap_to_lattice)
from .bounds import (BoundInputs, BoundInvalidError, alpha_m,
                     assembly_error_bound, extra_squarings, gamma, gamma_si,
                     power_error_bound, tau_sequence, thm21_bound)
from .gallery import (gen_cauchy, gen_lotkin, gen_nonnormal2, gen_smoke,
                      gen_triu_rand, gen_ward, generate)
from .harness import (ComparisonRecord, ExperimentConfig, reference_eval,
                      relative_error, run_compare, run_eval, run_table1)

__version__ = "0.1.0"

__all__ = [
    "BOUND_CTX", "NORM_CTX", "DimensionError", "MPMatrix", "PrecisionCtx",
    "from_rows", "identity", "mat_add", "mat_axpy", "mat_mul", "mat_sub",
    "matrix_from_csv", "matrix_from_json", "matrix_to_csv", "matrix_to_json",
    "one_norm", "round_to", "scale_pow2", "zeros",
    "CoefficientSeries", "eval_coeff", "pade_exp_coeffs", "series_from_json",
    "series_to_json", "taylor_cos_coeffs", "taylor_exp_coeffs",
    "EvaluationPlan", "EvaluationReport", "cost_ratio", "eval_b0_and_power",
    "horner_mixed", "plan_only", "plan_precisions", "ps_fixed",
    "ps_mixed_exp", "ps_mixed_general", "snap_to_lattice",
    "BoundInputs", "BoundInvalidError", "alpha_m", "assembly_error_bound",
    "extra_squarings", "gamma", "gamma_si", "power_error_bound",
    "tau_sequence", "thm21_bound",
    "gen_cauchy", "gen_lotkin", "gen_nonnormal2", "gen_smoke",
    "gen_triu_rand", "gen_ward", "generate",
    "ComparisonRecord", "ExperimentConfig", "reference_eval",
    "relative_error", "run_compare", "run_eval", "run_table1",
]
