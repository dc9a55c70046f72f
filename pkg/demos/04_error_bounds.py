"""A priori error bounds: computable before the evaluation, honored after.

The bound for the mixed Horner recurrence is a sum over levels of
||B_i|| ||Y||^i * gamma terms, where the f-constants propagate each
level's roundoff through everything outside it.  We check it against
the observed forward error, and also show the elementwise bound for
explicitly formed powers.
"""

import random

from mpps import (BoundInputs, ExperimentConfig, gen_cauchy,
                  power_error_bound, reference_eval, relative_error,
                  round_to, run_eval, taylor_exp_coeffs, thm21_bound)
from mpps.precision import MPMatrix, PrecisionCtx, mat_mul, one_norm

# --- the full-run bound against the observed error -------------------
cfg = ExperimentConfig(matrix="cauchy", n=20, family="taylor_exp",
                       m=30, digits=32)
rep = run_eval(cfg, with_bound=True)
X = round_to(gen_cauchy(20), cfg.ctx)
ref = reference_eval(X, taylor_exp_coeffs(30), cfg.ctx)
observed = relative_error(rep.result, ref)
print(f"observed relative error  {observed:.3e}")
print(f"a priori bound           {float(rep.bound):.3e}")
assert observed <= float(rep.bound)

# The bound is also available standalone from the plan's ingredients.
plan = rep.plan
inp = BoundInputs(n=20,
                  precisions=(PrecisionCtx(plan.d_working).unit_roundoff,)
                  + plan.level_roundoffs,
                  norm_y=plan.norm_y, norm_bs=plan.norm_bs,
                  s=plan.s, r=plan.r, nu=plan.nu)
print(f"recomputed bound         {float(thm21_bound(inp)):.3e}")

# --- elementwise power-formation bound -------------------------------
# |fl(X^t) - X^t| <= gamma_{(t-1)n} |X|^t for nonnegative X, entry by
# entry; we verify t = 4 on a random nonnegative 6x6 at 8 digits.
rng = random.Random(2)
low, wide = PrecisionCtx(8), PrecisionCtx(40)
X = MPMatrix([[rng.uniform(0, 1) for _ in range(6)] for _ in range(6)],
             low)
hat, exact = X, round_to(X, wide)
for _ in range(3):
    hat = mat_mul(hat, X, low)
    exact = mat_mul(exact, round_to(X, wide), wide)
g = power_error_bound(6, 4, low.unit_roundoff)
wg = wide.gmp
worst = max(
    float(wg.div(wg.abs(wg.sub(hat[i, j].real, exact[i, j].real)),
                 exact[i, j].real))
    for i in range(6) for j in range(6))
print(f"\npower t=4: worst entrywise relative error {worst:.3e}")
print(f"           elementwise bound              {float(g):.3e}")
assert worst <= float(g)
