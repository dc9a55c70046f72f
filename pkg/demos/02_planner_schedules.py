"""How the precision planner turns coefficient decay into a schedule.

For exp at degree m = 42 the outer Horner levels can run at far fewer
digits than the working precision: level i only needs to resolve
||B_0|| u / (||B_i|| ||Y||^i), and the decay of 1/i! does the rest.
"""

from mpps import (ExperimentConfig, cost_ratio, gen_cauchy, plan_only,
                  round_to, snap_to_lattice, taylor_exp_coeffs)
from mpps.precision import PrecisionCtx

ctx = PrecisionCtx(32)
X = round_to(gen_cauchy(100), ctx)
plan = plan_only(X, taylor_exp_coeffs(42), ctx)

print(f"m = 42, working digits = {ctx.decimal_digits}")
print(f"block size s = {plan.s}, outer degree r = {plan.r}")
print(f"level digits (inner to outer): {list(plan.level_digits)}")
cr, sav = cost_ratio(plan)
print(f"cost ratio = {cr:.4f}  ->  savings = {100 * sav:.1f}%")

# The schedule is monotone: never ask for more digits further out.
assert all(a >= b for a, b in zip(plan.level_digits, plan.level_digits[1:]))

# On hardware with a fixed menu of formats, snap upward onto a lattice.
snapped = snap_to_lattice(plan, (8, 16, 24, 32))
print(f"\nsnapped to {{8,16,24,32}}:       {list(snapped.level_digits)}")
cr2, sav2 = cost_ratio(snapped)
print(f"cost ratio = {cr2:.4f}  ->  savings = {100 * sav2:.1f}%")

# The same schedules across several working precisions, as one table.
from mpps import run_table1
from mpps.harness import table_to_csv

cfg = ExperimentConfig(matrix="cauchy", n=100, family="taylor_exp",
                       m=42, digits=32)
rows = run_table1(cfg, [32, 64, 100, 182], m_list=[42, 64, 100, 182])
print("\n" + table_to_csv(rows))
