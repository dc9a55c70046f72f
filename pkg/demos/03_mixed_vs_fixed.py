"""Mixed-precision evaluation costs less and loses nothing.

For each test matrix we evaluate the same polynomial twice -- once with
every matrix product at the working precision, once with the planned
descending schedule -- and compare both against a reference computed at
twice the digits.  The yardstick is r*n*u: the scale of rounding error
one expects from the outer Horner recurrence alone.
"""

from mpps import ExperimentConfig, run_compare

CONFIGS = [
    ExperimentConfig(matrix="cauchy", n=20, family="taylor_exp",
                     m=30, digits=32),
    ExperimentConfig(matrix="lotkin", n=12, family="taylor_exp",
                     m=24, digits=32),
    ExperimentConfig(matrix="ward", scale_l=6, family="pade_exp_num",
                     m=13, digits=34),
    ExperimentConfig(matrix="triu_rand", n=16, seed=3, triu_scale=1.0,
                     family="taylor_cos", m=24, digits=32),
    ExperimentConfig(matrix="smoke", n=10, seed=1, family="taylor_exp",
                     m=30, digits=64),
]

print(f"{'matrix':34s} {'eps_mixed':>10s} {'eps_fixed':>10s} "
      f"{'r*n*u':>10s} {'savings':>8s}")
for cfg in CONFIGS:
    rec = run_compare(cfg)
    print(f"{rec.matrix_id:34s} {rec.eps_mixed:10.2e} {rec.eps_fixed:10.2e} "
          f"{rec.rnu:10.2e} {100 * rec.savings:7.1f}%")
    assert rec.eps_mixed <= 10 * max(rec.eps_fixed, rec.rnu)

print("\nmixed never exceeds 10x the worse of (fixed error, r*n*u)")
