"""Working with precision contexts and multiprecision matrices.

Every matrix carries the context it was produced at, every operation
states the context it rounds into, and rounding errors obey the usual
gamma_k = k*u / (1 - k*u) elementwise bounds.
"""

import random

from mpps import MPMatrix, PrecisionCtx, gamma, mat_mul, one_norm, round_to
from mpps.precision import entrywise_abs

# A context is just a decimal digit count; its unit roundoff is 10^-d.
for d in (8, 16, 34, 64):
    ctx = PrecisionCtx(d)
    print(f"d={d:3d}  unit roundoff u = {ctx.unit_roundoff}")

# Rounding a matrix to fewer digits is explicit and idempotent.
wide = PrecisionCtx(40)
low = PrecisionCtx(8)
rng = random.Random(0)
A = MPMatrix([[rng.uniform(-1, 1) for _ in range(4)] for _ in range(4)],
             wide)
A8 = round_to(A, low)
assert round_to(A8, low) == A8
print(f"\n||A||_1 = {one_norm(A)}   ||round(A, 8)||_1 = {one_norm(A8)}")

# A product computed at 8 digits deviates from the 40-digit product by
# at most gamma_{2} * (|A| |B|) entrywise (fused accumulation).
B = MPMatrix([[rng.uniform(-1, 1) for _ in range(4)] for _ in range(4)],
             wide)
got = mat_mul(round_to(A, low), round_to(B, low), low)
ref = mat_mul(A, B, wide)
g = wide.gmp
cap = g.mul(gamma(2, low.unit_roundoff),
            one_norm(mat_mul(entrywise_abs(A, wide),
                             entrywise_abs(B, wide), wide)))
err = one_norm(
    MPMatrix([[g.sub(got[i, j].real, ref[i, j].real) for j in range(4)]
              for i in range(4)], wide))
print(f"8-digit product error  {err}")
print(f"gamma-style cap        {cap}")
assert err <= cap
print("\nerror sits below the a priori cap, as it must")
