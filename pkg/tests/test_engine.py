import random
from fractions import Fraction

import pytest
from gmpy2 import mpfr

from mpps.bounds import BoundInputs, thm21_bound
from mpps.coefficients import (CoefficientSeries, eval_coeff,
                               taylor_cos_coeffs, taylor_exp_coeffs)
from mpps.engine import (EvaluationPlan, cost_ratio, eval_b0_and_power,
                         horner_mixed, plan_only, plan_precisions, ps_fixed,
                         ps_mixed_exp, ps_mixed_general, snap_to_lattice)
from mpps.gallery import gen_cauchy, gen_triu_rand
from mpps.precision import (MPMatrix, PrecisionCtx, identity, mat_add,
                            mat_mul, mat_sub, one_norm, round_to, zeros)


def rand_matrix(rng, n, ctx, scale=1.0):
    return MPMatrix([[rng.uniform(-scale, scale) for _ in range(n)]
                     for _ in range(n)], ctx)


def flat_series(m):
    return CoefficientSeries(tuple(Fraction(1) for _ in range(m + 1)))


def scalar_taylor(m, digits):
    """Sum 1/i! evaluated exactly, then rounded once."""
    total = sum(Fraction(1, __import__("math").factorial(i))
                for i in range(m + 1))
    return eval_coeff(total, PrecisionCtx(digits))


class TestPsFixed:
    def test_zero_matrix(self):
        ctx = PrecisionCtx(16)
        rep = ps_fixed(zeros(3, 3, ctx), taylor_exp_coeffs(9), ctx)
        assert rep.result == identity(3, ctx)

    def test_degree_one(self):
        ctx = PrecisionCtx(16)
        series = CoefficientSeries((Fraction(2), Fraction(3)))
        X = MPMatrix([[1.5]], ctx)
        rep = ps_fixed(X, series, ctx)
        assert rep.plan.s == 1 and rep.plan.r == 1
        assert float(rep.result[0, 0].real) == 2 + 3 * 1.5

    def test_scalar_taylor_16(self):
        ctx = PrecisionCtx(32)
        X = MPMatrix([[1]], ctx)
        rep = ps_fixed(X, taylor_exp_coeffs(16), ctx)
        oracle = scalar_taylor(16, 64)
        g = PrecisionCtx(64).gmp
        rel = g.div(g.abs(g.sub(rep.result[0, 0].real, oracle)), oracle)
        assert rel < mpfr("1e-30")

    def test_matmul_count(self):
        ctx = PrecisionCtx(16)
        rng = random.Random(0)
        X = rand_matrix(rng, 4, ctx, 0.3)
        for m in (6, 9, 13):
            rep = ps_fixed(X, taylor_exp_coeffs(m), ctx)
            s, r = rep.plan.s, rep.plan.r
            assert sum(rep.matmuls_by_digits.values()) == s - 1 + r


class TestEvalB0AndPower:
    def test_s1(self):
        ctx = PrecisionCtx(16)
        rng = random.Random(1)
        X = rand_matrix(rng, 3, ctx)
        series = taylor_exp_coeffs(4)
        powers, B0, Y = eval_b0_and_power(X, 1, series, ctx)
        assert B0 == identity(3, ctx)  # b_0 = 1
        assert Y == X

    def test_nilpotent_power_exact_zero(self):
        ctx = PrecisionCtx(16)
        X = round_to(gen_triu_rand(4, 1.0, 3), ctx)
        _, _, Y = eval_b0_and_power(X, 4, taylor_exp_coeffs(12), ctx)
        assert Y == zeros(4, 4, ctx)

    def test_interleaving_matches_separate_formation(self):
        ctx = PrecisionCtx(20)
        rng = random.Random(2)
        X = rand_matrix(rng, 3, ctx, 0.5)
        series = taylor_exp_coeffs(9)
        powers, B0, Y = eval_b0_and_power(X, 3, series, ctx)
        assert powers[3] == Y and len(powers) == 4
        assert Y == mat_mul(mat_mul(X, X, ctx), X, ctx)


class TestPlanPrecisions:
    def test_flat_is_fixed(self):
        ctx = PrecisionCtx(24)
        plan = plan_precisions([1.0, 1.0, 1.0], 1.0, ctx, 10.0, s=2)
        assert plan.nu == plan.r + 1
        assert plan.level_digits == (24, 24)

    def test_monotone_and_bounded(self):
        ctx = PrecisionCtx(32)
        plan = plan_precisions([10.0, 1e-3, 1e-9, 1e-20], 0.5, ctx, 10.0,
                               s=2)
        ds = plan.level_digits
        assert all(a >= b for a, b in zip(ds, ds[1:]))
        assert all(1 <= d <= 32 for d in ds)
        # levels below the switch run at working precision
        assert all(ds[i - 1] == 32 for i in range(1, plan.nu))

    def test_table1_row2(self):
        X = round_to(gen_cauchy(100), PrecisionCtx(16))
        plan = plan_only(X, taylor_exp_coeffs(64), PrecisionCtx(64))
        want = (61, 55, 47, 38, 28, 18, 7, 1)
        assert plan.s == 8 and plan.r == 8
        assert all(abs(a - b) <= 2 for a, b in zip(plan.level_digits, want))

    def test_nilpotent_flag(self):
        ctx = PrecisionCtx(16)
        plan = plan_precisions([5.0, 3.0, 1.0], 0.0, ctx, 10.0, s=2)
        assert plan.nilpotent and plan.nu == 1


class TestSnapToLattice:
    def _plan(self, digits, d=16):
        return EvaluationPlan(
            s=2, r=len(digits), nu=1, d_working=d,
            level_digits=tuple(digits),
            level_roundoffs=tuple(PrecisionCtx(k).unit_roundoff
                                  for k in digits),
            tau_seq=(), norm_bs=(mpfr(1),) * (len(digits) + 1),
            norm_y=mpfr(1))

    def test_working_only_lattice(self):
        snapped = snap_to_lattice(self._plan([12, 5, 1]), [16])
        assert snapped.level_digits == (16, 16, 16)

    def test_nearest_upward(self):
        snapped = snap_to_lattice(self._plan([5]), [3, 8, 16])
        assert snapped.level_digits == (8,)

    def test_exact_member(self):
        snapped = snap_to_lattice(self._plan([16]), [3, 8, 16])
        assert snapped.level_digits == (16,)

    def test_missing_working_digits(self):
        with pytest.raises(ValueError):
            snap_to_lattice(self._plan([5]), [3, 8])


class TestHornerMixed:
    def test_r0_returns_b0(self):
        ctx = PrecisionCtx(16)
        rng = random.Random(3)
        B0 = rand_matrix(rng, 3, ctx)
        plan = EvaluationPlan(s=2, r=0, nu=1, d_working=16, level_digits=(),
                              level_roundoffs=(), tau_seq=(),
                              norm_bs=(one_norm(B0),), norm_y=mpfr(1))
        Y = rand_matrix(rng, 3, ctx)
        assert horner_mixed([B0], Y, plan) == B0

    def test_all_working_matches_plain_horner(self):
        ctx = PrecisionCtx(20)
        rng = random.Random(4)
        Bs = [rand_matrix(rng, 3, ctx) for _ in range(4)]
        Y = rand_matrix(rng, 3, ctx, 0.5)
        plan = EvaluationPlan(
            s=2, r=3, nu=4, d_working=20, level_digits=(20, 20, 20),
            level_roundoffs=(ctx.unit_roundoff,) * 3, tau_seq=(),
            norm_bs=tuple(one_norm(B) for B in Bs), norm_y=one_norm(Y))
        got = horner_mixed(Bs, Y, plan)
        phi = Bs[3]
        for j in (3, 2, 1):
            phi = mat_add(Bs[j - 1], mat_mul(Y, phi, ctx), ctx)
        assert got == phi

    def test_bound_containment_fixed_ladder(self):
        # 4x4, digit ladder (16, 10, 5, 2): error vs 64-digit oracle stays
        # under the a-priori bound
        rng = random.Random(5)
        d = 16
        ladder = (16, 10, 5, 2)
        coarse = PrecisionCtx(2)
        Bs = [rand_matrix(rng, 4, coarse, 2.0 ** -(4 * i))
              for i in range(5)]
        Y = rand_matrix(rng, 4, coarse, 0.5)
        plan = EvaluationPlan(
            s=2, r=4, nu=1, d_working=d, level_digits=ladder,
            level_roundoffs=tuple(PrecisionCtx(k).unit_roundoff
                                  for k in ladder),
            tau_seq=(), norm_bs=tuple(one_norm(B) for B in Bs),
            norm_y=one_norm(Y))
        got = horner_mixed(Bs, Y, plan)
        wide = PrecisionCtx(64)
        phi = round_to(Bs[4], wide)
        for j in (4, 3, 2, 1):
            phi = mat_add(round_to(Bs[j - 1], wide),
                          mat_mul(round_to(Y, wide), phi, wide), wide)
        err = one_norm(mat_sub(round_to(got, wide), phi, wide))
        inp = BoundInputs(
            n=4, precisions=(PrecisionCtx(d).unit_roundoff,)
            + tuple(PrecisionCtx(k).unit_roundoff for k in ladder),
            norm_y=plan.norm_y, norm_bs=plan.norm_bs, s=2, r=4, nu=1)
        assert err <= thm21_bound(inp)


class TestPsMixedExp:
    def test_zero_matrix_gives_identity(self):
        ctx = PrecisionCtx(16)
        rep = ps_mixed_exp(zeros(3, 3, ctx), 9, ctx)
        assert rep.result == identity(3, ctx)

    def test_scalar_against_oracle(self):
        ctx = PrecisionCtx(32)
        rep = ps_mixed_exp(MPMatrix([[1]], ctx), 20, ctx)
        oracle = scalar_taylor(20, 64)
        g = PrecisionCtx(64).gmp
        rel = float(g.div(g.abs(g.sub(rep.result[0, 0].real, oracle)),
                          oracle))
        assert rel <= 10 * rep.plan.r * 1 * 1e-32

    def test_matmul_count(self):
        ctx = PrecisionCtx(24)
        X = round_to(gen_cauchy(6), ctx)
        rep = ps_mixed_exp(X, 16, ctx)
        s, r = rep.plan.s, rep.plan.r
        assert sum(rep.matmuls_by_digits.values()) == s - 1 + r

    def test_growth_branch_small_norm(self):
        # tiny norm with fix_params off takes the variable-s branch; by
        # submultiplicativity ||X^s|| <= ||B_0|| ||X||^s always holds for
        # the exponential, so s stays at ceil(sqrt(m)) and the result must
        # match the fixed evaluation to working accuracy
        from mpps.precision import scale_pow2
        ctx = PrecisionCtx(24)
        X = round_to(scale_pow2(round_to(gen_cauchy(4), ctx), 6), ctx)
        rep = ps_mixed_exp(X, 9, ctx, fix_params=False)
        fixed = ps_fixed(X, taylor_exp_coeffs(9), ctx)
        wide = PrecisionCtx(48)
        diff = one_norm(mat_sub(round_to(rep.result, wide),
                                round_to(fixed.result, wide), wide))
        denom = one_norm(fixed.result)
        assert rep.plan.s == 3 and not rep.plan.fix_params
        assert float(diff) <= 10 * 9 * 4 * 1e-24 * float(denom)

    def test_explicit_powers_degenerate(self):
        # m = 1 forces s = m: the Horner phase vanishes and the result is
        # the two-term sum I + X with no matrix multiplications
        ctx = PrecisionCtx(16)
        rng = random.Random(7)
        X = rand_matrix(rng, 3, ctx, 0.25)
        rep = ps_mixed_exp(X, 1, ctx, fix_params=False)
        assert rep.plan.explicit_powers and rep.plan.s == 1
        assert sum(rep.matmuls_by_digits.values()) == 0
        want = mat_add(identity(3, ctx), X, ctx)
        assert rep.result == want


class TestPsMixedGeneral:
    def test_flat_clamps_to_fixed_bitwise(self):
        ctx = PrecisionCtx(20)
        X = round_to(gen_cauchy(4), ctx)
        series = flat_series(9)
        mixed = ps_mixed_general(X, series, ctx)
        fixed = ps_fixed(X, series, ctx)
        assert mixed.plan.nu == mixed.plan.r + 1
        assert all(d == 20 for d in mixed.plan.level_digits)
        assert mixed.result == fixed.result

    def test_cosine_in_x_squared(self):
        rng = random.Random(6)
        ctx = PrecisionCtx(64)
        X = rand_matrix(rng, 8, ctx, 0.1)  # ||X||_1 <= 1
        Z = mat_mul(X, X, ctx)
        series = taylor_cos_coeffs(12)
        rep = ps_mixed_general(Z, series, ctx)
        ref = ps_fixed(round_to(Z, PrecisionCtx(128)), series,
                       PrecisionCtx(128))
        wide = PrecisionCtx(128)
        diff = one_norm(mat_sub(round_to(rep.result, wide), ref.result,
                                wide))
        rel = float(diff) / float(one_norm(ref.result))
        assert rel <= 10 * rep.plan.r * 8 * 1e-64

    def test_rejects_constant_series(self):
        ctx = PrecisionCtx(16)
        with pytest.raises(ValueError):
            ps_mixed_general(identity(2, ctx), flat_series(0), ctx)


class TestCostRatio:
    def _plan(self, s, r, d, digits):
        return EvaluationPlan(
            s=s, r=r, nu=1, d_working=d, level_digits=tuple(digits),
            level_roundoffs=tuple(PrecisionCtx(k).unit_roundoff
                                  for k in digits),
            tau_seq=(), norm_bs=(mpfr(1),) * (r + 1), norm_y=mpfr(1))

    def test_table1_row2_exact_fraction(self):
        cr, sav = cost_ratio(self._plan(8, 8, 64,
                                        (61, 55, 47, 38, 28, 18, 7, 1)))
        assert abs(cr - 703 / 960) < 1e-12
        assert abs(sav - 0.268) < 0.001

    def test_table1_row1(self):
        _, sav = cost_ratio(self._plan(7, 6, 32, (30, 25, 18, 11, 3, 1)))
        assert abs(sav - 0.271) < 0.001

    def test_all_working_no_savings(self):
        cr, sav = cost_ratio(self._plan(3, 4, 16, (16,) * 4))
        assert cr == 1.0 and sav == 0.0


class TestPlanValidation:
    def test_non_monotone_schedule_rejected(self):
        with pytest.raises(ValueError):
            EvaluationPlan(s=2, r=2, nu=1, d_working=16,
                           level_digits=(5, 9),
                           level_roundoffs=(mpfr("1e-5"), mpfr("1e-9")),
                           tau_seq=(), norm_bs=(mpfr(1),) * 3,
                           norm_y=mpfr(1))

    def test_nu_out_of_range(self):
        with pytest.raises(ValueError):
            EvaluationPlan(s=2, r=1, nu=5, d_working=16, level_digits=(16,),
                           level_roundoffs=(mpfr("1e-16"),), tau_seq=(),
                           norm_bs=(mpfr(1),) * 2, norm_y=mpfr(1))
