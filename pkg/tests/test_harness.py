import math
from fractions import Fraction

import pytest
from gmpy2 import mpfr

from mpps.coefficients import eval_coeff, taylor_exp_coeffs
from mpps.engine import cost_ratio, ps_fixed
from mpps.gallery import (gen_cauchy, gen_lotkin, gen_nonnormal2, gen_smoke,
                          gen_triu_rand, gen_ward, generate)
from mpps.harness import (ComparisonRecord, ExperimentConfig, make_series,
                          reference_eval, relative_error, run_compare,
                          run_eval, run_table1, table_to_csv)
from mpps.precision import (MPMatrix, NORM_CTX, PrecisionCtx, identity,
                            mat_mul, one_norm, round_to, scale_pow2, zeros)


class TestGenerators:
    def test_cauchy_small(self):
        A = gen_cauchy(2)
        assert float(A[0, 0].real) == 0.5
        assert A[0, 1] == A[1, 0]  # symmetric

    def test_cauchy_n1(self):
        assert float(gen_cauchy(1)[0, 0].real) == 0.5

    def test_ward_values(self):
        A = gen_ward()
        assert float(A[0, 0].real) == -131
        assert one_norm(A) == 908
        trace = sum(float(A[i, i].real) for i in range(3))
        assert trace == -23

    def test_nonnormal2(self):
        A = gen_nonnormal2()
        X = scale_pow2(A, 1)
        assert float(one_norm(X)) == 500000.05
        # triangular: eigenvalues are the diagonal, both -0.1
        assert float(A[0, 0].real) == -0.1 and float(A[1, 1].real) == -0.1
        # powers decay despite the huge (1,2) entry
        X2 = mat_mul(X, X, NORM_CTX)
        assert one_norm(X2) < one_norm(X)

    def test_triu_rand_nilpotent(self):
        X = gen_triu_rand(5, 100.0, 42)
        P = X
        for _ in range(4):
            P = mat_mul(P, X, NORM_CTX)
        assert P == zeros(5, 5, NORM_CTX)

    def test_triu_rand_deterministic(self):
        assert gen_triu_rand(6, 10.0, 7) == gen_triu_rand(6, 10.0, 7)
        assert gen_triu_rand(6, 10.0, 7) != gen_triu_rand(6, 10.0, 8)

    def test_lotkin2(self):
        # Hilbert with the first row replaced by ones: second row 1/2, 1/3
        A = gen_lotkin(2)
        assert float(A[0, 0].real) == 1 and float(A[0, 1].real) == 1
        assert float(A[1, 0].real) == 0.5
        assert A[1, 1] == gen_cauchy(2)[0, 1]  # 1/3

    def test_smoke_diagonal_modulus(self):
        ctx = PrecisionCtx(30)
        A = gen_smoke(7, ctx)
        g = ctx.gmp
        for i in range(7):
            mod = g.abs(A[i, i])
            assert g.abs(g.sub(mod, mpfr(1))) <= mpfr("1e-28")

    def test_dispatcher(self):
        assert generate("ward") == gen_ward()
        with pytest.raises(KeyError):
            generate("mystery")


class TestReferenceEval:
    def test_zero_matrix(self):
        ctx = PrecisionCtx(16)
        ref = reference_eval(zeros(2, 2, ctx), taylor_exp_coeffs(8), ctx)
        assert ref == identity(2, ctx)

    def test_scalar_oracle_m30(self):
        ctx = PrecisionCtx(64)
        X = MPMatrix([[1]], ctx)
        ref = reference_eval(X, taylor_exp_coeffs(30), ctx)
        total = sum(Fraction(1, math.factorial(i)) for i in range(31))
        oracle = eval_coeff(total, PrecisionCtx(80))
        g = PrecisionCtx(80).gmp
        rel = g.div(g.abs(g.sub(ref[0, 0].real, oracle)), oracle)
        assert rel <= mpfr("1e-63")

    def test_consistent_with_working_fixed(self):
        ctx = PrecisionCtx(24)
        X = round_to(gen_cauchy(5), ctx)
        series = taylor_exp_coeffs(12)
        ref = reference_eval(X, series, ctx)
        fixed = ps_fixed(X, series, ctx)
        r, n = fixed.plan.r, 5
        assert relative_error(fixed.result, ref) <= r * n * 1e-24


class TestRunCompare:
    def test_degenerate_errors_equal(self):
        # a large-normed argument clamps every level to the working
        # precision, so both sides are bitwise identical
        cfg = ExperimentConfig(matrix="ward", family="pade_exp_num",
                               m=4, digits=16)
        rec = run_compare(cfg)
        assert rec.plan["nu"] == rec.plan["r"] + 1
        assert rec.eps_mixed == rec.eps_fixed

    def test_cauchy_exp_accuracy(self):
        cfg = ExperimentConfig(matrix="cauchy", n=20, family="taylor_exp",
                               m=24, digits=32)
        rec = run_compare(cfg)
        assert rec.eps_mixed <= 10 * rec.rnu

    def test_ward_pade_comparable(self):
        cfg = ExperimentConfig(matrix="ward", scale_l=6,
                               family="pade_exp_num", m=13, digits=34)
        rec = run_compare(cfg)
        assert rec.eps_mixed <= 10 * max(rec.eps_fixed, rec.rnu)

    def test_record_roundtrip(self):
        rec = ComparisonRecord("id", 1e-30, 2e-30, 1e-29, 0.25, {"s": 2})
        d = rec.to_dict()
        assert d["matrix_id"] == "id" and d["savings"] == 0.25


class TestRunTable1:
    def test_row1_schedule(self):
        cfg = ExperimentConfig(matrix="cauchy", n=100, family="taylor_exp",
                               m=42, digits=32)
        rows = run_table1(cfg, [32])
        row = rows[0]
        assert (row["s"], row["r"]) == (7, 6)
        want = (30, 25, 18, 11, 3, 1)
        assert all(abs(a - b) <= 2 for a, b in zip(row["schedule"], want))
        assert abs(row["savings"] - 0.271) <= 0.03

    def test_savings_consistent_with_cost_ratio(self):
        cfg = ExperimentConfig(matrix="cauchy", n=30, family="taylor_exp",
                               m=25, digits=20)
        rows = run_table1(cfg, [20, 40])
        from mpps.engine import EvaluationPlan
        for row in rows:
            ds = tuple(row["schedule"])
            plan = EvaluationPlan(
                s=row["s"], r=row["r"], nu=1, d_working=row["digits"],
                level_digits=ds,
                level_roundoffs=tuple(PrecisionCtx(k).unit_roundoff
                                      for k in ds),
                tau_seq=(), norm_bs=(mpfr(1),) * (row["r"] + 1),
                norm_y=mpfr(1))
            _, sav = cost_ratio(plan)
            assert abs(sav - row["savings"]) <= 1e-12

    def test_csv_shape(self):
        cfg = ExperimentConfig(matrix="cauchy", n=10, family="taylor_exp",
                               m=9, digits=16)
        rows = run_table1(cfg, [16, 32])
        text = table_to_csv(rows)
        lines = text.strip().splitlines()
        assert lines[0].startswith("digits,") and len(lines) == 3

    def test_misaligned_m_list(self):
        cfg = ExperimentConfig(matrix="cauchy", n=10, family="taylor_exp",
                               m=9, digits=16)
        with pytest.raises(ValueError):
            run_table1(cfg, [16, 32], m_list=[9])


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(n=0)
        with pytest.raises(ValueError):
            ExperimentConfig(m=0)

    def test_matrix_id(self):
        cfg = ExperimentConfig(matrix="triu_rand", n=8, seed=3, scale_l=2)
        tag = cfg.matrix_id()
        assert "triu_rand" in tag and "seed=3" in tag and "2^2" in tag

    def test_unknown_series(self):
        with pytest.raises(KeyError):
            make_series("mystery", 4)


class TestRunEval:
    def test_report_fields(self):
        cfg = ExperimentConfig(matrix="cauchy", n=6, family="taylor_exp",
                               m=16, digits=24)
        rep = run_eval(cfg, with_bound=True)
        assert rep.result.shape == (6, 6)
        assert 0 < rep.cost_ratio <= 1
        assert abs(rep.savings - (1 - rep.cost_ratio)) <= 1e-12
        assert rep.bound is not None and rep.bound > 0
        assert abs(sum(rep.timing_buckets.values()) - 1) < 1e-9

    def test_lattice_diagnostics(self):
        cfg = ExperimentConfig(matrix="cauchy", n=5, family="taylor_exp",
                               m=9, digits=16, lattice=(4, 8, 16))
        rep = run_eval(cfg)
        snapped = rep.diagnostics["snapped_digits"]
        assert all(d in (4, 8, 16) for d in snapped)
