import csv
import math

import numpy as np
import pytest

from lowdisc import (
    ContractViolationError,
    Design,
    Domain,
    Study,
    StudyConfig,
    cubature_estimate,
    integrand_example,
    reference_mu,
    run_compare_study,
    run_correlation_study,
    run_cubature_example,
    run_study,
    verify_appendix,
)
from lowdisc import experiments
from lowdisc.targets import C_NORMAL


class TestIntegrand:
    def test_zero(self):
        assert integrand_example(np.zeros(10)) == 0.0

    def test_invariance_under_signed_permutations(self):
        rng = np.random.default_rng(40)
        x = rng.normal(size=7)
        ref = integrand_example(x)
        for _ in range(10):
            perm = rng.permutation(7)
            signs = rng.choice([-1.0, 1.0], size=7)
            assert abs(integrand_example(signs * x[perm]) - ref) <= 1e-15 * abs(ref)

    def test_bounded(self):
        rng = np.random.default_rng(41)
        vals = integrand_example(rng.normal(size=(1000, 5)) * 10)
        assert np.all(vals >= 0.0) and np.all(vals < 1e8)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(42)
        pts = rng.normal(size=(6, 3))
        batch = integrand_example(pts)
        singles = [integrand_example(p) for p in pts]
        np.testing.assert_allclose(batch, singles, rtol=1e-15)


class TestReferenceMu:
    def test_matches_moment_series_at_d10(self):
        # independent oracle: E[S/(1+eps*S)] = d - eps*d(d+2) + eps^2*d(d+2)(d+4) - ...
        d, eps = 10, 1e-8
        series = d - eps * d * (d + 2) + eps**2 * d * (d + 2) * (d + 4)
        assert abs(reference_mu(d) - series) <= 1e-9

    def test_undamped_recovers_chi_square_mean(self):
        for d in (1, 4, 10):
            assert abs(reference_mu(d, damping=0.0) - d) <= 1e-9 * d

    def test_d1_against_monte_carlo(self):
        rng = np.random.default_rng(43)
        z = rng.normal(size=1_000_000)
        samples = z**2 / (1.0 + 1e-8 * z**2)
        band = 4.0 * samples.std() / math.sqrt(samples.size)
        assert abs(reference_mu(1) - samples.mean()) <= band

    def test_dimension_guard(self):
        with pytest.raises(ContractViolationError):
            reference_mu(0)


class TestCubatureExample:
    def test_single_point_at_origin(self):
        design = Design(np.zeros((1, 4)), Domain.REAL_SPACE)
        assert cubature_estimate(design) == 0.0

    def test_example_orderings(self):
        r1, r2 = run_cubature_example(seed=0)
        assert r1.reference == r2.reference
        # similar uniform discrepancies, wildly different normal ones
        assert abs(r1.discrepancy_uniform - r2.discrepancy_uniform) <= 0.1 * max(
            r1.discrepancy_uniform, r2.discrepancy_uniform
        )
        assert r2.discrepancy_normal >= 2.0 * r1.discrepancy_normal
        assert r2.relative_error >= 10.0 * r1.relative_error
        assert r1.relative_error <= 0.01
        assert r1.discrepancy_normal < r2.discrepancy_normal
        assert r1.relative_error < r2.relative_error

    def test_origin_reference_variant(self):
        r1, r2 = run_cubature_example(seed=1, outlier_reference="origin")
        assert r2.discrepancy_normal > r1.discrepancy_normal

    def test_bad_reference_mode(self):
        with pytest.raises(ContractViolationError):
            run_cubature_example(seed=0, outlier_reference="middle")


class TestCorrelationStudy:
    def test_positive_and_decaying(self):
        rows = run_correlation_study(dims=(1, 5), n=50, replicates=80, seed=0)
        assert [r.d for r in rows] == [1, 5]
        assert all(not r.degenerate for r in rows)
        assert all(r.correlation > 0.0 for r in rows)
        assert rows[1].correlation < rows[0].correlation

    def test_degenerate_designs_flagged(self, monkeypatch):
        fixed = Design(np.full((50, 1), 0.37), Domain.UNIT_CUBE)
        monkeypatch.setattr(experiments, "generate", lambda cfg: fixed)
        rows = run_correlation_study(dims=(1,), n=50, replicates=2, seed=0)
        assert rows[0].degenerate
        assert math.isnan(rows[0].correlation)

    def test_replicate_guard(self):
        with pytest.raises(ContractViolationError):
            run_correlation_study(dims=(1,), replicates=1)


class TestCompareStudy:
    def test_families_and_orderings(self):
        records = run_compare_study(pairs=((2, 16),), replicates=4, seed=0)
        by_family = {}
        for r in records:
            by_family.setdefault(r.family, []).append(r)
        assert set(by_family) == {"rand", "sobol", "esobol", "ce"}
        assert all(len(v) == 4 for v in by_family.values())
        for ce, eso in zip(by_family["ce"], by_family["esobol"]):
            assert abs(ce.start_discrepancy - eso.discrepancy) <= 1e-12 * eso.discrepancy
            assert ce.discrepancy <= ce.start_discrepancy
            assert ce.monotone
            assert ce.iterations <= 200
        assert all(r.seconds >= 0.0 for r in records)

    def test_deterministic_given_seed(self):
        a = run_compare_study(pairs=((2, 16),), replicates=3, seed=5)
        b = run_compare_study(pairs=((2, 16),), replicates=3, seed=5)
        assert [(r.family, r.discrepancy, r.iterations) for r in a] == [
            (r.family, r.discrepancy, r.iterations) for r in b
        ]

    def test_unknown_family_rejected(self):
        with pytest.raises(ContractViolationError):
            run_compare_study(pairs=((2, 8),), replicates=1, families=("rand", "halton"))


class TestVerifyAppendix:
    def test_one_dimension(self):
        check = verify_appendix(1)
        assert check.single_ok and check.single_max_abs_err <= 1e-8
        assert check.double_ok and check.double_abs_err <= 1e-6
        assert abs(check.double_closed - (1.0 + C_NORMAL)) <= 1e-15
        assert check.ok

    def test_two_dimensions(self):
        check = verify_appendix(2)
        assert check.ok
        assert abs(check.double_closed - (1.0 + C_NORMAL) ** 2) <= 1e-15

    def test_dimension_guard(self):
        with pytest.raises(ContractViolationError):
            verify_appendix(3)


class TestRunStudy:
    def test_correlation_csv(self, tmp_path):
        out = tmp_path / "corr.csv"
        config = StudyConfig(Study.CORRELATION, dims=(1, 2), sizes=(50,), replicates=30, seed=1)
        rows = run_study(config, out_path=out)
        assert len(rows) == 2
        with out.open() as fh:
            reader = csv.reader(fh)
            header = next(reader)
            assert header == ["d", "correlation", "degenerate"]
            assert len(list(reader)) == 2

    def test_cubature_csv(self, tmp_path):
        out = tmp_path / "cub.csv"
        config = StudyConfig(Study.CUBATURE, replicates=1, seed=0)
        run_study(config, out_path=out)
        lines = out.read_text().splitlines()
        assert lines[0] == (
            "seed,design,estimate,reference,relative_error,"
            "discrepancy_uniform,discrepancy_normal"
        )
        assert len(lines) == 3  # header + U1 + U2

    def test_compare_csv_and_repro(self, tmp_path):
        config = StudyConfig(Study.COMPARE, dims=(2,), sizes=(16,), replicates=2, seed=3)
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        run_study(config, out_path=out_a)
        run_study(config, out_path=out_b)

        def strip_timing(path):
            with path.open() as fh:
                rows = list(csv.reader(fh))
            assert rows[0][-1] == "seconds"
            return [row[:-1] for row in rows]

        assert strip_timing(out_a) == strip_timing(out_b)

    def test_verify_not_a_csv_study(self):
        with pytest.raises(ContractViolationError):
            run_study(StudyConfig(Study.VERIFY_APPENDIX, replicates=1))
