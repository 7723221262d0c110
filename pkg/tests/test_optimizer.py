import numpy as np
import pytest

from lowdisc import (
    ContractViolationError,
    Design,
    Domain,
    ExchangeConfig,
    GeneratorConfig,
    GeneratorKind,
    Termination,
    coordinate_exchange,
    coordinate_exchange_multistart,
    delta_full,
    discrepancy_sq_generic,
    generate,
    make_exchange_context,
    maximize_delta,
    normal_h,
    origin_kernel,
    save_trace,
    standard_normal,
    transform_to_target,
)
from lowdisc.targets import C_NORMAL
from conftest import random_normal_design


def brute_delta(design, target, kernel, i, j, x):
    base = discrepancy_sq_generic(design, target, kernel)
    pts = design.points.copy()
    pts[i, j] = x
    return base - discrepancy_sq_generic(Design(pts, design.domain), target, kernel)


class TestDelta:
    def test_identity_exchange_is_zero(self):
        rng = np.random.default_rng(30)
        design = random_normal_design(rng, 8, 2)
        x_old = design.points[3, 1]
        assert delta_full(design, standard_normal(2), origin_kernel(), 3, 1, x_old) == 0.0

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(31)
        target, kernel = standard_normal(2), origin_kernel()
        for _ in range(20):
            design = random_normal_design(rng, 8, 2)
            i = int(rng.integers(0, 8))
            j = int(rng.integers(0, 2))
            x = float(rng.normal())
            a = delta_full(design, target, kernel, i, j, x)
            b = brute_delta(design, target, kernel, i, j, x)
            assert abs(a - b) <= 1e-9 * max(1.0, abs(b))

    def test_weighted_matches_bruteforce(self):
        rng = np.random.default_rng(32)
        kernel = origin_kernel(weights=np.array([0.5, 2.0, 1.3]))
        target = standard_normal(3)
        design = random_normal_design(rng, 6, 3)
        for _ in range(10):
            i, j, x = int(rng.integers(0, 6)), int(rng.integers(0, 3)), float(rng.normal())
            a = delta_full(design, target, kernel, i, j, x)
            b = brute_delta(design, target, kernel, i, j, x)
            assert abs(a - b) <= 1e-9 * max(1.0, abs(b))

    def test_outlier_pullback_improves(self):
        # a coordinate stranded deep in the tail is worth moving back toward 0
        design = generate(GeneratorConfig(GeneratorKind.SCRAMBLED_SOBOL, 512, 10, seed=0))
        idx = int(np.argmin(np.sum(np.square(design.points - 0.5), axis=1)))
        pts = design.points.copy()
        pts[idx, :] = 1e-15
        x = transform_to_target(Design(pts, Domain.UNIT_CUBE), standard_normal(10))
        assert x.points[idx, 0] < -7.9
        gain = delta_full(x, standard_normal(10), origin_kernel(), idx, 0, 0.0)
        assert gain > 0.0


class TestDeltaReduced:
    def test_affine_relation(self):
        rng = np.random.default_rng(33)
        design = random_normal_design(rng, 8, 2)
        target, kernel = standard_normal(2), origin_kernel()
        ctx = make_exchange_context(design, target, kernel, 2, 0)
        xs = rng.normal(size=20)
        for x in xs:
            lhs = ctx.delta(float(x))
            rhs = delta_full(design, target, kernel, 2, 0, float(x))
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))
        # pairwise differences scale by 1/N
        x, y = float(xs[0]), float(xs[1])
        dd = delta_full(design, target, kernel, 2, 0, x) - delta_full(
            design, target, kernel, 2, 0, y
        )
        dp = (ctx.delta_prime(x) - ctx.delta_prime(y)) / design.n
        assert abs(dd - dp) <= 1e-9 * max(1.0, abs(dd))

    def test_anchored_at_old_coordinate(self):
        rng = np.random.default_rng(34)
        design = random_normal_design(rng, 6, 2)
        ctx = make_exchange_context(design, standard_normal(2), origin_kernel(), 1, 1)
        assert ctx.delta(ctx.x_old) == 0.0

    def test_kinks_at_anchor_and_column_values(self):
        pts = np.array(
            [[0.9, 1.4], [-0.4, -2.1], [1.7, 0.6], [0.2, -0.9], [-1.1, 2.3]]
        )
        design = Design(pts, Domain.REAL_SPACE)
        ctx = make_exchange_context(design, standard_normal(2), origin_kernel(), 0, 1)
        kinks = ctx.kink_locations()
        assert set(np.round(kinks, 12)) == {0.0, -2.1, 0.6, -0.9, 2.3}

        def slope_jump(x0, h=1e-7):
            right = (ctx.delta_prime(x0 + h) - ctx.delta_prime(x0)) / h
            left = (ctx.delta_prime(x0) - ctx.delta_prime(x0 - h)) / h
            return abs(right - left)

        for k in kinks:
            assert slope_jump(k) > 1e-3
        for smooth in (-1.5, 0.3, 1.0, 1.9):
            assert slope_jump(smooth) < 1e-4


class TestMaximizeDelta:
    def test_single_point_pulled_to_origin(self):
        # one-point closed form: D^2(x) = c - 2 h(x) + |x|, minimized at 0
        design = Design(np.array([[3.0]]), Domain.REAL_SPACE)
        target, kernel = standard_normal(1), origin_kernel()
        ctx = make_exchange_context(design, target, kernel, 0, 0)
        x_star, gain = maximize_delta(ctx, ExchangeConfig(grid_size=128))
        d2 = lambda x: C_NORMAL - 2.0 * float(normal_h(x)) + abs(x)
        grid = np.linspace(-4, 4, 20001)
        oracle_min = min(d2(x) for x in grid)
        initial = d2(3.0)
        assert gain > 0.0
        assert initial - gain <= oracle_min + 1e-8
        assert abs(x_star) < 1e-6

    def test_never_beats_grid_and_kinks(self):
        rng = np.random.default_rng(35)
        design = random_normal_design(rng, 12, 3)
        ctx = make_exchange_context(design, standard_normal(3), origin_kernel(), 4, 2)
        config = ExchangeConfig()
        x_star, gain = maximize_delta(ctx, config)
        lo, hi = -3.0, 3.0
        cand = np.concatenate([np.linspace(lo, hi, 200), ctx.kink_locations()])
        cand = cand[(cand > lo) & (cand < hi)]
        best = max(ctx.delta(float(x)) for x in cand)
        assert gain >= best - 1e-8


class TestCoordinateExchange:
    def test_monotone_descent_esobol(self):
        start = transform_to_target(
            generate(GeneratorConfig(GeneratorKind.ESOBOL, 32, 2, seed=1)), standard_normal(2)
        )
        optimized, trace = coordinate_exchange(start, standard_normal(2))
        assert trace.final_discrepancy <= trace.initial_discrepancy
        path = [trace.initial_discrepancy] + [s.discrepancy for s in trace.steps]
        assert np.all(np.diff(path) <= 1e-12)
        assert all(s.delta > 1e-10 for s in trace.steps)
        assert optimized.domain is Domain.REAL_SPACE

    def test_converges_quickly_at_2_32(self):
        for seed in range(5):
            start = transform_to_target(
                generate(GeneratorConfig(GeneratorKind.ESOBOL, 32, 2, seed=seed)),
                standard_normal(2),
            )
            _, trace = coordinate_exchange(start, standard_normal(2))
            assert trace.terminated_by is Termination.TOL
            assert trace.iterations <= 20

    def test_applied_deltas_match_recomputation(self):
        rng = np.random.default_rng(36)
        for _ in range(10):
            design = random_normal_design(rng, 8, 3)
            _, trace = coordinate_exchange(design, standard_normal(3))
            sq = trace.initial_discrepancy**2
            for step in trace.steps:
                after = step.discrepancy**2
                assert abs((sq - after) - step.delta) <= 1e-9 * max(1.0, abs(step.delta))
                sq = after

    def test_already_optimal_terminates_immediately(self):
        rng = np.random.default_rng(37)
        design = random_normal_design(rng, 10, 2)
        optimized, _ = coordinate_exchange(design, standard_normal(2))
        again, trace = coordinate_exchange(optimized, standard_normal(2))
        assert trace.iterations == 0
        assert trace.terminated_by is Termination.TOL
        np.testing.assert_array_equal(again.points, optimized.points)

    def test_duplicate_heavy_design_terminates(self):
        design = Design(np.tile([[0.4, -0.8]], (6, 1)), Domain.REAL_SPACE)
        _, trace = coordinate_exchange(design, standard_normal(2))
        assert trace.iterations <= 200
        path = [trace.initial_discrepancy] + [s.discrepancy for s in trace.steps]
        assert np.all(np.diff(path) <= 1e-12)

    def test_deterministic_tie_break(self):
        design = Design(np.tile([[0.7, -0.3]], (4, 1)), Domain.REAL_SPACE)
        _, t1 = coordinate_exchange(design, standard_normal(2))
        _, t2 = coordinate_exchange(design, standard_normal(2))
        assert [(s.point, s.coord, s.new) for s in t1.steps] == [
            (s.point, s.coord, s.new) for s in t2.steps
        ]
        if t1.steps:
            assert t1.steps[0].point == 0 and t1.steps[0].coord == 0

    def test_max_iters_respected(self):
        start = transform_to_target(
            generate(GeneratorConfig(GeneratorKind.RAND, 24, 3, seed=5)), standard_normal(3)
        )
        _, trace = coordinate_exchange(
            start, standard_normal(3), config=ExchangeConfig(max_iters=2)
        )
        assert trace.iterations <= 2

    def test_preconditions(self):
        with pytest.raises(ContractViolationError):
            coordinate_exchange(
                Design(np.zeros((1, 2)), Domain.REAL_SPACE), standard_normal(2)
            )
        with pytest.raises(ContractViolationError):
            coordinate_exchange(
                Design(np.zeros((4, 1)), Domain.REAL_SPACE), standard_normal(1)
            )

    def test_unit_uniform_target_improves(self):
        start = generate(GeneratorConfig(GeneratorKind.RAND, 16, 2, seed=8))
        optimized, trace = coordinate_exchange(start, __import__("lowdisc").unit_uniform(2))
        assert optimized.domain is Domain.UNIT_CUBE
        assert trace.final_discrepancy <= trace.initial_discrepancy


class TestMultistartAndTrace:
    def test_multistart_returns_best(self):
        best, trace, runs = coordinate_exchange_multistart(
            16, 2, seeds=[1, 2, 3], target=standard_normal(2)
        )
        assert [r.seed for r in runs] == [1, 2, 3]
        assert trace.final_discrepancy == min(r.final_discrepancy for r in runs)
        assert best.points.shape == (16, 2)

    def test_trace_csv(self, tmp_path):
        start = transform_to_target(
            generate(GeneratorConfig(GeneratorKind.ESOBOL, 16, 2, seed=3)), standard_normal(2)
        )
        _, trace = coordinate_exchange(start, standard_normal(2))
        path = tmp_path / "trace.csv"
        save_trace(trace, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "iter,i,j,old,new,delta,discrepancy"
        assert len(lines) == 1 + trace.iterations
        if trace.steps:
            first = lines[1].split(",")
            assert int(first[1]) == trace.steps[0].point + 1
            assert int(first[2]) == trace.steps[0].coord + 1

    def test_config_validation(self):
        with pytest.raises(ContractViolationError):
            ExchangeConfig(tol=0.0)
        with pytest.raises(ContractViolationError):
            ExchangeConfig(max_iters=0)
        with pytest.raises(ContractViolationError):
            ExchangeConfig(search_lo=1.0, search_hi=-1.0)
