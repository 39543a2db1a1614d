"""Solver loops: configs, accounting, decay, reductions, acceleration."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indexfree.categorical import required_samples
from indexfree.oracles import OracleKind, OracleSession, OracleUsageError
from indexfree.problems import make_counterexample, make_random_quadratic_sum
from indexfree.solvers import (
    RunRecord,
    SolverConfig,
    TrajectoryPoint,
    catalyst_beta,
    default_qsvrg_config,
    naive_plateau_level,
    naive_sgd_expected_gap,
    naive_sgd_gap_samples,
    naive_svrg_effective_step,
    naive_svrg_inner_average,
    run_catalyst_qsvrg,
    run_gd_quantized,
    run_naive_sgd,
    run_naive_svrg,
    run_qsvrg,
    svrg_contraction_factor,
)


def sfo(problem, seed, batch=2):
    return OracleSession(problem, OracleKind.STOCHASTIC_FIRST_ORDER, batch=batch, seed=seed)


class TestConfig:
    def test_default_constants_unit_condition(self):
        problem = make_counterexample(4)
        config = default_qsvrg_config(problem, delta=0.1, eps_target=1e-3)
        assert config.eta == 0.125
        assert config.inner_T == 32

    def test_default_constants_condition_eight(self):
        problem = make_random_quadratic_sum(n=4, dim=3, L=8.0, mu=1.0, q_distinct=4, seed=0)
        config = default_qsvrg_config(problem, delta=0.1, eps_target=1e-3)
        assert config.eta == 1.0 / 64.0
        assert config.inner_T == 256

    @pytest.mark.parametrize("L, mu", [(1.0, 1.0), (8.0, 1.0), (3.0, 0.5)])
    def test_contraction_factor_is_two_thirds_at_defaults(self, L, mu):
        assert svrg_contraction_factor(1 / (8 * L), math.ceil(32 * L / mu), L, mu) == pytest.approx(2 / 3)

    def test_rounds_formula(self):
        problem = make_counterexample(4)  # gap 1/2
        config = default_qsvrg_config(problem, delta=0.1, eps_target=1e-4)
        expected = math.ceil(math.log(2 * 0.5 / (0.1 * 1e-4)) / math.log(1.5))
        assert config.outer_K == expected

    def test_easy_target_needs_zero_rounds(self):
        problem = make_counterexample(4)
        config = default_qsvrg_config(problem, delta=0.1, eps_target=20.0)
        assert config.outer_K == 0

    def test_rejects_mu_zero(self):
        problem = make_random_quadratic_sum(n=4, dim=3, L=1.0, mu=0.0, q_distinct=4, seed=0)
        with pytest.raises(ValueError):
            default_qsvrg_config(problem, delta=0.1, eps_target=1e-3)

    @pytest.mark.parametrize("kwargs", [
        dict(eta=0.0, inner_T=1, outer_K=1, delta=0.1),
        dict(eta=0.1, inner_T=0, outer_K=1, delta=0.1),
        dict(eta=0.1, inner_T=1, outer_K=-1, delta=0.1),
        dict(eta=0.1, inner_T=1, outer_K=1, delta=1.5),
    ])
    def test_config_validation(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_record_requires_increasing_calls(self):
        with pytest.raises(ValueError):
            RunRecord(
                trajectory=(TrajectoryPoint(0, 1.0, 0), TrajectoryPoint(0, 0.5, 1)),
                final_point=np.zeros(1),
                method="x",
            )


class TestQsvrg:
    def test_oracle_accounting_frozen_value(self):
        problem = make_random_quadratic_sum(n=10, dim=3, L=1.0, mu=1.0, q_distinct=10, seed=0)
        session = sfo(problem, seed=1)
        config = SolverConfig(eta=0.125, inner_T=32, outer_K=5, delta=0.05)
        record = run_qsvrg(problem, session, config)
        # 5 * (ceil(200 ln 2000) + 32), evaluated independently
        assert record.total_calls == 7765 == session.call_count
        per_round = required_samples(10, 0.05 / 5) + 32
        assert [p.oracle_calls for p in record.trajectory] == [k * per_round for k in range(6)]

    def test_requires_pair_batch(self):
        problem = make_counterexample(4)
        config = SolverConfig(eta=0.125, inner_T=4, outer_K=1, delta=0.1)
        with pytest.raises(OracleUsageError):
            run_qsvrg(problem, sfo(problem, seed=0, batch=1), config)

    def test_session_problem_binding(self):
        a = make_counterexample(4)
        b = make_counterexample(6)
        config = SolverConfig(eta=0.125, inner_T=4, outer_K=1, delta=0.1)
        with pytest.raises(OracleUsageError):
            run_qsvrg(a, sfo(b, seed=0), config)

    def test_single_round_single_step_is_one_reduced_gd_step(self):
        # with T = 1: w_1 = w0 - eta * (g_i(w0) - g_i(w0) + mu~) = w0 - eta mu~
        problem = make_counterexample(4)
        session = sfo(problem, seed=3)
        config = SolverConfig(eta=0.125, inner_T=1, outer_K=1, delta=0.1)
        record = run_qsvrg(problem, session, config)
        assert record.succeeded
        w0 = problem.initial_point
        expected = w0 - 0.125 * problem.full_gradient(w0)
        assert record.final_point.tobytes() == expected.tobytes()

    def test_zero_rounds_returns_initial_point(self):
        problem = make_counterexample(4)
        session = sfo(problem, seed=0)
        config = SolverConfig(eta=0.125, inner_T=32, outer_K=0, delta=0.1)
        record = run_qsvrg(problem, session, config)
        assert session.call_count == 0
        assert record.final_point.tobytes() == np.asarray(problem.initial_point).tobytes()

    def test_geometric_decay_conditioned_on_recovery(self):
        problem = make_random_quadratic_sum(n=6, dim=5, L=1.0, mu=0.25, q_distinct=6, seed=7)
        config = SolverConfig(eta=0.125, inner_T=128, outer_K=4, delta=0.1)
        curves = []
        for seed in range(25):
            record = run_qsvrg(problem, sfo(problem, seed=2000 + seed), config)
            if record.succeeded:
                curves.append(record.suboptimality_series())
        assert len(curves) >= 23
        mean_curve = np.mean(curves, axis=0)
        ratios = mean_curve[1:] / mean_curve[:-1]
        assert np.all(ratios <= 2 / 3 + 0.05)

    def test_trajectory_monotone_calls(self):
        problem = make_counterexample(4)
        record = run_qsvrg(problem, sfo(problem, seed=5),
                           SolverConfig(eta=0.125, inner_T=8, outer_K=3, delta=0.1))
        calls = [p.oracle_calls for p in record.trajectory]
        assert all(b > a for a, b in zip(calls, calls[1:]))


class TestGdQuantized:
    def test_one_exact_step_solves_counterexample(self):
        # gradient of (w^2+1)/2 is w, so a unit step from any start lands at 0
        problem = make_counterexample(4)
        for x0_seed in range(3):
            session = OracleSession(problem, OracleKind.STOCHASTIC_FIRST_ORDER, batch=1,
                                    seed=100 + x0_seed)
            record = run_gd_quantized(problem, session, eta=1.0, iters=1, delta=0.1)
            assert record.succeeded
            assert record.final_point[0] == 0.0

    def test_accounting(self):
        problem = make_random_quadratic_sum(n=6, dim=3, L=1.0, mu=0.2, q_distinct=6, seed=1)
        session = OracleSession(problem, OracleKind.STOCHASTIC_FIRST_ORDER, batch=1, seed=2)
        iters, delta = 4, 0.1
        record = run_gd_quantized(problem, session, eta=1.0, iters=iters, delta=delta)
        assert record.total_calls == iters * required_samples(6, delta / iters) == session.call_count

    def test_linear_distance_contraction_conditioned(self):
        problem = make_random_quadratic_sum(n=5, dim=4, L=1.0, mu=0.25, q_distinct=5, seed=3)
        session = OracleSession(problem, OracleKind.STOCHASTIC_FIRST_ORDER, batch=1, seed=4)
        record = run_gd_quantized(problem, session, eta=1.0 / problem.L, iters=6, delta=0.1)
        assert record.succeeded
        w_star = problem.optimum[0]
        w = np.array(problem.initial_point)
        dist = np.linalg.norm(w - w_star)
        for step in range(6):
            w = w - (1.0 / problem.L) * problem.full_gradient(w)
            new_dist = np.linalg.norm(w - w_star)
            assert new_dist <= (1 - problem.mu / problem.L) * dist + 1e-12
            dist = new_dist
        assert np.linalg.norm(record.final_point - w_star) <= dist + 1e-9


class TestNaiveSgd:
    def test_requires_counterexample(self):
        problem = make_random_quadratic_sum(n=4, dim=1, L=1.0, mu=0.5, q_distinct=4, seed=0)
        with pytest.raises(ValueError):
            run_naive_sgd(problem, alpha=0.5, m_samples=4, iters=3)

    def test_alpha_one_first_step_gap(self):
        # E[F(x_1) - F*] = 1/(2m) when alpha = 1
        m = 8
        gaps = naive_sgd_gap_samples(1.0, m, [1], runs=20_000, seed=5)[0]
        se = gaps.std(ddof=1) / math.sqrt(len(gaps))
        assert abs(gaps.mean() - 1 / (2 * m)) <= 4 * se

    def test_closed_form_and_plateau_small(self):
        alpha, m = 0.5, 4
        checkpoints = [1, 5, 60]
        gaps = naive_sgd_gap_samples(alpha, m, checkpoints, runs=20_000, seed=8)
        for row, k in zip(gaps, checkpoints):
            se = row.std(ddof=1) / math.sqrt(len(row))
            assert abs(row.mean() - naive_sgd_expected_gap(alpha, m, k, 0.5)) <= 4 * se
        floor = naive_plateau_level(alpha, m)
        assert floor == pytest.approx(0.5 / (8 * 1.5))
        last = gaps[-1]
        assert abs(last.mean() - floor) <= 4 * last.std(ddof=1) / math.sqrt(len(last))

    def test_huge_m_tracks_deterministic_gd(self):
        problem = make_counterexample(4)
        record = run_naive_sgd(problem, alpha=0.3, m_samples=10**6, iters=10, seed=1)
        x = 1.0
        for point in record.trajectory[1:]:
            x *= 0.7
            assert point.suboptimality == pytest.approx(0.5 * x * x, rel=1e-2)

    def test_oracle_charge_is_m_per_iteration(self):
        problem = make_counterexample(4)
        record = run_naive_sgd(problem, alpha=0.5, m_samples=6, iters=5, seed=0)
        assert [p.oracle_calls for p in record.trajectory] == [0, 6, 12, 18, 24, 30]

    def test_scalar_run_matches_vectorized_law(self):
        problem = make_counterexample(4)
        finals = np.array([
            run_naive_sgd(problem, 0.5, 4, 30, seed=s).trajectory[-1].suboptimality
            for s in range(400)
        ])
        vector = naive_sgd_gap_samples(0.5, 4, [30], runs=20_000, seed=123)[0]
        se = math.sqrt(finals.var(ddof=1) / len(finals) + vector.var(ddof=1) / len(vector))
        assert abs(finals.mean() - vector.mean()) <= 4 * se


class TestNaiveSvrgReduction:
    def test_effective_step_hand_values(self):
        assert naive_svrg_effective_step(0.5, 2) == pytest.approx(0.625)
        assert naive_svrg_effective_step(0.3, 1) == 0.3

    @given(st.floats(min_value=0.01, max_value=1.0), st.integers(min_value=1, max_value=50))
    def test_effective_step_in_unit_interval(self, eta, inner_M):
        assert 0.0 < naive_svrg_effective_step(eta, inner_M) <= 1.0

    @given(st.floats(min_value=0.05, max_value=0.95), st.integers(min_value=1, max_value=20),
           st.floats(min_value=-2.0, max_value=2.0), st.floats(min_value=-2.0, max_value=2.0))
    @settings(max_examples=60)
    def test_literal_inner_loop_matches_reduced_step(self, eta, inner_M, x_ref, mu_tilde):
        literal = naive_svrg_inner_average(x_ref, eta, inner_M, mu_tilde)
        reduced = x_ref - naive_svrg_effective_step(eta, inner_M) * mu_tilde
        assert literal == pytest.approx(reduced, abs=1e-12)

    def test_coupled_trajectories_bit_exact(self):
        problem = make_counterexample(4)
        eta, inner_M = 0.37, 5
        svrg = run_naive_svrg(problem, eta=eta, inner_M=inner_M, m_samples=8, outer_K=12, seed=99)
        sgd = run_naive_sgd(problem, alpha=naive_svrg_effective_step(eta, inner_M),
                            m_samples=8, iters=12, seed=99)
        assert np.array_equal(svrg.suboptimality_series(), sgd.suboptimality_series())
        assert svrg.final_point.tobytes() == sgd.final_point.tobytes()

    def test_svrg_charges_inner_calls_too(self):
        problem = make_counterexample(4)
        record = run_naive_svrg(problem, eta=0.5, inner_M=3, m_samples=8, outer_K=2, seed=0)
        assert [p.oracle_calls for p in record.trajectory] == [0, 11, 22]


class TestCatalyst:
    def test_beta_values(self):
        assert catalyst_beta(L=1.0, mu=0.0, n=4) == pytest.approx(1.0 / 16.0)
        assert catalyst_beta(L=64.0, mu=1.0, n=4) == pytest.approx((64.0 - 17.0) / 16.0)
        # well-conditioned: the max clips at zero
        assert catalyst_beta(L=8.0, mu=1.0, n=4) == 0.0
        assert catalyst_beta(L=17.0, mu=1.0, n=4) == 0.0

    def test_beta_zero_degenerates_to_plain_qsvrg(self):
        problem = make_random_quadratic_sum(n=4, dim=3, L=4.0, mu=1.0, q_distinct=4, seed=3)
        eps = 1e-3 * problem.initial_gap
        accelerated = run_catalyst_qsvrg(problem, sfo(problem, seed=11), eps, delta=0.1)
        plain = run_qsvrg(problem, sfo(problem, seed=11),
                          default_qsvrg_config(problem, 0.1, eps))
        assert accelerated.method == "catalyst_qsvrg"
        assert accelerated.trajectory == plain.trajectory
        assert accelerated.final_point.tobytes() == plain.final_point.tobytes()

    def test_mu_zero_converges(self):
        problem = make_random_quadratic_sum(n=4, dim=4, L=1.0, mu=0.0, q_distinct=4, seed=5)
        eps = 1e-3 * problem.initial_gap
        record = run_catalyst_qsvrg(problem, sfo(problem, seed=2), eps, delta=0.1)
        assert record.calls_to(eps) is not None

    def test_ill_conditioned_strongly_convex_converges(self):
        problem = make_random_quadratic_sum(n=4, dim=3, L=256.0, mu=1.0, q_distinct=4, seed=6)
        eps = 1e-3 * problem.initial_gap
        record = run_catalyst_qsvrg(problem, sfo(problem, seed=4), eps, delta=0.1)
        assert record.succeeded
        assert record.calls_to(eps) is not None

    def test_accounting_matches_session(self):
        problem = make_random_quadratic_sum(n=4, dim=3, L=256.0, mu=1.0, q_distinct=4, seed=6)
        session = sfo(problem, seed=8)
        record = run_catalyst_qsvrg(problem, session, 1e-2 * problem.initial_gap, delta=0.1)
        assert record.total_calls == session.call_count

    def test_rejects_bad_target(self):
        problem = make_counterexample(4)
        with pytest.raises(ValueError):
            run_catalyst_qsvrg(problem, sfo(problem, seed=0), eps_target=0.0, delta=0.1)


class TestCallsTo:
    def test_first_crossing_on_monotone_decay(self):
        record = RunRecord(
            trajectory=(TrajectoryPoint(0, 1.0, 0), TrajectoryPoint(10, 0.1, 1),
                        TrajectoryPoint(20, 0.01, 2)),
            final_point=np.zeros(1),
            method="x",
        )
        assert record.calls_to(0.5) == 10
        assert record.calls_to(0.01) == 20
        assert record.calls_to(1e-9) is None

    def test_lucky_dip_does_not_count(self):
        # a noise-floor walk that briefly dips below eps has not converged
        record = RunRecord(
            trajectory=(TrajectoryPoint(0, 1.0, 0), TrajectoryPoint(10, 0.001, 1),
                        TrajectoryPoint(20, 0.8, 2), TrajectoryPoint(30, 0.9, 3)),
            final_point=np.zeros(1),
            method="x",
        )
        assert record.calls_to(0.01) is None
        assert record.calls_to(0.9) == 10  # sustained from the second point on
        assert record.calls_to(0.85) is None
