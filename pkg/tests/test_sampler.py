import math

import numpy as np
import pytest

import cblab

import oracles


class TestSeedSplitting:
    def test_deterministic_and_distinct(self):
        streams = [cblab.split_seed(12345, c) for c in range(8)]
        assert len(set(streams)) == 8
        assert streams == [cblab.split_seed(12345, c) for c in range(8)]
        for s in streams:
            assert 0 <= s < 2 ** 64

    def test_different_base_seeds_diverge(self):
        assert cblab.split_seed(1, 0) != cblab.split_seed(2, 0)


class TestChainConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            cblab.ChainConfig(seed=-1, sweeps=10)
        with pytest.raises(ValueError):
            cblab.ChainConfig(seed=2 ** 64, sweeps=10)
        with pytest.raises(ValueError):
            cblab.ChainConfig(seed=1, sweeps=0)
        with pytest.raises(ValueError):
            cblab.ChainConfig(seed=1, sweeps=10, burn_in=10)
        with pytest.raises(ValueError):
            cblab.ChainConfig(seed=1, sweeps=10, thinning=0)
        with pytest.raises(ValueError):
            cblab.ChainConfig(seed=1, sweeps=10, n_chains=0)

    def test_record_count(self):
        cfg = cblab.ChainConfig(seed=1, sweeps=107, burn_in=7, thinning=10)
        assert cfg.records_per_chain == 10


class TestRunChains:
    def test_shapes_and_indexing(self, critical_params):
        cfg = cblab.ChainConfig(seed=3, sweeps=50, burn_in=10, thinning=5,
                                n_chains=3)
        batch = cblab.run_chains(critical_params, cblab.SystemSize(8, 12), cfg)
        m = cfg.records_per_chain
        assert batch.draws.shape == (3 * m, 2)
        np.testing.assert_array_equal(batch.chain_index,
                                      np.repeat(np.arange(3), m))
        np.testing.assert_array_equal(batch.sweep_index[:m],
                                      10 + 5 * np.arange(1, m + 1))

    def test_records_stay_on_the_lattice(self, critical_params):
        sz = cblab.SystemSize(9, 14)
        cfg = cblab.ChainConfig(seed=8, sweeps=200, burn_in=0, thinning=1)
        batch = cblab.run_chains(critical_params, sz, cfg)
        s1, s2 = batch.draws[:, 0], batch.draws[:, 1]
        assert np.all(np.abs(s1) <= sz.n1) and np.all(np.abs(s2) <= sz.n2)
        assert np.all((s1 + sz.n1) % 2 == 0) and np.all((s2 + sz.n2) % 2 == 0)

    def test_deterministic_given_seed(self, critical_params):
        sz = cblab.SystemSize(10, 10)
        cfg = cblab.ChainConfig(seed=42, sweeps=300, burn_in=50, n_chains=2)
        a = cblab.run_chains(critical_params, sz, cfg)
        b = cblab.run_chains(critical_params, sz, cfg)
        assert np.array_equal(a.draws, b.draws)
        other = cblab.ChainConfig(seed=43, sweeps=300, burn_in=50, n_chains=2)
        c = cblab.run_chains(critical_params, sz, other)
        assert not np.array_equal(a.draws, c.draws)

    def test_thread_count_does_not_change_output(self, critical_params,
                                                 monkeypatch):
        sz = cblab.SystemSize(6, 6)
        cfg = cblab.ChainConfig(seed=5, sweeps=200, n_chains=4)
        monkeypatch.setenv("CBL_THREADS", "1")
        seq = cblab.run_chains(critical_params, sz, cfg)
        monkeypatch.setenv("CBL_THREADS", "4")
        par = cblab.run_chains(critical_params, sz, cfg)
        assert np.array_equal(seq.draws, par.draws)

    def test_thread_env_validation(self, critical_params, monkeypatch):
        cfg = cblab.ChainConfig(seed=5, sweeps=10, n_chains=2)
        monkeypatch.setenv("CBL_THREADS", "zero")
        with pytest.raises(ValueError):
            cblab.run_chains(critical_params, cblab.SystemSize(4, 4), cfg)
        monkeypatch.setenv("CBL_THREADS", "0")
        with pytest.raises(ValueError):
            cblab.run_chains(critical_params, cblab.SystemSize(4, 4), cfg)


@pytest.fixture(scope="module")
def attempt_stream(critical_params):
    """Ten million single attempts of the four-spin system, as lattice indices."""
    stream = cblab.step_stream(critical_params, cblab.SystemSize(2, 2),
                               10_000_000, seed=99)
    return (stream[:, 0] + 2) // 2 * 3 + (stream[:, 1] + 2) // 2


class TestKernelAgainstTransitionMatrix:
    def test_single_attempt_frequencies(self, critical_params, attempt_stream):
        """Empirical one-step transitions match the analytic kernel.

        Ten million attempts on the 3x3 lattice of a four-spin system;
        each conditional frequency is compared at five standard errors.
        """
        idx = attempt_stream
        t = oracles.glauber_transition_matrix(critical_params,
                                              cblab.SystemSize(2, 2))
        counts = np.zeros((9, 9))
        np.add.at(counts, (idx[:-1], idx[1:]), 1)
        row_counts = counts.sum(axis=1)
        for r in range(9):
            if row_counts[r] < 1000:
                continue
            for c in range(9):
                se = math.sqrt(max(t[r, c] * (1 - t[r, c]), 1e-12) / row_counts[r])
                assert abs(counts[r, c] / row_counts[r] - t[r, c]) < 5 * se + 1e-9

    def test_matrix_satisfies_detailed_balance(self, critical_params):
        sz = cblab.SystemSize(2, 2)
        t = oracles.glauber_transition_matrix(critical_params, sz)
        np.testing.assert_allclose(t.sum(axis=1), 1.0, rtol=0, atol=1e-14)
        pi = cblab.exact_pmf(critical_params, sz).probabilities.ravel()
        flow = pi[:, None] * t
        np.testing.assert_allclose(flow, flow.T, rtol=0, atol=1e-15)
        np.testing.assert_allclose(pi @ t, pi, rtol=0, atol=1e-14)

    def test_long_run_reaches_the_exact_law(self, critical_params, attempt_stream):
        emp = np.bincount(attempt_stream, minlength=9) / len(attempt_stream)
        pi = cblab.exact_pmf(critical_params,
                             cblab.SystemSize(2, 2)).probabilities.ravel()
        assert 0.5 * float(np.abs(emp - pi).sum()) < 0.005


class TestGlauberStepReference:
    def test_rejects_off_lattice_state(self, critical_params):
        sz = cblab.SystemSize(4, 4)
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            cblab.glauber_step((5, 0), critical_params, sz, rng)
        with pytest.raises(ValueError):
            cblab.glauber_step((1, 0), critical_params, sz, rng)

    def test_stays_on_lattice_and_moves(self, critical_params):
        sz = cblab.SystemSize(3, 3)
        rng = np.random.default_rng(17)
        state = (3, 3)
        seen = set()
        for _ in range(2000):
            state = cblab.glauber_step(state, critical_params, sz, rng)
            assert abs(state[0]) <= 3 and (state[0] + 3) % 2 == 0
            assert abs(state[1]) <= 3 and (state[1] + 3) % 2 == 0
            seen.add(state)
        assert len(seen) > 8  # explored most of the 16-point lattice

    def test_transition_frequencies(self, critical_params):
        """The pure Python step agrees with the analytic kernel too."""
        sz = cblab.SystemSize(2, 2)
        t = oracles.glauber_transition_matrix(critical_params, sz)
        rng = np.random.default_rng(23)
        counts = np.zeros((9, 9))
        state = (2, 2)
        for _ in range(200_000):
            nxt = cblab.glauber_step(state, critical_params, sz, rng)
            r = (state[0] + 2) // 2 * 3 + (state[1] + 2) // 2
            c = (nxt[0] + 2) // 2 * 3 + (nxt[1] + 2) // 2
            counts[r, c] += 1
            state = nxt
        row_counts = counts.sum(axis=1)
        for r in range(9):
            if row_counts[r] < 2000:
                continue
            for c in range(9):
                se = math.sqrt(max(t[r, c] * (1 - t[r, c]), 1e-12) / row_counts[r])
                assert abs(counts[r, c] / row_counts[r] - t[r, c]) < 5 * se + 1e-9


class TestConvergenceTrend:
    def test_tv_shrinks_with_more_sweeps(self, critical_params, pmf_cache):
        sz = cblab.SystemSize(30, 30)
        pmf = pmf_cache(critical_params, 30, 30)
        tvs = []
        for sweeps in (20_000, 100_000, 500_000):
            cfg = cblab.ChainConfig(seed=4242, sweeps=sweeps, burn_in=500)
            batch = cblab.run_chains(critical_params, sz, cfg)
            emp = cblab.empirical_pmf(batch.draws, sz)
            tvs.append(0.5 * float(np.abs(emp - pmf.probabilities).sum()))
        assert tvs[0] > tvs[1] > tvs[2]


class TestDirectSampler:
    def test_deterministic(self, critical_params, pmf_cache):
        pmf = pmf_cache(critical_params, 20, 20)
        a = cblab.sample_direct(pmf, 1000, seed=9)
        b = cblab.sample_direct(pmf, 1000, seed=9)
        assert np.array_equal(a.draws, b.draws)

    def test_zero_draws(self, critical_params, pmf_cache):
        pmf = pmf_cache(critical_params, 20, 20)
        batch = cblab.sample_direct(pmf, 0, seed=9)
        assert batch.draws.shape == (0, 2)

    def test_negative_draws_rejected(self, critical_params, pmf_cache):
        pmf = pmf_cache(critical_params, 20, 20)
        with pytest.raises(ValueError):
            cblab.sample_direct(pmf, -1, seed=9)

    def test_draws_follow_the_pmf(self, critical_params, pmf_cache):
        pmf = pmf_cache(critical_params, 20, 20)
        batch = cblab.sample_direct(pmf, 200_000, seed=31)
        emp = cblab.empirical_pmf(batch.draws, cblab.SystemSize(20, 20))
        assert 0.5 * float(np.abs(emp - pmf.probabilities).sum()) < 0.02


class TestEmpiricalPmf:
    def test_sums_to_one(self, critical_params):
        sz = cblab.SystemSize(5, 5)
        cfg = cblab.ChainConfig(seed=2, sweeps=500)
        batch = cblab.run_chains(critical_params, sz, cfg)
        emp = cblab.empirical_pmf(batch.draws, sz)
        assert emp.shape == (6, 6)
        assert abs(float(emp.sum()) - 1.0) < 1e-12

    def test_rejects_off_lattice_draws(self):
        sz = cblab.SystemSize(4, 4)
        with pytest.raises(ValueError):
            cblab.empirical_pmf(np.array([[3, 0]]), sz)
        with pytest.raises(ValueError):
            cblab.empirical_pmf(np.array([[6, 0]]), sz)
