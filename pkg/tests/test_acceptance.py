"""End-to-end acceptance checks for the whole package.

Each test guards one headline capability at a fixed tolerance and prints a
single verdict line to the terminal, so a full run gives a nine-line
scoreboard. Tolerances here are contractual: loosening them is a behavior
change, not a test fix.
"""

import contextlib
import math

import numpy as np

import cblab

import oracles

CRIT = cblab.ModelParams(alpha=0.5, j11=1.5, j22=1.5, j12=0.5)
SUB = cblab.ModelParams(alpha=0.5, j11=1.2, j22=1.2, j12=0.3)


@contextlib.contextmanager
def verdict(capsys, name):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"[acceptance] {name}: FAIL")
        raise
    with capsys.disabled():
        print(f"[acceptance] {name}: PASS")


def test_01_reference_point_pipeline(capsys):
    """Closed-form spectral split and limit coefficients at the symmetric point."""
    with verdict(capsys, "1 reference pipeline"):
        tol = 1e-10
        r = 1.0 / math.sqrt(2.0)

        h11, h12, h22 = cblab.hessian_at_origin(CRIT)
        assert abs(h11 - 0.0625) < tol
        assert abs(h12 + 0.0625) < tol
        assert abs(h22 - 0.0625) < tol

        s = cblab.spectral_data(CRIT)
        assert abs(s.lambda_max - 0.125) < tol
        assert abs(s.lambda_min) < tol
        assert np.allclose(s.v_max, [r, -r], atol=tol)
        assert np.allclose(s.v_min, [r, r], atol=tol)

        co = cblab.tilde_coefficients(CRIT, s)
        s2 = math.sqrt(2.0)
        assert abs(co.jt11 - 0.25) < tol
        assert abs(co.jt12) < tol
        assert abs(co.jt22 - 0.5) < tol
        assert abs(co.a1 - s2 / 4) < tol and abs(co.a2 - s2 / 2) < tol
        assert abs(co.b1 + s2 / 4) < tol and abs(co.b2 - s2 / 2) < tol

        tm = cblab.limit_coefficients(CRIT, s)
        assert abs(tm.zeta1 - 0.125) < tol
        assert abs(tm.zeta2 - 1.0 / 24.0) < tol
        assert abs(tm.d - 2.0) < tol
        assert abs(tm.xi1 - 0.25) < tol
        assert abs(tm.xi2 - 1.0 / 24.0) < tol

        z2 = 2.0 * math.e + 2.0 * math.sqrt(math.e)
        pmf2 = cblab.exact_pmf(CRIT, cblab.SystemSize(1, 1))
        assert abs(math.exp(pmf2.log_partition) - z2) < tol * z2
        assert abs(cblab.pressure(pmf2) - 0.5 * math.log(z2)) < tol

        curve = cblab.inverted_curves(CRIT, 0.5)
        assert abs(curve.f1 - (2.0 * math.log(3.0) - 1.5)) < tol


def test_02_expansion_coefficients_by_finite_differences(capsys):
    """The closed-form stiff and soft coefficients against numerical derivatives.

    Twenty random points on the tangency manifold; both coefficients must
    agree with high-order finite differences of the rotated functional.
    """
    with verdict(capsys, "2 coefficient finite differences"):
        rng = np.random.default_rng(77)
        for _ in range(20):
            p = oracles.random_critical_params(rng)
            s = cblab.spectral_data(p)
            tm = cblab.limit_coefficients(p, s)
            assert abs(oracles.fd_zeta1(p, s) - tm.zeta1) <= 1e-6 * tm.zeta1
            assert abs(oracles.fd_zeta2(p, s) - tm.zeta2) <= 1e-6 * tm.zeta2


def test_03_exact_distribution_matches_enumeration(capsys):
    """Lattice pmf and pressure against raw 2^n state sums, every small shape."""
    with verdict(capsys, "3 brute-force equivalence"):
        rng = np.random.default_rng(101)
        param_sets = [cblab.ModelParams(alpha=float(rng.uniform(0.15, 0.85)),
                                        j11=float(rng.uniform(0.0, 2.0)),
                                        j22=float(rng.uniform(0.0, 2.0)),
                                        j12=float(rng.uniform(-1.0, 1.0)))
                      for _ in range(20)]
        shapes = [(n1, n2) for n1 in range(1, 12) for n2 in range(1, 12)
                  if n1 + n2 <= 12]
        for p in param_sets:
            for n1, n2 in shapes:
                sz = cblab.SystemSize(n1, n2)
                ref_probs, ref_pressure = oracles.brute_force_pmf(p, sz)
                pmf = cblab.exact_pmf(p, sz)
                assert np.abs(pmf.probabilities - ref_probs).max() <= 1e-12
                assert abs(cblab.pressure(pmf) - ref_pressure) <= 1e-12


def test_04_convergence_to_the_limit_law(capsys, pmf_cache):
    """Rescaled exact laws approach the Gaussian-times-quartic limit."""
    with verdict(capsys, "4 limit-law convergence"):
        s = cblab.spectral_data(CRIT)
        tm = cblab.limit_coefficients(CRIT, s)
        summaries = []
        for n in (200, 800, 3200):
            pmf = pmf_cache(CRIT, n // 2, n // 2)
            pts = cblab.rescaled_transformed_pmf(pmf, s)
            summaries.append(cblab.summarize(pts, tm))

        ks1 = [x.ks_x1 for x in summaries]
        ks2 = [x.ks_x2 for x in summaries]
        assert ks1[0] > ks1[1] > ks1[2]
        assert ks2[0] > ks2[1] > ks2[2]

        largest = summaries[-1]
        law = cblab.moments(cblab.LimitLaw.from_exponents(tm.xi1, tm.xi2))
        assert abs(largest.var_x1 - law.var_x1) / law.var_x1 <= 0.15
        assert (abs(largest.kurtosis_x2 - law.kurtosis_x2)
                / law.kurtosis_x2 <= 0.10)


def test_05_anomalous_scaling_of_the_soft_direction(capsys, pmf_cache):
    """Square-root scaling blows up along the flat axis only at criticality."""
    with verdict(capsys, "5 anomalous scaling split"):
        def gauss_scale_var(p, n):
            s = cblab.spectral_data(p)
            pmf = pmf_cache(p, n // 2, n // 2)
            pts = cblab.transformed_pushforward(pmf, s, power1=0.5, power2=0.5)
            mean = float((pts.prob * pts.x2).sum())
            return float((pts.prob * (pts.x2 - mean) ** 2).sum())

        ratio_crit = gauss_scale_var(CRIT, 3200) / gauss_scale_var(CRIT, 200)
        ratio_sub = gauss_scale_var(SUB, 3200) / gauss_scale_var(SUB, 200)
        assert ratio_crit >= 1.5
        assert abs(ratio_sub - 1.0) < 0.10


def test_06_pressure_converges_to_log_two(capsys, pmf_cache):
    """Finite-size pressure decreases to log 2 in the uniqueness phase."""
    with verdict(capsys, "6 pressure limit"):
        ln2 = math.log(2.0)
        pressures = [cblab.pressure(pmf_cache(CRIT, n // 2, n // 2))
                     for n in (100, 200, 400, 800, 1600, 3200)]
        assert all(p > ln2 for p in pressures)
        assert all(b < a for a, b in zip(pressures, pressures[1:]))

        free = cblab.ModelParams(alpha=0.5, j11=0.0, j22=0.0, j12=0.0)
        p_free = cblab.pressure(cblab.exact_pmf(free, cblab.SystemSize(50, 50)))
        assert abs(p_free - ln2) <= 1e-12


def test_07_integral_representation_is_controlled(capsys):
    """Quadrature of the rotated Gibbs weight is finite, stable, and tail-safe."""
    with verdict(capsys, "7 integral control"):
        s = cblab.spectral_data(CRIT)

        rng = np.random.default_rng(5)
        x = rng.uniform(-30, 30, size=(4000, 2))
        from cblab.spectral import transformed_functional
        g = transformed_functional(CRIT, s, x[:, 0], x[:, 1])
        env = cblab.linear_envelope(CRIT, s, x[:, 0], x[:, 1])
        assert float(np.min(g - env)) > -1e-10
        theta = np.linspace(0.0, 2.0 * math.pi, 720)
        far = cblab.linear_envelope(CRIT, s, 40 * np.cos(theta),
                                    40 * np.sin(theta))
        assert float(np.min(far)) > 100.0

        for n in (1.0, 5.0, 10.0):
            base = cblab.integrate_transformed_gibbs(CRIT, s, n=n,
                                                     half_width=30.0, nodes=420)
            wider = cblab.integrate_transformed_gibbs(CRIT, s, n=n,
                                                      half_width=40.0, nodes=560)
            assert math.isfinite(base) and base > 0
            assert abs(wider - base) <= 1e-8 * base

        ns = np.arange(1, 51, dtype=float)
        tails = np.array([cblab.excluded_neighborhood_integral(CRIT, s, n=n)
                          for n in ns])
        assert np.all(tails > 0)
        assert np.all(np.diff(tails) < 0)
        slope = np.polyfit(ns, np.log(tails), 1)[0]
        assert slope < 0  # uniform exponential-rate suppression of the tail


def test_08_sampler_reproduces_the_exact_law(capsys):
    """Glauber dynamics and direct sampling against the exact distribution."""
    with verdict(capsys, "8 sampler validation"):
        sz = cblab.SystemSize(50, 50)
        cfg = cblab.ChainConfig(seed=20260816, sweeps=1_000_000, burn_in=1000)
        batch = cblab.run_chains(CRIT, sz, cfg)
        emp = cblab.empirical_pmf(batch.draws, sz)
        pmf = cblab.exact_pmf(CRIT, sz)
        tv = 0.5 * float(np.abs(emp - pmf.probabilities).sum())
        assert tv <= 0.02

        sz40 = cblab.SystemSize(40, 40)
        pmf40 = cblab.exact_pmf(CRIT, sz40)
        draws = cblab.sample_direct(pmf40, 1_000_000, seed=12345)
        observed = cblab.empirical_pmf(draws.draws, sz40) * 1_000_000
        expected = pmf40.probabilities * 1_000_000
        _, _, p_value = oracles.pooled_chi_square(observed, expected)
        assert p_value > 1e-3


def test_09_solution_counts_across_the_boundary(capsys):
    """Uniqueness on the tangency manifold, three solutions beyond it."""
    with verdict(capsys, "9 solution counting"):
        assert cblab.count_mean_field_solutions(CRIT) == 1
        flipped = cblab.ModelParams(0.5, 1.5, 1.5, -0.5)
        assert cblab.count_mean_field_solutions(flipped) == 1
        beyond = cblab.ModelParams(0.5, 1.5, 1.5, 0.8)
        assert cblab.count_mean_field_solutions(beyond) == 3
