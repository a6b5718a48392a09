import pytest

import cblab


@pytest.fixture(scope="session")
def critical_params():
    """Symmetric reference point on the tangency manifold."""
    return cblab.ModelParams(alpha=0.5, j11=1.5, j22=1.5, j12=0.5)


@pytest.fixture(scope="session")
def subcritical_params():
    return cblab.ModelParams(alpha=0.5, j11=1.2, j22=1.2, j12=0.3)


@pytest.fixture(scope="session")
def critical_spectral(critical_params):
    return cblab.spectral_data(critical_params)


@pytest.fixture(scope="session")
def critical_limit(critical_params, critical_spectral):
    return cblab.limit_coefficients(critical_params, critical_spectral)


@pytest.fixture(scope="session")
def pmf_cache():
    """Memoized exact pmfs, shared across the suite to avoid recomputation."""
    cache = {}

    def get(p, n1, n2):
        key = (p.alpha, p.j11, p.j22, p.j12, n1, n2)
        if key not in cache:
            cache[key] = cblab.exact_pmf(p, cblab.SystemSize(n1, n2))
        return cache[key]

    return get
