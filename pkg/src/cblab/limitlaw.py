"""The limit density exp(-xi1 x1^2 - xi2 x2^4) and its marginals.

The stiff marginal is a centered Gaussian with variance 1/(2 xi1). The
soft marginal is the quartic law with density proportional to
exp(-xi2 x^4); its even moments are ratios of Gamma values and its
kurtosis Gamma(1/4)^2 / (4 Gamma(3/4)^2), about 2.18844, does not depend
on xi2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammainc, ndtr

#: kurtosis of the quartic marginal, independent of the exponent
QUARTIC_KURTOSIS = math.gamma(0.25) ** 2 / (4.0 * math.gamma(0.75) ** 2)


@dataclass(frozen=True)
class LimitLaw:
    """Normalized density exp(-xi1 x1^2 - xi2 x2^4 - log_norm)."""

    xi1: float
    xi2: float
    log_norm: float

    @classmethod
    def from_exponents(cls, xi1: float, xi2: float) -> "LimitLaw":
        if not (xi1 > 0.0 and xi2 > 0.0):
            raise ValueError(f"exponents must be positive, got xi1={xi1}, xi2={xi2}")
        # total mass: sqrt(pi/xi1) * (Gamma(1/4)/2) * xi2^(-1/4)
        log_norm = (0.5 * (math.log(math.pi) - math.log(xi1))
                    + math.lgamma(0.25) - math.log(2.0) - 0.25 * math.log(xi2))
        return cls(xi1=xi1, xi2=xi2, log_norm=log_norm)

    @classmethod
    def from_transformed(cls, tm) -> "LimitLaw":
        return cls.from_exponents(tm.xi1, tm.xi2)


class LimitMoments(NamedTuple):
    var_x1: float
    var_x2: float
    fourth_x2: float
    kurtosis_x2: float


def density(law: LimitLaw, x1, x2):
    """Joint density at (x1, x2); factorizes across the two coordinates."""
    return np.exp(-law.xi1 * np.square(x1) - law.xi2 * np.square(x2) ** 2 - law.log_norm)


def marginal_density_x1(law: LimitLaw, x):
    return np.sqrt(law.xi1 / math.pi) * np.exp(-law.xi1 * np.square(x))


def marginal_density_x2(law: LimitLaw, x):
    norm = 0.5 * math.gamma(0.25) * law.xi2 ** -0.25
    return np.exp(-law.xi2 * np.square(x) ** 2) / norm


def marginal_cdf_x1(law: LimitLaw, t):
    """Gaussian marginal CDF, variance 1/(2 xi1)."""
    return ndtr(np.asarray(t, dtype=float) * math.sqrt(2.0 * law.xi1))


def marginal_cdf_x2(law: LimitLaw, t):
    """Quartic marginal CDF through the regularized incomplete Gamma.

    For t >= 0 the mass on [0, t] is P(1/4, xi2 t^4) / 2 with P the
    regularized lower incomplete Gamma; symmetry handles t < 0.
    """
    t = np.asarray(t, dtype=float)
    return 0.5 + 0.5 * np.sign(t) * gammainc(0.25, law.xi2 * t ** 4)


def moments(law: LimitLaw) -> LimitMoments:
    """Closed-form moments: Gaussian variance and quartic Gamma ratios."""
    var_x2 = math.gamma(0.75) / (math.gamma(0.25) * math.sqrt(law.xi2))
    return LimitMoments(var_x1=1.0 / (2.0 * law.xi1),
                        var_x2=var_x2,
                        fourth_x2=1.0 / (4.0 * law.xi2),
                        kurtosis_x2=QUARTIC_KURTOSIS)


def gaussian_half_width(law: LimitLaw) -> float:
    """Truncation half-width for stiff-marginal quadrature (12 sigma)."""
    return 12.0 / math.sqrt(2.0 * law.xi1)


def quartic_half_width(law: LimitLaw) -> float:
    """Truncation half-width for soft-marginal quadrature (12 scale units)."""
    return 12.0 * law.xi2 ** -0.25
