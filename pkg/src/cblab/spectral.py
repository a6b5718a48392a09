"""Spectral split of the pressure functional at the origin.

At the uniqueness boundary the Hessian of G at the origin acquires a zero
eigenvalue. Rotating magnetization space into the Hessian eigenbasis
splits the functional into a stiff direction (curvature lambda_max > 0)
and a soft direction (zero curvature, quartic leading term). Everything
the scaling analysis needs follows from that split:

* the rotated functional Gt(x) = G(P^-1 x), also available in an explicit
  coefficient form (rotated quadratic form jt, rotated log-cosh arguments
  a1 x1 + a2 x2 and b1 x1 + b2 x2),
* the Taylor coefficients zeta1 (stiff quadratic) and zeta2 (soft
  quartic) of Gt at the origin,
* the variance d of the stiff Gaussian marginal and the limit-density
  exponents xi1 = 1/(2 d), xi2 = zeta2,
* the linear map (A^2)^-1 P A^2 with A = diag(sqrt(alpha),
  sqrt(1-alpha)) that carries the magnetization pair into the split
  coordinates.

Rows of P are the unit eigenvectors, stiff one first, each normalized
with positive first component. The convention is enforced at
construction time by checking that P H P^T is diagonal with the ordered
eigenvalues on the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateHessian, NonPositiveCoefficient, NotCritical
from .model import ModelParams, check_critical_conditions, pressure_functional, _log_cosh


def hessian_at_origin(p: ModelParams) -> tuple[float, float, float]:
    """Entries (h11, h12, h22) of the Hessian of G at the origin."""
    a = p.alpha
    c = 1.0 - a
    h11 = a * a * p.j11 * (1.0 - a * p.j11) - a * a * c * p.j12 * p.j12
    h12 = a * c * p.j12 * (1.0 - a * p.j11 - c * p.j22)
    h22 = c * c * p.j22 * (1.0 - c * p.j22) - a * c * c * p.j12 * p.j12
    return h11, h12, h22


def eigenvalues_at_origin(p: ModelParams) -> tuple[float, float]:
    """Ordered eigenvalues (lambda_max, lambda_min) of the origin Hessian."""
    h11, h12, h22 = hessian_at_origin(p)
    return _eigenvalues(h11, h12, h22)


def _eigenvalues(h11: float, h12: float, h22: float) -> tuple[float, float]:
    tr = h11 + h22
    disc = math.hypot(h11 - h22, 2.0 * h12)
    lam_max = 0.5 * (tr + disc)
    # determinant route divides out the cancellation in (tr - disc)/2
    if tr + disc != 0.0:
        lam_min = 2.0 * (h11 * h22 - h12 * h12) / (tr + disc)
    else:
        lam_min = 0.5 * (tr - disc)
    return lam_max, lam_min


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigen split of the origin Hessian plus the group-weight matrix A."""

    h11: float
    h12: float
    h22: float
    lambda_max: float
    lambda_min: float
    v_max: np.ndarray  # unit eigenvector of lambda_max, first component > 0
    v_min: np.ndarray  # unit eigenvector of lambda_min, first component > 0
    P: np.ndarray      # rows are v_max, v_min; orthogonal
    A: np.ndarray      # diag(sqrt(alpha), sqrt(1-alpha))
    alpha: float


def eigen_decompose(h11: float, h12: float, h22: float, alpha: float) -> SpectralData:
    """Closed-form eigen split of a symmetric 2x2 Hessian.

    Requires h12 != 0; a diagonal Hessian leaves the eigenbasis ambiguous
    under the chosen normalization and is rejected.
    """
    if h12 == 0.0:
        raise DegenerateHessian("h12 = 0: eigenbasis undefined under this normalization")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")

    lam_max, lam_min = _eigenvalues(h11, h12, h22)
    v_max = np.array([1.0, (lam_max - h11) / h12])
    v_min = np.array([1.0, (lam_min - h11) / h12])
    v_max /= math.hypot(*v_max)
    v_min /= math.hypot(*v_min)
    P = np.array([v_max, v_min])
    A = np.diag([math.sqrt(alpha), math.sqrt(1.0 - alpha)])

    H = np.array([[h11, h12], [h12, h22]])
    D = P @ H @ P.T
    scale = max(abs(lam_max), abs(lam_min), 1e-300)
    assert abs(D[0, 1]) <= 1e-12 * scale and abs(D[1, 0]) <= 1e-12 * scale, \
        "P H P^T is not diagonal"
    assert abs(D[0, 0] - lam_max) <= 1e-12 * scale, "stiff eigenvalue misplaced"
    assert abs(D[1, 1] - lam_min) <= 1e-12 * scale, "soft eigenvalue misplaced"

    for arr in (v_max, v_min, P, A):
        arr.flags.writeable = False
    return SpectralData(h11=h11, h12=h12, h22=h22,
                        lambda_max=lam_max, lambda_min=lam_min,
                        v_max=v_max, v_min=v_min, P=P, A=A, alpha=alpha)


def spectral_data(p: ModelParams) -> SpectralData:
    """Hessian at the origin followed by its eigen split."""
    h11, h12, h22 = hessian_at_origin(p)
    return eigen_decompose(h11, h12, h22, p.alpha)


class TildeCoefficients(NamedTuple):
    jt11: float
    jt12: float
    jt22: float
    a1: float
    a2: float
    b1: float
    b2: float


def tilde_coefficients(p: ModelParams, s: SpectralData) -> TildeCoefficients:
    """Closed-form coefficients of the rotated functional.

    Written directly in terms of the Hessian entries and eigenvalues, not
    as matrix products, so they can cross-check the composed evaluation
    G(P^-1 x).
    """
    a = p.alpha
    c = 1.0 - a
    h11, h12 = s.h11, s.h12
    dM = h12 * h12 + (s.lambda_max - h11) ** 2
    dm = h12 * h12 + (s.lambda_min - h11) ** 2
    jt11 = (p.j11 * a * a * h12 * h12
            + p.j22 * c * c * (s.lambda_max - h11) ** 2
            + 2.0 * p.j12 * a * c * h12 * (s.lambda_max - h11)) / dM
    jt22 = (p.j11 * a * a * h12 * h12
            + p.j22 * c * c * (s.lambda_min - h11) ** 2
            + 2.0 * p.j12 * a * c * h12 * (s.lambda_min - h11)) / dm
    jt12 = (p.j11 * a * a * h12 * h12
            + p.j22 * c * c * (s.lambda_max - h11) * (s.lambda_min - h11)
            + p.j12 * a * c * h12 * (s.h22 - h11)) / math.sqrt(dM * dm)
    sg = math.copysign(1.0, h12)
    a1 = (p.j11 * a * abs(h12) + p.j12 * c * sg * (s.lambda_max - h11)) / math.sqrt(dM)
    a2 = (p.j11 * a * abs(h12) + p.j12 * c * sg * (s.lambda_min - h11)) / math.sqrt(dm)
    b1 = (p.j12 * a * abs(h12) + p.j22 * c * sg * (s.lambda_max - h11)) / math.sqrt(dM)
    b2 = (p.j12 * a * abs(h12) + p.j22 * c * sg * (s.lambda_min - h11)) / math.sqrt(dm)
    return TildeCoefficients(jt11, jt12, jt22, a1, a2, b1, b2)


def _coefficient_form(p: ModelParams, c: TildeCoefficients, x1, x2):
    a = p.alpha
    quad = 0.5 * (c.jt11 * x1 * x1 + 2.0 * c.jt12 * x1 * x2 + c.jt22 * x2 * x2)
    return (quad - a * _log_cosh(c.a1 * x1 + c.a2 * x2)
            - (1.0 - a) * _log_cosh(c.b1 * x1 + c.b2 * x2))


def transformed_functional(p: ModelParams, s: SpectralData, x1, x2):
    """The rotated functional Gt(x) = G(P^-1 x) at (x1, x2).

    Evaluated through the composition; outside -O mode the explicit
    coefficient form is evaluated as well and both routes must agree.
    """
    y1 = s.P[0, 0] * x1 + s.P[1, 0] * x2
    y2 = s.P[0, 1] * x1 + s.P[1, 1] * x2
    val = pressure_functional(p, y1, y2)
    if __debug__:
        alt = _coefficient_form(p, tilde_coefficients(p, s), x1, x2)
        err = float(np.max(np.abs(np.asarray(val - alt))))
        scale = 1.0 + float(np.max(np.abs(np.asarray(val))))
        assert err <= 1e-10 * scale, \
            f"rotated-functional routes disagree by {err:.3e}"
    return val


@dataclass(frozen=True)
class TransformedModel:
    """Coefficients of the rotated functional and of the limit density."""

    jt11: float
    jt12: float
    jt22: float
    a1: float
    a2: float
    b1: float
    b2: float
    zeta1: float  # (1/(2 alpha)) d^2 Gt/dx1^2 at 0, equals lambda_max/(2 alpha)
    zeta2: float  # (1/(4! (1-alpha))) d^4 Gt/dx2^4 at 0
    d: float      # variance of the stiff Gaussian marginal
    xi1: float    # stiff exponent of the limit density, 1/(2 d)
    xi2: float    # soft exponent of the limit density, equals zeta2

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("jt11", "jt12", "jt22", "a1", "a2", "b1", "b2",
                 "zeta1", "zeta2", "d", "xi1", "xi2")}


def limit_coefficients(p: ModelParams, s: SpectralData,
                       tol: float = 1e-12, tol_eigen: float = 1e-10) -> TransformedModel:
    """Taylor and limit-density coefficients at a critical parameter point.

    Raises NotCritical unless `check_critical_conditions` passes at the
    given tolerances, and NonPositiveCoefficient if a coefficient that
    must be positive fails to be.
    """
    report = check_critical_conditions(p, tol=tol, tol_eigen=tol_eigen)
    if not report.all_pass:
        raise NotCritical(f"parameters are not critical: {report.to_dict()}")

    a = p.alpha
    c = 1.0 - a
    co = tilde_coefficients(p, s)
    zeta1 = s.lambda_max / (2.0 * a)
    u = 1.0 - a * p.j11
    w = 1.0 - c * p.j22
    zeta2 = 2.0 * a * (a * u * u + c * w * w) / (24.0 * (a * u + c * w) ** 2)
    det = co.jt11 * co.jt22 - co.jt12 * co.jt12
    d = a / s.lambda_max - a * co.jt22 / det

    for name, val in (("zeta1", zeta1), ("zeta2", zeta2), ("d", d)):
        if not val > 0.0:
            raise NonPositiveCoefficient(f"{name} = {val} must be positive")
    return TransformedModel(jt11=co.jt11, jt12=co.jt12, jt22=co.jt22,
                            a1=co.a1, a2=co.a2, b1=co.b1, b2=co.b2,
                            zeta1=zeta1, zeta2=zeta2, d=d,
                            xi1=1.0 / (2.0 * d), xi2=zeta2)


def transform_matrix(s: SpectralData, alpha: float | None = None) -> np.ndarray:
    """The linear map (A^2)^-1 P A^2 acting on magnetization pairs."""
    a = s.alpha if alpha is None else alpha
    scale = np.array([a, 1.0 - a])
    return (s.P * scale[None, :]) / scale[:, None]


def transform_magnetization(s: SpectralData, alpha: float, s1, s2):
    """Apply (A^2)^-1 P A^2 to a magnetization pair (arrays welcome)."""
    m = transform_matrix(s, alpha)
    return m[0, 0] * s1 + m[0, 1] * s2, m[1, 0] * s1 + m[1, 1] * s2


def linear_envelope(p: ModelParams, s: SpectralData, x1, x2):
    """Pointwise lower bound for Gt from the linear majorant of ln cosh.

    Replacing each ln cosh(t) with |t| and minimizing over the four sign
    assignments gives quad - alpha |a.x| - (1-alpha) |b.x|, which bounds
    Gt from below; its Gibbs factor therefore dominates exp(-Gt) and is a
    finite mixture of Gaussians with linear tilts.
    """
    a = p.alpha
    co = tilde_coefficients(p, s)
    quad = 0.5 * (co.jt11 * x1 * x1 + 2.0 * co.jt12 * x1 * x2 + co.jt22 * x2 * x2)
    return (quad - a * np.abs(co.a1 * x1 + co.a2 * x2)
            - (1.0 - a) * np.abs(co.b1 * x1 + co.b2 * x2))


def integrate_transformed_gibbs(p: ModelParams, s: SpectralData, n: float = 1.0,
                                half_width: float = 30.0, nodes: int = 420) -> float:
    """Tensor Gauss-Legendre integral of exp(-n Gt) over a centered square."""
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    xg = xg * half_width
    wg = wg * half_width
    x1, x2 = np.meshgrid(xg, xg, indexing="ij")
    vals = np.exp(-n * transformed_functional(p, s, x1, x2))
    return float(np.einsum("i,j,ij->", wg, wg, vals))


def excluded_neighborhood_integral(p: ModelParams, s: SpectralData, n: float,
                                   radius: float = 0.1, outer: float = 30.0,
                                   radial_nodes: int = 600,
                                   angular_nodes: int = 512) -> float:
    """Integral of exp(-n Gt) outside the ball of given radius.

    Polar Gauss-Legendre in the radius, midpoint rule in the angle (the
    integrand is periodic there), so the excluded disk is cut exactly.
    """
    xr, wr = np.polynomial.legendre.leggauss(radial_nodes)
    r = radius + (xr + 1.0) * (outer - radius) / 2.0
    wr = wr * (outer - radius) / 2.0
    th = (np.arange(angular_nodes) + 0.5) * (2.0 * math.pi / angular_nodes)
    rr, tt = np.meshgrid(r, th, indexing="ij")
    x1 = rr * np.cos(tt)
    x2 = rr * np.sin(tt)
    vals = np.exp(-n * transformed_functional(p, s, x1, x2)) * rr
    d_theta = 2.0 * math.pi / angular_nodes
    return float(np.sum(vals.sum(axis=1) * wr) * d_theta)
