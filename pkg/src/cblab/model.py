"""Two-group mean-field spin model and its pressure functional.

N spins of value +-1 split into two groups of sizes N1 and N2; write
alpha = N1/N. The energy of a configuration depends on the spins only
through the group magnetizations S = (S1, S2):

    H(sigma) = -<J S, S> / (2 N),    J = [[j11, j12], [j12, j22]].

The infinite-volume pressure is ln 2 - inf G with the variational
functional

    G(x1, x2) = (alpha^2 j11 x1^2 + 2 alpha (1-alpha) j12 x1 x2
                 + (1-alpha)^2 j22 x2^2) / 2
                - alpha ln cosh(alpha j11 x1 + (1-alpha) j12 x2)
                - (1-alpha) ln cosh(alpha j12 x1 + (1-alpha) j22 x2)

whose stationary points solve the self-consistency system

    x1 = tanh(alpha j11 x1 + (1-alpha) j12 x2)
    x2 = tanh(alpha j12 x1 + (1-alpha) j22 x2).

For j12 != 0 each equation can be solved for the other variable, which
turns the system into the intersection of two scalar curves; that is how
solutions are located and counted here.

The regime of interest is the boundary of uniqueness: the origin remains
the only minimizer of G while its Hessian there becomes singular.
`check_critical_conditions` tests for that window and `solve_critical_j12`
constructs the coupling that realizes it for given alpha, j11, j22.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError, GridTooCoarse, NoCriticalPoint

LN2 = math.log(2.0)

# widest magnetization fed to atanh during grid sweeps
ATANH_CLAMP = 1.0 - 1e-12


def _log_cosh(t):
    # |t| + log1p(exp(-2|t|)) - ln 2: no overflow for large |t|
    t = np.abs(t)
    return t + np.log1p(np.exp(-2.0 * t)) - LN2


@dataclass(frozen=True)
class ModelParams:
    """Interaction parameters and group weight of the two-group model."""

    alpha: float
    j11: float
    j22: float
    j12: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.j11 >= 0.0:
            raise ValueError(f"j11 must be nonnegative, got {self.j11}")
        if not self.j22 >= 0.0:
            raise ValueError(f"j22 must be nonnegative, got {self.j22}")
        for name in ("alpha", "j11", "j22", "j12"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def is_positive_definite(self) -> bool:
        return self.j11 * self.j22 - self.j12 * self.j12 > 0.0

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "j11": self.j11, "j22": self.j22, "j12": self.j12}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        try:
            return cls(float(d["alpha"]), float(d["j11"]), float(d["j22"]), float(d["j12"]))
        except KeyError as exc:
            raise ValueError(f"missing parameter key {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class CurvePoint:
    """One abscissa with the values of both inverted self-consistency curves."""

    x: float
    f1: float  # x2 = f1(x1), inversion of the first equation
    f2: float  # x1 = f2(x2), inversion of the second equation


def pressure_functional(p: ModelParams, x1, x2):
    """Evaluate G at (x1, x2). Accepts scalars or numpy arrays."""
    a = p.alpha
    c = 1.0 - a
    quad = 0.5 * (a * a * p.j11 * x1 * x1
                  + 2.0 * a * c * p.j12 * x1 * x2
                  + c * c * p.j22 * x2 * x2)
    t1 = a * p.j11 * x1 + c * p.j12 * x2
    t2 = a * p.j12 * x1 + c * p.j22 * x2
    return quad - a * _log_cosh(t1) - c * _log_cosh(t2)


def mean_field_residual(p: ModelParams, x1, x2):
    """Residuals (x1 - tanh(...), x2 - tanh(...)) of the self-consistency system.

    Both components vanish exactly at the stationary points of G: the
    gradient of G equals the matrix diag(alpha, 1-alpha) J diag(alpha,
    1-alpha) applied to this residual vector.
    """
    a = p.alpha
    c = 1.0 - a
    r1 = x1 - np.tanh(a * p.j11 * x1 + c * p.j12 * x2)
    r2 = x2 - np.tanh(a * p.j12 * x1 + c * p.j22 * x2)
    return r1, r2


def _f1(p: ModelParams, x):
    return (np.arctanh(x) - p.alpha * p.j11 * x) / ((1.0 - p.alpha) * p.j12)


def _f2(p: ModelParams, x):
    return (np.arctanh(x) - (1.0 - p.alpha) * p.j22 * x) / (p.alpha * p.j12)


def inverted_curves(p: ModelParams, x: float) -> CurvePoint:
    """Both inverted curves at a single abscissa x in (-1, 1)."""
    if p.j12 == 0.0:
        raise DegenerateError("curve inversion needs j12 != 0")
    if not -1.0 < x < 1.0:
        raise DomainError(f"curve abscissa must lie in (-1, 1), got {x}")
    return CurvePoint(x=x, f1=float(_f1(p, x)), f2=float(_f2(p, x)))


def _composed_residual(p: ModelParams, xs: np.ndarray):
    """Residual f2(f1(x)) - x where |f1(x)| < 1, nan elsewhere."""
    y = _f1(p, xs)
    ok = np.abs(y) <= ATANH_CLAMP
    res = np.full(xs.shape, np.nan)
    res[ok] = _f2(p, y[ok]) - xs[ok]
    return res, ok


def _refined_changes(p: ModelParams, lo: float, hi: float, sub: int = 65) -> int:
    xs = np.linspace(lo, hi, sub + 1)
    res, ok = _composed_residual(p, xs)
    sgn = np.sign(res)
    pair = ok[:-1] & ok[1:]
    changes = int(np.sum(pair & (sgn[:-1] * sgn[1:] < 0)))
    zero = ok & (res == 0.0)
    zero_start = zero & ~np.concatenate(([False], zero[:-1]))
    return changes + int(np.sum(zero_start))


def count_mean_field_solutions(p: ModelParams, grid_n: int = 100_000) -> int:
    """Count distinct solutions of the self-consistency system.

    Substitutes x2 = f1(x1) into the inverted second equation and counts
    sign changes of the scalar residual f2(f1(x1)) - x1 on a uniform grid
    over (-1, 1), restricted to abscissas where |f1(x1)| < 1 (outside that
    set the composed equation has no solution). The origin is always a
    solution and registers exactly once; a symmetric pair registers as two.

    Cells that contain a sign change, and cells where |residual| dips
    toward zero without changing sign, are re-swept on a local subgrid; if
    the refinement finds more roots than the coarse grid resolved the
    count would be unreliable and GridTooCoarse is raised.
    """
    if p.j12 == 0.0:
        raise DegenerateError("curve inversion needs j12 != 0")
    if grid_n < 1000:
        raise ValueError(f"grid_n must be at least 1000, got {grid_n}")

    xs = np.linspace(-1.0 + 1e-9, 1.0 - 1e-9, grid_n)
    res, ok = _composed_residual(p, xs)
    sgn = np.sign(res)

    pair = ok[:-1] & ok[1:]
    change = pair & (sgn[:-1] * sgn[1:] < 0)
    zero = ok & (res == 0.0)
    zero_start = zero & ~np.concatenate(([False], zero[:-1]))
    count = int(np.sum(change)) + int(np.sum(zero_start))

    change_cells = set(np.flatnonzero(change).tolist())
    for i in change_cells:
        if _refined_changes(p, xs[i], xs[i + 1]) != 1:
            raise GridTooCoarse(
                f"more than one root between x={xs[i]:.6g} and x={xs[i + 1]:.6g}; "
                f"raise grid_n above {grid_n}")

    # a root pair hiding inside one cell leaves no sign change, only a dip
    # of |residual|; refine interior local minima that dip below the local
    # secant scale
    mid = np.flatnonzero(ok[1:-1] & ok[:-2] & ok[2:]
                         & (np.abs(res[1:-1]) < np.abs(res[:-2]))
                         & (np.abs(res[1:-1]) <= np.abs(res[2:]))
                         & ~zero[1:-1]) + 1
    dip = mid[np.abs(res[mid]) <= np.abs(res[mid + 1] - res[mid - 1])]
    for i in dip:
        for cell in (i - 1, i):
            if cell in change_cells:
                continue
            if _refined_changes(p, xs[cell], xs[cell + 1]) > 0:
                raise GridTooCoarse(
                    f"unresolved root pair near x={xs[i]:.6g}; "
                    f"raise grid_n above {grid_n}")
    return count


@dataclass(frozen=True)
class CriticalityReport:
    """Outcome of the critical-window test, one flag per condition."""

    j12_nonzero: bool
    j11_in_range: bool           # j11 < 1/alpha
    j22_in_range: bool           # j22 < 1/(1-alpha)
    tangency_within_tol: bool    # (1-a j11)(1-(1-a) j22) = a(1-a) j12^2
    trace_excess_positive: bool  # a j11 + (1-a) j22 > 1
    j_positive_definite: bool
    tangency_residual: float
    lambda_min_is_zero: bool
    tol: float

    @property
    def all_pass(self) -> bool:
        return (self.j12_nonzero and self.j11_in_range and self.j22_in_range
                and self.tangency_within_tol and self.trace_excess_positive
                and self.j_positive_definite and self.lambda_min_is_zero)

    def to_dict(self) -> dict:
        return {
            "j12_nonzero": self.j12_nonzero,
            "j11_in_range": self.j11_in_range,
            "j22_in_range": self.j22_in_range,
            "tangency_within_tol": self.tangency_within_tol,
            "trace_excess_positive": self.trace_excess_positive,
            "j_positive_definite": self.j_positive_definite,
            "tangency_residual": self.tangency_residual,
            "lambda_min_is_zero": self.lambda_min_is_zero,
            "tol": self.tol,
            "all_pass": self.all_pass,
        }


def check_critical_conditions(p: ModelParams, tol: float = 1e-12,
                              tol_eigen: float = 1e-10) -> CriticalityReport:
    """Test whether the parameters sit in the critical window.

    The window is the simultaneous validity of: j12 != 0, j11 < 1/alpha,
    j22 < 1/(1-alpha), the tangency identity
    (1 - alpha j11)(1 - (1-alpha) j22) = alpha (1-alpha) j12^2 within
    `tol`, and alpha j11 + (1-alpha) j22 - 1 > 0. Positive definiteness of
    J and the vanishing of the smaller Hessian eigenvalue at the origin
    (within `tol_eigen`) are reported alongside.
    """
    a = p.alpha
    c = 1.0 - a
    residual = (1.0 - a * p.j11) * (1.0 - c * p.j22) - a * c * p.j12 * p.j12

    from .spectral import eigenvalues_at_origin  # deferred: spectral imports this module
    _, lam_min = eigenvalues_at_origin(p)

    return CriticalityReport(
        j12_nonzero=p.j12 != 0.0,
        j11_in_range=p.j11 < 1.0 / a,
        j22_in_range=p.j22 < 1.0 / c,
        tangency_within_tol=abs(residual) <= tol,
        trace_excess_positive=a * p.j11 + c * p.j22 - 1.0 > 0.0,
        j_positive_definite=p.is_positive_definite,
        tangency_residual=residual,
        lambda_min_is_zero=abs(lam_min) <= tol_eigen,
        tol=tol,
    )


def solve_critical_j12(alpha: float, j11: float, j22: float, sign: int = 1) -> float:
    """The coupling j12 that closes the critical window for alpha, j11, j22.

    Solves the tangency identity for j12 and returns the root with the
    requested sign. Raises NoCriticalPoint when no real coupling exists,
    which happens when j11 >= 1/alpha, j22 >= 1/(1-alpha), or the trace
    condition alpha j11 + (1-alpha) j22 > 1 fails.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    u = 1.0 - alpha * j11
    w = 1.0 - (1.0 - alpha) * j22
    if u <= 0.0:
        raise NoCriticalPoint(f"j11 = {j11} is not below 1/alpha = {1.0 / alpha}")
    if w <= 0.0:
        raise NoCriticalPoint(f"j22 = {j22} is not below 1/(1-alpha) = {1.0 / (1.0 - alpha)}")
    if u + w >= 1.0:
        raise NoCriticalPoint(
            "trace condition fails: alpha j11 + (1-alpha) j22 must exceed 1")
    return sign * math.sqrt(u * w / (alpha * (1.0 - alpha)))
