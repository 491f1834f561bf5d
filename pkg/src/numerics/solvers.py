"""
Adaptive quadrature and bracketed root finding.

Both wrap scipy and translate its status codes into the package's exceptions,
so callers never have to inspect ``ier`` or ``converged`` themselves.
"""

import logging
import math
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize

from src.errors import BracketError, DomainError, IntegrationError

logger = logging.getLogger(__name__)


def _split_points(lower: float, upper: float, breakpoints: Optional[Iterable[float]]) -> list[float]:
    inner = sorted(
        {float(b) for b in (breakpoints or ()) if math.isfinite(b) and lower < b < upper}
    )
    return [lower, *inner, upper]


def integrate(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    rel_tol: float = 1e-8,
    breakpoints: Optional[Iterable[float]] = None,
    limit: int = 200,
) -> float:
    """
    Integrate a scalar function over a possibly infinite interval.

    The interval is split at ``breakpoints`` and each piece handed to
    ``scipy.integrate.quad``.  A piece that misses its own relative tolerance is
    accepted when its error is negligible against the whole integral;
    otherwise :class:`IntegrationError` is raised carrying the best estimate.
    """
    if not lower < upper:
        raise DomainError(f"integrate needs lower < upper, got [{lower!r}, {upper!r}]")

    edges = _split_points(lower, upper, breakpoints)
    total = 0.0
    total_err = 0.0
    failures = []
    for a, b in zip(edges[:-1], edges[1:]):
        result = sp_integrate.quad(f, a, b, epsabs=0.0, epsrel=rel_tol, limit=limit, full_output=1)
        value, abserr = result[0], result[1]
        total += value
        total_err += abserr
        if len(result) > 3:
            failures.append(f"[{a:.6g}, {b:.6g}]: {result[3]}")

    if failures and total_err > rel_tol * abs(total):
        raise IntegrationError("; ".join(failures), total, total_err)
    if failures:
        logger.debug(f"Accepted quadrature warnings on negligible pieces: {failures}")
    return total


def integrate_vec(
    f: Callable[[float], np.ndarray],
    lower: float,
    upper: float,
    rel_tol: float = 1e-6,
    breakpoints: Optional[Iterable[float]] = None,
    limit: int = 10000,
) -> np.ndarray:
    """
    Integrate a vector-valued function with ``scipy.integrate.quad_vec``.

    The error is controlled in the max norm, so components should be scaled to
    comparable magnitude by the caller.
    """
    if not lower < upper:
        raise DomainError(f"integrate_vec needs lower < upper, got [{lower!r}, {upper!r}]")

    points = _split_points(lower, upper, breakpoints)[1:-1]
    value, abserr, info = sp_integrate.quad_vec(
        f, lower, upper,
        epsabs=1e-200, epsrel=rel_tol, norm="max", limit=limit,
        points=points or None, full_output=True,
    )
    if not info.success:
        raise IntegrationError(f"quad_vec: {info.message}", float(np.max(np.abs(value))), float(abserr))
    return np.asarray(value)


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> float:
    """
    Root of ``f`` on ``[lo, hi]`` by Brent's method.

    The bracket is checked first; without a sign change :class:`BracketError` is
    raised.  An endpoint that is an exact root is returned directly.
    """
    if not lo < hi:
        raise DomainError(f"find_root needs lo < hi, got [{lo!r}, {hi!r}]")
    f_lo = f(lo)
    if f_lo == 0.0:
        return lo
    f_hi = f(hi)
    if f_hi == 0.0:
        return hi
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)) or (f_lo > 0.0) == (f_hi > 0.0):
        raise BracketError(lo, hi, f_lo, f_hi)

    root, status = optimize.brentq(
        f, lo, hi, xtol=tol, rtol=4.0 * np.finfo(float).eps,
        maxiter=max_iter, full_output=True, disp=False,
    )
    if not status.converged:
        logger.warning(f"brentq stopped after {status.iterations} iterations: {status.flag}")
    else:
        logger.debug(f"brentq converged in {status.iterations} iterations at {root!r}")
    return float(root)
