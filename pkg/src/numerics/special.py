"""
Standard normal CDF and quantile, and the Lambert W function on both real
branches.

The quantile uses Wichura's AS241 (PPND16) rational approximations followed by
one Newton step against the erfc-based CDF.  Lambert W uses Halley iteration
from branch-specific seeds.
"""

import enum
import logging
import math

import numpy as np
from scipy import special

from src.errors import DomainError

logger = logging.getLogger(__name__)

INV_E = math.exp(-1.0)
_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class Branch(enum.Enum):
    """Real branch of the Lambert W function."""
    PRINCIPAL = "principal"            # W(y) >= -1
    NON_PRINCIPAL = "non_principal"    # W(y) <= -1 on [-1/e, 0)


def std_normal_cdf(x):
    """Standard normal CDF, scalar or array, clamped to [0, 1]."""
    value = np.clip(0.5 * special.erfc(-np.asarray(x, dtype=float) / _SQRT2), 0.0, 1.0)
    if np.ndim(value) == 0:
        return float(value)
    return value


# AS241 coefficients, central region |p - 0.5| <= 0.425
_A = (3.387132872796366608, 133.14166789178437745, 1971.5909503065514427,
      13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
      33430.575583588128105, 2509.0809287301226727)
_B = (1.0, 42.313330701600911252, 687.1870074920579083, 5394.1960214247511077,
      21213.794301586595867, 39307.89580009271061, 28729.085735721942674,
      5226.495278852545925)
# intermediate tail, r = sqrt(-log(min(p, 1-p))) <= 5
_C = (1.42343711074968357734, 4.6303378461565452959, 5.7694972214606914055,
      3.64784832476320460504, 1.27045825245236838258, 0.24178072517745061177,
      0.0227238449892691845833, 7.7454501427834140764e-4)
_D = (1.0, 2.05319162663775882187, 1.6763848301838038494, 0.68976733498510000455,
      0.14810397642748007459, 0.0151986665636164571966, 5.475938084995344946e-4,
      1.05075007164441684324e-9)
# far tail
_E = (6.6579046435011037772, 5.4637849111641143699, 1.7848265399172913358,
      0.29656057182850489123, 0.026532189526576123093, 0.0012426609473880784386,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 0.59983220655588793769, 0.13692988092273580531, 0.0148753612908506148525,
      7.868691311456132591e-4, 1.8463183175100546818e-5, 1.4215117583164458887e-7,
      2.04426310338993978564e-15)


def _ratio(num, den, r):
    # coefficients are stored lowest order first
    return np.polyval(num[::-1], r) / np.polyval(den[::-1], r)


def _ppnd16(p: np.ndarray) -> np.ndarray:
    q = p - 0.5
    out = np.empty_like(p)

    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _ratio(_A, _B, r)

    tail = ~central
    if tail.any():
        qt = q[tail]
        r = np.sqrt(-np.log(np.where(qt < 0.0, p[tail], 1.0 - p[tail])))
        x = np.where(
            r <= 5.0,
            _ratio(_C, _D, r - 1.6),
            _ratio(_E, _F, r - 5.0),
        )
        out[tail] = np.where(qt < 0.0, -x, x)
    return out


def std_normal_quantile(p):
    """Inverse of the standard normal CDF for 0 < p < 1, scalar or array."""
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError("std_normal_quantile requires 0 < p < 1")

    flat = np.atleast_1d(arr).astype(float)
    x = _ppnd16(flat)

    # One Newton step, measuring the residual in whichever tail is smaller.
    lower = flat < 0.5
    resid = np.where(
        lower,
        0.5 * special.erfc(-x / _SQRT2) - flat,
        (1.0 - flat) - 0.5 * special.erfc(x / _SQRT2),
    )
    log_pdf = -0.5 * x * x - _LOG_SQRT_2PI
    step = resid * np.exp(-log_pdf)
    x = np.where(np.isfinite(step), x - step, x)

    if np.ndim(arr) == 0:
        return float(x[0])
    return x.reshape(arr.shape)


def _branch_point_series(y: float, sign: float) -> float:
    # W around -1/e in powers of p = +-sqrt(2(e*y + 1))
    p = sign * math.sqrt(max(2.0 * (math.e * y + 1.0), 0.0))
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3


def _seed(y: float, branch: Branch) -> float:
    if branch is Branch.PRINCIPAL:
        if y < -0.32:
            return _branch_point_series(y, 1.0)
        if y <= math.e:
            return math.log1p(y)
        l1 = math.log(y)
        l2 = math.log(l1)
        return l1 - l2 + l2 / l1
    if y < -0.25:
        return _branch_point_series(y, -1.0)
    l1 = math.log(-y)
    l2 = math.log(-l1)
    return l1 - l2 + l2 / l1


def lambert_w(y: float, branch: Branch = Branch.PRINCIPAL, max_iter: int = 50) -> float:
    """Solve ``w * exp(w) = y`` on the requested real branch."""
    y = float(y)
    if not math.isfinite(y):
        raise DomainError(f"lambert_w requires a finite argument, got {y!r}")
    if y < -INV_E:
        # tolerate rounding in callers that compute -1/e themselves
        if y < -INV_E * (1.0 + 1e-14):
            raise DomainError(f"lambert_w undefined for y = {y!r} < -1/e")
        y = -INV_E
    if branch is Branch.NON_PRINCIPAL and y >= 0.0:
        raise DomainError(f"non-principal branch requires -1/e <= y < 0, got {y!r}")

    if y == 0.0:
        return 0.0
    if y == -INV_E:
        return -1.0

    w = _seed(y, branch)
    if abs(w + 1.0) < 1e-4:
        # Halley's denominator degenerates at the branch point
        return w

    for iteration in range(max_iter):
        ew = math.exp(w)
        f = w * ew - y
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        step = f / denom
        w -= step
        if abs(step) <= 1e-15 * (1.0 + abs(w)):
            logger.debug(f"lambert_w({y!r}, {branch.value}) converged in {iteration + 1} steps")
            return w
    logger.debug(f"lambert_w({y!r}, {branch.value}) stopped after {max_iter} steps")
    return w
