"""Superstable period-doubling parameters of z^2 + c on the real line.

c_k is the real parameter whose critical orbit returns exactly to 0
after 2^k steps (a superattracting cycle of period 2^k).  The sequence
decreases to the cascade accumulation parameter, with gap ratios
approaching a universal constant near 4.669.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .errors import DerivationError, DomainError

_DELTA_GUESS = 4.669  # used only to predict brackets, never asserted
_RETURN_TOL = 1e-12


def _critical_return(c, k):
    """f_c^{2^k}(0) for real c, in the arithmetic of c's type."""
    x = c * 0
    for _ in range(2 ** k):
        x = x * x + c
    return x


@dataclass(frozen=True)
class FeigenbaumParameter:
    """Superstable parameter sequence with its extrapolated limit.

    `cs[k-1]` is the period-2^k superstable parameter; `residuals` hold
    |f^{2^k}(0)| evaluated in high precision at the derived parameter
    (before float64 rounding, which alone would contribute ~1e-8 at
    large k).  `ratios[j]` = (c_{j+1}-c_{j+2})/(c_{j+2}-c_{j+3}) in
    1-based terms, the diagnostic that approaches the doubling constant.
    """

    cs: tuple
    residuals: tuple
    c_limit: float
    ratios: tuple


def derive_feigenbaum_parameter(m, dps=30):
    """Derive c_1..c_m by bisection and extrapolate the cascade limit.

    Brackets for c_{k+1} are predicted from the previous gap shrunk by
    the expected ratio and expanded on sign-change failure; roots are
    polished with mpmath bisection at `dps` digits.  Limit extrapolation
    is Aitken's delta-squared on the tail.
    """
    if not (2 <= m <= 14):
        raise DomainError("m must be between 2 and 14")
    with mp.workdps(dps):
        cs = [mp.mpf(-1)]  # c_1: critical orbit 0 -> -1 -> 0
        residuals = [abs(_critical_return(mp.mpf(-1), 1))]
        lo, hi = mp.mpf("-1.5"), mp.mpf("-1.25")
        for k in range(2, m + 1):
            if k > 2:
                gap = cs[-1] - cs[-2]          # negative
                pred = cs[-1] + gap / _DELTA_GUESS
                half = abs(gap / _DELTA_GUESS) * mp.mpf("0.6")
                lo, hi = pred - half, pred + half
            cs.append(_bisect_superstable(k, lo, hi, cs[-1]))
            residuals.append(abs(_critical_return(cs[-1], k)))
        ratios = []
        for j in range(len(cs) - 2):
            num = cs[j] - cs[j + 1]
            den = cs[j + 1] - cs[j + 2]
            ratios.append(float(num / den))
        # Aitken delta-squared on the last three parameters.
        if len(cs) >= 3:
            a, b, c = cs[-3], cs[-2], cs[-1]
            denom = c - 2 * b + a
            c_limit = float(c - (c - b) ** 2 / denom) if denom != 0 else float(c)
        else:
            c_limit = float(cs[-1])
    return FeigenbaumParameter(cs=tuple(float(c) for c in cs),
                               residuals=tuple(float(r) for r in residuals),
                               c_limit=c_limit, ratios=tuple(ratios))


def _bisect_superstable(k, lo, hi, c_prev):
    """High-precision bisection of f_c^{2^k}(0) = 0 on (lo, hi)."""
    g = lambda c: _critical_return(c, k)
    glo, ghi = g(lo), g(hi)
    width = hi - lo
    tries = 0
    while glo * ghi > 0:
        tries += 1
        if tries > 60:
            raise DerivationError(
                f"no sign change bracketing the period-2^{k} parameter")
        lo -= width / 2
        hi = min(hi + width / 2, c_prev - mp.mpf("1e-12"))
        glo, ghi = g(lo), g(hi)
    for _ in range(mp.mp.prec + 40):
        mid = (lo + hi) / 2
        gm = g(mid)
        if gm == 0:
            return mid
        if glo * gm < 0:
            hi = mid
        else:
            lo, glo = mid, gm
        if hi - lo < mp.mpf(10) ** (-(mp.mp.dps - 2)):
            break
    root = (lo + hi) / 2
    if abs(_critical_return(root, k)) > _RETURN_TOL:
        raise DerivationError(
            f"period-2^{k} return residual above tolerance at {float(root)}")
    return root
