"""Oscillatory quadrature helpers shared by the seed and overlap modules.

All integrals here have the form ``int f(t) exp(i*omega*t) dt`` with a real
``f``.  Finite pieces go through QUADPACK's QAWO (``weight='cos'/'sin'``),
semi-infinite tails through QAWF, and non-oscillatory pieces through QAGS.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate


class IntegrationError(RuntimeError):
    """Quadrature did not reach the requested accuracy."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (error estimate {residual:.3e})")
        self.residual = residual


def _quad(f, lo, hi, epsabs, epsrel, limit, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if "weight" in kw and math.isinf(hi):
            # QAWF takes no epsrel and uses limlst for its cycle count
            val, err = integrate.quad(f, lo, hi, epsabs=epsabs, limlst=200, limit=limit, **kw)[:2]
        else:
            val, err = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, **kw)[:2]
    return val, err


def fourier_integral(
    f,
    omega: float,
    lo: float,
    hi: float,
    breaks=(),
    core: float = 0.0,
    epsabs: float = 1e-13,
    epsrel: float = 1e-12,
    limit: int = 400,
    max_error: float = 1e-9,
    vectorized: bool = False,
) -> tuple[complex, float]:
    """Integrate ``f(t) * exp(i*omega*t)`` over ``[lo, hi]``.

    Parameters
    ----------
    f : callable
        Real-valued integrand envelope, scalar in, scalar out.
    omega : float
        Angular frequency of the oscillating factor.
    lo, hi : float
        Integration limits; either may be infinite.
    breaks : sequence of float
        Interior points where ``f`` is not smooth.  The interval is split there.
    core : float
        For infinite limits, the finite part ``[-core, core]`` (widened to cover
        ``breaks``) is integrated with QAWO and only the remainder with QAWF.
    max_error : float
        Raise :class:`IntegrationError` when the summed error estimate exceeds it.
    vectorized : bool
        ``f`` accepts arrays.  Finite pieces are then first tried with a
        panel Gauss-Legendre rule at two resolutions; QUADPACK is used only
        when the two disagree.

    Returns
    -------
    value : complex
    error : float
        Summed QUADPACK error estimate.
    """
    if hi <= lo:
        return 0j, 0.0
    fv = f
    if vectorized:
        f = lambda t: float(fv(np.asarray(t)))  # noqa: E731
    pts = [float(b) for b in breaks if lo < b < hi]
    left = min([-core] + pts) if math.isinf(lo) else lo
    right = max([core] + pts) if math.isinf(hi) else hi
    if right <= left:
        right = left + 1.0
    knots = sorted(set([left, right] + [p for p in pts if left < p < right]))
    total = 0j
    error = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        if b <= a:
            continue
        fast = _panel_piece(fv, omega, a, b, epsabs, epsrel) if vectorized else None
        v, e = fast if fast is not None else _piece(f, omega, a, b, epsabs, epsrel, limit)
        total += v
        error += e
    if math.isinf(hi):
        v, e = _piece(f, omega, right, math.inf, epsabs, epsrel, limit)
        total += v
        error += e
    if math.isinf(lo):
        # substitute t -> -t so the tail starts at a finite point
        v, e = _piece(lambda t: f(-t), -omega, -left, math.inf, epsabs, epsrel, limit)
        total += v
        error += e
    if not np.isfinite(total.real) or not np.isfinite(total.imag) or error > max_error:
        raise IntegrationError(f"oscillatory integral (omega={omega:g}) did not converge", error)
    return total, error


def _piece(f, omega, a, b, epsabs, epsrel, limit):
    if omega == 0.0:
        v, e = _quad(f, a, b, epsabs, epsrel, limit)
        return complex(v), e
    w = abs(omega)
    sign = 1.0 if omega > 0 else -1.0
    vc, ec = _quad(f, a, b, epsabs, epsrel, limit, weight="cos", wvar=w)
    vs, es = _quad(f, a, b, epsabs, epsrel, limit, weight="sin", wvar=w)
    return complex(vc, sign * vs), ec + es


def _panel_piece(f, omega, a, b, epsabs, epsrel, max_panels=1 << 14):
    """Panel Gauss-Legendre with at most a quarter oscillation per panel.

    Returns ``None`` when the rule at n and 2n panels disagrees beyond the
    tolerance, so the caller can fall back to adaptive quadrature.
    """
    n = max(4, math.ceil((b - a) * abs(omega) / (0.5 * math.pi)))
    if 2 * n > max_panels:
        return None
    v1 = panel_integral(f, omega, np.linspace(a, b, n + 1))
    v2 = panel_integral(f, omega, np.linspace(a, b, 2 * n + 1))
    diff = abs(v2 - v1)
    if not np.isfinite(diff) or diff > max(epsabs, epsrel * abs(v2)):
        return None
    return v2, diff


# Gauss-Legendre nodes on [0, 1] for piecewise-polynomial integrands
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def panel_integral(f, omega: float, knots) -> complex:
    """Fixed 8-point Gauss-Legendre rule on every panel between ``knots``.

    Exact (up to rounding) for piecewise polynomials of degree <= 15 whose
    breakpoints are among ``knots``; used for interpolated tabulated seeds.
    ``f`` must accept arrays and may be complex.
    """
    knots = np.unique(np.asarray(knots, dtype=float))
    if knots.size < 2:
        return 0j
    a = knots[:-1, None]
    width = np.diff(knots)[:, None]
    t = a + width * _GL_X[None, :]
    vals = f(t) * np.exp(1j * omega * t)
    return complex(np.sum(vals * (width * _GL_W[None, :])))
