"""Synthesis weights and filter coefficients.

Given the spectral series S(0, p) of a seed, the 1D weights

    c_s = (1/2 pi) int_0^{2 pi} exp(-i p s + i phi(p)) / sqrt(S(0, p)) dp

produce the filter ``H_n = sqrt(a) sum_s c_s hat_h((n + 2 s) a)``.  The 2D
weights ``f_l`` (Fourier coefficients of 1/sqrt(S(p1, p2))) give the
orthonormalized function ``H(P)`` and a second route to ``H_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .overlap import OverlapTable, SpectralSeries, spectral_series
from .quadrature import IntegrationError
from .seed import A, SeedFunction
from .seqtools import TruncatedSequence, convolve

SQRT_A = math.sqrt(A)


class PositivityError(ArithmeticError):
    """S(0, p) is not certified strictly positive, so 1/sqrt(S) may diverge."""

    def __init__(self, message: str, min_value: float = float("nan"), min_location: float = float("nan")):
        super().__init__(message)
        self.min_value = min_value
        self.min_location = min_location


@dataclass(frozen=True)
class PhaseSpec:
    """Phase phi(0, p) multiplying 1/sqrt(S): zero, ``k0 * p`` or ``gamma * p**2``."""

    kind: str = "zero"
    k0: int = 0
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "linear", "quadratic"):
            raise ValueError(f"unknown phase kind {self.kind!r}")
        if self.kind == "linear" and int(self.k0) != self.k0:
            raise ValueError("linear phase needs an integer K0")
        if self.kind == "quadratic" and (self.gamma == 0 or not math.isfinite(self.gamma)):
            raise ValueError("quadratic phase needs a finite nonzero gamma")

    @classmethod
    def parse(cls, text: str | None) -> "PhaseSpec":
        """``none``/``zero``, ``linear:K0`` or ``quadratic:G``."""
        if text is None or text.strip().lower() in ("", "none", "zero"):
            return cls()
        kind, _, arg = text.partition(":")
        kind = kind.strip().lower()
        if kind == "linear":
            return cls("linear", k0=int(arg))
        if kind == "quadratic":
            return cls("quadratic", gamma=float(arg))
        raise ValueError(f"unknown phase '{text}'")

    @property
    def periodic(self) -> bool:
        return self.kind != "quadratic"

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        if self.kind == "linear":
            return self.k0 * p
        if self.kind == "quadratic":
            return self.gamma * p * p
        return np.zeros_like(p)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "k0": self.k0, "gamma": self.gamma}


@dataclass(frozen=True)
class CWeights:
    """c_s for |s| <= s_max, stored in ``values[s + s_max]``."""

    s_max: int
    values: np.ndarray
    phase: PhaseSpec = PhaseSpec()
    tail: float = 0.0
    tail_ok: bool = True
    grid_points: int = 0
    converged: bool = True
    method: str = "quadrature"

    def __getitem__(self, s: int) -> complex:
        return complex(self.values[s + self.s_max]) if abs(s) <= self.s_max else 0j

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.s_max, self.s_max + 1)

    def as_sequence(self) -> TruncatedSequence:
        flag = "exact" if self.method == "exact" else ("threshold" if self.tail_ok else "cap")
        return TruncatedSequence(-self.s_max, np.asarray(self.values), flag)

    def symbol(self, theta):
        """K(theta) = sum_s c_s exp(i theta s)."""
        from .relevance import _trig_sum

        return _trig_sum(np.asarray(self.values, dtype=complex), self.indices, theta)

    def to_dict(self) -> dict:
        return {"s_max": self.s_max, "phase": self.phase.to_dict(), "tail": self.tail, "tail_ok": self.tail_ok,
                "grid_points": self.grid_points, "converged": self.converged, "method": self.method,
                "values": [{"s": int(s), "re": float(v.real), "im": float(v.imag)}
                           for s, v in zip(self.indices, self.values)]}


def _check_positive(series: SpectralSeries, pos_tol: float):
    if not series.min_value > pos_tol:
        raise PositivityError(
            f"S(0,p) minimum {series.min_value:.3e} at p={series.min_location:.6f} is not above {pos_tol:g}; "
            "the integral defining the synthesis weights diverges",
            series.min_value, series.min_location)


def _constant(series: SpectralSeries) -> bool:
    c = np.asarray(series.coeffs)
    t0 = abs(c[series.radius])
    others = np.delete(c, series.radius)
    return bool(np.all(np.abs(others) <= 1e-14 * t0))


def _trapezoid_coeffs(g_of_grid, s_max, periodic, n0, n_limit, tol):
    """Fourier coefficients of g on [0, 2 pi) by grid doubling."""
    s = np.arange(-s_max, s_max + 1)
    prev = None
    n = n0
    while True:
        p = 2 * np.pi * np.arange(n) / n
        g = g_of_grid(p)
        if not periodic:
            # endpoint-corrected trapezoid for a non-periodic integrand
            g = g.copy()
            g[0] = 0.5 * (g[0] + g_of_grid(np.array([2 * np.pi]))[0])
        coef = np.fft.fft(g) / n
        cur = coef[s % n]
        if prev is not None:
            diff = float(np.max(np.abs(cur - prev)))
            if diff <= tol:
                return cur, n, True
            if 2 * n > n_limit:
                return cur, n, False
        prev = cur
        n *= 2


def c_weights(series: SpectralSeries, phase: PhaseSpec | None = None, s_max: int | None = 16, *,
              pos_tol: float = 1e-8, c_tail_tol: float = 1e-10, agree_tol: float = 1e-12,
              max_grid: int = 1 << 22, s_cap: int = 4096) -> CWeights:
    """Synthesis weights c_s, |s| <= s_max, by trapezoidal quadrature.

    The grid has at least max(4096, 16 s_max) points and is doubled until
    two successive grids agree within ``agree_tol`` on every coefficient.
    A constant series with a periodic phase has the exact answer
    c_s = delta_{s,K0} / sqrt(T_0), returned without quadrature.

    ``s_max=None`` starts at 16 and doubles until the outermost weights drop
    below ``c_tail_tol`` or ``s_cap`` is reached.

    Raises
    ------
    PositivityError
        When ``series.min_value <= pos_tol``.
    """
    phase = phase or PhaseSpec()
    if s_max is None:
        trial = 16
        if phase.kind == "linear":
            trial = max(trial, 2 * abs(phase.k0))
        while True:
            c = c_weights(series, phase, trial, pos_tol=pos_tol, c_tail_tol=c_tail_tol, agree_tol=agree_tol,
                          max_grid=max_grid)
            if c.tail_ok or trial >= s_cap:
                return c
            trial = min(2 * trial, s_cap)
    if s_max < 0:
        raise ValueError("s_max must be non-negative")
    _check_positive(series, pos_tol)
    t0 = float(series.coefficient(0).real)
    if phase.periodic and _constant(series):
        vals = np.zeros(2 * s_max + 1, dtype=complex)
        k = phase.k0 if phase.kind == "linear" else 0
        if abs(k) <= s_max:
            vals[k + s_max] = 1.0 / math.sqrt(t0)
        return CWeights(s_max, vals, phase, tail=0.0, tail_ok=True, grid_points=0, converged=True, method="exact")

    def g_grid(p):
        if p.size > 1 and np.allclose(p, 2 * np.pi * np.arange(p.size) / p.size):
            sval = series.on_grid(p.size).real
        else:
            sval = series(p)
        return np.exp(1j * phase(p)) / np.sqrt(sval)

    n0 = max(4096, 16 * s_max)
    n0 = 1 << (n0 - 1).bit_length()
    vals, n, conv = _trapezoid_coeffs(g_grid, s_max, phase.periodic, n0, max_grid, agree_tol)
    if phase.kind == "zero":
        vals = 0.5 * (vals + np.conj(vals[::-1]))
    tail = float(max(abs(vals[0]), abs(vals[-1]))) if s_max > 0 else 0.0
    return CWeights(s_max, vals, phase, tail=tail, tail_ok=tail < c_tail_tol, grid_points=n, converged=conv)


def expansion_weights(series: SpectralSeries, order: int = 0) -> CWeights:
    """Perturbative weights from 1/sqrt(T_0 + D(p)) with D the off-centre part.

    ``order=0`` is the crude c_s = delta_{s,0}/sqrt(T_0); ``order=1`` adds
    -D_s / (2 T_0^{3/2}), i.e. c_{+-r} picks up -T_r / (2 T_0^{3/2}).
    """
    t0 = float(series.coefficient(0).real)
    R = series.radius if order >= 1 else 0
    vals = np.zeros(2 * R + 1, dtype=complex)
    vals[R] = 1.0 / math.sqrt(t0)
    if order >= 1:
        for r in range(-R, R + 1):
            if r != 0:
                vals[r + R] -= series.coefficient(r) / (2.0 * t0**1.5)
    if order > 1:
        raise ValueError("only orders 0 and 1 are provided")
    return CWeights(R, vals, PhaseSpec(), tail=0.0, tail_ok=True, grid_points=0, converged=True,
                    method=f"expansion-{order}")


# ---------------------------------------------------------------------------
# 2D weights


@dataclass(frozen=True)
class SynthesisWeights2D:
    """f_l for |l1|, |l2| <= radius in ``values[l1 + R, l2 + R]``."""

    radius: int
    values: np.ndarray
    phase: PhaseSpec = PhaseSpec()
    grid_points: int = 0

    def __getitem__(self, idx) -> complex:
        l1, l2 = idx
        R = self.radius
        if abs(l1) > R or abs(l2) > R:
            return 0j
        return complex(self.values[l1 + R, l2 + R])

    def column_sums(self) -> np.ndarray:
        """sum over l1 of f_{l1, l2}, indexed by l2 + R."""
        return self.values.sum(axis=0)

    def to_dict(self) -> dict:
        R = self.radius
        return {"radius": R, "phase": self.phase.to_dict(), "grid_points": self.grid_points,
                "entries": [{"l1": int(i - R), "l2": int(j - R), "re": float(v.real), "im": float(v.imag)}
                            for (i, j), v in np.ndenumerate(self.values)]}


def spectrum_2d(table: OverlapTable, n: int) -> np.ndarray:
    """S(p1, p2) = sum_l S_l exp(i p.l) on the n x n grid p_j = 2 pi j / n."""
    R = table.radius
    buf = np.zeros((n, n), dtype=complex)
    idx = np.arange(-R, R + 1) % n
    np.add.at(buf, (idx[:, None], idx[None, :]), table.values)
    return np.fft.ifft2(buf) * n * n


def _spectrum_2d_at(table: OverlapTable, p):
    """S(p1, p2) at a single point, real part."""
    idx = table.indices
    return float(np.real(np.exp(1j * p[0] * idx) @ table.values @ np.exp(1j * p[1] * idx)))


def _certified_min_2d(table: OverlapTable, spec: np.ndarray) -> float:
    """Grid minimum refined locally, and the refined minimum on p1 = 0.

    Zeros that fall between grid nodes would otherwise pass unnoticed.
    """
    n = spec.shape[0]
    i, j = np.unravel_index(int(np.argmin(spec)), spec.shape)
    x0 = 2 * np.pi * np.array([i, j]) / n
    h = 2 * np.pi / n
    res = optimize.minimize(lambda p: _spectrum_2d_at(table, p), x0, method="L-BFGS-B",
                            bounds=[(x0[0] - h, x0[0] + h), (x0[1] - h, x0[1] + h)])
    line = spectral_series(table).min_value
    return float(min(spec.min(), res.fun, line))


def f_weights(table: OverlapTable, phase: PhaseSpec | None = None, radius: int = 8, *, pos_tol: float = 1e-8,
              agree_tol: float = 1e-12, max_grid: int = 4096) -> SynthesisWeights2D:
    """2D weights f_l by the tensor trapezoid rule with grid doubling.

    The phase acts on the second variable only, phi(p1, p2) = phi(0, p2).
    """
    phase = phase or PhaseSpec()
    if not phase.periodic:
        raise ValueError("2D weights are only defined for periodic phases")
    l_idx = np.arange(-radius, radius + 1)
    n = max(64, 1 << (4 * (2 * max(radius, table.radius) + 1) - 1).bit_length())
    prev = None
    while True:
        spec = spectrum_2d(table, n).real
        smin = _certified_min_2d(table, spec) if prev is None else float(spec.min())
        if not smin > pos_tol:
            raise PositivityError(f"S(p1,p2) minimum {smin:.3e} is not above {pos_tol:g}", smin)
        p = 2 * np.pi * np.arange(n) / n
        g = np.exp(1j * phase(p))[None, :] / np.sqrt(spec)
        coef = np.fft.fft2(g) / (n * n)
        cur = coef[np.ix_(l_idx % n, l_idx % n)]
        if prev is not None and (np.max(np.abs(cur - prev)) <= agree_tol or 2 * n > max_grid):
            break
        prev = cur
        n *= 2
    if phase.kind == "zero":
        cur = 0.5 * (cur + np.conj(cur[::-1, ::-1]))
    return SynthesisWeights2D(radius, cur, phase, grid_points=n)


# ---------------------------------------------------------------------------
# filter coefficients


@dataclass(frozen=True)
class FilterSequence:
    """H_n on ``n_min..n_max``; ``meta`` records truncation and provenance."""

    n_min: int
    values: np.ndarray
    tail_flag: str = "exact"
    meta: dict = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return self.n_min + len(self.values) - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def __getitem__(self, n: int) -> complex:
        j = n - self.n_min
        return complex(self.values[j]) if 0 <= j < len(self.values) else 0j

    def as_sequence(self) -> TruncatedSequence:
        return TruncatedSequence(self.n_min, np.asarray(self.values), self.tail_flag)

    def trimmed(self, eps: float = 0.0) -> "FilterSequence":
        """Drop leading/trailing entries with modulus <= eps."""
        nz = np.nonzero(np.abs(self.values) > eps)[0]
        if nz.size == 0:
            return FilterSequence(0, np.zeros(1, dtype=complex), self.tail_flag, dict(self.meta))
        return FilterSequence(self.n_min + int(nz[0]), self.values[nz[0]: nz[-1] + 1], self.tail_flag,
                              dict(self.meta))

    def to_dict(self) -> dict:
        return {"n_min": self.n_min, "n_max": self.n_max, "tail_flag": self.tail_flag, "meta": self.meta,
                "values": [{"n": int(n), "re": float(v.real), "im": float(v.imag)}
                           for n, v in zip(self.indices, self.values)]}


def _filter_on_range(seed, c: CWeights, n_lo, n_hi):
    n = np.arange(n_lo, n_hi + 1)
    out = np.zeros(n.size, dtype=complex)
    for s, cs in zip(c.indices, np.asarray(c.values, dtype=complex)):
        if cs != 0:
            out += cs * np.asarray(seed.lattice(n + 2 * s), dtype=complex)
    return SQRT_A * out


def _support_range(seed, c: CWeights):
    """Exact index range of H_n when hat_h has compact support."""
    lo, hi = seed.momentum_support
    nz = np.nonzero(np.asarray(c.values) != 0)[0]
    s_lo, s_hi = int(c.indices[nz[0]]), int(c.indices[nz[-1]])
    m_lo = math.floor(lo / A) - 1
    m_hi = math.ceil(hi / A) + 1
    return m_lo - 2 * s_hi, m_hi - 2 * s_lo


def filter_coefficients(seed: SeedFunction, c: CWeights, n_range: tuple[int, int] | None = None, *,
                        n_cap: int = 512, threshold: float = 1e-12) -> FilterSequence:
    """H_n = sqrt(a) sum_s c_s hat_h((n + 2 s) a).

    With ``n_range`` given the sequence is evaluated there verbatim.
    Otherwise a compactly supported hat_h yields the exact support; for
    unbounded support the window grows around the peak until the entries at
    both ends are below ``threshold`` or |n| reaches ``n_cap``.
    """
    meta = {"seed": seed.descriptor(), "phase": c.phase.to_dict(), "s_max": c.s_max, "c_method": c.method,
            "c_tail_ok": c.tail_ok, "n_cap": n_cap, "threshold": threshold}
    if n_range is not None:
        lo, hi = n_range
        vals = _filter_on_range(seed, c, lo, hi)
        return FilterSequence(lo, vals, "threshold", meta)

    compact_c = c.method == "exact" or np.count_nonzero(c.values) == 0
    if seed.compact_momentum:
        lo, hi = _support_range(seed, c)
        vals = _filter_on_range(seed, c, lo, hi)
        flag = "exact" if compact_c else "threshold"
        out = FilterSequence(lo, vals, flag, meta)
        out = out.trimmed(0.0) if flag == "exact" else out
        return out

    half = 16
    centre = -2 * int(c.indices[int(np.argmax(np.abs(c.values)))])
    while True:
        lo, hi = max(-n_cap, centre - half), min(n_cap, centre + half)
        vals = _filter_on_range(seed, c, lo, hi)
        # look at a few entries per end: some seeds sample to exact zeros on one parity
        ends_small = bool(np.all(np.abs(vals[:4]) < threshold) and np.all(np.abs(vals[-4:]) < threshold))
        at_cap = lo == -n_cap and hi == n_cap
        if ends_small:
            flag = "threshold"
            break
        if at_cap:
            flag = "cap"
            break
        half *= 2
    meta["cap_hit"] = flag == "cap"
    return FilterSequence(lo, vals, flag, meta)


def filter_via_convolution(seed: SeedFunction, c: CWeights, n_range: tuple[int, int] | None = None,
                           **kwargs) -> FilterSequence:
    """Same H_n assembled as sqrt(a) (cbar * hat_h^{even/odd}), cbar_s = c_{-s}.

    The even (odd) lattice subsequence hat_h(2ka) (hat_h((2k+1)a)) is sampled
    wide enough for every output index in ``n_range``.  Without ``n_range``
    the index window chosen by :func:`filter_coefficients` is reused.
    """
    if n_range is None:
        ref = filter_coefficients(seed, c, **kwargs)
        n_range = (ref.n_min, ref.n_max)
    lo, hi = n_range
    s_lo, s_hi = -c.s_max, c.s_max
    cbar = TruncatedSequence(-s_hi, np.asarray(c.values, dtype=complex)[::-1])
    out = np.zeros(hi - lo + 1, dtype=complex)
    for parity in (0, 1):
        # output H_{2j+parity} = sqrt(a) sum_k cbar_{j-k} hat_h((2k+parity) a)
        j_lo = math.ceil((lo - parity) / 2)
        j_hi = math.floor((hi - parity) / 2)
        if j_hi < j_lo:
            continue
        k_lo, k_hi = j_lo + s_lo, j_hi + s_hi
        k = np.arange(k_lo, k_hi + 1)
        samples = TruncatedSequence(k_lo, np.asarray(seed.lattice(2 * k + parity), dtype=complex))
        conv = convolve(cbar, samples)
        j = np.arange(j_lo, j_hi + 1)
        vals = conv.values[j - conv.offset]
        out[2 * j + parity - lo] = SQRT_A * vals
    return FilterSequence(lo, out, "threshold", {"route": "convolution"})


def filter_from_f(seed: SeedFunction, f: SynthesisWeights2D, n_range: tuple[int, int]) -> FilterSequence:
    """H_n = sqrt(a) sum_l f_l hat_h((n + 2 l2) a), the 2D-weight route."""
    lo, hi = n_range
    n = np.arange(lo, hi + 1)
    colsum = f.column_sums()
    l2 = np.arange(-f.radius, f.radius + 1)
    samples = np.asarray(seed.lattice(np.add.outer(n, 2 * l2)), dtype=complex)
    return FilterSequence(lo, SQRT_A * (samples @ colsum), "threshold", {"route": "2d-weights"})


def synthesize_H(seed: SeedFunction, f: SynthesisWeights2D, P):
    """H(P) = sum_l f_l h(P - a l1) exp(-2 i a P l2), vectorized in P."""
    P = np.asarray(P, dtype=float)
    R = f.radius
    l = np.arange(-R, R + 1)
    hv = np.asarray(seed.h(np.subtract.outer(P, A * l)), dtype=complex)  # (..., l1)
    mod = np.exp(-2j * A * np.multiply.outer(P, l))  # (..., l2)
    return np.einsum("...i,ij,...j->...", hv, f.values, mod)


def onc_residual(seed: SeedFunction, f: SynthesisWeights2D, l1: int, l2: int, *, half_width: float | None = None,
                 epsabs: float = 1e-11) -> complex:
    """int H(P) conj(H(P - a l1)) exp(-2 i a P l2) dP minus delta_{l,0}.

    The integral runs over ``[-half_width, half_width]`` around the support
    centre, split at every lattice point so each panel is smooth.
    """
    lo_s, hi_s = seed.position_support
    R = f.radius
    if half_width is None:
        half_width = (R + abs(l1) + 1) * A + 2 * seed.position_core
    if math.isinf(lo_s):
        lo, hi = -half_width, half_width
    else:
        lo = lo_s - (R + abs(l1) + 1) * A
        hi = hi_s + (R + abs(l1) + 1) * A
    knots = np.arange(math.floor(lo / A), math.ceil(hi / A) + 1) * A
    knots = np.unique(np.concatenate([knots, knots + A / 2, [lo, hi]]))
    knots = knots[(knots >= lo) & (knots <= hi)]

    def integrand(P, part):
        v = synthesize_H(seed, f, P) * np.conj(synthesize_H(seed, f, P - A * l1)) * np.exp(-2j * A * P * l2)
        return float(v.real if part == 0 else v.imag)

    total = 0j
    err = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        for part in (0, 1):
            v, e = integrate.quad(integrand, a, b, args=(part,), epsabs=epsabs, epsrel=1e-10, limit=200)
            total += v if part == 0 else 1j * v
            err += e
    if err > 1e-7:
        raise IntegrationError(f"ONC integral for l=({l1},{l2}) did not converge", err)
    return total - (1.0 if (l1, l2) == (0, 0) else 0.0)
