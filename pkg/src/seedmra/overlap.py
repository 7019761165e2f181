"""Lattice overlaps S_{l1,l2} of a seed, the spectral series S(0, p), and the
summation-rule cross-checks built on them.

The overlap of ``h`` with its copy shifted by ``l1*a`` in position and
modulated by ``exp(-2i*l2*a*x)`` is computed either in position space or,
equivalently, in momentum space as

    S_{l1,l2} = int exp(i l1 a p) conj(hat_h(p - 2 l2 a)) hat_h(p) dp.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .quadrature import fourier_integral, panel_integral
from .seed import A, SeedFunction, Tabulated


def _workers(workers):
    if workers is not None:
        return max(1, int(workers))
    return max(1, int(os.environ.get("MRA_SEED_THREADS", "1")))


def overlap_coefficient(seed: SeedFunction, l1: int, l2: int, representation: str | None = None) -> complex:
    """One overlap integral S_{l1,l2}.

    ``representation`` forces ``'momentum'`` or ``'position'``; by default
    the seed's analytic side is used.
    """
    rep = representation or seed.side
    if rep == "momentum":
        return _momentum_overlap(seed, l1, l2)
    if rep == "position":
        return _position_overlap(seed, l1, l2)
    raise ValueError(f"unknown representation {rep!r}")


def _shifted_product_domain(support, breaks, shift):
    lo, hi = support
    lo2, hi2 = max(lo, lo + shift), min(hi, hi + shift)
    pts = sorted(set(list(breaks) + [b + shift for b in breaks] + [lo, hi, lo + shift, hi + shift]))
    return lo2, hi2, [p for p in pts if lo2 < p < hi2 and math.isfinite(p)]


def _momentum_overlap(seed, l1, l2):
    shift = 2.0 * l2 * A
    omega = l1 * A
    lo, hi, pts = _shifted_product_domain(seed.momentum_support, seed.momentum_breaks, shift)
    if hi <= lo:
        return 0j
    if isinstance(seed, Tabulated):
        knots = [lo, hi] + pts
        return panel_integral(lambda p: np.conj(seed.ft(p - shift)) * seed.ft(p), omega, knots)
    return _overlap_integral(seed.ft, seed.real_ft, omega, shift, lo, hi, pts, seed.momentum_core)


def _position_overlap(seed, l1, l2):
    shift = l1 * A
    omega = -2.0 * l2 * A
    lo, hi, pts = _shifted_product_domain(seed.position_support, seed.position_breaks, shift)
    if hi <= lo:
        return 0j
    return _overlap_integral(seed.h, seed.real_h, omega, shift, lo, hi, pts, seed.position_core)


def _overlap_integral(f, real, omega, shift, lo, hi, pts, core):
    core = core + abs(shift)
    if real:
        g = lambda t: np.real(f(t - shift) * f(t))  # noqa: E731
        val, _ = fourier_integral(g, omega, lo, hi, pts, core, vectorized=True)
        return val
    gr = lambda t: np.real(np.conj(f(t - shift)) * f(t))  # noqa: E731
    gi = lambda t: np.imag(np.conj(f(t - shift)) * f(t))  # noqa: E731
    vr, _ = fourier_integral(gr, omega, lo, hi, pts, core, vectorized=True)
    vi, _ = fourier_integral(gi, omega, lo, hi, pts, core, vectorized=True)
    return vr + 1j * vi


def _entry(args):
    seed, l1, l2 = args
    return overlap_coefficient(seed, l1, l2)


@dataclass(frozen=True)
class OverlapTable:
    """S_{l1,l2} for |l1|, |l2| <= radius; ``values[l1 + R, l2 + R]``."""

    radius: int
    values: np.ndarray
    tail_bound: float
    table_tail_tol: float = 1e-10
    seed: dict = field(default_factory=dict)

    @property
    def under_truncated(self) -> bool:
        return not self.tail_bound < self.table_tail_tol

    def __getitem__(self, idx):
        l1, l2 = idx
        R = self.radius
        if abs(l1) > R or abs(l2) > R:
            return 0j
        return complex(self.values[l1 + R, l2 + R])

    @property
    def indices(self):
        return np.arange(-self.radius, self.radius + 1)

    def total(self) -> complex:
        """Sum of all entries, i.e. the full 2D series at the origin."""
        return complex(self.values.sum())

    def to_dict(self) -> dict:
        R = self.radius
        rows = [
            {"l1": int(i - R), "l2": int(j - R), "re": float(v.real), "im": float(v.imag)}
            for (i, j), v in np.ndenumerate(self.values)
        ]
        return {"radius": R, "tail_bound": self.tail_bound, "under_truncated": self.under_truncated,
                "seed": self.seed, "entries": rows}


def overlap_table(seed: SeedFunction, radius: int = 8, *, table_tail_tol: float = 1e-10,
                  workers: int | None = None) -> OverlapTable:
    """All overlaps with |l1|, |l2| <= radius.

    Half the entries are integrated; the rest follow from
    S_{-l} = conj(S_l).  ``workers`` (or ``MRA_SEED_THREADS``) > 1 spreads the
    integrals over processes; assembly order is fixed, so results do not
    depend on scheduling.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    R = radius
    tasks = [(seed, l1, l2) for l1 in range(0, R + 1) for l2 in range(-R, R + 1) if l1 > 0 or l2 >= 0]
    nw = _workers(workers)
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(_entry, tasks, chunksize=max(1, len(tasks) // (4 * nw))))
    else:
        results = [_entry(t) for t in tasks]
    vals = np.zeros((2 * R + 1, 2 * R + 1), dtype=complex)
    for (_, l1, l2), v in zip(tasks, results):
        vals[l1 + R, l2 + R] = v
        vals[-l1 + R, -l2 + R] = np.conj(v)
    vals[R, R] = vals[R, R].real
    ring = np.concatenate([vals[0, :], vals[-1, :], vals[:, 0], vals[:, -1]])
    tail = float(np.max(np.abs(ring)))
    return OverlapTable(radius=R, values=vals, tail_bound=tail, table_tail_tol=table_tail_tol,
                        seed=seed.descriptor())


@dataclass(frozen=True)
class SpectralSeries:
    """S(0, p) = sum_r T_r exp(i p r) with T_r = sum_{l1} S_{l1, r}."""

    coeffs: np.ndarray
    min_value: float
    min_location: float

    @property
    def radius(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def coefficient(self, r: int) -> complex:
        R = self.radius
        return complex(self.coeffs[r + R]) if abs(r) <= R else 0j

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        r = np.arange(-self.radius, self.radius + 1)
        return np.real(np.exp(1j * np.multiply.outer(p, r)) @ self.coeffs)

    def evaluate_complex(self, p):
        p = np.asarray(p, dtype=float)
        r = np.arange(-self.radius, self.radius + 1)
        return np.exp(1j * np.multiply.outer(p, r)) @ self.coeffs

    def on_grid(self, n: int) -> np.ndarray:
        """Values at p_j = 2 pi j / n (complex; imaginary part is rounding)."""
        R = self.radius
        if n < 2 * R + 1:
            return self.evaluate_complex(2 * np.pi * np.arange(n) / n)
        buf = np.zeros(n, dtype=complex)
        r = np.arange(-R, R + 1)
        buf[r % n] = self.coeffs
        return np.fft.ifft(buf) * n

    def positive(self, pos_tol: float = 1e-8) -> bool:
        return self.min_value > pos_tol

    def to_dict(self) -> dict:
        R = self.radius
        return {"radius": R, "min_value": self.min_value, "min_location": self.min_location,
                "coeffs": [{"r": int(r), "re": float(c.real), "im": float(c.imag)}
                           for r, c in zip(range(-R, R + 1), self.coeffs)]}


def spectral_series(table: OverlapTable, grid: int = 4096) -> SpectralSeries:
    """Collapse the table onto p1 = 0 and certify the minimum of S(0, p).

    The minimum is located on a uniform grid and refined with bounded Brent
    iterations inside the neighbouring cells.
    """
    coeffs = table.values.sum(axis=0)
    # enforce exact Hermitian pairing T_{-r} = conj(T_r)
    coeffs = 0.5 * (coeffs + np.conj(coeffs[::-1]))
    proto = SpectralSeries(coeffs=coeffs, min_value=float("nan"), min_location=float("nan"))
    vals = proto.on_grid(grid).real
    j = int(np.argmin(vals))
    h = 2 * np.pi / grid
    p0 = j * h
    res = optimize.minimize_scalar(lambda p: float(proto(p)), bounds=(p0 - h, p0 + h), method="bounded",
                                   options={"xatol": 1e-12})
    if res.fun <= vals[j]:
        pmin, vmin = float(res.x) % (2 * np.pi), float(res.fun)
    else:
        pmin, vmin = p0, float(vals[j])
    return SpectralSeries(coeffs=coeffs, min_value=vmin, min_location=pmin)


# ---------------------------------------------------------------------------
# Poisson-summation cross-checks and sum rules


@dataclass
class PSFReport:
    """Both sides of the two lattice-sum identities, per fixed index.

    ``momentum`` rows: sum over r1 of S_{r1,r2} against
    ``a * sum hat_h(a r1) conj(hat_h((r1 - 2 r2) a))``.
    ``position`` rows: sum over r2 of S_{r1,r2} against
    ``a/2 * sum h(a r2 / 2) conj(h(a (r2 - 2 r1) / 2))``.
    """

    momentum: list
    position: list
    tol: float

    @property
    def momentum_residual(self) -> float:
        return max(r["residual"] for r in self.momentum) if self.momentum else float("nan")

    @property
    def position_residual(self) -> float:
        return max(r["residual"] for r in self.position) if self.position else float("nan")

    @property
    def momentum_ok(self) -> bool:
        return self.momentum_residual < self.tol

    @property
    def position_ok(self) -> bool:
        return self.position_residual < self.tol

    def to_dict(self) -> dict:
        return {"tol": self.tol, "momentum_ok": self.momentum_ok, "position_ok": self.position_ok,
                "momentum_residual": self.momentum_residual, "position_residual": self.position_residual,
                "momentum": self.momentum, "position": self.position}


def _sample_window(support, spacing, n_terms):
    lo, hi = support
    if math.isinf(lo) or math.isinf(hi):
        return np.arange(-n_terms, n_terms + 1)
    return np.arange(math.floor(lo / spacing) - 1, math.ceil(hi / spacing) + 2)


def momentum_samples(seed: SeedFunction, n_terms: int = 1 << 20):
    """Lattice samples hat_h(m a) over the support, or |m| <= n_terms."""
    m = _sample_window(seed.momentum_support, A, n_terms)
    return m, np.asarray(seed.lattice(m), dtype=complex)


def position_samples(seed: SeedFunction, n_terms: int = 1 << 20):
    """Half-lattice samples h(m a / 2)."""
    m = _sample_window(seed.position_support, A / 2, n_terms)
    return m, np.asarray(seed.h(m * A / 2), dtype=complex)


def _lag_sum(m, x, lag):
    """sum_m x_m conj(x_{m - lag}) over the stored window."""
    n = len(x)
    if abs(lag) >= n:
        return 0j
    if lag >= 0:
        return complex(np.sum(x[lag:] * np.conj(x[: n - lag])))
    return complex(np.sum(x[: n + lag] * np.conj(x[-lag:])))


def _parity_double_sum(m, x) -> complex:
    """sum over all lags r of sum_m x_m conj(x_{m - 2r}).

    Summing the lag first leaves |sum over even m|^2 + |sum over odd m|^2.
    """
    even = np.sum(x[m % 2 == 0])
    odd = np.sum(x[m % 2 == 1])
    return complex(abs(even) ** 2 + abs(odd) ** 2)


def psf_crosscheck(seed: SeedFunction, table: OverlapTable, tol: float = 1e-6, n_terms: int = 1 << 20) -> PSFReport:
    """Compare table row/column sums with the lattice-sample sums."""
    R = table.radius
    rows_m, rows_p = [], []
    m, xm = momentum_samples(seed, n_terms)
    for r2 in range(-R, R + 1):
        lhs = complex(table.values[:, r2 + R].sum())
        rhs = A * _lag_sum(m, xm, 2 * r2)
        rows_m.append({"index": r2, "lhs_re": lhs.real, "lhs_im": lhs.imag, "rhs_re": rhs.real,
                       "rhs_im": rhs.imag, "residual": abs(lhs - rhs)})
    try:
        k, xp = position_samples(seed, n_terms)
    except Exception:  # position side unavailable (e.g. coarse tabulation)
        xp = None
    if xp is not None:
        for r1 in range(-R, R + 1):
            lhs = complex(table.values[r1 + R, :].sum())
            # sum_k h(a k/2) conj(h(a (k - 2 r1)/2))
            rhs = 0.5 * A * _lag_sum(k, xp, 2 * r1)
            rows_p.append({"index": r1, "lhs_re": lhs.real, "lhs_im": lhs.imag, "rhs_re": rhs.real,
                           "rhs_im": rhs.imag, "residual": abs(lhs - rhs)})
    return PSFReport(momentum=rows_m, position=rows_p, tol=tol)


@dataclass
class SumRule:
    name: str
    lhs: complex
    rhs: complex
    extra: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    def to_dict(self) -> dict:
        d = {"name": self.name, "lhs_re": self.lhs.real, "lhs_im": self.lhs.imag,
             "rhs_re": self.rhs.real, "rhs_im": self.rhs.imag, "residual": self.residual}
        d.update(self.extra)
        return d


def sum_rules(seed: SeedFunction, table: OverlapTable, series: SpectralSeries, cweights,
              n_terms: int = 1 << 20, psf: PSFReport | None = None) -> list[SumRule]:
    """Evaluate the five summation rules; each entry carries both sides.

    ``cweights`` is a :class:`~seedmra.synthesis.CWeights`.
    """
    psf = psf or psf_crosscheck(seed, table, n_terms=n_terms)
    rules = []
    worst_m = max(psf.momentum, key=lambda r: r["residual"])
    rules.append(SumRule("row sums vs momentum lattice", complex(worst_m["lhs_re"], worst_m["lhs_im"]),
                         complex(worst_m["rhs_re"], worst_m["rhs_im"]), {"index": worst_m["index"]}))
    if psf.position:
        worst_p = max(psf.position, key=lambda r: r["residual"])
        rules.append(SumRule("column sums vs position lattice", complex(worst_p["lhs_re"], worst_p["lhs_im"]),
                             complex(worst_p["rhs_re"], worst_p["rhs_im"]), {"index": worst_p["index"]}))

    total = table.total()
    m, xm = momentum_samples(seed, n_terms)
    mom_double = A * _parity_double_sum(m, xm)
    extra = {"momentum_double_sum": [mom_double.real, mom_double.imag],
             "series_at_zero": float(series(0.0))}
    if psf.position:
        k, xp = position_samples(seed, n_terms)
        pos_double = 0.5 * A * _parity_double_sum(k, xp)
        extra["position_double_sum"] = [pos_double.real, pos_double.imag]
    rules.append(SumRule("total of overlaps", total, mom_double, extra))

    c = np.asarray(cweights.values)
    inv, _ = integrate.quad(lambda p: 1.0 / abs(float(series(p))), 0.0, 2 * np.pi, limit=400,
                            epsabs=1e-13, epsrel=1e-12)
    rules.append(SumRule("sum |c_s|^2", complex(np.sum(np.abs(c) ** 2)), complex(inv / (2 * np.pi))))
    rules.append(SumRule("sum c_s", complex(np.sum(c)), complex(1.0 / np.sqrt(total.real))))
    return rules
