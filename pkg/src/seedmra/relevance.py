"""Checks that a filter sequence is a relevant sequence for a multi-resolution
analysis, plus the lattice-sample criteria that predict the sum condition.

The four conditions on ``H_n``:

* orthonormality ``sum_n H_n conj(H_{n+2l}) = delta_{l,0}``;
* decay ``H_n = O(1/(1 + n^2))``;
* normalization ``sum_n H_n = sqrt(2)``;
* the symbol ``H(omega) = 2^{-1/2} sum_n H_n exp(-i omega n)`` has no zero
  on ``[-pi/2, pi/2]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .overlap import OverlapTable, SpectralSeries
from .seed import A, SeedFunction
from .seqtools import FINITE, POLY, SUPERPOLY, UNDETERMINED, DecayClass, classify_decay
from .synthesis import CWeights, FilterSequence

SQRT2 = math.sqrt(2.0)


class InsufficientTail(RuntimeError):
    """The stored filter is too short to measure its decay."""


@dataclass(frozen=True)
class Tolerances:
    r1: float = 1e-6
    r3: float = 1e-6
    r4: float = 1e-6
    pos: float = 1e-8
    r2_exponent: float = 2.0 - 0.1

    def to_dict(self) -> dict:
        return {"r1": self.r1, "r3": self.r3, "r4": self.r4, "pos": self.pos, "r2_exponent": self.r2_exponent}


def _shift_product(values: np.ndarray, shift: int) -> complex:
    """sum_n x_n conj(x_{n + shift}) over the stored support."""
    n = len(values)
    if abs(shift) >= n:
        return 0j
    if shift >= 0:
        return complex(np.sum(values[: n - shift] * np.conj(values[shift:])))
    return complex(np.sum(values[-shift:] * np.conj(values[: n + shift])))


def check_r1(H: FilterSequence, l_max: int = 5) -> dict[int, float]:
    """|sum_n H_n conj(H_{n+2l}) - delta_{l,0}| for |l| <= l_max."""
    vals = np.asarray(H.values, dtype=complex)
    return {l: abs(_shift_product(vals, 2 * l) - (1.0 if l == 0 else 0.0)) for l in range(-l_max, l_max + 1)}


def check_r2(H: FilterSequence, tol: Tolerances = Tolerances(), strict_tail: bool = False):
    """Decay verdict: True, False or None (undetermined), with the class.

    Raises
    ------
    InsufficientTail
        Only with ``strict_tail`` and when the truncation cap was hit before
        a decay rate could be measured.
    """
    cls = classify_decay(H.as_sequence())
    if cls.kind in (FINITE, SUPERPOLY):
        return True, cls
    if cls.kind == POLY:
        return bool(cls.exponent >= tol.r2_exponent), cls
    if strict_tail and H.tail_flag == "cap":
        raise InsufficientTail("filter truncated at the cap before its decay could be measured")
    return None, cls


def check_r3(H: FilterSequence, tol: Tolerances = Tolerances()):
    """(sum H_n, |sum - sqrt 2|, verdict)."""
    total = complex(np.sum(H.values))
    res = abs(total - SQRT2)
    return total, res, res < tol.r3


@dataclass
class CriterionResult:
    lhs: complex
    rhs: float
    s0: float
    residual: float
    verdict: bool

    def to_dict(self) -> dict:
        return {"lhs_re": self.lhs.real, "lhs_im": self.lhs.imag, "rhs": self.rhs, "s0_full": self.s0,
                "residual": self.residual, "verdict": self.verdict}


def lattice_sum(seed: SeedFunction, n_terms: int = 1 << 17, alternating: bool = False) -> complex:
    """sum_n hat_h(n a), or sum_n (-1)^n hat_h(n a), over the support window."""
    lo, hi = seed.momentum_support
    if math.isinf(lo) or math.isinf(hi):
        m = np.arange(-n_terms, n_terms + 1)
    else:
        m = np.arange(math.floor(lo / A) - 1, math.ceil(hi / A) + 2)
    x = np.asarray(seed.lattice(m), dtype=complex)
    if alternating:
        x = np.where(m % 2 == 0, x, -x)
    # sum smallest terms first to limit rounding in long tails
    order = np.argsort(np.abs(x))
    return complex(np.sum(x[order]))


def criterion_r3(seed: SeedFunction, series: SpectralSeries | None, table: OverlapTable,
                 tol: float = 1e-6, n_terms: int = 1 << 17) -> CriterionResult:
    """Compare sum_n hat_h(n a) with sqrt(2 S(0) / a), S(0) the full overlap sum.

    A filter has sum sqrt(2) exactly when these agree (given positivity and
    the lattice-sum identities for the seed).
    """
    lhs = lattice_sum(seed, n_terms)
    s0 = float(table.total().real)
    rhs = math.sqrt(2.0 * s0 / A) if s0 > 0 else float("nan")
    res = abs(lhs - rhs)
    return CriterionResult(lhs, rhs, s0, res, bool(res < tol))


@dataclass
class CorollaryResult:
    double_sum: complex
    alternating_sum: complex
    identity_residual: float
    necessary_ok: bool
    compact: bool

    def to_dict(self) -> dict:
        return {"double_sum_re": self.double_sum.real, "double_sum_im": self.double_sum.imag,
                "alternating_re": self.alternating_sum.real, "alternating_im": self.alternating_sum.imag,
                "identity_residual": self.identity_residual, "necessary_ok": self.necessary_ok,
                "compact": self.compact}


def corollary_check(seed: SeedFunction, tol: float = 1e-6, n_terms: int = 4096) -> CorollaryResult:
    """Evaluate sum_{n,m} hat_h(na) conj(hat_h(ma) - 2 hat_h((n-2m)a)).

    For compactly supported hat_h this double sum equals
    -|sum_n (-1)^n hat_h(na)|^2, so the vanishing of the alternating sum
    is a necessary condition for the sum rule.  The double sum is computed
    term by term; the alternating sum separately.
    """
    lo, hi = seed.momentum_support
    compact = seed.compact_momentum
    if compact:
        m = np.arange(math.floor(lo / A) - 1, math.ceil(hi / A) + 2)
    else:
        m = np.arange(-n_terms, n_terms + 1)
    x = np.asarray(seed.lattice(m), dtype=complex)
    idx = {int(k): j for j, k in enumerate(m)}
    support = [int(k) for k, v in zip(m, x) if v != 0]
    total_x = np.sum(x)
    dsum = 0j
    # sum_{n,m} x_n conj(x_m) = |sum x|^2, then subtract the shifted part term by term
    dsum += abs(total_x) ** 2
    if compact:
        for n in support:
            xn = x[idx[n]]
            # m with n - 2m inside the support
            for k in support:
                if (n - k) % 2 == 0:
                    dsum -= 2 * xn * np.conj(x[idx[k]])
    else:
        even = np.sum(x[m % 2 == 0])
        odd = np.sum(x[m % 2 == 1])
        dsum -= 2 * (abs(even) ** 2 + abs(odd) ** 2)
    alt = lattice_sum(seed, n_terms, alternating=True) if not compact else complex(
        np.sum(np.where(m % 2 == 0, x, -x)))
    ident = abs(dsum + abs(alt) ** 2)
    return CorollaryResult(complex(dsum), alt, float(ident), bool(abs(alt) < tol), compact)


def filter_symbol(H: FilterSequence, omega):
    """H(omega) = 2^{-1/2} sum_n H_n exp(-i omega n)."""
    return _trig_sum(np.asarray(H.values, dtype=complex), H.indices, -np.asarray(omega, dtype=float)) / SQRT2


def _trig_sum(x, n, theta, block: int = 1 << 22):
    """sum_n x_n exp(i theta n), evaluated in blocks of theta to bound memory."""
    theta = np.asarray(theta, dtype=float)
    flat = theta.reshape(-1)
    out = np.empty(flat.size, dtype=complex)
    step = max(1, block // max(1, len(n)))
    for i in range(0, flat.size, step):
        out[i: i + step] = np.exp(1j * np.multiply.outer(flat[i: i + step], n)) @ x
    return out.reshape(theta.shape)


def _symbol_on_half_band(H: FilterSequence, grid_size: int):
    """H(omega_j) for omega_j = -pi/2 + j pi/(grid_size - 1) through one FFT.

    These points lie on the DFT grid of length M = 2 (grid_size - 1), where
    exp(-i omega n) is M-periodic in n, so folding the filter modulo M is exact.
    """
    M = 2 * (grid_size - 1)
    buf = np.zeros(M, dtype=complex)
    np.add.at(buf, H.indices % M, np.asarray(H.values, dtype=complex))
    spec = np.fft.fft(buf)
    k = np.arange(grid_size) - (grid_size - 1) // 2
    return spec[k % M] / SQRT2


def check_r4(H: FilterSequence, grid_size: int = 4097, tol: Tolerances = Tolerances()):
    """(min |H(omega)|, argmin, verdict) over a uniform grid on [-pi/2, pi/2]."""
    w = np.linspace(-np.pi / 2, np.pi / 2, grid_size)
    if grid_size > 2 and (grid_size - 1) % 2 == 0:
        mod = np.abs(_symbol_on_half_band(H, grid_size))
    else:
        mod = np.abs(filter_symbol(H, w))
    j = int(np.argmin(mod))
    return float(mod[j]), float(w[j]), bool(mod[j] > tol.r4)


@dataclass
class FactorizationResult:
    product_residual: float
    symbol_imag: float
    branch_residual: float
    symbol_min: float

    def to_dict(self) -> dict:
        return {"product_residual": self.product_residual, "symbol_imag": self.symbol_imag,
                "branch_residual": self.branch_residual, "symbol_min": self.symbol_min}


def seed_symbol(seed: SeedFunction, omega, n_terms: int = 4096):
    """sum_n hat_h(n a) exp(i omega n) over the sample window."""
    lo, hi = seed.momentum_support
    if seed.compact_momentum:
        m = np.arange(math.floor(lo / A) - 1, math.ceil(hi / A) + 2)
    else:
        m = np.arange(-n_terms, n_terms + 1)
    x = np.asarray(seed.lattice(m), dtype=complex)
    return _trig_sum(x, m, omega)


def factorization_check(H: FilterSequence, c: CWeights, seed: SeedFunction, series: SpectralSeries | None = None,
                        grid_size: int = 513, n_terms: int = 4096) -> FactorizationResult:
    """Compare H(omega) with sqrt(a/2) K(2 omega) conj-free seed symbol at -omega.

    ``K(theta) = sum_s c_s exp(i theta s)``.  With ``series`` the symbol is
    also compared with its branch formula 1/sqrt(S(0, theta)) (zero phase).
    """
    w = np.linspace(-np.pi, np.pi, grid_size)
    direct = filter_symbol(H, w)
    K = c.symbol(2 * w)
    prod = math.sqrt(A / 2.0) * K * seed_symbol(seed, -w, n_terms)
    pres = float(np.max(np.abs(direct - prod)))
    theta = np.linspace(0, 2 * np.pi, grid_size)
    Kt = c.symbol(theta)
    imag = float(np.max(np.abs(Kt.imag)))
    if series is not None and c.phase.kind == "zero":
        bres = float(np.max(np.abs(Kt - 1.0 / np.sqrt(series(theta)))))
    else:
        bres = float("nan")
    return FactorizationResult(pres, imag, bres, float(np.min(Kt.real)))


@dataclass
class RelevanceReport:
    r1_residuals: dict
    r2_verdict: bool | None
    r2_class: DecayClass
    r3_sum: complex
    r3_residual: float
    r4_min: float
    r4_argmin: float
    tolerances: Tolerances = field(default_factory=Tolerances)
    criterion: CriterionResult | None = None
    corollary: CorollaryResult | None = None
    notes: list = field(default_factory=list)

    @property
    def r1_max(self) -> float:
        return max(self.r1_residuals.values())

    @property
    def verdicts(self) -> dict:
        return {
            "r1": self.r1_max < self.tolerances.r1,
            "r2": self.r2_verdict,
            "r3": self.r3_residual < self.tolerances.r3,
            "r4": self.r4_min > self.tolerances.r4,
        }

    def to_dict(self) -> dict:
        d = {
            "r1_residuals": {str(k): v for k, v in sorted(self.r1_residuals.items())},
            "r1_max": self.r1_max,
            "r2_class": self.r2_class.to_dict(),
            "r3_sum": [self.r3_sum.real, self.r3_sum.imag],
            "r3_residual": self.r3_residual,
            "r4_min": self.r4_min,
            "r4_argmin": self.r4_argmin,
            "tolerances": self.tolerances.to_dict(),
            "verdicts": self.verdicts,
            "notes": list(self.notes),
        }
        if self.criterion is not None:
            d["criterion"] = self.criterion.to_dict()
        if self.corollary is not None:
            d["corollary"] = self.corollary.to_dict()
        return d


def relevance_report(H: FilterSequence, tol: Tolerances = Tolerances(), *, l_max: int = 5,
                     seed: SeedFunction | None = None, table: OverlapTable | None = None,
                     series: SpectralSeries | None = None, grid_size: int = 4097) -> RelevanceReport:
    """All four conditions, plus the lattice criteria when the seed is given."""
    r1 = check_r1(H, l_max)
    r2v, r2c = check_r2(H, tol)
    total, r3res, _ = check_r3(H, tol)
    r4min, r4arg, _ = check_r4(H, grid_size, tol)
    rep = RelevanceReport(r1, r2v, r2c, total, r3res, r4min, r4arg, tol)
    if r2v is None:
        rep.notes.append("decay undetermined from the stored coefficients" +
                         (" (truncation cap hit)" if H.tail_flag == "cap" else ""))
    if seed is not None and table is not None:
        rep.criterion = criterion_r3(seed, series, table, tol.r3)
        rep.corollary = corollary_check(seed)
        if rep.criterion.verdict != rep.verdicts["r3"]:
            rep.notes.append("lattice criterion and direct sum disagree on the sum condition")
    return rep


__all__ = [
    "InsufficientTail", "Tolerances", "check_r1", "check_r2", "check_r3", "criterion_r3", "corollary_check",
    "check_r4", "factorization_check", "filter_symbol", "seed_symbol", "lattice_sum", "RelevanceReport",
    "relevance_report", "CriterionResult", "CorollaryResult", "FactorizationResult", "UNDETERMINED",
]
