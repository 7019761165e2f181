"""Truncated bi-infinite sequences: convolution, l_p norms and empirical
decay classification into finite-support, rapidly decreasing and
polynomially decaying classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FINITE = "FiniteSupport"
SUPERPOLY = "Superpolynomial"
POLY = "Polynomial"
UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class TruncatedSequence:
    """Entries ``values[j]`` at indices ``offset + j``; zero elsewhere.

    ``tail_flag`` records why storage stops: ``'exact'`` (true support),
    ``'threshold'`` (entries fell below a magnitude threshold) or ``'cap'``
    (hard length cap hit while entries were still significant).
    """

    offset: int
    values: np.ndarray
    tail_flag: str = "exact"

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1:
            raise ValueError("sequence values must be one-dimensional")
        if self.tail_flag not in ("exact", "threshold", "cap"):
            raise ValueError(f"unknown tail flag {self.tail_flag!r}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "offset", int(self.offset))

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.values))

    @property
    def n_min(self) -> int:
        return self.offset

    @property
    def n_max(self) -> int:
        return self.offset + len(self.values) - 1

    def __getitem__(self, n: int):
        j = n - self.offset
        if 0 <= j < len(self.values):
            return self.values[j]
        return 0.0 * self.values[:1].sum()

    def __len__(self):
        return len(self.values)

    def scaled(self, factor) -> "TruncatedSequence":
        return TruncatedSequence(self.offset, self.values * factor, self.tail_flag)

    def shifted(self, k: int) -> "TruncatedSequence":
        """Sequence n -> x_{n-k}, i.e. support moved right by ``k``."""
        return TruncatedSequence(self.offset + k, self.values.copy(), self.tail_flag)

    def reversed(self) -> "TruncatedSequence":
        """Sequence n -> x_{-n}."""
        return TruncatedSequence(-self.n_max, self.values[::-1].copy(), self.tail_flag)


_FLAG_RANK = {"exact": 0, "threshold": 1, "cap": 2}


def _weaker(f1, f2):
    return f1 if _FLAG_RANK[f1] >= _FLAG_RANK[f2] else f2


def convolve(x: TruncatedSequence, y: TruncatedSequence) -> TruncatedSequence:
    """(x*y)_n = sum_s x_s y_{n-s} over the stored supports.

    The operands are put in a canonical order first so that swapping them
    gives bit-identical output, not merely equal up to rounding.
    """
    if (len(y.values), y.offset, y.values.tobytes()) > (len(x.values), x.offset, x.values.tobytes()):
        x, y = y, x
    vals = np.convolve(x.values, y.values)
    return TruncatedSequence(x.offset + y.offset, vals, _weaker(x.tail_flag, y.tail_flag))


def lp_norm(x: TruncatedSequence, p: float) -> float:
    """(sum |x_n|^p)^(1/p) over the stored support; ``p = inf`` gives the max."""
    if not p >= 1:
        raise ValueError("p must be >= 1")
    mags = np.abs(x.values)
    if math.isinf(p):
        return float(mags.max()) if mags.size else 0.0
    return float(np.sum(mags**p) ** (1.0 / p))


@dataclass(frozen=True)
class DecayClass:
    """Empirical decay verdict.  ``exponent`` and ``r2`` only for Polynomial."""

    kind: str
    exponent: float | None = None
    r2: float | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "exponent": self.exponent, "r2": self.r2, "diagnostics": self.diagnostics}

    def __str__(self):
        if self.kind == POLY:
            return f"Polynomial({self.exponent:.3f}, r2={self.r2:.4f})"
        return self.kind


def _fit(logd, logv):
    slope, icpt = np.polyfit(logd, logv, 1)
    resid = logv - (slope * logd + icpt)
    ss_tot = float(np.sum((logv - logv.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def classify_decay(x: TruncatedSequence, floor: float = 1e-13, min_points: int = 8) -> DecayClass:
    """Classify the tail of ``x`` from its stored entries.

    Distances are measured from the index of the largest entry.  Entries
    below ``floor`` times that maximum are treated as rounding noise.  The
    log-log regression of |x| against distance runs over the outer half of
    the significant support, excluding distances below 4.  Thresholds:

    * ``tail_flag == 'exact'`` with at most ``min_points`` nonzero entries,
      or any exact support, gives FiniteSupport.
    * slope <= -12, or an outer-half slope at least 1.25 times steeper than the
      inner half and below -4 (concave log-log curve), gives Superpolynomial.
    * if the sequence drops below the floor within so few steps that no
      polynomial of degree under 12 could do so, Superpolynomial as well.
    * coefficient of determination r2 < 0.9 gives Undetermined, otherwise
      Polynomial(-slope).
    """
    vals = np.abs(np.asarray(x.values))
    if vals.size == 0 or not np.any(vals > 0):
        return DecayClass(FINITE, diagnostics={"reason": "all zero"})
    if x.tail_flag == "exact":
        return DecayClass(FINITE, diagnostics={"support": [x.n_min, x.n_max]})
    peak = int(np.argmax(vals))
    vmax = vals[peak]
    dist = np.abs(np.arange(vals.size) - peak)
    significant = vals > floor * vmax
    d_sig = int(dist[significant].max())
    d_all = int(dist.max())
    diag = {"peak_index": x.offset + peak, "significant_extent": d_sig, "stored_extent": d_all}

    lo_d = max(4, d_sig // 2)
    sel = significant & (dist >= lo_d) & (dist >= 1)
    n_pts = int(sel.sum())
    diag["window"] = [lo_d, d_sig]
    diag["points"] = n_pts
    if n_pts < min_points:
        # sharp cut-off: values collapse under the floor well inside the stored range
        if d_all > d_sig:
            p_eff = math.log(1.0 / floor) / math.log(d_sig + 1.0) if d_sig > 0 else math.inf
            diag["effective_exponent"] = p_eff
            if p_eff >= 12:
                return DecayClass(SUPERPOLY, diagnostics=diag)
        return DecayClass(UNDETERMINED, diagnostics=diag)

    logd = np.log(dist[sel].astype(float))
    logv = np.log(vals[sel] / vmax)
    slope, r2 = _fit(logd, logv)
    diag["slope"] = slope
    if slope <= -12:
        return DecayClass(SUPERPOLY, diagnostics=diag)
    # curvature test: compare the inner and outer halves of the window
    mid = 0.5 * (logd.min() + logd.max())
    inner, outer = logd <= mid, logd >= mid
    if inner.sum() >= 3 and outer.sum() >= 3:
        s_in, _ = _fit(logd[inner], logv[inner])
        s_out, _ = _fit(logd[outer], logv[outer])
        diag["slope_inner"], diag["slope_outer"] = s_in, s_out
        if s_out <= -4 and s_in < 0 and s_out / s_in >= 1.25:
            return DecayClass(SUPERPOLY, diagnostics=diag)
    if r2 < 0.9:
        return DecayClass(UNDETERMINED, r2=r2, diagnostics=diag)
    return DecayClass(POLY, exponent=-slope, r2=r2, diagnostics=diag)


def convolution_class(x_class: DecayClass, y_class: DecayClass) -> DecayClass:
    """Predicted class of x*y from the classes of the factors.

    Finite support convolved with anything keeps the other factor's class;
    two rapidly decreasing factors stay rapidly decreasing; otherwise the
    slower polynomial exponent wins.  When both exponents are at most 1 the
    factors need not be summable and no prediction is made.
    """
    kinds = (x_class.kind, y_class.kind)
    if UNDETERMINED in kinds:
        return DecayClass(UNDETERMINED, diagnostics={"reason": "undetermined input"})
    if x_class.kind == FINITE:
        return y_class
    if y_class.kind == FINITE:
        return x_class
    if kinds == (SUPERPOLY, SUPERPOLY):
        return DecayClass(SUPERPOLY)
    exps = [c.exponent for c in (x_class, y_class) if c.kind == POLY]
    if len(exps) == 2 and max(exps) <= 1.0:
        return DecayClass(UNDETERMINED, diagnostics={"reason": "neither factor summable"})
    return DecayClass(POLY, exponent=min(exps), r2=None, diagnostics={"predicted": True})
