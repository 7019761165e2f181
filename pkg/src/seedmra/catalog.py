"""The nine worked seed examples with their reference values.

Each example runs the full pipeline and compares the outcome with golden
numbers.  ``claimed`` holds the verdicts stated in the original prose for
each example; where the computation disagrees with a claim the result lists
a discrepancy.  Discrepancies are findings, golden mismatches are failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .overlap import overlap_table, spectral_series
from .pipeline import PipelineResult, run_pipeline
from .relevance import Tolerances, check_r1
from .seed import A, BoxMomentum, BoxPosition, Gaussian, LorentzianFT, RaisedCosineMomentum, SeedFunction
from .seqtools import POLY, SUPERPOLY, classify_decay
from .synthesis import PositivityError, expansion_weights, filter_coefficients

SQRT2 = math.sqrt(2.0)


@dataclass
class Golden:
    name: str
    value: float
    expected: object
    tol: float | None
    passed: bool

    def to_dict(self) -> dict:
        exp = self.expected
        if isinstance(exp, (np.floating, np.integer)):
            exp = exp.item()
        return {"name": self.name, "value": _plain(self.value), "expected": _plain(exp), "tol": self.tol,
                "passed": bool(self.passed)}


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, float, str)) or v is None:
        return v
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return str(v)


def close(name, value, expected, tol) -> Golden:
    return Golden(name, float(value), float(expected), tol, bool(abs(value - expected) <= tol))


def below(name, value, bound) -> Golden:
    return Golden(name, float(value), f"< {bound:g}", bound, bool(value < bound))


def equal(name, value, expected) -> Golden:
    return Golden(name, value, expected, None, bool(value == expected))


@dataclass
class ExampleResult:
    number: int
    title: str
    goldens: list
    discrepancies: list
    verdicts: dict
    run: PipelineResult | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.goldens)

    def to_dict(self) -> dict:
        d = {"example": self.number, "title": self.title, "passed": self.passed,
             "goldens": [g.to_dict() for g in self.goldens], "discrepancies": list(self.discrepancies),
             "verdicts": {k: _plain(v) for k, v in self.verdicts.items()}, "extra": self.extra}
        if self.run is not None:
            d["run"] = self.run.to_dict()
        return d


@dataclass(frozen=True)
class ExampleSpec:
    number: int
    title: str
    make_seed: Callable[[], SeedFunction]
    radius: int
    s_max: int | None
    n_cap: int
    claimed: dict
    goldens: Callable[[PipelineResult], list]
    extras: Callable[[PipelineResult], tuple] | None = None


def _max_off(vals, center):
    v = np.abs(np.asarray(vals, dtype=complex)).copy()
    v[center] = 0.0
    return float(v.max()) if v.size else 0.0


def _filter_off(H, keep):
    return max((abs(H[n]) for n in H.indices if n not in keep), default=0.0)


def _table_delta_error(table):
    R = table.radius
    ref = np.zeros_like(table.values)
    ref[R, R] = 1.0
    return float(np.max(np.abs(table.values - ref)))


# -- per-example golden checks ---------------------------------------------


def _g1(r: PipelineResult):
    rep = r.report
    return [
        below("max |S_l - delta_l|", _table_delta_error(r.table), 1e-10),
        close("H_0", r.H[0].real, 1.0, 1e-12),
        below("max |H_n|, n != 0", _filter_off(r.H, {0}), 1e-12),
        below("max r1 residual", rep.r1_max, 1e-10),
        equal("r3 verdict", rep.verdicts["r3"], False),
        close("sum H_n", rep.r3_sum.real, 1.0, 1e-12),
    ]


def _x1(r: PipelineResult):
    notes = [f"sum H_n = {r.report.r3_sum.real:.12g}, |sum - sqrt 2| = {r.report.r3_residual:.6g}: "
             "the sum condition fails although the prose lists it as satisfied",
             f"H_0 = {r.H[0].real:.12g}, the unit-norm value; the prose prints sqrt(a) = {math.sqrt(A):.12g}"]
    return notes, {}


def _g2(r: PipelineResult):
    rep = r.report
    return [
        close("H_0", r.H[0].real, 1 / SQRT2, 1e-12),
        close("H_1", r.H[1].real, 1 / SQRT2, 1e-12),
        below("max |H_n|, n not in {0,1}", _filter_off(r.H, {0, 1}), 1e-12),
        below("max r1 residual", rep.r1_max, 1e-10),
        equal("r2 verdict", rep.r2_verdict, True),
        below("|sum H_n - sqrt 2|", rep.r3_residual, 1e-10),
        close("min |H(omega)|", rep.r4_min, math.cos(math.pi / 4), 1e-10),
    ]


def _g3(r: PipelineResult):
    rep = r.report
    return [
        below("max |T_r|, r != 0", _max_off(r.series.coeffs, r.series.radius), 1e-10),
        close("T_0", r.series.coefficient(0).real, 2.0, 1e-8),
        close("H_0", r.H[0].real, 1.0, 1e-10),
        below("max |H_n|, n != 0", _filter_off(r.H, {0}), 1e-12),
        below("max r1 residual", rep.r1_max, 1e-10),
    ]


def _g4(r: PipelineResult):
    rep = r.report
    s = r.series
    expect = {0: 1.0, 1: 1 / 3, -1: 1 / 3}
    coef_err = max(abs(s.coefficient(k) - expect.get(k, 0.0)) for k in range(-s.radius, s.radius + 1))
    return [
        below("max |T_r - closed form|", coef_err, 1e-8),
        close("min S(0,p)", s.min_value, 1 / 3, 1e-6),
        close("argmin S(0,p)", s.min_location, math.pi, 1e-4),
        below("max r1 residual", rep.r1_max, 1e-8),
        equal("c_s decay class", classify_decay(r.c.as_sequence()).kind, SUPERPOLY),
        equal("r3 verdict", rep.verdicts["r3"], False),
    ]


def _gauss_crude(r: PipelineResult):
    crude = expansion_weights(r.series, 0)
    return filter_coefficients(r.seed, crude)


def _g5(r: PipelineResult):
    rep = r.report
    Hc = _gauss_crude(r)
    r1c = check_r1(Hc, 2)
    return [
        close("T_0", r.series.coefficient(0).real, 1.4195, 5e-4),
        close("crude sum H_n^2", float(np.sum(np.abs(Hc.values) ** 2)), 0.999992, 1e-5),
        close("crude r1 residual at l=1", r1c[1], 0.00186, 2e-4),
        below("full r1 residual at l=1", rep.r1_residuals[1], 1e-7),
        close("crude sum H_n", float(np.sum(Hc.values).real), 1.0844, 1e-3),
        equal("r2 class", rep.r2_class.kind, SUPERPOLY),
        Golden("min |H(omega)|", rep.r4_min, "> 0.5", 0.5, rep.r4_min > 0.5),
    ]


def _x5(r: PipelineResult):
    Hc = _gauss_crude(r)
    crude_sum = float(np.sum(Hc.values).real)
    notes = [f"the quoted sum 1.0844 is reproduced by the crude weights ({crude_sum:.6f}); the converged weights give "
             f"{r.report.r3_sum.real:.6f}"]
    return notes, {"crude_sum": crude_sum, "full_sum": r.report.r3_sum.real}


def _g6(r: PipelineResult):
    rep = r.report
    h0, h1 = r.seed.ft(0.0), r.seed.ft(A)
    nrm = math.sqrt(abs(h0) ** 2 + abs(h1) ** 2)
    predicted = (h0 + h1) / nrm
    return [
        close("H_0", r.H[0].real, h0 / nrm, 1e-12),
        close("H_1", r.H[1].real, h1 / nrm, 1e-12),
        below("max |H_n|, n not in {0,1}", _filter_off(r.H, {0, 1}), 1e-12),
        below("max r1 residual", rep.r1_max, 1e-10),
        equal("r3 verdict matches (h0+h1)/norm == sqrt 2", rep.verdicts["r3"], bool(abs(predicted - SQRT2) < 1e-6)),
    ]


EXAMPLE7_K = 3


def _example7_closed_form(k, p):
    p = np.asarray(p, dtype=float)
    out = np.ones_like(p)
    for j in range(k):
        out += 2.0 / (2 * k + 1) * (2 * j + 1) * np.cos(p * (k - j))
    return out


def _g7(r: PipelineResult):
    rep = r.report
    k = EXAMPLE7_K
    p = np.linspace(0, 2 * np.pi, 1001)
    err = float(np.max(np.abs(r.series(p) - _example7_closed_form(k, p))))
    even_raises = False
    try:
        seed = BoxMomentum(2 * k)
        run_pipeline(seed, radius=k + 2, with_psf=False)
    except PositivityError:
        even_raises = True
    return [
        below("max |S(0,p) - closed form|", err, 1e-8),
        Golden("min S(0,p)", r.series.min_value, "> 0", 0.0, r.series.min_value > 0),
        below("max r1 residual", rep.r1_max, 1e-6),
        equal("c_s decay class", classify_decay(r.c.as_sequence()).kind, SUPERPOLY),
        equal("even width 2k raises PositivityError", even_raises, True),
    ]


def _g8(r: PipelineResult):
    rep = r.report
    d = r.seed.d
    return [
        below("max r1 residual", rep.r1_max, 1e-6),
        equal("H_n decay class", rep.r2_class.kind, POLY),
        close("H_n decay exponent", rep.r2_class.exponent if rep.r2_class.exponent is not None else float("nan"),
              1.0, 0.2),
        equal("r2 verdict", rep.r2_verdict, False),
        close("hat_h(0)", r.seed.ft(0.0).real, math.sqrt(2 * d / (2 * A)), 1e-12),
    ]


def _g9(r: PipelineResult):
    rep = r.report
    crit = rep.criterion
    return [
        below("max r1 residual", rep.r1_max, 1e-4),
        below("|criterion lhs - rhs|", crit.residual, 1e-4),
        equal("r3 verdict", rep.verdicts["r3"], True),
        equal("c_s decay class", classify_decay(r.c.as_sequence()).kind, POLY),
    ]


def _x9(r: PipelineResult):
    t = r.table
    quoted = {(1, 0): math.exp(-A), (0, 1): 1 / (1 + 2 * math.pi)}
    notes = []
    for (l1, l2), v in quoted.items():
        notes.append(f"S_({l1},{l2}) = {t[l1, l2].real:.8f}; the quoted closed form gives {v:.8f}")
    crit = r.report.criterion
    notes.append(f"lattice criterion: sum hat_h(na) = {crit.lhs.real:.8f} vs sqrt(2 S(0)/a) = {crit.rhs:.8f}; "
                 f"sum H_n = {r.report.r3_sum.real:.8f}")
    return notes, {"S_1_0": t[1, 0].real, "S_0_1": t[0, 1].real}


EXAMPLES: dict[int, ExampleSpec] = {
    1: ExampleSpec(1, "unit momentum box [0, a)", lambda: BoxMomentum(1), 2, 4, 512,
                   {"r1": True, "r3": True, "r4": True}, _g1, _x1),
    2: ExampleSpec(2, "momentum box [0, 2a): Haar", lambda: BoxMomentum(2), 2, 4, 512,
                   {"r1": True, "r2": True, "r3": True, "r4": True}, _g2),
    3: ExampleSpec(3, "position box [0, 2a)", lambda: BoxPosition(2), 4, 4, 512, {}, _g3),
    4: ExampleSpec(4, "momentum box [0, 3a)", lambda: BoxMomentum(3), 4, None, 512,
                   {"r1": True, "r2": True, "r3": False}, _g4),
    5: ExampleSpec(5, "Gaussian", Gaussian, 8, None, 512,
                   {"r1": True, "r2": True, "r3": False, "r4": True}, _g5, _x5),
    6: ExampleSpec(6, "raised cosine on [0, 2a)", RaisedCosineMomentum, 2, 4, 512,
                   {"r1": True, "r2": True, "r4": True}, _g6),
    7: ExampleSpec(7, f"momentum box [0, (2k+1)a), k={EXAMPLE7_K}", lambda: BoxMomentum(2 * EXAMPLE7_K + 1),
                   EXAMPLE7_K + 2, None, 512, {"r1": True, "r2": True, "r3": False}, _g7),
    8: ExampleSpec(8, "position box [0, 3a/2)", lambda: BoxPosition(1.5), 4, 4, 131072,
                   {"r1": True, "r2": False, "r3": False}, _g8),
    9: ExampleSpec(9, "Lorentzian momentum profile", LorentzianFT, 32, 32, 512,
                   {"r1": True, "r2": False, "r3": True}, _g9, _x9),
}


def run_example(number: int, tol: Tolerances = Tolerances(), workers: int | None = None) -> ExampleResult:
    spec = EXAMPLES[number]
    seed = spec.make_seed()
    r = run_pipeline(seed, radius=spec.radius, s_max=spec.s_max, n_cap=spec.n_cap, tol=tol, workers=workers)
    goldens = spec.goldens(r)
    verdicts = r.report.verdicts
    disc = []
    for key, claim in spec.claimed.items():
        got = verdicts.get(key)
        if got is not None and got != claim:
            disc.append(f"condition {key}: computed {got}, prose states {claim}")
    extra = {}
    if spec.extras is not None:
        notes, extra = spec.extras(r)
        disc.extend(notes)
    return ExampleResult(number, spec.title, goldens, disc, verdicts, r, extra)


def example7_series(k: int):
    """Spectral series of the width-(2k+1) momentum box, with the closed form."""
    seed = BoxMomentum(2 * k + 1)
    table = overlap_table(seed, max(k + 1, 1))
    return seed, table, spectral_series(table)


__all__ = ["EXAMPLES", "ExampleResult", "ExampleSpec", "Golden", "run_example", "example7_series",
           "_example7_closed_form"]
