"""End-to-end run: seed -> overlaps -> spectral series -> weights -> filter -> checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from .overlap import OverlapTable, PSFReport, SpectralSeries, overlap_table, psf_crosscheck, spectral_series
from .relevance import RelevanceReport, Tolerances, relevance_report
from .seed import SeedFunction
from .synthesis import CWeights, FilterSequence, PhaseSpec, c_weights, filter_coefficients


@dataclass
class PipelineResult:
    seed: SeedFunction
    phase: PhaseSpec
    table: OverlapTable
    series: SpectralSeries
    c: CWeights
    H: FilterSequence
    report: RelevanceReport
    psf: PSFReport | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "seed": self.seed.descriptor(),
            "phase": self.phase.to_dict(),
            "params": self.params,
            "overlap": {"radius": self.table.radius, "tail_bound": self.table.tail_bound,
                        "under_truncated": self.table.under_truncated, "total": self.table.total().real},
            "series": self.series.to_dict(),
            "c_weights": self.c.to_dict(),
            "filter": self.H.to_dict(),
            "relevance": self.report.to_dict(),
        }
        if self.psf is not None:
            d["psf"] = self.psf.to_dict()
        return d


def run_pipeline(seed: SeedFunction, phase: PhaseSpec | None = None, *, radius: int = 8, s_max: int | None = None,
                 n_cap: int = 512, tol: Tolerances = Tolerances(), workers: int | None = None,
                 with_psf: bool = True, table: OverlapTable | None = None) -> PipelineResult:
    """Run the whole synthesis for one seed.

    Raises :class:`~seedmra.synthesis.PositivityError` when the spectral
    series is not certified positive; ``err.series`` then carries it.
    """
    from .synthesis import PositivityError

    phase = phase or PhaseSpec()
    table = table if table is not None else overlap_table(seed, radius, workers=workers)
    series = spectral_series(table)
    try:
        c = c_weights(series, phase, s_max, pos_tol=tol.pos)
    except PositivityError as exc:
        exc.series = series
        exc.table = table
        raise
    H = filter_coefficients(seed, c, n_cap=n_cap)
    report = relevance_report(H, tol, seed=seed, table=table, series=series)
    psf = psf_crosscheck(seed, table) if with_psf else None
    if table.under_truncated:
        report.notes.append(f"overlap table under-truncated: tail bound {table.tail_bound:.3e}")
    if not c.tail_ok:
        report.notes.append(f"synthesis weights not decayed at s_max: |c| = {c.tail:.3e}")
    if H.tail_flag == "cap":
        report.notes.append(f"filter truncated at the cap |n| <= {n_cap}")
    params = {"radius": table.radius, "s_max": c.s_max, "n_cap": n_cap}
    return PipelineResult(seed, phase, table, series, c, H, report, psf, params)
