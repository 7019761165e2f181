"""Command-line front end: ``seedmra synthesize | examples | sumrules``.

Exit codes: 0 success, 2 configuration error, 3 spectral positivity failure,
4 strict-mode condition failure, 5 golden-value mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .overlap import overlap_table, psf_crosscheck, spectral_series, sum_rules
from .pipeline import run_pipeline
from .relevance import Tolerances, filter_symbol
from .seed import parse_seed
from .synthesis import PhaseSpec, PositivityError, c_weights

SCHEMA = 1
EXIT_OK, EXIT_CONFIG, EXIT_POSITIVITY, EXIT_STRICT, EXIT_GOLDEN = 0, 2, 3, 4, 5
CONDITIONS = ("r1", "r2", "r3", "r4")

SEED_HELP = """seed grammar (family[:param]):
  box-momentum:W       flat momentum box on [0, W a); W may be 2k+1 or 2k with --k
  box-position:D       flat position box on [0, D a)
  gaussian             pi^(-1/4) exp(-x^2/2)
  lorentzian           hat_h(p) = 2 / (a (1 + p^2))
  raised-cosine        hat_h(p) = (2 - cos(pi p / a)) / (3 sqrt(a)) on [0, 2a)
  tabulated:PATH       CSV '# domain p_min p_max n_points' then rows p,re,im
"""


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one command invocation."""

    seed: str
    k: int | None = None
    phase: str = "none"
    radius: int = 8
    s_max: int | None = None
    n_cap: int = 512
    tol_r1: float = 1e-6
    tol_r3: float = 1e-6
    tol_r4: float = 1e-6
    pos_tol: float = 1e-8
    out: str | None = None
    strict: bool = False
    fmt: str = "both"
    conditions: tuple = CONDITIONS
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("radius", "n_cap"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        if self.s_max is not None and self.s_max <= 0:
            raise ConfigError("--s-max must be positive")
        for name in ("tol_r1", "tol_r3", "tol_r4", "pos_tol"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"--{name.replace('_', '-')} must be a positive number")
        if self.k is not None and self.k < 0:
            raise ConfigError("--k must be non-negative")
        if self.fmt not in ("json", "csv", "both"):
            raise ConfigError("--format must be json, csv or both")
        bad = [c for c in self.conditions if c not in CONDITIONS]
        if bad:
            raise ConfigError(f"unknown conditions {bad}")

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(r1=self.tol_r1, r3=self.tol_r3, r4=self.tol_r4, pos=self.pos_tol)

    def make_seed(self):
        try:
            return parse_seed(self.seed, self.k)
        except (ValueError, OSError) as exc:
            raise ConfigError(str(exc)) from exc

    def make_phase(self) -> PhaseSpec:
        try:
            return PhaseSpec.parse(self.phase)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        return {"seed": self.seed, "k": self.k, "phase": self.phase, "radius": self.radius, "s_max": self.s_max,
                "n_cap": self.n_cap, "tolerances": self.tolerances.to_dict(), "strict": self.strict,
                "conditions": list(self.conditions)}


# ---------------------------------------------------------------------------
# canonical output


def _encode(obj) -> str:
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(json.dumps(k) + ": " + _encode(v) for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag])
    return json.dumps(str(obj))


def canonical_json(obj) -> str:
    """Sorted keys, 17 significant digits, non-finite numbers as null."""
    return _encode(obj) + "\n"


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([format(float(v), ".17g") if not isinstance(v, (int, np.integer)) else int(v) for v in row])


# ---------------------------------------------------------------------------
# commands


def cmd_synthesize(cfg: RunConfig) -> int:
    seed = cfg.make_seed()
    phase = cfg.make_phase()
    s_max = cfg.s_max
    if s_max is not None and phase.kind == "linear" and abs(phase.k0) > s_max:
        raise ConfigError("--s-max must be at least |K0| for a linear phase")
    out = Path(cfg.out) if cfg.out else None
    try:
        res = run_pipeline(seed, phase, radius=cfg.radius, s_max=s_max, n_cap=cfg.n_cap, tol=cfg.tolerances)
    except PositivityError as exc:
        failure = {"schema": SCHEMA, "status": "positivity-failure", "config": cfg.to_dict(),
                   "seed": seed.descriptor(), "message": str(exc), "min_value": exc.min_value,
                   "min_location": exc.min_location}
        series = getattr(exc, "series", None)
        if series is not None:
            failure["series"] = series.to_dict()
        if out is not None:
            _write(out / "report.json", canonical_json(failure))
        print(f"positivity failure: {exc}", file=sys.stderr)
        return EXIT_POSITIVITY

    report = res.report
    verdicts = report.verdicts
    doc = {"schema": SCHEMA, "status": "ok", "config": cfg.to_dict()}
    doc.update(res.to_dict())
    if out is not None:
        if cfg.fmt in ("json", "both"):
            _write(out / "report.json", canonical_json(doc))
            _write(out / "filter.json", canonical_json({"schema": SCHEMA, **res.H.to_dict()}))
        if cfg.fmt in ("csv", "both"):
            _write_csv(out / "filter.csv", ["n", "H_n"], zip(res.H.indices, np.real(res.H.values)))
            p = np.linspace(0.0, 2 * np.pi, 1025)
            _write_csv(out / "spectrum.csv", ["p", "S"], zip(p, res.series(p)))
            w = np.linspace(-np.pi, np.pi, 1025)
            _write_csv(out / "symbol.csv", ["omega", "abs_H"], zip(w, np.abs(filter_symbol(res.H, w))))

    print(f"seed {seed.label()} phase {phase.kind}: filter n={res.H.n_min}..{res.H.n_max} ({res.H.tail_flag})")
    print(f"  S(0,p) min {res.series.min_value:.6g} at p={res.series.min_location:.6f}")
    print(f"  r1 max residual {report.r1_max:.3e} -> {verdicts['r1']}")
    print(f"  r2 {report.r2_class} -> {verdicts['r2']}")
    print(f"  r3 sum {report.r3_sum.real:.12g} (|diff| {report.r3_residual:.3e}) -> {verdicts['r3']}")
    print(f"  r4 min |H| {report.r4_min:.6g} at {report.r4_argmin:.6f} -> {verdicts['r4']}")
    for note in report.notes:
        print(f"  note: {note}")
    if cfg.strict and any(verdicts[c] is not True for c in cfg.conditions):
        return EXIT_STRICT
    return EXIT_OK


def cmd_examples(which, out: str | None, tol: Tolerances) -> int:
    from .catalog import EXAMPLES, run_example

    try:
        numbers = sorted(EXAMPLES) if not which else sorted({int(w) for w in which})
    except ValueError as exc:
        raise ConfigError(f"example numbers must be integers 1..9 or 'all': {exc}") from exc
    unknown = [n for n in numbers if n not in EXAMPLES]
    if unknown:
        raise ConfigError(f"unknown examples {unknown}; choose from 1..9")
    results = []
    for n in numbers:
        r = run_example(n, tol)
        results.append(r)
        print(f"Example {n}: {r.title}  [{'match' if r.passed else 'MISMATCH'}]")
        for g in r.goldens:
            print(f"  {'ok ' if g.passed else 'BAD'}  {g.name}: {_fmt(g.value)} (expected {_fmt(g.expected)})")
        for d in r.discrepancies:
            print(f"  flag {d}")
    if out is not None:
        _write(Path(out) / "examples.json",
               canonical_json({"schema": SCHEMA, "examples": [r.to_dict() for r in results]}))
    return EXIT_OK if all(r.passed for r in results) else EXIT_GOLDEN


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def cmd_sumrules(cfg: RunConfig) -> int:
    seed = cfg.make_seed()
    phase = cfg.make_phase()
    table = overlap_table(seed, cfg.radius)
    series = spectral_series(table)
    try:
        c = c_weights(series, phase, cfg.s_max, pos_tol=cfg.pos_tol)
    except PositivityError as exc:
        print(f"positivity failure: {exc}", file=sys.stderr)
        return EXIT_POSITIVITY
    psf = psf_crosscheck(seed, table)
    rules = sum_rules(seed, table, series, c, psf=psf)
    print(f"seed {seed.label()}, radius {table.radius}, tail bound {table.tail_bound:.3e}")
    if table.under_truncated:
        print(f"  warning: slow overlap tails, the table is under-truncated (tail {table.tail_bound:.3e}); "
              "sums over the table carry a truncation error of that order")
    for r in rules:
        print(f"  {r.name:34s} lhs {_c(r.lhs)}  rhs {_c(r.rhs)}  residual {r.residual:.3e}")
    if cfg.out:
        doc = {"schema": SCHEMA, "config": cfg.to_dict(), "seed": seed.descriptor(),
               "tail_bound": table.tail_bound, "under_truncated": table.under_truncated,
               "rules": [r.to_dict() for r in rules], "psf": psf.to_dict()}
        _write(Path(cfg.out) / "sumrules.json", canonical_json(doc))
    return EXIT_OK


def _c(z: complex) -> str:
    return f"{z.real:.12g}" if abs(z.imag) < 1e-14 else f"{z.real:.12g}{z.imag:+.3g}j"


# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", required=True, help="seed family, see the grammar above")
    p.add_argument("--k", type=int, default=None, help="k for box-momentum:2k+1 / 2k")
    p.add_argument("--phase", default="none", help="none | linear:K0 | quadratic:G")
    p.add_argument("--radius", type=int, default=8, help="overlap table truncation (default 8)")
    p.add_argument("--s-max", type=int, default=None, help="synthesis weights |s| <= s_max (default: automatic)")
    p.add_argument("--n-cap", type=int, default=512, help="hard cap on |n| for the filter (default 512)")
    p.add_argument("--tol-r1", type=float, default=1e-6)
    p.add_argument("--tol-r3", type=float, default=1e-6)
    p.add_argument("--tol-r4", type=float, default=1e-6)
    p.add_argument("--pos-tol", type=float, default=1e-8)
    p.add_argument("--out", default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seedmra", description="Synthesize and verify MRA filters from seed functions.",
                                     epilog=SEED_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="build the filter for one seed and check it", epilog=SEED_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(p)
    p.add_argument("--strict", action="store_true", help="exit 4 if a requested condition fails")
    p.add_argument("--conditions", default=",".join(CONDITIONS), help="conditions checked by --strict")
    p.add_argument("--format", dest="fmt", default="both", choices=["json", "csv", "both"])

    p = sub.add_parser("examples", help="reproduce the worked examples against golden values")
    p.add_argument("which", nargs="*", help="example numbers 1..9, or 'all' (default)")
    p.add_argument("--out", default=None)
    p.add_argument("--tol-r1", type=float, default=1e-6)
    p.add_argument("--tol-r3", type=float, default=1e-6)
    p.add_argument("--tol-r4", type=float, default=1e-6)

    p = sub.add_parser("sumrules", help="print both sides of the summation rules", epilog=SEED_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(p)
    return parser


def _config(args) -> RunConfig:
    conds = tuple(c.strip() for c in getattr(args, "conditions", ",".join(CONDITIONS)).split(",") if c.strip())
    return RunConfig(seed=args.seed, k=args.k, phase=args.phase, radius=args.radius, s_max=args.s_max,
                     n_cap=args.n_cap, tol_r1=args.tol_r1, tol_r3=args.tol_r3, tol_r4=args.tol_r4,
                     pos_tol=args.pos_tol, out=args.out, strict=getattr(args, "strict", False),
                     fmt=getattr(args, "fmt", "both"), conditions=conds)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synthesize":
            return cmd_synthesize(_config(args))
        if args.command == "sumrules":
            return cmd_sumrules(_config(args))
        which = [w for w in args.which if w != "all"] if args.which else None
        tol = Tolerances(r1=args.tol_r1, r3=args.tol_r3, r4=args.tol_r4)
        return cmd_examples(which, args.out, tol)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
