"""Seed functions h(x) and their Fourier transforms.

The transform convention is ``hat_h(p) = (2 pi)^{-1/2} int exp(-i p x) h(x) dx``.
Every family is normalized in L2 and evaluated through vectorized numpy
expressions.  Box-shaped supports are half-open, ``[0, w*a)``, so a lattice
point sitting on the right edge samples to exactly zero.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .quadrature import IntegrationError, fourier_integral

#: lattice constant, a**2 = 2*pi
A = math.sqrt(2.0 * math.pi)
SQRT_2PI = A


class EvaluationError(ValueError):
    """A seed value could not be produced to the advertised accuracy."""

    def __init__(self, message: str, error_bound: float = float("nan")):
        super().__init__(f"{message} (estimated error {error_bound:.3e})")
        self.error_bound = error_bound


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeConfig:
    """Square lattice with unit cell area 2*pi; ``a`` is fixed by that."""

    a: float = A

    def __post_init__(self):
        if not self.a > 0 or abs(self.a * self.a - 2.0 * math.pi) > 1e-12:
            raise ValueError(f"lattice constant must satisfy a**2 = 2*pi, got a={self.a!r}")


def _sinc_exp(omega, length):
    """int_0^length exp(i omega t) dt, stable at omega -> 0."""
    omega = np.asarray(omega, dtype=float)
    return length * np.exp(0.5j * omega * length) * np.sinc(omega * length / (2.0 * math.pi))


@dataclass(frozen=True)
class SeedFunction:
    """Base class.  Subclasses fill in ``_ft`` / ``_h`` and the support data.

    ``side`` names the representation with a closed form used for overlaps;
    ``scale`` is the factor applied at construction to reach unit norm.
    """

    side: str = field(init=False, default="momentum")
    norm_tol: float = field(init=False, default=1e-10)
    scale: float = field(init=False, default=1.0)
    norm: float = field(init=False, default=1.0)

    # support data: (lo, hi) with +-inf allowed, interior kinks/jumps
    momentum_support = (-math.inf, math.inf)
    position_support = (-math.inf, math.inf)
    momentum_breaks = ()
    position_breaks = ()
    momentum_core = 10.0
    position_core = 10.0
    has_ft = True
    has_h = True
    real_ft = True
    real_h = True

    def __post_init__(self):
        norm = self._measure_norm()
        object.__setattr__(self, "norm", norm)
        dev = abs(norm - 1.0)
        if dev > self.norm_tol:
            if dev >= 1e-2:
                raise NormalizationError(f"{self.label()}: L2 norm {norm:.6g} is far from 1")
            warnings.warn(f"{self.label()}: rescaling by {1.0 / norm:.12g} to unit L2 norm", stacklevel=3)
            object.__setattr__(self, "scale", 1.0 / norm)

    # -- evaluation --------------------------------------------------------
    def ft(self, p):
        """hat_h(p), vectorized."""
        p = np.asarray(p, dtype=float)
        if self.has_ft:
            return self.scale * self._ft(p)
        return self.scale * self._quad_transform(p, forward=True)

    def h(self, x):
        """h(x), vectorized."""
        x = np.asarray(x, dtype=float)
        if self.has_h:
            return self.scale * self._h(x)
        return self.scale * self._quad_transform(x, forward=False)

    def lattice(self, m, spacing: float = A):
        """Samples hat_h(m * spacing) for integer array ``m``."""
        return self.ft(np.asarray(m) * spacing)

    # -- metadata ----------------------------------------------------------
    @property
    def compact_momentum(self) -> bool:
        lo, hi = self.momentum_support
        return not (math.isinf(lo) or math.isinf(hi))

    @property
    def compact_position(self) -> bool:
        lo, hi = self.position_support
        return not (math.isinf(lo) or math.isinf(hi))

    def label(self) -> str:
        return type(self).__name__

    def descriptor(self) -> dict:
        d = {"family": self.label(), "side": self.side}
        d.update(self._params())
        return d

    def _params(self) -> dict:
        return {}

    # -- internals ---------------------------------------------------------
    def _measure_norm(self) -> float:
        if self.side == "momentum":
            f, (lo, hi), br, core = self._ft, self.momentum_support, self.momentum_breaks, self.momentum_core
        else:
            f, (lo, hi), br, core = self._h, self.position_support, self.position_breaks, self.position_core
        val, _ = fourier_integral(lambda t: float(abs(f(np.asarray(t))) ** 2), 0.0, lo, hi, br, core)
        return math.sqrt(val.real)

    def _quad_transform(self, t, forward):
        """Fourier quadrature from the analytic side to the other one."""
        if forward:
            f, (lo, hi), br, core, sgn = self._h, self.position_support, self.position_breaks, self.position_core, -1.0
            real = self.real_h
        else:
            f, (lo, hi), br, core, sgn = self._ft, self.momentum_support, self.momentum_breaks, self.momentum_core, 1.0
            real = self.real_ft
        out = np.empty(t.shape, dtype=complex)
        for idx, tv in np.ndenumerate(t):
            try:
                val, _ = fourier_integral(lambda u: float(np.real(f(np.asarray(u)))), sgn * tv, lo, hi, br, core,
                                          max_error=1e-8)
                if not real:
                    im, _ = fourier_integral(lambda u: float(np.imag(f(np.asarray(u)))), sgn * tv, lo, hi, br,
                                             core, max_error=1e-8)
                    val += 1j * im
            except IntegrationError as exc:
                raise EvaluationError(f"{self.label()}: transform at {tv:g} failed", exc.residual) from exc
            out[idx] = val / SQRT_2PI
        return out


@dataclass(frozen=True)
class BoxMomentum(SeedFunction):
    """hat_h = 1/sqrt(w a) on [0, w a)."""

    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("box width must be positive")
        object.__setattr__(self, "momentum_support", (0.0, self.width * A))
        super().__post_init__()

    def _ft(self, p):
        hi = self.width * A
        return np.where((p >= 0.0) & (p < hi), 1.0 / math.sqrt(hi), 0.0)

    def _h(self, x):
        length = self.width * A
        return _sinc_exp(x, length) / math.sqrt(length) / SQRT_2PI

    def _params(self):
        return {"width": self.width}

    real_h = False


@dataclass(frozen=True)
class BoxPosition(SeedFunction):
    """h = 1/sqrt(d a) on [0, d a) in position space."""

    d: float = 1.0

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("box length must be positive")
        object.__setattr__(self, "side", "position")
        object.__setattr__(self, "position_support", (0.0, self.d * A))
        super().__post_init__()

    def _h(self, x):
        hi = self.d * A
        return np.where((x >= 0.0) & (x < hi), 1.0 / math.sqrt(hi), 0.0)

    def _ft(self, p):
        length = self.d * A
        return _sinc_exp(-p, length) / math.sqrt(length) / SQRT_2PI

    def _params(self):
        return {"d": self.d}

    real_ft = False


@dataclass(frozen=True)
class Gaussian(SeedFunction):
    """pi^{-1/4} exp(-x^2/2); self-dual under the Fourier transform."""

    def __post_init__(self):
        object.__setattr__(self, "side", "position")
        super().__post_init__()

    momentum_core = 12.0
    position_core = 12.0

    def _h(self, x):
        return math.pi ** -0.25 * np.exp(-0.5 * x * x)

    _ft = _h


@dataclass(frozen=True)
class LorentzianFT(SeedFunction):
    """hat_h(p) = 2 / (a (1 + p^2)), whose position form is exp(-|x|)."""

    momentum_core = 40.0
    position_core = 40.0
    position_breaks = (0.0,)

    def _ft(self, p):
        return 2.0 / (A * (1.0 + p * p))

    def _h(self, x):
        return np.exp(-np.abs(x))


@dataclass(frozen=True)
class RaisedCosineMomentum(SeedFunction):
    """hat_h(p) = (2 - cos(pi p / a)) / (3 sqrt(a)) on [0, 2a).

    Supported on two lattice cells like the Haar box, but not flat, and
    |hat_h|^2 matches its value and slope across the edges.
    """

    def __post_init__(self):
        object.__setattr__(self, "momentum_support", (0.0, 2.0 * A))
        super().__post_init__()

    def _ft(self, p):
        inside = (p >= 0.0) & (p < 2.0 * A)
        return np.where(inside, (2.0 - np.cos(math.pi * p / A)) / (3.0 * math.sqrt(A)), 0.0)

    def _h(self, x):
        k = math.pi / A
        length = 2.0 * A
        e = 2.0 * _sinc_exp(x, length) - 0.5 * (_sinc_exp(x + k, length) + _sinc_exp(x - k, length))
        return e / (3.0 * math.sqrt(A) * SQRT_2PI)

    real_h = False


@dataclass(frozen=True)
class Tabulated(SeedFunction):
    """Momentum-space samples on a uniform grid, linearly interpolated.

    The function is zero outside ``[p_min, p_max)``.  Position values come
    from the exact transform of the interpolant; they are refused once the
    grid spacing no longer resolves the oscillation ``exp(i p x)``.
    """

    p_min: float = 0.0
    p_max: float = 1.0
    values: tuple = ()

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("need at least two tabulated samples")
        if not self.p_max > self.p_min:
            raise ValueError("empty tabulation domain")
        object.__setattr__(self, "values", tuple(vals))
        object.__setattr__(self, "norm_tol", 1e-6)
        object.__setattr__(self, "momentum_support", (float(self.p_min), float(self.p_max)))
        object.__setattr__(self, "real_ft", bool(np.all(vals.imag == 0)))
        super().__post_init__()

    has_h = False
    real_h = False

    @property
    def grid(self):
        return np.linspace(self.p_min, self.p_max, len(self.values))

    @property
    def spacing(self) -> float:
        return (self.p_max - self.p_min) / (len(self.values) - 1)

    @property
    def momentum_breaks(self):
        return tuple(self.grid[1:-1])

    def _ft(self, p):
        v = np.asarray(self.values)
        g = self.grid
        out = np.interp(p, g, v.real, left=0.0, right=0.0) + 1j * np.interp(p, g, v.imag, left=0.0, right=0.0)
        out = np.where((p >= self.p_min) & (p < self.p_max), out, 0.0)
        return out.real if self.real_ft else out

    def _measure_norm(self):
        # exact for the piecewise-linear interpolant
        v = np.asarray(self.values)
        a, b = v[:-1], v[1:]
        seg = (np.abs(a) ** 2 + np.abs(b) ** 2 + (a * np.conj(b)).real) / 3.0
        return math.sqrt(float(np.sum(seg)) * self.spacing)

    def h(self, x):
        x = np.asarray(x, dtype=float)
        dp = self.spacing
        worst = float(np.max(np.abs(x))) * dp if x.size else 0.0
        if worst > math.pi:
            amp = float(np.max(np.abs(self.values))) * self.scale
            bound = amp * (self.p_max - self.p_min) * worst**2 / (8.0 * SQRT_2PI)
            raise EvaluationError(
                f"tabulated grid spacing {dp:.3g} cannot resolve x={worst / dp:.3g}", bound)
        return self.scale * self._piecewise_linear_ft(x)

    def _piecewise_linear_ft(self, x):
        v = np.asarray(self.values)
        p0 = self.grid[:-1]
        dp = self.spacing
        f0 = v[:-1]
        df = v[1:] - v[:-1]
        theta = np.multiply.outer(x, np.full(p0.shape, dp))
        small = np.abs(theta) < 1e-3
        th = np.where(small, 1.0, theta)
        e = np.exp(1j * th)
        phi1 = np.where(small, 1 + 0.5j * theta - theta**2 / 6 - 1j * theta**3 / 24, (e - 1) / (1j * th))
        phi2 = np.where(small, 0.5 + 1j * theta / 3 - theta**2 / 8 - 1j * theta**3 / 30,
                        e / (1j * th) + (e - 1) / th**2)
        phase = np.exp(1j * np.multiply.outer(x, p0))
        seg = phase * dp * (f0 * phi1 + df * phi2)
        return seg.sum(axis=-1) / SQRT_2PI

    def _params(self):
        return {"p_min": self.p_min, "p_max": self.p_max, "n_points": len(self.values)}

    @classmethod
    def from_function(cls, f, p_min, p_max, n_points):
        g = np.linspace(p_min, p_max, n_points)
        return cls(p_min=p_min, p_max=p_max, values=tuple(np.asarray(f(g), dtype=complex)))

    @classmethod
    def load(cls, path):
        """Read the ``# domain p_min p_max n_points`` / ``p,re,im`` CSV format."""
        path = Path(path)
        with path.open() as fh:
            header = fh.readline().split()
            if len(header) != 5 or header[:2] != ["#", "domain"]:
                raise ValueError(f"{path}: expected '# domain p_min p_max n_points' header")
            p_min, p_max, n = float(header[2]), float(header[3]), int(header[4])
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
        if len(rows) != n:
            raise ValueError(f"{path}: header promises {n} rows, found {len(rows)}")
        arr = np.array([[float(c) for c in r[:3]] for r in rows])
        p = arr[:, 0]
        expected = np.linspace(p_min, p_max, n)
        if not np.allclose(p, expected, rtol=0, atol=1e-9 * max(1.0, abs(p_max - p_min))):
            raise ValueError(f"{path}: grid is not uniform over [{p_min}, {p_max}]")
        return cls(p_min=p_min, p_max=p_max, values=tuple(arr[:, 1] + 1j * arr[:, 2]))

    def save(self, path):
        v = np.asarray(self.values) * self.scale
        with Path(path).open("w", newline="") as fh:
            fh.write(f"# domain {self.p_min!r} {self.p_max!r} {len(v)}\n")
            w = csv.writer(fh)
            for p, z in zip(self.grid, v):
                w.writerow([repr(float(p)), repr(float(z.real)), repr(float(z.imag))])


def eval_seed(seed: SeedFunction, x):
    """Position-space value h(x)."""
    out = seed.h(x)
    return complex(out) if np.ndim(out) == 0 else out


def eval_seed_ft(seed: SeedFunction, p):
    """Momentum-space value hat_h(p)."""
    out = seed.ft(p)
    return complex(out) if np.ndim(out) == 0 else out


def lattice_samples(seed: SeedFunction, n_max: int) -> np.ndarray:
    """hat_h(n a) for n = -n_max..n_max."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    return np.asarray(seed.lattice(np.arange(-n_max, n_max + 1)), dtype=complex)


def parse_seed(text: str, k: int | None = None) -> SeedFunction:
    """Build a seed from ``family[:param]``.

    Families: ``box-momentum:W`` (``W`` may be ``2k+1`` or ``2k`` together
    with ``k``), ``box-position:D``, ``gaussian``, ``lorentzian``,
    ``raised-cosine`` and ``tabulated:PATH``.
    """
    family, _, arg = text.partition(":")
    family = family.strip().lower()
    if family == "box-momentum":
        if arg in ("2k+1", "2k"):
            if k is None:
                raise ValueError(f"'{text}' needs k")
            width = 2 * k + 1 if arg == "2k+1" else 2 * k
        else:
            width = float(arg) if arg else 1.0
        return BoxMomentum(width=width)
    if family == "box-position":
        return BoxPosition(d=float(arg) if arg else 1.0)
    if family == "gaussian":
        return Gaussian()
    if family == "lorentzian":
        return LorentzianFT()
    if family == "raised-cosine":
        return RaisedCosineMomentum()
    if family == "tabulated":
        if not arg:
            raise ValueError("tabulated seed needs a file path")
        return Tabulated.load(arg)
    raise ValueError(f"unknown seed family '{family}'")
