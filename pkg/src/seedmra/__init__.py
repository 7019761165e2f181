"""Filter synthesis for multi-resolution analyses from lattice-orthonormalized seed functions."""

from .overlap import (OverlapTable, SpectralSeries, overlap_coefficient, overlap_table, psf_crosscheck,
                      spectral_series, sum_rules)
from .pipeline import PipelineResult, run_pipeline
from .relevance import (RelevanceReport, Tolerances, check_r1, check_r2, check_r3, check_r4, corollary_check,
                        criterion_r3, factorization_check)
from .seed import (A, BoxMomentum, BoxPosition, EvaluationError, Gaussian, LatticeConfig, LorentzianFT,
                   NormalizationError, RaisedCosineMomentum, SeedFunction, Tabulated, eval_seed, eval_seed_ft,
                   lattice_samples, parse_seed)
from .seqtools import DecayClass, TruncatedSequence, classify_decay, convolution_class, convolve, lp_norm
from .synthesis import (CWeights, FilterSequence, PhaseSpec, PositivityError, SynthesisWeights2D, c_weights,
                        expansion_weights, f_weights, filter_coefficients, filter_from_f, filter_via_convolution,
                        onc_residual, synthesize_H)

__version__ = "0.1.0"
