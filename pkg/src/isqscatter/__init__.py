"""Exact scattering for the inverse-square potential in the intermediate coupling window.

Modules: specfun (Bessel-type functions), riemann (sheet-aware complex
points), smatrix (S-matrix, poles, residues), spectral (eigenfunctions and
their orthonormality/completeness checks), abscatter (Aharonov-Bohm
amplitudes), fewbody (few-body reductions) and cli.
"""

from . import abscatter, fewbody, riemann, smatrix, specfun, spectral
from .abscatter import FluxConfig, flux_config, total_amplitude
from .riemann import SheetPoint
from .smatrix import IntermediateChannel, classify, kappa0_from_g, s_eval

__version__ = "0.1.0"

__all__ = [
    "FluxConfig",
    "IntermediateChannel",
    "SheetPoint",
    "abscatter",
    "classify",
    "fewbody",
    "flux_config",
    "kappa0_from_g",
    "riemann",
    "s_eval",
    "smatrix",
    "specfun",
    "spectral",
    "total_amplitude",
]
