"""Bohr-Sommerfeld levels and matrix spectra of 2x2 semiclassical symbols."""

from ._bsq import (
    Error,
    bs_spectrum,
    compare_csv,
    eigenvalue,
    eval_expr,
    hermiticity_residual,
    oracle_spectrum,
    phases,
    presets,
    tm_bands,
    trace,
)

__all__ = [
    "Error",
    "bs_spectrum",
    "compare_csv",
    "eigenvalue",
    "eval_expr",
    "hermiticity_residual",
    "oracle_spectrum",
    "phases",
    "presets",
    "tm_bands",
    "trace",
]
