"""Numerical laboratory for translation-invariant chain states generated by
finite Kraus families: transfer spectra, modular duals, purity certificates,
and a truncated two-sided cross-check."""

__version__ = "0.1.0"

from .systems import KrausSystem, InvariantState, CanonicalSystem  # noqa: F401
from .purity import PurityReport, purity_battery  # noqa: F401
