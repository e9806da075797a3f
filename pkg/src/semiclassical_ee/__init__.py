"""Entanglement of non-interacting particles in one-dimensional potentials and its
classical limit: exact reduced density matrix spectra, WKB predictions,
stationary-phase overlaps and emptiness formation probabilities."""

__version__ = "0.1.0"

from .errors import (ConfigError, DomainError, NumericalError, OutputError,  # noqa: E402
                     ReproductionError, ResourceError, SemiclassicalError, UnsupportedError,
                     UsageError)
from .potentials import PhysicalParams, PotentialSpec  # noqa: E402
from .rdm import Bipartition, RdmSpectrum, entanglement_entropy, rdm_spectrum_exact  # noqa: E402

__all__ = [
    "__version__", "Bipartition", "ConfigError", "DomainError", "NumericalError", "OutputError",
    "PhysicalParams", "PotentialSpec", "RdmSpectrum", "ReproductionError", "ResourceError",
    "SemiclassicalError", "UnsupportedError", "UsageError", "entanglement_entropy",
    "rdm_spectrum_exact",
]
