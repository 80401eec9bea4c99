"""Exact operator-algebra checks and numerical cross-validation for
spin-1/2 Coulomb-like models with hidden O(4) symmetry."""
from . import dirac, models, numoracle, opalg, specfun, susy, symcheck
from .models import ModelId

__all__ = ["ModelId", "dirac", "models", "numoracle", "opalg", "specfun", "susy", "symcheck"]
__version__ = "0.1.0"
