"""Quasi-Hermiticity domains of self-dual tridiagonal chain Hamiltonians."""
from .chain_model import ChainSpec, SecularForm, build, char_poly, secular_form
from .config import DEFAULT_TOL, Region, ToleranceConfig, Verdict
from .criteria import member
from .errors import HorizonError
from .landmarks import spikes

__version__ = "0.1.0"

__all__ = [
    "ChainSpec", "SecularForm", "build", "char_poly", "secular_form",
    "DEFAULT_TOL", "Region", "ToleranceConfig", "Verdict",
    "member", "HorizonError", "spikes", "__version__",
]
