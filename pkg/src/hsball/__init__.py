"""Numerical and exact-arithmetic laboratory for Hardy-Sobolev spaces H_s^p of the unit ball."""

from ._backend import BACKEND
from .errors import ErrorKind, ToolkitError
from .params import PointSeq, SpaceParams, derive_exponents, sobolev_embedding_q
from .polyfn import PolyFn, bracket_shift, leibniz_rj, mul, radial_derivative

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ErrorKind",
    "ToolkitError",
    "PointSeq",
    "SpaceParams",
    "derive_exponents",
    "sobolev_embedding_q",
    "PolyFn",
    "bracket_shift",
    "leibniz_rj",
    "mul",
    "radial_derivative",
    "__version__",
]
