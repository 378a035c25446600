from ._version import __version__
from .certify import SupportDomain, SuiteOptions, TestState, run_suite
from .complexes import (
    AbelianCoverSpec,
    SimplicialComplex,
    build_complex,
    cover_instance,
    hodge_density,
    sobolev_ratio,
    torus_cover,
)
from .config import RunConfig
from .continuum import PolynomialSymbol, RnProfile, exponent_readoff, rn_profile, symbol_density
from .monocalc import (
    ConvexMinorant,
    OrliczProfile,
    StepFunction,
    asymptotic_fit,
    convex_minorant,
    g_transform,
    h_profile,
    heat_profiles,
    n_profile,
    right_inverse_increasing,
)
from .parser import load_complex, parse_complex
from .report import CertificationReport, CheckRecord
from .spectral_ops import OperatorInstance, decompose, spectral_density
from .validator import (
    ConfigurationError,
    ConvergenceError,
    NumericalError,
    ValidationError,
    Validator,
)

__all__ = [
    "AbelianCoverSpec",
    "CertificationReport",
    "CheckRecord",
    "ConfigurationError",
    "ConvergenceError",
    "ConvexMinorant",
    "NumericalError",
    "OperatorInstance",
    "OrliczProfile",
    "PolynomialSymbol",
    "RnProfile",
    "RunConfig",
    "SimplicialComplex",
    "StepFunction",
    "SuiteOptions",
    "SupportDomain",
    "TestState",
    "ValidationError",
    "Validator",
    "asymptotic_fit",
    "build_complex",
    "convex_minorant",
    "cover_instance",
    "decompose",
    "exponent_readoff",
    "g_transform",
    "h_profile",
    "heat_profiles",
    "hodge_density",
    "load_complex",
    "n_profile",
    "parse_complex",
    "right_inverse_increasing",
    "rn_profile",
    "run_suite",
    "sobolev_ratio",
    "spectral_density",
    "symbol_density",
    "torus_cover",
]
