"""This module maintains approximate distances of a changing graph through polynomial matrix inverses over Z_p."""

from .complexity import EXPRESSIONS, ExprSpec, OmegaTable, balance, default_parameters, exponent_report, omega_abc
from .config import EngineConfig
from .dyninv import ExactInverseDS, SliceInverseDS, WorstCaseWrapper
from .errors import (
    BadForm,
    ConfigError,
    ConstantTermUpdate,
    DegreeMismatch,
    DegreeNotTracked,
    DirectedInput,
    DynDistError,
    IndexOutOfRange,
    NonUnit,
    NotConnected,
    ParseError,
    ShapeMismatch,
    SingularPivot,
    ZeroInverse,
)
from .ff_poly import FieldConfig, TruncPoly, make_rng, poly_add, poly_inv_unit, poly_mul
from .generator import AdaptiveAdversary, DistributionWeight, StaticWeight, WeightSampler, generate_graph
from .graphenc import DynGraph, Encoding, HittingSet, encode, is_strongly_connected, sample_hitting_set
from .logging import log
from .longrange import APSPOracle, SSSPOracle, UndirectedOracle
from .metrics import (
    DiameterEstimate,
    ExactDiameterOracle,
    MetricSnapshot,
    closeness_all,
    diameter_15,
    diameter_1eps,
    diameter_eps,
    eccentricities_35,
    exact_diameter,
    radius_15,
    radius_1eps,
)
from .minplus import extend_to_long_hops, minplus_approx, minplus_exact, minplus_power
from .output import ConsoleOutput, Output, SimpleFileOutput
from .parser import StreamCommand, parse_graph, parse_stream
from .polymatrix import PolyMatrix, coeff_slice_product, fmat_mul, neumann_inverse, polymat_mul, submatrix
from .replay import Replay
from .runner import Runner
from .shorthop import ScaledOracleBank, ShortHopOracle, threshold_set
from .types import INF, CommandKind, DiameterCase, LogLevel, Mode

__all__ = (
    "AdaptiveAdversary",
    "APSPOracle",
    "BadForm",
    "balance",
    "closeness_all",
    "coeff_slice_product",
    "CommandKind",
    "ConfigError",
    "ConsoleOutput",
    "ConstantTermUpdate",
    "default_parameters",
    "DegreeMismatch",
    "DegreeNotTracked",
    "diameter_15",
    "diameter_1eps",
    "diameter_eps",
    "DiameterCase",
    "DiameterEstimate",
    "DirectedInput",
    "DistributionWeight",
    "DynDistError",
    "DynGraph",
    "eccentricities_35",
    "encode",
    "Encoding",
    "EngineConfig",
    "exact_diameter",
    "ExactDiameterOracle",
    "ExactInverseDS",
    "exponent_report",
    "EXPRESSIONS",
    "ExprSpec",
    "extend_to_long_hops",
    "FieldConfig",
    "fmat_mul",
    "generate_graph",
    "HittingSet",
    "INF",
    "IndexOutOfRange",
    "is_strongly_connected",
    "log",
    "LogLevel",
    "make_rng",
    "MetricSnapshot",
    "minplus_approx",
    "minplus_exact",
    "minplus_power",
    "Mode",
    "neumann_inverse",
    "NonUnit",
    "NotConnected",
    "omega_abc",
    "OmegaTable",
    "Output",
    "parse_graph",
    "parse_stream",
    "ParseError",
    "poly_add",
    "poly_inv_unit",
    "poly_mul",
    "polymat_mul",
    "PolyMatrix",
    "radius_15",
    "radius_1eps",
    "Replay",
    "Runner",
    "sample_hitting_set",
    "ScaledOracleBank",
    "ShapeMismatch",
    "ShortHopOracle",
    "SimpleFileOutput",
    "SingularPivot",
    "SliceInverseDS",
    "SSSPOracle",
    "StaticWeight",
    "StreamCommand",
    "submatrix",
    "threshold_set",
    "TruncPoly",
    "UndirectedOracle",
    "WeightSampler",
    "WorstCaseWrapper",
    "ZeroInverse",
)
