from enum import Enum, IntEnum
from typing import Final, Sequence

import numpy as np
import numpy.typing as npt


INF: Final[float] = float("inf")

FMatrix = npt.NDArray[np.int64]
DistMatrix = npt.NDArray[np.float64]
IndexSet = Sequence[int] | npt.NDArray[np.int64]
Number = int | float


class LogLevel(IntEnum):
    """How much gets printed."""

    verbose = 3
    debug = 2
    warning = 1
    error = 0

    def __str__(self) -> str:
        """Get a string representation of the log level."""
        match self:
            case LogLevel.verbose:
                return "Verbose"
            case LogLevel.debug:
                return "Debug"
            case LogLevel.warning:
                return "Warnings"
            case LogLevel.error:
                return "Errors"


class Mode(Enum):
    """The oracle or metric a replay drives."""

    apsp = "apsp"
    apsp_explicit = "apsp-explicit"
    sssp = "sssp"
    undirected = "undirected"
    diameter15 = "diameter15"
    diameter_eps = "diameter-eps"
    radius = "radius"
    ecc = "ecc"
    closeness = "closeness"
    exact_diam = "exact-diam"
    complexity = "complexity"

    def __str__(self) -> str:
        """Get a string representation of the mode."""
        match self:
            case Mode.apsp:
                return "All-pairs distances with batch queries"
            case Mode.apsp_explicit:
                return "All-pairs distances, full matrix after every update"
            case Mode.sssp:
                return "Single-source distances"
            case Mode.undirected:
                return "Undirected small-weight distance oracle"
            case Mode.diameter15:
                return "Nearly 1.5-approximate diameter"
            case Mode.diameter_eps:
                return "(1+eps)-approximate diameter"
            case Mode.radius:
                return "Nearly 1.5-approximate radius"
            case Mode.ecc:
                return "Nearly 5/3-approximate eccentricities"
            case Mode.closeness:
                return "Closeness centrality"
            case Mode.exact_diam:
                return "Exact diameter"
            case Mode.complexity:
                return "Exponent table"


class CommandKind(Enum):
    """Stream command letters."""

    update = "U"
    query = "Q"
    source = "S"
    diameter = "D"
    radius = "R"
    eccentricities = "E"
    closeness = "C"
    exact_diameter = "X"


class DiameterCase(Enum):
    """Which branch produced a diameter or radius estimate."""

    small = "small"
    large = "large"
    disconnected = "disconnected"

    def __str__(self) -> str:
        """Get a string representation of the case."""
        match self:
            case DiameterCase.small:
                return "Sampled short-hop search"
            case DiameterCase.large:
                return "Hub graph closure"
            case DiameterCase.disconnected:
                return "Not strongly connected"
