"""Running-time exponents of the engine's operations.

``omega_abc(a, b, c)`` bounds the exponent of multiplying an ``n^a x n^b`` by an ``n^b x n^c`` matrix from a
table of ``omega(1, 1, k)``. :func:`balance` chooses the trade-off parameters (``s``, ``mu``, ``nu``) that minimise
an update-time expression, which is how the defaults of every oracle are picked.
"""

from bisect import bisect_right
from functools import cache
from math import sqrt
from os import path
from typing import Callable, Dict, Final, List, Optional, Sequence, Tuple

from pandas import DataFrame

from .errors import ConfigError
from .types import Mode


TABLE_FILE: Final[str] = path.join(path.dirname(__file__), "omega_table.txt")
GRID_STEP: Final[float] = 0.02
REFINE_ITERATIONS: Final[int] = 40
TIE_TOLERANCE: Final[float] = 1e-7
ZERO: Final[float] = 1e-12

Values = Dict[str, float]


class OmegaTable:
    """Piecewise-linear ``omega(1, 1, k)`` with the lower clamp ``max(2, 1 + k)``."""

    ks: Final[List[float]]
    values: Final[List[float]]

    def __init__(self, ks: Sequence[float], values: Sequence[float]):
        """Create a table from sorted data points.

        Raises:
            ConfigError: If the points are unsorted, of different lengths, or decreasing.
        """
        if len(ks) != len(values) or not ks:
            raise ConfigError("Omega table needs matching, nonempty columns")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ConfigError("Omega table k column must be strictly increasing")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ConfigError("Omega table must be nondecreasing")
        self.ks = list(ks)
        self.values = list(values)

    @staticmethod
    def load(file: str = TABLE_FILE) -> "OmegaTable":
        """Read ``k omega`` lines; ``#`` starts a comment."""
        ks: List[float] = []
        values: List[float] = []
        with open(file) as source:
            for line in source:
                content = line.split("#", 1)[0].split()
                if not content:
                    continue
                if len(content) != 2:
                    raise ConfigError(f"Malformed omega table line: {line.strip()}")
                ks.append(float(content[0]))
                values.append(float(content[1]))
        return OmegaTable(ks, values)

    def __call__(self, k: float) -> float:
        """``omega(1, 1, k)``; beyond the last row the exponent grows with slope 1."""
        floor = max(2.0, 1.0 + k)
        if k >= self.ks[-1]:
            return max(floor, self.values[-1] + (k - self.ks[-1]))
        if k <= self.ks[0]:
            return max(floor, self.values[0])
        i = bisect_right(self.ks, k)
        k0, k1 = self.ks[i - 1], self.ks[i]
        w0, w1 = self.values[i - 1], self.values[i]
        return max(floor, w0 + (w1 - w0) * (k - k0) / (k1 - k0))


TABLE: Final[OmegaTable] = OmegaTable.load()
OMEGA: Final[float] = TABLE(1.0)


def omega_abc(a: float, b: float, c: float, table: Optional[OmegaTable] = None) -> float:
    """Exponent of an ``n^a x n^b`` times ``n^b x n^c`` product; symmetric in its arguments."""
    table = table or TABLE
    a, b, c = sorted((a, b, c), reverse=True)
    if c <= ZERO:
        return a + b
    if abs(a - c) <= ZERO:
        return a * table(1.0)
    if abs(a - b) <= ZERO:
        return a * table(c / a)
    if abs(b - c) <= ZERO:
        return b * table(a / b)
    return min((a - b) + b * table(c / b), (b - c) + c * table(a / c))


class ExprSpec:
    """A maximum of exponent terms in named free parameters."""

    name: Final[str]
    params: Final[Tuple[str, ...]]
    terms: Final[List[Callable[[Values], float]]]
    description: Final[str]
    preprocessing: Optional[Callable[[Values], float]]
    query: Optional[Callable[[Values], float]]

    def __init__(
        self,
        name: str,
        params: Sequence[str],
        terms: List[Callable[[Values], float]],
        description: str = "",
        preprocessing: Optional[Callable[[Values], float]] = None,
        query: Optional[Callable[[Values], float]] = None,
    ):
        """Create an expression.

        Args:
            name (str): Key in :data:`EXPRESSIONS`.
            params (Sequence[str]): Free parameters, outermost first when balancing.
            terms (list of callables): Exponent terms.
            description (str, optional): What the expression bounds. Defaults to "".
            preprocessing (callable, optional): Pre-processing exponent at the balanced point. Defaults to None.
            query (callable, optional): Query exponent at the balanced point. Defaults to None.
        """
        self.name = name
        self.params = tuple(params)
        self.terms = terms
        self.description = description
        self.preprocessing = preprocessing
        self.query = query

    def __call__(self, values: Values) -> float:
        """Evaluate the expression."""
        return max(term(values) for term in self.terms)


def _minimize(objective: Callable[[float], float], low: float = 0.0, high: float = 1.0) -> Tuple[float, float]:
    steps = round((high - low) / GRID_STEP)
    best_x, best_value = low, objective(low)
    for i in range(1, steps + 1):
        x = low + i * GRID_STEP
        value = objective(x)
        if value < best_value:
            best_x, best_value = x, value

    left, right = max(low, best_x - GRID_STEP), min(high, best_x + GRID_STEP)
    ratio = (sqrt(5) - 1) / 2
    x1, x2 = right - ratio * (right - left), left + ratio * (right - left)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(REFINE_ITERATIONS):
        if f1 <= f2:
            right, x2, f2 = x2, x1, f1
            x1 = right - ratio * (right - left)
            f1 = objective(x1)
        else:
            left, x1, f1 = x1, x2, f2
            x2 = left + ratio * (right - left)
            f2 = objective(x2)
    middle = (left + right) / 2
    if objective(middle) < best_value:
        best_x, best_value = middle, objective(middle)

    # smallest parameter within the tie tolerance of the optimum
    left, right = max(low, best_x - GRID_STEP), best_x
    target = best_value + TIE_TOLERANCE
    if objective(left) <= target:
        return left, objective(left)
    for _ in range(REFINE_ITERATIONS):
        middle = (left + right) / 2
        if objective(middle) <= target:
            right = middle
        else:
            left = middle
    return right, objective(right)


def balance(expr: ExprSpec, fixed: Optional[Values] = None) -> Tuple[Values, float]:
    """Minimise ``expr`` over its free parameters in ``[0, 1]``, nesting one search per parameter.

    Args:
        expr (ExprSpec): Expression.
        fixed (Values, optional): Parameters held constant. Defaults to None.

    Returns:
        (dict, float): Balanced parameters and the exponent there.
    """
    fixed = dict(fixed or {})
    free = [name for name in expr.params if name not in fixed]

    def solve(prefix: Values, remaining: List[str]) -> Tuple[Values, float]:
        if not remaining:
            return prefix, expr(prefix)
        name = remaining[0]
        x, _ = _minimize(lambda value: solve({**prefix, name: value}, remaining[1:])[1])
        return solve({**prefix, name: x}, remaining[1:])

    return solve(fixed, free)


def _w(a: float, b: float, c: float) -> float:
    return omega_abc(a, b, c)


@cache
def dual_exponent() -> float:
    """Update and query exponent of the exact dynamic inverse, before adding ``s``."""
    return balance(EXPRESSIONS["dual"])[1]


def _update(v: Values) -> float:
    return dual_exponent() + v["s"]


def _preprocessing(v: Values) -> float:
    return v.get("s", 0.0) + OMEGA


EXPRESSIONS: Final[Dict[str, ExprSpec]] = {
    "dual": ExprSpec(
        "dual",
        ["nu"],
        [lambda v: 1 + v["nu"], lambda v: _w(1, 1, v["nu"]) - v["nu"]],
        "Exact dynamic inverse with row and column queries",
    ),
    "apsp": ExprSpec(
        "apsp",
        ["s", "mu"],
        [
            _update,
            lambda v: _w(1, 1, v["s"] + v["mu"]) - v["mu"],
            lambda v: _w(1, v["s"] + v["mu"], 1 - v["s"]),
            lambda v: _w(1 - v["s"], 1 - v["s"], 1),
        ],
        "All-pairs distances with batch queries",
        _preprocessing,
        lambda v: 1 - v["s"],
    ),
    "apsp-explicit": ExprSpec(
        "apsp-explicit",
        ["s", "mu"],
        [
            _update,
            lambda v: _w(1, 1, v["s"] + v["mu"]) - v["mu"],
            lambda v: _w(1, v["s"] + v["mu"], 1 - v["s"]),
            lambda v: _w(1 - v["s"], 1 - v["s"], 1),
            lambda v: _w(1, v["s"] + v["mu"], 1),
            lambda v: _w(1, 1 - v["s"], 1),
        ],
        "All-pairs distances, full matrix after every update",
        _preprocessing,
    ),
    "sssp": ExprSpec(
        "sssp",
        ["s", "mu"],
        [
            _update,
            lambda v: _w(1, 1, v["s"] + v["mu"]) - v["mu"],
            lambda v: _w(1 - v["s"], v["mu"] + v["s"], 1),
        ],
        "Single-source distances",
        _preprocessing,
    ),
    "undirected": ExprSpec(
        "undirected",
        ["s", "mu"],
        [
            _update,
            lambda v: _w(1, 1, v["s"] + v["mu"]) - v["mu"],
            lambda v: _w(1 - v["s"], v["mu"] + v["s"], 1),
            lambda v: (1 - v["s"]) * OMEGA,
        ],
        "Undirected small-weight distance oracle",
        _preprocessing,
    ),
    "undirected-explicit": ExprSpec(
        "undirected-explicit",
        ["s"],
        [lambda v: _w(1, 1, v["s"]), lambda v: (1 - v["s"]) * OMEGA],
        "Undirected small-weight distances, full matrix after every update",
        _preprocessing,
    ),
    "diameter": ExprSpec(
        "diameter",
        ["s", "mu"],
        [
            _update,
            lambda v: _w(1, 1, v["s"] + v["mu"]) - v["mu"],
            lambda v: _w(0.5, v["s"] + v["mu"], 1),
            lambda v: _w(1 - v["s"], v["mu"] + v["s"], 1 - v["s"]),
            lambda v: (1 - v["s"]) * OMEGA,
        ],
        "Nearly 1.5-approximate diameter",
        _preprocessing,
    ),
    "exact-diameter": ExprSpec(
        "exact-diameter",
        ["s", "mu"],
        [
            lambda v: v["s"] + _w(1, 1, v["mu"]) - v["mu"],
            lambda v: _w(1, v["mu"] + v["s"], 1),
            lambda v: 3 - v["s"],
        ],
        "Exact diameter",
        _preprocessing,
    ),
}

MODE_EXPRESSIONS: Final[Dict[Mode, str]] = {
    Mode.apsp: "apsp",
    Mode.apsp_explicit: "apsp-explicit",
    Mode.sssp: "sssp",
    Mode.undirected: "undirected",
    Mode.diameter15: "diameter",
    Mode.diameter_eps: "diameter",
    Mode.radius: "diameter",
    Mode.ecc: "undirected",
    Mode.closeness: "undirected",
    Mode.exact_diam: "exact-diameter",
}


@cache
def default_parameters(mode: Mode) -> Values:
    """Balanced ``s``, ``mu`` and ``nu`` (``nu = mu``) for the oracle behind ``mode``."""
    if mode not in MODE_EXPRESSIONS:
        return {}
    values, _ = balance(EXPRESSIONS[MODE_EXPRESSIONS[mode]])
    values = {"s": 0.5, "mu": 0.5, **values}
    values.setdefault("nu", values["mu"])
    return values


def exponent_report() -> DataFrame:
    """Balanced parameters and exponents of every expression."""
    rows = []
    for name, expr in EXPRESSIONS.items():
        values, exponent = balance(expr)
        rows.append(
            {
                "expression": name,
                "description": expr.description,
                "s": values.get("s"),
                "mu": values.get("mu"),
                "nu": values.get("nu"),
                "update": round(exponent, 5),
                "query": round(expr.query(values), 5) if expr.query else None,
                "preprocessing": round(expr.preprocessing(values), 5) if expr.preprocessing else None,
            }
        )
    return DataFrame(rows)
