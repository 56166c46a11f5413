"""Random graphs, update streams and the adaptive adversary used by tests and scenarios."""

from collections import deque
from math import ceil, isinf
from typing import Any, Deque, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ff_poly import make_rng
from .graphenc import DynGraph
from .logging import log
from .parser import StreamCommand, format_command, format_weight
from .types import INF, CommandKind, DistMatrix, LogLevel, Number


class WeightSampler:
    """Source of edge weights."""

    low: float
    high: Optional[float]
    integral: bool

    def __init__(self, low: float = 1.0, high: Optional[float] = None, integral: bool = True):
        """Create a sampler whose draws are clamped to ``[low, high]`` and rounded up when integral."""
        self.low = max(1.0, low)
        self.high = high
        self.integral = integral

    @staticmethod
    def _from_yaml(params: Number | Dict, rng: Optional[np.random.Generator] = None) -> "WeightSampler":
        """A constant for a bare number, otherwise a distribution.

        Example::

            weights:
              distribution: integers
              parameters: {low: 1, high: 5}
              high: 4
        """
        if isinstance(params, int | float):
            return StaticWeight(params)
        if "value" in params:
            return StaticWeight(params["value"])
        if "distribution" in params:
            return DistributionWeight(
                params["distribution"],
                params.get("parameters", {}),
                rng,
                params.get("low", 1.0),
                params.get("high", None),
                params.get("integral", True),
            )
        raise ValueError(f"Unable to parse weight sampler: {params}")

    def _clamp(self, value: float) -> float:
        value = max(self.low, value)
        if self.high is not None:
            value = min(self.high, value)
        return float(ceil(value)) if self.integral else float(value)

    def next(self) -> float:
        """One weight."""
        return self._clamp(self.low)


class StaticWeight(WeightSampler):
    value: float

    def __init__(self, value: Number):
        super().__init__(value, value, float(value).is_integer())
        self.value = float(value)

    def next(self) -> float:
        return self._clamp(self.value)


class DistributionWeight(WeightSampler):
    rng: np.random.Generator
    np_function: Any
    parameters: Dict

    def __init__(
        self,
        np_generator: str,
        parameters: Dict,
        rng: Optional[np.random.Generator] = None,
        low: float = 1.0,
        high: Optional[float] = None,
        integral: bool = True,
    ):
        super().__init__(low, high, integral)
        self.rng = rng or make_rng()
        self.np_function = getattr(self.rng, np_generator)
        self.parameters = parameters

    def next(self) -> float:
        return self._clamp(float(self.np_function(**self.parameters)))


def _sampler(weights: Optional[WeightSampler | Number], rng: np.random.Generator) -> WeightSampler:
    if weights is None:
        return DistributionWeight("integers", {"low": 1, "high": 5}, rng)
    if isinstance(weights, WeightSampler):
        return weights
    return StaticWeight(weights)


def gnp_graph(
    n: int,
    p: float,
    weights: Optional[WeightSampler | Number] = None,
    directed: bool = True,
    rng: Optional[np.random.Generator] = None,
) -> DynGraph:
    """Every ordered pair (unordered when undirected) becomes an edge with probability ``p``.

    Args:
        weights (WeightSampler or number, optional): Weight source. Defaults to uniform integers in ``[1, 4]``.
    """
    rng = rng or make_rng()
    sampler = _sampler(weights, rng)
    graph = DynGraph(n, directed)
    for u in range(n):
        for v in range(n) if directed else range(u + 1, n):
            if u != v and rng.random() < p:
                graph.set_weight(u, v, sampler.next())
    return graph


def cycle_graph(n: int, directed: bool = True, weight: Number = 1) -> DynGraph:
    """``0 -> 1 -> ... -> n-1 -> 0``."""
    graph = DynGraph(n, directed)
    for u in range(n if n > 2 or directed else n - 1):
        if u != (u + 1) % n:
            graph.set_weight(u, (u + 1) % n, weight)
    return graph


def path_graph(n: int, directed: bool = False, weight: Number = 1) -> DynGraph:
    """``0 - 1 - ... - n-1``."""
    graph = DynGraph(n, directed)
    for u in range(n - 1):
        graph.set_weight(u, u + 1, weight)
    return graph


def star_graph(n: int, weight: Number = 1) -> DynGraph:
    """Undirected star around node 0."""
    graph = DynGraph(n, directed=False)
    for v in range(1, n):
        graph.set_weight(0, v, weight)
    return graph


def complete_graph(n: int, directed: bool = False, weight: Number = 1) -> DynGraph:
    """All pairs adjacent."""
    graph = DynGraph(n, directed)
    for u in range(n):
        for v in range(n):
            if u != v and (directed or u < v):
                graph.set_weight(u, v, weight)
    return graph


def random_connected_graph(
    n: int,
    p: float = 0.0,
    weights: Optional[WeightSampler | Number] = None,
    rng: Optional[np.random.Generator] = None,
) -> DynGraph:
    """Undirected random tree plus every other pair with probability ``p``."""
    rng = rng or make_rng()
    sampler = _sampler(weights, rng)
    graph = gnp_graph(n, p, sampler, directed=False, rng=rng)
    order = rng.permutation(n)
    for i in range(1, n):
        parent = int(order[rng.integers(i)])
        graph.set_weight(parent, int(order[i]), sampler.next())
    return graph


def strongly_connected_graph(
    n: int,
    p: float = 0.0,
    weights: Optional[WeightSampler | Number] = None,
    rng: Optional[np.random.Generator] = None,
) -> DynGraph:
    """Directed cycle through a random node order plus every other ordered pair with probability ``p``."""
    rng = rng or make_rng()
    sampler = _sampler(weights, rng)
    graph = gnp_graph(n, p, sampler, directed=True, rng=rng)
    order = rng.permutation(n)
    for i in range(n if n > 1 else 0):
        graph.set_weight(int(order[i]), int(order[(i + 1) % n]), sampler.next())
    return graph


FAMILIES = {
    "gnp": gnp_graph,
    "cycle": cycle_graph,
    "path": path_graph,
    "star": star_graph,
    "complete": complete_graph,
    "connected": random_connected_graph,
    "strongly-connected": strongly_connected_graph,
}


def generate_graph(params: Dict[str, Any], rng: Optional[np.random.Generator] = None) -> DynGraph:
    """Build a graph from a definition like ``{family: gnp, n: 64, p: 0.1, weights: {...}}``.

    Raises:
        ValueError: On an unknown family.
    """
    rng = rng or make_rng()
    params = dict(params)
    family = params.pop("family", "gnp")
    if family not in FAMILIES:
        raise ValueError(f"Unknown graph family '{family}'")
    if "weights" in params:
        params["weights"] = WeightSampler._from_yaml(params["weights"], rng)
    if family in ("gnp", "connected", "strongly-connected"):
        params["rng"] = rng
    graph = FAMILIES[family](**params)
    log(f"Generated {family} graph {graph}", LogLevel.verbose)
    return graph


def random_stream(
    graph: DynGraph,
    count: int,
    kind: CommandKind = CommandKind.query,
    weights: Optional[WeightSampler | Number] = None,
    rng: Optional[np.random.Generator] = None,
    update_share: float = 0.5,
    delete_share: float = 0.25,
    query_size: int = 3,
) -> List[StreamCommand]:
    """Random updates mixed with commands of one kind.

    Updates pick a random pair; an existing edge is deleted with probability ``delete_share``, otherwise the pair
    gets a fresh weight.

    Args:
        graph (DynGraph): Starting graph; not modified.
        count (int): Number of commands.
        kind (CommandKind, optional): Kind of the non-update commands. Defaults to batch queries.
        weights (WeightSampler or number, optional): Weight source. Defaults to uniform integers in ``[1, 4]``.
        rng (np.random.Generator, optional): Randomness. Defaults to a Philox generator.
        update_share (float, optional): Probability of an update. Defaults to 0.5.
        delete_share (float, optional): Probability that an update of an existing edge deletes it. Defaults to 0.25.
        query_size (int, optional): Size of each node set of a batch query. Defaults to 3.
    """
    rng = rng or make_rng()
    sampler = _sampler(weights, rng)
    current = graph.copy()
    n = graph.n
    commands: List[StreamCommand] = []
    for line in range(1, count + 1):
        if n > 1 and rng.random() < update_share:
            u, v = (int(x) for x in rng.choice(n, size=2, replace=False))
            exists = not isinf(current.weight(u, v))
            w = INF if exists and rng.random() < delete_share else sampler.next()
            current.set_weight(u, v, w)
            commands.append(StreamCommand(CommandKind.update, line, u=u, v=v, w=w))
            continue
        match kind:
            case CommandKind.query:
                size = min(n, query_size)
                rows = tuple(sorted(int(x) for x in rng.choice(n, size=size, replace=False)))
                cols = tuple(sorted(int(x) for x in rng.choice(n, size=size, replace=False)))
                commands.append(StreamCommand(kind, line, rows=rows, cols=cols))
            case CommandKind.source:
                commands.append(StreamCommand(kind, line, source=int(rng.integers(n))))
            case _:
                commands.append(StreamCommand(kind, line))
    return commands


class AdaptiveAdversary:
    """Deletes an edge of the shortest-path tree revealed by the last single-source answer.

    Deleted edges come back with their old weight once more than ``keep`` of them are missing, so the graph never
    runs out of edges.
    """

    graph: DynGraph
    source: int
    rng: np.random.Generator
    keep: int
    deleted: Deque[Tuple[int, int, float]]

    def __init__(self, graph: DynGraph, source: int = 0, rng: Optional[np.random.Generator] = None, keep: int = 0):
        """Follow ``graph`` (copied) from ``source``; ``keep`` defaults to ``n``."""
        self.graph = graph.copy()
        self.source = source
        self.rng = rng or make_rng()
        self.keep = keep or graph.n
        self.deleted = deque()

    def tree_arcs(self, row: DistMatrix) -> List[Tuple[int, int, float]]:
        """For every reached node, the in-arc that best explains its reported distance."""
        best: Dict[int, Tuple[float, int, float]] = {}
        for u, v, w in self.graph.arcs():
            if v == self.source or isinf(row[u]) or isinf(row[v]):
                continue
            if v not in best or row[u] + w < best[v][0]:
                best[v] = (row[u] + w, u, w)
        return [(u, v, w) for v, (_, u, w) in sorted(best.items())]

    def next_updates(self, row: DistMatrix) -> List[StreamCommand]:
        """Updates to apply after the oracle answered ``row``: one deletion, and possibly one reinsertion."""
        updates: List[StreamCommand] = []
        arcs = self.tree_arcs(row)
        if arcs:
            u, v, w = arcs[int(self.rng.integers(len(arcs)))]
            self.graph.set_weight(u, v, INF)
            self.deleted.append((u, v, w))
            updates.append(StreamCommand(CommandKind.update, u=u, v=v, w=INF))
        if len(self.deleted) > self.keep or (not arcs and self.deleted):
            u, v, w = self.deleted.popleft()
            self.graph.set_weight(u, v, w)
            updates.append(StreamCommand(CommandKind.update, u=u, v=v, w=w))
        return updates


def write_graph(graph: DynGraph, file: str, names: Optional[Sequence[str]] = None):
    """Write ``graph`` in the graph file format.

    Args:
        names (Sequence[str], optional): Node names by index. Defaults to the indices.
    """

    def name(node: int) -> str:
        return names[node] if names is not None else str(node)

    with open(file, "w", encoding="utf-8") as out:
        out.write(f"{graph.n} {graph.m} {'directed' if graph.directed else 'undirected'}\n")
        for u, v, w in graph.edges():
            out.write(f"{name(u)} {name(v)} {format_weight(w)}\n")


def write_stream(commands: Sequence[StreamCommand], file: str, names: Optional[Sequence[str]] = None):
    """Write commands in the stream format, one per line."""
    with open(file, "w", encoding="utf-8") as out:
        for command in commands:
            out.write(format_command(command, names) + "\n")
