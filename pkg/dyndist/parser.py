"""Readers for the graph and update-stream text formats.

Graph file::

    n m directed|undirected
    u v w
    ...

Stream file, one command per line::

    U u v w        set the weight of (u, v); w may be "inf" to delete
    Q a,b,c;d,e    distances between two node sets
    S src          distances from one source
    D | R | E | C | X

Node tokens are arbitrary strings, interned in first-seen order across both files. Blank lines and lines starting
with ``#`` are skipped.
"""

import re
from math import isinf
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

from ordered_set import OrderedSet

from .errors import ParseError
from .graphenc import DynGraph
from .types import INF, CommandKind


TOKEN = re.compile(r"\S+")

SymbolTable = OrderedSet[str]


class StreamCommand(NamedTuple):
    """One parsed stream line, with nodes resolved to indices."""

    kind: CommandKind
    line: int = 0
    u: int = -1
    v: int = -1
    w: float = INF
    rows: Tuple[int, ...] = ()
    cols: Tuple[int, ...] = ()
    source: int = -1
    text: str = ""

    def __str__(self) -> str:
        """Get the command as written, or formatted with node indices if it was built in code."""
        return self.text or format_command(self)


def format_weight(w: float) -> str:
    """``inf``, an integer, or the shortest float repr."""
    if isinf(w):
        return "inf"
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def format_command(command: StreamCommand, names: Optional[Sequence[str]] = None) -> str:
    """Render a command in the stream format.

    Args:
        command (StreamCommand): Command to render.
        names (Sequence[str], optional): Node names by index. Defaults to the indices themselves.
    """

    def name(node: int) -> str:
        return names[node] if names is not None else str(node)

    match command.kind:
        case CommandKind.update:
            return f"U {name(command.u)} {name(command.v)} {format_weight(command.w)}"
        case CommandKind.query:
            rows = ",".join(name(u) for u in command.rows)
            cols = ",".join(name(v) for v in command.cols)
            return f"Q {rows};{cols}"
        case CommandKind.source:
            return f"S {name(command.source)}"
        case _:
            return command.kind.value


def _tokens(text: str) -> Iterator[Tuple[str, int]]:
    for match in TOKEN.finditer(text):
        yield match.group(), match.start() + 1


def _lines(path: str) -> Iterator[Tuple[int, str]]:
    with open(path, "r", encoding="utf-8") as file:
        for number, text in enumerate(file, start=1):
            stripped = text.strip()
            if stripped and not stripped.startswith("#"):
                yield number, text.rstrip("\n")


def _node(token: str, symbols: SymbolTable, n: int, line: int, column: int) -> int:
    if token not in symbols and len(symbols) >= n:
        raise ParseError(f"Node '{token}' would be node {len(symbols) + 1} of a graph with {n} nodes", line, column)
    return symbols.add(token)


def _weight(token: str, line: int, column: int, allow_infinite: bool) -> float:
    if token.lower() == "inf":
        if not allow_infinite:
            raise ParseError("Initial edges need a finite weight", line, column)
        return INF
    try:
        w = float(token)
    except ValueError:
        raise ParseError(f"Weight '{token}' is not a number", line, column)
    if not w >= 1 or isinf(w):
        raise ParseError(f"Weight {token} is invalid, weights must be >= 1", line, column)
    return w


def parse_graph(path: str, symbols: Optional[SymbolTable] = None) -> DynGraph:
    """Read a graph file.

    Args:
        path (str): File to read.
        symbols (SymbolTable, optional): Table node names are interned into; pass the same table to
            :func:`parse_stream`. Defaults to a fresh table.

    Raises:
        ParseError: On a malformed header or edge line, repeated edges, self-loops, too many distinct nodes, or an
            edge count that does not match the header.

    Returns:
        DynGraph: Graph with unbounded ``W``.
    """
    symbols = OrderedSet() if symbols is None else symbols
    lines = _lines(path)
    header = next(lines, None)
    if header is None:
        raise ParseError(f"Graph file {path} is empty", 1, 1)
    number, text = header
    fields = list(_tokens(text))
    if len(fields) != 3:
        raise ParseError("Header must be 'n m directed|undirected'", number, 1)
    try:
        n, m = int(fields[0][0]), int(fields[1][0])
    except ValueError:
        raise ParseError("Node and edge counts must be integers", number, 1)
    if n < 1 or m < 0:
        raise ParseError(f"Invalid counts n={n}, m={m}", number, 1)
    if fields[2][0] not in ("directed", "undirected"):
        raise ParseError(f"Expected 'directed' or 'undirected', got '{fields[2][0]}'", number, fields[2][1])

    graph = DynGraph(n, directed=fields[2][0] == "directed")
    count = 0
    for number, text in lines:
        fields = list(_tokens(text))
        if len(fields) != 3:
            raise ParseError("Edge lines must be 'u v w'", number, 1)
        (a, a_column), (b, b_column), (w, w_column) = fields
        u = _node(a, symbols, n, number, a_column)
        v = _node(b, symbols, n, number, b_column)
        if u == v:
            raise ParseError(f"Self-loop on '{a}'", number, b_column)
        if not isinf(graph.weight(u, v)):
            raise ParseError(f"Edge '{a}' '{b}' appears twice", number, a_column)
        graph.set_weight(u, v, _weight(w, number, w_column, allow_infinite=False))
        count += 1
    if count != m:
        raise ParseError(f"Header announces {m} edges, found {count}", 1, 1)
    return graph


def _node_list(token: str, symbols: SymbolTable, n: int, line: int, column: int) -> Tuple[int, ...]:
    nodes = []
    offset = 0
    for name in token.split(","):
        if not name:
            raise ParseError("Empty node name in list", line, column + offset)
        nodes.append(_node(name, symbols, n, line, column + offset))
        offset += len(name) + 1
    return tuple(nodes)


def parse_command(text: str, symbols: SymbolTable, n: int, line: int = 0) -> StreamCommand:
    """Parse one stream line.

    Raises:
        ParseError: If the line is not a valid command.
    """
    fields = list(_tokens(text))
    letter, column = fields[0]
    try:
        kind = CommandKind(letter)
    except ValueError:
        raise ParseError(f"Unknown command '{letter}'", line, column)
    arguments = fields[1:]

    match kind:
        case CommandKind.update:
            if len(arguments) != 3:
                raise ParseError("Update needs 'U u v w'", line, column)
            (a, a_column), (b, b_column), (w, w_column) = arguments
            u = _node(a, symbols, n, line, a_column)
            v = _node(b, symbols, n, line, b_column)
            if u == v:
                raise ParseError(f"Self-loop on '{a}'", line, b_column)
            return StreamCommand(kind, line, u=u, v=v, w=_weight(w, line, w_column, True), text=text.strip())
        case CommandKind.query:
            if len(arguments) != 1 or arguments[0][0].count(";") != 1:
                raise ParseError("Query needs 'Q a,b,...;c,d,...'", line, column)
            sets, sets_column = arguments[0]
            left, right = sets.split(";")
            rows = _node_list(left, symbols, n, line, sets_column)
            cols = _node_list(right, symbols, n, line, sets_column + len(left) + 1)
            return StreamCommand(kind, line, rows=rows, cols=cols, text=text.strip())
        case CommandKind.source:
            if len(arguments) != 1:
                raise ParseError("Source query needs 'S src'", line, column)
            source = _node(arguments[0][0], symbols, n, line, arguments[0][1])
            return StreamCommand(kind, line, source=source, text=text.strip())
        case _:
            if arguments:
                raise ParseError(f"Command '{letter}' takes no arguments", line, arguments[0][1])
            return StreamCommand(kind, line, text=text.strip())


def parse_stream(path: str, symbols: SymbolTable, n: int) -> List[StreamCommand]:
    """Read a stream file against the symbol table filled by :func:`parse_graph`.

    Args:
        path (str): File to read.
        symbols (SymbolTable): Node names seen so far; new names are interned while there is room.
        n (int): Number of nodes of the graph.

    Raises:
        ParseError: On the first malformed line.
    """
    return [parse_command(text, symbols, n, number) for number, text in _lines(path)]
