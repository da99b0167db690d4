"""Directed networks, marker traces and the consistency predicates.

Nodes are dense integer ids ``0..N-1``.  A marker trace is a tuple of
distinct node ids in infection order; the first entry is the originator.
"""

from __future__ import annotations

import os
import tempfile
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

MarkerTrace = tuple[int, ...]
Edge = tuple[int, int]


class ParseError(ValueError):
    """Malformed network or trace file."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(where + message)


@dataclass(frozen=True)
class Network:
    node_count: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.node_count <= 0:
            raise ValueError(f"node_count must be positive, got {self.node_count}")
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop ({u}, {v})")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge ({u}, {v}) out of range for N={self.node_count}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Edge] = ()) -> "Network":
        return cls(node_count, frozenset(edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge: object) -> bool:
        return edge in self.edges

    @cached_property
    def out_neighbors(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            out[u].add(v)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def in_neighbors(self) -> tuple[frozenset[int], ...]:
        inn: list[set[int]] = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            inn[v].add(u)
        return tuple(frozenset(s) for s in inn)

    def out_degree(self, node: int) -> int:
        return len(self.out_neighbors[node])

    def in_degree(self, node: int) -> int:
        return len(self.in_neighbors[node])

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def validate_trace(trace: Sequence[int], node_count: int) -> MarkerTrace:
    """Return ``trace`` as a tuple, raising ``ValueError`` if it is not a valid trace."""
    t = tuple(int(w) for w in trace)
    if not t:
        raise ValueError("marker trace must contain at least one node")
    for w in t:
        if not 0 <= w < node_count:
            raise ValueError(f"node id {w} out of range for N={node_count}")
    if len(set(t)) != len(t):
        raise ValueError(f"marker trace has repeated nodes: {t}")
    return t


@dataclass(frozen=True)
class MarkerDataset:
    node_count: int
    traces: tuple[MarkerTrace, ...] = ()

    def __post_init__(self) -> None:
        if self.node_count <= 0:
            raise ValueError(f"node_count must be positive, got {self.node_count}")
        traces = tuple(validate_trace(t, self.node_count) for t in self.traces)
        object.__setattr__(self, "traces", traces)

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)

    def __getitem__(self, i: int) -> MarkerTrace:
        return self.traces[i]

    def head(self, count: int) -> "MarkerDataset":
        return MarkerDataset(self.node_count, self.traces[:count])


def is_locally_consistent(net: Network, trace: Sequence[int]) -> bool:
    """True iff every non-originator report has an in-edge from an earlier reporter."""
    t = validate_trace(trace, net.node_count)
    inn = net.in_neighbors
    seen = {t[0]}
    for w in t[1:]:
        if inn[w].isdisjoint(seen):
            return False
        seen.add(w)
    return True


def is_globally_consistent(net: Network, trace: Sequence[int]) -> bool:
    """True iff each reporter is reachable from the originator through a path
    that only visits nodes reported no later than itself.

    Deliberately written as a reachability search per prefix rather than in
    terms of in-edges, so it can serve as an independent check on
    :func:`is_locally_consistent`.
    """
    t = validate_trace(trace, net.node_count)
    out = net.out_neighbors
    for j in range(1, len(t)):
        allowed = set(t[: j + 1])
        target = t[j]
        reached = {t[0]}
        queue = deque([t[0]])
        while queue and target not in reached:
            u = queue.popleft()
            for x in out[u]:
                if x in allowed and x not in reached:
                    reached.add(x)
                    queue.append(x)
        if target not in reached:
            return False
    return True


# -- serialization ----------------------------------------------------------


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename, so a failed write
    never leaves a partial file behind."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _parse_ints(line: str, lineno: int, path: str | None) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(f"expected integers, got {line!r}", lineno, path) from None


def _parse_header(lines, path: str | None) -> int:
    try:
        lineno, line = next(lines)
    except StopIteration:
        raise ParseError("missing 'N <node_count>' header", None, path) from None
    parts = line.split()
    if len(parts) != 2 or parts[0] != "N":
        raise ParseError(f"expected 'N <node_count>' header, got {line!r}", lineno, path)
    try:
        n = int(parts[1])
    except ValueError:
        raise ParseError(f"bad node count {parts[1]!r}", lineno, path) from None
    if n <= 0:
        raise ParseError(f"node count must be positive, got {n}", lineno, path)
    return n


def format_network(net: Network) -> str:
    rows = [f"N {net.node_count}"]
    rows.extend(f"{u} {v}" for u, v in net.sorted_edges())
    return "\n".join(rows) + "\n"


def parse_network(text: str, path: str | None = None) -> Network:
    lines = _content_lines(text)
    n = _parse_header(lines, path)
    edges: set[Edge] = set()
    for lineno, line in lines:
        vals = _parse_ints(line, lineno, path)
        if len(vals) != 2:
            raise ParseError(f"expected 'src dst', got {line!r}", lineno, path)
        u, v = vals
        if u == v:
            raise ParseError(f"self-loop {u} -> {v}", lineno, path)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"edge {u} -> {v} out of range for N={n}", lineno, path)
        if (u, v) in edges:
            raise ParseError(f"duplicate edge {u} -> {v}", lineno, path)
        edges.add((u, v))
    return Network(n, frozenset(edges))


def save_network(net: Network, path: str | os.PathLike) -> None:
    atomic_write_text(path, format_network(net))


def load_network(path: str | os.PathLike) -> Network:
    return parse_network(Path(path).read_text(), str(path))


def format_traces(ds: MarkerDataset) -> str:
    rows = [f"N {ds.node_count}"]
    rows.extend(" ".join(map(str, t)) for t in ds.traces)
    return "\n".join(rows) + "\n"


def parse_traces(
    text: str, path: str | None = None, node_count: int | None = None
) -> MarkerDataset:
    """Parse a trace file.  A file with no content at all has no header; it is
    accepted as an empty dataset only when ``node_count`` is supplied."""
    lines = _content_lines(text)
    if not any(True for _ in _content_lines(text)) and node_count is not None:
        return MarkerDataset(node_count)
    n = _parse_header(lines, path)
    if node_count is not None and node_count != n:
        raise ParseError(f"header says N={n}, expected N={node_count}", None, path)
    traces: list[MarkerTrace] = []
    for lineno, line in lines:
        t = _parse_ints(line, lineno, path)
        for w in t:
            if not 0 <= w < n:
                raise ParseError(f"node id {w} out of range for N={n}", lineno, path)
        if len(set(t)) != len(t):
            raise ParseError(f"trace repeats a node: {line!r}", lineno, path)
        traces.append(tuple(t))
    return MarkerDataset(n, tuple(traces))


def save_traces(ds: MarkerDataset, path: str | os.PathLike) -> None:
    atomic_write_text(path, format_traces(ds))


def load_traces(path: str | os.PathLike, node_count: int | None = None) -> MarkerDataset:
    return parse_traces(Path(path).read_text(), str(path), node_count)
