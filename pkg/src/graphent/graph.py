"""Undirected simple graphs: edge-list I/O, named families, degree queries."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import ParseError, ValidationError

GRAPH_KINDS = ("chain", "claw", "complete", "cycle", "star")


@dataclass(frozen=True)
class Graph:
    """Graph on vertices ``0..n_vertices-1``; vertex ``i`` is qubit ``q[i]``.

    ``edges`` holds normalized pairs ``(i, j)`` with ``i < j``.
    """

    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]] = ()):
        if n_vertices < 0:
            raise ValidationError(f"vertex count must be nonnegative, got {n_vertices}")
        normalized = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValidationError(f"self-loop at vertex {i}")
            for v in (i, j):
                if not 0 <= v < n_vertices:
                    raise ValidationError(
                        f"edge ({i}, {j}) endpoint {v} out of range [0, {n_vertices})"
                    )
            normalized.add((i, j) if i < j else (j, i))
        object.__setattr__(self, "n_vertices", int(n_vertices))
        object.__setattr__(self, "edges", frozenset(normalized))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def is_connected(self) -> bool:
        if self.n_vertices <= 1:
            return True
        adj: dict[int, list[int]] = {v: [] for v in range(self.n_vertices)}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n_vertices


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n_vertices:
        raise ValidationError(f"vertex {v} out of range [0, {g.n_vertices})")


def degree(g: Graph, v: int) -> int:
    """Number of edges incident to ``v``."""
    _check_vertex(g, v)
    return sum(1 for e in g.edges if v in e)


def neighborhood(g: Graph, v: int, closed: bool = False) -> list[int]:
    """Sorted neighbors of ``v``; with ``closed=True`` ``v`` itself is included."""
    _check_vertex(g, v)
    out = {j if i == v else i for i, j in g.edges if v in (i, j)}
    if closed:
        out.add(v)
    return sorted(out)


def parse_edge_list(text: str) -> Graph:
    """Parse the ``n <count>`` header plus ``i j`` lines format.

    Blank lines and lines starting with ``#`` are skipped. Duplicate edges,
    in either orientation, collapse to one.
    """
    n_vertices = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n_vertices is None:
            if len(parts) != 2 or parts[0] != "n":
                raise ParseError(f"expected header 'n <vertex_count>', got {line!r}", lineno)
            n_vertices = _parse_int(parts[1], lineno)
            if n_vertices < 0:
                raise ParseError(f"vertex count must be nonnegative, got {n_vertices}", lineno)
            continue
        if len(parts) != 2:
            raise ParseError(f"expected 'i j', got {line!r}", lineno)
        i, j = (_parse_int(p, lineno) for p in parts)
        if i == j:
            raise ValidationError(f"line {lineno}: self-loop at vertex {i}")
        for v in (i, j):
            if not 0 <= v < n_vertices:
                raise ValidationError(
                    f"line {lineno}: endpoint {v} out of range [0, {n_vertices})"
                )
        edges.append((i, j))
    if n_vertices is None:
        raise ParseError("missing header 'n <vertex_count>'")
    return Graph(n_vertices, edges)


def _parse_int(token: str, lineno: int) -> int:
    if not token.lstrip("-").isdecimal():
        raise ParseError(f"not a decimal integer: {token!r}", lineno)
    return int(token)


def serialize_edge_list(g: Graph) -> str:
    lines = [f"n {g.n_vertices}"]
    lines.extend(f"{i} {j}" for i, j in g.sorted_edges())
    return "\n".join(lines) + "\n"


def generate_named(kind: str, n: int) -> Graph:
    """Build one of the named families.

    ``claw`` is fixed at 4 vertices with hub 1 and leaves 0, 2, 3. ``star``
    is the general version with hub 0.
    """
    if kind not in GRAPH_KINDS:
        raise ValidationError(f"unknown graph kind {kind!r}; expected one of {GRAPH_KINDS}")
    if n < 1:
        raise ValidationError(f"{kind} needs at least 1 vertex, got {n}")
    if kind == "chain":
        return Graph(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "claw":
        if n != 4:
            raise ValidationError(f"claw has exactly 4 vertices, got {n}")
        return Graph(4, [(1, 0), (1, 2), (1, 3)])
    if kind == "complete":
        return Graph(n, combinations(range(n), 2))
    if kind == "cycle":
        if n < 3:
            raise ValidationError(f"cycle needs at least 3 vertices, got {n}")
        return Graph(n, [(i, (i + 1) % n) for i in range(n)])
    return Graph(n, [(0, i) for i in range(1, n)])
