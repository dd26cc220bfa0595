"""Oriented finite metric graphs and their incidence bookkeeping.

Edges come in two kinds.  An :class:`InternalEdge` joins two distinct
vertices and carries a bounded interval ``(a, b)``, with ``a`` at the
initial vertex.  An :class:`ExternalEdge` is a half-line attached to one
vertex; ``rho = -1`` for an outgoing edge ``(endpoint, +inf)`` and
``rho = +1`` for an incoming edge ``(-inf, endpoint)``.

Vertex and edge orders are the insertion orders given to
:class:`MetricGraph`.  Every vector in the boundary (edge) space is laid
out edge by edge: two slots per internal edge (initial vertex first), one
slot per external edge.  The vertex space collects the same evaluation
points vertex by vertex.  :func:`build_W` is the permutation between
the two layouts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import GraphError, UnknownEdge

__all__ = [
    "InternalEdge",
    "ExternalEdge",
    "MetricGraph",
    "incidence_matrix",
    "vertex_degrees",
    "numberings",
    "build_W",
    "flip_orientation",
    "star_graph",
]


@dataclass(frozen=True)
class InternalEdge:
    id: str
    source: str
    target: str
    a: float
    b: float

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def kind(self) -> str:
        return "internal"


@dataclass(frozen=True)
class ExternalEdge:
    id: str
    vertex: str
    rho: int
    endpoint: float = 0.0

    @property
    def kind(self) -> str:
        return "external"

    @property
    def outgoing(self) -> bool:
        return self.rho == -1


Edge = Union[InternalEdge, ExternalEdge]


class MetricGraph:
    """Immutable oriented metric graph with a particle mass.

    Parameters
    ----------
    vertices : sequence of str
        Vertex identifiers; their order is the vertex order.
    edges : sequence of InternalEdge or ExternalEdge
        Edges in edge order (internal and external may interleave).
    mass : float
        Particle mass ``m >= 0``.
    """

    def __init__(self, vertices: Sequence[str], edges: Sequence[Edge], mass: float = 0.0):
        self._vertices = tuple(str(v) for v in vertices)
        self._edges = tuple(edges)
        self._mass = float(mass)
        self._validate()
        self._index = {e.id: i for i, e in enumerate(self._edges)}
        offsets = []
        n = 0
        for e in self._edges:
            offsets.append(n)
            n += 2 if isinstance(e, InternalEdge) else 1
        self._offsets = tuple(offsets)
        self._dim = n

    def _validate(self):
        if not self._vertices:
            raise GraphError("graph needs at least one vertex")
        if not self._edges:
            raise GraphError("graph needs at least one edge")
        if len(set(self._vertices)) != len(self._vertices):
            raise GraphError("vertex identifiers must be unique")
        ids = [e.id for e in self._edges]
        if len(set(ids)) != len(ids):
            raise GraphError("edge identifiers must be unique")
        if not np.isfinite(self._mass) or self._mass < 0:
            raise GraphError(f"mass must be a finite non-negative number, got {self._mass}")
        known = set(self._vertices)
        used = set()
        for e in self._edges:
            if isinstance(e, InternalEdge):
                for v in (e.source, e.target):
                    if v not in known:
                        raise GraphError(f"edge {e.id!r} references unknown vertex {v!r}")
                if e.source == e.target:
                    raise GraphError(
                        f"edge {e.id!r} is a loop at {e.source!r}; insert an extra vertex "
                        "on the loop with continuity conditions instead"
                    )
                if not (np.isfinite(e.a) and np.isfinite(e.b) and e.a < e.b):
                    raise GraphError(f"edge {e.id!r} needs finite a < b, got ({e.a}, {e.b})")
                used.update((e.source, e.target))
            elif isinstance(e, ExternalEdge):
                if e.vertex not in known:
                    raise GraphError(f"edge {e.id!r} references unknown vertex {e.vertex!r}")
                if e.rho not in (-1, 1):
                    raise GraphError(f"edge {e.id!r}: rho must be -1 or +1, got {e.rho}")
                if not np.isfinite(e.endpoint):
                    raise GraphError(f"edge {e.id!r}: endpoint must be finite")
                used.add(e.vertex)
            else:
                raise GraphError(f"unsupported edge object {e!r}")
        isolated = [v for v in self._vertices if v not in used]
        if isolated:
            raise GraphError(f"isolated vertices are not allowed: {isolated}")

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def edges(self) -> tuple:
        return self._edges

    @property
    def mass(self) -> float:
        return self._mass

    @property
    def internal(self) -> tuple:
        return tuple(e for e in self._edges if isinstance(e, InternalEdge))

    @property
    def external(self) -> tuple:
        return tuple(e for e in self._edges if isinstance(e, ExternalEdge))

    @property
    def is_compact(self) -> bool:
        return not self.external

    @property
    def dim(self) -> int:
        """Boundary-space dimension ``N = 2|I| + |E|``."""
        return self._dim

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edges[self._index[edge_id]]
        except KeyError:
            raise UnknownEdge(f"unknown edge {edge_id!r}") from None

    def edge_slice(self, edge_id: str) -> slice:
        """Slots of ``edge_id`` in the edge-ordered boundary space."""
        i = self._index.get(edge_id)
        if i is None:
            raise UnknownEdge(f"unknown edge {edge_id!r}")
        start = self._offsets[i]
        return slice(start, start + (2 if isinstance(self._edges[i], InternalEdge) else 1))

    def with_mass(self, mass: float) -> "MetricGraph":
        return MetricGraph(self._vertices, self._edges, mass)

    def __eq__(self, other):
        if not isinstance(other, MetricGraph):
            return NotImplemented
        return (self._vertices, self._edges, self._mass) == (
            other._vertices,
            other._edges,
            other._mass,
        )

    def __hash__(self):
        return hash((self._vertices, self._edges, self._mass))

    def __repr__(self):
        return (
            f"MetricGraph(|V|={len(self._vertices)}, |I|={len(self.internal)}, "
            f"|E|={len(self.external)}, m={self._mass})"
        )


def _endpoints(e: Edge):
    """(initial, terminal) vertex or None for the point at infinity."""
    if isinstance(e, InternalEdge):
        return e.source, e.target
    if e.rho == -1:
        return e.vertex, None
    return None, e.vertex


def incidence_matrix(g: MetricGraph) -> np.ndarray:
    """|V| x |E| matrix with +1 at terminal and -1 at initial vertices."""
    vidx = {v: i for i, v in enumerate(g.vertices)}
    G = np.zeros((len(g.vertices), len(g.edges)), dtype=int)
    for j, e in enumerate(g.edges):
        start, end = _endpoints(e)
        if start is not None:
            G[vidx[start], j] = -1
        if end is not None:
            G[vidx[end], j] = 1
    return G


def vertex_degrees(g: MetricGraph) -> dict:
    G = incidence_matrix(g)
    return {v: int(np.count_nonzero(G[i])) for i, v in enumerate(g.vertices)}


def numberings(g: MetricGraph):
    """Edge-vertex and vertex-edge numberings of the evaluation points.

    Returns two lists of ``(edge_id, vertex_id)`` pairs of length ``N``.
    The first follows the edge order (initial vertex before terminal
    vertex on internal edges); the second visits vertices in vertex order
    and, at each vertex, its incident edges in edge order.
    """
    edge_vertex = []
    for e in g.edges:
        if isinstance(e, InternalEdge):
            edge_vertex.append((e.id, e.source))
            edge_vertex.append((e.id, e.target))
        else:
            edge_vertex.append((e.id, e.vertex))
    vertex_edge = []
    for v in g.vertices:
        vertex_edge.extend(p for p in edge_vertex if p[1] == v)
    return edge_vertex, vertex_edge


def build_W(g: MetricGraph) -> np.ndarray:
    """Permutation matrix taking edge-ordered to vertex-ordered boundary vectors."""
    edge_vertex, vertex_edge = numberings(g)
    pos = {p: k for k, p in enumerate(edge_vertex)}
    n = len(edge_vertex)
    W = np.zeros((n, n), dtype=int)
    for row, p in enumerate(vertex_edge):
        W[row, pos[p]] = 1
    return W


def flip_orientation(g: MetricGraph, flipped: Iterable[str]):
    """Reverse the orientation of the edges in ``flipped``.

    Internal edges swap source and target, external edges negate ``rho``;
    a flipped interval ``(a, b)`` becomes ``(-b, -a)``.

    Returns
    -------
    graph : MetricGraph
    S : ndarray
        Integer involution on the boundary space; it swaps the two slots of
        every flipped internal edge and is the identity elsewhere, so that
        ``build_W(graph) == build_W(g) @ S``.
    """
    flipped = set(flipped)
    for eid in flipped:
        g.edge(eid)
    edges = []
    S = np.eye(g.dim, dtype=int)
    for e in g.edges:
        if e.id not in flipped:
            edges.append(e)
        elif isinstance(e, InternalEdge):
            edges.append(replace(e, source=e.target, target=e.source, a=-e.b, b=-e.a))
            s = g.edge_slice(e.id)
            S[s, s] = np.array([[0, 1], [1, 0]])
        else:
            edges.append(replace(e, rho=-e.rho, endpoint=-e.endpoint))
    return MetricGraph(g.vertices, edges, g.mass), S


def star_graph(n: int, mass: float = 0.0, vertex: str = "v") -> MetricGraph:
    """One vertex with ``n`` outgoing half-lines ``(0, +inf)``."""
    if n < 1:
        raise GraphError("a star needs at least one edge")
    return MetricGraph([vertex], [ExternalEdge(f"e{i + 1}", vertex, -1, 0.0) for i in range(n)], mass)
