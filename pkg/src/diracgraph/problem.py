"""Problem container and spinor fields on a graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import SizeMismatch
from .graph import InternalEdge, MetricGraph
from .transmission import GlobalConditions

__all__ = ["SpectralProblem", "GraphSpinor", "boundary_values"]


@dataclass(frozen=True, eq=False)
class SpectralProblem:
    graph: MetricGraph
    conditions: GlobalConditions

    def __post_init__(self):
        if self.conditions.N != self.graph.dim:
            raise SizeMismatch(
                f"conditions act on C^{self.conditions.N} but the graph has {self.graph.dim} boundary slots"
            )

    @property
    def mass(self) -> float:
        return self.graph.mass

    @property
    def N(self) -> int:
        return self.graph.dim


@dataclass(frozen=True, eq=False)
class GraphSpinor:
    """A C^2-valued function given edge by edge.

    ``parts`` maps edge ids to callables ``x -> array(x.shape + (2,))``.
    """

    parts: Mapping[str, Callable] = field(default_factory=dict)

    def evaluate(self, edge_id: str, x) -> np.ndarray:
        return self.parts[edge_id](np.asarray(x, dtype=float))

    def __getitem__(self, edge_id):
        return self.parts[edge_id]


def boundary_values(g: MetricGraph, psi: GraphSpinor):
    """Edge-ordered boundary vectors ``(Gamma1 psi, Gamma2 psi)``."""
    g1 = np.zeros(g.dim, dtype=complex)
    g2 = np.zeros(g.dim, dtype=complex)
    for e in g.edges:
        s = g.edge_slice(e.id)
        if isinstance(e, InternalEdge):
            va, vb = psi.evaluate(e.id, np.array([e.a, e.b]))
            g1[s] = va[0], vb[0]
            g2[s] = 1j * va[1], -1j * vb[1]
        else:
            (v,) = psi.evaluate(e.id, np.array([e.endpoint]))
            g1[s] = v[0]
            g2[s] = -1j * e.rho * v[1]
    return g1, g2
