"""Orientation flip (P), time reversal (T) and charge conjugation (C).

T and C are antilinear, so they act on transmission conditions by entrywise
conjugation; all decisions compare relation subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import InternalEdge, MetricGraph, build_W, flip_orientation
from .problem import SpectralProblem
from .transmission import GlobalConditions, relation_subspace, _max_angle_sine, ANGLE_TOL

__all__ = [
    "SymmetryVerdict",
    "parity_transform",
    "charge_multiplier",
    "edge_charge_matrix",
    "is_T_symmetric",
    "is_C_symmetric",
    "conjugate_conditions",
    "charge_conditions",
    "spectrum_closed_under",
]


@dataclass(frozen=True)
class SymmetryVerdict:
    """``angle`` is the sine of the largest principal angle between the two relations (1 if dimensions differ)."""

    symmetric: bool
    angle: float

    def __bool__(self):
        return self.symmetric


def _compare(A, B, A2, B2) -> SymmetryVerdict:
    U, V = relation_subspace(A, B), relation_subspace(A2, B2)
    if U.dim != V.dim:
        return SymmetryVerdict(False, 1.0)
    s = _max_angle_sine(U.basis, V.basis)
    return SymmetryVerdict(bool(s < ANGLE_TOL), s)


def parity_transform(p: SpectralProblem, flipped: Iterable[str]):
    """Problem on the graph with ``flipped`` edges reversed and the same vertex-space relation.

    Returns the new problem and the involution ``S`` with ``W_new = W S``.
    """
    g, S = flip_orientation(p.graph, flipped)
    c = p.conditions
    cond = GlobalConditions(c.A, c.B, build_W(g), c.local, c.blocks)
    return SpectralProblem(g, cond), S


def edge_charge_matrix(g: MetricGraph) -> np.ndarray:
    """Edge-ordered diagonal ``diag(i, -i)`` per internal edge and ``-i rho`` per external edge."""
    d = []
    for e in g.edges:
        d.extend([1j, -1j] if isinstance(e, InternalEdge) else [-1j * e.rho])
    return np.diag(np.array(d, dtype=complex))


def charge_multiplier(g: MetricGraph, W=None) -> np.ndarray:
    """``M = W V W^{-1}`` in the vertex-ordered basis; diagonal with entries ``+-i``."""
    W = build_W(g) if W is None else W
    return W @ edge_charge_matrix(g) @ W.T


def conjugate_conditions(c: GlobalConditions) -> GlobalConditions:
    return c.with_matrices(c.A.conj(), c.B.conj())


def charge_conditions(c: GlobalConditions, g: MetricGraph) -> GlobalConditions:
    M = charge_multiplier(g, c.W)
    return c.with_matrices(c.B.conj() @ M, c.A.conj() @ M)


def is_T_symmetric(c: GlobalConditions) -> SymmetryVerdict:
    return _compare(c.A, c.B, c.A.conj(), c.B.conj())


def is_C_symmetric(c: GlobalConditions, g: MetricGraph) -> SymmetryVerdict:
    cc = charge_conditions(c, g)
    return _compare(c.A, c.B, cc.A, cc.B)


def spectrum_closed_under(values, transform, tol: float = 1e-8):
    """Largest distance from ``transform(z)`` to the nearest value, over all ``z``.

    Returns ``(closed, distance)``.
    """
    v = np.asarray(values, dtype=complex)
    if v.size == 0:
        return True, 0.0
    t = transform(v)
    dist = float(np.max(np.min(np.abs(t[:, None] - v[None, :]), axis=1)))
    return dist < tol, dist
