"""Transmission conditions ``A W Gamma1 phi = B W Gamma2 phi`` and their algebra.

A pair ``(A, B)`` of N x N matrices on the vertex-ordered boundary space
represents the linear relation ``ker [A | -B]`` in ``C^N + C^N``.  Two pairs
represent the same relation iff these kernels coincide, which is how all
comparisons below are made.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import ConditionError, MissingVertex, NonSquare, SizeMismatch
from .graph import MetricGraph, build_W, vertex_degrees

__all__ = [
    "VertexConditions",
    "GlobalConditions",
    "assemble_global",
    "global_conditions",
    "SelfAdjointVerdict",
    "is_self_adjoint",
    "RelationSubspace",
    "relation_subspace",
    "relations_equal",
    "RankStatus",
    "rank_deficiency",
    "adjoint_relation",
]

ANGLE_TOL = 1e-8
SA_TOL = 1e-10
RANK_TOL = 1e-10


def _square(M, name):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {M.shape}")
    return M


@dataclass(frozen=True)
class VertexConditions:
    vertex: str
    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = _square(self.A, f"A at vertex {self.vertex!r}")
        B = _square(self.B, f"B at vertex {self.vertex!r}")
        if A.shape != B.shape:
            raise SizeMismatch(f"A and B at vertex {self.vertex!r} differ in shape: {A.shape} vs {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)


@dataclass(frozen=True, eq=False)
class GlobalConditions:
    """Global pair ``(A, B)`` together with the permutation ``W``.

    ``blocks`` lists ``(vertex, start, stop)`` ranges of the vertex-ordered
    basis when the conditions are local, and is empty otherwise.
    """

    A: np.ndarray
    B: np.ndarray
    W: np.ndarray
    local: bool = False
    blocks: tuple = field(default=())

    @property
    def N(self) -> int:
        return self.A.shape[0]

    @property
    def AW(self) -> np.ndarray:
        return self.A @ self.W

    @property
    def BW(self) -> np.ndarray:
        return self.B @ self.W

    def vertex_block(self, vertex: str) -> VertexConditions:
        for v, i, j in self.blocks:
            if v == vertex:
                return VertexConditions(v, self.A[i:j, i:j], self.B[i:j, i:j])
        raise KeyError(vertex)

    def with_matrices(self, A, B, local: Optional[bool] = None) -> "GlobalConditions":
        local = self.local if local is None else local
        return GlobalConditions(
            np.asarray(A, dtype=complex), np.asarray(B, dtype=complex), self.W, local, self.blocks if local else ()
        )


def _vertex_ranges(g: MetricGraph):
    deg = vertex_degrees(g)
    out, start = [], 0
    for v in g.vertices:
        out.append((v, start, start + deg[v]))
        start += deg[v]
    return tuple(out)


def assemble_global(g: MetricGraph, per_vertex: Sequence[VertexConditions]) -> GlobalConditions:
    """Block-diagonal global conditions from one block per vertex."""
    given = {}
    for vc in per_vertex:
        if vc.vertex not in g.vertices:
            raise ConditionError(f"conditions given for unknown vertex {vc.vertex!r}")
        if vc.vertex in given:
            raise ConditionError(f"duplicate conditions for vertex {vc.vertex!r}")
        given[vc.vertex] = vc
    ranges = _vertex_ranges(g)
    N = g.dim
    A = np.zeros((N, N), dtype=complex)
    B = np.zeros((N, N), dtype=complex)
    for v, i, j in ranges:
        if v not in given:
            raise MissingVertex(f"no transmission conditions for vertex {v!r}")
        vc = given[v]
        if vc.A.shape[0] != j - i:
            raise SizeMismatch(f"vertex {v!r} has degree {j - i} but its block is {vc.A.shape[0]}x{vc.A.shape[0]}")
        A[i:j, i:j] = vc.A
        B[i:j, i:j] = vc.B
    return GlobalConditions(A, B, build_W(g), True, ranges)


def global_conditions(g: MetricGraph, A, B) -> GlobalConditions:
    """Wrap full (possibly non-local) N x N matrices for ``g``."""
    A = _square(A, "A")
    B = _square(B, "B")
    if A.shape != (g.dim, g.dim) or B.shape != (g.dim, g.dim):
        raise SizeMismatch(f"conditions must be {g.dim}x{g.dim}, got {A.shape} and {B.shape}")
    ranges = _vertex_ranges(g)
    mask = np.zeros((g.dim, g.dim), dtype=bool)
    for _, i, j in ranges:
        mask[i:j, i:j] = True
    local = not (np.any(A[~mask]) or np.any(B[~mask]))
    return GlobalConditions(A, B, build_W(g), local, ranges if local else ())


def _scale(A, B):
    return max(np.linalg.norm(A), np.linalg.norm(B), 1.0)


@dataclass(frozen=True)
class RankStatus:
    rank: int
    size: int

    @property
    def full(self) -> bool:
        return self.rank == self.size

    @property
    def deficient(self) -> bool:
        return not self.full

    def __str__(self):
        return "full" if self.full else f"deficient({self.rank})"


def rank_deficiency(A, B) -> RankStatus:
    """Rank of ``(A | B)`` with threshold ``1e-10`` times the largest singular value."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    s = np.linalg.svd(np.hstack([A, B]), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return RankStatus(0, A.shape[0])
    return RankStatus(int(np.sum(s > RANK_TOL * s[0])), A.shape[0])


@dataclass(frozen=True, eq=False)
class RelationSubspace:
    """Orthonormal basis (columns) of ``ker [A | -B]``; rows split as ``(f, f')``."""

    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def N(self) -> int:
        return self.basis.shape[0] // 2

    @property
    def first(self) -> np.ndarray:
        return self.basis[: self.N]

    @property
    def second(self) -> np.ndarray:
        return self.basis[self.N :]


def relation_subspace(A, B) -> RelationSubspace:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    M = np.hstack([A, -B])
    if not np.any(M):
        return RelationSubspace(np.eye(M.shape[1], dtype=complex))
    return RelationSubspace(sla.null_space(M, rcond=RANK_TOL))


def _max_angle_sine(U, V) -> float:
    if U.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(V - U @ (U.conj().T @ V), 2))


def relations_equal(A, B, A2, B2, tol: float = ANGLE_TOL) -> bool:
    """Whether ``(A, B)`` and ``(A2, B2)`` describe the same relation."""
    U = relation_subspace(A, B)
    V = relation_subspace(A2, B2)
    if U.N != V.N:
        raise SizeMismatch(f"pairs act on different spaces: {U.N} vs {V.N}")
    if U.dim != V.dim:
        return False
    return bool(_max_angle_sine(U.basis, V.basis) < tol)


def adjoint_relation(A, B):
    """A pair ``(A*, B*)`` representing the adjoint of the relation of ``(A, B)``.

    With a basis ``[F; F']`` of the relation, its adjoint is the set of
    ``(g, g')`` with ``F'^* g = F^* g'``.
    """
    L = relation_subspace(A, B)
    return L.second.conj().T, L.first.conj().T


@dataclass(frozen=True)
class SelfAdjointVerdict:
    self_adjoint: bool
    residual: float
    sigma_min: float
    per_vertex: dict = field(default_factory=dict)

    def __bool__(self):
        return self.self_adjoint


def _sa_matrix_test(A, B):
    scale = _scale(A, B)
    residual = float(np.linalg.norm(A @ B.conj().T - B @ A.conj().T))
    s = np.linalg.svd(np.hstack([A, B]), compute_uv=False)
    smin = float(s[-1]) if s.size else 0.0
    res_tol = SA_TOL * scale**2
    rank_tol = SA_TOL * scale
    verdict = bool(residual < res_tol and smin > rank_tol)
    borderline = (res_tol / 10 < residual < 10 * res_tol) or (rank_tol / 10 < smin < 10 * rank_tol)
    if borderline and rank_deficiency(A, B).full:
        verdict = bool(relations_equal(A, B, *adjoint_relation(A, B)))
    return verdict, residual, smin


def is_self_adjoint(c) -> SelfAdjointVerdict:
    """Self-adjointness of the relation given by ``c``.

    ``c`` may be a :class:`GlobalConditions` or a pair ``(A, B)``.  Local
    conditions also get one verdict per vertex.
    """
    if isinstance(c, GlobalConditions):
        A, B = c.A, c.B
        blocks = c.blocks if c.local else ()
    else:
        A, B = (np.atleast_2d(np.asarray(M, dtype=complex)) for M in c)
        blocks = ()
    verdict, residual, smin = _sa_matrix_test(A, B)
    per_vertex = {v: _sa_matrix_test(A[i:j, i:j], B[i:j, i:j])[0] for v, i, j in blocks}
    return SelfAdjointVerdict(verdict, residual, smin, per_vertex)
