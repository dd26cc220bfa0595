"""Birman-Schwinger engine: point spectrum, eigenfunctions, resolvent.

For ``z`` in the resolvent set of the reference operator, ``z`` is an
eigenvalue iff ``T(z) = A W - B W Q(z)`` is singular.  Zeros of
``F(z) = det T(z)`` are counted with the argument principle and polished
with Muller's method.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import edge_spectral as es
from .errors import NotInResolventSet, ReferencePoint, ThresholdRegion
from .graph import InternalEdge
from .oracle import boundary_residual, oracle_kernel_dim
from .problem import GraphSpinor, SpectralProblem
from .roots import Rect, find_roots
from .transmission import rank_deficiency

__all__ = [
    "assemble_Q",
    "bs_matrix",
    "char_fn",
    "Eigenvalue",
    "ReferenceVerdict",
    "EssentialSpectrum",
    "SpectralReport",
    "find_eigenvalues",
    "eigenfunctions",
    "resolvent_apply",
    "essential_spectrum",
    "check_reference_point",
    "reference_points",
]

KERNEL_RTOL = 1e-7
RESOLVENT_RTOL = 1e-12
RAY_MARGIN = 1e-6
EXCLUSION_FACTOR = 1e-4


def _assemble_raw(p: SpectralProblem, z):
    """Block-diagonal ``Q`` for an array of ``z`` plus the offending edge per point (or None)."""
    g = p.graph
    m = g.mass
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    Q = np.zeros(z.shape + (g.dim, g.dim), dtype=complex)
    bad = np.full(z.shape, None, dtype=object)
    for e in g.edges:
        s = g.edge_slice(e.id)
        if isinstance(e, InternalEdge):
            q, hit = es._q_internal_raw(z, m, e.length)
            Q[..., s, s] = q
        else:
            q, hit = es._q_external_raw(z, m)
            Q[..., s.start, s.start] = q
        bad[hit & (bad == None)] = e.id  # noqa: E711
    return Q, bad


def assemble_Q(p: SpectralProblem, z) -> np.ndarray:
    """Edge-ordered block-diagonal Q-function at ``z``.

    Raises
    ------
    ReferencePoint
        If ``z`` lies in the spectrum of the reference operator; ``edge`` names the edge.
    """
    scalar = np.ndim(z) == 0
    Q, bad = _assemble_raw(p, z)
    hits = [b for b in bad.ravel() if b is not None]
    if hits:
        raise ReferencePoint(f"z lies in the reference spectrum of edge {hits[0]!r}", edge=hits[0])
    return Q[0] if scalar else Q


def bs_matrix(p: SpectralProblem, z) -> np.ndarray:
    """``T(z) = A W - B W Q(z)``."""
    c = p.conditions
    return c.AW - c.BW @ assemble_Q(p, z)


def char_fn(p: SpectralProblem, z):
    """``F(z) = det(A W - B W Q(z))``; vectorised over ``z``."""
    T = bs_matrix(p, z)
    d = np.linalg.det(T)
    return complex(d) if np.ndim(d) == 0 else d


def _char_fn_masked(p: SpectralProblem):
    c = p.conditions
    AW, BW = c.AW, c.BW

    def f(zs):
        with np.errstate(all="ignore"):
            Q, bad = _assemble_raw(p, zs)
            F = np.linalg.det(AW - BW @ Q)
        F = np.asarray(F, dtype=complex)
        F[bad != None] = np.nan  # noqa: E711
        return F

    return f


def _smallest_eigenvalue(p: SpectralProblem):
    def mu(z):
        try:
            w = np.linalg.eigvals(bs_matrix(p, z))
        except ReferencePoint:
            return complex(np.nan)
        return complex(w[np.argmin(np.abs(w))])

    return mu


def _null_vectors(p: SpectralProblem, z, rtol=KERNEL_RTOL):
    """Approximate kernel of ``T(z)``.

    Singular values are compared with ``|AW| + |BW Q(z)|`` rather than with
    the largest singular value, since ``T`` itself may vanish entirely.
    """
    c = p.conditions
    BWQ = c.BW @ assemble_Q(p, z)
    T = c.AW - BWQ
    _, s, vh = np.linalg.svd(T)
    scale = np.linalg.norm(c.AW, 2) + np.linalg.norm(BWQ, 2)
    null = s < rtol * scale
    return vh[null].conj(), s


@dataclass
class Eigenvalue:
    z: complex
    geometric_multiplicity: int
    zero_order: int
    eigenfunctions: list = field(default_factory=list, repr=False)
    residual: float = 0.0
    cluster: bool = False

    def to_dict(self):
        return {
            "z": [self.z.real, self.z.imag],
            "geometric_multiplicity": self.geometric_multiplicity,
            "zero_order": self.zero_order,
            "residual": self.residual,
            "cluster": self.cluster,
        }


@dataclass
class ReferenceVerdict:
    z: complex
    eigenvalue: Optional[bool]
    multiplicity: int = 0
    note: str = ""

    @property
    def verdict(self) -> str:
        if self.eigenvalue is None:
            return "undetermined"
        return "eigenvalue" if self.eigenvalue else "not-eigenvalue"

    def to_dict(self):
        return {"z": [self.z.real, self.z.imag], "verdict": self.verdict, "multiplicity": self.multiplicity, "note": self.note}


@dataclass
class EssentialSpectrum:
    """``kind`` is ``"empty"``, ``"rays"`` or ``"whole_plane"``."""

    kind: str
    mass: float = 0.0
    certified: bool = True
    witness: Optional[complex] = None

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    def __str__(self):
        if self.kind == "empty":
            s = "empty"
        elif self.kind == "rays":
            s = str(es.Rays(self.mass))
        else:
            s = "C"
        return s if self.certified else s + " (conditional)"

    def to_dict(self):
        return {
            "kind": self.kind,
            "rays": [[None, -self.mass], [self.mass, None]] if self.kind == "rays" else [],
            "certified": self.certified,
            "tag": "" if self.certified else "conditional",
        }


@dataclass
class SpectralReport:
    eigenvalues: list = field(default_factory=list)
    essential: Optional[EssentialSpectrum] = None
    whole_plane_flag: bool = False
    identically_singular: bool = False
    excluded_points: list = field(default_factory=list)
    unsearched: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)
    winding_total: Optional[int] = None
    region: Optional[Rect] = None

    @property
    def values(self) -> np.ndarray:
        return np.array([e.z for e in self.eigenvalues], dtype=complex)

    @property
    def complete(self) -> bool:
        return not self.unresolved

    def to_dict(self):
        return {
            "region": self.region.as_list() if self.region else None,
            "whole_plane_flag": self.whole_plane_flag,
            "identically_singular": self.identically_singular,
            "eigenvalues": [e.to_dict() for e in self.eigenvalues],
            "essential_spectrum": self.essential.to_dict() if self.essential else None,
            "excluded_points": [v.to_dict() for v in self.excluded_points],
            "unsearched": [r.as_list() for r in self.unsearched],
            "unresolved": [{"cell": c.as_list(), "count": n} for c, n in self.unresolved],
            "winding_total": self.winding_total,
        }


def reference_points(p: SpectralProblem, window: float):
    """Sorted distinct reference eigenvalues of the internal edges within ``[-window, window]``."""
    pts = []
    for e in p.graph.internal:
        pts.extend(es.ref_spectrum_internal(p.mass, e.length, window))
    pts.sort()
    out = []
    for x in pts:
        if not out or abs(x - out[-1]) > 1e-12 * max(1.0, abs(x)):
            out.append(x)
    return out


def eigenfunctions(p: SpectralProblem, z, coeffs) -> list:
    """Eigenfunctions ``gamma(z) c`` for boundary coefficient vectors ``c``."""
    g = p.graph
    m = g.mass
    basis = {}
    for e in g.edges:
        if isinstance(e, InternalEdge):
            basis[e.id] = es.eta_internal(z, m, e.a, e.b)
        else:
            basis[e.id] = (es.eta_external(z, m, e.endpoint, e.rho),)
    out = []
    for c in coeffs:
        parts = {}
        for e in g.edges:
            w = c[g.edge_slice(e.id)]
            parts[e.id] = lambda x, fs=basis[e.id], w=w: sum(wi * fi(x) for wi, fi in zip(w, fs))
        out.append(GraphSpinor(parts))
    return out


def _region_pieces(p: SpectralProblem, region: Rect, margin: float):
    """Split ``region`` so that no piece meets the continuous spectrum.

    Returns ``(pieces, unsearched)``.
    """
    if p.graph.is_compact:
        return [region], []
    m = p.mass
    pieces, unsearched = [], []
    if m > 0:
        gx0, gx1 = -m + margin, m - margin
        lo, hi = max(region.x0, gx0), min(region.x1, gx1)
        if lo < hi:
            pieces.append(Rect(lo, hi, region.y0, region.y1))
        columns = [(region.x0, min(region.x1, gx0)), (max(region.x0, gx1), region.x1)]
    else:
        columns = [(region.x0, region.x1)]
    for x0, x1 in columns:
        if x1 <= x0:
            continue
        if region.y1 > margin:
            pieces.append(Rect(x0, x1, max(region.y0, margin), region.y1))
        if region.y0 < -margin:
            pieces.append(Rect(x0, x1, region.y0, min(region.y1, -margin)))
        if region.y0 < margin and region.y1 > -margin:
            unsearched.append(Rect(x0, x1, max(region.y0, -margin), min(region.y1, margin)))
    return [r for r in pieces if r.height > 0], unsearched


def _exclusions(p: SpectralProblem, region: Rect, margin: float):
    if region.y0 > 0 or region.y1 < 0:
        return []
    window = max(abs(region.x0), abs(region.x1)) + 1.0
    pts = reference_points(p, window)
    if not p.graph.is_compact:
        pts = [x for x in pts if abs(x) < p.mass - margin]
    out = []
    for i, x in enumerate(pts):
        if not region.x0 - 1e-9 <= x <= region.x1 + 1e-9:
            continue
        gaps = [abs(x - y) for j, y in enumerate(pts) if j != i]
        gap = min(gaps) if gaps else 1.0
        out.append((complex(x, 0.0), EXCLUSION_FACTOR * gap))
    return out


def _identically_singular(p: SpectralProblem, pieces, seed=12345):
    rng = np.random.default_rng(seed)
    checks = 0
    for _ in range(40):
        r = pieces[rng.integers(len(pieces))]
        z = complex(rng.uniform(r.x0, r.x1), rng.uniform(r.y0, r.y1))
        try:
            s = np.linalg.svd(bs_matrix(p, z), compute_uv=False)
        except ReferencePoint:
            continue
        if s[0] > 0 and s[-1] > 1e-10 * s[0]:
            return False
        checks += 1
        if checks >= 5:
            return True
    return checks > 0


def find_eigenvalues(
    p: SpectralProblem,
    region,
    tol: float = 1e-10,
    max_depth: int = 40,
    jobs: int = 1,
    margin: float = RAY_MARGIN,
) -> SpectralReport:
    """Eigenvalues of the problem inside a rectangle ``(re0, re1, im0, im1)``.

    Points of the reference spectrum are excised with small disks and then
    checked one by one through the transfer-matrix oracle; thin strips along
    the continuous spectrum are reported as unsearched.
    """
    region = region if isinstance(region, Rect) else Rect(*map(float, region))
    report = SpectralReport(region=region)
    c = p.conditions
    if rank_deficiency(c.A, c.B).deficient:
        report.whole_plane_flag = True
        report.essential = EssentialSpectrum("whole_plane", p.mass)
        return report
    report.essential = essential_spectrum(p)
    pieces, report.unsearched = _region_pieces(p, region, margin)
    if not pieces:
        return report
    if _identically_singular(p, pieces):
        report.identically_singular = True
        return report

    excluded = _exclusions(p, region, margin)
    if jobs > 1:
        pieces = [child for r in pieces for child in r.split(0.5)]
    search = find_roots(
        _char_fn_masked(p),
        pieces,
        excluded=excluded,
        tol=tol,
        max_depth=max_depth,
        mu=_smallest_eigenvalue(p),
        kernel_dim=lambda z: len(_null_vectors(p, z)[0]),
        jobs=jobs,
    )
    report.winding_total = None if excluded else search.winding_total
    report.unresolved = search.unresolved
    for r in search.roots:
        vecs, _ = _null_vectors(p, r.z)
        if len(vecs) == 0:
            vecs = _null_vectors(p, r.z, rtol=np.inf)[0][-1:]
        funcs = eigenfunctions(p, r.z, vecs)
        residual = max((boundary_residual(p, r.z, psi) for psi in funcs), default=0.0)
        report.eigenvalues.append(Eigenvalue(r.z, max(len(vecs), 1), r.order, funcs, residual, r.cluster))
    for z0 in sorted(search.dropped, key=lambda z: z.real):
        report.excluded_points.append(check_reference_point(p, z0))
    return report


def check_reference_point(p: SpectralProblem, z0) -> ReferenceVerdict:
    """Decide whether a point of the reference spectrum is an eigenvalue, via the oracle system."""
    z0 = complex(z0)
    try:
        dim, _ = oracle_kernel_dim(p, z0)
    except ThresholdRegion as exc:
        return ReferenceVerdict(z0, None, 0, str(exc))
    return ReferenceVerdict(z0, dim > 0, dim)


def _resolvent_witness(p: SpectralProblem):
    m = p.mass
    probes = [1j * s for s in (1.0, 2.7, 0.37, 6.1)] + [-1j * s for s in (1.0, 2.7, 0.37, 6.1)]
    probes += [0.31j + 0.17, -0.43j - 0.29]
    real = [0.0, 0.123, -0.377, 0.5 * m, -0.5 * m, 1.234] if (p.graph.is_compact or m > 0) else []
    if not p.graph.is_compact:
        real = [x for x in real if abs(x) < m]
    for z in probes + real:
        try:
            s = np.linalg.svd(bs_matrix(p, z), compute_uv=False)
        except ReferencePoint:
            continue
        if s[0] > 0 and s[-1] > 1e-8 * s[0]:
            return complex(z)
    return None


def essential_spectrum(p: SpectralProblem) -> EssentialSpectrum:
    """Essential spectrum: empty for compact graphs, the two rays otherwise, C if rank-deficient."""
    c = p.conditions
    if rank_deficiency(c.A, c.B).deficient:
        return EssentialSpectrum("whole_plane", p.mass)
    w = _resolvent_witness(p)
    if w is None:
        certified = False
    elif w.imag != 0:
        certified = True
    else:
        certified = p.graph.is_compact or p.mass > 0
    kind = "empty" if p.graph.is_compact else "rays"
    return EssentialSpectrum(kind, p.mass, certified, w)


def _weighted(eta_vals, f):
    # (sigma_3 eta)^T f pointwise
    return eta_vals[..., 0] * f[..., 0] - eta_vals[..., 1] * f[..., 1]


def resolvent_apply(p: SpectralProblem, z, rhs: Mapping, samples: Mapping) -> dict:
    """Apply the resolvent of the problem at ``z`` to sampled data.

    Parameters
    ----------
    rhs : mapping edge id -> array (n, 2) or callable
        Right-hand side on each edge, sampled on ``samples[edge]``.
    samples : mapping edge id -> 1-D increasing array
        Uniform grids; internal grids must span the whole edge, external grids
        must start (outgoing) or end (incoming) at the finite endpoint.  The
        right-hand side is taken to vanish beyond an external grid.

    Returns
    -------
    dict
        Edge id -> array (n, 2) of the solution on the same grid.
    """
    z = complex(z)
    g = p.graph
    m = g.mass
    T = bs_matrix(p, z)
    s = np.linalg.svd(T, compute_uv=False)
    if s[-1] < RESOLVENT_RTOL * max(s[0], 1.0):
        raise NotInResolventSet(f"A W - B W Q(z) is singular at z = {z}")

    gvec = np.zeros(g.dim, dtype=complex)
    partial = {}
    for e in g.edges:
        x = np.asarray(samples[e.id], dtype=float)
        f = rhs[e.id]
        f = np.asarray(f(x) if callable(f) else f, dtype=complex)
        sl = g.edge_slice(e.id)
        if isinstance(e, InternalEdge):
            if not (np.isclose(x[0], e.a) and np.isclose(x[-1], e.b)):
                raise ValueError(f"grid on {e.id!r} must span [{e.a}, {e.b}]")
            e1, e2 = (eta(x) for eta in es.eta_internal(z, m, e.a, e.b))
            d = es._edge_d(z, m, e.length)
            c1 = cumulative_trapezoid(_weighted(e1, f), x, initial=0)
            c2 = cumulative_trapezoid(_weighted(e2, f), x, initial=0)
            u = d * (e1 * c2[:, None] + e2 * (c1[-1] - c1)[:, None])
            gvec[sl] = c1[-1], c2[-1]
            partial[e.id] = (u, (e1, e2))
        else:
            at_start = e.rho == -1
            if not np.isclose(x[0] if at_start else x[-1], e.endpoint):
                raise ValueError(f"grid on {e.id!r} must {'start' if at_start else 'end'} at {e.endpoint}")
            eta = es.eta_external(z, m, e.endpoint, e.rho)(x)
            mu = es.mu_external(z, m, e.endpoint, e.rho)(x)
            al = complex(es.alpha(z, m))
            cm = cumulative_trapezoid(_weighted(mu, f), x, initial=0)
            ce = cumulative_trapezoid(_weighted(eta, f), x, initial=0)
            if at_start:
                u = al * (eta * cm[:, None] + mu * (ce[-1] - ce)[:, None])
            else:
                u = al * (eta * (cm[-1] - cm)[:, None] + mu * ce[:, None])
            gvec[sl] = ce[-1]
            partial[e.id] = (u, (eta,))
    coef = np.linalg.solve(T, p.conditions.BW @ gvec)
    out = {}
    for e in g.edges:
        u, basis = partial[e.id]
        w = coef[g.edge_slice(e.id)]
        out[e.id] = u + sum(wi * b for wi, b in zip(w, basis))
    return out
