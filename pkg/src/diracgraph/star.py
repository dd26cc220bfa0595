"""Closed-form point spectrum of the star graph with outgoing half-lines.

For a single vertex with N outgoing half-lines ``W = I`` and
``Q(z) = (i/alpha(z)) I``, so ``z`` is an eigenvalue iff ``lambda = i/alpha(z)``
is an eigenvalue of the pencil ``A - lambda B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .edge_spectral import alpha
from .errors import NonSquare

__all__ = [
    "PencilSpectrum",
    "StarSpectrumResult",
    "pencil_spectrum",
    "star_point_spectrum",
    "classify_regularity",
]

CLUSTER_RADIUS = 1e-10
SINGULAR_TOL = 1e-10
UNIT_TOL = 1e-10


@dataclass
class PencilSpectrum:
    """``kind`` is ``"singular"``, ``"empty"`` or ``"finite"``; eigenvalues are ``(lambda, multiplicity)``."""

    kind: str
    eigenvalues: list = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.eigenvalues], dtype=complex)


def _as_pair(A, B):
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise NonSquare(f"A and B must be square of equal size, got {A.shape} and {B.shape}")
    return A, B


def _is_singular(A, B, seed):
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    nA, nB = np.linalg.norm(A, 2), np.linalg.norm(B, 2)
    for _ in range(n * n + 1):
        lam = complex(rng.normal(), rng.normal())
        scale = nA + abs(lam) * nB
        if scale == 0:
            continue
        s = np.linalg.svd(A - lam * B, compute_uv=False)
        if s[-1] > SINGULAR_TOL * scale:
            return False
    return True


def _cluster(values):
    out = []
    for v in sorted(values, key=lambda c: (c.real, c.imag)):
        for i, (w, k) in enumerate(out):
            if abs(v - w) <= CLUSTER_RADIUS * max(1.0, abs(w)):
                out[i] = (w, k + 1)
                break
        else:
            out.append((v, 1))
    return out


def pencil_spectrum(A, B, seed: int = 0) -> PencilSpectrum:
    """Finite eigenvalues of ``A - lambda B`` or detection of a singular pencil."""
    A, B = _as_pair(A, B)
    if _is_singular(A, B, seed):
        return PencilSpectrum("singular")
    ab = sla.eig(A, B, right=False, homogeneous_eigvals=True)
    a, b = ab
    scale = np.maximum(np.abs(a), np.abs(b))
    finite = np.abs(b) > 1e-12 * np.where(scale > 0, scale, 1.0)
    lams = [complex(x) for x in a[finite] / b[finite]]
    if not lams:
        return PencilSpectrum("empty")
    return PencilSpectrum("finite", _cluster(lams))


def classify_regularity(A, B, seed: int = 0) -> str:
    """``"caseI"`` for a singular pencil, ``"caseII"`` without and ``"caseIII"`` with finite eigenvalues."""
    kind = pencil_spectrum(A, B, seed).kind
    return {"singular": "caseI", "empty": "caseII", "finite": "caseIII"}[kind]


@dataclass
class StarSpectrumResult:
    """Point spectrum of the star problem.

    ``point_spectrum`` holds ``(z, lambda)`` pairs, ``notes`` one dict per
    pencil eigenvalue, and ``reference_candidates`` the points that fall into
    the spectrum of the reference operator and need a separate check.
    """

    case: str
    point_spectrum: list = field(default_factory=list)
    half_planes: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    reference_candidates: list = field(default_factory=list)
    mass: float = 0.0

    @property
    def whole_plane(self) -> bool:
        return self.case == "I"

    @property
    def values(self) -> np.ndarray:
        return np.array([z for z, _ in self.point_spectrum], dtype=complex)

    def to_dict(self):
        c = lambda v: None if v is None else [float(np.real(v)), float(np.imag(v))]  # noqa: E731
        return {
            "case": self.case,
            "mass": self.mass,
            "whole_plane": self.whole_plane,
            "point_spectrum": [{"z": c(z), "lambda": c(lam)} for z, lam in self.point_spectrum],
            "half_planes": list(self.half_planes),
            "notes": [
                {"lambda": c(n["lambda"]), "multiplicity": n["multiplicity"], "admitted": n["admitted"],
                 "reason": n["reason"], "z": c(n["z"])}
                for n in self.notes
            ],
            "reference_candidates": [c(z) for z in self.reference_candidates],
        }


def _classify_lambda(lam: complex, m: float):
    """Return ``(admitted, z, reason, half_plane)`` for one pencil eigenvalue."""
    tol = UNIT_TOL * max(1.0, abs(lam))
    if abs(lam - 1j) < tol or abs(lam + 1j) < tol:
        if m == 0:
            hp = "upper" if lam.imag > 0 else "lower"
            return True, None, f"lambda = {'+' if hp == 'upper' else '-'}i fills the {hp} half-plane", hp
        return False, None, "lambda = +-i gives no eigenvalue when m > 0", None
    z = m * (1 - lam * lam) / (1 + lam * lam)
    if m == 0:
        return False, 0j, "z in sigma(D0)", None
    if lam.real < -tol:
        return True, z, "Re lambda < 0", None
    if abs(lam.real) <= tol and (lam.imag < -1 or 0 <= lam.imag < 1):
        return False, complex(z.real, 0.0), "z in sigma(D0)", None
    return False, None, "lambda is not a value of i/alpha(z) off the continuous spectrum", None


def star_point_spectrum(A, B, m: float, seed: int = 0) -> StarSpectrumResult:
    """Eigenvalues of the star graph with outgoing half-lines and conditions ``(A, B)``."""
    A, B = _as_pair(A, B)
    m = float(m)
    pencil = pencil_spectrum(A, B, seed)
    if pencil.kind == "singular":
        return StarSpectrumResult("I", mass=m)
    if pencil.kind == "empty":
        return StarSpectrumResult("II", mass=m)
    res = StarSpectrumResult("III", mass=m)
    for lam, mult in pencil.eigenvalues:
        ok, z, reason, hp = _classify_lambda(lam, m)
        res.notes.append({"lambda": lam, "multiplicity": mult, "admitted": ok, "reason": reason, "z": z})
        if ok and hp is not None:
            if hp not in res.half_planes:
                res.half_planes.append(hp)
        elif ok:
            # the squared relation admits spurious roots; keep only the true branch
            if abs(1j / alpha(z, m) - lam) <= 1e-8 * max(1.0, abs(lam)):
                res.point_spectrum.append((z, lam))
            else:
                res.notes[-1].update(admitted=False, reason="fails i/alpha(z) = lambda")
        elif reason == "z in sigma(D0)" and z is not None:
            res.reference_candidates.append(z)
    return res
