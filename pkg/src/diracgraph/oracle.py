"""Independent verification path built from the 2x2 fundamental solution.

Nothing here uses the Q-function or the defect bases of
:mod:`diracgraph.edge_spectral`.  Edge solutions are ``Phi_z(x - a) omega``
on internal edges and a multiple of the decaying eigenvector of the
generator on half-lines.
"""

from __future__ import annotations

import numpy as np

from .errors import ThresholdRegion
from .graph import InternalEdge
from .problem import GraphSpinor, SpectralProblem, boundary_values

__all__ = [
    "generator",
    "fundamental",
    "decaying_mode",
    "oracle_matrix",
    "oracle_char_fn",
    "oracle_kernel_dim",
    "ode_residual",
    "grid_residual",
    "boundary_residual",
]

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


def _sinc(t):
    """Unnormalised ``sin(t)/t`` with a series near zero."""
    t = np.asarray(t, dtype=complex)
    small = np.abs(t) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sin(t) / np.where(small, 1.0, t)
    return np.where(small, 1.0 - t * t / 6.0, s)


def generator(z, m: float) -> np.ndarray:
    """``i z sigma_1 - m sigma_2``; solutions of the Dirac equation obey ``phi' = G phi``."""
    z = complex(z)
    return np.array([[0, 1j * (z + m)], [1j * (z - m), 0]])


def fundamental(z, m: float):
    """``x -> exp(G x)`` in closed form.

    Since ``G^2 = -(z^2 - m^2) I``, ``exp(G x) = cos(k x) I + x sinc(k x) G``
    for either root ``k``; the expression is entire in ``z``.
    """
    G = generator(z, m)
    k = np.sqrt(complex(z) ** 2 - m * m)

    def phi(x):
        x = np.asarray(x, dtype=float)
        c = np.cos(k * x)[..., None, None]
        s = (x * _sinc(k * x))[..., None, None]
        return c * np.eye(2) + s * G

    return phi


def decaying_mode(z, m: float, rho: int):
    """Exponent ``lam`` and unit vector ``v`` with ``e^{lam (x - p)} v`` decaying along the half-line.

    Raises
    ------
    ThresholdRegion
        When ``z`` is real with ``|z| >= m`` and no decaying solution exists.
    """
    lam, v = _decaying_modes(np.array([complex(z)]), m, rho)
    return complex(lam[0]), v[0]


def _decaying_modes(z, m: float, rho: int):
    """Vectorised :func:`decaying_mode` over a 1-D array ``z``."""
    lam = np.sqrt(m * m - z * z)
    if np.any(lam.real == 0):
        bad = z[lam.real == 0][0]
        raise ThresholdRegion(f"no decaying half-line solution at z = {bad}")
    lam = np.where(rho * lam.real < 0, -lam, lam)
    v1 = np.stack([1j * (z + m), lam], -1)
    v2 = np.stack([lam, 1j * (z - m)], -1)
    n1 = np.linalg.norm(v1, axis=-1)
    n2 = np.linalg.norm(v2, axis=-1)
    v = np.where((n1 >= n2)[:, None], v1 / n1[:, None], v2 / np.where(n2 > 0, n2, 1.0)[:, None])
    return lam, v


def _trace_maps(p: SpectralProblem, z):
    """Matrices taking solution coefficients to edge-ordered ``Gamma1``, ``Gamma2``.

    ``z`` is a 1-D array; the result has shape ``(len(z), N, N)``.
    """
    g = p.graph
    m = g.mass
    N = g.dim
    n = len(z)
    P1 = np.zeros((n, N, N), dtype=complex)
    P2 = np.zeros((n, N, N), dtype=complex)
    G = np.zeros((n, 2, 2), dtype=complex)
    G[:, 0, 1] = 1j * (z + m)
    G[:, 1, 0] = 1j * (z - m)
    k = np.sqrt(z * z - m * m)
    for e in g.edges:
        s = g.edge_slice(e.id)
        if isinstance(e, InternalEdge):
            i = s.start
            L = e.length
            F = np.cos(k * L)[:, None, None] * np.eye(2) + (L * _sinc(k * L))[:, None, None] * G
            P1[:, i, i] = 1
            P1[:, i + 1, i : i + 2] = F[:, 0]
            P2[:, i, i + 1] = 1j
            P2[:, i + 1, i : i + 2] = -1j * F[:, 1]
        else:
            _, v = _decaying_modes(z, m, e.rho)
            P1[:, s.start, s.start] = v[:, 0]
            P2[:, s.start, s.start] = -1j * e.rho * v[:, 1]
    return P1, P2


def oracle_matrix(p: SpectralProblem, z) -> np.ndarray:
    """Oracle system at ``z``; stacked along the leading axis for array ``z``."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    P1, P2 = _trace_maps(p, zs)
    M = p.conditions.AW @ P1 - p.conditions.BW @ P2
    return M[0] if np.ndim(z) == 0 else M.reshape(np.shape(z) + M.shape[1:])


def oracle_char_fn(p: SpectralProblem, z):
    """Determinant whose zeros are exactly the eigenvalues (for compact graphs, at every ``z``).

    Vectorised over ``z``.
    """
    d = np.linalg.det(oracle_matrix(p, z))
    return complex(d) if np.ndim(d) == 0 else d


def oracle_kernel_dim(p: SpectralProblem, z, rtol: float = 1e-8):
    """Kernel dimension of the oracle system and the corresponding eigenfunctions."""
    M = oracle_matrix(p, z)
    _, s, vh = np.linalg.svd(M)
    top = s[0] if s.size and s[0] > 0 else 1.0
    null = s < rtol * top
    coeffs = vh[null].conj()
    return int(null.sum()), [_spinor_from_coeffs(p, z, c) for c in coeffs]


def _spinor_from_coeffs(p, z, c):
    g = p.graph
    m = g.mass
    phi = fundamental(z, m)
    parts = {}
    for e in g.edges:
        s = g.edge_slice(e.id)
        if isinstance(e, InternalEdge):
            omega = c[s]
            parts[e.id] = lambda x, a=e.a, w=omega: phi(np.asarray(x) - a) @ w
        else:
            lam, v = decaying_mode(z, m, e.rho)
            parts[e.id] = lambda x, p0=e.endpoint, lam=lam, w=c[s.start] * v: (
                np.exp(lam * (np.asarray(x) - p0))[..., None] * w
            )
    return GraphSpinor(parts)


def grid_residual(values, h: float, z, m: float, rhs=None) -> float:
    """Max-norm of ``(-i sigma_1 D_h + m sigma_3 - z) u - rhs`` at interior grid points.

    ``values`` has shape ``(n, 2)`` on a uniform grid with step ``h`` and
    ``D_h`` is the centered difference.
    """
    u = np.asarray(values, dtype=complex)
    du = (u[2:] - u[:-2]) / (2 * h)
    r = -1j * du @ SIGMA1.T + u[1:-1] @ (m * SIGMA3).T - complex(z) * u[1:-1]
    if rhs is not None:
        r = r - np.asarray(rhs)[1:-1]
    return float(np.max(np.linalg.norm(r, axis=-1))) if len(r) else 0.0


def ode_residual(sampler, z, m: float, h: float, interval=(0.0, 1.0)) -> float:
    """Residual of the Dirac equation for ``sampler`` on a grid of step ``h`` over ``interval``."""
    x0, x1 = interval
    n = max(int(round((x1 - x0) / h)), 2) + 1
    x = x0 + h * np.arange(n)
    return grid_residual(sampler(x), h, z, m)


def boundary_residual(p: SpectralProblem, z, eigenfunction: GraphSpinor) -> float:
    """``|AW Gamma1 psi - BW Gamma2 psi|`` relative to the endpoint values of ``psi``."""
    g1, g2 = boundary_values(p.graph, eigenfunction)
    r = p.conditions.AW @ g1 - p.conditions.BW @ g2
    return float(np.linalg.norm(r) / max(1.0, np.linalg.norm(np.concatenate([g1, g2]))))
