"""Closed-form single-edge objects for the one-dimensional Dirac operator.

The operator is ``-i sigma_1 d/dx + m sigma_3`` acting on C^2-valued
functions.  On an internal edge ``(a, b)`` the boundary maps are

    Gamma1 phi = (phi_1(a), phi_1(b)),   Gamma2 phi = (i phi_2(a), -i phi_2(b)),

and on an external edge with finite endpoint ``p`` and orientation ``rho``

    Gamma1 phi = phi_1(p),               Gamma2 phi = -i rho phi_2(p).

The reference operator imposes ``Gamma1 phi = 0``.  Everything below is
evaluated elementwise, so ``z`` may be a scalar or an ndarray.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchPoint, NotDecaying, ReferencePoint

__all__ = [
    "momentum",
    "alpha",
    "q_internal",
    "q_external",
    "ref_spectrum_internal",
    "ref_spectrum_external",
    "Rays",
    "eta_internal",
    "eta_external",
    "mu_external",
    "resolvent_kernel_internal",
    "resolvent_kernel_external",
]

SERIES_CUTOFF = 1e-6
REF_TOL = 1e-12
# beyond this Im(kL) cos and sin overflow long before their ratio does
_EXP_SWITCH = 30.0

SIGMA3 = np.diag([1.0, -1.0]).astype(complex)


def momentum(z, m: float):
    """Branch of ``sqrt(z^2 - m^2)`` with argument in ``[0, pi)``."""
    z = np.asarray(z, dtype=complex)
    k = np.sqrt(z * z - m * m)
    k = np.where(np.angle(k) < 0, -k, k)
    return k[()] if k.ndim == 0 else k


def _alpha_raw(z, m, k):
    # pick the better conditioned of the two equivalent expressions
    zm, zp = z - m, z + m
    use_left = np.abs(zm) > np.abs(zp)
    with np.errstate(divide="ignore", invalid="ignore"):
        left = k / np.where(use_left, zm, 1.0)
        right = zp / np.where(use_left, 1.0, k)
    return np.where(use_left, left, right)


def alpha(z, m: float):
    """Ratio ``k(z)/(z - m) = (z + m)/k(z)``.

    Raises
    ------
    BranchPoint
        If any ``z`` equals ``+m`` or ``-m``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any((z == m) | (z == -m)):
        raise BranchPoint(f"alpha is undefined at z = +-{m}")
    a = _alpha_raw(z, m, momentum(z, m))
    return a[()] if a.ndim == 0 else a


def _sinc(x):
    small = np.abs(x) < SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sin(x) / np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, s)


def _internal_parts(z, m, L):
    """Return ``(cos kL, one, d, k)`` with ``d = alpha sin kL = (z + m) L sinc(kL)``.

    For large ``Im kL`` cos, one and d are rescaled by the same factor
    ``2 e^{ikL}`` so that their ratios stay finite.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    k = momentum(z, m)
    kL = k * L
    big = kL.imag > _EXP_SWITCH
    safe = np.where(big, 1.0, kL)
    c = np.cos(safe)
    one = np.ones_like(c)
    d = (z + m) * L * _sinc(safe)
    if np.any(big):
        e = np.exp(2j * kL[big])
        # 2 e^{ikL} cos kL = 1 + e,  2 e^{ikL} sin kL = i (1 - e)
        c[big] = 1 + e
        one[big] = 2 * np.exp(1j * kL[big])
        d[big] = (z[big] + m) / k[big] * 1j * (1 - e)
    return c.reshape(shape), one.reshape(shape), d.reshape(shape), k.reshape(shape)


def _edge_d(z, m, L) -> complex:
    """Unscaled ``alpha sin kL`` for a single ``z``."""
    z = complex(z)
    k = complex(momentum(z, m))
    return complex((z + m) * L * _sinc(k * L))


def _is_internal_reference(z, m, d, k):
    a = np.abs(_alpha_raw(np.asarray(z, dtype=complex), m, k))
    scale = np.where(np.isfinite(a), np.maximum(1.0, a), 1.0)
    return np.abs(d) < REF_TOL * scale


def _q_internal_raw(z, m, L):
    c, one, d, k = _internal_parts(z, m, L)
    bad = _is_internal_reference(z, m, d, k)
    q = np.empty(np.shape(c) + (2, 2), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / d
        q[..., 0, 0] = -c * inv
        q[..., 1, 1] = -c * inv
        q[..., 0, 1] = one * inv
        q[..., 1, 0] = one * inv
    return q, bad


def q_internal(z, m: float, L: float):
    """Q-function block ``-(1/d) [[cos kL, -1], [-1, cos kL]]`` of an internal edge.

    Here ``d = alpha(z) sin(k L)``, which stays finite (``2 m L``) at ``z = m``.

    Raises
    ------
    ReferencePoint
        If ``z`` is an eigenvalue of the reference operator on the edge.
    """
    q, bad = _q_internal_raw(z, m, L)
    if np.any(bad):
        raise ReferencePoint(f"z lies in the reference spectrum of an edge of length {L}")
    return q


def _q_external_raw(z, m):
    z = np.asarray(z, dtype=complex)
    bad = (z.imag == 0) & (np.abs(z.real) >= m)
    k = momentum(z, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 1j / _alpha_raw(z, m, k)
    return q, bad


def q_external(z, m: float):
    """Scalar Q-function ``i/alpha(z)`` of a half-line (independent of orientation)."""
    q, bad = _q_external_raw(z, m)
    if np.any(bad):
        raise ReferencePoint("z lies on the continuous spectrum of a half-line")
    return q[()] if np.ndim(q) == 0 else q


def ref_spectrum_internal(m: float, L: float, window: float):
    """Reference eigenvalues of an internal edge of length ``L`` in ``[-window, window]``."""
    out = [-float(m)] if m <= window else []
    step = np.pi / L
    lmax = int(np.floor(window / step)) + 1
    for l in range(1, lmax + 1):
        e = float(np.hypot(m, l * step))
        if e <= window:
            out.extend([-e, e])
    return sorted(out)


@dataclass(frozen=True)
class Rays:
    """The pair of rays ``(-inf, -m] U [m, +inf)``."""

    mass: float

    def contains(self, z) -> bool:
        z = complex(z)
        return z.imag == 0 and abs(z.real) >= self.mass

    def __str__(self):
        return f"(-inf, {-self.mass:g}] U [{self.mass:g}, +inf)"


def ref_spectrum_external(m: float) -> Rays:
    return Rays(float(m))


def eta_internal(z, m: float, a: float, b: float):
    """Defect solutions on ``(a, b)`` normalized by ``Gamma1 eta_1 = (1, 0)``, ``Gamma1 eta_2 = (0, 1)``.

    Returns
    -------
    eta1, eta2 : callable
        Map an array of ``x`` to an array of shape ``x.shape + (2,)``.
    """
    z = complex(z)
    L = b - a
    _, _, d, k = _internal_parts(z, m, L)
    if _is_internal_reference(z, m, d, k):
        raise ReferencePoint(f"z = {z} lies in the reference spectrum of the edge ({a}, {b})")
    zp = z + m
    denom = L * _sinc(k * L)

    def eta1(x):
        t = b - np.asarray(x, dtype=float)
        return np.stack([t * _sinc(k * t) / denom, 1j * np.cos(k * t) / (zp * denom)], axis=-1)

    def eta2(x):
        t = np.asarray(x, dtype=float) - a
        return np.stack([t * _sinc(k * t) / denom, -1j * np.cos(k * t) / (zp * denom)], axis=-1)

    return eta1, eta2


def _check_decay(z, m):
    k = momentum(z, m)
    if not k.imag > 0:
        raise NotDecaying(f"Im k(z) = {k.imag:g} <= 0 at z = {z}")
    return k


def eta_external(z, m: float, endpoint: float, rho: int):
    """Square-integrable solution on a half-line with ``Gamma1 eta = 1``."""
    z = complex(z)
    k = _check_decay(z, m)
    ratio = -rho / complex(_alpha_raw(z, m, k))

    def eta(x):
        ph = np.exp(-1j * rho * k * (np.asarray(x, dtype=float) - endpoint))
        return np.stack([ph, ratio * ph], axis=-1)

    return eta


def mu_external(z, m: float, endpoint: float, rho: int):
    """Solution on a half-line whose first component vanishes at the endpoint."""
    z = complex(z)
    k = _check_decay(z, m)
    coef = rho * 1j / complex(_alpha_raw(z, m, k))

    def mu(x):
        t = k * rho * (endpoint - np.asarray(x, dtype=float))
        return np.stack([np.sin(t), coef * np.cos(t)], axis=-1)

    return mu


def resolvent_kernel_internal(z, m: float, a: float, b: float):
    """Integral kernel of the reference resolvent on ``(a, b)``.

    Returns a callable ``(x, y) -> 2x2`` array (broadcasting over ``x`` and ``y``).
    """
    z = complex(z)
    eta1, eta2 = eta_internal(z, m, a, b)
    d = _edge_d(z, m, b - a)

    def kernel(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        # conj(eta_{conj z}) = sigma_3 eta_z holds identically in z
        above = d * np.einsum("...i,...j->...ij", eta1(x), eta2(y) @ SIGMA3)
        below = d * np.einsum("...i,...j->...ij", eta2(x), eta1(y) @ SIGMA3)
        return np.where((x > y)[..., None, None], above, below)

    return kernel


def resolvent_kernel_external(z, m: float, endpoint: float, rho: int):
    """Integral kernel of the reference resolvent on a half-line."""
    z = complex(z)
    k = momentum(z, m)
    if not k.imag > 0:
        raise ReferencePoint(f"z = {z} lies on the continuous spectrum of a half-line")
    al = complex(_alpha_raw(z, m, k))
    eta = eta_external(z, m, endpoint, rho)
    mu = mu_external(z, m, endpoint, rho)

    def kernel(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        # conj(mu_{conj z}) = -sigma_3 mu_z and conj(eta_{conj z}) = sigma_3 eta_z
        toward = al * np.einsum("...i,...j->...ij", eta(x), mu(y) @ SIGMA3)
        away = al * np.einsum("...i,...j->...ij", mu(x), eta(y) @ SIGMA3)
        return np.where((rho * (x - y) < 0)[..., None, None], toward, away)

    return kernel
