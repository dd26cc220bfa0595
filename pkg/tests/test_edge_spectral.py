import numpy as np
import pytest

from diracgraph import BranchPoint, ReferencePoint
from diracgraph.edge_spectral import (
    alpha,
    eta_external,
    eta_internal,
    momentum,
    mu_external,
    q_external,
    q_internal,
    ref_spectrum_external,
    ref_spectrum_internal,
    resolvent_kernel_external,
    resolvent_kernel_internal,
)
from diracgraph.errors import NotDecaying
from diracgraph.oracle import ode_residual

SIGMA1 = np.array([[0, 1], [1, 0]])
SIGMA3 = np.diag([1, -1])


@pytest.mark.parametrize("z,m,k", [(0, 1, 1j), (3, 0, 3), (-3, 0, 3)])
def test_momentum_examples(z, m, k):
    assert momentum(z, m) == pytest.approx(k, abs=1e-15)


def test_momentum_branch_on_grid():
    rng = np.random.default_rng(0)
    z = rng.normal(size=200) * 3 + 1j * rng.normal(size=200) * 3
    for m in (0.0, 0.7):
        k = momentum(z, m)
        assert np.all((np.angle(k) >= 0) & (np.angle(k) < np.pi))
        assert np.allclose(k * k, z * z - m * m, rtol=1e-13, atol=1e-13)


def test_momentum_negative_real_square_root():
    # principal root with arg = -pi/2 must be flipped to +pi/2
    assert momentum(0.5 - 0j, 1.0) == pytest.approx(1j * np.sqrt(0.75))


@pytest.mark.parametrize("z,m,a", [(1j, 0, 1), (2, 1, np.sqrt(3)), (0, 1, -1j)])
def test_alpha_examples(z, m, a):
    assert alpha(z, m) == pytest.approx(a, rel=1e-14)


def test_alpha_two_forms_agree():
    rng = np.random.default_rng(1)
    z = rng.normal(size=100) + 1j * rng.normal(size=100)
    m = 0.8
    k = momentum(z, m)
    assert np.allclose(alpha(z, m), k / (z - m), rtol=1e-12)
    assert np.allclose(alpha(z, m), (z + m) / k, rtol=1e-12)


@pytest.mark.parametrize("z,m", [(1.0, 1.0), (-1.0, 1.0), (0.0, 0.0)])
def test_alpha_branch_points(z, m):
    with pytest.raises(BranchPoint):
        alpha(z, m)


def test_q_internal_at_mass():
    assert np.allclose(q_internal(1.0, 1.0, 1.0), -0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-15)


def test_q_internal_m0_at_i():
    expected = -1 / (1j * np.sinh(1)) * np.array([[np.cosh(1), -1], [-1, np.cosh(1)]])
    assert np.allclose(q_internal(1j, 0.0, 1.0), expected, rtol=1e-14)


def test_q_internal_symmetric_offdiagonal():
    z, m, L = 0.3 + 0.5j, 1.2, 0.7
    q = q_internal(z, m, L)
    k = momentum(z, m)
    assert q[0, 1] == q[1, 0]
    assert q[0, 1] == pytest.approx(1 / (alpha(z, m) * np.sin(k * L)), rel=1e-13)


def test_q_internal_continuous_near_mass():
    m, L = 1.0, 2.0
    exact = q_internal(m, m, L)
    for eps in (1e-4, 1e-7, 1e-9, 1e-12):
        for d in (eps, 1j * eps, -eps):
            assert np.allclose(q_internal(m + d, m, L), exact, atol=10 * eps + 1e-12)


def test_q_internal_series_crossover_agrees():
    m, L = 1.0, 1.0
    # |kL| straddles the series cutoff
    for kL in (0.99e-6, 1.01e-6):
        z = np.sqrt(m * m + kL**2 + 0j)
        k = momentum(z, m)
        d = (z + m) / k * np.sin(k * L)
        direct = -np.array([[np.cos(k * L), -1], [-1, np.cos(k * L)]]) / d
        assert np.allclose(q_internal(z, m, L), direct, rtol=1e-10)


def test_q_internal_large_imaginary_part_stays_finite():
    q = q_internal(400j, 0.5, 3.0)
    assert np.all(np.isfinite(q))
    # deep in the upper half-plane the off-diagonal coupling dies out
    assert abs(q[0, 1]) < 1e-100
    assert q[0, 0] == pytest.approx(q_external(400j, 0.5), rel=1e-10)


@pytest.mark.parametrize("z", [-1.0, np.sqrt(1 + np.pi**2), -np.sqrt(1 + 4 * np.pi**2)])
def test_q_internal_reference_points(z):
    with pytest.raises(ReferencePoint):
        q_internal(z, 1.0, 1.0)


def test_q_external_examples():
    assert q_external(0, 1) == pytest.approx(-1)
    assert q_external(1j, 0) == pytest.approx(1j)


def test_q_external_real_in_gap():
    z = np.linspace(-0.9, 0.9, 11)
    q = q_external(z, 1.0)
    assert np.allclose(q.imag, 0, atol=1e-15)


@pytest.mark.parametrize("z", [1.0, -2.0, 5.0])
def test_q_external_on_rays(z):
    with pytest.raises(ReferencePoint):
        q_external(z, 1.0)


def test_ref_spectrum_internal_examples():
    assert np.allclose(ref_spectrum_internal(0, np.pi, 2.5), [-2, -1, 0, 1, 2])
    assert np.allclose(ref_spectrum_internal(1, np.pi, 1.5), [-np.sqrt(2), -1, np.sqrt(2)])
    for m in (0.5, 2.0):
        pts = ref_spectrum_internal(m, 1.3, 10)
        assert -m in pts and m not in pts


def test_ref_spectrum_external_membership():
    assert ref_spectrum_external(0).contains(0.0)
    r = ref_spectrum_external(1)
    assert not r.contains(0.5)
    assert r.contains(1.0) and r.contains(-2)
    assert not r.contains(2 + 1e-3j)


def test_eta_internal_normalization():
    z, m, a, b = 0.4 + 0.3j, 1.0, -0.5, 1.2
    e1, e2 = eta_internal(z, m, a, b)
    ends = np.array([a, b])
    assert np.allclose(e1(ends)[:, 0], [1, 0], atol=1e-15)
    assert np.allclose(e2(ends)[:, 0], [0, 1], atol=1e-15)


def test_eta_internal_at_mass():
    e1, e2 = eta_internal(1.0, 1.0, 0.0, 1.0)
    x = np.linspace(0, 1, 7)
    assert np.allclose(e1(x), np.stack([1 - x, 0.5j * np.ones_like(x)], -1))
    assert np.allclose(e2(x), np.stack([x, -0.5j * np.ones_like(x)], -1))


def test_eta_internal_ode_residual_second_order():
    z, m = 0.7 - 0.2j, 1.0
    for eta in eta_internal(z, m, 0.0, 2.0):
        r = [ode_residual(eta, z, m, h, (0.0, 2.0)) for h in (1e-2, 5e-3)]
        assert r[1] < 1e-4
        assert np.log2(r[0] / r[1]) > 1.9


def test_eta_external():
    z, m = 0.0, 1.0
    eta = eta_external(z, m, 0.0, -1)
    x = np.array([0.0, 1.0, 5.0])
    vals = eta(x)
    assert vals[0, 0] == pytest.approx(1)
    assert np.allclose(vals[:, 1], 1j * np.exp(-x))
    assert np.allclose(np.linalg.norm(vals, axis=1), np.sqrt(2) * np.exp(-x))


def test_eta_external_incoming_decays_to_minus_infinity():
    eta = eta_external(0.2 + 0.5j, 1.0, 3.0, 1)
    assert np.linalg.norm(eta(np.array([-40.0]))) < 1e-8
    assert eta(np.array([3.0]))[0, 0] == pytest.approx(1)


def test_eta_external_requires_decay():
    with pytest.raises(NotDecaying):
        eta_external(2.0, 1.0, 0.0, -1)
    with pytest.raises(NotDecaying):
        mu_external(-3.0, 1.0, 0.0, 1)


def test_external_ode_residuals():
    z, m = -0.3 + 0.6j, 1.0
    for rho in (-1, 1):
        interval = (0.0, 3.0) if rho == -1 else (-3.0, 0.0)
        for f in (eta_external(z, m, 0.0, rho), mu_external(z, m, 0.0, rho)):
            assert ode_residual(f, z, m, 1e-3, interval) < 1e-5


def test_mu_first_component_vanishes_at_endpoint():
    mu = mu_external(0.1 + 0.2j, 0.5, 1.5, -1)
    assert abs(mu(np.array([1.5]))[0, 0]) < 1e-16


@pytest.mark.parametrize("z", [0.3 + 0.7j, -0.2 + 0.1j, 2 - 1j])
def test_kernel_jump_internal(z):
    K = resolvent_kernel_internal(z, 1.0, 0.0, 2.0)
    y = 0.7
    jump = K(y + 1e-12, y) - K(y - 1e-12, y)
    assert np.allclose(jump, 1j * SIGMA1, atol=1e-9)


@pytest.mark.parametrize("rho", [-1, 1])
def test_kernel_jump_external(rho):
    z = 0.4 - 0.6j
    K = resolvent_kernel_external(z, 1.0, 0.5, rho)
    y = 0.5 - rho * 0.8
    jump = K(y + 1e-12, y) - K(y - 1e-12, y)
    assert np.allclose(jump, 1j * SIGMA1, atol=1e-9)


def test_kernel_internal_at_mass():
    K = resolvent_kernel_internal(1.0, 1.0, 0.0, 1.0)
    e1, e2 = eta_internal(1.0, 1.0, 0.0, 1.0)
    x, y = 0.8, 0.3
    expected = 2 * np.outer(e1(x), e2(y).conj())
    assert np.allclose(K(x, y), expected)


def test_kernel_internal_uses_conjugate_point():
    z, m, a, b = 0.3 + 0.4j, 0.6, 0.0, 1.5
    K = resolvent_kernel_internal(z, m, a, b)
    e1, _ = eta_internal(z, m, a, b)
    _, f2 = eta_internal(np.conj(z), m, a, b)
    d = alpha(z, m) * np.sin(momentum(z, m) * (b - a))
    x, y = 1.1, 0.4
    assert np.allclose(K(x, y), d * np.outer(e1(x), f2(y).conj()))


def test_kernel_external_decay_and_endpoint():
    K = resolvent_kernel_external(0.2 + 0.5j, 1.0, 0.0, -1)
    assert np.linalg.norm(K(30.0, 1.0)) < 1e-8
    c = np.array([0.3, -1.1j])
    assert abs((K(0.0, 1.0) @ c)[0]) < 1e-15


def test_kernel_reference_point_errors():
    with pytest.raises(ReferencePoint):
        resolvent_kernel_internal(-1.0, 1.0, 0.0, 1.0)
    with pytest.raises(ReferencePoint):
        resolvent_kernel_external(2.0, 1.0, 0.0, -1)


def test_vectorised_q_shapes():
    z = np.array([[0.1 + 1j, 0.2 - 1j], [0.3 + 2j, -0.4 + 0.1j]])
    assert q_internal(z, 1.0, 1.0).shape == (2, 2, 2, 2)
    assert q_external(z, 1.0).shape == (2, 2)
