import numpy as np
import pytest

from conftest import mixed_graph, segment_graph
from diracgraph import SpectralProblem, ThresholdRegion, global_conditions, star_graph
from diracgraph.edge_spectral import eta_internal
from diracgraph.oracle import (
    boundary_residual,
    decaying_mode,
    fundamental,
    generator,
    grid_residual,
    ode_residual,
    oracle_char_fn,
    oracle_kernel_dim,
)
from diracgraph.problem import GraphSpinor
from diracgraph.roots import Rect, muller

SIGMA1 = np.array([[0, 1], [1, 0]])


def test_fundamental_identity_at_zero():
    assert np.allclose(fundamental(0.3 + 0.2j, 1.0)(0.0), np.eye(2), atol=1e-15)


@pytest.mark.parametrize("z,m", [(0.3 + 0.2j, 1.0), (2.5, 0.7), (1.0, 1.0), (-1.0, 1.0), (4j, 0.0)])
def test_fundamental_group_law_and_det(z, m):
    phi = fundamental(z, m)
    for x, y in [(0.3, 0.9), (-0.4, 1.7), (1.1, -2.0)]:
        assert np.allclose(phi(x + y), phi(x) @ phi(y), rtol=1e-12, atol=1e-12)
        assert np.linalg.det(phi(x)) == pytest.approx(1, abs=1e-12)


def test_fundamental_massless_form():
    z = 0.8 - 0.3j
    for x in (0.0, 0.5, 2.0):
        expected = np.cos(z * x) * np.eye(2) + 1j * np.sin(z * x) * SIGMA1
        assert np.allclose(fundamental(z, 0.0)(x), expected, atol=1e-13)


def test_fundamental_at_threshold_polynomial():
    m = 1.5
    for s in (1, -1):
        z = s * m
        x = 0.7
        G = generator(z, m)
        assert np.allclose(fundamental(z, m)(x), np.eye(2) + x * G)
        assert G[0, 1] == pytest.approx(1j * (z + m)) and G[1, 0] == pytest.approx(1j * (z - m))


def test_fundamental_columns_solve_ode():
    z, m = 0.4 + 0.9j, 0.8
    phi = fundamental(z, m)
    for j in range(2):
        r = [ode_residual(lambda x: phi(x)[..., :, j], z, m, h, (0, 2)) for h in (1e-2, 5e-3)]
        assert np.log2(r[0] / r[1]) > 1.9


def test_decaying_mode():
    z, m = 0.3 + 0.4j, 1.0
    G = generator(z, m)
    for rho in (-1, 1):
        lam, v = decaying_mode(z, m, rho)
        assert np.allclose(G @ v, lam * v)
        assert rho * lam.real > 0
        assert np.linalg.norm(v) == pytest.approx(1)
    with pytest.raises(ThresholdRegion):
        decaying_mode(1.5, 1.0, -1)


def test_constant_spinor_zero_residual():
    sampler = lambda x: np.stack([np.ones_like(x), np.zeros_like(x)], -1).astype(complex)  # noqa: E731
    assert ode_residual(sampler, 1.0, 1.0, 1e-3) < 1e-14


def test_negative_control_residual():
    rng = np.random.default_rng(0)
    vals = rng.normal(size=(101, 2)) + 1j * rng.normal(size=(101, 2))
    assert grid_residual(vals, 0.01, 0.3, 1.0) > 1.0


def _reference_segment(m, L):
    g = segment_graph(L, m)
    return SpectralProblem(g, global_conditions(g, np.eye(2), np.zeros((2, 2))))


@pytest.mark.parametrize("m,L", [(0.0, 1.0), (1.0, 1.0), (1.0, np.pi)])
def test_oracle_zeros_at_reference_spectrum(m, L):
    from diracgraph.edge_spectral import ref_spectrum_internal

    p = _reference_segment(m, L)
    for z0 in ref_spectrum_internal(m, L, 8):
        assert abs(oracle_char_fn(p, z0)) < 1e-12
        zr, ok = muller(lambda z: oracle_char_fn(p, z), z0 + 1e-3, 1e-4, 1e-14)
        assert ok and abs(zr - z0) < 1e-10
    assert abs(oracle_char_fn(p, 0.5 + 0.5j)) > 1e-3


def test_oracle_segment_0I_zero_at_mass():
    g = segment_graph(1.0, 1.0)
    p = SpectralProblem(g, global_conditions(g, np.zeros((2, 2)), np.eye(2)))
    assert abs(oracle_char_fn(p, 1.0)) < 1e-14
    dim, funcs = oracle_kernel_dim(p, 1.0)
    assert dim == 1
    v = funcs[0].evaluate("e", np.linspace(0, 1, 5))
    assert np.allclose(v[:, 1], 0, atol=1e-14)
    assert np.allclose(v[:, 0], v[0, 0])


def test_oracle_star_identity_minus_identity():
    g = star_graph(3, 1.0)
    p = SpectralProblem(g, global_conditions(g, np.eye(3), -np.eye(3)))
    assert abs(oracle_char_fn(p, 0.0)) < 1e-14
    assert abs(oracle_char_fn(p, 0.5)) > 1e-3
    assert oracle_kernel_dim(p, 0.0)[0] == 3


def test_oracle_threshold_region_on_noncompact():
    g = star_graph(2, 1.0)
    p = SpectralProblem(g, global_conditions(g, np.eye(2), np.eye(2)))
    with pytest.raises(ThresholdRegion):
        oracle_char_fn(p, 2.0)


def test_boundary_residual_reference_eigenfunction():
    p = _reference_segment(1.0, 1.0)
    dim, funcs = oracle_kernel_dim(p, -1.0)
    assert dim == 1
    assert boundary_residual(p, -1.0, funcs[0]) < 1e-15


def test_boundary_residual_linear_in_perturbation():
    p = _reference_segment(1.0, 1.0)
    _, funcs = oracle_kernel_dim(p, -1.0)
    psi = funcs[0]
    bump = lambda x: np.stack([1 + 0 * x, 0 * x], -1)  # noqa: E731
    res = []
    for eps in (1e-3, 2e-3, 4e-3):
        q = GraphSpinor({"e": lambda x, eps=eps: psi.evaluate("e", x) + eps * bump(x)})
        res.append(boundary_residual(p, -1.0, q))
    assert res[1] / res[0] == pytest.approx(2, rel=1e-4)
    assert res[2] / res[1] == pytest.approx(2, rel=1e-4)


def test_oracle_and_solver_roots_agree_mixed_graph():
    from diracgraph import find_eigenvalues

    g = mixed_graph()
    rng = np.random.default_rng(11)
    A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    B = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    p = SpectralProblem(g, global_conditions(g, A, B))
    rep = find_eigenvalues(p, Rect(-0.95, 0.95, -2, 2))
    assert rep.complete
    for ev in rep.eigenvalues:
        zo, ok = muller(lambda z: oracle_char_fn(p, z), ev.z, 1e-6, 1e-13)
        assert ok and abs(zo - ev.z) < 1e-8


def test_eta_residual_order_two():
    z, m = 0.2 + 0.3j, 1.0
    e1, _ = eta_internal(z, m, 0.0, 1.0)
    r = [ode_residual(e1, z, m, h) for h in (1e-2, 5e-3, 2.5e-3)]
    orders = np.log2(np.array(r[:-1]) / np.array(r[1:]))
    assert np.all(orders > 1.9)


def test_oracle_vectorised_matches_scalar():
    g = mixed_graph()
    rng = np.random.default_rng(4)
    p = SpectralProblem(g, global_conditions(g, rng.normal(size=(6, 6)), rng.normal(size=(6, 6))))
    z = np.array([[0.2 + 0.3j, -0.4 - 1j], [1.5 + 0.2j, 0.1j]])
    F = oracle_char_fn(p, z)
    assert F.shape == (2, 2)
    assert np.allclose(F, [[oracle_char_fn(p, w) for w in row] for row in z], rtol=1e-13)
