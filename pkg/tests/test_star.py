import numpy as np
import pytest

from conftest import random_complex
from diracgraph import (
    SpectralProblem,
    classify_regularity,
    find_eigenvalues,
    global_conditions,
    pencil_spectrum,
    star_graph,
    star_point_spectrum,
)
from diracgraph.edge_spectral import alpha
from diracgraph.errors import NonSquare


def test_pencil_examples():
    assert pencil_spectrum(np.zeros((3, 3)), np.zeros((3, 3))).kind == "singular"
    ps = pencil_spectrum(np.eye(3), -np.eye(3))
    assert ps.kind == "finite" and len(ps.eigenvalues) == 1
    lam, mult = ps.eigenvalues[0]
    assert lam == pytest.approx(-1) and mult == 3
    ps = pencil_spectrum(np.diag([-1.0, -2.0]), np.eye(2))
    assert np.allclose(sorted(ps.values.real), [-2, -1])


def test_pencil_singular_nonzero():
    # shared kernel vector makes det(A - lam B) vanish identically
    rng = np.random.default_rng(0)
    A, B = random_complex(rng, 3), random_complex(rng, 3)
    A[:, 0] = 0
    B[:, 0] = 0
    assert pencil_spectrum(A, B).kind == "singular"


def test_pencil_infinite_eigenvalues_dropped():
    ps = pencil_spectrum(np.diag([1.0, 2.0]), np.diag([1.0, 0.0]))
    assert ps.kind == "finite" and np.allclose(ps.values, [1.0])
    assert pencil_spectrum(np.eye(2), np.zeros((2, 2))).kind == "empty"


def test_classify_regularity():
    assert classify_regularity(3.0 * np.eye(2), np.zeros((2, 2))) == "caseII"
    assert classify_regularity(np.zeros((2, 2)), np.zeros((2, 2))) == "caseI"
    assert classify_regularity(np.eye(2), -np.eye(2)) == "caseIII"


def test_star_examples():
    r = star_point_spectrum(np.eye(3), -np.eye(3), 1.0)
    assert r.case == "III" and np.allclose(r.values, [0.0])
    r = star_point_spectrum(np.zeros((2, 2)), np.zeros((2, 2)), 0.4)
    assert r.case == "I" and r.whole_plane and len(r.point_spectrum) == 0
    r = star_point_spectrum(np.diag([-1.0, -2.0]), np.eye(2), 1.0)
    assert np.allclose(sorted(r.values.real), [-0.6, 0.0])
    assert star_point_spectrum(2 * np.eye(3), np.zeros((3, 3)), 1.0).case == "II"


def test_star_half_planes_massless():
    r = star_point_spectrum(np.diag([1j, -1j]), np.eye(2), 0.0)
    assert sorted(r.half_planes) == ["lower", "upper"]
    r = star_point_spectrum(np.diag([1j, -1j]), np.eye(2), 1.0)
    assert r.half_planes == [] and len(r.point_spectrum) == 0
    assert all(not n["admitted"] for n in r.notes)


def test_star_sliver_forwarded_as_reference_candidate():
    # lambda = 0.5 i sits on the admissibility sliver: z lands on the rays
    r = star_point_spectrum(np.array([[0.5j]]), np.array([[1.0]]), 1.0)
    assert len(r.point_spectrum) == 0
    assert len(r.reference_candidates) == 1
    z = r.reference_candidates[0]
    assert z.imag == 0 and abs(z.real) >= 1.0


def test_star_rejects_positive_real_part():
    r = star_point_spectrum(np.array([[2.0]]), np.array([[1.0]]), 1.0)
    assert len(r.point_spectrum) == 0
    assert r.notes[0]["admitted"] is False


@pytest.mark.parametrize("seed", range(8))
def test_admitted_points_satisfy_unsquared_condition(seed):
    rng = np.random.default_rng(seed)
    A, B = random_complex(rng, 4), random_complex(rng, 4)
    r = star_point_spectrum(A, B, 0.8)
    for z, lam in r.point_spectrum:
        assert abs(1j / alpha(z, 0.8) - lam) < 1e-10 * max(1, abs(lam))
        assert not (z.imag == 0 and abs(z.real) >= 0.8)


def test_star_matches_solver():
    rng = np.random.default_rng(42)
    A, B = random_complex(rng, 3), random_complex(rng, 3)
    g = star_graph(3, 1.0)
    rep = find_eigenvalues(SpectralProblem(g, global_conditions(g, A, B)), (-0.99, 0.99, -3, 3))
    s = star_point_spectrum(A, B, 1.0).values
    s = s[(np.abs(s.real) <= 0.99) & (np.abs(s.imag) <= 3)]
    assert len(s) == len(rep.values)
    assert np.allclose(np.sort_complex(s), np.sort_complex(rep.values), atol=1e-8)


def test_star_nonsquare():
    with pytest.raises(NonSquare):
        star_point_spectrum(np.ones((2, 3)), np.ones((2, 3)), 1.0)


def test_star_to_dict():
    d = star_point_spectrum(np.eye(2), -np.eye(2), 1.0).to_dict()
    assert d["case"] == "III" and d["point_spectrum"][0]["z"] == [0.0, 0.0]
