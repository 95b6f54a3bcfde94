import numpy as np
import pytest

from ssie.kernels import PlaneWave, green, green_grad, incident_traces, project_trace, wavenumber


def fd_grad(f, x, h=1e-6):
    return np.array([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(3)])


def fd_curl(F, x, h=1e-5):
    J = np.array([(F(x + h * e) - F(x - h * e)) / (2 * h) for e in np.eye(3)])  # J[j, i] = d_j F_i
    return np.array([J[1, 2] - J[2, 1], J[2, 0] - J[0, 2], J[0, 1] - J[1, 0]])


def test_wavenumber_validation():
    assert wavenumber(2) == 2 + 0j
    assert wavenumber(1 + 0.5j) == 1 + 0.5j
    with pytest.raises(ValueError):
        wavenumber(1 - 0.1j)


def test_green_values():
    assert green(0, 1.0) == pytest.approx(1 / (4 * np.pi))
    assert green(2.0, 0.5) == pytest.approx(np.exp(1j) / (2 * np.pi))
    with pytest.raises(ValueError):
        green(1.0, 0.0)


@pytest.mark.parametrize("kappa", [0.0, 1.5, 2.0 + 0.3j])
def test_green_grad_matches_difference(kappa):
    y = np.array([0.1, -0.2, 0.3])
    x = np.array([0.7, 0.4, -0.5])
    fd = fd_grad(lambda p: green(kappa, np.linalg.norm(p - y)), x)
    assert np.allclose(green_grad(kappa, x, y), fd, rtol=1e-7, atol=1e-10)


def test_green_grad_batched_and_singular():
    rng = np.random.default_rng(3)
    x, y = rng.normal(size=(4, 5, 3)), rng.normal(size=(4, 5, 3))
    g = green_grad(1.2, x, y)
    assert g.shape == (4, 5, 3)
    assert np.allclose(g[2, 3], green_grad(1.2, x[2, 3], y[2, 3]))
    with pytest.raises(ValueError):
        green_grad(1.0, np.zeros(3), np.zeros(3))


def test_green_solves_helmholtz():
    k, h = 1.7, 1e-3
    x = np.array([0.4, 0.5, -0.3])
    f = lambda p: green(k, np.linalg.norm(p))  # noqa: E731
    lap = sum(f(x + h * e) - 2 * f(x) + f(x - h * e) for e in np.eye(3)) / h ** 2
    assert abs(lap + k ** 2 * f(x)) < 1e-5 * abs(k ** 2 * f(x))


@pytest.fixture
def wave():
    return PlaneWave([1.0, 2.0, 2.0], [2.0, -1.0, 0.0], 1.3)


def test_plane_wave_normalises(wave):
    assert np.linalg.norm(wave.direction) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        PlaneWave([0, 0, 1], [0, 1, 1], 1.0)


def test_plane_wave_curl(wave):
    x = np.array([0.3, -0.1, 0.8])
    assert np.allclose(wave.curl(x), fd_curl(wave.field, x), atol=1e-8)


def test_plane_wave_is_maxwell_solution(wave):
    x = np.array([0.3, -0.1, 0.8])
    cc = fd_curl(wave.curl, x, h=1e-4)
    assert np.allclose(cc, wave.kappa ** 2 * wave.field(x), atol=1e-6)
    div = sum((wave.field(x + 1e-5 * e) - wave.field(x - 1e-5 * e))[i] / 2e-5
              for i, e in enumerate(np.eye(3)))
    assert abs(div) < 1e-8


def test_traces_are_tangential(wave):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(10, 3))
    n = x / np.linalg.norm(x, axis=1, keepdims=True)
    for t in (wave.dirichlet(x, n), wave.neumann(x, n)):
        assert np.abs(np.einsum("ij,ij->i", t, n)).max() < 1e-14
    assert np.allclose(wave.neumann(x, n), np.cross(n, wave.curl(x)) / wave.kappa)


def test_with_kappa(wave):
    w = wave.with_kappa(3.0)
    assert w.kappa == 3.0 and np.allclose(w.direction, wave.direction)


def _centroid_error(space, trace, coef):
    m = space.mesh
    idx = np.arange(m.n_triangles)
    bary = np.full((m.n_triangles, 3), 1.0 / 3.0)
    got = space.evaluate(coef, idx, bary)
    ref = trace(m.centroids, m.normals)
    return np.linalg.norm(got - ref) / np.linalg.norm(ref)


def test_projection_converges(space1, space2, wave):
    e1 = _centroid_error(space1, wave.dirichlet, project_trace(space1, wave.dirichlet))
    e2 = _centroid_error(space2, wave.dirichlet, project_trace(space2, wave.dirichlet))
    assert e2 < 0.6 * e1
    assert e2 < 0.1


def test_incident_traces_shapes(space1, wave):
    gd, gn = incident_traces(wave, space1)
    assert gd.shape == gn.shape == (space1.dof_count,)
    assert np.iscomplexobj(gd)
    with pytest.raises(ValueError):
        project_trace(space1, wave.dirichlet, basis="Z")
