import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from ssie.formulations import MediumPair
from ssie.kernels import PlaneWave
from ssie.mie import (interior_resonances, mie_solve, resonance_modes, riccati,
                      sphere_operator_spectrum, truncation_order, wronskian_residual)

WAVE = PlaneWave([0, 0, 1], [1, 0, 0], 1.0)


def glass(k=1.0, eps=4.0):
    return MediumPair(eps_i=eps, mu_i=1.0, eps_e=1.0, mu_e=1.0, omega=k)


def test_riccati_closed_form():
    x = np.array([0.3, 2.0, 7.5])
    psi, dpsi, xi, _ = riccati(1, x)
    assert np.allclose(psi, np.sin(x) / x - np.cos(x))
    assert np.allclose(dpsi, np.cos(x) / x - np.sin(x) / x ** 2 + np.sin(x))
    assert np.allclose(xi, np.exp(1j * x) * (-1j / x - 1))


@pytest.mark.parametrize("x", [0.5, 3.0, 12.0, 2.0 + 0.5j])
def test_wronskian(x):
    assert wronskian_residual(np.arange(1, 21), x).max() < 1e-12


@pytest.mark.parametrize("kappa", [0.7, 2.5, 1.0 + 0.3j])
def test_operator_spectrum_calderon(kappa):
    s = sphere_operator_spectrum(kappa, 1.0, 12)
    assert s.calderon_residual().max() < 1e-12
    C, M = s.block(3)
    assert np.allclose(C @ C + M @ M, 0.25 * np.eye(2), atol=1e-12)
    ce, me = s.eigenvalues(3)
    assert np.allclose(np.sort_complex(np.linalg.eigvals(C)), np.sort_complex(ce))


def test_no_contrast():
    med = MediumPair(eps_i=1.0, mu_i=1.0, eps_e=1.0, mu_e=1.0)
    m = mie_solve(1.0, med, WAVE)
    assert np.abs(m.a).max() < 1e-14 and np.abs(m.b).max() < 1e-14
    assert np.allclose(m.c, 1) and np.allclose(m.d, 1)
    pts = np.array([[0.1, 0.2, 0.3], [0.5, -0.4, 0.1]])
    assert np.allclose(m.interior_field(pts), WAVE.field(pts))


def test_rayleigh_limit():
    eps = 4.0
    sig = []
    for k in (0.01, 0.02):
        sig.append(mie_solve(1.0, glass(k, eps), WAVE).scattering_cross_section)
    assert sig[1] / sig[0] == pytest.approx(16.0, rel=1e-3)
    k = 0.01
    ray = 8 * np.pi / 3 * k ** 4 * ((eps - 1) / (eps + 2)) ** 2
    assert sig[0] == pytest.approx(ray, rel=1e-3)


@pytest.mark.parametrize("k", [0.5, 1.0, 3.0])
def test_optical_theorem(k):
    m = mie_solve(1.0, glass(k), WAVE)
    f = m.far_field(np.array([[0.0, 0.0, 1.0]]))[0]
    ext = 4 * np.pi / k * np.imag(np.vdot(WAVE.polarization, f))
    assert ext == pytest.approx(m.extinction_cross_section, rel=1e-10)
    # lossless sphere: nothing is absorbed
    assert m.scattering_cross_section == pytest.approx(m.extinction_cross_section, rel=1e-10)


def test_tangential_continuity():
    m = mie_solve(1.0, glass(1.3), WAVE)
    rng = np.random.default_rng(2)
    u = rng.normal(size=(20, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    h = 1e-7
    ins = m.total_field((1 - h) * u)
    out = m.total_field((1 + h) * u)
    jump = np.cross(u, ins - out)
    assert np.abs(jump).max() < 1e-5 * np.abs(ins).max()


def test_far_field_matches_distant_field():
    m = mie_solve(1.0, glass(1.0), WAVE)
    d = np.array([[0.6, 0.0, 0.8], [0.0, -1.0, 0.0]])
    R = 2000.0
    near = m.scattered_field(R * d) * R * np.exp(-1j * R)
    ff = m.far_field(d)
    assert np.abs(np.einsum("ij,ij->i", d, ff)).max() < 1e-14
    assert np.linalg.norm(near - ff) < 2e-3 * np.linalg.norm(ff)


def test_rotation_covariance():
    rot = Rotation.from_euler("zyx", [0.4, -1.1, 0.7])
    Q = rot.as_matrix()
    d, p = np.array([0, 0, 1.0]), np.array([1.0, 0, 0])
    dirs = np.random.default_rng(0).normal(size=(10, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    a = mie_solve(1.0, glass(1.5), PlaneWave(d, p, 1.0)).far_field(dirs)
    b = mie_solve(1.0, glass(1.5), PlaneWave(Q @ d, Q @ p, 1.0)).far_field(dirs @ Q.T)
    assert np.allclose(b, a @ Q.T, atol=1e-12)


def test_polarization_linearity():
    d = np.array([0.0, 0.0, 1.0])
    dirs = np.array([[0.3, 0.4, np.sqrt(0.75)]])
    fx = mie_solve(1.0, glass(), PlaneWave(d, [1, 0, 0], 1.0)).far_field(dirs)
    fy = mie_solve(1.0, glass(), PlaneWave(d, [0, 1, 0], 1.0)).far_field(dirs)
    fc = mie_solve(1.0, glass(), PlaneWave(d, [1, 1j, 0], 1.0)).far_field(dirs)
    assert np.allclose(fc, fx + 1j * fy, atol=1e-13)


def test_size_scaling():
    dirs = np.array([[0.0, 0.6, 0.8], [1.0, 0.0, 0.0]])
    a = mie_solve(1.0, glass(1.0), WAVE).far_field(dirs)
    b = mie_solve(2.0, glass(0.5), WAVE).far_field(dirs)
    assert np.allclose(b, 2.0 * a, rtol=1e-10, atol=1e-14)


def test_interior_resonances():
    modes = resonance_modes(1.0, (2.0, 5.0))
    te = [k for k, n, kind in modes if n == 1 and kind == "TE"]
    tm = [k for k, n, kind in modes if n == 1 and kind == "TM"]
    assert te[0] == pytest.approx(4.493409457909064, abs=1e-9)
    assert tm[0] == pytest.approx(2.743707269992269, abs=1e-9)
    r = interior_resonances(2.0, (1.0, 2.5))
    assert np.any(np.abs(r - 4.493409457909064 / 2) < 1e-9)


def test_argument_errors():
    with pytest.raises(ValueError):
        mie_solve(0.0, glass(), WAVE)
    with pytest.raises(ValueError):
        mie_solve(1.0, glass(), WAVE, N=5)
    lossy = MediumPair(eps_i=4.0, mu_i=1.0, eps_e=1 + 0.1j, mu_e=1.0)
    with pytest.raises(ValueError):
        mie_solve(1.0, lossy, WAVE)
    with pytest.raises(ValueError):
        resonance_modes(1.0, (3.0, 2.0))
    assert truncation_order(1.0) == 25
