import numpy as np
import pytest

from ssie.diagnostics import jump_relation_error, stratton_chu_error
from ssie.fields import (DensityTag, NearSurfaceError, SurfaceDensity, eval_potentials,
                         far_field, far_field_grid, inside_mask, radiation_check, reconstruct,
                         _representation)
from ssie.formulations import build_system, solve
from ssie.kernels import PlaneWave
from ssie.mie import mie_solve


@pytest.fixture(scope="module")
def random_density(space1):
    rng = np.random.default_rng(5)
    n = space1.dof_count
    return SurfaceDensity(rng.normal(size=n) + 1j * rng.normal(size=n), space1)


def test_density_validation(space1):
    n = space1.dof_count
    with pytest.raises(ValueError):
        SurfaceDensity(np.zeros(n - 1), space1)
    with pytest.raises(ValueError):
        SurfaceDensity(np.full(n, np.nan), space1)
    with pytest.raises(ValueError):
        SurfaceDensity(np.zeros(n), space1, basis="Z")
    with pytest.raises(ValueError):
        eval_potentials(None, None, 1.0, np.zeros((1, 3)))


def test_zero_density_gives_zero_field(space1):
    z = SurfaceDensity(np.zeros(space1.dof_count), space1)
    rep = _representation(z, z, 1.0)
    pts = np.array([[0.1, 0.2, 0.0], [3.0, 0.0, 1.0]])
    assert not np.any(rep.field(pts))
    assert not np.any(rep.far_field(far_field_grid(5, 5)[2]))
    assert radiation_check(rep, [2.0])[0] == 0.0


def test_inside_mask(space1):
    pts = np.array([[0, 0, 0], [0.5, 0.2, -0.3], [2.0, 0, 0], [0, 0, -1.5]])
    assert inside_mask(space1.mesh, pts).tolist() == [True, True, False, False]


def test_surface_point_is_refused(random_density):
    v = random_density.space.mesh.vertices[:1]
    with pytest.raises(NearSurfaceError):
        eval_potentials(random_density, None, 1.0, v)


def test_far_field_matches_distant_field(random_density):
    kappa = 1.3
    rep = _representation(random_density, random_density, kappa)
    d = np.array([[0.0, 0.6, 0.8], [1.0, 0.0, 0.0]])
    R = 1000.0 * random_density.space.mesh.diameter
    near = rep.field(R * d) * R * np.exp(-1j * kappa * R)
    ff = far_field(rep, d)
    assert ff.tangential_error() < 1e-12 * np.abs(ff.values).max()
    assert np.linalg.norm(near - ff.values) < 5e-3 * np.linalg.norm(ff.values)


def test_radiation_defect_decays(random_density):
    rep = _representation(random_density, None, 1.0)
    r = radiation_check(rep, [4.0, 16.0, 64.0])
    assert r[0] > r[1] > r[2]
    assert r[2] < 0.01 * r[0]


def test_stratton_chu(space2):
    e = stratton_chu_error(space2, 1.0)
    assert e["inside"] < 0.01 and e["outside"] < 0.01


def test_jump_relations(space1, space2):
    e1 = jump_relation_error(space1, 1.0)
    e2 = jump_relation_error(space2, 1.0)
    assert e2["E"] < 0.1 and e2["M"] < 0.1
    assert e2["E"] < e1["E"] and e2["M"] < e1["M"]
    assert e2["E_dirichlet"] < 0.1 and e2["M_neumann"] < 0.1


def test_jump_fault_is_detected(space2):
    assert jump_relation_error(space2, 1.0, flip_m=True)["M"] > 1.0


def test_reconstruct_refuses_wrong_tag(ops1, dielectric, coupling, space1):
    wave = PlaneWave([0, 0, 1], [1, 0, 0], 1.0)
    d = SurfaceDensity(np.zeros(space1.dof_count), space1, DensityTag.j_for_Sprime)
    with pytest.raises(ValueError, match="tagged"):
        reconstruct("S", d, dielectric, coupling, ops1, wave)
    d = SurfaceDensity(np.zeros(space1.dof_count), space1, DensityTag.m_for_Tprime)
    with pytest.raises(ValueError, match="basis"):
        reconstruct("Tprime", d, dielectric, coupling, ops1, wave)


@pytest.mark.parametrize("kind", ["S", "T", "Sprime", "Tprime"])
def test_small_sphere_against_mie(ops2, dielectric, coupling, kind):
    wave = PlaneWave([0, 0, 1], [1, 0, 0], dielectric.kappa_e)
    sys_ = build_system(kind, dielectric, coupling, ops2, wave)
    x, _ = solve(sys_)
    dens = SurfaceDensity(x, ops2.space, DensityTag.for_kind(kind), sys_.basis)
    sol = reconstruct(kind, dens, dielectric, coupling, ops2, wave)
    dirs = far_field_grid(19, 10)[2]
    ref = mie_solve(1.0, dielectric, wave).far_field(dirs)
    got = sol.far_field(dirs).values
    assert np.linalg.norm(got - ref) / np.linalg.norm(ref) < 0.06
    # inside and outside evaluations agree with the reference too
    m = mie_solve(1.0, dielectric, wave)
    p_in, p_out = np.array([[0.1, 0.2, 0.3]]), np.array([[0.0, 2.0, 1.0]])
    assert np.linalg.norm(sol.interior_field(p_in) - m.interior_field(p_in)) < \
        0.1 * np.linalg.norm(m.interior_field(p_in))
    assert np.linalg.norm(sol.total_field(p_out) - m.total_field(p_out)) < \
        0.1 * np.linalg.norm(m.total_field(p_out))
