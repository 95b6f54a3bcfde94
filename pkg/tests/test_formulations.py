import numpy as np
import pytest

from ssie.formulations import (CouplingParams, FormulationKind, MediumPair, OperatorSet,
                               SingularSystemError, build_system, condition_estimate,
                               duality_error, solve, validate_params)
from ssie.kernels import PlaneWave

FLAGS = ("uniqueness_ok", "interior_eigen_excluded", "fredholm_ok",
         "lipschitz_garding_ok", "final_ok")

AIR_GLASS = dict(eps_i=4.0, mu_i=1.0, eps_e=1.0, mu_e=1.0)
# both media lossy with the same loss tangent
LOSSY_OUT = dict(eps_i=4 * (1 + 0.1j) ** 2, mu_i=1.0, eps_e=(1 + 0.1j) ** 2, mu_e=1.0)

# medium, (a, b), lipschitz mode, expected flags in FLAGS order
TRUTH = [
    ("recommended", AIR_GLASS, (1, 1j), False, (1, 1, 1, 1, 1)),
    ("b=0", AIR_GLASS, (1, 0), False, (1, 0, 1, 1, 0)),
    ("a=0", AIR_GLASS, (0, 1j), False, (1, 0, 1, 1, 0)),
    ("real a/b", AIR_GLASS, (1, 1), False, (1, 0, 1, 1, 0)),
    ("eta=2", AIR_GLASS, (1, 2j), False, (1, 1, 1, 1, 1)),
    ("negative eta", AIR_GLASS, (1, -1j), False, (1, 1, 1, 1, 1)),
    ("a=2", AIR_GLASS, (2, 1j), False, (1, 1, 1, 1, 0)),
    ("lossy exterior, recommended", LOSSY_OUT, (1, -1j * (1 + 0.1j)), False, (1, 1, 1, 1, 1)),
    ("lossy exterior, b=i", LOSSY_OUT, (1, 1j), False, (1, 0, 1, 1, 0)),
    ("mu_i=-mu_e", dict(eps_i=-4.0, mu_i=-1.0, eps_e=1.0, mu_e=1.0), (1, 1j), False,
     (1, 1, 0, 0, 0)),
    ("kappa ratio pole", dict(eps_i=-1.0, mu_i=1.0, eps_e=1.0, mu_e=1.0), (1, 1j), False,
     (1, 1, 0, 0, 0)),
    ("lossy exterior only", dict(eps_i=4.0, mu_i=1.0, eps_e=(1 + 0.1j) ** 2, mu_e=1.0),
     (1, -1j * (1 + 0.1j)), False, (0, 1, 1, 1, 1)),
    ("S factor b k + 2a = 0", dict(eps_i=4.0, mu_i=1.0, eps_e=4.0, mu_e=1.0), (1, -1), False,
     (1, 0, 0, 0, 0)),
    ("S factor b - 2a k = 0", AIR_GLASS, (1, 2), False, (1, 0, 0, 0, 0)),
    ("lossy permeability", dict(eps_i=4.0, mu_i=1 - 1j, eps_e=1.0, mu_e=1.0), (1, 1j), False,
     (0, 1, 1, 1, 1)),
    ("lipschitz admissible", AIR_GLASS, (1, -1j), True, (1, 1, 1, 1, 1)),
    ("lipschitz wrong sign", AIR_GLASS, (1, 1j), True, (1, 1, 1, 0, 0)),
    ("lipschitz lossy interior", dict(eps_i=4 + 1j, mu_i=1.0, eps_e=1.0, mu_e=1.0), (1, -1j),
     True, (1, 1, 1, 0, 0)),
]


@pytest.mark.parametrize("name, medium, ab, lip, expected", TRUTH, ids=[t[0] for t in TRUTH])
def test_validation_truth_table(name, medium, ab, lip, expected):
    rep = validate_params(MediumPair(**medium), CouplingParams(*ab), lipschitz_mode=lip)
    got = tuple(int(getattr(rep, f)) for f in FLAGS)
    assert got == expected, rep.messages
    assert rep.ok == bool(expected[-1])
    assert len(rep.messages) == len(rep.failed())


def test_medium_pair():
    med = MediumPair(**AIR_GLASS)
    assert med.kappa_e == pytest.approx(1.0) and med.kappa_i == pytest.approx(2.0)
    assert med.rho == pytest.approx(2.0)
    m2 = MediumPair.from_wavenumbers(1.5, 3 + 0.2j, omega=2.0)
    assert m2.kappa_e == pytest.approx(1.5) and m2.kappa_i == pytest.approx(3 + 0.2j)
    assert MediumPair(eps_i=-4, mu_i=1, eps_e=1, mu_e=1).kappa_i == pytest.approx(2j)
    with pytest.raises(ValueError):
        MediumPair(eps_i=0, mu_i=1, eps_e=1, mu_e=1)
    with pytest.raises(ValueError):
        MediumPair(eps_i=1, mu_i=1, eps_e=1, mu_e=1, omega=0.0)


def test_coupling_params():
    with pytest.raises(ValueError):
        CouplingParams(0, 0)
    r = CouplingParams.recommended(2.0, eta=3.0)
    assert (r.a, r.b) == (1, 3j)
    k = 1 + 0.1j
    r = CouplingParams.recommended(k)
    assert r.b == pytest.approx(-1j * k)
    assert CouplingParams.lipschitz(2.0).b == -2j


def test_formulation_kind():
    assert [FormulationKind(k).basis for k in ("S", "T", "Sprime", "Tprime")] == \
        ["X", "X", "X", "Y"]
    assert FormulationKind("Tprime").primed and not FormulationKind("T").primed


@pytest.mark.parametrize("kind", ["S", "T", "Sprime", "Tprime"])
def test_zero_rhs_without_wave(ops1, dielectric, coupling, kind):
    s = build_system(kind, dielectric, coupling, ops1)
    assert not np.any(s.rhs)
    x, info = solve(s)
    assert not np.any(x)


def test_b_zero_reduces_to_electric(ops1, dielectric):
    with pytest.raises(ValueError, match="solvability"):
        build_system("S", dielectric, CouplingParams(1, 0), ops1)
    s = build_system("S", dielectric, CouplingParams(2.0, 0), ops1, check=False)
    assert np.allclose(s.parts["L"], 2.0 * ops1.map("C_e", "X"))


def test_mismatched_operator_set(space1, coupling):
    ops = OperatorSet(space1, 1.0, 3.0)
    with pytest.raises(ValueError, match="wave numbers"):
        build_system("S", MediumPair(**AIR_GLASS), coupling, ops)


def test_primed_systems_are_transposes(ops1, dielectric, coupling):
    e = duality_error(ops1, dielectric, coupling)
    assert e["S"] < 1e-12 and e["T"] < 1e-12


def test_solvers_agree(ops1, dielectric, coupling):
    wave = PlaneWave([0, 0, 1], [1, 0, 0], dielectric.kappa_e)
    s = build_system("T", dielectric, coupling, ops1, wave)
    x1, i1 = solve(s, method="lu")
    x2, i2 = solve(s, method="gmres", tol=1e-11)
    assert i1["residual"] < 1e-12
    assert i2["iterations"] > 0
    assert np.linalg.norm(x1 - x2) < 1e-8 * np.linalg.norm(x1)


def test_solve_errors(rng):
    A = rng.normal(size=(4, 4))
    A[:, 2] = A[:, 1]
    with pytest.raises(SingularSystemError) as e:
        solve(A, np.ones(4))
    assert e.value.condition > 1e12
    with pytest.raises(ValueError):
        solve(np.eye(3), np.array([1.0, np.nan, 0.0]))
    with pytest.raises(ValueError):
        solve(np.eye(3), np.ones(2))
    with pytest.raises(ValueError):
        solve(np.eye(3))


def test_condition_estimate(rng):
    D = np.diag([1.0, 10.0, 1000.0])
    assert condition_estimate(D) == pytest.approx(1000.0)
    Q = np.linalg.qr(rng.normal(size=(5, 5)))[0]
    A = Q @ np.diag([1, 2, 3, 4, 50.0]) @ Q.T
    assert condition_estimate(A) == pytest.approx(50.0)
    est = condition_estimate(A, exact=False)
    assert 50.0 / 5 <= est <= 50.0 * 5
    with pytest.raises(ValueError):
        condition_estimate(np.ones((2, 3)))
