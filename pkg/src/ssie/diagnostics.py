"""Registered numerical checks of the operators and potentials.

Every check returns a :class:`CheckResult` (name, value, threshold,
pass/fail).  :func:`run_checks` runs the registry on one mesh and wave
number; the ``diagnose`` command prints one line per result.
"""

from dataclasses import dataclass

import numpy as np

from .fields import SurfaceDensity, eval_potentials, _representation
from .kernels import PlaneWave, incident_traces, project_trace
from .operators import (anticommutator_residual, antisymmetry_error, c0_star_check,
                        calderon_residual, electric_map, magnetic_map)

__all__ = ["CheckResult", "jump_relation_error", "stratton_chu_error", "spectral_errors",
           "CHECKS", "run_checks", "format_report"]


@dataclass
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool
    upper: bool = True

    def line(self):
        rel = "<=" if self.upper else ">"
        return "%-28s %.6e %s %.3e %s" % (self.name, self.value, rel, self.threshold,
                                          "PASS" if self.passed else "FAIL")


def _check(name, value, threshold, upper=True):
    value = float(value)
    ok = value <= threshold if upper else value > threshold
    return CheckResult(name, value, threshold, bool(ok and np.isfinite(value)), upper)


def _probe_field(seed=0):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(3, 3))
    d = rng.normal(size=3)

    def field(x, n):
        return np.cross(n, x @ A.T + np.outer(np.sin(x @ d), d))

    return field


def jump_relation_error(space, kappa, offset=None, count=200, seed=0, flip_m=False):
    """Trace jumps of the electric and magnetic potentials across the surface.

    A smooth tangential field ``t`` is projected onto the edge space and
    both potentials of the projection are evaluated at ``c -/+ offset n``
    for ``count`` random triangle centroids ``c``.  The continuum jumps
    are ``[gamma_N] Psi_E t = -t`` and ``[gamma_D] Psi_M t = -t`` (interior
    minus exterior), so the relative mismatches against ``-t(c)`` are
    returned as ``{"E": ..., "M": ...}``, together with the (vanishing)
    opposite jumps ``"E_dirichlet"``, ``"M_neumann"``.

    ``flip_m`` negates the magnetic potential, a fault hook for testing
    that the check can fail.
    """
    mesh = space.mesh
    if offset is None:
        offset = 1e-3 * mesh.diameter
    rng = np.random.default_rng(seed)
    idx = rng.choice(mesh.n_triangles, min(count, mesh.n_triangles), replace=False)
    c = mesh.centroids[idx]
    n = mesh.normals[idx]
    field = _probe_field(seed)
    t = field(c, n)
    dens = SurfaceDensity(project_trace(space, field, basis="X"), space)
    k = complex(kappa)
    sign_m = -1.0 if flip_m else 1.0
    out = {}
    # the representation evaluates -Psi_E jE - Psi_M jM
    for which, rep in (("E", _representation(dens, None, k)),
                       ("M", _representation(None, dens, k))):
        Fi, Ci = rep.field_and_curl(c - offset * n)
        Fo, Co = rep.field_and_curl(c + offset * n)
        s = -1.0 if which == "E" else -sign_m
        dD = s * np.cross(n, Fi - Fo)
        dN = s * np.cross(n, Ci - Co) / k
        ref = np.linalg.norm(t)
        main, other = (dN, dD) if which == "E" else (dD, dN)
        out[which] = float(np.linalg.norm(main + t) / ref)
        out[which + ("_dirichlet" if which == "E" else "_neumann")] = \
            float(np.linalg.norm(other) / ref)
    return out


def stratton_chu_error(space, kappa, points_in=None, points_out=None, wave=None, seed=1):
    """Reproduction of a plane wave by its own traces.

    Inside the surface ``-Psi_E gamma_N E - Psi_M gamma_D E = E``; outside
    it vanishes.  Returns the relative interior error and the exterior
    magnitude relative to the interior reference.
    """
    rng = np.random.default_rng(seed)
    if wave is None:
        wave = PlaneWave([0.3, 0.2, 1.0], [1.0, 0.0, -0.3], kappa)
    if points_in is None or points_out is None:
        # radii relative to the inscribed / circumscribed sphere of the mesh
        r = np.linalg.norm(space.mesh.vertices, axis=1)
        cen = space.mesh.vertices.mean(axis=0)

        def draw(lo, hi):
            p = rng.normal(size=(20, 3))
            return cen + p * (rng.uniform(lo, hi, 20) / np.linalg.norm(p, axis=1))[:, None]

        if points_in is None:
            points_in = draw(0.0, 0.7 * r.min())
        if points_out is None:
            points_out = draw(1.3 * r.max(), 3.0 * r.max())
    gd, gn = incident_traces(wave, space)
    jE, jM = SurfaceDensity(gn, space), SurfaceDensity(gd, space)
    ref = wave.field(points_in)
    Ein = eval_potentials(jE, jM, kappa, points_in)
    Eout = eval_potentials(jE, jM, kappa, points_out)
    scale = np.linalg.norm(ref)
    return {"inside": float(np.linalg.norm(Ein - ref) / scale),
            "outside": float(np.linalg.norm(Eout) / scale)}


def spectral_errors(space, kappa, n_max=3, radius=1.0):
    """Discrete eigenvalues of ``C`` and ``M`` on a sphere against closed forms.

    For each order ``n`` the ``2(2n+1)`` tangential harmonics are projected
    onto the edge space and its dual, the discrete maps are compressed onto
    those spans by least squares, and every eigenvalue of the compression
    is matched with the nearest closed-form value.

    Returns
    -------
    dict
        ``{n: (err_C, err_M)}`` with the largest relative eigenvalue errors.
    """
    from .mie import sphere_operator_spectrum, vsh_traces

    CX = electric_map(space, kappa, "X")
    MX = magnetic_map(space, kappa)
    closed = sphere_operator_spectrum(kappa, radius, n_max)

    def harmonics(n, basis):
        cols = []
        for which in (0, 1):
            for m in range(2 * n + 1):
                def trace(x, nrm, which=which, m=m):
                    return vsh_traces(n, x, nrm, radius)[which][m]
                cols.append(project_trace(space, trace, basis=basis))
        return np.array(cols).T

    out = {}
    for n in range(1, n_max + 1):
        UX, UY = harmonics(n, "X"), harmonics(n, "Y")
        KC = np.linalg.lstsq(UY, CX @ UX, rcond=None)[0]
        KM = np.linalg.lstsq(UX, MX @ UX, rcond=None)[0]
        ec, em = closed.eigenvalues(n)

        def worst(K, ref):
            return max(np.min(np.abs(d - ref)) / abs(ref[0]) for d in np.linalg.eigvals(K))

        out[n] = (float(worst(KC, ec)), float(worst(KM, em)))
    return out


# -- registry ----------------------------------------------------------------

def _calderon(space, kappa, opts):
    return [_check("calderon", calderon_residual(kappa, space), opts.get("calderon_tol", 0.1))]


def _anticommutator(space, kappa, opts):
    return [_check("anticommutator", anticommutator_residual(kappa, space),
                   opts.get("calderon_tol", 0.1))]


def _jumps(space, kappa, opts):
    e = jump_relation_error(space, kappa, flip_m=opts.get("flip_m", False))
    tol = opts.get("jump_tol", 0.1)
    return [_check("jump_neumann_electric", e["E"], tol),
            _check("jump_dirichlet_magnetic", e["M"], tol)]


def _antisymmetry(space, kappa, opts):
    e = antisymmetry_error(kappa, space)
    return [_check("antisymmetry_C", e["C"], 1e-8), _check("antisymmetry_M", e["M"], 1e-8)]


def _c0star(space, kappa, opts):
    out = []
    for test in ("primal", "YY"):
        r = c0_star_check(space, test)
        out.append(_check("c0star_selfadjoint_" + test, r["asymmetry"], 1e-8))
        out.append(_check("c0star_min_eig_" + test, r["min_eig"], 0.0, upper=False))
    return out


def _stratton_chu(space, kappa, opts):
    e = stratton_chu_error(space, kappa)
    tol = opts.get("stratton_chu_tol", 0.05)
    return [_check("stratton_chu_inside", e["inside"], tol),
            _check("stratton_chu_outside", e["outside"], tol)]


CHECKS = {"calderon": _calderon, "anticommutator": _anticommutator, "jumps": _jumps,
          "antisymmetry": _antisymmetry, "c0star": _c0star, "stratton_chu": _stratton_chu}


def run_checks(space, kappa, names=None, **opts):
    """Run registered checks; returns a flat list of :class:`CheckResult`."""
    names = list(CHECKS) if names is None else names
    out = []
    for name in names:
        out.extend(CHECKS[name](space, kappa, opts))
    return out


def format_report(results):
    return "\n".join(r.line() for r in results)
