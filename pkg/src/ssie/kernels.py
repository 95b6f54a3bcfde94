"""Helmholtz kernel, plane waves and their boundary traces.

Trace conventions (used everywhere in the package)::

    gamma_D u = n x u
    gamma_N u = (1 / kappa) n x curl u

The ``1 / kappa`` in the Neumann trace is deliberate: it makes the
electric and magnetic potentials symmetric in the Calderon identities.
"""

from dataclasses import dataclass

import numpy as np

from .quadrature import regular_rule

__all__ = ["WaveNumber", "wavenumber", "green", "green_grad", "PlaneWave",
           "project_trace", "incident_traces"]

FOUR_PI = 4.0 * np.pi


def wavenumber(value):
    """Validate a wave number (``Im >= 0``) and return it as complex."""
    k = complex(value)
    if k.imag < 0:
        raise ValueError("wave number must have non-negative imaginary part, got %r" % (value,))
    return k


WaveNumber = complex


def green(kappa, r):
    """Fundamental solution ``exp(i kappa r) / (4 pi r)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("green is singular at r = 0")
    return np.exp(1j * complex(kappa) * r) / (FOUR_PI * r)


def green_grad(kappa, x, y):
    """Gradient in ``x`` of ``G(kappa, |x - y|)``.

    Works on single points or on ``(..., 3)`` arrays.
    """
    d = np.asarray(x, float) - np.asarray(y, float)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise ValueError("green_grad is singular for coincident points")
    k = complex(kappa)
    g = np.exp(1j * k * r) / (FOUR_PI * r)
    return ((1j * k - 1.0 / r) * g / r)[..., None] * d


@dataclass(frozen=True)
class PlaneWave:
    """``E(x) = p exp(i kappa d . x)``.

    Parameters
    ----------
    direction : array_like, 3
        Propagation direction; normalised on construction.
    polarization : array_like, 3
        Complex amplitude, must be orthogonal to ``direction``.
    kappa : complex
        Wave number of the medium the wave travels in.
    """

    direction: np.ndarray
    polarization: np.ndarray
    kappa: complex

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        d = d / np.linalg.norm(d)
        p = np.asarray(self.polarization, dtype=complex)
        if abs(np.dot(d, p)) > 1e-14 * max(np.linalg.norm(p), 1e-300):
            raise ValueError("polarization must be orthogonal to the direction")
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "polarization", p)
        object.__setattr__(self, "kappa", wavenumber(self.kappa))

    def field(self, x):
        x = np.asarray(x, float)
        ph = np.exp(1j * self.kappa * (x @ self.direction))
        return ph[..., None] * self.polarization

    def curl(self, x):
        """``curl E = i kappa d x E``."""
        return 1j * self.kappa * np.cross(self.direction, self.field(x))

    def dirichlet(self, x, n):
        return np.cross(n, self.field(x))

    def neumann(self, x, n):
        """``(1/kappa) n x curl E = i n x (d x E)``."""
        return 1j * np.cross(n, np.cross(self.direction, self.field(x)))

    def with_kappa(self, kappa):
        return PlaneWave(self.direction, self.polarization, kappa)


def project_trace(space, trace, order=6, basis="X"):
    """Coefficients of a tangential field in the edge space (or its dual).

    With ``basis="X"`` the field is tested against the dual functions in
    the skew pairing and the mixed pairing matrix is solved, so that
    ``B(trace - t_h, g) = 0`` for every dual function ``g``.  With
    ``basis="Y"`` the roles are swapped: the result holds coefficients of
    dual functions and the residual is B-orthogonal to every edge function.

    Parameters
    ----------
    space : CurrentSpace
    trace : callable
        ``trace(x, n)`` returning tangential vectors for points ``x`` with
        unit normals ``n``.
    """
    from .operators import get_assembler

    asm = get_assembler(space)
    if basis == "X":
        return asm.solve_pairing(pairing_rhs(space, trace, order))
    if basis == "Y":
        # G_XY = -G_YX^T
        return -asm.solve_pairing_transpose(pairing_rhs(space, trace, order, test="primal"))
    raise ValueError("basis must be 'X' or 'Y', got %r" % (basis,))


def pairing_rhs(space, trace, order=6, test="dual"):
    """Vector ``b[k] = B(trace, g_k)`` over the test functions.

    ``test="dual"`` uses the barycentric dual functions, ``"primal"`` the
    edge functions themselves.
    """
    if test == "dual":
        mesh, local_map = space.refinement.mesh, space.dual.local_map
    elif test == "primal":
        mesh, local_map = space.mesh, space.local_map
    else:
        raise ValueError("test must be 'dual' or 'primal'")
    rule = regular_rule(order)
    P = mesh.corners
    n = mesh.normals
    x = np.einsum("qk,tkd->tqd", rule.points, P)               # (F, Q, 3)
    nn = np.broadcast_to(n[:, None, :], x.shape)
    t = trace(x.reshape(-1, 3), nn.reshape(-1, 3)).reshape(x.shape)
    # int t . (phi_j x n) = int (n x t) . phi_j
    nt = np.cross(nn, t)
    loc = np.empty((mesh.n_triangles, 3), dtype=complex)
    for j in range(3):
        phi = (x - P[:, None, j]) / (2.0 * mesh.areas[:, None, None])
        loc[:, j] = mesh.areas * np.einsum("q,tqd,tqd->t", rule.weights, nt, phi)
    return local_map.T @ loc.ravel()


def incident_traces(wave, space, order=6, basis="X"):
    """Projected Dirichlet and Neumann traces of a plane wave.

    Returns
    -------
    gd, gn : complex arrays of length ``space.dof_count``
        ``gamma_D E`` and ``gamma_N E`` (with the ``1/kappa`` factor).
    """
    gd = project_trace(space, wave.dirichlet, order, basis)
    gn = project_trace(space, wave.neumann, order, basis)
    return gd, gn
