"""Closed-form oracles on the sphere.

* Mie series for a homogeneous dielectric sphere in a homogeneous medium.
* Eigenvalues of the electric and magnetic boundary operators on vector
  spherical harmonics.
* Interior Maxwell resonances (zeros of ``j_n`` and of ``(x j_n)'``).

Spherical Bessel functions come from :mod:`scipy.special`.  Riccati-Bessel
functions are ``psi_n(x) = x j_n(x)`` and ``xi_n(x) = x h_n^(1)(x)``.

The incident field is ``p exp(i k_e d . x)`` (time factor ``exp(-i w t)``).
Series are built for ``d = e_z`` and ``p = e_x`` in a local frame and then
rotated, so any direction and (complex) polarization is supported.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .formulations import MediumPair
from .kernels import PlaneWave

__all__ = ["riccati", "MieSolution", "mie_solve", "mie_far_field", "truncation_order",
           "SphereOperatorSpectrum", "sphere_operator_spectrum", "interior_resonances",
           "resonance_modes", "vsh_traces", "wronskian_residual"]


def riccati(n, x):
    """``psi, psi', xi, xi'`` at order(s) ``n`` and argument ``x``."""
    n = np.asarray(n)
    x = np.asarray(x, dtype=complex) if np.iscomplexobj(x) else np.asarray(x, dtype=float)
    j = special.spherical_jn(n, x)
    jd = special.spherical_jn(n, x, derivative=True)
    y = special.spherical_yn(n, x)
    yd = special.spherical_yn(n, x, derivative=True)
    h = j + 1j * y
    hd = jd + 1j * yd
    return x * j, j + x * jd, x * h, h + x * hd


def wronskian_residual(n, x):
    """``|psi xi' - psi' xi - i|`` (zero in exact arithmetic)."""
    psi, dpsi, xi, dxi = riccati(n, x)
    return np.abs(psi * dxi - dpsi * xi - 1j)


def truncation_order(x):
    """Default order ``ceil(x + 4 x^(1/3) + 20)`` for size parameter ``x``."""
    x = abs(x)
    return int(math.ceil(x + 4.0 * x ** (1.0 / 3.0) + 20))


def _angular(nmax, mu):
    """``pi_n`` and ``tau_n`` for n = 1..nmax at ``mu = cos(theta)``."""
    mu = np.asarray(mu, float)
    pi = np.zeros((nmax + 1,) + mu.shape)
    tau = np.zeros_like(pi)
    if nmax >= 1:
        pi[1] = 1.0
    for n in range(2, nmax + 1):
        pi[n] = ((2 * n - 1) * mu * pi[n - 1] - n * pi[n - 2]) / (n - 1)
    for n in range(1, nmax + 1):
        tau[n] = n * mu * pi[n] - (n + 1) * pi[n - 1]
    return pi[1:], tau[1:]


def _frame(direction, polarization):
    """Orthonormal frame (e1, e2, e3 = d) and components of ``p`` on e1, e2."""
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    p = np.asarray(polarization, complex)
    pr = p.real if np.linalg.norm(p.real) > 1e-12 * np.linalg.norm(p) else p.imag
    e1 = pr - np.dot(pr, d) * d
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return np.array([e1, e2, d]), np.dot(p, e1), np.dot(p, e2)


@dataclass
class MieSolution:
    """Mie coefficients for one sphere, medium pair and incident plane wave.

    ``a``, ``b`` are the exterior (scattering) coefficients of the electric
    and magnetic multipoles and ``c``, ``d`` the interior ones, in the usual
    convention where for no contrast ``a = b = 0`` and ``c = d = 1``.
    """

    radius: float
    medium: MediumPair
    wave: PlaneWave
    order: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    frame: np.ndarray = field(repr=False)
    amp: tuple = field(repr=False)

    @property
    def kappa_e(self):
        return self.medium.kappa_e

    @property
    def kappa_i(self):
        return self.medium.kappa_i

    # -- cross sections ------------------------------------------------------
    @property
    def scattering_cross_section(self):
        n = np.arange(1, self.order + 1)
        k = self.kappa_e.real
        s = np.sum((2 * n + 1) * (np.abs(self.a) ** 2 + np.abs(self.b) ** 2))
        return float(2 * np.pi / k ** 2 * s * self._power())

    @property
    def extinction_cross_section(self):
        n = np.arange(1, self.order + 1)
        k = self.kappa_e.real
        s = np.sum((2 * n + 1) * (self.a + self.b).real)
        return float(2 * np.pi / k ** 2 * s * self._power())

    def _power(self):
        return abs(self.amp[0]) ** 2 + abs(self.amp[1]) ** 2

    # -- fields ----------------------------------------------------------------
    def _local(self, x, part):
        """Field for unit x-polarization in the local frame (columns x, y, z)."""
        x = np.atleast_2d(np.asarray(x, float))
        r = np.linalg.norm(x, axis=1)
        r = np.where(r == 0, 1e-300, r)
        ct = np.clip(x[:, 2] / r, -1.0, 1.0)
        st = np.sqrt(1.0 - ct ** 2)
        ph = np.arctan2(x[:, 1], x[:, 0])
        cp, sp = np.cos(ph), np.sin(ph)
        N = self.order
        n = np.arange(1, N + 1)[:, None]
        pi, tau = _angular(N, ct)
        En = (1j ** n) * (2 * n + 1) / (n * (n + 1))
        if part == "interior":
            k = self.kappa_i
            cM, cN = self.c[:, None], -1j * self.d[:, None]
            kind = 1
        elif part == "scattered":
            k = self.kappa_e
            cM, cN = -self.b[:, None], 1j * self.a[:, None]
            kind = 3
        else:
            k = self.kappa_e
            cM, cN = np.ones((N, 1)), -1j * np.ones((N, 1))
            kind = 1
        rho = k * r
        if kind == 1:
            z = special.spherical_jn(n, rho)
            dz = special.spherical_jn(n, rho, derivative=True)
        else:
            z = special.spherical_jn(n, rho) + 1j * special.spherical_yn(n, rho)
            dz = special.spherical_jn(n, rho, derivative=True) + \
                1j * special.spherical_yn(n, rho, derivative=True)
        zr = z / rho
        dzr = zr + dz                  # (rho z)' / rho
        # M_o1n and N_e1n components (r, theta, phi)
        Mt = cp * pi * z
        Mp = -sp * tau * z
        Nr = cp * n * (n + 1) * st * pi * zr
        Nt = cp * tau * dzr
        Np = -sp * pi * dzr
        Er = np.sum(En * cN * Nr, axis=0)
        Et = np.sum(En * (cM * Mt + cN * Nt), axis=0)
        Ep = np.sum(En * (cM * Mp + cN * Np), axis=0)
        er = np.stack([st * cp, st * sp, ct], axis=1)
        et = np.stack([ct * cp, ct * sp, -st], axis=1)
        ep = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)
        return Er[:, None] * er + Et[:, None] * et + Ep[:, None] * ep

    def _field(self, x, part):
        x = np.atleast_2d(np.asarray(x, float))
        R = self.frame                             # rows e1, e2, e3
        xl = x @ R.T
        out = np.zeros(x.shape, complex)
        al, be = self.amp
        if al != 0:
            out += al * (self._local(xl, part) @ R)
        if be != 0:
            # y-polarization: rotate the x-polarized solution by 90 degrees about e3
            Rz = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
            f = self._local(xl @ Rz, part) @ Rz.T
            out += be * (f @ R)
        return out

    def scattered_field(self, x):
        return self._field(x, "scattered")

    def interior_field(self, x):
        return self._field(x, "interior")

    def incident_field(self, x):
        return self.wave.field(np.atleast_2d(np.asarray(x, float)))

    def total_field(self, x):
        """Interior field inside the sphere, incident plus scattered outside."""
        x = np.atleast_2d(np.asarray(x, float))
        inside = np.linalg.norm(x, axis=1) < self.radius
        out = np.empty(x.shape, complex)
        if inside.any():
            out[inside] = self.interior_field(x[inside])
        if (~inside).any():
            xo = x[~inside]
            out[~inside] = self.scattered_field(xo) + self.incident_field(xo)
        return out

    def far_field(self, directions):
        return mie_far_field(self, directions)


def _coefficients(N, x, m_x, mu_e, mu_i, ke, ki):
    n = np.arange(1, N + 1)
    psi, dpsi, xi, dxi = riccati(n, x)
    psim, dpsim, _, _ = riccati(n, m_x)
    jx = psi / x
    hx = xi / x
    jm = psim / m_x
    # magnetic multipoles (b, c): tangential E and tangential curl E / mu
    #   j(x) - b h(x) = c j(mx)
    #   (ke/mu_e)(psi'(x) - b xi'(x))/x = (ki/mu_i) c psi'(mx)/(mx)
    A11, A12, r1 = hx, jm, jx
    A21, A22, r2 = ke / mu_e * dxi / x, ki / mu_i * dpsim / m_x, ke / mu_e * dpsi / x
    det = A11 * A22 - A12 * A21
    b = (r1 * A22 - A12 * r2) / det
    c = (A11 * r2 - A21 * r1) / det
    # electric multipoles (a, d)
    #   psi'(x)/x - a xi'(x)/x = d psi'(mx)/(mx)
    #   (ke/mu_e)(j(x) - a h(x)) = (ki/mu_i) d j(mx)
    A11, A12, r1 = dxi / x, dpsim / m_x, dpsi / x
    A21, A22, r2 = ke / mu_e * hx, ki / mu_i * jm, ke / mu_e * jx
    det = A11 * A22 - A12 * A21
    a = (r1 * A22 - A12 * r2) / det
    d = (A11 * r2 - A21 * r1) / det
    return a, b, c, d


def mie_solve(radius, med, wave, N=None):
    """Mie coefficients for a sphere of ``radius`` centred at the origin.

    Parameters
    ----------
    radius : float
    med : MediumPair
    wave : PlaneWave
        Incident wave; its wave number is replaced by ``med.kappa_e``.
    N : int, optional
        Truncation order.  Defaults to :func:`truncation_order`.

    Raises
    ------
    ValueError
        If ``N`` is below ``kappa_e * radius + 20`` or the coefficients at
        order ``N`` are not below ``1e-12`` of the largest one.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    ke, ki = med.kappa_e, med.kappa_i
    x = ke * radius
    if abs(ke.imag) > 0:
        raise ValueError("the Mie oracle needs a real exterior wave number")
    x = x.real
    if N is None:
        N = truncation_order(x)
    if N < x + 20:
        raise ValueError("truncation order %d too small for size parameter %.3g" % (N, x))
    mx = ki * radius
    if mx.imag == 0:
        mx = mx.real
    a, b, c, d = _coefficients(N, x, mx, med.mu_e, med.mu_i, ke, ki)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite Mie coefficients (order %d)" % N)
    peak = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    tail = max(abs(a[-1]), abs(b[-1]))
    if tail > 1e-12 * peak and peak > 1e-300:
        raise ValueError("Mie series not converged at order %d (tail %.2e)" % (N, tail / peak))
    w = wave.with_kappa(ke)
    R, al, be = _frame(w.direction, w.polarization)
    return MieSolution(radius=float(radius), medium=med, wave=w, order=N,
                       a=a, b=b, c=c, d=d, frame=R, amp=(al, be))


def mie_far_field(sol, directions):
    """Far-field pattern ``E^s(x) ~ exp(i k |x|)/|x| E_inf(x/|x|)``.

    Parameters
    ----------
    sol : MieSolution
    directions : (m, 3) array of unit vectors

    Returns
    -------
    (m, 3) complex array, tangential to each direction.
    """
    dirs = np.atleast_2d(np.asarray(directions, float))
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    R = sol.frame
    k = sol.kappa_e.real
    N = sol.order
    n = np.arange(1, N + 1)[:, None]
    fac = (2 * n + 1) / (n * (n + 1))

    def local(dl):
        ct = np.clip(dl[:, 2], -1.0, 1.0)
        st = np.sqrt(1.0 - ct ** 2)
        ph = np.arctan2(dl[:, 1], dl[:, 0])
        cp, sp = np.cos(ph), np.sin(ph)
        pi, tau = _angular(N, ct)
        S1 = np.sum(fac * (sol.a[:, None] * pi + sol.b[:, None] * tau), axis=0)
        S2 = np.sum(fac * (sol.a[:, None] * tau + sol.b[:, None] * pi), axis=0)
        et = np.stack([ct * cp, ct * sp, -st], axis=1)
        ep = np.stack([-sp, cp, np.zeros_like(sp)], axis=1)
        return (1j / k) * ((cp * S2)[:, None] * et - (sp * S1)[:, None] * ep)

    dl = dirs @ R.T
    out = np.zeros(dirs.shape, complex)
    al, be = sol.amp
    if al != 0:
        out += al * (local(dl) @ R)
    if be != 0:
        Rz = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        out += be * ((local(dl @ Rz) @ Rz.T) @ R)
    return out


@dataclass
class SphereOperatorSpectrum:
    """Action of ``C_kappa`` and ``M_kappa`` on vector spherical harmonics.

    For each order ``n`` and the pair ``t1 = grad_G Y x n``, ``t2 = grad_G Y``::

        C t1 = c_te t2,   C t2 = c_tm t1,   M t1 = m t1,   M t2 = -m t2

    with ``c_te = -i psi xi``, ``c_tm = i psi' xi'`` and
    ``m = (i/2)(psi xi)'`` at ``x = kappa * radius``.
    """

    kappa: complex
    radius: float
    n: np.ndarray
    c_te: np.ndarray
    c_tm: np.ndarray
    m: np.ndarray

    @property
    def c_eig(self):
        """Positive-branch eigenvalue ``sqrt(c_te c_tm)`` of ``C`` (the other is its negative)."""
        return np.sqrt(self.c_te * self.c_tm)

    def eigenvalues(self, n):
        """Eigenvalues of the 2x2 blocks of C and M for order ``n``."""
        i = int(np.searchsorted(self.n, n))
        c = self.c_eig[i]
        return np.array([c, -c]), np.array([self.m[i], -self.m[i]])

    def block(self, n):
        """2x2 matrices of C and M in the basis ``(t1, t2)``."""
        i = int(np.searchsorted(self.n, n))
        C = np.array([[0, self.c_tm[i]], [self.c_te[i], 0]])
        M = np.diag([self.m[i], -self.m[i]])
        return C, M

    def calderon_residual(self):
        """``|c^2 + m^2 - 1/4|`` per order."""
        return np.abs(self.c_te * self.c_tm + self.m ** 2 - 0.25)


def sphere_operator_spectrum(kappa, radius=1.0, n_max=10):
    """Closed-form spectra of the boundary operators on a sphere."""
    k = complex(kappa)
    if k == 0:
        raise ValueError("kappa must be non-zero")
    n = np.arange(1, n_max + 1)
    x = k * radius
    if x.imag == 0:
        x = x.real
    psi, dpsi, xi, dxi = riccati(n, x)
    return SphereOperatorSpectrum(kappa=k, radius=float(radius), n=n,
                                  c_te=-1j * psi * xi, c_tm=1j * dpsi * dxi,
                                  m=0.5j * (dpsi * xi + psi * dxi))


def resonance_modes(radius, kappa_range, samples_per_unit=200):
    """Interior resonances with labels: list of ``(kappa, n, kind)``.

    ``kind`` is ``"TE"`` for zeros of ``j_n(kappa R)`` and ``"TM"`` for
    zeros of ``(x j_n(x))'`` at ``x = kappa R``.
    """
    lo, hi = map(float, kappa_range)
    if not (0 < lo < hi):
        raise ValueError("kappa_range must be positive and increasing")
    out = []
    x_lo, x_hi = lo * radius, hi * radius
    grid = np.linspace(x_lo, x_hi, max(int((x_hi - x_lo) * samples_per_unit), 16) + 1)
    n = 1
    while True:
        fns = {"TE": lambda x, n=n: special.spherical_jn(n, x),
               "TM": lambda x, n=n: special.spherical_jn(n, x)
               + x * special.spherical_jn(n, x, derivative=True)}
        # the first zero of j_n and of (x j_n)' both exceed n - 1/2
        if n - 0.5 > x_hi:
            break
        for kind, f in fns.items():
            v = f(grid)
            for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]:
                x0 = optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15)
                out.append((x0 / radius, n, kind))
            for i in np.nonzero(v == 0)[0]:
                out.append((grid[i] / radius, n, kind))
        n += 1
    out.sort()
    return out


def interior_resonances(radius, kappa_range):
    """Interior Maxwell eigen-wavenumbers of a sphere inside ``kappa_range``."""
    return np.array([k for k, _, _ in resonance_modes(radius, kappa_range)])


def vsh_traces(n, x, normals, radius=1.0):
    """Tangential vector spherical harmonics of order ``n`` at surface points.

    Returns two arrays of shape ``(2n+1, m, 3)``: ``t1 = grad_G Y x n`` and
    ``t2 = grad_G Y`` for a real orthonormal basis of degree-``n`` spherical
    harmonics.  ``x`` need not lie exactly on the sphere; the harmonics are
    evaluated at ``x/|x|`` and the surface gradient uses ``normals``.
    """
    x = np.asarray(x, float)
    nrm = np.asarray(normals, float)

    def ylm(pts):
        r = np.linalg.norm(pts, axis=-1)
        th = np.arccos(np.clip(pts[..., 2] / r, -1, 1))
        ph = np.arctan2(pts[..., 1], pts[..., 0])
        out = []
        for m in range(0, n + 1):
            y = special.sph_harm_y(n, m, th, ph)
            if m == 0:
                out.append(y.real)
            else:
                out.append(np.sqrt(2) * (-1) ** m * y.real)
                out.append(np.sqrt(2) * (-1) ** m * y.imag)
        # solid harmonics r^n Y so that the 3-d gradient is smooth
        return np.array(out) * (r / radius) ** n

    h = 1e-4 * radius
    grad = np.zeros((2 * n + 1,) + x.shape)
    for d in range(3):
        e = np.zeros(3)
        e[d] = h
        grad[..., d] = (-ylm(x + 2 * e) + 8 * ylm(x + e) - 8 * ylm(x - e) + ylm(x - 2 * e)) / (12 * h)
    grad = grad - np.sum(grad * nrm, axis=-1, keepdims=True) * nrm
    t2 = grad
    t1 = np.cross(grad, nrm)
    return t1, t2
