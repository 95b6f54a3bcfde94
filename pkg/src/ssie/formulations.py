"""Single-source integral equations for dielectric scattering.

Four formulations are provided.  ``S`` and ``T`` come from a layer ansatz
on the exterior field,

    E^s = -a Psi_E(k_e) j - b Psi_M(k_e) C0* j,

and ``Sprime`` / ``Tprime`` from an ansatz on the interior field.  The
static operator ``C0*`` in the exterior ansatz is what removes the
spurious resonances of the classical single-source equations.

Discretization
--------------
Two current spaces are used: edge (RWG) functions ``X`` and barycentric
dual functions ``Y``.  Electric-type operators map one space to the other,
magnetic ones stay in place (see :class:`OperatorSet`), and the
formulations are written so that every product is formed from such maps.
The unknown lies in ``X`` for ``S``, ``T`` and ``Sprime`` and in ``Y`` for
``Tprime``.  With this layout the Galerkin matrices of ``Sprime`` and
``Tprime`` are exactly the B-transposes of those of ``S`` and ``T``.
"""

import cmath
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla

from .kernels import project_trace, wavenumber
from .operators import assemble_C, assemble_C0_star, assemble_M, get_assembler

__all__ = ["MediumPair", "CouplingParams", "FormulationKind", "ValidationReport",
           "validate_params", "OperatorSet", "LinearSystem", "build_Le_Ne",
           "build_system", "solve", "condition_estimate", "b_transpose_tested",
           "SingularSystemError", "duality_error"]

TOL = 1e-12


class SingularSystemError(np.linalg.LinAlgError):
    """Raised when a system is numerically singular."""

    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


def _sqrt_upper(z):
    """Square root with non-negative imaginary part."""
    r = cmath.sqrt(complex(z))
    if r.imag < 0 or (r.imag == 0 and r.real < 0):
        r = -r
    return r


@dataclass(frozen=True)
class MediumPair:
    """Interior and exterior material constants at angular frequency ``omega``."""

    eps_i: complex
    mu_i: complex
    eps_e: complex
    mu_e: complex
    omega: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        for name in ("eps_i", "mu_i", "eps_e", "mu_e"):
            v = complex(getattr(self, name))
            if v == 0:
                raise ValueError("%s must be non-zero" % name)
            object.__setattr__(self, name, v)

    @classmethod
    def from_wavenumbers(cls, kappa_e, kappa_i, mu_e=1.0, mu_i=1.0, omega=1.0):
        """Medium with prescribed wave numbers (``eps = kappa^2 / (omega^2 mu)``)."""
        ke = wavenumber(kappa_e)
        ki = wavenumber(kappa_i)
        return cls(eps_i=ki ** 2 / (omega ** 2 * mu_i), mu_i=mu_i,
                   eps_e=ke ** 2 / (omega ** 2 * mu_e), mu_e=mu_e, omega=omega)

    @property
    def kappa_i(self):
        return self.omega * _sqrt_upper(self.eps_i * self.mu_i)

    @property
    def kappa_e(self):
        return self.omega * _sqrt_upper(self.eps_e * self.mu_e)

    @property
    def rho(self):
        """``mu_e kappa_i / (mu_i kappa_e)``."""
        return self.mu_e * self.kappa_i / (self.mu_i * self.kappa_e)


@dataclass(frozen=True)
class CouplingParams:
    """Ansatz constants ``a`` and ``b``; ``eta`` records the family parameter."""

    a: complex = 1.0
    b: complex = 1j
    eta: float = None

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if a == 0 and b == 0:
            raise ValueError("(a, b) must not both vanish")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def recommended(cls, kappa_e, eta=1.0):
        """The choice that makes all four equations uniquely solvable.

        ``a = 1`` and ``b = i eta`` when ``kappa_e^2`` is real, otherwise
        ``b = -i eta kappa_e sign(Im kappa_e^2)``.
        """
        k2 = complex(kappa_e) ** 2
        if abs(k2.imag) <= TOL * abs(k2):
            return cls(1.0, 1j * eta, eta)
        return cls(1.0, -1j * eta * complex(kappa_e) * np.sign(k2.imag), eta)

    @classmethod
    def lipschitz(cls, eta=1.0):
        """``a = 1, b = -i eta``: the choice for non-smooth boundaries."""
        return cls(1.0, -1j * eta, eta)


class FormulationKind(str, Enum):
    S = "S"
    T = "T"
    Sprime = "Sprime"
    Tprime = "Tprime"

    @property
    def primed(self):
        return self in (FormulationKind.Sprime, FormulationKind.Tprime)

    @property
    def basis(self):
        """Space holding the unknown: ``"X"`` edge functions, ``"Y"`` dual."""
        return "Y" if self is FormulationKind.Tprime else "X"


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_params`.

    Each flag is the conjunction of the inequalities listed under its name
    in ``checks``; ``messages`` holds a readable line per failed check.
    """

    uniqueness_ok: bool
    interior_eigen_excluded: bool
    fredholm_ok: bool
    lipschitz_garding_ok: bool
    final_ok: bool
    checks: list = field(default_factory=list)
    messages: list = field(default_factory=list)

    @property
    def ok(self):
        return self.final_ok

    def failed(self):
        return [c for c in self.checks if not c[2]]


def _nonzero(x, *scale):
    m = max([abs(x)] + [abs(s) for s in scale] + [1e-300])
    return abs(x) > TOL * m


def _is_real(z):
    z = complex(z)
    return abs(z.imag) <= TOL * max(abs(z), 1e-300)


def _positive_real(z):
    z = complex(z)
    return _is_real(z) and z.real > 0


def validate_params(med, cp, lipschitz_mode=False):
    """Evaluate the sufficient conditions for uniqueness and solvability.

    Parameters
    ----------
    med : MediumPair
    cp : CouplingParams
    lipschitz_mode : bool
        Require the stricter hypotheses for Lipschitz (non-smooth) surfaces:
        real positive ``mu`` and ``kappa``, ``a = 1`` and ``b = -i eta`` with
        ``eta > 0``.

    Returns
    -------
    ValidationReport
        ``final_ok`` combines the groups that the chosen boundary regularity
        needs.  Nothing is raised; failures are reported.
    """
    ke, ki, mue, mui = med.kappa_e, med.kappa_i, med.mu_e, med.mu_i
    a, b = cp.a, cp.b
    checks = []

    def add(group, name, ok, detail):
        checks.append((group, name, bool(ok), detail))

    # uniqueness of the transmission problem
    k_ok = _positive_real(ke) or ke.imag > TOL * abs(ke)
    add("uniqueness", "kappa_e real positive or Im(kappa_e) > 0", k_ok, "kappa_e = %r" % ke)
    q1 = (ke.conjugate() * mue / mui).imag
    q2 = (ke.conjugate() * mue / mui * ki ** 2).imag
    add("uniqueness", "Im(conj(kappa_e) mu_e/mu_i) <= 0",
        q1 <= TOL * abs(ke * mue / mui), "value %.3e" % q1)
    add("uniqueness", "Im(conj(kappa_e) mu_e/mu_i kappa_i^2) >= 0",
        q2 >= -TOL * abs(ke * mue / mui * ki ** 2), "value %.3e" % q2)

    # interior eigenvalue exclusion
    if not (_nonzero(a) and _nonzero(b)):
        add("eigen", "a != 0 and b != 0", False, "a = %r, b = %r" % (a, b))
    else:
        add("eigen", "a != 0 and b != 0", True, "")
        if _is_real(ke):
            r = (a / b).imag
            add("eigen", "Im(a/b) != 0 (kappa_e real)", _nonzero(r, a / b), "Im(a/b) = %.3e" % r)
        else:
            v = (ke ** 2).imag * (ke * a / b).imag
            add("eigen", "Im(kappa_e^2) Im(kappa_e a/b) > 0", v > TOL * abs(ke ** 2 * ke * a / b),
                "value %.3e" % v)

    # Fredholm property of S and T (smooth boundary)
    f_mu = 1 + mue / mui
    f_k = 1 + mue * ki ** 2 / (mui * ke ** 2)
    add("fredholm", "1 + mu_e/mu_i != 0", _nonzero(f_mu, 1, mue / mui), "value %r" % f_mu)
    add("fredholm", "1 + mu_e kappa_i^2/(mu_i kappa_e^2) != 0",
        _nonzero(f_k, 1, f_k - 1), "value %r" % f_k)
    for tag, expr, parts in (("S", "b kappa_e + 2a", (b * ke, 2 * a)),
                             ("S", "b - 2a kappa_e", (b, -2 * a * ke)),
                             ("T", "b kappa_e - 2a", (b * ke, -2 * a)),
                             ("T", "b + 2a kappa_e", (b, 2 * a * ke))):
        v = parts[0] + parts[1]
        add("fredholm", "%s: %s != 0" % (tag, expr), _nonzero(v, *parts), "value %r" % v)

    # Garding inequalities on Lipschitz surfaces
    if lipschitz_mode:
        for name, v in (("mu_e", mue), ("mu_i", mui), ("kappa_e", ke), ("kappa_i", ki)):
            add("lipschitz", "%s real positive" % name, _positive_real(v), "value %r" % v)
        add("lipschitz", "a = 1", abs(a - 1) <= TOL, "a = %r" % a)
        eta = -b.imag
        add("lipschitz", "b = -i eta with eta > 0",
            abs(b.real) <= TOL * max(abs(b), 1e-300) and eta > TOL, "b = %r" % b)

    # the final invertibility statement (smooth surfaces)
    k2 = ke ** 2
    fin_k = _positive_real(ke) or (ke.imag > TOL * abs(ke) and _nonzero(k2.real, k2))
    add("final", "kappa_e > 0 or (Im kappa_e > 0 and Re kappa_e^2 != 0)", fin_k, "kappa_e = %r" % ke)
    add("final", "a = 1", abs(a - 1) <= TOL, "a = %r" % a)
    if _is_real(k2):
        ok = abs(b.real) <= TOL * max(abs(b), 1e-300) and _nonzero(b.imag)
        add("final", "b = i eta, eta real non-zero (kappa_e^2 real)", ok, "b = %r" % b)
    else:
        eta = b / (-1j * ke * np.sign(k2.imag))
        ok = _is_real(eta) and eta.real > TOL
        add("final", "b = -i eta kappa_e sign(Im kappa_e^2), eta > 0", ok, "b = %r" % b)
    add("final", "mu_i/mu_e != -1", _nonzero(mui / mue + 1, 1, mui / mue), "")
    add("final", "mu_e kappa_i^2/(mu_i kappa_e^2) != -1", _nonzero(f_k, 1, f_k - 1), "")

    def group(name):
        return all(c[2] for c in checks if c[0] == name)

    fredholm = group("fredholm")
    if lipschitz_mode:
        garding = group("lipschitz")
        final = garding
    else:
        # on smooth surfaces the Garding inequalities follow from the same
        # nonvanishing factors as the Fredholm property
        garding = fredholm
        final = group("final")
    msgs = ["%s: %s fails (%s)" % (g, n, d) for g, n, ok, d in checks if not ok]
    return ValidationReport(uniqueness_ok=group("uniqueness"),
                            interior_eigen_excluded=group("eigen"),
                            fredholm_ok=fredholm, lipschitz_garding_ok=garding,
                            final_ok=final, checks=checks, messages=msgs)


ELECTRIC = ("C_e", "C_i", "C0")
MAGNETIC = ("M_e", "M_i")


def _other(space):
    return "Y" if space == "X" else "X"


class OperatorSet:
    """Boundary operators at the exterior and interior wave numbers.

    Operators are held as maps between coefficient vectors of the edge
    space ``X`` and the dual space ``Y``.  With ``G`` the mixed pairing
    (``G[k, l] = B(f_l, g_k)``):

    * electric-type operators (``C_e``, ``C_i``, ``C0`` = ``C0*``) map
      ``X -> Y`` as ``-G^{-T} [A]_XX`` and ``Y -> X`` as ``G^{-1} [A]_YY``;
    * magnetic operators stay in their space: ``G^{-1} [M]_YX`` on ``X``
      and ``-G^{-T} [M]_YX^T`` on ``Y``.

    Each electric-type operator is therefore always tested in the space
    where its Galerkin matrix is stable, and operator products alternate
    between the two spaces.
    """

    def __init__(self, space, kappa_e, kappa_i):
        self.space = space
        self.kappa_e = wavenumber(kappa_e)
        self.kappa_i = wavenumber(kappa_i)
        if self.kappa_e == 0 or self.kappa_i == 0:
            raise ValueError("wave numbers must be non-zero")
        self._asm = get_assembler(space)
        self._maps = {}

    @property
    def n(self):
        return self.space.dof_count

    @cached_property
    def pairing(self):
        return self._asm.pairing

    def _kappa(self, name):
        return self.kappa_e if name.endswith("_e") else self.kappa_i

    def tested(self, name, test):
        """Galerkin matrix of operator ``name`` for test configuration ``test``."""
        if name in ELECTRIC:
            if test not in ("primal", "YY"):
                raise ValueError("electric operators are tested with 'primal' or 'YY'")
            if name == "C0":
                return assemble_C0_star(self.space, test=test).matrix
            return assemble_C(self._kappa(name), self.space, test=test).matrix
        if name in MAGNETIC:
            return assemble_M(self._kappa(name), self.space, test=test).matrix
        raise KeyError(name)

    def codomain(self, name, domain):
        return _other(domain) if name in ELECTRIC else domain

    def map(self, name, domain="X"):
        """Matrix of operator ``name`` acting on coefficients in ``domain``."""
        if domain not in ("X", "Y"):
            raise ValueError("domain must be 'X' or 'Y'")
        key = (name, domain)
        if key not in self._maps:
            asm = self._asm
            if name in ELECTRIC:
                if domain == "X":
                    A = -asm.solve_pairing_transpose(self.tested(name, "primal"))
                else:
                    A = asm.solve_pairing(self.tested(name, "YY"))
            elif name in MAGNETIC:
                T = self.tested(name, "dual")
                if domain == "X":
                    A = asm.solve_pairing(T)
                else:
                    A = -asm.solve_pairing_transpose(np.ascontiguousarray(T.T))
            else:
                raise KeyError(name)
            self._maps[key] = A
        return self._maps[key]

    def to_tested(self, A, codomain):
        """Galerkin form of a map with values in ``codomain``.

        Values in ``X`` are tested with dual functions (``G A``), values in
        ``Y`` with edge functions (``-G^T A``).
        """
        G = self.pairing
        return G @ A if codomain == "X" else -(G.T @ A)

    def traces(self, wave):
        """Projected incident traces: ``gamma_D`` in ``Y``, ``gamma_N`` in ``X``."""
        gd = project_trace(self.space, wave.dirichlet, basis="Y")
        gn = project_trace(self.space, wave.neumann, basis="X")
        return gd, gn


def b_transpose_tested(T):
    """Galerkin matrix of the B-transpose of an operator with Galerkin matrix ``T``.

    If ``T[k, l] = B(A u_l, v_k)`` then ``B(u_l, A' v_k) = -B(A' v_k, u_l)``,
    so the transpose operator has Galerkin matrix ``-T^T`` in the swapped
    spaces.
    """
    return -np.asarray(T).T


def build_Le_Ne(med, cp, ops, primed=False, domain="X"):
    """Exterior combination operators on coefficients in ``domain``.

    Unprimed (``L`` maps to the other space, ``N`` stays)::

        L_e = a C_e - b (1/2 - M_e) C0*
        N_e = -a (1/2 - M_e) + b C_e C0*

    Primed::

        L'_e = a C_e - b C0* (1/2 + M_e)
        N'_e = -a (1/2 + M_e) + b C0* C_e
    """
    a, b = cp.a, cp.b
    d, o = domain, _other(domain)
    I = np.eye(ops.n)
    Ce = ops.map("C_e", d)
    if not primed:
        L = a * Ce
        N = -a * (0.5 * I - ops.map("M_e", d))
        if b != 0:
            C0 = ops.map("C0", d)
            L = L - b * ((0.5 * I - ops.map("M_e", o)) @ C0)
            N = N + b * (ops.map("C_e", o) @ C0)
    else:
        L = a * Ce
        N = -a * (0.5 * I + ops.map("M_e", d))
        if b != 0:
            L = L - b * (ops.map("C0", d) @ (0.5 * I + ops.map("M_e", d)))
            N = N + b * (ops.map("C0", o) @ Ce)
    return L, N


@dataclass
class LinearSystem:
    """Discrete single-source equation.

    ``operator`` is the coefficient map (the formulation's operator acting
    on density coefficients in ``basis`` with values in ``codomain``),
    ``matrix`` its Galerkin form and ``rhs`` the matching right-hand side,
    so that ``matrix @ x = rhs``.
    """

    kind: FormulationKind
    operator: np.ndarray
    rhs_coeffs: np.ndarray
    matrix: np.ndarray
    rhs: np.ndarray
    basis: str
    codomain: str = "X"
    medium: MediumPair = None
    coupling: CouplingParams = None
    parts: dict = field(default_factory=dict, repr=False)


def build_system(kind, med, cp, ops, wave=None, check=True, lipschitz_mode=False):
    """Assemble one of the four formulations.

    Parameters
    ----------
    kind : FormulationKind or str
    med : MediumPair
    cp : CouplingParams
    ops : OperatorSet
        Built at ``med.kappa_e`` and ``med.kappa_i``.
    wave : PlaneWave, optional
        Incident field (in the exterior medium).  ``None`` gives a zero
        right-hand side.
    check : bool
        Refuse parameters that fail :func:`validate_params`.  Pass
        ``False`` to study inadmissible choices (for instance ``b = 0``).

    Notes
    -----
    Unknowns of ``S``, ``T`` and ``Sprime`` are edge-space coefficients,
    the unknown of ``Tprime`` is a dual-space coefficient vector.  The
    Dirichlet data lives in ``Y`` and the Neumann data in ``X``.
    """
    kind = FormulationKind(kind)
    if abs(ops.kappa_e - med.kappa_e) > 1e-12 * abs(med.kappa_e) or \
            abs(ops.kappa_i - med.kappa_i) > 1e-12 * abs(med.kappa_i):
        raise ValueError("operator set was built for different wave numbers")
    if check:
        rep = validate_params(med, cp, lipschitz_mode)
        if not rep.ok:
            raise ValueError("parameters fail the solvability conditions: "
                             + "; ".join(rep.messages))
    n = ops.n
    I = np.eye(n)
    rho = med.rho
    a, b = cp.a, cp.b

    if wave is None:
        gd = gn = np.zeros(n, complex)
    else:
        if abs(wave.kappa - med.kappa_e) > 1e-12 * abs(med.kappa_e):
            wave = wave.with_kappa(med.kappa_e)
        gd, gn = ops.traces(wave)

    if not kind.primed:
        L, N = build_Le_Ne(med, cp, ops, primed=False, domain="X")
        if kind is FormulationKind.S:
            op = rho * ((-0.5 * I + ops.map("M_i", "Y")) @ L) + ops.map("C_i", "X") @ N
            rhs = -rho * ((-0.5 * I + ops.map("M_i", "Y")) @ gd) - ops.map("C_i", "X") @ gn
            codomain = "Y"
        else:
            op = rho * (ops.map("C_i", "Y") @ L) + (-0.5 * I + ops.map("M_i", "X")) @ N
            rhs = -rho * (ops.map("C_i", "Y") @ gd) - (-0.5 * I + ops.map("M_i", "X")) @ gn
            codomain = "X"
        parts = {"L": L, "N": N}
    else:
        Lp, _ = build_Le_Ne(med, cp, ops, primed=True, domain="X")
        _, Np = build_Le_Ne(med, cp, ops, primed=True, domain="Y")
        if kind is FormulationKind.Sprime:
            op = rho * (Lp @ (0.5 * I + ops.map("M_i", "X"))) - Np @ ops.map("C_i", "X")
        else:
            op = rho * (Lp @ ops.map("C_i", "Y")) - Np @ (0.5 * I + ops.map("M_i", "Y"))
        rhs = a * gd
        if b != 0:
            rhs = rhs - b * (ops.map("C0", "X") @ gn)
        codomain = "Y"
        parts = {"L": Lp, "N": Np}
    parts.update(gd=gd, gn=gn)
    return LinearSystem(kind=kind, operator=op, rhs_coeffs=rhs,
                        matrix=ops.to_tested(op, codomain), rhs=ops.to_tested(rhs, codomain),
                        basis=kind.basis, codomain=codomain, medium=med, coupling=cp,
                        parts=parts)


def duality_error(ops, med, cp):
    """Relative mismatch between primed systems and B-transposed unprimed ones.

    Compares Galerkin matrices: ``[Sprime]`` with the transpose of ``[S]``
    and ``[Tprime]`` with that of ``[T]``.  Returns a dict with entries
    ``"S"`` and ``"T"``.
    """
    out = {}
    for k, kp in (("S", "Sprime"), ("T", "Tprime")):
        A = build_system(k, med, cp, ops, check=False).matrix
        Ap = build_system(kp, med, cp, ops, check=False).matrix
        At = b_transpose_tested(A)
        out[k] = float(np.linalg.norm(Ap - At) / np.linalg.norm(At))
    return out


def condition_estimate(system, exact=None):
    """Condition number of a square matrix.

    Uses the exact 2-norm value from singular values when the matrix has at
    most 2000 rows (or ``exact=True``); otherwise the LAPACK 1-norm
    estimate.  Accepts a :class:`LinearSystem` or an array.
    """
    A = system.matrix if isinstance(system, LinearSystem) else np.asarray(system)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("condition_estimate needs a square matrix")
    if exact is None:
        exact = A.shape[0] <= 2000
    if exact:
        s = la.svdvals(A)
        return float(np.inf) if s[-1] == 0 else float(s[0] / s[-1])
    return _cond1(A)


def _cond1(A):
    anorm = np.linalg.norm(A, 1)
    lu, piv, info = la.lapack.get_lapack_funcs(("getrf",), (A,))[0](A)
    if info > 0:
        return float(np.inf)
    gecon = la.lapack.get_lapack_funcs("gecon", (lu,))
    rcond, _ = gecon(lu, anorm, norm="1")
    return float(np.inf) if rcond == 0 else float(1.0 / rcond)


def solve(system, rhs=None, method="lu", tol=1e-12, maxit=None):
    """Solve ``system @ x = rhs``.

    Parameters
    ----------
    system : LinearSystem or (n, n) array
    rhs : array, optional
        Defaults to ``system.rhs`` for a :class:`LinearSystem`.
    method : {"lu", "gmres"}
    tol : float
        GMRES relative tolerance.

    Returns
    -------
    x : complex array
    info : dict
        ``residual`` (relative) and, for GMRES, ``iterations``.
    """
    if isinstance(system, LinearSystem):
        A = system.matrix
        b = system.rhs if rhs is None else rhs
    else:
        A = np.asarray(system)
        b = rhs
    if b is None:
        raise ValueError("no right-hand side given")
    A = np.asarray(A, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape[0] != A.shape[0]:
        raise ValueError("system must be square and match the right-hand side")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("system contains non-finite entries")
    bn = np.linalg.norm(b)
    if bn == 0:
        return np.zeros_like(b), {"residual": 0.0, "iterations": 0}
    if method == "lu":
        lu, piv = la.lu_factor(A, check_finite=False)
        if np.any(np.abs(np.diag(lu)) <= np.finfo(float).eps * np.abs(lu).max()):
            cond = _cond1(A)
            raise SingularSystemError("matrix is singular (condition estimate %.3e)" % cond, cond)
        x = la.lu_solve((lu, piv), b)
        info = {}
    elif method == "gmres":
        n = A.shape[0]
        it = [0]

        def cb(_):
            it[0] += 1

        x, code = spla.gmres(A, b, rtol=tol, atol=0.0, restart=min(n, 200),
                             maxiter=maxit or 10 * n, callback=cb,
                             callback_type="pr_norm")
        if code != 0:
            raise RuntimeError("GMRES did not converge (code %d)" % code)
        info = {"iterations": it[0]}
    else:
        raise ValueError("unknown method %r" % method)
    res = float(np.linalg.norm(A @ x - b) / bn)
    info["residual"] = res
    if method == "lu" and res > 1e-10:
        cond = _cond1(A)
        raise SingularSystemError("LU residual %.2e too large (condition estimate %.3e)"
                                  % (res, cond), cond)
    return x, info
