"""Command-line front end.

Usage::

    ssie {solve,sweep,diagnose,validate,mie} --config run.cfg [--out DIR]
         [--force] [--threads N]

The configuration is a flat ``key = value`` file (``#`` starts a comment).
Recognized keys and defaults are listed in :data:`DEFAULTS`; unknown keys
are an error.  ``mesh`` is either ``icosphere:LEVEL`` (with ``radius``) or
the path of an OFF or Gmsh ASCII v2 file.  Complex values use Python
syntax (``1j``, ``2+0.1j``), vectors are comma separated.

Every CSV file starts with a comment line holding the SHA-256 of the
configuration and the package version, followed by a header row.
Numbers are written with 17 significant digits.
"""

import argparse
import hashlib
import logging
import os
import sys
import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import __version__

log = logging.getLogger("ssie")

DEFAULTS = {
    "mesh": "icosphere:2",
    "mesh_format": "",
    "radius": "1.0",
    "eps_i": "4.0", "mu_i": "1.0", "eps_e": "1.0", "mu_e": "1.0",
    "omega": "1.0",
    "a": "1.0", "b": "1j",
    "formulation": "S",
    "direction": "0,0,1", "polarization": "1,0,0",
    "regular_order": "", "singular_order": "",
    "solver": "lu", "gmres_tol": "1e-12",
    "lipschitz": "false",
    "far_theta": "181", "far_phi": "73",
    "sweep_kappa": "4.2,4.8,31",
    "diagnose_checks": "calderon,anticommutator,jumps,antisymmetry,c0star,stratton_chu",
    "fault": "",
    "out": "ssie_out",
}

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


def parse_config_text(text):
    """Parse ``key = value`` lines into a dict of strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected 'key = value'" % lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError("line %d: unknown key %r" % (lineno, key))
        out[key] = value
    return out


def _complex(s, key):
    try:
        return complex(s.replace(" ", ""))
    except ValueError:
        raise ConfigError("%s: cannot parse %r as a number" % (key, s)) from None


def _vector(s, key):
    try:
        v = np.array([float(x) for x in s.split(",")])
    except ValueError:
        raise ConfigError("%s: expected comma separated numbers, got %r" % (key, s)) from None
    if v.shape != (3,):
        raise ConfigError("%s: expected three components" % key)
    return v


def _bool(s, key):
    s = s.lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError("%s: expected a boolean, got %r" % (key, s))


@dataclass
class RunConfig:
    """Validated run configuration (see :data:`DEFAULTS` for the keys)."""

    raw: dict
    text: str = ""

    @classmethod
    def from_file(cls, path):
        if not os.path.isfile(path):
            raise ConfigError("config file not found: %s" % path)
        with open(path) as fh:
            text = fh.read()
        return cls.from_text(text)

    @classmethod
    def from_text(cls, text):
        raw = dict(DEFAULTS)
        raw.update(parse_config_text(text))
        cfg = cls(raw, text)
        cfg.check()
        return cfg

    def __getitem__(self, key):
        return self.raw[key]

    @property
    def digest(self):
        canon = "\n".join("%s=%s" % kv for kv in sorted(self.raw.items()))
        return hashlib.sha256(canon.encode()).hexdigest()

    def check(self):
        """Type checks and file existence, before any assembly."""
        m = self.raw["mesh"]
        if m.startswith("icosphere:"):
            try:
                level = int(m.split(":", 1)[1])
            except ValueError:
                raise ConfigError("mesh: bad icosphere level in %r" % m) from None
            if not 0 <= level <= 7:
                raise ConfigError("mesh: icosphere level must be in 0..7")
            if not float(self.raw["radius"]) > 0:
                raise ConfigError("radius must be positive")
        elif not os.path.isfile(m):
            raise ConfigError("mesh file not found: %s" % m)
        for k in ("eps_i", "mu_i", "eps_e", "mu_e", "a", "b"):
            _complex(self.raw[k], k)
        if not float(self.raw["omega"]) > 0:
            raise ConfigError("omega must be positive")
        _vector(self.raw["direction"], "direction")
        _vector(self.raw["polarization"], "polarization")
        from .formulations import FormulationKind
        try:
            FormulationKind(self.raw["formulation"])
        except ValueError:
            raise ConfigError("formulation must be one of S, T, Sprime, Tprime") from None
        if self.raw["solver"] not in ("lu", "gmres"):
            raise ConfigError("solver must be 'lu' or 'gmres'")
        _bool(self.raw["lipschitz"], "lipschitz")
        for k in ("far_theta", "far_phi"):
            if int(self.raw[k]) < 2:
                raise ConfigError("%s must be at least 2" % k)
        for k in ("regular_order", "singular_order"):
            if self.raw[k] and int(self.raw[k]) < 1:
                raise ConfigError("%s must be positive" % k)

    # -- derived objects ----------------------------------------------------
    @property
    def is_sphere(self):
        return self.raw["mesh"].startswith("icosphere:")

    def mesh(self):
        from .mesh import load_mesh, make_icosphere
        m = self.raw["mesh"]
        if self.is_sphere:
            return make_icosphere(int(m.split(":", 1)[1]), float(self.raw["radius"]))
        return load_mesh(m, self.raw["mesh_format"] or None)

    def space(self):
        from .mesh import build_current_space
        from .operators import AssemblyOptions, get_assembler
        sp = build_current_space(self.mesh())
        kw = {k: int(self.raw[k]) for k in ("regular_order", "singular_order") if self.raw[k]}
        if kw:
            get_assembler(sp, AssemblyOptions(**kw))
        return sp

    def medium(self, kappa_e=None):
        from .formulations import MediumPair
        vals = {k: _complex(self.raw[k], k) for k in ("eps_i", "mu_i", "eps_e", "mu_e")}
        omega = float(self.raw["omega"])
        med = MediumPair(omega=omega, **vals)
        if kappa_e is not None:
            # rescale the frequency so that the exterior wave number is kappa_e
            med = MediumPair(omega=omega * kappa_e / med.kappa_e.real, **vals)
        return med

    def coupling(self):
        from .formulations import CouplingParams
        return CouplingParams(_complex(self.raw["a"], "a"), _complex(self.raw["b"], "b"))

    def wave(self, kappa):
        from .kernels import PlaneWave
        return PlaneWave(_vector(self.raw["direction"], "direction"),
                         _vector(self.raw["polarization"], "polarization"), kappa)

    @property
    def lipschitz(self):
        return _bool(self.raw["lipschitz"], "lipschitz")

    def sweep_grid(self):
        parts = [p for p in self.raw["sweep_kappa"].split(",") if p.strip()]
        if len(parts) != 3:
            raise ConfigError("sweep_kappa must be 'min,max,count'")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ConfigError("sweep grid is empty")
        if not (0 < lo <= hi):
            raise ConfigError("sweep grid must be positive and increasing")
        return np.linspace(lo, hi, n)


# -- output helpers -----------------------------------------------------------

def fmt(x):
    return "%.17g" % x


def write_csv(path, cfg, header, rows):
    with open(path, "w") as fh:
        fh.write("# config_sha256=%s version=%s\n" % (cfg.digest, __version__))
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def _validation_lines(rep):
    lines = []
    for group, name, ok, detail in rep.checks:
        lines.append("%-10s %-55s %-5s %s" % (group, name, "ok" if ok else "FAIL", detail))
    lines.append("uniqueness_ok=%s interior_eigen_excluded=%s fredholm_ok=%s "
                 "lipschitz_garding_ok=%s final_ok=%s"
                 % (rep.uniqueness_ok, rep.interior_eigen_excluded, rep.fredholm_ok,
                    rep.lipschitz_garding_ok, rep.final_ok))
    if not rep.interior_eigen_excluded:
        lines.append("warning: interior-eigenvalue exclusion not certified")
    return lines


def _required_ok(rep):
    return (rep.uniqueness_ok and rep.interior_eigen_excluded and rep.fredholm_ok
            and rep.lipschitz_garding_ok and rep.final_ok)


def _tangential_components(dirs, values):
    th = np.arccos(np.clip(dirs[:, 2], -1, 1))
    ph = np.arctan2(dirs[:, 1], dirs[:, 0])
    e_th = np.stack([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)], axis=1)
    e_ph = np.stack([-np.sin(ph), np.cos(ph), np.zeros_like(ph)], axis=1)
    return np.sum(values * e_th, axis=1), np.sum(values * e_ph, axis=1)


def _far_rows(T, P, dirs, values):
    Et, Ep = _tangential_components(dirs, values)
    return [(t, p, a.real, a.imag, b.real, b.imag) for t, p, a, b in zip(T, P, Et, Ep)]


FAR_HEADER = ["theta", "phi", "re_E_theta", "im_E_theta", "re_E_phi", "im_E_phi"]


def _relative_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


# -- commands -----------------------------------------------------------------

def _solve_once(cfg, space, med, cp, kind, check):
    from .fields import DensityTag, SurfaceDensity, reconstruct
    from .formulations import OperatorSet, build_system, solve
    ops = OperatorSet(space, med.kappa_e, med.kappa_i)
    w = cfg.wave(med.kappa_e)
    system = build_system(kind, med, cp, ops, w, check=check, lipschitz_mode=cfg.lipschitz)
    x, info = solve(system, method=cfg["solver"], tol=float(cfg["gmres_tol"]))
    dens = SurfaceDensity(x, space, DensityTag.for_kind(kind), system.basis)
    return system, x, info, reconstruct(kind, dens, med, cp, ops, w)


def cmd_solve(cfg, out, force=False):
    from .fields import far_field_grid
    from .formulations import FormulationKind, condition_estimate, validate_params
    from .mie import mie_solve

    med, cp = cfg.medium(), cfg.coupling()
    kind = FormulationKind(cfg["formulation"])
    rep = validate_params(med, cp, cfg.lipschitz)
    report = ["# config_sha256=%s version=%s" % (cfg.digest, __version__),
              "[validation]"] + _validation_lines(rep)
    for line in report[2:]:
        if line.startswith("warning"):
            print(line, file=sys.stderr)
    if not rep.ok and not force:
        print("parameters fail the solvability conditions (use --force to run anyway)",
              file=sys.stderr)
        _write_text(os.path.join(out, "report.txt"), report)
        return EXIT_FAIL
    t0 = time.time()
    space = cfg.space()
    system, x, info, sol = _solve_once(cfg, space, med, cp, kind, check=False)
    cond = condition_estimate(system)
    T, P, dirs = far_field_grid(int(cfg["far_theta"]), int(cfg["far_phi"]))
    far = sol.far_field(dirs).values
    t1, t2 = sol.transmission_residuals(med.mu_i, med.mu_e)
    report += ["[solve]",
               "formulation %s" % kind.value,
               "dofs %d" % space.dof_count,
               "solver %s residual %s" % (cfg["solver"], fmt(info["residual"])),
               "condition_estimate %s" % fmt(cond),
               "transmission_T1 %s" % fmt(t1),
               "transmission_T2 %s" % fmt(t2)]
    if cfg.is_sphere and abs(med.kappa_e.imag) == 0:
        mie = mie_solve(float(cfg["radius"]), med, cfg.wave(med.kappa_e))
        report.append("far_field_error_vs_mie %s" % fmt(_relative_l2(far, mie.far_field(dirs))))
    report.append("elapsed_seconds %.1f" % (time.time() - t0))
    write_csv(os.path.join(out, "density.csv"), cfg, ["index", "basis", "re", "im"],
              [(float(i), system.basis, v.real, v.imag) for i, v in enumerate(x)])
    write_csv(os.path.join(out, "farfield.csv"), cfg, FAR_HEADER, _far_rows(T, P, dirs, far))
    _write_text(os.path.join(out, "report.txt"), report)
    print("\n".join(report[report.index("[solve]"):]))
    return EXIT_OK


def cmd_sweep(cfg, out, force=False):
    """Condition number (and far-field error on spheres) over a kappa_e grid."""
    from .fields import far_field_grid
    from .formulations import FormulationKind, condition_estimate, validate_params
    from .mie import interior_resonances, mie_solve

    grid = cfg.sweep_grid()
    cp = cfg.coupling()
    kind = FormulationKind(cfg["formulation"])
    space = cfg.space()
    T, P, dirs = far_field_grid(int(cfg["far_theta"]), int(cfg["far_phi"]))
    step = grid[1] - grid[0] if len(grid) > 1 else 0.0
    res = []
    if cfg.is_sphere:
        r = float(cfg["radius"])
        res = interior_resonances(r, (max(grid[0] - step, 1e-3), grid[-1] + step))
    rows = []
    for ke in grid:
        med = cfg.medium(ke)
        rep = validate_params(med, cp, cfg.lipschitz)
        near = min((abs(ke - r0) for r0 in res), default=np.inf)
        marker = "yes" if step > 0 and near <= step else "no"
        if not rep.ok and not force:
            rows.append((ke, np.nan, np.nan, marker, "rejected"))
            continue
        try:
            system, x, info, sol = _solve_once(cfg, space, med, cp, kind, check=False)
            cond = condition_estimate(system)
            err = np.nan
            if cfg.is_sphere:
                mie = mie_solve(float(cfg["radius"]), med, cfg.wave(med.kappa_e))
                err = _relative_l2(sol.far_field(dirs).values, mie.far_field(dirs))
            rows.append((ke, cond, err, marker, "ok"))
        except Exception as exc:          # keep sweeping, record the failure
            log.warning("kappa_e=%g failed: %s", ke, exc)
            rows.append((ke, np.nan, np.nan, marker, "failed"))
        print("kappa_e %.6f cond %.6e far_error %.4e %s" % (rows[-1][:3] + (rows[-1][4],)))
    write_csv(os.path.join(out, "sweep.csv"), cfg,
              ["kappa_e", "cond", "far_field_error", "near_resonance", "status"], rows)
    conds = np.array([r[1] for r in rows], float)
    ok = np.isfinite(conds)
    if ok.any():
        print("max/median condition ratio %.4g" % (np.max(conds[ok]) / np.median(conds[ok])))
    return EXIT_OK if ok.all() else EXIT_FAIL


def cmd_diagnose(cfg, out, force=False):
    from .diagnostics import format_report, run_checks
    space = cfg.space()
    med = cfg.medium()
    names = [s.strip() for s in cfg["diagnose_checks"].split(",") if s.strip()]
    results = run_checks(space, med.kappa_e, names, flip_m=(cfg["fault"] == "flip_magnetic"))
    text = format_report(results)
    print(text)
    _write_text(os.path.join(out, "diagnose.txt"),
                ["# config_sha256=%s version=%s" % (cfg.digest, __version__), text])
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_validate(cfg, out=None, force=False):
    from .formulations import validate_params
    rep = validate_params(cfg.medium(), cfg.coupling(), cfg.lipschitz)
    print("\n".join(_validation_lines(rep)))
    return EXIT_OK if _required_ok(rep) else EXIT_FAIL


def cmd_mie(cfg, out, force=False):
    """Oracle-only run: Mie far field and cross sections for the configured sphere."""
    from .fields import far_field_grid
    from .mie import mie_solve
    med = cfg.medium()
    sol = mie_solve(float(cfg["radius"]), med, cfg.wave(med.kappa_e))
    T, P, dirs = far_field_grid(int(cfg["far_theta"]), int(cfg["far_phi"]))
    write_csv(os.path.join(out, "mie_farfield.csv"), cfg, FAR_HEADER,
              _far_rows(T, P, dirs, sol.far_field(dirs)))
    lines = ["order %d" % sol.order,
             "scattering_cross_section %s" % fmt(sol.scattering_cross_section),
             "extinction_cross_section %s" % fmt(sol.extinction_cross_section)]
    _write_text(os.path.join(out, "mie.txt"), lines)
    print("\n".join(lines))
    return EXIT_OK


def _write_text(path, lines):
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "diagnose": cmd_diagnose,
            "validate": cmd_validate, "mie": cmd_mie}


def build_parser():
    p = argparse.ArgumentParser(prog="ssie", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", metavar="PATH", help="key = value configuration file")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides 'out')")
    p.add_argument("--force", action="store_true",
                   help="run even if the parameters fail validation")
    p.add_argument("--threads", type=int, metavar="N",
                   help="assembly threads (default: SSIE_THREADS or all cores)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    # numba reports an outdated TBB once per process; it falls back silently
    warnings.filterwarnings("ignore", message=".*TBB.*")
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig.from_text("")
    except (ConfigError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    from .operators import set_threads
    try:
        set_threads(args.threads)
    except ValueError:
        print("error: thread count must be an integer (check SSIE_THREADS)", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or cfg["out"]
    if args.command != "validate":
        os.makedirs(out, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, out, force=args.force)
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
