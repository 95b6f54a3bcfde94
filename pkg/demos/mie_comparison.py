"""Solve all four equations for a glass sphere and compare with the Mie series.

    python3 demos/mie_comparison.py [LEVEL]
"""

import sys
import time
import warnings

import numpy as np

warnings.filterwarnings("ignore", message=".*TBB.*")

from ssie.fields import DensityTag, SurfaceDensity, far_field_grid, reconstruct  # noqa: E402
from ssie.formulations import (CouplingParams, MediumPair, OperatorSet,  # noqa: E402
                               build_system, solve)
from ssie.kernels import PlaneWave  # noqa: E402
from ssie.mesh import build_current_space, make_icosphere  # noqa: E402
from ssie.mie import mie_solve  # noqa: E402

level = int(sys.argv[1]) if len(sys.argv) > 1 else 2
space = build_current_space(make_icosphere(level))
med = MediumPair(eps_i=4.0, mu_i=1.0, eps_e=1.0, mu_e=1.0)
cp = CouplingParams(1.0, 1j)
wave = PlaneWave([0, 0, 1], [1, 0, 0], med.kappa_e)
dirs = far_field_grid(91, 37)[2]
ref = mie_solve(1.0, med, wave).far_field(dirs)

print("icosphere level %d, %d unknowns" % (level, space.dof_count))
ops = OperatorSet(space, med.kappa_e, med.kappa_i)
for kind in ("S", "T", "Sprime", "Tprime"):
    t0 = time.time()
    system = build_system(kind, med, cp, ops, wave)
    x, _ = solve(system)
    sol = reconstruct(kind, SurfaceDensity(x, space, DensityTag.for_kind(kind), system.basis),
                      med, cp, ops, wave)
    err = np.linalg.norm(sol.far_field(dirs).values - ref) / np.linalg.norm(ref)
    t1, t2 = sol.transmission_residuals()
    print("%-7s far-field error %.4f   T1 %.4f  T2 %.4f   %.1fs"
          % (kind, err, t1, t2, time.time() - t0))
