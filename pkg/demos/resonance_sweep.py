"""Condition numbers of S near the first interior resonance, with and without b.

With ``b = 0`` the equation inherits the interior Maxwell eigenvalue of the
sphere (shifted a little by the polyhedral mesh); with ``b = i`` it does not.

    python3 demos/resonance_sweep.py [LEVEL]
"""

import sys
import warnings

import numpy as np

warnings.filterwarnings("ignore", message=".*TBB.*")

from ssie.formulations import (CouplingParams, MediumPair, OperatorSet,  # noqa: E402
                               build_system, condition_estimate)
from ssie.mesh import build_current_space, make_icosphere  # noqa: E402
from ssie.mie import interior_resonances  # noqa: E402

level = int(sys.argv[1]) if len(sys.argv) > 1 else 2
space = build_current_space(make_icosphere(level))
grid = np.linspace(4.3, 4.8, 11)
print("interior resonances in range:", interior_resonances(1.0, (grid[0], grid[-1])))
print("%8s %12s %12s" % ("kappa_e", "cond b=i", "cond b=0"))
for ke in grid:
    med = MediumPair(eps_i=1.5, mu_i=1.0, eps_e=1.0, mu_e=1.0, omega=ke)
    ops = OperatorSet(space, med.kappa_e, med.kappa_i)
    good = condition_estimate(build_system("S", med, CouplingParams(1, 1j), ops))
    bad = condition_estimate(build_system("S", med, CouplingParams(1, 0), ops, check=False))
    print("%8.3f %12.1f %12.1f" % (ke, good, bad))
