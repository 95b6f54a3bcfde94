"""Print the registered operator checks for a sphere at two refinement levels."""

import warnings

warnings.filterwarnings("ignore", message=".*TBB.*")

from ssie.diagnostics import format_report, run_checks  # noqa: E402
from ssie.mesh import build_current_space, make_icosphere  # noqa: E402

for level in (1, 2):
    space = build_current_space(make_icosphere(level))
    print("== icosphere level %d (%d unknowns), kappa = 1" % (level, space.dof_count))
    print(format_report(run_checks(space, 1.0)))
