"""Critical points of the Green's function on flat tori.

The lattice is ``Z + Z tau`` (half-periods ``1/2`` and ``tau/2``).  The
package evaluates the Weierstrass functions, locates every critical point
of the Green's function as a fixed point of an antimeromorphic map,
decides in the tau-plane when there are five rather than three, and builds
the associated conic metric.  Two side labs cover Wiman-Valiron theory
for entire functions and a logarithmic-derivative inequality.
"""

from .dynamics import classify_fixed_point, degree_audit, g_critical_points, g_map, iterate_orbit
from .elliptic import sigma, theta1, weierstrass, wp, wp_prime, zeta
from .errors import TorusGreenError
from .green import (
    CriticalPoint,
    CriticalPointReport,
    constants_AB,
    green_grad,
    green_value,
    residual_R,
    solve_critical_points,
)
from .lattice import TorusLattice, lattice_from_tau, reduce_point
from .metric import MetricSolution, cone_angle, f_second_kind, metric_u, multipliers, pde_residual
from .region import cross_validate, ineq_holds, scan_region

__all__ = [
    "CriticalPoint",
    "CriticalPointReport",
    "MetricSolution",
    "TorusGreenError",
    "TorusLattice",
    "classify_fixed_point",
    "cone_angle",
    "constants_AB",
    "cross_validate",
    "degree_audit",
    "f_second_kind",
    "g_critical_points",
    "g_map",
    "green_grad",
    "green_value",
    "ineq_holds",
    "iterate_orbit",
    "lattice_from_tau",
    "metric_u",
    "multipliers",
    "pde_residual",
    "reduce_point",
    "residual_R",
    "scan_region",
    "sigma",
    "solve_critical_points",
    "theta1",
    "weierstrass",
    "wp",
    "wp_prime",
    "zeta",
]
