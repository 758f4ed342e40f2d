"""Proximal gradient on a lasso problem: sublinear start, linear tail.

The growth and error-bound constants are certified on samples from the
sublevel set {phi <= phi* + omega} together with the iterates past the
burn-in index, and the trace is then checked against every rate bound.
"""

import numpy as np

from errbound import make_instance, solver
from errbound.certificates import certify_rate_constants
from errbound.core import distance_to_solution_set

p = make_instance("lasso", seed=7)
trace = solver.run(p, np.zeros(p.n), "auto", cap=500, tol=0.0)
print(f"gamma = L = {trace.gamma:.6g}, {trace.iterations} iterations, "
      f"final ||G|| = {trace.gmap_norm[-1]:.2e}")

omega = 1.0
tau, kappa, m = certify_rate_constants(p, trace, omega=omega, n_samples=5000, seed=0)
print(f"omega = {omega}: burn-in m = {m}, tau = {tau.constant:.4g}, kappa = {kappa.constant:.4g}")

# a few rows of the trace, distance ratio next to the bound sqrt(gamma / (gamma + tau))
bound = np.sqrt(trace.gamma / (trace.gamma + tau.constant))
ratios = trace.distance_ratios()
print(f"\n{'k':>4}{'phi - phi*':>14}{'dist':>12}{'d_k+1/d_k':>12}   bound {bound:.4f}")
for k in (0, 1, 2, 5, 10, 20, 50, 100, 200, 300):
    print(f"{k:4d}{trace.phi[k] - p.phi_star:14.4e}{trace.dist[k]:12.4e}{ratios[k]:12.4f}")

x_star = distance_to_solution_set(p, trace.iterates[-1]).proj
reports = [
    solver.check_sublinear(trace),
    solver.check_descent(trace),
    solver.check_qlinear_distance(trace, tau.constant, m),
    solver.check_fvalue_contraction(trace, kappa.constant, m),
    solver.check_rlinear_iterates(trace, x_star, kappa.constant, m),
]
print()
for r in reports:
    print(" ", r)

# Inflating kappa fourfold pushes the contraction factor below what the
# trace achieves, and the check notices.
print("\nwith 4 * kappa:", solver.check_fvalue_contraction(trace, 4 * kappa.constant, m))
