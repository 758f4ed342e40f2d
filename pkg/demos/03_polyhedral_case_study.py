"""Strongly convex quadratic of E x over a polyhedron.

The minimisers form {E x = t*} inside Q, and the growth constant is
mu * theta / 2 with theta the Hoffman constant of that system.  theta is
fitted on one sample stream and then checked on a fresh one.
"""

from errbound import make_instance
from errbound.certificates import analytic_theta, hoffman_estimate, verify_case_study

# Unconstrained slice first: theta is the smallest nonzero eigenvalue of E E^T.
p = make_instance("rankdef_ls")
print("rankdef_ls: exact theta =", analytic_theta(p))
print("            sampled theta =", hoffman_estimate(p.composition.E, None, None,
                                                      p.solution_set.t_star, 2000).theta)
rep = verify_case_study(p, n_samples=2000)
print("            C1 = C2 =", rep.constants["C1"], "->", "PASS" if rep.passed else "FAIL")

# A random instance: 2 x 4 E, six inequalities, x_ref strictly inside Q.
p = make_instance("case_study", seed=3)
Q = p.constraint
raw = hoffman_estimate(p.composition.E, Q.A, Q.b, p.solution_set.t_star, 4000, seed=(3, 0))
fit = hoffman_estimate(p.composition.E, Q.A, Q.b, p.solution_set.t_star, 4000, seed=(3, 0),
                       refine=True)
print(f"\ncase_study(seed=3): sampled theta {raw.theta:.5g}, after local refinement {fit.theta:.5g}")

rep = verify_case_study(p, n_samples=4000, seed=3, train_samples=4000)
for c in rep.checks:
    print(" ", c)
print("C1 = C2 =", rep.constants["C1"], " C3 =", rep.constants["C3"])
