"""
Numerical checks on the space of metrics
========================================

Two inequalities behind the convexity arguments: the solution of
V' = [S, V] + alpha grows at least linearly in trace norm, and the
exponential map at a point never decreases distances.
"""

import numpy as np

from cartanflow.verify import OdeProblem, trace_bound_check, property_star_suite, q_factor, random_symmetric

rng = np.random.default_rng(0)
p = OdeProblem(random_symmetric(4, rng), random_symmetric(4, rng), t_max=2.0, steps=5)
rep = trace_bound_check(p)
for t, v, lo in zip(rep.times, rep.trace_V2, rep.lower):
    print(f"t={t:4.1f}  Tr V^2 = {v:10.5f}  >=  t^2 Tr a^2 = {lo:10.5f}")

x = np.array([0.0, 0.5, 1.0, 2.0, 5.0])
print("Q(x):", q_factor(x))

###############################################################################
# Distance non-decreasing along exp, sampled at 500 pairs.

for n in (3, 5):
    s = property_star_suite(n, 500, seed=42)
    print(f"n={n}: violations={len(s.violations)}  smallest gap={s.min_gap:.3g}")
