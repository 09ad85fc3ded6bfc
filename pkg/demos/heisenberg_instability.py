"""
A flow that runs off to infinity
================================

The Heisenberg algebra [x, y] = z has no optimal metric. The flow escapes
along a fixed direction, and the flag of that direction contains the center.
"""

import numpy as np

from cartanflow import corpus, destabilize, minimize

np.set_printoptions(precision=5, suppress=True)

alg = corpus("heisenberg")
tr = minimize(alg)
print("verdict:", tr.verdict)
print("distance travelled:", tr.final.dist, " F:", tr.final.F)

# F decays like exp(-4 d / sqrt 6) in the distance d along the escape ray
ts = np.array([s.dist for s in tr.steps[-5:]])
Fs = np.array([s.F for s in tr.steps[-5:]])
print("log F slope near the end:", np.polyfit(ts, np.log(Fs), 1)[0], "vs", -4 / np.sqrt(6))

###############################################################################
# Asymptotic direction and the destabilizing flag.

print("S_inf =\n", tr.S_inf.sigma)
print("closed form diag(1, 1, -2)/sqrt 6 =", np.array([1, 1, -2]) / np.sqrt(6))

d = destabilize(alg, tr)
print("flag weights:", d.flag.weights, "multiplicities:", d.flag.multiplicities)
for I, r in zip(d.ideals, d.residuals):
    print("ideal of dim", I.dim, "basis", I.basis[:, 0], "residual", r)
