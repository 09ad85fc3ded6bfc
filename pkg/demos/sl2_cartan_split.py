"""
Optimal metric and Cartan split of sl(2, R)
===========================================

Start from the standard basis (h, e, f), minimize the bracket norm over
metrics of determinant one, and read the Cartan involution off the minimum.
"""

import numpy as np

from cartanflow import corpus, minimize, split
from cartanflow.cartan import check_inclusions, classify, der_transpose_residual

np.set_printoptions(precision=5, suppress=True)

alg = corpus("sl2R")
tr = minimize(alg)
print("verdict:", tr.verdict, "after", len(tr.steps) - 1, "steps")
print("F at start / at minimum:", tr.steps[0].F, tr.final.F)

# at the minimum ad(g) is closed under transposition
print("transpose residual:", der_transpose_residual(alg, tr.H_star))

###############################################################################
# The involution is -transpose on ad(g) in the optimal frame.

sp = split(alg, tr.H_star)
print("theta =\n", sp.theta)
print("(dim k, dim p) =", sp.dims)
print("k spanned by", sp.k_basis.basis[:, 0])

rep = check_inclusions(alg, sp)
print("[k,k], [k,p], [p,p] residuals:", rep.kk, rep.kp, rep.pp)
print(classify(alg, sp))
