"""
Compact real form of sl(2, C)
=============================

Realify sl(2, C), split it at the optimal metric and check that
multiplication by i swaps the two halves. The +1 part is then a compact
real form, isomorphic to su(2).
"""

import numpy as np

from cartanflow import minimize, realify, split
from cartanflow.corpus import complex_corpus
from cartanflow.algebra import killing_form
from cartanflow.realify import check_compact_form

alg, J = realify(complex_corpus("sl2C"))
print("real dimension:", alg.dim)

tr = minimize(alg)
sp = split(alg, tr.H_star)
print("verdict:", tr.verdict, " (dim k, dim p) =", sp.dims)

rep = check_compact_form(alg, J, sp)
print("J(k) in p residual:", rep.Jk_residual, " J(p) in k residual:", rep.Jp_residual)

ev = np.linalg.eigvalsh(killing_form(alg).restrict(sp.k_basis))
print("Killing form on k, eigenvalues:", ev)
