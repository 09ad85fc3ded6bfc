"""Built-in Lie algebras.

=================  ===  =====================================================
name               dim  basis and brackets
=================  ===  =====================================================
abelian2           2    x, y; all brackets zero
solvable2          2    x, y; [x, y] = y
heisenberg         3    x, y, z; [x, y] = z
sl2R               3    h, e, f; [h, e] = 2e, [h, f] = -2f, [e, f] = h
su2                3    e1, e2, e3; [e_i, e_j] = eps_ijk e_k
so3                3    A12, A13, A23 (E_ij - E_ji)
sl2C               6    sl(2, C) on (h, e, f), realified
sl3R               8    E12, E13, E21, E23, E31, E32, H1 = E11-E22, H2 = E22-E33
su3                8    E_ij - E_ji, i(E_ij + E_ji) for i < j, i H1, i H2
sl2R+sl2R          6    two commuting copies of sl2R
=================  ===  =====================================================
"""
from __future__ import annotations

import itertools

import numpy as np

from .algebra import LieAlgebra, direct_sum, from_matrices
from .errors import StructureError
from .realify import ComplexLieAlgebra, realify

__all__ = ["corpus", "complex_corpus", "CORPUS_NAMES", "SIMPLE_NAMES", "COMPLEX_NAMES"]

CORPUS_NAMES = (
    "abelian2", "solvable2", "heisenberg", "sl2R", "su2", "so3",
    "sl2C", "sl3R", "su3", "sl2R+sl2R",
)
SIMPLE_NAMES = ("sl2R", "su2", "so3", "sl2C", "sl3R", "su3")
COMPLEX_NAMES = ("sl2C", "sl3C")


def _E(n, i, j):
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


def _sl2_constants():
    c = np.zeros((3, 3, 3))
    # basis h, e, f
    c[1, 0, 1], c[1, 1, 0] = 2.0, -2.0
    c[2, 0, 2], c[2, 2, 0] = -2.0, 2.0
    c[0, 1, 2], c[0, 2, 1] = 1.0, -1.0
    return c


def _sl3_matrices():
    offdiag = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
    mats = [_E(3, i, j) for i, j in offdiag]
    mats += [_E(3, 0, 0) - _E(3, 1, 1), _E(3, 1, 1) - _E(3, 2, 2)]
    labels = [f"E{i+1}{j+1}" for i, j in offdiag] + ["H1", "H2"]
    return mats, labels


def _su3_matrices():
    mats, labels = [], []
    for i, j in itertools.combinations(range(3), 2):
        mats.append(_E(3, i, j) - _E(3, j, i))
        labels.append(f"A{i+1}{j+1}")
        mats.append(1j * (_E(3, i, j) + _E(3, j, i)))
        labels.append(f"S{i+1}{j+1}")
    mats += [1j * (_E(3, 0, 0) - _E(3, 1, 1)), 1j * (_E(3, 1, 1) - _E(3, 2, 2))]
    labels += ["iH1", "iH2"]
    return mats, labels


def complex_corpus(name: str) -> ComplexLieAlgebra:
    if name == "sl2C":
        return ComplexLieAlgebra(_sl2_constants(), np.zeros((3, 3, 3)), ("h", "e", "f"), "sl2C")
    if name == "sl3C":
        mats, labels = _sl3_matrices()
        real = from_matrices(mats, labels)
        return ComplexLieAlgebra(real.c, np.zeros_like(real.c), labels, "sl3C")
    raise StructureError(f"unknown complex corpus algebra {name!r}; choose from {COMPLEX_NAMES}")


def corpus(name: str) -> LieAlgebra:
    """Return the named built-in algebra (see the module table)."""
    if name == "abelian2":
        return LieAlgebra(np.zeros((2, 2, 2)), ("x", "y"), name=name)
    if name == "solvable2":
        c = np.zeros((2, 2, 2))
        c[1, 0, 1], c[1, 1, 0] = 1.0, -1.0
        return LieAlgebra(c, ("x", "y"), name=name)
    if name == "heisenberg":
        c = np.zeros((3, 3, 3))
        c[2, 0, 1], c[2, 1, 0] = 1.0, -1.0
        return LieAlgebra(c, ("x", "y", "z"), name=name)
    if name == "sl2R":
        return LieAlgebra(_sl2_constants(), ("h", "e", "f"), name=name)
    if name == "su2":
        c = np.zeros((3, 3, 3))
        for i, j, k in itertools.permutations(range(3)):
            c[k, i, j] = np.linalg.det(np.eye(3)[[i, j, k]])
        return LieAlgebra(c, ("e1", "e2", "e3"), name=name)
    if name == "so3":
        mats = [_E(3, 0, 1) - _E(3, 1, 0), _E(3, 0, 2) - _E(3, 2, 0), _E(3, 1, 2) - _E(3, 2, 1)]
        return from_matrices(mats, ("A12", "A13", "A23"), name=name)
    if name == "sl2C":
        alg, _ = realify(complex_corpus("sl2C"))
        return LieAlgebra(alg.c, alg.labels, alg.field_tag, alg.J, name=name)
    if name == "sl3R":
        mats, labels = _sl3_matrices()
        return from_matrices(mats, labels, name=name)
    if name == "su3":
        mats, labels = _su3_matrices()
        return from_matrices(mats, labels, name=name)
    if name == "sl2R+sl2R":
        a = corpus("sl2R")
        return direct_sum(a, a, name=name)
    raise StructureError(f"unknown corpus algebra {name!r}; choose from {CORPUS_NAMES}")


def sl_matrix_basis(n):
    """Standard basis of sl(n, R) as matrices, in the order used for ``sl3R``."""
    if n == 3:
        return _sl3_matrices()[0]
    mats = [_E(n, i, j) for i in range(n) for j in range(n) if i != j]
    mats += [_E(n, i, i) - _E(n, i + 1, i + 1) for i in range(n - 1)]
    return mats
