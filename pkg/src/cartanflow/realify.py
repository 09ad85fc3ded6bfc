"""Complex Lie algebras viewed as real ones, and the compact-form check.

A complex algebra of dimension ``n`` becomes a real algebra of dimension
``2n`` on the basis ``(e_1, ..., e_n, i e_1, ..., i e_n)``. Complex numbers
never leave this module: the realified algebra is an ordinary
:class:`~cartanflow.algebra.LieAlgebra` that carries its complex structure
``J`` as a real matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import LieAlgebra, LinearSubspace, validate
from .errors import PreconditionError, StructureError, ValidationError

__all__ = [
    "ComplexLieAlgebra",
    "JOperator",
    "realify",
    "complex_killing_form",
    "check_compact_form",
    "CompactFormReport",
]


@dataclass(frozen=True, eq=False)
class ComplexLieAlgebra:
    """Complex structure constants, stored as separate real and imaginary parts."""

    re: np.ndarray
    im: np.ndarray
    labels: Optional[tuple] = None
    name: str = ""

    def __post_init__(self):
        re = np.array(self.re, dtype=float)
        im = np.array(self.im, dtype=float)
        if re.shape != im.shape or re.ndim != 3 or len(set(re.shape)) != 1:
            raise StructureError("complex structure constants must have shape (n, n, n)")
        re.setflags(write=False)
        im.setflags(write=False)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        labels = self.labels or tuple(f"e{i}" for i in range(re.shape[0]))
        object.__setattr__(self, "labels", tuple(labels))

    @classmethod
    def from_complex(cls, c, labels=None, name=""):
        c = np.asarray(c, dtype=complex)
        return cls(c.real, c.imag, labels, name)

    @property
    def dim_c(self) -> int:
        return self.re.shape[0]

    @property
    def c(self) -> np.ndarray:
        return self.re + 1j * self.im


@dataclass(frozen=True, eq=False)
class JOperator:
    matrix: np.ndarray

    @classmethod
    def standard(cls, n):
        J = np.zeros((2 * n, 2 * n))
        J[n:, :n] = np.eye(n)
        J[:n, n:] = -np.eye(n)
        return cls(J)

    def square_residual(self) -> float:
        J = self.matrix
        return float(np.max(np.abs(J @ J + np.eye(J.shape[0]))))

    def commutation_residual(self, alg: LieAlgebra) -> float:
        """``max_x |J ad_x - ad_x J|`` over basis vectors ``x``."""
        J = self.matrix
        ads = alg.c.transpose(1, 0, 2)
        return float(np.max(np.abs(J @ ads - ads @ J)))


def _complex_validate(calg: ComplexLieAlgebra, tol):
    c = calg.c
    anti = float(np.max(np.abs(c + c.transpose(0, 2, 1))))
    jac = (
        np.einsum("mij,lmk->lijk", c, c)
        + np.einsum("mjk,lmi->lijk", c, c)
        + np.einsum("mki,lmj->lijk", c, c)
    )
    return anti, float(np.max(np.abs(jac)))


def realify(calg: ComplexLieAlgebra, tol=1e-9):
    """Underlying real algebra (dimension ``2n``) and its complex structure ``J``."""
    anti, jac = _complex_validate(calg, tol)
    if anti > tol or jac > tol:
        raise ValidationError(f"complex structure constants rejected: antisymmetry {anti:.3g}, Jacobi {jac:.3g}")
    A, B = calg.re, calg.im
    n = calg.dim_c
    r = np.zeros((2 * n,) * 3)
    lo, hi = slice(0, n), slice(n, 2 * n)
    # [e_i, e_j] = A + iB
    r[lo, lo, lo], r[hi, lo, lo] = A, B
    # [e_i, ie_j] = [ie_i, e_j] = i(A + iB) = -B + iA
    r[lo, lo, hi], r[hi, lo, hi] = -B, A
    r[lo, hi, lo], r[hi, hi, lo] = -B, A
    # [ie_i, ie_j] = -(A + iB)
    r[lo, hi, hi], r[hi, hi, hi] = -A, -B
    J = JOperator.standard(n)
    labels = tuple(calg.labels) + tuple(f"i{s}" for s in calg.labels)
    name = f"{calg.name} (realified)" if calg.name else ""
    alg = LieAlgebra(r, labels=labels, field_tag="complex-realified", J=J.matrix, name=name)
    validate(alg, tol, raise_on_failure=True)
    return alg, J


def complex_killing_form(calg: ComplexLieAlgebra) -> np.ndarray:
    """Complex Killing form ``Tr(ad e_i ad e_j)`` (complex ``n x n`` array)."""
    c = calg.c
    return np.einsum("kil,ljk->ij", c, c)


@dataclass(frozen=True)
class CompactFormReport:
    dim_k: int
    dim_p: int
    Jk_residual: float
    Jp_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.dim_k == self.dim_p and max(self.Jk_residual, self.Jp_residual) <= self.tol

    def as_dict(self):
        return {"dim_k": self.dim_k, "dim_p": self.dim_p, "Jk_in_p_residual": self.Jk_residual,
                "Jp_in_k_residual": self.Jp_residual, "tol": self.tol, "passed": self.passed}


def check_compact_form(alg: LieAlgebra, J, split, tol=1e-6) -> CompactFormReport:
    """Check ``J k = p`` and ``J p = k`` for a Cartan split of a realified algebra.

    Passing means the algebra is the complexification ``k + i k`` of the
    compact part. Residuals are largest distances of ``J u`` (``u`` an
    orthonormal basis vector) from the target subspace.
    """
    if alg.field_tag != "complex-realified":
        raise PreconditionError("compact-form check needs a realified complex algebra")
    Jm = J.matrix if isinstance(J, JOperator) else (alg.J if J is None else np.asarray(J, float))
    k: LinearSubspace = split.k_basis
    p: LinearSubspace = split.p_basis

    def res(src, dst):
        if src.dim == 0:
            return 0.0
        if dst.dim == 0:
            return float(np.max(np.linalg.norm(Jm @ src.basis, axis=0)))
        return max(dst.residual(Jm @ u) for u in src.basis.T)

    return CompactFormReport(k.dim, p.dim, res(k, p), res(p, k), tol)
