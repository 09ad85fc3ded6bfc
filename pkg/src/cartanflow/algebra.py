"""Lie algebras given by structure constants.

A Lie algebra of dimension ``n`` is stored as a dense array ``c`` of shape
``(n, n, n)`` with ``c[k, i, j]`` the ``k``-th coordinate of ``[e_i, e_j]``.
Everything here is plain dense linear algebra; tolerances are absolute and
assume structure constants of order one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import StructureError, ValidationError

__all__ = [
    "LieAlgebra",
    "LinearSubspace",
    "BilinearForm",
    "ValidationReport",
    "SimplicityVerdict",
    "validate",
    "bracket",
    "ad_matrix",
    "ad_matrices",
    "center",
    "derivations",
    "killing_form",
    "trace_form",
    "is_ideal",
    "ideal_closure",
    "is_simple",
    "from_matrices",
    "direct_sum",
    "transform_constants",
    "nullspace",
    "derivation_residual",
    "is_automorphism",
    "span_contains",
]

DEFAULT_TOL = 1e-9


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def nullspace(A, rtol=DEFAULT_TOL):
    """Orthonormal basis (columns) of the kernel of ``A``.

    Singular values below ``rtol * sigma_max`` count as zero.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    ncols = A.shape[1]
    if A.size == 0 or not np.any(A):
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > rtol * s[0]))
    return vt[rank:].T.copy()


def _orth(vectors, rtol=1e-10):
    """Orthonormal basis for the column span of ``vectors``."""
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0))
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((vectors.shape[0], 0))
    rank = int(np.sum(s > rtol * s[0]))
    return u[:, :rank].copy()


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A finite-dimensional real Lie algebra.

    Parameters
    ----------
    c : (n, n, n) array_like
        Structure constants, ``c[k, i, j]`` = coefficient of ``e_k`` in ``[e_i, e_j]``.
    labels : sequence of str, optional
        Basis names. Defaults to ``e0, e1, ...``.
    field_tag : {"real", "complex-realified"}
        Realified complex algebras carry their complex structure in ``J``.
    J : (n, n) array_like, optional
        Multiplication by ``i`` on a realified algebra.
    """

    c: np.ndarray
    labels: Optional[tuple] = None
    field_tag: str = "real"
    J: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] == 0:
            raise StructureError(f"structure constants must have shape (n, n, n), got {c.shape}")
        n = c.shape[0]
        object.__setattr__(self, "c", _frozen(c + 0.0))  # + 0.0 turns -0.0 into 0.0
        labels = self.labels
        if labels is None:
            labels = tuple(f"e{i}" for i in range(n))
        labels = tuple(str(s) for s in labels)
        if len(labels) != n:
            raise StructureError(f"{len(labels)} labels for a {n}-dimensional algebra")
        object.__setattr__(self, "labels", labels)
        if self.field_tag not in ("real", "complex-realified"):
            raise StructureError(f"unknown field tag {self.field_tag!r}")
        if self.J is not None:
            J = np.asarray(self.J, dtype=float)
            if J.shape != (n, n):
                raise StructureError("J must be an n x n matrix")
            object.__setattr__(self, "J", _frozen(J))
        elif self.field_tag == "complex-realified":
            raise StructureError("a realified algebra needs its J operator")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @property
    def is_abelian_exact(self) -> bool:
        return not np.any(self.c)

    def basis_vector(self, label) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.labels.index(label) if isinstance(label, str) else label] = 1.0
        return v

    def __repr__(self):
        tag = f", {self.field_tag}" if self.field_tag != "real" else ""
        name = f"{self.name!r}, " if self.name else ""
        return f"LieAlgebra({name}dim={self.dim}{tag})"


@dataclass(frozen=True, eq=False)
class LinearSubspace:
    """Subspace of R^n held as an orthonormal basis (columns of ``basis``)."""

    basis: np.ndarray
    ambient_dim: int = field(default=-1)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        n = b.shape[0] if self.ambient_dim < 0 else self.ambient_dim
        if b.shape[0] != n:
            raise StructureError("basis vectors do not live in the ambient space")
        q = _orth(b) if b.shape[1] else np.zeros((n, 0))
        if q.shape[1] != b.shape[1]:
            raise StructureError("subspace basis is rank deficient")
        object.__setattr__(self, "basis", _frozen(q))
        object.__setattr__(self, "ambient_dim", n)

    @classmethod
    def span(cls, vectors, ambient_dim=None, rtol=1e-10):
        """Span of the columns of ``vectors``, dropping dependent directions."""
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim == 1:
            vectors = vectors[:, None]
        n = vectors.shape[0] if ambient_dim is None else ambient_dim
        return cls(_orth(vectors.reshape(n, -1), rtol), n)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def residual(self, v) -> float:
        """Norm of the component of ``v`` orthogonal to the subspace."""
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(v - self.basis @ (self.basis.T @ v)))

    def __repr__(self):
        return f"LinearSubspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


@dataclass(frozen=True, eq=False)
class BilinearForm:
    matrix: np.ndarray
    kind: str = "killing"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StructureError("bilinear form must be a square matrix")
        object.__setattr__(self, "matrix", _frozen(0.5 * (m + m.T)))

    def __call__(self, x, y) -> float:
        return float(np.asarray(x) @ self.matrix @ np.asarray(y))

    def restrict(self, sub: LinearSubspace) -> np.ndarray:
        return sub.basis.T @ self.matrix @ sub.basis

    def signature(self, rtol=1e-8):
        """``(num_positive, num_negative, num_zero)`` of the eigenvalues."""
        ev = np.linalg.eigvalsh(self.matrix)
        cut = rtol * max(1.0, float(np.max(np.abs(ev), initial=0.0)))
        return (int(np.sum(ev > cut)), int(np.sum(ev < -cut)), int(np.sum(np.abs(ev) <= cut)))


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry_residual: float
    jacobi_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.antisymmetry_residual <= self.tol and self.jacobi_residual <= self.tol

    def as_dict(self):
        return {
            "antisymmetry_residual": self.antisymmetry_residual,
            "jacobi_residual": self.jacobi_residual,
            "tol": self.tol,
            "passed": self.passed,
        }


def _jacobi_tensor(c):
    # [[e_i, e_j], e_k] + [[e_j, e_k], e_i] + [[e_k, e_i], e_j], component l
    return (
        np.einsum("mij,lmk->lijk", c, c)
        + np.einsum("mjk,lmi->lijk", c, c)
        + np.einsum("mki,lmj->lijk", c, c)
    )


def validate(alg, tol=DEFAULT_TOL, *, raise_on_failure=False) -> ValidationReport:
    """Antisymmetry and Jacobi residuals (max abs entries) of the structure constants."""
    c = alg.c if isinstance(alg, LieAlgebra) else np.asarray(alg, dtype=float)
    if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
        raise StructureError(f"structure constants must have shape (n, n, n), got {c.shape}")
    anti = float(np.max(np.abs(c + c.transpose(0, 2, 1)), initial=0.0))
    jac = float(np.max(np.abs(_jacobi_tensor(c)), initial=0.0))
    report = ValidationReport(anti, jac, tol)
    if raise_on_failure and not report.passed:
        raise ValidationError(
            f"structure constants rejected: antisymmetry {anti:.3g}, Jacobi {jac:.3g} (tol {tol:g})",
            report,
        )
    return report


def bracket(alg: LieAlgebra, x, y) -> np.ndarray:
    return np.einsum("kij,i,j->k", alg.c, np.asarray(x, float), np.asarray(y, float))


def ad_matrix(alg: LieAlgebra, x) -> np.ndarray:
    """Matrix of ``y -> [x, y]``."""
    return np.einsum("kij,i->kj", alg.c, np.asarray(x, float))


def ad_matrices(alg: LieAlgebra) -> np.ndarray:
    """Stack ``A[i] = ad(e_i)``, shape ``(n, n, n)``."""
    return alg.c.transpose(1, 0, 2).copy()


def center(alg: LieAlgebra, tol=DEFAULT_TOL) -> LinearSubspace:
    n = alg.dim
    # rows (k, j), columns i: [e_i, e_j]_k
    A = alg.c.transpose(0, 2, 1).reshape(n * n, n)
    return LinearSubspace(nullspace(A, tol), n)


def _derivation_system(c):
    n = c.shape[0]
    eye = np.eye(n)
    iu, ju = np.triu_indices(n, 1)
    # delta[e_i,e_j] - [delta e_i, e_j] - [e_i, delta e_j], unknown D[a, b]
    t = np.einsum("ka,bij->kijab", eye, c)
    t -= np.einsum("bi,kaj->kijab", eye, c)
    t -= np.einsum("bj,kia->kijab", eye, c)
    return t[:, iu, ju].transpose(1, 0, 2, 3).reshape(-1, n * n)


def derivations(alg: LieAlgebra, tol=DEFAULT_TOL) -> np.ndarray:
    """Basis of Der(g), orthonormal for the Frobenius inner product.

    Returns an array of shape ``(d, n, n)``. The kernel is taken from an SVD
    with singular-value cutoff ``tol * sigma_max``.
    """
    n = alg.dim
    if n == 1 or alg.is_abelian_exact:
        return np.eye(n * n).reshape(n * n, n, n)
    ker = nullspace(_derivation_system(alg.c), tol)
    return ker.T.reshape(-1, n, n)


def derivation_residual(alg: LieAlgebra, D) -> float:
    """Max abs violation of the derivation identity over basis pairs."""
    c = alg.c
    lhs = np.einsum("kl,lij->kij", D, c)
    rhs = np.einsum("li,klj->kij", D, c) + np.einsum("lj,kil->kij", D, c)
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def killing_form(alg: LieAlgebra) -> BilinearForm:
    """``K[i, j] = Tr(ad e_i ad e_j)``."""
    return BilinearForm(np.einsum("kil,ljk->ij", alg.c, alg.c), "killing")


def trace_form(mats) -> BilinearForm:
    """``B(a_i, a_j) = Tr(a_i a_j)`` on a family of matrices."""
    mats = np.asarray(mats, dtype=float)
    return BilinearForm(np.einsum("iab,jba->ij", mats, mats), "trace-form-B")


def is_ideal(alg: LieAlgebra, U: LinearSubspace, tol=DEFAULT_TOL):
    """Check ``[U, g] <= U``.

    Returns ``(ok, residual)`` where the residual is the largest norm of the
    component of ``[u, e_j]`` orthogonal to ``U``, over basis vectors ``u``.
    """
    if U.dim == 0 or U.dim == alg.dim:
        return True, 0.0
    brackets = np.einsum("kij,ia->kaj", alg.c, U.basis).reshape(alg.dim, -1)
    perp = brackets - U.basis @ (U.basis.T @ brackets)
    res = float(np.max(np.linalg.norm(perp, axis=0), initial=0.0))
    return res <= tol, res


def ideal_closure(alg: LieAlgebra, seeds, rtol=1e-7, max_iter=None) -> LinearSubspace:
    """Smallest ad-invariant subspace containing ``seeds`` (iterate U <- U + [g, U])."""
    n = alg.dim
    U = _orth(np.asarray(seeds, dtype=float).reshape(n, -1), rtol)
    ads = ad_matrices(alg)
    for _ in range(max_iter or n + 1):
        if U.shape[1] in (0, n):
            break
        grown = np.concatenate([U] + [a @ U for a in ads], axis=1)
        V = _orth(grown, rtol)
        if V.shape[1] == U.shape[1]:
            U = V
            break
        U = V
    return LinearSubspace(U, n)


@dataclass(frozen=True)
class SimplicityVerdict:
    kind: str  # "simple" | "abelian" | "has-ideal"
    witness: Optional[LinearSubspace] = None
    witness_residual: float = 0.0
    trials: int = 0
    probabilistic: bool = False

    @property
    def simple(self) -> bool:
        return self.kind == "simple"

    def as_dict(self):
        d = {"kind": self.kind, "trials": self.trials, "probabilistic": self.probabilistic}
        if self.witness is not None:
            d["witness_dim"] = self.witness.dim
            d["witness_basis"] = self.witness.basis.T.tolist()
            d["witness_residual"] = self.witness_residual
        return d


def _eigen_seeds(A):
    w, V = np.linalg.eig(A)
    seeds = []
    for k in range(V.shape[1]):
        for part in (V[:, k].real, V[:, k].imag):
            nrm = np.linalg.norm(part)
            if nrm > 1e-8:
                seeds.append(part / nrm)
    return seeds


def is_simple(alg: LieAlgebra, tol=DEFAULT_TOL, trials=20, seed=0) -> SimplicityVerdict:
    """Randomized search for a proper ideal.

    Candidates are the center, the derived algebra, and ideal closures of
    kernel vectors and eigenvectors of ``ad x`` for random ``x``. Any
    candidate is certified with :func:`is_ideal` before being returned.
    A "simple" verdict means no certified proper ideal was found in
    ``trials`` rounds; it is flagged probabilistic.
    """
    n = alg.dim
    if np.max(np.abs(alg.c), initial=0.0) <= tol:
        return SimplicityVerdict("abelian", trials=0)

    best = None

    def consider(U):
        nonlocal best
        if not 0 < U.dim < n:
            return
        ok, res = is_ideal(alg, U, tol=max(tol, 1e-9) * 10)
        if ok and (best is None or U.dim < best[0].dim):
            best = (U, res)

    consider(center(alg, tol))
    consider(LinearSubspace.span(alg.c.reshape(n, -1), n, rtol=1e-9))

    rng = np.random.default_rng(seed)
    for _ in range(trials):
        if best is not None and best[0].dim == 1:
            break
        A = ad_matrix(alg, rng.standard_normal(n))
        seeds = list(nullspace(A, 1e-9).T) + _eigen_seeds(A)
        for s in seeds:
            consider(ideal_closure(alg, s))

    if best is None:
        return SimplicityVerdict("simple", trials=trials, probabilistic=True)
    return SimplicityVerdict("has-ideal", best[0], best[1], trials=trials, probabilistic=False)


def from_matrices(mats, labels=None, name="", rtol=1e-10) -> LieAlgebra:
    """Structure constants of the matrix Lie algebra spanned by ``mats``.

    Complex matrices are treated as real vectors (real and imaginary parts),
    so e.g. anti-Hermitian bases give the real compact forms.
    """
    mats = np.asarray(mats)
    d = mats.shape[0]
    flat = mats.reshape(d, -1)
    if np.iscomplexobj(flat):
        flat = np.concatenate([flat.real, flat.imag], axis=1)
    basis = flat.T.astype(float)
    c = np.zeros((d, d, d))
    for i in range(d):
        for j in range(i + 1, d):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            v = comm.reshape(-1)
            if np.iscomplexobj(v):
                v = np.concatenate([v.real, v.imag])
            coef, *_ = np.linalg.lstsq(basis, v.astype(float), rcond=None)
            if np.linalg.norm(basis @ coef - v) > 1e-8 * max(1.0, np.linalg.norm(v)):
                raise StructureError("matrices do not span a Lie algebra")
            coef[np.abs(coef) < rtol] = 0.0
            c[:, i, j] = coef
            c[:, j, i] = -coef
    return LieAlgebra(c, labels=labels, name=name)


def direct_sum(a: LieAlgebra, b: LieAlgebra, name="") -> LieAlgebra:
    n, m = a.dim, b.dim
    c = np.zeros((n + m,) * 3)
    c[:n, :n, :n] = a.c
    c[n:, n:, n:] = b.c
    labels = tuple(f"{s}_1" for s in a.labels) + tuple(f"{s}_2" for s in b.labels)
    return LieAlgebra(c, labels=labels, name=name or f"{a.name}+{b.name}")


def transform_constants(c, g, g_inv=None) -> np.ndarray:
    """Push the bracket tensor forward by ``g``: ``(g.w)(x, y) = g w(g^-1 x, g^-1 y)``."""
    g = np.asarray(g, dtype=float)
    if g_inv is None:
        g_inv = np.linalg.inv(g)
    return np.einsum("kK,Kij,ia,jb->kab", g, c, g_inv, g_inv, optimize=True)


def is_automorphism(alg: LieAlgebra, g, tol=DEFAULT_TOL):
    """``(ok, residual)`` for ``g[x, y] == [gx, gy]`` on basis pairs."""
    g = np.asarray(g, dtype=float)
    lhs = np.einsum("kl,lij->kij", g, alg.c)
    rhs = np.einsum("kab,ai,bj->kij", alg.c, g, g, optimize=True)
    res = float(np.max(np.abs(lhs - rhs), initial=0.0))
    return res <= tol, res


def span_contains(mats: Sequence[np.ndarray], target) -> float:
    """Residual of projecting ``target`` onto the span of ``mats`` (Frobenius)."""
    A = np.asarray(mats, dtype=float).reshape(len(mats), -1).T
    t = np.asarray(target, dtype=float).reshape(-1)
    coef, *_ = np.linalg.lstsq(A, t, rcond=None)
    return float(np.linalg.norm(A @ coef - t))
