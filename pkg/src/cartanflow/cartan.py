"""Cartan involution and ``g = k + p`` from an optimal metric.

At a critical point ``H*`` of ``F`` the image ``ad(g)`` is closed under the
``H*``-transpose. Working in an ``H*``-orthonormal frame (where that
transpose is the ordinary one) the involution ``theta`` is defined by
``ad(theta x) = -ad(x).T``; ``k`` is its ``+1`` eigenspace (``ad x``
antisymmetric) and ``p`` its ``-1`` eigenspace (``ad x`` symmetric).
All returned subspaces are in the original coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import (
    LieAlgebra,
    LinearSubspace,
    center,
    derivations,
    is_automorphism,
    killing_form,
)
from .errors import (
    DegenerateInvolution,
    InclusionFailure,
    InvariantViolation,
    NotCriticalPoint,
    PreconditionError,
)
from .hspace import MetricPoint
from .kempfness import frame_constants, _moment, _F

__all__ = [
    "CartanSplit",
    "split",
    "der_transpose_residual",
    "InclusionReport",
    "check_inclusions",
    "Classification",
    "classify",
]


def _frame_algebra(alg: LieAlgebra, H: MetricPoint) -> LieAlgebra:
    return LieAlgebra(frame_constants(alg, H), alg.labels, name=alg.name)


def der_transpose_residual(alg: LieAlgebra, H: MetricPoint, tol=1e-9) -> float:
    """Largest distance of ``D^T`` (``H``-transpose) from Der(g), over a basis of Der(g).

    Zero exactly when the derivation algebra is closed under the adjoint
    taken with respect to ``H``. Measured in an ``H``-orthonormal frame with
    the Frobenius norm and a Frobenius-orthonormal basis of Der(g).
    """
    D = derivations(_frame_algebra(alg, H), tol)
    flat = D.reshape(len(D), -1)
    T = D.transpose(0, 2, 1).reshape(len(D), -1)
    proj = (T @ flat.T) @ flat
    return float(np.max(np.linalg.norm(T - proj, axis=1), initial=0.0))


@dataclass(frozen=True, eq=False)
class CartanSplit:
    """Output of :func:`split`.

    ``theta`` acts on coordinate vectors of the original basis. ``k_basis``
    and ``p_basis`` are orthonormal in the Euclidean structure of those
    coordinates (the split itself is orthogonal only for ``H_star``).
    """

    H_star: MetricPoint
    theta: np.ndarray
    k_basis: LinearSubspace
    p_basis: LinearSubspace
    killing_signature: tuple
    residuals: dict = field(default_factory=dict)

    @property
    def dims(self):
        return self.k_basis.dim, self.p_basis.dim

    def as_dict(self):
        return {
            "H_star": self.H_star.H.tolist(),
            "theta": self.theta.tolist(),
            "k_basis": self.k_basis.basis.T.tolist(),
            "p_basis": self.p_basis.basis.T.tolist(),
            "dim_k": self.k_basis.dim,
            "dim_p": self.p_basis.dim,
            "killing_signature": list(self.killing_signature),
            "residuals": dict(self.residuals),
        }


def split(alg: LieAlgebra, H_star, tol=1e-6) -> CartanSplit:
    """Cartan split of ``alg`` at the optimal metric ``H_star``.

    Parameters
    ----------
    alg : LieAlgebra
        Must have trivial center (``ad`` injective).
    H_star : MetricPoint or array_like
        A critical point of F: ``|m| <= tol * max(1, F)`` is required.
    tol : float
        Certification tolerance. The ad-image transpose closure, the symmetry
        of ``theta`` in the frame and the automorphism property must hold
        within ``10 * tol``; eigenvalues of ``theta`` within ``tol`` of +-1.

    Returns
    -------
    CartanSplit

    Raises
    ------
    NotCriticalPoint
        Gradient too large or ``ad(g)`` not closed under transpose.
    DegenerateInvolution
        ``theta`` has an eigenvalue away from +-1.
    """
    H = H_star if isinstance(H_star, MetricPoint) else MetricPoint(H_star)
    n = alg.dim
    if H.n != n:
        raise PreconditionError("metric and algebra dimensions differ")
    if alg.is_abelian_exact or center(alg).dim > 0:
        raise PreconditionError("the Cartan split needs a centerless algebra")
    b = frame_constants(alg, H)
    F = _F(b)
    gn = float(np.linalg.norm(_moment(b)))
    if gn > tol * max(1.0, F):
        raise NotCriticalPoint(f"gradient norm {gn:.3g} at the supplied metric (F = {F:.6g})")

    ads = b.transpose(1, 0, 2)  # ads[x] = ad(u_x) in the frame
    A = ads.reshape(n, -1).T
    rhs = -ads.transpose(0, 2, 1).reshape(n, -1).T
    th, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    closure = float(np.max(np.linalg.norm(A @ th - rhs, axis=0)))
    scale = float(np.max(np.linalg.norm(A, axis=0)))
    if closure > 10 * tol * scale:
        raise NotCriticalPoint(f"ad(g) is not closed under the H-transpose (residual {closure:.3g})")
    asym = float(np.max(np.abs(th - th.T)))
    if asym > 10 * tol:
        raise NotCriticalPoint(f"involution not symmetric in the optimal frame ({asym:.3g})")
    ev, U = np.linalg.eigh(0.5 * (th + th.T))
    off = float(np.max(np.minimum(np.abs(ev - 1.0), np.abs(ev + 1.0))))
    if off > tol:
        raise DegenerateInvolution(f"involution eigenvalue {off:.3g} away from +-1")

    g = H.factor
    g_inv = np.linalg.inv(g)
    theta = g_inv @ th @ g
    k = LinearSubspace.span(g_inv @ U[:, ev > 0], n)
    p = LinearSubspace.span(g_inv @ U[:, ev < 0], n)
    involution = float(np.max(np.abs(theta @ theta - np.eye(n))))
    _, auto = is_automorphism(alg, theta)
    if auto > 10 * tol * max(1.0, float(np.max(np.abs(alg.c)))):
        raise InvariantViolation(f"recovered involution is not an automorphism ({auto:.3g})")
    K = killing_form(alg)
    cross = float(np.max(np.abs(k.basis.T @ K.matrix @ p.basis), initial=0.0))
    residuals = {
        "gradient_norm": gn,
        "transpose_closure": closure,
        "theta_asymmetry": asym,
        "eigenvalue_offset": off,
        "theta_squared": involution,
        "automorphism": auto,
        "killing_k_p_cross": cross,
    }
    return CartanSplit(H, theta, k, p, K.signature(), residuals)


@dataclass(frozen=True)
class InclusionReport:
    kk: float
    kp: float
    pp: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.kk, self.kp, self.pp) <= self.tol

    def as_dict(self):
        return {"[k,k] in k": self.kk, "[k,p] in p": self.kp, "[p,p] in k": self.pp,
                "tol": self.tol, "passed": self.passed}


def check_inclusions(alg: LieAlgebra, sp: CartanSplit, tol=1e-6, raise_on_failure=True) -> InclusionReport:
    """Check ``[k,k] <= k``, ``[k,p] <= p``, ``[p,p] <= k``.

    Brackets of basis vectors are decomposed along ``g = k + p`` (an oblique
    decomposition in plain coordinates); the residual is the norm of the
    part landing in the wrong summand.
    """
    K, P = sp.k_basis.basis, sp.p_basis.basis
    n = alg.dim
    if K.shape[1] + P.shape[1] != n:
        raise PreconditionError("k and p do not have complementary dimensions")
    M = np.hstack([K, P])
    if np.linalg.matrix_rank(M) < n:
        raise PreconditionError("k and p intersect")
    dk = K.shape[1]
    # coefficients of v in the [K P] basis
    Minv = np.linalg.inv(M)

    def worst(X, Y, wrong):
        if X.shape[1] == 0 or Y.shape[1] == 0:
            return 0.0, None
        br = np.einsum("kij,ia,jb->kab", alg.c, X, Y).reshape(n, -1)
        coef = Minv @ br
        part = M[:, wrong] @ coef[wrong]
        norms = np.linalg.norm(part, axis=0)
        i = int(np.argmax(norms))
        return float(norms[i]), divmod(i, Y.shape[1])

    in_p, in_k = slice(dk, n), slice(0, dk)
    kk, kk_at = worst(K, K, in_p)
    kp, kp_at = worst(K, P, in_k)
    pp, pp_at = worst(P, P, in_p)
    report = InclusionReport(kk, kp, pp, tol)
    if raise_on_failure and not report.passed:
        name, pair = max([("[k,k]", kk_at, kk), ("[k,p]", kp_at, kp), ("[p,p]", pp_at, pp)],
                         key=lambda r: r[2])[:2]
        raise InclusionFailure(f"{name} inclusion fails for basis pair {pair}: {report.as_dict()}")
    return report


@dataclass(frozen=True)
class Classification:
    kind: str
    dim_k: int
    dim_p: int
    killing_k_max: Optional[float]
    killing_p_min: Optional[float]

    def as_dict(self):
        return {"kind": self.kind, "dim_k": self.dim_k, "dim_p": self.dim_p,
                "killing_k_max_eig": self.killing_k_max, "killing_p_min_eig": self.killing_p_min}


def classify(alg: LieAlgebra, sp: CartanSplit, rtol=1e-8) -> Classification:
    """``compact`` when ``p = 0``, else ``noncompact``; checks the Killing signs.

    The Killing form must be negative definite on ``k`` and positive
    definite on ``p`` (eigenvalues beyond ``rtol`` times the largest one),
    otherwise :class:`InvariantViolation` is raised.
    """
    K = killing_form(alg)
    scale = max(1.0, float(np.max(np.abs(K.matrix))))
    kmax = float(np.linalg.eigvalsh(K.restrict(sp.k_basis)).max()) if sp.k_basis.dim else None
    pmin = float(np.linalg.eigvalsh(K.restrict(sp.p_basis)).min()) if sp.p_basis.dim else None
    if kmax is not None and kmax >= -rtol * scale:
        raise InvariantViolation(f"Killing form not negative definite on k (max eigenvalue {kmax:.3g})")
    if pmin is not None and pmin <= rtol * scale:
        raise InvariantViolation(f"Killing form not positive definite on p (min eigenvalue {pmin:.3g})")
    kind = "compact" if sp.p_basis.dim == 0 else "noncompact"
    return Classification(kind, sp.k_basis.dim, sp.p_basis.dim, kmax, pmin)
