"""The space of determinant-one inner products, SL(n)/SO(n).

A point is a symmetric positive definite matrix ``H`` with ``det H = 1``.
Internally each point also keeps a factor ``g`` with ``H = g.T @ g``;
geodesics are the curves ``g.T expm(t S) g`` and every computation that
needs ``H^(-1/2)`` goes through an SVD of a product of factors instead,
which keeps points at distance 30-50 from the origin usable.

Tangent vectors are stored as variations ``dH`` (symmetric matrices), with
the invariant metric ``|dH|_H^2 = Tr((dH H^-1)^2)``. In the orthonormal frame
of a factor ``g`` the same vector is ``sigma = g^-T dH g^-1`` and its norm is
the Frobenius norm of ``sigma``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import LinearSubspace
from .errors import DegenerateDirection, InvariantViolation, PreconditionError, StructureError

__all__ = [
    "MetricPoint",
    "TangentDirection",
    "WeightedFlag",
    "BoundaryCertificate",
    "expm_sym",
    "logm_spd",
    "sym",
    "riemannian_norm",
    "geodesic",
    "distance",
    "log_map",
    "theta",
    "boundary_limit",
    "boundary_map",
    "flag_of_direction",
    "boundary_action_test",
    "flag_preserved",
    "random_point",
    "random_direction",
    "random_sl",
]


def sym(a):
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def expm_sym(a):
    """Matrix exponential of a symmetric matrix via ``eigh``."""
    w, v = np.linalg.eigh(sym(a))
    return (v * np.exp(w)) @ v.T


def logm_spd(a):
    w, v = np.linalg.eigh(sym(a))
    if w[0] <= 0:
        raise PreconditionError("matrix logarithm of a non positive-definite matrix")
    return (v * np.log(w)) @ v.T


def _unit_det(g):
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    d = np.linalg.det(g)
    if not np.isfinite(d) or d == 0.0:
        raise StructureError("singular factor")
    return g / abs(d) ** (1.0 / n)


class MetricPoint:
    """A determinant-one positive definite symmetric matrix.

    Build from the matrix itself (``MetricPoint(H)``) or from any factor
    with ``MetricPoint.from_factor(g)``; either way the determinant is
    renormalized to one.
    """

    __slots__ = ("_factor", "_H")

    def __init__(self, H, *, normalize=True):
        H = sym(H)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise StructureError("metric must be a square matrix")
        w, v = np.linalg.eigh(H)
        if w[0] <= 0:
            raise StructureError(f"metric is not positive definite (min eigenvalue {w[0]:.3g})")
        if normalize:
            w = w / np.exp(np.mean(np.log(w)))
        self._factor = (v * np.sqrt(w)) @ v.T
        self._factor.setflags(write=False)
        self._H = None

    @classmethod
    def from_factor(cls, g) -> "MetricPoint":
        obj = cls.__new__(cls)
        f = _unit_det(g).copy()
        f.setflags(write=False)
        obj._factor = f
        obj._H = None
        return obj

    @classmethod
    def identity(cls, n) -> "MetricPoint":
        return cls.from_factor(np.eye(n))

    @property
    def n(self) -> int:
        return self._factor.shape[0]

    @property
    def factor(self) -> np.ndarray:
        """Some ``g`` with ``H = g.T @ g`` (not unique)."""
        return self._factor

    @property
    def H(self) -> np.ndarray:
        if self._H is None:
            H = sym(self._factor.T @ self._factor)
            H.setflags(write=False)
            self._H = H
        return self._H

    @property
    def sqrt(self) -> np.ndarray:
        """Symmetric square root ``H^(1/2)``."""
        _, s, vt = np.linalg.svd(self._factor)
        return (vt.T * s) @ vt

    def act(self, g) -> "MetricPoint":
        """The isometry ``H -> g.T H g``."""
        return MetricPoint.from_factor(self._factor @ np.asarray(g, dtype=float))

    def frame(self, dH) -> np.ndarray:
        """Tangent vector ``dH`` expressed in the orthonormal frame of the factor."""
        gi = np.linalg.inv(self._factor)
        return sym(gi.T @ np.asarray(dH, dtype=float) @ gi)

    def unframe(self, sigma) -> np.ndarray:
        g = self._factor
        return sym(g.T @ np.asarray(sigma, dtype=float) @ g)

    def is_identity(self, tol=1e-12) -> bool:
        return bool(np.max(np.abs(self.H - np.eye(self.n))) <= tol)

    def __repr__(self):
        return f"MetricPoint(n={self.n})"


@dataclass(frozen=True, eq=False)
class TangentDirection:
    """A tangent vector ``S`` (a variation ``dH``) at ``base``.

    With ``project=True`` (default) the trace part ``Tr(H^-1 S)`` is removed
    so the vector is tangent to the determinant-one slice.
    """

    base: MetricPoint
    S: np.ndarray
    project: bool = field(default=True, repr=False)

    def __post_init__(self):
        S = sym(self.S)
        if S.shape != (self.base.n, self.base.n):
            raise StructureError("tangent vector has the wrong size")
        if self.project:
            sigma = self.base.frame(S)
            sigma -= np.trace(sigma) / self.base.n * np.eye(self.base.n)
            S = self.base.unframe(sigma)
        S.setflags(write=False)
        object.__setattr__(self, "S", S)

    @classmethod
    def from_frame(cls, base: MetricPoint, sigma) -> "TangentDirection":
        """Build from coordinates in the orthonormal frame of ``base.factor``."""
        return cls(base, base.unframe(sigma))

    @property
    def sigma(self) -> np.ndarray:
        return self.base.frame(self.S)

    def norm(self) -> float:
        return float(np.linalg.norm(self.sigma))

    def normalized(self) -> "TangentDirection":
        nrm = self.norm()
        if nrm == 0.0:
            raise DegenerateDirection("cannot normalize the zero tangent vector")
        return TangentDirection(self.base, self.S / nrm, project=False)

    def __neg__(self):
        return TangentDirection(self.base, -self.S, project=False)

    def scaled(self, t) -> "TangentDirection":
        return TangentDirection(self.base, t * self.S, project=False)


def _as_direction(base, d):
    if isinstance(d, TangentDirection):
        return d
    return TangentDirection(base, d)


def riemannian_norm(base: MetricPoint, dH) -> float:
    """``sqrt(Tr((dH H^-1)^2))``."""
    return float(np.linalg.norm(base.frame(dH)))


def geodesic(base: MetricPoint, direction, t: float) -> MetricPoint:
    """Point at parameter ``t`` on the geodesic with initial velocity ``direction``."""
    direction = _as_direction(base, direction)
    sigma = direction.sigma
    return MetricPoint.from_factor(expm_sym(0.5 * t * sigma) @ base.factor)


def _relative_svd(x: MetricPoint, z: MetricPoint):
    # A = g_z g_x^-1, so that g_x^-T H_z g_x^-1 = A^T A
    A = np.linalg.solve(x.factor.T, z.factor.T).T
    return np.linalg.svd(A)


def distance(H1: MetricPoint, H2: MetricPoint) -> float:
    """``|| log(H1^(-1/2) H2 H1^(-1/2)) ||_F``."""
    _, s, _ = _relative_svd(H1, H2)
    return float(2.0 * np.linalg.norm(np.log(s)))


def _log_frame(x: MetricPoint, z: MetricPoint):
    _, s, vt = _relative_svd(x, z)
    return (vt.T * (2.0 * np.log(s))) @ vt


def log_map(x: MetricPoint, z: MetricPoint) -> TangentDirection:
    """Inverse of :func:`geodesic`: the tangent vector at ``x`` reaching ``z`` at ``t = 1``."""
    return TangentDirection.from_frame(x, _log_frame(x, z))


def theta(x: MetricPoint, z: MetricPoint) -> TangentDirection:
    """Unit tangent vector at ``x`` pointing at ``z``."""
    sigma = _log_frame(x, z)
    nrm = np.linalg.norm(sigma)
    if nrm < 1e-14:
        raise DegenerateDirection("theta(x, z) is undefined for z == x")
    return TangentDirection(x, x.unframe(sigma / nrm), project=False)


@dataclass(frozen=True)
class BoundaryCertificate:
    """Observed Cauchy increments of ``R -> theta_x(exp_y(R nu))`` against the
    integrated derivative bound ``d / (R (R - d))``."""

    d: float
    radii: np.ndarray
    increments: np.ndarray
    bounds: np.ndarray
    slack: float

    @property
    def max_ratio(self) -> float:
        mask = self.bounds > 0
        if not np.any(mask):
            return 0.0
        return float(np.max(self.increments[mask] / self.bounds[mask]))

    @property
    def tail_bound(self) -> float:
        """Bound on the distance from the last estimate to the limit."""
        R, d = self.radii[-1], self.d
        return float(np.log(R / (R - d))) if d > 0 else 0.0


def _increment_bound(d, R0, R1):
    # integral of d / (R (R - d)) dR over [R0, R1]
    if d == 0.0:
        return 0.0
    return float(np.log((R1 - d) * R0 / (R1 * (R0 - d))))


def boundary_limit(x: MetricPoint, y: MetricPoint, nu, R_schedule=None, *, slack=0.1, abs_slack=1e-8):
    """Estimate the boundary map ``lim_R theta_x(exp_y(R nu))`` for a unit ``nu`` at ``y``.

    Returns ``(direction_at_x, certificate)``. Each increment between
    consecutive radii is checked against the integrated derivative bound;
    exceeding it by more than ``slack`` (relative) plus ``abs_slack`` raises
    :class:`InvariantViolation`.
    """
    nu = _as_direction(y, nu)
    if abs(nu.norm() - 1.0) > 1e-8:
        raise PreconditionError("nu must be a unit tangent vector")
    d = distance(x, y)
    if d <= 1e-12:
        d = 0.0  # same point up to roundoff
    if R_schedule is None:
        R0 = max(2.0 * d, 0.5) * 1.05 + 1e-3
        R_schedule = R0 * 1.25 ** np.arange(0, 60)
        R_schedule = R_schedule[R_schedule <= max(24.0, 4 * R0)]
    R = np.asarray(R_schedule, dtype=float)
    if np.any(np.diff(R) <= 0):
        raise PreconditionError("R_schedule must be increasing")
    if d > 0 and R[0] <= 2.0 * d:
        raise PreconditionError("first radius must exceed twice d(x, y)")
    if d == 0.0:
        # same point: the map is the identity
        sigmas = [x.frame(nu.S) for _ in R]
    else:
        sigmas = [theta(x, geodesic(y, nu, r)).sigma for r in R]
    inc = np.array([np.linalg.norm(b - a) for a, b in zip(sigmas, sigmas[1:])])
    bnd = np.array([_increment_bound(d, a, b) for a, b in zip(R, R[1:])])
    cert = BoundaryCertificate(d, R, inc, bnd, slack)
    bad = inc > (1.0 + slack) * bnd + abs_slack
    if np.any(bad):
        k = int(np.argmax(bad))
        raise InvariantViolation(
            f"boundary increment {inc[k]:.3g} on [{R[k]:.3g}, {R[k+1]:.3g}] exceeds bound {bnd[k]:.3g}"
        )
    return TangentDirection(x, x.unframe(sigmas[-1]), project=False), cert


def _sorted_eig_desc(sigma):
    w, v = np.linalg.eigh(sym(sigma))
    return w[::-1], v[:, ::-1]


def boundary_map(x: MetricPoint, y: MetricPoint, nu) -> TangentDirection:
    """Exact limit of ``theta_x(exp_y(R nu))`` as ``R -> infinity``.

    In frame coordinates the ray from ``y`` is ``h expm(R sigma) h.T`` seen
    from ``x``; splitting ``h U = Q R`` (``U`` the eigenbasis of ``sigma``,
    eigenvalues decreasing) the triangular part fixes the flag and the limit
    is ``Q diag(mu) Q.T``.
    """
    nu = _as_direction(y, nu)
    sigma = nu.sigma
    mu, U = _sorted_eig_desc(sigma)
    h = np.linalg.solve(x.factor.T, y.factor.T)
    q, _ = np.linalg.qr(h @ U)
    return TangentDirection(x, x.unframe((q * mu) @ q.T), project=False)


@dataclass(frozen=True, eq=False)
class WeightedFlag:
    """Nested subspaces ``F_1 < ... < F_r = V`` with weights ``mu_1 > ... > mu_r``.

    ``blocks[i]`` holds an orthonormal basis of the i-th graded piece, so
    ``F_i`` is spanned by ``blocks[0..i]``. Weights satisfy
    ``sum n_i mu_i = 0`` and ``sum n_i mu_i^2 = 1``.
    """

    blocks: tuple
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        blocks = tuple(np.asarray(b, dtype=float) for b in self.blocks)
        if len(blocks) != len(w) or len(w) < 2:
            raise StructureError("a weighted flag needs at least two weighted pieces")
        if np.any(np.diff(w) >= 0):
            raise StructureError("weights must be strictly decreasing")
        mult = np.array([b.shape[1] for b in blocks])
        if abs(mult @ w) > 1e-10 or abs(mult @ w**2 - 1.0) > 1e-10:
            raise InvariantViolation("weight identities violated")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([b.shape[1] for b in self.blocks])

    @property
    def subspaces(self) -> list:
        return [LinearSubspace(np.hstack(self.blocks[: i + 1]), self.n) for i in range(len(self.blocks))]

    def reversed_chain(self) -> list:
        """Cumulative sums of the pieces in increasing-weight order, proper ones only."""
        rb = self.blocks[::-1]
        return [LinearSubspace(np.hstack(rb[: i + 1]), self.n) for i in range(len(rb) - 1)]

    def direction(self) -> np.ndarray:
        return sum(mu * b @ b.T for mu, b in zip(self.weights, self.blocks))

    def is_preserved_by(self, h, tol=1e-9) -> bool:
        h = np.asarray(h, dtype=float)
        for F in self.subspaces[:-1]:
            img = h @ F.basis
            if np.max(np.linalg.norm(img - F.basis @ (F.basis.T @ img), axis=0)) > tol * max(1.0, np.abs(h).max()):
                return False
        return True

    def as_dict(self):
        return {
            "weights": self.weights.tolist(),
            "multiplicities": self.multiplicities.tolist(),
            "subspaces": [F.basis.T.tolist() for F in self.subspaces],
        }


def flag_of_direction(S, gap_tol=1e-6) -> WeightedFlag:
    """Weighted flag of a unit trace-free symmetric matrix at the identity.

    Eigenvalues closer than ``gap_tol * max|eigenvalue|`` are merged; the
    merged weights are renormalized so both weight identities hold exactly.
    """
    if isinstance(S, TangentDirection):
        if not S.base.is_identity(1e-10):
            raise PreconditionError("flag_of_direction needs a direction at the identity")
        S = S.S
    S = sym(S)
    if abs(np.linalg.norm(S) - 1.0) > 1e-6:
        raise PreconditionError("direction must have unit norm")
    w, v = _sorted_eig_desc(S)
    scale = np.max(np.abs(w))
    cuts = [0] + [i + 1 for i in range(len(w) - 1) if w[i] - w[i + 1] > gap_tol * scale] + [len(w)]
    if len(cuts) < 3:
        raise DegenerateDirection("all eigenvalues coincide; no flag")
    blocks = [v[:, a:b] for a, b in zip(cuts, cuts[1:])]
    mult = np.array([b.shape[1] for b in blocks], dtype=float)
    mu = np.array([w[a:b].mean() for a, b in zip(cuts, cuts[1:])])
    mu -= (mult @ mu) / mult.sum()
    mu /= np.sqrt(mult @ mu**2)
    return WeightedFlag(tuple(blocks), mu)


def flag_preserved(h, S, gap_tol=1e-6, tol=1e-9) -> bool:
    """Predicted answer of :func:`boundary_action_test`: ``h`` maps each ``F_i`` of the flag of ``S`` into itself."""
    return flag_of_direction(S, gap_tol).is_preserved_by(h, tol)


def _action_distances(h, S, radii):
    w, U = _sorted_eig_desc(S)
    ht = U.T @ np.asarray(h, dtype=float) @ U
    out = []
    for R in radii:
        M = np.exp(0.5 * R * (w[None, :] - w[:, None])) * ht
        s = np.linalg.svd(M, compute_uv=False)
        out.append(2.0 * np.linalg.norm(np.log(s)))
    return np.array(out)


def boundary_action_test(h, S, R_max=None, *, n_grid=25, return_profile=False):
    """Does ``h`` fix the boundary point of the ray ``expm(R S)``?

    Computes ``delta_R^(1/2) = d(expm(RS), h expm(RS) h.T)`` through
    ``M_R = expm(-RS/2) h expm(RS/2)`` on a grid up to ``R_max`` and calls
    the point fixed when the distance has stopped growing: over the last half
    of the grid it rises by less than a quarter of what the slowest
    unbounded mode would add.
    """
    S = sym(S)
    h = np.asarray(h, dtype=float)
    w = np.linalg.eigvalsh(S)
    spread = w[-1] - w[0]
    gaps = np.diff(w)
    gaps = gaps[gaps > 1e-6 * spread]
    if spread <= 0 or gaps.size == 0:
        raise DegenerateDirection("S has a single eigenvalue")
    if R_max is None:
        R_max = 40.0 / spread
    radii = np.linspace(0.0, R_max, n_grid)
    dist = _action_distances(h, S, radii)
    half = radii[-1] / 2.0
    rise = dist[-1] - np.interp(half, radii, dist)
    fixed = bool(rise < 0.25 * gaps.min() * half)
    if return_profile:
        return fixed, radii, dist
    return fixed


def random_sl(n, rng, scale=1.0):
    """Random element of SL(n)."""
    g = np.eye(n) + scale * rng.standard_normal((n, n)) / np.sqrt(n)
    if np.linalg.det(g) < 0:
        g[:, 0] *= -1
    return _unit_det(g)


def random_direction(base: MetricPoint, rng, norm=1.0) -> TangentDirection:
    n = base.n
    a = rng.standard_normal((n, n))
    a = sym(a)
    a -= np.trace(a) / n * np.eye(n)
    a *= norm / np.linalg.norm(a)
    return TangentDirection.from_frame(base, a)


def random_point(n, rng, spread=1.0) -> MetricPoint:
    """``expm`` of a random trace-free symmetric matrix of norm ``spread``, conjugated randomly."""
    base = MetricPoint.identity(n)
    return geodesic(base, random_direction(base, rng, spread), 1.0).act(random_sl(n, rng, 0.3))
