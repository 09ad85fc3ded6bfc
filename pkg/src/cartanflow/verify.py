"""Numerical checks of the geometry of the space of metrics.

The linear ODE ``dV/dt = [S, V] + alpha`` with ``V(0) = 0`` (``S`` and
``alpha`` symmetric) governs the differential of the matrix exponential:
``V(1) = d/dh exp(S + h alpha) exp(-S)`` at ``h = 0``. In an eigenbasis of
``S`` it decouples into scalar equations with solution

    V_ij(t) = phi(lambda_i - lambda_j, t) * alpha_ij,
    phi(l, t) = (exp(l t) - 1) / l      (= t when l = 0),

and ``V_ij V_ji = t^2 alpha_ij^2 Q(lambda_ij t)`` with
``Q(x) = 2 (cosh x - 1) / x^2 >= 1``. Summing gives
``Tr V(t)^2 >= t^2 Tr alpha^2``, the infinitesimal form of the statement
that the exponential map of the space is distance non-decreasing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvariantViolation, PreconditionError
from .hspace import TangentDirection, distance, geodesic, random_point, riemannian_norm, sym

__all__ = [
    "OdeProblem",
    "OdeSolution",
    "solve_ode",
    "exp_differential",
    "TraceBoundReport",
    "trace_bound_check",
    "lemma7_check",
    "q_factor",
    "PropertyStarReport",
    "property_star_suite",
    "random_symmetric",
]


def random_symmetric(n, rng, scale=1.0):
    a = rng.standard_normal((n, n)) * scale
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class OdeProblem:
    S: np.ndarray
    alpha: np.ndarray
    t_max: float = 1.0
    steps: int = 10

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.S, dtype=float))
        a = np.atleast_2d(np.asarray(self.alpha, dtype=float))
        if S.shape != a.shape or S.shape[0] != S.shape[1]:
            raise PreconditionError("S and alpha must be square matrices of equal size")
        for name, m in (("S", S), ("alpha", a)):
            if np.max(np.abs(m - m.T), initial=0.0) > 1e-12 * max(1.0, np.abs(m).max()):
                raise PreconditionError(f"{name} must be symmetric")
        if self.steps < 1 or self.t_max < 0:
            raise PreconditionError("need steps >= 1 and t_max >= 0")
        object.__setattr__(self, "S", sym(S))
        object.__setattr__(self, "alpha", sym(a))

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps + 1)


def _phi(lam, t):
    """``(exp(lam t) - 1) / lam`` with the limit ``t`` at ``lam = 0``."""
    lam = np.asarray(lam, dtype=float)
    small = np.abs(lam) < 1e-300
    safe = np.where(small, 1.0, lam)
    return np.where(small, t, np.expm1(safe * t) / safe)


def _closed_form(S, alpha, times):
    lam, Q = np.linalg.eigh(S)
    at = Q.T @ alpha @ Q
    L = lam[:, None] - lam[None, :]
    return np.array([Q @ (_phi(L, t) * at) @ Q.T for t in times])


@dataclass(frozen=True)
class OdeSolution:
    times: np.ndarray
    V: np.ndarray
    integrator_mismatch: float


def solve_ode(p: OdeProblem, rtol=1e-6, cross_check=True) -> OdeSolution:
    """Sample ``V`` on ``p.times`` from the closed form.

    With ``cross_check`` the result is compared against an adaptive
    Runge-Kutta integration (scipy ``solve_ivp``, tight tolerances); a
    relative mismatch above ``rtol`` raises :class:`InvariantViolation`.
    """
    times = p.times
    V = _closed_form(p.S, p.alpha, times)
    mismatch = 0.0
    if cross_check and p.t_max > 0:
        n = p.n
        S, a = p.S, p.alpha

        def rhs(_, y):
            Y = y.reshape(n, n)
            return (S @ Y - Y @ S + a).ravel()

        sol = solve_ivp(rhs, (0.0, p.t_max), np.zeros(n * n), method="DOP853",
                        t_eval=times, rtol=1e-12, atol=1e-14)
        if not sol.success:
            raise InvariantViolation(f"integrator failed: {sol.message}")
        W = sol.y.T.reshape(-1, n, n)
        scale = np.maximum(np.linalg.norm(V, axis=(1, 2)), 1e-300)
        diff = np.linalg.norm(W - V, axis=(1, 2))
        mismatch = float(np.max(np.where(scale > 1e-300, diff / scale, diff)))
        if mismatch > rtol:
            raise InvariantViolation(f"closed form and integrator disagree (relative {mismatch:.3g})")
    return OdeSolution(times, V, mismatch)


def exp_differential(S, alpha) -> np.ndarray:
    """``d/dh exp(S + h alpha) exp(-S)`` at ``h = 0``, i.e. ``V(1)``."""
    return _closed_form(sym(np.atleast_2d(S)), sym(np.atleast_2d(alpha)), [1.0])[0]


def q_factor(x):
    """``Q(x) = 2 (cosh x - 1) / x^2 = (sinh(x/2) / (x/2))^2``, with ``Q(0) = 1``.

    Accepts scalars or arrays. Even, at least 1, increasing in ``|x|``.
    """
    y = 0.5 * np.abs(np.asarray(x, dtype=float))
    small = y < 1e-4
    ys = np.where(small, 1.0, y)
    ratio = np.where(small, 1.0 + y * y / 6.0, np.sinh(ys) / ys)
    out = ratio * ratio
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TraceBoundReport:
    times: np.ndarray
    trace_V2: np.ndarray
    lower: np.ndarray
    tol: float

    @property
    def margins(self) -> np.ndarray:
        return self.trace_V2 - self.lower

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins))

    def as_dict(self):
        return {"min_margin": self.min_margin, "tol": self.tol, "samples": len(self.times)}


def trace_bound_check(p: OdeProblem, t_grid=None, tol=1e-10, cross_check=True) -> TraceBoundReport:
    """Check ``Tr V(t)^2 >= t^2 Tr alpha^2`` on ``t_grid`` (default ``p.times``).

    ``Tr V^2`` is taken from the sampled solution, not from the factored
    formula. Raises :class:`InvariantViolation` if some margin is below
    ``-tol``.
    """
    if t_grid is not None:
        t_grid = np.asarray(t_grid, dtype=float)
        p = OdeProblem(p.S, p.alpha, float(t_grid.max()), max(len(t_grid) - 1, 1))
        times = t_grid
        V = _closed_form(p.S, p.alpha, times)
        if cross_check:
            solve_ode(p)
    else:
        sol = solve_ode(p, cross_check=cross_check)
        times, V = sol.times, sol.V
    tr = np.einsum("tij,tji->t", V, V)
    lower = times**2 * np.trace(p.alpha @ p.alpha)
    report = TraceBoundReport(times, tr, lower, tol)
    if report.min_margin < -tol:
        i = int(np.argmin(report.margins))
        raise InvariantViolation(
            f"Tr V^2 = {tr[i]:.17g} < t^2 Tr alpha^2 = {lower[i]:.17g} at t = {times[i]:g}"
        )
    return report


# name used by the public interface
lemma7_check = trace_bound_check


@dataclass
class PropertyStarReport:
    n: int
    samples: int
    seed: int
    min_gap: float
    min_gap_noncommuting: float
    max_gap_commuting: float
    min_infinitesimal_margin: float
    violations: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self):
        return {
            "suite": "property-star",
            "n": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "min_gap": self.min_gap,
            "min_gap_noncommuting": self.min_gap_noncommuting,
            "max_gap_commuting": self.max_gap_commuting,
            "min_infinitesimal_margin": self.min_infinitesimal_margin,
            "violations": len(self.violations),
            "passed": self.passed,
        }


def _trace_free(a):
    return a - np.trace(a) / a.shape[0] * np.eye(a.shape[0])


def property_star_suite(n, samples=500, seed=0, slack=1e-8, commuting_every=10,
                        scale=1.0, raise_on_failure=True) -> PropertyStarReport:
    """Sample ``d(exp_p S1, exp_p S2) >= |S1 - S2|_p`` at random base points.

    Every ``commuting_every``-th sample uses simultaneously diagonalizable
    ``S1, S2`` (equality expected). Each sample also runs
    :func:`trace_bound_check` at ``t = 1`` on the frame representatives.
    """
    if n < 2:
        raise PreconditionError("need n >= 2")
    rng = np.random.default_rng(seed)
    gaps, comm_gaps, inf_margins, bad = [], [], [], []
    for k in range(samples):
        p = random_point(n, rng, 1.0)
        commuting = commuting_every and k % commuting_every == 0
        if commuting:
            Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            s1 = Q @ np.diag(rng.standard_normal(n)) @ Q.T
            s2 = Q @ np.diag(rng.standard_normal(n)) @ Q.T
        else:
            s1 = random_symmetric(n, rng, scale)
            s2 = random_symmetric(n, rng, scale)
        s1, s2 = _trace_free(s1), _trace_free(s2)
        d1 = TangentDirection.from_frame(p, s1)
        d2 = TangentDirection.from_frame(p, s2)
        lhs = distance(geodesic(p, d1, 1.0), geodesic(p, d2, 1.0))
        rhs = riemannian_norm(p, d1.S - d2.S)
        gap = lhs - rhs
        (comm_gaps if commuting else gaps).append(gap)
        rep = trace_bound_check(OdeProblem(s1, s2 - s1, 1.0, 1), cross_check=False)
        inf_margins.append(rep.min_margin)
        if gap < -slack:
            bad.append({"sample": k, "gap": gap, "S1": s1.tolist(), "S2": s2.tolist(), "base": p.H.tolist()})
    allg = gaps + comm_gaps
    report = PropertyStarReport(
        n, samples, seed,
        min_gap=float(min(allg)),
        min_gap_noncommuting=float(min(gaps)) if gaps else float("nan"),
        max_gap_commuting=float(max(np.abs(comm_gaps))) if comm_gaps else float("nan"),
        min_infinitesimal_margin=float(min(inf_margins)),
        violations=bad,
    )
    if raise_on_failure and bad:
        raise InvariantViolation(f"distance decreased under exp in {len(bad)} samples; first: {bad[0]}")
    return report
