"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion NN ... PASS|FAIL`` line; the same lines
are collected into a summary section at the end of the pytest run.
Running this file as a script (``python3 tests/test_acceptance.py``) prints
only those lines.
"""
import time

import numpy as np
import pytest
from scipy.linalg import expm

from cartanflow.algebra import ad_matrix, is_automorphism, is_ideal, killing_form
from cartanflow.cartan import check_inclusions, classify, der_transpose_residual, split
from cartanflow.corpus import CORPUS_NAMES, SIMPLE_NAMES, corpus, sl_matrix_basis
from cartanflow.hspace import (
    MetricPoint,
    boundary_action_test,
    flag_of_direction,
    random_direction,
    random_point,
)
from cartanflow.kempfness import convexity_check, destabilize, equivariance_contraction_test, minimize
from cartanflow.realify import JOperator, check_compact_form
from cartanflow.verify import OdeProblem, trace_bound_check, property_star_suite, q_factor, random_symmetric

from oracles import automorphism_from_matrix_map, classical_killing_signs, classical_split_dims, group_closure

TITLES = {
    1: "ODE lower bound and Q(x) >= 1",
    2: "exponential map is distance non-decreasing",
    3: "F convex along geodesics",
    4: "flow converges, derivations transpose-closed at H*",
    5: "Cartan splits of the real simple corpus",
    6: "sl(2,C) compact real form",
    7: "instability of heisenberg and solvable2",
    8: "flow contraction under automorphisms",
    9: "boundary action matches block-triangular criterion",
    10: "flows respect finite automorphism groups",
    11: "independence of the starting metric",
}


def _line(k, ok, detail=""):
    return f"criterion {k:02d} {TITLES[k]:<52s} {'PASS' if ok else 'FAIL'} {detail}".rstrip()


def _run(k, body):
    t0 = time.perf_counter()
    try:
        detail = body() or ""
    except BaseException:
        print(_line(k, False))
        raise
    print(_line(k, True, f"[{time.perf_counter() - t0:.1f}s] {detail}"))


def _angle(a, b):
    c = np.sum(a * b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


# 1

def _c1():
    rng = np.random.default_rng(2024)
    margins = []
    for _ in range(100):
        n = int(rng.integers(1, 6))
        p = OdeProblem(random_symmetric(n, rng), random_symmetric(n, rng), float(rng.uniform(1e-3, 3.0)), 8)
        margins.append(trace_bound_check(p).min_margin)
    assert min(margins) >= -1e-10
    for _ in range(20):
        d = rng.standard_normal(4)
        rep = trace_bound_check(OdeProblem(np.diag(d), np.diag(rng.standard_normal(4)), 2.0, 8))
        assert np.max(np.abs(rep.margins)) <= 1e-10
    grid = np.concatenate([[0.0], np.logspace(-10, np.log10(50.0), 2000)])
    q = q_factor(np.concatenate([-grid, grid]))
    assert np.all(q >= 1.0)
    return f"min margin {min(margins):.3g}"


# 2

def _c2():
    out = []
    for n in (3, 5):
        rep = property_star_suite(n, 500, 42, slack=1e-8)
        assert rep.passed and not rep.violations
        out.append(f"n={n} min gap {rep.min_gap:.3g}")
    return ", ".join(out)


# 3

def _c3():
    worst = np.inf
    for idx, name in enumerate(CORPUS_NAMES):
        alg = corpus(name)
        rng = np.random.default_rng(300 + idx)
        for _ in range(50):
            H = random_point(alg.dim, rng)
            rep = convexity_check(alg, H, random_direction(H, rng), rtol=1e-8)
            if rep.scale > 0:
                worst = min(worst, rep.min_second_difference / rep.scale)
    return f"worst relative second difference {worst:.3g} (abelian F is identically 0)"


# 4

def _c4():
    worst = 0.0
    for name in ("sl2R", "su2", "so3", "sl3R", "su3"):
        alg = corpus(name)
        tr = minimize(alg)
        assert tr.verdict == "minimum" and tr.final.gradnorm <= 1e-7
        r = der_transpose_residual(alg, tr.H_star)
        assert r <= 1e-6
        worst = max(worst, r)
    return f"max residual {worst:.3g}"


# 5

def _c5():
    # the expected dims come from the matrix oracle theta(X) = -X^T, not from the flow
    expected = {"sl2R": classical_split_dims(2), "sl3R": classical_split_dims(3),
                "su2": (3, 0), "so3": (3, 0)}
    k_sign, p_sign = classical_killing_signs(2)
    assert k_sign < 0 < p_sign
    worst = 0.0
    for name, dims in expected.items():
        alg = corpus(name)
        sp = split(alg, minimize(alg).H_star)
        assert sp.dims == dims, (name, sp.dims)
        rep = check_inclusions(alg, sp, 1e-6)
        worst = max(worst, rep.kk, rep.kp, rep.pp)
        c = classify(alg, sp)
        assert c.kind == ("compact" if dims[1] == 0 else "noncompact")
    return f"max inclusion residual {worst:.3g}"


# 6

def _c6():
    alg = corpus("sl2C")
    tr = minimize(alg)
    assert tr.verdict == "minimum"
    sp = split(alg, tr.H_star)
    assert sp.dims == (3, 3)
    rep = check_compact_form(alg, JOperator(alg.J), sp, 1e-6)
    assert rep.passed and max(rep.Jk_residual, rep.Jp_residual) <= 1e-6
    ev = np.linalg.eigvalsh(killing_form(alg).restrict(sp.k_basis))
    assert len(ev) == 3 and np.all(ev < 0)
    return f"J residual {max(rep.Jk_residual, rep.Jp_residual):.3g}"


# 7

def _c7():
    ray = np.diag([1.0, 1.0, -2.0]) / np.sqrt(6)
    out = []
    for name, want in (("heisenberg", 2), ("solvable2", 1)):
        alg = corpus(name)
        tr = minimize(alg)
        assert tr.verdict == "divergent"
        if name == "heisenberg":
            ang = _angle(tr.S_inf.sigma, ray)
            assert ang <= 1e-3
            out.append(f"S_inf angle {ang:.3g}")
        d = destabilize(alg, tr)
        assert d.ideals
        I = d.ideals[0]
        assert 0 < I.dim < alg.dim and is_ideal(alg, I, 1e-9)[0]
        assert I.dim == 1 and abs(abs(I.basis[want, 0]) - 1.0) <= 1e-9
    return ", ".join(out)


# 8

def _c8():
    shear = np.eye(3)
    shear[2, 0] = 1.0
    s = corpus("sl2R")
    rot = expm(0.7 * ad_matrix(s, [0.0, 1.0, -1.0]))
    out = []
    for alg, g in ((corpus("heisenberg"), shear), (s, rot)):
        rep = equivariance_contraction_test(alg, MetricPoint.identity(3), g, steps=2000, slack=1e-6)
        assert np.all(rep.distances <= rep.distances[0] + 1e-6 * rep.times)
        out.append(f"{alg.name} excess {rep.max_excess:.3g}")
    return ", ".join(out)


# 9

def _block_pair(rng, n, fixed):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    k = int(rng.integers(2, n + 1))
    cuts = np.sort(rng.choice(np.arange(1, n), k - 1, replace=False))
    blocks = np.diff(np.r_[0, cuts, n])
    vals = np.sort(rng.uniform(-1, 1, k))[::-1] + 0.3 * np.arange(k)[::-1]
    mu = np.repeat(vals, blocks)
    mu -= mu.mean()
    mu /= np.linalg.norm(mu)
    M = rng.standard_normal((n, n)) + 2 * np.eye(n)
    if fixed:
        idx = np.repeat(np.arange(k), blocks)
        M[idx[:, None] > idx[None, :]] = 0.0
    return Q @ M @ Q.T, Q @ np.diag(mu) @ Q.T


def _c9():
    S = np.diag([1.0, 1.0, -2.0]) / np.sqrt(6)
    h = np.eye(3)
    h[2, 0] = 1.0
    assert boundary_action_test(h, S) is False
    assert boundary_action_test(h.T, S) is True
    count = 0
    for n in (3, 4):
        rng = np.random.default_rng(900 + n)
        for i in range(50):
            h, S = _block_pair(rng, n, fixed=i % 2 == 0)
            assert boundary_action_test(h, S) == flag_of_direction(S).is_preserved_by(h)
            count += 1
    return f"{count} pairs agree"


# 10

def _c10():
    s_gens = [np.array([[-1.0, 0, 0], [0, 0, 1], [0, 1, 0]]), np.diag([1.0, -1, -1])]
    mats = sl_matrix_basis(3)
    a3_gens = [automorphism_from_matrix_map(mats, lambda X: -X.T)] + [
        automorphism_from_matrix_map(mats, lambda X, d=d: np.diag(d) @ X @ np.diag(d))
        for d in ([1.0, -1, 1], [1.0, 1, -1])
    ]
    worst = 0.0
    for k, (alg, gens) in enumerate(((corpus("sl2R"), s_gens), (corpus("sl3R"), a3_gens))):
        G = group_closure(gens)
        assert all(is_automorphism(alg, g)[0] for g in G)
        rng = np.random.default_rng(1000 + k)
        A = rng.standard_normal((alg.dim, alg.dim))
        P = A @ A.T + alg.dim * np.eye(alg.dim)
        H0 = MetricPoint(sum(g.T @ P @ g for g in G) / len(G))
        dev = []
        tr = minimize(alg, H0, callback=lambda st: dev.append(max(np.abs(g.T @ st.H.H @ g - st.H.H).max() for g in G)))
        assert tr.verdict == "minimum"
        final = max(np.abs(g.T @ tr.H_star.H @ g - tr.H_star.H).max() for g in G)
        assert max(dev) <= 1e-7 and final <= 1e-7
        worst = max(worst, max(dev), final)
    return f"max deviation {worst:.3g}"


# 11

def _c11():
    worst = 0.0
    for idx, name in enumerate(SIMPLE_NAMES):
        alg = corpus(name)
        rng = np.random.default_rng(1100 + idx)
        runs = [minimize(alg, random_point(alg.dim, rng, 1.0)) for _ in range(2)]
        assert all(r.verdict == "minimum" for r in runs)
        F1, F2 = (r.final.F for r in runs)
        rel = abs(F1 - F2) / max(abs(F1), 1e-300)
        assert rel <= 1e-6
        assert split(alg, runs[0].H_star).dims == split(alg, runs[1].H_star).dims
        worst = max(worst, rel)
    return f"max relative F gap {worst:.3g}"


CRITERIA = {1: _c1, 2: _c2, 3: _c3, 4: _c4, 5: _c5, 6: _c6, 7: _c7, 8: _c8, 9: _c9, 10: _c10, 11: _c11}


@pytest.mark.parametrize("k", sorted(CRITERIA), ids=lambda k: f"criterion_{k:02d}")
def test_criterion(k):
    _run(k, CRITERIA[k])


if __name__ == "__main__":
    import sys
    failed = 0
    for k, body in CRITERIA.items():
        try:
            _run(k, body)
        except Exception:
            failed += 1
    sys.exit(1 if failed else 0)
