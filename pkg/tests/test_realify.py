import numpy as np
import pytest

from cartanflow.algebra import LinearSubspace, is_simple, killing_form, validate
from cartanflow.cartan import split
from cartanflow.corpus import COMPLEX_NAMES, complex_corpus, corpus
from cartanflow.errors import PreconditionError, ValidationError
from cartanflow.kempfness import minimize
from cartanflow.realify import (
    ComplexLieAlgebra,
    JOperator,
    check_compact_form,
    complex_killing_form,
    realify,
)


def test_complex_abelian_line():
    alg, J = realify(ComplexLieAlgebra(np.zeros((1, 1, 1)), np.zeros((1, 1, 1))))
    assert alg.dim == 2 and alg.is_abelian_exact
    assert np.array_equal(J.matrix, np.array([[0.0, -1.0], [1.0, 0.0]]))


@pytest.mark.parametrize("name", COMPLEX_NAMES)
def test_realification_valid_simple_and_complex_linear(name):
    alg, J = realify(complex_corpus(name))
    assert alg.dim == 2 * complex_corpus(name).dim_c
    assert validate(alg, 1e-9).passed
    assert J.square_residual() == 0.0
    assert J.commutation_residual(alg) <= 1e-12
    assert is_simple(alg).kind == "simple"


def _complex_killing_direct(cc):
    n = cc.shape[0]
    ads = [np.array([[cc[k, i, j] for j in range(n)] for k in range(n)]) for i in range(n)]
    return np.array([[np.trace(ads[i] @ ads[j]) for j in range(n)] for i in range(n)])


@pytest.mark.parametrize("name", COMPLEX_NAMES)
def test_killing_of_realification_is_twice_real_part(name):
    calg = complex_corpus(name)
    alg, _ = realify(calg)
    n = calg.dim_c
    Kc = _complex_killing_direct(calg.c)
    assert np.allclose(complex_killing_form(calg), Kc)
    K = killing_form(alg).matrix
    assert np.allclose(K[:n, :n], 2 * Kc.real)
    # and on i e_j: B(i x, y) = 2 Re(i B_C(x, y)) = -2 Im B_C(x, y)
    assert np.allclose(K[n:, :n], -2 * Kc.imag)


def test_realify_rejects_bad_jacobi():
    c = np.zeros((3, 3, 3), dtype=complex)
    c[0, 1, 2], c[0, 2, 1] = 1.0, -1.0
    c[1, 0, 1], c[1, 1, 0] = 1.0, -1.0
    with pytest.raises(ValidationError):
        realify(ComplexLieAlgebra.from_complex(c))


def test_realify_with_complex_coefficients():
    # sl2 in the basis (i h, e, f): [ih, e] = 2i e, [ih, f] = -2i f, [e, f] = -i (ih)
    c = np.zeros((3, 3, 3), dtype=complex)
    c[1, 0, 1], c[1, 1, 0] = 2j, -2j
    c[2, 0, 2], c[2, 2, 0] = -2j, 2j
    c[0, 1, 2], c[0, 2, 1] = -1j, 1j
    alg, J = realify(ComplexLieAlgebra.from_complex(c))
    assert validate(alg).passed and J.commutation_residual(alg) <= 1e-12


@pytest.fixture(scope="module")
def sl2c_split():
    alg = corpus("sl2C")
    tr = minimize(alg)
    return alg, split(alg, tr.H_star)


def test_compact_form_holds_for_sl2c(sl2c_split):
    alg, sp = sl2c_split
    rep = check_compact_form(alg, JOperator(alg.J), sp)
    assert rep.passed and rep.dim_k == rep.dim_p == 3
    assert max(rep.Jk_residual, rep.Jp_residual) <= 1e-6
    # k has negative definite Killing form of dimension 3
    assert np.all(np.linalg.eigvalsh(killing_form(alg).restrict(sp.k_basis)) < 0)


def test_compact_form_needs_realified_input():
    alg = corpus("su2")
    tr = minimize(alg)
    sp = split(alg, tr.H_star)
    with pytest.raises(PreconditionError):
        check_compact_form(alg, None, sp)


def test_perturbed_split_fails(sl2c_split):
    alg, sp = sl2c_split
    rng = np.random.default_rng(5)
    bad_k = LinearSubspace.span(rng.standard_normal((6, 3)))

    class Fake:
        k_basis = bad_k
        p_basis = sp.p_basis

    rep = check_compact_form(alg, alg.J, Fake)
    assert not rep.passed
    assert max(rep.Jk_residual, rep.Jp_residual) > 1e-2
