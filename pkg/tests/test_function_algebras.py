"""Function systems, norms, closure, constructors, quadruples and pi."""

import numpy as np
import pytest

import shilov as sh
from conftest import PRESET_CHARACTER_COUNTS, PRESET_NAMES, random_space


def scalar_system(coords, tables, **kw):
    X = sh.FiniteSpace(tuple(f"p{k}" for k in range(len(coords))), np.asarray(coords, complex))
    basis = np.asarray(tables, dtype=complex)[:, :, None]
    return sh.FunctionSystem(X, sh.complex_field(), basis, **kw)


# --- evaluation and norms ------------------------------------------------------


def test_evaluate_constant_and_coordinate():
    E = sh.preset_algebra("dual_numbers")
    X = sh.FiniteSpace(("one", "i"), np.array([1.0 + 0j, 1j]))
    Bt = sh.make_CXE(X, E)
    unit_coeffs = sh.span_membership(Bt, Bt.unit_table())
    assert unit_coeffs is not None
    assert np.allclose(sh.evaluate(Bt, unit_coeffs, "i").coords, E.unit)

    # coordinate function z * 1_E as a table
    z_table = X.coords[:, None] * E.unit[None, :]
    z_coeffs = sh.span_membership(Bt, z_table)
    assert np.allclose(sh.evaluate(Bt, z_coeffs, "i").coords, 1j * E.unit)

    # z^2 via pointwise product of value tables
    zsq = sh.pointwise_product(Bt, z_table, z_table)
    assert np.allclose(zsq[1], -1.0 * E.unit)


def test_sup_norm_examples():
    S = scalar_system([0, 1], [[1, 1]])
    assert sh.sup_norm(S, [1.0]) == pytest.approx(1.0)

    # f(x) = eps * x on {0, 1} with dual-number values
    E = sh.preset_algebra("dual_numbers")
    X = sh.FiniteSpace(("0", "1"), np.array([0.0 + 0j, 1.0 + 0j]))
    table = np.zeros((2, 2), dtype=complex)
    table[1, 1] = 1.0  # value eps at x = 1, 0 at x = 0
    S = sh.FunctionSystem(X, E, table[None, :, :])
    assert sh.sup_norm(S, np.array([1.0])) == pytest.approx(1.0)


def test_lipschitz_seminorm_and_norm():
    S = scalar_system([0, 1], [[1, 1], [0, 1]], norm_tag="lipschitz", alpha=1.0)
    const = np.array([1.0, 0.0])
    assert sh.lipschitz_seminorm(S, const) == pytest.approx(0.0)
    slope = np.array([0.0, 1.0])
    assert sh.lipschitz_seminorm(S, slope) == pytest.approx(1.0)
    assert sh.lipschitz_norm(S, slope) == pytest.approx(2.0)


def test_lipschitz_three_point_oracle():
    # evaluate all three pairs of f(x) = x on {0, 0.25, 1}, alpha = 0.5:
    # (0, .25): .25/.5 = .5;  (0, 1): 1/1 = 1;  (.25, 1): .75/sqrt(.75) ~ .866
    # sup over pairs = 1, attained at (0, 1)
    S = scalar_system(
        [0, 0.25, 1.0],
        [[1, 1, 1], [0, 0.25, 1.0]],
        norm_tag="lipschitz",
        alpha=0.5,
    )
    f = np.array([0.0, 1.0])  # the coordinate function
    pair_values = [0.25 / 0.25**0.5, 1.0 / 1.0**0.5, 0.75 / 0.75**0.5]
    assert sh.lipschitz_seminorm(S, f) == pytest.approx(max(pair_values))
    assert sh.lipschitz_seminorm(S, f) == pytest.approx(1.0)


def test_lipschitz_requires_metric():
    X = sh.FiniteSpace(("a", "b"))  # no coords, no metric
    basis = np.ones((1, 2, 1), dtype=complex)
    with pytest.raises(ValueError):
        sh.FunctionSystem(X, sh.complex_field(), basis, norm_tag="lipschitz", alpha=0.5)


# --- closure and membership ----------------------------------------------------


def test_closure_generic_points_fills_CX():
    rng = np.random.default_rng(0)
    X = random_space(rng, 3)
    S = scalar_system(X.coords, [np.ones(3), X.coords])
    closed = sh.close_under_products(S)
    assert closed.dim == 3
    assert closed.closed
    # independent oracle: Vandermonde rank of {1, z, z^2}
    V = np.vander(X.coords, 3, increasing=True)
    assert np.linalg.matrix_rank(V) == 3


def test_closure_saturates_on_two_points():
    S = scalar_system([-1, 1], [[1, 1], [-1, 1]])
    closed = sh.close_under_products(S)
    assert closed.dim == 2  # z^2 = 1 on {-1, +1}


def test_closure_dual_numbers_full():
    rng = np.random.default_rng(1)
    X = random_space(rng, 3)
    E = sh.preset_algebra("dual_numbers")
    tables = [X.coords[:, None] * E.unit[None, :]]  # z * 1_E
    for j in range(E.dim):
        t = np.zeros((3, 2), dtype=complex)
        t[:, j] = 1.0
        tables.append(t)
    S = sh.FunctionSystem(X, E, np.array(tables))
    closed = sh.close_under_products(S)
    assert closed.dim == 6


def test_closure_is_closure_operator():
    rng = np.random.default_rng(3)
    X = random_space(rng, 4)
    S1 = scalar_system(X.coords, [np.ones(4), X.coords])
    S2 = scalar_system(X.coords, [np.ones(4), X.coords, X.coords**2])
    c1, c2 = sh.close_under_products(S1), sh.close_under_products(S2)
    assert c1.dim >= S1.dim  # extensive
    assert c2.dim >= c1.dim  # monotone (S1 span inside S2 span)
    assert sh.close_under_products(c1).dim == c1.dim  # idempotent


def test_span_membership_examples():
    S = scalar_system([-1, 1], [[1, 1], [-1, 1]])
    coeffs = sh.span_membership(S, S.basis[1])
    assert np.allclose(coeffs, [0, 1], atol=1e-10)
    zsq = (S.space.coords**2)[:, None]
    coeffs = sh.span_membership(S, zsq)
    assert np.allclose(coeffs, [1, 0], atol=1e-10)  # z^2 = 1 on {-1, 1}

    S3 = scalar_system([0, 1, 2], [[1, 1, 1], [0, 1, 2]])
    assert sh.span_membership(S3, (S3.space.coords**2)[:, None]) is None


# --- constructors ----------------------------------------------------------------


def test_make_CXE_dimension():
    X = sh.FiniteSpace(("a", "b"), np.array([0j, 1 + 0j]))
    E = sh.preset_algebra("pointwise_2")
    system = sh.make_CXE(X, E)
    assert system.dim == 4
    assert system.closed
    assert sh.validate_system(system).passed


def test_make_poly_dedups():
    rng = np.random.default_rng(4)
    X = random_space(rng, 3)
    P = sh.make_poly(X, sh.complex_field(), 2)
    assert P.dim == 3
    bigger = sh.make_poly(X, sh.complex_field(), 7)  # z^k dependent for k >= 3
    assert bigger.dim == 3


def test_make_rational_includes_pole_powers():
    ann = sh.raster_from_shape(sh.Annulus(0, 0.5, 1), 16)
    X = sh.sample_raster(ann, sh.CircleSample(0, 0.75, 8))
    R = sh.make_rational(X, sh.complex_field(), 2, [0])
    inv = (1.0 / X.coords)[:, None]
    inv2 = (1.0 / X.coords**2)[:, None]
    assert sh.span_membership(R, inv) is not None
    assert sh.span_membership(R, inv2) is not None


def test_make_rational_pole_collision():
    X = sh.FiniteSpace(("a", "b"), np.array([0.5 + 0j, 1.0 + 0j]))
    with pytest.raises(ValueError):
        sh.make_rational(X, sh.complex_field(), 2, [0.5])


def test_span_BE_dimensions():
    rng = np.random.default_rng(6)
    X = random_space(rng, 2)
    E = sh.preset_algebra("pointwise_2")
    B = sh.make_CXE(X, sh.complex_field())
    assert sh.span_BE(B, E).dim == 4  # all of C(X, E)

    X1 = sh.FiniteSpace(("only",), np.array([0j]))
    B1 = sh.make_CXE(X1, sh.complex_field())
    assert sh.span_BE(B1, sh.preset_algebra("truncated_poly_3")).dim == 3

    S = scalar_system([-1, 1], [[1, 1], [-1, 1]])
    assert sh.span_BE(S, E).dim == 4


def test_separation_check():
    rng = np.random.default_rng(7)
    X = random_space(rng, 3)
    E = sh.preset_algebra("dual_numbers")
    assert sh.separation_check(sh.make_CXE(X, E))
    constants = sh.FunctionSystem(
        X, E, np.broadcast_to(E.unit, (1, 3, 2)).copy()
    )
    assert not sh.separation_check(constants)
    assert sh.separation_check(scalar_system(X.coords, [np.ones(3), X.coords]))


def test_embedding_constant():
    S = scalar_system([0, 1], [[1, 1], [0, 1]], norm_tag="sup")
    assert sh.embedding_constant(S) == 1.0

    lip = scalar_system([0, 1], [[1, 1]], norm_tag="lipschitz", alpha=1.0)
    assert sh.embedding_constant(lip, samples=200) == pytest.approx(1.0)

    lip2 = scalar_system([0, 1], [[1, 1], [0, 1]], norm_tag="lipschitz", alpha=1.0)
    bound = sh.embedding_constant(lip2, samples=2000)
    # the coordinate function witnesses ratio 1/2; constants witness 1
    assert bound >= 0.5
    assert bound <= 1.0 + 1e-9
    # and the bound really is a lower bound for the sup ratio
    rng = np.random.default_rng(0)
    for _ in range(100):
        f = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        ratio = sh.sup_norm(lip2, f) / sh.lipschitz_norm(lip2, f)
        assert ratio <= 1.0 + 1e-12


# --- abstract algebra view and quadruples -----------------------------------------


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_hausner_character_count(name):
    rng = np.random.default_rng(hash(name) % 2**32)
    E = sh.preset_algebra(name)
    X = random_space(rng, 3)
    Bt = sh.make_CXE(X, E)
    alg = sh.as_algebra(Bt)
    assert sh.validate_algebra(alg).passed
    chars = sh.characters(alg)
    assert len(chars) == PRESET_CHARACTER_COUNTS[name] * 3


def test_as_algebra_requires_closed():
    rng = np.random.default_rng(10)
    X = random_space(rng, 4)
    P = sh.make_poly(X, sh.complex_field(), 1)  # {1, z} on 4 points: not closed
    assert not P.closed
    with pytest.raises(ValueError):
        sh.as_algebra(P)


def test_check_admissible_full_case():
    rng = np.random.default_rng(12)
    X = random_space(rng, 3)
    E = sh.preset_algebra("pointwise_2")
    Q = sh.Quadruple(X, E, sh.make_CXE(X, sh.complex_field()), sh.make_CXE(X, E))
    report = sh.check_admissible(Q)
    assert report.passed, str(report)


def test_check_admissible_constants_fail_naturality():
    rng = np.random.default_rng(14)
    X = random_space(rng, 2)
    E = sh.preset_algebra("pointwise_2")
    constants = sh.FunctionSystem(
        X, sh.complex_field(), np.ones((1, 2, 1), dtype=complex), closed=True
    )
    Q = sh.Quadruple(X, E, constants, sh.make_CXE(X, E))
    report = sh.check_admissible(Q)
    assert not report.check("scalar_system_natural").passed


def test_check_admissible_missing_eps_constant():
    rng = np.random.default_rng(15)
    X = random_space(rng, 3)
    E = sh.preset_algebra("dual_numbers")
    B = sh.make_CXE(X, sh.complex_field())
    # vector span {b * 1_E}: contains 1_E, separates, misses eps constants
    tables = np.zeros((B.dim, X.size, E.dim), dtype=complex)
    tables[:, :, 0] = B.basis[:, :, 0]
    Bt = sh.FunctionSystem(X, E, tables, closed=True)
    Q = sh.Quadruple(X, E, B, Bt)
    report = sh.check_admissible(Q)
    assert not report.check("products_BE_in_vector_system").passed


def test_build_pi_scalar_case_is_evaluations():
    rng = np.random.default_rng(16)
    X = random_space(rng, 3)
    B = sh.make_CXE(X, sh.complex_field())
    Q = sh.scalar_quadruple(B)
    pi = sh.build_pi(Q)
    assert len(pi) == 3
    evals = B.basis[:, :, 0]
    for k, chi in enumerate(pi):
        assert np.max(np.abs(chi.values - evals[:, k])) < 1e-10


def test_build_pi_counts():
    rng = np.random.default_rng(17)
    X2 = random_space(rng, 2)
    E = sh.preset_algebra("pointwise_2")
    Q = sh.Quadruple(X2, E, sh.make_CXE(X2, sh.complex_field()), sh.make_CXE(X2, E))
    pi = sh.build_pi(Q)
    assert len(pi) == 4
    values = np.array([c.values for c in pi])
    for i in range(4):
        for j in range(i + 1, 4):
            assert np.max(np.abs(values[i] - values[j])) > 1e-6

    Xd = random_space(rng, 3)
    Ed = sh.preset_algebra("dual_numbers")
    Qd = sh.Quadruple(Xd, Ed, sh.make_CXE(Xd, sh.complex_field()), sh.make_CXE(Xd, Ed))
    assert len(sh.build_pi(Qd)) == 3  # single character of E


def test_pi_outputs_verify_and_natural():
    rng = np.random.default_rng(18)
    X = random_space(rng, 3)
    for name in ("pointwise_2", "dual_numbers"):
        E = sh.preset_algebra(name)
        Q = sh.Quadruple(X, E, sh.make_CXE(X, sh.complex_field()), sh.make_CXE(X, E))
        alg = sh.as_algebra(Q.vector_system)
        pi = sh.build_pi(Q, vector_algebra=alg)
        for chi in pi:
            assert sh.verify_character(alg, chi).passed
        assert sh.check_pi_injective(Q, pi)
        assert sh.check_natural(Q)


def test_lip_quadruple_natural():
    rng = np.random.default_rng(19)
    X = random_space(rng, 3)
    E = sh.preset_algebra("cyclic_group_3")
    Q = sh.Quadruple(X, E, sh.make_lip(X, sh.complex_field(), 0.5), sh.make_lip(X, E, 0.5))
    assert sh.check_admissible(Q).passed
    assert sh.check_natural(Q)


def test_scalar_quadruple_natural():
    rng = np.random.default_rng(20)
    X = random_space(rng, 4)
    B = sh.make_CXE(X, sh.complex_field())
    Q = sh.scalar_quadruple(B)
    assert sh.check_admissible(Q).passed
    assert sh.check_natural(Q)


def test_function_system_json_roundtrip():
    rng = np.random.default_rng(22)
    X = random_space(rng, 3)
    for system in (
        sh.make_CXE(X, sh.preset_algebra("dual_numbers")),
        sh.make_lip(X, sh.complex_field(), 0.5),
    ):
        back = sh.FunctionSystem.from_dict(system.to_dict())
        assert back.space.points == system.space.points
        assert np.allclose(back.basis, system.basis)
        assert back.norm_tag == system.norm_tag
        assert back.alpha == system.alpha
        assert back.closed == system.closed
        assert back.scalars.dim == system.scalars.dim


def test_quadruple_invariants():
    rng = np.random.default_rng(21)
    X = random_space(rng, 2)
    Y = random_space(rng, 2)
    E = sh.preset_algebra("pointwise_2")
    B = sh.make_CXE(X, sh.complex_field())
    Bt = sh.make_CXE(Y, E)  # wrong space
    with pytest.raises(ValueError):
        sh.Quadruple(X, E, B, Bt)
    with pytest.raises(ValueError):
        sh.Quadruple(X, E, sh.make_CXE(X, E), sh.make_CXE(X, E))  # scalar not C
