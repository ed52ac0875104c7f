import math

import numpy as np
import pytest

from hrlab.exterior import Form, FormError, brute_wedge, conjugate, wedge, wedge_all
from hrlab.hodge_riemann import q_matrix
from hrlab.pairings import (
    EndValuedForm,
    SignViolation,
    bmy_density,
    bmy_scale,
    check_primitive_mv,
    flatness_decompose,
    graded_commutator,
    he_matrix,
    he_residual,
    hermitian_adjoint,
    jacobi_identity_check,
    jacobi_scale,
    jacobi_sides,
    mv_trace,
    mv_wedge,
    pairing_sq,
    primitive_project_mv,
    random_curvature,
    random_theta,
    traceless_part,
)
from hrlab.positivity import random_positive_form

from conftest import oracle_top_ratio, omega_std, random_form


def random_mv(rng, r, n, p, q):
    return EndValuedForm.from_entries([[random_form(rng, n, p, q) for _ in range(r)] for _ in range(r)])


def background(n, seed):
    omega0 = random_positive_form(n, [seed, 0])
    Omega0 = wedge_all([random_positive_form(n, [seed, 1 + k]) for k in range(n - 2)], n=n)
    return omega0, Omega0


def primitive_traceless(r, n, omega0, Omega0, seed):
    return primitive_project_mv(traceless_part(random_curvature(r, n, seed)), omega0, Omega0)


def test_mv_wedge_rank_one_and_nilpotent(rng):
    a, b = random_form(rng, 3, 1, 1), random_form(rng, 3, 0, 1)
    A, B = EndValuedForm.from_matrix([[1]], a), EndValuedForm.from_matrix([[1]], b)
    assert np.allclose(mv_wedge(A, B).coeffs[0, 0], wedge(a, b).coeffs)
    X = EndValuedForm.identity(2, Form.dz(3, 1))
    assert mv_wedge(X, X).norm() == 0


def test_mv_wedge_against_entrywise_oracle(rng):
    A, B = random_mv(rng, 2, 3, 1, 0), random_mv(rng, 2, 3, 1, 1)
    out = mv_wedge(A, B)
    for i in range(2):
        for k in range(2):
            expected = brute_wedge(A.entry(i, 0), B.entry(0, k)) + brute_wedge(A.entry(i, 1), B.entry(1, k))
            assert np.allclose(out.coeffs[i, k], expected.coeffs, atol=1e-13)
    with pytest.raises(FormError):
        mv_wedge(A, random_mv(rng, 3, 3, 1, 0))


def test_mv_trace_graded_cyclicity(rng):
    for (pa, qa), (pb, qb) in [((1, 0), (0, 1)), ((1, 0), (1, 1)), ((1, 1), (0, 1))]:
        A, B = random_mv(rng, 3, 3, pa, qa), random_mv(rng, 3, 3, pb, qb)
        sign = (-1) ** ((pa + qa) * (pb + qb))
        assert np.allclose(mv_trace(mv_wedge(A, B)).coeffs, sign * mv_trace(mv_wedge(B, A)).coeffs)
    A = random_mv(rng, 2, 2, 1, 1)
    assert np.allclose(mv_trace(A).coeffs, A.coeffs[0, 0] + A.coeffs[1, 1])


def test_hermitian_adjoint(rng):
    N = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    theta = EndValuedForm.from_matrix(N, Form.dz(3, 1))
    expected = EndValuedForm.from_matrix(N.conj().T, Form.dzbar(3, 1))
    assert np.allclose(hermitian_adjoint(theta).coeffs, expected.coeffs)

    psi = random_mv(rng, 2, 3, 1, 1)
    assert np.array_equal(hermitian_adjoint(hermitian_adjoint(psi)).coeffs, psi.coeffs)
    star = hermitian_adjoint(psi)
    for j in range(2):
        for k in range(2):
            assert np.allclose(star.coeffs[k, j], conjugate(psi.entry(j, k)).coeffs)


def test_adjoint_reverses_products(rng):
    A, B = random_mv(rng, 2, 3, 1, 0), random_mv(rng, 2, 3, 0, 1)
    lhs = hermitian_adjoint(mv_wedge(A, B))
    rhs = mv_wedge(hermitian_adjoint(B), hermitian_adjoint(A))
    assert np.allclose(lhs.coeffs, -rhs.coeffs)


def test_check_primitive_examples():
    w, one = omega_std(2), Form.scalar(2)
    alpha = 1j * (Form.monomial(2, (1,), (1,)) - Form.monomial(2, (2,), (2,)))
    F = EndValuedForm.from_matrix(np.diag([1, -1]), alpha)
    assert check_primitive_mv(F, w, one) == 0
    Fw = EndValuedForm.identity(2, w)
    assert check_primitive_mv(Fw, w, one) == pytest.approx(2)


def test_primitive_projection(rng):
    omega0, Omega0 = background(3, 1)
    F = random_mv(rng, 2, 3, 1, 1)
    P = primitive_project_mv(F, omega0, Omega0)
    assert check_primitive_mv(P, omega0, Omega0) <= 1e-12 * max(1.0, F.norm())
    again = primitive_project_mv(P, omega0, Omega0)
    assert np.max(np.abs(again.coeffs - P.coeffs)) <= 1e-12 * F.norm()
    assert primitive_project_mv(EndValuedForm.identity(2, omega0), omega0, Omega0).norm() <= 1e-12
    alpha = 1j * (Form.monomial(2, (1,), (1,)) - Form.monomial(2, (2,), (2,)))
    prim = EndValuedForm.from_matrix(np.diag([1, -1]), alpha)
    assert np.allclose(primitive_project_mv(prim, omega_std(2), Form.scalar(2)).coeffs, prim.coeffs)


def test_he_residual_examples(rng):
    omega0, Omega0 = background(3, 2)
    lam = 0.7
    F = EndValuedForm.identity(2, -1j * lam * omega0)
    assert he_residual(F, omega0, Omega0, lam) <= 1e-12
    prim = primitive_traceless(2, 3, omega0, Omega0, 3)
    assert he_residual(prim, omega0, Omega0, 0.0) <= 1e-12


def test_he_residual_least_squares(rng):
    omega0, Omega0 = background(3, 4)
    F = random_curvature(2, 3, 5)
    # oracle: brute-force products for every entry
    s = oracle_top_ratio(brute_wedge(brute_wedge(omega0, omega0), Omega0), omega0)
    T = np.array(
        [
            [oracle_top_ratio(brute_wedge(brute_wedge(1j * F.entry(j, k), omega0), Omega0), omega0) for k in range(2)]
            for j in range(2)
        ]
    )
    assert np.allclose(he_matrix(F, omega0, Omega0), T)
    lam = (np.trace(T) / (2 * s)).real
    expected = np.max(np.abs(T - lam * s * np.eye(2)))
    assert he_residual(F, omega0, Omega0, lam) == pytest.approx(expected, rel=1e-10)


def test_bmy_worked_example():
    alpha = 1j * (Form.monomial(2, (1,), (1,)) - Form.monomial(2, (2,), (2,)))
    F = EndValuedForm.from_matrix(-1j * np.diag([1, -1]), alpha)
    # tr(F ^ F) = 4 dVol by direct expansion
    trFF = brute_wedge(F.entry(0, 0), F.entry(0, 0)) + brute_wedge(F.entry(1, 1), F.entry(1, 1))
    assert oracle_top_ratio(trFF, omega_std(2)) == pytest.approx(4)
    assert bmy_density(F, omega_std(2), Form.scalar(2)) == pytest.approx(2 / math.pi**2, abs=1e-12)


def test_bmy_rank_one_vanishes():
    omega0, Omega0 = background(3, 6)
    F = random_curvature(1, 3, 7)
    assert bmy_density(F, omega0, Omega0, check_primitive=False) == 0


def test_bmy_nonnegative_campaign():
    for t in range(100):
        n = 2 + t % 3
        omega0, Omega0 = background(n, 100 + t)
        F = primitive_traceless(2 + t % 2, n, omega0, Omega0, t)
        density = bmy_density(F, omega0, Omega0)
        assert density >= -1e-10 * bmy_scale(F, omega0, Omega0)


def test_bmy_equality_case_scaling():
    omega0, Omega0 = background(3, 8)
    F = primitive_traceless(2, 3, omega0, Omega0, 9)
    base = bmy_density(F, omega0, Omega0)
    assert base > 0
    ratios = []
    for t in (1e-1, 1e-3, 1e-5):
        d = bmy_density(t * F, omega0, Omega0)
        assert d == pytest.approx(t * t * base, rel=1e-9)
        ratios.append(traceless_part(t * F).norm() / math.sqrt(d))
    assert max(ratios) == pytest.approx(min(ratios), rel=1e-6)


def test_bmy_rejects_bad_input(rng):
    omega0, Omega0 = background(3, 10)
    with pytest.raises(SignViolation, match="hermitian"):
        bmy_density(random_mv(rng, 2, 3, 1, 1), omega0, Omega0)
    F = traceless_part(random_curvature(2, 3, 11))
    with pytest.raises(SignViolation, match="primitive"):
        bmy_density(F, omega0, Omega0)
    assert np.isfinite(bmy_density(F, omega0, Omega0, check_primitive=False))


def test_pairing_examples():
    w, one = omega_std(2), Form.scalar(2)
    zero = EndValuedForm.zero(2, 2, 2, 0)
    assert pairing_sq(zero, w, one).q_energy == 0
    psi = EndValuedForm.from_matrix([[0, 1], [0, 0]], Form.monomial(2, (1, 2), ()))
    result = pairing_sq(psi, w, one)
    assert result.q_energy == pytest.approx(1)
    assert result.raw == pytest.approx(1)


def test_pairing_energy_is_sum_of_q(rng):
    omega0, Omega0 = background(4, 12)
    psi = random_mv(rng, 2, 4, 2, 0)
    Q = q_matrix(2, 0, omega0, Omega0)
    expected = sum(Q.value(psi.entry(j, k)).real for j in range(2) for k in range(2))
    assert pairing_sq(psi, omega0, Omega0).q_energy == pytest.approx(expected, rel=1e-10)


def test_pairing_definite_campaign(rng):
    for t in range(30):
        omega0, Omega0 = background(4, 200 + t)
        psi = random_mv(rng, 2, 4, 2, 0)
        assert pairing_sq(psi, omega0, Omega0).q_energy > 0
        prim = primitive_project_mv(random_mv(rng, 2, 4, 1, 1), omega0, Omega0)
        result = pairing_sq(prim, omega0, Omega0)
        assert result.q_energy > 0 and result.raw < 0


def test_pairing_rejects_unmet_hypotheses(rng):
    omega0, Omega0 = background(3, 13)
    with pytest.raises(FormError):
        pairing_sq(random_mv(rng, 2, 3, 1, 0), omega0, Omega0)
    with pytest.raises(SignViolation, match="primitive"):
        pairing_sq(random_mv(rng, 2, 3, 1, 1), omega0, Omega0)


def test_graded_commutator_of_odd_forms(rng):
    theta = random_theta(2, 3, 1)
    assert np.allclose(graded_commutator(theta, theta).coeffs, 2 * mv_wedge(theta, theta).coeffs)


def test_jacobi_examples():
    assert jacobi_identity_check(EndValuedForm.zero(2, 3, 1, 0)) == 0
    rng = np.random.default_rng(3)
    for _ in range(20):
        N1, N2 = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(2))
        theta = EndValuedForm.from_matrix(N1, Form.dz(2, 1)) + EndValuedForm.from_matrix(N2, Form.dz(2, 2))
        assert jacobi_identity_check(theta) <= 1e-12 * jacobi_scale(theta)
    single = EndValuedForm.from_matrix(rng.standard_normal((3, 3)), Form.dz(3, 1))
    lhs, rhs = jacobi_sides(single)
    assert lhs.norm() == 0 and rhs.norm() == 0
    with pytest.raises(FormError):
        jacobi_identity_check(EndValuedForm.zero(2, 3, 0, 1))


def test_flatness_commuting_normal():
    theta = EndValuedForm.from_matrix(np.diag([1, 2j]), Form.dz(2, 1)) + EndValuedForm.from_matrix(
        np.diag([3, -1]), Form.dz(2, 2)
    )
    parts = flatness_decompose(theta)
    assert parts.is_flat()


def test_flatness_non_normal():
    N = np.array([[0, 1], [0, 0]], dtype=complex)
    parts = flatness_decompose(EndValuedForm.from_matrix(N, Form.dz(2, 1)))
    commutator = N @ N.conj().T - N.conj().T @ N
    expected = EndValuedForm.from_matrix(commutator, Form.monomial(2, (1,), (1,)))
    assert np.allclose(parts.c11.coeffs, expected.coeffs)
    assert parts.c11.norm() > 0 and not parts.is_flat()


def test_flatness_adjoint_relation_and_total():
    for seed in range(20):
        theta = random_theta(2 + seed % 2, 3, seed)
        parts = flatness_decompose(theta)
        # conjugation is multiplicative on forms, so (theta ^ theta)* = -theta* ^ theta*
        residual = np.max(np.abs((hermitian_adjoint(parts.c20) + parts.c02).coeffs))
        assert residual <= 1e-13 * jacobi_scale(theta) ** 0.5
        star = hermitian_adjoint(theta)
        total = mv_wedge(theta, theta).norm() + (mv_wedge(theta, star) + mv_wedge(star, theta)).norm()
        assert parts.is_flat() == (total == 0)


def test_end_valued_json_round_trip(rng):
    A = random_mv(rng, 2, 3, 1, 1)
    B = EndValuedForm.from_json(A.to_json())
    assert np.array_equal(A.coeffs, B.coeffs)
