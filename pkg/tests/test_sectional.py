
import numpy as np
import pytest

from hrlab.positivity import (
    StrongPositivityDecomposition,
    random_decomposition,
    random_positive_form,
)
from hrlab.sectional import (
    CurvatureError,
    CurvatureTensor,
    DifferentialData,
    complex_structure,
    complexified_sectional,
    constant_curvature_tensor,
    joint_kernel,
    random_differential,
    siu_sampson_density,
    siu_sampson_terms,
    symmetry_defect,
)


def test_constant_curvature_examples():
    assert not np.any(constant_curvature_tensor(3, 0.0).R)
    R = constant_curvature_tensor(2, -1.0)
    assert R.R[0, 1, 1, 0] == -1
    for m in (2, 3, 5):
        assert symmetry_defect(constant_curvature_tensor(m, 1.7).R) == 0


def test_tensor_rejects_broken_symmetry():
    R = constant_curvature_tensor(3, 1.0).R.copy()
    R[0, 1, 2, 0] += 1.0
    with pytest.raises(CurvatureError):
        CurvatureTensor(R)


def test_real_vectors_follow_gauss_formula(rng):
    c = 0.8
    R = constant_curvature_tensor(4, -c)
    for _ in range(20):
        Z, W = rng.standard_normal(4), rng.standard_normal(4)
        expected = -c * (Z @ Z * (W @ W) - (Z @ W) ** 2)
        assert complexified_sectional(R, Z, W) == pytest.approx(expected)
    flat = constant_curvature_tensor(4, 0.0)
    Z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert complexified_sectional(flat, Z, Z) == 0


def test_complexified_sign_follows_curvature_sign(rng):
    neg, pos = constant_curvature_tensor(5, -1.0), constant_curvature_tensor(5, 0.5)
    for _ in range(1000):
        Z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        W = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        scale = np.vdot(Z, Z).real * np.vdot(W, W).real
        assert complexified_sectional(neg, Z, W) <= 1e-12 * scale
        assert complexified_sectional(pos, Z, W) >= -1e-12 * scale


def test_complex_structure_squares_to_minus_one():
    for n in (1, 2, 4):
        J = complex_structure(n)
        assert np.array_equal(J @ J, -np.eye(2 * n))


def test_density_trivial_cases():
    dec = random_decomposition(4, 3, 1)
    omega0 = random_positive_form(4, 2)
    zero = DifferentialData(np.zeros((5, 8)))
    assert siu_sampson_density(zero, constant_curvature_tensor(5, -1.0), dec, omega0) == 0
    d = random_differential(4, 5, 3)
    assert siu_sampson_density(d, constant_curvature_tensor(5, 0.0), dec, omega0) == 0


def test_density_nonpositive_campaign():
    R = constant_curvature_tensor(5, -1.0)
    for t in range(50):
        d = random_differential(4, 5, [t, 0])
        dec = random_decomposition(4, 3, [t, 1])
        omega0 = random_positive_form(4, [t, 2])
        terms = siu_sampson_terms(d, R, dec, omega0)
        assert all(x.weight > 0 for x in terms)
        density = sum(x.value for x in terms)
        assert density <= 1e-10 * sum(abs(x.value) for x in terms)


def test_weights_match_term_integral():
    # weights are linear in mu and reproduce top_ratio(term ^ sigma)
    dec = random_decomposition(4, 2, 7)
    omega0 = random_positive_form(4, 8)
    d = random_differential(4, 5, 9)
    R = constant_curvature_tensor(5, -1.0)
    base = siu_sampson_terms(d, R, dec, omega0)
    doubled = StrongPositivityDecomposition(4, [(2 * mu, a) for mu, a in dec.terms])
    for x, y in zip(base, siu_sampson_terms(d, R, doubled, omega0)):
        assert y.weight == pytest.approx(2 * x.weight)
        assert y.sectional == pytest.approx(x.sectional)


def test_density_invariant_under_unitary_rebasing(monkeypatch, rng):
    import hrlab.sectional as sec

    d = random_differential(4, 5, 11)
    dec = random_decomposition(4, 3, 12)
    omega0 = random_positive_form(4, 13)
    R = constant_curvature_tensor(5, -1.0)
    base = siu_sampson_density(d, R, dec, omega0)

    original = sec.joint_kernel

    def rotated(alphas):
        K = original(alphas)
        G = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        U, _ = np.linalg.qr(G)
        return K @ U

    monkeypatch.setattr(sec, "joint_kernel", rotated)
    assert siu_sampson_density(d, R, dec, omega0) == pytest.approx(base, rel=1e-10)


def test_joint_kernel_is_annihilated():
    dec = random_decomposition(5, 1, 2)
    alphas = dec.terms[0][1]
    K = joint_kernel(alphas)
    assert K.shape == (5, 2)
    assert np.allclose(alphas @ K, 0)


def test_degenerate_term_is_reported():
    # bypass validation to inject a rank-deficient term
    dec = StrongPositivityDecomposition(4, [])
    object.__setattr__(dec, "terms", [(1.0, np.array([[1, 0, 0, 0], [2, 0, 0, 0]], dtype=complex))])
    with pytest.raises(CurvatureError, match="term 0"):
        siu_sampson_terms(random_differential(4, 5, 0), constant_curvature_tensor(5, -1.0), dec, random_positive_form(4, 1))


def test_positive_curvature_warns():
    d = random_differential(4, 5, 0)
    dec = random_decomposition(4, 1, 1)
    with pytest.warns(UserWarning):
        siu_sampson_density(d, constant_curvature_tensor(5, 1.0), dec, random_positive_form(4, 2))


def test_curvature_json_round_trip():
    R = constant_curvature_tensor(3, -2.0)
    data = R.to_json()
    assert data["convention"] == "sectional=R(X,Y,Y,X)"
    assert np.array_equal(CurvatureTensor.from_json(data).R, R.R)
