"""Positive (1,1)-forms, strongly positive (n-2,n-2)-forms and the (n-1)-st root."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exterior import Form, FormError, basis_position, conjugate, power, wedge, wedge_all

HERMITIAN_TOL = 1e-12


class NotPositiveError(ValueError):
    """Raised when a form or matrix fails a required positivity condition."""


def positivity_threshold(A: np.ndarray) -> float:
    return 1e-10 * (1.0 + float(np.max(np.abs(A), initial=0.0)))


@dataclass(frozen=True, eq=False)
class HermitianCoefficientMatrix:
    """Hermitian matrix A standing for the real (1,1)-form ``i sum A_jk dz^j ^ dzbar^k``."""

    A: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {A.shape}")
        if np.max(np.abs(A - A.conj().T), initial=0.0) > HERMITIAN_TOL * (1.0 + np.max(np.abs(A), initial=0.0)):
            raise ValueError("matrix is not hermitian")
        A = 0.5 * (A + A.conj().T)
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.A)

    def is_positive(self) -> bool:
        return bool(self.eigenvalues()[0] > positivity_threshold(self.A))


def form_from_matrix(A) -> Form:
    """``omega_A = i sum_{j,k} A_jk dz^j ^ dzbar^k``."""
    if not isinstance(A, HermitianCoefficientMatrix):
        A = HermitianCoefficientMatrix(A)
    return Form(A.n, 1, 1, 1j * A.A.reshape(-1))


def matrix_from_form(omega: Form) -> HermitianCoefficientMatrix:
    """Inverse of :func:`form_from_matrix` on real (1,1)-forms."""
    if omega.bidegree != (1, 1):
        raise FormError(f"expected a (1,1)-form, got {omega.bidegree}")
    if not omega.is_real():
        raise FormError("(1,1)-form is not real")
    return HermitianCoefficientMatrix((-1j * omega.coeffs).reshape(omega.n, omega.n))


def is_positive_form(omega: Form) -> bool:
    try:
        return matrix_from_form(omega).is_positive()
    except (FormError, ValueError):
        return False


def random_positive(n: int, seed) -> HermitianCoefficientMatrix:
    """``G G^dagger + 1e-3 I`` with G a standard complex gaussian matrix drawn from ``seed``."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return HermitianCoefficientMatrix(G @ G.conj().T + 1e-3 * np.eye(n))


def random_positive_form(n: int, seed) -> Form:
    return form_from_matrix(random_positive(n, seed))


def _codim_one_sign(n: int) -> complex:
    # omega_A^m / m! has coefficient i^m (-1)^{m(m-1)/2} det(A_IJ) on dz^I ^ dzbar^J
    m = n - 1
    return (1j) ** m * (-1) ** (m * (m - 1) // 2)


def matrix_from_codim_one(phi: Form) -> np.ndarray:
    """Matrix B of an (n-1,n-1)-form, normalised so ``omega_A^{n-1}/(n-1)!`` gives ``adj(A)``.

    Entry ``B[k, j]`` reads the coefficient on ``dz^{[n]-j} ^ dzbar^{[n]-k}``.
    """
    n = phi.n
    if phi.bidegree != (n - 1, n - 1):
        raise FormError(f"expected an ({n - 1},{n - 1})-form, got {phi.bidegree}")
    full = range(1, n + 1)
    comp = [tuple(i for i in full if i != j) for j in full]
    B = np.empty((n, n), dtype=complex)
    scale = _codim_one_sign(n)
    for j in range(n):
        for k in range(n):
            c = phi.coeffs[basis_position(n, comp[j], comp[k])]
            B[k, j] = (-1) ** (j + k) * c / scale
    return B


def codim_one_from_matrix(B: np.ndarray) -> Form:
    """Inverse of :func:`matrix_from_codim_one`."""
    B = np.asarray(B, dtype=complex)
    n = B.shape[0]
    full = range(1, n + 1)
    comp = [tuple(i for i in full if i != j) for j in full]
    phi = Form.zero(n, n - 1, n - 1).coeffs.copy()
    scale = _codim_one_sign(n)
    for j in range(n):
        for k in range(n):
            phi[basis_position(n, comp[j], comp[k])] = (-1) ** (j + k) * B[k, j] * scale
    return Form(n, n - 1, n - 1, phi)


def michelsohn_root(phi: Form) -> Form:
    """Positive (1,1)-form omega with ``omega^{n-1} / (n-1)! == phi``.

    The matrix B of ``phi`` plays the role of ``adj(A)``; inverting the
    adjugate gives ``A = det(B)^{1/(n-1)} B^{-1}``.
    """
    n = phi.n
    if n < 2:
        raise FormError("the root needs n >= 2")
    B = matrix_from_codim_one(phi)
    try:
        Bh = HermitianCoefficientMatrix(B)
    except ValueError:
        raise NotPositiveError("(n-1,n-1)-form is not real") from None
    if not Bh.is_positive():
        raise NotPositiveError(
            f"(n-1,n-1)-form is not strictly positive (min eigenvalue {Bh.eigenvalues()[0]:.3e})"
        )
    sign, logdet = np.linalg.slogdet(Bh.A)
    A = math.exp(logdet / (n - 1)) * np.linalg.inv(Bh.A)
    return form_from_matrix(0.5 * (A + A.conj().T))


@dataclass(frozen=True, eq=False)
class StrongPositivityDecomposition:
    """``sum_i mu_i  prod_j (i alpha_j^i ^ conj(alpha_j^i))`` with n-2 independent covectors per term."""

    n: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        clean = []
        for t, (mu, alphas) in enumerate(self.terms):
            mu = float(mu)
            alphas = np.asarray(alphas, dtype=complex).reshape(-1, self.n) if len(alphas) else np.zeros((0, self.n), dtype=complex)
            if mu < 0:
                raise ValueError(f"term {t}: negative weight {mu}")
            if alphas.shape[0] != self.n - 2:
                raise ValueError(f"term {t}: expected {self.n - 2} covectors, got {alphas.shape[0]}")
            if alphas.shape[0] and np.linalg.matrix_rank(alphas) != alphas.shape[0]:
                raise ValueError(f"term {t}: covectors are linearly dependent")
            alphas.setflags(write=False)
            clean.append((mu, alphas))
        object.__setattr__(self, "terms", clean)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"mu": mu, "alphas": [[[float(z.real), float(z.imag)] for z in row] for row in alphas]}
                for mu, alphas in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StrongPositivityDecomposition":
        n = int(data["n"])
        terms = []
        for term in data["terms"]:
            alphas = [[complex(re, im) for re, im in row] for row in term["alphas"]]
            terms.append((term["mu"], np.array(alphas, dtype=complex).reshape(-1, n)))
        return cls(n, terms)


def simple_positive(alpha) -> Form:
    """``i alpha ^ conj(alpha)`` for a (1,0)-covector alpha."""
    a = alpha if isinstance(alpha, Form) else Form.from_covector(alpha)
    return 1j * wedge(a, conjugate(a))


def term_form(n: int, alphas) -> Form:
    return wedge_all([simple_positive(a) for a in alphas], n=n)


def strongly_positive_form(d: StrongPositivityDecomposition) -> Form:
    out = Form.zero(d.n, d.n - 2, d.n - 2)
    for mu, alphas in d.terms:
        out = out + mu * term_form(d.n, alphas)
    return out


def random_decomposition(n: int, terms: int, seed) -> StrongPositivityDecomposition:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(terms):
        alphas = rng.standard_normal((n - 2, n)) + 1j * rng.standard_normal((n - 2, n))
        out.append((float(rng.uniform(0.1, 2.0)), alphas))
    return StrongPositivityDecomposition(n, out)


def multipolarization_omega0_product(omegas) -> Form:
    """Raw product ``omega_0 ^ ... ^ omega_{n-2}`` of n-1 positive (1,1)-forms."""
    omegas = list(omegas)
    if not omegas:
        raise FormError("need at least one (1,1)-form")
    n = omegas[0].n
    if len(omegas) != n - 1:
        raise FormError(f"expected {n - 1} forms on C^{n}, got {len(omegas)}")
    for w in omegas:
        if w.n != n or w.bidegree != (1, 1):
            raise FormError("all factors must be (1,1)-forms on the same space")
        if not is_positive_form(w):
            raise NotPositiveError("factor is not a positive real (1,1)-form")
    return wedge_all(omegas)


def normalized_power(omega: Form, k: int) -> Form:
    return power(omega, k) / math.factorial(k)
