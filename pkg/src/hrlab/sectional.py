"""Target curvature tensors and the pointwise pluriharmonicity density.

Convention: sectional curvature is ``K(X, Y) = R(X, Y, Y, X) / |X ^ Y|^2``.
C^n is identified with R^{2n} through ``z = x + i y`` and the real vector
``(x_1, ..., x_n, y_1, ..., y_n)``; the complex structure J is multiplication
by i.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exterior import Form, top_ratio, volume_coefficient, wedge
from .positivity import StrongPositivityDecomposition, simple_positive, term_form

SYMMETRY_TOL = 1e-12
CONVENTION = "sectional=R(X,Y,Y,X)"


class CurvatureError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    R: np.ndarray

    def __post_init__(self):
        R = np.array(self.R, dtype=float)
        if R.ndim != 4 or len(set(R.shape)) != 1:
            raise CurvatureError(f"expected an m x m x m x m array, got shape {R.shape}")
        R.setflags(write=False)
        object.__setattr__(self, "R", R)
        bad = symmetry_defect(R)
        if bad > SYMMETRY_TOL * (1.0 + np.max(np.abs(R), initial=0.0)):
            raise CurvatureError(f"curvature symmetries violated (defect {bad:.3e})")

    @property
    def m(self) -> int:
        return self.R.shape[0]

    def to_json(self) -> dict:
        return {"m": self.m, "convention": CONVENTION, "R": self.R.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "CurvatureTensor":
        if data.get("convention", CONVENTION) != CONVENTION:
            raise CurvatureError(f"unsupported convention {data['convention']!r}")
        return cls(np.array(data["R"], dtype=float))


def symmetry_defect(R: np.ndarray) -> float:
    """Largest violation of antisymmetry, pair symmetry and the first Bianchi identity."""
    checks = [
        R + R.transpose(1, 0, 2, 3),
        R + R.transpose(0, 1, 3, 2),
        R - R.transpose(2, 3, 0, 1),
        # R_ijkl + R_iklj + R_iljk
        R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2),
    ]
    return float(max(np.max(np.abs(c), initial=0.0) for c in checks))


def constant_curvature_tensor(m: int, c: float) -> CurvatureTensor:
    """Space form of sectional curvature c: ``R_ijkl = c (d_il d_jk - d_ik d_jl)``."""
    if m < 2:
        raise CurvatureError("need m >= 2")
    d = np.eye(m)
    R = c * (np.einsum("il,jk->ijkl", d, d) - np.einsum("ik,jl->ijkl", d, d))
    return CurvatureTensor(R)


def complexified_sectional(R: CurvatureTensor, Z, W) -> float:
    """``R(Z, W, conj W, conj Z)`` for complex vectors Z, W (real by the symmetries)."""
    Z = np.asarray(Z, dtype=complex)
    W = np.asarray(W, dtype=complex)
    val = np.einsum("ijkl,i,j,k,l->", R.R, Z, W, W.conj(), Z.conj())
    return float(val.real)


def sample_nonpositive(R: CurvatureTensor, samples: int = 64, seed=0) -> bool:
    """Spot check that the complexified sectional curvature is <= 0."""
    rng = np.random.default_rng(seed)
    m = R.m
    scale = 1e-10 * (1.0 + np.max(np.abs(R.R), initial=0.0))
    for _ in range(samples):
        Z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        W = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        if complexified_sectional(R, Z, W) > scale * np.vdot(Z, Z).real * np.vdot(W, W).real:
            return False
    return True


def complex_structure(n: int) -> np.ndarray:
    """J on R^{2n} in (x, y) block form; ``J @ J == -I``."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = -np.eye(n)
    J[n:, :n] = np.eye(n)
    return J


def realify(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.concatenate([v.real, v.imag])


@dataclass(frozen=True, eq=False)
class DifferentialData:
    """A real linear map du: R^{2n} -> R^m at a point."""

    du: np.ndarray

    def __post_init__(self):
        du = np.array(self.du, dtype=float)
        if du.ndim != 2 or du.shape[1] % 2:
            raise ValueError(f"du must be an m x 2n matrix, got shape {du.shape}")
        du.setflags(write=False)
        object.__setattr__(self, "du", du)

    @property
    def n(self) -> int:
        return self.du.shape[1] // 2

    @property
    def m(self) -> int:
        return self.du.shape[0]

    @property
    def J(self) -> np.ndarray:
        return complex_structure(self.n)

    def complexify(self, v) -> np.ndarray:
        """``du(X) - i du(JX)`` for the real vector X underlying the complex vector v."""
        X = realify(v)
        return self.du @ X - 1j * (self.du @ (self.J @ X))


def joint_kernel(alphas) -> np.ndarray:
    """Orthonormal basis (columns) of the complex vectors annihilated by every covector."""
    alphas = np.asarray(alphas, dtype=complex)
    n = alphas.shape[1]
    if alphas.shape[0] == 0:
        return np.eye(n, dtype=complex)
    return scipy.linalg.null_space(alphas)


def plane_weight(n: int, alphas, plane: np.ndarray, omega0: Form, vol: complex | None = None) -> float:
    """Weight of one decomposition term against the unit (2,2)-volume of its kernel plane.

    The unit volume is ``(i b1 ^ conj b1) ^ (i b2 ^ conj b2) / 4`` with b_k the
    covectors dual to the unitary basis of the plane, so that it evaluates to
    one on ``(X, JX, Y, JY)``.
    """
    sigma = wedge(simple_positive(plane[:, 0].conj()), simple_positive(plane[:, 1].conj())) / 4.0
    return float(top_ratio(wedge(term_form(n, alphas), sigma), omega0, vol).real)


@dataclass(frozen=True)
class TermContribution:
    index: int
    weight: float
    sectional: float

    @property
    def value(self) -> float:
        return self.weight * self.sectional


def siu_sampson_terms(
    d: DifferentialData, R: CurvatureTensor, decomposition: StrongPositivityDecomposition, omega0: Form
) -> list[TermContribution]:
    n = d.n
    if decomposition.n != n or omega0.n != n:
        raise ValueError("differential, decomposition and omega0 must share the complex dimension")
    if R.m != d.m:
        raise ValueError(f"du maps into R^{d.m} but the curvature tensor lives on R^{R.m}")
    vol = volume_coefficient(omega0)
    out = []
    for i, (mu, alphas) in enumerate(decomposition.terms):
        plane = joint_kernel(alphas)
        if plane.shape[1] != 2:
            raise CurvatureError(f"term {i}: joint kernel has complex dimension {plane.shape[1]}, expected 2")
        Z = d.complexify(plane[:, 0])
        W = d.complexify(plane[:, 1])
        weight = mu * plane_weight(n, alphas, plane, omega0, vol)
        out.append(TermContribution(i, weight, complexified_sectional(R, Z, W)))
    return out


def siu_sampson_density(
    d: DifferentialData,
    R: CurvatureTensor,
    decomposition: StrongPositivityDecomposition,
    omega0: Form,
    check_curvature: bool = True,
) -> float:
    """``sum_i mu_i' R(Z_i, W_i, conj W_i, conj Z_i)`` over the decomposition terms."""
    if check_curvature and not sample_nonpositive(R):
        warnings.warn("curvature tensor has positive complexified sectional curvature somewhere", stacklevel=2)
    return float(sum(t.value for t in siu_sampson_terms(d, R, decomposition, omega0)))


def random_differential(n: int, m: int, seed) -> DifferentialData:
    rng = np.random.default_rng(seed)
    return DifferentialData(rng.standard_normal((m, 2 * n)))
