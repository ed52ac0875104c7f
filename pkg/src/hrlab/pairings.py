"""Matrix-valued forms and the pointwise sign identities built on them.

An :class:`EndValuedForm` is an r x r matrix of (p,q)-forms.  Products use
matrix multiplication with the exterior product of entries, and the graded
commutator ``[A, B] = A ^ B - (-1)^{|A||B|} B ^ A``, so for two odd forms
``[A, B] = A ^ B + B ^ A`` and ``[theta, theta] = 2 theta ^ theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exterior import (
    Form,
    FormError,
    _conjugation_permutation,
    _overflows,
    _wedge_table,
    dimension,
    top_ratio,
    volume_coefficient,
    wedge,
)
from .hodge_riemann import certify, primitivity_functional, q_constant, q_matrix


class SignViolation(ValueError):
    """Raised when an input breaks the hypothesis a sign check relies on."""


@dataclass(frozen=True, eq=False)
class EndValuedForm:
    """r x r matrix of (p,q)-forms on C^n; ``coeffs`` has shape (r, r, dim)."""

    n: int
    p: int
    q: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        dim = dimension(self.n, self.p, self.q)
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[2] != dim:
            raise FormError(f"expected shape (r, r, {dim}), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def r(self) -> int:
        return self.coeffs.shape[0]

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.p, self.q)

    @property
    def degree(self) -> int:
        return self.p + self.q

    @classmethod
    def zero(cls, r: int, n: int, p: int, q: int) -> "EndValuedForm":
        return cls(n, p, q, np.zeros((r, r, dimension(n, p, q)), dtype=complex))

    @classmethod
    def from_matrix(cls, N, form: Form) -> "EndValuedForm":
        """``N * form`` for a constant r x r matrix N."""
        N = np.asarray(N, dtype=complex)
        return cls(form.n, form.p, form.q, N[:, :, None] * form.coeffs[None, None, :])

    @classmethod
    def from_entries(cls, entries) -> "EndValuedForm":
        entries = [list(row) for row in entries]
        f = entries[0][0]
        return cls(f.n, f.p, f.q, np.array([[e.coeffs for e in row] for row in entries]))

    @classmethod
    def identity(cls, r: int, form: Form) -> "EndValuedForm":
        return cls.from_matrix(np.eye(r), form)

    def entry(self, j: int, k: int) -> Form:
        return Form(self.n, self.p, self.q, self.coeffs[j, k])

    def _same_space(self, other: "EndValuedForm") -> None:
        if (self.n, self.p, self.q, self.r) != (other.n, other.p, other.q, other.r):
            raise FormError("matrix-valued forms live in different spaces")

    def __add__(self, other: "EndValuedForm") -> "EndValuedForm":
        self._same_space(other)
        return EndValuedForm(self.n, self.p, self.q, self.coeffs + other.coeffs)

    def __sub__(self, other: "EndValuedForm") -> "EndValuedForm":
        self._same_space(other)
        return EndValuedForm(self.n, self.p, self.q, self.coeffs - other.coeffs)

    def __neg__(self) -> "EndValuedForm":
        return EndValuedForm(self.n, self.p, self.q, -self.coeffs)

    def __mul__(self, scalar) -> "EndValuedForm":
        if isinstance(scalar, EndValuedForm):
            return NotImplemented
        return EndValuedForm(self.n, self.p, self.q, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.max(np.abs(self.coeffs), initial=0.0))

    def is_i_hermitian(self, tol: float = 1e-12) -> bool:
        """True when ``i F`` is self-adjoint, i.e. ``F* = -F``."""
        return bool(np.max(np.abs((hermitian_adjoint(self) + self).coeffs), initial=0.0) <= tol * (1.0 + self.norm()))

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "form": {"n": self.n, "p": self.p, "q": self.q},
            "entries": [
                [[[float(z.real), float(z.imag)] for z in self.coeffs[j, k]] for k in range(self.r)]
                for j in range(self.r)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EndValuedForm":
        meta = data["form"]
        entries = np.array(
            [[[complex(re, im) for re, im in cell] for cell in row] for row in data["entries"]], dtype=complex
        )
        out = cls(int(meta["n"]), int(meta["p"]), int(meta["q"]), entries)
        if out.r != int(data["r"]):
            raise FormError(f"declared rank {data['r']} but entries are {out.r} x {out.r}")
        return out


def mv_wedge(A: EndValuedForm, B: EndValuedForm) -> EndValuedForm:
    """``(A ^ B)_ik = sum_j A_ij ^ B_jk``."""
    if A.n != B.n or A.r != B.r:
        raise FormError(f"cannot multiply rank {A.r} on C^{A.n} with rank {B.r} on C^{B.n}")
    n, r = A.n, A.r
    p, q = A.p + B.p, A.q + B.q
    if _overflows(n, p, q):
        return EndValuedForm.zero(r, n, min(p, n), min(q, n))
    ia, ib, iout, sign = _wedge_table(n, A.p, A.q, B.p, B.q)
    terms = np.einsum("ijz,jkz->ikz", A.coeffs[:, :, ia], B.coeffs[:, :, ib]) * sign
    out = np.zeros((r, r, dimension(n, p, q)), dtype=complex)
    np.add.at(out, (slice(None), slice(None), iout), terms)
    return EndValuedForm(n, p, q, out)


def mv_trace(A: EndValuedForm) -> Form:
    return Form(A.n, A.p, A.q, np.trace(A.coeffs, axis1=0, axis2=1))


def hermitian_adjoint(psi: EndValuedForm) -> EndValuedForm:
    """``(psi*)_kj = conj(psi_jk)``: bundle transpose combined with form conjugation."""
    perm = _conjugation_permutation(psi.n, psi.p, psi.q)
    sign = -1.0 if (psi.p * psi.q) % 2 else 1.0
    out = np.zeros((psi.r, psi.r, dimension(psi.n, psi.q, psi.p)), dtype=complex)
    out[:, :, perm] = sign * np.conj(np.swapaxes(psi.coeffs, 0, 1))
    return EndValuedForm(psi.n, psi.q, psi.p, out)


def graded_commutator(A: EndValuedForm, B: EndValuedForm) -> EndValuedForm:
    sign = -1 if (A.degree * B.degree) % 2 == 0 else 1
    return mv_wedge(A, B) + sign * mv_wedge(B, A)


def _entry_functional(F: EndValuedForm, omega0: Form, Omega0: Form) -> np.ndarray:
    """Matrix of ``top_ratio(F_jk ^ omega0 ^ Omega0)``."""
    f = primitivity_functional(F.p, F.q, omega0, Omega0)
    return F.coeffs @ f


def check_primitive_mv(F: EndValuedForm, omega0: Form, Omega0: Form) -> float:
    return float(np.max(np.abs(_entry_functional(F, omega0, Omega0)), initial=0.0))


def primitive_project_mv(F: EndValuedForm, omega0: Form, Omega0: Form) -> EndValuedForm:
    """Remove the omega0-component of every entry along the primitivity functional."""
    if F.bidegree != (1, 1):
        raise FormError(f"expected (1,1) entries, got {F.bidegree}")
    f = primitivity_functional(1, 1, omega0, Omega0)
    denom = complex(f @ omega0.coeffs)
    if abs(denom) <= 1e-12 * (1.0 + np.max(np.abs(f))) * (1.0 + omega0.norm()):
        raise SignViolation("omega0 ^ omega0 ^ Omega0 vanishes; no primitive projection")
    components = (F.coeffs @ f) / denom
    return EndValuedForm(F.n, 1, 1, F.coeffs - components[:, :, None] * omega0.coeffs[None, None, :])


def he_matrix(F: EndValuedForm, omega0: Form, Omega0: Form) -> np.ndarray:
    """The r x r matrix ``top_ratio(i F ^ omega0 ^ Omega0)``."""
    return 1j * _entry_functional(F, omega0, Omega0)


def he_residual(F: EndValuedForm, omega0: Form, Omega0: Form, lam: float) -> float:
    """Max-norm of ``i F ^ omega0 ^ Omega0 - lam Id omega0^2 ^ Omega0`` in units of the volume form."""
    vol = volume_coefficient(omega0)
    s = top_ratio(wedge(wedge(omega0, omega0), Omega0), omega0, vol)
    T = he_matrix(F, omega0, Omega0)
    return float(np.max(np.abs(T - lam * s * np.eye(F.r)), initial=0.0))


def traceless_part(F: EndValuedForm) -> EndValuedForm:
    tr = np.trace(F.coeffs, axis1=0, axis2=1)
    return F - EndValuedForm.from_matrix(np.eye(F.r), Form(F.n, F.p, F.q, tr / F.r))


def bmy_density(F: EndValuedForm, omega0: Form, Omega0: Form, check_primitive: bool = True, tol: float = 1e-10) -> float:
    """Pointwise density ``(r / 4 pi^2) tr(F0 ^ F0) ^ Omega0 / dVol`` with F0 the traceless part."""
    if F.bidegree != (1, 1):
        raise FormError(f"curvature must be (1,1), got {F.bidegree}")
    if not F.is_i_hermitian():
        raise SignViolation("i F is not hermitian")
    F0 = traceless_part(F)
    if check_primitive:
        residual = check_primitive_mv(F0, omega0, Omega0)
        if residual > tol * (1.0 + F0.norm()) * (1.0 + omega0.norm()) * (1.0 + Omega0.norm()):
            raise SignViolation(f"traceless curvature is not primitive (residual {residual:.3e})")
    value = top_ratio(wedge(mv_trace(mv_wedge(F0, F0)), Omega0), omega0)
    return float(F.r / (4 * math.pi**2) * value.real)


@dataclass(frozen=True)
class PairingResult:
    raw: float
    q_energy: float


def pairing_sq(psi: EndValuedForm, omega0: Form, Omega0: Form, check: bool = True, tol: float = 1e-10) -> PairingResult:
    """``tr(psi ^ psi*) ^ Omega0 / dVol`` together with ``sum_jk Q(psi_jk, psi_jk)``."""
    if psi.degree != 2:
        raise FormError(f"pairing needs a 2-form, got {psi.bidegree}")
    p, q = psi.bidegree
    if check:
        report = certify(omega0, Omega0, p, q)
        if not report.certified:
            raise SignViolation(f"Omega0 is not certified Hodge-Riemann for ({p},{q}): {report.verdict.value}")
        if (p, q) == (1, 1):
            residual = check_primitive_mv(psi, omega0, Omega0)
            if residual > tol * (1.0 + psi.norm()) * (1.0 + omega0.norm()) * (1.0 + Omega0.norm()):
                raise SignViolation(f"entries are not primitive (residual {residual:.3e})")
    raw = top_ratio(wedge(mv_trace(mv_wedge(psi, hermitian_adjoint(psi))), Omega0), omega0)
    energy = q_constant(p, q) * raw
    return PairingResult(float(raw.real), float(energy.real))


def jacobi_sides(theta: EndValuedForm) -> tuple[Form, Form]:
    """``tr([[theta, theta*], theta] ^ theta*)`` and ``1/2 tr([theta, theta] ^ [theta, theta]*)``."""
    if theta.bidegree != (1, 0):
        raise FormError(f"theta must be a (1,0)-form, got {theta.bidegree}")
    star = hermitian_adjoint(theta)
    lhs = mv_trace(mv_wedge(graded_commutator(graded_commutator(theta, star), theta), star))
    tt = graded_commutator(theta, theta)
    rhs = 0.5 * mv_trace(mv_wedge(tt, hermitian_adjoint(tt)))
    return lhs, rhs


def jacobi_identity_check(theta: EndValuedForm) -> float:
    lhs, rhs = jacobi_sides(theta)
    return float(np.max(np.abs(lhs.coeffs - rhs.coeffs), initial=0.0))


@dataclass(frozen=True, eq=False)
class FlatnessParts:
    c20: EndValuedForm
    c11: EndValuedForm
    c02: EndValuedForm

    def is_flat(self, tol: float = 1e-12) -> bool:
        return max(self.c20.norm(), self.c11.norm(), self.c02.norm()) <= tol


def flatness_decompose(theta: EndValuedForm) -> FlatnessParts:
    """Split ``(theta + theta*)^2`` into its (2,0), (1,1) and (0,2) parts."""
    if theta.bidegree != (1, 0):
        raise FormError(f"theta must be a (1,0)-form, got {theta.bidegree}")
    star = hermitian_adjoint(theta)
    return FlatnessParts(
        0.5 * graded_commutator(theta, theta),
        graded_commutator(theta, star),
        0.5 * graded_commutator(star, star),
    )


def random_theta(r: int, n: int, seed) -> EndValuedForm:
    rng = np.random.default_rng(seed)
    return EndValuedForm(n, 1, 0, rng.standard_normal((r, r, n)) + 1j * rng.standard_normal((r, r, n)))


def random_curvature(r: int, n: int, seed) -> EndValuedForm:
    """Random i-hermitian End-valued (1,1)-form (not yet traceless or primitive)."""
    rng = np.random.default_rng(seed)
    dim = n * n
    G = rng.standard_normal((r, r, dim)) + 1j * rng.standard_normal((r, r, dim))
    G = EndValuedForm(n, 1, 1, G)
    # F* = -F
    return 0.5 * (G - hermitian_adjoint(G))


def bmy_scale(F: EndValuedForm, omega0: Form, Omega0: Form) -> float:
    """Upper bound for ``|bmy_density|`` from the spectral radius of Q on (1,1)-forms."""
    F0 = traceless_part(F)
    rho = q_matrix(1, 1, omega0, Omega0).spectral_radius()
    return float(F.r / (4 * math.pi**2) * rho * np.sum(np.abs(F0.coeffs) ** 2))


def jacobi_scale(theta: EndValuedForm) -> float:
    return max(1.0, float(np.sum(np.abs(theta.coeffs) ** 2)) ** 2)
