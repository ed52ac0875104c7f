"""Constant (p,q)-forms on C^n.

A form is stored as a complex coefficient vector over the monomials
``dz^I ^ dzbar^J`` with ``|I| = p`` and ``|J| = q``, ordered
lexicographically with ``I`` major.  Every monomial is kept in normal form:
all holomorphic factors first, each group in increasing index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

MultiIndex = tuple[int, ...]


class FormError(ValueError):
    """Raised for bidegree, dimension or shape mismatches."""


class DegenerateFormError(ValueError):
    """Raised when a reference (1,1)-form has vanishing top power."""


@lru_cache(maxsize=None)
def _multi_indices(n: int, k: int) -> tuple[MultiIndex, ...]:
    return tuple(combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def _position(n: int, k: int) -> dict[MultiIndex, int]:
    return {idx: pos for pos, idx in enumerate(_multi_indices(n, k))}


def _check_degrees(n: int, p: int, q: int) -> None:
    if n < 1:
        raise FormError(f"dimension must be positive, got n={n}")
    if not (0 <= p <= n and 0 <= q <= n):
        raise FormError(f"bidegree ({p},{q}) out of range for n={n}")


def dimension(n: int, p: int, q: int) -> int:
    """Number of basis monomials of bidegree (p, q) on C^n."""
    _check_degrees(n, p, q)
    return math.comb(n, p) * math.comb(n, q)


def basis(n: int, p: int, q: int) -> list[tuple[MultiIndex, MultiIndex]]:
    """Canonical ordered list of (I, J) pairs spanning the (p, q)-forms."""
    _check_degrees(n, p, q)
    return [(I, J) for I in _multi_indices(n, p) for J in _multi_indices(n, q)]


def basis_position(n: int, I: MultiIndex, J: MultiIndex) -> int:
    """Position of ``dz^I ^ dzbar^J`` in the canonical basis."""
    pos_i = _position(n, len(I))
    pos_j = _position(n, len(J))
    try:
        return pos_i[tuple(I)] * len(pos_j) + pos_j[tuple(J)]
    except KeyError:
        raise FormError(f"invalid multi-index pair {I}|{J} for n={n}") from None


def index_label(I: MultiIndex, J: MultiIndex) -> str:
    """Readable label such as ``"12|3"`` (the form dz1^dz2^dzbar3)."""
    return "".join(map(str, I)) + "|" + "".join(map(str, J))


def _merge_sign(A: MultiIndex, B: MultiIndex) -> int:
    """Sign of the permutation sorting the concatenation A + B (0 if they overlap)."""
    inversions = 0
    for a in A:
        for b in B:
            if a == b:
                return 0
            if a > b:
                inversions += 1
    return -1 if inversions % 2 else 1


@dataclass(frozen=True, eq=False)
class Form:
    """A constant (p,q)-form on C^n."""

    n: int
    p: int
    q: int
    coeffs: np.ndarray

    def __post_init__(self):
        _check_degrees(self.n, self.p, self.q)
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        expected = dimension(self.n, self.p, self.q)
        if c.shape != (expected,):
            raise FormError(
                f"({self.p},{self.q})-form on C^{self.n} needs {expected} coefficients, got {c.size}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # constructors

    @classmethod
    def zero(cls, n: int, p: int, q: int) -> "Form":
        return cls(n, p, q, np.zeros(dimension(n, p, q), dtype=complex))

    @classmethod
    def scalar(cls, n: int, value: complex = 1.0) -> "Form":
        return cls(n, 0, 0, np.array([value], dtype=complex))

    @classmethod
    def monomial(cls, n: int, I, J, value: complex = 1.0) -> "Form":
        """``value * dz^I ^ dzbar^J``; the index tuples may be unsorted (the sign is applied)."""
        I, J = tuple(I), tuple(J)
        sign = _sort_sign(I) * _sort_sign(J)
        c = np.zeros(dimension(n, len(I), len(J)), dtype=complex)
        if sign:
            c[basis_position(n, tuple(sorted(I)), tuple(sorted(J)))] = sign * value
        return cls(n, len(I), len(J), c)

    @classmethod
    def dz(cls, n: int, j: int) -> "Form":
        return cls.monomial(n, (j,), ())

    @classmethod
    def dzbar(cls, n: int, j: int) -> "Form":
        return cls.monomial(n, (), (j,))

    @classmethod
    def from_covector(cls, covector) -> "Form":
        """The (1,0)-form ``sum_j a_j dz^j``."""
        a = np.asarray(covector, dtype=complex).reshape(-1)
        return cls(a.size, 1, 0, a)

    # algebra

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.p, self.q)

    @property
    def degree(self) -> int:
        return self.p + self.q

    def _same_space(self, other: "Form") -> None:
        if not isinstance(other, Form):
            raise TypeError(f"expected Form, got {type(other).__name__}")
        if (self.n, self.p, self.q) != (other.n, other.p, other.q):
            raise FormError(
                f"cannot combine ({self.p},{self.q}) on C^{self.n} with ({other.p},{other.q}) on C^{other.n}"
            )

    def __add__(self, other: "Form") -> "Form":
        self._same_space(other)
        return Form(self.n, self.p, self.q, self.coeffs + other.coeffs)

    def __sub__(self, other: "Form") -> "Form":
        self._same_space(other)
        return Form(self.n, self.p, self.q, self.coeffs - other.coeffs)

    def __neg__(self) -> "Form":
        return Form(self.n, self.p, self.q, -self.coeffs)

    def __mul__(self, scalar) -> "Form":
        if isinstance(scalar, Form):
            return NotImplemented
        return Form(self.n, self.p, self.q, self.coeffs * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Form":
        return Form(self.n, self.p, self.q, self.coeffs / complex(scalar))

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __repr__(self) -> str:
        terms = [
            f"({c.real:.6g}{c.imag:+.6g}j){index_label(I, J)}"
            for (I, J), c in zip(basis(self.n, self.p, self.q), self.coeffs)
            if c != 0
        ]
        body = " + ".join(terms[:6]) + (" + ..." if len(terms) > 6 else "")
        return f"Form(n={self.n}, ({self.p},{self.q}): {body or '0'})"

    def coefficient(self, I, J) -> complex:
        return complex(self.coeffs[basis_position(self.n, tuple(I), tuple(J))])

    def norm(self) -> float:
        """Max-norm of the coefficient vector."""
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def allclose(self, other: "Form", rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        self._same_space(other)
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol))

    def is_real(self, tol: float = 1e-12) -> bool:
        if self.p != self.q:
            return not np.any(self.coeffs)
        return bool(np.max(np.abs(conjugate(self).coeffs - self.coeffs), initial=0.0) <= tol * (1.0 + self.norm()))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "q": self.q,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Form":
        coeffs = [complex(re, im) for re, im in data["coeffs"]]
        return cls(int(data["n"]), int(data["p"]), int(data["q"]), np.array(coeffs, dtype=complex))


def _sort_sign(idx: MultiIndex) -> int:
    if len(set(idx)) != len(idx):
        return 0
    inversions = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=None)
def _wedge_table(n: int, pa: int, qa: int, pb: int, qb: int):
    """Sparse structure constants of the product (pa,qa) x (pb,qb) -> (pa+pb, qa+qb).

    Returns index arrays ``(ia, ib, iout)`` and a sign array such that
    ``(a ^ b)[iout] += sign * a[ia] * b[ib]``.
    """
    ia, ib, iout, sign = [], [], [], []
    # moving dz^{I_b} across dzbar^{J_a}
    cross = -1 if (qa * pb) % 2 else 1
    for s, (I1, J1) in enumerate(basis(n, pa, qa)):
        for t, (I2, J2) in enumerate(basis(n, pb, qb)):
            sI = _merge_sign(I1, I2)
            if not sI:
                continue
            sJ = _merge_sign(J1, J2)
            if not sJ:
                continue
            ia.append(s)
            ib.append(t)
            iout.append(basis_position(n, tuple(sorted(I1 + I2)), tuple(sorted(J1 + J2))))
            sign.append(cross * sI * sJ)
    arrays = (
        np.array(ia, dtype=np.intp),
        np.array(ib, dtype=np.intp),
        np.array(iout, dtype=np.intp),
        np.array(sign, dtype=float),
    )
    for arr in arrays:
        arr.setflags(write=False)
    return arrays


def _overflows(n: int, p: int, q: int) -> bool:
    return p > n or q > n


def wedge(a: Form, b: Form) -> Form:
    """Exterior product ``a ^ b``.

    Products whose bidegree exceeds (n, n) in either slot are returned as the
    zero form of the clamped bidegree.
    """
    if a.n != b.n:
        raise FormError(f"dimension mismatch: C^{a.n} vs C^{b.n}")
    n = a.n
    p, q = a.p + b.p, a.q + b.q
    if _overflows(n, p, q):
        return Form.zero(n, min(p, n), min(q, n))
    ia, ib, iout, sign = _wedge_table(n, a.p, a.q, b.p, b.q)
    vals = sign * a.coeffs[ia] * b.coeffs[ib]
    size = dimension(n, p, q)
    out = np.bincount(iout, weights=vals.real, minlength=size) + 1j * np.bincount(
        iout, weights=vals.imag, minlength=size
    )
    return Form(n, p, q, out)


def wedge_all(forms, n: int | None = None) -> Form:
    """Wedge product of a sequence of forms (the scalar 1 for an empty sequence)."""
    forms = list(forms)
    if not forms:
        if n is None:
            raise FormError("empty product needs the ambient dimension")
        return Form.scalar(n)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def wedge_operator(b: Form, p: int, q: int) -> np.ndarray:
    """Matrix of ``alpha -> alpha ^ b`` on (p,q)-forms, acting on coefficient vectors."""
    n = b.n
    P, Q = p + b.p, q + b.q
    rows = dimension(n, min(P, n), min(Q, n))
    op = np.zeros((rows, dimension(n, p, q)), dtype=complex)
    if _overflows(n, P, Q):
        return op
    ia, ib, iout, sign = _wedge_table(n, p, q, b.p, b.q)
    np.add.at(op, (iout, ia), sign * b.coeffs[ib])
    return op


@lru_cache(maxsize=None)
def _conjugation_permutation(n: int, p: int, q: int) -> np.ndarray:
    perm = np.array([basis_position(n, J, I) for I, J in basis(n, p, q)], dtype=np.intp)
    perm.setflags(write=False)
    return perm


def conjugate(a: Form) -> Form:
    """Complex conjugate; maps bidegree (p,q) to (q,p)."""
    out = np.zeros(dimension(a.n, a.q, a.p), dtype=complex)
    sign = -1.0 if (a.p * a.q) % 2 else 1.0
    out[_conjugation_permutation(a.n, a.p, a.q)] = sign * np.conj(a.coeffs)
    return Form(a.n, a.q, a.p, out)


def conjugation_matrix(n: int, p: int, q: int) -> np.ndarray:
    """Real signed permutation C with ``conjugate(a).coeffs == C @ conj(a.coeffs)``."""
    C = np.zeros((dimension(n, q, p), dimension(n, p, q)))
    sign = -1.0 if (p * q) % 2 else 1.0
    C[_conjugation_permutation(n, p, q), np.arange(C.shape[1])] = sign
    return C


def power(a: Form, k: int) -> Form:
    """``a ^ a ^ ... ^ a`` (k factors); ``power(a, 0)`` is the scalar 1."""
    if k < 0:
        raise FormError(f"negative exponent {k}")
    out = Form.scalar(a.n)
    for _ in range(k):
        out = wedge(out, a)
    return out


def volume_coefficient(omega0: Form) -> complex:
    """Top coefficient of ``omega0^n / n!`` in the normal-form basis."""
    if omega0.bidegree != (1, 1):
        raise FormError(f"reference form must be (1,1), got {omega0.bidegree}")
    vol = power(omega0, omega0.n).coeffs[0] / math.factorial(omega0.n)
    scale = max(omega0.norm(), 1e-300) ** omega0.n
    if abs(vol) <= 1e-14 * scale:
        raise DegenerateFormError("reference (1,1)-form is degenerate (vanishing top power)")
    return complex(vol)


def top_ratio(eta: Form, omega0: Form, vol: complex | None = None) -> complex:
    """The scalar c with ``eta = c * omega0^n / n!`` for a top-degree form eta.

    ``vol`` may carry a precomputed ``volume_coefficient(omega0)``.
    """
    if eta.bidegree != (eta.n, eta.n):
        raise FormError(f"top_ratio needs an (n,n)-form, got {eta.bidegree} on C^{eta.n}")
    if eta.n != omega0.n:
        raise FormError("dimension mismatch")
    if vol is None:
        vol = volume_coefficient(omega0)
    return complex(eta.coeffs[0] / vol)


def brute_wedge(a: Form, b: Form) -> Form:
    """Reference exterior product by explicit sorting of one-form factors.

    Each pair of monomials is written as a word of ``dz``/``dzbar`` letters,
    sorted into normal form by bubble sort, and the number of swaps gives the
    sign.  Slow; intended as a test oracle for :func:`wedge`.
    """
    if a.n != b.n:
        raise FormError(f"dimension mismatch: C^{a.n} vs C^{b.n}")
    n = a.n
    p, q = a.p + b.p, a.q + b.q
    if _overflows(n, p, q):
        return Form.zero(n, min(p, n), min(q, n))
    out = np.zeros(dimension(n, p, q), dtype=complex)
    for (I1, J1), ca in zip(basis(n, a.p, a.q), a.coeffs):
        if ca == 0:
            continue
        for (I2, J2), cb in zip(basis(n, b.p, b.q), b.coeffs):
            if cb == 0:
                continue
            word = [(0, i) for i in I1] + [(1, j) for j in J1] + [(0, i) for i in I2] + [(1, j) for j in J2]
            if len(set(word)) != len(word):
                continue
            swaps = 0
            for end in range(len(word) - 1, 0, -1):
                for k in range(end):
                    if word[k] > word[k + 1]:
                        word[k], word[k + 1] = word[k + 1], word[k]
                        swaps += 1
            I = tuple(i for kind, i in word if kind == 0)
            J = tuple(j for kind, j in word if kind == 1)
            out[basis_position(n, I, J)] += (-1) ** swaps * ca * cb
    return Form(n, p, q, out)
