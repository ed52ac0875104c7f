"""Hermitian form Q, primitive subspaces and Hodge-Riemann certification."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .exterior import (
    DegenerateFormError,
    _wedge_table,
    Form,
    FormError,
    basis,
    conjugation_matrix,
    dimension,
    index_label,
    power,
    volume_coefficient,
    wedge,
    wedge_all,
    wedge_operator,
)
from .positivity import NotPositiveError, form_from_matrix, is_positive_form, michelsohn_root

DEFAULT_REL_TOL = 1e-9
DEFAULT_GRID = tuple(np.logspace(-3, 3, 61))
SUPPORTED_DEGREES = ((2, 0), (1, 1), (0, 2))


def q_constant(p: int, q: int) -> complex:
    """``i^{p-q} (-1)^{(p+q)(p+q-1)/2}``."""
    k = p + q
    return (1j) ** ((p - q) % 4) * (-1) ** (k * (k - 1) // 2)


def _check_reference(omega0: Form) -> None:
    if omega0.bidegree != (1, 1):
        raise FormError(f"omega0 must be a (1,1)-form, got {omega0.bidegree}")
    if not omega0.is_real():
        raise FormError("omega0 is not real")


def _check_complement(p: int, q: int, omega0: Form, Omega0: Form) -> None:
    n = omega0.n
    k = n - p - q
    if Omega0.n != n or Omega0.bidegree != (k, k):
        raise FormError(f"Omega0 must be an ({k},{k})-form on C^{n}, got {Omega0.bidegree} on C^{Omega0.n}")


@dataclass(frozen=True, eq=False)
class QMatrix:
    """Gram matrix ``M[s, t] = Q(e_s, e_t)`` over the canonical basis.

    ``Q(alpha, beta) = alpha.coeffs @ M @ conj(beta.coeffs)``.
    """

    p: int
    q: int
    M: np.ndarray
    omega0: Form
    Omega0: Form

    def value(self, alpha: Form, beta: Form | None = None) -> complex:
        beta = alpha if beta is None else beta
        return complex(alpha.coeffs @ self.M @ np.conj(beta.coeffs))

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.M)), initial=0.0))


def q_matrix(p: int, q: int, omega0: Form, Omega0: Form) -> QMatrix:
    _check_reference(omega0)
    _check_complement(p, q, omega0, Omega0)
    n = omega0.n
    vol = volume_coefficient(omega0)
    # alpha ^ conj(beta) ^ Omega0, read off in three linear steps
    to_complement = wedge_operator(Omega0, q, p)  # Lambda^{q,p} -> Lambda^{n-p,n-q}
    conj = conjugation_matrix(n, p, q)  # Lambda^{p,q} -> Lambda^{q,p}
    pairing = _top_pairing(n, p, q)  # Lambda^{p,q} x Lambda^{n-p,n-q} -> C
    M = q_constant(p, q) / vol * (pairing @ to_complement @ conj)
    return QMatrix(p, q, M, omega0, Omega0)


@lru_cache(maxsize=None)
def _top_pairing(n: int, p: int, q: int) -> np.ndarray:
    """P[s, u] = top coefficient of ``e_s ^ f_u`` for f_u in the complementary basis."""
    P = np.zeros((dimension(n, p, q), dimension(n, n - p, n - q)))
    ia, ib, _, sign = _wedge_table(n, p, q, n - p, n - q)
    P[ia, ib] = sign
    P.setflags(write=False)
    return P


def primitivity_functional(p: int, q: int, omega0: Form, Omega0: Form, vol: complex | None = None) -> np.ndarray:
    """Row vector of ``alpha -> top_ratio(alpha ^ omega0 ^ Omega0)``."""
    _check_reference(omega0)
    _check_complement(p, q, omega0, Omega0)
    if vol is None:
        vol = volume_coefficient(omega0)
    return wedge_operator(wedge(omega0, Omega0), p, q)[0] / vol


@dataclass(frozen=True, eq=False)
class PrimitiveSpace:
    """Orthonormal (coefficient-wise) basis of the primitive (p,q)-forms."""

    p: int
    q: int
    n: int
    matrix: np.ndarray  # columns are coefficient vectors
    codim: int

    @property
    def basis(self) -> list[Form]:
        return [Form(self.n, self.p, self.q, col) for col in self.matrix.T]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def primitive_space(p: int, q: int, omega0: Form, Omega0: Form) -> PrimitiveSpace:
    if p + q != 2:
        raise FormError(f"only degrees with p+q=2 are supported, got ({p},{q})")
    n = omega0.n
    f = primitivity_functional(p, q, omega0, Omega0)
    size = dimension(n, p, q)
    scale = float(np.max(np.abs(f), initial=0.0))
    if scale <= 1e-14 * (1.0 + omega0.norm() * Omega0.norm()):
        return PrimitiveSpace(p, q, n, np.eye(size, dtype=complex), 0)
    K = scipy.linalg.null_space(f.reshape(1, -1))
    return PrimitiveSpace(p, q, n, K, size - K.shape[1])


class Verdict(str, enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    DEGENERATE = "degenerate"


@dataclass(eq=False)
class HRReport:
    degree: tuple[int, int]
    decomposition_ok: bool
    spectrum: list[float]
    min_eigenvalue: float
    verdict: Verdict
    tol: float
    witness: Form | None = None
    reason: str | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def to_json(self) -> dict:
        out = {
            "degree": list(self.degree),
            "decomposition_ok": self.decomposition_ok,
            "spectrum": [float(x) for x in self.spectrum],
            "min_eigenvalue": float(self.min_eigenvalue),
            "verdict": self.verdict.value,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "tol": float(self.tol),
        }
        if self.reason:
            out["reason"] = self.reason
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def certify(omega0: Form, Omega0: Form, p: int, q: int, tol: float | None = None) -> HRReport:
    """Decide whether Omega0 is a Hodge-Riemann form for degree (p,q) w.r.t. omega0.

    ``tol`` defaults to ``1e-9`` times the spectral radius of the full Q matrix.
    """
    if p + q != 2 or p < 0 or q < 0:
        raise FormError(f"only degrees with p+q=2 are supported, got ({p},{q})")
    if not Omega0.is_real():
        raise FormError("Omega0 is not real")
    Q = q_matrix(p, q, omega0, Omega0)
    if tol is None:
        tol = DEFAULT_REL_TOL * Q.spectral_radius()
    P = primitive_space(p, q, omega0, Omega0)

    if (p, q) == (1, 1):
        f = primitivity_functional(1, 1, omega0, Omega0)
        transversal = abs(complex(f @ omega0.coeffs))
        decomposition_ok = transversal > tol
    else:
        decomposition_ok = True

    # Q(K x, K y) = x^T H conj(y)
    H = P.matrix.T @ Q.M @ P.matrix.conj()
    H = 0.5 * (H + H.conj().T)
    evals, evecs = np.linalg.eigh(H)
    spectrum = [float(x) for x in evals]
    min_eig = spectrum[0] if spectrum else float("inf")

    witness = None
    reason = None
    if not decomposition_ok:
        verdict = Verdict.DEGENERATE
        reason = "omega0 lies in the primitive hyperplane; C*omega0 + P is not direct"
    elif min_eig > tol:
        verdict = Verdict.CERTIFIED
    elif min_eig < -tol:
        verdict = Verdict.REFUTED
        witness = Form(omega0.n, p, q, P.matrix @ np.conj(evecs[:, 0]))
    else:
        verdict = Verdict.DEGENERATE
        reason = "Q restricted to the primitive space is only semidefinite within tolerance"
    return HRReport((p, q), bool(decomposition_ok), spectrum, float(min_eig), verdict, float(tol), witness, reason)


def certify_classical(omega0: Form, p: int, q: int, tol: float | None = None) -> HRReport:
    return certify(omega0, power(omega0, omega0.n - p - q), p, q, tol)


def certify_timorin(omega0: Form, factors, p: int, q: int, tol: float | None = None) -> HRReport:
    factors = list(factors)
    n = omega0.n
    if len(factors) != n - p - q:
        raise FormError(f"expected {n - p - q} factors, got {len(factors)}")
    return certify(omega0, wedge_all(factors, n=n), p, q, tol)


def mixed_sum(omega1: Form, omega2: Form) -> Form:
    """``sum_{j=0}^{n-2} omega1^{n-2-j} ^ omega2^j``."""
    n = omega1.n
    if n < 3:
        raise FormError("mixed sums need n >= 3")
    return sum(
        (wedge(power(omega1, n - 2 - j), power(omega2, j)) for j in range(1, n - 1)),
        power(omega1, n - 2),
    )


def certify_mixed_sum(omega0: Form, omega1: Form, omega2: Form, p: int, q: int, tol: float | None = None) -> HRReport:
    for w in (omega1, omega2):
        if not is_positive_form(w):
            raise NotPositiveError("mixed-sum factors must be positive (1,1)-forms")
    return certify(omega0, mixed_sum(omega1, omega2), p, q, tol)


def convex_family(omega1: Form, omega2: Form, a: float) -> Form:
    return power(omega1, 2) + a * power(omega2, 2)


@dataclass(eq=False)
class Counterexample:
    """First refuting grid point, its report, and the bisected sign-change location."""

    a: float
    report: HRReport
    boundary: float | None = None


def find_counterexample(omega1: Form, omega2: Form, omega0: Form, a_grid=None, tol: float | None = None):
    """Scan ``omega1^2 + a omega2^2`` for a refuted (1,1) certification on C^4.

    Returns a :class:`Counterexample` or ``None`` when every grid point certifies.
    """
    if any(w.n != 4 for w in (omega1, omega2, omega0)):
        raise FormError("the convex-combination search runs on C^4")
    grid = DEFAULT_GRID if a_grid is None else tuple(float(a) for a in a_grid)
    if any(a <= 0 for a in grid):
        raise ValueError("grid points must be positive")

    def run(a):
        return certify(omega0, convex_family(omega1, omega2, a), 1, 1, tol)

    prev_a, prev_min = None, None
    for a in grid:
        report = run(a)
        if report.verdict is Verdict.REFUTED:
            boundary = None
            if prev_a is not None and prev_min is not None and prev_min > 0:
                boundary = _bisect_sign_change(run, prev_a, a)
            return Counterexample(float(a), report, boundary)
        prev_a, prev_min = a, report.min_eigenvalue
    return None


def _bisect_sign_change(run, lo: float, hi: float, steps: int = 60) -> float:
    # log-scale bisection; run(lo) has positive, run(hi) negative minimal eigenvalue
    for _ in range(steps):
        mid = float(np.sqrt(lo * hi))
        if run(mid).min_eigenvalue > 0:
            lo = mid
        else:
            hi = mid
        if hi / lo - 1.0 < 1e-12:
            break
    return float(np.sqrt(lo * hi))


@dataclass(eq=False)
class HRTypeResult:
    omega: Form | None
    reports: dict
    notes: list[str]
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.omega is not None and all(r.certified for r in self.reports.values())

    def to_json(self) -> dict:
        return {
            "omega": self.omega.to_json() if self.omega is not None else None,
            "reports": {f"{p},{q}": r.to_json() for (p, q), r in self.reports.items()},
            "notes": list(self.notes),
            "reason": self.reason,
        }


def hr_type_check(omega0: Form, Omega0: Form, tol: float | None = None) -> HRTypeResult:
    """Pointwise check that ``omega0 ^ Omega0`` has an (n-1)-st root and Omega0 is HR for p+q=2."""
    notes = ["constant: closedness automatic"]
    omega = None
    reason = None
    try:
        omega = michelsohn_root(wedge(omega0, Omega0))
    except NotPositiveError as exc:
        reason = f"root failed: {exc}"
    reports = {}
    for p, q in SUPPORTED_DEGREES:
        try:
            reports[(p, q)] = certify(omega0, Omega0, p, q, tol)
        except DegenerateFormError as exc:
            reports[(p, q)] = HRReport((p, q), False, [], float("nan"), Verdict.DEGENERATE, float("nan"), reason=str(exc))
    return HRTypeResult(omega, reports, notes, reason)


def basis_labels(n: int, p: int, q: int) -> list[str]:
    return [index_label(I, J) for I, J in basis(n, p, q)]


def counterexample_fixture() -> tuple[Form, Form, Form]:
    """Kaehler pair on C^4 (with omega0 the standard form) whose convex family fails for small a.

    ``omega1 = diag(1, 1, 10, 10)`` and ``omega2 = diag(10, 10, 1, 1)``; on the
    default grid the first refuted point is ``a = 10**-1.4``.
    """
    return (
        form_from_matrix(np.diag([1.0, 1.0, 10.0, 10.0])),
        form_from_matrix(np.diag([10.0, 10.0, 1.0, 1.0])),
        form_from_matrix(np.eye(4)),
    )
