"""Job dispatch: turn a validated job dictionary into a deterministic report."""

from __future__ import annotations

import math
import time

import numpy as np

from . import __version__
from .exterior import Form, FormError, DegenerateFormError, wedge_all
from .hodge_riemann import (
    DEFAULT_GRID,
    SUPPORTED_DEGREES,
    certify,
    certify_classical,
    certify_mixed_sum,
    certify_timorin,
    counterexample_fixture,
    find_counterexample,
    hr_type_check,
)
from .pairings import (
    EndValuedForm,
    SignViolation,
    bmy_density,
    bmy_scale,
    flatness_decompose,
    hermitian_adjoint,
    jacobi_identity_check,
    jacobi_scale,
    pairing_sq,
    primitive_project_mv,
    random_curvature,
    random_theta,
    traceless_part,
)
from .positivity import (
    NotPositiveError,
    StrongPositivityDecomposition,
    matrix_from_form,
    michelsohn_root,
    multipolarization_omega0_product,
    normalized_power,
    random_decomposition,
    random_positive_form,
)
from .schema import violations
from .sectional import (
    CurvatureError,
    CurvatureTensor,
    DifferentialData,
    constant_curvature_tensor,
    random_differential,
    siu_sampson_terms,
)

EXIT_OK, EXIT_FOUND, EXIT_ERROR = 0, 1, 2

BMY_TOL = 1e-10
JACOBI_TOL = 1e-12
FLAT_TOL = 1e-13
SIU_TOL = 1e-10
ROOT_TOL = 1e-9
PAIRING_TOL = 1e-10


class JobError(ValueError):
    """Invalid job: schema violation or unusable inputs."""


def _seed(job, t, k):
    return [job.get("seed", 0), t, k]


def _form(job, key):
    return Form.from_json(job[key]) if key in job else None


def _degrees(job):
    if "degree" in job:
        return [tuple(job["degree"])]
    return list(SUPPORTED_DEGREES)


def _n(job, default=3):
    for key in ("omega0", "Omega0", "omega1", "Phi"):
        if key in job:
            return job[key]["n"]
    return job.get("n", default)


def _report_item(trial, report, **extra):
    item = {"trial": trial}
    item.update(extra)
    item.update(report.to_json())
    item["pass"] = report.certified
    return item


# commands; each returns a list of item dicts carrying a boolean "pass"


def _run_certify(job, t):
    if "Omega0" not in job:
        raise JobError("certify needs an explicit Omega0")
    Omega0 = _form(job, "Omega0")
    omega0 = _form(job, "omega0") or random_positive_form(Omega0.n, _seed(job, t, 0))
    return [_report_item(t, certify(omega0, Omega0, p, q, job.get("tol"))) for p, q in _degrees(job)]


def _run_classical(job, t):
    n = _n(job)
    omega0 = _form(job, "omega0") or random_positive_form(n, _seed(job, t, 0))
    return [_report_item(t, certify_classical(omega0, p, q, job.get("tol"))) for p, q in _degrees(job)]


def _run_timorin(job, t):
    n = _n(job)
    items = []
    omega0 = _form(job, "omega0") or random_positive_form(n, _seed(job, t, 0))
    for p, q in _degrees(job):
        if "factors" in job:
            factors = [Form.from_json(f) for f in job["factors"]]
        else:
            factors = [random_positive_form(n, _seed(job, t, 1 + k)) for k in range(n - p - q)]
        items.append(_report_item(t, certify_timorin(omega0, factors, p, q, job.get("tol"))))
    return items


def _run_mixed_sum(job, t):
    n = _n(job)
    omega0 = _form(job, "omega0") or random_positive_form(n, _seed(job, t, 0))
    omega1 = _form(job, "omega1") or random_positive_form(n, _seed(job, t, 1))
    omega2 = _form(job, "omega2") or random_positive_form(n, _seed(job, t, 2))
    return [_report_item(t, certify_mixed_sum(omega0, omega1, omega2, p, q, job.get("tol"))) for p, q in _degrees(job)]


def _run_counterexample(job, t):
    fixture = counterexample_fixture()
    omega1 = _form(job, "omega1") or fixture[0]
    omega2 = _form(job, "omega2") or fixture[1]
    omega0 = _form(job, "omega0") or fixture[2]
    grid = job.get("grid", "default")
    grid = DEFAULT_GRID if grid == "default" else grid
    found = find_counterexample(omega1, omega2, omega0, grid, job.get("tol"))
    if found is None:
        return [{"trial": t, "found": False, "grid_size": len(grid), "pass": True}]
    item = {"trial": t, "found": True, "a": found.a, "boundary": found.boundary}
    item.update(found.report.to_json())
    # a located refutation is the result this command looks for; it is reported via exit code 1
    item["pass"] = False
    return [item]


def _run_root(job, t):
    if "Phi" in job:
        phi = _form(job, "Phi")
        source = None
    else:
        n = _n(job)
        factors = [random_positive_form(n, _seed(job, t, k)) for k in range(n - 1)]
        phi = multipolarization_omega0_product(factors)
        source = "random multipolarization"
    n = phi.n
    try:
        omega = michelsohn_root(phi)
    except NotPositiveError as exc:
        return [{"trial": t, "root": None, "reason": str(exc), "pass": False}]
    back = normalized_power(omega, n - 1)
    err = float(np.max(np.abs(back.coeffs - phi.coeffs)) / max(phi.norm(), 1e-300))
    item = {"trial": t, "n": n}
    if source:
        item["source"] = source
    item.update(
        {
            "root": omega.to_json(),
            "root_eigenvalues": [float(x) for x in matrix_from_form(omega).eigenvalues()],
            "round_trip_error": err,
            "tol": ROOT_TOL,
            "pass": err <= ROOT_TOL,
        }
    )
    return [item]


def _run_hr_type(job, t):
    n = _n(job, 4)
    omega0 = _form(job, "omega0") or random_positive_form(n, _seed(job, t, 0))
    if "Omega0" in job:
        Omega0 = _form(job, "Omega0")
    else:
        Omega0 = wedge_all([random_positive_form(n, _seed(job, t, 1 + k)) for k in range(n - 2)], n=n)
    result = hr_type_check(omega0, Omega0, job.get("tol"))
    item = {"trial": t}
    item.update(result.to_json())
    item["pass"] = result.ok
    return [item]


def _random_primitive_curvature(r, n, omega0, Omega0, seed):
    F = traceless_part(random_curvature(r, n, seed))
    return primitive_project_mv(F, omega0, Omega0)


def _background(job, t, n):
    omega0 = _form(job, "omega0") or random_positive_form(n, _seed(job, t, 0))
    if "Omega0" in job:
        Omega0 = _form(job, "Omega0")
    else:
        Omega0 = wedge_all([random_positive_form(n, _seed(job, t, 1 + k)) for k in range(n - 2)], n=n)
    return omega0, Omega0


def _run_bmy(job, t):
    if "F" in job:
        F = EndValuedForm.from_json(job["F"])
        n = F.n
    else:
        n = job.get("n", 3)
    omega0, Omega0 = _background(job, t, n)
    if "F" not in job:
        F = _random_primitive_curvature(job.get("r", 2), n, omega0, Omega0, _seed(job, t, 9))
    density = bmy_density(F, omega0, Omega0, check_primitive=not job.get("allow_nonprimitive", False))
    scale = bmy_scale(F, omega0, Omega0)
    tol = job.get("tol", BMY_TOL)
    return [{"trial": t, "r": F.r, "n": n, "density": density, "scale": scale, "tol": tol, "pass": density >= -tol * max(scale, 1.0)}]


def _run_pairing(job, t):
    if "psi" in job:
        psi = EndValuedForm.from_json(job["psi"])
        n = psi.n
    else:
        n = job.get("n", 4)
    omega0, Omega0 = _background(job, t, n)
    if "psi" not in job:
        p, q = tuple(job.get("degree", (2, 0)))
        rng = np.random.default_rng(_seed(job, t, 9))
        dim = math.comb(n, p) * math.comb(n, q)
        r = job.get("r", 2)
        psi = EndValuedForm(n, p, q, rng.standard_normal((r, r, dim)) + 1j * rng.standard_normal((r, r, dim)))
        if (p, q) == (1, 1):
            psi = primitive_project_mv(psi, omega0, Omega0)
    result = pairing_sq(psi, omega0, Omega0)
    tol = job.get("tol", PAIRING_TOL)
    scale = max(1.0, float(np.sum(np.abs(psi.coeffs) ** 2)))
    return [
        {
            "trial": t,
            "degree": list(psi.bidegree),
            "raw": result.raw,
            "q_energy": result.q_energy,
            "tol": tol,
            "pass": result.q_energy >= -tol * scale,
        }
    ]


def _theta(job, t):
    if "theta" in job:
        return EndValuedForm.from_json(job["theta"])
    return random_theta(job.get("r", 2), job.get("n", 3), _seed(job, t, 0))


def _run_jacobi(job, t):
    theta = _theta(job, t)
    residual = jacobi_identity_check(theta)
    scale = jacobi_scale(theta)
    tol = job.get("tol", JACOBI_TOL)
    return [{"trial": t, "r": theta.r, "n": theta.n, "residual": residual, "scale": scale, "tol": tol, "pass": residual <= tol * scale}]


def _run_flat(job, t):
    theta = _theta(job, t)
    parts = flatness_decompose(theta)
    adjoint_residual = float(np.max(np.abs((hermitian_adjoint(parts.c20) + parts.c02).coeffs), initial=0.0))
    scale = jacobi_scale(theta) ** 0.5
    tol = job.get("tol", FLAT_TOL)
    return [
        {
            "trial": t,
            "norms": {"c20": parts.c20.norm(), "c11": parts.c11.norm(), "c02": parts.c02.norm()},
            "flat": parts.is_flat(tol * scale),
            "adjoint_residual": adjoint_residual,
            "tol": tol,
            "pass": adjoint_residual <= tol * scale,
        }
    ]


def _run_siu_sampson(job, t):
    if "du" in job:
        d = DifferentialData(np.array(job["du"], dtype=float))
    else:
        d = random_differential(job.get("n", 4), job.get("m", 5), _seed(job, t, 0))
    n, m = d.n, d.m
    if "curvature" in job:
        R = CurvatureTensor.from_json(job["curvature"])
    else:
        R = constant_curvature_tensor(m, job.get("c", -1.0))
    if "decomposition" in job:
        dec = StrongPositivityDecomposition.from_json(job["decomposition"])
    else:
        dec = random_decomposition(n, job.get("terms", 3), _seed(job, t, 1))
    omega0 = _form(job, "omega0") or random_positive_form(n, _seed(job, t, 2))
    terms = siu_sampson_terms(d, R, dec, omega0)
    density = float(sum(x.value for x in terms))
    scale = float(sum(abs(x.value) for x in terms))
    tol = job.get("tol", SIU_TOL)
    return [
        {
            "trial": t,
            "density": density,
            "terms": [{"weight": x.weight, "sectional": x.sectional} for x in terms],
            "tol": tol,
            "pass": density <= tol * max(scale, 1.0),
        }
    ]


RUNNERS = {
    "certify": _run_certify,
    "classical": _run_classical,
    "timorin": _run_timorin,
    "mixed-sum": _run_mixed_sum,
    "counterexample": _run_counterexample,
    "root": _run_root,
    "hr-type": _run_hr_type,
    "bmy": _run_bmy,
    "pairing": _run_pairing,
    "jacobi": _run_jacobi,
    "flat-decompose": _run_flat,
    "siu-sampson": _run_siu_sampson,
}


def _items(command, job):
    runner = RUNNERS[command]
    items = []
    for t in range(job.get("trials", 1)):
        items.extend(runner(job, t))
    return items


def run(job: dict, timing: bool = False) -> tuple[dict, int]:
    """Execute a job and return ``(report, exit_code)``.

    Raises :class:`JobError` for schema violations and unusable inputs.
    """
    problems = violations(job, "job")
    if problems:
        raise JobError("; ".join(problems))
    if "command" not in job:
        raise JobError("/: 'command' is a required property")
    command = job["command"]
    start = time.perf_counter()
    try:
        if command == "campaign":
            if "check" not in job:
                raise JobError("campaign needs a 'check' naming the command to repeat")
            items = _items(job["check"], job)
            failed = [it["trial"] for it in items if not it["pass"]]
            results = {"check": job["check"], "runs": len(items), "passed": len(items) - len(failed), "failed_trials": sorted(set(failed))}
            verdict = "passed" if not failed else "failed"
        else:
            items = _items(command, job)
            results = items
            failed = [it for it in items if not it["pass"]]
            if command == "counterexample":
                verdict = "refuted" if failed else "none-found"
            else:
                verdict = "passed" if not failed else "failed"
    except (FormError, DegenerateFormError, NotPositiveError, SignViolation, CurvatureError, ValueError) as exc:
        if isinstance(exc, JobError):
            raise
        raise JobError(f"{type(exc).__name__}: {exc}") from exc
    report = {
        "tool": "hrlab",
        "version": __version__,
        "job": job,
        "results": results,
        "aggregate": {"verdict": verdict, "items": len(items), "failed": len(failed)},
    }
    if timing:
        report["wall_clock"] = time.perf_counter() - start
    return report, (EXIT_OK if not failed else EXIT_FOUND)
