"""JSON schemas for jobs and the data files they reference."""

import math

import jsonschema

COMMANDS = [
    "certify",
    "classical",
    "timorin",
    "mixed-sum",
    "counterexample",
    "root",
    "hr-type",
    "bmy",
    "pairing",
    "jacobi",
    "flat-decompose",
    "siu-sampson",
    "campaign",
]

CAMPAIGN_CHECKS = [
    "classical",
    "timorin",
    "mixed-sum",
    "root",
    "hr-type",
    "bmy",
    "pairing",
    "jacobi",
    "flat-decompose",
    "siu-sampson",
]

COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

FORM = {
    "title": "form",
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "p": {"type": "integer", "minimum": 0},
        "q": {"type": "integer", "minimum": 0},
        "coeffs": {"type": "array", "items": COMPLEX},
    },
    "required": ["n", "p", "q", "coeffs"],
    "additionalProperties": False,
}

END_VALUED_FORM = {
    "title": "end-valued form",
    "type": "object",
    "properties": {
        "r": {"type": "integer", "minimum": 1},
        "form": {
            "type": "object",
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "p": {"type": "integer", "minimum": 0},
                "q": {"type": "integer", "minimum": 0},
            },
            "required": ["n", "p", "q"],
            "additionalProperties": False,
        },
        "entries": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "array", "items": COMPLEX}},
        },
    },
    "required": ["r", "form", "entries"],
    "additionalProperties": False,
}

DECOMPOSITION = {
    "title": "strong positivity decomposition",
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 2},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "mu": {"type": "number", "minimum": 0},
                    "alphas": {"type": "array", "items": {"type": "array", "items": COMPLEX}},
                },
                "required": ["mu", "alphas"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["n", "terms"],
    "additionalProperties": False,
}

CURVATURE = {
    "title": "curvature tensor",
    "type": "object",
    "properties": {
        "m": {"type": "integer", "minimum": 2},
        "convention": {"const": "sectional=R(X,Y,Y,X)"},
        "R": {"type": "array"},
    },
    "required": ["R", "convention"],
    "additionalProperties": False,
}

HR_REPORT = {
    "title": "hodge-riemann report",
    "type": "object",
    "properties": {
        "degree": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
        "decomposition_ok": {"type": "boolean"},
        "spectrum": {"type": "array", "items": {"type": "number"}},
        "min_eigenvalue": {"type": "number"},
        "verdict": {"enum": ["certified", "refuted", "degenerate"]},
        "witness": {"oneOf": [{"type": "null"}, FORM]},
        "tol": {"type": "number"},
        "reason": {"type": "string"},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["degree", "decomposition_ok", "spectrum", "min_eigenvalue", "verdict", "tol"],
    "additionalProperties": False,
}

JOB = {
    "title": "job",
    "type": "object",
    "properties": {
        "command": {"enum": COMMANDS},
        "check": {"enum": CAMPAIGN_CHECKS},
        "seed": {"type": "integer", "minimum": 0},
        "trials": {"type": "integer", "minimum": 1},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 2, "maximum": 8},
        "r": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 2},
        "c": {"type": "number"},
        "terms": {"type": "integer", "minimum": 0},
        "lam": {"type": "number"},
        "degree": {
            "type": "array",
            "items": {"type": "integer", "minimum": 0},
            "minItems": 2,
            "maxItems": 2,
        },
        "grid": {
            "oneOf": [
                {"const": "default"},
                {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
            ]
        },
        "omega0": FORM,
        "Omega0": FORM,
        "omega1": FORM,
        "omega2": FORM,
        "Phi": FORM,
        "factors": {"type": "array", "items": FORM},
        "F": END_VALUED_FORM,
        "psi": END_VALUED_FORM,
        "theta": END_VALUED_FORM,
        "du": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "curvature": CURVATURE,
        "decomposition": DECOMPOSITION,
        "allow_nonprimitive": {"type": "boolean"},
    },
    "additionalProperties": False,
}

SCHEMAS = {
    "job": JOB,
    "form": FORM,
    "end-valued-form": END_VALUED_FORM,
    "decomposition": DECOMPOSITION,
    "curvature": CURVATURE,
    "hr-report": HR_REPORT,
}


def detect_kind(data) -> str:
    if not isinstance(data, dict):
        return "job"
    if "command" in data or "check" in data or "seed" in data:
        return "job"
    if "entries" in data:
        return "end-valued-form"
    if "terms" in data and "coeffs" not in data:
        return "decomposition"
    if "convention" in data or "R" in data:
        return "curvature"
    if "verdict" in data:
        return "hr-report"
    if "coeffs" in data:
        return "form"
    return "job"


def _path(parts) -> str:
    return "/" + "/".join(str(p) for p in parts) if parts else "/"


def _form_violations(data, where) -> list[str]:
    out = []
    n, p, q = data["n"], data["p"], data["q"]
    if p > n or q > n:
        out.append(f"{where}: bidegree ({p},{q}) exceeds n={n}")
        return out
    expected = math.comb(n, p) * math.comb(n, q)
    got = len(data["coeffs"])
    if got != expected:
        out.append(f"{where}/coeffs: length {got}, expected C({n},{p})*C({n},{q}) = {expected}")
    return out


def _end_valued_violations(data, where) -> list[str]:
    out = []
    r = data["r"]
    meta = data["form"]
    n, p, q = meta["n"], meta["p"], meta["q"]
    if p > n or q > n:
        return [f"{where}: bidegree ({p},{q}) exceeds n={n}"]
    expected = math.comb(n, p) * math.comb(n, q)
    rows = data["entries"]
    if len(rows) != r or any(len(row) != r for row in rows):
        out.append(f"{where}/entries: expected an {r} x {r} array")
    for j, row in enumerate(rows):
        for k, cell in enumerate(row):
            if len(cell) != expected:
                out.append(f"{where}/entries/{j}/{k}: length {len(cell)}, expected C({n},{p})*C({n},{q}) = {expected}")
    return out


def _decomposition_violations(data, where) -> list[str]:
    out = []
    n = data["n"]
    for t, term in enumerate(data["terms"]):
        if len(term["alphas"]) != n - 2:
            out.append(f"{where}/terms/{t}/alphas: {len(term['alphas'])} covectors, expected n-2 = {n - 2}")
        for a, row in enumerate(term["alphas"]):
            if len(row) != n:
                out.append(f"{where}/terms/{t}/alphas/{a}: length {len(row)}, expected n = {n}")
    return out


def _semantic(kind, data, where="") -> list[str]:
    if kind == "form":
        return _form_violations(data, where)
    if kind == "end-valued-form":
        return _end_valued_violations(data, where)
    if kind == "decomposition":
        return _decomposition_violations(data, where)
    if kind == "hr-report" and data.get("witness"):
        return _form_violations(data["witness"], where + "/witness")
    if kind == "job":
        out = []
        for key in ("omega0", "Omega0", "omega1", "omega2", "Phi"):
            if key in data:
                out += _form_violations(data[key], f"/{key}")
        for i, f in enumerate(data.get("factors", [])):
            out += _form_violations(f, f"/factors/{i}")
        for key in ("F", "psi", "theta"):
            if key in data:
                out += _end_valued_violations(data[key], f"/{key}")
        if "decomposition" in data:
            out += _decomposition_violations(data["decomposition"], "/decomposition")
        if "degree" in data and sum(data["degree"]) != 2:
            out.append(f"/degree: p+q must equal 2, got {data['degree']}")
        return out
    return []


def violations(data, kind: str | None = None) -> list[str]:
    """All schema and shape violations of ``data``; empty when valid."""
    kind = kind or detect_kind(data)
    validator = jsonschema.Draft202012Validator(SCHEMAS[kind])
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    out = [f"{_path(e.absolute_path)}: {e.message}" for e in errors]
    if out:
        return out
    return _semantic(kind, data)
