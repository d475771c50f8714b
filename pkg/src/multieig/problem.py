"""Problem files: JSON documents describing ``P``, ``mu`` and the weights.

Layout::

    {
      "n": 3,
      "degree": 2,
      "coefficients": [A_0, A_1, A_2],      # ascending; each an n x n array
      "mu": [-4, 0],
      "weights": [1, 1, 1],
      "tolerances": {"tol_mult": 1e-6},     # optional
      "lower_bound": 0.4031                 # optional, echoed only
    }

Matrix entries and ``mu`` are complex numbers written as ``[re, im]``; a bare
real number is accepted as shorthand.
"""

from dataclasses import asdict, dataclass, field, fields, replace
import json
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ProblemFileError, SingularLeadingCoefficientError
from .matpoly import MatrixPolynomial
from .perturbation import WeightSet


@dataclass(frozen=True)
class Tolerances:
    """Every tolerance used by the pipeline; all are echoed into reports."""

    tol_sing: float = 1e-10
    tol_weak: float = 1e-10
    tol_mult: float = 1e-6
    tol_zero: float = 1e-10
    tol_eq: float = 1e-10
    tol_herm: float = 1e-8
    tol_def: float = 1e-8
    tol_comb: float = 1e-10
    tol_eig: float = 5e-3
    lemma_tol1: float = 1e-8
    lemma_tol2: float = 1e-4
    grid_size: int = 200
    gamma_max: Optional[float] = None
    expand_gamma_max: bool = True
    seed: int = 0

    @classmethod
    def from_mapping(cls, data, where="tolerances"):
        if not isinstance(data, dict):
            raise ProblemFileError(f"{where}: expected an object")
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for key, val in data.items():
            if key not in known:
                raise ProblemFileError(f"{where}.{key}: unknown tolerance")
            if val is None:
                kw[key] = None
                continue
            if key in ("grid_size", "seed"):
                if not isinstance(val, int) or isinstance(val, bool) or (key == "grid_size" and val < 3):
                    raise ProblemFileError(f"{where}.{key}: expected an integer (grid_size >= 3)")
            elif key == "expand_gamma_max":
                if not isinstance(val, bool):
                    raise ProblemFileError(f"{where}.{key}: expected a boolean")
            elif not _is_number(val) or val < 0:
                raise ProblemFileError(f"{where}.{key}: expected a nonnegative number")
            kw[key] = val
        return cls(**kw)

    def updated(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


@dataclass(frozen=True)
class ProblemSpec:
    polynomial: MatrixPolynomial
    mu: complex
    weights: WeightSet
    tolerances: Tolerances = field(default_factory=Tolerances)
    lower_bound: Optional[float] = None

    def __post_init__(self):
        if self.weights.m != self.polynomial.m:
            raise ProblemFileError(
                f"weights: {len(self.weights.weights)} weights for degree {self.polynomial.m}")


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _complex(x, where):
    if _is_number(x):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(_is_number(t) for t in x):
        return complex(x[0], x[1])
    raise ProblemFileError(f"{where}: expected a number or a [re, im] pair, got {json.dumps(x)}")


def _matrix(x, n, where):
    if not isinstance(x, list) or len(x) != n:
        raise ProblemFileError(f"{where}: expected {n} rows")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(x):
        if not isinstance(row, list) or len(row) != n:
            raise ProblemFileError(f"{where}[{i}]: expected {n} entries")
        for j, e in enumerate(row):
            out[i, j] = _complex(e, f"{where}[{i}][{j}]")
    return out


def problem_from_dict(doc, source="<problem>"):
    """Validate a decoded problem document."""
    if not isinstance(doc, dict):
        raise ProblemFileError(f"{source}: top level must be an object")
    for key in ("coefficients", "mu", "weights"):
        if key not in doc:
            raise ProblemFileError(f"{source}: missing field '{key}'")
    coeffs = doc["coefficients"]
    if not isinstance(coeffs, list) or not coeffs:
        raise ProblemFileError(f"{source}: coefficients: expected a nonempty list")
    degree = doc.get("degree", len(coeffs) - 1)
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 1:
        raise ProblemFileError(f"{source}: degree: expected an integer >= 1")
    if len(coeffs) != degree + 1:
        raise ProblemFileError(
            f"{source}: coefficients: dimension mismatch, {len(coeffs)} coefficients "
            f"for declared degree {degree} (need {degree + 1})")
    first = coeffs[0]
    n = doc.get("n", len(first) if isinstance(first, list) else 0)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemFileError(f"{source}: n: expected a positive integer")
    mats = [_matrix(A, n, f"{source}: coefficients[{j}]") for j, A in enumerate(coeffs)]
    mu = _complex(doc["mu"], f"{source}: mu")

    w = doc["weights"]
    if not isinstance(w, list) or not all(_is_number(t) for t in w):
        raise ProblemFileError(f"{source}: weights: expected a list of numbers")
    if len(w) != degree + 1:
        raise ProblemFileError(
            f"{source}: weights: dimension mismatch, {len(w)} weights for degree {degree}")
    if any(t < 0 for t in w):
        raise ProblemFileError(f"{source}: weights: must be nonnegative")
    if w[0] <= 0:
        raise ProblemFileError(f"{source}: weights[0]: w_0 must be positive")

    tol = Tolerances.from_mapping(doc.get("tolerances", {}), f"{source}: tolerances")
    lb = doc.get("lower_bound")
    if lb is not None and not _is_number(lb):
        raise ProblemFileError(f"{source}: lower_bound: expected a number")
    try:
        P = MatrixPolynomial(mats, tol_sing=tol.tol_sing)
    except SingularLeadingCoefficientError as exc:
        raise ProblemFileError(
            f"{source}: coefficients[{degree}]: singular leading coefficient") from exc
    return ProblemSpec(P, mu, WeightSet(w), tol, lb)


def parse_problem(path):
    """Read and validate a problem file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemFileError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(
            f"{path}: line {exc.lineno}, column {exc.colno}: malformed JSON ({exc.msg})") from exc
    return problem_from_dict(doc, str(path))


def cpair(z):
    z = complex(z)
    return [z.real, z.imag]


def cmatrix(A):
    return [[cpair(z) for z in row] for row in np.asarray(A)]


def problem_to_dict(spec):
    P = spec.polynomial
    doc = {
        "n": P.n,
        "degree": P.m,
        "coefficients": [cmatrix(A) for A in P.coeffs],
        "mu": cpair(spec.mu),
        "weights": list(spec.weights.weights),
        "tolerances": asdict(spec.tolerances),
    }
    if spec.lower_bound is not None:
        doc["lower_bound"] = spec.lower_bound
    return doc


def dump_problem(spec, path):
    """Write ``spec`` so that :func:`parse_problem` reads it back unchanged."""
    Path(path).write_text(json.dumps(problem_to_dict(spec), indent=2) + "\n")
