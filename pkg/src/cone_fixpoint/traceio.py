"""File formats: trace CSV, certificate JSON, problem JSON.

Trace CSV layout, one row per iterate, decimals with 17 significant digits
so float64 values survive a round trip bit-for-bit:

    n,x_0,...,x_{m-1},t,step_norm,t_increment,mono_residual

``mono_residual = t_increment - step_norm`` is redundant on purpose: it
lets external tools audit monotonicity without recomputing norms.  Row 0
carries zeros in the three derived columns.

Problem JSON carries exactly the keys ``dimension``, ``lambda``, ``map``,
``x0`` plus optional run parameters; unknown keys are rejected rather than
ignored so a certificate always reflects the parsed problem.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile

import numpy as np

from . import __version__
from .certificate import ConvergenceCertificate
from .cone import norm
from .contraction import (
    Affine,
    Constant,
    ContractionSpec,
    KeplerScalar,
    ScaledRotation,
    evaluate,
)
from .engine import IterationTrace
from .errors import DimensionMismatchError, ProblemFileError

RUN_PARAM_KEYS = ("rule", "eps", "max_iterations", "seed")


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_text_atomic(path: str, text: str):
    """Write via a temp file in the same directory, then rename over the target."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_csv_header(m: int) -> list[str]:
    return ["n"] + [f"x_{i}" for i in range(m)] + ["t", "step_norm", "t_increment", "mono_residual"]


def write_trace_csv(trace: IterationTrace, path: str):
    xs, ts = trace.xs, trace.ts
    m = trace.dimension
    rows = [",".join(trace_csv_header(m))]
    for n in range(xs.shape[0]):
        if n == 0:
            step_norm = 0.0
            t_inc = 0.0
        else:
            step_norm = norm(xs[n] - xs[n - 1])
            t_inc = float(ts[n] - ts[n - 1])
        cells = [str(n)] + [_fmt(v) for v in xs[n]]
        cells += [_fmt(ts[n]), _fmt(step_norm), _fmt(t_inc), _fmt(t_inc - step_norm)]
        rows.append(",".join(cells))
    write_text_atomic(path, "\n".join(rows) + "\n")


def read_trace_csv(path: str, spec: ContractionSpec, x0=None) -> IterationTrace:
    """Rebuild a trace from CSV for re-verification.

    ``x0`` is the declared start of the problem; when omitted, row 0 is
    taken as the start.  The stored derived columns are ignored: the
    verifier recomputes everything from the raw points.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ProblemFileError(f"{path}: empty trace file") from None
        m = len(header) - 5
        if m < 1 or header != trace_csv_header(m):
            raise ProblemFileError(f"{path}: unrecognized trace header {header!r}")
        if m != spec.dimension:
            raise DimensionMismatchError(
                f"{path}: trace has dimension {m}, problem has {spec.dimension}"
            )
        xs, ts = [], []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise ProblemFileError(f"{path}: malformed row {row!r}")
            xs.append([float(v) for v in row[1 : 1 + m]])
            ts.append(float(row[1 + m]))
    if not xs:
        raise ProblemFileError(f"{path}: trace has no rows")
    xs = np.asarray(xs)
    ts = np.asarray(ts)
    if x0 is None:
        x0 = xs[0]
    d = norm(evaluate(spec, np.asarray(x0, dtype=float)) - np.asarray(x0, dtype=float))
    return IterationTrace(
        spec=spec, x0=x0, d=d, xs=xs, ts=ts, stop_reason=None,
    )


# --- problem files ---------------------------------------------------------

def map_to_dict(spec: ContractionSpec) -> dict:
    if isinstance(spec, Constant):
        return {"kind": "constant", "c": spec.c.tolist()}
    if isinstance(spec, Affine):
        return {"kind": "affine", "A": spec.a.tolist(), "b": spec.b.tolist()}
    if isinstance(spec, ScaledRotation):
        return {
            "kind": "scaled_rotation",
            "theta": spec.theta,
            "scale": spec.scale,
            "b": spec.b.tolist(),
        }
    if isinstance(spec, KeplerScalar):
        return {"kind": "kepler", "e": spec.e, "M": spec.mean_anomaly}
    raise ProblemFileError(f"cannot serialize {type(spec).__name__}")


_MAP_KEYS = {
    "constant": {"c"},
    "affine": {"A", "b"},
    "scaled_rotation": {"theta", "scale", "b"},
    "kepler": {"e", "M"},
}


def _reject_unknown(obj: dict, allowed: set[str], where: str):
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ProblemFileError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ProblemFileError(f"missing key {key!r} in {where}")
    return obj[key]


def problem_from_dict(obj: dict):
    """Parse a problem description into (spec, x0, run_params).

    Raises :class:`ProblemFileError` naming the offending field on any
    structural problem; factor violations surface later via validation.
    """
    if not isinstance(obj, dict):
        raise ProblemFileError("problem document must be a JSON object")
    _reject_unknown(obj, {"dimension", "lambda", "map", "x0", *RUN_PARAM_KEYS}, "problem")
    dimension = _require(obj, "dimension", "problem")
    lam = _require(obj, "lambda", "problem")
    map_obj = _require(obj, "map", "problem")
    x0 = _require(obj, "x0", "problem")
    if not isinstance(dimension, int) or isinstance(dimension, bool) or dimension < 1:
        raise ProblemFileError(f"dimension must be a positive integer, got {dimension!r}")
    if not isinstance(map_obj, dict):
        raise ProblemFileError("map must be an object")
    kind = _require(map_obj, "kind", "map")
    if kind not in _MAP_KEYS:
        raise ProblemFileError(
            f"unknown map kind {kind!r} (known: {', '.join(sorted(_MAP_KEYS))})"
        )
    _reject_unknown(map_obj, {"kind", *_MAP_KEYS[kind]}, f"map ({kind})")
    try:
        if kind == "constant":
            spec = Constant(c=_require(map_obj, "c", "map"), lam=lam)
        elif kind == "affine":
            spec = Affine(
                a=_require(map_obj, "A", "map"), b=_require(map_obj, "b", "map"), lam=lam
            )
        elif kind == "scaled_rotation":
            spec = ScaledRotation(
                theta=_require(map_obj, "theta", "map"),
                scale=_require(map_obj, "scale", "map"),
                b=_require(map_obj, "b", "map"),
                lam=lam,
            )
        else:
            spec = KeplerScalar(
                e=_require(map_obj, "e", "map"),
                mean_anomaly=_require(map_obj, "M", "map"),
                lam=lam,
            )
    except (TypeError, ValueError) as exc:
        # NotAContractionError passes through untouched: it is a numerical
        # verdict about the declared factor, not a parse problem.
        from .errors import NotAContractionError

        if isinstance(exc, NotAContractionError):
            raise
        raise ProblemFileError(f"bad map/lambda: {exc}") from exc
    if spec.dimension != dimension:
        raise ProblemFileError(
            f"dimension is {dimension} but the map acts on R^{spec.dimension}"
        )
    try:
        x0 = np.asarray(x0, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"bad x0: {exc}") from exc
    if x0.ndim != 1 or x0.size != dimension or not np.all(np.isfinite(x0)):
        raise ProblemFileError(f"x0 must be a finite array of length {dimension}")

    run_params = {}
    for key in RUN_PARAM_KEYS:
        if key in obj:
            run_params[key] = obj[key]
    if "rule" in run_params and run_params["rule"] not in ("apriori", "aposteriori"):
        raise ProblemFileError(f"rule must be 'apriori' or 'aposteriori', got {run_params['rule']!r}")
    for key in ("eps",):
        if key in run_params and not (
            isinstance(run_params[key], (int, float)) and run_params[key] > 0
        ):
            raise ProblemFileError(f"{key} must be a positive number")
    for key in ("max_iterations", "seed"):
        if key in run_params and (
            not isinstance(run_params[key], int) or isinstance(run_params[key], bool)
        ):
            raise ProblemFileError(f"{key} must be an integer")
    return spec, x0, run_params


def load_problem_file(path: str):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: invalid JSON: {exc}") from exc
    return problem_from_dict(obj), obj


# --- certificate documents -------------------------------------------------

def _summary(residuals: np.ndarray, argmin_label: str = "argmin"):
    if residuals.size == 0:
        return {"count": 0, "min_residual": None, argmin_label: None}
    i = int(np.argmin(residuals))
    return {"count": int(residuals.size), "min_residual": float(residuals[i]), argmin_label: i}


def certificate_doc(
    cert: ConvergenceCertificate,
    problem_echo: dict,
    seed: int,
    full: bool = False,
) -> dict:
    """Build the JSON-serializable certificate document."""
    if cert.witness_residuals:
        mins = [float(np.min(r)) for r in cert.witness_residuals]
        w_idx = int(np.argmin(mins))
        bounded = {
            "count": int(sum(r.size for r in cert.witness_residuals)),
            "min_residual": mins[w_idx],
            "argmin_witness": w_idx,
            "argmin_step": int(np.argmin(cert.witness_residuals[w_idx])),
        }
    else:
        bounded = {"count": 0, "min_residual": None, "argmin_witness": None, "argmin_step": None}

    echo_x = np.max(cert.consistency_x) if cert.consistency_x.size else 0.0
    echo_t = np.max(cert.consistency_t) if cert.consistency_t.size else 0.0

    doc = {
        "tool": "cone-fixpoint",
        "tool_version": __version__,
        "seed": int(seed),
        "problem": problem_echo,
        "lambda": float(cert.lam),
        "d": float(cert.d),
        "n_steps": int(cert.n_steps),
        "t_star": float(cert.limit_point.t),
        "stop_bound": float(cert.stop_bound),
        "limit_point": {"x": cert.limit_point.x.tolist(), "t": float(cert.limit_point.t)},
        "checks": {
            "monotone": _summary(cert.monotone_residuals, "argmin_step"),
            "bounded": bounded,
            "limit": _summary(cert.lower_bound_residuals, "argmin_witness"),
            "consistency": {
                "count": int(cert.consistency_x.size),
                "max_x_echo": float(echo_x),
                "max_t_echo": float(echo_t),
            },
            "fixed_point": {
                "residual": float(cert.fixed_point_residual),
                "tolerance": float(cert.fixed_point_tolerance),
            },
        },
        "witnesses": [{"x": w.x.tolist(), "t": float(w.t)} for w in cert.witnesses],
        "verdict": "pass" if cert.passed else "fail",
        "first_failure": cert.first_failure,
    }
    if full:
        doc["full_residuals"] = {
            "monotone": cert.monotone_residuals.tolist(),
            "bounded": [r.tolist() for r in cert.witness_residuals],
            "limit": cert.lower_bound_residuals.tolist(),
            "consistency_x": cert.consistency_x.tolist(),
            "consistency_t": cert.consistency_t.tolist(),
        }
    return doc


def dump_certificate(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_certificate(doc: dict, path: str):
    write_text_atomic(path, dump_certificate(doc))
