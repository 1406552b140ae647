"""Built-in problem instances with independently computed fixed points.

References never come from the Picard engine itself: affine families are
solved by direct elimination of (I - A) x = b and the Kepler family by
bisection, so acceptance checks compare two genuinely different routes to
the same point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cone import as_vector, norm
from .contraction import (
    Affine,
    Constant,
    ContractionSpec,
    KeplerScalar,
    ScaledRotation,
    evaluate,
)
from .errors import UnsupportedInstanceError

BISECTION_WIDTH = 1e-12


@dataclass(frozen=True)
class ProblemInstance:
    name: str
    spec: ContractionSpec
    x0: np.ndarray
    reference: np.ndarray | None = None
    provenance: str = ""

    def __post_init__(self):
        object.__setattr__(self, "x0", as_vector(self.x0))
        if self.reference is not None:
            object.__setattr__(self, "reference", as_vector(self.reference))


def _solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m = b.size
    return np.linalg.solve(np.eye(m) - a, b)


def _bisect_kepler(e: float, mean_anomaly: float) -> float:
    """Root of x - M - e sin x on [M - |e|, M + |e|] by plain bisection.

    The bracket always works: at the endpoints the residual is -|e| - e sin(.)
    and |e| - e sin(.), which cannot be positive resp. negative.
    """
    lo = mean_anomaly - abs(e)
    hi = mean_anomaly + abs(e)
    if lo == hi:
        return mean_anomaly

    def g(x: float) -> float:
        return x - mean_anomaly - e * math.sin(x)

    if g(lo) > 0.0 or g(hi) < 0.0:
        raise UnsupportedInstanceError("bisection bracket failed")
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def reference_fixed_point(p: ProblemInstance) -> np.ndarray:
    """Fixed point of the instance's map, computed without Picard iteration."""
    spec = p.spec
    if isinstance(spec, Constant):
        return spec.c.copy()
    if isinstance(spec, Affine):
        return _solve_linear(spec.a, spec.b)
    if isinstance(spec, ScaledRotation):
        return _solve_linear(spec.matrix, spec.b)
    if isinstance(spec, KeplerScalar):
        return np.array([_bisect_kepler(spec.e, spec.mean_anomaly)])
    raise UnsupportedInstanceError(
        f"no reference solution available for {type(spec).__name__}"
    )


def _instance(name: str, spec: ContractionSpec, x0, provenance: str) -> ProblemInstance:
    p = ProblemInstance(name=name, spec=spec, x0=x0)
    return ProblemInstance(
        name=name, spec=spec, x0=x0,
        reference=reference_fixed_point(p), provenance=provenance,
    )


def builtin_catalog() -> list[ProblemInstance]:
    """The standard test problems, each with a reference solution."""
    return [
        _instance(
            "AFFINE_1D",
            Affine(a=[[0.5]], b=[1.0], lam=0.5),
            x0=[0.0],
            provenance="direct solve of (1 - 0.5) x = 1",
        ),
        _instance(
            "CONSTANT",
            Constant(c=[3.0, 7.0], lam=0.5),
            x0=[0.0, 0.0],
            provenance="a constant map fixes its value",
        ),
        _instance(
            "ROTATION_2D",
            ScaledRotation(theta=math.pi / 2.0, scale=0.5, b=[1.0, 0.0], lam=0.5),
            x0=[0.0, 0.0],
            provenance="2x2 solve of (I - 0.5 R(90deg)) x = (1, 0), det = 1.25",
        ),
        _instance(
            "KEPLER",
            KeplerScalar(e=0.5, mean_anomaly=1.0, lam=0.5),
            x0=[0.0],
            provenance="bisection of x - 1 - 0.5 sin x on [0.5, 1.5]",
        ),
        _instance(
            "FIXED_START",
            Affine(a=[[0.5]], b=[1.0], lam=0.5),
            x0=[2.0],
            provenance="starts at the fixed point, so d = 0",
        ),
        _instance(
            "NEAR_ONE",
            Affine(a=[[0.999]], b=[0.001], lam=0.999),
            x0=[0.0],
            provenance="direct solve of (1 - 0.999) x = 0.001",
        ),
    ]


def builtin(name: str) -> ProblemInstance:
    for p in builtin_catalog():
        if p.name == name:
            return p
    known = ", ".join(p.name for p in builtin_catalog())
    raise UnsupportedInstanceError(f"unknown builtin {name!r} (known: {known})")


def reference_residual(p: ProblemInstance) -> float:
    """||f(x_ref) - x_ref|| for the stored reference."""
    if p.reference is None:
        raise UnsupportedInstanceError(f"{p.name} has no reference")
    return norm(evaluate(p.spec, p.reference) - p.reference)
