"""The augmented Picard iteration.

Alongside x^{n+1} = f(x^n) the engine runs the scalar recurrence

    t^0 = 0,   t^{n+1} = lam * t^n + d,      d = ||x^1 - x^0||,

whose increments dominate the step norms.  The pair sequence (x^n, t^n) is
then monotone and bounded in the Lorentz-cone order, which is exactly what
the certificate module verifies after the fact.  The limit of t^n is
t* = d / (1 - lam), and t* - t^n = lam^n d / (1 - lam) is a rigorous bound
on the distance from x^n to the fixed point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .cone import AugmentedPoint, as_vector, norm
from .contraction import ContractionSpec, evaluate
from .errors import DimensionMismatchError, InvalidInputError

DEFAULT_MAX_ITERATIONS = 1_000_000

# Below this gap to lam = 1 the amplification d / (1 - lam) is considered
# ill-conditioned and runs carry a warning.
CONDITIONING_GAP = 1e-6


class StopReason(enum.Enum):
    A_PRIORI = "apriori"
    A_POSTERIORI = "aposteriori"
    MAX_ITERATIONS = "max_iterations"
    EXACT_FIXED_POINT = "exact_fixed_point"
    FIXED_COUNT = "fixed_count"


def _check_positive(name: str, v: float):
    if not (math.isfinite(v) and v > 0.0):
        raise InvalidInputError(f"{name} must be finite and > 0, got {v}")


@dataclass(frozen=True)
class APriori:
    """Stop at the first n with lam^n d / (1 - lam) <= eps."""

    eps: float
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        _check_positive("eps", self.eps)
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")


@dataclass(frozen=True)
class APosteriori:
    """Stop once (lam / (1 - lam)) * ||x^{n+1} - x^n|| <= eps."""

    eps: float
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        _check_positive("eps", self.eps)
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")


@dataclass(frozen=True)
class FixedCount:
    """Run exactly ``count`` steps (or fewer if the guard is smaller)."""

    count: int
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        if self.count < 0:
            raise InvalidInputError("count must be >= 0")
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")


StoppingRule = APriori | APosteriori | FixedCount


@dataclass(frozen=True)
class IterationTrace:
    """The recorded pair sequence (x^n, t^n), n = 0..N.

    ``xs`` has shape (N+1, m) and ``ts`` shape (N+1,); row n holds the n-th
    iterate.  ``d`` is the first step norm ||x^1 - x^0||, computed once and
    frozen.  ``stop_reason`` is None only for traces reloaded from disk.
    """

    spec: ContractionSpec
    x0: np.ndarray
    d: float
    xs: np.ndarray
    ts: np.ndarray
    stop_reason: StopReason | None
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "x0", as_vector(self.x0))
        xs = np.asarray(self.xs, dtype=float)
        ts = np.asarray(self.ts, dtype=float)
        if xs.ndim != 2 or ts.ndim != 1 or xs.shape[0] != ts.shape[0] or xs.shape[0] < 1:
            raise InvalidInputError(
                f"inconsistent trace arrays: xs {xs.shape}, ts {ts.shape}"
            )
        xs.setflags(write=False)
        ts.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ts", ts)

    @property
    def n_steps(self) -> int:
        return self.xs.shape[0] - 1

    @property
    def dimension(self) -> int:
        return self.xs.shape[1]

    def point(self, n: int) -> AugmentedPoint:
        return AugmentedPoint(self.xs[n], float(self.ts[n]))

    @property
    def points(self) -> list[AugmentedPoint]:
        return [self.point(n) for n in range(self.xs.shape[0])]

    @property
    def final(self) -> AugmentedPoint:
        return self.point(self.n_steps)

    @property
    def t_star(self) -> float:
        """Closed-form limit of the scalar sequence, d / (1 - lam)."""
        return self.d / (1.0 - self.spec.lam)

    def final_bound(self) -> float:
        """Certified distance from the final iterate to the fixed point."""
        return self.spec.lam ** self.n_steps * self.d / (1.0 - self.spec.lam)


def augmented_step(spec: ContractionSpec, current: AugmentedPoint, d: float) -> AugmentedPoint:
    """One step of the pair iteration: (x, t) -> (f(x), lam t + d)."""
    if not (math.isfinite(d) and d >= 0.0):
        raise InvalidInputError(f"d must be finite and >= 0, got {d}")
    return AugmentedPoint(evaluate(spec, current.x), spec.lam * current.t + d)


def t_closed_form(d: float, lam: float, n: int) -> float:
    """Value of the scalar recurrence after n steps: d (1 - lam^n) / (1 - lam)."""
    if not (math.isfinite(d) and d >= 0.0):
        raise InvalidInputError(f"d must be finite and >= 0, got {d}")
    if not (0.0 < lam < 1.0):
        raise InvalidInputError(f"lam must lie in (0, 1), got {lam}")
    if n < 0:
        raise InvalidInputError("n must be >= 0")
    return d * (1.0 - lam**n) / (1.0 - lam)


def a_priori_iterations(d: float, lam: float, eps: float) -> int:
    """Smallest n >= 0 with lam^n d / (1 - lam) <= eps (0 when d = 0)."""
    if not (math.isfinite(d) and d >= 0.0):
        raise InvalidInputError(f"d must be finite and >= 0, got {d}")
    if not (0.0 < lam < 1.0):
        raise InvalidInputError(f"lam must lie in (0, 1), got {lam}")
    _check_positive("eps", eps)
    if d == 0.0 or d / (1.0 - lam) <= eps:
        return 0

    def bound(n: int) -> float:
        return lam**n * d / (1.0 - lam)

    n = max(0, math.ceil(math.log(eps * (1.0 - lam) / d) / math.log(lam)))
    # log arithmetic can be off by one either way; settle it exactly.
    while n > 0 and bound(n - 1) <= eps:
        n -= 1
    while bound(n) > eps:
        n += 1
    return n


def run(spec: ContractionSpec, x0, rule: StoppingRule) -> IterationTrace:
    """Run the augmented iteration from x0 under the given stopping rule.

    The first step norm d is computed once and then frozen into the scalar
    recurrence.  A run that exhausts its ``max_iterations`` guard is
    returned truncated and flagged MAX_ITERATIONS rather than raising, so
    the partial trace is never lost.
    """
    x0 = as_vector(x0)
    if x0.size != spec.dimension:
        raise DimensionMismatchError(
            f"x0 has dimension {x0.size}, spec expects {spec.dimension}"
        )

    warnings: tuple[str, ...] = ()
    gap = 1.0 - spec.lam
    if gap < CONDITIONING_GAP:
        warnings = (
            f"ill-conditioned contraction: 1 - lambda = {gap:.3e}, "
            f"the bound d / (1 - lambda) amplifies rounding",
        )

    x1 = evaluate(spec, x0)
    d = norm(x1 - x0)

    if d == 0.0:
        return IterationTrace(
            spec=spec, x0=x0, d=0.0,
            xs=x0[None, :].copy(), ts=np.zeros(1),
            stop_reason=StopReason.EXACT_FIXED_POINT, warnings=warnings,
        )

    if isinstance(rule, APriori):
        target = a_priori_iterations(d, spec.lam, rule.eps)
        steps = min(target, rule.max_iterations)
        reason = StopReason.A_PRIORI if target <= rule.max_iterations else StopReason.MAX_ITERATIONS
    elif isinstance(rule, FixedCount):
        steps = min(rule.count, rule.max_iterations)
        reason = StopReason.FIXED_COUNT if rule.count <= rule.max_iterations else StopReason.MAX_ITERATIONS
    elif isinstance(rule, APosteriori):
        steps = None  # decided on the fly
        reason = StopReason.A_POSTERIORI
    else:
        raise InvalidInputError(f"unknown stopping rule {rule!r}")

    xs = [x0]
    ts = [0.0]
    x, t = x0, 0.0
    n = 0
    while True:
        if steps is not None and n >= steps:
            break
        x_next = x1 if n == 0 else evaluate(spec, x)
        t = spec.lam * t + d
        step_norm = norm(x_next - x)
        x = x_next
        xs.append(x)
        ts.append(t)
        n += 1
        if steps is None:
            if (spec.lam / gap) * step_norm <= rule.eps:
                break
            if n >= rule.max_iterations:
                reason = StopReason.MAX_ITERATIONS
                break

    return IterationTrace(
        spec=spec, x0=x0, d=d,
        xs=np.vstack(xs), ts=np.asarray(ts),
        stop_reason=reason, warnings=warnings,
    )
