"""Geometry of the bounding set Omega.

Omega collects the augmented points (x, t) with

    t >= ||x - x0||   and   t >= (d + ||f(x) - x||) / (1 - lam).

Every member sits above the whole augmented iteration in the cone order,
and the iteration's limit (x*, t*) sits below every member.  The script
probes memberships for the Kepler-style map f(x) = 1 + 0.5 sin x, then
runs a small experiment suggesting (x*, t*) is not just *a* lower bound
but the least member.
"""

import numpy as np

from cone_fixpoint import (
    APriori,
    AugmentedPoint,
    KeplerScalar,
    OmegaSpec,
    canonical_omega_witness,
    leq_lorentz,
    omega_bounds,
    omega_contains,
    omega_t_floor,
    run,
    sample_omega,
)

spec = KeplerScalar(e=0.5, mean_anomaly=1.0, lam=0.5)
om = OmegaSpec.for_problem(spec, x0=[0.0])
print(f"f(x) = 1 + 0.5 sin x, x0 = 0: d = {om.d}, t* = {om.t_star}")

print()
print("membership probes (drift bound, displacement bound) -> member?")
for x, t in [([0.0], 4.0), ([0.0], 3.0), ([1.4987], 2.0), ([5.0], 8.0), ([5.0], 12.0)]:
    b1, b2 = omega_bounds(om, x)
    member = omega_contains(om, AugmentedPoint(x, t))
    print(f"  x={x[0]:>7.4f} t={t:>5.2f}: bounds ({b1:.4f}, {b2:.4f}) -> {member}")

w = canonical_omega_witness(om)
print()
print(f"canonical witness (x0, 2d/(1-lam)) = ({w.x[0]}, {w.t}); "
      f"member: {omega_contains(om, w)}")

trace = run(spec, om.x0, APriori(1e-12))
limit = AugmentedPoint(trace.xs[-1], om.t_star)
print(f"limit point after {trace.n_steps} steps: (x*, t*) = ({limit.x[0]:.12f}, {limit.t})")
print(f"limit point is itself a member: {omega_contains(om, limit)}")

print()
print("the limit sits below every sampled member (lower-bound property):")
witnesses = sample_omega(om, 2000, seed=1)
below = sum(leq_lorentz(limit, p) for p in witnesses)
print(f"  {below} / {len(witnesses)} sampled members dominate the limit")

# Experiment: is the limit the least member?  If some member (x, t) had
# t < t* anywhere, minimizing t over members would reveal it.  Sampling the
# membership floor suggests the floor's minimum is exactly t*, attained at x*.
xs = np.linspace(-3, 5, 20001)
floors = [omega_t_floor(om, [x]) for x in xs]
i = int(np.argmin(floors))
print()
print("experiment: minimize the membership floor over x")
print(f"  min floor = {floors[i]:.12f} at x = {xs[i]:.6f}")
print(f"  compare        t* = {om.t_star:.12f} at x* = {limit.x[0]:.6f}")
