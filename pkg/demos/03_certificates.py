"""Certificates: verified convergence, and what tampering looks like.

The verifier takes a trace plus witnesses and re-derives everything from
the raw points: recurrence echoes, per-step monotonicity, domination by
every witness, and the limit's lower-bound property.  An honest run
passes; any meaningful edit to the recorded numbers flips the verdict.
"""

import numpy as np

from cone_fixpoint import (
    APriori,
    IterationTrace,
    builtin,
    run,
    verify_certificate,
)

p = builtin("ROTATION_2D")
trace = run(p.spec, p.x0, APriori(1e-10))
print(f"{p.name}: {trace.n_steps} steps, final x = {trace.xs[-1]}")

cert = verify_certificate(trace, seed=0)
print(f"verdict: {'pass' if cert.passed else 'fail'}")
print(f"  monotone residual (min over steps)     {np.min(cert.monotone_residuals):.3e}")
print(f"  witness residual (min over all checks) "
      f"{min(float(np.min(r)) for r in cert.witness_residuals):.3e}")
print(f"  lower-bound residual (min, raw)        {np.min(cert.lower_bound_residuals):.3e}")
print(f"  allowed inflation (stop bound)         {cert.stop_bound:.3e}")
print(f"  fixed-point residual                   {cert.fixed_point_residual:.3e}")

print()
print("now lower one t value by 1e-6 and verify again:")
ts = trace.ts.copy()
ts[7] -= 1e-6
tampered = IterationTrace(spec=trace.spec, x0=trace.x0, d=trace.d,
                          xs=trace.xs, ts=ts, stop_reason=trace.stop_reason)
bad = verify_certificate(tampered, seed=0)
print(f"verdict: {'pass' if bad.passed else 'fail'}")
print(f"  {bad.first_failure}")

print()
print("perturb one iterate sideways (orthogonal to both adjacent steps):")
n = 5
u = trace.xs[n + 1] - trace.xs[n]
v = trace.xs[n] - trace.xs[n - 1]
delta = u / np.linalg.norm(u) - (u @ v) * v / (np.linalg.norm(u) * np.linalg.norm(v) ** 2)
xs = trace.xs.copy()
xs[n] += 1e-6 * delta / np.linalg.norm(delta)
sneaky = IterationTrace(spec=trace.spec, x0=trace.x0, d=trace.d,
                        xs=xs, ts=trace.ts, stop_reason=trace.stop_reason)
worse = verify_certificate(sneaky, seed=0)
print(f"verdict: {'pass' if worse.passed else 'fail'}")
print(f"  {worse.first_failure}")
