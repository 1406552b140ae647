"""The augmented iteration, step by step.

A contraction's iterates x^{n+1} = f(x^n) converge, but the raw sequence
carries no order structure.  Pair each iterate with a scalar majorant

    t^0 = 0,   t^{n+1} = lam t^n + ||x^1 - x^0||,

and the pairs (x^n, t^n) become monotone increasing in the Lorentz-cone
order: every t increment is at least as large as the step it majorizes.
This script runs the 1-D map f(x) = 0.5 x + 1 and prints the evidence.
"""

import numpy as np

from cone_fixpoint import (
    Affine,
    FixedCount,
    leq_lorentz,
    run,
    t_closed_form,
)

spec = Affine(a=[[0.5]], b=[1.0], lam=0.5)
trace = run(spec, x0=[0.0], rule=FixedCount(8))

print("f(x) = 0.5 x + 1, x0 = 0, fixed point x* = 2")
print(f"first step norm d = {trace.d}, scalar limit t* = d/(1-lam) = {trace.t_star}")
print()
print(f"{'n':>2} {'x^n':>12} {'t^n':>12} {'step norm':>12} {'t increment':>12} {'closed form':>12}")
for n in range(trace.n_steps + 1):
    step = np.linalg.norm(trace.xs[n] - trace.xs[n - 1]) if n else 0.0
    inc = trace.ts[n] - trace.ts[n - 1] if n else 0.0
    cf = t_closed_form(trace.d, spec.lam, n)
    print(f"{n:>2} {trace.xs[n, 0]:>12.8f} {trace.ts[n]:>12.8f} "
          f"{step:>12.8f} {inc:>12.8f} {cf:>12.8f}")

print()
print("cone-order monotonicity of consecutive pairs:")
for n in range(trace.n_steps):
    ok = leq_lorentz(trace.point(n), trace.point(n + 1))
    print(f"  (x^{n}, t^{n}) <= (x^{n+1}, t^{n+1})  ->  {ok}")

print()
print("the scalar gap t* - t^n is a rigorous error bound ||x^n - x*||:")
for n in range(trace.n_steps + 1):
    err = abs(trace.xs[n, 0] - 2.0)
    bound = trace.t_star - trace.ts[n]
    print(f"  n={n}: true error {err:.10f} <= bound {bound:.10f}")
