"""Monte Carlo against the closed-form conditioned limit predictors.

Four regimes of the joint law P(x + S_n in y + [0, D], no exit):
starting near the boundary with y of order sqrt(n); both x and y of
order sqrt(n) (the meander kernel psi appears); the local exit-time law
P(exit = n) with its explicit constant kappa; and moderate deviations
where y reaches sigma*sqrt(q n log n).

Run:  python demos/03_conditioned_limit_theorems.py
"""

import math

from condwalk import (IncrementLaw, Statistic, mc_estimate, predict,
                      sparre_andersen_exit_at)

law = IncrementLaw.gaussian(0.0, 1.0)
V0 = 2 ** -0.5
n = 400
root_n = math.sqrt(n)

print("=" * 72)
print(f"Near the boundary: x=0, y=sqrt(n)={root_n:.0f}, width 1, n={n}")
print("=" * 72)
mc = mc_estimate(law, 0.0, n, Statistic.interval(root_n, 1.0), 2 * 10 ** 6,
                 seed=11, threads=2)
pred = predict("AA001D", v_x=V0, sigma=1.0, n=n, y=root_n, delta=1.0)
print(f"  MC   {mc.mean:.4e} +- {mc.stderr:.1e}")
print(f"  pred {pred.value:.4e}   ratio {mc.mean / pred.value:.3f}")

print()
print("=" * 72)
print(f"Far from the boundary: x=y=sqrt(n), the meander kernel takes over")
print("=" * 72)
mc = mc_estimate(law, root_n, n, Statistic.interval(root_n, 1.0), 10 ** 6,
                 seed=12, threads=2)
pred = predict("BB001D", sigma=1.0, n=n, x=root_n, y=root_n, delta=1.0)
print(f"  MC   {mc.mean:.4e} +- {mc.stderr:.1e}")
print(f"  pred {pred.value:.4e}   ratio {mc.mean / pred.value:.3f}")

print()
print("=" * 72)
print("Local exit time: P(exit exactly at n) with the explicit constant")
print("=" * 72)
for m in (50, 100, 200):
    exact = sparre_andersen_exit_at(m)
    pred = predict("TAU-S", kappa=0.5, v_x=V0, sigma=1.0, n=m)
    print(f"  n={m:4d}: exact {exact:.4e}   2 kappa V(0)/(sqrt(2pi) n^1.5) "
          f"= {pred.value:.4e}   ratio {exact / pred.value:.4f}")

print()
print("=" * 72)
print("Moderate deviations: y = sigma sqrt(q n log n), q=0.1 (slow regime)")
print("=" * 72)
y = math.sqrt(0.1 * n * math.log(n))
mc = mc_estimate(law, 0.0, n, Statistic.interval(y, 1.0), 4 * 10 ** 6,
                 seed=13, threads=2)
pred = predict("MD-C", v_x=V0, sigma=1.0, n=n, q=0.1, delta=1.0)
print(f"  y = {y:.3f}")
print(f"  MC   {mc.mean:.4e} +- {mc.stderr:.1e}")
print(f"  pred {pred.value:.4e}   ratio {mc.mean / pred.value:.3f}")
print(f"  validity note: {pred.validity}")
