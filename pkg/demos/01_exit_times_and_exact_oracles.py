"""Exit times of the killed walk, checked against exact combinatorics.

The walk x + S_k dies the first time it goes strictly below zero.  For
finite-support increments the full distribution at a horizon is a finite
computation, and for any symmetric continuous law the survival
probability from zero is the distribution-free binomial value
C(2n,n)/4^n.  This script estimates both by Monte Carlo and prints the
comparison.

Run:  python demos/01_exit_times_and_exact_oracles.py
"""

import math

from condwalk import (IncrementLaw, Statistic, exact_joint_law, mc_estimate,
                      sparre_andersen_survival, simulate_exit)
from condwalk.rngstream import chunk_generator

print("=" * 72)
print("A single path, step by step")
print("=" * 72)
law = IncrementLaw.gaussian(0.0, 1.0)
rng = chunk_generator(seed=7, chunk_index=0)
for k in range(5):
    s = simulate_exit(law, x=1.0, horizon=50, rng=rng)
    state = "survived" if s.survived else f"exited at step {s.exit_time}"
    print(f"  path {k}: {state}, final position {s.terminal:+.3f}")

print()
print("=" * 72)
print("Finite-support law: Monte Carlo against the exact path count")
print("=" * 72)
pm1 = IncrementLaw.finite([-1.0, 1.0], [0.5, 0.5])
joint = exact_joint_law(pm1, x=1.0, n=4)
print(f"  exact atoms of 1 + S_4 on survival: {joint.atoms}")
print(f"  exact survival mass: {joint.survived_mass}")
mc = mc_estimate(pm1, 1.0, 4, Statistic.survival(), 10 ** 5, seed=1)
print(f"  MC survival (1e5 paths): {mc.mean:.5f} +- {mc.stderr:.5f}")

print()
print("=" * 72)
print("Sparre-Andersen: the same number for every symmetric continuous law")
print("=" * 72)
for n in (3, 10):
    exact = sparre_andersen_survival(n)
    print(f"  n={n}: exact C(2n,n)/4^n = {exact:.7f}")
    for name, law in (("gaussian", IncrementLaw.gaussian(0, 1)),
                      ("laplace", IncrementLaw.laplace(0, 1)),
                      ("uniform", IncrementLaw.uniform(-1, 1))):
        e = mc_estimate(law, 0.0, n, Statistic.survival(), 2 * 10 ** 5,
                        seed=n * 10 + len(name))
        z = (e.mean - exact) / e.stderr
        print(f"    {name:9s} {e.mean:.5f}  (z = {z:+.2f})")

print()
print("The survival probability decays like n^{-1/2}:")
for n in (100, 400, 1600):
    e = mc_estimate(IncrementLaw.gaussian(0, 1), 0.0, n,
                    Statistic.survival(), 2 * 10 ** 5, seed=n)
    print(f"  n={n:5d}: MC {e.mean:.5f}   sqrt(n)*MC = {e.mean * math.sqrt(n):.4f}")
