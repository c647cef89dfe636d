"""The deterministic layer: densities, kernels and exact identities.

Everything the predictors lean on is checkable by quadrature: the
meander kernel psi integrates to 2 Phi(x) - 1 and collapses to the
Rayleigh density as x -> 0; convolving a normal with the complementary
meander or Rayleigh density reproduces closed forms; the sinc^4
smoothing kernel has unit mass and a compactly supported transform; the
maximal inequality dominates simulated extremes.

Run:  python demos/05_densities_kernels_identities.py
"""

import math

import numpy as np

from condwalk import (IncrementLaw, KernelSpec, brownian_exit,
                      conv_normal_levy, conv_normal_rayleigh, fuk_nagaev_bound,
                      kernel_fourier, levy_psi, mc_max_abs_walk,
                      psi_normalizer, rayleigh, rayleigh_levy_integral,
                      smoothing_kernel)
from condwalk.special import quad

print("=" * 72)
print("The meander kernel psi(s, x)")
print("=" * 72)
for x in (0.1, 1.0, 3.0):
    mass = quad(lambda s: levy_psi(s, x), 0.0, math.inf, tol=1e-10)
    print(f"  x={x}: mass on the half-line {mass:.8f} "
          f"= 2 Phi(x) - 1 = {psi_normalizer(x):.8f}")
x = 1e-3
worst = max(abs(levy_psi(s, x) / psi_normalizer(x) - rayleigh(s)[0])
            for s in np.linspace(0, 4, 81))
print(f"  as x -> 0 the normalized kernel becomes the Rayleigh density "
      f"(max gap at x=1e-3: {worst:.1e})")

print()
print("=" * 72)
print("Convolution identities, evaluated by adaptive quadrature")
print("=" * 72)
v, s, x = 0.3, 1.0, 1.0
print(f"  normal_v * psi_(1-v) at (s={s}, x={x}): "
      f"{conv_normal_levy(v, s, x):.10f} vs psi(s,x) = {levy_psi(s, x):.10f}")
v, x = 0.25, 1.0
print(f"  rayleigh_v x psi_(1-v) overlap (v={v}, x={x}): "
      f"{rayleigh_levy_integral(v, x):.10f} vs sqrt(v) phi+(x) = "
      f"{math.sqrt(v) * rayleigh(x)[0]:.10f}")
v, x = 0.1, 2.0
got = conv_normal_rayleigh(v, x)
lo = math.sqrt(1 - v) * rayleigh(x)[0]
print(f"  normal/rayleigh smoothing (v={v}, x={x}): {got:.10f} in "
      f"[{lo:.10f}, {lo + math.sqrt(v) * math.exp(-x * x / (2 * v)):.10f}]")

print()
print("=" * 72)
print("Brownian exit probabilities (reflection principle)")
print("=" * 72)
print(f"  P(stay up to t=100 from x=10): {brownian_exit(10, 1, 100):.7f} "
      f"= 2 Phi(1) - 1")
head = brownian_exit(10, 1, 100, 0, 10)
tail = brownian_exit(10, 1, 100, 10, math.inf)
print(f"  split at the start point: {head:.7f} + {tail:.7f} "
      f"= {head + tail:.7f}")

print()
print("=" * 72)
print("The sinc^4 smoothing kernel")
print("=" * 72)
ks = KernelSpec(0.2)
mass = quad(lambda u: smoothing_kernel(ks, u), -850, 850, tol=1e-11)
print(f"  unit mass: {mass:.10f}")
print(f"  transform at t=2 (inside support):  {kernel_fourier(ks, 2.0):+.6f}")
print(f"  transform at t=6 (outside 1/eps=5): {kernel_fourier(ks, 6.0):+.2e}")

print()
print("=" * 72)
print("Maximal inequality against simulation")
print("=" * 72)
g = IncrementLaw.gaussian(0, 1)
for u, v, n in ((30.0, 30.0, 100), (40.0, 40.0, 400)):
    bound = fuk_nagaev_bound(u, v, n, g)
    mc = mc_max_abs_walk(g, n, u, 10 ** 5, seed=int(u))
    print(f"  P(max |S_k| > {u:.0f}, n={n}): MC {mc.mean:.4f} <= bound {bound:.4f}")
