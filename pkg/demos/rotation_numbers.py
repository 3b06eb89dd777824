"""Rotation numbers and the chaos indicator for the area-preserving Henon map.

Three seeds: two on invariant circles, one in the stochastic layer. Weighted
Birkhoff estimates of the rotation number at growing orbit lengths settle to
machine precision on the circles and wander in the fourth digit otherwise.

Run: python3 demos/rotation_numbers.py
"""
import numpy as np

from qpcircle import birkhoff as bk
from qpcircle.maps import henon, iterate_orbit
from qpcircle.projection import project_angles

spec = henon(cos_alpha=0.24)
checkpoints = [1_000, 10_000, 50_000, 100_000, 120_000]

print(f"{'M':>8}" + "".join(f"{str(s):>22}" for s in [(0.1, 0.0), (0.4, 0.0), (0.3, -0.44)]))
estimates = []
for seed in [(0.1, 0.0), (0.4, 0.0), (0.3, -0.44)]:
    angles = project_angles(iterate_orbit(spec, seed, checkpoints[-1]))
    estimates.append(bk.rotation_number(angles, checkpoints))
for i, M in enumerate(checkpoints):
    print(f"{M:8d}" + "".join(f"{e.history[i][1]:22.15f}" for e in estimates))

for seed, est in zip([(0.1, 0.0), (0.4, 0.0), (0.3, -0.44)], estimates):
    cls = bk.classify_orbit(project_angles(iterate_orbit(spec, seed, 120_000)))
    print(f"seed {seed}: {cls.kind.value}, spread {cls.estimate.spread:.1e}")

# the bump weights make smooth averages converge faster than any power of M
rho = np.sqrt(2) - 1
for M in (50, 100, 200, 400):
    t = np.mod(np.arange(M) * rho, 1.0)
    err = abs(bk.weighted_average(np.exp(np.cos(2 * np.pi * t)), bk.make_weights(M)) - np.i0(1.0))
    print(f"M = {M:4d}: weighted average error {err:.1e}")
