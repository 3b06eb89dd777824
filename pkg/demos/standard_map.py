"""Invariant circles of the standard map through the quadratic recast.

The sine in the standard map is replaced by two extra unknown series that
satisfy linear differential identities, so Newton only ever multiplies
series. Solves a rotational circle and the period-6 island chain at
alpha = pi/2.

Run: python3 demos/standard_map.py   (about 15 s)
"""
import math

from qpcircle.maps import standard
from qpcircle.recipe import RecipeConfig, run_recipe

res = run_recipe(RecipeConfig(standard(math.pi / 4), (math.pi, 1.0), n_modes=50))
u = res.report.unfolding
print(f"rotational circle: rho = {res.rho.rho:.15f}, N = 50, defect {res.report.final_defect:.1e}")
print(f"  beta {u.beta:.1e}, gamma {u.gamma[0]:.1e}, omega {u.omega[0]:.1e}")

res6 = run_recipe(RecipeConfig(standard(math.pi / 2), (1.85, 0.565), period=6))
print(f"period-6 chain: N = {res6.N}, defect {res6.report.final_defect:.1e}, "
      f"rho per iterate {res6.rho_per_iterate:.12f}")
