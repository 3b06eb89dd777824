"""From a seed point to a parameterized invariant circle.

Follows the recipe step by step on the Henon seed (0.4, 0): estimate the
rotation number, sample coefficient decay to pick a truncation, build a
low-order guess from weighted averages and polish it with Newton. Prints the
defect history and the area diagnostics that force the unfolding parameter
to vanish.

Run: python3 demos/henon_circle.py
"""
from qpcircle import birkhoff as bk
from qpcircle import fourier as fs
from qpcircle.maps import henon, iterate_orbit
from qpcircle.projection import project_angles
from qpcircle.recipe import initial_guess
from qpcircle.solver import PhaseCondition, newton_solve, unfolding_diagnostics

spec = henon(cos_alpha=0.24)
seed = (0.4, 0.0)

orbit = iterate_orbit(spec, seed, 120_000)
rho = bk.rotation_number(project_angles(orbit), [120_000]).rho
print(f"rho = {rho:.15f}")

decay = bk.sample_decay(iterate_orbit(spec, seed, 1000), rho, [2, 4, 6, 8, 10])
for n, v in decay:
    print(f"  |p_{n}| = {v:.1e}")
N = bk.estimate_truncation(decay)
print(f"truncation N = {N}")

guess = initial_guess(iterate_orbit(spec, seed, 10_000), rho, 5, N)
print(f"initial defect with 5 modes: {fs.defect(guess, spec):.2e}")

system, report = newton_solve(spec, guess, PhaseCondition.radial(seed, (0.0, 0.0)))
print("Newton defects:", ", ".join(f"{d:.1e}" for d in report.defect_history))
print(f"beta = {report.unfolding.beta:.1e}")

a1, a2, a3 = unfolding_diagnostics(system.circles[0], spec, rho)
print(f"areas: K {a1:.15f}  K(.+rho) {a2:.15f}  F(K) {a3:.15f}")
