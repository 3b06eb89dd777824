"""Continuing a family of circles to breakdown, then restarting in an island.

Starts from the small Henon circle through (0, 0.1), steps the rotation
number until a Sobolev norm grows a millionfold, then locates the elliptic
period-7 orbit outside the last circle and solves a circle chain around it.

Run: python3 demos/continuation.py   (about 40 s)
"""
import math

from qpcircle.continuation import ContinuationRecord, continue_family, restart_next_family
from qpcircle.maps import henon
from qpcircle.recipe import RecipeConfig, run_recipe

spec = henon(2 * math.pi - math.acos(-0.95))
start = run_recipe(RecipeConfig(spec, (0.0, 0.1)))
print(f"start: rho = {start.rho.rho:.15f}, N = {start.N}")


def show(rec):
    if rec.system.N != show.N or len(show.seen) % 20 == 0:
        s = dict(rec.log_sobolev)
        print(f"  rho {rec.rho:.12f}  N {rec.system.N:3d}  step {rec.step:.1e}  "
              f"log10 S1 {s[1.0] / math.log(10):6.2f}  log10 S10 {s[10.0] / math.log(10):6.2f}")
        show.N = rec.system.N
    show.seen.append(rec)


show.N, show.seen = start.N, []
fam = continue_family(ContinuationRecord.from_system(start.system, spec), spec, callback=show)
print(f"stopped after {len(fam.records)} circles: {fam.stop_reason.value} ({fam.message})")

cfg = restart_next_family(fam, spec, (0.70, -0.007), 7)
res = run_recipe(cfg)
print(f"period-7 chain: seed {cfg.seed}, d = {res.system.d}, N = {res.N}, "
      f"defect {res.report.final_defect:.1e}")
