"""Scratch: harness machinery on the paper systems and random models."""
import time
from nicut import *
from nicut.harness import (
    GenParams, check_profile_lattice, lattice_consistency_check, matched_bounds,
    monotonicity_check, policy_supersets, random_policy, random_system,
    translate_gn_vulnerability, translate_ndi_vulnerability, count_runs_brute,
)
from nicut.notions import CutFamily, NotionId, check_gn_pw, check_ndi_sw, profile
from nicut.policy import Cut, high_up_cut, low_down_cut
from scratch_check import fig4, pol4, fig5, pol5, fig6, pol6

t0 = time.time()
rep = lattice_consistency_check(30, GenParams(seed=1))
print(f"lattice: {rep.trials} trials, violations={len(rep.violations)}, {time.time()-t0:.2f}s")
for v in rep.violations[:5]:
    print("  ", v.render())

for label, system, policy in [("fig4", fig4, pol4), ("fig5", fig5, pol5), ("fig6", fig6, pol6)]:
    verdicts = profile(system, policy, **matched_bounds())
    bad = check_profile_lattice(verdicts, label)
    print(f"{label}: lattice violations={len(bad)}")

t0 = time.time()
for notion in [NotionId.L_GN, NotionId.L_NDI, NotionId.H_NDI, NotionId.GN_PW, NotionId.NDI_SW, NotionId.C_NDI]:
    r6 = monotonicity_check(fig6, pol6, notion, matched_bounds(3))
    r5 = monotonicity_check(fig5, pol5, notion, matched_bounds(3))
    def show(r):
        return f"{len(r.flips)} flips over {r.policies} policies" + ("" if r.ok else " [VIOLATION]")
    print(f"monotonicity {notion.value:7s} fig6: {show(r6)} | fig5: {show(r5)}")
print(f"monotonicity sweeps took {time.time()-t0:.2f}s")

r6 = monotonicity_check(fig6, pol6, NotionId.L_GN, matched_bounds(3))
for f in r6.flips:
    print("  fig6 L-GN flip:", f.added_edges())

# translations: fig6 H-GN vulnerability at ^H translated to another cut and back
v6 = profile(fig6, pol6, **matched_bounds(3))[NotionId.C_GN].vulnerability
up_h = high_up_cut(pol6, "H")
print("translate C-GN vuln to ^H:", translate_gn_vulnerability(fig6, pol6, v6, up_h).render()[:110])

# NDI translation: fig5 NDI_sw base vulnerability to the low-down cut at L
v5 = check_ndi_sw(fig5, pol5, 2, 2).vulnerability
down_l = low_down_cut(pol5, "L")
print("translate NDI_sw vuln to vL:", translate_ndi_vulnerability(fig5, pol5, v5, down_l).render()[:110])

p = GenParams(seed=7)
s1, s2 = random_system(p), random_system(p)
print("random_system deterministic in seed:", s1 == s2)
from nicut.model import enumerate_runs
n = sum(1 for _ in enumerate_runs(fig6, 2))
print("fig6 run count <=2:", n, "| brute recount:", count_runs_brute(fig6, 2))
