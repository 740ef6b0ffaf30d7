"""Scratch: build the paper systems inline and eyeball all key verdicts."""
from nicut import *
from nicut.model import Run, View
from nicut.notions import CutFamily, NotionId, check_cut_family, profile
from nicut.policy import Cut

B = "⊥"  # bottom observation

fig3 = validate_system(SystemDef.build(
    name="fig3", states=["sI", "s0", "s1", "s2", "s3"], initial="sI",
    actions={"a": "A", "b": "B"},
    observations={("A", s): B for s in ["sI", "s0", "s1", "s2", "s3"]}
    | {("B", "sI"): B, ("B", "s0"): "0", ("B", "s1"): B, ("B", "s2"): "1", ("B", "s3"): "2"},
    transitions=[("sI", "a", "s1"), ("sI", "b", "s0"), ("s1", "b", "s2"), ("s2", "a", "s3")],
), implicit_self_loops=True)

r = Run.from_tokens("sI a s1 b s2 b s2 a s3".split())
v = compute_view(fig3, "B", r)
print("fig3 view_B:", v.render(), "| expected:", f"{B} b 1 b 1 2")

fig4 = validate_system(SystemDef.build(
    name="fig4", states=["sI", "s0", "s1"], initial="sI",
    actions={"h": "H", "l": "L"},
    observations={("H", s): B for s in ["sI", "s0", "s1"]}
    | {("L", "sI"): "0", ("L", "s0"): "0", ("L", "s1"): "1"},
    transitions=[("sI", "h", "s0"), ("sI", "l", "s0"), ("sI", "l", "s1")],
), implicit_self_loops=True)
pol4 = closure(["H", "L"], [("L", "H")])

print("\nfig4 profile (k=4, a=3, v=9):")
for n, verdict in profile(fig4, pol4, run_bound=4, alpha_bound=3, view_bound=9).items():
    print(f"  {n.value:8s} {verdict.render()}")

fig5 = validate_system(SystemDef.build(
    name="fig5", states=["sI", "s0", "s1"], initial="sI",
    actions={"h1": "H1", "h2": "H2", "l": "L"},
    observations={("H1", s): B for s in ["sI", "s0", "s1"]}
    | {("H2", s): B for s in ["sI", "s0", "s1"]}
    | {("L", "sI"): "0", ("L", "s0"): "0", ("L", "s1"): "1"},
    transitions=[("sI", "h1", "s0"), ("sI", "h2", "s0"), ("sI", "l", "sI"),
                 ("s0", "h1", "s0"), ("s0", "h2", "s0"), ("s0", "l", "s1")],
), implicit_self_loops=True)
pol5 = closure(["H1", "H2", "L"], [("L", "H1"), ("L", "H2")])
print("\nfig5 deterministic:", fig5.deterministic)
print("fig5 profile (k=3, a=3, v=7):")
for n, verdict in profile(fig5, pol5, run_bound=3, alpha_bound=3, view_bound=7).items():
    print(f"  {n.value:8s} {verdict.render()}")

obs_l1 = {"s0": B, "s0p": B, "s1": "0", "s2": B, "s3": "1", "s4": B,
          "s5": "0", "s6": B, "s7": "1", "s8": B, "s9": "0", "s10": "0",
          "s11": "1", "s12": "1", "s13": "0", "s14": "1", "s15": "1", "s16": "0"}
obs_l2 = {"s0": B, "s0p": B, "s1": B, "s2": "0", "s3": B, "s4": "1",
          "s5": B, "s6": "0", "s7": B, "s8": "1", "s9": "0", "s10": "0",
          "s11": "1", "s12": "1", "s13": "1", "s14": "0", "s15": "0", "s16": "1"}
states6 = sorted(obs_l1)
fig6 = validate_system(SystemDef.build(
    name="fig6", states=states6, initial="s0",
    actions={"h": "H", "l1": "L1", "l2": "L2"},
    observations={("H", s): B for s in states6}
    | {("L1", s): o for s, o in obs_l1.items()}
    | {("L2", s): o for s, o in obs_l2.items()},
    transitions=[("s0", "h", "s0p"),
                 ("s0", "l1", "s1"), ("s0", "l1", "s3"),
                 ("s0", "l2", "s2"), ("s0", "l2", "s4"),
                 ("s1", "l2", "s9"), ("s2", "l1", "s10"),
                 ("s3", "l2", "s11"), ("s4", "l1", "s12"),
                 ("s0p", "l1", "s5"), ("s0p", "l1", "s7"),
                 ("s0p", "l2", "s6"), ("s0p", "l2", "s8"),
                 ("s5", "l2", "s13"), ("s6", "l1", "s14"),
                 ("s7", "l2", "s15"), ("s8", "l1", "s16")],
), implicit_self_loops=True)
pol6 = closure(["H", "L1", "L2"], [("L1", "H"), ("L2", "H")])
print("\nfig6 profile (k=3, a=3, v=3):")
for n, verdict in profile(fig6, pol6, run_bound=3, alpha_bound=3, view_bound=3).items():
    print(f"  {n.value:8s} {verdict.render()}")
