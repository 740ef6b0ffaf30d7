"""Random model generation and cross-notion consistency machinery.

This module turns the relationships between the notions into executable
checks: vulnerability translation between cuts, implication-lattice
consistency over random systems, and monotonicity sweeps over all
transitively-closed policy supersets.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from typing import Iterable

from .errors import PrerequisiteViolated, TranslationFailed
from .model import SystemDef, compute_view, validate_system
from .notions import (
    MONOTONIC_NOTIONS,
    GnVulnerability,
    NdiVulnerability,
    NotionId,
    Verdict,
    check_notion,
    lattice_implications,
    profile,
    revalidate_vulnerability,
)
from .policy import (
    Cut,
    Policy,
    abstract_policy,
    abstract_system,
    block_name,
    closure,
    noninterferers,
)


@dataclass(frozen=True)
class GenParams:
    """Knobs for reproducible random generation; everything derives from seed."""

    seed: int
    max_states: int = 4
    max_domains: int = 3
    max_actions_per_domain: int = 1
    obs_alphabet_size: int = 2
    branching: int = 2
    deterministic_fraction: float = 0.3

    def __post_init__(self):
        if self.max_states < 1 or self.max_domains < 2 or self.max_actions_per_domain < 1:
            raise ValueError("counts must be >= 1 and max_domains >= 2")
        if self.obs_alphabet_size < 1 or self.branching < 1:
            raise ValueError("obs_alphabet_size and branching must be >= 1")


def random_system(params: GenParams) -> SystemDef:
    """An input-enabled system drawn deterministically from the seed.

    A fixed fraction of seeds produce deterministic systems so the purge-based
    checker gets exercised; observation alphabets are kept small to make
    collisions, and hence interesting flows, likely.
    """
    rng = random.Random(f"system-{params.seed}")
    n_states = rng.randint(min(2, params.max_states), params.max_states)
    n_domains = rng.randint(2, params.max_domains)
    states = [f"s{i}" for i in range(n_states)]
    domains = [f"d{i}" for i in range(n_domains)]
    obs_values = [f"o{i}" for i in range(params.obs_alphabet_size)]
    deterministic = rng.random() < params.deterministic_fraction

    actions: dict[str, str] = {}
    for d in domains:
        for j in range(rng.randint(1, params.max_actions_per_domain)):
            actions[f"a_{d}_{j}"] = d

    observations = {(d, s): rng.choice(obs_values) for d in domains for s in states}

    transitions: set[tuple[str, str, str]] = set()
    for s in states:
        for a in actions:
            width = 1 if deterministic else rng.randint(1, params.branching)
            for t in rng.sample(states, min(width, len(states))):
                transitions.add((s, a, t))

    system = SystemDef.build(
        name=f"random-{params.seed}",
        states=states,
        initial="s0",
        actions=actions,
        observations=observations,
        transitions=transitions,
    )
    return validate_system(system)


def random_policy(params: GenParams, domains: Iterable[str]) -> Policy:
    """A random relation closed reflexively and transitively; seed-deterministic."""
    rng = random.Random(f"policy-{params.seed}")
    doms = sorted(domains)
    edges = {(u, v) for u in doms for v in doms if u != v and rng.random() < 0.3}
    return closure(doms, edges)


# --- vulnerability translation (the executable content of the cut lemmas) ----------


def _pick_target_block(cut: Cut, forbidden_sources: Iterable[str], victim_members: frozenset[str],
                       policy: Policy) -> frozenset[str]:
    """A block G of the target cut that contains the victim block and whose
    abstracted policy forbids the block of every given source domain from
    interfering with it; raises when there is none."""
    sources = tuple(forbidden_sources)
    for g in (cut.high, cut.low):
        if not victim_members <= g:
            continue
        ok = True
        for src in sources:
            src_block = cut.high if src in cut.high else cut.low
            if any(policy.allows(x, y) for x in src_block for y in g):
                ok = False
                break
        if ok:
            return g
    raise PrerequisiteViolated(
        f"no block of {cut.render()} contains {sorted(victim_members)} and is "
        f"protected from {sorted(set(sources))}")


def _victim_members(vuln: GnVulnerability | NdiVulnerability) -> frozenset[str]:
    if vuln.cut is None:
        return frozenset({vuln.victim})
    if block_name(vuln.cut.high) == vuln.victim:
        return vuln.cut.high
    return vuln.cut.low


def translate_gn_vulnerability(system: SystemDef, policy: Policy,
                               vuln: GnVulnerability, target: Cut) -> GnVulnerability:
    """Carry a GN vulnerability over to another cut.

    Prerequisites: the target has a block G that contains the victim block and
    that the modified action's domain may not interfere with.  The new view is
    the G view of the stored witness run; the result is re-validated before it
    is returned.
    """
    target.check(policy)
    src = system.action_domain[vuln.action]
    g = _pick_target_block(target, [src], _victim_members(vuln), policy)
    abstraction = target.as_abstraction()
    absys = abstract_system(system, abstraction)
    beta = compute_view(absys, block_name(g), vuln.witness)
    out = GnVulnerability(
        victim=block_name(g),
        alpha0=vuln.alpha0,
        action=vuln.action,
        alpha1=vuln.alpha1,
        beta=beta,
        direction=vuln.direction,
        witness=vuln.witness,
        policy=abstract_policy(policy, abstraction),
        cut=target,
    )
    try:
        revalidate_vulnerability(system, policy, out)
    except Exception as exc:
        raise TranslationFailed(f"translated GN vulnerability does not hold: {exc}") from exc
    return out


def translate_ndi_vulnerability(system: SystemDef, policy: Policy,
                                vuln: NdiVulnerability, target: Cut) -> NdiVulnerability:
    """Carry an NDI vulnerability over to another cut.

    Prerequisites: the target has a block G containing the victim block such
    that the domain of every alpha action may not interfere with G.  The new
    view is the G view of the run that attained the old one; re-validated
    before returning.
    """
    target.check(policy)
    sources = {system.action_domain[a] for a in vuln.alpha}
    g = _pick_target_block(target, sources, _victim_members(vuln), policy)
    abstraction = target.as_abstraction()
    absys = abstract_system(system, abstraction)
    abspol = abstract_policy(policy, abstraction)
    g_name = block_name(g)
    attackers = noninterferers(abspol, g_name)
    for a in vuln.alpha:
        if absys.action_domain[a] not in attackers:
            raise PrerequisiteViolated(
                f"alpha action {a!r} is not forbidden for block {g_name}")
    beta = compute_view(absys, g_name, vuln.beta_witness)
    out = NdiVulnerability(
        victim=g_name,
        attackers=attackers,
        alpha=vuln.alpha,
        beta=beta,
        beta_witness=vuln.beta_witness,
        policy=abspol,
        cut=target,
    )
    try:
        revalidate_vulnerability(system, policy, out)
    except Exception as exc:
        raise TranslationFailed(f"translated NDI vulnerability does not hold: {exc}") from exc
    return out


# --- lattice consistency --------------------------------------------------------------


@dataclass(frozen=True)
class LatticeViolation:
    stronger: NotionId
    weaker: NotionId
    label: str
    stronger_verdict: Verdict
    weaker_verdict: Verdict

    def render(self) -> str:
        return (f"{self.label}: {self.stronger} reported secure but {self.weaker} "
                f"found {self.weaker_verdict.vulnerability.render()}")


@dataclass
class LatticeReport:
    trials: int = 0
    checked_edges: int = 0
    violations: list[LatticeViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_profile_lattice(verdicts: dict[NotionId, Verdict], label: str = "") -> list[LatticeViolation]:
    """Violations of the implication order inside one profile: an implication
    X -> Y is broken when X is (boundedly) secure but Y holds a certified
    vulnerability.  Also enforces that the high-up and all-cuts flavours of
    generalized noninterference agree."""
    out = []
    for stronger, weaker in sorted(lattice_implications()):
        if stronger not in verdicts or weaker not in verdicts:
            continue
        if verdicts[stronger].secure and not verdicts[weaker].secure:
            out.append(LatticeViolation(stronger, weaker, label,
                                        verdicts[stronger], verdicts[weaker]))
    hgn, cgn = verdicts.get(NotionId.H_GN), verdicts.get(NotionId.C_GN)
    if hgn is not None and cgn is not None and hgn.secure != cgn.secure:
        first, second = (NotionId.H_GN, NotionId.C_GN) if hgn.secure else (NotionId.C_GN, NotionId.H_GN)
        out.append(LatticeViolation(first, second, label + " (equivalence)",
                                    verdicts[first], verdicts[second]))
    return out


def matched_bounds(run_bound: int = 4) -> dict[str, int]:
    """Bound set under which the implication edges are exercised soundly.

    The insertion/deletion chain that turns a nondeducibility vulnerability
    into a generalized-noninterference one passes through runs of length up to
    view_bound + alpha_bound, so the run bound must cover that sum; all other
    translations preserve the witness run and alpha as they are.
    """
    alpha_bound = max(1, run_bound // 3)
    view_bound = run_bound - alpha_bound
    return {"run_bound": run_bound, "alpha_bound": alpha_bound, "view_bound": view_bound}


def lattice_consistency_check(trials: int, params: GenParams,
                              bounds: dict[str, int] | None = None) -> LatticeReport:
    """Profile random (system, policy) pairs and collect implication violations."""
    bounds = bounds or matched_bounds()
    report = LatticeReport()
    for i in range(trials):
        p = replace(params, seed=params.seed + i)
        system = random_system(p)
        policy = random_policy(p, system.domains)
        verdicts = profile(system, policy, **bounds)
        report.trials += 1
        report.checked_edges += len(lattice_implications())
        report.violations.extend(check_profile_lattice(verdicts, label=f"seed={p.seed}"))
    return report


# --- monotonicity ----------------------------------------------------------------------


@dataclass(frozen=True)
class MonotonicityFlip:
    smaller: Policy
    larger: Policy
    smaller_verdict: Verdict
    larger_verdict: Verdict

    def added_edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self.larger.edges - self.smaller.edges))

    def render(self) -> str:
        added = ", ".join(f"{u}->{v}" for u, v in self.added_edges())
        return (f"adding {{{added}}} flips the verdict from secure to insecure: "
                f"{self.larger_verdict.vulnerability.render()}")


@dataclass
class MonotonicityReport:
    notion: NotionId
    expected_flips_possible: bool
    policies: int = 0
    flips: list[MonotonicityFlip] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """True when the notion behaved monotonically or flips were expected."""
        return self.expected_flips_possible or not self.flips


def policy_supersets(policy: Policy, limit: int = 2048) -> tuple[Policy, ...]:
    """Every reflexive-transitive superset of the policy, smallest first.

    Exhaustive over the missing edges (fine for the small domain counts the
    sweep is used with); falls back to seeded sampling if the edge space is
    too large to enumerate.
    """
    doms = policy.domains
    missing = sorted({(u, v) for u in doms for v in doms if u != v} - set(policy.edges))
    results: dict[frozenset[tuple[str, str]], Policy] = {}
    if 2 ** len(missing) <= limit:
        subsets = itertools.chain.from_iterable(
            itertools.combinations(missing, r) for r in range(len(missing) + 1))
    else:
        rng = random.Random(f"supersets-{policy.domains}-{sorted(policy.edges)}")
        subsets = itertools.chain(
            [()],
            (tuple(rng.sample(missing, rng.randint(1, len(missing)))) for _ in range(limit)),
        )
    for extra in subsets:
        closed = closure(doms, set(policy.edges) | set(extra))
        results.setdefault(closed.edges, closed)
    return tuple(sorted(results.values(), key=lambda p: (len(p.edges), sorted(p.edges))))


def monotonicity_check(system: SystemDef, policy: Policy, notion: NotionId,
                       bounds: dict[str, int] | None = None) -> MonotonicityReport:
    """Verdicts across all policy supersets, reporting secure-to-insecure flips.

    For the monotonic notions any flip is a defect; for the low-down flavours
    and high-up nondeducibility, flips are the documented expected findings.
    """
    bounds = bounds or matched_bounds()
    supersets = policy_supersets(policy)
    verdicts = {p: check_notion(system, p, notion, **bounds) for p in supersets}
    report = MonotonicityReport(notion=notion,
                                expected_flips_possible=notion not in MONOTONIC_NOTIONS,
                                policies=len(supersets))
    for smaller, larger in itertools.combinations(supersets, 2):
        if smaller.edges < larger.edges and verdicts[smaller].secure and not verdicts[larger].secure:
            report.flips.append(MonotonicityFlip(smaller, larger,
                                                 verdicts[smaller], verdicts[larger]))
    return report


def count_runs_brute(system: SystemDef, max_actions: int) -> int:
    """Independent run counter: plain recursion over the transition relation."""
    def count(state: str, budget: int) -> int:
        if budget == 0:
            return 1
        total = 1
        for a in system.action_names:
            for t in system.succ.get((state, a), ()):
                total += count(t, budget - 1)
        return total

    return count(system.initial, max_actions)
