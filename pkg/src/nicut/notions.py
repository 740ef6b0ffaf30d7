"""Security notions: pointwise/setwise nondeducibility on inputs, generalized
noninterference, their cut / high-up / low-down reductions, and purge-based
security for deterministic systems.

Every checker returns a Verdict.  An INSECURE verdict carries a certified
vulnerability that re-validates independently of the code path that found it
(see revalidate_vulnerability); a secure verdict is always explicitly bounded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Iterable

from . import analysis
from .errors import NicutError, NotDeterministic, PolicyEdgePresent
from .model import Run, SystemDef, View, compute_view, enumerate_views
from .policy import (
    Cut,
    Policy,
    abstract_policy,
    abstract_system,
    all_cuts,
    high_up_cut,
    low_down_cut,
    noninterferers,
)


class NotionId(str, Enum):
    GN_PW = "gn-pw"
    L_GN = "l-gn"
    H_GN = "h-gn"
    C_GN = "c-gn"
    NDI_PW = "ndi-pw"
    NDI_SW = "ndi-sw"
    L_NDI = "l-ndi"
    H_NDI = "h-ndi"
    C_NDI = "c-ndi"
    P_SEC = "p-sec"

    def __str__(self) -> str:
        return self.value


#: Direct implication edges between notions (stronger -> weaker); the
#: equivalence of the high-up and all-cuts flavours of generalized
#: noninterference appears as a pair of opposite edges.
LATTICE_EDGES: frozenset[tuple[NotionId, NotionId]] = frozenset({
    (NotionId.C_GN, NotionId.L_GN),
    (NotionId.H_GN, NotionId.L_GN),
    (NotionId.H_GN, NotionId.C_GN),
    (NotionId.C_GN, NotionId.H_GN),
    (NotionId.L_GN, NotionId.GN_PW),
    (NotionId.GN_PW, NotionId.NDI_SW),
    (NotionId.NDI_SW, NotionId.NDI_PW),
    (NotionId.C_NDI, NotionId.L_NDI),
    (NotionId.C_NDI, NotionId.H_NDI),
    (NotionId.L_NDI, NotionId.NDI_SW),
    (NotionId.H_NDI, NotionId.NDI_PW),
    (NotionId.C_GN, NotionId.C_NDI),
    (NotionId.H_GN, NotionId.H_NDI),
    (NotionId.L_GN, NotionId.L_NDI),
})

#: Notions whose verdict can only improve when policy edges are added.
MONOTONIC_NOTIONS: frozenset[NotionId] = frozenset({
    NotionId.GN_PW, NotionId.H_GN, NotionId.C_GN,
    NotionId.NDI_PW, NotionId.NDI_SW, NotionId.C_NDI,
})


def lattice_implications() -> frozenset[tuple[NotionId, NotionId]]:
    """Transitive closure of the implication edges."""
    closed = set(LATTICE_EDGES)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(tuple(closed), tuple(closed)):
            if b == c and (a, d) not in closed and a != d:
                closed.add((a, d))
                changed = True
    return frozenset(closed)


class Direction(str, Enum):
    PLUS = "plus"    # an insertion cannot be matched
    MINUS = "minus"  # a deletion cannot be matched

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class GnVulnerability:
    """Witness that inserting (PLUS) or deleting (MINUS) one forbidden action
    around the witness run's action sequence cannot preserve the victim view."""

    victim: str
    alpha0: tuple[str, ...]
    action: str
    alpha1: tuple[str, ...]
    beta: View
    direction: Direction
    witness: Run
    policy: Policy
    cut: Cut | None = None

    @property
    def witness_sequence(self) -> tuple[str, ...]:
        if self.direction is Direction.PLUS:
            return self.alpha0 + self.alpha1
        return self.alpha0 + (self.action,) + self.alpha1

    @property
    def refuted_sequence(self) -> tuple[str, ...]:
        if self.direction is Direction.PLUS:
            return self.alpha0 + (self.action,) + self.alpha1
        return self.alpha0 + self.alpha1

    def render(self) -> str:
        a0 = " ".join(self.alpha0) or "ε"
        a1 = " ".join(self.alpha1) or "ε"
        where = f" at cut {self.cut.render()}" if self.cut else ""
        return (f"GN{'+' if self.direction is Direction.PLUS else '-'} violation for "
                f"victim {self.victim}{where}: ({a0}, {self.action}, {a1}) "
                f"with view {self.beta.render()} (witness run: {self.witness.render()})")


@dataclass(frozen=True)
class NdiVulnerability:
    """Witness that the attacker sequence alpha and victim view beta never
    co-occur, although beta itself is attainable (beta_witness shows how)."""

    victim: str
    attackers: frozenset[str]
    alpha: tuple[str, ...]
    beta: View
    beta_witness: Run
    policy: Policy
    cut: Cut | None = None

    def render(self) -> str:
        a = " ".join(self.alpha) or "ε"
        who = "{" + ", ".join(sorted(self.attackers)) + "}"
        where = f" at cut {self.cut.render()}" if self.cut else ""
        return (f"NDI violation for victim {self.victim}{where}: no run lets {who} "
                f"perform exactly ({a}) while {self.victim} observes {self.beta.render()}")


@dataclass(frozen=True)
class PurgeVulnerability:
    """Two action sequences with equal purges but different final observations."""

    victim: str
    alpha: tuple[str, ...]
    beta: tuple[str, ...]
    purged: tuple[str, ...]
    obs_alpha: str
    obs_beta: str
    policy: Policy

    def render(self) -> str:
        a = " ".join(self.alpha) or "ε"
        b = " ".join(self.beta) or "ε"
        p = " ".join(self.purged) or "ε"
        return (f"purge violation for victim {self.victim}: ({a}) and ({b}) both purge "
                f"to ({p}) but end with observations {self.obs_alpha} vs {self.obs_beta}")


Vulnerability = GnVulnerability | NdiVulnerability | PurgeVulnerability


@dataclass(frozen=True)
class Bounds:
    run_bound: int | None = None
    alpha_bound: int | None = None
    view_bound: int | None = None

    def render(self) -> str:
        parts = []
        if self.run_bound is not None:
            parts.append(f"runs<={self.run_bound}")
        if self.alpha_bound is not None:
            parts.append(f"alpha<={self.alpha_bound}")
        if self.view_bound is not None:
            parts.append(f"views<={self.view_bound}")
        return ", ".join(parts) or "unbounded"


class Status(str, Enum):
    SECURE_UP_TO = "secure-up-to"
    INSECURE = "insecure"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Verdict:
    """INSECURE verdicts are unconditional (the witness certifies them);
    secure verdicts only mean no violation exists within the stated bounds."""

    status: Status
    bounds: Bounds
    vulnerability: Vulnerability | None = None

    @property
    def secure(self) -> bool:
        return self.status is Status.SECURE_UP_TO

    def render(self) -> str:
        if self.secure:
            return f"SECURE_UP_TO({self.bounds.render()})"
        return f"INSECURE: {self.vulnerability.render()}"


# --- generalized noninterference ------------------------------------------------


@lru_cache(maxsize=4096)
def _gn_pair_core(system: SystemDef, source: str, victim: str, run_bound: int):
    """Policy-independent search for the first insertion/deletion failure.

    Deletion failures are swept before insertion failures; within a sweep the
    order is run enumeration order, then position, then action.  Queries ask
    for runs on a fixed action sequence of length <= run_bound + 1, so the
    index over runs of that length answers them exactly.
    """
    pairs = analysis.runs_with_views(system, victim, run_bound + 1)
    index = analysis.act_view_index(system, victim, run_bound + 1)
    scan = [(r, v) for r, v in pairs if len(r) <= run_bound]
    empty: frozenset[View] = frozenset()
    for run, view in scan:
        act = run.act
        for i, a in enumerate(act):
            if system.action_domain[a] != source:
                continue
            if view not in index.get(act[:i] + act[i + 1:], empty):
                return (Direction.MINUS, run, view, i, a)
    own = system.domain_actions.get(source, ())
    for run, view in scan:
        act = run.act
        for i in range(len(act) + 1):
            for a in own:
                if view not in index.get(act[:i] + (a,) + act[i:], empty):
                    return (Direction.PLUS, run, view, i, a)
    return None


def check_gn_pair(system: SystemDef, policy: Policy, source: str, victim: str,
                  run_bound: int) -> Verdict:
    """Insertion/deletion closure of the victim's views under one forbidden
    source domain, over all runs with at most run_bound actions."""
    if policy.allows(source, victim):
        raise PolicyEdgePresent(f"{source} may interfere with {victim}; nothing to check")
    bounds = Bounds(run_bound=run_bound)
    hit = _gn_pair_core(system, source, victim, run_bound)
    if hit is None:
        return Verdict(Status.SECURE_UP_TO, bounds)
    direction, run, view, i, a = hit
    act = run.act
    if direction is Direction.MINUS:
        vuln = GnVulnerability(victim, act[:i], a, act[i + 1:], view,
                               Direction.MINUS, run, policy)
    else:
        vuln = GnVulnerability(victim, act[:i], a, act[i:], view,
                               Direction.PLUS, run, policy)
    return Verdict(Status.INSECURE, bounds, vuln)


def check_gn_pw(system: SystemDef, policy: Policy, run_bound: int) -> Verdict:
    """Conjunction of check_gn_pair over every ordered pair the policy forbids."""
    for source in policy.domains:
        for victim in policy.domains:
            if policy.allows(source, victim):
                continue
            verdict = check_gn_pair(system, policy, source, victim, run_bound)
            if not verdict.secure:
                return verdict
    return Verdict(Status.SECURE_UP_TO, Bounds(run_bound=run_bound))


# --- nondeducibility on inputs ----------------------------------------------------


def _alpha_space(system: SystemDef, attackers: frozenset[str], alpha_bound: int):
    letters = tuple(sorted(system.actions_of(attackers)))
    for n in range(alpha_bound + 1):
        yield from itertools.product(letters, repeat=n)


@lru_cache(maxsize=4096)
def _ndi_core(system: SystemDef, attackers: frozenset[str], victim: str,
              alpha_bound: int, view_bound: int):
    """First (alpha, beta) pair that is not compatible, in deterministic order.

    beta ranges over the victim's views of runs with at most view_bound
    actions; each individual query is decided exactly (unbounded runs)."""
    views = sorted(enumerate_views(system, victim, view_bound), key=View.sort_key)
    for alpha in _alpha_space(system, attackers, alpha_bound):
        for beta in views:
            if not analysis.is_compatible(system, attackers, alpha, victim, beta):
                return (alpha, beta)
    return None


def _ndi_vulnerability(system: SystemDef, policy: Policy, attackers: frozenset[str],
                       victim: str, alpha: tuple[str, ...], beta: View) -> NdiVulnerability:
    witness = analysis.is_compatible(system, frozenset(), (), victim, beta).witness
    if witness is None:
        raise NicutError("candidate view is not attainable; enumeration is broken")
    return NdiVulnerability(victim, attackers, alpha, beta, witness, policy)


def check_ndi_pw(system: SystemDef, policy: Policy, alpha_bound: int,
                 view_bound: int) -> Verdict:
    """Per forbidden pair (u, v): every u action sequence must be compatible
    with every v view."""
    bounds = Bounds(alpha_bound=alpha_bound, view_bound=view_bound)
    for attacker in policy.domains:
        for victim in policy.domains:
            if policy.allows(attacker, victim):
                continue
            hit = _ndi_core(system, frozenset({attacker}), victim, alpha_bound, view_bound)
            if hit is not None:
                alpha, beta = hit
                vuln = _ndi_vulnerability(system, policy, frozenset({attacker}),
                                          victim, alpha, beta)
                return Verdict(Status.INSECURE, bounds, vuln)
    return Verdict(Status.SECURE_UP_TO, bounds)


def check_ndi_sw(system: SystemDef, policy: Policy, alpha_bound: int,
                 view_bound: int) -> Verdict:
    """Per victim: the set of all domains forbidden to interfere with it,
    acting jointly, must be unable to exclude any of its views."""
    bounds = Bounds(alpha_bound=alpha_bound, view_bound=view_bound)
    for victim in policy.domains:
        attackers = noninterferers(policy, victim)
        if not attackers:
            continue
        hit = _ndi_core(system, attackers, victim, alpha_bound, view_bound)
        if hit is not None:
            alpha, beta = hit
            vuln = _ndi_vulnerability(system, policy, attackers, victim, alpha, beta)
            return Verdict(Status.INSECURE, bounds, vuln)
    return Verdict(Status.SECURE_UP_TO, bounds)


# --- cut reductions -----------------------------------------------------------------


class CutFamily(str, Enum):
    ALL = "all"
    HIGH_UP = "high-up"
    LOW_DOWN = "low-down"

    def __str__(self) -> str:
        return self.value


def cuts_of_family(policy: Policy, family: CutFamily) -> tuple[Cut, ...]:
    """The cut family in canonical order, degenerate entries skipped,
    duplicates removed while preserving first occurrence."""
    if family is CutFamily.ALL:
        return all_cuts(policy)
    maker = high_up_cut if family is CutFamily.HIGH_UP else low_down_cut
    out: list[Cut] = []
    for u in policy.domains:
        cut = maker(policy, u)
        if cut is not None and cut not in out:
            out.append(cut)
    return tuple(out)


def check_cut_family(system: SystemDef, policy: Policy, base: str, family: CutFamily,
                     *, run_bound: int | None = None, alpha_bound: int | None = None,
                     view_bound: int | None = None) -> Verdict:
    """Reduce to the two-domain case over a family of cuts.

    For each cut the abstracted system is checked for every forbidden pair of
    the abstracted policy (both directions when the blocks are mutually
    non-interfering), via the bounded GN or setwise-NDI checker; the first
    vulnerability is returned tagged with its cut.
    """
    if base == "gn":
        bounds = Bounds(run_bound=run_bound)
    elif base == "ndi":
        bounds = Bounds(alpha_bound=alpha_bound, view_bound=view_bound)
    else:
        raise ValueError(f"unknown base notion {base!r}")
    for cut in cuts_of_family(policy, family):
        abstraction = cut.as_abstraction()
        absys = abstract_system(system, abstraction)
        abspol = abstract_policy(policy, abstraction)
        if base == "gn":
            verdict = check_gn_pw(absys, abspol, run_bound)
        else:
            verdict = check_ndi_sw(absys, abspol, alpha_bound, view_bound)
        if not verdict.secure:
            return Verdict(Status.INSECURE, bounds,
                           replace(verdict.vulnerability, cut=cut))
    return Verdict(Status.SECURE_UP_TO, bounds)


# --- purge-based security for deterministic systems -----------------------------------


def purge(system: SystemDef, policy: Policy, victim: str,
          alpha: Iterable[str]) -> tuple[str, ...]:
    """Keep exactly the actions whose domain may interfere with the victim."""
    dom = system.action_domain
    return tuple(a for a in alpha if policy.allows(dom[a], victim))


def check_p_secure(system: SystemDef, policy: Policy, run_bound: int) -> Verdict:
    """Deterministic systems only: action sequences with equal purges must
    produce equal victim observations.  Checked for all sequences up to the
    bound by grouping purge classes."""
    if not system.deterministic:
        raise NotDeterministic("purge-based security needs a deterministic system")
    bounds = Bounds(run_bound=run_bound)
    step = {k: ts[0] for k, ts in system.succ.items()}
    for victim in system.domains:
        table: dict[tuple[str, ...], tuple[tuple[str, ...], str]] = {}
        layer: list[tuple[tuple[str, ...], str]] = [((), system.initial)]
        depth = 0
        while layer and depth <= run_bound:
            for alpha, state in layer:
                o = system.obs(victim, state)
                purged = purge(system, policy, victim, alpha)
                if purged not in table:
                    table[purged] = (alpha, str(o))
                elif table[purged][1] != str(o):
                    first_alpha, first_obs = table[purged]
                    vuln = PurgeVulnerability(victim, first_alpha, alpha, purged,
                                              first_obs, str(o), policy)
                    return Verdict(Status.INSECURE, bounds, vuln)
            depth += 1
            if depth > run_bound:
                break
            layer = [(alpha + (a,), step[(state, a)])
                     for alpha, state in layer for a in system.action_names]
    return Verdict(Status.SECURE_UP_TO, bounds)


# --- profiles and re-validation -----------------------------------------------------


def default_view_bound(run_bound: int) -> int:
    return 2 * run_bound + 1


def profile(system: SystemDef, policy: Policy, *, run_bound: int = 4,
            alpha_bound: int = 3, view_bound: int | None = None
            ) -> dict[NotionId, Verdict]:
    """All applicable notions under shared bounds; purge-based security is
    included only for deterministic systems."""
    v = default_view_bound(run_bound) if view_bound is None else view_bound
    out: dict[NotionId, Verdict] = {
        NotionId.GN_PW: check_gn_pw(system, policy, run_bound),
        NotionId.L_GN: check_cut_family(system, policy, "gn", CutFamily.LOW_DOWN,
                                        run_bound=run_bound),
        NotionId.H_GN: check_cut_family(system, policy, "gn", CutFamily.HIGH_UP,
                                        run_bound=run_bound),
        NotionId.C_GN: check_cut_family(system, policy, "gn", CutFamily.ALL,
                                        run_bound=run_bound),
        NotionId.NDI_PW: check_ndi_pw(system, policy, alpha_bound, v),
        NotionId.NDI_SW: check_ndi_sw(system, policy, alpha_bound, v),
        NotionId.L_NDI: check_cut_family(system, policy, "ndi", CutFamily.LOW_DOWN,
                                         alpha_bound=alpha_bound, view_bound=v),
        NotionId.H_NDI: check_cut_family(system, policy, "ndi", CutFamily.HIGH_UP,
                                         alpha_bound=alpha_bound, view_bound=v),
        NotionId.C_NDI: check_cut_family(system, policy, "ndi", CutFamily.ALL,
                                         alpha_bound=alpha_bound, view_bound=v),
    }
    if system.deterministic:
        out[NotionId.P_SEC] = check_p_secure(system, policy, run_bound)
    return out


def check_notion(system: SystemDef, policy: Policy, notion: NotionId, *,
                 run_bound: int = 4, alpha_bound: int = 3,
                 view_bound: int | None = None) -> Verdict:
    """Dispatch a single notion with the shared bound conventions."""
    v = default_view_bound(run_bound) if view_bound is None else view_bound
    if notion is NotionId.GN_PW:
        return check_gn_pw(system, policy, run_bound)
    if notion is NotionId.NDI_PW:
        return check_ndi_pw(system, policy, alpha_bound, v)
    if notion is NotionId.NDI_SW:
        return check_ndi_sw(system, policy, alpha_bound, v)
    if notion is NotionId.P_SEC:
        return check_p_secure(system, policy, run_bound)
    family = {NotionId.L_GN: CutFamily.LOW_DOWN, NotionId.H_GN: CutFamily.HIGH_UP,
              NotionId.C_GN: CutFamily.ALL, NotionId.L_NDI: CutFamily.LOW_DOWN,
              NotionId.H_NDI: CutFamily.HIGH_UP, NotionId.C_NDI: CutFamily.ALL}[notion]
    if notion in (NotionId.L_GN, NotionId.H_GN, NotionId.C_GN):
        return check_cut_family(system, policy, "gn", family, run_bound=run_bound)
    return check_cut_family(system, policy, "ndi", family,
                            alpha_bound=alpha_bound, view_bound=v)


def revalidate_vulnerability(system: SystemDef, policy: Policy,
                             vuln: Vulnerability) -> None:
    """Re-check a vulnerability from scratch against the base system/policy.

    Raises NicutError when any part of the certificate fails.  The checks go
    through the product-graph procedures, which are independent of the
    enumeration indexes the checkers used to find the witness.
    """
    if isinstance(vuln, PurgeVulnerability):
        _revalidate_purge(system, policy, vuln)
        return
    if vuln.cut is not None:
        vuln.cut.check(policy)
        abstraction = vuln.cut.as_abstraction()
        target_system = abstract_system(system, abstraction)
        target_policy = abstract_policy(policy, abstraction)
    else:
        target_system, target_policy = system, policy
    if target_policy != vuln.policy:
        raise NicutError("stored policy does not match the policy induced by the cut")
    if isinstance(vuln, GnVulnerability):
        _revalidate_gn(target_system, vuln)
    elif isinstance(vuln, NdiVulnerability):
        _revalidate_ndi(target_system, vuln)
    else:  # pragma: no cover - exhaustive
        raise NicutError(f"unknown vulnerability type {type(vuln).__name__}")


def _revalidate_gn(system: SystemDef, vuln: GnVulnerability) -> None:
    if vuln.policy.allows(system.action_domain[vuln.action], vuln.victim):
        raise NicutError("the modified action's domain may interfere with the victim")
    system.check_run(vuln.witness)
    if vuln.witness.act != vuln.witness_sequence:
        raise NicutError("witness run does not spell the witness action sequence")
    if compute_view(system, vuln.victim, vuln.witness) != vuln.beta:
        raise NicutError("witness run does not produce the recorded view")
    if analysis.exists_run_with_view(system, vuln.refuted_sequence, vuln.victim, vuln.beta):
        raise NicutError("a run on the modified sequence attains the view after all")


def _revalidate_ndi(system: SystemDef, vuln: NdiVulnerability) -> None:
    dom = system.action_domain
    for a in vuln.alpha:
        if dom[a] not in vuln.attackers:
            raise NicutError(f"alpha action {a!r} is not an attacker action")
    for x in vuln.attackers:
        if vuln.policy.allows(x, vuln.victim):
            raise NicutError(f"attacker {x!r} may interfere with the victim")
    system.check_run(vuln.beta_witness)
    if compute_view(system, vuln.victim, vuln.beta_witness) != vuln.beta:
        raise NicutError("beta witness run does not produce the recorded view")
    if analysis.is_compatible(system, vuln.attackers, vuln.alpha, vuln.victim, vuln.beta):
        raise NicutError("alpha and beta are compatible after all")


def _revalidate_purge(system: SystemDef, policy: Policy, vuln: PurgeVulnerability) -> None:
    if not system.deterministic:
        raise NicutError("purge vulnerabilities only apply to deterministic systems")
    if policy != vuln.policy:
        raise NicutError("stored policy does not match")
    if purge(system, policy, vuln.victim, vuln.alpha) != vuln.purged:
        raise NicutError("alpha does not purge to the recorded sequence")
    if purge(system, policy, vuln.victim, vuln.beta) != vuln.purged:
        raise NicutError("beta does not purge to the recorded sequence")
    step = {k: ts[0] for k, ts in system.succ.items()}

    def dest(seq: tuple[str, ...]) -> str:
        s = system.initial
        for a in seq:
            s = step[(s, a)]
        return s

    oa = str(system.obs(vuln.victim, dest(vuln.alpha)))
    ob = str(system.obs(vuln.victim, dest(vuln.beta)))
    if (oa, ob) != (vuln.obs_alpha, vuln.obs_beta):
        raise NicutError("recorded observations do not match the transition function")
    if oa == ob:
        raise NicutError("observations agree; not a violation")
