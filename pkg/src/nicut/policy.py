"""Policies over domains, their abstractions, and two-block cuts.

A policy is a reflexive transitive edge relation "may interfere with".
Grouping domains into blocks induces an abstracted policy and an abstracted
system whose observations are per-block functions; a cut is the two-block
case with no high-to-low edge, which is what the security checkers consume.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Hashable, Iterable

from .errors import (
    BlockMismatch,
    MalformedView,
    NotReflexive,
    NotSubBlock,
    NotTransitive,
    UnknownDomain,
)
from .model import ACT, OBS, SystemDef, View


@dataclass(frozen=True)
class Policy:
    """A binary interference relation over an ordered domain set.

    validate_policy enforces reflexivity and transitivity; abstract_policy may
    produce intransitive relations for abstractions with more than two blocks,
    which the checkers reject.
    """

    domains: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.domains, self.edges))
            object.__setattr__(self, "_hash", h)
        return h

    @cached_property
    def _domain_set(self) -> frozenset[str]:
        return frozenset(self.domains)

    def allows(self, u: str, v: str) -> bool:
        """True iff u may interfere with v."""
        return (u, v) in self.edges

    def forbidden_pairs(self) -> tuple[tuple[str, str], ...]:
        """Ordered pairs (u, v) with u not allowed to interfere with v."""
        return tuple((u, v) for u in self.domains for v in self.domains
                     if (u, v) not in self.edges)

    def render(self) -> str:
        nontrivial = sorted((u, v) for u, v in self.edges if u != v)
        body = ", ".join(f"{u}->{v}" for u, v in nontrivial) or "(identity)"
        return f"policy over {{{', '.join(self.domains)}}}: {body}"


def validate_policy(domains: Iterable[str], edges: Iterable[tuple[str, str]]) -> Policy:
    """Accept iff the relation is reflexive and transitive over the domains.

    Reports the first offending domain / triple in canonical order.
    """
    doms = tuple(sorted(set(domains)))
    dom_set = set(doms)
    edge_set = frozenset(edges)
    for u, v in sorted(edge_set):
        if u not in dom_set:
            raise UnknownDomain(u)
        if v not in dom_set:
            raise UnknownDomain(v)
    for u in doms:
        if (u, u) not in edge_set:
            raise NotReflexive(u)
    for u, v in sorted(edge_set):
        for w in doms:
            if (v, w) in edge_set and (u, w) not in edge_set:
                raise NotTransitive(u, v, w)
    return Policy(doms, edge_set)


def closure(domains: Iterable[str], edges: Iterable[tuple[str, str]]) -> Policy:
    """Least reflexive-transitive relation containing the given edges."""
    doms = tuple(sorted(set(domains)))
    closed = {(u, u) for u in doms} | set(edges)
    for w in doms:
        for u in doms:
            if (u, w) not in closed:
                continue
            for v in doms:
                if (w, v) in closed:
                    closed.add((u, v))
    return validate_policy(doms, closed)


def successors(policy: Policy, u: str) -> frozenset[str]:
    """The set of domains u may interfere with (always contains u)."""
    if u not in policy._domain_set:
        raise UnknownDomain(u)
    return frozenset(v for v in policy.domains if policy.allows(u, v))


def interferers(policy: Policy, u: str) -> frozenset[str]:
    """The set of domains that may interfere with u (always contains u)."""
    if u not in policy._domain_set:
        raise UnknownDomain(u)
    return frozenset(v for v in policy.domains if policy.allows(v, u))


def noninterferers(policy: Policy, u: str) -> frozenset[str]:
    """The set of domains that may not interfere with u."""
    return policy._domain_set - interferers(policy, u)


# --- abstractions ---------------------------------------------------------------


def block_name(block: Iterable[str]) -> str:
    """Canonical printable name for a block of domains."""
    return "+".join(sorted(block))


@dataclass(frozen=True)
class CoalitionObs:
    """Observation of a block: one value per member, compared pointwise.

    Members are kept in canonical (sorted) order so equal functions share one
    representation and views over blocks are hashable.
    """

    items: tuple[tuple[str, Hashable], ...]

    @classmethod
    def of(cls, values: dict[str, Hashable]) -> "CoalitionObs":
        return cls(tuple(sorted(values.items())))

    @property
    def members(self) -> tuple[str, ...]:
        return tuple(m for m, _ in self.items)

    def value(self, member: str) -> Hashable:
        for m, v in self.items:
            if m == member:
                return v
        raise UnknownDomain(member)

    def restrict(self, members: Iterable[str]) -> "CoalitionObs":
        keep = set(members)
        if not keep <= set(self.members):
            raise NotSubBlock(f"{sorted(keep)} is not a subset of {list(self.members)}")
        return CoalitionObs(tuple((m, v) for m, v in self.items if m in keep))

    def __str__(self) -> str:
        return "|".join(str(v) for _, v in self.items)


@dataclass(frozen=True)
class Abstraction:
    """A partition of the domain set into disjoint nonempty blocks."""

    blocks: tuple[frozenset[str], ...]

    @classmethod
    def of(cls, blocks: Iterable[Iterable[str]]) -> "Abstraction":
        canon = tuple(sorted((frozenset(b) for b in blocks),
                             key=lambda b: tuple(sorted(b))))
        seen: set[str] = set()
        for b in canon:
            if not b:
                raise BlockMismatch("empty block")
            if seen & b:
                raise BlockMismatch(f"blocks overlap on {sorted(seen & b)}")
            seen |= b
        return cls(canon)

    @classmethod
    def singletons(cls, domains: Iterable[str]) -> "Abstraction":
        return cls.of([{d} for d in domains])

    @cached_property
    def domain_set(self) -> frozenset[str]:
        return frozenset(itertools.chain.from_iterable(self.blocks))

    def block_of(self, domain: str) -> frozenset[str]:
        for b in self.blocks:
            if domain in b:
                return b
        raise UnknownDomain(domain)

    def covers(self, domains: Iterable[str]) -> bool:
        return self.domain_set == set(domains)


@dataclass(frozen=True)
class Cut:
    """An ordered two-block partition (high, low) with no high-to-low edge."""

    high: frozenset[str]
    low: frozenset[str]

    def as_abstraction(self) -> Abstraction:
        return Abstraction.of([self.high, self.low])

    @property
    def high_name(self) -> str:
        return block_name(self.high)

    @property
    def low_name(self) -> str:
        return block_name(self.low)

    def render(self) -> str:
        return f"({{{', '.join(sorted(self.high))}}}, {{{', '.join(sorted(self.low))}}})"

    def check(self, policy: Policy) -> None:
        """Raise unless this is a genuine cut of the policy's domain set."""
        if self.high & self.low or (self.high | self.low) != policy._domain_set:
            raise BlockMismatch("cut blocks must partition the policy's domains")
        if not self.high or not self.low:
            raise BlockMismatch("cut blocks must both be nonempty")
        for u in self.high:
            for v in self.low:
                if policy.allows(u, v):
                    raise BlockMismatch(f"not a cut: {u} -> {v} crosses high to low")


def high_up_cut(policy: Policy, u: str) -> Cut | None:
    """The cut (u's successors, rest); None when one side would be empty."""
    high = successors(policy, u)
    low = policy._domain_set - high
    if not low:
        return None
    return Cut(high, low)


def low_down_cut(policy: Policy, u: str) -> Cut | None:
    """The cut (rest, u's interferers); None when one side would be empty."""
    low = interferers(policy, u)
    high = policy._domain_set - low
    if not high:
        return None
    return Cut(high, low)


def all_cuts(policy: Policy) -> tuple[Cut, ...]:
    """Every two-block partition with both blocks nonempty and no high-to-low
    edge, ordered by (size of high block, members).  Exhaustive subset scan;
    fine for the small domain counts this problem class has."""
    doms = policy.domains
    found: list[Cut] = []
    for r in range(1, len(doms)):
        for high in itertools.combinations(doms, r):
            high_set = frozenset(high)
            low_set = policy._domain_set - high_set
            if any(policy.allows(u, v) for u in high_set for v in low_set):
                continue
            found.append(Cut(high_set, low_set))
    return tuple(found)


@lru_cache(maxsize=1024)
def abstract_policy(policy: Policy, abstraction: Abstraction) -> Policy:
    """The induced relation on blocks: F -> G iff some member of F may
    interfere with some member of G.  For cuts the result is a two-domain
    policy with high never allowed to interfere with low; for coarser
    abstractions it may be intransitive and is returned unvalidated."""
    if not abstraction.covers(policy.domains):
        raise BlockMismatch("abstraction does not cover the policy's domains")
    names = {b: block_name(b) for b in abstraction.blocks}
    edges = set()
    for f in abstraction.blocks:
        for g in abstraction.blocks:
            if any(policy.allows(x, y) for x in f for y in g):
                edges.add((names[f], names[g]))
    return Policy(tuple(sorted(names.values())), frozenset(edges))


@lru_cache(maxsize=1024)
def abstract_system(system: SystemDef, abstraction: Abstraction) -> SystemDef:
    """The same states and transitions viewed through block domains:
    an action belongs to its domain's block, a block observes the tuple of its
    members' observations."""
    if not abstraction.covers(system.domains):
        raise BlockMismatch("abstraction does not cover the system's domains")
    names = {b: block_name(b) for b in abstraction.blocks}
    actions = {a: names[abstraction.block_of(d)] for a, d in system.actions}
    observations = {
        (names[b], s): CoalitionObs.of({m: system.obs(m, s) for m in b})
        for b in abstraction.blocks
        for s in system.states
    }
    return SystemDef.build(
        name=f"{system.name}^{{{'|'.join(sorted(names.values()))}}}",
        states=system.states,
        initial=system.initial,
        actions=actions,
        observations=observations,
        transitions=system.transitions,
        domains=names.values(),
    )


def project_view(system: SystemDef, view: View, members: Iterable[str]) -> View:
    """Restrict a coalition view to a sub-coalition.

    Observations are restricted pointwise, actions of domains outside the
    sub-coalition are dropped, and stutter introduced by the restriction is
    re-absorbed.  ``system`` is the base system (needed to map actions to
    domains); the view must be a coalition view, i.e. its observations must be
    CoalitionObs covering a superset of ``members``.
    """
    target = frozenset(members)
    items = view.items
    if not items or items[0][0] != OBS:
        raise MalformedView("a view must start with an observation")
    first = items[0][1]
    if not isinstance(first, CoalitionObs):
        raise MalformedView("project_view needs a coalition view")
    if not target <= set(first.members):
        raise NotSubBlock(f"{sorted(target)} is not a sub-block of {list(first.members)}")
    dom = system.action_domain

    out: list[tuple[str, Hashable]] = [(OBS, first.restrict(target))]

    def absorb(item: tuple[str, Hashable]) -> None:
        if out[-1] != item:
            out.append(item)

    i = 1
    while i < len(items):
        kind, value = items[i]
        if kind == ACT:
            if i + 1 >= len(items) or items[i + 1][0] != OBS:
                raise MalformedView("an action must be followed by an observation")
            obs = items[i + 1][1]
            if not isinstance(obs, CoalitionObs):
                raise MalformedView("project_view needs a coalition view")
            restricted = obs.restrict(target)
            if dom.get(value) in target:
                out.append((ACT, value))
                out.append((OBS, restricted))
            else:
                absorb((OBS, restricted))
            i += 2
        else:
            if not isinstance(value, CoalitionObs):
                raise MalformedView("project_view needs a coalition view")
            absorb((OBS, value.restrict(target)))
            i += 1
    return View(tuple(out))
