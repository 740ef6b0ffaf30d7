"""Finite input-enabled transition systems with per-domain observations.

The asynchronous semantics lives here: runs, stutter-absorbing concatenation,
and the view a domain (or coalition) extracts from a run.  Observation values
are opaque hashables; plain systems use strings, abstracted systems use
coalition observations built in :mod:`nicut.policy`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping

from .errors import (
    FewerThanTwoDomains,
    InvalidRun,
    MalformedView,
    MissingObservation,
    NotInputEnabled,
    UndeclaredIdentifier,
    UnknownDomain,
    ValidationError,
)

OBS = "obs"
ACT = "act"


def obs_key(value: Hashable) -> str:
    """Stable rendering of an observation value, used for sorting and display."""
    return str(value)


@dataclass(frozen=True)
class View:
    """Alternating sequence obs (action obs | obs)* as perceived by one viewer.

    Own actions are recorded verbatim followed by the resulting observation;
    foreign steps only show up when they change the observation.  Items are
    (kind, value) pairs with kind ``"act"`` or ``"obs"``.
    """

    items: tuple[tuple[str, Hashable], ...]

    @classmethod
    def initial(cls, obs: Hashable) -> "View":
        return cls(((OBS, obs),))

    @classmethod
    def of(cls, elements: Iterable[Hashable], action_names: Iterable[str]) -> "View":
        """Build a view from raw elements, tagging members of action_names as actions."""
        names = set(action_names)
        return cls(tuple((ACT, e) if e in names else (OBS, e) for e in elements))

    def __len__(self) -> int:
        return len(self.items)

    @property
    def last_obs(self) -> Hashable:
        return self.items[-1][1]

    def with_own(self, action: str, obs: Hashable) -> "View":
        return View(self.items + ((ACT, action), (OBS, obs)))

    def with_foreign(self, obs: Hashable) -> "View":
        if self.items[-1] == (OBS, obs):
            return self
        return View(self.items + ((OBS, obs),))

    def elements(self) -> tuple[Hashable, ...]:
        return tuple(value for _, value in self.items)

    def actions(self) -> tuple[str, ...]:
        return tuple(value for kind, value in self.items if kind == ACT)

    def check_well_formed(self) -> None:
        """Raise MalformedView unless the shape and absorption invariants hold."""
        items = self.items
        if not items or items[0][0] != OBS or items[-1][0] != OBS:
            raise MalformedView("a view must start and end with an observation")
        for i, (kind, _) in enumerate(items):
            if kind not in (OBS, ACT):
                raise MalformedView(f"unknown item kind {kind!r}")
            if kind == ACT:
                if i + 1 >= len(items) or items[i + 1][0] != OBS:
                    raise MalformedView("an action must be followed by an observation")
        for i in range(len(items) - 1):
            if items[i][0] == OBS and items[i + 1] == items[i]:
                raise MalformedView("equal adjacent observations are not absorbed")

    def render(self) -> str:
        return " ".join(obs_key(v) for _, v in self.items)

    def sort_key(self) -> tuple:
        return (len(self.items), tuple((kind, obs_key(v)) for kind, v in self.items))

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.render()


@dataclass(frozen=True)
class Run:
    """Alternating state/action sequence s0 a1 s1 ... an sn."""

    states: tuple[str, ...]
    actions: tuple[str, ...]

    def __post_init__(self):
        if len(self.states) != len(self.actions) + 1:
            raise InvalidRun("a run needs exactly one more state than actions")

    @classmethod
    def initial(cls, state: str) -> "Run":
        return cls((state,), ())

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "Run":
        toks = tuple(tokens)
        if not toks or len(toks) % 2 == 0:
            raise InvalidRun("a run is an odd-length alternation of states and actions")
        return cls(toks[0::2], toks[1::2])

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def first(self) -> str:
        return self.states[0]

    @property
    def last(self) -> str:
        return self.states[-1]

    def step(self, action: str, state: str) -> "Run":
        return Run(self.states + (state,), self.actions + (action,))

    @property
    def act(self) -> tuple[str, ...]:
        return self.actions

    def act_of(self, system: "SystemDef", domains: Iterable[str]) -> tuple[str, ...]:
        """Subsequence of actions performed by the given domains."""
        group = set(domains)
        dom = system.action_domain
        return tuple(a for a in self.actions if dom[a] in group)

    def steps(self) -> Iterator[tuple[str, str, str]]:
        for i, a in enumerate(self.actions):
            yield self.states[i], a, self.states[i + 1]

    def render(self) -> str:
        out = [self.states[0]]
        for a, s in zip(self.actions, self.states[1:]):
            out.extend((a, s))
        return " ".join(out)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.render()


@dataclass(frozen=True)
class SystemDef:
    """A finite nondeterministic system with domain-tagged actions and observations.

    Fields are canonical sorted tuples so values are hashable and two equal
    systems compare equal structurally.  Use :func:`validate_system` to check
    well-formedness (and optionally complete elided self-loops) before handing
    a definition to any decision procedure.
    """

    name: str
    states: tuple[str, ...]
    initial: str
    domains: tuple[str, ...]
    actions: tuple[tuple[str, str], ...]  # (action, domain)
    observations: tuple[tuple[str, str, Hashable], ...]  # (domain, state, value)
    transitions: tuple[tuple[str, str, str], ...]  # (source, action, target)

    @classmethod
    def build(
        cls,
        *,
        name: str = "system",
        states: Iterable[str],
        initial: str,
        actions: Mapping[str, str],
        observations: Mapping[tuple[str, str], Hashable],
        transitions: Iterable[tuple[str, str, str]],
        domains: Iterable[str] | None = None,
    ) -> "SystemDef":
        """Normalize plain mappings/sets into a canonical SystemDef."""
        doms = set(domains) if domains is not None else set(actions.values())
        doms |= {d for d, _ in observations}
        return cls(
            name=name,
            states=tuple(sorted(set(states))),
            initial=initial,
            domains=tuple(sorted(doms)),
            actions=tuple(sorted(actions.items())),
            observations=tuple(sorted(((d, s, v) for (d, s), v in observations.items()),
                                      key=lambda t: (t[0], t[1]))),
            transitions=tuple(sorted(set(transitions))),
        )

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.name, self.states, self.initial, self.domains,
                      self.actions, self.observations, self.transitions))
            object.__setattr__(self, "_hash", h)
        return h

    # -- derived lookups, computed once ---------------------------------------

    @cached_property
    def action_domain(self) -> dict[str, str]:
        return dict(self.actions)

    @cached_property
    def action_names(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.actions)

    @cached_property
    def domain_actions(self) -> dict[str, tuple[str, ...]]:
        per: dict[str, list[str]] = {d: [] for d in self.domains}
        for a, d in self.actions:
            per[d].append(a)
        return {d: tuple(acts) for d, acts in per.items()}

    def actions_of(self, domains: Iterable[str]) -> tuple[str, ...]:
        group = set(domains)
        return tuple(a for a, d in self.actions if d in group)

    @cached_property
    def obs_map(self) -> dict[tuple[str, str], Hashable]:
        return {(d, s): v for d, s, v in self.observations}

    def obs(self, domain: str, state: str) -> Hashable:
        if domain not in self._domain_set:
            raise UnknownDomain(domain)
        return self.obs_map[(domain, state)]

    @cached_property
    def succ(self) -> dict[tuple[str, str], tuple[str, ...]]:
        table: dict[tuple[str, str], list[str]] = {}
        for s, a, t in self.transitions:
            table.setdefault((s, a), []).append(t)
        return {k: tuple(sorted(v)) for k, v in table.items()}

    @cached_property
    def deterministic(self) -> bool:
        return all(len(ts) == 1 for ts in self.succ.values())

    @cached_property
    def _state_set(self) -> frozenset[str]:
        return frozenset(self.states)

    @cached_property
    def _domain_set(self) -> frozenset[str]:
        return frozenset(self.domains)

    def check_run(self, run: Run) -> None:
        """Raise InvalidRun unless run is an initial run of this system."""
        if run.first != self.initial:
            raise InvalidRun(f"run starts at {run.first!r}, not the initial state {self.initial!r}")
        for s, a, t in run.steps():
            if t not in self.succ.get((s, a), ()):
                raise InvalidRun(f"({s}, {a}, {t}) is not a transition")


def validate_system(definition: SystemDef, implicit_self_loops: bool = False) -> SystemDef:
    """Check well-formedness and return a canonicalized system.

    With implicit_self_loops, every missing (state, action) pair gets a
    self-loop first, matching the diagram convention of eliding them;
    otherwise such a gap is an input-enabledness violation.
    """
    states = set(definition.states)
    if definition.initial not in states:
        raise UndeclaredIdentifier("state", definition.initial, "initial")
    domains = set(definition.domains)
    if len(domains) < 2:
        raise FewerThanTwoDomains(len(domains))

    action_domain = dict(definition.actions)
    for a, d in definition.actions:
        if d not in domains:
            raise UndeclaredIdentifier("domain", d, f"action {a}")

    obs_values = set()
    seen: dict[tuple[str, str], Hashable] = {}
    for d, s, v in definition.observations:
        if d not in domains:
            raise UndeclaredIdentifier("domain", d, "observation table")
        if s not in states:
            raise UndeclaredIdentifier("state", s, "observation table")
        if (d, s) in seen and seen[(d, s)] != v:
            raise ValidationError(f"conflicting observations for ({d}, {s})")
        seen[(d, s)] = v
        obs_values.add(v)
    for d in domains:
        for s in states:
            if (d, s) not in seen:
                raise MissingObservation(d, s)
    overlap = obs_values & set(action_domain)
    if overlap:
        raise ValidationError(
            f"action and observation alphabets must be disjoint, both contain {sorted(map(str, overlap))}")

    transitions = set(definition.transitions)
    for s, a, t in transitions:
        if s not in states:
            raise UndeclaredIdentifier("state", s, "transition source")
        if t not in states:
            raise UndeclaredIdentifier("state", t, "transition target")
        if a not in action_domain:
            raise UndeclaredIdentifier("action", a, "transition label")

    enabled = {(s, a) for s, a, _ in transitions}
    for s in sorted(states):
        for a in sorted(action_domain):
            if (s, a) not in enabled:
                if implicit_self_loops:
                    transitions.add((s, a, s))
                else:
                    raise NotInputEnabled(s, a)

    return SystemDef(
        name=definition.name,
        states=tuple(sorted(states)),
        initial=definition.initial,
        domains=tuple(sorted(domains)),
        actions=tuple(sorted(action_domain.items())),
        observations=tuple(sorted(((d, s, v) for (d, s), v in seen.items()),
                                  key=lambda t: (t[0], t[1]))),
        transitions=tuple(sorted(transitions)),
    )


def abs_concat(alpha: Iterable[Hashable], beta: Iterable[Hashable]) -> tuple[Hashable, ...]:
    """Absorptive concatenation: append beta, dropping each element equal to the
    current last element of the accumulated sequence."""
    out = list(alpha)
    for b in beta:
        if out and out[-1] == b:
            continue
        out.append(b)
    return tuple(out)


def compute_view(system: SystemDef, viewer: str, run: Run) -> View:
    """The viewer's asynchronous local history of an initial run."""
    if viewer not in system._domain_set:
        raise UnknownDomain(viewer)
    system.check_run(run)
    dom = system.action_domain
    view = View.initial(system.obs(viewer, run.first))
    for _, a, t in run.steps():
        o = system.obs(viewer, t)
        if dom[a] == viewer:
            view = view.with_own(a, o)
        else:
            view = view.with_foreign(o)
    return view


def enumerate_runs(system: SystemDef, max_actions: int) -> Iterator[Run]:
    """All initial runs with at most max_actions actions, shortest first and
    lexicographic by (action, state) within a length."""
    if max_actions < 0:
        raise ValueError("max_actions must be >= 0")
    layer = [Run.initial(system.initial)]
    yield layer[0]
    for _ in range(max_actions):
        nxt: list[Run] = []
        for run in layer:
            here = run.last
            for a in system.action_names:
                for t in system.succ.get((here, a), ()):
                    child = run.step(a, t)
                    nxt.append(child)
                    yield child
        layer = nxt
        if not layer:
            return


def runs_on_sequence(system: SystemDef, seq: Iterable[str]) -> Iterator[Run]:
    """All initial runs whose full action sequence equals seq, in deterministic order."""
    actions = tuple(seq)
    for a in actions:
        if a not in system.action_domain:
            raise UndeclaredIdentifier("action", a)

    def expand(run: Run, i: int) -> Iterator[Run]:
        if i == len(actions):
            yield run
            return
        for t in system.succ.get((run.last, actions[i]), ()):
            yield from expand(run.step(actions[i], t), i + 1)

    yield from expand(Run.initial(system.initial), 0)


def enumerate_views(system: SystemDef, viewer: str, max_actions: int) -> set[View]:
    """The exact set of viewer views over runs with at most max_actions actions.

    Computed by reachability over (state, view) pairs; a pair already visited
    at a shorter depth cannot contribute new views later, so it is dropped.
    """
    if viewer not in system._domain_set:
        raise UnknownDomain(viewer)
    if max_actions < 0:
        raise ValueError("max_actions must be >= 0")
    dom = system.action_domain
    start = (system.initial, View.initial(system.obs(viewer, system.initial)))
    frontier = {start}
    visited = {start}
    views = {start[1]}
    for _ in range(max_actions):
        nxt: set[tuple[str, View]] = set()
        for state, view in frontier:
            for a in system.action_names:
                for t in system.succ.get((state, a), ()):
                    o = system.obs(viewer, t)
                    child_view = view.with_own(a, o) if dom[a] == viewer else view.with_foreign(o)
                    node = (t, child_view)
                    if node not in visited:
                        visited.add(node)
                        nxt.add(node)
                        views.add(child_view)
        frontier = nxt
        if not frontier:
            break
    return views
