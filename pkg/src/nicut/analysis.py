"""Exact decision procedures for view/action-sequence compatibility.

Whether an attacker action sequence and a victim view can co-occur in a run
is decided by reachability in a finite product graph, not by bounded run
search: an "incompatible" answer is a claim about the infinite run set, and
the product reduces it to finitely many (state, progress) nodes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Iterable, NamedTuple

from .errors import ForeignActionInAlpha, MalformedView, ViewInitialMismatch
from .model import ACT, OBS, Run, SystemDef, View, compute_view, enumerate_runs


class ProductState(NamedTuple):
    """Search node: system state, constrained actions consumed, view produced.

    view_index always points at an observation position of the candidate view,
    i.e. the view prefix emitted so far ends on that observation.
    """

    state: str
    alpha_index: int
    view_index: int


@dataclass(frozen=True)
class Compatibility:
    """Decision plus a witness run when the answer is positive."""

    compatible: bool
    witness: Run | None = None

    def __bool__(self) -> bool:
        return self.compatible


def _check_candidate_view(system: SystemDef, viewer: str, beta: View) -> None:
    beta.check_well_formed()
    if beta.items[0] != (OBS, system.obs(viewer, system.initial)):
        raise ViewInitialMismatch(
            f"view starts with {beta.items[0][1]!r}, viewer {viewer!r} initially "
            f"observes {system.obs(viewer, system.initial)!r}")


def _product_search(
    system: SystemDef,
    constrained: frozenset[str],
    alpha: tuple[str, ...],
    viewer: str,
    beta: View,
) -> Compatibility:
    """BFS over ProductState; accepts when alpha is consumed and beta fully
    produced.  Expansion follows the canonical (action, target) order, so the
    returned witness is the shortest one, ties broken lexicographically."""
    dom = system.action_domain
    items = beta.items
    last = len(items) - 1

    start = ProductState(system.initial, 0, 0)
    parent: dict[ProductState, tuple[ProductState, str, str]] = {}
    queue: deque[ProductState] = deque([start])
    seen = {start}

    def accepting(node: ProductState) -> bool:
        return node.alpha_index == len(alpha) and node.view_index == last

    goal: ProductState | None = start if accepting(start) else None
    while queue and goal is None:
        node = queue.popleft()
        for a in system.action_names:
            d = dom[a]
            ai = node.alpha_index
            if d in constrained:
                if ai == len(alpha) or alpha[ai] != a:
                    continue
                ai += 1
            for t in system.succ.get((node.state, a), ()):
                o = system.obs(viewer, t)
                vi = node.view_index
                if d == viewer:
                    if vi + 2 > last or items[vi + 1] != (ACT, a) or items[vi + 2] != (OBS, o):
                        continue
                    vi += 2
                else:
                    if items[vi] == (OBS, o):
                        pass
                    elif vi + 1 <= last and items[vi + 1] == (OBS, o):
                        vi += 1
                    else:
                        continue
                child = ProductState(t, ai, vi)
                if child in seen:
                    continue
                seen.add(child)
                parent[child] = (node, a, t)
                if accepting(child):
                    goal = child
                    break
                queue.append(child)
            if goal is not None:
                break

    if goal is None:
        return Compatibility(False)

    actions: list[str] = []
    states: list[str] = []
    node = goal
    while node in parent:
        prev, a, t = parent[node]
        actions.append(a)
        states.append(t)
        node = prev
    actions.reverse()
    states.reverse()
    return Compatibility(True, Run((system.initial, *states), tuple(actions)))


def is_compatible(
    system: SystemDef,
    constrained: Iterable[str],
    alpha: Iterable[str],
    viewer: str,
    beta: View,
) -> Compatibility:
    """Exact decision: is there a run whose ``constrained``-domain action
    subsequence is exactly ``alpha`` and whose ``viewer`` view is ``beta``?

    ``constrained`` is a set of domains; actions of other domains are free.
    The decision is not bounded; a negative answer certifies non-existence.
    """
    x = frozenset(constrained)
    seq = tuple(alpha)
    if viewer in x:
        raise ValueError(f"viewer {viewer!r} must not be part of the constrained set")
    dom = system.action_domain
    for a in seq:
        if dom.get(a) not in x:
            raise ForeignActionInAlpha(
                f"action {a!r} of domain {dom.get(a)!r} is outside the constrained set")
    _check_candidate_view(system, viewer, beta)
    return _product_search(system, x, seq, viewer, beta)


def exists_run_with_view(
    system: SystemDef,
    seq: Iterable[str],
    viewer: str,
    beta: View,
) -> Compatibility:
    """Exact decision: is there a run with full action sequence ``seq`` and
    viewer view ``beta``?  (Compatibility with every domain constrained.)"""
    _check_candidate_view(system, viewer, beta)
    return _product_search(system, frozenset(system.domains), tuple(seq), viewer, beta)


def brute_force_compatible(
    system: SystemDef,
    constrained: Iterable[str],
    alpha: Iterable[str],
    viewer: str,
    beta: View,
    total_run_bound: int,
) -> bool:
    """Independent oracle: naively enumerate runs up to the bound and test the
    definition directly.  Only meaningful as a cross-check in tests; agrees
    with is_compatible once the bound reaches |S|*(|alpha|+1)*(|beta|+1)."""
    x = frozenset(constrained)
    seq = tuple(alpha)
    if total_run_bound < len(seq):
        raise ValueError("bound must be at least |alpha|")
    for run in enumerate_runs(system, total_run_bound):
        if run.act_of(system, x) == seq and compute_view(system, viewer, run) == beta:
            return True
    return False


def exactness_bound(system: SystemDef, alpha: tuple[str, ...], beta: View) -> int:
    """Run-length bound beyond which brute force cannot find anything new."""
    return len(system.states) * (len(alpha) + 1) * (len(beta) + 1)


@lru_cache(maxsize=512)
def runs_with_views(system: SystemDef, viewer: str, max_actions: int) -> tuple[tuple[Run, View], ...]:
    """All runs up to the bound paired with the viewer's view, in enumeration
    order.  Cached; this is the workhorse index behind the GN checkers."""
    dom = system.action_domain
    out: list[tuple[Run, View]] = []
    layer: list[tuple[Run, View]] = [
        (Run.initial(system.initial), View.initial(system.obs(viewer, system.initial)))
    ]
    out.extend(layer)
    for _ in range(max_actions):
        nxt: list[tuple[Run, View]] = []
        for run, view in layer:
            here = run.last
            for a in system.action_names:
                for t in system.succ.get((here, a), ()):
                    o = system.obs(viewer, t)
                    child_view = view.with_own(a, o) if dom[a] == viewer else view.with_foreign(o)
                    nxt.append((run.step(a, t), child_view))
        out.extend(nxt)
        layer = nxt
        if not layer:
            break
    return tuple(out)


@lru_cache(maxsize=512)
def act_view_index(system: SystemDef, viewer: str, max_actions: int) -> dict[tuple[str, ...], frozenset[View]]:
    """Map each action sequence of length <= max_actions to the set of viewer
    views its runs can produce.  Exact per sequence: a run on a fixed action
    sequence has exactly that many actions, so the bound is not a truncation."""
    table: dict[tuple[str, ...], set[View]] = {}
    for run, view in runs_with_views(system, viewer, max_actions):
        table.setdefault(run.act, set()).add(view)
    return {act: frozenset(views) for act, views in table.items()}
