"""The .ni text format: systems plus policies in one line-oriented file.

    system two-level
    domains: H, L
    actions: h@H, l@L
    states: sI*, s0, s1
    obs H: sI=⊥, s0=⊥, s1=⊥
    obs L: sI=0, s0=0, s1=1
    trans: sI -h-> s0, sI -l-> s0, sI -l-> s1
    options: implicit_self_loops=true
    policy: L -> H
    policy-closure: true

The star marks the initial state.  `implicit_self_loops` completes elided
self-loops before validation; `policy-closure` closes the edge list
reflexively and transitively.  Serialization is canonical (sorted, explicit
transitions), so parse-serialize-parse is the identity on its own output.

Abstracted systems round-trip too: block domains are written ``L1+L2`` and
their observations ``0|1`` with values in member order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Hashable

from .errors import ParseError
from .model import SystemDef, validate_system
from .policy import CoalitionObs, Policy, closure, validate_policy

_NAME = re.compile(r"^[^\s,:=@*|]+$")
_TRANS = re.compile(r"^(\S+)\s*-([^\s>]+)->\s*(\S+)$")


@dataclass(frozen=True)
class ModelFile:
    """Parsed .ni file: a validated system, its policy, and the raw options."""

    name: str
    system: SystemDef
    policy: Policy
    options: dict[str, bool]


def _check_name(token: str, what: str, line: int) -> str:
    if not _NAME.match(token):
        raise ParseError(f"invalid {what} {token!r}", line)
    return token


def _split_list(body: str) -> list[str]:
    return [item.strip() for item in body.split(",") if item.strip()]


def _parse_bool(token: str, line: int) -> bool:
    low = token.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ParseError(f"expected a boolean, got {token!r}", line)


def _parse_obs_value(token: str, domain: str, line: int) -> Hashable:
    if "+" in domain:
        members = domain.split("+")
        parts = token.split("|")
        if len(parts) != len(members):
            raise ParseError(
                f"observation {token!r} must have {len(members)} '|'-separated "
                f"values for block {domain!r}", line)
        return CoalitionObs.of(dict(zip(members, parts)))
    return token


def parse_model(text: str, origin: str = "<string>") -> ModelFile:
    """Parse, validate, and return the model; diagnostics carry line numbers."""
    name = None
    domains: list[str] = []
    actions: dict[str, str] = {}
    states: list[str] = []
    initial: str | None = None
    observations: dict[tuple[str, str], Hashable] = {}
    transitions: list[tuple[str, str, str]] = []
    options: dict[str, bool] = {}
    policy_edges: list[tuple[str, str]] = []
    policy_close = False
    saw_policy = False

    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if name is None:
            m = re.match(r"^system\s+(\S+)$", line)
            if not m:
                raise ParseError("expected 'system <name>' as the first directive", lineno)
            name = m.group(1)
            continue
        if ":" not in line:
            raise ParseError(f"expected '<keyword>: ...', got {line!r}", lineno)
        head, body = line.split(":", 1)
        head = head.strip()
        body = body.strip()
        if head == "domains":
            domains.extend(_check_name(d, "domain", lineno) for d in _split_list(body))
        elif head == "actions":
            for item in _split_list(body):
                if "@" not in item:
                    raise ParseError(f"expected 'action@domain', got {item!r}", lineno)
                a, d = item.split("@", 1)
                actions[_check_name(a.strip(), "action", lineno)] = d.strip()
        elif head == "states":
            for item in _split_list(body):
                star = item.endswith("*")
                s = _check_name(item[:-1] if star else item, "state", lineno)
                states.append(s)
                if star:
                    if initial is not None and initial != s:
                        raise ParseError(f"second initial state {s!r}", lineno)
                    initial = s
        elif head == "obs" or head.startswith("obs "):
            dom = head[4:].strip() if head.startswith("obs ") else ""
            if not dom:
                raise ParseError("expected 'obs <domain>: state=value, ...'", lineno)
            for item in _split_list(body):
                if "=" not in item:
                    raise ParseError(f"expected 'state=value', got {item!r}", lineno)
                s, v = (part.strip() for part in item.split("=", 1))
                observations[(dom, s)] = _parse_obs_value(v, dom, lineno)
        elif head == "trans":
            for item in _split_list(body):
                m = _TRANS.match(item)
                if not m:
                    raise ParseError(f"expected 'state -action-> state', got {item!r}", lineno)
                transitions.append((m.group(1), m.group(2), m.group(3)))
        elif head == "options":
            for item in _split_list(body):
                if "=" not in item:
                    raise ParseError(f"expected 'option=value', got {item!r}", lineno)
                k, v = (part.strip() for part in item.split("=", 1))
                options[k] = _parse_bool(v, lineno)
        elif head == "policy":
            saw_policy = True
            for item in _split_list(body):
                m = re.match(r"^(\S+)\s*->\s*(\S+)$", item)
                if not m:
                    raise ParseError(f"expected 'domain -> domain', got {item!r}", lineno)
                policy_edges.append((m.group(1), m.group(2)))
        elif head == "policy-closure":
            policy_close = _parse_bool(body, lineno)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)

    if name is None:
        raise ParseError("empty model: expected 'system <name>'", max(1, len(lines) or 1))
    if initial is None:
        raise ParseError("no state is marked initial (append '*')", len(lines))
    unknown = set(options) - {"implicit_self_loops"}
    if unknown:
        raise ParseError(f"unknown option(s) {sorted(unknown)}", len(lines))

    system = SystemDef.build(
        name=name,
        states=states,
        initial=initial,
        actions=actions,
        observations=observations,
        transitions=transitions,
        domains=domains or None,
    )
    system = validate_system(system, implicit_self_loops=options.get("implicit_self_loops", False))
    if not saw_policy and not policy_close:
        raise ParseError("missing 'policy:' section", len(lines))
    if policy_close:
        policy = closure(system.domains, policy_edges)
    else:
        policy = validate_policy(system.domains, policy_edges)
    if set(policy.domains) != set(system.domains):
        raise ParseError("policy domains differ from system domains", len(lines))
    return ModelFile(name=name, system=system, policy=policy, options=options)


def _obs_token(value: Hashable) -> str:
    return str(value)


def serialize_model(system: SystemDef, policy: Policy, name: str | None = None) -> str:
    """Canonical text for a validated system and policy.

    Transitions are written out in full and the policy keeps its closure flag
    on, so reparsing reproduces exactly the same value.
    """
    out = [f"system {name or system.name}"]
    out.append("domains: " + ", ".join(system.domains))
    if system.actions:
        out.append("actions: " + ", ".join(f"{a}@{d}" for a, d in system.actions))
    out.append("states: " + ", ".join(
        f"{s}*" if s == system.initial else s for s in system.states))
    for d in system.domains:
        cells = ", ".join(f"{s}={_obs_token(system.obs(d, s))}" for s in system.states)
        out.append(f"obs {d}: {cells}")
    for s, a, t in system.transitions:
        out.append(f"trans: {s} -{a}-> {t}")
    edges = sorted((u, v) for u, v in policy.edges if u != v)
    if edges:
        out.append("policy: " + ", ".join(f"{u} -> {v}" for u, v in edges))
    out.append("policy-closure: true")
    return "\n".join(out) + "\n"


def load_model(path: str | Path) -> ModelFile:
    """Read a model from disk, or from the bundled corpus when the path does
    not exist but names a corpus file (e.g. 'corpus/fig5.ni' or 'fig5.ni')."""
    p = Path(path)
    if p.exists():
        return parse_model(p.read_text(encoding="utf-8"), origin=str(p))
    candidate = p.name
    try:
        text = corpus_text(candidate)
    except FileNotFoundError:
        raise FileNotFoundError(f"no such file: {path}") from None
    return parse_model(text, origin=f"corpus/{candidate}")


def corpus_names() -> list[str]:
    """Names of the bundled example models."""
    root = resources.files("nicut").joinpath("corpus")
    return sorted(entry.name for entry in root.iterdir() if entry.name.endswith(".ni"))


def corpus_text(name: str) -> str:
    if not name.endswith(".ni"):
        name += ".ni"
    entry = resources.files("nicut").joinpath("corpus").joinpath(name)
    if not entry.is_file():
        raise FileNotFoundError(f"no bundled model named {name!r}")
    return entry.read_text(encoding="utf-8")


def load_corpus(name: str) -> ModelFile:
    """Parse a bundled example model by name ('fig5' or 'fig5.ni')."""
    return parse_model(corpus_text(name), origin=f"corpus/{name}")
