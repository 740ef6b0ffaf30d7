"""Exception types shared across the package.

Every error raised on a user-facing code path derives from NicutError so
callers (and the CLI) can distinguish tool errors from genuine bugs.
"""

from __future__ import annotations


class NicutError(Exception):
    """Base class for all errors raised by this package."""


# --- system validation -------------------------------------------------------

class ValidationError(NicutError):
    """A definition failed well-formedness checks."""


class MissingObservation(ValidationError):
    def __init__(self, domain: str, state: str):
        super().__init__(f"no observation declared for domain {domain!r} in state {state!r}")
        self.domain = domain
        self.state = state


class NotInputEnabled(ValidationError):
    def __init__(self, state: str, action: str):
        super().__init__(f"state {state!r} has no transition for action {action!r}")
        self.state = state
        self.action = action


class UndeclaredIdentifier(ValidationError):
    def __init__(self, kind: str, name: str, where: str = ""):
        at = f" in {where}" if where else ""
        super().__init__(f"undeclared {kind} {name!r}{at}")
        self.kind = kind
        self.name = name


class FewerThanTwoDomains(ValidationError):
    def __init__(self, count: int):
        super().__init__(f"a system needs at least two domains, got {count}")
        self.count = count


class InvalidRun(NicutError):
    """A run does not follow the transition relation or start at the initial state."""


class MalformedView(NicutError):
    """A view does not have the shape obs (action? obs)* with stutter absorbed."""


class UnknownDomain(NicutError):
    def __init__(self, name: str):
        super().__init__(f"unknown domain {name!r}")
        self.name = name


# --- policies, abstractions, cuts --------------------------------------------

class PolicyError(NicutError):
    """A policy failed validation."""


class NotReflexive(PolicyError):
    def __init__(self, domain: str):
        super().__init__(f"policy is not reflexive: missing edge ({domain}, {domain})")
        self.domain = domain


class NotTransitive(PolicyError):
    def __init__(self, u: str, v: str, w: str):
        super().__init__(f"policy is not transitive: {u} -> {v} -> {w} but no {u} -> {w}")
        self.triple = (u, v, w)


class BlockMismatch(NicutError):
    """An abstraction does not partition exactly the domain set it is applied to."""


class NotSubBlock(NicutError):
    """Projection target is not a subset of the view's coalition."""


# --- decision procedures ------------------------------------------------------

class ViewInitialMismatch(NicutError):
    """Candidate view does not start with the viewer's initial observation."""


class ForeignActionInAlpha(NicutError):
    """A constrained action sequence contains an action outside the constrained set."""


class PolicyEdgePresent(NicutError):
    """A pairwise check was requested for a pair the policy allows."""


class NotDeterministic(NicutError):
    """A deterministic-only procedure was applied to a nondeterministic system."""


# --- harness -------------------------------------------------------------------

class PrerequisiteViolated(NicutError):
    """Vulnerability translation prerequisites do not hold for the target cut."""


class TranslationFailed(NicutError):
    """A translated vulnerability did not re-validate against the target system."""


# --- model files ----------------------------------------------------------------

class ParseError(NicutError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
