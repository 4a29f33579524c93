"""Symbolic world model: class hierarchy, predicates, actions, states.

The transition semantics are STRIPS-style under the closed-world assumption:
a state is a finite set of ground facts, a missing fact is false, an action
is applicable when its precondition literals all hold, and applying it
removes the delete-list then adds the add-list. All types are immutable
values; operations return new states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import DomainError

ROOT_CLASS = "object"

# Predicate kinds drive geometric interpretation downstream: "spatial" facts
# constrain placement volumes, "binding" facts pin one entity to another,
# "unary-state" facts have no geometry.
KIND_SPATIAL = "spatial"
KIND_BINDING = "binding"
KIND_UNARY = "unary-state"


# ---------------------------------------------------------------------------
# Class hierarchy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassHierarchy:
    """Single-inheritance forest rooted at ``object``.

    ``parent`` maps every non-root class to its parent; ``concrete`` flags the
    instantiable classes (the leaves, unless overridden).
    """

    classes: frozenset[str]
    parent: Mapping[str, str]
    concrete: frozenset[str]

    @staticmethod
    def build(parent: Mapping[str, str], concrete: Iterable[str] | None = None) -> "ClassHierarchy":
        """Validate and construct. Raises DomainError on cycles or bad names."""
        classes = {ROOT_CLASS} | set(parent) | set(parent.values())
        for child, par in parent.items():
            if child == ROOT_CLASS:
                raise DomainError("the root class cannot have a parent")
            if par not in classes:
                raise DomainError(f"unknown parent class: {par}")
        # Cycle check: walk each chain with a visited set.
        for cls in parent:
            seen = {cls}
            cur = cls
            while cur != ROOT_CLASS:
                cur = parent.get(cur, ROOT_CLASS)
                if cur in seen:
                    raise DomainError(f"class hierarchy cycle through {cur!r}")
                seen.add(cur)
        if concrete is None:
            # Leaves are instantiable; the root only when it has no children
            # (untyped domains have just "object").
            parents = set(parent.values())
            concrete_set = frozenset(c for c in classes if c not in parents)
        else:
            concrete_set = frozenset(concrete)
            unknown = concrete_set - classes
            if unknown:
                raise DomainError(f"concrete flag on unknown classes: {sorted(unknown)}")
        return ClassHierarchy(frozenset(classes), dict(parent), concrete_set)

    def has(self, cls: str) -> bool:
        return cls in self.classes

    def ancestors(self, cls: str) -> list[str]:
        """Chain from cls up to the root, inclusive on both ends."""
        if cls not in self.classes:
            raise DomainError(f"unknown class: {cls}")
        chain = [cls]
        while chain[-1] != ROOT_CLASS:
            chain.append(self.parent.get(chain[-1], ROOT_CLASS))
        return chain

    def concrete_under(self, cls: str) -> list[str]:
        """Concrete classes at or below cls, sorted for determinism."""
        return sorted(c for c in self.concrete if is_subclass(self, c, cls))


def is_subclass(h: ClassHierarchy, child: str, ancestor: str) -> bool:
    """True iff ancestor lies on child's parent chain (reflexive)."""
    if child not in h.classes:
        raise DomainError(f"unknown class: {child}")
    if ancestor not in h.classes:
        raise DomainError(f"unknown class: {ancestor}")
    cur = child
    while True:
        if cur == ancestor:
            return True
        if cur == ROOT_CLASS:
            return False
        cur = h.parent.get(cur, ROOT_CLASS)


# ---------------------------------------------------------------------------
# Predicates and facts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredicateSchema:
    # kind comes from the spawn-rules sidecar, not the domain text, so it is
    # metadata: identity is (name, param_classes).
    name: str
    param_classes: tuple[str, ...]
    kind: str = field(default=KIND_UNARY, compare=False)

    @property
    def arity(self) -> int:
        return len(self.param_classes)


@dataclass(frozen=True)
class GroundPredicate:
    """A predicate fully bound to entity ids."""

    schema: PredicateSchema
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"({self.schema.name} {' '.join(self.args)})" if self.args else f"({self.schema.name})"


@dataclass(frozen=True)
class Literal:
    """Signed ground predicate: positive means membership under closed world."""

    fact: GroundPredicate
    positive: bool = True

    def __str__(self) -> str:
        return str(self.fact) if self.positive else f"(not {self.fact})"


@dataclass(frozen=True)
class Entity:
    name: str
    cls: str


@dataclass(frozen=True)
class WorldState:
    """Closed-world symbolic state: known facts over registered entities."""

    facts: frozenset[GroundPredicate] = frozenset()
    entities: Mapping[str, Entity] = field(default_factory=dict)

    def with_entity(self, eid: str, entity: Entity) -> "WorldState":
        if eid in self.entities:
            raise DomainError(f"duplicate entity id: {eid}")
        ents = dict(self.entities)
        ents[eid] = entity
        return WorldState(self.facts, ents)

    def entity_class(self, eid: str) -> str:
        try:
            return self.entities[eid].cls
        except KeyError:
            raise DomainError(f"unknown entity id: {eid}") from None


def make_fact(
    h: ClassHierarchy, state: WorldState, schema: PredicateSchema, args: Iterable[str]
) -> GroundPredicate:
    """Typed public constructor for ground facts.

    Checks arity and that each argument's class is compatible with the
    schema's parameter class.
    """
    args = tuple(args)
    if len(args) != schema.arity:
        raise DomainError(f"{schema.name} expects {schema.arity} args, got {len(args)}")
    for arg, want in zip(args, schema.param_classes):
        got = state.entity_class(arg)
        if not is_subclass(h, got, want):
            raise DomainError(f"{schema.name}: argument {arg} has class {got}, needs {want}")
    return GroundPredicate(schema, args)


def holds(state: WorldState, literal: Literal) -> bool:
    """Closed-world evaluation of a signed ground predicate."""
    for arg in literal.fact.args:
        if arg not in state.entities:
            raise DomainError(f"unknown entity id: {arg}")
    present = literal.fact in state.facts
    return present if literal.positive else not present


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiftedAtom:
    """Predicate template over action parameter names."""

    schema: PredicateSchema
    args: tuple[str, ...]


@dataclass(frozen=True)
class LiftedLiteral:
    atom: LiftedAtom
    positive: bool = True


@dataclass(frozen=True)
class ActionSchema:
    """Action template: typed parameters, precondition literals, add/delete lists."""

    name: str
    params: tuple[tuple[str, str], ...]  # (param name, class)
    preconditions: tuple[LiftedLiteral, ...]
    add_list: tuple[LiftedAtom, ...]
    delete_list: tuple[LiftedAtom, ...]

    def param_class(self, pname: str) -> str:
        for name, cls in self.params:
            if name == pname:
                return cls
        raise DomainError(f"{self.name}: unknown parameter {pname}")


@dataclass(frozen=True)
class GroundAction:
    """An action schema with every parameter bound to an entity id."""

    schema: ActionSchema
    binding: Mapping[str, str]

    def arg_tuple(self) -> tuple[str, ...]:
        return tuple(self.binding[p] for p, _ in self.schema.params)

    def __str__(self) -> str:
        return f"{self.schema.name}({', '.join(self.arg_tuple())})"


def _check_binding(h: ClassHierarchy, state: WorldState, action: GroundAction) -> None:
    for pname, pcls in action.schema.params:
        if pname not in action.binding:
            raise DomainError(f"{action.schema.name}: unbound parameter {pname}")
        eid = action.binding[pname]
        got = state.entity_class(eid)
        if not is_subclass(h, got, pcls):
            raise DomainError(
                f"{action.schema.name}: {pname}={eid} has class {got}, needs {pcls}"
            )


def ground_atom(atom: LiftedAtom, binding: Mapping[str, str]) -> GroundPredicate:
    return GroundPredicate(atom.schema, tuple(binding[a] for a in atom.args))


@dataclass(frozen=True)
class PreconditionReport:
    ok: bool
    violated: tuple[Literal, ...] = ()


def check_preconditions(
    h: ClassHierarchy, state: WorldState, action: GroundAction
) -> PreconditionReport:
    """Evaluate the action's precondition conjunction; list every violated literal."""
    _check_binding(h, state, action)
    violated = []
    for lifted in action.schema.preconditions:
        lit = Literal(ground_atom(lifted.atom, action.binding), lifted.positive)
        if not holds(state, lit):
            violated.append(lit)
    return PreconditionReport(not violated, tuple(violated))


def apply_postconditions(state: WorldState, action: GroundAction) -> WorldState:
    """New state = (state - delete-list) | add-list. The input is untouched.

    Caller contract: preconditions already checked. Deleting an absent fact
    is a no-op (set difference).
    """
    dels = {ground_atom(a, action.binding) for a in action.schema.delete_list}
    adds = {ground_atom(a, action.binding) for a in action.schema.add_list}
    return WorldState((state.facts - dels) | adds, state.entities)


# ---------------------------------------------------------------------------
# Task specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaskSpec:
    """A grounded action sequence with the symbolic state before/after each step.

    states[0] is the initial state; states[i+1] results from sequence[i].
    """

    sequence: tuple[GroundAction, ...]
    states: tuple[WorldState, ...]
    entities: Mapping[str, Entity]
    seed: int

    @property
    def length(self) -> int:
        return len(self.sequence)

    def action_names(self) -> tuple[str, ...]:
        return tuple(a.schema.name for a in self.sequence)


def revalidate(h: ClassHierarchy, task: TaskSpec) -> list[str]:
    """Independent soundness check of a TaskSpec against the core semantics.

    Returns a list of problems (empty = valid): per-step precondition holds,
    state chaining is exact, and the state count matches.
    """
    problems: list[str] = []
    if len(task.states) != len(task.sequence) + 1:
        return [f"state count {len(task.states)} != length+1 {len(task.sequence) + 1}"]
    for i, action in enumerate(task.sequence):
        report = check_preconditions(h, task.states[i], action)
        if not report.ok:
            problems.append(f"step {i} ({action}): violated {[str(v) for v in report.violated]}")
        expected = apply_postconditions(task.states[i], action)
        if expected.facts != task.states[i + 1].facts:
            problems.append(f"step {i} ({action}): state chaining mismatch")
    return problems


def state_diff(
    a: WorldState, b: WorldState
) -> tuple[frozenset[GroundPredicate], frozenset[GroundPredicate]]:
    """(added, removed) fact sets; applying them to ``a`` reproduces ``b``."""
    return b.facts - a.facts, a.facts - b.facts
