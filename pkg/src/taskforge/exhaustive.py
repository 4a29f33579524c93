"""Exhaustive enumeration of valid action sequences on small instances.

This is the desk-scale ground truth the stochastic generator is checked
against: a depth-first walk over every action schema and every canonical
grounding. Entities are canonical by construction (a fresh entity of class c
always gets the next index for c, and creation coincides with first use), so
isomorphic renamings are never produced twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .dsl import DomainDefinition
from .errors import OracleCeilingError
from .generate import seed_initial_state
from .model import (
    Entity,
    GroundAction,
    TaskSpec,
    WorldState,
    apply_postconditions,
    check_preconditions,
    is_subclass,
)

DEFAULT_CEILING = 5_000_000


def count_unconstrained(num_actions: int, length: int) -> int:
    """num_actions ** length as an exact integer (no floating point)."""
    if num_actions < 1:
        raise ValueError("num_actions must be >= 1")
    if length < 0:
        raise ValueError("length must be >= 0")
    return num_actions**length


@dataclass(frozen=True)
class EnumerationCounts:
    """Grounded counts distinct ground sequences (entities canonical);
    lifted counts distinct action-name sequences among them."""

    grounded: int
    lifted: int


def _branching_estimate(domain: DomainDefinition, length: int, max_entities: int) -> int:
    base = max_entities + len(domain.hierarchy.concrete)
    per_step = sum(max(1, base ** len(a.params)) for a in domain.actions)
    return max(1, per_step) ** length


def _bindings(
    domain: DomainDefinition,
    state: WorldState,
    params: tuple[tuple[str, str], ...],
    max_entities: int,
) -> Iterator[tuple[dict[str, str], WorldState]]:
    """Every canonical binding of ``params``: existing compatible entities
    plus at most one fresh entity per concrete class (next index)."""
    h = domain.hierarchy
    if not params:
        yield {}, state
        return
    (pname, pcls), rest = params[0], params[1:]
    options: list[tuple[str, WorldState]] = []
    for eid in sorted(state.entities):
        if is_subclass(h, state.entities[eid].cls, pcls):
            options.append((eid, state))
    if len(state.entities) < max_entities:
        for cls in h.concrete_under(pcls):
            idx = sum(1 for e in state.entities.values() if e.cls == cls)
            eid = f"{cls}_{idx}"
            options.append((eid, state.with_entity(eid, Entity(eid, cls))))
    for eid, st in options:
        for tail, final_state in _bindings(domain, st, rest, max_entities):
            yield {pname: eid, **tail}, final_state


def iter_valid_sequences(
    domain: DomainDefinition,
    length: int,
    max_entities: int,
    ceiling: int = DEFAULT_CEILING,
    initial: WorldState | None = None,
) -> Iterator[TaskSpec]:
    """Depth-first enumeration of every valid grounded sequence.

    Refuses (OracleCeilingError) when the branching estimate exceeds the
    ceiling; the error carries the estimate.
    """
    estimate = _branching_estimate(domain, length, max_entities)
    if estimate > ceiling:
        raise OracleCeilingError(
            f"instance too large to enumerate (estimated {estimate} nodes > ceiling {ceiling})",
            estimate,
        )
    start = seed_initial_state(domain) if initial is None else initial

    def dfs(
        states: list[WorldState], actions: list[GroundAction]
    ) -> Iterator[TaskSpec]:
        if len(actions) == length:
            yield TaskSpec(
                sequence=tuple(actions),
                states=tuple(states),
                entities=dict(states[-1].entities),
                seed=0,
            )
            return
        current = states[-1]
        for schema in domain.actions:  # already name-sorted
            for binding, extended in _bindings(domain, current, schema.params, max_entities):
                action = GroundAction(schema, binding)
                if not check_preconditions(domain.hierarchy, extended, action).ok:
                    continue
                yield from dfs(
                    states[:-1] + [extended, apply_postconditions(extended, action)],
                    actions + [action],
                )

    yield from dfs([start], [])


def enumerate_valid_sequences(
    domain: DomainDefinition,
    length: int,
    max_entities: int,
    ceiling: int = DEFAULT_CEILING,
    initial: WorldState | None = None,
) -> tuple[list[TaskSpec], EnumerationCounts]:
    """Materialized enumeration plus exact counts at both granularities."""
    tasks = list(iter_valid_sequences(domain, length, max_entities, ceiling, initial))
    lifted = len({t.action_names() for t in tasks})
    return tasks, EnumerationCounts(grounded=len(tasks), lifted=lifted)


def signature(task: TaskSpec) -> tuple[tuple[str, ...], ...]:
    """Comparable identity of a grounded sequence: (name, arg ids) per step.

    Generator and oracle share the same canonical entity-id convention
    (class_index in first-use order), so signatures compare directly.
    """
    return tuple((a.schema.name,) + a.arg_tuple() for a in task.sequence)
