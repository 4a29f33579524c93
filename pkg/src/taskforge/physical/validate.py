"""Per-task physical validation: spawn and check every subgoal state."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError
from ..model import TaskSpec
from ..rng import Rng, derive_seed
from .scene import SceneState, SpawnOutcome, spawn_scene
from .volumes import RobotModel, SpawnParams


@dataclass(frozen=True)
class SubgoalCheck:
    """Outcome for one symbolic state (index 0 = initial state)."""

    index: int
    feasible: bool
    attempts: int
    reason: str | None
    reject_counts: dict = field(default_factory=dict, compare=False)


@dataclass
class ViabilityReport:
    """Aggregate verdict: feasible iff every subgoal state is realizable.

    ``scenes`` holds the accepted SceneState per subgoal (None where spawning
    failed or was skipped); it is diagnostic payload, never serialized.
    """

    feasible: bool
    subgoals: tuple[SubgoalCheck, ...]
    scenes: list[SceneState | None] = field(default_factory=list)


def preflight(domain, task: TaskSpec, shapes, rules) -> None:
    """Configuration check before any spawning: shapes cover every entity
    class in the task, and geometric predicates all have spawn rules."""
    for eid, ent in sorted(task.entities.items()):
        if not shapes.covers(domain, ent.cls):
            raise ConfigError(f"no shape defined for class {ent.cls} (entity {eid})")
    names = set()
    for state in task.states:
        for fact in state.facts:
            if fact.schema.kind in ("spatial", "binding"):
                names.add(fact.schema.name)
    for name in sorted(names):
        if rules.template_for(name) is None:
            raise ConfigError(f"predicate {name} has no spawn rule")


def validate_task(
    domain,
    task: TaskSpec,
    shapes,
    robot: RobotModel,
    rules,
    seed: int,
    params: SpawnParams = SpawnParams(),
    max_attempts: int | None = None,
    short_circuit: bool = False,
) -> ViabilityReport:
    """Spawn states[0..n] and aggregate the per-subgoal verdicts.

    Each subgoal gets an independent RNG stream derived from (seed, index),
    so verdicts do not shift with short_circuit or with other subgoals'
    attempt counts. By default every subgoal is evaluated for diagnostics;
    short_circuit stops at the first infeasible one (remaining entries are
    marked skipped=not feasible with zero attempts).
    """
    preflight(domain, task, shapes, rules)
    checks: list[SubgoalCheck] = []
    scenes: list[SceneState | None] = []
    feasible = True
    for i, state in enumerate(task.states):
        if short_circuit and not feasible:
            checks.append(SubgoalCheck(i, False, 0, "skipped"))
            scenes.append(None)
            continue
        rng = Rng(derive_seed(seed, i))
        outcome: SpawnOutcome = spawn_scene(
            domain, state, shapes, robot, rules, rng, params, max_attempts
        )
        checks.append(
            SubgoalCheck(i, outcome.feasible, outcome.attempts, outcome.reason, outcome.reject_counts)
        )
        scenes.append(outcome.scene)
        feasible = feasible and outcome.feasible
    return ViabilityReport(feasible, tuple(checks), scenes)
