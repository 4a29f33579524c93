"""Dataset records: serialization, similarity, reward scaffolds.

Viable tasks are exported as line-delimited JSON with sorted keys and fixed
separators, so identical inputs always produce byte-identical files. Each
record carries the grounded actions, per-subgoal initial/goal facts, a
declarative reward scaffold, the viability report, and enough metadata
(domain hash, seeds, config) to re-validate it from scratch.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import IO, Iterable

from .errors import DomainMismatchError, ExportError, SchemaVersionError
from .model import (
    Entity,
    GroundAction,
    GroundPredicate,
    TaskSpec,
    WorldState,
    apply_postconditions,
    check_preconditions,
    state_diff,
)
from .physical import SpawnParams, ViabilityReport
from . import __version__

SCHEMA_VERSION = 1

Fact = tuple[str, ...]  # (predicate, arg, arg, ...)


@dataclass(frozen=True)
class RewardScaffold:
    """Declarative per-subgoal reward description.

    dense(p) = -min(1, |p - goal_center| / normalizer); sparse = +1 on
    subgoal satisfaction; fade mixes them: (1-fade)*dense + fade*sparse.
    """

    entity: str
    goal_center: tuple[float, float, float]
    normalizer: float
    fade: float = 0.0


def reward_value(
    scaffold: RewardScaffold,
    position: tuple[float, float, float],
    achieved: bool,
    fade: float | None = None,
) -> float:
    """Evaluate a scaffold at a position (helper for consumers and tests)."""
    lam = scaffold.fade if fade is None else fade
    d = math.dist(position, scaffold.goal_center)
    dense = -min(1.0, d / scaffold.normalizer)
    sparse = 1.0 if achieved else 0.0
    return (1.0 - lam) * dense + lam * sparse


@dataclass(frozen=True)
class SubgoalRecord:
    initial: tuple[Fact, ...]  # full facts before the step
    goal: tuple[Fact, ...]  # facts the step adds
    reward: RewardScaffold | None


@dataclass(frozen=True)
class TaskRecord:
    schema_version: int
    task_id: str
    domain_hash: str
    seed: int
    config: tuple[tuple[str, int], ...]  # generation config, key-sorted
    entities: tuple[tuple[str, str, int], ...]  # (id, class, first state index)
    actions: tuple[tuple[str, tuple[tuple[str, str], ...]], ...]  # (name, ((param, entity)...))
    subgoals: tuple[SubgoalRecord, ...]
    viability: tuple[tuple[int, bool, int, str | None], ...]  # per state: (idx, feasible, attempts, reason)
    spawn_seed: int
    max_attempts: int
    tool_version: str = __version__

    def action_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.actions)

    def entity_class(self, eid: str) -> str:
        for ent_id, cls, _ in self.entities:
            if ent_id == eid:
                return cls
        raise KeyError(eid)

    def feasible(self) -> bool:
        return all(flag for _, flag, _, _ in self.viability)


def _fact_tuple(fact: GroundPredicate) -> Fact:
    return (fact.schema.name, *fact.args)


def task_identity(domain_hash: str, seed: int, actions: Iterable[GroundAction]) -> str:
    """Stable id: hash of the domain, seed, and grounded action list."""
    payload = domain_hash + ":" + str(seed)
    for a in actions:
        payload += ";" + a.schema.name + "(" + ",".join(a.arg_tuple()) + ")"
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Reward scaffolds
# ---------------------------------------------------------------------------

GRIPPER_CLASS = "gripper"


def _manipulated_entity(domain, action: GroundAction) -> str | None:
    """The entity a step moves: first spatial add-list fact's placed argument,
    falling back to the first bound non-gripper parameter."""
    for atom in action.schema.add_list:
        if atom.schema.kind == "spatial" and atom.args:
            return action.binding[atom.args[0]]
    h = domain.hierarchy
    for pname, pcls in action.schema.params:
        chain = h.ancestors(pcls) if h.has(pcls) else [pcls]
        if GRIPPER_CLASS not in chain:
            return action.binding[pname]
    return None


def reward_scaffold(
    domain,
    task: TaskSpec,
    scenes,
    params: SpawnParams = SpawnParams(),
    fade: float = 0.0,
) -> list[RewardScaffold | None]:
    """Per-step scaffolds from the spawned goal scenes (scenes[i+1] realizes
    the state after step i). Steps with no identifiable manipulated entity or
    no goal scene yield None."""
    ws = params.workspace
    normalizer = math.dist((ws.x0, ws.y0, ws.z0), (ws.x1, ws.y1, ws.z1))
    out: list[RewardScaffold | None] = []
    for i, action in enumerate(task.sequence):
        entity = _manipulated_entity(domain, action)
        goal_scene = scenes[i + 1] if i + 1 < len(scenes) else None
        if entity is None or goal_scene is None or entity not in goal_scene.poses:
            out.append(None)
            continue
        p = goal_scene.poses[entity]
        out.append(RewardScaffold(entity, (p.x, p.y, p.z), normalizer, fade))
    return out


def build_record(
    domain,
    domain_hash: str,
    task: TaskSpec,
    config,
    report: ViabilityReport,
    spawn_seed: int,
    max_attempts: int,
    params: SpawnParams = SpawnParams(),
    fade: float = 0.0,
) -> TaskRecord:
    """Assemble the exportable record for a validated task."""
    scaffolds = reward_scaffold(domain, task, report.scenes, params, fade)
    subgoals = []
    for i, action in enumerate(task.sequence):
        added, _ = state_diff(task.states[i], task.states[i + 1])
        subgoals.append(
            SubgoalRecord(
                initial=tuple(sorted(_fact_tuple(f) for f in task.states[i].facts)),
                goal=tuple(sorted(_fact_tuple(f) for f in added)),
                reward=scaffolds[i],
            )
        )
    entities = []
    for eid in sorted(task.entities):
        since = next(i for i, st in enumerate(task.states) if eid in st.entities)
        entities.append((eid, task.entities[eid].cls, since))
    cfg_items = (
        ("backtrack_budget", config.backtrack_budget),
        ("length", config.length),
        ("max_entities", config.max_entities),
        ("resample_budget", config.resample_budget),
    )
    return TaskRecord(
        schema_version=SCHEMA_VERSION,
        task_id=task_identity(domain_hash, task.seed, task.sequence),
        domain_hash=domain_hash,
        seed=task.seed,
        config=cfg_items,
        entities=tuple(entities),
        actions=tuple(
            (a.schema.name, tuple((p, a.binding[p]) for p, _ in a.schema.params))
            for a in task.sequence
        ),
        subgoals=tuple(subgoals),
        viability=tuple((c.index, c.feasible, c.attempts, c.reason) for c in report.subgoals),
        spawn_seed=spawn_seed,
        max_attempts=max_attempts,
    )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _record_to_dict(r: TaskRecord) -> dict:
    return {
        "schema_version": r.schema_version,
        "task_id": r.task_id,
        "domain_hash": r.domain_hash,
        "seed": r.seed,
        "config": [[k, v] for k, v in r.config],
        "entities": [[eid, cls, since] for eid, cls, since in r.entities],
        "actions": [
            {"name": name, "args": [[p, e] for p, e in args]} for name, args in r.actions
        ],
        "subgoals": [
            {
                "initial": [list(f) for f in sg.initial],
                "goal": [list(f) for f in sg.goal],
                "reward": None
                if sg.reward is None
                else {
                    "entity": sg.reward.entity,
                    "goal_center": list(sg.reward.goal_center),
                    "normalizer": sg.reward.normalizer,
                    "fade": sg.reward.fade,
                },
            }
            for sg in r.subgoals
        ],
        "viability": [[i, f, a, reason] for i, f, a, reason in r.viability],
        "spawn_seed": r.spawn_seed,
        "max_attempts": r.max_attempts,
        "tool_version": r.tool_version,
    }


def _record_from_dict(d: dict) -> TaskRecord:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"dataset schema version {d.get('schema_version')} != supported {SCHEMA_VERSION}"
        )
    return TaskRecord(
        schema_version=d["schema_version"],
        task_id=d["task_id"],
        domain_hash=d["domain_hash"],
        seed=d["seed"],
        config=tuple((k, v) for k, v in d["config"]),
        entities=tuple((e[0], e[1], e[2]) for e in d["entities"]),
        actions=tuple(
            (a["name"], tuple((p, e) for p, e in a["args"])) for a in d["actions"]
        ),
        subgoals=tuple(
            SubgoalRecord(
                initial=tuple(tuple(f) for f in sg["initial"]),
                goal=tuple(tuple(f) for f in sg["goal"]),
                reward=None
                if sg["reward"] is None
                else RewardScaffold(
                    entity=sg["reward"]["entity"],
                    goal_center=tuple(sg["reward"]["goal_center"]),
                    normalizer=sg["reward"]["normalizer"],
                    fade=sg["reward"]["fade"],
                ),
            )
            for sg in d["subgoals"]
        ),
        viability=tuple((v[0], v[1], v[2], v[3]) for v in d["viability"]),
        spawn_seed=d["spawn_seed"],
        max_attempts=d["max_attempts"],
        tool_version=d.get("tool_version", "unknown"),
    )


def record_line(record: TaskRecord) -> str:
    """Canonical single-line form (sorted keys, fixed separators)."""
    return json.dumps(_record_to_dict(record), sort_keys=True, separators=(",", ":"))


def export_tasks(records: Iterable[TaskRecord], sink: IO[str]) -> int:
    """Write records line by line; returns the record count.

    Raises ExportError carrying the number of fully written records if the
    sink fails mid-stream.
    """
    written = 0
    for record in records:
        try:
            sink.write(record_line(record) + "\n")
        except OSError as e:
            raise ExportError(f"dataset write failed: {e}", written) from e
        written += 1
    return written


def import_tasks(source: IO[str]) -> list[TaskRecord]:
    """Inverse of export_tasks; import(export(x)) == x."""
    records = []
    for line in source:
        line = line.strip()
        if line:
            records.append(_record_from_dict(json.loads(line)))
    return records


# ---------------------------------------------------------------------------
# Semantic similarity
# ---------------------------------------------------------------------------


def _levenshtein(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, xa in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, xb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (xa != xb))
        prev = cur
    return prev[-1]


def _goal_signatures(record: TaskRecord) -> frozenset[tuple[str, ...]]:
    """Lifted goal-predicate signatures: predicate name plus argument classes."""
    sigs = set()
    for sg in record.subgoals:
        for fact in sg.goal:
            sigs.add((fact[0], *(record.entity_class(e) for e in fact[1:])))
    return frozenset(sigs)


def similarity(a: TaskRecord, b: TaskRecord) -> float:
    """Semantic similarity in [0, 1]: half normalized action-sequence edit
    similarity, half Jaccard index of lifted goal signatures."""
    if a.domain_hash != b.domain_hash:
        raise DomainMismatchError("records come from different domains")
    na, nb = a.action_names(), b.action_names()
    longest = max(len(na), len(nb))
    seq_sim = 1.0 if longest == 0 else 1.0 - _levenshtein(na, nb) / longest
    sa, sb = _goal_signatures(a), _goal_signatures(b)
    union = sa | sb
    jac = 1.0 if not union else len(sa & sb) / len(union)
    return 0.5 * seq_sim + 0.5 * jac


# ---------------------------------------------------------------------------
# Record re-validation
# ---------------------------------------------------------------------------


def rebuild_task(domain, record: TaskRecord) -> TaskSpec:
    """Reconstruct the TaskSpec (actions, chained states, per-state entity
    visibility) from a record, using the domain's action semantics."""
    entities = {eid: Entity(eid, cls) for eid, cls, _ in record.entities}
    since = {eid: s for eid, _, s in record.entities}

    def state_entities(i: int) -> dict[str, Entity]:
        return {eid: entities[eid] for eid in entities if since[eid] <= i}

    preds = {p.name: p for p in domain.predicates}
    init_facts = set()
    if record.subgoals:
        for fact in record.subgoals[0].initial:
            init_facts.add(GroundPredicate(preds[fact[0]], tuple(fact[1:])))
    states = [WorldState(frozenset(init_facts), state_entities(0))]
    actions = []
    for i, (name, args) in enumerate(record.actions):
        schema = domain.action(name)
        action = GroundAction(schema, dict(args))
        actions.append(action)
        nxt = apply_postconditions(
            WorldState(states[-1].facts, state_entities(i)), action
        )
        states.append(WorldState(nxt.facts, state_entities(i + 1)))
    return TaskSpec(tuple(actions), tuple(states), entities, record.seed)


def revalidate_record(domain, record: TaskRecord) -> list[str]:
    """Symbolic re-check of a stored record: stored per-subgoal initial facts
    match the recomputed chain, and every step's preconditions hold."""
    problems = []
    task = rebuild_task(domain, record)
    for i, action in enumerate(task.sequence):
        stored = record.subgoals[i].initial
        recomputed = tuple(sorted(_fact_tuple(f) for f in task.states[i].facts))
        if stored != recomputed:
            problems.append(f"step {i}: stored initial facts diverge from recomputed chain")
        rep = check_preconditions(domain.hierarchy, task.states[i], action)
        if not rep.ok:
            problems.append(f"step {i} ({action}): violated {[str(v) for v in rep.violated]}")
        added, _ = state_diff(task.states[i], task.states[i + 1])
        if tuple(sorted(_fact_tuple(f) for f in added)) != record.subgoals[i].goal:
            problems.append(f"step {i}: stored goal facts diverge from recomputed additions")
    return problems
