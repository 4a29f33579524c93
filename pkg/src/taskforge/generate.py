"""Weighted stochastic construction of valid grounded action sequences.

The engine builds a sequence step by step: sample an action (biased by action
and action-pair weights), ground its parameters by reusing existing entities
or creating new ones from the class hierarchy, and keep the step only if the
preconditions hold in the current state. Dead ends trigger chronological
backtracking. Every run is a pure function of (domain, weights, config).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dsl import DomainDefinition, SamplingWeights
from .errors import ConfigError, GenerationExhausted, SamplingError
from .model import (
    ActionSchema,
    Entity,
    GroundAction,
    GroundPredicate,
    TaskSpec,
    WorldState,
    apply_postconditions,
    check_preconditions,
    is_subclass,
)
from .rng import Rng

# Classes seeded into every initial state when the domain declares them, and
# the unary predicate seeded over the gripper. This is the generator's whole
# initial-state convention; domains without these classes start empty.
SEED_CLASSES = ("gripper", "table")
SEED_FREE_PREDICATE = "free"


@dataclass(frozen=True)
class GenerationConfig:
    """Knobs for one generation run."""

    length: int
    max_entities: int = 8
    resample_budget: int = 64
    backtrack_budget: int = 32
    seed: int = 0

    def validate(self) -> None:
        if self.length < 1:
            raise ConfigError("length must be >= 1")
        if self.resample_budget < 0 or self.backtrack_budget < 0 or self.max_entities < 0:
            raise ConfigError("budgets must be >= 0")


@dataclass
class GenerationTrace:
    """Debug record of one run: per-step attempts, rejections, backtracks."""

    events: list[str] = field(default_factory=list)
    accepted: list[str] = field(default_factory=list)
    backtracks: int = 0

    def log(self, message: str) -> None:
        self.events.append(message)


def initial_vocabulary(domain: DomainDefinition) -> frozenset[str]:
    """Predicate names the initial-state convention can seed."""
    state = seed_initial_state(domain)
    return frozenset(f.schema.name for f in state.facts)


def seed_initial_state(domain: DomainDefinition) -> WorldState:
    """Initial symbolic state: one gripper and one table entity when those
    classes exist (and are concrete), a free(gripper) fact when declared,
    and nothing else."""
    state = WorldState()
    h = domain.hierarchy
    for cls in SEED_CLASSES:
        if cls in h.concrete:
            state = state.with_entity(f"{cls}_0", Entity(f"{cls}_0", cls))
    free = next(
        (p for p in domain.predicates if p.name == SEED_FREE_PREDICATE and p.arity == 1), None
    )
    if free is not None:
        facts = set(state.facts)
        for eid, ent in state.entities.items():
            if is_subclass(h, ent.cls, free.param_classes[0]):
                facts.add(GroundPredicate(free, (eid,)))
        state = WorldState(frozenset(facts), state.entities)
    return state


def sample_action(
    weights: SamplingWeights,
    prev: str | None,
    candidates: list[ActionSchema],
    rng: Rng,
) -> ActionSchema:
    """Draw an action proportionally to action_w[a] * pair_w[(prev, a)].

    Raises SamplingError when no candidate has positive combined weight;
    generate_sequence treats that as a resample/backtrack trigger.
    """
    if not candidates:
        raise SamplingError("no candidate actions")
    combined = [
        weights.action_weight(a.name) * weights.pair_weight(prev, a.name) for a in candidates
    ]
    try:
        return candidates[rng.weighted_index(combined)]
    except ValueError as e:
        raise SamplingError(str(e)) from None


def _class_count(state: WorldState, cls: str) -> int:
    return sum(1 for ent in state.entities.values() if ent.cls == cls)


def _sample_param(
    domain: DomainDefinition,
    state: WorldState,
    pcls: str,
    weights: SamplingWeights,
    cfg: GenerationConfig,
    rng: Rng,
) -> tuple[str, WorldState] | None:
    """Bind one parameter: reuse an existing compatible entity with
    probability reuse_prob, otherwise create a new one of a concrete class
    under the parameter class. Returns (entity id, possibly-extended state).
    """
    h = domain.hierarchy
    existing = sorted(
        eid for eid, ent in state.entities.items() if is_subclass(h, ent.cls, pcls)
    )
    can_create = len(state.entities) < cfg.max_entities
    creatable = [c for c in h.concrete_under(pcls) if weights.entity_weight(c) > 0]
    if can_create and not creatable:
        can_create = False

    reuse = bool(existing) and (not can_create or rng.random() < weights.reuse_prob)
    if not reuse and not can_create:
        if not existing:
            return None
        reuse = True  # creation impossible, fall back to reuse-only

    if reuse:
        w = [weights.entity_weight(state.entities[eid].cls) for eid in existing]
        if sum(w) <= 0:
            # All reusable entities have zero class weight; pick uniformly so
            # seeded zero-weight entities (gripper, table) stay bindable.
            return existing[rng.below(len(existing))], state
        return existing[rng.weighted_index(w)], state

    cls = creatable[rng.weighted_index([weights.entity_weight(c) for c in creatable])]
    eid = f"{cls}_{_class_count(state, cls)}"
    return eid, state.with_entity(eid, Entity(eid, cls))


def instantiate_action(
    domain: DomainDefinition,
    state: WorldState,
    schema: ActionSchema,
    weights: SamplingWeights,
    cfg: GenerationConfig,
    rng: Rng,
) -> tuple[GroundAction, WorldState] | None:
    """Bounded stochastic grounding search for one action.

    Tries up to cfg.resample_budget bindings; each binding is built
    parameter-wise (reuse or create) and kept only if the preconditions hold
    in ``state`` extended with any created entities. Returns None when no
    valid grounding was found (the step's no-valid-grounding outcome).
    """
    for _ in range(max(1, cfg.resample_budget)):
        working = state
        binding: dict[str, str] = {}
        ok = True
        for pname, pcls in schema.params:
            pick = _sample_param(domain, working, pcls, weights, cfg, rng)
            if pick is None:
                ok = False
                break
            binding[pname], working = pick
        if not ok:
            continue
        action = GroundAction(schema, binding)
        if check_preconditions(domain.hierarchy, working, action).ok:
            return action, working
    return None


def generate_sequence(
    domain: DomainDefinition,
    weights: SamplingWeights,
    cfg: GenerationConfig,
    return_trace: bool = False,
):
    """Generate one symbolically valid TaskSpec.

    Deterministic in (domain, weights, cfg): the seed drives every draw.
    Raises ConfigError for degenerate weights and GenerationExhausted (with
    the trace attached) when the budgets run out.
    """
    cfg.validate()
    if not domain.actions:
        raise ConfigError("domain has no actions")
    if all(weights.action_weight(a.name) <= 0 for a in domain.actions):
        raise ConfigError("all action weights are zero")

    rng = Rng(cfg.seed)
    trace = GenerationTrace()
    initial = seed_initial_state(domain)
    states: list[WorldState] = [initial]
    # Pre-binding snapshots so backtracking also discards entities the
    # popped step created (creation indices must stay first-use ordered).
    snapshots: list[WorldState] = []
    sequence: list[GroundAction] = []
    candidates = list(domain.actions)

    while len(sequence) < cfg.length:
        step = len(sequence)
        prev = sequence[-1].schema.name if sequence else None
        placed = False
        for _ in range(max(1, cfg.resample_budget)):
            try:
                schema = sample_action(weights, prev, candidates, rng)
            except SamplingError:
                trace.log(f"step {step}: no positive action weight after {prev}")
                break
            found = instantiate_action(domain, states[-1], schema, weights, cfg, rng)
            if found is None:
                trace.log(f"step {step}: {schema.name}: no-valid-grounding")
                continue
            action, working = found
            sequence.append(action)
            snapshots.append(states[-1])
            states[-1] = working  # entities created by the binding exist from here on
            states.append(apply_postconditions(working, action))
            trace.accepted.append(str(action))
            placed = True
            break
        if placed:
            continue
        if not sequence or trace.backtracks >= cfg.backtrack_budget:
            trace.log(f"step {step}: exhausted (backtracks={trace.backtracks})")
            raise GenerationExhausted(
                f"budget exhausted at step {step} after {trace.backtracks} backtracks", trace
            )
        dropped = sequence.pop()
        states.pop()
        states[-1] = snapshots.pop()
        trace.accepted.pop()
        trace.backtracks += 1
        trace.log(f"step {step}: backtrack over {dropped}")

    task = TaskSpec(
        sequence=tuple(sequence),
        states=tuple(states),
        entities=dict(states[-1].entities),
        seed=cfg.seed,
    )
    return (task, trace) if return_trace else task
