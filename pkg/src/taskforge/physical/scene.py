"""Volume-based scene spawning: rejection sampling with exact pre-proofs.

One spawn call realizes one symbolic state. Entities of the table class are
fixed geometry; everything else is sampled. The spawner first runs exact
analyses (per-entity static volumes, a joint difference-constraint check,
reach proofs) so empty-volume and unreachable verdicts are never sampling
artifacts, then rejection-samples whole placement passes until a pass is
collision-free, reachable, and satisfies every fact's exact geometry.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..model import WorldState, is_subclass
from ..rng import Rng
from . import kernels
from .evaluate import fact_satisfied
from .volumes import (
    RobotModel,
    SpawnParams,
    Volume,
    prove_joint_empty,
    volume_for_entity,
)

FIXED_CLASS = "table"

REASON_EMPTY = "empty-volume"
REASON_UNREACHABLE = "unreachable"
REASON_COLLISION = "collision"
REASON_EXHAUSTED = "attempts-exhausted"


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    z: float
    yaw: float = 0.0


@dataclass
class SceneState:
    """Placed geometry for one symbolic state."""

    order: tuple[str, ...]
    poses: dict[str, Pose]
    half: dict[str, tuple[float, float, float]]
    kind: dict[str, str]  # "box" | "sphere"
    packed: array  # 7 doubles per entity, parallel to order

    def aabb(self, eid: str) -> tuple[float, float, float, float, float, float]:
        p, h = self.poses[eid], self.half[eid]
        return (p.x - h[0], p.y - h[1], p.z - h[2], p.x + h[0], p.y + h[1], p.z + h[2])


@dataclass
class SpawnOutcome:
    scene: SceneState | None
    feasible: bool
    attempts: int
    reason: str | None
    reject_counts: dict[str, int] = field(default_factory=dict)


def check_reachability(robot: RobotModel, pose: Pose) -> bool:
    """Closed-ball reach test on the pose position."""
    d2 = kernels.dist_sq(pose.x, pose.y, pose.z, robot.base[0], robot.base[1], robot.base[2])
    return d2 <= robot.reach * robot.reach


def check_collisions(
    scene: SceneState, tol: float = 0.001, exempt_pairs: frozenset = frozenset()
) -> list[tuple[str, str]]:
    """All penetrating entity pairs, skipping exempted (id, id) pairs."""
    idx_exempt = set()
    pos = {eid: i for i, eid in enumerate(scene.order)}
    for a, b in exempt_pairs:
        if a in pos and b in pos:
            i, j = pos[a], pos[b]
            idx_exempt.add((min(i, j), max(i, j)))
    hits = kernels.pairwise_overlaps(scene.packed, len(scene.order), tol, idx_exempt)
    return [(scene.order[i], scene.order[j]) for i, j in hits]


def _sccs(nodes: list[str], deps: dict[str, set[str]]) -> list[list[str]]:
    """Tarjan SCCs, returned in dependency order (dependencies first)."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = [0]

    def strongconnect(v: str) -> None:
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in sorted(deps.get(v, ())):
            if w not in index:
                strongconnect(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(sorted(comp))

    for v in nodes:
        if v not in index:
            strongconnect(v)
    return out


class _Pass:
    """One placement attempt: incremental packed scene plus bookkeeping."""

    def __init__(self, exempt_partners: dict[str, set[str]]):
        self.order: list[str] = []
        self.poses: dict[str, Pose] = {}
        self.boxes: dict[str, tuple[float, float, float, float, float, float]] = {}
        self.packed = array("d")
        self.index: dict[str, int] = {}
        self.partners = exempt_partners

    def place(self, eid: str, pose: Pose, half, shape_kind: str) -> None:
        self.index[eid] = len(self.order)
        self.order.append(eid)
        self.poses[eid] = pose
        self.boxes[eid] = (
            pose.x - half[0], pose.y - half[1], pose.z - half[2],
            pose.x + half[0], pose.y + half[1], pose.z + half[2],
        )
        k = 0.0 if shape_kind == "box" else 1.0
        self.packed.extend((k, pose.x, pose.y, pose.z, half[0], half[1], half[2]))

    def collides(self, eid: str, pose: Pose, half, shape_kind: str, tol: float) -> bool:
        exempt = [self.index[p] for p in self.partners.get(eid, ()) if p in self.index]
        k = 0.0 if shape_kind == "box" else 1.0
        hit = kernels.any_overlap(
            self.packed, len(self.order), k, pose.x, pose.y, pose.z,
            half[0], half[1], half[2], tol, exempt,
        )
        return hit >= 0


def spawn_scene(
    domain,
    state: WorldState,
    shapes,
    robot: RobotModel,
    rules,
    rng: Rng,
    params: SpawnParams = SpawnParams(),
    max_attempts: int | None = None,
) -> SpawnOutcome:
    """Realize one symbolic state geometrically; deterministic in the rng."""
    budget = params.max_attempts if max_attempts is None else max_attempts
    h = domain.hierarchy
    facts = sorted(state.facts, key=str)
    ids = sorted(state.entities)

    resolved = {eid: shapes.lookup(domain, state.entities[eid].cls) for eid in ids}
    half = {eid: resolved[eid].half_extents() for eid in ids}
    for fact in facts:
        if fact.schema.kind in ("spatial", "binding") and rules.template_for(fact.schema.name) is None:
            raise ConfigError(f"predicate {fact.schema.name} has no spawn rule")

    fixed = [
        eid for eid in ids
        if h.has(FIXED_CLASS) and is_subclass(h, state.entities[eid].cls, FIXED_CLASS)
    ]
    sampled = [eid for eid in ids if eid not in set(fixed)]

    # Fixed geometry: centered on the origin, resting on z=0.
    fixed_poses = {eid: Pose(0.0, 0.0, half[eid][2]) for eid in fixed}
    fixed_boxes = {
        eid: (
            p.x - half[eid][0], p.y - half[eid][1], p.z - half[eid][2],
            p.x + half[eid][0], p.y + half[eid][1], p.z + half[eid][2],
        )
        for eid, p in fixed_poses.items()
    }
    for i, a in enumerate(fixed):
        for b in fixed[i + 1:]:
            pa, pb = fixed_poses[a], fixed_poses[b]
            ka = 0.0 if resolved[a].kind == "box" else 1.0
            kb = 0.0 if resolved[b].kind == "box" else 1.0
            if kernels.pair_overlaps(
                ka, pa.x, pa.y, pa.z, *half[a], kb, pb.x, pb.y, pb.z, *half[b],
                params.contact_tol,
            ):
                return SpawnOutcome(None, False, 0, REASON_COLLISION, {"collision": 1})

    # Exact pre-proofs: static volumes, reach, joint difference constraints.
    static: dict[str, Volume] = {}
    for eid in sampled:
        vol = volume_for_entity(eid, half[eid], facts, fixed_boxes, rules, params, skip_unplaced=True)
        if vol.empty:
            return SpawnOutcome(None, False, 0, REASON_EMPTY, {"empty": 1})
        static[eid] = vol
    for eid in sampled:
        bx, by, bz = robot.base
        d2 = kernels.box_min_dist_sq(bx, by, bz, static[eid].x0, static[eid].y0, static[eid].z0,
                                     static[eid].x1, static[eid].y1, static[eid].z1)
        if d2 > robot.reach * robot.reach:
            return SpawnOutcome(None, False, 0, REASON_UNREACHABLE, {"unreachable": 1})
    if sampled and prove_joint_empty(
        {eid: half[eid] for eid in sampled}, static, facts, rules, robot.attach_offset, params
    ):
        return SpawnOutcome(None, False, 0, REASON_EMPTY, {"empty": 1})

    # Holders (attach facts) derive their pose from the first held entity.
    held_by: dict[str, list[str]] = {}
    exempt_partners: dict[str, set[str]] = {}
    inside_parent: dict[str, list[str]] = {}

    def exempt(a: str, b: str) -> None:
        exempt_partners.setdefault(a, set()).add(b)
        exempt_partners.setdefault(b, set()).add(a)

    for fact in facts:
        if len(fact.args) < 2:
            continue
        template = rules.template_for(fact.schema.name)
        if fact.schema.kind == "binding" or template == "attach":
            held_by.setdefault(fact.args[0], []).append(fact.args[1])
            exempt(fact.args[0], fact.args[1])
        elif template == "inside":
            inside_parent.setdefault(fact.args[0], []).append(fact.args[1])
    # Containment chains are hollow all the way up.
    for eid, parents in inside_parent.items():
        seen = list(parents)
        frontier = list(parents)
        while frontier:
            nxt = []
            for p in frontier:
                for gp in inside_parent.get(p, ()):
                    if gp not in seen:
                        seen.append(gp)
                        nxt.append(gp)
            frontier = nxt
        for p in seen:
            exempt(eid, p)

    # Placement order: dependencies (references, held entities) first.
    sampled_set = set(sampled)
    deps: dict[str, set[str]] = {eid: set() for eid in sampled}
    for fact in facts:
        if len(fact.args) < 2:
            continue
        a, b = fact.args[0], fact.args[1]
        template = rules.template_for(fact.schema.name)
        constrains = fact.schema.kind in ("spatial", "binding") or template == "attach"
        if constrains and a in sampled_set and b in sampled_set:
            deps[a].add(b)
    units = _sccs(sampled, deps)

    reach2 = robot.reach * robot.reach
    rejects = {"collision": 0, "unreachable": 0, "constraint": 0}
    attempts = 0

    while attempts < budget:
        attempts += 1
        scene = _attempt_pass(
            units, fixed, fixed_poses, half, resolved, facts, held_by, exempt_partners,
            rules, robot, params, rng, reach2, rejects,
        )
        if scene is not None:
            return SpawnOutcome(scene, True, attempts, None, dict(rejects))

    only_collisions = rejects["collision"] > 0 and rejects["unreachable"] == 0 and rejects["constraint"] == 0
    reason = REASON_COLLISION if only_collisions else REASON_EXHAUSTED
    return SpawnOutcome(None, False, attempts, reason, dict(rejects))


def _attempt_pass(
    units, fixed, fixed_poses, half, resolved, facts, held_by, exempt_partners,
    rules, robot, params, rng, reach2, rejects,
) -> SceneState | None:
    ps = _Pass(exempt_partners)
    for eid in fixed:
        ps.place(eid, fixed_poses[eid], half[eid], resolved[eid].kind)

    for unit in units:
        group = len(unit) > 1
        for eid in unit:
            held = held_by.get(eid, ())
            pose: Pose | None = None
            if held and held[0] in ps.poses:
                ref = ps.poses[held[0]]
                off = robot.attach_offset
                pose = Pose(ref.x + off[0], ref.y + off[1], ref.z + off[2])
            else:
                vol = volume_for_entity(
                    eid, half[eid], facts, ps.boxes, rules, params, skip_unplaced=group
                )
                if vol.empty:
                    rejects["constraint"] += 1
                    return None
                pose = Pose(
                    rng.uniform(vol.x0, vol.x1),
                    rng.uniform(vol.y0, vol.y1),
                    rng.uniform(vol.z0, vol.z1),
                )
            d2 = kernels.dist_sq(pose.x, pose.y, pose.z, *robot.base)
            if d2 > reach2:
                rejects["unreachable"] += 1
                return None
            if ps.collides(eid, pose, half[eid], resolved[eid].kind, params.contact_tol):
                rejects["collision"] += 1
                return None
            ps.place(eid, pose, half[eid], resolved[eid].kind)

    scene = SceneState(
        order=tuple(ps.order),
        poses=ps.poses,
        half={eid: half[eid] for eid in ps.order},
        kind={eid: resolved[eid].kind for eid in ps.order},
        packed=ps.packed,
    )
    for fact in facts:
        if not fact_satisfied(fact, scene, rules, robot, params):
            rejects["constraint"] += 1
            return None
    return scene
