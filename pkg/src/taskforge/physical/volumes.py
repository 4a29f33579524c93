"""Placement volumes: spatial predicates as axis-aligned regions.

Each spatial fact constrains where its first argument's center may go,
relative to the already-placed reference entity. An entity's volume is the
intersection of the boxes contributed by its facts, clipped to the workspace
inset by the entity's half-extents. Contradictions collapse to EMPTY.

The near band (a shell of surface distance around the reference) is not box
representable; its template contributes the bounding hull and the spawner
re-checks the exact band per sample. That keeps EMPTY verdicts exact: the
true region is always a subset of the box intersection.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigError

_BIG = 1.0e9


@dataclass(frozen=True)
class Volume:
    """Axis-aligned box of admissible center positions, or EMPTY."""

    x0: float = 0.0
    y0: float = 0.0
    z0: float = 0.0
    x1: float = 0.0
    y1: float = 0.0
    z1: float = 0.0
    empty: bool = False

    def intersect(self, other: "Volume") -> "Volume":
        if self.empty or other.empty:
            return EMPTY_VOLUME
        x0, y0, z0 = max(self.x0, other.x0), max(self.y0, other.y0), max(self.z0, other.z0)
        x1, y1, z1 = min(self.x1, other.x1), min(self.y1, other.y1), min(self.z1, other.z1)
        if x0 > x1 or y0 > y1 or z0 > z1:
            return EMPTY_VOLUME
        return Volume(x0, y0, z0, x1, y1, z1)

    def contains(self, x: float, y: float, z: float) -> bool:
        if self.empty:
            return False
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1 and self.z0 <= z <= self.z1

    def center(self) -> tuple[float, float, float]:
        return ((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2, (self.z0 + self.z1) / 2)

    def bounds(self, axis: int) -> tuple[float, float]:
        return ((self.x0, self.x1), (self.y0, self.y1), (self.z0, self.z1))[axis]


EMPTY_VOLUME = Volume(empty=True)


@dataclass(frozen=True)
class SpawnParams:
    """Geometry parameters of the volume templates and the sampler."""

    clearance: float = 0.02  # gap enforced by directional predicates
    contact_tol: float = 0.001  # touching within this is not a collision
    near_min: float = 0.0  # near band: surface distance to the reference AABB
    near_max: float = 0.25
    wall_inset: float = 0.015  # container interior side walls
    floor_inset: float = 0.012  # container interior floor
    workspace: Volume = Volume(-0.57, -0.37, 0.75, 0.57, 0.37, 1.40)
    max_attempts: int = 200


@dataclass(frozen=True)
class RobotModel:
    """Ball-envelope reach model plus the grasp attachment offset."""

    base: tuple[float, float, float] = (0.0, -0.65, 0.80)
    reach: float = 1.10
    attach_offset: tuple[float, float, float] = (0.0, 0.0, 0.10)

    def __post_init__(self):
        if self.reach <= 0:
            raise ConfigError("robot reach must be positive")


AABB = tuple[float, float, float, float, float, float]


def template_box(
    template: str,
    half: tuple[float, float, float],
    ref: AABB,
    params: SpawnParams,
) -> Volume:
    """Admissible center region for the placed entity, one fact at a time."""
    hx, hy, hz = half
    rx0, ry0, rz0, rx1, ry1, rz1 = ref
    if template == "ontop":
        return _validated(
            Volume(rx0 + hx, ry0 + hy, rz1 + hz, rx1 - hx, ry1 - hy, rz1 + hz)
        )
    if template == "inside":
        w, f = params.wall_inset, params.floor_inset
        return _validated(
            Volume(rx0 + w + hx, ry0 + w + hy, rz0 + f + hz, rx1 - w - hx, ry1 - w - hy, rz1 - hz)
        )
    if template == "leftof":
        return Volume(-_BIG, -_BIG, -_BIG, rx0 - params.clearance - hx, _BIG, _BIG)
    if template == "rightof":
        return Volume(rx1 + params.clearance + hx, -_BIG, -_BIG, _BIG, _BIG, _BIG)
    if template == "infront":
        return Volume(-_BIG, -_BIG, -_BIG, _BIG, ry0 - params.clearance - hy, _BIG)
    if template == "behind":
        return Volume(-_BIG, ry1 + params.clearance + hy, -_BIG, _BIG, _BIG, _BIG)
    if template == "near":
        m = params.near_max
        return Volume(rx0 - m, ry0 - m, rz0 - m, rx1 + m, ry1 + m, rz1 + m)
    raise ConfigError(f"unknown volume template {template}")


def _validated(v: Volume) -> Volume:
    if v.empty:
        return EMPTY_VOLUME
    if v.x0 > v.x1 or v.y0 > v.y1 or v.z0 > v.z1:
        return EMPTY_VOLUME
    return v


def workspace_region(half: tuple[float, float, float], params: SpawnParams) -> Volume:
    """Default region: the workspace inset so the whole shape fits."""
    ws = params.workspace
    return _validated(
        Volume(
            ws.x0 + half[0], ws.y0 + half[1], ws.z0 + half[2],
            ws.x1 - half[0], ws.y1 - half[1], ws.z1 - half[2],
        )
    )


def volume_for_entity(
    eid: str,
    half: tuple[float, float, float],
    facts,
    placed_boxes: dict[str, AABB],
    rules,
    params: SpawnParams,
    skip_unplaced: bool = False,
) -> Volume:
    """Intersection of all template boxes constraining ``eid``.

    Every spatial fact with eid as first argument contributes one box based
    on the reference's placed AABB. With skip_unplaced, facts whose reference
    is not yet placed are ignored (used for static/relaxed volumes).
    """
    region = workspace_region(half, params)
    for fact in facts:
        if not fact.args or fact.args[0] != eid or fact.schema.kind != "spatial":
            continue
        template = rules.template_for(fact.schema.name)
        if template is None:
            raise ConfigError(f"spatial predicate {fact.schema.name} has no spawn rule")
        if len(fact.args) < 2:
            continue
        ref = fact.args[1]
        if ref not in placed_boxes:
            if skip_unplaced:
                continue
            raise ConfigError(f"volume for {eid}: reference {ref} not placed")
        box = template_box(template, half, placed_boxes[ref], params)
        region = region.intersect(_validated(box))
        if region.empty:
            return EMPTY_VOLUME
    return region


# ---------------------------------------------------------------------------
# Provable emptiness: difference constraints over entity centers
# ---------------------------------------------------------------------------
#
# Spatial facts between two sampled entities imply per-axis difference
# constraints (center_a - center_b <= w). Together with each entity's static
# box bounds (edges to a virtual origin), a negative cycle in the constraint
# graph proves that no joint placement exists at all, so an empty-volume
# verdict is exact rather than a sampling artifact. Near facts contribute
# only their bounding hull (sound relaxation).


def _pair_edges(
    template: str,
    a: str,
    b: str,
    ha: tuple[float, float, float],
    hb: tuple[float, float, float],
    params: SpawnParams,
) -> list[tuple[int, str, str, float]]:
    """Edges (axis, u, v, w) meaning center_v - center_u <= w."""
    edges: list[tuple[int, str, str, float]] = []

    def both(axis: int, bound: float) -> None:
        # |a - b| <= bound on this axis
        edges.append((axis, b, a, bound))
        edges.append((axis, a, b, bound))

    if template == "leftof":
        edges.append((0, b, a, -(params.clearance + ha[0] + hb[0])))
    elif template == "rightof":
        edges.append((0, a, b, -(params.clearance + ha[0] + hb[0])))
    elif template == "infront":
        edges.append((1, b, a, -(params.clearance + ha[1] + hb[1])))
    elif template == "behind":
        edges.append((1, a, b, -(params.clearance + ha[1] + hb[1])))
    elif template == "ontop":
        both(0, hb[0] - ha[0])
        both(1, hb[1] - ha[1])
        edges.append((2, b, a, hb[2] + ha[2]))
        edges.append((2, a, b, -(hb[2] + ha[2])))
    elif template == "inside":
        both(0, hb[0] - params.wall_inset - ha[0])
        both(1, hb[1] - params.wall_inset - ha[1])
        edges.append((2, b, a, hb[2] - ha[2]))
        edges.append((2, a, b, hb[2] - params.floor_inset - ha[2]))
    elif template == "near":
        # Center of a within near_max of b's AABB surface (per-axis hull).
        for axis in range(3):
            both(axis, params.near_max + hb[axis])
    return edges


def _attach_edges(holder: str, held: str, offset: tuple[float, float, float]):
    edges = []
    for axis in range(3):
        edges.append((axis, held, holder, offset[axis]))
        edges.append((axis, holder, held, -offset[axis]))
    return edges


def prove_joint_empty(
    sampled: dict[str, tuple[float, float, float]],
    static_volumes: dict[str, Volume],
    facts,
    rules,
    attach_offset: tuple[float, float, float],
    params: SpawnParams,
) -> bool:
    """True when the fact system provably admits no joint placement.

    ``sampled`` maps entity id to half-extents; ``static_volumes`` are each
    entity's fixed-reference-only volumes (finite, non-empty).
    """
    nodes = ["$origin"] + sorted(sampled)
    edges_by_axis: dict[int, list[tuple[str, str, float]]] = {0: [], 1: [], 2: []}

    for eid in sorted(sampled):
        vol = static_volumes[eid]
        for axis in range(3):
            lo, hi = vol.bounds(axis)
            edges_by_axis[axis].append(("$origin", eid, hi))
            edges_by_axis[axis].append((eid, "$origin", -lo))

    for fact in facts:
        if len(fact.args) < 2:
            continue
        a, b = fact.args[0], fact.args[1]
        if a not in sampled or b not in sampled:
            continue
        template = rules.template_for(fact.schema.name)
        if fact.schema.kind == "binding" or template == "attach":
            for axis, u, v, w in _attach_edges(a, b, attach_offset):
                edges_by_axis[axis].append((u, v, w))
        elif fact.schema.kind == "spatial" and template is not None:
            for axis, u, v, w in _pair_edges(template, a, b, sampled[a], sampled[b], params):
                edges_by_axis[axis].append((u, v, w))

    for axis in range(3):
        dist = {n: 0.0 for n in nodes}  # zero source: any negative cycle suffices
        edges = edges_by_axis[axis]
        converged = False
        for _ in range(len(nodes) - 1):
            changed = False
            for u, v, w in edges:
                if dist[u] + w < dist[v] - 1e-12:
                    dist[v] = dist[u] + w
                    changed = True
            if not changed:
                converged = True
                break
        if not converged:
            for u, v, w in edges:
                if dist[u] + w < dist[v] - 1e-12:
                    return True
    return False
