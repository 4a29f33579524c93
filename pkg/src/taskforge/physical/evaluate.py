"""Exact geometric evaluation of spatial and binding facts.

This is the re-checker the sampler is audited against: it looks only at
final poses and shapes and decides each fact directly from its definition,
sharing no volume-construction code with the spawner. Accepted scenes must
satisfy every fact here.
"""

from __future__ import annotations

from ..errors import ConfigError
from ..model import GroundPredicate
from . import kernels
from .volumes import RobotModel, SpawnParams


def fact_satisfied(
    fact: GroundPredicate,
    scene,
    rules,
    robot: RobotModel,
    params: SpawnParams,
) -> bool:
    """Does the placed scene satisfy this fact's geometric meaning?

    Facts without geometric meaning (unary-state kind) are vacuously true.
    """
    kind = fact.schema.kind
    if kind not in ("spatial", "binding") or len(fact.args) < 2:
        return True
    template = rules.template_for(fact.schema.name)
    if template is None:
        if kind in ("spatial", "binding"):
            raise ConfigError(f"predicate {fact.schema.name} has no spawn rule")
        return True
    a, b = fact.args[0], fact.args[1]
    tol = params.contact_tol

    if template == "attach":
        # a holds b: a's pose sits at b's pose plus the attachment offset.
        pa, pb = scene.poses[a], scene.poses[b]
        off = robot.attach_offset
        return (
            abs(pa.x - (pb.x + off[0])) <= tol
            and abs(pa.y - (pb.y + off[1])) <= tol
            and abs(pa.z - (pb.z + off[2])) <= tol
        )

    ax0, ay0, az0, ax1, ay1, az1 = scene.aabb(a)
    bx0, by0, bz0, bx1, by1, bz1 = scene.aabb(b)

    if template == "ontop":
        return (
            abs(az0 - bz1) <= tol
            and ax0 >= bx0 - tol
            and ax1 <= bx1 + tol
            and ay0 >= by0 - tol
            and ay1 <= by1 + tol
        )
    if template == "inside":
        w, f = params.wall_inset, params.floor_inset
        return (
            ax0 >= bx0 + w - tol
            and ax1 <= bx1 - w + tol
            and ay0 >= by0 + w - tol
            and ay1 <= by1 - w + tol
            and az0 >= bz0 + f - tol
            and az1 <= bz1 + tol
        )
    if template == "leftof":
        return ax1 <= bx0 - params.clearance + tol
    if template == "rightof":
        return ax0 >= bx1 + params.clearance - tol
    if template == "infront":
        return ay1 <= by0 - params.clearance + tol
    if template == "behind":
        return ay0 >= by1 + params.clearance - tol
    if template == "near":
        pa = scene.poses[a]
        d2 = kernels.box_min_dist_sq(pa.x, pa.y, pa.z, bx0, by0, bz0, bx1, by1, bz1)
        hi = params.near_max + tol
        lo = max(0.0, params.near_min - tol)
        return lo * lo <= d2 <= hi * hi
    raise ConfigError(f"unknown volume template {template}")


def scene_violations(facts, scene, rules, robot: RobotModel, params: SpawnParams) -> list[str]:
    """Every fact the placed scene fails to satisfy, as readable strings."""
    bad = []
    for fact in sorted(facts, key=str):
        if not fact_satisfied(fact, scene, rules, robot, params):
            bad.append(str(fact))
    return bad
