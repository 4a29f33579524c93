"""Pure-Python geometry kernels (reference implementation).

The compiled twin in ``_kernels_cy.pyx`` mirrors this module function for
function; both operate on the packed scene layout produced by the spawner:
7 doubles per entity ``[kind, cx, cy, cz, ex, ey, ez]`` where kind 0.0 is an
upright box with half-extents (ex, ey, ez) and kind 1.0 a sphere of radius ex.

Overlap means penetration deeper than ``tol``; touching contacts within the
tolerance are not collisions. All comparisons avoid square roots so the two
backends decide identically.
"""

from __future__ import annotations

BOX = 0.0
SPHERE = 1.0


def dist_sq(ax, ay, az, bx, by, bz):
    dx = ax - bx
    dy = ay - by
    dz = az - bz
    return dx * dx + dy * dy + dz * dz


def box_min_dist_sq(px, py, pz, x0, y0, z0, x1, y1, z1):
    """Squared distance from a point to an AABB (0 inside)."""
    dx = x0 - px if px < x0 else (px - x1 if px > x1 else 0.0)
    dy = y0 - py if py < y0 else (py - y1 if py > y1 else 0.0)
    dz = z0 - pz if pz < z0 else (pz - z1 if pz > z1 else 0.0)
    return dx * dx + dy * dy + dz * dz


def pair_overlaps(k1, x1, y1, z1, e1x, e1y, e1z, k2, x2, y2, z2, e2x, e2y, e2z, tol):
    """Penetration test for one shape pair."""
    if k1 == BOX and k2 == BOX:
        if (min(x1 + e1x, x2 + e2x) - max(x1 - e1x, x2 - e2x)) <= tol:
            return False
        if (min(y1 + e1y, y2 + e2y) - max(y1 - e1y, y2 - e2y)) <= tol:
            return False
        return (min(z1 + e1z, z2 + e2z) - max(z1 - e1z, z2 - e2z)) > tol
    if k1 == SPHERE and k2 == SPHERE:
        reach = e1x + e2x - tol
        if reach <= 0.0:
            return False
        return dist_sq(x1, y1, z1, x2, y2, z2) < reach * reach
    # Box-sphere: closest point on the box to the sphere center.
    if k1 == SPHERE:
        k1, x1, y1, z1, e1x, e1y, e1z, k2, x2, y2, z2, e2x, e2y, e2z = (
            k2, x2, y2, z2, e2x, e2y, e2z, k1, x1, y1, z1, e1x, e1y, e1z,
        )
    reach = e2x - tol
    if reach <= 0.0:
        return False
    d2 = box_min_dist_sq(x2, y2, z2, x1 - e1x, y1 - e1y, z1 - e1z, x1 + e1x, y1 + e1y, z1 + e1z)
    return d2 < reach * reach


def any_overlap(flat, n, k, x, y, z, ex, ey, ez, tol, exempt):
    """Index of the first packed entity penetrating the candidate, else -1.

    ``exempt`` is a small sequence of indices excluded from the test.
    """
    for i in range(n):
        if i in exempt:
            continue
        base = i * 7
        if pair_overlaps(
            flat[base], flat[base + 1], flat[base + 2], flat[base + 3],
            flat[base + 4], flat[base + 5], flat[base + 6],
            k, x, y, z, ex, ey, ez, tol,
        ):
            return i
    return -1


def pairwise_overlaps(flat, n, tol, exempt_pairs):
    """All penetrating index pairs (i < j), skipping exempt pairs."""
    hits = []
    for i in range(n):
        bi = i * 7
        for j in range(i + 1, n):
            bj = j * 7
            if pair_overlaps(
                flat[bi], flat[bi + 1], flat[bi + 2], flat[bi + 3],
                flat[bi + 4], flat[bi + 5], flat[bi + 6],
                flat[bj], flat[bj + 1], flat[bj + 2], flat[bj + 3],
                flat[bj + 4], flat[bj + 5], flat[bj + 6],
                tol,
            ) and (i, j) not in exempt_pairs:
                hits.append((i, j))
    return hits
