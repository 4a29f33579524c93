# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry kernels; function-for-function twin of _kernels_py.

Same packed layout (7 doubles per entity) and identical comparison logic so
both backends return the same decisions on the same inputs.
"""


cdef inline double _dist_sq(double ax, double ay, double az,
                            double bx, double by, double bz) nogil:
    cdef double dx = ax - bx
    cdef double dy = ay - by
    cdef double dz = az - bz
    return dx * dx + dy * dy + dz * dz


cdef inline double _box_min_dist_sq(double px, double py, double pz,
                                    double x0, double y0, double z0,
                                    double x1, double y1, double z1) nogil:
    cdef double dx = 0.0
    cdef double dy = 0.0
    cdef double dz = 0.0
    if px < x0:
        dx = x0 - px
    elif px > x1:
        dx = px - x1
    if py < y0:
        dy = y0 - py
    elif py > y1:
        dy = py - y1
    if pz < z0:
        dz = z0 - pz
    elif pz > z1:
        dz = pz - z1
    return dx * dx + dy * dy + dz * dz


cdef inline double _min(double a, double b) nogil:
    return a if a < b else b


cdef inline double _max(double a, double b) nogil:
    return a if a > b else b


cdef bint _pair_overlaps(double k1, double x1, double y1, double z1,
                         double e1x, double e1y, double e1z,
                         double k2, double x2, double y2, double z2,
                         double e2x, double e2y, double e2z,
                         double tol) nogil:
    cdef double reach, d2
    cdef double tk, tx, ty, tz, tex, tey, tez
    if k1 == 0.0 and k2 == 0.0:
        if (_min(x1 + e1x, x2 + e2x) - _max(x1 - e1x, x2 - e2x)) <= tol:
            return False
        if (_min(y1 + e1y, y2 + e2y) - _max(y1 - e1y, y2 - e2y)) <= tol:
            return False
        return (_min(z1 + e1z, z2 + e2z) - _max(z1 - e1z, z2 - e2z)) > tol
    if k1 == 1.0 and k2 == 1.0:
        reach = e1x + e2x - tol
        if reach <= 0.0:
            return False
        return _dist_sq(x1, y1, z1, x2, y2, z2) < reach * reach
    if k1 == 1.0:
        tk = k1; tx = x1; ty = y1; tz = z1; tex = e1x; tey = e1y; tez = e1z
        k1 = k2; x1 = x2; y1 = y2; z1 = z2; e1x = e2x; e1y = e2y; e1z = e2z
        k2 = tk; x2 = tx; y2 = ty; z2 = tz; e2x = tex; e2y = tey; e2z = tez
    reach = e2x - tol
    if reach <= 0.0:
        return False
    d2 = _box_min_dist_sq(x2, y2, z2,
                          x1 - e1x, y1 - e1y, z1 - e1z,
                          x1 + e1x, y1 + e1y, z1 + e1z)
    return d2 < reach * reach


def dist_sq(double ax, double ay, double az, double bx, double by, double bz):
    return _dist_sq(ax, ay, az, bx, by, bz)


def box_min_dist_sq(double px, double py, double pz,
                    double x0, double y0, double z0,
                    double x1, double y1, double z1):
    """Squared distance from a point to an AABB (0 inside)."""
    return _box_min_dist_sq(px, py, pz, x0, y0, z0, x1, y1, z1)


def pair_overlaps(double k1, double x1, double y1, double z1,
                  double e1x, double e1y, double e1z,
                  double k2, double x2, double y2, double z2,
                  double e2x, double e2y, double e2z, double tol):
    """Penetration test for one shape pair."""
    return _pair_overlaps(k1, x1, y1, z1, e1x, e1y, e1z,
                          k2, x2, y2, z2, e2x, e2y, e2z, tol)


def any_overlap(double[:] flat, Py_ssize_t n,
                double k, double x, double y, double z,
                double ex, double ey, double ez,
                double tol, exempt):
    """Index of the first packed entity penetrating the candidate, else -1."""
    cdef Py_ssize_t i, b, m, j
    cdef Py_ssize_t nex = len(exempt)
    cdef Py_ssize_t[16] ex_buf
    cdef bint skip
    m = nex if nex < 16 else 16
    for j in range(m):
        ex_buf[j] = exempt[j]
    for i in range(n):
        skip = False
        for j in range(m):
            if ex_buf[j] == i:
                skip = True
                break
        if not skip and nex > 16 and i in exempt:
            skip = True
        if skip:
            continue
        b = i * 7
        if _pair_overlaps(flat[b], flat[b + 1], flat[b + 2], flat[b + 3],
                          flat[b + 4], flat[b + 5], flat[b + 6],
                          k, x, y, z, ex, ey, ez, tol):
            return i
    return -1


def pairwise_overlaps(double[:] flat, Py_ssize_t n, double tol, exempt_pairs):
    """All penetrating index pairs (i < j), skipping exempt pairs."""
    cdef Py_ssize_t i, j, bi, bj
    hits = []
    for i in range(n):
        bi = i * 7
        for j in range(i + 1, n):
            bj = j * 7
            if _pair_overlaps(flat[bi], flat[bi + 1], flat[bi + 2], flat[bi + 3],
                              flat[bi + 4], flat[bi + 5], flat[bi + 6],
                              flat[bj], flat[bj + 1], flat[bj + 2], flat[bj + 3],
                              flat[bj + 4], flat[bj + 5], flat[bj + 6], tol):
                if (i, j) not in exempt_pairs:
                    hits.append((i, j))
    return hits
