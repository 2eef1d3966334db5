"""Independent reference implementations used to cross-check the package.

Everything here is deliberately naive: cyclic Jacobi iteration instead of
LAPACK, O(n^2) segment-pair scans instead of computational-geometry
libraries, and exhaustive pair enumeration for angle maxima.  Slow is fine;
these exist so the fast implementations have something honest to disagree
with.
"""

import math

import numpy as np


def jacobi_eigh(sym, sweeps=100, tol=1e-14):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) sorted by descending eigenvalue,
    eigenvectors in columns.
    """
    a = np.array(sym, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    v = np.eye(n)
    scale = np.linalg.norm(a) or 1.0
    for _ in range(sweeps):
        off = math.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = 0.5 * math.atan2(2.0 * apq, a[q, q] - a[p, p])
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    order = np.argsort(np.diag(a))[::-1]
    return np.diag(a)[order], v[:, order]


def svd_oracle(matrix):
    """Full SVD via Jacobi on the Gram matrix of the smaller side.

    Returns (u, s, vt) with singular values sorted descending.  Vectors for
    near-zero singular values are left at zero; callers comparing subspaces
    should restrict to the numerical rank.
    """
    a = np.array(matrix, dtype=float)
    rows, cols = a.shape
    if rows <= cols:
        evals, u = jacobi_eigh(a @ a.T)
        s = np.sqrt(np.clip(evals, 0.0, None))
        vt = np.zeros((rows, cols))
        for i in range(rows):
            if s[i] > 1e-12 * (s[0] if s[0] > 0 else 1.0):
                vt[i] = (a.T @ u[:, i]) / s[i]
        return u, s, vt
    evals, v = jacobi_eigh(a.T @ a)
    s = np.sqrt(np.clip(evals, 0.0, None))
    u = np.zeros((rows, cols))
    for i in range(cols):
        if s[i] > 1e-12 * (s[0] if s[0] > 0 else 1.0):
            u[:, i] = (a @ v[:, i]) / s[i]
    return u, s, v.T


def tail_energy(singular_values, m):
    """Frobenius norm of the best rank-m residual: sqrt(sum of sigma_i^2, i>m)."""
    tail = np.asarray(singular_values, dtype=float)[m:]
    return math.sqrt(float(np.sum(tail**2)))


def _orient(a, b, c):
    ux, uy = b[0] - a[0], b[1] - a[1]
    vx, vy = c[0] - a[0], c[1] - a[1]
    cross = ux * vy - uy * vx
    # relative epsilon: rotated collinear points carry O(1e-15) cross noise
    eps = 1e-9 * max(1.0, math.hypot(ux, uy) * math.hypot(vx, vy))
    if cross > eps:
        return 1
    if cross < -eps:
        return -1
    return 0


def _on_segment(a, b, p):
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def segments_intersect(p1, p2, p3, p4):
    """Closed-segment intersection test via orientation predicates."""
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0) or d1 == 0 or d2 == 0) and (
        (d3 > 0) != (d4 > 0) or d3 == 0 or d4 == 0
    ):
        if d1 != d2 and d3 != d4:
            return True
        if d1 == 0 and _on_segment(p3, p4, p1):
            return True
        if d2 == 0 and _on_segment(p3, p4, p2):
            return True
        if d3 == 0 and _on_segment(p1, p2, p3):
            return True
        if d4 == 0 and _on_segment(p1, p2, p4):
            return True
    return False


def polygon_is_simple(points):
    """Brute-force simplicity: non-adjacent edges never meet, adjacent edges
    share exactly their common endpoint, and the ring encloses area."""
    pts = [tuple(map(float, p)) for p in points]
    n = len(pts)
    if n < 3:
        return False
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for a, b in edges:
        if a == b:
            return False
    for prev, shared, nxt in zip(pts, pts[1:] + pts[:1], pts[2:] + pts[:2]):
        # fold-back: consecutive edges overlap along a common line
        if _orient(prev, shared, nxt) == 0 and (
            _on_segment(prev, shared, nxt) or _on_segment(shared, nxt, prev)
        ):
            return False
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if segments_intersect(*edges[i], *edges[j]):
                return False
    return abs(shoelace_area(pts)) > 0.0


def shoelace_area(points):
    """Signed polygon area by direct shoelace summation."""
    pts = list(points)
    total = 0.0
    for i, (x1, y1) in enumerate(pts):
        x2, y2 = pts[(i + 1) % len(pts)]
        total += x1 * y2 - x2 * y1
    return 0.5 * total


def fold_oracle(delta):
    """Fold an angle difference into [0, 90] by explicit stepping."""
    d = abs(float(delta))
    while d >= 180.0:
        d -= 180.0
    return min(d, 180.0 - d)


def brute_force_cobb(uppers, lowers):
    """Exhaustive regional Cobb search over endplate tilt lists.

    Returns ((pt, pt_pair), (mt, mt_pair), (tll, tll_pair)) where the main
    angle is the global pairwise maximum, the proximal search runs strictly
    above its upper vertebra, and the distal search strictly below its lower
    vertebra.  Ties resolve to the first pair in row-major order.
    """
    n = len(uppers)

    def scan(lo, hi):
        best, pair = -1.0, None
        for i in range(lo, hi):
            for j in range(i, hi):
                ang = fold_oracle(uppers[i] - lowers[j])
                if ang > best:
                    best, pair = ang, (i, j)
        return best, pair

    mt, mt_pair = scan(0, n)
    mi, mj = mt_pair
    pt, pt_pair = scan(0, mi) if mi > 0 else (0.0, (mi, mi))
    if mj + 1 < n:
        tll, tll_pair = scan(mj + 1, n)
    else:
        tll, tll_pair = 0.0, (mj, mj)
    return (pt, pt_pair), (mt, mt_pair), (tll, tll_pair)
