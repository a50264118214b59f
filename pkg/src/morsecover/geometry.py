"""Normed-space primitives and tagged starlike sets.

A tagged set S has a tag point a, an inner radius r > 0 and a shape factor
lam >= 1 with B(a, r) contained in S, S contained in B(a, lam*r), and S
starlike with respect to every point of B(a, r).  Three concrete shapes are
supported:

* balls (closed or open) whose tag may sit anywhere in the interior,
* half-open axis-aligned intervals (lower faces excluded, upper included),
* star polytopes: star polygons about an interior kernel ball in the plane,
  convex vertex polytopes in dimension >= 3.

All values are immutable after construction and safe to share across
threads.  Strict/non-strict comparisons use an absolute tolerance of
1e-9 scaled by the set's inner radius, so predicates are scale invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ContractError, InputError

Vec = tuple[float, ...]

REL_TOL = 1e-9


def _as_vec(x: Sequence[float]) -> Vec:
    return tuple(float(c) for c in x)


# ---------------------------------------------------------------------------
# Spaces and norms
# ---------------------------------------------------------------------------

_NORMS = ("l1", "l2", "linf", "wlinf")


@dataclass(frozen=True)
class Space:
    """R^d with one of the norms l1, l2, linf or weighted linf.

    The weighted linf norm is max_i w_i * |x_i| with all weights positive.
    """

    dim: int
    norm: str = "l2"
    weights: Vec | None = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dimension must be a positive integer, got {self.dim}")
        if self.norm not in _NORMS:
            raise InputError(f"unknown norm {self.norm!r}; expected one of {_NORMS}")
        if self.norm == "wlinf":
            if self.weights is None or len(self.weights) != self.dim:
                raise InputError("wlinf norm needs one positive weight per axis")
            ws = _as_vec(self.weights)
            if any(w <= 0 for w in ws):
                raise InputError("wlinf weights must be positive")
            object.__setattr__(self, "weights", ws)
        elif self.weights is not None:
            raise InputError("weights are only meaningful for the wlinf norm")

    # -- scalar evaluation ---------------------------------------------------

    def norm_of(self, x: Sequence[float]) -> float:
        if len(x) != self.dim:
            raise InputError(f"point has {len(x)} coordinates, space has dim {self.dim}")
        if self.norm == "l2":
            return math.sqrt(sum(c * c for c in x))
        if self.norm == "l1":
            return sum(abs(c) for c in x)
        if self.norm == "linf":
            return max(abs(c) for c in x)
        return max(w * abs(c) for w, c in zip(self.weights, x))

    def dist(self, x: Sequence[float], y: Sequence[float]) -> float:
        return self.norm_of(tuple(a - b for a, b in zip(x, y)))

    def dual_norm_of(self, x: Sequence[float]) -> float:
        """Norm of a linear functional, used for half-space/ball containment."""
        if self.norm == "l2":
            return math.sqrt(sum(c * c for c in x))
        if self.norm == "l1":
            return max(abs(c) for c in x)
        if self.norm == "linf":
            return sum(abs(c) for c in x)
        return sum(abs(c) / w for w, c in zip(self.weights, x))

    # -- vectorized evaluation -------------------------------------------------

    def norm_array(self, pts: np.ndarray) -> np.ndarray:
        """Norms of the rows of an (n, dim) array."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[1] != self.dim:
            raise InputError(f"array has {pts.shape[1]} columns, space has dim {self.dim}")
        if self.norm == "l2":
            return np.sqrt(np.sum(pts * pts, axis=1))
        if self.norm == "l1":
            return np.sum(np.abs(pts), axis=1)
        if self.norm == "linf":
            return np.max(np.abs(pts), axis=1)
        return np.max(np.abs(pts) * np.asarray(self.weights), axis=1)

    # -- geometric constants ----------------------------------------------------

    def axis_extent(self, i: int) -> float:
        """Half-width of the unit ball along coordinate axis i."""
        if self.norm == "wlinf":
            return 1.0 / self.weights[i]
        return 1.0

    def unit_ball_volume(self) -> float:
        d = self.dim
        if self.norm == "l2":
            return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
        if self.norm == "l1":
            return 2.0**d / math.factorial(d)
        if self.norm == "linf":
            return 2.0**d
        vol = 1.0
        for w in self.weights:
            vol *= 2.0 / w
        return vol

    def ball_volume(self, radius: float) -> float:
        return self.unit_ball_volume() * radius**self.dim


def norm_eval(space: Space, x: Sequence[float]) -> float:
    """Norm of a point; raises InputError on dimension mismatch."""
    return space.norm_of(x)


# ---------------------------------------------------------------------------
# Deterministic low-discrepancy sampling (Halton)
# ---------------------------------------------------------------------------

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def _halton_axis(n: int, base: int, skip: int = 0) -> np.ndarray:
    out = np.empty(n)
    for k in range(n):
        i = k + skip + 1
        f, r = 1.0, 0.0
        while i > 0:
            f /= base
            r += f * (i % base)
            i //= base
        out[k] = r
    return out


def halton_points(n: int, dim: int, skip: int = 0) -> np.ndarray:
    """n deterministic low-discrepancy points in [0, 1)^dim."""
    return np.column_stack([_halton_axis(n, _PRIMES[i], skip) for i in range(dim)])


def sample_unit_ball(space: Space, n: int, skip: int = 0) -> np.ndarray:
    """About n deterministic points filling the closed unit ball of the norm."""
    pts = []
    offset = skip
    while len(pts) < n:
        block = 2.0 * halton_points(2 * n, space.dim, skip=offset) - 1.0
        offset += 2 * n
        keep = block[space.norm_array(block) <= 1.0]
        pts.extend(keep.tolist())
    return np.array(pts[:n])


def sample_unit_sphere(space: Space, n: int, skip: int = 0) -> np.ndarray:
    """n deterministic directions of norm exactly 1."""
    dirs = []
    offset = skip
    while len(dirs) < n:
        block = 2.0 * halton_points(2 * n, space.dim, skip=offset) - 1.0
        offset += 2 * n
        norms = space.norm_array(block)
        ok = norms > 1e-12
        dirs.extend((block[ok] / norms[ok, None]).tolist())
    return np.array(dirs[:n])


# ---------------------------------------------------------------------------
# Shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    center: Vec
    radius: float
    closed: bool = True


@dataclass(frozen=True)
class Interval:
    """Half-open box {a_i < x_i <= a_i + b_i}; the tag sits at a + b*frac.

    The closure flag switches the lower faces from excluded to included.
    """

    anchor: Vec
    edges: Vec
    tag_frac: Vec
    closed: bool = False


@dataclass(frozen=True)
class StarPolytope:
    kernel_center: Vec
    kernel_radius: float
    vertices: tuple[Vec, ...]


Shape = Ball | Interval | StarPolytope


@dataclass(frozen=True)
class MorseSet:
    """A tagged starlike set with certified inner/outer ball sandwich."""

    space: Space
    tag: Vec
    inner_radius: float
    lam: float
    shape: Shape

    @property
    def tol(self) -> float:
        return REL_TOL * self.inner_radius

    def __post_init__(self):
        if self.inner_radius <= 0:
            raise InputError("inner radius must be positive")
        if self.lam < 1.0:
            raise InputError(f"lam must be >= 1, got {self.lam}")
        if len(self.tag) != self.space.dim:
            raise InputError("tag dimension does not match space")


@dataclass(frozen=True)
class Segment:
    """The segment alpha*y + (1-alpha)*x for alpha in [0, 1]."""

    y: Vec
    x: Vec

    def point_at(self, alpha: float) -> Vec:
        return tuple(alpha * a + (1.0 - alpha) * b for a, b in zip(self.y, self.x))


# -- constructors -----------------------------------------------------------


def closed_ball(space: Space, center: Sequence[float], radius: float,
                tag: Sequence[float] | None = None, lam: float | None = None) -> MorseSet:
    """Closed norm ball; the default tag is the center (lam = 1)."""
    return _ball(space, center, radius, tag, lam, closed=True)


def open_ball(space: Space, center: Sequence[float], radius: float,
              tag: Sequence[float] | None = None, lam: float | None = None) -> MorseSet:
    """Open norm ball with the tag strictly inside."""
    return _ball(space, center, radius, tag, lam, closed=False)


def _ball(space, center, radius, tag, lam, closed) -> MorseSet:
    center = _as_vec(center)
    if radius <= 0:
        raise InputError("ball radius must be positive")
    tag = center if tag is None else _as_vec(tag)
    off = space.dist(tag, center)
    if off >= radius:
        raise InputError("tag must lie in the interior of the ball")
    # offset ratio w gives the minimal shape factor (1+w)/(1-w)
    w = off / radius
    min_lam = max(1.0, (1.0 + w) / (1.0 - w))
    r = radius - off
    if lam is None:
        lam = min_lam
    return MorseSet(space, tag, r, float(lam), Ball(center, float(radius), closed))


def tagged_interval(space: Space, anchor: Sequence[float], edges: Sequence[float],
                    tag_frac: Sequence[float] | None = None, lam: float | None = None) -> MorseSet:
    """Half-open box (a, a+b] with tag at a + b*c; needs sum(c_i^2) < 1."""
    anchor = _as_vec(anchor)
    edges = _as_vec(edges)
    d = space.dim
    if len(anchor) != d or len(edges) != d:
        raise InputError("anchor/edges dimension mismatch")
    if any(b <= 0 for b in edges):
        raise InputError("edge lengths must be positive")
    if tag_frac is None:
        c = min(0.5, 0.9 / math.sqrt(d))
        tag_frac = (c,) * d
    else:
        tag_frac = _as_vec(tag_frac)
    if any(c <= 0 for c in tag_frac) or sum(c * c for c in tag_frac) >= 1.0:
        raise InputError("tag fractions must be positive with squared sum < 1")
    tag = tuple(a + b * c for a, b, c in zip(anchor, edges, tag_frac))
    # largest ball about the tag fitting in the box, accounting for the norm's
    # per-axis extent
    r = min(min(c * b, (1.0 - c) * b) / space.axis_extent(i)
            for i, (b, c) in enumerate(zip(edges, tag_frac)))
    outer = _box_outer_radius(space, anchor, edges, tag)
    min_lam = max(1.0, outer / r)
    if lam is None:
        lam = min_lam
    return MorseSet(space, tag, r, float(lam), Interval(anchor, edges, tag_frac))


def _box_corners(anchor: Vec, edges: Vec) -> np.ndarray:
    d = len(anchor)
    corners = np.array(np.meshgrid(*[(a, a + b) for a, b in zip(anchor, edges)],
                                   indexing="ij")).reshape(d, -1).T
    return corners


def _box_outer_radius(space: Space, anchor: Vec, edges: Vec, tag: Vec) -> float:
    corners = _box_corners(anchor, edges) - np.asarray(tag)
    return float(np.max(space.norm_array(corners)))


def star_polytope(space: Space, kernel_center: Sequence[float], kernel_radius: float,
                  vertices: Sequence[Sequence[float]], lam: float | None = None,
                  check_kernel: bool = True) -> MorseSet:
    """Star polytope tagged at its kernel center.

    In the plane the vertex list is sorted by angle about the kernel center
    and membership follows the radial boundary function; in dimension >= 3
    the vertices must describe a convex polytope.  When check_kernel is set
    the kernel ball is verified to see the whole boundary, which certifies
    starlikeness with respect to every kernel point.
    """
    k = _as_vec(kernel_center)
    r = float(kernel_radius)
    verts = tuple(_as_vec(v) for v in vertices)
    if r <= 0:
        raise InputError("kernel radius must be positive")
    if not verts:
        raise InputError("empty vertex list")
    if any(len(v) != space.dim for v in verts):
        raise InputError("vertex dimension mismatch")
    if space.dim == 2:
        verts = _sort_by_angle(k, verts)
    shape = StarPolytope(k, r, verts)
    dists = [space.dist(v, k) for v in verts]
    min_lam = max(1.0, max(dists) / r)
    if check_kernel and not _kernel_ball_inside(space, shape):
        raise InputError("kernel ball does not see the whole polytope boundary")
    if lam is None:
        lam = min_lam
    return MorseSet(space, k, r, float(lam), shape)


def _sort_by_angle(center: Vec, verts: tuple[Vec, ...]) -> tuple[Vec, ...]:
    angles = [math.atan2(v[1] - center[1], v[0] - center[0]) for v in verts]
    order = sorted(range(len(verts)), key=lambda i: angles[i])
    sorted_angles = [angles[i] for i in order]
    for a, b in zip(sorted_angles, sorted_angles[1:]):
        if abs(a - b) < 1e-12:
            raise InputError("two vertices share a ray from the kernel center")
    return tuple(verts[i] for i in order)


def _kernel_ball_inside(space: Space, shape: StarPolytope) -> bool:
    """The kernel ball must lie on the inner side of every boundary facet."""
    k = np.asarray(shape.kernel_center)
    r = shape.kernel_radius
    if space.dim == 2:
        vs = np.asarray(shape.vertices)
        n = len(vs)
        for i in range(n):
            a, b = vs[i], vs[(i + 1) % n]
            e = b - a
            nrm = np.array([e[1], -e[0]])  # points to the kernel side iff dot > 0
            s = float(np.dot(nrm, k - a))
            if s < 0:
                nrm, s = -nrm, -s
            # ball of radius r fits in the half-plane when the dual-norm
            # extent of the facet normal stays below the signed offset
            if s < r * space.dual_norm_of(tuple(nrm)) - 1e-12 * max(1.0, s):
                return False
        return True
    eqs = _hull_equations(shape)
    for row in eqs:
        nrm, b = row[:-1], row[-1]
        # facet: nrm . x + b <= 0 inside
        if float(np.dot(nrm, k)) + b + r * space.dual_norm_of(tuple(nrm)) > 1e-12:
            return False
    return True


@lru_cache(maxsize=256)
def _hull_equations_cached(verts: tuple[Vec, ...]) -> np.ndarray:
    from scipy.spatial import ConvexHull

    return ConvexHull(np.asarray(verts)).equations.copy()


def _hull_equations(shape: StarPolytope) -> np.ndarray:
    return _hull_equations_cached(shape.vertices)


def make_star(space: Space, center: Sequence[float], kernel_radius: float,
              points: int = 5, outer: float = 1.0, inner: float = 0.5,
              phase: float = 0.0) -> MorseSet:
    """Regular 2D star polygon helper: alternating outer/inner vertices."""
    if space.dim != 2:
        raise InputError("make_star builds plane figures only")
    cx, cy = center
    verts = []
    for i in range(points):
        a_out = phase + 2.0 * math.pi * i / points
        a_in = a_out + math.pi / points
        verts.append((cx + outer * math.cos(a_out), cy + outer * math.sin(a_out)))
        verts.append((cx + inner * math.cos(a_in), cy + inner * math.sin(a_in)))
    return star_polytope(space, center, kernel_radius, verts)


# ---------------------------------------------------------------------------
# Membership and interior predicates
# ---------------------------------------------------------------------------


def _check_dim(S: MorseSet, x: Sequence[float]):
    if len(x) != S.space.dim:
        raise InputError("point dimension does not match the set's space")


def morse_contains(S: MorseSet, x: Sequence[float]) -> bool:
    """Exact membership (up to the scaled tolerance; half-open boxes honored)."""
    _check_dim(S, x)
    sh, tol = S.shape, S.tol
    if isinstance(sh, Ball):
        d = S.space.dist(x, sh.center)
        return d <= sh.radius + tol if sh.closed else d < sh.radius - tol
    if isinstance(sh, Interval):
        if sh.closed:
            return all(a - tol <= c <= a + b + tol
                       for a, b, c in zip(sh.anchor, sh.edges, x))
        return all(a + tol < c <= a + b + tol
                   for a, b, c in zip(sh.anchor, sh.edges, x))
    return _star_side(S, x) <= tol


def interior_contains(S: MorseSet, x: Sequence[float]) -> bool:
    """True iff x lies in the topological interior of S."""
    _check_dim(S, x)
    sh, tol = S.shape, S.tol
    if isinstance(sh, Ball):
        return S.space.dist(x, sh.center) < sh.radius - tol
    if isinstance(sh, Interval):
        return all(a + tol < c < a + b - tol
                   for a, b, c in zip(sh.anchor, sh.edges, x))
    return _star_side(S, x) < -tol


def closure_contains(S: MorseSet, x: Sequence[float]) -> bool:
    _check_dim(S, x)
    sh, tol = S.shape, S.tol
    if isinstance(sh, Ball):
        return S.space.dist(x, sh.center) <= sh.radius + tol
    if isinstance(sh, Interval):
        return all(a - tol <= c <= a + b + tol
                   for a, b, c in zip(sh.anchor, sh.edges, x))
    return _star_side(S, x) <= tol


def _star_side(S: MorseSet, x: Sequence[float]) -> float:
    """Signed inclusion margin for star polytopes (negative strictly inside).

    2D: radial distance minus the boundary radius along the ray from the
    kernel center, scaled to the set size.  d>=3: maximal facet excess.
    """
    sh = S.shape
    if S.space.dim == 2:
        kx, ky = sh.kernel_center
        dx, dy = x[0] - kx, x[1] - ky
        rho = math.hypot(dx, dy)
        if rho < 1e-300:
            return -math.inf
        rb = _star_boundary_radius(sh, math.atan2(dy, dx))
        return rho - rb
    eqs = _hull_equations(sh)
    p = np.asarray(x, dtype=float)
    return float(np.max(eqs[:, :-1] @ p + eqs[:, -1]))


def _star_boundary_radius(sh: StarPolytope, theta: float) -> float:
    """Euclidean distance from the kernel center to the boundary along theta."""
    k = np.asarray(sh.kernel_center)
    vs = np.asarray(sh.vertices) - k
    angles = np.arctan2(vs[:, 1], vs[:, 0])
    n = len(vs)
    # wedge index: last vertex with angle <= theta (vertices sorted by angle)
    i = int(np.searchsorted(angles, theta, side="right")) - 1
    i %= n
    w0, w1 = vs[i], vs[(i + 1) % n]
    u = np.array([math.cos(theta), math.sin(theta)])
    denom = u[0] * (w1[1] - w0[1]) - u[1] * (w1[0] - w0[0])
    if abs(denom) < 1e-300:
        return float(np.linalg.norm(w0))
    s = (w0[0] * w1[1] - w0[1] * w1[0]) / denom
    return float(s)


# ---------------------------------------------------------------------------
# Derived quantities
# ---------------------------------------------------------------------------


def outer_radius(S: MorseSet) -> float:
    """sup over x in S of ||x - tag||."""
    sh = S.shape
    space = S.space
    if isinstance(sh, Ball):
        return sh.radius + space.dist(S.tag, sh.center)
    if isinstance(sh, Interval):
        return _box_outer_radius(space, sh.anchor, sh.edges, S.tag)
    pts = np.asarray(sh.vertices) - np.asarray(S.tag)
    return float(np.max(space.norm_array(pts)))


def morse_diameter(S: MorseSet) -> float:
    """Exact diameter: 2r for balls, max vertex distance otherwise."""
    sh = S.shape
    space = S.space
    if isinstance(sh, Ball):
        return 2.0 * sh.radius
    if isinstance(sh, Interval):
        corners = _box_corners(sh.anchor, sh.edges)
    else:
        corners = np.asarray(sh.vertices)
    best = 0.0
    for i in range(len(corners)):
        diffs = corners[i + 1:] - corners[i]
        if len(diffs):
            best = max(best, float(np.max(space.norm_array(diffs))))
    return best


def morse_scale(S: MorseSet, p: float) -> MorseSet:
    """The set {a + p*x : a + x in S} scaled about the tag; 0 < p <= 1."""
    if not (0.0 < p <= 1.0):
        raise InputError(f"scale must lie in (0, 1], got {p}")
    if p == 1.0:
        return S
    a = np.asarray(S.tag)
    sh = S.shape
    if isinstance(sh, Ball):
        c = tuple(a + p * (np.asarray(sh.center) - a))
        new = Ball(c, p * sh.radius, sh.closed)
    elif isinstance(sh, Interval):
        anchor = tuple(a + p * (np.asarray(sh.anchor) - a))
        new = Interval(anchor, tuple(p * b for b in sh.edges), sh.tag_frac,
                       sh.closed)
    else:
        verts = tuple(tuple(a + p * (np.asarray(v) - a)) for v in sh.vertices)
        new = StarPolytope(S.tag, p * sh.kernel_radius, verts)
    return replace(S, inner_radius=p * S.inner_radius, shape=new)


def morse_closure(S: MorseSet) -> MorseSet:
    """Topological closure; half-open boxes gain their lower faces."""
    sh = S.shape
    if isinstance(sh, Ball) and not sh.closed:
        return replace(S, shape=replace(sh, closed=True))
    if isinstance(sh, Interval) and not sh.closed:
        return replace(S, shape=replace(sh, closed=True))
    return S


def segment_interior(S: MorseSet, y: Sequence[float], x: Sequence[float], alpha: float) -> Vec:
    """Point alpha*y + (1-alpha)*x, certified to lie in the interior of S.

    Requires y strictly inside the inner kernel ball, x in the closure of S
    and alpha in (0, 1].
    """
    _check_dim(S, y)
    _check_dim(S, x)
    if not (0.0 < alpha <= 1.0):
        raise ContractError(f"alpha must lie in (0, 1], got {alpha}")
    if S.space.dist(y, S.tag) >= S.inner_radius:
        raise ContractError("y must lie strictly inside the inner ball")
    if not closure_contains(S, x):
        raise ContractError("x must lie in the closure of the set")
    p = tuple(alpha * a + (1.0 - alpha) * b for a, b in zip(y, x))
    if not interior_contains(S, p):
        raise ContractError(f"interior segment point {p} escaped the set")
    return p


# ---------------------------------------------------------------------------
# Sampling inside / on sets
# ---------------------------------------------------------------------------


def sample_in_set(S: MorseSet, n: int, skip: int = 0) -> np.ndarray:
    """Deterministic points of S (closed variant), roughly uniform."""
    sh = S.shape
    space = S.space
    if isinstance(sh, Ball):
        pts = sample_unit_ball(space, n, skip) * sh.radius + np.asarray(sh.center)
        return pts
    if isinstance(sh, Interval):
        u = halton_points(n, space.dim, skip)
        return np.asarray(sh.anchor) + u * np.asarray(sh.edges)
    out = []
    offset = skip
    Sc = morse_closure(S)
    lo, hi = bounding_box(S)
    lo, hi = np.asarray(lo), np.asarray(hi)
    while len(out) < n:
        u = halton_points(2 * n, space.dim, offset)
        offset += 2 * n
        cand = lo + u * (hi - lo)
        for c in cand:
            if closure_contains(Sc, tuple(c)):
                out.append(c)
                if len(out) == n:
                    break
    return np.array(out)


def sample_boundary(S: MorseSet, n: int, skip: int = 0) -> np.ndarray:
    """Deterministic points on (or numerically at) the boundary of S."""
    sh = S.shape
    space = S.space
    if isinstance(sh, Ball):
        dirs = sample_unit_sphere(space, n, skip)
        return np.asarray(sh.center) + sh.radius * dirs
    if isinstance(sh, Interval):
        u = halton_points(n, space.dim, skip)
        anchor, edges = np.asarray(sh.anchor), np.asarray(sh.edges)
        pts = anchor + u * edges
        d = space.dim
        for k in range(n):
            axis = k % d
            pts[k, axis] = anchor[axis] + (0.0 if (k // d) % 2 else edges[axis])
        return pts
    verts = np.asarray(sh.vertices)
    m = len(verts)
    ts = _halton_axis(n, 2, skip)
    idx = np.arange(n) % m
    a = verts[idx]
    b = verts[(idx + 1) % m]
    return a + ts[:, None] * (b - a)


def bounding_box(S: MorseSet) -> tuple[Vec, Vec]:
    sh = S.shape
    if isinstance(sh, Ball):
        ext = [sh.radius * S.space.axis_extent(i) for i in range(S.space.dim)]
        return (tuple(c - e for c, e in zip(sh.center, ext)),
                tuple(c + e for c, e in zip(sh.center, ext)))
    if isinstance(sh, Interval):
        return sh.anchor, tuple(a + b for a, b in zip(sh.anchor, sh.edges))
    vs = np.asarray(sh.vertices)
    return tuple(vs.min(axis=0)), tuple(vs.max(axis=0))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MorseReport:
    valid: bool
    min_lambda: float
    failures: tuple[str, ...] = ()


def validate_morse(S: MorseSet, samples: int = 4096) -> MorseReport:
    """Check the inner/outer sandwich and starlikeness; report minimal lam.

    Balls and intervals are certified analytically; star polytopes combine
    an exact kernel half-space test with deterministic segment sampling,
    so their verdict is certified up to sampling.
    """
    if S.inner_radius <= 0:
        raise InputError("degenerate set: nonpositive inner radius")
    failures: list[str] = []
    space = S.space
    sh = S.shape

    sup = outer_radius(S)
    min_lambda = sup / S.inner_radius
    if isinstance(sh, Ball):
        off = space.dist(S.tag, sh.center)
        w = off / sh.radius
        min_lambda = (1.0 + w) / (1.0 - w) if w < 1.0 else math.inf
        if off + S.inner_radius > sh.radius * (1.0 + REL_TOL):
            failures.append("inner ball escapes the shape")
    elif isinstance(sh, Interval):
        shrink = 1.0 - 1e-6
        for i, (a, b, t) in enumerate(zip(sh.anchor, sh.edges, S.tag)):
            reach = S.inner_radius * space.axis_extent(i) * shrink
            if t - reach <= a or t + reach > a + b:
                failures.append(f"inner ball escapes the box along axis {i}")
                break
    else:
        if not _kernel_ball_inside(space, sh):
            failures.append("kernel ball does not see the whole boundary")
        # sampled starlikeness: segments from kernel points to boundary points
        m = max(8, int(math.isqrt(samples)))
        ys = sample_unit_ball(space, m) * (S.inner_radius * (1.0 - 1e-6)) + np.asarray(S.tag)
        xs = sample_boundary(S, m)
        alphas = _halton_axis(m, 3)
        for i in range(m):
            y, x = ys[i % len(ys)], xs[i]
            a = 0.05 + 0.9 * alphas[i]
            p = tuple(a * y + (1.0 - a) * x)
            if not closure_contains(S, p):
                failures.append(f"segment sample {p} left the set")
                break

    if sup > S.lam * S.inner_radius * (1.0 + 1e-9):
        failures.append(
            f"outer reach {sup:.6g} exceeds lam*r = {S.lam * S.inner_radius:.6g}")
    if min_lambda > S.lam * (1.0 + 1e-9):
        failures.append(f"declared lam {S.lam:.6g} below minimal {min_lambda:.6g}")
    return MorseReport(not failures, min_lambda, tuple(failures))


# ---------------------------------------------------------------------------
# Shape records (serialization used by the CLI)
# ---------------------------------------------------------------------------


def shape_to_record(S: MorseSet) -> dict:
    sh = S.shape
    rec = {"tag": list(S.tag), "r": S.inner_radius, "lambda": S.lam}
    if isinstance(sh, Ball):
        rec["kind"] = "closed_ball" if sh.closed else "open_ball"
        rec["payload"] = {"center": list(sh.center), "radius": sh.radius}
    elif isinstance(sh, Interval):
        rec["kind"] = "interval"
        rec["payload"] = {"anchor": list(sh.anchor), "edges": list(sh.edges),
                          "tag_frac": list(sh.tag_frac)}
    else:
        rec["kind"] = "star"
        rec["payload"] = {"kernel_center": list(sh.kernel_center),
                          "kernel_radius": sh.kernel_radius,
                          "vertices": [list(v) for v in sh.vertices]}
    return rec


def shape_from_record(space: Space, rec: dict) -> MorseSet:
    try:
        kind = rec["kind"]
        payload = rec["payload"]
        lam = float(rec["lambda"]) if "lambda" in rec else None
        if kind in ("closed_ball", "open_ball"):
            build = closed_ball if kind == "closed_ball" else open_ball
            return build(space, payload["center"], float(payload["radius"]),
                         tag=rec.get("tag"), lam=lam)
        if kind == "interval":
            return tagged_interval(space, payload["anchor"], payload["edges"],
                                   payload.get("tag_frac"), lam=lam)
        if kind == "star":
            return star_polytope(space, payload["kernel_center"],
                                 float(payload["kernel_radius"]),
                                 payload["vertices"], lam=lam)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed shape record: {exc}") from exc
    raise InputError(f"unknown shape kind {rec.get('kind')!r}")
