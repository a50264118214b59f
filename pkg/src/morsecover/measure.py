"""Radon measures, measurable regions and almost-everywhere covers.

Measures are a finite list of weighted atoms plus a piecewise-constant
Lebesgue density supported on axis-aligned boxes.  Regions are finite
unions of boxes and balls minus finite unions of the same.  Measure
evaluation is exact wherever the geometry allows (boxes, any ball that is
a box in its norm, planar balls and polygons) and falls back to an
adaptive dyadic quadrature with a certified error bound otherwise.

The exhaustion routine ``ae_cover`` extracts a disjoint gauge-fine cover of
a region: each round wraps the remainder in a slightly dilated open region,
selects a greedy subcover, partitions it into disjoint families and keeps
the heaviest one, shrinking the residual by at least a 1/(2*kappa) factor.
"""

from __future__ import annotations

import heapq
import itertools
import math
import os
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .covering import (TaggedFamily, greedy_select, heavy_subfamily,
                       kappa_bound, partition_disjoint)
from .errors import (ContractError, CoverConstructionError, InputError,
                     UnsupportedMeasureError)
from .geometry import (Ball, Interval, MorseSet, Space, StarPolytope, Vec,
                       _as_vec, _hull_equations, closure_contains,
                       halton_points, interior_contains, morse_contains,
                       morse_diameter, morse_scale, outer_radius)

# cell states used by every classifier
IN, PART, OUT = 1, 0, -1

# round-by-round exhaustion diagnostics on stderr-free stdout
_TRACE = bool(os.environ.get("MORSECOVER_TRACE"))


# ---------------------------------------------------------------------------
# Region shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RBox:
    lo: Vec
    hi: Vec

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise InputError("box corners disagree in dimension")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise InputError("box has negative extent")


@dataclass(frozen=True)
class RBall:
    center: Vec
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise InputError("ball radius must be positive")


RShape = RBox | RBall


@dataclass(frozen=True)
class MeasurableRegion:
    """(union of positive shapes) minus (union of negative shapes), closed."""

    positive: tuple[RShape, ...]
    negative: tuple[RShape, ...] = ()

    @staticmethod
    def box(lo: Sequence[float], hi: Sequence[float]) -> "MeasurableRegion":
        return MeasurableRegion((RBox(_as_vec(lo), _as_vec(hi)),))

    def dim(self) -> int:
        s = self.positive[0]
        return len(s.lo) if isinstance(s, RBox) else len(s.center)


def region_contains(region: MeasurableRegion, space: Space, x: Sequence[float]) -> bool:
    if not any(_rshape_contains(s, space, x) for s in region.positive):
        return False
    return not any(_rshape_contains(s, space, x) for s in region.negative)


def _rshape_contains(s: RShape, space: Space, x: Sequence[float]) -> bool:
    if isinstance(s, RBox):
        return all(l <= c <= h for l, c, h in zip(s.lo, x, s.hi))
    return space.dist(x, s.center) <= s.radius


def region_bbox(region: MeasurableRegion, space: Space) -> tuple[Vec, Vec]:
    los, his = [], []
    for s in region.positive:
        if isinstance(s, RBox):
            los.append(s.lo)
            his.append(s.hi)
        else:
            ext = [s.radius * space.axis_extent(i) for i in range(space.dim)]
            los.append(tuple(c - e for c, e in zip(s.center, ext)))
            his.append(tuple(c + e for c, e in zip(s.center, ext)))
    lo = tuple(min(l[i] for l in los) for i in range(space.dim))
    hi = tuple(max(h[i] for h in his) for i in range(space.dim))
    return lo, hi


def region_dilate(region: MeasurableRegion, t: float) -> MeasurableRegion:
    """Outer dilation: positive shapes grow by t, negative shapes shrink."""
    pos = []
    for s in region.positive:
        if isinstance(s, RBox):
            pos.append(RBox(tuple(l - t for l in s.lo), tuple(h + t for h in s.hi)))
        else:
            pos.append(RBall(s.center, s.radius + t))
    neg = []
    for s in region.negative:
        if isinstance(s, RBox):
            lo = tuple(l + t for l in s.lo)
            hi = tuple(h - t for h in s.hi)
            if all(l <= h for l, h in zip(lo, hi)):
                neg.append(RBox(lo, hi))
        else:
            if s.radius - t > 0:
                neg.append(RBall(s.center, s.radius - t))
    return MeasurableRegion(tuple(pos), tuple(neg))


def region_inner_distance(region: MeasurableRegion, space: Space,
                          x: Sequence[float]) -> float:
    """Conservative radius of a norm ball about x inside the region."""
    best = 0.0
    for s in region.positive:
        if isinstance(s, RBox):
            if not _rshape_contains(s, space, x):
                continue
            r = min(min(c - l, h - c) / space.axis_extent(i)
                    for i, (l, c, h) in enumerate(zip(s.lo, x, s.hi)))
        else:
            r = s.radius - space.dist(x, s.center)
        best = max(best, r)
    for s in region.negative:
        if isinstance(s, RBox):
            gap = space.norm_of(tuple(
                c - min(max(c, l), h) for l, c, h in zip(s.lo, x, s.hi)))
        else:
            gap = space.dist(x, s.center) - s.radius
        best = min(best, gap)
    return max(0.0, best)


def _rshape_cell_state(s: RShape, space: Space, lo: np.ndarray, hi: np.ndarray) -> int:
    if isinstance(s, RBox):
        slo, shi = np.asarray(s.lo), np.asarray(s.hi)
        if np.all(lo >= slo) and np.all(hi <= shi):
            return IN
        if np.any(np.minimum(hi, shi) <= np.maximum(lo, slo)):
            return OUT
        return PART
    c = np.asarray(s.center)
    near = np.minimum(np.maximum(c, lo), hi)
    if space.norm_of(tuple(near - c)) >= s.radius:
        return OUT
    far = np.where(np.abs(lo - c) > np.abs(hi - c), lo, hi)
    if space.norm_of(tuple(far - c)) <= s.radius:
        return IN
    return PART


def region_cell_state(region: MeasurableRegion, space: Space,
                      lo: np.ndarray, hi: np.ndarray) -> int:
    pos = OUT
    for s in region.positive:
        st = _rshape_cell_state(s, space, lo, hi)
        if st == IN:
            pos = IN
            break
        if st == PART:
            pos = PART
    if pos == OUT:
        return OUT
    neg = OUT
    for s in region.negative:
        st = _rshape_cell_state(s, space, lo, hi)
        if st == IN:
            return OUT
        if st == PART:
            neg = PART
    if pos == IN and neg == OUT:
        return IN
    return PART


def _rshape_box_volume(s: RShape, space: Space, lo: np.ndarray,
                       hi: np.ndarray) -> float | None:
    """Exact volume of shape ∩ cell where the geometry has a closed form."""
    if isinstance(s, RBox):
        return _box_overlap_volume(s.lo, s.hi, tuple(lo), tuple(hi))
    if space.dim == 1:
        a, b = s.center[0] - s.radius, s.center[0] + s.radius
        return max(0.0, min(b, float(hi[0])) - max(a, float(lo[0])))
    if space.norm in ("linf", "wlinf"):
        ext = [s.radius * space.axis_extent(i) for i in range(space.dim)]
        blo = tuple(c - e for c, e in zip(s.center, ext))
        bhi = tuple(c + e for c, e in zip(s.center, ext))
        return _box_overlap_volume(blo, bhi, tuple(lo), tuple(hi))
    if space.dim == 2 and space.norm == "l2":
        return circle_box_area(s.center[0], s.center[1], s.radius,
                               tuple(lo), tuple(hi))
    if space.dim == 2 and space.norm == "l1":
        c, r = s.center, s.radius
        diamond = np.array([[c[0] + r, c[1]], [c[0], c[1] + r],
                            [c[0] - r, c[1]], [c[0], c[1] - r]])
        return polygon_area(clip_polygon_to_box(diamond, tuple(lo), tuple(hi)))
    return None


def _region_cell_volume_exact(region: MeasurableRegion, space: Space,
                              lo: np.ndarray, hi: np.ndarray) -> float | None:
    """Closed-form cell volume when at most one shape boundary crosses it."""
    straddler = None
    straddler_sign = 0
    pos_in = False
    for s in region.positive:
        st = _rshape_cell_state(s, space, lo, hi)
        if st == IN:
            pos_in = True
        elif st == PART:
            if straddler is not None:
                return None
            straddler, straddler_sign = s, +1
    for s in region.negative:
        st = _rshape_cell_state(s, space, lo, hi)
        if st == IN:
            return 0.0
        if st == PART:
            if straddler is not None:
                return None
            straddler, straddler_sign = s, -1
    cell_vol = float(np.prod(hi - lo))
    if straddler is None:
        return cell_vol if pos_in else 0.0
    v = _rshape_box_volume(straddler, space, lo, hi)
    if v is None:
        return None
    if straddler_sign > 0:
        return cell_vol if pos_in else v
    return cell_vol - v if pos_in else 0.0


def _region_all_boxes(region: MeasurableRegion) -> bool:
    return all(isinstance(s, RBox) for s in region.positive + region.negative)


# ---------------------------------------------------------------------------
# Radon measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadonMeasure:
    """Weighted atoms plus a piecewise-constant density on boxes."""

    space: Space
    atoms: tuple[tuple[Vec, float], ...] = ()
    pieces: tuple[tuple[RBox, float], ...] = ()

    def __post_init__(self):
        for loc, w in self.atoms:
            if w <= 0:
                raise InputError("atom weights must be positive")
            if len(loc) != self.space.dim:
                raise InputError("atom dimension mismatch")
        for box, rho in self.pieces:
            if rho < 0:
                raise InputError("densities must be nonnegative")

    @staticmethod
    def lebesgue(space: Space, lo: Sequence[float], hi: Sequence[float],
                 density: float = 1.0) -> "RadonMeasure":
        return RadonMeasure(space, (), ((RBox(_as_vec(lo), _as_vec(hi)), density),))

    def with_atom(self, loc: Sequence[float], weight: float) -> "RadonMeasure":
        return replace(self, atoms=self.atoms + ((_as_vec(loc), float(weight)),))


# ---------------------------------------------------------------------------
# Exact planar helpers
# ---------------------------------------------------------------------------


def circle_box_area(cx: float, cy: float, r: float,
                    lo: Sequence[float], hi: Sequence[float]) -> float:
    """Exact area of a Euclidean disk intersected with an axis box."""
    a0, a1 = lo[0] - cx, hi[0] - cx
    b0, b1 = lo[1] - cy, hi[1] - cy
    a0, a1 = max(a0, -r), min(a1, r)
    if a0 >= a1 or b0 >= b1 or b0 >= r or b1 <= -r:
        return 0.0

    def f1(t: float) -> float:
        t = min(max(t, -r), r)
        return 0.5 * (t * math.sqrt(max(0.0, r * r - t * t)) + r * r * math.asin(t / r))

    cuts = {a0, a1}
    for b in (b0, b1):
        if abs(b) < r:
            root = math.sqrt(r * r - b * b)
            for x in (-root, root):
                if a0 < x < a1:
                    cuts.add(x)
    xs = sorted(cuts)
    area = 0.0
    for x0, x1 in zip(xs, xs[1:]):
        xm = 0.5 * (x0 + x1)
        h = math.sqrt(max(0.0, r * r - xm * xm))
        y_hi_curved = h < b1
        y_lo_curved = -h > b0
        if min(b1, h) <= max(b0, -h):
            continue
        if y_hi_curved and y_lo_curved:
            area += 2.0 * (f1(x1) - f1(x0))
        elif y_hi_curved:
            area += (f1(x1) - f1(x0)) - b0 * (x1 - x0)
        elif y_lo_curved:
            area += b1 * (x1 - x0) + (f1(x1) - f1(x0))
        else:
            area += (b1 - b0) * (x1 - x0)
    return max(0.0, area)


def clip_polygon_to_box(poly: np.ndarray, lo: Sequence[float],
                        hi: Sequence[float]) -> np.ndarray:
    """Sutherland-Hodgman clip of a polygon against an axis box."""
    pts = np.asarray(poly, dtype=float)
    for axis, bound, keep_ge in ((0, lo[0], True), (0, hi[0], False),
                                 (1, lo[1], True), (1, hi[1], False)):
        if len(pts) == 0:
            return pts
        out = []
        n = len(pts)
        for i in range(n):
            cur, nxt = pts[i], pts[(i + 1) % n]
            cin = cur[axis] >= bound if keep_ge else cur[axis] <= bound
            nin = nxt[axis] >= bound if keep_ge else nxt[axis] <= bound
            if cin:
                out.append(cur)
            if cin != nin:
                t = (bound - cur[axis]) / (nxt[axis] - cur[axis])
                out.append(cur + t * (nxt - cur))
        pts = np.asarray(out)
    return pts


def polygon_area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _star_polygon_vertices(S: MorseSet) -> np.ndarray | None:
    """Polygon vertices for shapes that are exact polygons in the plane."""
    if S.space.dim != 2:
        return None
    sh = S.shape
    if isinstance(sh, StarPolytope):
        return np.asarray(sh.vertices)
    if isinstance(sh, Ball) and S.space.norm == "l1":
        c, r = np.asarray(sh.center), sh.radius
        return np.array([[c[0] + r, c[1]], [c[0], c[1] + r],
                         [c[0] - r, c[1]], [c[0], c[1] - r]])
    return None


def _shape_as_box(S: MorseSet) -> tuple[Vec, Vec] | None:
    """Corner representation when the set is an axis box in coordinates."""
    sh = S.shape
    space = S.space
    if isinstance(sh, Interval):
        return sh.anchor, tuple(a + b for a, b in zip(sh.anchor, sh.edges))
    if isinstance(sh, Ball):
        if space.dim == 1 or space.norm in ("linf", "wlinf"):
            ext = [sh.radius * space.axis_extent(i) for i in range(space.dim)]
            return (tuple(c - e for c, e in zip(sh.center, ext)),
                    tuple(c + e for c, e in zip(sh.center, ext)))
    return None


# ---------------------------------------------------------------------------
# Cell classifiers for tagged sets
# ---------------------------------------------------------------------------


def shape_cell_state(S: MorseSet, lo: np.ndarray, hi: np.ndarray) -> int:
    space = S.space
    sh = S.shape
    if isinstance(sh, Ball):
        c = np.asarray(sh.center)
        near = np.minimum(np.maximum(c, lo), hi)
        if space.norm_of(tuple(near - c)) >= sh.radius:
            return OUT
        far = np.where(np.abs(lo - c) > np.abs(hi - c), lo, hi)
        if space.norm_of(tuple(far - c)) <= sh.radius:
            return IN
        return PART
    if isinstance(sh, Interval):
        slo = np.asarray(sh.anchor)
        shi = slo + np.asarray(sh.edges)
        if np.all(lo >= slo) and np.all(hi <= shi):
            return IN
        if np.any(np.minimum(hi, shi) <= np.maximum(lo, slo)):
            return OUT
        return PART
    if space.dim >= 3:
        eqs = _hull_equations(sh)
        corners = _cell_corners(lo, hi)
        vals = corners @ eqs[:, :-1].T + eqs[:, -1]
        if np.all(vals <= 0):
            return IN
        if np.any(np.all(vals > 0, axis=0)):
            return OUT
        return PART
    # planar star polygon: corner membership plus edge-crossing test
    corners = _cell_corners(lo, hi)
    inside = [closure_contains(S, tuple(p)) for p in corners]
    verts = np.asarray(sh.vertices)
    crosses = _polygon_edge_hits_box(verts, lo, hi)
    if all(inside) and not crosses:
        return IN
    if not any(inside) and not crosses:
        # the polygon could still swallow the cell; its kernel settles it
        if closure_contains(S, tuple(0.5 * (lo + hi))):
            return IN
        return OUT
    return PART


def _cell_corners(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    d = len(lo)
    out = np.empty((2**d, d))
    for k in range(2**d):
        for i in range(d):
            out[k, i] = hi[i] if (k >> i) & 1 else lo[i]
    return out


def _polygon_edge_hits_box(verts: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> bool:
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if _segment_hits_box(a, b, lo, hi):
            return True
    return False


def _segment_hits_box(a: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> bool:
    # slab clipping
    t0, t1 = 0.0, 1.0
    d = b - a
    for i in range(len(lo)):
        if abs(d[i]) < 1e-300:
            if a[i] < lo[i] or a[i] > hi[i]:
                return False
            continue
        u0 = (lo[i] - a[i]) / d[i]
        u1 = (hi[i] - a[i]) / d[i]
        if u0 > u1:
            u0, u1 = u1, u0
        t0, t1 = max(t0, u0), min(t1, u1)
        if t0 > t1:
            return False
    return True


# ---------------------------------------------------------------------------
# Volume engine
# ---------------------------------------------------------------------------


def _quad_volume(classify, lo: np.ndarray, hi: np.ndarray,
                 rel_tol: float = 1e-6, abs_tol: float = 1e-9,
                 max_cells: int = 400_000, exact_cell=None) -> tuple[float, float]:
    """Dyadic refinement of PART cells; returns (volume, error bound).

    ``exact_cell`` may resolve a straddling cell in closed form, which keeps
    the refinement shallow around smooth boundaries.
    """
    if np.any(hi <= lo):
        return 0.0, 0.0
    state = classify(lo, hi)
    vol_cell = float(np.prod(hi - lo))
    if state == IN:
        return vol_cell, 0.0
    if state == OUT:
        return 0.0, 0.0
    if exact_cell is not None:
        v = exact_cell(lo, hi)
        if v is not None:
            return v, 0.0
    inside = 0.0
    pending = vol_cell
    heap = [(-vol_cell, 0, lo, hi)]
    counter = 1
    cells = 1
    while heap and pending > max(abs_tol, rel_tol * (inside + 0.5 * pending)) \
            and cells < max_cells:
        negvol, _, clo, chi = heapq.heappop(heap)
        pending -= -negvol
        mid = 0.5 * (clo + chi)
        d = len(clo)
        for k in range(2**d):
            nlo = np.array([clo[i] if (k >> i) & 1 == 0 else mid[i] for i in range(d)])
            nhi = np.array([mid[i] if (k >> i) & 1 == 0 else chi[i] for i in range(d)])
            st = classify(nlo, nhi)
            v = float(np.prod(nhi - nlo))
            if st == IN:
                inside += v
            elif st == PART:
                resolved = exact_cell(nlo, nhi) if exact_cell is not None else None
                if resolved is not None:
                    inside += resolved
                else:
                    heapq.heappush(heap, (-v, counter, nlo, nhi))
                    counter += 1
                    pending += v
            cells += 1
    return inside + 0.5 * pending, 0.5 * pending


def _box_overlap_volume(lo1, hi1, lo2, hi2) -> float:
    v = 1.0
    for l1, h1, l2, h2 in zip(lo1, hi1, lo2, hi2):
        w = min(h1, h2) - max(l1, l2)
        if w <= 0:
            return 0.0
        v *= w
    return v


def _set_box_volume(S: MorseSet, blo: Vec, bhi: Vec) -> tuple[float, float]:
    """Volume of S intersected with one axis box: exact wherever possible."""
    space = S.space
    sh = S.shape
    as_box = _shape_as_box(S)
    if as_box is not None:
        return _box_overlap_volume(as_box[0], as_box[1], blo, bhi), 0.0
    lo = np.asarray(blo, dtype=float)
    hi = np.asarray(bhi, dtype=float)
    state = shape_cell_state(S, lo, hi)
    if state == OUT:
        return 0.0, 0.0
    if state == IN:
        return float(np.prod(hi - lo)), 0.0
    if isinstance(sh, Ball):
        # ball fully inside the box: closed-form volume
        c = np.asarray(sh.center)
        ext = np.array([sh.radius * space.axis_extent(i) for i in range(space.dim)])
        if np.all(c - ext >= lo) and np.all(c + ext <= hi):
            return space.ball_volume(sh.radius), 0.0
        if space.dim == 2 and space.norm == "l2":
            return circle_box_area(c[0], c[1], sh.radius, blo, bhi), 0.0
    poly = _star_polygon_vertices(S)
    if poly is not None:
        return polygon_area(clip_polygon_to_box(poly, blo, bhi)), 0.0
    return _quad_volume(lambda a, b: shape_cell_state(S, a, b), lo, hi)


def _region_box_volume(region: MeasurableRegion, space: Space,
                       blo: Vec, bhi: Vec) -> tuple[float, float]:
    """Volume of region inside one box; exact for all-box regions."""
    lo = np.asarray(blo, dtype=float)
    hi = np.asarray(bhi, dtype=float)
    if np.any(hi <= lo):
        return 0.0, 0.0
    if _region_all_boxes(region):
        cuts = []
        for i in range(space.dim):
            vals = {float(lo[i]), float(hi[i])}
            for s in region.positive + region.negative:
                for v in (s.lo[i], s.hi[i]):
                    if lo[i] < v < hi[i]:
                        vals.add(float(v))
            cuts.append(sorted(vals))
        total = 0.0
        grids = [list(zip(c, c[1:])) for c in cuts]
        idx = [0] * space.dim
        # iterate the cut-grid cells; every cell is uniformly in or out
        def rec(axis, clo, chi):
            nonlocal total
            if axis == space.dim:
                mid = 0.5 * (np.array(clo) + np.array(chi))
                if region_contains(region, space, tuple(mid)):
                    total += float(np.prod(np.array(chi) - np.array(clo)))
                return
            for a, b in grids[axis]:
                rec(axis + 1, clo + [a], chi + [b])
        rec(0, [], [])
        return total, 0.0

    def classify(a, b):
        return region_cell_state(region, space, a, b)

    return _quad_volume(classify, lo, hi,
                        exact_cell=lambda a, b: _region_cell_volume_exact(
                            region, space, a, b))


def _combined_volume(S: MorseSet, region: MeasurableRegion,
                     blo: Vec, bhi: Vec) -> tuple[float, float]:
    """Volume of S ∩ region inside one box."""
    as_box = _shape_as_box(S)
    if as_box is not None:
        clip_lo = tuple(max(a, b) for a, b in zip(as_box[0], blo))
        clip_hi = tuple(min(a, b) for a, b in zip(as_box[1], bhi))
        if any(l >= h for l, h in zip(clip_lo, clip_hi)):
            return 0.0, 0.0
        return _region_box_volume(region, S.space, clip_lo, clip_hi)
    lo = np.asarray(blo, dtype=float)
    hi = np.asarray(bhi, dtype=float)
    rstate = region_cell_state(region, S.space, lo, hi)
    if rstate == OUT:
        return 0.0, 0.0
    if rstate == IN:
        return _set_box_volume(S, blo, bhi)

    def classify(a, b):
        s1 = shape_cell_state(S, a, b)
        if s1 == OUT:
            return OUT
        s2 = region_cell_state(region, S.space, a, b)
        if s2 == OUT:
            return OUT
        if s1 == IN and s2 == IN:
            return IN
        return PART

    def exact_cell(a, b):
        s1 = shape_cell_state(S, a, b)
        if s1 == OUT:
            return 0.0
        s2 = region_cell_state(region, S.space, a, b)
        if s2 == OUT:
            return 0.0
        if s1 == IN:
            return _region_cell_volume_exact(region, S.space, a, b)
        if s2 == IN:
            v, e = _set_box_volume(S, tuple(a), tuple(b))
            return v if e == 0.0 else None
        return None

    return _quad_volume(classify, lo, hi, exact_cell=exact_cell)


# ---------------------------------------------------------------------------
# measure_of
# ---------------------------------------------------------------------------


def measure_of(mu: RadonMeasure, obj, interior: bool = False,
               within: MeasurableRegion | None = None) -> tuple[float, float]:
    """Measure of a tagged set or region, with a certified error bound.

    Atoms are counted by exact membership (open/closed and half-open
    boundaries respected); the density part is exact for boxes, norm-ball
    boxes, planar disks and polygons, with adaptive quadrature elsewhere.
    ``interior`` counts atoms against the interior; ``within`` restricts to
    an additional region (used for overflow accounting).
    """
    space = mu.space
    value = 0.0
    err = 0.0
    if isinstance(obj, MorseSet):
        member = interior_contains if interior else morse_contains
        for loc, w in mu.atoms:
            if member(obj, loc) and (within is None or region_contains(within, space, loc)):
                value += w
        for box, rho in mu.pieces:
            if rho == 0.0:
                continue
            if within is None:
                v, e = _set_box_volume(obj, box.lo, box.hi)
            else:
                v, e = _combined_volume(obj, within, box.lo, box.hi)
            value += rho * v
            err += rho * e
        return value, err
    if isinstance(obj, MeasurableRegion):
        for loc, w in mu.atoms:
            if region_contains(obj, space, loc):
                value += w
        for box, rho in mu.pieces:
            if rho == 0.0:
                continue
            v, e = _region_box_volume(obj, space, box.lo, box.hi)
            value += rho * v
            err += rho * e
        return value, err
    raise UnsupportedMeasureError(f"cannot measure object of type {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Almost-everywhere covers by exhaustion
# ---------------------------------------------------------------------------


@dataclass
class CoverEntry:
    tag: Vec
    set: MorseSet
    mass: float       # mu(S)
    mass_in: float    # mu(S ∩ Omega)
    err: float


@dataclass
class AeCover:
    """Ordered pairwise-disjoint gauge-fine sets covering a region up to residual."""

    entries: list[CoverEntry]
    residual: float
    excess: float
    rounds: int
    kappa: int
    total_mass: float
    history: tuple[float, ...]

    @property
    def entry_count(self) -> int:
        return len(self.entries)

    def iter_batches(self):
        if not self.entries:
            return
        tags = np.array([e.tag for e in self.entries], dtype=float)
        masses = np.array([e.mass for e in self.entries], dtype=float)
        yield tags, masses

    def covered_mass(self) -> float:
        return sum(e.mass_in for e in self.entries)


def _atom_on_boundary(S: MorseSet, atoms) -> bool:
    for loc, _ in atoms:
        if closure_contains(S, loc) and not interior_contains(S, loc):
            return True
    return False


class _Exhaustion:
    """Round state for ae_cover: dyadic cells with inherited neighbor lists.

    All active cells of one round share a size vector.  Each cell remembers
    which selected sets lie within candidate reach (0.6 * cell size); that
    margin shrinks with the cells, so the lists inherit soundly and both
    coverage pruning and clearance capping stay local.
    """

    REACH = 0.6
    RADIUS = 0.49

    def __init__(self, space: Space, lo: np.ndarray, hi: np.ndarray):
        self.space = space
        self.root_lo = lo
        self.span = hi - lo
        self.depth = 0
        # coord tuple -> (relevant selected indices, region state)
        self.cells: dict[tuple, tuple[list[int], int]] = {(0,) * space.dim: ([], PART)}
        self.centers: list[Vec] = []
        self.radii: list[float] = []
        self.outers: list[float] = []
        self.boxes: list[tuple[Vec, Vec] | None] = []

    def cell_size(self) -> np.ndarray:
        return self.span / (1 << self.depth)

    def cell_box(self, coord) -> tuple[np.ndarray, np.ndarray]:
        h = self.cell_size()
        lo = self.root_lo + np.asarray(coord) * h
        return lo, lo + h

    def _ball_meets(self, i: int, lo, hi, margin: float) -> bool:
        c = self.centers[i]
        near = tuple(min(max(c[k], lo[k]), hi[k]) for k in range(len(lo)))
        return self.space.dist(near, c) <= self.outers[i] + margin

    def _ball_covers(self, i: int, lo, hi) -> bool:
        box = self.boxes[i]
        if box is not None:
            return all(box[0][k] <= lo[k] and hi[k] <= box[1][k]
                       for k in range(len(lo)))
        if self.radii[i] <= 0.0:
            return False
        c = self.centers[i]
        far = tuple(lo[k] if abs(lo[k] - c[k]) > abs(hi[k] - c[k]) else hi[k]
                    for k in range(len(lo)))
        return self.space.dist(far, c) <= self.radii[i]

    def refine(self, omega: MeasurableRegion):
        """Split every active cell, dropping covered and exterior children."""
        d = self.space.dim
        self.depth += 1
        h = self.cell_size()
        margin = self.REACH * float(np.max(h))
        out: dict[tuple, tuple[list[int], int]] = {}
        for coord, (relevant, rstate) in self.cells.items():
            base = tuple(2 * c for c in coord)
            for k in range(1 << d):
                cc = tuple(base[i] + ((k >> i) & 1) for i in range(d))
                lo = self.root_lo + np.asarray(cc, dtype=float) * h
                hi = lo + h
                if rstate == IN:
                    child_state = IN
                else:
                    child_state = region_cell_state(omega, self.space, lo, hi)
                    if child_state == OUT:
                        continue
                covered = False
                child_rel: list[int] = []
                for i in relevant:
                    if self._ball_covers(i, lo, hi):
                        covered = True
                        break
                    if self._ball_meets(i, lo, hi, margin):
                        child_rel.append(i)
                if covered:
                    continue
                out[cc] = (child_rel, child_state)
        self.cells = out

    def add_selected(self, S: MorseSet):
        """Register a new set and push it into the reach lists of nearby cells.

        Open sets prune like their closures: selected sets never carry atoms
        on their boundaries, so the difference is measure-null.
        """
        idx = len(self.centers)
        sh = S.shape
        if isinstance(sh, Ball):
            self.centers.append(sh.center)
            self.radii.append(sh.radius)
            self.outers.append(sh.radius)
            if self.space.norm in ("linf", "wlinf") or self.space.dim == 1:
                ext = [sh.radius * self.space.axis_extent(i)
                       for i in range(self.space.dim)]
                self.boxes.append((tuple(c - e for c, e in zip(sh.center, ext)),
                                   tuple(c + e for c, e in zip(sh.center, ext))))
            else:
                self.boxes.append(None)
        elif isinstance(sh, Interval):
            self.centers.append(S.tag)
            self.radii.append(0.0)
            self.outers.append(outer_radius(S))
            hi_corner = tuple(a + b for a, b in zip(sh.anchor, sh.edges))
            self.boxes.append((sh.anchor, hi_corner))
        else:
            # conservative: no coverage pruning, reach via the bounding ball
            self.centers.append(S.tag)
            self.radii.append(0.0)
            self.outers.append(outer_radius(S))
            self.boxes.append(None)
        h = self.cell_size()
        margin = self.REACH * float(np.max(h))
        ext = self.outers[idx] + margin
        c = np.asarray(self.centers[idx])
        lo_idx = np.floor((c - ext - self.root_lo) / h).astype(int)
        hi_idx = np.floor((c + ext - self.root_lo) / h).astype(int)
        d = self.space.dim
        ranges = [range(int(lo_idx[i]), int(hi_idx[i]) + 1) for i in range(d)]
        for cc in itertools.product(*ranges):
            cell = self.cells.get(cc)
            if cell is None:
                continue
            lo = self.root_lo + np.asarray(cc, dtype=float) * h
            hi = lo + h
            if self._ball_covers(idx, lo, hi):
                del self.cells[cc]
            elif self._ball_meets(idx, lo, hi, margin):
                cell[0].append(idx)

    def clearance(self, x, relevant: list[int]) -> float:
        if not relevant:
            return math.inf
        return min(self.space.dist(x, self.centers[i]) - self.outers[i]
                   for i in relevant)

    def point_free(self, x, relevant: list[int]) -> bool:
        return all(self.space.dist(x, self.centers[i]) > self.outers[i]
                   for i in relevant)

    def covered_volume(self, i: int, lo: np.ndarray, hi: np.ndarray) -> float:
        """Exact volume of cell ∩ selected set i when a closed form exists."""
        box = self.boxes[i]
        if box is not None:
            return _box_overlap_volume(box[0], box[1], tuple(lo), tuple(hi))
        if self.radii[i] > 0.0 and self.space.dim == 2 and self.space.norm == "l2":
            c = self.centers[i]
            return circle_box_area(c[0], c[1], self.radii[i], tuple(lo), tuple(hi))
        return 0.0


def ae_cover(mu: RadonMeasure, omega: MeasurableRegion, family, delta,
             eps: float, tol: float, seed: int = 0, tau: float = 1.2,
             max_rounds: int | None = None) -> AeCover:
    """Extract a disjoint, gauge-fine, almost-everywhere cover of omega.

    ``family`` is a fine cover generator (see morsecover.families); ``delta``
    is a strictly positive gauge.  Each round refines a dyadic grid over the
    uncovered remainder, proposes gauge-fine sets disjoint from everything
    already selected and inside a dilated region whose overflow budget
    halves per round, then appends the heaviest disjoint family of the
    greedy subcover.  Stops once the certified residual drops to tol.
    """
    space = family.space
    if eps <= 0 or tol <= 0:
        raise InputError("eps and tol must be positive")
    mu_omega, mu_err = measure_of(mu, omega)
    kappa = kappa_bound(space, family.lam, getattr(family, "kappa_mode", "morse"))
    if mu_omega <= tol:
        return AeCover([], mu_omega, 0.0, 0, kappa, mu_omega, ())
    if max_rounds is None:
        shrink = 1.0 - 1.0 / (2.0 * kappa)
        max_rounds = max(8, int(math.ceil(math.log(tol / mu_omega) / math.log(shrink))))

    rng = np.random.default_rng(seed)
    d = space.dim
    lo0, hi0 = region_bbox(omega, space)
    lo0, hi0 = np.asarray(lo0, float), np.asarray(hi0, float)
    # the lattice stays aligned with the region box so no cell straddles its
    # boundary; seeds vary the covers through per-cell radius factors below
    state = _Exhaustion(space, lo0, hi0)

    atoms_in = [(loc, w) for loc, w in mu.atoms if region_contains(omega, space, loc)]
    # measures with no mass outside omega skip the overflow bisection
    probe = measure_of(mu, region_dilate(omega, 1.0))[0]
    outside_free = abs(probe - mu_omega) <= 1e-12 * max(1.0, mu_omega)

    entries: list[CoverEntry] = []
    captured = 0.0
    captured_err = 0.0
    excess = 0.0
    history: list[float] = []
    residual = mu_omega
    stagnant = 0

    def atom_capture_pending():
        for loc, w in atoms_in:
            if not any(morse_contains(e.set, loc) for e in entries):
                return loc
        return None

    def append_entry(S: MorseSet):
        nonlocal captured, captured_err, excess
        reach = outer_radius(S)
        dval = float(delta(S.tag))
        if reach > dval * (1.0 + 1e-9):
            raise ContractError(
                f"family produced a set of reach {reach:.6g} above the gauge "
                f"{dval:.6g} at {S.tag}")
        mass, err1 = measure_of(mu, S)
        if outside_free:
            mass_in, err2 = mass, err1
        else:
            mass_in, err2 = measure_of(mu, S, within=omega)
        entries.append(CoverEntry(S.tag, S, mass, mass_in, err1 + err2))
        state.add_selected(S)
        captured += mass_in
        captured_err += err2
        excess += max(0.0, mass - mass_in)

    need_refine = True
    level_passes = 0
    # probe spots: the cell center, then the child-cell centers with the
    # child-level radius cap, so every placement sits on some level's lattice
    child_spots = list(itertools.product(*[(0.25, 0.75)] * d))
    forfeit_left = 0.5 * tol
    density_cap = max((rho for _, rho in mu.pieces), default=0.0)

    def cell_mass_bound(lo, hi) -> float:
        total = 0.0
        for box, rho in mu.pieces:
            total += rho * _box_overlap_volume(box.lo, box.hi, tuple(lo), tuple(hi))
        return total

    def retire_slivers():
        """Drop cells whose uncovered mass is provably negligible.

        Selected sets are pairwise disjoint, so their per-cell covered
        volumes add exactly; the forfeited remainder stays inside half the
        residual tolerance.
        """
        nonlocal forfeit_left
        if forfeit_left <= 0.0:
            return
        if density_cap == 0.0:
            # no density anywhere: every cell is measure-free
            state.cells.clear()
            return
        h = state.cell_size()
        bounds = []
        for coord, (relevant, rstate) in state.cells.items():
            if not relevant:
                continue
            lo = state.root_lo + np.asarray(coord, dtype=float) * h
            hi = lo + h
            covered = sum(state.covered_volume(i, lo, hi) for i in relevant)
            bound = density_cap * max(0.0, float(np.prod(hi - lo)) - covered)
            bounds.append((bound, coord))
        bounds.sort(key=lambda t: t[0])
        # rationed spend: each sweep may consume at most half of what is left,
        # thinnest slivers first
        ration = 0.5 * forfeit_left
        for bound, coord in bounds:
            if bound > ration:
                break
            del state.cells[coord]
            forfeit_left -= bound
            ration -= bound

    for rnd in range(1, max_rounds + 1):
        if need_refine:
            state.refine(omega)
            retire_slivers()
            level_passes = 0
            need_refine = False
        level_passes += 1
        if len(state.cells) > 400_000:
            raise CoverConstructionError(
                "active-cell budget exhausted before reaching tol")
        if not state.cells and atom_capture_pending() is None:
            break
        h = float(np.max(state.cell_size()))

        # overflow budget for this round, realized as a region dilation
        if outside_free:
            dil = region_dilate(omega, 0.5 * h if h else 1.0)
        else:
            budget = eps * 0.5**rnd
            t_lo, t_hi = 0.0, max(h, 1e-6)
            for _ in range(24):
                t_mid = 0.5 * (t_lo + t_hi)
                over = measure_of(mu, region_dilate(omega, t_mid))[0] - mu_omega
                if over <= budget:
                    t_lo = t_mid
                else:
                    t_hi = t_mid
            dil = region_dilate(omega, t_lo)

        def build_set(tag, size):
            dval = float(delta(tag))
            if dval <= 0.0:
                raise ContractError(f"gauge returned {dval} at {tag}")
            size = min(size, dval)
            if size <= 1e-300:
                return None
            S = family.set_at(tag, size)
            tries = 0
            # scaled retreat off atom boundaries; only countably many scales fail
            while _atom_on_boundary(S, mu.atoms) and tries < 60:
                S = morse_scale(S, 0.9)
                tries += 1
            return S

        # atoms first: their sets are appended directly so capture always advances
        for loc, w in atoms_in:
            if any(morse_contains(e.set, loc) for e in entries):
                continue
            cell = state.cells.get(tuple(
                np.floor((np.asarray(loc) - state.root_lo) / state.cell_size()).astype(int)))
            relevant = cell[0] if cell else list(range(len(state.centers)))
            room = min((1.0 - 1e-9) * state.clearance(loc, relevant),
                       region_inner_distance(dil, space, loc), h if h else 1.0)
            S = build_set(loc, room)
            if S is not None and morse_contains(S, loc):
                append_entry(S)

        # one gauge-fine candidate per cell: full size at the center, child
        # size at a child center, or nothing (starved cells wait, so no
        # placement ever cuts across a future lattice line)
        radius_cap = 0.5 * (1.0 - 1e-9) * h
        spots = [((0.5,) * d, radius_cap)] + \
            [(s, 0.5 * radius_cap) for s in child_spots]

        def pick_spots(room_floor: float) -> dict:
            out: dict[tuple, tuple[Vec, float]] = {}
            for coord, (relevant, rstate) in state.cells.items():
                lo, hi = state.cell_box(coord)
                span = hi - lo
                best = None
                for spot, cap in spots:
                    tag = tuple(lo + np.asarray(spot) * span)
                    if rstate != IN and not region_contains(omega, space, tag):
                        continue
                    if not state.point_free(tag, relevant):
                        continue
                    dval = float(delta(tag))
                    if dval <= 0.0:
                        raise ContractError(f"gauge returned {dval} at {tag}")
                    if dval < cap:
                        # gauge finer than this lattice level: placing now
                        # would cut across future cells, so wait
                        continue
                    room = min((1.0 - 1e-9) * state.clearance(tag, relevant),
                               region_inner_distance(dil, space, tag))
                    if room < room_floor:
                        continue
                    score = min(room, cap)
                    if best is None or score > best[1]:
                        best = (tag, score)
                    if score >= radius_cap * (1.0 - 1e-12):
                        break
                if best is not None:
                    out[coord] = best
            return out

        chosen = pick_spots(0.2 * h)

        candidates: list[MorseSet] = []
        for coord, (tag, room) in chosen.items():
            # microscopic seeded shrink: distinguishes covers across seeds
            # while keeping the seams below the retirement budget
            size = min(room, radius_cap) * (1.0 - 2e-6 * rng.uniform())
            # half the gap to the nearest neighboring candidate keeps the
            # whole batch pairwise disjoint by construction
            for off in itertools.product(*[(-1, 0, 1)] * d):
                if all(o == 0 for o in off):
                    continue
                nb = chosen.get(tuple(c + o for c, o in zip(coord, off)))
                if nb is not None:
                    size = min(size, 0.5 * (1.0 - 1e-9) * space.dist(tag, nb[0]))
            if size <= 1e-300:
                continue
            S = build_set(tag, size)
            if S is not None:
                candidates.append(S)

        captured_before = captured
        if candidates:
            fam = TaggedFamily.from_sets(candidates, validate=False)
            order = greedy_select(fam, tau)
            part = partition_disjoint(fam, order, kappa=kappa)
            masses = {}
            for fam_idx in part.families:
                for i in fam_idx:
                    masses[i] = measure_of(mu, fam.set_at(i), interior=True)[0]
            j, _, _ = heavy_subfamily(part, fam, mu, masses=masses)
            for i in part.families[j]:
                append_entry(fam.set_at(i))
            stagnant = 0
        else:
            # empty passes are normal while the lattice refines toward a
            # fine gauge; only a long dry spell means the family cannot serve
            stagnant += 1
            if stagnant >= 64:
                missing = atom_capture_pending()
                where = missing if missing is not None else \
                    (next(iter(state.cells)) if state.cells else None)
                raise CoverConstructionError(
                    f"family produced no gauge-fine candidate at tag {where}", where)

        remaining_before = max(mu_omega - captured_before, 0.0)
        pass_capture = captured - captured_before
        if level_passes >= 8 or pass_capture < 0.3 * remaining_before:
            need_refine = True
        if _TRACE:
            print(f"  pass {rnd}: depth={state.depth} cells={len(state.cells)} "
                  f"cand={len(candidates)} captured={captured:.6f} "
                  f"residual={mu_omega - captured:.2e}")

        residual = max(0.0, mu_omega - captured) + mu_err + captured_err
        history.append(residual)
        if residual <= tol and atom_capture_pending() is None:
            return AeCover(entries, residual, excess, rnd, kappa, mu_omega,
                           tuple(history))

    raise CoverConstructionError(
        f"residual {residual:.3g} above tol {tol:.3g} after {max_rounds} rounds")




# ---------------------------------------------------------------------------
# Differentiation diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuotientEntry:
    radius: float
    nu_value: float
    mu_value: float
    ratio: float
    flagged: bool


def diff_quotient(nu: RadonMeasure, mu: RadonMeasure, a: Sequence[float],
                  family, shrink_radii: Sequence[float]) -> list[QuotientEntry]:
    """Ratios nu(S)/mu(S) along family sets at tag a with shrinking size.

    Entries where mu vanishes are flagged (ratio inf for positive nu, nan
    for 0/0); no limit is asserted.
    """
    out = []
    for r in shrink_radii:
        S = family.set_at(_as_vec(a), float(r))
        nv, _ = measure_of(nu, S)
        mv, _ = measure_of(mu, S)
        if mv <= 0.0:
            ratio = math.inf if nv > 0 else math.nan
            out.append(QuotientEntry(r, nv, mv, ratio, True))
        else:
            out.append(QuotientEntry(r, nv, mv, nv / mv, False))
    return out


def approx_cont_defect(f, mu: RadonMeasure, S: MorseSet, eta: float,
                       samples: int = 4096) -> float:
    """Mass fraction of S where f deviates from f(tag) by more than eta.

    Stratified deterministic estimate: dyadic cells inside S weighted by the
    density, probed at their centers, plus exact atom terms.
    """
    mass, _ = measure_of(mu, S)
    if mass <= 0.0:
        raise InputError("set has zero measure; defect undefined")
    fx = f(S.tag) if not callable(getattr(f, "eval", None)) else f.eval(S.tag)
    call = f if not callable(getattr(f, "eval", None)) else f.eval
    bad = 0.0
    total = 0.0
    for loc, w in mu.atoms:
        if morse_contains(S, loc):
            total += w
            if abs(fx - call(loc)) > eta:
                bad += w
    from .geometry import bounding_box

    slo, shi = bounding_box(S)
    depth = max(1, int(round(math.log2(max(2, math.isqrt(samples))))))
    for box, rho in mu.pieces:
        if rho == 0.0:
            continue
        lo = np.maximum(np.asarray(slo), np.asarray(box.lo))
        hi = np.minimum(np.asarray(shi), np.asarray(box.hi))
        if np.any(hi <= lo):
            continue
        n = 2**depth
        axes = [np.linspace(lo[i], hi[i], n, endpoint=False) +
                (hi[i] - lo[i]) / (2 * n) for i in range(len(lo))]
        grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(lo), -1).T
        wcell = float(np.prod((hi - lo) / n)) * rho
        for p in grid:
            tp = tuple(p)
            if morse_contains(S, tp):
                total += wcell
                if abs(fx - call(tp)) > eta:
                    bad += wcell
    if total <= 0.0:
        return 0.0
    return min(1.0, bad / total)
