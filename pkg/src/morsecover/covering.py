"""Satellite-configuration checks, greedy covering selection and packing bounds.

The selection pipeline turns a finite tagged family into an ordered subcover
whose interiors still contain every input tag, then splits that subcover into
pairwise-disjoint subfamilies.  The number of subfamilies is bounded by a
packing constant of the space (kappa), reported next to each partition.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError, InputError
from .geometry import (Ball, Interval, MorseSet, Space, Vec, closed_ball,
                       interior_contains, morse_closure, morse_diameter,
                       sample_boundary, sample_in_set, outer_radius)


def thread_cap() -> int:
    """Worker cap honored by the embarrassingly parallel searches."""
    try:
        return max(1, int(os.environ.get("MORSECOVER_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Pairwise set intersection
# ---------------------------------------------------------------------------


def sets_intersect(a: MorseSet, b: MorseSet, samples: int = 64) -> bool:
    """Whether two sets meet.

    Exact for ball/ball and box/box pairs.  Any other pair is resolved with a
    bounding-ball reject, an inner-ball accept, then deterministic boundary
    and interior sampling; that verdict is best effort, not exact.
    """
    if a.space != b.space:
        raise InputError("sets live in different spaces")
    space = a.space
    sa, sb = a.shape, b.shape
    if isinstance(sa, Ball) and isinstance(sb, Ball):
        d = space.dist(sa.center, sb.center)
        if sa.closed and sb.closed:
            return d <= sa.radius + sb.radius
        return d < sa.radius + sb.radius
    if isinstance(sa, Interval) and isinstance(sb, Interval):
        if sa.closed or sb.closed:
            # a closed lower face may meet the other box's upper face
            return all(max(a1, a2) <= min(a1 + b1, a2 + b2)
                       for a1, b1, a2, b2 in zip(sa.anchor, sa.edges,
                                                 sb.anchor, sb.edges))
        # half-open boxes: touching faces share no point
        return all(max(a1, a2) < min(a1 + b1, a2 + b2)
                   for a1, b1, a2, b2 in zip(sa.anchor, sa.edges, sb.anchor, sb.edges))
    # bounding-ball reject
    gap = space.dist(a.tag, b.tag)
    if gap > outer_radius(a) + outer_radius(b):
        return False
    # inner-ball accept
    if gap <= a.inner_radius + b.inner_radius:
        return True
    from .geometry import closure_contains

    for probe, target in ((a, b), (b, a)):
        pts = np.vstack([sample_boundary(probe, samples), sample_in_set(probe, samples)])
        tc = morse_closure(target)
        for p in pts:
            if closure_contains(tc, tuple(p)):
                return True
    return False


def _pair_exact(a: MorseSet, b: MorseSet) -> bool:
    return (isinstance(a.shape, Ball) and isinstance(b.shape, Ball)) or (
        isinstance(a.shape, Interval) and isinstance(b.shape, Interval))


# ---------------------------------------------------------------------------
# Tagged families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaggedFamily:
    """Finite family of tagged sets sharing one space and one lam."""

    space: Space
    entries: tuple[tuple[Vec, MorseSet], ...]
    lam: float
    diam_bound: float

    @staticmethod
    def from_sets(sets: list[MorseSet], validate: bool = True) -> "TaggedFamily":
        if not sets:
            raise InputError("family must contain at least one set")
        space = sets[0].space
        lam = sets[0].lam
        diams = [morse_diameter(s) for s in sets]
        if validate:
            for s in sets:
                if s.space != space:
                    raise InputError("family mixes spaces")
                if abs(s.lam - lam) > 1e-12 * max(1.0, lam):
                    raise InputError("family mixes lam values")
                if not interior_contains(s, s.tag):
                    raise InputError(f"tag {s.tag} not interior to its set")
        entries = tuple((s.tag, s) for s in sets)
        return TaggedFamily(space, entries, lam, max(diams))

    def __len__(self) -> int:
        return len(self.entries)

    def set_at(self, i: int) -> MorseSet:
        return self.entries[i][1]

    def tag_at(self, i: int) -> Vec:
        return self.entries[i][0]


@dataclass(frozen=True)
class SatelliteConfig:
    """Ordered tagged sets checked against the satellite conditions for tau."""

    ordered: tuple[tuple[Vec, MorseSet], ...]
    tau: float

    def __post_init__(self):
        if not (1.0 < self.tau <= 2.0):
            raise InputError(f"tau must lie in (1, 2], got {self.tau}")
        if not self.ordered:
            raise InputError("configuration must be nonempty")

    def __len__(self) -> int:
        return len(self.ordered)


@dataclass(frozen=True)
class SatelliteVerdict:
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_satellite_config(cfg: SatelliteConfig) -> SatelliteVerdict:
    """Verify the two ordered conditions; reports the first violation.

    (i) every set meets the last one; (ii) for i < j the tag of j avoids the
    interior of set i and diam(S_j) < tau * diam(S_i).
    """
    entries = cfg.ordered
    n = len(entries)
    space = entries[0][1].space
    for _, s in entries:
        if s.space != space:
            raise InputError("configuration mixes spaces")
    last = entries[-1][1]
    diams = [morse_diameter(s) for _, s in entries]
    for i, (_, s) in enumerate(entries):
        if not sets_intersect(s, last):
            return SatelliteVerdict(False, f"S{i + 1} does not meet S{n}")
    for i in range(n):
        for j in range(i + 1, n):
            tag_j = entries[j][0]
            if interior_contains(entries[i][1], tag_j):
                return SatelliteVerdict(False, f"tag {j + 1} lies inside int(S{i + 1})")
            if not diams[j] < cfg.tau * diams[i]:
                return SatelliteVerdict(
                    False, f"diam(S{j + 1}) >= tau*diam(S{i + 1})")
    return SatelliteVerdict(True)


# ---------------------------------------------------------------------------
# Greedy selection and the disjoint partition
# ---------------------------------------------------------------------------


def greedy_select(fam: TaggedFamily, tau: float) -> list[int]:
    """Order of picked entries: repeatedly take a maximal-diameter survivor.

    A maximal pick satisfies the tau-approximate sup rule for every tau > 1;
    ties break toward the lower input index.  After each pick every surviving
    tag inside the picked set's interior is discarded, so the output order
    satisfies, for alpha < beta: tag_beta outside int(S_alpha) and
    diam(S_beta) < tau * diam(S_alpha).
    """
    if not (1.0 < tau <= 2.0):
        raise InputError(f"tau must lie in (1, 2], got {tau}")
    n = len(fam)
    diams = [morse_diameter(fam.set_at(i)) for i in range(n)]
    alive = sorted(range(n), key=lambda i: (-diams[i], i))
    tags = [fam.tag_at(i) for i in range(n)]
    reaches = [outer_radius(fam.set_at(i)) for i in range(n)]
    # uniform tag buckets keep the removal scan local
    d = fam.space.dim
    b = max(max(reaches), 1e-12)
    buckets: dict[tuple, list[int]] = {}
    for i in range(n):
        key = tuple(int(math.floor(c / b)) for c in tags[i])
        buckets.setdefault(key, []).append(i)
    removed = [False] * n
    order: list[int] = []
    for pick in alive:
        if removed[pick]:
            continue
        order.append(pick)
        removed[pick] = True
        s = fam.set_at(pick)
        reach = reaches[pick] * (1.0 + 1e-12)
        span = int(math.ceil(reach / b))
        key = tuple(int(math.floor(c / b)) for c in tags[pick])
        for off in _neighbor_offsets(d, span):
            cell = buckets.get(tuple(k + o for k, o in zip(key, off)))
            if not cell:
                continue
            for j in cell:
                if not removed[j] and fam.space.dist(tags[j], tags[pick]) <= reach \
                        and interior_contains(s, tags[j]):
                    removed[j] = True
    return order


@lru_cache(maxsize=32)
def _neighbor_offsets(dim: int, span: int) -> tuple[tuple[int, ...], ...]:
    rng = range(-span, span + 1)
    out = [()]
    for _ in range(dim):
        out = [prev + (o,) for prev in out for o in rng]
    return tuple(out)


@dataclass(frozen=True)
class Partition:
    """Disjoint subfamilies (index lists) of a selection order."""

    families: tuple[tuple[int, ...], ...]
    selection_order: tuple[int, ...]
    kappa: int
    exact_tests: bool

    @property
    def m(self) -> int:
        return len(self.families)


def partition_disjoint(fam: TaggedFamily, order: list[int],
                       kappa: int | None = None) -> Partition:
    """Sweep the order repeatedly, filling one pairwise-disjoint family per sweep.

    Each sweep keeps an entry when its set misses everything already kept in
    the current family.  The family count m never exceeds the satellite bound
    kappa (checked whenever every pairwise test was exact).
    """
    n = len(fam)
    seen = set()
    for i in order:
        if not (0 <= i < n) or i in seen:
            raise InputError("selection order is not a set of valid entry indices")
        seen.add(i)
    if kappa is None:
        kappa = kappa_bound(fam.space, fam.lam, _auto_mode(fam))

    fast = _ball_arrays(fam, order) or _box_arrays(fam, order)
    if fast is not None:
        families = fast
        exact = True
    else:
        exact = True
        remaining = list(order)
        families = []
        outer = {i: outer_radius(fam.set_at(i)) for i in order}
        while remaining:
            current: list[int] = []
            leftover: list[int] = []
            for i in remaining:
                si = fam.set_at(i)
                hit = False
                for j in current:
                    sj = fam.set_at(j)
                    if fam.space.dist(fam.tag_at(i), fam.tag_at(j)) > outer[i] + outer[j]:
                        continue
                    if not _pair_exact(si, sj):
                        exact = False
                    if sets_intersect(si, sj):
                        hit = True
                        break
                (leftover if hit else current).append(i)
            families.append(tuple(current))
            remaining = leftover
    part = Partition(tuple(families), tuple(order), int(kappa), exact)
    if exact and part.m > kappa:
        raise ContractError(
            f"partition produced {part.m} families, above the bound {kappa}")
    return part


def _ball_arrays(fam: TaggedFamily, order: list[int]):
    """Bucket-hashed disjoint sweeps for an all-closed-ball family."""
    shapes = [fam.set_at(i).shape for i in order]
    if not all(isinstance(s, Ball) and s.closed for s in shapes):
        return None
    space = fam.space
    centers = [s.center for s in shapes]
    radii = [s.radius for s in shapes]
    n = len(order)
    b = max(2.0 * max(radii), 1e-12)
    keys = [tuple(int(math.floor(c / b)) for c in ctr) for ctr in centers]
    d = space.dim
    offsets = _neighbor_offsets(d, 1)
    families: list[tuple[int, ...]] = []
    remaining = list(range(n))
    while remaining:
        cur_pos: list[int] = []
        leftover: list[int] = []
        occupied: dict[tuple, list[int]] = {}
        for k in remaining:
            hit = False
            for off in offsets:
                cell = occupied.get(tuple(a + o for a, o in zip(keys[k], off)))
                if not cell:
                    continue
                for j in cell:
                    if space.dist(centers[j], centers[k]) <= radii[j] + radii[k]:
                        hit = True
                        break
                if hit:
                    break
            if hit:
                leftover.append(k)
            else:
                cur_pos.append(k)
                occupied.setdefault(keys[k], []).append(k)
        families.append(tuple(order[k] for k in cur_pos))
        remaining = leftover
    return families


def _box_arrays(fam: TaggedFamily, order: list[int]):
    """Vectorized disjoint sweeps for an all-interval family (half-open boxes)."""
    shapes = [fam.set_at(i).shape for i in order]
    if not all(isinstance(s, Interval) for s in shapes):
        return None
    los = np.array([s.anchor for s in shapes], dtype=float)
    his = los + np.array([s.edges for s in shapes], dtype=float)
    families: list[tuple[int, ...]] = []
    remaining = list(range(len(order)))
    flo = np.empty_like(los)
    fhi = np.empty_like(his)
    while remaining:
        cur_pos: list[int] = []
        leftover: list[int] = []
        m = 0
        for k in remaining:
            if m and bool(np.any(np.all(np.maximum(flo[:m], los[k])
                                        < np.minimum(fhi[:m], his[k]), axis=1))):
                leftover.append(k)
            else:
                cur_pos.append(k)
                flo[m] = los[k]
                fhi[m] = his[k]
                m += 1
        families.append(tuple(order[k] for k in cur_pos))
        remaining = leftover
    return families


def _auto_mode(fam: TaggedFamily) -> str:
    for _, s in fam.entries:
        sh = s.shape
        if not (isinstance(sh, Ball) and sh.closed and tuple(sh.center) == tuple(s.tag)):
            return "morse"
    return "balls"


def heavy_subfamily(part: Partition, fam: TaggedFamily, mu,
                    masses: dict[int, float] | None = None):
    """First family maximizing total interior mass, plus its half-mass prefix.

    Returns (family index j, prefix entry indices, prefix mass).  The prefix
    is the shortest initial run of the family holding at least half the family
    mass, which gives the 2*kappa outer-measure guarantee.
    """
    from .measure import measure_of

    if masses is None:
        masses = {}
        for famly in part.families:
            for i in famly:
                val, err = measure_of(mu, fam.set_at(i), interior=True)
                if not math.isfinite(val):
                    raise InputError("measure is not finite on the family")
                masses[i] = val
    totals = [sum(masses[i] for i in f) for f in part.families]
    j = int(np.argmax(totals))  # argmax returns the first maximizer
    target = 0.5 * totals[j]
    prefix: list[int] = []
    acc = 0.0
    for i in part.families[j]:
        prefix.append(i)
        acc += masses[i]
        if acc >= target:
            break
    return j, prefix, acc


# ---------------------------------------------------------------------------
# Packing estimates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PackingWitness:
    points: tuple[Vec, ...]
    min_pairwise_distance: float
    container_radius: float
    anchored: bool
    surface_only: bool

    def verify(self, space: Space) -> bool:
        pts = np.asarray(self.points, dtype=float)
        n = len(pts)
        for i in range(n):
            for j in range(i + 1, n):
                if space.dist(tuple(pts[i]), tuple(pts[j])) < self.min_pairwise_distance * (1 - 1e-12):
                    return False
        norms = space.norm_array(pts)
        if self.surface_only:
            if np.any(np.abs(norms - self.container_radius) > 1e-9 * self.container_radius):
                return False
        elif np.any(norms > self.container_radius * (1 + 1e-12)):
            return False
        if self.anchored and not any(space.norm_of(p) <= 1e-12 for p in self.points):
            return False
        return True


def packing_upper_bound(space: Space, container_r: float, min_dist: float) -> int:
    """Volume bound: disjoint balls of radius min_dist/2 around the points
    fit inside the container inflated by min_dist/2."""
    ratio = (container_r + 0.5 * min_dist) / (0.5 * min_dist)
    return int(math.floor(ratio**space.dim + 1e-9))


def packing_count(space: Space, container_r: float, min_dist: float,
                  anchored: bool = False, surface_only: bool = False,
                  budget: int = 0, seed: int = 0) -> tuple[int, PackingWitness, int]:
    """Bracket the packing number: greedy/perturbation lower bound, volume upper.

    Returns (lower, witness, upper).  The witness re-verifies exactly.  The
    lower bound search is deterministic for a fixed seed; budget counts the
    random insertion proposals after the lattice greedy pass.
    """
    if min_dist <= 0:
        raise InputError("min_dist must be positive")
    d = space.dim
    accepted: list[np.ndarray] = []

    def fits(p: np.ndarray) -> bool:
        if surface_only:
            if abs(space.norm_of(tuple(p)) - container_r) > 1e-9 * container_r:
                return False
        elif space.norm_of(tuple(p)) > container_r * (1 + 1e-12):
            return False
        return all(space.dist(tuple(p), tuple(q)) >= min_dist for q in accepted)

    if anchored and not surface_only:
        accepted.append(np.zeros(d))

    # lattice candidates at the packing spacing, nearest-to-origin first
    k = int(math.floor(container_r / min_dist * max(space.axis_extent(i) for i in range(d))) + 1)
    axes = [np.arange(-k, k + 1) * min_dist for _ in range(d)]
    grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(d, -1).T
    grid = grid[np.argsort([space.norm_of(tuple(p)) for p in grid], kind="stable")]
    if surface_only:
        norms = np.array([space.norm_of(tuple(p)) for p in grid])
        keep = norms > 1e-12
        grid = grid[keep] * (container_r / norms[keep, None])
    for p in grid:
        if fits(p):
            accepted.append(np.array(p, dtype=float))

    rng = np.random.default_rng(seed)
    for _ in range(max(0, budget)):
        raw = rng.uniform(-1.0, 1.0, size=d)
        nrm = space.norm_of(tuple(raw))
        if nrm < 1e-12:
            continue
        if surface_only:
            p = raw * (container_r / nrm)
        else:
            p = raw * (container_r * rng.uniform() ** (1.0 / d) / nrm)
        if fits(p):
            accepted.append(p)

    witness = PackingWitness(tuple(tuple(float(c) for c in p) for p in accepted),
                             min_dist, container_r, anchored, surface_only)
    if not witness.verify(space):
        raise ContractError("packing witness failed re-verification")
    upper = packing_upper_bound(space, container_r, min_dist)
    lower = len(accepted)
    if lower > upper:
        raise ContractError("packing lower bound exceeded the volume bound")
    return lower, witness, upper


def kappa_bound(space: Space, lam: float, mode: str = "balls") -> int:
    """Upper bound on satellite-configuration size.

    mode="balls": packing points in B(0, 2) at pairwise distance >= 1, at
    most 5^d by the volume argument.  mode="morse": N(64 lam^3) +
    N(8 lam^2) * N_S(16 lam) with N, N_S volume packing bounds; monotone
    nondecreasing in lam.
    """
    if lam < 1.0:
        raise InputError(f"lam must be >= 1, got {lam}")
    if mode == "balls":
        return packing_upper_bound(space, 2.0, 1.0)
    if mode != "morse":
        raise InputError(f"unknown kappa mode {mode!r}")

    def n_of(gamma: float) -> int:
        return packing_upper_bound(space, 1.0, 1.0 / gamma)

    return n_of(64.0 * lam**3) + n_of(8.0 * lam**2) * n_of(16.0 * lam)


# ---------------------------------------------------------------------------
# Empirical satellite search
# ---------------------------------------------------------------------------


def satellite_search(space: Space, lam: float, tau: float, budget: int,
                     seed: int = 0) -> SatelliteConfig:
    """Randomized constructive search for a large valid configuration.

    Closed balls tagged at their centers are proposed around a fixed hub; a
    proposal survives when the grown configuration still verifies.  The best
    configuration found is returned and checked against the kappa bound.
    """
    if lam < 1.0:
        raise InputError("lam must be >= 1")
    if not (1.0 < tau <= 2.0):
        raise InputError("tau must lie in (1, 2]")
    hub = closed_ball(space, (0.0,) * space.dim, 1.0)
    config: list[tuple[Vec, MorseSet]] = [(hub.tag, hub)]
    cfg = SatelliteConfig(tuple(config), tau)
    rng = np.random.default_rng(seed)
    d = space.dim
    for _ in range(max(0, budget)):
        raw = rng.uniform(-1.0, 1.0, size=d)
        nrm = space.norm_of(tuple(raw))
        if nrm < 1e-9:
            continue
        direction = raw / nrm
        radius = float(rng.uniform(2.0 / tau / 2.0 + 1e-6, 2.5))
        dist = float(rng.uniform(radius, radius + 1.0))
        center = tuple(direction * dist)
        cand = closed_ball(space, center, radius)
        # insert keeping diameters nonincreasing, hub last
        diam = 2.0 * radius
        pos = 0
        for i, (_, s) in enumerate(config[:-1]):
            if morse_diameter(s) >= diam:
                pos = i + 1
        trial = config[:pos] + [(cand.tag, cand)] + config[pos:]
        verdict = is_satellite_config(SatelliteConfig(tuple(trial), tau))
        if verdict.ok:
            config = trial
            cfg = SatelliteConfig(tuple(config), tau)
    bound = kappa_bound(space, lam, "morse")
    if len(cfg) > bound:
        raise ContractError(
            f"search produced {len(cfg)} sets, above the kappa bound {bound}")
    if not is_satellite_config(cfg).ok:
        raise ContractError("search result failed re-verification")
    return cfg
