"""Gauges, Riemann sums over disjoint fine covers, and certified integrals.

The central theorem realized here: a nonnegative measurable f integrates to
F exactly when, for every accuracy eps, some strictly positive gauge makes
every disjoint gauge-fine almost-everywhere cover produce a Riemann sum
within eps of F.  For f continuous off a null set the gauge has a closed
form driven by a continuity modulus; elsewhere a local mean-deviation
refinement stands in.  Sign-changing integrands are split into positive and
negative parts sharing one gauge, each half carrying half the budget.

The principal-value demo shows what the machinery rightly refuses to call
integrable: alternating balls shrinking into the origin whose signed sums
converge while the absolute sums grow without bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .covering import thread_cap
from .errors import ContractError, InputError
from .families import CoverFamily, IntervalFamily, TiledCover, tile_cover
from .geometry import Space, Vec, _as_vec, closed_ball
from .measure import (AeCover, MeasurableRegion, RadonMeasure, RBox,
                      ae_cover, measure_of, region_contains)


# ---------------------------------------------------------------------------
# Gauges
# ---------------------------------------------------------------------------


@dataclass
class Gauge:
    """Strictly positive fineness bound delta: domain -> (0, 1]."""

    fn: Callable[[Vec], float]
    provenance: str = "user"
    fn_array: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, x) -> float:
        v = float(self.fn(tuple(x)))
        if not (0.0 < v <= 1.0):
            raise ContractError(f"gauge value {v} at {x} outside (0, 1]")
        return v

    def eval_array(self, pts: np.ndarray) -> np.ndarray:
        if self.fn_array is not None:
            v = np.asarray(self.fn_array(pts), dtype=float)
        else:
            v = np.array([float(self.fn(tuple(p))) for p in pts])
        if np.any(v <= 0.0) or np.any(v > 1.0):
            raise ContractError("vectorized gauge left (0, 1]")
        return v


# ---------------------------------------------------------------------------
# Integrands
# ---------------------------------------------------------------------------


@dataclass
class Integrand:
    """Point function with optional continuity modulus and vector fast path.

    ``modulus(x, gamma)`` returns rho > 0 with |f(y) - f(x)| < gamma whenever
    ||y - x|| < rho, or 0.0 where no modulus exists (jump points, atoms with
    reassigned values); such points must be covered by ``discontinuities``,
    a region the measure treats as null.
    """

    fn: Callable[[Vec], float]
    name: str = "f"
    fn_array: Callable[[np.ndarray], np.ndarray] | None = None
    modulus: Callable[[Vec, float], float] | None = None
    modulus_array: Callable[[np.ndarray, float], np.ndarray] | None = None
    discontinuities: MeasurableRegion | None = None
    nonneg: bool | None = None

    def __call__(self, x) -> float:
        return float(self.fn(tuple(x)))

    def eval_array(self, pts: np.ndarray) -> np.ndarray:
        if self.fn_array is not None:
            return np.asarray(self.fn_array(pts), dtype=float)
        return np.array([float(self.fn(tuple(p))) for p in pts])

    def check_modulus(self, space: Space, probes: Sequence[Vec],
                      gamma: float = 1e-2, samples: int = 64) -> bool:
        """Spot-verify the modulus contract on sample pairs."""
        from .geometry import sample_unit_ball

        if self.modulus is None:
            return True
        for x in probes:
            rho = self.modulus(tuple(x), gamma)
            if rho <= 0.0:
                continue
            ball = sample_unit_ball(space, samples) * rho * (1 - 1e-9) + np.asarray(x)
            fx = self(x)
            for y in ball:
                if abs(self(tuple(y)) - fx) >= gamma:
                    return False
        return True


def _builtin_x2() -> Integrand:
    def rho(x, g):
        a = abs(x[0])
        return min(1.0, math.sqrt(a * a + g) - a)

    return Integrand(
        fn=lambda x: x[0] ** 2, name="x2",
        fn_array=lambda p: p[:, 0] ** 2,
        modulus=rho,
        modulus_array=lambda p, g: np.minimum(
            1.0, np.sqrt(p[:, 0] ** 2 + g) - np.abs(p[:, 0])),
        nonneg=True)


def _builtin_sinpix() -> Integrand:
    c2 = math.pi * math.pi / 2.0

    def rho(x, g):
        c1 = math.pi * abs(math.cos(math.pi * x[0]))
        return min(1.0, (-c1 + math.sqrt(c1 * c1 + 4.0 * c2 * g)) / (2.0 * c2))

    def rho_arr(p, g):
        c1 = math.pi * np.abs(np.cos(math.pi * p[:, 0]))
        return np.minimum(1.0, (-c1 + np.sqrt(c1 * c1 + 4.0 * c2 * g)) / (2.0 * c2))

    return Integrand(
        fn=lambda x: math.sin(math.pi * x[0]), name="sinpix",
        fn_array=lambda p: np.sin(math.pi * p[:, 0]),
        modulus=rho, modulus_array=rho_arr, nonneg=True)


def _builtin_step() -> Integrand:
    # 1 on [0, 1/2), 3 on [1/2, 1]: locally constant, so the distance to the
    # jump is a modulus for every gamma; the jump itself has no modulus
    return Integrand(
        fn=lambda x: 3.0 if x[0] >= 0.5 else 1.0, name="step",
        fn_array=lambda p: np.where(p[:, 0] >= 0.5, 3.0, 1.0),
        modulus=lambda x, g: min(1.0, abs(x[0] - 0.5)),
        modulus_array=lambda p, g: np.minimum(1.0, np.abs(p[:, 0] - 0.5)),
        discontinuities=MeasurableRegion.box((0.5,), (0.5,)),
        nonneg=True)


def _builtin_x1x2() -> Integrand:
    def rho(x, g):
        n = math.hypot(x[0], x[1])
        return min(1.0, math.sqrt(n * n + 2.0 * g) - n)

    def rho_arr(p, g):
        n = np.sqrt(p[:, 0] ** 2 + p[:, 1] ** 2)
        return np.minimum(1.0, np.sqrt(n * n + 2.0 * g) - n)

    return Integrand(
        fn=lambda x: x[0] * x[1], name="x1x2",
        fn_array=lambda p: p[:, 0] * p[:, 1],
        modulus=rho, modulus_array=rho_arr, nonneg=True)


def _builtin_identity() -> Integrand:
    return Integrand(
        fn=lambda x: x[0], name="x",
        fn_array=lambda p: p[:, 0],
        modulus=lambda x, g: min(1.0, g),
        modulus_array=lambda p, g: np.full(len(p), min(1.0, g)),
        nonneg=True)


def _builtin_one() -> Integrand:
    return Integrand(
        fn=lambda x: 1.0, name="one",
        fn_array=lambda p: np.ones(len(p)),
        modulus=lambda x, g: 1.0,
        modulus_array=lambda p, g: np.ones(len(p)),
        nonneg=True)


def _builtin_xinvsqrt() -> Integrand:
    # x**-0.5 on (0, 1]: |f'| <= (x/2)**-1.5 / 2 within the half-window
    def rho(x, g):
        t = x[0]
        if t <= 0.0:
            return 0.0
        return min(1.0, t / 2.0, 2.0 * g * (t / 2.0) ** 1.5)

    def rho_arr(p, g):
        t = p[:, 0]
        out = np.minimum(1.0, np.minimum(t / 2.0, 2.0 * g * (t / 2.0) ** 1.5))
        return np.where(t > 0.0, out, 0.0)

    return Integrand(
        fn=lambda x: x[0] ** -0.5 if x[0] > 0 else math.inf, name="xinvsqrt",
        fn_array=lambda p: np.where(p[:, 0] > 0, p[:, 0] ** -0.5, np.inf),
        modulus=rho, modulus_array=rho_arr,
        discontinuities=MeasurableRegion.box((0.0,), (0.0,)),
        nonneg=True)


BUILTIN_INTEGRANDS = {
    "x2": _builtin_x2,
    "sinpix": _builtin_sinpix,
    "step": _builtin_step,
    "x1x2": _builtin_x1x2,
    "x": _builtin_identity,
    "one": _builtin_one,
    "xinvsqrt": _builtin_xinvsqrt,
}


def builtin_integrand(name: str) -> Integrand:
    try:
        return BUILTIN_INTEGRANDS[name]()
    except KeyError:
        raise InputError(f"unknown builtin integrand {name!r}; "
                         f"known: {sorted(BUILTIN_INTEGRANDS)}") from None


_EXPR_NAMES = {k: getattr(np, k) for k in
               ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "arctan",
                "sinh", "cosh", "tanh", "minimum", "maximum", "where")}
_EXPR_NAMES["pi"] = math.pi
_EXPR_NAMES["e"] = math.e


def expression_integrand(expr: str, dim: int) -> Integrand:
    """Integrand from an arithmetic expression in x (or x1..xd).

    The modulus is estimated by sampled bisection, so the gauge built from
    it is best effort rather than certified.
    """
    code = compile(expr, "<integrand>", "eval")
    for name in code.co_names:
        if name not in _EXPR_NAMES and not (name == "x" or name.startswith("x")):
            raise InputError(f"name {name!r} not allowed in integrand expressions")

    def env_for(p: np.ndarray) -> dict:
        env = dict(_EXPR_NAMES)
        for i in range(dim):
            env[f"x{i + 1}"] = p[:, i]
        env["x"] = p[:, 0]
        return env

    def fn_array(p):
        return np.broadcast_to(eval(code, {"__builtins__": {}}, env_for(p)),
                               (len(p),)).astype(float)

    def fn(x):
        return float(fn_array(np.asarray(x, dtype=float)[None, :])[0])

    def est_modulus(x, gamma):
        from .geometry import halton_points

        fx = fn(x)
        rho = 1.0
        probes = 2.0 * halton_points(48, dim) - 1.0
        for _ in range(40):
            ys = np.asarray(x) + rho * probes
            if np.max(np.abs(fn_array(ys) - fx)) < 0.9 * gamma:
                return rho
            rho *= 0.5
        return rho

    return Integrand(fn=fn, name=f"expr:{expr}", fn_array=fn_array,
                     modulus=est_modulus)


# ---------------------------------------------------------------------------
# Gauge construction
# ---------------------------------------------------------------------------


def _null_point_delta(f: Integrand, mu: RadonMeasure, x: Vec, budget: float,
                      lam: float) -> float:
    """Bound for tags without a modulus: shrink until the local deviation
    integral of f around the tag stays below the budget.

    Atoms at the tag itself cost nothing (the deviation there is zero), so
    atom tags with reassigned values resolve as the surrounding mass thins.
    """
    s = 1.0
    for _ in range(200):
        dev, _ = _mean_deviation(f, mu, x, s * max(lam, 1.0))
        if dev <= budget:
            return s
        s *= 0.5
    raise ContractError(f"could not bound the contribution at {x}")


def gauge_section5(f: Integrand, eps: float, mu: RadonMeasure,
                   omega: MeasurableRegion, lam: float = 1.0,
                   use_tail_decay: bool = False) -> Gauge:
    """Closed-form gauge from the continuity modulus.

    For a finite-mass region the gauge is rho(x, eps / (1 + mu(Omega))); the
    tail-decay form rho(x, eps * 2^-k(x) / (1 + mu(B(0, k(x)+1)))) with k(x)
    the first integer above ||x|| handles unbounded mass.  Points without a
    modulus (declared null) get a contribution-bounded fallback.
    """
    if f.modulus is None:
        raise InputError("integrand carries no continuity modulus")
    if eps <= 0:
        raise InputError("eps must be positive")
    mu_omega, _ = measure_of(mu, omega)
    if not use_tail_decay and not math.isfinite(mu_omega):
        use_tail_decay = True
    space = mu.space
    ball_mass_cache: dict[int, float] = {}

    def ball_mass(k: int) -> float:
        if k not in ball_mass_cache:
            ball_mass_cache[k] = measure_of(
                mu, closed_ball(space, (0.0,) * space.dim, float(k)))[0]
        return ball_mass_cache[k]

    def gamma_at(x) -> float:
        if not use_tail_decay:
            return eps / (1.0 + mu_omega)
        k = math.floor(space.norm_of(x)) + 1
        return eps * 2.0 ** (-k) / (1.0 + ball_mass(k + 1))

    null_budget = eps / 8.0

    def fn(x):
        rho = f.modulus(tuple(x), gamma_at(x))
        if rho is None or rho <= 0.0:
            return min(1.0, _null_point_delta(f, mu, tuple(x), null_budget, lam))
        return min(1.0, rho)

    fn_array = None
    if f.modulus_array is not None and not use_tail_decay:
        gamma = eps / (1.0 + mu_omega)

        def fn_array(pts):
            rho = np.asarray(f.modulus_array(pts, gamma), dtype=float)
            bad = rho <= 0.0
            if np.any(bad):
                rho = rho.copy()
                for i in np.nonzero(bad)[0]:
                    rho[i] = _null_point_delta(f, mu, tuple(pts[i]),
                                               null_budget, lam)
            return np.minimum(1.0, rho)

    return Gauge(fn, "section5_modulus", fn_array)


def lebesgue_point_gauge(f: Integrand, eps: float, mu: RadonMeasure,
                         omega: MeasurableRegion, lam: float = 1.0) -> Gauge:
    """Refinement gauge: shrink until the local mean deviation of f is small.

    Used when no modulus is available; estimates int |f(x) - f| d(mu) over
    shrinking balls by quadrature and stops once it drops below the local
    budget from the Lebesgue-point construction.
    """
    mu_omega, _ = measure_of(mu, omega)
    space = mu.space

    def fn(x):
        k = math.floor(space.norm_of(x)) + 1
        ball_mass = measure_of(mu, closed_ball(space, (0.0,) * space.dim,
                                               float(k + 1)))[0]
        eps1 = eps * 2.0 ** (-k - 1) / (1.0 + ball_mass)
        s = 1.0
        fx = f(x)
        for _ in range(80):
            dev, mass = _mean_deviation(f, mu, tuple(x), s)
            if mass <= 0.0 or dev <= eps1 * mass:
                return s
            s *= 0.5
        return min(s, _null_point_delta(f, mu, tuple(x), eps / 8.0, lam))

    return Gauge(fn, "lebesgue_point")


def _mean_deviation(f: Integrand, mu: RadonMeasure, x: Vec, s: float,
                    depth: int = 5) -> tuple[float, float]:
    """Quadrature estimate of (int_{B(x,s)} |f(x)-f| dmu, mu(B(x,s)))."""
    space = mu.space
    fx = f(x)
    dev = 0.0
    mass = 0.0
    for loc, w in mu.atoms:
        if space.dist(loc, x) <= s:
            mass += w
            fy = f(loc)
            dev += w * (abs(fx - fy) if math.isfinite(fy) else 1.0)
    n = 2 ** depth
    for box, rho in mu.pieces:
        if rho == 0.0:
            continue
        lo = np.maximum(np.asarray(box.lo), np.asarray(x) - s)
        hi = np.minimum(np.asarray(box.hi), np.asarray(x) + s)
        if np.any(hi <= lo):
            continue
        axes = [np.linspace(lo[i], hi[i], n, endpoint=False)
                + (hi[i] - lo[i]) / (2 * n) for i in range(space.dim)]
        grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(space.dim, -1).T
        inside = space.norm_array(grid - np.asarray(x)) <= s
        if not np.any(inside):
            continue
        wcell = float(np.prod((hi - lo) / n)) * rho
        vals = f.eval_array(grid[inside])
        vals = np.where(np.isfinite(vals), vals, fx + 1.0)
        mass += wcell * int(np.sum(inside))
        dev += wcell * float(np.sum(np.abs(vals - fx)))
    return dev, mass


# ---------------------------------------------------------------------------
# Riemann sums and certified integration
# ---------------------------------------------------------------------------


def _kahan_add(total: float, comp: float, term: float) -> tuple[float, float]:
    y = term - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def riemann_sum(f: Integrand, cover, mu: RadonMeasure) -> tuple[float, float]:
    """(sum f(tag) mu(S), sum |f(tag)| mu(S)) in cover order, compensated."""
    total = comp = 0.0
    abs_total = abs_comp = 0.0
    for tags, masses in cover.iter_batches():
        vals = f.eval_array(tags)
        if np.any(~np.isfinite(vals)):
            raise ContractError("integrand not finite at a cover tag")
        total, comp = _kahan_add(total, comp, float(np.sum(vals * masses)))
        abs_total, abs_comp = _kahan_add(abs_total, abs_comp,
                                         float(np.sum(np.abs(vals) * masses)))
    return total, abs_total


@dataclass
class IntegralCertificate:
    """Value with the data needed to re-verify it."""

    value: float
    eps: float
    sum: float
    abs_sum: float
    residual: float
    excess: float
    rounds: int
    entry_count: int
    tolerance: float
    gauge_provenance: str
    integrand: str
    diagnostic: str = ""

    def error_bound(self, f_sup: float = 0.0) -> float:
        return self.eps + self.residual * f_sup + self.excess * f_sup

    def to_text(self) -> str:
        lines = [
            f"value: {self.value:.12g}",
            f"eps: {self.eps:.12g}",
            f"sum: {self.sum:.12g}",
            f"abs_sum: {self.abs_sum:.12g}",
            f"residual: {self.residual:.12g}",
            f"excess: {self.excess:.12g}",
            f"rounds: {self.rounds}",
            f"entries: {self.entry_count}",
            f"tolerance: {self.tolerance:.12g}",
            f"gauge: {self.gauge_provenance}",
            f"integrand: {self.integrand}",
        ]
        if self.diagnostic:
            lines.append(f"diagnostic: {self.diagnostic}")
        return "\n".join(lines) + "\n"


def build_cover(mu: RadonMeasure, omega: MeasurableRegion, family: CoverFamily,
                gauge: Gauge, tol: float, eps_excess: float, seed: int = 0):
    """Gauge-fine disjoint a.e. cover: exact tiling when the family allows,
    greedy exhaustion otherwise."""
    if isinstance(family, IntervalFamily) and not omega.negative and \
            all(isinstance(s, RBox) for s in omega.positive):
        atoms_in = [a for a, _ in mu.atoms
                    if region_contains(omega, mu.space, a)]
        if not atoms_in or (mu.space.dim == 1 and len(omega.positive) == 1):
            return tile_cover(mu, omega, family, gauge, tol=tol, seed=seed)
    return ae_cover(mu, omega, family, gauge, eps=eps_excess, tol=tol, seed=seed)


def integrate(f: Integrand, omega: MeasurableRegion, mu: RadonMeasure,
              family: CoverFamily, eps: float = 1e-3, tol: float | None = None,
              seed: int = 0, abs_ceiling: float = 1e12) -> IntegralCertificate:
    """Certified Riemann-sum integral over one gauge-fine disjoint cover.

    One-signed integrands get the whole eps budget; sign-changing ones are
    split into positive and negative parts at eps/2 each, evaluated on the
    same cover (whose gauge serves both halves).  The claimed accuracy is
    eps plus residual and excess leakage scaled by sup |f|.
    """
    mu_omega, _ = measure_of(mu, omega)
    if tol is None:
        tol = max(1e-12, 1e-6 * mu_omega)
    one_signed = f.nonneg is True
    eps_half = eps if one_signed else eps / 2.0
    if f.modulus is not None:
        gauge = gauge_section5(f, eps_half, mu, omega, lam=family.lam)
    else:
        gauge = lebesgue_point_gauge(f, eps_half, mu, omega, lam=family.lam)
    f_probe = _sup_estimate(f, omega, mu.space)
    eps_excess = max(tol, eps / (8.0 * (1.0 + f_probe)))
    cover = build_cover(mu, omega, family, gauge, tol, eps_excess, seed)
    total, abs_total = riemann_sum(f, cover, mu)
    diagnostic = ""
    if abs_total > abs_ceiling:
        diagnostic = ("absolute sums exceeded the ceiling; "
                      "possible non-integrability")
    return IntegralCertificate(
        value=total, eps=eps, sum=total, abs_sum=abs_total,
        residual=cover.residual, excess=cover.excess, rounds=cover.rounds,
        entry_count=cover.entry_count, tolerance=tol,
        gauge_provenance=gauge.provenance, integrand=f.name,
        diagnostic=diagnostic)


def _sup_estimate(f: Integrand, omega: MeasurableRegion, space: Space,
                  n: int = 128) -> float:
    from .geometry import halton_points
    from .measure import region_bbox

    lo, hi = region_bbox(omega, space)
    lo, hi = np.asarray(lo), np.asarray(hi)
    pts = lo + halton_points(n, space.dim) * (hi - lo)
    vals = f.eval_array(pts)
    vals = vals[np.isfinite(vals)]
    return float(np.max(np.abs(vals))) if len(vals) else 1.0


def uniform_bound_probe(f: Integrand, omega: MeasurableRegion,
                        mu: RadonMeasure, family: CoverFamily, delta: Gauge,
                        trials: int = 8, tol: float | None = None):
    """Max of the absolute Riemann sums across distinct seeded covers.

    A bounded maximum across varied covers is evidence (not proof) of
    integrability; growth across trials is reported for diagnosis.
    """
    if trials < 1:
        raise InputError("at least one trial required")
    mu_omega, _ = measure_of(mu, omega)
    if tol is None:
        tol = max(1e-12, 1e-6 * mu_omega)

    def one_trial(t: int):
        cover = build_cover(mu, omega, family, delta, tol,
                            eps_excess=tol, seed=1000 + 7 * t)
        s, a = riemann_sum(f, cover, mu)
        return a, s, cover.entry_count

    workers = thread_cap()
    if workers > 1 and trials > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(one_trial, range(trials)))
    else:
        sums = [one_trial(t) for t in range(trials)]
    best = max(a for a, _, _ in sums)
    return best, sums


# ---------------------------------------------------------------------------
# The principal-value counterexample
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PvReport:
    n_balls: int
    central_radius: float
    sum: float
    abs_sum: float
    residual_tail: float


def _pv_inner(n: int) -> float:
    return 1.0 / n - 0.5 / (n * n)


def _pv_outer(n: int) -> float:
    return 1.0 / n + 0.5 / (n * n)


def pv_counterexample(n_balls: int, central_radius: float) -> PvReport:
    """Alternating balls shrinking into the origin, one closed ball each.

    The region is the union of open intervals centered at (-1)^n / n with
    radius 1/(2 n^2), plus the origin; the measure adds a unit atom at 0 to
    Lebesgue measure on the region.  On the n-th interval the integrand is
    constant at ((-1)^n / n) divided by the interval's measure, and 0 at the
    origin, so each interval contributes exactly (-1)^n / n to the sum and
    1/n in absolute value: the signed sums converge (to -ln 2) while the
    absolute sums diverge as the central ball forces ever more intervals to
    be covered individually.
    """
    if n_balls < 1:
        raise InputError("need at least one ball")
    if central_radius <= 0:
        raise InputError("central radius must be positive")
    if central_radius >= _pv_inner(n_balls):
        raise InputError(
            f"central radius {central_radius} reaches interval {n_balls}; "
            f"needs < {_pv_inner(n_balls):.6g}")
    # intervals on one side are disjoint: outer(n+2) < inner(n)
    for n in range(1, min(n_balls, 64)):
        if _pv_outer(n + 2) >= _pv_inner(n):
            raise ContractError(f"intervals {n} and {n + 2} overlap")
    ns = np.arange(1, n_balls + 1, dtype=float)
    terms = ((-1.0) ** ns) / ns
    # small terms first for accuracy
    total = float(np.sum(terms[::-1]))
    abs_total = float(np.sum((1.0 / ns)[::-1]))
    # uncovered tail: intervals beyond n_balls not swallowed by the central ball
    tail = 0.0
    n = n_balls + 1
    while _pv_outer(n) > central_radius:
        lo, hi = _pv_inner(n), _pv_outer(n)
        covered_to = min(hi, central_radius)
        if covered_to < hi:
            tail += hi - max(lo, covered_to) if covered_to > lo else hi - lo
        n += 1
        if n > n_balls + 10_000_000:
            break
    return PvReport(n_balls, central_radius, total, abs_total, tail)


def pv_balls_outside(central_radius: float) -> int:
    """Largest n whose interval clears a central ball of the given radius."""
    if central_radius >= _pv_inner(1):
        return 0
    n = 1
    while _pv_inner(n + 1) > central_radius:
        n += 1
    return n


def pv_sweep(start_radius: float = 0.5, halvings: int = 10) -> list[PvReport]:
    """Halve the central radius repeatedly, covering every interval it frees.

    The absolute sums grow like the harmonic series of the freed interval
    count: no uniform bound exists, which is exactly why these sums are not
    an integral.
    """
    out = []
    r = start_radius
    for _ in range(halvings + 1):
        n = pv_balls_outside(r)
        if n == 0:
            out.append(PvReport(0, r, 0.0, 0.0, _region_mass_outside(r)))
        else:
            out.append(pv_counterexample(n, r))
        r *= 0.5
    return out


def _region_mass_outside(central_radius: float) -> float:
    total = 0.0
    n = 1
    while _pv_outer(n) > central_radius:
        lo, hi = _pv_inner(n), _pv_outer(n)
        cut = max(lo, min(hi, central_radius))
        total += hi - cut
        n += 1
    return total


def pv_measure(n_balls: int) -> tuple[RadonMeasure, MeasurableRegion, list]:
    """Concrete measure/region/cover objects for the counterexample.

    Intended for modest n: the measure carries one density piece per
    interval, and the returned cover lists (tag, closed ball, mass).
    """
    space = Space(1, "l2")
    pieces = []
    cover = []
    for n in range(1, n_balls + 1):
        c = ((-1.0) ** n) / n
        r = 0.5 / (n * n)
        pieces.append((RBox((c - r,), (c + r,)), 1.0))
        ball = closed_ball(space, (c,), r)
        cover.append(((c,), ball, 1.0 / (n * n)))
    mu = RadonMeasure(space, atoms=(((0.0,), 1.0),), pieces=tuple(pieces))
    shapes = tuple(RBox(p.lo, p.hi) for p, _ in pieces)
    omega = MeasurableRegion(shapes + (RBox((0.0,), (0.0,)),))
    return mu, omega, cover
