"""Packing brackets, the kappa bounds and the empirical satellite search."""

import itertools

import numpy as np
import pytest

from morsecover.covering import (is_satellite_config, kappa_bound,
                                 packing_count, packing_upper_bound,
                                 satellite_search)
from morsecover.errors import InputError
from morsecover.geometry import Space


def brute_force_1d_packing(container, min_dist, grid_step=0.5):
    """Oracle: exhaustive search over a grid fine enough to realize optima."""
    pts = np.arange(-container, container + grid_step / 2, grid_step)
    best = 0
    for r in range(len(pts), 0, -1):
        for combo in itertools.combinations(pts, r):
            if all(abs(a - b) >= min_dist - 1e-12
                   for a, b in itertools.combinations(combo, 2)):
                return max(best, r)
    return best


def test_packing_1d_exact_bracket():
    # container 2, spacing 1: brute force says 5, the volume bound agrees
    oracle = brute_force_1d_packing(2.0, 1.0)
    assert oracle == 5
    lower, witness, upper = packing_count(Space(1, "l2"), 2.0, 1.0, anchored=True)
    assert (lower, upper) == (5, 5)
    assert witness.verify(Space(1, "l2"))
    assert sorted(p[0] for p in witness.points) == [-2.0, -1.0, 0.0, 1.0, 2.0]


def test_packing_2d_linf_grid():
    lower, witness, upper = packing_count(Space(2, "linf"), 2.0, 1.0, anchored=True)
    assert lower == 25
    assert upper >= 25
    assert witness.verify(Space(2, "linf"))
    # pairwise separation rechecked directly
    pts = np.asarray(witness.points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert np.max(np.abs(pts[i] - pts[j])) >= 1.0


def test_packing_unit_gamma_one():
    oracle = brute_force_1d_packing(1.0, 1.0)
    assert oracle == 3
    lower, _, upper = packing_count(Space(1, "l2"), 1.0, 1.0, anchored=True)
    assert lower == 3 and upper == 3


def test_packing_lower_never_exceeds_upper():
    rng = np.random.default_rng(2)
    for _ in range(10):
        d = int(rng.integers(1, 4))
        space = Space(d, str(rng.choice(["l1", "l2", "linf"])))
        c = float(rng.uniform(0.5, 3.0))
        m = float(rng.uniform(0.3, 1.5))
        lower, witness, upper = packing_count(space, c, m, budget=50,
                                              seed=int(rng.integers(1 << 20)))
        assert lower <= upper
        assert witness.verify(space)


def test_packing_surface_only():
    lower, witness, upper = packing_count(Space(2, "l2"), 1.0, 1.0,
                                          surface_only=True, budget=100)
    assert lower >= 4  # the four axis points are pairwise at distance >= sqrt(2)
    assert witness.verify(Space(2, "l2"))
    assert lower <= upper


def test_packing_bad_input():
    with pytest.raises(InputError):
        packing_count(Space(1, "l2"), 1.0, 0.0)


# ---------------------------------------------------------------------------
# kappa bounds
# ---------------------------------------------------------------------------


def test_kappa_balls_five_power_d():
    assert kappa_bound(Space(1, "l2"), 1.0, "balls") == 5
    assert kappa_bound(Space(2, "l2"), 1.0, "balls") == 25
    assert kappa_bound(Space(3, "linf"), 1.0, "balls") == 125


def test_kappa_morse_formula():
    # N(64 lam^3) + N(8 lam^2) * N_S(16 lam) with volume packing bounds
    for d in (1, 2):
        space = Space(d, "l2")
        lam = 1.0
        expected = packing_upper_bound(space, 1.0, 1.0 / 64.0) + \
            packing_upper_bound(space, 1.0, 1.0 / 8.0) * \
            packing_upper_bound(space, 1.0, 1.0 / 16.0)
        got = kappa_bound(space, lam, "morse")
        assert got == expected
        assert got >= kappa_bound(space, lam, "balls")


def test_kappa_monotone_in_lambda():
    space = Space(2, "l2")
    values = [kappa_bound(space, lam, "morse") for lam in (1.0, 1.5, 2.0, 3.0)]
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_kappa_rejects_small_lambda():
    with pytest.raises(InputError):
        kappa_bound(Space(1, "l2"), 0.5, "balls")


# ---------------------------------------------------------------------------
# satellite search
# ---------------------------------------------------------------------------


def test_search_zero_budget_singleton():
    cfg = satellite_search(Space(1, "l2"), 1.0, 1.5, budget=0)
    assert len(cfg) == 1
    assert is_satellite_config(cfg).ok


def test_search_finds_pair_in_1d():
    cfg = satellite_search(Space(1, "l2"), 1.0, 1.5, budget=300, seed=3)
    assert len(cfg) >= 2
    assert is_satellite_config(cfg).ok


def test_search_respects_bound_grid():
    for d, lam, tau in itertools.product((1, 2), (1.0, 2.0), (1.2, 2.0)):
        space = Space(d, "l2")
        cfg = satellite_search(space, lam, tau, budget=120, seed=17)
        assert is_satellite_config(cfg).ok
        assert len(cfg) <= kappa_bound(space, lam, "morse")
