"""Satellite verification, greedy selection, partitions, heavy subfamilies."""

import math

import numpy as np
import pytest

from morsecover.covering import (SatelliteConfig, TaggedFamily, greedy_select,
                                 heavy_subfamily, is_satellite_config,
                                 kappa_bound, partition_disjoint,
                                 sets_intersect)
from morsecover.errors import InputError
from morsecover.geometry import (Space, closed_ball, interior_contains,
                                 make_star, morse_diameter, tagged_interval)
from morsecover.measure import RadonMeasure, RBox, measure_of

L2_1 = Space(1, "l2")
L2_2 = Space(2, "l2")


def random_ball_family(seed, n=200, box=10.0, rmin=0.2, rmax=1.0, space=L2_2):
    rng = np.random.default_rng(seed)
    sets = [closed_ball(space, tuple(rng.uniform(0, box, size=space.dim)),
                        float(rng.uniform(rmin, rmax))) for _ in range(n)]
    return TaggedFamily.from_sets(sets)


# ---------------------------------------------------------------------------
# satellite configurations
# ---------------------------------------------------------------------------


def test_singleton_is_satellite():
    hub = closed_ball(L2_1, (0.0,), 1.0)
    assert is_satellite_config(SatelliteConfig(((hub.tag, hub),), 1.5)).ok


def test_disjoint_balls_fail():
    a = closed_ball(L2_1, (0.0,), 1.0)
    b = closed_ball(L2_1, (5.0,), 1.0)
    verdict = is_satellite_config(SatelliteConfig(((a.tag, a), (b.tag, b)), 1.5))
    assert not verdict.ok
    assert "does not meet" in verdict.violation


def test_two_interval_hand_check():
    # S1 = [-1, 1] tagged 0, S2 = [0.5, 1.6] tagged 1.05 as nested balls:
    # they meet, the later tag avoids int(S1), diameters shrink within tau
    s1 = closed_ball(L2_1, (0.0,), 1.0)
    s2 = closed_ball(L2_1, (1.05,), 0.55)
    assert sets_intersect(s1, s2)
    assert not interior_contains(s1, (1.05,))
    assert morse_diameter(s2) < 1.5 * morse_diameter(s1)
    assert is_satellite_config(SatelliteConfig(((s1.tag, s1), (s2.tag, s2)), 1.5)).ok


def test_order_sensitivity():
    # diameters grow along the order, so reversing flips the verdict
    big = closed_ball(L2_1, (1.2,), 1.0)
    small = closed_ball(L2_1, (0.0,), 0.5)
    fwd = SatelliteConfig(((big.tag, big), (small.tag, small)), 1.2)
    rev = SatelliteConfig(((small.tag, small), (big.tag, big)), 1.2)
    assert is_satellite_config(fwd).ok
    assert not is_satellite_config(rev).ok


def test_tau_out_of_range():
    hub = closed_ball(L2_1, (0.0,), 1.0)
    with pytest.raises(InputError):
        SatelliteConfig(((hub.tag, hub),), 1.0)
    with pytest.raises(InputError):
        SatelliteConfig(((hub.tag, hub),), 2.5)


# ---------------------------------------------------------------------------
# greedy selection
# ---------------------------------------------------------------------------


def test_greedy_far_balls_all_selected():
    sets = [closed_ball(L2_2, (10.0 * k, 0.0), 1.0 - 0.1 * k) for k in range(5)]
    fam = TaggedFamily.from_sets(sets)
    order = greedy_select(fam, 1.2)
    assert order == [0, 1, 2, 3, 4]  # descending diameter


def test_greedy_concentric():
    big = closed_ball(L2_2, (0.0, 0.0), 2.0)
    small = closed_ball(L2_2, (0.0, 0.0), 1.0)
    fam = TaggedFamily.from_sets([small, big])
    assert greedy_select(fam, 1.2) == [1]


def test_greedy_posterior_order_conditions():
    # oracle: re-check both ordered conditions over every pair
    fam = random_ball_family(42)
    tau = 1.2
    order = greedy_select(fam, tau)
    diams = [morse_diameter(fam.set_at(i)) for i in order]
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            assert not interior_contains(fam.set_at(order[a]),
                                         fam.tag_at(order[b]))
            assert diams[b] < tau * diams[a]
    # every input tag is interior to some selected set
    for i in range(len(fam)):
        assert any(interior_contains(fam.set_at(j), fam.tag_at(i))
                   for j in order)


# ---------------------------------------------------------------------------
# disjoint partition
# ---------------------------------------------------------------------------


def test_partition_all_disjoint_single_family():
    sets = [closed_ball(L2_2, (5.0 * k, 0.0), 1.0) for k in range(6)]
    fam = TaggedFamily.from_sets(sets)
    part = partition_disjoint(fam, greedy_select(fam, 1.2))
    assert part.m == 1


def test_partition_common_point_forces_singletons():
    k = 5
    sets = [closed_ball(L2_2, (math.cos(t), math.sin(t)), 1.05)
            for t in np.linspace(0, 2 * math.pi, k, endpoint=False)]
    fam = TaggedFamily.from_sets(sets)
    part = partition_disjoint(fam, greedy_select(fam, 1.2))
    assert part.m == k


def test_partition_200_ball_instance():
    fam = random_ball_family(42)
    order = greedy_select(fam, 1.2)
    part = partition_disjoint(fam, order)
    assert part.m <= part.kappa == kappa_bound(L2_2, 1.0, "balls")
    # within-family pairwise disjointness is exact for balls
    for members in part.families:
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                assert not sets_intersect(fam.set_at(members[a]),
                                          fam.set_at(members[b]))
    # families partition the selection
    seen = sorted(i for f in part.families for i in f)
    assert seen == sorted(order)


def test_partition_rejects_bad_order():
    fam = random_ball_family(1, n=10)
    with pytest.raises(InputError):
        partition_disjoint(fam, [0, 0, 1])
    with pytest.raises(InputError):
        partition_disjoint(fam, [99])


def test_partition_mixed_shapes():
    sets = [closed_ball(L2_2, (0.0, 0.0), 1.0),
            tagged_interval(L2_2, (0.5, 0.5), (1.0, 1.0)),
            make_star(L2_2, (5.0, 5.0), 0.3, 5, 1.0, 0.5)]
    fam = TaggedFamily.from_sets(sets, validate=False)
    order = greedy_select(fam, 1.5)
    part = partition_disjoint(fam, order)
    assert part.m >= 2  # the ball and the box overlap


# ---------------------------------------------------------------------------
# heavy subfamily
# ---------------------------------------------------------------------------


def _counting_measure_on_tags(fam):
    atoms = tuple((fam.tag_at(i), 1.0) for i in range(len(fam)))
    return RadonMeasure(fam.space, atoms=atoms)


def test_heavy_single_family_prefix():
    sets = [closed_ball(L2_1, (4.0 * k,), 1.0) for k in range(4)]
    fam = TaggedFamily.from_sets(sets)
    part = partition_disjoint(fam, greedy_select(fam, 1.2))
    assert part.m == 1
    mu = RadonMeasure.lebesgue(L2_1, (-10.0,), (20.0,))
    j, prefix, mass = heavy_subfamily(part, fam, mu)
    assert j == 0
    # minimal prefix holding half the family mass: each ball weighs 2
    assert len(prefix) == 2
    assert mass >= 0.5 * 8.0


def test_heavy_picks_heavier_family():
    # two overlapping pairs far apart, tags on each other's boundaries so
    # greedy keeps all four; the partition puts the big sets in family one
    # and the small ones in family two, and the density sits where only the
    # second family reaches, so family two wins with mass 3 against 1
    a1 = closed_ball(L2_1, (0.0,), 1.0)
    a2 = closed_ball(L2_1, (1.0,), 0.9)
    b1 = closed_ball(L2_1, (100.0,), 1.0)
    b2 = closed_ball(L2_1, (101.0,), 0.9)
    fam = TaggedFamily.from_sets([a1, a2, b1, b2], validate=False)
    part = partition_disjoint(fam, greedy_select(fam, 1.2))
    assert part.m == 2
    mu = RadonMeasure(L2_1, pieces=(
        (RBox((-1.0,), (0.1,)), 1.0 / 1.1),   # family one holds mass 1
        (RBox((1.0,), (1.9,)), 10.0 / 3.0)))  # family two holds mass 3
    j, prefix, mass = heavy_subfamily(part, fam, mu)
    assert j == 1
    totals = [sum(measure_of(mu, fam.set_at(i), interior=True)[0] for i in f)
              for f in part.families]
    assert totals == pytest.approx([1.0, 3.0])
    assert mass >= 0.5 * totals[1]


def test_heavy_outer_measure_inequality():
    # counting measure on the tags: mu*(A) = n <= 2 kappa * prefix mass
    fam = random_ball_family(42)
    part = partition_disjoint(fam, greedy_select(fam, 1.2))
    mu = _counting_measure_on_tags(fam)
    j, prefix, mass = heavy_subfamily(part, fam, mu)
    assert len(fam) <= 2 * part.kappa * mass
