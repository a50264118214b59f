"""Cover families, tiled covers and the remaining plumbing contracts."""

import math
import os

import numpy as np
import pytest

from morsecover.covering import (SatelliteConfig, is_satellite_config,
                                 thread_cap)
from morsecover.errors import ContractError, InputError
from morsecover.families import (ClosedBallFamily, IntervalFamily,
                                 OpenBallFamily, StarFamily, family_from_spec,
                                 tile_cover)
from morsecover.geometry import (Interval, Segment, Space, closed_ball,
                                 interior_contains, morse_closure,
                                 morse_contains, outer_radius, tagged_interval,
                                 validate_morse)
from morsecover.integrate import Gauge, builtin_integrand, integrate, \
    uniform_bound_probe
from morsecover.measure import MeasurableRegion, RadonMeasure, ae_cover

L1D = Space(1, "l2")
L2D = Space(2, "l2")


# ---------------------------------------------------------------------------
# family generators
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("kind", ["closed_ball", "open_ball", "interval", "star"])
def test_families_honor_size_cap(kind):
    space = L2D
    fam = family_from_spec(space, kind)
    for size in (1.0, 0.3, 0.01):
        S = fam.set_at((0.5, 0.5), size)
        assert outer_radius(S) <= size * (1 + 1e-9)
        assert interior_contains(S, (0.5, 0.5))
        assert abs(S.lam - fam.lam) < 1e-9


def test_open_ball_family_offset():
    fam = OpenBallFamily(L1D, offset_ratio=1.0 / 3.0)
    assert fam.lam == pytest.approx(2.0)
    S = fam.set_at((0.5,), 0.3)
    assert not S.shape.closed
    assert validate_morse(S).valid


def test_star_family_shapes_validate():
    fam = StarFamily(L2D, points=6)
    S = fam.set_at((0.0, 0.0), 0.5)
    assert validate_morse(S).valid


def test_unknown_family_kind():
    with pytest.raises(InputError):
        family_from_spec(L2D, "pentagon")


def test_ae_cover_with_open_ball_family():
    mu = RadonMeasure.lebesgue(L1D, (0.0,), (1.0,))
    omega = MeasurableRegion.box((0.0,), (1.0,))
    fam = OpenBallFamily(L1D, offset_ratio=0.2)
    cover = ae_cover(mu, omega, fam, lambda x: 1.0, eps=1e-2, tol=5e-2, seed=2)
    assert cover.residual <= 5e-2
    for e in cover.entries:
        assert not e.set.shape.closed


# ---------------------------------------------------------------------------
# tiled covers
# ---------------------------------------------------------------------------


def test_tile_cover_replays_identically():
    mu = RadonMeasure.lebesgue(L1D, (0.0,), (1.0,))
    omega = MeasurableRegion.box((0.0,), (1.0,))
    gauge = Gauge(lambda x: 0.07, fn_array=lambda p: np.full(len(p), 0.07))
    cover = tile_cover(mu, omega, IntervalFamily(L1D), gauge, tol=1e-6, seed=9)
    first = [(tags.copy(), masses.copy()) for tags, masses in cover.iter_batches()]
    second = list(cover.iter_batches())
    assert len(first) == len(second)
    for (t1, m1), (t2, m2) in zip(first, second):
        assert np.array_equal(t1, t2)
        assert np.array_equal(m1, m2)


def test_tile_cover_masses_sum_to_region():
    mu = RadonMeasure.lebesgue(L1D, (0.0,), (1.0,))
    omega = MeasurableRegion.box((0.0,), (1.0,))
    gauge = Gauge(lambda x: 0.03, fn_array=lambda p: np.full(len(p), 0.03))
    cover = tile_cover(mu, omega, IntervalFamily(L1D), gauge, tol=1e-9, seed=1)
    total = sum(float(np.sum(m)) for _, m in cover.iter_batches())
    assert total == pytest.approx(1.0, abs=1e-9)
    assert cover.residual <= 1e-9


def test_tile_cover_needs_box_region():
    mu = RadonMeasure.lebesgue(L1D, (0.0,), (1.0,))
    from morsecover.measure import RBall

    omega = MeasurableRegion((RBall((0.5,), 0.4),))
    with pytest.raises(InputError):
        tile_cover(mu, omega, IntervalFamily(L1D), Gauge(lambda x: 1.0),
                   tol=1e-6)


def test_oversized_family_set_caught():
    class Liar(ClosedBallFamily):
        def set_at(self, tag, size):
            return closed_ball(self.space, tag, 0.4)  # ignores the cap

    mu = RadonMeasure.lebesgue(L1D, (0.0,), (1.0,))
    omega = MeasurableRegion.box((0.0,), (1.0,))
    with pytest.raises(ContractError):
        ae_cover(mu, omega, Liar(L1D), lambda x: 0.1, eps=1e-2, tol=1e-2,
                 seed=0, max_rounds=12)


# ---------------------------------------------------------------------------
# leftover geometry/plumbing contracts
# ---------------------------------------------------------------------------


def test_segment_affine_parameterization():
    seg = Segment((0.0, 2.0), (4.0, 0.0))
    assert seg.point_at(1.0) == (0.0, 2.0)
    assert seg.point_at(0.0) == (4.0, 0.0)
    assert seg.point_at(0.25) == (3.0, 0.5)


def test_interval_closure_gains_lower_faces():
    S = tagged_interval(L2D, (0.0, 0.0), (1.0, 1.0))
    assert not morse_contains(S, (0.0, 0.5))
    closed = morse_closure(S)
    assert morse_contains(closed, (0.0, 0.5))
    assert isinstance(closed.shape, Interval) and closed.shape.closed


def test_satellite_rejects_mixed_spaces():
    a = closed_ball(L1D, (0.0,), 1.0)
    b = closed_ball(Space(1, "linf"), (0.5,), 1.0)
    with pytest.raises(InputError):
        is_satellite_config(SatelliteConfig(((a.tag, a), (b.tag, b)), 1.5))


def test_thread_cap_env(monkeypatch):
    monkeypatch.delenv("MORSECOVER_THREADS", raising=False)
    assert thread_cap() == 1
    monkeypatch.setenv("MORSECOVER_THREADS", "4")
    assert thread_cap() == 4
    monkeypatch.setenv("MORSECOVER_THREADS", "junk")
    assert thread_cap() == 1


def test_probe_parallel_matches_serial(monkeypatch):
    mu = RadonMeasure.lebesgue(L1D, (0.0,), (1.0,))
    omega = MeasurableRegion.box((0.0,), (1.0,))
    f = builtin_integrand("one")
    g = Gauge(lambda x: 0.2, fn_array=lambda p: np.full(len(p), 0.2))
    monkeypatch.delenv("MORSECOVER_THREADS", raising=False)
    serial, sums_serial = uniform_bound_probe(f, omega, mu, IntervalFamily(L1D),
                                              g, trials=3)
    monkeypatch.setenv("MORSECOVER_THREADS", "3")
    parallel, sums_parallel = uniform_bound_probe(f, omega, mu,
                                                  IntervalFamily(L1D), g,
                                                  trials=3)
    assert serial == pytest.approx(parallel)
    assert sums_serial == sums_parallel


def test_non_integrability_diagnostic():
    from morsecover.integrate import Integrand

    mu = RadonMeasure.lebesgue(L1D, (0.0,), (1.0,))
    omega = MeasurableRegion.box((0.0,), (1.0,))
    f = Integrand(fn=lambda x: 1e15 * (x[0] + 1.0), name="huge",
                  fn_array=lambda p: 1e15 * (p[:, 0] + 1.0),
                  modulus=lambda x, g: min(1.0, g / 1e15), nonneg=True)
    cert = integrate(f, omega, mu, IntervalFamily(L1D), eps=1e-1)
    assert "non-integrability" in cert.diagnostic
