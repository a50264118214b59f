"""Geometry primitives: norms, membership, scaling, starlike validation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morsecover.errors import ContractError, InputError
from morsecover.geometry import (Space, bounding_box, closed_ball,
                                 interior_contains, make_star, morse_closure,
                                 morse_contains, morse_diameter, morse_scale,
                                 norm_eval, open_ball, sample_boundary,
                                 sample_in_set, sample_unit_ball,
                                 segment_interior, star_polytope,
                                 tagged_interval, validate_morse)

L2_2 = Space(2, "l2")


def random_star(rng, space=L2_2):
    points = int(rng.integers(5, 9))
    inner = float(rng.uniform(0.45, 0.7))
    kernel = 0.5 * inner
    center = tuple(rng.uniform(-1.0, 1.0, size=2))
    phase = float(rng.uniform(0, 2 * math.pi))
    return make_star(space, center, kernel, points, 1.0, inner, phase)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("norm,expected", [("linf", 4.0), ("l1", 7.0), ("l2", 5.0)])
def test_norm_eval_examples(norm, expected):
    assert norm_eval(Space(2, norm), (3.0, -4.0)) == pytest.approx(expected)


def test_norm_eval_dimension_mismatch():
    with pytest.raises(InputError):
        norm_eval(L2_2, (1.0, 2.0, 3.0))


def test_weighted_linf():
    sp = Space(2, "wlinf", (2.0, 0.5))
    assert sp.norm_of((1.0, 2.0)) == pytest.approx(2.0)
    assert sp.norm_of((0.1, 4.0)) == pytest.approx(2.0)
    with pytest.raises(InputError):
        Space(2, "wlinf", (1.0, -1.0))


# geometric magnitudes; the naive square sums are not denormal-hardened
coords = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False,
                   allow_subnormal=False).filter(lambda v: v == 0 or abs(v) > 1e-30)


@settings(max_examples=80, deadline=None)
@given(st.tuples(coords, coords), st.tuples(coords, coords),
       st.floats(min_value=-100, max_value=100, allow_nan=False,
                 allow_subnormal=False).filter(lambda v: v == 0 or abs(v) > 1e-30),
       st.sampled_from(["l1", "l2", "linf"]))
def test_norm_axioms(x, y, c, norm):
    sp = Space(2, norm)
    nx, ny = sp.norm_of(x), sp.norm_of(y)
    s = sp.norm_of(tuple(a + b for a, b in zip(x, y)))
    scale = max(1.0, nx + ny)
    assert s <= nx + ny + 1e-12 * scale
    assert sp.norm_of(tuple(c * a for a in x)) == pytest.approx(
        abs(c) * nx, rel=1e-12, abs=1e-30)
    assert nx >= 0.0


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


def test_closed_ball_membership():
    B = closed_ball(L2_2, (0.0, 0.0), 1.0)
    assert morse_contains(B, (1.0, 0.0))
    assert not interior_contains(B, (1.0, 0.0))
    assert interior_contains(B, (0.0, 0.0))


def test_interval_half_open():
    # lower faces excluded, upper included
    I = tagged_interval(L2_2, (0.0, 0.0), (1.0, 1.0), (0.5, 0.5))
    assert not morse_contains(I, (0.0, 0.5))
    assert morse_contains(I, (1.0, 1.0))
    assert morse_contains(I, (0.5, 0.5))
    assert I.tag == (0.5, 0.5)


def test_star_membership_radial_oracle():
    star = make_star(L2_2, (0.0, 0.0), 0.3, points=5, outer=1.0, inner=0.45)
    outer_v = max(star.shape.vertices, key=lambda v: math.hypot(*v))
    assert morse_contains(star, tuple(0.99 * np.asarray(outer_v)))
    assert not morse_contains(star, tuple(1.01 * np.asarray(outer_v)))
    # independent oracle: along each vertex ray the boundary radius is the
    # vertex distance, so scaled vertices classify exactly
    for v in star.shape.vertices:
        assert morse_contains(star, tuple(0.95 * np.asarray(v)))
        assert not interior_contains(star, tuple(1.05 * np.asarray(v)))


def test_interior_star_midpoint():
    star = make_star(L2_2, (0.0, 0.0), 0.3, points=5, outer=1.0, inner=0.5)
    for v in star.shape.vertices:
        mid = tuple(0.5 * c for c in v)
        assert interior_contains(star, mid)


# ---------------------------------------------------------------------------
# interior segments (the cone property)
# ---------------------------------------------------------------------------


def test_segment_interior_examples():
    B = closed_ball(L2_2, (0.0, 0.0), 1.0)
    p = segment_interior(B, (0.0, 0.0), (1.0, 0.0), 0.5)
    assert p == pytest.approx((0.5, 0.0))
    assert segment_interior(B, (0.0, 0.0), (1.0, 0.0), 1.0) == pytest.approx((0.0, 0.0))
    star = make_star(L2_2, (0.0, 0.0), 0.3, points=5, outer=1.0, inner=0.5)
    outer_v = max(star.shape.vertices, key=lambda v: math.hypot(*v))
    q = segment_interior(star, (0.0, 0.0), outer_v, 0.1)
    assert interior_contains(star, q)


def test_segment_interior_contract_violation():
    B = closed_ball(L2_2, (0.0, 0.0), 1.0)
    with pytest.raises(ContractError):
        segment_interior(B, (1.5, 0.0), (0.5, 0.0), 0.5)  # y outside kernel
    with pytest.raises(ContractError):
        segment_interior(B, (0.0, 0.0), (2.0, 0.0), 0.5)  # x outside closure


@pytest.mark.parametrize("shape_kind", ["ball", "interval", "star"])
def test_segment_interior_property(shape_kind):
    # a thousand sampled (y, x, alpha) triples per shape stay interior
    rng = np.random.default_rng(11)
    if shape_kind == "ball":
        S = closed_ball(L2_2, (0.3, -0.2), 1.3)
    elif shape_kind == "interval":
        S = tagged_interval(L2_2, (-0.5, 0.1), (1.4, 2.2), (0.4, 0.3))
    else:
        S = random_star(rng)
    n = 1000
    ys = sample_unit_ball(S.space, n) * (S.inner_radius * 0.999) + np.asarray(S.tag)
    xs = sample_in_set(S, n)
    alphas = rng.uniform(1e-6, 1.0, size=n)
    for k in range(n):
        p = segment_interior(S, tuple(ys[k]), tuple(xs[k]), float(alphas[k]))
        assert interior_contains(S, p)


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------


def test_scale_identity_and_ball():
    B = closed_ball(L2_2, (1.0, 2.0), 2.0)
    assert morse_scale(B, 1.0) is B
    half = morse_scale(B, 0.5)
    assert half.shape.radius == pytest.approx(1.0)
    assert half.shape.center == pytest.approx((1.0, 2.0))
    with pytest.raises(InputError):
        morse_scale(B, 0.0)
    with pytest.raises(InputError):
        morse_scale(B, 1.5)


def test_scale_semigroup_star():
    rng = np.random.default_rng(7)
    for _ in range(20):
        S = random_star(rng)
        a = morse_scale(morse_scale(S, 0.5), 0.5)
        b = morse_scale(S, 0.25)
        assert a.inner_radius == pytest.approx(b.inner_radius, rel=1e-12)
        assert np.allclose(a.shape.vertices, b.shape.vertices, rtol=1e-12, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.05, max_value=1.0),
       st.floats(min_value=0.05, max_value=1.0))
def test_scale_semigroup_interval(p, q):
    if p > q:
        p, q = q, p
    S = tagged_interval(L2_2, (0.0, 0.0), (1.0, 2.0), (0.4, 0.3))
    a = morse_scale(morse_scale(S, q), p / q)
    b = morse_scale(S, p)
    assert np.allclose(a.shape.anchor, b.shape.anchor, rtol=1e-9, atol=1e-12)
    assert np.allclose(a.shape.edges, b.shape.edges, rtol=1e-9, atol=1e-12)


def test_scaled_boundary_inside_bigger_scale():
    # boundary of the p-scaled copy sits strictly inside the q-scaled one
    rng = np.random.default_rng(3)
    for _ in range(15):
        S = random_star(rng)
        p, q = sorted(rng.uniform(0.2, 1.0, size=2))
        if q - p < 0.05:
            q = min(1.0, p + 0.1)
        small, big = morse_scale(S, p), morse_scale(S, q)
        for pt in sample_boundary(small, 64):
            assert interior_contains(big, tuple(pt))


def test_scale_diameter_homogeneous():
    rng = np.random.default_rng(5)
    for _ in range(10):
        S = random_star(rng)
        p = float(rng.uniform(0.1, 1.0))
        assert morse_diameter(morse_scale(S, p)) == pytest.approx(
            p * morse_diameter(S), rel=1e-12)


# ---------------------------------------------------------------------------
# diameters
# ---------------------------------------------------------------------------


def test_diameter_ball_any_norm():
    for norm in ("l1", "l2", "linf"):
        B = closed_ball(Space(2, norm), (0.5, 0.5), 0.7)
        assert morse_diameter(B) == pytest.approx(1.4)


def test_diameter_interval_vertex_oracle():
    S = tagged_interval(L2_2, (0.0, 0.0), (1.0, 2.0), (0.4, 0.3))
    # brute-force oracle over all corner pairs
    corners = [(x, y) for x in (0.0, 1.0) for y in (0.0, 2.0)]
    oracle = max(math.dist(a, b) for a in corners for b in corners)
    assert oracle == pytest.approx(math.sqrt(5.0))
    assert morse_diameter(S) == pytest.approx(oracle)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def test_validate_closed_ball():
    rep = validate_morse(closed_ball(L2_2, (0.0, 0.0), 1.0))
    assert rep.valid
    assert rep.min_lambda == pytest.approx(1.0)


def test_validate_offset_open_ball():
    # offset ratio 1/3 forces the shape factor (1 + 1/3)/(1 - 1/3) = 2
    ob = open_ball(Space(1, "l2"), (0.0,), 1.0, tag=(1.0 / 3.0,))
    rep = validate_morse(ob)
    assert rep.valid
    assert rep.min_lambda == pytest.approx(2.0, rel=1e-9)


def test_validate_rejects_far_vertex():
    lam = 1.5
    angles = np.linspace(0, 2 * math.pi, 12, endpoint=False)
    verts = [(math.cos(a), math.sin(a)) for a in angles]
    verts[3] = (3 * lam * math.cos(angles[3]), 3 * lam * math.sin(angles[3]))
    S = star_polytope(L2_2, (0.0, 0.0), 0.5, verts, lam=lam)
    rep = validate_morse(S)
    assert not rep.valid
    assert rep.min_lambda > lam


def test_degenerate_inputs_rejected():
    with pytest.raises(InputError):
        closed_ball(L2_2, (0.0, 0.0), 0.0)
    with pytest.raises(InputError):
        closed_ball(L2_2, (0.0, 0.0), 1.0, lam=0.5)
    with pytest.raises(InputError):
        star_polytope(L2_2, (0.0, 0.0), 0.3, [])
    with pytest.raises(InputError):
        tagged_interval(L2_2, (0.0, 0.0), (1.0, 1.0), (0.9, 0.9))


def test_closure_is_valid_morse_set():
    ob = open_ball(L2_2, (0.0, 0.0), 1.0, tag=(0.2, 0.0))
    cl = morse_closure(ob)
    assert cl.shape.closed
    assert validate_morse(cl).valid
    rng = np.random.default_rng(9)
    S = random_star(rng)
    assert morse_closure(S) is S
    assert validate_morse(morse_closure(S)).valid


def test_convex_polytope_3d():
    sp3 = Space(3, "l2")
    cube = [(x, y, z) for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    S = star_polytope(sp3, (0.0, 0.0, 0.0), 0.8, cube)
    assert morse_contains(S, (0.9, 0.9, 0.9))
    assert not morse_contains(S, (1.1, 0.0, 0.0))
    assert interior_contains(S, (0.0, 0.0, 0.0))
    assert morse_diameter(S) == pytest.approx(2.0 * math.sqrt(3.0))
    assert validate_morse(S).valid


def test_bounding_box():
    S = tagged_interval(L2_2, (0.0, -1.0), (2.0, 3.0))
    lo, hi = bounding_box(S)
    assert lo == pytest.approx((0.0, -1.0))
    assert hi == pytest.approx((2.0, 2.0))
