import numpy as np
import pytest

from henonblender.errors import DegenerateXi, InvalidXi, PlanarRequiresUnperturbed
from henonblender.family import (
    DELTA,
    Params,
    apply_jacobian,
    eval_box,
    eval_planar,
    evaluate,
)
from henonblender.geometry import fixed_points
from henonblender.interval import IBox

import oracles

P0 = Params(1.185, -9.5)


def test_origin_maps_to_mu():
    assert evaluate(P0, (0, 0, 0)) == (0, -9.5, 0)


def test_direct_substitution():
    x, y, z = evaluate(P0, (1, 2, 3))
    assert (x, y) == (2, -5.5)
    assert z == pytest.approx(5.555, abs=1e-15)


def test_fixed_points_are_fixed():
    fp = fixed_points(P0)
    for R in (fp.P, fp.Q):
        assert np.allclose(evaluate(P0, R), R, rtol=1e-14, atol=1e-13)


def test_first_coordinate_is_old_y():
    rng = np.random.default_rng(1)
    for _ in range(200):
        pt = rng.uniform(-4, 4, 3)
        assert evaluate(Params(1.5, -9, 0.01, -0.02), pt)[0] == pt[1]


def test_jacobian_examples():
    assert apply_jacobian(P0, (0, -3, 0), (0, 1, 0)) == (1, -6, 1)
    assert apply_jacobian(Params(1.3, -8, 0.2, 0.1), (1, 2, 3), (1, 0, 0)) == (0, 0, 0)
    assert apply_jacobian(P0, (0.3, -1.2, 7), (0, 0, 1)) == (0, 0, 1.185)


def test_jacobian_matches_finite_differences():
    assert oracles.jacobian_fd_worst(200, seed=2) < 1e-6


def test_planar_map():
    fp = fixed_points(P0)
    y, z = eval_planar(P0, fp.p_mu, fp.p_tilde)
    assert y == pytest.approx(fp.p_mu, rel=1e-14)
    assert z == pytest.approx(fp.p_tilde, rel=1e-14)
    assert eval_planar(P0, 0, 1) == (-9.5, 1.185)


def test_planar_requires_unperturbed():
    with pytest.raises(PlanarRequiresUnperturbed):
        eval_planar(Params(1.185, -9.5, 0.1, 0), 0, 0)


def test_fixed_line_identities_in_ulps():
    collapse, scaling = oracles.fixed_line_worst_ulps(200, seed=4)
    assert collapse <= 2
    assert scaling <= 4


def test_xi_validation():
    with pytest.raises(DegenerateXi):
        Params(1.0, -9.5)
    with pytest.raises(InvalidXi):
        Params(0.9, -9.5)
    assert issubclass(DegenerateXi, InvalidXi)
    with pytest.raises(ValueError):
        Params(float("nan"), -9.5)


def test_reference_box_membership():
    assert P0.in_reference_box()
    assert not Params(1.2, -9.5).in_reference_box()
    assert not Params(1.185, -9.0).in_reference_box()


def test_eval_box_on_cube():
    img = eval_box(P0.as_box(), DELTA.box)
    assert img[1].lo >= -9.5 - 1e-12
    assert img[1].hi <= 6.5 + 1e-12
    assert img[0] == DELTA.y_range


def test_eval_box_degenerate_reproduces_eval():
    rng = np.random.default_rng(9)
    for _ in range(100):
        pt = rng.uniform(-4, 4, 3)
        img = eval_box(P0.as_box(), IBox.from_point(*pt))
        want = evaluate(P0, pt)
        # ulps are counted at the size of the largest intermediate term
        scale = (abs(pt[1]), abs(P0.mu) + pt[1] ** 2, abs(P0.xi * pt[2]) + abs(pt[1]))
        for i in range(3):
            assert want[i] in img[i]
            assert img[i].width <= 4 * np.spacing(max(scale[i], 1.0))


def test_eval_box_monotone():
    rng = np.random.default_rng(10)
    big = IBox.from_bounds((-2, 2), (-3, 1), (-10, 5))
    img_big = eval_box(P0.as_box(), big)
    for _ in range(100):
        lo = rng.uniform([-2, -3, -10], [2, 1, 5])
        hi = rng.uniform(lo, [2, 1, 5])
        small = IBox.from_bounds(*zip(lo, hi))
        assert eval_box(P0.as_box(), small).subset(img_big)


def test_cube_boundary_decomposition():
    corner = (4.0, -4.0, 22.0)
    assert DELTA.boundary_parts(corner) == {"s", "u", "uu"}
    assert DELTA.boundary_parts((0.0, 4.0, 0.0)) == {"u", "uu"}
    assert DELTA.boundary_parts((0.0, 0.0, -40.0)) == {"u"}
    assert DELTA.boundary_parts((-4.0, 0.0, 0.0)) == {"s"}
    assert DELTA.boundary_parts((0.0, 0.0, 0.0)) == set()
    uu = {tuple(f.dims) for f in DELTA.boundary_uu()}
    u = {tuple(f.dims) for f in DELTA.boundary_u()}
    assert uu <= u
    assert len(DELTA.boundary_s()) + len(DELTA.boundary_u()) == 6
