import math
import random

import mpmath
import numpy as np
import pytest

from henonblender.errors import LegsUndefined, PlanarRequiresUnperturbed, ZeroVector
from henonblender.family import Params, evaluate, jacobian, matvec
from henonblender.geometry import (
    ConeConfig,
    ConeSide,
    cone_membership,
    fixed_points,
    legs,
    markov,
    phi,
    return_interval,
)

import oracles

P0 = Params(1.185, -9.5)


def _close(x, ref, rel=1e-12):
    return abs(x - float(ref)) <= rel * max(1.0, abs(float(ref)))


def test_fixed_points_against_oracle():
    fp = fixed_points(P0)
    p, q, pt, qt = oracles.mp_fixed(1.185, -9.5)
    assert _close(fp.p_mu, p) and _close(fp.q_mu, q)
    assert _close(fp.p_tilde, pt) and _close(fp.q_tilde, qt)
    assert fp.p_mu == pytest.approx(-2.622499, abs=1e-6)
    assert fp.q_mu == pytest.approx(3.622499, abs=1e-6)
    assert fp.p_tilde == pytest.approx(14.17567, abs=1e-5)
    assert fp.q_tilde == pytest.approx(-19.58107, abs=1e-5)


def test_strong_unstable_eigenvalue_at_P():
    fp = fixed_points(P0)
    assert fp.lambda_uu_P == pytest.approx(-5.244998, abs=1e-6)
    assert abs(fp.lambda_uu_P) > 5


def test_eigen_residuals():
    fp = fixed_points(P0)
    for R, lam, v in ((fp.P, fp.lambda_uu_P, fp.v_uu_P), (fp.Q, fp.lambda_uu_Q, fp.v_uu_Q),
                      (fp.P, fp.lambda_cu, fp.v_cu), (fp.P, fp.lambda_s, fp.v_s)):
        Jv = matvec(jacobian(P0, R), v)
        assert max(abs(Jv[i] - lam * v[i]) for i in range(3)) < 1e-9


def test_characteristic_polynomial_roots():
    for xi, mu in oracles.random_params(random.Random(1), 50):
        p = Params(xi, mu)
        fp = fixed_points(p)
        for R, r in ((fp.P, fp.p_mu), (fp.Q, fp.q_mu)):
            eig = sorted(np.linalg.eigvals(np.array(jacobian(p, R))).real)
            want = sorted([0.0, xi, 2 * r])
            assert np.allclose(eig, want, atol=1e-9)


def test_invariants_over_reference_box():
    rng = random.Random(2)
    for xi, mu in oracles.random_params(rng, 1000):
        p = Params(xi, mu)
        fp = fixed_points(p)
        for r, rt in ((fp.p_mu, fp.p_tilde), (fp.q_mu, fp.q_tilde)):
            assert abs(mu + r * r - r) <= 1e-12 * max(1, abs(r))
            assert abs((1 - xi) * rt - r) <= 1e-12 * max(1, abs(r))
        assert abs(math.sqrt(fp.p_mu - mu) + fp.p_mu) <= 1e-12 * abs(fp.p_mu)
        lg = legs(p)
        assert lg.a_mu == -lg.d_mu and lg.b_mu == -lg.c_mu
        for y in (lg.a_mu, lg.d_mu):
            assert abs(mu + y * y - 4) <= 1e-12 * abs(mu)
        for y in (lg.b_mu, lg.c_mu):
            assert abs(mu + y * y + 4) <= 1e-12 * abs(mu)
        assert -4 < lg.a_mu < lg.b_mu < 0 < lg.c_mu < lg.d_mu < 4
        assert lg.a_mu < fp.p_mu < lg.b_mu
        assert lg.c_mu < fp.q_mu < lg.d_mu
        assert -40 < fp.q_tilde < fp.p_tilde < 22


def test_legs_against_oracle():
    lg = legs(P0)
    a, b, c, d = oracles.mp_legs(-9.5)
    for got, want in zip((lg.a_mu, lg.b_mu, lg.c_mu, lg.d_mu), (a, b, c, d)):
        assert _close(got, want)
    assert lg.a_mu == pytest.approx(-3.674235, abs=1e-6)
    assert lg.b_mu == pytest.approx(-2.345208, abs=1e-6)
    assert -math.sqrt(14) < lg.a_mu < -math.sqrt(13)
    assert -math.sqrt(6) < lg.b_mu < -math.sqrt(5)


def test_legs_need_mu_below_minus_4():
    with pytest.raises(LegsUndefined):
        legs(Params(1.185, -3))
    with pytest.raises(LegsUndefined):
        legs(Params(1.185, -4))


def test_fixed_points_reject_perturbation():
    with pytest.raises(PlanarRequiresUnperturbed):
        fixed_points(Params(1.185, -9.5, 0.01, 0))


def test_phi_fixed_point_and_return_interval():
    fp = fixed_points(P0)
    assert abs(phi(fp, "p", fp.p_tilde) - fp.p_tilde) < 1e-12
    assert abs(phi(fp, "q", fp.q_tilde) - fp.q_tilde) < 1e-12
    assert phi(fp, "p", 0.0) == pytest.approx(-2.622499, abs=1e-6)
    for which in ("p", "q"):
        a, b = return_interval(fp, which)
        assert abs(phi(fp, which, a) + 40) < 1e-10
        assert abs(phi(fp, which, b) - 22) < 1e-10


def test_parallelogram_corners_map_to_rectangle_corners():
    rng = random.Random(3)
    for xi, mu in oracles.random_params(rng, 200):
        p = Params(xi, mu)
        mk = markov(p)
        for para in (mk.A_para, mk.B_para):
            for (y, z) in para.corners().values():
                _, y1, z1 = evaluate(p, (0.0, y, z))
                assert min(abs(y1 - 4), abs(y1 + 4)) < 1e-10
                assert min(abs(z1 - 22), abs(z1 + 40)) < 1e-10


def test_boundary_lines_map_to_cube_faces():
    mk = markov(P0)
    for y in np.linspace(-4, 4, 17):
        assert abs(1.185 * mk.line1(y) + y - 22) < 1e-10
        assert abs(1.185 * mk.line2(y) + y + 40) < 1e-10


def test_parallelograms_inside_their_legs():
    rng = random.Random(4)
    for xi, mu in oracles.random_params(rng, 200):
        p = Params(xi, mu)
        mk, lg = markov(p), legs(p)
        assert (mk.A_para.y_lo, mk.A_para.y_hi) == (lg.a_mu, lg.b_mu)
        assert (mk.B_para.y_lo, mk.B_para.y_hi) == (lg.c_mu, lg.d_mu)
        for para in (mk.A_para, mk.B_para):
            for (_, z) in para.corners().values():
                assert -40 < z < 22
        fp = fixed_points(p)
        assert mk.in_A_slab(fp.P) and mk.in_B_slab(fp.Q)
        assert not mk.in_A_slab(fp.Q)


def test_cone_examples():
    cfg = ConeConfig()
    assert cone_membership(cfg, "uu", (0, 1, 0)) is ConeSide.INSIDE
    assert cone_membership(cfg, "uu", (1, -6, 1)) is ConeSide.INSIDE
    assert cone_membership(cfg, "s", (0, 1, 0)) is ConeSide.OUTSIDE
    assert cone_membership(cfg, "s", (1, 0, 0)) is ConeSide.INSIDE
    assert cone_membership(cfg, "u", (0, 0, 1)) is ConeSide.INSIDE
    assert cone_membership(cfg, "u", (1, 2, 0)) is ConeSide.BOUNDARY


def test_cone_rejects_zero_vector_and_bad_apertures():
    with pytest.raises(ZeroVector):
        cone_membership(ConeConfig(), "u", (0, 0, 0))
    with pytest.raises(ValueError):
        ConeConfig(theta=0.0)
    with pytest.raises(ValueError):
        ConeConfig(vartheta=5.0)


def test_uu_cone_forward_invariant_on_legs():
    rng = np.random.default_rng(5)
    cfg = ConeConfig()
    lg = legs(P0)
    for _ in range(2000):
        y = rng.uniform(lg.c_mu, lg.d_mu) * rng.choice([-1, 1])
        pt = (rng.uniform(-4, 4), y, rng.uniform(-40, 22))
        v = rng.uniform(-1, 1, 3)
        v[1] = rng.choice([-1, 1]) * (math.hypot(v[0], v[2]) / 0.5 + rng.uniform(0.01, 1))
        assert cone_membership(cfg, "uu", v) is ConeSide.INSIDE
        assert cone_membership(cfg, "uu", matvec(jacobian(P0, pt), v)) is ConeSide.INSIDE


def test_oracle_satisfies_fixed_point_identity():
    mpmath.mp.dps = 50
    p, _, _, _ = oracles.mp_fixed(1.185, -9.5)
    assert abs(p + mpmath.sqrt(p - mpmath.mpf(-9.5))) < mpmath.mpf(10) ** -40
