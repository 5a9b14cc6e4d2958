import random

import pytest

from henonblender.certifier import (
    CONDITIONS,
    CertificationReport,
    CheckKind,
    ConditionReport,
    certify_box,
    certify_epsilon,
    certify_point,
    expansion_estimate,
    sample_cone_expansion,
    sensitivities,
)
from henonblender.errors import InvalidXi, LegsUndefined
from henonblender.family import Params
from henonblender.geometry import ConeConfig
from henonblender.interval import IBox, ProverConfig, Status

import oracles

P0 = Params(1.185, -9.5)
REF_BOX = IBox.from_bounds(oracles.BOX_XI, oracles.BOX_MU)


@pytest.fixture(scope="module")
def point_report():
    return certify_point(P0)


@pytest.fixture(scope="module")
def box_report():
    return certify_box(REF_BOX, prover=ProverConfig(max_depth=16))


@pytest.fixture(scope="module")
def epsilon_cert():
    return certify_epsilon(REF_BOX)


def test_point_passes_every_condition(point_report):
    assert point_report.overall.status is Status.PASS
    assert [c.condition for c in point_report.conditions] == list(CONDITIONS)
    for c in point_report.conditions:
        assert c.overall.status is Status.PASS


@pytest.mark.parametrize("name, value, tol", [
    ("top_below_22_at_a", 22 - (22 + 3.674235) / 1.185, 1e-5),
    ("bottom_above_minus_40_at_d", (-40 - 3.674235) / 1.185 + 40, 1e-5),
    ("L1_below_top", 22 - 17.487, 1e-3),
    ("L2_above_bottom", -23.392 + 40, 1e-3),
    ("keep_right_of_P", 2.1373, 1e-4),
    ("stable_separation_bound", 33.757 - 31.4, 1e-3),
    ("omega_spread_bound", 12.16 - 11.620, 1e-3),
    ("between_gap", 22.14, 1e-2),
])
def test_point_margins_match_hand_values(point_report, name, value, tol):
    assert point_report.sub_check(name).verdict.margin == pytest.approx(value, abs=tol)


def test_point_margins_above_one_hundredth(point_report):
    for c in point_report.conditions:
        for s in c.sub_checks:
            if s.kind is CheckKind.STRICT:
                assert s.verdict.margin > 1e-2, s.name


def test_identities_pass_at_point(point_report):
    for name in ("outer_endpoint_maps_to_4", "inner_endpoint_maps_to_minus_4",
                 "top_line_maps_to_22", "bottom_line_maps_to_minus_40",
                 "phi_p_fixes_p_tilde", "phi_q_fixes_q_tilde", "p_is_fixed", "q_is_fixed"):
        assert point_report.sub_check(name).verdict.status is Status.PASS


def test_float_and_rigorous_point_agree():
    fl = certify_point(P0, rigorous=False, sample_expansion=False)
    rg = certify_point(P0, rigorous=True, sample_expansion=False)
    for c_f, c_r in zip(fl.conditions, rg.conditions):
        for s_f, s_r in zip(c_f.sub_checks, c_r.sub_checks):
            assert s_f.verdict.status == s_r.verdict.status
            if s_f.kind is CheckKind.STRICT:
                assert s_r.verdict.margin <= s_f.verdict.margin
                assert s_f.verdict.margin - s_r.verdict.margin < 1e-12 * max(1, abs(s_f.verdict.margin))


def test_box_passes_with_expansion_margins(box_report):
    assert box_report.overall.status is Status.PASS
    assert box_report.overall.max_depth_reached <= 16
    # the infimum 0.53 is attained at xi = 1.19, so a sound bound sits just below it
    assert box_report.sub_check("expansion_case1").verdict.margin >= 0.53 - 1e-12
    assert box_report.sub_check("expansion_case2").verdict.margin >= 0.0292
    assert box_report.sub_check("uu_quadratic_bound").verdict.margin >= 0.455
    assert box_report.min_strict_margin()[0] == "expansion_case2"


def test_box_margins_never_exceed_midpoint_values(box_report):
    mid = certify_point(Params(*REF_BOX.midpoint), rigorous=False, sample_expansion=False)
    for c in box_report.conditions:
        for s in c.sub_checks:
            if s.kind is CheckKind.STRICT:
                assert s.verdict.margin <= mid.sub_check(s.name).verdict.margin


def test_box_pass_implies_point_pass_on_samples(box_report):
    assert box_report.overall.passed
    rng = random.Random(12)
    for xi, mu in oracles.random_params(rng, 1000):
        rep = certify_point(Params(xi, mu), rigorous=False, sample_expansion=False,
                            include_diagnostics=False)
        assert rep.overall.passed, (xi, mu)


def test_estimate_diagnostics_are_outside_the_verdict(box_report):
    failing = {s.name for c in box_report.conditions for s in c.diagnostics
               if s.verdict.status is Status.FAIL}
    assert failing == {"p_above_-2.7", "p_tilde_below_15", "keep_term_xi_p"}
    assert box_report.overall.passed


def test_fail_verdicts_carry_reproducible_witnesses():
    rep = certify_box(IBox.from_bounds((1.18, 1.19), (-4.5, -4.1)),
                      sample_expansion=False, include_diagnostics=False)
    assert rep.overall.status is Status.FAIL
    fails = [s for c in rep.conditions for s in c.sub_checks if s.verdict.status is Status.FAIL]
    assert fails
    for s in fails:
        xi, mu = s.verdict.witness
        again = certify_point(Params(xi, mu), rigorous=False, sample_expansion=False)
        assert again.sub_check(s.name).verdict.margin < 0


def test_shallow_box_is_unknown_not_fail():
    rep = certify_box(REF_BOX, prover=ProverConfig(max_depth=0), sample_expansion=False)
    assert rep.overall.status is Status.UNKNOWN


def test_preconditions():
    with pytest.raises(InvalidXi):
        certify_point(Params(0.9, -9.5))
    with pytest.raises(InvalidXi):
        certify_box(IBox.from_bounds((1.0, 1.2), (-10.0, -9.0)))
    with pytest.raises(LegsUndefined):
        certify_point(Params(1.185, -3.0))
    with pytest.raises(LegsUndefined):
        certify_box(IBox.from_bounds((1.18, 1.19), (-5.0, -3.0)))


def test_sensitivities_cover_cube_sup():
    s = sensitivities()
    assert s["value_kappa"] >= 160 and s["value_eta"] >= 1600
    assert s["d_dy_kappa"] >= 40 and s["d_dz_eta"] >= 80


def test_epsilon_is_positive_and_rechecked(epsilon_cert):
    e = epsilon_cert
    assert e.epsilon >= 1e-5
    assert e.epsilon_checked == pytest.approx(0.9 * e.epsilon)
    assert e.binding_check == "expansion_case2"
    assert all(st == "PASS" for _, _, st in e.corner_status)
    assert {(k > 0, h > 0) for k, h, _ in e.corner_status} == {(True, True), (True, False),
                                                              (False, True), (False, False)}
    assert e.square_status == "PASS"


def test_perturbed_point_inside_epsilon_passes(epsilon_cert):
    e = epsilon_cert.epsilon
    rep = certify_point(Params(1.185, -9.5, e / 2, -e / 2), sample_expansion=False)
    assert rep.overall.passed


def test_epsilon_does_not_shrink_on_sub_box(epsilon_cert):
    sub = IBox.from_bounds((1.185, 1.19), (-10.0, -9.5))
    assert certify_epsilon(sub).epsilon >= epsilon_cert.epsilon


def test_large_perturbation_is_not_certified():
    rep = certify_box(REF_BOX, kappa=0.01, eta=0.01, sample_expansion=False)
    assert not rep.overall.passed


def test_cone_sampling_has_no_violations():
    out = sample_cone_expansion(P0, ConeConfig(), trials=10_000, seed=0)
    assert out["violations"] == 0
    assert out["min_ratio"] > 1


def test_expansion_estimate_gives_constants():
    est = expansion_estimate(P0)
    assert est["c0"] > 1
    assert est["norm_equivalence"] <= est["c0"] ** est["ell"]


def test_report_round_trip(point_report):
    for c in point_report.conditions:
        again = ConditionReport.from_dict(c.to_dict())
        assert again.to_dict() == c.to_dict()
    assert isinstance(point_report, CertificationReport)
