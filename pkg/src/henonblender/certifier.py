"""Interval predicates for the six blender-horseshoe conditions.

Every sub-check is a scalar formula of the parameters that must be strictly
positive.  The same formula is evaluated in three ways: in binary64 at a
point, with degenerate intervals at a point (rigorous), and over a parameter
box through ``prove_positive``.

Perturbations kappa*y*z + eta*z^2 enter only the second coordinate of the
map.  They are absorbed by replacing mu with the interval mu + E, where E
encloses the perturbation over the cube, and by widening the derivative
bounds by the enclosures of its partial derivatives.  Each occurrence of mu
is then an independent interval variable, which keeps every formula sound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidXi, LegsUndefined, NoPositiveEpsilon
from .family import DELTA, Cube, Params
from .geometry import (
    ConeConfig,
    center_z,
    fixed_y,
    leg_inner,
    leg_outer,
    line_bottom,
    line_top,
)
from .interval import (
    IBox,
    Interval,
    ProverConfig,
    Status,
    Verdict,
    imax,
    merge_all,
    prove_positive,
    sqrt,
)

CONDITIONS = ("BH1", "BH2", "BH3", "BH4", "BH5", "BH6")
IDENTITY_TOL = 1e-9
# bound on |w|/|v| separating the two cases of the cone arguments
W_SPLIT = 6.5


class CheckKind(str, Enum):
    STRICT = "strict"
    IDENTITY = "identity"
    ESTIMATE = "estimate"


# perturbations -----------------------------------------------------------


@dataclass(frozen=True)
class Perturbation:
    """Enclosures over the cube of kappa*y*z + eta*z^2 and its partial derivatives."""

    value: Interval
    d_dy: float
    d_dz: float

    @classmethod
    def none(cls) -> "Perturbation":
        return cls(Interval.point(0.0), 0.0, 0.0)

    @classmethod
    def from_coefficients(cls, kappa, eta, cube: Cube = DELTA) -> "Perturbation":
        k, e = Interval.coerce(kappa), Interval.coerce(eta)
        if k.mag == 0.0 and e.mag == 0.0:
            return cls.none()
        y, z = cube.y_range, cube.z_range
        value = k * (y * z) + e * z.sqr()
        return cls(value, (k * z).mag, (k * y + 2 * e * z).mag)

    @property
    def is_zero(self) -> bool:
        return self.value.mag == 0.0 and self.d_dy == 0.0 and self.d_dz == 0.0

    def to_dict(self) -> dict:
        return {"value": [self.value.lo, self.value.hi], "d_dy": self.d_dy, "d_dz": self.d_dz}


def sensitivities(cube: Cube = DELTA) -> Dict[str, float]:
    """Per-unit-coefficient perturbation bounds over the cube, by interval evaluation."""
    y, z = cube.y_range, cube.z_range
    return {
        "value_kappa": (y * z).mag,
        "value_eta": z.sqr().mag,
        "d_dy_kappa": z.mag,
        "d_dz_kappa": y.mag,
        "d_dz_eta": (2 * z).mag,
    }


# evaluation context ------------------------------------------------------


class Ctx:
    """Parameters for one evaluation; floats or Intervals throughout."""

    def __init__(self, xi, mu, cones: ConeConfig, pert: Perturbation):
        self.xi = xi
        self.mu = mu if pert.is_zero else Interval.coerce(mu) + pert.value
        self.theta = cones.theta
        self.vartheta = cones.vartheta
        self.d_dy = pert.d_dy
        self.d_dz = pert.d_dz
        self.is_interval = isinstance(self.xi, Interval) or isinstance(self.mu, Interval)
        if self.is_interval:
            self.xi = Interval.coerce(self.xi)
            self.mu = Interval.coerce(self.mu)
            self.theta = Interval.point(self.theta)
            self.vartheta = Interval.point(self.vartheta)

    def const(self, text: str):
        return Interval.enclose(text) if self.is_interval else float(text)

    @cached_property
    def outer(self):
        return leg_outer(self.mu)

    @cached_property
    def inner(self):
        return leg_inner(self.mu)

    @cached_property
    def p(self):
        return fixed_y(self.mu, -1)

    @cached_property
    def q(self):
        return fixed_y(self.mu, +1)

    @cached_property
    def pt(self):
        return center_z(self.p, self.xi)

    @cached_property
    def qt(self):
        return center_z(self.q, self.xi)

    def two_y(self, w_ratio):
        """Lower bound of |v1|/|v| on the legs when |w| <= w_ratio |v|."""
        return 2 * self.inner - self.d_dy - w_ratio * self.d_dz


# the checks --------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    condition: str
    formula: Callable[[Ctx], object]
    kind: CheckKind = CheckKind.STRICT
    note: str = ""


def _strict(cond, name, f, note=""):
    return Check(name, cond, f, CheckKind.STRICT, note)


def _identity(cond, name, f, note=""):
    return Check(name, cond, f, CheckKind.IDENTITY, note)


def _bound(cond, name, f, note=""):
    return Check(name, cond, f, CheckKind.ESTIMATE, note)


def _keep_right_of_P(c: Ctx):
    # B-image at y = p of the lowest uu-disc through (p, p~), minus p~
    return (c.xi / 2) * c.p + (1 - c.xi / 2) * sqrt(c.p - c.mu) + (c.xi - 1) * c.pt


def _keep_left_of_Q(c: Ctx):
    # q~ minus the A-image at y = q of the highest uu-disc through (q, q~)
    return -(c.xi / 2) * c.q + (1 - c.xi / 2) * sqrt(c.q - c.mu) - (c.xi - 1) * c.qt


def _omega_spread(c: Ctx):
    return (c.xi / 2 + 1) * abs(c.q + c.outer)


def _case2(c: Ctx):
    # xi^2 - 2 xi / 6.5 - 1, factored so both factors are positive and increasing
    return c.xi * (c.xi - 2 / c.const("6.5")) - 1


def _uu_quadratic(c: Ctx):
    x = c.xi * c.theta
    return 2 - x * (2 + x)


def _s_contraction(c: Ctx):
    frob = 2 + (2 * c.outer + c.d_dy) ** 2 + c.d_dz ** 2 + c.xi ** 2
    return 1 - c.vartheta * sqrt(frob)


CHECKS: Tuple[Check, ...] = (
    # BH1: legs, escape of the gaps, boundary mapping, image containment
    _strict("BH1", "legs_inside_cube", lambda c: 4 - c.outer, "-4 < a and d < 4"),
    _strict("BH1", "legs_nondegenerate", lambda c: c.outer - c.inner, "a < b and c < d"),
    _strict("BH1", "legs_disjoint", lambda c: 2 * c.inner, "b < 0 < c"),
    _strict("BH1", "gap_outer_escape", lambda c: 2 * c.outer,
            "mu+y^2-4 = (|y|-|a|)(|y|+|a|); certified factor |y|+|a| >= 2|a|"),
    _strict("BH1", "gap_middle_escape", lambda c: c.inner,
            "-4-mu-y^2 = (|b|-|y|)(|b|+|y|); certified factor |b|+|y| >= |b|"),
    _strict("BH1", "image_upper_factor", lambda c: c.outer + c.inner,
            "4-mu-y^2 = (|a|-|y|)(|a|+|y|) on the legs; factor >= |a|+|b|"),
    _strict("BH1", "image_lower_factor", lambda c: 2 * c.inner,
            "mu+y^2+4 = (|y|-|b|)(|y|+|b|) on the legs; factor >= 2|b|"),
    _strict("BH1", "image_x_inside", lambda c: 4 - c.outer, "first image coordinate is y"),
    _identity("BH1", "outer_endpoint_maps_to_4", lambda c: c.mu + c.outer ** 2 - 4),
    _identity("BH1", "inner_endpoint_maps_to_minus_4", lambda c: c.mu + c.inner ** 2 + 4),
    # BH2: cone invariance and expansion
    _strict("BH2", "s_cone_escape", lambda c: c.two_y(W_SPLIT) - imax(1.0, c.vartheta),
            "backward invariance of the s-cone, case |w| <= 6.5|v|"),
    _strict("BH2", "wide_w_escape",
            lambda c: W_SPLIT * c.xi - 1 - imax(1.0, c.vartheta, 1 / c.theta),
            "case |w| > 6.5|v| for both the s- and u-cone arguments"),
    _strict("BH2", "s_contraction", _s_contraction, "vectors outside the s-cone contract"),
    _strict("BH2", "u_cone_invariance", lambda c: c.two_y(W_SPLIT) - 1 / c.theta),
    _strict("BH2", "uu_quadratic_bound", _uu_quadratic, "(u1^2+w1^2)/v^2 < 4"),
    _strict("BH2", "uu_leg_dominance", lambda c: c.theta * c.two_y(c.theta) - 2),
    _strict("BH2", "expansion_case1", lambda c: c.two_y(W_SPLIT) ** 2 - 13 * c.xi - 4,
            "|w| <= 6.5|v|"),
    _strict("BH2", "expansion_xi", lambda c: c.xi - 1),
    _strict("BH2", "expansion_case2", _case2, "|w| > 6.5|v|"),
    # BH3: Markov parallelograms
    _strict("BH3", "para_y_inside", lambda c: 4 - c.outer),
    _strict("BH3", "top_below_22_at_a", lambda c: 22 - line_top(-c.outer, c.xi)),
    _strict("BH3", "top_below_22_at_b", lambda c: 22 - line_top(-c.inner, c.xi)),
    _strict("BH3", "top_below_22_at_c", lambda c: 22 - line_top(c.inner, c.xi)),
    _strict("BH3", "top_below_22_at_d", lambda c: 22 - line_top(c.outer, c.xi)),
    _strict("BH3", "bottom_above_minus_40_at_a", lambda c: line_bottom(-c.outer, c.xi) + 40),
    _strict("BH3", "bottom_above_minus_40_at_b", lambda c: line_bottom(-c.inner, c.xi) + 40),
    _strict("BH3", "bottom_above_minus_40_at_c", lambda c: line_bottom(c.inner, c.xi) + 40),
    _strict("BH3", "bottom_above_minus_40_at_d", lambda c: line_bottom(c.outer, c.xi) + 40),
    _strict("BH3", "para_nondegenerate", lambda c: 62 / c.xi),
    _identity("BH3", "top_line_maps_to_22", lambda c: c.xi * line_top(-c.outer, c.xi) - c.outer - 22),
    _identity("BH3", "bottom_line_maps_to_minus_40",
              lambda c: c.xi * line_bottom(c.outer, c.xi) + c.outer + 40),
    # BH4: stable lines through the saddles clear the cube
    _strict("BH4", "L1_below_top", lambda c: 22 - ((4 - c.p) / 2 + c.pt)),
    _strict("BH4", "L2_above_bottom", lambda c: (-4 - c.q) / 2 + c.qt + 40),
    _strict("BH4", "P_below_top", lambda c: 22 - c.pt),
    _strict("BH4", "Q_above_bottom", lambda c: c.qt + 40),
    _bound("BH4", "p_above_-2.7", lambda c: c.p + c.const("2.7")),
    _bound("BH4", "p_below_-2.5", lambda c: -c.const("2.5") - c.p),
    _bound("BH4", "p_tilde_above_13", lambda c: c.pt - 13),
    _bound("BH4", "p_tilde_below_15", lambda c: 15 - c.pt),
    _bound("BH4", "q_above_3.5", lambda c: c.q - c.const("3.5")),
    _bound("BH4", "q_below_3.71", lambda c: c.const("3.71") - c.q),
    _bound("BH4", "q_tilde_above_-20.6", lambda c: c.qt + c.const("20.6")),
    _bound("BH4", "q_tilde_below_-18.4", lambda c: -c.const("18.4") - c.qt),
    # BH5: the return maps and the keep claim
    _strict("BH5", "phi_expanding", lambda c: c.xi - 1),
    _strict("BH5", "P_in_leg_A_left", lambda c: c.p + c.outer),
    _strict("BH5", "P_in_leg_A_right", lambda c: -c.inner - c.p),
    _strict("BH5", "Q_in_leg_B_left", lambda c: c.q - c.inner),
    _strict("BH5", "Q_in_leg_B_right", lambda c: c.outer - c.q),
    _strict("BH5", "keep_preimage_in_J_left", lambda c: sqrt(c.p - c.mu) - c.inner),
    _strict("BH5", "keep_preimage_in_J_right", lambda c: c.outer - sqrt(c.p - c.mu)),
    _strict("BH5", "keep_right_of_P", _keep_right_of_P),
    _strict("BH5", "mirror_preimage_in_I_left", lambda c: c.outer - sqrt(c.q - c.mu),
            "derived by symmetry"),
    _strict("BH5", "mirror_preimage_in_I_right", lambda c: sqrt(c.q - c.mu) - c.inner,
            "derived by symmetry"),
    _strict("BH5", "mirror_keep_left_of_Q", _keep_left_of_Q, "derived by symmetry"),
    _identity("BH5", "phi_p_fixes_p_tilde", lambda c: c.xi * c.pt + c.p - c.pt),
    _identity("BH5", "phi_q_fixes_q_tilde", lambda c: c.xi * c.qt + c.q - c.qt),
    _identity("BH5", "p_is_fixed", lambda c: c.mu + c.p ** 2 - c.p),
    _identity("BH5", "q_is_fixed", lambda c: c.mu + c.q ** 2 - c.q),
    _bound("BH5", "keep_term_xi_p", lambda c: (c.xi / 2) * c.p + c.const("1.6065")),
    _bound("BH5", "keep_term_sqrt", lambda c: (1 - c.xi / 2) * sqrt(c.p - c.mu) - c.const("1.014")),
    _bound("BH5", "keep_term_p_tilde", lambda c: (c.xi - 1) * c.pt - c.const("2.34")),
    # BH6: a disc in between has a leg image in between
    _strict("BH6", "between_gap", lambda c: abs(c.qt - c.pt) - _omega_spread(c)),
    _strict("BH6", "omega_spread_bound", lambda c: c.const("12.16") - _omega_spread(c)),
    _strict("BH6", "stable_separation_bound", lambda c: abs(c.qt - c.pt) - c.const("31.4")),
    _bound("BH6", "stable_separation_upper", lambda c: c.const("35.6") - abs(c.qt - c.pt)),
)


def checks_for(condition: str) -> List[Check]:
    return [c for c in CHECKS if c.condition == condition]


# reports -----------------------------------------------------------------


@dataclass(frozen=True)
class SubCheck:
    name: str
    kind: CheckKind
    verdict: Verdict
    note: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind.value, "note": self.note,
                "verdict": self.verdict.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "SubCheck":
        return cls(d["name"], CheckKind(d["kind"]), Verdict.from_dict(d["verdict"]), d.get("note", ""))


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    sub_checks: Tuple[SubCheck, ...]
    diagnostics: Tuple[SubCheck, ...] = ()
    info: Dict[str, object] = field(default_factory=dict)

    @property
    def overall(self) -> Verdict:
        return merge_all(s.verdict for s in self.sub_checks)

    @property
    def margins(self) -> Dict[str, float]:
        return {s.name: s.verdict.margin for s in self.sub_checks}

    def strict_margins(self) -> Dict[str, float]:
        return {s.name: s.verdict.margin for s in self.sub_checks if s.kind is CheckKind.STRICT}

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "overall": self.overall.to_dict(),
            "sub_checks": [s.to_dict() for s in self.sub_checks],
            "diagnostics": [s.to_dict() for s in self.diagnostics],
            "info": dict(self.info),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionReport":
        return cls(
            d["condition"],
            tuple(SubCheck.from_dict(s) for s in d["sub_checks"]),
            tuple(SubCheck.from_dict(s) for s in d.get("diagnostics", ())),
            dict(d.get("info", {})),
        )


@dataclass(frozen=True)
class CertificationReport:
    mode: str
    params: Dict[str, object]
    cones: ConeConfig
    conditions: Tuple[ConditionReport, ...]

    @property
    def overall(self) -> Verdict:
        return merge_all(c.overall for c in self.conditions)

    def condition(self, name: str) -> ConditionReport:
        for c in self.conditions:
            if c.condition == name:
                return c
        raise KeyError(name)

    def sub_check(self, name: str) -> SubCheck:
        for c in self.conditions:
            for s in c.sub_checks + c.diagnostics:
                if s.name == name:
                    return s
        raise KeyError(name)

    def min_strict_margin(self) -> Tuple[str, float]:
        pairs = [(n, m) for c in self.conditions for n, m in c.strict_margins().items()]
        return min(pairs, key=lambda t: t[1])


# evaluation --------------------------------------------------------------


def _check_precondition(xi_lo: float, mu_hi: float) -> None:
    if not xi_lo > 1.0:
        raise InvalidXi(f"xi = {xi_lo!r} must exceed 1")
    if not mu_hi < -4.0:
        raise LegsUndefined(f"mu = {mu_hi!r}: legs need mu < -4")


def _identity_verdict(values, witnesses) -> Verdict:
    worst, worst_at = -1.0, None
    for v, w in zip(values, witnesses):
        r = v.mag if isinstance(v, Interval) else abs(v)
        if math.isnan(r):
            r = math.inf
        if r > worst:
            worst, worst_at = r, w
    margin = IDENTITY_TOL - worst
    if margin > 0:
        return Verdict(Status.PASS, margin, boxes_examined=len(values))
    return Verdict(Status.FAIL, margin, boxes_examined=len(values), witness=worst_at)


def _eval_point(check: Check, xi: float, mu: float, cones, pert, rigorous: bool) -> Verdict:
    if rigorous or not pert.is_zero:
        ctx = Ctx(Interval.point(xi), Interval.point(mu), cones, pert)
    else:
        ctx = Ctx(xi, mu, cones, pert)
    try:
        value = check.formula(ctx)
    except ArithmeticError:
        return Verdict(Status.UNKNOWN, -math.inf)
    if check.kind is CheckKind.IDENTITY:
        return _identity_verdict([value], [(xi, mu)])
    if isinstance(value, Interval):
        return Verdict.from_value(value, (xi, mu))
    value = float(value)
    if value > 0:
        return Verdict(Status.PASS, value)
    return Verdict(Status.FAIL, value, witness=(xi, mu))


def _eval_box(check: Check, box: IBox, cones, pert, prover: ProverConfig) -> Verdict:
    if check.kind is CheckKind.IDENTITY:
        xs = sorted({box[0].lo, box[0].mid, box[0].hi})
        ms = sorted({box[1].lo, box[1].mid, box[1].hi})
        pts = [(x, m) for x in xs for m in ms]
        vals = [check.formula(Ctx(Interval.point(x), Interval.point(m), cones, pert)) for x, m in pts]
        return _identity_verdict(vals, pts)
    return prove_positive(lambda b: check.formula(Ctx(b[0], b[1], cones, pert)), box, prover)


def expansion_estimate(p: Params, cones: ConeConfig = ConeConfig(), n: int = 64) -> Dict[str, object]:
    """Sampled infimum c0 of |DG v|_* / |v|_* over u-cone vectors at leg points.

    |(u, v, w)|_* = max(|u|, sqrt(v^2 + w^2)).  Informational only: the BH2
    verdict rests on the certified inequalities.
    """
    outer, inner = math.sqrt(4 - p.mu), math.sqrt(-4 - p.mu)
    half = n // 2
    ys = np.concatenate([np.linspace(-outer, -inner, half), np.linspace(inner, outer, n - half)])
    zs = np.linspace(DELTA.z_range.lo, DELTA.z_range.hi, n)
    ang = 2 * np.pi * (np.arange(n) + 0.5) / n
    frac = -1 + (2 * np.arange(n) + 1) / n
    y = ys[:, None, None]
    z = zs[:, None, None]
    v = np.cos(ang)[None, :, None]
    w = np.sin(ang)[None, :, None]
    u = cones.theta * frac[None, None, :] * np.ones_like(v)
    v1 = (2 * y + p.kappa * z) * v + (p.kappa * y + 2 * p.eta * z) * w
    w1 = v + p.xi * w
    u1 = v
    norm0 = np.maximum(np.abs(u), np.hypot(v, w))
    norm1 = np.maximum(np.abs(u1), np.hypot(v1, w1))
    c0 = float(np.min(norm1 / norm0))
    equiv = math.sqrt(2.0)
    ell = math.ceil(math.log(equiv) / math.log(c0)) if c0 > 1 else None
    return {"c0": c0, "norm_equivalence": equiv, "ell": ell, "samples": n ** 3}


def _report(mode, params, cones, verdicts: Dict[Check, Verdict], info) -> CertificationReport:
    conds = []
    for cond in CONDITIONS:
        subs, diags = [], []
        for chk in checks_for(cond):
            if chk not in verdicts:
                continue
            sc = SubCheck(chk.name, chk.kind, verdicts[chk], chk.note)
            (diags if chk.kind is CheckKind.ESTIMATE else subs).append(sc)
        conds.append(ConditionReport(cond, tuple(subs), tuple(diags), dict(info.get(cond, {}))))
    return CertificationReport(mode, params, cones, tuple(conds))


def _point_info(p: Params, cones: ConeConfig, sample_expansion: bool) -> Dict[str, dict]:
    info: Dict[str, dict] = {}
    if sample_expansion:
        info["BH2"] = expansion_estimate(p, cones)
    if p.unperturbed:
        outer = math.sqrt(4 - p.mu)
        q = fixed_y(p.mu, +1)
        info["BH6"] = {"omega_spread": (p.xi / 2 + 1) * (q + outer)}
    return info


def certify_point(p: Params, cones: ConeConfig = ConeConfig(), rigorous: bool = True,
                  sample_expansion: bool = True, include_identities: bool = True,
                  include_diagnostics: bool = True) -> CertificationReport:
    """Run every sub-check at a single parameter point."""
    _check_precondition(p.xi, p.mu)
    pert = Perturbation.from_coefficients(p.kappa, p.eta)
    verdicts = {}
    for chk in CHECKS:
        if chk.kind is CheckKind.IDENTITY and (not include_identities or not pert.is_zero):
            continue
        if chk.kind is CheckKind.ESTIMATE and (not include_diagnostics or not pert.is_zero):
            continue
        verdicts[chk] = _eval_point(chk, p.xi, p.mu, cones, pert, rigorous)
    params = {"xi": p.xi, "mu": p.mu, "kappa": p.kappa, "eta": p.eta}
    mode = "point_rigorous" if rigorous or not pert.is_zero else "point_float"
    return _report(mode, params, cones, verdicts, _point_info(p, cones, sample_expansion))


def certify_box(box: IBox, cones: ConeConfig = ConeConfig(),
                prover: ProverConfig = ProverConfig(), kappa=0.0, eta=0.0,
                sample_expansion: bool = True, include_identities: bool = True,
                include_diagnostics: bool = True) -> CertificationReport:
    """Run every sub-check over the (xi, mu) box ``box[0] x box[1]``.

    ``box`` may carry kappa and eta as third and fourth dimensions; they
    override the keyword arguments and may be intervals.
    """
    if len(box) not in (2, 4):
        raise ValueError("parameter boxes have 2 or 4 dimensions")
    if len(box) == 4:
        kappa, eta = box[2], box[3]
    xi_box, mu_box = box[0], box[1]
    _check_precondition(xi_box.lo, mu_box.hi)
    pbox = IBox((xi_box, mu_box))
    pert = Perturbation.from_coefficients(kappa, eta)
    verdicts = {}
    for chk in CHECKS:
        if chk.kind is CheckKind.IDENTITY and (not include_identities or not pert.is_zero):
            continue
        if chk.kind is CheckKind.ESTIMATE and (not include_diagnostics or not pert.is_zero):
            continue
        verdicts[chk] = _eval_box(chk, pbox, cones, pert, prover)
    info: Dict[str, dict] = {}
    if sample_expansion:
        k = Interval.coerce(kappa)
        e = Interval.coerce(eta)
        est = [expansion_estimate(Params(x, m, k.mid, e.mid), cones)
               for x, m in pbox.corners() + [pbox.midpoint]]
        worst = min(est, key=lambda d: d["c0"])
        info["BH2"] = dict(worst, points=len(est))
    ki, ei = Interval.coerce(kappa), Interval.coerce(eta)
    params = {"xi": [xi_box.lo, xi_box.hi], "mu": [mu_box.lo, mu_box.hi],
              "kappa": [ki.lo, ki.hi], "eta": [ei.lo, ei.hi]}
    return _report("box", params, cones, verdicts, info)


# epsilon -----------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonCertificate:
    epsilon: float
    epsilon_checked: float
    binding_check: str
    m_star: float
    sensitivities: Dict[str, float]
    perturbation_bound_formula: str
    corner_status: Tuple[Tuple[float, float, str], ...]
    square_status: str
    attempts: int

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "epsilon_checked": self.epsilon_checked,
            "binding_check": self.binding_check,
            "m_star": self.m_star,
            "sensitivities": dict(self.sensitivities),
            "perturbation_bound_formula": self.perturbation_bound_formula,
            "corner_status": [list(c) for c in self.corner_status],
            "square_status": self.square_status,
            "attempts": self.attempts,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EpsilonCertificate":
        return cls(
            epsilon=d["epsilon"], epsilon_checked=d["epsilon_checked"],
            binding_check=d["binding_check"], m_star=d["m_star"],
            sensitivities=dict(d["sensitivities"]),
            perturbation_bound_formula=d["perturbation_bound_formula"],
            corner_status=tuple(tuple(c) for c in d["corner_status"]),
            square_status=d["square_status"], attempts=d["attempts"],
        )


def certify_epsilon(box: IBox, cones: ConeConfig = ConeConfig(),
                    prover: ProverConfig = ProverConfig(), max_halvings: int = 20,
                    shrink: float = 0.9) -> EpsilonCertificate:
    """Certified radius for |kappa|, |eta| < epsilon over the (xi, mu) box."""
    base = certify_box(IBox(box.dims[:2]), cones, prover, sample_expansion=False,
                       include_diagnostics=False)
    if not base.overall.passed:
        raise NoPositiveEpsilon(f"unperturbed box does not certify: {base.overall.status.value}")
    binding, m_star = base.min_strict_margin()
    sens = sensitivities()
    total = sens["value_kappa"] + sens["value_eta"]
    if not m_star > 0:
        raise NoPositiveEpsilon("minimum margin is not positive")
    formula = (f"sup |kappa*y*z + eta*z^2| <= {sens['value_kappa']:g}|kappa| + "
               f"{sens['value_eta']:g}|eta|; derivative terms <= {sens['d_dy_kappa']:g}|kappa| "
               f"(d/dy), {sens['d_dz_kappa']:g}|kappa| + {sens['d_dz_eta']:g}|eta| (d/dz)")
    eps = m_star / total
    pbox = IBox(box.dims[:2])
    for attempt in range(1, max_halvings + 1):
        e = eps * shrink
        corners = []
        ok = True
        for sk, se in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            rep = certify_box(pbox, cones, prover, kappa=sk * e, eta=se * e,
                              sample_expansion=False, include_identities=False,
                              include_diagnostics=False)
            st = rep.overall.status.value
            corners.append((sk * e, se * e, st))
            ok = ok and st == "PASS"
        square = "SKIPPED"
        if ok:
            rep = certify_box(pbox, cones, prover, kappa=Interval(-e, e), eta=Interval(-e, e),
                              sample_expansion=False, include_identities=False,
                              include_diagnostics=False)
            square = rep.overall.status.value
            ok = square == "PASS"
        if ok:
            return EpsilonCertificate(eps, e, binding, m_star, sens, formula,
                                      tuple(corners), square, attempt)
        eps /= 2
    raise NoPositiveEpsilon(f"no radius certified after {max_halvings} halvings")


def sample_cone_expansion(p: Params, cones: ConeConfig = ConeConfig(), trials: int = 10_000,
                          seed: int = 0) -> Dict[str, object]:
    """Random u-cone vectors at random leg points; counts |DG v|_* <= |v|_*."""
    rng = np.random.default_rng(seed)
    outer, inner = math.sqrt(4 - p.mu), math.sqrt(-4 - p.mu)
    y = rng.uniform(inner, outer, trials) * rng.choice([-1.0, 1.0], trials)
    z = rng.uniform(DELTA.z_range.lo, DELTA.z_range.hi, trials)
    ang = rng.uniform(0, 2 * np.pi, trials)
    v, w = np.cos(ang), np.sin(ang)
    u = cones.theta * rng.uniform(-1, 1, trials) * np.hypot(v, w)
    v1 = (2 * y + p.kappa * z) * v + (p.kappa * y + 2 * p.eta * z) * w
    w1 = v + p.xi * w
    ratio = np.maximum(np.abs(v), np.hypot(v1, w1)) / np.maximum(np.abs(u), np.hypot(v, w))
    return {"trials": trials, "seed": seed, "violations": int(np.sum(ratio <= 1)),
            "min_ratio": float(np.min(ratio))}
