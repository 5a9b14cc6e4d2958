"""Fixed points, legs, Markov parallelograms, cone fields and the 1D return maps.

The scalar formulas at the top accept floats or ``Interval`` values so the
certifier can reuse them verbatim under interval arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

from .errors import ComplexFixedPoints, LegsUndefined, ZeroVector
from .family import DELTA, Cube, Params, Point3, Vec3
from .interval import Interval, sqrt

# scalar formulas ---------------------------------------------------------


def fixed_y(mu, sign: int):
    """First coordinate of a fixed point: root of r = mu + r^2 (sign -1 gives p, +1 gives q)."""
    root = sqrt(1 - 4 * mu)
    return (1 - root) / 2 if sign < 0 else (1 + root) / 2


def center_z(r, xi):
    """z-coordinate r~ of the fixed point with first coordinate r: r = (1 - xi) r~."""
    return r / (1 - xi)


def leg_outer(mu):
    """|a| = |d| = sqrt(4 - mu): the outer leg endpoint in absolute value."""
    return sqrt(4 - mu)


def leg_inner(mu):
    """|b| = |c| = sqrt(-4 - mu): the inner leg endpoint in absolute value."""
    return sqrt(-4 - mu)


def line_top(y, xi):
    """z on the line whose image under the planar map is z = 22."""
    return (22 - y) / xi


def line_bottom(y, xi):
    """z on the line whose image under the planar map is z = -40."""
    return (-40 - y) / xi


# fixed points ------------------------------------------------------------


@dataclass(frozen=True)
class FixedPointData:
    xi: float
    mu: float
    p_mu: float
    q_mu: float
    p_tilde: float
    q_tilde: float
    lambda_uu_P: float
    lambda_uu_Q: float
    lambda_cu: float
    lambda_s: float
    v_s: Vec3
    v_cu: Vec3
    v_uu_P: Vec3
    v_uu_Q: Vec3

    @property
    def P(self) -> Point3:
        return Point3(self.p_mu, self.p_mu, self.p_tilde)

    @property
    def Q(self) -> Point3:
        return Point3(self.q_mu, self.q_mu, self.q_tilde)

    def r(self, which: str) -> Tuple[float, float]:
        if which == "p":
            return self.p_mu, self.p_tilde
        if which == "q":
            return self.q_mu, self.q_tilde
        raise ValueError(f"which must be 'p' or 'q', got {which!r}")

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = list(v) if isinstance(v, tuple) else v
        return out


def _uu_vector(r: float, xi: float) -> Vec3:
    # eigenvector of [[0,1,0],[0,2r,0],[0,1,xi]] for eigenvalue 2r
    lam = 2.0 * r
    return Vec3(lam - xi, lam * (lam - xi), lam)


def fixed_points(p: Params) -> FixedPointData:
    p.require_unperturbed("fixed_points")
    if 1.0 - 4.0 * p.mu < 0.0:
        raise ComplexFixedPoints(f"1 - 4 mu = {1 - 4 * p.mu!r} < 0")
    pm, qm = fixed_y(p.mu, -1), fixed_y(p.mu, +1)
    return FixedPointData(
        xi=p.xi, mu=p.mu,
        p_mu=pm, q_mu=qm,
        p_tilde=center_z(pm, p.xi), q_tilde=center_z(qm, p.xi),
        lambda_uu_P=2.0 * pm, lambda_uu_Q=2.0 * qm,
        lambda_cu=p.xi, lambda_s=0.0,
        v_s=Vec3(1.0, 0.0, 0.0), v_cu=Vec3(0.0, 0.0, 1.0),
        v_uu_P=_uu_vector(pm, p.xi), v_uu_Q=_uu_vector(qm, p.xi),
    )


def phi(fp: FixedPointData, which: str, z: float) -> float:
    """Center-unstable dynamics along the invariant line through P or Q."""
    r, _ = fp.r(which)
    return fp.xi * z + r


def return_interval(fp: FixedPointData, which: str) -> Tuple[float, float]:
    """[alpha, beta] mapped by phi onto [-40, 22]."""
    r, _ = fp.r(which)
    return (-40.0 - r) / fp.xi, (22.0 - r) / fp.xi


# legs ---------------------------------------------------------------------


@dataclass(frozen=True)
class Legs:
    a_mu: float
    b_mu: float
    c_mu: float
    d_mu: float

    @property
    def I_mu(self) -> Interval:
        return Interval(self.a_mu, self.b_mu)

    @property
    def J_mu(self) -> Interval:
        return Interval(self.c_mu, self.d_mu)

    @property
    def A_block(self) -> Cube:
        return Cube(DELTA.x_range, self.I_mu, DELTA.z_range)

    @property
    def B_block(self) -> Cube:
        return Cube(DELTA.x_range, self.J_mu, DELTA.z_range)

    def leg(self, name: str) -> Interval:
        if name == "A":
            return self.I_mu
        if name == "B":
            return self.J_mu
        raise ValueError(f"leg must be 'A' or 'B', got {name!r}")

    def to_dict(self) -> dict:
        return {"a_mu": self.a_mu, "b_mu": self.b_mu, "c_mu": self.c_mu, "d_mu": self.d_mu}


def legs(p: Params) -> Legs:
    if not p.mu < -4.0:
        raise LegsUndefined(f"mu = {p.mu!r}: legs need mu < -4")
    outer, inner = leg_outer(p.mu), leg_inner(p.mu)
    return Legs(-outer, -inner, inner, outer)


# Markov parallelograms ---------------------------------------------------


@dataclass(frozen=True)
class Parallelogram:
    """Region in the (y, z)-plane over [y_lo, y_hi] between the two bounding lines."""

    y_lo: float
    y_hi: float
    xi: float

    def top(self, y: float) -> float:
        return line_top(y, self.xi)

    def bottom(self, y: float) -> float:
        return line_bottom(y, self.xi)

    def corners(self) -> Dict[str, Tuple[float, float]]:
        return {
            "bottom_left": (self.y_lo, self.bottom(self.y_lo)),
            "top_left": (self.y_lo, self.top(self.y_lo)),
            "top_right": (self.y_hi, self.top(self.y_hi)),
            "bottom_right": (self.y_hi, self.bottom(self.y_hi)),
        }

    def segments(self) -> Dict[str, Tuple[Tuple[float, float], Tuple[float, float]]]:
        c = self.corners()
        return {
            "left": (c["bottom_left"], c["top_left"]),
            "top": (c["top_left"], c["top_right"]),
            "right": (c["top_right"], c["bottom_right"]),
            "bottom": (c["bottom_right"], c["bottom_left"]),
        }

    def contains(self, y: float, z: float) -> bool:
        return self.y_lo <= y <= self.y_hi and self.bottom(y) <= z <= self.top(y)


@dataclass(frozen=True)
class MarkovPartition:
    xi: float
    A_para: Parallelogram
    B_para: Parallelogram

    def line1(self, y: float) -> float:
        return line_top(y, self.xi)

    def line2(self, y: float) -> float:
        return line_bottom(y, self.xi)

    def in_A_slab(self, pt: Sequence[float]) -> bool:
        return DELTA.x_range.lo <= pt[0] <= DELTA.x_range.hi and self.A_para.contains(pt[1], pt[2])

    def in_B_slab(self, pt: Sequence[float]) -> bool:
        return DELTA.x_range.lo <= pt[0] <= DELTA.x_range.hi and self.B_para.contains(pt[1], pt[2])


def markov(p: Params, fp: Optional[FixedPointData] = None) -> MarkovPartition:
    p.require_unperturbed("the Markov partition")
    lg = legs(p)
    return MarkovPartition(
        xi=p.xi,
        A_para=Parallelogram(lg.a_mu, lg.b_mu, p.xi),
        B_para=Parallelogram(lg.c_mu, lg.d_mu, p.xi),
    )


# cones --------------------------------------------------------------------


class ConeSide(str, Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class ConeConfig:
    theta: float = 0.5
    vartheta: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "vartheta", float(self.vartheta))
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if not 0 < self.vartheta < 2 * math.sqrt(5):
            raise ValueError("vartheta must lie in (0, 2*sqrt(5))")

    def to_dict(self) -> dict:
        return {"theta": self.theta, "vartheta": self.vartheta}


def _compare(small: float, big: float) -> ConeSide:
    # inside means small < big; equality within 4 ulp is the boundary
    scale = max(abs(small), abs(big))
    if abs(big - small) <= 4 * math.ulp(scale):
        return ConeSide.BOUNDARY
    return ConeSide.INSIDE if small < big else ConeSide.OUTSIDE


def cone_membership(cfg: ConeConfig, kind: str, v: Sequence[float]) -> ConeSide:
    u, vv, w = (float(c) for c in v)
    if u == 0.0 and vv == 0.0 and w == 0.0:
        raise ZeroVector("cone membership of the zero vector")
    if kind == "s":
        return _compare(math.hypot(vv, w), cfg.vartheta * abs(u))
    if kind == "uu":
        return _compare(math.hypot(u, w), cfg.theta * abs(vv))
    if kind == "u":
        return _compare(abs(u), cfg.theta * math.hypot(vv, w))
    raise ValueError(f"kind must be 's', 'u' or 'uu', got {kind!r}")
