"""uu-discs and u-strips: leg-wise iteration, betweenness, and the two blender experiments.

A disc is a polyline parameterised by y on a grid running from -4 to 4.  The
unperturbed map restricted to a leg inverts in closed form
(y = -sqrt(y' - mu) on leg A, +sqrt(y' - mu) on leg B), so an image disc is
sampled directly on a uniform y'-grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .errors import ConeViolationAfterIteration, NoLegInBetween, NotInBetween
from .family import DELTA, Params, Point3
from .geometry import FixedPointData, fixed_points, legs

DEFAULT_NODES = 1024
MAX_NODES = 2 ** 16
ON_TOL = 1e-9
LEG_SIGN = {"A": -1, "B": +1}


@dataclass(frozen=True, eq=False)
class UUDisc:
    y: np.ndarray
    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        arrs = []
        for name in ("y", "x", "z"):
            a = np.array(getattr(self, name), dtype=float)
            if a.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
            arrs.append(a)
        y = arrs[0]
        if not (len(y) == len(arrs[1]) == len(arrs[2]) >= 2):
            raise ValueError("y, x, z need equal length >= 2")
        if y[0] != DELTA.y_range.lo or y[-1] != DELTA.y_range.hi:
            raise ValueError("disc endpoints must be exactly y = -4 and y = 4")
        if not np.all(np.diff(y) > 0):
            raise ValueError("y must be strictly increasing")
        if not all(np.all(np.isfinite(a)) for a in arrs):
            raise ValueError("disc nodes must be finite")

    @classmethod
    def flat(cls, z0: float, n: int = DEFAULT_NODES, x0: float = 0.0) -> "UUDisc":
        y = np.linspace(DELTA.y_range.lo, DELTA.y_range.hi, n)
        return cls(y, np.full(n, x0), np.full(n, float(z0)))

    @classmethod
    def from_function(cls, zfun, n: int = DEFAULT_NODES, xfun=None) -> "UUDisc":
        y = np.linspace(DELTA.y_range.lo, DELTA.y_range.hi, n)
        x = np.zeros(n) if xfun is None else np.asarray(xfun(y), dtype=float)
        return cls(y, x, np.asarray(zfun(y), dtype=float))

    def __len__(self) -> int:
        return len(self.y)

    def segment_slack(self, theta: float = 0.5) -> np.ndarray:
        """theta*dy - sqrt(dx^2 + dz^2) per segment; positive inside the uu-cone."""
        return theta * np.diff(self.y) - np.hypot(np.diff(self.x), np.diff(self.z))

    def cone_slack(self, theta: float = 0.5) -> float:
        return float(np.min(self.segment_slack(theta)))

    def is_valid(self, theta: float = 0.5) -> bool:
        return self.cone_slack(theta) > 0

    def at(self, y) -> Tuple[np.ndarray, np.ndarray]:
        """(x, z) by linear interpolation at y."""
        return np.interp(y, self.y, self.x), np.interp(y, self.y, self.z)

    def refine(self, n: int) -> "UUDisc":
        y = np.linspace(DELTA.y_range.lo, DELTA.y_range.hi, n)
        x, z = self.at(y)
        return UUDisc(y, x, z)

    def nodes(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.y.tolist(), self.x.tolist(), self.z.tolist()))


# classification ------------------------------------------------------------


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    ON = "on"


@dataclass(frozen=True)
class Betweenness:
    z_at_p: float
    z_at_q: float
    side_p: Side
    side_q: Side

    @property
    def in_between(self) -> bool:
        return self.side_p is Side.LEFT and self.side_q is Side.RIGHT

    @property
    def label(self) -> str:
        return f"{self.side_p.value}_of_P/{self.side_q.value}_of_Q"


def _side(value: float, ref: float) -> Side:
    if abs(value - ref) <= ON_TOL:
        return Side.ON
    return Side.LEFT if value < ref else Side.RIGHT


def classify(d: UUDisc, fp: FixedPointData) -> Betweenness:
    """Position of a disc relative to the local stable lines of P and Q."""
    _, zp = d.at(fp.p_mu)
    _, zq = d.at(fp.q_mu)
    zp, zq = float(zp), float(zq)
    return Betweenness(zp, zq, _side(zp, fp.p_tilde), _side(zq, fp.q_tilde))


# iteration -----------------------------------------------------------------


def iterate_leg(p: Params, d: UUDisc, leg: str, theta: float = 0.5,
                n_nodes: Optional[int] = None) -> UUDisc:
    """Image of the part of ``d`` over leg A or B, resampled on a uniform y'-grid.

    The grid is doubled until every segment lies in the uu-cone, up to
    ``MAX_NODES`` nodes.
    """
    p.require_unperturbed("leg-wise disc iteration")
    legs(p)
    sign = LEG_SIGN[leg]
    n = n_nodes or len(d)
    while True:
        yp = np.linspace(DELTA.y_range.lo, DELTA.y_range.hi, n)
        y_pre = sign * np.sqrt(yp - p.mu)
        x_pre, z_pre = d.at(y_pre)
        image = UUDisc(yp, y_pre, p.xi * z_pre + y_pre)
        if image.cone_slack(theta) > 0:
            return image
        n *= 2
        if n > MAX_NODES:
            raise ConeViolationAfterIteration(
                f"leg {leg} image leaves the uu-cone even with {MAX_NODES} nodes")


# nested-disc witness ------------------------------------------------------


@dataclass(frozen=True)
class WitnessResult:
    point: Point3
    point_digits: Tuple[str, str, str]
    itinerary: str
    diameters: Tuple[float, ...]
    shrink_factors: Tuple[float, ...]
    orbit: Tuple[Point3, ...]
    orbit_in_cube: bool
    orbit_max_excess: float
    digits: int
    error_bound: float
    error_model: str


def _mp_interp(d: UUDisc, y0):
    i = int(np.searchsorted(d.y, float(y0), side="right")) - 1
    i = min(max(i, 0), len(d) - 2)
    y_a, y_b = mpmath.mpf(d.y[i]), mpmath.mpf(d.y[i + 1])
    t = (y0 - y_a) / (y_b - y_a)
    x = mpmath.mpf(d.x[i]) + t * (mpmath.mpf(d.x[i + 1]) - mpmath.mpf(d.x[i]))
    z = mpmath.mpf(d.z[i]) + t * (mpmath.mpf(d.z[i + 1]) - mpmath.mpf(d.z[i]))
    return x, z


def _cube_excess(pt) -> float:
    ex = 0.0
    for c, r in zip(pt, (DELTA.x_range, DELTA.y_range, DELTA.z_range)):
        ex = max(ex, float(r.lo - c), float(c - r.hi))
    return ex


def witness_stable_point(p: Params, d: UUDisc, fp: Optional[FixedPointData] = None,
                         max_iter: int = 30, theta: float = 0.5,
                         tol: float = 1e-4) -> WitnessResult:
    """A point of ``d`` whose forward orbit follows a leg itinerary of length ``max_iter``.

    Each step keeps a leg whose image disc is again in between.  The
    surviving parameter interval on ``d`` is recovered by pulling leg
    endpoints back through the chosen inverse branches in extended
    precision, since it becomes narrower than a binary64 ulp after about
    twenty steps.
    """
    fp = fp or fixed_points(p)
    if not classify(d, fp).in_between:
        raise NotInBetween(f"disc is {classify(d, fp).label}, not in between")
    itinerary = []
    disc = d
    for step in range(max_iter):
        img_a = iterate_leg(p, disc, "A", theta)
        if classify(img_a, fp).in_between:
            itinerary.append("A")
            disc = img_a
            continue
        img_b = iterate_leg(p, disc, "B", theta)
        if classify(img_b, fp).in_between:
            itinerary.append("B")
            disc = img_b
            continue
        raise NoLegInBetween(f"no leg image in between at step {step}")

    growth = 2 * math.sqrt(4 - p.mu)
    digits = 30 + math.ceil(max_iter * math.log10(growth))
    with mpmath.workdps(digits):
        mu = mpmath.mpf(p.mu)
        xi = mpmath.mpf(p.xi)
        outer, inner = mpmath.sqrt(4 - mu), mpmath.sqrt(-4 - mu)
        ends = {"A": (-outer, -inner), "B": (inner, outer)}

        def pull(values, upto):
            for sym in reversed(itinerary[:upto]):
                values = [LEG_SIGN[sym] * mpmath.sqrt(v - mu) for v in values]
            return sorted(values)

        diam = [mpmath.mpf(8)]
        final = None
        for n in range(1, max_iter + 1):
            lo, hi = pull(list(ends[itinerary[n - 1]]), n - 1)
            diam.append(hi - lo)
            final = (lo, hi)
        y0 = (final[0] + final[1]) / 2 if final else mpmath.mpf(0)
        x0, z0 = _mp_interp(d, y0)
        orbit = [(x0, y0, z0)]
        for _ in range(max_iter):
            x, y, z = orbit[-1]
            orbit.append((y, mu + y * y, xi * z + y))
        excess = max(_cube_excess(pt) for pt in orbit)
        digit_str = tuple(mpmath.nstr(c, digits) for c in orbit[0])
        orbit_f = tuple(Point3(float(a), float(b), float(c)) for a, b, c in orbit)
        diam_f = tuple(float(v) for v in diam)
        shrink = tuple(float(diam[i] / diam[i + 1]) for i in range(len(diam) - 1))
    err = 10.0 ** (-digits) * growth ** max_iter
    model = (f"orbit iterated at {digits} significant digits; a perturbation of y grows by at "
             f"most 2*sqrt(4-mu) = {growth:.4f} per step, so iterate k carries error "
             f"<= 1e-{digits} * {growth:.4f}^k <= {err:.1e}")
    return WitnessResult(
        point=orbit_f[0], point_digits=digit_str, itinerary="".join(itinerary),
        diameters=diam_f, shrink_factors=shrink, orbit=orbit_f,
        orbit_in_cube=excess <= tol, orbit_max_excess=excess,
        digits=digits, error_bound=err, error_model=model,
    )


# strips ---------------------------------------------------------------------


@dataclass(frozen=True)
class UStrip:
    members: Tuple[UUDisc, ...]
    index: Tuple[int, ...]

    def __post_init__(self):
        if not self.members:
            raise ValueError("a strip needs at least one member disc")
        if len(self.index) != len(self.members):
            raise ValueError("one index per member")

    @classmethod
    def flat(cls, z_lo: float, z_hi: float, members: int = 41,
             n: int = DEFAULT_NODES) -> "UStrip":
        if z_lo > z_hi:
            raise ValueError("z_lo must not exceed z_hi")
        zs = [z_lo] if z_lo == z_hi else np.linspace(z_lo, z_hi, members).tolist()
        return cls(tuple(UUDisc.flat(z, n) for z in zs), tuple(range(len(zs))))

    def width(self, samples: int = 1025) -> float:
        """Shortest fixed-y transversal joining the two boundary members."""
        if len(self.members) < 2:
            return 0.0
        y = np.linspace(DELTA.y_range.lo, DELTA.y_range.hi, samples)
        x0, z0 = self.members[0].at(y)
        x1, z1 = self.members[-1].at(y)
        return float(np.min(np.hypot(x1 - x0, z1 - z0)))

    def offsets_at(self, y: float, ref: float) -> np.ndarray:
        return np.array([float(m.at(y)[1]) - ref for m in self.members])


@dataclass(frozen=True)
class StripResult:
    hit: bool
    iterations: Optional[int]
    widths: Tuple[float, ...]
    itinerary: str
    hit_member: Optional[int]
    crossing_in_cone: Optional[bool]
    extractions: Tuple[Tuple[int, int, int], ...] = ()


def _crossing(strip: UStrip, fp: FixedPointData) -> Optional[int]:
    off = strip.offsets_at(fp.p_mu, fp.p_tilde)
    for i, o in enumerate(off):
        if o == 0.0:
            return i
    for i in range(len(off) - 1):
        if off[i] * off[i + 1] < 0:
            return i
    return None


def _tangent_in_cone(d: UUDisc, y: float, theta: float) -> bool:
    i = int(np.searchsorted(d.y, y, side="right")) - 1
    i = min(max(i, 0), len(d) - 2)
    return bool(d.segment_slack(theta)[i] > 0)


def _longest_run(flags: Sequence[bool]) -> Tuple[int, int]:
    best, start = (0, 0), None
    for i, f in enumerate(list(flags) + [False]):
        if f and start is None:
            start = i
        elif not f and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    return best


def grow_strip(p: Params, strip: UStrip, fp: Optional[FixedPointData] = None,
               max_iter: int = 25, theta: float = 0.5) -> StripResult:
    """Iterate a strip in between until a member crosses the stable line of P.

    A hit is a sign change of z(p) - p~ across consecutive members.  Without a
    hit, the leg image that stays in between is kept (leg A on ties); if
    neither leg image is entirely in between, the longest run of in-between
    members is extracted.
    """
    fp = fp or fixed_points(p)
    widths = [strip.width()]
    itinerary = []
    extractions = []
    for it in range(max_iter + 1):
        hit = _crossing(strip, fp)
        if hit is not None:
            ok = all(_tangent_in_cone(strip.members[j], fp.p_mu, theta)
                     for j in (hit, min(hit + 1, len(strip.members) - 1)))
            return StripResult(True, it, tuple(widths), "".join(itinerary),
                               strip.index[hit], ok, tuple(extractions))
        if it == 0 and not all(classify(m, fp).in_between for m in strip.members):
            raise NotInBetween("every member of the strip must be in between")
        if it == max_iter:
            break
        best = None
        for leg in ("A", "B"):
            images = tuple(iterate_leg(p, m, leg, theta) for m in strip.members)
            candidate = UStrip(images, strip.index)
            if _crossing(candidate, fp) is not None:
                best = (leg, candidate, True)
                break
            flags = [classify(m, fp).in_between for m in images]
            lo, hi = _longest_run(flags)
            if hi - lo == len(images):
                best = (leg, candidate, True)
                break
            if hi > lo and (best is None or hi - lo > len(best[1].members)):
                best = (leg, UStrip(images[lo:hi], strip.index[lo:hi]), False)
        if best is None:
            raise NoLegInBetween(f"no member image in between at iteration {it}")
        leg, strip, full = best
        if not full:
            extractions.append((it + 1, strip.index[0], strip.index[-1]))
        itinerary.append(leg)
        widths.append(strip.width())
    return StripResult(False, None, tuple(widths), "".join(itinerary), None, None,
                       tuple(extractions))
