"""The center-unstable Hénon-like family G(x, y, z) = (y, mu + y^2 + kappa y z + eta z^2, xi z + y)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Set, Tuple

from .errors import DegenerateXi, InvalidXi, PlanarRequiresUnperturbed
from .interval import IBox, Interval

PARAM_BOX = ((1.18, 1.19), (-10.0, -9.0))


@dataclass(frozen=True)
class Params:
    xi: float
    mu: float
    kappa: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        for name in ("xi", "mu", "kappa", "eta"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.xi == 1.0:
            raise DegenerateXi("xi = 1: the center-unstable direction is neutral")
        if self.xi < 1.0:
            raise InvalidXi(f"xi = {self.xi!r} must exceed 1")

    @property
    def unperturbed(self) -> bool:
        return self.kappa == 0.0 and self.eta == 0.0

    def in_reference_box(self) -> bool:
        (xlo, xhi), (mlo, mhi) = PARAM_BOX
        return xlo < self.xi < xhi and mlo < self.mu < mhi

    def as_box(self) -> IBox:
        return IBox.from_point(self.xi, self.mu, self.kappa, self.eta)

    def require_unperturbed(self, what: str = "this operation") -> None:
        if not self.unperturbed:
            raise PlanarRequiresUnperturbed(f"{what} requires kappa = eta = 0")


class Point3(NamedTuple):
    x: float
    y: float
    z: float


class Vec3(NamedTuple):
    u: float
    v: float
    w: float


Mat3 = Tuple[Tuple[float, float, float], Tuple[float, float, float], Tuple[float, float, float]]


def matvec(m: Mat3, v: Sequence[float]) -> Vec3:
    return Vec3(*(r[0] * v[0] + r[1] * v[1] + r[2] * v[2] for r in m))


@dataclass(frozen=True)
class Cube:
    x_range: Interval
    y_range: Interval
    z_range: Interval

    @property
    def box(self) -> IBox:
        return IBox((self.x_range, self.y_range, self.z_range))

    def contains(self, pt: Sequence[float], tol: float = 0.0) -> bool:
        return all(r.lo - tol <= c <= r.hi + tol
                   for r, c in zip((self.x_range, self.y_range, self.z_range), pt))

    def _face(self, axis: int, side: float) -> IBox:
        dims = list(self.box.dims)
        dims[axis] = Interval.point(side)
        return IBox(tuple(dims))

    def boundary_s(self) -> List[IBox]:
        """Faces x = const."""
        return [self._face(0, self.x_range.lo), self._face(0, self.x_range.hi)]

    def boundary_uu(self) -> List[IBox]:
        """Faces y = const."""
        return [self._face(1, self.y_range.lo), self._face(1, self.y_range.hi)]

    def boundary_u(self) -> List[IBox]:
        """Faces y = const or z = const."""
        return self.boundary_uu() + [self._face(2, self.z_range.lo),
                                     self._face(2, self.z_range.hi)]

    def boundary_parts(self, pt: Sequence[float]) -> Set[str]:
        """Labels of the boundary pieces containing ``pt``."""
        out = set()
        if not self.contains(pt):
            return out
        if pt[0] in (self.x_range.lo, self.x_range.hi):
            out.add("s")
        if pt[1] in (self.y_range.lo, self.y_range.hi):
            out.update(("u", "uu"))
        if pt[2] in (self.z_range.lo, self.z_range.hi):
            out.add("u")
        return out


DELTA = Cube(Interval(-4.0, 4.0), Interval(-4.0, 4.0), Interval(-40.0, 22.0))


def evaluate(p: Params, pt: Sequence[float]) -> Point3:
    x, y, z = pt
    return Point3(y, p.mu + y * y + p.kappa * y * z + p.eta * z * z, p.xi * z + y)


def jacobian(p: Params, pt: Sequence[float]) -> Mat3:
    _, y, z = pt
    return (
        (0.0, 1.0, 0.0),
        (0.0, 2.0 * y + p.kappa * z, p.kappa * y + 2.0 * p.eta * z),
        (0.0, 1.0, p.xi),
    )


def apply_jacobian(p: Params, pt: Sequence[float], v: Sequence[float]) -> Vec3:
    return matvec(jacobian(p, pt), v)


def eval_planar(p: Params, y: float, z: float) -> Tuple[float, float]:
    p.require_unperturbed("the planar map")
    return p.mu + y * y, p.xi * z + y


def eval_box(pbox: IBox, box: IBox) -> IBox:
    """Enclosure of G(box) over all parameters in ``pbox``.

    ``pbox`` holds (xi, mu) or (xi, mu, kappa, eta).
    """
    if len(box) != 3:
        raise ValueError("phase-space boxes are 3-dimensional")
    xi, mu = pbox[0], pbox[1]
    kappa = pbox[2] if len(pbox) > 2 else Interval.point(0.0)
    eta = pbox[3] if len(pbox) > 3 else Interval.point(0.0)
    _, y, z = box.dims
    y2 = mu + y.sqr() + kappa * (y * z) + eta * z.sqr()
    return IBox((y, y2, xi * z + y))
