"""Validated interval arithmetic, boxes and a branch-and-bound positivity prover.

Python exposes no rounding-mode control, so each endpoint is computed in
round-to-nearest and then nudged one ulp outward, but only when an
error-free transform shows the rounded result is inexact in the wrong
direction.  Exact operations therefore keep exact endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

from .errors import (
    DivisionByZeroInterval,
    EmptyIntervalError,
    IntervalError,
    SqrtOfNegativeInterval,
)

_INF = math.inf
_SPLITTER = 134217729.0  # 2**27 + 1
_BIG = 2.0 ** 995
_TINY = 2.0 ** -969


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _two_sum(a: float, b: float) -> Tuple[float, float]:
    s = a + b
    if not math.isfinite(s):
        return s, (0.0 if math.isinf(a) or math.isinf(b) else math.nan)
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float) -> Tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> Tuple[float, float]:
    """Dekker's product: returns p, e with a*b = p + e when representable.

    A NaN error term means exactness could not be established (overflow or
    underflow territory); callers then widen unconditionally.
    """
    p = a * b
    if a == 0.0 or b == 0.0:
        return p, 0.0
    if math.isinf(a) or math.isinf(b):
        return p, 0.0
    if abs(a) > _BIG or abs(b) > _BIG or abs(p) > _BIG or abs(p) < _TINY:
        return p, math.nan
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _round(value: float, err: float, upward: bool) -> float:
    # err is the sign of (exact - value); NaN means unknown
    if upward:
        return value if err <= 0.0 else _up(value)
    return value if err >= 0.0 else _down(value)


def _add(a: float, b: float, upward: bool) -> float:
    return _round(*_two_sum(a, b), upward)


def _mul(a: float, b: float, upward: bool) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    return _round(*_two_prod(a, b), upward)


def _div(a: float, b: float, upward: bool) -> float:
    if a == 0.0:
        return 0.0
    q = a / b
    if math.isinf(b):
        return _round(q, math.nan, upward)
    p, e = _two_prod(q, b)
    if math.isnan(e) or not math.isfinite(q):
        return _round(q, math.nan, upward)
    r = (a - p) - e
    return _round(q, r if b > 0 else -r, upward)


def _sqrt(x: float, upward: bool) -> float:
    if x == 0.0 or math.isinf(x):
        return math.sqrt(x)
    s = math.sqrt(x)
    p, e = _two_prod(s, s)
    if math.isnan(e):
        return _round(s, math.nan, upward)
    return _round(s, (x - p) - e, upward)


def _as_float(v) -> float:
    f = float(v)
    if math.isnan(f):
        raise IntervalError("NaN endpoint")
    return f


Number = Union[int, float]


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lo, hi] of reals with binary64 endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = _as_float(self.lo), _as_float(self.hi)
        if lo > hi:
            raise EmptyIntervalError(f"lo={lo!r} > hi={hi!r}; use EMPTY")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    # construction --------------------------------------------------------
    @classmethod
    def point(cls, x: Number) -> "Interval":
        return cls(x, x)

    @classmethod
    def enclose(cls, value) -> "Interval":
        """Tightest enclosure of an exact rational (str, int, Fraction or float).

        Decimal constants such as ``"12.16"`` are not binary64 numbers; this
        returns the one-ulp interval around them.
        """
        if isinstance(value, Interval):
            return value
        exact = Fraction(value)
        f = float(exact)
        if Fraction(f) == exact:
            return cls(f, f)
        if Fraction(f) < exact:
            return cls(f, _up(f))
        return cls(_down(f), f)

    @staticmethod
    def coerce(x) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, _EmptyInterval):
            raise EmptyIntervalError("operand is empty")
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return Interval.enclose(x)
        return Interval.point(x)

    # queries -------------------------------------------------------------
    is_empty = False

    @property
    def width(self) -> float:
        return _add(self.hi, -self.lo, True)

    @property
    def mid(self) -> float:
        m = self.lo + 0.5 * (self.hi - self.lo)
        if not math.isfinite(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        return min(max(m, self.lo), self.hi)

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def subset(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def hull(self, other) -> "Interval":
        o = Interval.coerce(other)
        return Interval(min(self.lo, o.lo), max(self.hi, o.hi))

    def intersection(self, other):
        o = Interval.coerce(other)
        lo, hi = max(self.lo, o.lo), min(self.hi, o.hi)
        return EMPTY if lo > hi else Interval(lo, hi)

    # arithmetic ----------------------------------------------------------
    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other) -> "Interval":
        o = Interval.coerce(other)
        return Interval(_add(self.lo, o.lo, False), _add(self.hi, o.hi, True))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        o = Interval.coerce(other)
        return Interval(_add(self.lo, -o.hi, False), _add(self.hi, -o.lo, True))

    def __rsub__(self, other) -> "Interval":
        return Interval.coerce(other) - self

    def __mul__(self, other) -> "Interval":
        o = Interval.coerce(other)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        return Interval(
            min(_mul(a, b, False) for a, b in pairs),
            max(_mul(a, b, True) for a, b in pairs),
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = Interval.coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise DivisionByZeroInterval(f"0 in divisor {o}")
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        return Interval(
            min(_div(a, b, False) for a, b in pairs),
            max(_div(a, b, True) for a, b in pairs),
        )

    def __rtruediv__(self, other) -> "Interval":
        return Interval.coerce(other) / self

    def __abs__(self) -> "Interval":
        return Interval(self.mig, self.mag)

    def sqr(self) -> "Interval":
        """Square, tighter than self*self when the interval straddles zero."""
        lo2 = _mul(self.lo, self.lo, True)
        hi2 = _mul(self.hi, self.hi, True)
        if self.lo >= 0.0:
            return Interval(_mul(self.lo, self.lo, False), hi2)
        if self.hi <= 0.0:
            return Interval(_mul(self.hi, self.hi, False), lo2)
        return Interval(0.0, max(lo2, hi2))

    def __pow__(self, n: int) -> "Interval":
        if n != 2:
            raise NotImplementedError("only squaring is supported")
        return self.sqr()

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise SqrtOfNegativeInterval(f"sqrt of {self}")
        return Interval(_sqrt(self.lo, False), _sqrt(self.hi, True))

    def min(self, other) -> "Interval":
        o = Interval.coerce(other)
        return Interval(min(self.lo, o.lo), min(self.hi, o.hi))

    def max(self, other) -> "Interval":
        o = Interval.coerce(other)
        return Interval(max(self.lo, o.lo), max(self.hi, o.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"


class _EmptyInterval:
    """The empty set; produced only by intersections."""

    is_empty = True
    __slots__ = ()

    def __contains__(self, x) -> bool:
        return False

    def __repr__(self) -> str:
        return "EMPTY"

    def _fail(self, *args):
        raise EmptyIntervalError("arithmetic on the empty interval")

    __add__ = __radd__ = __sub__ = __rsub__ = __mul__ = __rmul__ = _fail
    __truediv__ = __rtruediv__ = __neg__ = __abs__ = sqrt = sqr = _fail


EMPTY = _EmptyInterval()


# generic helpers: accept floats or Intervals -----------------------------

def sqrt(x):
    if isinstance(x, Interval):
        return x.sqrt()
    if x < 0:
        raise SqrtOfNegativeInterval(f"sqrt of {x!r}")
    return math.sqrt(x)


def imax(*xs):
    if any(isinstance(x, Interval) for x in xs):
        out = Interval.coerce(xs[0])
        for x in xs[1:]:
            out = out.max(x)
        return out
    return max(xs)


def imin(*xs):
    if any(isinstance(x, Interval) for x in xs):
        out = Interval.coerce(xs[0])
        for x in xs[1:]:
            out = out.min(x)
        return out
    return min(xs)


def lower(x) -> float:
    return x.lo if isinstance(x, Interval) else float(x)


def upper(x) -> float:
    return x.hi if isinstance(x, Interval) else float(x)


# boxes -------------------------------------------------------------------

@dataclass(frozen=True)
class IBox:
    dims: Tuple[Interval, ...]

    def __post_init__(self):
        dims = tuple(Interval.coerce(d) for d in self.dims)
        if not dims:
            raise ValueError("IBox needs at least one dimension")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_bounds(cls, *bounds: Tuple[float, float]) -> "IBox":
        return cls(tuple(Interval(lo, hi) for lo, hi in bounds))

    @classmethod
    def from_point(cls, *xs: float) -> "IBox":
        return cls(tuple(Interval.point(x) for x in xs))

    def __len__(self) -> int:
        return len(self.dims)

    def __getitem__(self, i: int) -> Interval:
        return self.dims[i]

    def __iter__(self):
        return iter(self.dims)

    @property
    def midpoint(self) -> Tuple[float, ...]:
        return tuple(d.mid for d in self.dims)

    def midpoint_box(self) -> "IBox":
        return IBox.from_point(*self.midpoint)

    def contains(self, pt: Sequence[float]) -> bool:
        return all(d.lo <= x <= d.hi for d, x in zip(self.dims, pt))

    def subset(self, other: "IBox") -> bool:
        return all(a.subset(b) for a, b in zip(self.dims, other.dims))

    def bisect(self, axis: int) -> Tuple["IBox", "IBox"]:
        d = self.dims[axis]
        m = d.mid
        left = self.dims[:axis] + (Interval(d.lo, m),) + self.dims[axis + 1:]
        right = self.dims[:axis] + (Interval(m, d.hi),) + self.dims[axis + 1:]
        return IBox(left), IBox(right)

    def widest_axis(self, reference: Optional[Sequence[float]] = None,
                    min_width: float = 0.0) -> Optional[int]:
        """Axis with the largest width relative to ``reference``.

        Returns None when no axis exceeds ``min_width`` (relative) or when
        no axis can be split any further.
        """
        best, best_rel = None, min_width
        for i, d in enumerate(self.dims):
            w = d.hi - d.lo
            if w <= 0.0:
                continue
            ref = reference[i] if reference is not None else 1.0
            rel = w / ref if ref > 0.0 else w
            m = d.mid
            if not (d.lo < m < d.hi):
                continue
            if rel > best_rel:
                best, best_rel = i, rel
        return best

    def corners(self):
        out = [()]
        for d in self.dims:
            out = [c + (v,) for c in out for v in ((d.lo, d.hi) if d.lo != d.hi else (d.lo,))]
        return out

    def __repr__(self) -> str:
        return "IBox(" + ", ".join(f"[{d.lo!r}, {d.hi!r}]" for d in self.dims) + ")"


# verdicts and the prover -------------------------------------------------

class Status(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    UNKNOWN = "UNKNOWN"


_RANK = {Status.PASS: 0, Status.UNKNOWN: 1, Status.FAIL: 2}


@dataclass(frozen=True)
class Verdict:
    status: Status
    margin: float
    boxes_examined: int = 1
    max_depth_reached: int = 0
    witness: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "status", Status(self.status))
        if self.witness is not None:
            object.__setattr__(self, "witness", tuple(float(w) for w in self.witness))
        if self.status is Status.PASS and not self.margin > 0:
            raise ValueError("a PASS verdict needs a positive margin")
        if self.status is Status.FAIL and self.witness is None:
            raise ValueError("a FAIL verdict needs a witness")

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def merge(self, other: "Verdict") -> "Verdict":
        """Associative, commutative combination; FAIL > UNKNOWN > PASS."""
        a, b = sorted((self, other), key=lambda v: (-_RANK[v.status], v.margin))
        return Verdict(
            status=a.status,
            margin=min(self.margin, other.margin),
            boxes_examined=self.boxes_examined + other.boxes_examined,
            max_depth_reached=max(self.max_depth_reached, other.max_depth_reached),
            witness=a.witness,
        )

    @classmethod
    def from_value(cls, value, witness: Sequence[float]) -> "Verdict":
        """Verdict for a single evaluation (point or degenerate box)."""
        lo, hi = lower(value), upper(value)
        if lo > 0:
            return cls(Status.PASS, lo, witness=None)
        if hi < 0:
            return cls(Status.FAIL, hi, witness=tuple(witness))
        return cls(Status.UNKNOWN, lo)

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "margin": _encode_float(self.margin),
            "boxes_examined": self.boxes_examined,
            "max_depth_reached": self.max_depth_reached,
            "witness": None if self.witness is None else list(self.witness),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        return cls(
            status=Status(d["status"]),
            margin=_decode_float(d["margin"]),
            boxes_examined=int(d["boxes_examined"]),
            max_depth_reached=int(d["max_depth_reached"]),
            witness=None if d.get("witness") is None else tuple(d["witness"]),
        )


def merge_all(verdicts) -> Verdict:
    verdicts = list(verdicts)
    out = verdicts[0]
    for v in verdicts[1:]:
        out = out.merge(v)
    return out


def _encode_float(x: float):
    return x if math.isfinite(x) else repr(x)


def _decode_float(x) -> float:
    return float(x)


@dataclass(frozen=True)
class ProverConfig:
    """Branch-and-bound limits.

    A passing box whose lower bound is below ``margin_goal`` and below
    ``tightness`` times the value at its midpoint is bisected further; this
    only sharpens the reported margin and never changes the status.
    """

    max_depth: int = 24
    min_width: float = 1e-9
    margin_goal: float = 0.1
    tightness: float = 0.8

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if not self.min_width >= 0:
            raise ValueError("min_width must be >= 0")


def _safe_eval(f, box):
    try:
        v = f(box)
    except (IntervalError, ArithmeticError, ValueError):
        return None
    if isinstance(v, Interval):
        return v
    v = float(v)
    return None if math.isnan(v) else Interval.point(v)


def prove_positive(f: Callable[[IBox], Interval], domain: IBox,
                   cfg: ProverConfig = ProverConfig()) -> Verdict:
    """Certify ``f > 0`` on ``domain`` by bisection.

    ``f`` maps a box to an interval enclosing its range there.  A FAIL is
    reported only from a point evaluation at some sub-box midpoint, so
    overestimation can cost a PASS but never produce a false FAIL.
    """
    reference = [d.hi - d.lo for d in domain.dims]
    stack = [(domain, 0)]
    examined = 0
    deepest = 0
    margin = _INF
    undecided = False
    while stack:
        box, depth = stack.pop()
        examined += 1
        deepest = max(deepest, depth)
        value = _safe_eval(f, box)
        if value is not None and value.lo > 0.0:
            if value.lo < cfg.margin_goal and depth < cfg.max_depth:
                at_mid = _safe_eval(f, box.midpoint_box())
                axis = box.widest_axis(reference, cfg.min_width)
                if (at_mid is not None and axis is not None
                        and value.lo < cfg.tightness * at_mid.lo):
                    left, right = box.bisect(axis)
                    stack.append((right, depth + 1))
                    stack.append((left, depth + 1))
                    continue
            margin = min(margin, value.lo)
            continue
        mid = box.midpoint_box()
        at_mid = value if box.dims == mid.dims else _safe_eval(f, mid)
        if at_mid is not None and at_mid.hi < 0.0:
            return Verdict(Status.FAIL, at_mid.hi, examined, deepest, witness=mid.midpoint)
        # an undefined or sign-ambiguous midpoint value means no leaf holding it
        # can pass and no split will shrink it; a plain non-positive value keeps
        # the search going for a FAIL witness
        hopeless = at_mid is None or at_mid.lo <= 0.0 < at_mid.hi
        axis = (box.widest_axis(reference, cfg.min_width)
                if depth < cfg.max_depth and not hopeless else None)
        if axis is None:
            undecided = True
            margin = min(margin, value.lo if value is not None else -_INF)
            continue
        left, right = box.bisect(axis)
        stack.append((right, depth + 1))
        stack.append((left, depth + 1))
    status = Status.UNKNOWN if undecided else Status.PASS
    return Verdict(status, margin, examined, deepest)
