"""JSON report documents, CSV writers and parameter sweeps."""

from __future__ import annotations

import csv
import io
import json
import math
from decimal import Decimal
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__
from .certifier import (
    CONDITIONS,
    CertificationReport,
    ConditionReport,
    EpsilonCertificate,
    certify_box,
    certify_point,
)
from .errors import PreconditionError
from .family import Params
from .geometry import ConeConfig
from .interval import IBox, Interval, ProverConfig

SCHEMA_VERSION = 1
DEFAULT_CELL_CAP = 10 ** 6


@dataclass
class ReportDocument:
    command: str
    params: Dict[str, object]
    cones: Dict[str, float]
    conditions: List[ConditionReport]
    overall: str
    precondition: Optional[Dict[str, str]] = None
    epsilon: Optional[EpsilonCertificate] = None
    wall_time: float = 0.0
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_certification(cls, command: str, rep: CertificationReport,
                           wall_time: float = 0.0) -> "ReportDocument":
        return cls(command, dict(rep.params), rep.cones.to_dict(), list(rep.conditions),
                   rep.overall.status.value, wall_time=wall_time)

    @classmethod
    def from_precondition(cls, command: str, params: Dict[str, object], cones: ConeConfig,
                          err: PreconditionError, wall_time: float = 0.0) -> "ReportDocument":
        return cls(command, dict(params), cones.to_dict(), [], "FAIL",
                   precondition={"name": type(err).__name__,
                                 "requires": err.precondition, "message": str(err)},
                   wall_time=wall_time)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "command": self.command,
            "params": self.params,
            "cones": self.cones,
            "overall": self.overall,
            "precondition": self.precondition,
            "conditions": [c.to_dict() for c in self.conditions],
            "epsilon": None if self.epsilon is None else self.epsilon.to_dict(),
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDocument":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        return cls(
            command=d["command"], params=d["params"], cones=d["cones"],
            conditions=[ConditionReport.from_dict(c) for c in d["conditions"]],
            overall=d["overall"], precondition=d.get("precondition"),
            epsilon=None if d.get("epsilon") is None else EpsilonCertificate.from_dict(d["epsilon"]),
            wall_time=d.get("wall_time", 0.0), tool_version=d["tool_version"],
            schema_version=d["schema_version"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))


# ranges and sweeps -----------------------------------------------------------


@dataclass(frozen=True)
class Range:
    lo: float
    hi: float
    step: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("range bounds must be finite")
        if self.lo > self.hi:
            raise ValueError(f"empty range {self.lo!r}:{self.hi!r}")
        if self.step is not None and not self.step > 0:
            raise ValueError("range step must be positive")

    @classmethod
    def parse(cls, text: str) -> "Range":
        parts = text.split(":")
        if len(parts) == 1:
            v = float(parts[0])
            return cls(v, v)
        if len(parts) == 2:
            return cls(float(parts[0]), float(parts[1]))
        if len(parts) == 3:
            return cls(float(parts[0]), float(parts[1]), float(parts[2]))
        raise ValueError(f"bad range {text!r}; use lo, lo:hi or lo:hi:step")

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    def points(self) -> List[float]:
        if self.degenerate or self.step is None:
            return [self.lo] if self.degenerate else [self.lo, self.hi]
        # decimal stepping keeps 1.18 + 5 * 0.001 equal to the literal 1.185
        lo, step = Decimal(repr(self.lo)), Decimal(repr(self.step))
        n = int((Decimal(repr(self.hi)) - lo) / step)
        return [float(lo + i * step) for i in range(n + 1)]

    def cells(self) -> List[Tuple[float, float]]:
        pts = self.points()
        if len(pts) == 1:
            return [(pts[0], pts[0])]
        if pts[-1] < self.hi:
            pts.append(self.hi)
        return [(a, min(b, self.hi)) for a, b in zip(pts[:-1], pts[1:])]


@dataclass(frozen=True)
class SweepSpec:
    xi_range: Range
    mu_range: Range
    kappa_range: Range = Range(0.0, 0.0)
    eta_range: Range = Range(0.0, 0.0)
    mode: str = "point_check"
    cap: int = DEFAULT_CELL_CAP

    def __post_init__(self):
        if self.mode not in ("point_check", "box_check"):
            raise ValueError(f"mode must be point_check or box_check, got {self.mode!r}")
        if self.size() > self.cap:
            raise ValueError(f"sweep has {self.size()} cells, above the cap {self.cap}")

    def _axes(self):
        get = (lambda r: r.points()) if self.mode == "point_check" else (lambda r: r.cells())
        return [get(r) for r in (self.xi_range, self.mu_range, self.kappa_range, self.eta_range)]

    def size(self) -> int:
        n = 1
        for a in self._axes():
            n *= len(a)
        return n

    def grid(self):
        """Cells in lexicographic order of grid indices (xi slowest)."""
        xs, ms, ks, es = self._axes()
        for x in xs:
            for m in ms:
                for k in ks:
                    for e in es:
                        yield (x, m, k, e)


CSV_FIELDS = ["xi", "mu", "kappa", "eta"] + list(CONDITIONS) + ["overall", "worst_margin", "precondition"]
CSV_FIELDS_BOX = (["xi_lo", "xi_hi", "mu_lo", "mu_hi", "kappa_lo", "kappa_hi", "eta_lo", "eta_hi"]
                  + list(CONDITIONS) + ["overall", "worst_margin", "precondition"])


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def _row_from_report(rep: CertificationReport) -> List[str]:
    statuses = [c.overall.status.value for c in rep.conditions]
    _, worst = rep.min_strict_margin()
    return statuses + [rep.overall.status.value, _fmt(worst), ""]


def _sweep_cell(args) -> List[str]:
    cell, mode, cones, prover, rigorous = args
    if mode == "point_check":
        head = [_fmt(float(v)) for v in cell]
        try:
            p = Params(*cell)
            rep = certify_point(p, cones, rigorous=rigorous, sample_expansion=False,
                                include_diagnostics=False)
        except PreconditionError as err:
            return head + [""] * len(CONDITIONS) + ["FAIL", "", type(err).__name__]
        return head + _row_from_report(rep)
    head = [_fmt(float(v)) for pair in cell for v in pair]
    try:
        (x0, x1), (m0, m1), (k0, k1), (e0, e1) = cell
        box = IBox.from_bounds((x0, x1), (m0, m1))
        rep = certify_box(box, cones, prover, kappa=Interval(k0, k1), eta=Interval(e0, e1),
                          sample_expansion=False, include_diagnostics=False)
    except PreconditionError as err:
        return head + [""] * len(CONDITIONS) + ["FAIL", "", type(err).__name__]
    return head + _row_from_report(rep)


def run_sweep(spec: SweepSpec, cones: ConeConfig = ConeConfig(),
              prover: ProverConfig = ProverConfig(), workers: int = 1,
              rigorous: bool = False) -> str:
    """CSV text for the sweep; identical for any worker count."""
    jobs = [(cell, spec.mode, cones, prover, rigorous) for cell in spec.grid()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_sweep_cell(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS if spec.mode == "point_check" else CSV_FIELDS_BOX)
    w.writerows(rows)
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
