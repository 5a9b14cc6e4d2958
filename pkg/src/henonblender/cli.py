"""Command-line interface.

Exit codes: 0 PASS, 1 FAIL (including violated preconditions and failed
experiments), 2 UNKNOWN, 64 usage error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import time
from typing import Dict, List, Optional, Sequence

from . import __version__
from .certifier import (
    CertificationReport,
    certify_box,
    certify_epsilon,
    certify_point,
    sample_cone_expansion,
)
from .discs import UStrip, UUDisc, classify, grow_strip, witness_stable_point
from .errors import BlenderError, PreconditionError
from .family import Params
from .geometry import ConeConfig, fixed_points, legs, markov
from .interval import IBox, ProverConfig, Status
from .report import Range, ReportDocument, SweepSpec, run_sweep, write_csv

EXIT = {Status.PASS: 0, Status.FAIL: 1, Status.UNKNOWN: 2}
EXIT_USAGE = 64
_NEG_VALUE = re.compile(r"^-(\d|\.\d)")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _range(text: str) -> Range:
    try:
        return Range.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _common() -> argparse.ArgumentParser:
    g = _Parser(add_help=False)
    g.add_argument("--theta", type=float, default=0.5, help="uu/u cone aperture")
    g.add_argument("--vartheta", type=float, default=0.1, help="s cone aperture")
    g.add_argument("--max-depth", type=int, default=24, help="branch-and-bound depth limit")
    g.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
    g.add_argument("--seed", type=int, default=0, help="seed for sampled property checks")
    g.add_argument("--config", help="key=value file; flags given on the command line win")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="henonblender", description=__doc__.splitlines()[0],
                     parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="check BH1-BH6 at one parameter point")
    v.add_argument("--xi", type=float, required=True)
    v.add_argument("--mu", type=float, required=True)
    v.add_argument("--kappa", type=float, default=0.0)
    v.add_argument("--eta", type=float, default=0.0)
    v.add_argument("--rigorous", action="store_true", help="interval evaluation at the point")
    v.add_argument("--cone-samples", type=int, default=0,
                   help="random u-cone expansion trials to run with --seed")
    v.add_argument("--report", help="write the JSON report here")

    for name, helptext in (("certify-box", "certify BH1-BH6 over a parameter box"),
                           ("certify-epsilon", "certified perturbation radius for kappa, eta")):
        b = sub.add_parser(name, parents=[common], help=helptext)
        b.add_argument("--xi", type=_range, required=True, help="lo:hi")
        b.add_argument("--mu", type=_range, required=True, help="lo:hi")
        if name == "certify-box":
            b.add_argument("--kappa", type=_range, default=Range(0.0, 0.0))
            b.add_argument("--eta", type=_range, default=Range(0.0, 0.0))
        b.add_argument("--report", help="write the JSON report here")

    s = sub.add_parser("sweep", parents=[common], help="grid of point or box checks to CSV")
    s.add_argument("--xi", type=_range, required=True, help="lo:hi:step")
    s.add_argument("--mu", type=_range, required=True, help="lo:hi:step")
    s.add_argument("--kappa", type=_range, default=Range(0.0, 0.0))
    s.add_argument("--eta", type=_range, default=Range(0.0, 0.0))
    s.add_argument("--mode", choices=["point_check", "box_check"], default="point_check")
    s.add_argument("--rigorous", action="store_true")
    s.add_argument("--cap", type=int, default=10 ** 6, help="maximum number of cells")
    s.add_argument("--out", help="CSV path (default: stdout)")

    d = sub.add_parser("disc", parents=[common], help="nested-disc witness for a flat uu-disc")
    d.add_argument("--xi", type=float, default=1.185)
    d.add_argument("--mu", type=float, default=-9.5)
    d.add_argument("--z0", type=float, default=0.0)
    d.add_argument("--iters", type=int, default=30)
    d.add_argument("--nodes", type=int, default=1024)
    d.add_argument("--out", help="directory for CSV artifacts")

    t = sub.add_parser("strip", parents=[common], help="grow a flat u-strip until it hits W^s(P)")
    t.add_argument("--xi", type=float, default=1.185)
    t.add_argument("--mu", type=float, default=-9.5)
    t.add_argument("--z", type=_range, default=Range(-1.0, 1.0), help="lo:hi of member heights")
    t.add_argument("--members", type=int, default=41)
    t.add_argument("--iters", type=int, default=25)
    t.add_argument("--nodes", type=int, default=1024)
    t.add_argument("--out", help="directory for CSV artifacts")
    return parser


# argv handling ---------------------------------------------------------------


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    # "--mu -10:-9" would otherwise be read as an unknown option
    out: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEG_VALUE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def read_config(path: str) -> Dict[str, str]:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: List[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        cfg = read_config(known.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}")
    # only the chosen subcommand sees the file, since flag types differ
    parsers = [parser]
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            parsers.extend(sp for name, sp in action.choices.items() if name in argv)
    for p in parsers:
        for action in p._actions:
            if action.dest in cfg:
                raw = cfg[action.dest]
                if action.type is not None:
                    try:
                        val = action.type(raw)
                    except (argparse.ArgumentTypeError, ValueError) as exc:
                        raise UsageError(f"config {action.dest}: {exc}")
                elif isinstance(action, argparse._StoreTrueAction):
                    val = raw.lower() in ("1", "true", "yes", "on")
                else:
                    val = raw
                p.set_defaults(**{action.dest: val})
                action.required = False


# commands --------------------------------------------------------------------


def _cones(args) -> ConeConfig:
    try:
        return ConeConfig(args.theta, args.vartheta)
    except ValueError as exc:
        raise UsageError(str(exc))


def _prover(args) -> ProverConfig:
    try:
        return ProverConfig(max_depth=args.max_depth)
    except ValueError as exc:
        raise UsageError(str(exc))


def _print_report(rep: CertificationReport, out=None) -> None:
    out = out or sys.stdout
    for cond in rep.conditions:
        ov = cond.overall
        worst = min(cond.strict_margins().items(), key=lambda t: t[1])
        print(f"{cond.condition} {ov.status.value} min_margin={worst[1]:.6g} ({worst[0]}) "
              f"boxes={ov.boxes_examined} depth={ov.max_depth_reached}", file=out)
        for s in cond.sub_checks:
            print(f"  {s.name:34s} {s.verdict.status.value:7s} margin={s.verdict.margin:.6g}",
                  file=out)
        for s in cond.diagnostics:
            extra = "" if s.verdict.witness is None else f" witness={list(s.verdict.witness)}"
            print(f"  [estimate] {s.name:20s} {s.verdict.status.value:7s} "
                  f"margin={s.verdict.margin:.6g}{extra}", file=out)
        if cond.info:
            print(f"  info: {cond.info}", file=out)
    print(f"overall {rep.overall.status.value}", file=out)


def _write_report(path: Optional[str], doc: ReportDocument) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(doc.to_json())


def _precondition_exit(command, params, cones, err, report_path, t0) -> int:
    doc = ReportDocument.from_precondition(command, params, cones, err, time.perf_counter() - t0)
    print(f"FAIL: precondition {err.precondition} violated ({type(err).__name__}): {err}")
    _write_report(report_path, doc)
    return 1


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    cones = _cones(args)
    raw = {"xi": args.xi, "mu": args.mu, "kappa": args.kappa, "eta": args.eta}
    try:
        p = Params(args.xi, args.mu, args.kappa, args.eta)
        rep = certify_point(p, cones, rigorous=args.rigorous)
    except PreconditionError as err:
        return _precondition_exit("verify", raw, cones, err, args.report, t0)
    if args.cone_samples:
        rep.condition("BH2").info["cone_sampling"] = sample_cone_expansion(
            p, cones, args.cone_samples, args.seed)
    _print_report(rep)
    _write_report(args.report, ReportDocument.from_certification(
        "verify", rep, time.perf_counter() - t0))
    return EXIT[rep.overall.status]


def cmd_certify_box(args) -> int:
    if args.xi.degenerate and args.mu.degenerate and args.kappa.degenerate and args.eta.degenerate:
        args.rigorous, args.cone_samples = True, 0
        args.xi, args.mu, args.kappa, args.eta = args.xi.lo, args.mu.lo, args.kappa.lo, args.eta.lo
        return cmd_verify(args)
    t0 = time.perf_counter()
    cones = _cones(args)
    box = IBox((args.xi.interval, args.mu.interval, args.kappa.interval, args.eta.interval))
    raw = {"xi": [args.xi.lo, args.xi.hi], "mu": [args.mu.lo, args.mu.hi]}
    try:
        rep = certify_box(box, cones, _prover(args))
    except PreconditionError as err:
        return _precondition_exit("certify-box", raw, cones, err, args.report, t0)
    _print_report(rep)
    _write_report(args.report, ReportDocument.from_certification(
        "certify-box", rep, time.perf_counter() - t0))
    return EXIT[rep.overall.status]


def cmd_certify_epsilon(args) -> int:
    t0 = time.perf_counter()
    cones = _cones(args)
    box = IBox((args.xi.interval, args.mu.interval))
    raw = {"xi": [args.xi.lo, args.xi.hi], "mu": [args.mu.lo, args.mu.hi]}
    try:
        cert = certify_epsilon(box, cones, _prover(args))
    except PreconditionError as err:
        return _precondition_exit("certify-epsilon", raw, cones, err, args.report, t0)
    except BlenderError as err:
        print(f"FAIL: {type(err).__name__}: {err}")
        return 1
    print(f"epsilon = {cert.epsilon!r}")
    print(f"binding check: {cert.binding_check} (m* = {cert.m_star!r})")
    print(f"perturbation bound: {cert.perturbation_bound_formula}")
    for k, e, st in cert.corner_status:
        print(f"  corner kappa={k!r} eta={e!r}: {st}")
    print(f"  square |kappa|,|eta| <= {cert.epsilon_checked!r}: {cert.square_status}")
    doc = ReportDocument("certify-epsilon", raw, cones.to_dict(), [], "PASS", epsilon=cert,
                         wall_time=time.perf_counter() - t0)
    _write_report(args.report, doc)
    return 0


def cmd_sweep(args) -> int:
    try:
        spec = SweepSpec(args.xi, args.mu, args.kappa, args.eta, args.mode, args.cap)
    except ValueError as exc:
        raise UsageError(str(exc))
    text = run_sweep(spec, _cones(args), _prover(args), max(1, args.workers), args.rigorous)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _figure_rows(p: Params):
    fp = fixed_points(p)
    lg = legs(p)
    mk = markov(p, fp)
    rows = []
    for name, para in (("A_para", mk.A_para), ("B_para", mk.B_para)):
        for seg, ((y0, z0), (y1, z1)) in para.segments().items():
            rows.append((name, seg, y0, z0, y1, z1))
    for name, (lo, hi) in (("leg_A", (lg.a_mu, lg.b_mu)), ("leg_B", (lg.c_mu, lg.d_mu))):
        for y in (lo, hi):
            rows.append((name, "boundary", y, -40.0, y, 22.0))
    for name, r, rt in (("L1", fp.p_mu, fp.p_tilde), ("L2", fp.q_mu, fp.q_tilde)):
        rows.append((name, "line", -4.0, 0.5 * (-4.0 - r) + rt, 4.0, 0.5 * (4.0 - r) + rt))
    rows.append(("R1", "line", -4.0, mk.line1(-4.0), 4.0, mk.line1(4.0)))
    rows.append(("R2", "line", -4.0, mk.line2(-4.0), 4.0, mk.line2(4.0)))
    rows.append(("P", "point", fp.p_mu, fp.p_tilde, fp.p_mu, fp.p_tilde))
    rows.append(("Q", "point", fp.q_mu, fp.q_tilde, fp.q_mu, fp.q_tilde))
    return rows


def _outdir(path):
    if path:
        os.makedirs(path, exist_ok=True)
    return path


def cmd_disc(args) -> int:
    try:
        p = Params(args.xi, args.mu)
        disc = UUDisc.flat(args.z0, args.nodes)
        w = witness_stable_point(p, disc, max_iter=args.iters, theta=args.theta)
    except BlenderError as err:
        print(f"FAIL: {type(err).__name__}: {err}")
        return 1
    print(f"itinerary {w.itinerary}")
    print(f"min shrink factor {min(w.shrink_factors):.6g}")
    print(f"witness point {tuple(w.point)}")
    print(f"orbit stays in cube: {w.orbit_in_cube} (max excess {w.orbit_max_excess:.3g})")
    print(w.error_model)
    out = _outdir(args.out)
    if out:
        write_csv(os.path.join(out, "itinerary.csv"), ["step", "leg", "diameter", "shrink_factor"],
                  [(0, "", w.diameters[0], "")] +
                  [(i + 1, w.itinerary[i], w.diameters[i + 1], w.shrink_factors[i])
                   for i in range(len(w.itinerary))])
        write_csv(os.path.join(out, "orbit.csv"), ["k", "x", "y", "z"],
                  [(k,) + tuple(pt) for k, pt in enumerate(w.orbit)])
        write_csv(os.path.join(out, "witness.csv"), ["x", "y", "z"], [w.point_digits])
        write_csv(os.path.join(out, "disc.csv"), ["y", "x", "z"], disc.nodes())
        write_csv(os.path.join(out, "figure_yz.csv"), ["object", "label", "y0", "z0", "y1", "z1"],
                  _figure_rows(p))
    return 0 if w.orbit_in_cube else 1


def cmd_strip(args) -> int:
    try:
        p = Params(args.xi, args.mu)
        fp = fixed_points(p)
        strip = UStrip.flat(args.z.lo, args.z.hi, args.members, args.nodes)
        if len(strip.members) == 1:
            b = classify(strip.members[0], fp)
            print(f"single disc z0={args.z.lo!r}: z(p)={b.z_at_p!r} z(q)={b.z_at_q!r} "
                  f"{b.label} in_between={b.in_between}")
            return 0 if b.in_between else 1
        res = grow_strip(p, strip, fp, args.iters, args.theta)
    except BlenderError as err:
        print(f"FAIL: {type(err).__name__}: {err}")
        return 1
    print(f"hit {res.hit} at iteration {res.iterations} (member {res.hit_member}, "
          f"tangent in uu-cone: {res.crossing_in_cone})")
    print(f"itinerary {res.itinerary}")
    print("widths " + " ".join(f"{w:.6g}" for w in res.widths))
    out = _outdir(args.out)
    if out:
        write_csv(os.path.join(out, "widths.csv"), ["iteration", "leg", "width"],
                  [(i, res.itinerary[i - 1] if i else "", wd) for i, wd in enumerate(res.widths)])
        write_csv(os.path.join(out, "figure_yz.csv"), ["object", "label", "y0", "z0", "y1", "z1"],
                  _figure_rows(p))
    return 0 if res.hit else 1


COMMANDS = {
    "verify": cmd_verify,
    "certify-box": cmd_certify_box,
    "certify-epsilon": cmd_certify_epsilon,
    "sweep": cmd_sweep,
    "disc": cmd_disc,
    "strip": cmd_strip,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
