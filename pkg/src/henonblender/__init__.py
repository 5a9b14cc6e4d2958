"""Rigorous verification of a blender-horseshoe for the center-unstable Hénon-like family."""

__version__ = "0.1.0"

from .certifier import (  # noqa: E402
    CertificationReport,
    ConditionReport,
    EpsilonCertificate,
    certify_box,
    certify_epsilon,
    certify_point,
)
from .discs import UStrip, UUDisc, classify, grow_strip, iterate_leg, witness_stable_point  # noqa: E402
from .family import DELTA, Cube, Params, Point3, Vec3, evaluate, jacobian  # noqa: E402
from .geometry import ConeConfig, fixed_points, legs, markov  # noqa: E402
from .interval import IBox, Interval, ProverConfig, Status, Verdict, prove_positive  # noqa: E402
from .estimator import BlenderCertifier  # noqa: E402

__all__ = [
    "BlenderCertifier", "CertificationReport", "ConditionReport", "ConeConfig", "Cube", "DELTA",
    "EpsilonCertificate", "IBox", "Interval", "Params", "Point3", "ProverConfig",
    "Status", "UStrip", "UUDisc", "Vec3", "Verdict", "certify_box", "certify_epsilon",
    "certify_point", "classify", "evaluate", "fixed_points", "grow_strip", "iterate_leg",
    "jacobian", "legs", "markov", "prove_positive", "witness_stable_point",
]
