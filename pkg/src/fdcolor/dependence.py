"""Reports, properness checks and exact k-dependence checks on small graphs."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .exact import DEFAULT_DENSE_CAP, ExactJoint, random_test_vectors
from .graph import Graph, set_distance

PASS = "PASS"
FAIL = "FAIL"


class PropernessError(ValueError):
    pass


@dataclass
class PairRecord:
    A: tuple[int, ...]
    B: tuple[int, ...]
    distance: float
    discrepancy: Fraction | float
    method: str = "dense"
    radius: float | None = None  # Monte Carlo noise radius
    view: str | None = None

    @property
    def independent(self) -> bool:
        if self.radius is None:
            return self.discrepancy == 0
        return self.discrepancy <= self.radius

    def as_dict(self) -> dict:
        out = {
            "A": list(self.A),
            "B": list(self.B),
            "distance": _json_distance(self.distance),
            "discrepancy": _json_number(self.discrepancy),
            "method": self.method,
        }
        if self.radius is not None:
            out["radius"] = self.radius
        if self.view is not None:
            out["view"] = self.view
        return out


@dataclass
class DependenceReport:
    k: int
    records: list[PairRecord] = field(default_factory=list)
    mode: str = "exact"
    trials: int | None = None
    control: list[PairRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def tested(self) -> list[PairRecord]:
        return [r for r in self.records if r.distance > self.k]

    @property
    def verdict(self) -> str:
        return PASS if all(r.independent for r in self.tested) else FAIL

    @property
    def max_discrepancy(self):
        vals = [r.discrepancy for r in self.tested]
        return max(vals) if vals else Fraction(0)

    @property
    def control_detected(self) -> bool | None:
        adjacent = [r for r in self.control if r.method == "control-adjacent"]
        if not adjacent:
            return None
        return any(not r.independent for r in adjacent)

    def as_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "k": self.k,
            "verdict": self.verdict,
            "pairs_tested": len(self.tested),
            "max_discrepancy": _json_number(self.max_discrepancy),
            "records": [r.as_dict() for r in self.records],
        }
        if self.trials is not None:
            out["trials"] = self.trials
        if self.control:
            out["control"] = {
                "detected": self.control_detected,
                "records": [r.as_dict() for r in self.control],
            }
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


def _json_number(x):
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def _json_distance(x):
    return "inf" if x == float("inf") else int(x)


def check_properness(g: Graph, colors: Sequence | dict) -> bool:
    """True iff every edge of ``g`` gets two different colors.

    ``colors`` is indexed by vertex (a sequence of length ``n`` or a dict);
    a ``ColorAssignment`` is accepted too.
    """
    if hasattr(colors, "colors"):
        colors = colors.colors
    for v in range(g.n):
        try:
            present = v in colors if isinstance(colors, dict) else v < len(colors)
        except TypeError:
            present = False
        if not present:
            raise PropernessError(f"vertex {v} has no color")
    return all(colors[u] != colors[v] for u, v in g.edges())


def window_pairs(g: Graph, k: int, max_window: int = 2,
                 vertices: Iterable[int] | None = None):
    """Unordered pairs of disjoint windows of size ``<= max_window`` at distance > k."""
    verts = sorted(range(g.n) if vertices is None else vertices)
    windows = [w for s in range(1, max_window + 1) for w in itertools.combinations(verts, s)]
    for a, b in itertools.combinations(windows, 2):
        if set(a) & set(b):
            continue
        dist = set_distance(g, a, b)
        if dist > k:
            yield a, b, dist


def _dense_discrepancy(joint: ExactJoint, A, B, cap: int) -> Fraction:
    S = tuple(A) + tuple(B)
    table, den = joint.marginal_weights(S, cap)
    na = len(A) * joint.arity
    axes_a = tuple(range(na, table.ndim))
    axes_b = tuple(range(na))
    pa = table.sum(axis=axes_a) if axes_a else table
    pb = table.sum(axis=axes_b) if axes_b else table
    diff = table * den - np.multiply.outer(pa, pb)
    return Fraction(max((abs(int(x)) for x in diff.flat), default=0), den * den)


def _identity_discrepancy(joint: ExactJoint, A, B, rng: random.Random, repeats: int) -> Fraction:
    # E[f_A f_B] - E[f_A] E[f_B] for random rank-one test functions; the
    # difference is a nonzero polynomial in the test values unless the law
    # factors, so a random evaluation is zero only with tiny probability
    worst = Fraction(0)
    for _ in range(repeats):
        vec = random_test_vectors(tuple(A) + tuple(B), joint.arity, joint.q, rng)
        ea = joint.product_moment({v: vec[v] for v in A})
        eb = joint.product_moment({v: vec[v] for v in B})
        eab = joint.product_moment(vec)
        if eab != ea * eb:
            worst = max(worst, abs(eab - ea * eb) / (ea * eb))
    return worst


def check_k_dependence_exact(joint: ExactJoint, k: int, max_window: int = 2,
                             dense_cap: int = DEFAULT_DENSE_CAP, repeats: int = 2,
                             seed: int = 0) -> DependenceReport:
    """Exact check that windows at distance > k have factorized joint law.

    Small tables are compared cell by cell and the largest absolute
    difference is reported. Otherwise the law is probed with random integer
    test functions and the reported value is the relative gap of the first
    failing probe (0 when all probes agree).
    """
    rng = random.Random(seed)
    report = DependenceReport(k)
    for A, B, dist in window_pairs(joint.graph, k, max_window):
        if joint.marginal_size(A + B) <= dense_cap:
            disc, method = _dense_discrepancy(joint, A, B, dense_cap), "dense"
        else:
            disc, method = _identity_discrepancy(joint, A, B, rng, repeats), "identity"
        report.records.append(PairRecord(A, B, dist, disc, method))
    return report


def smallest_passing_k(joint: ExactJoint, max_window: int = 2, **kw) -> int:
    """Least k for which every window pair at distance > k factorizes."""
    report = check_k_dependence_exact(joint, 0, max_window, **kw)
    failing = [r.distance for r in report.records if not r.independent]
    return int(max(failing)) if failing else 0
