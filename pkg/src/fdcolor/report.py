"""JSON documents written by the command line tool.

Keys are emitted in a fixed order and floats come from deterministic
computations, so replaying a command with the same seed reproduces the
document byte for byte.
"""

from __future__ import annotations

import json

from .dependence import DependenceReport, check_properness
from .graph import Graph
from .insertion import ExactDistribution
from .pipeline import ColorAssignment, flatten

FORMAT_VERSION = 1


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"


def graph_descriptor(g: Graph, source: str) -> dict:
    return {"source": source, **g.describe()}


def coloring_document(g: Graph, ca: ColorAssignment, source: str,
                      labels: list[str] | None = None, levels: bool = True) -> dict:
    flat = flatten(ca.colors, ca.q) if ca.colors and ca.colors[0] else [0] * g.n
    vertices = []
    for v in range(g.n):
        entry = {"id": v}
        if labels is not None:
            entry["label"] = labels[v]
        entry["color"] = list(ca.colors[v])
        entry["flat"] = flat[v]
        vertices.append(entry)
    doc = {
        "format": FORMAT_VERSION,
        "command": "sample",
        "variant": ca.variant,
        "seed": ca.seed,
        "graph": graph_descriptor(g, source),
        "palette": ca.q,
        "degree_bound": ca.d,
        "arity": len(ca.colors[0]) if ca.colors else 0,
        "proper": check_properness(g, ca.colors),
        "distinct_colors": len(set(flat)),
        "vertices": vertices,
    }
    if levels:
        doc["levels"] = [_level_entry(rec) for rec in ca.levels]
    return doc


def _level_entry(rec) -> dict:
    out = {"level": rec.level, "stripped": list(rec.stripped)}
    if rec.digraph is not None:
        dg = rec.digraph
        out["digraph"] = [
            {"tail": x, "head": h, "label": dg.label[x], "marked": x in dg.marked}
            for x, h in enumerate(dg.head) if h is not None
        ]
        out["components"] = {
            str(i): [{"vertices": list(c.vertices), "cyclic": c.cyclic} for c in comps]
            for i, comps in sorted(rec.components.items())
        }
    return out


def digraph_dump(ca: ColorAssignment) -> str:
    """Plain-text dump of D (or D') per level, for debugging."""
    parts = []
    for rec in ca.levels:
        parts.append(f"# level {rec.level}\n")
        if rec.digraph is not None:
            parts.append(rec.digraph.dump())
    return "".join(parts)


def dependence_document(report: DependenceReport, g: Graph, source: str,
                        variant: str, seed: int) -> dict:
    return {
        "format": FORMAT_VERSION,
        "command": "verify",
        "variant": variant,
        "seed": seed,
        "graph": graph_descriptor(g, source),
        **report.as_dict(),
    }


def oracle_dump(dist: ExactDistribution) -> str:
    return dist.dump()
