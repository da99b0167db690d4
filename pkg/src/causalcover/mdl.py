"""Description length of marker traces given a network, and MDL-stopped covering.

Coding scheme (all costs in nats).  A virtual supernode originates every
marker and is a parent of every node, with out-degree ``N``.  The ``j``-th
report of a trace (1-indexed) costs ``ln(j) + ln(d)``: ``ln(j)`` picks the
parent among the ``j - 1`` earlier reporters plus the supernode, and
``ln(d)`` picks the child among the parent's ``d`` out-neighbours.  The
encoder uses the eligible parent with the smallest out-degree; the supernode
is always eligible and is used only when no earlier reporter has an edge to
the current node.

The fixed-length description of the network itself does not depend on which
edges are present, so it is left out of every total.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .graph import Edge, MarkerDataset, Network, atomic_write_text, validate_trace
from .setcover import CoverPlan, reconstruct_cover


@dataclass(frozen=True)
class DlBreakdown:
    total_nats: float
    per_trace: tuple[float, ...]


def _trace_cost(trace, in_nbrs, out_deg, node_count: int) -> float:
    log_n = math.log(node_count)
    cost = log_n
    earlier = {trace[0]}
    for j in range(2, len(trace) + 1):
        w = trace[j - 1]
        d = node_count
        for p in in_nbrs[w]:
            if p in earlier and out_deg[p] < d:
                d = out_deg[p]
        cost += math.log(j) + (log_n if d == node_count else math.log(d))
        earlier.add(w)
    return cost


def _check_traces(net: Network, ds: MarkerDataset) -> None:
    if ds.node_count != net.node_count:
        raise ValueError(
            f"dataset has N={ds.node_count} but network has N={net.node_count}"
        )
    for t in ds.traces:
        validate_trace(t, net.node_count)


def description_length(net: Network, ds: MarkerDataset) -> DlBreakdown:
    _check_traces(net, ds)
    out_deg = [len(s) for s in net.out_neighbors]
    per_trace = tuple(
        _trace_cost(t, net.in_neighbors, out_deg, net.node_count) for t in ds.traces
    )
    return DlBreakdown(math.fsum(per_trace), per_trace)


def coding_parents(net: Network, trace: Sequence[int]) -> list[int | None]:
    """Parent the encoder uses for each report; ``None`` stands for the supernode.

    Among earlier reporters with an edge to the current node the one with the
    smallest out-degree wins, ties to the lowest id.
    """
    t = validate_trace(trace, net.node_count)
    parents: list[int | None] = [None]
    for j in range(1, len(t)):
        eligible = [p for p in t[:j] if (p, t[j]) in net.edges]
        if eligible:
            parents.append(min(eligible, key=lambda p: (net.out_degree(p), p)))
        else:
            parents.append(None)
    return parents


def rank_edges(plan: CoverPlan) -> list[Edge]:
    """All plan edges, most newly-covered reports first; ties by ``(src, dst)``."""
    return [edge for edge, _ in plan.ranked_entries()]


def dl_curve(
    ds: MarkerDataset, ranked: Sequence[Edge], incremental: bool = True
) -> list[tuple[int, float]]:
    """Description length after adding each of ``ranked`` in turn to an empty
    network, starting with the zero-edge point.

    The incremental path only re-codes traces containing the new edge's source,
    which are the only traces whose cost can change.  ``incremental=False``
    recomputes everything from scratch at every step.
    """
    n = ds.node_count
    if not incremental:
        curve = [(0, description_length(Network(n), ds).total_nats)]
        edges: set[Edge] = set()
        for k, e in enumerate(ranked, start=1):
            edges.add(e)
            curve.append((k, description_length(Network(n, frozenset(edges)), ds).total_nats))
        return curve

    in_nbrs: list[set[int]] = [set() for _ in range(n)]
    out_deg = [0] * n
    traces_with: list[list[int]] = [[] for _ in range(n)]
    for i, t in enumerate(ds.traces):
        for w in t:
            traces_with[w].append(i)
    per_trace = [_trace_cost(t, in_nbrs, out_deg, n) for t in ds.traces]
    curve = [(0, math.fsum(per_trace))]
    seen: set[Edge] = set()
    for k, (u, x) in enumerate(ranked, start=1):
        if (u, x) in seen:
            raise ValueError(f"edge {(u, x)} ranked twice")
        seen.add((u, x))
        in_nbrs[x].add(u)
        out_deg[u] += 1
        for i in traces_with[u]:
            per_trace[i] = _trace_cost(ds.traces[i], in_nbrs, out_deg, n)
        curve.append((k, math.fsum(per_trace)))
    return curve


def stopping_point(curve: Sequence[tuple[int, float]], rel_tol: float = 1e-9) -> int:
    """Index of the lowest point of ``curve``; points within ``rel_tol`` of the
    minimum count as ties and the fewest edges wins."""
    lowest = min(dl for _, dl in curve)
    slack = rel_tol * max(1.0, abs(lowest))
    return next(k for k, (_, dl) in enumerate(curve) if dl <= lowest + slack)


def reconstruct_mdl(ds: MarkerDataset) -> tuple[Network, list[tuple[int, float]]]:
    """Greedy cover, then keep the prefix of the ranked edges with the lowest
    description length (ties to the fewest edges)."""
    _, plan = reconstruct_cover(ds)
    ranked = rank_edges(plan)
    curve = dl_curve(ds, ranked)
    best = stopping_point(curve)
    return Network(ds.node_count, frozenset(ranked[:best])), curve


# -- dl curve files ---------------------------------------------------------


def format_dl_curve(curve: Sequence[tuple[int, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["edges", "dl_nats"])
    for k, dl in curve:
        writer.writerow([k, repr(float(dl))])
    return buf.getvalue()


def save_dl_curve(curve: Sequence[tuple[int, float]], path: str | os.PathLike) -> None:
    atomic_write_text(path, format_dl_curve(curve))


def load_dl_curve(path: str | os.PathLike) -> list[tuple[int, float]]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["edges", "dl_nats"]:
            raise ValueError(f"{path}: expected header 'edges,dl_nats'")
        return [(int(row["edges"]), float(row["dl_nats"])) for row in reader]
