"""Per-node set-cover reconstruction and the two naive baselines.

For a target node ``v`` the universe is the set of markers ``v`` reported, and
each candidate parent ``u`` explains the markers in which ``u`` reported before
``v``.  Covering every explainable report of every node gives a network that is
locally (hence globally) consistent with the data.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .graph import (
    Edge,
    MarkerDataset,
    Network,
    ParseError,
    _content_lines,
    _parse_header,
    _parse_ints,
    atomic_write_text,
)


@dataclass(frozen=True)
class NodeCoverInstance:
    target: int
    universe: frozenset[int]
    family: dict[int, frozenset[int]] = field(default_factory=dict)

    @property
    def coverable(self) -> frozenset[int]:
        if not self.family:
            return frozenset()
        return frozenset().union(*self.family.values())


@dataclass(frozen=True)
class GreedyCover:
    """Greedy selections as ``(source, newly_covered)`` in pick order, plus the
    universe elements no candidate could explain (originator reports)."""

    selections: tuple[tuple[int, int], ...]
    uncovered: frozenset[int]

    @property
    def sources(self) -> list[int]:
        return [u for u, _ in self.selections]


@dataclass(frozen=True)
class CoverPlan:
    """Every greedy selection across all nodes with its newly-covered count.

    ``entries`` are held in canonical order: by destination, then selection
    rank within that destination.
    """

    node_count: int
    entries: tuple[tuple[Edge, int], ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def edges(self) -> list[Edge]:
        return [e for e, _ in self.entries]

    def ranked_entries(self) -> list[tuple[Edge, int]]:
        """Entries ordered by newly-covered count, largest first; ties by edge."""
        return sorted(self.entries, key=lambda item: (-item[1], item[0]))

    def network(self) -> Network:
        return Network(self.node_count, frozenset(self.edges()))


def _all_instances(ds: MarkerDataset) -> dict[int, tuple[set[int], dict[int, set[int]]]]:
    universes: dict[int, set[int]] = defaultdict(set)
    families: dict[int, dict[int, set[int]]] = defaultdict(lambda: defaultdict(set))
    for i, trace in enumerate(ds.traces):
        for j, v in enumerate(trace):
            universes[v].add(i)
            fam = families[v]
            for u in trace[:j]:
                fam[u].add(i)
    return {v: (universes[v], families.get(v, {})) for v in universes}


def build_instance(v: int, ds: MarkerDataset) -> NodeCoverInstance:
    if not 0 <= v < ds.node_count:
        raise ValueError(f"node {v} out of range for N={ds.node_count}")
    universe: set[int] = set()
    family: dict[int, set[int]] = defaultdict(set)
    for i, trace in enumerate(ds.traces):
        if v not in trace:
            continue
        universe.add(i)
        for u in trace[: trace.index(v)]:
            family[u].add(i)
    return NodeCoverInstance(
        v, frozenset(universe), {u: frozenset(s) for u, s in sorted(family.items())}
    )


def greedy_cover(inst: NodeCoverInstance) -> GreedyCover:
    """Chvatal's greedy cover; ties go to the lowest source id."""
    # markers become bit positions so overlap counts are popcounts
    bit = {m: k for k, m in enumerate(sorted(inst.universe))}
    masks: list[tuple[int, int]] = []
    for u in sorted(inst.family):
        mask = 0
        for m in inst.family[u]:
            mask |= 1 << bit[m]
        if mask:
            masks.append((u, mask))
    remaining = (1 << len(bit)) - 1
    selections: list[tuple[int, int]] = []
    while masks:
        best_u, best_mask, best_gain = -1, 0, 0
        for u, mask in masks:
            gain = (mask & remaining).bit_count()
            if gain > best_gain:
                best_u, best_mask, best_gain = u, mask, gain
        if best_gain == 0:
            break
        selections.append((best_u, best_gain))
        remaining &= ~best_mask
        masks = [(u, m) for u, m in masks if m & remaining]
    order = sorted(inst.universe)
    uncovered = frozenset(order[k] for k in range(len(order)) if remaining >> k & 1)
    return GreedyCover(tuple(selections), uncovered)


def reconstruct_cover(ds: MarkerDataset) -> tuple[Network, CoverPlan]:
    entries: list[tuple[Edge, int]] = []
    for v, (universe, family) in sorted(_all_instances(ds).items()):
        inst = NodeCoverInstance(
            v, frozenset(universe), {u: frozenset(s) for u, s in family.items()}
        )
        for u, gain in greedy_cover(inst).selections:
            entries.append(((u, v), gain))
    plan = CoverPlan(ds.node_count, tuple(entries))
    return plan.network(), plan


def naive1(ds: MarkerDataset) -> Network:
    """Each reporter was infected by the reporter immediately before it."""
    edges = {(t[k], t[k + 1]) for t in ds.traces for k in range(len(t) - 1)}
    return Network(ds.node_count, frozenset(edges))


def naive2(ds: MarkerDataset) -> Network:
    """Only the originator-to-second-reporter edges, which are certainly real."""
    edges = {(t[0], t[1]) for t in ds.traces if len(t) >= 2}
    return Network(ds.node_count, frozenset(edges))


# -- cover plan files -------------------------------------------------------


def format_plan(plan: CoverPlan) -> str:
    rows = [f"N {plan.node_count}"]
    rows.extend(f"{u} {v} {gain}" for (u, v), gain in plan.ranked_entries())
    return "\n".join(rows) + "\n"


def parse_plan(text: str, path: str | None = None) -> CoverPlan:
    lines = _content_lines(text)
    n = _parse_header(lines, path)
    entries: list[tuple[Edge, int]] = []
    seen: set[Edge] = set()
    for lineno, line in lines:
        vals = _parse_ints(line, lineno, path)
        if len(vals) != 3:
            raise ParseError(f"expected 'src dst newly_covered', got {line!r}", lineno, path)
        u, v, gain = vals
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"invalid edge {u} -> {v} for N={n}", lineno, path)
        if gain <= 0:
            raise ParseError(f"newly_covered must be positive, got {gain}", lineno, path)
        if (u, v) in seen:
            raise ParseError(f"duplicate edge {u} -> {v}", lineno, path)
        seen.add((u, v))
        entries.append(((u, v), gain))
    # within a destination, greedy picks have non-increasing gains and equal
    # gains are picked in increasing source order, so this restores pick order
    entries.sort(key=lambda item: (item[0][1], -item[1], item[0][0]))
    return CoverPlan(n, tuple(entries))


def save_plan(plan: CoverPlan, path: str | os.PathLike) -> None:
    atomic_write_text(path, format_plan(plan))


def load_plan(path: str | os.PathLike) -> CoverPlan:
    return parse_plan(Path(path).read_text(), str(path))
