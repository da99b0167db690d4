"""Synthetic ground truth: directed Erdos-Renyi networks, discrete-time SIR
marker traces and report-loss noise.

All randomness flows from explicit integer seeds through
``numpy.random.SeedSequence``.  Per-marker and per-trace streams are derived
with ``spawn_key=(index,)`` so that datasets of different sizes drawn with the
same seed are prefixes of one another, and markers could be simulated in any
order with identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import MarkerDataset, MarkerTrace, Network

SeedLike = int | np.random.SeedSequence


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class SirParams:
    p_infect: float = 0.1
    p_recover: float = 0.1
    min_trace_length: int = 1

    def __post_init__(self) -> None:
        _check_prob("p_infect", self.p_infect)
        _check_prob("p_recover", self.p_recover)
        if self.min_trace_length < 0:
            raise ValueError("min_trace_length must be non-negative")


@dataclass(frozen=True)
class NoiseParams:
    p_loss: float = 0.0

    def __post_init__(self) -> None:
        _check_prob("p_loss", self.p_loss)


def child_seed(seed: SeedLike, *key: int) -> np.random.SeedSequence:
    """Derive an independent stream for ``key`` from a base seed."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + key)
    return np.random.SeedSequence(int(seed), spawn_key=key)


def generate_er(node_count: int, edge_prob: float, seed: SeedLike) -> Network:
    """Directed G(N, p): every ordered pair ``(i, j)``, ``i != j``, independently."""
    if node_count <= 0:
        raise ValueError(f"node_count must be positive, got {node_count}")
    _check_prob("edge_prob", edge_prob)
    rng = np.random.default_rng(seed)
    adj = rng.random((node_count, node_count)) < edge_prob
    np.fill_diagonal(adj, False)
    src, dst = np.nonzero(adj)
    return Network(node_count, frozenset(zip(src.tolist(), dst.tolist())))


def simulate_marker(net: Network, params: SirParams, seed: SeedLike) -> MarkerTrace:
    """Run one SIR cascade from a uniformly chosen seed node.

    Steps are synchronous: transmissions and recoveries in a step are both
    decided from the states at the start of that step, so a node that recovers
    still gets its transmission attempts in that step.  A susceptible node with
    ``k`` infected in-neighbours is infected with probability
    ``1 - (1 - p_infect)**k``.  Nodes infected in the same step are appended in
    a random order.
    """
    rng = np.random.default_rng(seed)
    out = net.out_neighbors
    origin = int(rng.integers(net.node_count))
    trace = [origin]
    reported = {origin}
    infected = [origin]
    p_escape = 1.0 - params.p_infect
    while infected:
        exposure: dict[int, int] = {}
        for u in infected:
            for x in out[u]:
                if x not in reported:
                    exposure[x] = exposure.get(x, 0) + 1
        candidates = sorted(exposure)
        new: list[int] = []
        if candidates:
            draws = rng.random(len(candidates))
            new = [x for x, r in zip(candidates, draws) if r < 1.0 - p_escape ** exposure[x]]
        recover = rng.random(len(infected)) < params.p_recover
        infected = [u for u, gone in zip(infected, recover) if not gone]
        if new:
            if len(new) > 1:
                new = [new[i] for i in rng.permutation(len(new))]
            trace.extend(new)
            reported.update(new)
            infected.extend(new)
    return tuple(trace)


def simulate_dataset(
    net: Network, params: SirParams, marker_count: int, seed: SeedLike
) -> MarkerDataset:
    """Simulate ``marker_count`` markers; traces shorter than
    ``params.min_trace_length`` are dropped, not redrawn."""
    if marker_count < 0:
        raise ValueError("marker_count must be non-negative")
    traces = []
    for i in range(marker_count):
        t = simulate_marker(net, params, child_seed(seed, i))
        if len(t) >= params.min_trace_length:
            traces.append(t)
    return MarkerDataset(net.node_count, tuple(traces))


def apply_noise(ds: MarkerDataset, noise: NoiseParams, seed: SeedLike) -> MarkerDataset:
    """Drop each report independently with probability ``p_loss``.

    Survivors keep their order; traces left empty are removed.
    """
    if noise.p_loss == 0.0:
        return ds
    traces = []
    for i, t in enumerate(ds.traces):
        rng = np.random.default_rng(child_seed(seed, i))
        keep = rng.random(len(t)) >= noise.p_loss
        kept = tuple(w for w, k in zip(t, keep) if k)
        if kept:
            traces.append(kept)
    return MarkerDataset(ds.node_count, tuple(traces))
