"""Sweep harness: generate -> simulate -> noise -> reconstruct -> evaluate over a
grid of (seed, marker count, loss rate), one CSV row per cell and method.

Every cell derives its random streams from the base seed and its own grid
coordinates, so extending the grid never changes rows already produced.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import analysis
from .graph import Network
from .mdl import dl_curve, rank_edges, reconstruct_mdl, stopping_point
from .setcover import naive1, naive2, reconstruct_cover
from .synth import NoiseParams, SirParams, apply_noise, child_seed, generate_er, simulate_dataset

METHODS = ("cover", "mdl", "naive1", "naive2")

GRID_COLUMNS = (
    "method", "markers", "seed", "p_loss", "edges", "tp", "fp", "tpr", "fpr", "jd",
    "tp_lower", "tpr_lower", "h1", "h2", "fp_upper", "fpr_upper", "jd_upper",
)
PRESET_COLUMNS = {
    "fig1": ("method", "markers", "seed", "tpr", "fpr", "jd", "tpr_lower", "fpr_upper", "jd_upper"),
    "fig3": ("method", "markers", "seed", "p_loss", "tpr", "fpr", "jd"),
    "fig2": ("seed", "p_loss", "markers", "edges", "dl_nats", "jd", "tpr", "fpr", "mdl_stop"),
    "grid": GRID_COLUMNS,
}


@dataclass(frozen=True)
class ExperimentConfig:
    node_count: int = 100
    avg_degree: float = 2.0
    edge_prob: float | None = None
    sir: SirParams = field(default_factory=SirParams)
    marker_counts: tuple[int, ...] = (1000,)
    seeds: tuple[int, ...] = tuple(range(10))
    p_losses: tuple[float, ...] = (0.0,)
    methods: tuple[str, ...] = ("cover",)
    base_seed: int = 0

    def __post_init__(self) -> None:
        if self.node_count <= 1:
            raise ValueError("node_count must be at least 2")
        if self.edge_prob is not None and not 0.0 <= self.edge_prob <= 1.0:
            raise ValueError("edge_prob must lie in [0, 1]")
        if self.edge_prob is None and not 0.0 <= self.avg_degree <= self.node_count:
            raise ValueError("avg_degree must lie in [0, N]")
        if not self.marker_counts:
            raise ValueError("need at least one marker count")
        if any(m < 0 for m in self.marker_counts):
            raise ValueError("marker counts must be non-negative")
        if any(b <= a for a, b in zip(self.marker_counts, self.marker_counts[1:])):
            raise ValueError("marker counts must be strictly increasing")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if len(set(self.seeds)) != len(self.seeds) or any(s < 0 for s in self.seeds):
            raise ValueError("seeds must be distinct non-negative integers")
        for p in self.p_losses:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p_loss {p} outside [0, 1]")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")

    @property
    def p(self) -> float:
        """Edge probability; an average degree ``k`` maps to ``k / N``, not ``k / (N - 1)``."""
        return self.avg_degree / self.node_count if self.edge_prob is None else self.edge_prob


def _loss_key(p_loss: float) -> int:
    return round(p_loss * 1_000_000)


def cell_network(cfg: ExperimentConfig, seed: int) -> Network:
    return generate_er(cfg.node_count, cfg.p, child_seed(cfg.base_seed, seed, 0))


def cell_dataset(cfg: ExperimentConfig, net: Network, seed: int, markers: int, p_loss: float):
    ds = simulate_dataset(net, cfg.sir, markers, child_seed(cfg.base_seed, seed, 1))
    return apply_noise(ds, NoiseParams(p_loss), child_seed(cfg.base_seed, seed, 2, _loss_key(p_loss)))


def reconstruct(method: str, ds) -> Network:
    if method == "cover":
        return reconstruct_cover(ds)[0]
    if method == "mdl":
        return reconstruct_mdl(ds)[0]
    if method == "naive1":
        return naive1(ds)
    if method == "naive2":
        return naive2(ds)
    raise ValueError(f"unknown method {method!r}")


def _run_cell(args) -> list[dict]:
    cfg, seed, markers, p_loss = args
    net = cell_network(cfg, seed)
    ds = cell_dataset(cfg, net, seed, markers, p_loss)
    b = analysis.bounds(ds, len(net)) if len(net) else None
    rows = []
    for method in cfg.methods:
        recon = reconstruct(method, ds)
        rep = analysis.evaluate(net, recon, b)
        row = {"method": method, "markers": markers, "seed": seed, "p_loss": p_loss,
               "edges": len(recon)}
        row.update(rep.as_row())
        row["tpr_lower"] = None if b is None else b.tpr_lower
        rows.append(row)
    return rows


def grid_cells(cfg: ExperimentConfig):
    for seed in cfg.seeds:
        for p_loss in cfg.p_losses:
            for markers in cfg.marker_counts:
                yield cfg, seed, markers, p_loss


def run_grid(cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    cells = list(grid_cells(cfg))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]
    return [row for rows in results for row in rows]


def _run_curve(args) -> list[dict]:
    cfg, seed, markers, p_loss = args
    net = cell_network(cfg, seed)
    ds = cell_dataset(cfg, net, seed, markers, p_loss)
    _, plan = reconstruct_cover(ds)
    ranked = rank_edges(plan)
    curve = dl_curve(ds, ranked)
    stop = stopping_point(curve)
    n_true = len(net)
    negatives = cfg.node_count * (cfg.node_count - 1) - n_true
    rows = []
    tp = 0
    for k, dl in curve:
        if k:
            tp += ranked[k - 1] in net.edges
        fp = k - tp
        union = n_true + fp
        rows.append({
            "seed": seed, "p_loss": p_loss, "markers": markers, "edges": k, "dl_nats": dl,
            "jd": (union - tp) / union if union else 0.0,
            "tpr": tp / n_true if n_true else 0.0,
            "fpr": fp / negatives if negatives else 0.0,
            "mdl_stop": int(k == stop),
        })
    return rows


def run_curves(cfg: ExperimentConfig, jobs: int = 1) -> list[dict]:
    cells = list(grid_cells(cfg))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_curve, cells))
    else:
        results = [_run_curve(c) for c in cells]
    return [row for rows in results for row in rows]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()
