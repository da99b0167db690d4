"""Reconstruction metrics and worst-case performance bounds.

The bounds need only the marker traces and the size of the true edge set:

* ``tp_lower``: distinct (originator, second reporter) pairs.  Each is a true
  edge and is the sole explanation of that report, so any cover includes it.
* ``h1 = 1 + ln(max subset size)`` and ``h2 = max trace length - 1`` bound the
  greedy cover size relative to the optimal one.
* ``fp_upper = |E_T| * min(h1, h2) - tp_lower``, with matching rate and
  Jaccard-distance bounds.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .graph import MarkerDataset, Network, atomic_write_text

CSV_FIELDS = (
    "tp", "fp", "tpr", "fpr", "jd",
    "tp_lower", "h1", "h2", "fp_upper", "fpr_upper", "jd_upper",
)


@dataclass(frozen=True)
class BoundsReport:
    tp_lower: int
    tpr_lower: float | None
    h1: float | None
    h2: float | None
    h_min: float | None
    fp_upper: float | None
    fpr_upper: float | None
    jd_upper: float | None


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    tpr: float
    fpr: float
    jd: float
    bounds: BoundsReport | None = None

    def as_row(self) -> dict[str, object]:
        b = self.bounds
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "jd": self.jd,
            "tp_lower": None if b is None else b.tp_lower,
            "h1": None if b is None else b.h1,
            "h2": None if b is None else b.h2,
            "fp_upper": None if b is None else b.fp_upper,
            "fpr_upper": None if b is None else b.fpr_upper,
            "jd_upper": None if b is None else b.jd_upper,
        }


def jaccard_distance(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    if union == 0:
        return 0.0
    return (union - len(a & b)) / union


def evaluate(
    truth: Network, recon: Network, bounds: BoundsReport | None = None
) -> EvalReport:
    if truth.node_count != recon.node_count:
        raise ValueError(
            f"node count mismatch: truth N={truth.node_count}, recon N={recon.node_count}"
        )
    n = truth.node_count
    tp = len(recon.edges & truth.edges)
    fp = len(recon.edges) - tp
    n_true = len(truth.edges)
    negatives = n * n - n - n_true
    return EvalReport(
        tp=tp,
        fp=fp,
        tpr=tp / n_true if n_true else 0.0,
        fpr=fp / negatives if negatives else 0.0,
        jd=jaccard_distance(truth.edges, recon.edges),
        bounds=bounds,
    )


def first_pairs(ds: MarkerDataset) -> set[tuple[int, int]]:
    return {(t[0], t[1]) for t in ds.traces if len(t) >= 2}


def tp_lower(ds: MarkerDataset) -> int:
    return len(first_pairs(ds))


def max_subset_size(ds: MarkerDataset) -> int:
    """Largest ``|B^v_u|``: the most markers in which ``u`` reported before ``v``,
    over all ordered pairs."""
    counts: Counter[tuple[int, int]] = Counter()
    for t in ds.traces:
        for j in range(1, len(t)):
            v = t[j]
            for u in t[:j]:
                counts[u, v] += 1
    return max(counts.values(), default=0)


def heuristic_h1(ds: MarkerDataset) -> float | None:
    """``1 + ln`` of the largest candidate subset; ``None`` if there is none."""
    size = max_subset_size(ds)
    if size == 0:
        return None
    return 1.0 + math.log(size)


def heuristic_h2(ds: MarkerDataset) -> float | None:
    """Longest trace length minus one; ``None`` when no report needs explaining."""
    longest = max((len(t) for t in ds.traces), default=0)
    if longest < 2:
        return None
    return float(longest - 1)


def bounds(
    ds: MarkerDataset, truth_edge_count: int, node_count: int | None = None
) -> BoundsReport:
    if truth_edge_count <= 0:
        raise ValueError("truth_edge_count must be positive")
    n = ds.node_count if node_count is None else node_count
    tpl = tp_lower(ds)
    h1 = heuristic_h1(ds)
    h2 = heuristic_h2(ds)
    if h1 is None or h2 is None:
        return BoundsReport(tpl, tpl / truth_edge_count, h1, h2, None, None, None, None)
    h = min(h1, h2)
    fp_up = truth_edge_count * h - tpl
    negatives = n * n - n - truth_edge_count
    fpr_up = fp_up / negatives if negatives > 0 else None
    jd_up = 1.0 - tpl / (truth_edge_count + fp_up)
    return BoundsReport(tpl, tpl / truth_edge_count, h1, h2, h, fp_up, fpr_up, jd_up)


# -- report documents -------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _unfmt(text: str, kind):
    if text == "NA":
        return None
    return int(text) if kind is int else float(text)


def format_report(report: EvalReport) -> str:
    lines = [f"{k}={_fmt(getattr(report, k))}" for k in ("tp", "fp", "tpr", "fpr", "jd")]
    if report.bounds is not None:
        for k, v in asdict(report.bounds).items():
            lines.append(f"{k}={_fmt(v)}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> EvalReport:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        values[key.strip()] = val.strip()
    try:
        core = dict(
            tp=int(values["tp"]),
            fp=int(values["fp"]),
            tpr=float(values["tpr"]),
            fpr=float(values["fpr"]),
            jd=float(values["jd"]),
        )
    except KeyError as exc:
        raise ValueError(f"report is missing field {exc.args[0]!r}") from None
    b = None
    if "tp_lower" in values:
        kinds = {f.name: (int if f.name == "tp_lower" else float) for f in fields(BoundsReport)}
        b = BoundsReport(**{k: _unfmt(values[k], kinds[k]) for k in kinds})
    return EvalReport(bounds=b, **core)


def save_report(report: EvalReport, path: str | os.PathLike) -> None:
    atomic_write_text(path, format_report(report))


def load_report(path: str | os.PathLike) -> EvalReport:
    return parse_report(Path(path).read_text())


def format_report_csv(report: EvalReport) -> str:
    row = report.as_row()
    return ",".join(CSV_FIELDS) + "\n" + ",".join(
        "" if row[k] is None else _fmt(row[k]) for k in CSV_FIELDS
    ) + "\n"
