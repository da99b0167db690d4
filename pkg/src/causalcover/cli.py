"""Command-line front end.

    causalcover generate    --nodes 100 --avg-degree 2 --seed 7 -o net.txt
    causalcover simulate    --network net.txt --markers 1000 --seed 3 -o traces.txt
    causalcover reconstruct --traces traces.txt --method cover -o recon.txt
    causalcover evaluate    --truth net.txt --recon recon.txt --traces traces.txt
    causalcover experiment  fig1 --seeds 10 -o fig1.csv

Exit status is 0 only when the requested output was fully written; usage
errors exit with 2, input and I/O errors with 1.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import analysis, experiment
from .graph import atomic_write_text, load_network, load_traces, save_network, save_traces
from .mdl import reconstruct_mdl, save_dl_curve
from .setcover import naive1, naive2, reconstruct_cover, save_plan
from .synth import NoiseParams, SirParams, apply_noise, child_seed, generate_er, simulate_dataset

PRESET_DEFAULTS = {
    "fig1": dict(markers="50,100,200,500,1000", p_loss="0", methods="cover,naive1,naive2"),
    "fig2": dict(markers="1000", p_loss="0,0.05,0.1", methods="cover"),
    "fig3": dict(markers="100,250,500,1000", p_loss="0,0.05,0.1", methods="mdl,cover"),
    "grid": dict(markers="1000", p_loss="0", methods="cover,mdl,naive1,naive2"),
}


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {value}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = _non_negative_int(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalcover",
        description="Reconstruct causal networks from ordered cascade traces by set covering.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="random directed Erdos-Renyi network")
    g.add_argument("--nodes", type=_positive_int, default=100)
    deg = g.add_mutually_exclusive_group()
    deg.add_argument("--avg-degree", type=float, help="edge probability becomes K/N (default 2)")
    deg.add_argument("--edge-prob", type=_probability)
    g.add_argument("--seed", type=_non_negative_int, default=0)
    g.add_argument("-o", "--output", required=True)

    s = sub.add_parser("simulate", help="SIR marker traces on a network")
    s.add_argument("--network", required=True)
    s.add_argument("--markers", type=_non_negative_int, default=1000)
    s.add_argument("--p-infect", type=_probability, default=0.1)
    s.add_argument("--p-recover", type=_probability, default=0.1)
    s.add_argument("--min-length", type=_non_negative_int, default=1,
                   help="drop traces shorter than this")
    s.add_argument("--p-loss", type=_probability, default=0.0)
    s.add_argument("--seed", type=_non_negative_int, default=0)
    s.add_argument("-o", "--output", required=True)

    r = sub.add_parser("reconstruct", help="infer a network from traces")
    r.add_argument("--traces", required=True)
    r.add_argument("--method", choices=experiment.METHODS, default="cover")
    r.add_argument("--emit-plan", metavar="PATH", help="write the cover plan (cover, mdl)")
    r.add_argument("--emit-dl-curve", metavar="PATH", help="write the DL curve CSV (mdl)")
    r.add_argument("--seed", type=_non_negative_int, default=0, help="accepted for uniformity; unused")
    r.add_argument("-o", "--output", required=True)

    e = sub.add_parser("evaluate", help="compare a reconstruction with the truth")
    e.add_argument("--truth", required=True)
    e.add_argument("--recon", required=True)
    e.add_argument("--traces", help="also compute the performance bounds")
    e.add_argument("--format", choices=("kv", "csv"), default="kv")
    e.add_argument("--seed", type=_non_negative_int, default=0, help="accepted for uniformity; unused")
    e.add_argument("-o", "--output", help="default: stdout")

    x = sub.add_parser("experiment", help="parameter sweep to CSV")
    x.add_argument("preset", choices=tuple(PRESET_DEFAULTS))
    x.add_argument("--nodes", type=_positive_int, default=100)
    x.add_argument("--avg-degree", type=float, default=2.0)
    x.add_argument("--markers", help="comma-separated, strictly increasing")
    x.add_argument("--seeds", type=_positive_int, default=10, help="number of replicates")
    x.add_argument("--p-loss", help="comma-separated loss probabilities")
    x.add_argument("--methods", help="comma-separated subset of " + ",".join(experiment.METHODS))
    x.add_argument("--p-infect", type=_probability, default=0.1)
    x.add_argument("--p-recover", type=_probability, default=0.1)
    x.add_argument("--min-length", type=_non_negative_int, default=1)
    x.add_argument("--jobs", type=_positive_int, default=1)
    x.add_argument("--seed", type=_non_negative_int, default=0, help="base seed")
    x.add_argument("-o", "--output", required=True)
    for sp in sub.choices.values():
        sp.set_defaults(subparser=sp)
    return parser


def cmd_generate(args, parser) -> None:
    if args.edge_prob is not None:
        p = args.edge_prob
    else:
        k = 2.0 if args.avg_degree is None else args.avg_degree
        p = k / args.nodes
        if not 0.0 <= p <= 1.0:
            parser.error(f"--avg-degree {k} gives edge probability {p} outside [0, 1]")
    save_network(generate_er(args.nodes, p, args.seed), args.output)


def cmd_simulate(args, parser) -> None:
    net = load_network(args.network)
    params = SirParams(args.p_infect, args.p_recover, args.min_length)
    ds = simulate_dataset(net, params, args.markers, child_seed(args.seed, 0))
    ds = apply_noise(ds, NoiseParams(args.p_loss), child_seed(args.seed, 1))
    save_traces(ds, args.output)


def cmd_reconstruct(args, parser) -> None:
    if args.emit_plan and args.method not in ("cover", "mdl"):
        parser.error("--emit-plan needs --method cover or mdl")
    if args.emit_dl_curve and args.method != "mdl":
        parser.error("--emit-dl-curve needs --method mdl")
    ds = load_traces(args.traces)
    plan = curve = None
    if args.method in ("cover", "mdl"):
        net, plan = reconstruct_cover(ds)
        if args.method == "mdl":
            net, curve = reconstruct_mdl(ds)
    elif args.method == "naive1":
        net = naive1(ds)
    else:
        net = naive2(ds)
    if plan is not None and args.emit_plan:
        save_plan(plan, args.emit_plan)
    if curve is not None and args.emit_dl_curve:
        save_dl_curve(curve, args.emit_dl_curve)
    save_network(net, args.output)


def cmd_evaluate(args, parser) -> None:
    truth = load_network(args.truth)
    recon = load_network(args.recon)
    b = None
    if args.traces:
        ds = load_traces(args.traces, truth.node_count)
        if not truth.edges:
            raise ValueError("bounds need a truth network with at least one edge")
        b = analysis.bounds(ds, len(truth), truth.node_count)
    report = analysis.evaluate(truth, recon, b)
    text = analysis.format_report(report) if args.format == "kv" else analysis.format_report_csv(report)
    if args.output:
        atomic_write_text(args.output, text)
    else:
        sys.stdout.write(text)


def _split(text: str, kind, flag: str, parser):
    try:
        return tuple(kind(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        parser.error(f"{flag}: cannot parse {text!r}")


def cmd_experiment(args, parser) -> None:
    defaults = PRESET_DEFAULTS[args.preset]
    markers = _split(args.markers or defaults["markers"], int, "--markers", parser)
    losses = _split(args.p_loss or defaults["p_loss"], float, "--p-loss", parser)
    methods = _split(args.methods or defaults["methods"], str.strip, "--methods", parser)
    try:
        cfg = experiment.ExperimentConfig(
            node_count=args.nodes,
            avg_degree=args.avg_degree,
            sir=SirParams(args.p_infect, args.p_recover, args.min_length),
            marker_counts=markers,
            seeds=tuple(range(args.seeds)),
            p_losses=losses,
            methods=methods,
            base_seed=args.seed,
        )
    except ValueError as exc:
        parser.error(str(exc))
    if args.preset == "fig2":
        rows = experiment.run_curves(cfg, args.jobs)
    else:
        rows = experiment.run_grid(cfg, args.jobs)
    atomic_write_text(args.output, experiment.rows_to_csv(rows, experiment.PRESET_COLUMNS[args.preset]))


COMMANDS = {
    "generate": cmd_generate,
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "evaluate": cmd_evaluate,
    "experiment": cmd_experiment,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args, args.subparser)
    except (OSError, ValueError) as exc:
        print(f"causalcover {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
