"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from typing import List, Optional

from .energy import (
    PRESETS,
    EnergyWeights,
    EnumerationCapError,
    MissingProbabilityError,
    base_energy,
    exact_distribution,
)
from .graph import GraphConfig, UnusedProbabilityWarning, build_graph
from .harness import GeneratorConfig, OrientationMode, emit_trace, generate_scene, run_benchmark
from .inference import (
    AnnealConfig,
    consistency_energy,
    exhaustive_map,
    hard_labels,
    infer,
    ussa_map,
)
from .potentials import ProbClamp
from .scene import SceneError, dumps_scene, load_scene

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
DISTRIBUTION_MAX_N = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _weight_flags(p):
    g = p.add_argument_group("energy weights")
    g.add_argument("--preset", choices=sorted(PRESETS), default="jaad-infer")
    for name in ("alpha", "beta", "gamma"):
        g.add_argument(f"--{name}", type=float, help="overrides the preset")
    g.add_argument("--lambda1", type=float, default=0.5)
    g.add_argument("--lambda2", type=float, default=0.3)
    p.add_argument("--delta-d", type=float, default=50.0, help="graph distance threshold, pixels")
    p.add_argument("--log-eps", type=float, default=1e-7, help="probability clamp for logarithms")


def _anneal_flags(p):
    g = p.add_argument_group("annealing")
    g.add_argument("--tau0", type=float, default=1.0)
    g.add_argument("--cooling", type=float, default=0.95)
    g.add_argument("--max-iters", type=int, default=None, help="default max(64, 20 n)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--exhaustive-threshold", type=int, default=3)


def _generator_flags(p, seed_flag):
    p.add_argument("--n", type=int, default=5, dest="n_pedestrians")
    p.add_argument(seed_flag, type=int, default=0, dest="gen_seed")
    p.add_argument("--confidence", type=float, default=0.9)
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--arena", type=float, nargs=2, default=(640.0, 360.0), metavar=("W", "H"))
    p.add_argument("--orientation", choices=[m.value for m in OrientationMode], default="clustered")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crfintent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("infer", help="MAP labels for a scene file")
    p.add_argument("scene")
    _weight_flags(p)
    _anneal_flags(p)

    p = sub.add_parser("exact", help="exhaustive MAP, optionally the full Gibbs table")
    p.add_argument("scene")
    p.add_argument("--distribution", action="store_true")
    _weight_flags(p)

    p = sub.add_parser("generate", help="write a synthetic scene file")
    _generator_flags(p, "--seed")
    p.add_argument("-o", "--output", help="default: stdout")

    p = sub.add_parser("bench", help="benchmark U-SSA against the exhaustive oracle")
    _generator_flags(p, "--scene-seed")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("-o", "--output", help="report JSON path, default: stdout")
    _weight_flags(p)
    _anneal_flags(p)

    p = sub.add_parser("trace", help="run U-SSA and write its energy trace as CSV")
    p.add_argument("scene")
    p.add_argument("-o", "--output", required=True)
    _weight_flags(p)
    _anneal_flags(p)
    return parser


def _weights(args) -> EnergyWeights:
    w = EnergyWeights.preset(args.preset)
    overrides = {k: getattr(args, k) for k in ("alpha", "beta", "gamma") if getattr(args, k) is not None}
    return w.with_(lambda1=args.lambda1, lambda2=args.lambda2, **overrides)


def _anneal(args) -> AnnealConfig:
    return AnnealConfig(args.tau0, args.cooling, args.max_iters, args.seed, args.exhaustive_threshold)


def _generator(args) -> GeneratorConfig:
    return GeneratorConfig(
        args.n_pedestrians,
        args.gen_seed,
        args.confidence,
        args.frames,
        tuple(args.arena),
        OrientationMode(args.orientation),
    )


def _label_name(y: int) -> str:
    return "C" if y == 1 else "NC"


def _cmd_infer(args, out):
    w, cfg, clamp = _weights(args), _anneal(args), ProbClamp(args.log_eps)
    scene = load_scene(args.scene)
    graph = build_graph(scene, GraphConfig(args.delta_d))
    result = infer(scene, graph, w, cfg, clamp)
    for pid, y in zip(graph.ped_nodes, result.labels):
        print(f"{pid} → {_label_name(y)}", file=out)
    b = base_energy(scene, graph, result.labels, w, clamp)
    e_pp, e_pe = consistency_energy(result.labels, graph, hard_labels(scene, graph))
    print(f"method: {result.method.value}", file=out)
    print(
        f"unary: {b.unary_sum:.6f}  pp: {b.pp_sum:.6f}  pe: {b.pe_sum:.6f}  "
        f"base: {b.total:.6f}  pp_mismatch: {e_pp:g}  pe_mismatch: {e_pe:g}",
        file=out,
    )
    print(f"total energy: {result.energy:.6f}", file=out)


def _cmd_exact(args, out):
    w, clamp = _weights(args), ProbClamp(args.log_eps)
    scene = load_scene(args.scene)
    graph = build_graph(scene, GraphConfig(args.delta_d))
    if args.distribution and graph.n > DISTRIBUTION_MAX_N:
        raise EnumerationCapError(
            f"--distribution supports at most {DISTRIBUTION_MAX_N} pedestrians, scene has {graph.n}"
        )
    result = exhaustive_map(scene, graph, w, hard_labels(scene, graph), clamp)
    for pid, y in zip(graph.ped_nodes, result.labels):
        print(f"{pid} → {_label_name(y)}", file=out)
    print(f"total energy: {result.energy:.6f}", file=out)
    if args.distribution:
        print("configuration\tprobability", file=out)
        for y, p in exact_distribution(scene, graph, w, clamp).items():
            print(f"{''.join(map(str, y))}\t{p!r}", file=out)


def _write(text: str, path: Optional[str], out):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def _cmd_generate(args, out):
    _write(dumps_scene(generate_scene(_generator(args))), args.output, out)


def _cmd_bench(args, out):
    if args.trials < 0:
        raise UsageError("--trials must be non-negative")
    report = run_benchmark(
        _generator(args), args.trials, _weights(args), _anneal(args), GraphConfig(args.delta_d),
        ProbClamp(args.log_eps),
    )
    _write(report.to_json(), args.output, out)


def _cmd_trace(args, out):
    w, cfg, clamp = _weights(args), _anneal(args), ProbClamp(args.log_eps)
    scene = load_scene(args.scene)
    graph = build_graph(scene, GraphConfig(args.delta_d))
    result = ussa_map(scene, graph, w, hard_labels(scene, graph), cfg, clamp)
    emit_trace(result, args.output)
    print(
        f"{len(result.trace)} evaluations, best energy {result.energy:.6f} "
        f"at evaluation {result.evaluations_to_best}",
        file=out,
    )


COMMANDS = {
    "infer": _cmd_infer,
    "exact": _cmd_exact,
    "generate": _cmd_generate,
    "bench": _cmd_bench,
    "trace": _cmd_trace,
}


def cli_main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code or EXIT_OK

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", UnusedProbabilityWarning)
            COMMANDS[args.command](args, out)
        for msg in caught:
            print(f"crfintent: warning: {msg.message}", file=err)
    except UsageError as exc:
        print(f"crfintent: {exc}", file=err)
        return EXIT_USAGE
    except (SceneError, MissingProbabilityError, EnumerationCapError, OSError) as exc:
        print(f"crfintent: {exc}", file=err)
        return EXIT_DATA
    except ValueError as exc:
        # raised by config constructors for out-of-range flag values
        print(f"crfintent: {exc}", file=err)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(cli_main())
