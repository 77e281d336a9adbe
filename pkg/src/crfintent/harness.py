"""Synthetic scenes, annealer-vs-oracle benchmarking and trace export."""

from __future__ import annotations

import csv
import enum
import itertools
import json
import math
import warnings
from dataclasses import asdict, dataclass, field, replace
from typing import List, Tuple

import numpy as np

from .energy import DEFAULT_ENUMERATION_CAP, EnergyWeights, EnumerationCapError
from .graph import GraphConfig, UnusedProbabilityWarning, build_graph
from .inference import (
    AnnealConfig,
    InferenceResult,
    Method,
    exhaustive_map,
    hard_labels,
    ussa_map,
)
from .potentials import DEFAULT_CLAMP, ProbClamp, interaction_state
from .scene import Orientation, PedestrianObservation, Scene, pair_key
from .validation import check_positive_int

MATCH_TOL = 1e-9
TRACE_HEADER = ("evaluation", "candidate_energy", "best_energy", "temperature")


class OrientationMode(enum.Enum):
    CLUSTERED = "clustered"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class GeneratorConfig:
    n_pedestrians: int = 5
    rng_seed: int = 0
    confidence: float = 0.9
    frame_count: int = 16
    arena: Tuple[float, float] = (640.0, 360.0)
    orientation_mode: OrientationMode = OrientationMode.CLUSTERED

    def __post_init__(self):
        check_positive_int(self.n_pedestrians, "n_pedestrians")
        check_positive_int(self.frame_count, "frame_count")
        if not (0.5 < self.confidence < 1.0):
            raise ValueError(f"confidence must lie in (0.5, 1), got {self.confidence}")
        if len(self.arena) != 2 or min(self.arena) <= 0:
            raise ValueError(f"arena dimensions must be positive, got {self.arena}")
        object.__setattr__(self, "orientation_mode", OrientationMode(self.orientation_mode))


def derive_seed(master: int, index: int) -> int:
    """Independent 64-bit seed for trial ``index`` under ``master``."""
    seq = np.random.SeedSequence([int(master), int(index)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _peaked_binary(rng, truth: int, confidence: float) -> float:
    # hard label agrees with truth with probability `confidence`
    agree = rng.random() < confidence
    strength = rng.uniform(0.51, 0.99)
    return strength if (truth == 1) == agree else 1.0 - strength


def _peaked_simplex(rng, state: int, confidence: float) -> Tuple[float, float, float]:
    peak = state
    if rng.random() >= confidence:
        peak = int(rng.choice([k for k in range(3) if k != state]))
    v = np.sort(rng.dirichlet((1.0, 1.0, 1.0)))[::-1]
    others = [k for k in range(3) if k != peak]
    rng.shuffle(others)
    out = [0.0, 0.0, 0.0]
    out[peak], out[others[0]], out[others[1]] = (float(x) for x in v)
    return tuple(out)


def generate_scene(cfg: GeneratorConfig) -> Scene:
    """Random scene with planted ground truth and probabilities sampled around it."""
    rng = np.random.default_rng(int(cfg.rng_seed))
    n, frames = cfg.n_pedestrians, cfg.frame_count
    width, height = (float(a) for a in cfg.arena)
    truth = rng.integers(0, 2, size=n).tolist()

    peds = []
    for k in range(n):
        bw = min(rng.uniform(15.0, 40.0), width / 2)
        bh = min(bw * rng.uniform(2.0, 3.0), height / 2)
        end = np.array([rng.uniform(bw / 2, width - bw / 2), rng.uniform(bh / 2, height - bh / 2)])
        velocity = rng.normal(0.0, 2.0, size=2)
        boxes = []
        for t in range(frames):
            cx, cy = end - velocity * (frames - 1 - t)
            cx = min(max(cx, bw / 2), width - bw / 2)
            cy = min(max(cy, bh / 2), height - bh / 2)
            boxes.append((cx - bw / 2, cy - bh / 2, cx + bw / 2, cy + bh / 2))
        if cfg.orientation_mode is OrientationMode.UNKNOWN:
            orientation = Orientation.UNKNOWN
        else:
            orientation = Orientation.LEFT if rng.random() < 0.5 else Orientation.RIGHT
        prob = _peaked_binary(rng, truth[k], cfg.confidence)
        peds.append(PedestrianObservation(f"p{k}", tuple(boxes), orientation, prob))

    ids = [p.id for p in peds]
    pe = {pid: _peaked_binary(rng, truth[k], cfg.confidence) for k, pid in enumerate(ids)}
    pp = {}
    for i, j in itertools.combinations(range(n), 2):
        state = int(interaction_state(truth[i], truth[j]))
        pp[pair_key(ids[i], ids[j])] = _peaked_simplex(rng, state, cfg.confidence)
    ego = tuple(float(v) for v in np.clip(rng.uniform(0, 12) + rng.normal(0, 0.3, frames), 0, None))
    return Scene(tuple(peds), pp, pe, ego, dict(zip(ids, truth)))


@dataclass(frozen=True)
class SceneOutcome:
    scene_id: str
    n: int
    method: str
    e_exact: float
    e_ussa: float
    evaluations: int
    evaluations_to_best: int


@dataclass(frozen=True)
class BenchmarkReport:
    scenes: int
    optimal_match_rate: float
    mean_evaluations_to_best: float
    mean_energy_gap: float
    seed_never_worse_rate: float
    exact_truth_accuracy: float
    ussa_truth_accuracy: float
    per_scene: List[SceneOutcome] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"


def _mean(values) -> float:
    return float(math.fsum(values) / len(values)) if values else 0.0


def run_benchmark(
    gen: GeneratorConfig,
    trials: int,
    w: EnergyWeights = EnergyWeights(),
    anneal: AnnealConfig = AnnealConfig(),
    graph_cfg: GraphConfig = GraphConfig(),
    clamp: ProbClamp = DEFAULT_CLAMP,
) -> BenchmarkReport:
    """Run U-SSA and the exhaustive oracle on ``trials`` generated scenes."""
    if gen.n_pedestrians > DEFAULT_ENUMERATION_CAP:
        raise EnumerationCapError(
            f"{gen.n_pedestrians} pedestrians exceed the exhaustive cap of {DEFAULT_ENUMERATION_CAP}"
        )
    if trials < 0:
        raise ValueError("trials must be non-negative")

    outcomes, gaps, matches, seed_ok, evals = [], [], [], [], []
    exact_hits, ussa_hits, total_nodes = 0, 0, 0
    for i in range(trials):
        scene = generate_scene(replace(gen, rng_seed=derive_seed(gen.rng_seed, i)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnusedProbabilityWarning)
            graph = build_graph(scene, graph_cfg)
        hard = hard_labels(scene, graph)
        exact = exhaustive_map(scene, graph, w, hard, clamp)
        cfg = replace(anneal, rng_seed=derive_seed(anneal.rng_seed, i))
        ussa = ussa_map(scene, graph, w, hard, cfg, clamp)

        gap = ussa.energy - exact.energy
        # the two routes sum identical table entries in different orders
        gaps.append(max(gap, 0.0))
        matches.append(abs(gap) <= MATCH_TOL)
        seed_ok.append(ussa.energy <= ussa.trace.candidate_energy[0])
        evals.append(ussa.evaluations_to_best)
        truth = scene.truth_vector()
        exact_hits += sum(a == b for a, b in zip(exact.labels, truth))
        ussa_hits += sum(a == b for a, b in zip(ussa.labels, truth))
        total_nodes += len(truth)

        method = Method.EXHAUSTIVE if graph.n <= anneal.exhaustive_threshold else Method.USSA
        outcomes.append(
            SceneOutcome(
                f"trial-{i:04d}",
                graph.n,
                method.value,
                exact.energy,
                ussa.energy,
                ussa.evaluations,
                ussa.evaluations_to_best,
            )
        )

    return BenchmarkReport(
        scenes=trials,
        optimal_match_rate=_mean(matches),
        mean_evaluations_to_best=_mean(evals),
        mean_energy_gap=_mean(gaps),
        seed_never_worse_rate=_mean(seed_ok),
        exact_truth_accuracy=exact_hits / total_nodes if total_nodes else 0.0,
        ussa_truth_accuracy=ussa_hits / total_nodes if total_nodes else 0.0,
        per_scene=outcomes,
    )


def emit_trace(result: InferenceResult, path) -> None:
    """Write the search trace as CSV, one row per energy evaluation."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for k, cand, best, temp in result.trace:
            writer.writerow((k, repr(cand), repr(best), repr(temp)))
