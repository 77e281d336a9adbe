"""MAP inference over the inference energy.

The inference energy adds two consistency counts to the base energy:
P-P edges whose interaction state disagrees with the argmax of the edge
distribution, and nodes whose label disagrees with the thresholded
environment probability. Small scenes are solved by enumeration, larger ones
by simulated annealing started from the thresholded unary probabilities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from .energy import (
    DEFAULT_ENUMERATION_CAP,
    EnergyTable,
    EnergyWeights,
    EnumerationCapError,
    MissingProbabilityError,
    all_configurations,
    base_energy,
)
from .graph import SceneGraph
from .potentials import DEFAULT_CLAMP, ProbClamp, interaction_state
from .scene import LabelConfiguration, PairKey, Scene
from .validation import check_labels, check_positive_int

# relative slack under which two enumerated energies count as a tie
TIE_RTOL = 1e-12


class Method(enum.Enum):
    EXHAUSTIVE = "exhaustive"
    USSA = "ussa"


@dataclass(frozen=True)
class HardLabels:
    node_hard: Dict[str, int]
    pp_hard: Dict[PairKey, int]
    pe_hard: Dict[str, int]

    def seed(self, graph: SceneGraph) -> LabelConfiguration:
        return LabelConfiguration(self.node_hard[pid] for pid in graph.ped_nodes)


@dataclass(frozen=True)
class AnnealConfig:
    tau0: float = 1.0
    cooling: float = 0.95
    max_iters: Optional[int] = None  # None -> max(64, 20 * n)
    rng_seed: int = 0
    exhaustive_threshold: int = 3

    def __post_init__(self):
        if not (math.isfinite(self.tau0) and self.tau0 > 0):
            raise ValueError(f"tau0 must be positive, got {self.tau0}")
        if not (0.0 < self.cooling < 1.0):
            raise ValueError(f"cooling must lie in (0, 1), got {self.cooling}")
        if self.max_iters is not None:
            check_positive_int(self.max_iters, "max_iters")
        check_positive_int(self.exhaustive_threshold, "exhaustive_threshold")
        if not (0 <= int(self.rng_seed) < 2**64):
            raise ValueError("rng_seed must be an unsigned 64-bit integer")

    def iterations(self, n: int) -> int:
        return self.max_iters if self.max_iters is not None else max(64, 20 * n)


@dataclass(frozen=True, eq=False)
class Trace:
    """Per-evaluation record of a search, stored column-wise."""

    evaluation: np.ndarray
    candidate_energy: np.ndarray
    best_energy: np.ndarray
    temperature: np.ndarray

    def __len__(self):
        return len(self.evaluation)

    def __iter__(self) -> Iterator[Tuple[int, float, float, float]]:
        for row in zip(
            self.evaluation.tolist(),
            self.candidate_energy.tolist(),
            self.best_energy.tolist(),
            self.temperature.tolist(),
        ):
            yield row

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f), getattr(other, f), equal_nan=True)
            for f in ("evaluation", "candidate_energy", "best_energy", "temperature")
        )


@dataclass(frozen=True)
class InferenceResult:
    labels: LabelConfiguration
    energy: float
    trace: Trace = field(repr=False)
    evaluations: int
    evaluations_to_best: int
    method: Method


def hard_labels(scene: Scene, graph: SceneGraph) -> HardLabels:
    """Threshold node and P-E probabilities at > 0.5; argmax P-P distributions.

    Argmax ties go to the smallest state index.
    """
    probs = dict(zip(scene.ids, scene.unary_probs))
    node = {pid: int(probs[pid] > 0.5) for pid in graph.ped_nodes}
    pe = {}
    for pid in graph.pe_edges:
        if pid not in scene.pe_probs:
            raise MissingProbabilityError(f"no pe_probs entry for pedestrian {pid!r}")
        pe[pid] = int(scene.pe_probs[pid] > 0.5)
    pp = {}
    for key in graph.pp_edges:
        if key not in scene.pp_probs:
            raise MissingProbabilityError(f"no pp_probs entry for edge {key}")
        p = scene.pp_probs[key]
        pp[key] = max(range(3), key=lambda k: (p[k], -k))
    return HardLabels(node, pp, pe)


def consistency_energy(y, graph: SceneGraph, hard: HardLabels) -> Tuple[float, float]:
    """Count P-P and P-E disagreements with the hard labels."""
    labels = check_labels(y, graph.n).tolist()
    pos = {pid: k for k, pid in enumerate(graph.ped_nodes)}
    e_pp = sum(
        interaction_state(labels[pos[a]], labels[pos[b]]) != hard.pp_hard[(a, b)]
        for a, b in graph.pp_edges
    )
    e_pe = sum(labels[pos[pid]] != hard.pe_hard[pid] for pid in graph.pe_edges)
    return float(e_pp), float(e_pe)


def inference_energy(
    scene: Scene,
    graph: SceneGraph,
    y,
    w: EnergyWeights,
    hard: HardLabels,
    clamp: ProbClamp = DEFAULT_CLAMP,
) -> float:
    e_pp, e_pe = consistency_energy(y, graph, hard)
    return base_energy(scene, graph, y, w, clamp).total + w.lambda1 * e_pp + w.lambda2 * e_pe


def exhaustive_map(
    scene: Scene,
    graph: SceneGraph,
    w: EnergyWeights,
    hard: HardLabels,
    clamp: ProbClamp = DEFAULT_CLAMP,
    max_n: int = DEFAULT_ENUMERATION_CAP,
) -> InferenceResult:
    """Global minimizer by enumerating all 2**n configurations.

    Ties (within a 1e-12 relative slack) resolve to the lexicographically
    smallest label vector, which is the first one enumerated.
    """
    n = graph.n
    if n > max_n:
        raise EnumerationCapError(f"{n} pedestrians exceed the exhaustive cap of {max_n}")
    table = EnergyTable.build(scene, graph, w, clamp, hard)
    E = table.all_energies()
    e_min = E.min()
    best = int(np.flatnonzero(E <= e_min + TIE_RTOL * max(1.0, abs(e_min)))[0])
    labels = LabelConfiguration(all_configurations(n, best, best + 1)[0].tolist())
    trace = Trace(
        evaluation=np.arange(len(E)),
        candidate_energy=E,
        best_energy=np.minimum.accumulate(E),
        temperature=np.full(len(E), np.nan),
    )
    return InferenceResult(labels, float(E[best]), trace, len(E), best + 1, Method.EXHAUSTIVE)


def acceptance_probability(delta: float, tau: float) -> float:
    """Metropolis rule: always accept downhill, else exp(-delta / tau)."""
    if delta <= 0:
        return 1.0
    return math.exp(-delta / tau)


def anneal(table: EnergyTable, initial, cfg: AnnealConfig) -> InferenceResult:
    """Single-flip simulated annealing from ``initial`` with best-so-far tracking.

    Evaluation 0 is the initial state at temperature ``tau0``; proposal ``t``
    is judged at ``tau0 * cooling**t``.
    """
    n = table.n
    iters = cfg.iterations(n)
    rng = np.random.default_rng(int(cfg.rng_seed))

    y = np.array(check_labels(initial, n), dtype=np.intp)
    current = table.energy(y)
    best_y, best_e, best_at = y.copy(), current, 0

    temps = cfg.tau0 * cfg.cooling ** np.arange(iters + 1, dtype=np.float64)
    cand = np.empty(iters + 1)
    bests = np.empty(iters + 1)
    cand[0] = bests[0] = current

    for t in range(1, iters + 1):
        i = rng.integers(n)
        y[i] ^= 1
        proposed = table.energy(y)
        cand[t] = proposed
        if proposed < best_e:
            best_y, best_e, best_at = y.copy(), proposed, t
        bests[t] = best_e
        delta = proposed - current
        if delta <= 0 or rng.random() < acceptance_probability(delta, temps[t]):
            current = proposed
        else:
            y[i] ^= 1

    trace = Trace(np.arange(iters + 1), cand, bests, temps)
    return InferenceResult(
        LabelConfiguration(best_y.tolist()), best_e, trace, iters + 1, best_at + 1, Method.USSA
    )


def ussa_map(
    scene: Scene,
    graph: SceneGraph,
    w: EnergyWeights,
    hard: HardLabels,
    cfg: AnnealConfig = AnnealConfig(),
    clamp: ProbClamp = DEFAULT_CLAMP,
) -> InferenceResult:
    """Anneal from the unary seed: y_i = 1 iff the unary probability exceeds 0.5."""
    table = EnergyTable.build(scene, graph, w, clamp, hard)
    return anneal(table, hard.seed(graph), cfg)


def infer(
    scene: Scene,
    graph: SceneGraph,
    w: EnergyWeights = EnergyWeights(),
    cfg: AnnealConfig = AnnealConfig(),
    clamp: ProbClamp = DEFAULT_CLAMP,
) -> InferenceResult:
    hard = hard_labels(scene, graph)
    if graph.n <= cfg.exhaustive_threshold:
        return exhaustive_map(scene, graph, w, hard, clamp, max_n=max(DEFAULT_ENUMERATION_CAP, graph.n))
    return ussa_map(scene, graph, w, hard, cfg, clamp)
