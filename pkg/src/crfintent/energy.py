"""Weighted CRF energy, exact Gibbs distribution and the training data term."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict

import numpy as np

from .graph import SceneGraph
from .potentials import (
    DEFAULT_CLAMP,
    ProbClamp,
    interaction_state,
    pe_potential,
    pp_potential,
    unary_potential,
)
from .scene import LabelConfiguration, Scene
from .validation import check_labels

DEFAULT_ENUMERATION_CAP = 20


class MissingProbabilityError(ValueError):
    """A graph node or edge has no supplied probability."""


class EnumerationCapError(ValueError):
    """The scene is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class EnergyWeights:
    """Base-energy weights (alpha, beta, gamma) and consistency weights (lambda1, lambda2)."""

    alpha: float = 5.3
    beta: float = 0.7
    gamma: float = 2.5
    lambda1: float = 0.5
    lambda2: float = 0.3

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "lambda1", "lambda2"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
        if self.alpha == 0:
            raise ValueError("alpha must be strictly positive")

    @classmethod
    def preset(cls, name: str) -> "EnergyWeights":
        try:
            a, b, g = PRESETS[name]
        except KeyError:
            raise ValueError(
                f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
            ) from None
        return cls(a, b, g, 0.5, 0.3)

    def scaled(self, c: float) -> "EnergyWeights":
        return EnergyWeights(
            self.alpha * c, self.beta * c, self.gamma * c, self.lambda1 * c, self.lambda2 * c
        )

    def with_(self, **changes) -> "EnergyWeights":
        return replace(self, **changes)


# (alpha, beta, gamma); lambda1 = 0.5 and lambda2 = 0.3 throughout
PRESETS = {
    "jaad-train": (5.0, 0.5, 2.5),
    "jaad-infer": (5.3, 0.7, 2.5),
    "pie-train": (2.0, 1.5, 1.0),
    "pie-infer": (2.5, 1.6, 1.2),
}


@dataclass(frozen=True)
class EnergyBreakdown:
    unary_sum: float
    pp_sum: float
    pe_sum: float
    total: float


def _pp_probs(scene: Scene, edge):
    try:
        return scene.pp_probs[edge]
    except KeyError:
        raise MissingProbabilityError(f"no pp_probs entry for edge {edge}") from None


def _pe_prob(scene: Scene, pid: str) -> float:
    try:
        return scene.pe_probs[pid]
    except KeyError:
        raise MissingProbabilityError(f"no pe_probs entry for pedestrian {pid!r}") from None


def base_energy(
    scene: Scene,
    graph: SceneGraph,
    y,
    w: EnergyWeights,
    clamp: ProbClamp = DEFAULT_CLAMP,
) -> EnergyBreakdown:
    """Evaluate the weighted unary + P-P + P-E energy of one configuration."""
    labels = check_labels(y, graph.n).tolist()
    pos = {pid: k for k, pid in enumerate(graph.ped_nodes)}
    probs = dict(zip(scene.ids, scene.unary_probs))

    unary = math.fsum(
        unary_potential(labels[k], probs[pid], clamp) for k, pid in enumerate(graph.ped_nodes)
    )
    pp = math.fsum(
        pp_potential(labels[pos[a]], labels[pos[b]], _pp_probs(scene, (a, b)), clamp)
        for a, b in graph.pp_edges
    )
    pe = math.fsum(
        pe_potential(labels[pos[pid]], _pe_prob(scene, pid), clamp) for pid in graph.pe_edges
    )
    total = w.alpha * unary + w.beta * pp + w.gamma * pe
    return EnergyBreakdown(unary, pp, pe, total)


def training_objective(
    scene: Scene, graph: SceneGraph, w: EnergyWeights, clamp: ProbClamp = DEFAULT_CLAMP
) -> float:
    """Base energy of the ground-truth configuration (the data term of the loss)."""
    if scene.ground_truth is None:
        raise ValueError("scene has no ground truth")
    try:
        truth = [scene.ground_truth[pid] for pid in graph.ped_nodes]
    except KeyError as exc:
        raise ValueError(f"ground truth missing for pedestrian {exc.args[0]!r}") from None
    return base_energy(scene, graph, truth, w, clamp).total


# ---------------------------------------------------------------------------
# Vectorized evaluation


_CHUNK = 1 << 15


def all_configurations(n: int, start: int = 0, stop: int = None) -> np.ndarray:
    """Binary vectors of length ``n``, one per row, in lexicographic order.

    Row ``k`` is the big-endian binary expansion of ``start + k``.
    """
    stop = 2**n if stop is None else stop
    codes = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.intp)


class EnergyTable:
    """Per-node and per-edge cost tables for fast repeated evaluation.

    ``node_costs[i, y]`` and ``edge_costs[e, y_a, y_b]`` already include the
    weights, so the energy of a configuration is a plain table lookup sum.
    When hard labels are supplied, the consistency indicators are folded in
    as well and the table evaluates the inference energy.
    """

    def __init__(self, node_costs: np.ndarray, edges: np.ndarray, edge_costs: np.ndarray):
        self.node_costs = np.asarray(node_costs, dtype=np.float64)
        self.edges = np.asarray(edges, dtype=np.intp).reshape(-1, 2)
        self.edge_costs = np.asarray(edge_costs, dtype=np.float64).reshape(-1, 2, 2)
        self._rows = np.arange(self.n)
        self._erows = np.arange(len(self.edges))

    @property
    def n(self) -> int:
        return self.node_costs.shape[0]

    @classmethod
    def build(
        cls,
        scene: Scene,
        graph: SceneGraph,
        w: EnergyWeights,
        clamp: ProbClamp = DEFAULT_CLAMP,
        hard=None,
    ) -> "EnergyTable":
        n = graph.n
        probs = dict(zip(scene.ids, scene.unary_probs))
        node = np.zeros((n, 2))
        for k, pid in enumerate(graph.ped_nodes):
            p_e = _pe_prob(scene, pid)
            for y in (0, 1):
                node[k, y] = w.alpha * unary_potential(y, probs[pid], clamp) + w.gamma * pe_potential(
                    y, p_e, clamp
                )
                if hard is not None and y != hard.pe_hard[pid]:
                    node[k, y] += w.lambda2
        edges = np.array(graph.edge_indices(), dtype=np.intp).reshape(-1, 2)
        costs = np.zeros((len(edges), 2, 2))
        for e, key in enumerate(graph.pp_edges):
            probs3 = _pp_probs(scene, key)
            for ya in (0, 1):
                for yb in (0, 1):
                    c = w.beta * pp_potential(ya, yb, probs3, clamp)
                    if hard is not None and interaction_state(ya, yb) != hard.pp_hard[key]:
                        c += w.lambda1
                    costs[e, ya, yb] = c
        return cls(node, edges, costs)

    def energy(self, y) -> float:
        y = np.asarray(y, dtype=np.intp)
        total = self.node_costs[self._rows, y].sum()
        if len(self.edges):
            total += self.edge_costs[self._erows, y[self.edges[:, 0]], y[self.edges[:, 1]]].sum()
        return float(total)

    def energies(self, Y: np.ndarray) -> np.ndarray:
        Y = np.asarray(Y)
        total = self.node_costs[self._rows, Y].sum(axis=1)
        if len(self.edges):
            total = total + self.edge_costs[
                self._erows, Y[:, self.edges[:, 0]], Y[:, self.edges[:, 1]]
            ].sum(axis=1)
        return total

    def all_energies(self) -> np.ndarray:
        """Energies of all 2**n configurations in lexicographic order."""
        total = 2**self.n
        out = np.empty(total)
        for start in range(0, total, _CHUNK):
            stop = min(start + _CHUNK, total)
            out[start:stop] = self.energies(all_configurations(self.n, start, stop))
        return out


def _check_cap(n: int, max_n: int) -> None:
    if n > max_n:
        raise EnumerationCapError(
            f"{n} pedestrians exceed the exhaustive enumeration cap of {max_n}"
        )


def log_partition(energies: np.ndarray) -> float:
    """log sum exp(-E), shifted by the lowest energy."""
    e_min = energies.min()
    return float(-e_min + math.log(np.exp(-(energies - e_min)).sum()))


def gibbs_probabilities(
    scene: Scene,
    graph: SceneGraph,
    w: EnergyWeights,
    clamp: ProbClamp = DEFAULT_CLAMP,
    max_n: int = DEFAULT_ENUMERATION_CAP,
):
    """Configurations (rows, lexicographic order) and their Gibbs probabilities."""
    _check_cap(graph.n, max_n)
    E = EnergyTable.build(scene, graph, w, clamp).all_energies()
    return all_configurations(graph.n), np.exp(-E - log_partition(E))


def exact_distribution(
    scene: Scene,
    graph: SceneGraph,
    w: EnergyWeights,
    clamp: ProbClamp = DEFAULT_CLAMP,
    max_n: int = DEFAULT_ENUMERATION_CAP,
) -> Dict[LabelConfiguration, float]:
    """Enumerate P(y) = exp(-E(y)) / Z over all 2**n configurations."""
    Y, P = gibbs_probabilities(scene, graph, w, clamp, max_n)
    return {LabelConfiguration(row): float(p) for row, p in zip(Y.tolist(), P)}


def node_marginals(distribution: Dict[LabelConfiguration, float], n: int) -> np.ndarray:
    """P(y_i = 1) for each node from a full distribution table."""
    out = np.zeros(n)
    for y, p in distribution.items():
        out += p * np.asarray(y, dtype=np.float64)
    return out
