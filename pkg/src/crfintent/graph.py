"""Pedestrian/environment scene graph construction.

Pedestrians are split into left- and right-facing clusters. Within a
cluster two pedestrians are linked when their distance is below
``delta_d``; the two clusters are joined by a single edge between their
closest members. If any orientation is unknown the whole scene falls back to
the plain distance threshold. The environment node links to everyone.
"""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Tuple

from .scene import Orientation, PairKey, PedestrianObservation, Scene, pair_key

ENV_NODE = "env"


class UnusedProbabilityWarning(UserWarning):
    """pp_probs holds entries for pairs that are not graph edges."""


class DistanceFrame(enum.Enum):
    LAST_FRAME = "last"


@dataclass(frozen=True)
class GraphConfig:
    delta_d: float = 50.0
    distance_frame: DistanceFrame = DistanceFrame.LAST_FRAME

    def __post_init__(self):
        if not (math.isfinite(self.delta_d) and self.delta_d > 0):
            raise ValueError(f"delta_d must be positive, got {self.delta_d}")


@dataclass(frozen=True)
class SceneGraph:
    ped_nodes: Tuple[str, ...]
    pp_edges: Tuple[PairKey, ...]
    pe_edges: Tuple[str, ...]
    env_node: str = ENV_NODE
    clustered: bool = False

    @property
    def n(self) -> int:
        return len(self.ped_nodes)

    def index(self, pid: str) -> int:
        return self.ped_nodes.index(pid)

    def edge_indices(self) -> Tuple[Tuple[int, int], ...]:
        pos = {pid: k for k, pid in enumerate(self.ped_nodes)}
        return tuple((pos[a], pos[b]) for a, b in self.pp_edges)


def pedestrian_center(obs: PedestrianObservation, frame_index: int) -> Tuple[float, float]:
    if not -len(obs.boxes) <= frame_index < len(obs.boxes):
        raise IndexError(
            f"frame {frame_index} out of range for {obs.id!r} with {len(obs.boxes)} frames"
        )
    x0, y0, x1, y1 = obs.boxes[frame_index]
    return ((x0 + x1) / 2.0, (y0 + y1) / 2.0)


def pairwise_distance(
    a: PedestrianObservation, b: PedestrianObservation, cfg: GraphConfig = GraphConfig()
) -> float:
    """Euclidean distance between the last-frame box centers."""
    if a.n_frames != b.n_frames:
        raise ValueError(
            f"sequence length mismatch: {a.id!r} has {a.n_frames}, {b.id!r} has {b.n_frames}"
        )
    ax, ay = pedestrian_center(a, a.n_frames - 1)
    bx, by = pedestrian_center(b, b.n_frames - 1)
    return math.hypot(ax - bx, ay - by)


def build_graph(scene: Scene, cfg: GraphConfig = GraphConfig()) -> SceneGraph:
    peds = scene.pedestrians
    ids = tuple(p.id for p in peds)
    clustered = all(p.orientation is not Orientation.UNKNOWN for p in peds)

    edges = set()
    if clustered:
        left = [p for p in peds if p.orientation is Orientation.LEFT]
        right = [p for p in peds if p.orientation is Orientation.RIGHT]
        for group in (left, right):
            for a, b in itertools.combinations(group, 2):
                if pairwise_distance(a, b, cfg) < cfg.delta_d:
                    edges.add(pair_key(a.id, b.id))
        if left and right:
            # deliberately ignores delta_d
            best = min(
                ((pairwise_distance(a, b, cfg), pair_key(a.id, b.id)) for a in left for b in right)
            )
            edges.add(best[1])
    else:
        for a, b in itertools.combinations(peds, 2):
            if pairwise_distance(a, b, cfg) < cfg.delta_d:
                edges.add(pair_key(a.id, b.id))

    # order edges by node position so label-vector code sees a stable layout
    pos = {pid: k for k, pid in enumerate(ids)}
    pp_edges = tuple(sorted(edges, key=lambda e: sorted((pos[e[0]], pos[e[1]]))))

    unused = [k for k in scene.pp_probs if k not in edges]
    if unused:
        warnings.warn(
            f"{len(unused)} pp_probs entries are not graph edges and will be ignored",
            UnusedProbabilityWarning,
            stacklevel=2,
        )
    return SceneGraph(ids, pp_edges, ids, ENV_NODE, clustered)
