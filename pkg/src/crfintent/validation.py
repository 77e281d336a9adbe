"""Scene invariant checks and input coercion helpers."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import List, Mapping, Sequence, Tuple

import numpy as np

from .scene import (
    LabelConfiguration,
    Scene,
    SceneValidationError,
    load_scene,
    scene_from_dict,
)

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def codes(self) -> List[str]:
        return [v.code for v in self.violations]


def _is_prob(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x) and 0.0 <= x <= 1.0


def is_simplex(probs: Sequence[float], tol: float = SIMPLEX_TOL) -> bool:
    if len(probs) != 3:
        return False
    if any(not math.isfinite(p) or p < 0.0 for p in probs):
        return False
    return abs(math.fsum(probs) - 1.0) <= tol


def validate_scene(scene: Scene) -> ValidationReport:
    """List every invariant the scene breaks; an empty report means valid."""
    out: List[Violation] = []

    def add(code, msg):
        out.append(Violation(code, msg))

    peds = scene.pedestrians
    if len(peds) == 0:
        add("empty_scene", "scene must contain at least one pedestrian")

    ids = [p.id for p in peds]
    seen = set()
    for pid in ids:
        if pid in seen:
            add("duplicate_id", f"pedestrian id {pid!r} appears more than once")
        seen.add(pid)
    known = set(ids)

    lengths = set()
    for p in peds:
        if not p.boxes:
            add("empty_boxes", f"pedestrian {p.id!r} has no bounding boxes")
        lengths.add(len(p.boxes))
        for t, box in enumerate(p.boxes):
            if len(box) != 4 or not all(math.isfinite(c) for c in box):
                add("bad_box", f"pedestrian {p.id!r} frame {t}: box must be 4 finite numbers")
                continue
            x0, y0, x1, y1 = box
            if not (x0 < x1 and y0 < y1):
                add("degenerate_box", f"pedestrian {p.id!r} frame {t}: box {box} has min >= max")
        if not _is_prob(p.unary_prob):
            add("unary_range", f"pedestrian {p.id!r}: unary_prob {p.unary_prob} outside [0, 1]")
    if len(lengths) > 1:
        add("length_mismatch", f"pedestrians have unequal sequence lengths {sorted(lengths)}")

    if scene.ego_speed is not None:
        if any(not math.isfinite(v) for v in scene.ego_speed):
            add("ego_speed", "ego_speed contains non-finite values")
        if len(lengths) == 1 and len(scene.ego_speed) != next(iter(lengths)):
            add("ego_speed", "ego_speed length differs from the box sequence length")

    for (a, b), probs in scene.pp_probs.items():
        if a == b:
            add("self_pair", f"pp_probs pair ({a!r}, {b!r}) is a self-pair")
        for pid in (a, b):
            if pid not in known:
                add("dangling_ref", f"pp_probs references unknown id {pid!r}")
        if not is_simplex(probs):
            add("simplex", f"pp_probs ({a!r}, {b!r}) = {list(probs)} is not a probability simplex")

    for pid, p in scene.pe_probs.items():
        if pid not in known:
            add("dangling_ref", f"pe_probs references unknown id {pid!r}")
        if not _is_prob(p):
            add("pe_range", f"pe_probs[{pid!r}] = {p} outside [0, 1]")

    if scene.ground_truth is not None:
        for pid, v in scene.ground_truth.items():
            if pid not in known:
                add("dangling_ref", f"ground_truth references unknown id {pid!r}")
            if v not in (0, 1):
                add("label_range", f"ground_truth[{pid!r}] = {v} is not 0 or 1")

    return ValidationReport(tuple(out))


def check_scene(scene) -> Scene:
    """Coerce a Scene, a path to a scene file, or a parsed document to a valid Scene."""
    if isinstance(scene, (str, os.PathLike)):
        return load_scene(scene)
    if isinstance(scene, Mapping):
        scene = scene_from_dict(scene)
    if not isinstance(scene, Scene):
        raise TypeError(f"expected a Scene, path or mapping, got {type(scene).__name__}")
    report = validate_scene(scene)
    if not report.ok:
        raise SceneValidationError(report)
    return scene


def check_scenes(X) -> List[Scene]:
    if isinstance(X, (Scene, str, os.PathLike, Mapping)):
        X = [X]
    return [check_scene(s) for s in X]


def check_labels(y, n: int) -> np.ndarray:
    """Return ``y`` as an int8 vector of length ``n`` with values in {0, 1}."""
    arr = np.asarray(y)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ValueError(f"label vector must have shape ({n},), got {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return arr.astype(np.int8)


def as_configuration(y, n: int) -> LabelConfiguration:
    return LabelConfiguration(check_labels(y, n).tolist())


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
