"""Scene data model and the JSON scene file format."""

from __future__ import annotations

import enum
import json
import os
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

Box = Tuple[float, float, float, float]
PairKey = Tuple[str, str]


class SceneError(Exception):
    """Base class for scene loading and validation failures."""


class SceneFormatError(SceneError):
    """The scene file is malformed or lacks a required field."""


class SceneValidationError(SceneError):
    """The scene parsed but violates one or more invariants."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(v.message for v in report.violations))


class Orientation(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    UNKNOWN = None

    @classmethod
    def parse(cls, value) -> "Orientation":
        if isinstance(value, Orientation):
            return value
        if value is None:
            return cls.UNKNOWN
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("left", "right"):
                return cls(key)
            if key in ("unknown", "none", ""):
                return cls.UNKNOWN
        raise ValueError(f"unrecognized orientation {value!r}")


def pair_key(a: str, b: str) -> PairKey:
    """Canonical key for an unordered pedestrian pair."""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class PedestrianObservation:
    """One tracked pedestrian over the observation window."""

    id: str
    boxes: Tuple[Box, ...]
    orientation: Orientation = Orientation.UNKNOWN
    unary_prob: float = 0.5

    def __post_init__(self):
        boxes = tuple(tuple(float(c) for c in b) for b in self.boxes)
        object.__setattr__(self, "boxes", boxes)
        object.__setattr__(self, "orientation", Orientation.parse(self.orientation))
        object.__setattr__(self, "unary_prob", float(self.unary_prob))

    @property
    def n_frames(self) -> int:
        return len(self.boxes)


@dataclass(frozen=True)
class Scene:
    """Pedestrians plus the provider probabilities for every node and edge.

    ``pp_probs`` is keyed by :func:`pair_key`; ``pe_probs`` and
    ``ground_truth`` by pedestrian id. Pedestrian order is significant: label
    vectors index pedestrians in this order.
    """

    pedestrians: Tuple[PedestrianObservation, ...]
    pp_probs: Dict[PairKey, Tuple[float, float, float]] = field(default_factory=dict)
    pe_probs: Dict[str, float] = field(default_factory=dict)
    ego_speed: Optional[Tuple[float, ...]] = None
    ground_truth: Optional[Dict[str, int]] = None

    def __post_init__(self):
        object.__setattr__(self, "pedestrians", tuple(self.pedestrians))
        pp = {}
        for key, probs in self.pp_probs.items():
            pp[pair_key(*key)] = tuple(float(p) for p in probs)
        object.__setattr__(self, "pp_probs", pp)
        object.__setattr__(
            self, "pe_probs", {k: float(v) for k, v in self.pe_probs.items()}
        )
        if self.ego_speed is not None:
            object.__setattr__(self, "ego_speed", tuple(float(v) for v in self.ego_speed))
        if self.ground_truth is not None:
            object.__setattr__(
                self, "ground_truth", {k: int(v) for k, v in self.ground_truth.items()}
            )

    @property
    def n(self) -> int:
        return len(self.pedestrians)

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(p.id for p in self.pedestrians)

    @property
    def unary_probs(self) -> Tuple[float, ...]:
        return tuple(p.unary_prob for p in self.pedestrians)

    def pedestrian(self, pid: str) -> PedestrianObservation:
        for p in self.pedestrians:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def truth_vector(self) -> Tuple[int, ...]:
        if self.ground_truth is None:
            raise KeyError("scene has no ground truth")
        missing = [pid for pid in self.ids if pid not in self.ground_truth]
        if missing:
            raise KeyError(f"ground truth missing for {missing}")
        return tuple(self.ground_truth[pid] for pid in self.ids)


class LabelConfiguration(tuple):
    """Binary intention vector aligned with the pedestrian order.

    1 is Crossing, 0 is Not Crossing. Behaves as a plain tuple so it can be
    hashed, compared and used as a mapping key.
    """

    def __new__(cls, labels: Sequence[int] = ()):
        values = tuple(int(v) for v in labels)
        for v in values:
            if v not in (0, 1):
                raise ValueError(f"labels must be 0 or 1, got {v}")
        return super().__new__(cls, values)

    def __repr__(self):
        return f"LabelConfiguration({tuple(self)!r})"


# ---------------------------------------------------------------------------
# JSON file format


def scene_to_dict(scene: Scene) -> dict:
    doc = {
        "pedestrians": [
            {
                "id": p.id,
                "boxes": [list(b) for b in p.boxes],
                "orientation": p.orientation.value,
                "unary_prob": p.unary_prob,
            }
            for p in scene.pedestrians
        ],
        "pp_probs": [
            {"a": a, "b": b, "probs": list(probs)}
            for (a, b), probs in scene.pp_probs.items()
        ],
        "pe_probs": dict(scene.pe_probs),
    }
    if scene.ego_speed is not None:
        doc["ego_speed"] = list(scene.ego_speed)
    if scene.ground_truth is not None:
        doc["ground_truth"] = dict(scene.ground_truth)
    return doc


def _require(obj: Mapping, key: str, where: str):
    if not isinstance(obj, Mapping):
        raise SceneFormatError(f"{where}: expected an object")
    if key not in obj:
        raise SceneFormatError(f"{where}: missing field {key!r}")
    return obj[key]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneFormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def scene_from_dict(doc: Mapping) -> Scene:
    """Build a Scene from a parsed JSON document without validating it."""
    raw_peds = _require(doc, "pedestrians", "scene")
    if not isinstance(raw_peds, list):
        raise SceneFormatError("scene: 'pedestrians' must be an array")
    peds = []
    for k, item in enumerate(raw_peds):
        where = f"pedestrians[{k}]"
        pid = _require(item, "id", where)
        if not isinstance(pid, str):
            raise SceneFormatError(f"{where}: 'id' must be a string")
        boxes = _require(item, "boxes", where)
        if not isinstance(boxes, list) or any(
            not isinstance(b, list) or len(b) != 4 for b in boxes
        ):
            raise SceneFormatError(f"{where}: 'boxes' must be an array of 4-number arrays")
        boxes = [tuple(_number(c, where) for c in b) for b in boxes]
        try:
            orientation = Orientation.parse(item.get("orientation"))
        except ValueError as exc:
            raise SceneFormatError(f"{where}: {exc}") from None
        prob = _number(_require(item, "unary_prob", where), where)
        peds.append(PedestrianObservation(pid, tuple(boxes), orientation, prob))

    pp = {}
    for k, item in enumerate(doc.get("pp_probs", []) or []):
        where = f"pp_probs[{k}]"
        a, b = _require(item, "a", where), _require(item, "b", where)
        probs = _require(item, "probs", where)
        if not isinstance(probs, list) or len(probs) != 3:
            raise SceneFormatError(f"{where}: 'probs' must be an array of 3 numbers")
        key = pair_key(str(a), str(b))
        if key in pp:
            raise SceneFormatError(f"{where}: duplicate pair {key}")
        pp[key] = tuple(_number(p, where) for p in probs)

    pe_raw = doc.get("pe_probs", {}) or {}
    if not isinstance(pe_raw, Mapping):
        raise SceneFormatError("scene: 'pe_probs' must be an object")
    pe = {str(k): _number(v, f"pe_probs[{k!r}]") for k, v in pe_raw.items()}

    ego = doc.get("ego_speed")
    if ego is not None:
        if not isinstance(ego, list):
            raise SceneFormatError("scene: 'ego_speed' must be an array")
        ego = tuple(_number(v, "ego_speed") for v in ego)

    gt = doc.get("ground_truth")
    if gt is not None:
        if not isinstance(gt, Mapping):
            raise SceneFormatError("scene: 'ground_truth' must be an object")
        gt_parsed = {}
        for k, v in gt.items():
            if isinstance(v, bool) or not isinstance(v, int):
                raise SceneFormatError(f"ground_truth[{k!r}]: expected 0 or 1")
            gt_parsed[str(k)] = v
        gt = gt_parsed

    return Scene(tuple(peds), pp, pe, ego, gt)


def load_scene(path) -> Scene:
    """Read and validate a scene file.

    Raises SceneFormatError for unparsable or incomplete documents and
    SceneValidationError when the scene breaks an invariant.
    """
    from .validation import validate_scene

    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"{path}: invalid JSON ({exc})") from None
    except UnicodeDecodeError as exc:
        raise SceneFormatError(f"{path}: not UTF-8 ({exc})") from None
    scene = scene_from_dict(doc)
    report = validate_scene(scene)
    if not report.ok:
        raise SceneValidationError(report)
    return scene


def dumps_scene(scene: Scene) -> str:
    # json emits repr() floats, which round-trip doubles exactly
    return json.dumps(scene_to_dict(scene), indent=2, allow_nan=False) + "\n"


def save_scene(scene: Scene, path) -> None:
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(dumps_scene(scene))
    os.replace(tmp, path)
