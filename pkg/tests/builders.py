"""Small scene constructors for tests."""

from crfintent.scene import PedestrianObservation, Scene, pair_key


def ped(pid, center=(0.0, 0.0), prob=0.5, orientation=None, frames=1, size=(10.0, 20.0)):
    cx, cy = center
    w, h = size
    box = (cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)
    return PedestrianObservation(pid, (box,) * frames, orientation, prob)


def make_scene(peds, pp=None, pe=None, ground_truth=None, ego_speed=None):
    pp = {pair_key(*k): v for k, v in (pp or {}).items()}
    if pe is None:
        pe = {p.id: 0.5 for p in peds}
    return Scene(tuple(peds), pp, pe, ego_speed, ground_truth)
