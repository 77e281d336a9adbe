import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from crfintent import IntentCRF
from crfintent.energy import EnergyWeights, training_objective
from crfintent.graph import build_graph
from crfintent.harness import GeneratorConfig, generate_scene
from crfintent.scene import save_scene


@pytest.fixture
def scenes():
    return [generate_scene(GeneratorConfig(1 + k % 6, k, 0.9)) for k in range(12)]


def test_params_round_trip():
    est = IntentCRF(alpha=2.5, beta=1.6, gamma=1.2, random_state=4)
    params = est.get_params()
    assert params["alpha"] == 2.5 and params["random_state"] == 4
    again = clone(est)
    assert again.get_params() == params
    est.set_params(cooling=0.9)
    assert est.cooling == 0.9


def test_predict_requires_fit(scenes):
    with pytest.raises(NotFittedError):
        IntentCRF().predict(scenes)


def test_fit_predict(scenes):
    est = IntentCRF().fit(scenes)
    preds = est.predict(scenes)
    assert len(preds) == len(scenes)
    for scene, y in zip(scenes, preds):
        assert y.shape == (scene.n,)
        assert set(np.unique(y)) <= {0, 1}
    assert est.n_scenes_ == len(scenes)


def test_training_loss(scenes):
    est = IntentCRF().fit(scenes)
    w = EnergyWeights()
    expected = np.mean([training_objective(s, build_graph(s), w) for s in scenes])
    assert est.training_loss_ == pytest.approx(expected, rel=1e-12)


def test_fit_with_explicit_labels(scenes):
    zeros = [np.zeros(s.n, dtype=int) for s in scenes]
    a = IntentCRF().fit(scenes).training_loss_
    b = IntentCRF().fit(scenes, zeros).training_loss_
    assert a != b


def test_score(scenes):
    est = IntentCRF().fit(scenes)
    acc = est.score(scenes)
    assert 0.5 < acc <= 1.0
    flipped = [1 - np.asarray(s.truth_vector()) for s in scenes]
    assert est.score(scenes, flipped) == pytest.approx(1.0 - acc)


def test_accepts_paths(tmp_path, scenes):
    paths = []
    for k, s in enumerate(scenes[:3]):
        save_scene(s, tmp_path / f"{k}.json")
        paths.append(tmp_path / f"{k}.json")
    est = IntentCRF().fit(paths)
    assert [p.tolist() for p in est.predict(paths)] == [p.tolist() for p in est.predict(scenes[:3])]


def test_bad_hyperparameters_surface_at_fit(scenes):
    with pytest.raises(ValueError):
        IntentCRF(cooling=1.5).fit(scenes)
