"""scikit-learn compatible front end.

``X`` is a sequence of scenes (Scene objects, parsed documents or paths to
scene files); each scene is one sample. Nothing is learned from data, since
the potentials arrive pre-computed, so ``fit`` validates its input and records
the data term of the training loss for reference.
"""

from __future__ import annotations

import warnings
from dataclasses import replace
from typing import List

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .energy import EnergyWeights, training_objective
from .graph import GraphConfig, UnusedProbabilityWarning, build_graph
from .inference import AnnealConfig, InferenceResult, infer
from .potentials import ProbClamp
from .validation import check_labels, check_scenes


class IntentCRF(BaseEstimator):
    """Scene-level crossing-intention labeler by CRF energy minimization.

    Parameters
    ----------
    alpha, beta, gamma : float
        Weights of the unary, pedestrian-pedestrian and
        pedestrian-environment energy terms.
    lambda1, lambda2 : float
        Weights of the P-P and P-E consistency penalties.
    delta_d : float
        Distance threshold in pixels for linking pedestrians.
    log_eps : float
        Probability clamp applied before every logarithm.
    tau0, cooling, max_iters : annealing schedule; ``max_iters=None`` means
        ``max(64, 20 * n)`` proposals.
    exhaustive_threshold : int
        Scenes with at most this many pedestrians are solved exactly.
    random_state : int
        Seed for the annealer.
    """

    def __init__(
        self,
        alpha=5.3,
        beta=0.7,
        gamma=2.5,
        lambda1=0.5,
        lambda2=0.3,
        delta_d=50.0,
        log_eps=1e-7,
        tau0=1.0,
        cooling=0.95,
        max_iters=None,
        exhaustive_threshold=3,
        random_state=0,
    ):
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.delta_d = delta_d
        self.log_eps = log_eps
        self.tau0 = tau0
        self.cooling = cooling
        self.max_iters = max_iters
        self.exhaustive_threshold = exhaustive_threshold
        self.random_state = random_state

    def _configs(self):
        weights = EnergyWeights(self.alpha, self.beta, self.gamma, self.lambda1, self.lambda2)
        anneal = AnnealConfig(
            self.tau0, self.cooling, self.max_iters, self.random_state, self.exhaustive_threshold
        )
        return weights, anneal, GraphConfig(self.delta_d), ProbClamp(self.log_eps)

    def _graph(self, scene, graph_cfg):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnusedProbabilityWarning)
            return build_graph(scene, graph_cfg)

    def fit(self, X, y=None):
        """Validate scenes and hyperparameters.

        ``y`` optionally supplies one label vector per scene and overrides
        each scene's stored ground truth when computing ``training_loss_``.
        """
        scenes = check_scenes(X)
        weights, _, graph_cfg, clamp = self._configs()
        losses = []
        for k, scene in enumerate(scenes):
            if y is not None:
                truth = check_labels(y[k], scene.n)
                scene = _with_truth(scene, truth)
            if scene.ground_truth is None:
                continue
            losses.append(training_objective(scene, self._graph(scene, graph_cfg), weights, clamp))
        self.n_scenes_ = len(scenes)
        self.training_loss_ = float(np.mean(losses)) if losses else float("nan")
        return self

    def infer_scenes(self, X) -> List[InferenceResult]:
        check_is_fitted(self, "n_scenes_")
        weights, anneal, graph_cfg, clamp = self._configs()
        results = []
        for scene in check_scenes(X):
            results.append(infer(scene, self._graph(scene, graph_cfg), weights, anneal, clamp))
        return results

    def predict(self, X) -> List[np.ndarray]:
        """One int label vector per scene, aligned with its pedestrian order."""
        return [np.asarray(r.labels, dtype=int) for r in self.infer_scenes(X)]

    def score(self, X, y=None) -> float:
        """Fraction of pedestrians labeled correctly, pooled over scenes."""
        scenes = check_scenes(X)
        preds = self.predict(scenes)
        hits = total = 0
        for k, (scene, pred) in enumerate(zip(scenes, preds)):
            truth = check_labels(y[k], scene.n) if y is not None else np.asarray(scene.truth_vector())
            hits += int((pred == truth).sum())
            total += scene.n
        return hits / total if total else 0.0


def _with_truth(scene, truth):
    return replace(scene, ground_truth=dict(zip(scene.ids, truth.tolist())))
