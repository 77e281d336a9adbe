"""Negative log-likelihood potentials computed from provider probabilities.

All logarithms are natural. Probabilities are clamped to
``[eps, 1 - eps]`` before entering a logarithm so costs stay finite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .validation import is_simplex


class InteractionState(enum.IntEnum):
    INCONSISTENT = 0
    BOTH_NOT_CROSSING = 1
    BOTH_CROSSING = 2


@dataclass(frozen=True)
class ProbClamp:
    epsilon: float = 1e-7

    def __post_init__(self):
        if not (0.0 < self.epsilon < 0.5):
            raise ValueError(f"epsilon must lie in (0, 0.5), got {self.epsilon}")

    def __call__(self, p: float) -> float:
        return min(max(p, self.epsilon), 1.0 - self.epsilon)


DEFAULT_CLAMP = ProbClamp()


def interaction_state(y_i: int, y_j: int) -> InteractionState:
    """Map a label pair to its interaction state.

    (0, 0) -> 1, (1, 1) -> 2, mixed -> 0.
    """
    if y_i not in (0, 1) or y_j not in (0, 1):
        raise ValueError(f"labels must be 0 or 1, got ({y_i}, {y_j})")
    if y_i != y_j:
        return InteractionState.INCONSISTENT
    return InteractionState.BOTH_CROSSING if y_i == 1 else InteractionState.BOTH_NOT_CROSSING


def _binary_nll(y: int, p: float, clamp: ProbClamp) -> float:
    if y not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {y}")
    p = clamp(p)
    return -math.log(p) if y == 1 else -math.log1p(-p)


def unary_potential(y_i: int, p_i: float, clamp: ProbClamp = DEFAULT_CLAMP) -> float:
    return _binary_nll(y_i, p_i, clamp)


def pe_potential(y_i: int, p_ie: float, clamp: ProbClamp = DEFAULT_CLAMP) -> float:
    """Cost of label ``y_i`` given the probability the environment supports crossing."""
    return _binary_nll(y_i, p_ie, clamp)


def pp_potential(
    y_i: int, y_j: int, probs: Sequence[float], clamp: ProbClamp = DEFAULT_CLAMP
) -> float:
    if not is_simplex(probs):
        raise ValueError(f"interaction probabilities {list(probs)} are not a simplex")
    k = interaction_state(y_i, y_j)
    return -math.log(clamp(probs[k]))
