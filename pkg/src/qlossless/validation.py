"""Input coercion shared by the estimators and the CLI."""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import numpy as np

from .decomposition import DecompositionError, Ensemble
from .fockstring import FockError, FockVector


def check_state(v, name: str = "state") -> FockVector:
    """Accept a FockVector or a ``{bits: amplitude}`` mapping; require unit norm."""
    if isinstance(v, Mapping):
        v = FockVector(v)
    if not isinstance(v, FockVector):
        raise TypeError(f"{name} must be a FockVector or a mapping, got {type(v).__name__}")
    if not v.is_state():
        raise FockError(f"{name} is not a unit-norm state (norm {v.norm():.9g})")
    return v


def check_states(X) -> list[FockVector]:
    if isinstance(X, Ensemble):
        return list(X.states)
    if isinstance(X, (FockVector, Mapping)):
        raise TypeError("expected a sequence of states; wrap a single state in a list")
    return [check_state(v, f"state {i}") for i, v in enumerate(X)]


def check_ensemble(X, sample_weight=None) -> Ensemble:
    """Build an :class:`Ensemble` from an ensemble, ``(p, state)`` pairs, or states plus weights.

    Weights are rescaled to sum to one; missing weights mean uniform.
    """
    if isinstance(X, Ensemble):
        if sample_weight is not None:
            raise ValueError("sample_weight is not accepted together with an Ensemble")
        return X
    X = list(X)
    if not X:
        raise DecompositionError("ensemble is empty")
    if all(isinstance(x, Sequence) and not isinstance(x, str) and len(x) == 2 for x in X):
        if sample_weight is not None:
            raise ValueError("sample_weight is not accepted together with (p, state) pairs")
        weights = np.array([float(p) for p, _ in X])
        states = [check_state(v, f"state {i}") for i, (_, v) in enumerate(X)]
    else:
        states = check_states(X)
        weights = np.ones(len(states)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    if weights.shape != (len(states),):
        raise ValueError(f"expected {len(states)} weights, got shape {weights.shape}")
    if np.any(weights <= 0):
        raise DecompositionError("weights must be positive")
    weights = weights / weights.sum()
    return Ensemble(tuple(zip(weights.tolist(), states)))
