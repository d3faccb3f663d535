"""scikit-learn style wrappers around decomposition and coding."""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .channelsim import average_length_code
from .codec import build_code, check_entropy_bounds, expected_average_length, expected_base_length
from .decomposition import DEFAULT_MAX_STATES, decompose, ensemble_entropy, von_neumann_entropy
from .validation import check_ensemble, check_states


class _CodeTransformer(TransformerMixin, BaseEstimator):

    def transform(self, X):
        """Encode each state of ``X``."""
        check_is_fitted(self, "code_")
        return [self.code_.encode(v) for v in check_states(X)]

    def inverse_transform(self, X):
        check_is_fitted(self, "code_")
        return [self.code_.decode(v) for v in X]


class LosslessQuantumCompressor(_CodeTransformer):
    """Prefix-free code minimizing the expected base length of an ensemble.

    Parameters
    ----------
    max_states : int
        Cap on the ensemble size for the exhaustive subspace search.

    Attributes
    ----------
    decomposition_ : Decomposition
    code_ : LosslessCode
    entropy_ : float
        Entropy of the decomposition operator, the lower bound on ``expected_length_``.
    expected_length_ : float
        Expected base length of the encoded training ensemble.
    """

    def __init__(self, max_states: int = DEFAULT_MAX_STATES):
        self.max_states = max_states

    def fit(self, X, y=None, sample_weight=None):
        E = check_ensemble(X, sample_weight)
        self.decomposition_ = decompose(E, self.max_states)
        self.code_ = build_code(self.decomposition_)
        self.entropy_ = von_neumann_entropy(self.decomposition_)
        self.expected_length_ = expected_base_length(self.code_, E)
        self.bounds_ = check_entropy_bounds(self.code_, E, self.decomposition_)
        self.n_states_in_ = len(E)
        return self

    def score(self, X, y=None, sample_weight=None):
        """Negative expected base length (higher is better)."""
        check_is_fitted(self, "code_")
        return -expected_base_length(self.code_, check_ensemble(X, sample_weight))


class AverageLengthCompressor(_CodeTransformer):
    """Variable-length code in the eigenbasis of the ensemble density matrix."""

    def fit(self, X, y=None, sample_weight=None):
        E = check_ensemble(X, sample_weight)
        self.code_ = average_length_code(E)
        self.entropy_ = ensemble_entropy(E)
        self.expected_length_ = expected_average_length(self.code_, E)
        self.n_states_in_ = len(E)
        return self

    def score(self, X, y=None, sample_weight=None):
        """Negative expected average length."""
        check_is_fitted(self, "code_")
        return -expected_average_length(self.code_, check_ensemble(X, sample_weight))
