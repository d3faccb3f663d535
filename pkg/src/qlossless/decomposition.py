"""Subspace probabilities and the greedy decomposition of an ensemble's span.

The probability of a subspace ``X`` is the total weight of ensemble states
lying entirely inside ``X``; its average probability divides by ``dim X``.
Relative to an orthogonal subspace ``Y`` we count states inside ``X (+) Y``
that are not already inside ``Y``.

:func:`decompose` repeatedly picks the largest subspace of highest
(relative) average probability.  The search over "all subspaces" is made
finite by noting that a maximizer can always be shrunk to the span of the
residuals it contains without lowering its score, so only spans of subsets
of residual vectors need to be examined.  Among maximizers the largest one
is unique: the sum of two maximizers is again a maximizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _linalg
from .fockstring import TOL, FockError, FockVector, inner_product

PROB_TOL = 1e-9
TIE_TOL = 1e-12
DEFAULT_MAX_STATES = 12


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class Ensemble:
    """A mixture ``{(p_i, |psi_i>)}`` of pure states."""

    items: tuple[tuple[float, FockVector], ...]

    def __post_init__(self):
        items = tuple((float(p), v) for p, v in self.items)
        object.__setattr__(self, "items", items)
        if not items:
            raise DecompositionError("ensemble is empty")
        for k, (p, v) in enumerate(items):
            if not 0 < p <= 1:
                raise DecompositionError(f"item {k}: probability {p} outside (0, 1]")
            if not isinstance(v, FockVector) or not v.is_state():
                raise DecompositionError(f"item {k}: not a unit-norm state")
        total = sum(p for p, _ in items)
        if abs(total - 1) > PROB_TOL:
            raise DecompositionError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, FockVector]]) -> "Ensemble":
        return cls(tuple(pairs))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.items])

    @property
    def states(self) -> tuple[FockVector, ...]:
        return tuple(v for _, v in self.items)

    def keys(self) -> tuple[str, ...]:
        return _linalg.union_keys(self.states)

    def dense(self, keys: Sequence[str] | None = None) -> np.ndarray:
        return _linalg.to_dense(self.states, self.keys() if keys is None else keys)

    def span_dimension(self) -> int:
        return _linalg.orth_rows(self.dense()).shape[0]

    def density_matrix(self) -> tuple[tuple[str, ...], np.ndarray]:
        """Ordinary density matrix ``sum p_i |psi_i><psi_i|`` over ``keys()``."""
        keys = self.keys()
        a = self.dense(keys)
        return keys, (a.T * self.probabilities) @ a.conj()


@dataclass(frozen=True)
class Subspace:
    """Subspace given by an orthonormal basis; the empty basis is the zero subspace."""

    basis: tuple[FockVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        for i, u in enumerate(self.basis):
            for j in range(i, len(self.basis)):
                g = inner_product(u, self.basis[j])
                if abs(g - (1.0 if i == j else 0.0)) > TOL:
                    raise DecompositionError("subspace basis is not orthonormal")

    @classmethod
    def span(cls, vectors: Sequence[FockVector]) -> "Subspace":
        """Canonical orthonormal basis of ``span(vectors)``."""
        keys = _linalg.union_keys(vectors)
        rows = _linalg.canonical_basis(_linalg.to_dense(vectors, keys))
        return cls(tuple(_linalg.from_dense(r, keys) for r in rows))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def project(self, psi: FockVector) -> FockVector:
        out = FockVector()
        for b in self.basis:
            out = out + b * inner_product(b, psi)
        return out

    def direct_sum(self, other: "Subspace") -> "Subspace":
        return Subspace(self.basis + other.basis)

    def is_orthogonal_to(self, other: "Subspace") -> bool:
        return all(abs(inner_product(u, v)) <= TOL for u in self.basis for v in other.basis)


def lies_within(psi: FockVector, X: Subspace) -> bool:
    return (psi - X.project(psi)).norm() <= TOL


def subspace_probability(E: Ensemble, X: Subspace) -> float:
    return float(sum(p for p, v in E if lies_within(v, X)))


def average_probability(E: Ensemble, X: Subspace) -> float:
    if X.dim == 0:
        raise DecompositionError("average probability of the zero subspace is undefined")
    return subspace_probability(E, X) / X.dim


def relative_probability(E: Ensemble, X: Subspace, Y: Subspace) -> float:
    """Weight of states inside ``X (+) Y`` but not inside ``Y``."""
    if not X.is_orthogonal_to(Y):
        raise DecompositionError("relative probability needs X orthogonal to Y")
    both = X.direct_sum(Y)
    return float(sum(p for p, v in E if lies_within(v, both) and not lies_within(v, Y)))


def relative_average_probability(E: Ensemble, X: Subspace, Y: Subspace) -> float:
    if X.dim == 0:
        raise DecompositionError("average probability of the zero subspace is undefined")
    return relative_probability(E, X, Y) / X.dim


@dataclass(frozen=True)
class Part:
    subspace: Subspace
    cond_avg_prob: float
    members: tuple[int, ...]
    """Indices of the ensemble items first captured by this part."""

    @property
    def dim(self) -> int:
        return self.subspace.dim


@dataclass(frozen=True)
class Decomposition:
    parts: tuple[Part, ...]
    ties: bool = False
    """Set when distinct candidate subspaces tied on score and dimension."""
    merged: bool = field(default=False)

    @property
    def density_eigenvalues(self) -> tuple[tuple[float, int], ...]:
        return tuple((part.cond_avg_prob, part.dim) for part in self.parts)

    @property
    def trace(self) -> float:
        return float(sum(v * m for v, m in self.density_eigenvalues))

    @property
    def dim(self) -> int:
        return sum(part.dim for part in self.parts)

    def basis(self) -> tuple[FockVector, ...]:
        return tuple(b for part in self.parts for b in part.subspace.basis)


def density_operator(D: Decomposition) -> tuple[tuple[float, int], ...]:
    """Eigenvalues of ``rho = sum_i Pbar(X_i : X_1..i-1) P_i`` with multiplicities."""
    return D.density_eigenvalues


def entropy_bits(eigenvalues: Iterable[tuple[float, int]]) -> float:
    """``-sum m * lam * log2(lam)`` over ``(lam, m)`` pairs; zero eigenvalues contribute nothing."""
    return float(-sum(m * lam * math.log2(lam) for lam, m in eigenvalues if lam > 0))


def von_neumann_entropy(D: Decomposition) -> float:
    return entropy_bits(D.density_eigenvalues)


def ensemble_entropy(E: Ensemble) -> float:
    """Von Neumann entropy of the ordinary density matrix of ``E``."""
    _, rho = E.density_matrix()
    lam = np.linalg.eigvalsh(rho)
    return entropy_bits((float(x), 1) for x in lam if x > PROB_TOL)


def codeword_length(prob: float) -> int:
    """``ceil(-log2 prob)`` with a floor of one qubit.

    Length-zero codewords would be superpositions of the empty word, which
    are never prefix-free.  Values within ``1e-9`` of an integer are snapped
    so that exact powers of two are not pushed up by rounding error.
    """
    if not 0 < prob <= 1 + PROB_TOL:
        raise DecompositionError(f"probability {prob} outside (0, 1]")
    x = -math.log2(min(prob, 1.0))
    r = round(x)
    length = r if abs(x - r) <= 1e-9 else math.ceil(x)
    return max(1, int(length))


def _best_part(residuals: np.ndarray, alive: list[int], probs: np.ndarray):
    """Highest score, then largest dimension; reports whether the winner was not unique."""
    candidates = []
    seen = set()
    r_alive = residuals[alive]
    for mask in range(1, 1 << len(alive)):
        rows = [j for j in range(len(alive)) if mask >> j & 1]
        q = _linalg.orth_rows(r_alive[rows])
        k = q.shape[0]
        if k == 0:
            continue
        outside = np.linalg.norm(_linalg.project_out(r_alive, q), axis=1)
        members = tuple(alive[j] for j in range(len(alive)) if outside[j] <= TOL)
        if members in seen:
            continue
        seen.add(members)
        candidates.append((float(probs[list(members)].sum()) / k, k, members))
    top = max(v for v, _, _ in candidates)
    near = [c for c in candidates if c[0] >= top - TIE_TOL]
    k_max = max(k for _, k, _ in near)
    winners = [c for c in near if c[1] == k_max]
    return winners[0], len(winners) > 1


def decompose(E: Ensemble, max_states: int = DEFAULT_MAX_STATES) -> Decomposition:
    """Greedy decomposition by maximal (relative) average probability.

    The candidate search enumerates every subset of not-yet-captured items,
    so the cost is ``O(2^n)`` per part; ``max_states`` bounds ``n``.
    """
    n = len(E)
    if n > max_states:
        raise DecompositionError(
            f"{n} ensemble states exceed the exhaustive-search cap of {max_states}; "
            "raise max_states (cost doubles per state) or shrink the ensemble"
        )
    keys = E.keys()
    a = E.dense(keys)
    probs = E.probabilities
    taken = np.zeros((0, len(keys)), dtype=complex)
    captured: set[int] = set()
    raw_parts = []
    ties = False
    while len(captured) < n:
        residuals = _linalg.project_out(a, taken)
        alive = [i for i in range(n) if i not in captured]
        (value, _, members), tie = _best_part(residuals, alive, probs)
        ties = ties or tie
        rows = _linalg.canonical_basis(residuals[list(members)])
        taken = np.vstack([taken, rows])
        captured.update(members)
        raw_parts.append([value, rows, members])

    merged = False
    parts: list[list] = []
    for value, rows, members in raw_parts:
        if parts and abs(parts[-1][0] - value) <= TIE_TOL:
            prev = parts[-1]
            prev[1] = _linalg.canonical_basis(np.vstack([prev[1], rows]))
            prev[2] = prev[2] + members
            merged = True
        else:
            parts.append([value, rows, members])

    return Decomposition(
        tuple(
            Part(Subspace(tuple(_linalg.from_dense(r, keys) for r in rows)), value, tuple(sorted(members)))
            for value, rows, members in parts
        ),
        ties=ties,
        merged=merged,
    )


def format_decomposition(D: Decomposition) -> str:
    lines = ["part\tdim\tcond_avg_prob\tlength"]
    for i, part in enumerate(D.parts, 1):
        lines.append(f"{i}\t{part.dim}\t{part.cond_avg_prob:.6g}\t{codeword_length(part.cond_avg_prob)}")
    return "\n".join(lines) + "\n"


__all__ = [
    "DecompositionError",
    "Ensemble",
    "Subspace",
    "Part",
    "Decomposition",
    "FockError",
    "lies_within",
    "subspace_probability",
    "average_probability",
    "relative_probability",
    "relative_average_probability",
    "decompose",
    "density_operator",
    "von_neumann_entropy",
    "ensemble_entropy",
    "entropy_bits",
    "codeword_length",
    "format_decomposition",
]
