"""Dense helpers: move FockVectors in and out of numpy coordinates."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .fockstring import TOL, FockVector, string_key


def union_keys(vectors: Sequence[FockVector]) -> tuple[str, ...]:
    keys = set()
    for v in vectors:
        keys.update(v.support())
    return tuple(sorted(keys, key=string_key))


def to_dense(vectors: Sequence[FockVector], keys: Sequence[str]) -> np.ndarray:
    """Rows are the vectors expressed over ``keys``."""
    index = {s: i for i, s in enumerate(keys)}
    out = np.zeros((len(vectors), len(keys)), dtype=complex)
    for r, v in enumerate(vectors):
        for s, a in v.items():
            out[r, index[s]] = a
    return out


def from_dense(row: np.ndarray, keys: Sequence[str]) -> FockVector:
    return FockVector(zip(keys, row))


def orth_rows(rows: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Orthonormal basis (as rows) of the row space."""
    if rows.shape[0] == 0:
        return np.zeros((0, rows.shape[1]), dtype=complex)
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    rank = int(np.sum(s > tol))
    return vh[:rank]


def project_out(rows: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Components of ``rows`` orthogonal to the orthonormal ``basis`` rows."""
    if basis.shape[0] == 0:
        return rows.copy()
    return rows - (rows @ basis.conj().T) @ basis


def canonical_basis(rows: np.ndarray, tol: float = TOL) -> np.ndarray:
    """A basis of the row space that does not depend on which spanning set is given.

    Reduced row echelon form over the column order, followed by Gram-Schmidt
    in pivot order.  Each output row has a real positive entry at its pivot
    column and zeros at earlier pivots.
    """
    q = orth_rows(rows, tol).copy()
    k, n = q.shape
    r = 0
    for c in range(n):
        if r == k:
            break
        p = r + int(np.argmax(np.abs(q[r:, c])))
        if abs(q[p, c]) <= tol:
            continue
        q[[r, p]] = q[[p, r]]
        q[r] /= q[r, c]
        for i in range(k):
            if i != r:
                q[i] -= q[i, c] * q[r]
        r += 1
    out = np.zeros_like(q)
    for i in range(k):
        v = q[i] - (out[:i].conj() @ q[i]) @ out[:i]
        out[i] = v / np.linalg.norm(v)
    out[np.abs(out) <= 1e-15] = 0
    return out
