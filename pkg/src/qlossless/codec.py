"""Optimal prefix-free lossless codes built from a decomposition.

Each basis vector of part ``i`` is mapped to a classical codeword of length
``ceil(-log2 Pbar_i)``.  A state touching parts ``i_1 < ... < i_k`` is
encoded as a superposition of codewords whose longest branch has the length
of part ``i_k``, so the expected base length is ``sum_i P(X_i : X_<i) l_i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _linalg
from .decomposition import (
    Decomposition,
    Ensemble,
    codeword_length,
    von_neumann_entropy,
)
from .fockstring import (
    TOL,
    FockError,
    FockVector,
    RegisterVector,
    base_length,
    format_terms,
    inner_product,
    parse_register,
    zero_extended_form,
)
from .prefix import PrefixFreeBasis, is_classical_prefix_free, is_prefix_free_space

BOUND_TOL = 1e-9


class CodeError(ValueError):
    pass


def assign_codewords(lengths: Sequence[tuple[int, int]]) -> list[str]:
    """Canonical prefix code for ``(length, multiplicity)`` pairs.

    Codewords are handed out in order of increasing length, each one the
    lexicographically smallest string not extending an earlier codeword.
    The output follows the sorted-length order, not the input order.
    """
    flat = sorted(l for l, m in lengths for _ in range(m))
    if any(l < 1 for l in flat):
        raise CodeError("codeword lengths must be at least 1")
    if sum(2.0 ** -l for l in flat) > 1 + 1e-12:
        raise CodeError(f"Kraft inequality violated by lengths {flat}")
    out = []
    code = 0
    prev = flat[0] if flat else 0
    for l in flat:
        code <<= l - prev
        prev = l
        out.append(format(code, f"0{l}b"))
        code += 1
    return out


@dataclass(frozen=True)
class LosslessCode:
    """Unitary map sending ``basis[k]`` to the classical codeword ``codewords[k]``."""

    basis: tuple[FockVector, ...]
    parts: tuple[int, ...]
    lengths: tuple[int, ...]
    codewords: tuple[str, ...]
    ideal_lengths: tuple[float, ...] | None = None

    def __post_init__(self):
        n = len(self.basis)
        if not (len(self.parts) == len(self.lengths) == len(self.codewords) == n):
            raise CodeError("basis, parts, lengths and codewords must align")
        if not is_classical_prefix_free(self.codewords):
            raise CodeError("codewords are not prefix-free")
        object.__setattr__(self, "_index", {w: k for k, w in enumerate(self.codewords)})

    @property
    def part_lengths(self) -> tuple[int, ...]:
        out = {}
        for p, l in zip(self.parts, self.lengths):
            out.setdefault(p, l)
        return tuple(out[p] for p in sorted(out))

    def kraft_sum(self) -> float:
        return float(sum(2.0 ** -l for l in self.lengths))

    def image_basis(self) -> PrefixFreeBasis:
        return is_prefix_free_space([FockVector.basis(w) for w in self.codewords])

    def class_subspace(self, length: int) -> tuple[FockVector, ...]:
        """Basis of ``Z_l``: every source basis vector whose codeword is at most ``length`` long."""
        return tuple(b for b, l in zip(self.basis, self.lengths) if l <= length)

    def coefficients(self, psi: FockVector) -> np.ndarray:
        coeffs = np.array([inner_product(b, psi) for b in self.basis], dtype=complex)
        recon = FockVector()
        for c, b in zip(coeffs, self.basis):
            recon = recon + b * c
        if (psi - recon).norm() > TOL * max(1.0, psi.norm()):
            raise CodeError("state not in code domain")
        return coeffs

    def encode(self, psi: FockVector) -> FockVector:
        return FockVector(zip(self.codewords, self.coefficients(psi)))

    def decode(self, encoded: FockVector) -> FockVector:
        out = FockVector()
        for s, a in encoded.items():
            k = self._index.get(s)
            if k is None:
                raise CodeError(f"{s!r} is not a codeword of this code")
            out = out + self.basis[k] * a
        return out

    def to_table(self) -> str:
        lines = ["basis_vector_index\tpart\tlength\tcodeword"]
        for k, (p, l, w) in enumerate(zip(self.parts, self.lengths, self.codewords)):
            lines.append(f"{k}\t{p + 1}\t{l}\t{w}")
        return "\n".join(lines) + "\n"


def encode(C: LosslessCode, psi: FockVector) -> FockVector:
    return C.encode(psi)


def decode(C: LosslessCode, encoded: FockVector) -> FockVector:
    return C.decode(encoded)


def build_code(D: Decomposition) -> LosslessCode:
    """Code whose part-``i`` codewords have length ``ceil(-log2 Pbar_i)`` (at least 1)."""
    part_lengths = [codeword_length(part.cond_avg_prob) for part in D.parts]
    basis, parts, lengths = [], [], []
    for i, part in enumerate(D.parts):
        for b in part.subspace.basis:
            basis.append(b)
            parts.append(i)
            lengths.append(part_lengths[i])
    # parts arrive in decreasing probability, so lengths are already sorted
    assert lengths == sorted(lengths), "decomposition parts out of order"
    words = assign_codewords([(l, 1) for l in lengths])
    return LosslessCode(tuple(basis), tuple(parts), tuple(lengths), tuple(words))


def expected_base_length(C: LosslessCode, E: Ensemble) -> float:
    return float(sum(p * base_length(C.encode(v)) for p, v in E))


def expected_average_length(C: LosslessCode, E: Ensemble) -> float:
    total = 0.0
    for p, v in E:
        enc = C.encode(v)
        total += p * sum(abs(a) ** 2 * len(s) for s, a in enc.items())
    return total


@dataclass(frozen=True)
class BoundsReport:
    entropy: float
    expected_length: float
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


def check_entropy_bounds(C: LosslessCode, E: Ensemble, D: Decomposition) -> BoundsReport:
    """``S(rho) <= E[L] <= S(rho) + 1`` for the decomposition operator ``rho``."""
    s = von_neumann_entropy(D)
    el = expected_base_length(C, E)
    return BoundsReport(s, el, s <= el + BOUND_TOL, el <= s + 1 + BOUND_TOL)


# --- exhaustive optimum ----------------------------------------------------

def _ordered_partitions(items: Sequence[int], max_blocks: int):
    """Ordered set partitions of ``items`` into at most ``max_blocks`` nonempty blocks."""
    n = len(items)
    for k in range(1, min(n, max_blocks) + 1):
        for labels in itertools.product(range(k), repeat=n):
            if len(set(labels)) == k:
                yield [tuple(items[i] for i in range(n) if labels[i] == b) for b in range(k)]


def _length_sequences(dims: Sequence[int], len_cap: int):
    """Nondecreasing length assignments per block that satisfy Kraft."""
    def rec(i, lo, budget, acc):
        if i == len(dims):
            yield tuple(acc)
            return
        for l in range(lo, len_cap + 1):
            cost = dims[i] * 2.0 ** -l
            if cost <= budget + 1e-12:
                yield from rec(i + 1, l, budget - cost, acc + [l])
    yield from rec(0, 1, 1.0, [])


def brute_force_optimal(E: Ensemble, dim_cap: int = 3, len_cap: int = 4, max_states: int = 8):
    """Minimum expected base length over classical-codeword prefix codes.

    A code of this kind fixes a chain of subspaces ``V_1 < V_2 < ...`` (the
    span of codewords up to each length); a state's base length is the
    length at which it first lies inside the chain.  Chains are enumerated
    as ordered partitions of the ensemble states, every new block spanning
    at least one new direction and capturing exactly its own states, and
    each chain is paired with every admissible nondecreasing length
    assignment.  Returns ``(optimum, witness_code)``.
    """
    n = len(E)
    keys = E.keys()
    a = E.dense(keys)
    dim = _linalg.orth_rows(a).shape[0]
    if dim > dim_cap:
        raise CodeError(f"span dimension {dim} exceeds the oracle cap of {dim_cap}")
    if n > max_states:
        raise CodeError(f"{n} states exceed the oracle cap of {max_states}")
    probs = E.probabilities
    best = (math.inf, None)
    for blocks in _ordered_partitions(list(range(n)), dim):
        taken = np.zeros((0, len(keys)), dtype=complex)
        increments = []
        ok = True
        for b, block in enumerate(blocks):
            res = _linalg.project_out(a, taken)
            new = _linalg.canonical_basis(res[list(block)])
            if new.shape[0] == 0:
                ok = False
                break
            taken = np.vstack([taken, new])
            later = [i for blk in blocks[b + 1:] for i in blk]
            if later and np.any(np.linalg.norm(_linalg.project_out(a[later], taken), axis=1) <= TOL):
                ok = False  # a later state is already captured here
                break
            increments.append(new)
        if not ok:
            continue
        dims = [inc.shape[0] for inc in increments]
        weights = [float(probs[list(block)].sum()) for block in blocks]
        for lengths in _length_sequences(dims, len_cap):
            value = sum(w * l for w, l in zip(weights, lengths))
            if value < best[0] - 1e-12:
                best = (value, (increments, lengths))
    if best[1] is None:
        raise CodeError(f"no prefix code with lengths <= {len_cap} exists for this span")
    increments, lengths = best[1]
    basis, parts, flat = [], [], []
    for i, (inc, l) in enumerate(zip(increments, lengths)):
        for row in inc:
            basis.append(_linalg.from_dense(row, keys))
            parts.append(i)
            flat.append(l)
    words = assign_codewords([(l, 1) for l in flat])
    return best[0], LosslessCode(tuple(basis), tuple(parts), tuple(flat), tuple(words))


# --- classical side channel ------------------------------------------------

def length_field_width(L: int) -> int:
    """Bits used for the length field; zero for the degenerate ``L == 1``."""
    if L < 1:
        raise CodeError("side-channel length must be at least 1")
    return 0 if L == 1 else L.bit_length()


def encode_header(L: int) -> str:
    k = length_field_width(L)
    return "1" * k + "0" + (format(L, f"0{k}b") if k else "")


def decode_header(bits: str, pos: int = 0) -> tuple[int, int]:
    """Read one header starting at ``pos``; returns ``(L, next_pos)``."""
    k = 0
    while pos + k < len(bits) and bits[pos + k] == "1":
        k += 1
    if pos + k >= len(bits):
        raise CodeError("malformed header: unterminated run of ones")
    start = pos + k + 1
    if k == 0:
        return 1, start
    field = bits[start:start + k]
    if len(field) < k:
        raise CodeError("malformed header: truncated length field")
    L = int(field, 2)
    if L.bit_length() != k:
        raise CodeError(f"malformed header: length field {field!r} inconsistent with prefix")
    return L, start + k


@dataclass(frozen=True)
class SideChannelMessage:
    header_bits: str
    payload: RegisterVector

    def __post_init__(self):
        L, end = decode_header(self.header_bits)
        if end != len(self.header_bits):
            raise CodeError("malformed header: trailing bits")
        if self.payload.width != L:
            raise CodeError(f"payload width {self.payload.width} does not match header length {L}")

    @property
    def length(self) -> int:
        return self.payload.width


def make_side_channel(psi_known: FockVector) -> SideChannelMessage:
    """Classical length header plus the first ``L`` qubits of the zero-extended form."""
    L = base_length(psi_known)
    if L < 1:
        raise CodeError("cannot send the empty string over the side channel")
    return SideChannelMessage(encode_header(L), zero_extended_form(psi_known, L))


def parse_side_channel(msg: SideChannelMessage, support: Sequence[str] | None = None) -> FockVector:
    """Recover the transmitted string.

    Zero padding is not self-delimiting, so the receiver needs the set of
    strings the sender may emit (``support``, e.g. the code's codewords) to
    undo it.  Without it the payload is returned at its determinate width.
    """
    if support is None:
        return msg.payload.vector
    terms = []
    for s, a in msg.payload.items():
        matches = [w for w in support if len(w) <= len(s) and s.startswith(w) and not s[len(w):].strip("0")]
        if len(matches) != 1:
            raise CodeError(f"payload branch {s!r} matches {len(matches)} support strings")
        terms.append((matches[0], a))
    return FockVector(terms)


def parse_header_stream(bits: str) -> list[int]:
    out = []
    pos = 0
    while pos < len(bits):
        L, pos = decode_header(bits, pos)
        out.append(L)
    return out


def format_side_channel(msg: SideChannelMessage, digits: int = 12) -> str:
    return msg.header_bits + "\n" + format_terms(msg.payload, digits)


def parse_side_channel_text(text: str) -> SideChannelMessage:
    lines = text.splitlines()
    if not lines or lines[0].strip("01") or not lines[0]:
        raise CodeError("line 1: expected header bits")
    return SideChannelMessage(lines[0], parse_register("\n".join(lines[1:]), start_line=2))


__all__ = [
    "CodeError",
    "FockError",
    "LosslessCode",
    "assign_codewords",
    "build_code",
    "encode",
    "decode",
    "expected_base_length",
    "expected_average_length",
    "BoundsReport",
    "check_entropy_bounds",
    "brute_force_optimal",
    "SideChannelMessage",
    "make_side_channel",
    "parse_side_channel",
    "encode_header",
    "decode_header",
    "parse_header_stream",
    "format_side_channel",
    "parse_side_channel_text",
]
