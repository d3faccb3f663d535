"""Always-open swap channel, per-qubit noise analysis and lossy truncation.

The channel joint state is one register laid out as ``alice | cell | bob``.
At step ``i`` Alice swaps her qubit ``i`` into the transmission cell, then
Bob swaps the cell into his qubit ``i``.  Both swaps permute basis strings,
so the simulation is exact on sparse amplitudes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _linalg
from .codec import LosslessCode, assign_codewords, build_code
from .decomposition import (
    PROB_TOL,
    Ensemble,
    codeword_length,
    decompose,
    ensemble_entropy,
)
from .fockstring import (
    TOL,
    FockVector,
    RegisterVector,
    average_length,
    base_length,
    inner_product,
    zero_extended_form,
)
from .prefix import PrefixError, condense, factorize, is_prefix_free_space, parse_codewords

DEFAULT_QUBIT_CAP = 16
NOISE_MODELS = ("erasure-flag", "bit-flip")


class ChannelError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelState:
    alice_width: int
    bob_width: int
    joint: FockVector
    step: int = 0

    @property
    def width(self) -> int:
        return self.alice_width + 1 + self.bob_width

    @property
    def cell(self) -> int:
        return self.alice_width

    def split(self, s: str) -> tuple[str, str, str]:
        a = self.alice_width
        return s[:a], s[a], s[a + 1:]

    def bob_register(self) -> RegisterVector | None:
        """Bob's state if the joint state is a product ``(alice, cell) (x) bob``."""
        a = self.alice_width + 1
        table = {(s[:a], s[a:]): amp for s, amp in self.joint.items()}
        try:
            _, bob = factorize(table, 2)
        except PrefixError:
            return None
        return RegisterVector(self.bob_width, bob)


def _check_cap(total: int, cap: int) -> None:
    if total > cap:
        raise ChannelError(f"joint register of {total} qubits exceeds the cap of {cap}")


def channel_init(message: RegisterVector, bob_width: int | None = None, cap: int = DEFAULT_QUBIT_CAP) -> ChannelState:
    """Alice holds the (condensed, zero-padded) message; cell and Bob start in zeros."""
    bob_width = message.width if bob_width is None else bob_width
    _check_cap(message.width + 1 + bob_width, cap)
    tail = "0" * (1 + bob_width)
    joint = FockVector([(s + tail, a) for s, a in message.items()])
    return ChannelState(message.width, bob_width, joint, 0)


def _swap(s: str, i: int, j: int) -> str:
    if s[i] == s[j]:
        return s
    chars = list(s)
    chars[i], chars[j] = chars[j], chars[i]
    return "".join(chars)


def channel_step(s: ChannelState) -> ChannelState:
    i = s.step
    if i >= s.alice_width or i >= s.bob_width:
        raise ChannelError(f"steps exhausted after {i} steps")
    cell = s.cell
    bob_i = cell + 1 + i
    joint = FockVector([(_swap(_swap(b, i, cell), cell, bob_i), a) for b, a in s.joint.items()])
    return ChannelState(s.alice_width, s.bob_width, joint, i + 1)


def append_message(s: ChannelState, message: RegisterVector, offset: int) -> ChannelState:
    """Write a further message into Alice's untouched zero suffix mid-transmission.

    Alice only touches qubits at ``offset`` and beyond, which must not have
    been sent yet and must be ``|0>`` in every branch.
    """
    if offset < s.step:
        raise ChannelError(f"offset {offset} has already been transmitted (step {s.step})")
    end = offset + message.width
    if end > s.alice_width:
        raise ChannelError("message does not fit in Alice's memory")
    terms: dict[str, complex] = {}
    for b, a in s.joint.items():
        if b[offset:end].strip("0"):
            raise ChannelError("Alice's memory is not blank where the message would go")
        for m, c in message.items():
            key = b[:offset] + m + b[end:]
            terms[key] = terms.get(key, 0j) + a * c
    return ChannelState(s.alice_width, s.bob_width, FockVector(terms), s.step)


@dataclass(frozen=True)
class TransmitResult:
    state: ChannelState
    bob_state: RegisterVector | None
    fidelity: float | None
    complete: bool
    trace: tuple[float, ...] = field(default=())
    """Joint norm after every step."""


def transmit(
    message: FockVector,
    steps: int,
    width: int | None = None,
    bob_width: int | None = None,
    cap: int = DEFAULT_QUBIT_CAP,
) -> TransmitResult:
    """Run the channel for ``steps`` steps on a condensed message.

    The transfer is complete once ``steps`` reaches the message's base
    length: every qubit beyond it is padding in every branch.
    """
    L = base_length(message)
    width = L if width is None else width
    bob_width = width if bob_width is None else bob_width
    padded = zero_extended_form(message, width)
    if abs(padded.vector.norm() - message.norm()) > TOL:
        raise ChannelError("message branches collide after zero padding; condense it with a prefix code first")
    state = channel_init(padded, bob_width, cap)
    norms = []
    for _ in range(steps):
        state = channel_step(state)
        norms.append(state.joint.norm())
    bob = state.bob_register()
    fidelity = None
    if bob is not None:
        target = zero_extended_form(message, bob_width).vector
        fidelity = abs(inner_product(target, bob.vector)) ** 2
    return TransmitResult(state, bob, fidelity, steps >= L and bob is not None, tuple(norms))


def format_trace(result: TransmitResult) -> str:
    lines = ["step\tnorm"]
    lines += [f"{i}\t{n:.6g}" for i, n in enumerate(result.trace, 1)]
    status = "complete" if result.complete else "transfer incomplete"
    fid = "-" if result.fidelity is None else f"{result.fidelity:.6g}"
    lines.append(f"# status={status} fidelity={fid}")
    return "\n".join(lines) + "\n"


# --- noise -----------------------------------------------------------------

@dataclass(frozen=True)
class NoiseConfig:
    per_qubit_prob: float
    model: str = "erasure-flag"

    def __post_init__(self):
        if not 0 <= self.per_qubit_prob <= 1:
            raise ChannelError(f"per-qubit probability {self.per_qubit_prob} outside [0, 1]")
        if self.model not in NOISE_MODELS:
            raise ChannelError(f"unknown noise model {self.model!r}; expected one of {NOISE_MODELS}")


@dataclass(frozen=True)
class DisturbanceRow:
    index: int
    prob: float
    base_length: int
    average_length: float
    touch_prob: float
    untouched_weight: float
    ideal_touch_prob: float | None = None
    ideal_untouched_weight: float | None = None


@dataclass(frozen=True)
class DisturbanceReport:
    arm: str
    rows: tuple[DisturbanceRow, ...]

    @property
    def touch_prob(self) -> float:
        return float(sum(r.prob * r.touch_prob for r in self.rows))

    @property
    def untouched_weight(self) -> float:
        return float(sum(r.prob * r.untouched_weight for r in self.rows))

    def _ideal(self, name: str) -> float | None:
        vals = [getattr(r, name) for r in self.rows]
        if any(v is None for v in vals):
            return None
        return float(sum(r.prob * v for r, v in zip(self.rows, vals)))

    @property
    def ideal_touch_prob(self) -> float | None:
        return self._ideal("ideal_touch_prob")

    @property
    def ideal_untouched_weight(self) -> float | None:
        return self._ideal("ideal_untouched_weight")


def _survive(p: float, length: float) -> float:
    return (1 - p) ** length


def disturbance_report(C: LosslessCode, E: Ensemble, noise: NoiseConfig, arm: str = "base") -> DisturbanceReport:
    """Analytic per-qubit Bernoulli(p) disturbance of each encoded state.

    ``touch_prob`` is the chance that any of the ``L`` base-length qubits is
    hit; ``untouched_weight`` weighs each branch by the chance that its own
    qubits all survive.  For codes carrying ideal (real-valued) lengths the
    same quantities are also reported with those lengths as exponents.
    """
    p = noise.per_qubit_prob
    rows = []
    ideal_by_word = None
    if C.ideal_lengths is not None:
        ideal_by_word = dict(zip(C.codewords, C.ideal_lengths))
    for k, (prob, psi) in enumerate(E):
        enc = C.encode(psi)
        L = base_length(enc)
        row = dict(
            index=k,
            prob=prob,
            base_length=L,
            average_length=average_length(enc),
            touch_prob=1 - _survive(p, L),
            untouched_weight=float(sum(abs(a) ** 2 * _survive(p, len(s)) for s, a in enc.items())),
        )
        if ideal_by_word is not None:
            ideal = [ideal_by_word[s] for s in enc]
            row["ideal_touch_prob"] = 1 - _survive(p, max(ideal))
            row["ideal_untouched_weight"] = float(
                sum(abs(a) ** 2 * _survive(p, ideal_by_word[s]) for s, a in enc.items())
            )
        rows.append(DisturbanceRow(**row))
    return DisturbanceReport(arm, tuple(rows))


def average_length_code(E: Ensemble) -> LosslessCode:
    """Code in the eigenbasis of the ensemble density matrix.

    Eigenvector ``k`` gets the ideal length ``-log2 lambda_k``, realized as
    ``ceil`` (minimum 1).  Degenerate eigenspaces get their canonical basis;
    eigenvalues are ordered from largest to smallest.
    """
    keys, rho = E.density_matrix()
    lam, vecs = np.linalg.eigh(rho)
    order = np.argsort(-lam, kind="stable")
    lam, vecs = lam[order], vecs[:, order]
    groups: list[tuple[float, list[int]]] = []
    for j, x in enumerate(lam):
        if x <= PROB_TOL:
            continue
        if groups and abs(groups[-1][0] - x) <= 1e-9:
            groups[-1][1].append(j)
        else:
            groups.append((float(x), [j]))
    basis, parts, lengths, ideal = [], [], [], []
    for g, (_, cols) in enumerate(groups):
        rows = _linalg.canonical_basis(vecs[:, cols].T)
        mean = float(np.mean(lam[cols]))
        for r in rows:
            basis.append(_linalg.from_dense(r, keys))
            parts.append(g)
            lengths.append(codeword_length(mean))
            ideal.append(-math.log2(mean))
    words = assign_codewords([(l, 1) for l in lengths])
    return LosslessCode(tuple(basis), tuple(parts), tuple(lengths), tuple(words), tuple(ideal))


def compare_noise(E: Ensemble, noise: NoiseConfig) -> tuple[DisturbanceReport, DisturbanceReport]:
    """Base-length optimal code versus the eigenbasis (average-length) code."""
    base = disturbance_report(build_code(decompose(E)), E, noise, arm="base")
    avg = disturbance_report(average_length_code(E), E, noise, arm="average")
    return base, avg


def format_noise(reports: Sequence[DisturbanceReport]) -> str:
    def num(x):
        return "-" if x is None else f"{x:.6g}"

    lines = ["arm\tstate\tprob\tbase_length\tavg_length\ttouch_prob\tuntouched_weight\tideal_touch_prob\tideal_untouched_weight"]
    for rep in reports:
        for r in rep.rows:
            lines.append(
                f"{rep.arm}\t{r.index}\t{num(r.prob)}\t{r.base_length}\t{num(r.average_length)}\t"
                f"{num(r.touch_prob)}\t{num(r.untouched_weight)}\t{num(r.ideal_touch_prob)}\t{num(r.ideal_untouched_weight)}"
            )
        lines.append(
            f"{rep.arm}\tall\t1\t-\t-\t{num(rep.touch_prob)}\t{num(rep.untouched_weight)}\t"
            f"{num(rep.ideal_touch_prob)}\t{num(rep.ideal_untouched_weight)}"
        )
    return "\n".join(lines) + "\n"


def monte_carlo_disturbance(
    C: LosslessCode, E: Ensemble, noise: NoiseConfig, trials: int, seed: int
) -> tuple[float, float]:
    """Sampled ``(touched frequency, mean fidelity)`` for spot checks.

    In the ``bit-flip`` model every hit qubit among the base-length qubits
    gets an X; fidelity is ``|<enc|X_S enc>|^2``.  In the ``erasure-flag``
    model a hit state counts as lost (fidelity 0).
    """
    rng = np.random.default_rng(seed)
    probs = E.probabilities
    encoded = [zero_extended_form(C.encode(v), base_length(C.encode(v))) for v in E.states]
    touched = 0
    fid = 0.0
    for _ in range(trials):
        i = int(rng.choice(len(probs), p=probs / probs.sum()))
        reg = encoded[i]
        hits = set(np.flatnonzero(rng.random(reg.width) < noise.per_qubit_prob).tolist())
        if hits:
            touched += 1
        if noise.model == "bit-flip":
            flipped = FockVector(
                ("".join("1" if (c == "0") == (j in hits) else "0" for j, c in enumerate(s)), a)
                for s, a in reg.items()
            )
            fid += abs(inner_product(reg.vector, flipped)) ** 2
        else:
            fid += 0.0 if hits else 1.0
    return touched / trials, fid / trials


# --- lossy truncation ------------------------------------------------------

@dataclass(frozen=True)
class LossyReport:
    copies: int
    delta: float
    entropy: float
    cut: int
    max_length: int
    success_probability: float
    fidelity: float


def _cut_length(n: int, entropy: float, delta: float) -> int:
    x = n * (entropy + delta)
    r = round(x)
    return int(r if abs(x - r) <= 1e-9 else math.ceil(x))


def lossy_truncate(E: Ensemble, n: int, delta: float, cap: int = DEFAULT_QUBIT_CAP) -> LossyReport:
    """Encode ``n`` copies in the eigenbasis code, condense, keep branches of
    total length ``<= ceil(n (S + delta))`` and decode.

    ``success_probability`` is the ensemble-averaged kept weight;
    ``fidelity`` the ensemble average of ``|<Psi| decode(project(encode Psi))>|^2``.
    """
    if n < 1:
        raise ChannelError("need at least one copy")
    code = average_length_code(E)
    entropy = ensemble_entropy(E)
    cut = _cut_length(n, entropy, delta)
    width = max(code.lengths)
    _check_cap(n * width, cap)
    words = code.codewords
    index = {w: k for k, w in enumerate(words)}
    image = is_prefix_free_space([FockVector.basis(w) for w in words])
    probs = E.probabilities
    coeffs = [code.coefficients(v) for v in E.states]
    messages = [zero_extended_form(code.encode(v), width) for v in E.states]
    success = 0.0
    fidelity = 0.0
    for tup in itertools.product(range(len(E)), repeat=n):
        weight = float(np.prod(probs[list(tup)]))
        block = condense([messages[i] for i in tup], image)
        overlap = 0j
        kept = 0.0
        for s, a in block.register.items():
            parsed, _ = parse_codewords(s, words, n)
            if sum(len(w) for w in parsed) > cut:
                continue
            kept += abs(a) ** 2
            original = np.prod([coeffs[i][index[w]] for i, w in zip(tup, parsed)])
            overlap += np.conj(original) * a
        success += weight * kept
        fidelity += weight * abs(overlap) ** 2
    return LossyReport(n, delta, entropy, cut, width, float(success), float(fidelity))


def format_lossy(r: LossyReport) -> str:
    head = "copies\tdelta\tentropy\tcut\tmax_length\tsuccess_probability\tfidelity"
    row = f"{r.copies}\t{r.delta:.6g}\t{r.entropy:.6g}\t{r.cut}\t{r.max_length}\t{r.success_probability:.6g}\t{r.fidelity:.6g}"
    return head + "\n" + row + "\n"
