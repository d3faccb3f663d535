"""Prefix relations, prefix-free spaces, Kraft sums and condensation.

``phi`` is a prefix of ``psi`` when some string ``chi`` orthogonal to the
empty word gives ``<phi chi|psi> != 0``.  Writing the overlap as
``<chi|w>`` with ``w_y = sum_x conj(phi_x) psi_{xy}`` over nonempty ``y``
shows that such a ``chi`` exists iff ``w`` is nonzero, so the test is exact
and needs no search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .fockstring import (
    TOL,
    FockError,
    FockVector,
    RegisterVector,
    average_length,
    base_length,
    inner_product,
    parse_register,
    format_terms,
)


class PrefixError(FockError):
    pass


def prefix_witness(phi: FockVector, psi: FockVector) -> FockVector:
    """The unnormalized suffix state ``w``; ``w / |w|`` maximizes ``|<phi chi|psi>|``."""
    w: dict[str, complex] = {}
    for s, b in psi.items():
        for x, a in phi.items():
            if len(x) < len(s) and s.startswith(x):
                y = s[len(x):]
                w[y] = w.get(y, 0j) + a.conjugate() * b
    return FockVector(w)


def is_prefix(phi: FockVector, psi: FockVector) -> bool:
    return prefix_witness(phi, psi).norm() > TOL


def is_self_prefix(psi: FockVector) -> bool:
    return is_prefix(psi, psi)


def prefix_violation(xs: Sequence[FockVector]) -> tuple[int, int] | None:
    """First ordered pair ``(i, j)`` (``i == j`` allowed) where ``xs[i]`` prefixes ``xs[j]``."""
    for i, j in itertools.product(range(len(xs)), repeat=2):
        if is_prefix(xs[i], xs[j]):
            return i, j
    return None


def is_prefix_free_set(xs: Sequence[FockVector]) -> bool:
    return prefix_violation(xs) is None


@dataclass(frozen=True)
class PrefixFreeBasis:
    vectors: tuple[FockVector, ...]
    verified: bool = False

    def codewords(self) -> tuple[str, ...]:
        """Classical strings carrying the basis, in canonical order."""
        seen = {s for v in self.vectors for s in v.support()}
        return tuple(sorted(seen, key=lambda s: (len(s), s)))

    @property
    def max_length(self) -> int:
        return max(base_length(v) for v in self.vectors)


def _check_orthonormal(vectors: Sequence[FockVector]) -> None:
    for i, u in enumerate(vectors):
        for j in range(i, len(vectors)):
            g = inner_product(u, vectors[j])
            expected = 1.0 if i == j else 0.0
            if abs(g - expected) > TOL:
                raise PrefixError(f"basis is not orthonormal: <{i}|{j}> = {g:.3g}")


def is_prefix_free_space(basis: Sequence[FockVector]) -> PrefixFreeBasis:
    """Certify that ``span(basis)`` is a prefix-free space.

    Checking one orthonormal basis suffices: any other orthonormal basis of
    the span inherits prefix-freeness by bilinearity of the witness.
    """
    vectors = tuple(basis)
    if not vectors:
        raise PrefixError("empty basis")
    _check_orthonormal(vectors)
    bad = prefix_violation(vectors)
    if bad is not None:
        i, j = bad
        raise PrefixError(f"basis vector {i} is a prefix of basis vector {j}")
    return PrefixFreeBasis(vectors, verified=True)


def kraft_sums(xs: Sequence[FockVector]) -> tuple[float, float]:
    """``(sum 2^-L, sum 2^-lbar)`` over the strings."""
    return (
        sum(2.0 ** -base_length(x) for x in xs),
        sum(2.0 ** -average_length(x) for x in xs),
    )


def is_classical_prefix_free(words: Sequence[str]) -> bool:
    ws = sorted(words)
    if len(set(ws)) != len(ws) or "" in ws:
        return False
    # In sorted order a word's extensions immediately follow it.
    return not any(b.startswith(a) for a, b in zip(ws, ws[1:]))


# --- condensation ----------------------------------------------------------

@dataclass(frozen=True)
class CondensedBlock:
    register: RegisterVector
    message_count: int
    widths: tuple[int, ...]

    def __post_init__(self):
        if len(self.widths) != self.message_count:
            raise PrefixError("one width per message required")
        if self.register.width != sum(self.widths):
            raise PrefixError("register width must equal the sum of message widths")


def _classical_codewords(basis: PrefixFreeBasis) -> tuple[str, ...]:
    if not basis.verified:
        raise PrefixError("basis has not been verified prefix-free")
    words = basis.codewords()
    if not is_classical_prefix_free(words):
        raise PrefixError("condensation needs a basis carried by classical prefix-free codewords")
    return words


def _unpad(s: str, words: Sequence[str]) -> str:
    for w in words:
        if s.startswith(w) and not s[len(w):].strip("0"):
            return w
    raise PrefixError(f"not decodable by given basis: {s!r}")


def _in_span(v: FockVector, basis: PrefixFreeBasis) -> bool:
    proj = FockVector()
    for b in basis.vectors:
        proj = proj + b * inner_product(b, v)
    return (v - proj).norm() <= TOL * max(1.0, v.norm())


def unpad_message(message: RegisterVector, basis: PrefixFreeBasis) -> FockVector:
    """Strip the zero padding of a register holding a vector of ``span(basis)``."""
    words = _classical_codewords(basis)
    v = FockVector([(_unpad(s, words), a) for s, a in message.items()])
    if not _in_span(v, basis):
        raise PrefixError("not decodable by given basis: message lies outside the span")
    return v


def parse_codewords(s: str, words: Sequence[str], count: int) -> tuple[list[str], str]:
    """Split ``count`` codewords off the front of ``s``; returns them and the rest."""
    out = []
    pos = 0
    for _ in range(count):
        for w in words:
            if s.startswith(w, pos):
                out.append(w)
                pos += len(w)
                break
        else:
            raise PrefixError(f"undecodable register content {s!r}")
    return out, s[pos:]


def condense(messages: Sequence[RegisterVector], decodable_basis: PrefixFreeBasis) -> CondensedBlock:
    """Pack the payloads of several zero-extended messages to the left.

    Branch by branch this is the permutation
    ``c1 0^a (x) c2 0^b (x) ... -> c1 c2 ... 0^(a+b+...)``,
    which is unitary on the decodable subspace.
    """
    unpadded = [unpad_message(m, decodable_basis) for m in messages]
    widths = tuple(m.width for m in messages)
    total = sum(widths)
    terms: dict[str, complex] = {}
    for branch in itertools.product(*(v.items() for v in unpadded)):
        s = "".join(w for w, _ in branch)
        amp = 1 + 0j
        for _, a in branch:
            amp *= a
        key = s + "0" * (total - len(s))
        terms[key] = terms.get(key, 0j) + amp
    return CondensedBlock(RegisterVector(total, terms), len(messages), widths)


def factorize(joint: dict[tuple[str, ...], complex], parts: int) -> list[FockVector]:
    """Split a joint amplitude table over tuples into a product of factors.

    Raises :class:`PrefixError` when the table is not (numerically) a
    product.  The global phase is carried by the first factor.
    """
    if not joint:
        raise PrefixError("cannot factorize the zero vector")
    ref = max(joint, key=lambda t: abs(joint[t]))
    factors = []
    for k in range(parts):
        slice_k = {t[k]: a for t, a in joint.items() if t[:k] + t[k + 1:] == ref[:k] + ref[k + 1:]}
        factors.append(FockVector(slice_k).normalized())
    # fix the overall scalar on the first factor
    prod_ref = 1 + 0j
    for k, f in enumerate(factors):
        prod_ref *= f[ref[k]]
    factors[0] = factors[0] * (joint[ref] / prod_ref)
    keys = set(joint)
    for branch in itertools.product(*(f.support() for f in factors)):
        keys.add(branch)
    for t in keys:
        amp = 1 + 0j
        for k, f in enumerate(factors):
            amp *= f[t[k]]
        if abs(amp - joint.get(t, 0j)) > 1e-8:
            raise PrefixError("state is entangled across messages and cannot be expanded")
    return factors


def _parse_block(block: CondensedBlock, words: Sequence[str]) -> dict[tuple[str, ...], complex]:
    joint: dict[tuple[str, ...], complex] = {}
    for s, a in block.register.items():
        parsed, rest = parse_codewords(s, words, block.message_count)
        if rest.strip("0"):
            raise PrefixError(f"undecodable register content {s!r}: trailing data after {block.message_count} messages")
        for w, width in zip(parsed, block.widths):
            if len(w) > width:
                raise PrefixError(f"codeword {w!r} does not fit a register of width {width}")
        key = tuple(parsed)
        joint[key] = joint.get(key, 0j) + a
    return joint


def expand_joint(block: CondensedBlock, decodable_basis: PrefixFreeBasis) -> RegisterVector:
    """Exact inverse of :func:`condense` as a single register ``zef_1 zef_2 ... zef_n``."""
    words = _classical_codewords(decodable_basis)
    terms = []
    for parsed, a in _parse_block(block, words).items():
        padded = "".join(w + "0" * (width - len(w)) for w, width in zip(parsed, block.widths))
        terms.append((padded, a))
    return RegisterVector(block.register.width, terms)


def expand(block: CondensedBlock, decodable_basis: PrefixFreeBasis) -> list[RegisterVector]:
    """Inverse of :func:`condense`, split back into one register per message.

    A product state determines its factors only up to phases that can be
    moved between them; the global phase is put on the first message.
    """
    words = _classical_codewords(decodable_basis)
    factors = factorize(_parse_block(block, words), block.message_count)
    out = []
    for f, width in zip(factors, block.widths):
        if not _in_span(f, decodable_basis):
            raise PrefixError("not decodable by given basis: expanded message lies outside the span")
        out.append(RegisterVector(width, [(s + "0" * (width - len(s)), a) for s, a in f.items()]))
    return out


def format_block(block: CondensedBlock, digits: int = 12) -> str:
    header = f"count={block.message_count} widths={','.join(map(str, block.widths))}\n"
    return header + format_terms(block.register, digits)


def parse_block(text: str) -> CondensedBlock:
    lines = text.splitlines()
    if not lines:
        raise PrefixError("line 1: empty condensed block")
    try:
        fields = dict(f.split("=", 1) for f in lines[0].split())
        count = int(fields["count"])
        widths = tuple(int(w) for w in fields["widths"].split(","))
    except (KeyError, ValueError):
        raise PrefixError(f"line 1: bad block header {lines[0]!r}") from None
    register = parse_register("\n".join(lines[1:]), start_line=2)
    return CondensedBlock(register, count, widths)
