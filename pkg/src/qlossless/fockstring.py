"""Indeterminate-length quantum strings.

A :class:`FockVector` is a sparse map from classical bitstrings (of any
length, including the empty string) to complex amplitudes, i.e. an element
of the Fock space ``H^+ = (+)_n H^{(x)n}``.  Bitstrings are plain ``str``
objects over ``"01"``; the empty string ``""`` is the empty word.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

TOL = 1e-9
"""Magnitude at or below which an amplitude is treated as zero."""

NORM_TOL = 1e-9
PARSE_NORM_TOL = 1e-6
MAX_LENGTH = 24

EMPTY_TOKEN = "eps"


class FockError(ValueError):
    pass


def string_key(s: str) -> tuple[int, str]:
    """Sort key: length first, then lexicographic."""
    return (len(s), s)


def _check_bits(s: str) -> None:
    if not isinstance(s, str) or (s and s.strip("01")):
        raise FockError(f"not a bitstring: {s!r}")
    if len(s) > MAX_LENGTH:
        raise FockError(f"string of length {len(s)} exceeds the maximum of {MAX_LENGTH}")


class FockVector:
    """Immutable sparse vector over variable-length bitstrings.

    Amplitudes with magnitude ``<= TOL`` are dropped on construction, and
    terms are stored in length-then-lexicographic order so that two equal
    vectors have identical ``items()``.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[str, complex] | Iterable[tuple[str, complex]] = ()):
        if isinstance(terms, Mapping):
            terms = terms.items()
        acc: dict[str, complex] = {}
        for s, a in terms:
            _check_bits(s)
            acc[s] = acc.get(s, 0j) + complex(a)
        self._terms = {s: acc[s] for s in sorted(acc, key=string_key) if abs(acc[s]) > TOL}
        self._hash = None

    @classmethod
    def basis(cls, s: str) -> "FockVector":
        return cls({s: 1.0})

    @classmethod
    def superposition(cls, *strings: str) -> "FockVector":
        """Uniform superposition of the given distinct strings."""
        amp = 1 / math.sqrt(len(strings))
        return cls({s: amp for s in strings})

    # mapping-ish access
    def items(self):
        return self._terms.items()

    def support(self) -> tuple[str, ...]:
        return tuple(self._terms)

    def __getitem__(self, s: str) -> complex:
        return self._terms.get(s, 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FockVector):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "FockVector(0)"
        parts = [f"({a.real:.4g}{a.imag:+.4g}j)|{s or 'eps'}>" for s, a in self._terms.items()]
        return "FockVector(" + " + ".join(parts) + ")"

    # linear structure
    def __add__(self, other: "FockVector") -> "FockVector":
        terms = dict(self._terms)
        for s, a in other.items():
            terms[s] = terms.get(s, 0j) + a
        return FockVector(terms)

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other * -1

    def __mul__(self, c: complex) -> "FockVector":
        return FockVector({s: a * c for s, a in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c: complex) -> "FockVector":
        return self * (1 / c)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._terms.values()))

    def normalized(self) -> "FockVector":
        n = self.norm()
        if n <= TOL:
            raise FockError("cannot normalize the zero vector")
        return self / n

    def is_state(self) -> bool:
        return bool(self._terms) and abs(self.norm() - 1) <= NORM_TOL

    def lengths(self) -> tuple[int, ...]:
        """Distinct branch lengths, ascending."""
        return tuple(sorted({len(s) for s in self._terms}))

    def is_determinate(self) -> bool:
        return len(self.lengths()) <= 1


class RegisterVector:
    """State of a fixed-width qubit register; every support string has length ``width``."""

    __slots__ = ("width", "vector")

    def __init__(self, width: int, terms: Mapping[str, complex] | Iterable[tuple[str, complex]] | FockVector = ()):
        vector = terms if isinstance(terms, FockVector) else FockVector(terms)
        bad = [s for s in vector if len(s) != width]
        if bad:
            raise FockError(f"register of width {width} cannot hold {bad[0]!r}")
        self.width = width
        self.vector = vector

    def items(self):
        return self.vector.items()

    def support(self) -> tuple[str, ...]:
        return self.vector.support()

    def norm(self) -> float:
        return self.vector.norm()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RegisterVector):
            return NotImplemented
        return self.width == other.width and self.vector == other.vector

    def __repr__(self) -> str:
        return f"RegisterVector(width={self.width}, {self.vector!r})"


def _require_nonzero(v: FockVector) -> None:
    if not v:
        raise FockError("zero vector has no length")


def base_length(v: FockVector) -> int:
    """Length of the longest branch carrying a nonzero amplitude."""
    _require_nonzero(v)
    return max(len(s) for s in v)


def average_length(v: FockVector) -> float:
    """Amplitude-squared weighted branch length, ``sum |a_i|^2 l(i)``."""
    _require_nonzero(v)
    return sum(abs(a) ** 2 * len(s) for s, a in v.items())


def is_indeterminate(v: FockVector) -> bool:
    return not v.is_determinate()


def zero_extended_form(v: FockVector, width: int) -> RegisterVector:
    """Pad every branch on the right with zeros up to ``width`` qubits.

    Distinct branches may collide after padding (``|1>`` and ``|10>``), in
    which case their amplitudes add; the map is only injective on sets of
    strings where no padded string is a zero-extension of another.
    """
    if v and width < base_length(v):
        raise FockError(f"register too small: width {width} < base length {base_length(v)}")
    return RegisterVector(width, [(s + "0" * (width - len(s)), a) for s, a in v.items()])


def concatenate(u: FockVector, v: FockVector) -> FockVector:
    """Bilinear extension of string concatenation."""
    terms: dict[str, complex] = {}
    for x, a in u.items():
        for y, b in v.items():
            terms[x + y] = terms.get(x + y, 0j) + a * b
    return FockVector(terms)


def inner_product(u: FockVector, v: FockVector) -> complex:
    """``<u|v>``, conjugate-linear in the first argument."""
    if len(u) > len(v):
        return sum(u[s].conjugate() * b for s, b in v.items())
    return sum(a.conjugate() * v[s] for s, a in u.items())


def canonicalize(v: FockVector) -> FockVector:
    return FockVector(v.items())


# --- textual literal -------------------------------------------------------

def _format_number(x: float, digits: int) -> str:
    if x == 0:
        x = 0.0  # drops the sign of -0.0
    return f"{x:.{digits}g}"


def format_terms(v: FockVector | RegisterVector, digits: int = 12) -> str:
    """One ``<bits|eps> <re> <im>`` line per term."""
    lines = []
    for s, a in v.items():
        lines.append(f"{s or EMPTY_TOKEN} {_format_number(a.real, digits)} {_format_number(a.imag, digits)}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_terms(lines: Iterable[str], start_line: int = 1) -> list[tuple[str, complex]]:
    """Parse term lines into ``(bits, amplitude)`` pairs; ``#`` starts a comment."""
    terms = []
    for lineno, raw in enumerate(lines, start_line):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise FockError(f"line {lineno}: expected '<bits> <re> [<im>]', got {raw.strip()!r}")
        bits = "" if fields[0] == EMPTY_TOKEN else fields[0]
        try:
            _check_bits(bits)
            re_ = float(fields[1])
            im = float(fields[2]) if len(fields) == 3 else 0.0
        except ValueError as exc:
            raise FockError(f"line {lineno}: {exc}") from None
        terms.append((bits, complex(re_, im)))
    return terms


def parse_state(text: str, start_line: int = 1) -> FockVector:
    """Parse a state literal, rejecting norms off by more than ``PARSE_NORM_TOL``.

    The result is renormalized to unit norm.
    """
    v = FockVector(parse_terms(text.splitlines(), start_line))
    n = v.norm()
    if abs(n - 1) > PARSE_NORM_TOL:
        raise FockError(f"line {start_line}: state norm {n:.9g} deviates from 1 by more than {PARSE_NORM_TOL:g}")
    return v / n


def format_state(v: FockVector, digits: int = 12) -> str:
    return format_terms(v, digits)


def parse_register(text: str, start_line: int = 1) -> RegisterVector:
    terms = parse_terms(text.splitlines(), start_line)
    if not terms:
        raise FockError(f"line {start_line}: empty register literal")
    widths = {len(s) for s, _ in terms}
    if len(widths) != 1:
        raise FockError(f"line {start_line}: register terms have mixed widths {sorted(widths)}")
    return RegisterVector(widths.pop(), terms)
