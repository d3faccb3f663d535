"""Ensemble file reader/writer and bundled fixtures.

Ensemble files are line oriented::

    # comment
    state 0.5
    0   0.866025403784 0
    1   0.5            0

    state 0.5
    ...

Each ``state <weight>`` header is followed by FockVector term lines.
"""

from __future__ import annotations

from importlib import resources

from .decomposition import DecompositionError, Ensemble
from .fockstring import PARSE_NORM_TOL, FockError, FockVector, format_terms, parse_terms


class ParseError(ValueError):
    pass


def parse_ensemble(text: str) -> Ensemble:
    items: list[tuple[float, int, list[tuple[str, complex]]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "state":
            if len(fields) != 2:
                raise ParseError(f"line {lineno}: expected 'state <weight>'")
            try:
                items.append((float(fields[1]), lineno, []))
            except ValueError:
                raise ParseError(f"line {lineno}: bad weight {fields[1]!r}") from None
            continue
        if not items:
            raise ParseError(f"line {lineno}: term line before any 'state' header")
        try:
            items[-1][2].extend(parse_terms([raw], lineno))
        except FockError as exc:
            raise ParseError(str(exc)) from None
    if not items:
        raise ParseError("line 1: no states found")
    pairs = []
    for weight, lineno, terms in items:
        v = FockVector(terms)
        n = v.norm()
        if abs(n - 1) > PARSE_NORM_TOL:
            raise ParseError(f"line {lineno}: state norm {n:.9g} deviates from 1 by more than {PARSE_NORM_TOL:g}")
        pairs.append((weight, v / n))
    try:
        return Ensemble(tuple(pairs))
    except DecompositionError as exc:
        raise ParseError(f"line {items[0][1]}: {exc}") from None


def format_ensemble(E: Ensemble, digits: int = 12) -> str:
    blocks = [f"state {p:.{digits}g}\n" + format_terms(v, digits) for p, v in E]
    return "\n".join(blocks)


FIXTURES = ("plane", "noise", "classical")


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    return resources.files("qlossless.fixtures").joinpath(f"{name}.ens").read_text()


def load_fixture(name: str) -> Ensemble:
    return parse_ensemble(fixture_text(name))
