"""Command-line entry point.

Exit codes: 0 success, 1 usage or cap violation, 2 parse error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import formats
from .channelsim import (
    DEFAULT_QUBIT_CAP,
    ChannelError,
    NoiseConfig,
    compare_noise,
    format_lossy,
    format_noise,
    format_trace,
    lossy_truncate,
    monte_carlo_disturbance,
    transmit,
)
from .codec import CodeError, brute_force_optimal, build_code, check_entropy_bounds
from .decomposition import DEFAULT_MAX_STATES, DecompositionError, decompose, format_decomposition
from .fockstring import FockError, average_length, base_length, format_state, parse_state
from .prefix import PrefixError, is_prefix_free_set, is_self_prefix

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VERIFY = 0, 1, 2, 3

COMMANDS = ("inspect", "decompose", "build-code", "encode", "decode", "verify", "channel", "noise", "lossy")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _ParseFailure(Exception):
    pass


def _read(spec: str) -> str:
    """Read a path, ``-`` for stdin, or ``fixture:<name>`` for a bundled ensemble."""
    if spec.startswith("fixture:"):
        return formats.fixture_text(spec.split(":", 1)[1])
    if spec == "-":
        return sys.stdin.read()
    return Path(spec).read_text()


def _is_ensemble_text(text: str) -> bool:
    return any(line.split("#", 1)[0].split()[:1] == ["state"] for line in text.splitlines())


def _ensemble(spec: str):
    try:
        return formats.parse_ensemble(_read(spec))
    except (formats.ParseError, FockError) as exc:
        raise _ParseFailure(f"{spec}: {exc}") from None


def _state(spec: str):
    try:
        return parse_state(_read(spec))
    except FockError as exc:
        raise _ParseFailure(f"{spec}: {exc}") from None


def _yesno(b: bool) -> str:
    return "yes" if b else "no"


def cmd_inspect(args) -> tuple[str, int]:
    text = _read(args.input)
    if _is_ensemble_text(text):
        try:
            states = formats.parse_ensemble(text).states
        except (formats.ParseError, FockError) as exc:
            raise _ParseFailure(f"{args.input}: {exc}") from None
    else:
        states = (_state(args.input),)
    lines = ["state\tbase_length\taverage_length\tdeterminate\tself_prefix"]
    for i, v in enumerate(states):
        lines.append(
            f"{i}\t{base_length(v)}\t{average_length(v):.6g}\t{_yesno(v.is_determinate())}\t{_yesno(is_self_prefix(v))}"
        )
    lines.append(f"# prefix_free_set={_yesno(is_prefix_free_set(states))}")
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_decompose(args):
    E = _ensemble(args.input)
    return format_decomposition(decompose(E, args.cap_states)), EXIT_OK


def cmd_build_code(args):
    E = _ensemble(args.input)
    return build_code(decompose(E, args.cap_states)).to_table(), EXIT_OK


def _code_for(args):
    if not args.ensemble:
        raise argparse.ArgumentTypeError("--ensemble is required to build the code")
    return build_code(decompose(_ensemble(args.ensemble), args.cap_states))


def cmd_encode(args):
    code = _code_for(args)
    return format_state(code.encode(_state(args.input))), EXIT_OK


def cmd_decode(args):
    code = _code_for(args)
    return format_state(code.decode(_state(args.input))), EXIT_OK


def cmd_verify(args):
    E = _ensemble(args.input)
    D = decompose(E, args.cap_states)
    code = build_code(D)
    bounds = check_entropy_bounds(code, E, D)
    kraft = code.kraft_sum()
    rows = [
        ("entropy", f"{bounds.entropy:.6g}", "-"),
        ("expected_base_length", f"{bounds.expected_length:.6g}", "-"),
        ("lower_bound", f"{bounds.entropy:.6g}<={bounds.expected_length:.6g}", "PASS" if bounds.lower_ok else "FAIL"),
        ("upper_bound", f"{bounds.expected_length:.6g}<={bounds.entropy + 1:.6g}", "PASS" if bounds.upper_ok else "FAIL"),
        ("kraft", f"{kraft:.6g}<=1", "PASS" if kraft <= 1 + 1e-12 else "FAIL"),
    ]
    try:
        optimum, _ = brute_force_optimal(E)
    except CodeError as exc:
        rows.append(("oracle_gap", str(exc).replace("\t", " "), "SKIP"))
    else:
        gap = bounds.expected_length - optimum
        rows.append(("oracle_gap", f"{gap:.6g}<=1", "PASS" if gap <= 1 + 1e-9 else "FAIL"))
    failed = any(status == "FAIL" for *_, status in rows)
    out = "check\tvalue\tstatus\n" + "".join(f"{a}\t{b}\t{c}\n" for a, b, c in rows)
    return out, EXIT_VERIFY if failed else EXIT_OK


def cmd_channel(args):
    message = _state(args.input)
    steps = base_length(message) if args.steps is None else args.steps
    width = max(steps, base_length(message))
    result = transmit(message, steps, width=width, cap=args.cap_qubits)
    return format_trace(result), EXIT_OK


def cmd_noise(args):
    E = _ensemble(args.input)
    noise = NoiseConfig(args.noise_p, args.model)
    base, avg = compare_noise(E, noise)
    out = format_noise([base, avg])
    if args.trials:
        code = build_code(decompose(E, args.cap_states))
        touched, fid = monte_carlo_disturbance(code, E, noise, args.trials, args.seed)
        out += f"# monte_carlo arm=base model={noise.model} trials={args.trials} seed={args.seed} touched={touched:.6g} fidelity={fid:.6g}\n"
    return out, EXIT_OK


def cmd_lossy(args):
    E = _ensemble(args.input)
    return format_lossy(lossy_truncate(E, args.copies, args.delta, cap=args.cap_qubits)), EXIT_OK


HANDLERS = {
    "inspect": cmd_inspect,
    "decompose": cmd_decompose,
    "build-code": cmd_build_code,
    "encode": cmd_encode,
    "decode": cmd_decode,
    "verify": cmd_verify,
    "channel": cmd_channel,
    "noise": cmd_noise,
    "lossy": cmd_lossy,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qlossless", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", required=True, help="state/ensemble file, '-' for stdin, or fixture:<name>")
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--ensemble", help="ensemble defining the code (encode/decode)")
    parser.add_argument("--seed", type=int, default=0, help="64-bit seed for Monte Carlo noise")
    parser.add_argument("--cap-qubits", type=int, default=DEFAULT_QUBIT_CAP)
    parser.add_argument("--cap-states", type=int, default=DEFAULT_MAX_STATES)
    parser.add_argument("--delta", type=float, default=0.25)
    parser.add_argument("--noise-p", type=float, default=0.1)
    parser.add_argument("--copies", type=int, default=4)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--trials", type=int, default=0, help="Monte Carlo trials for 'noise' (0 = analytic only)")
    parser.add_argument("--model", choices=("erasure-flag", "bit-flip"), default="erasure-flag")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 0 <= args.seed < 2**64:
        parser.error("--seed must fit in 64 bits")
    try:
        out, status = HANDLERS[args.command](args)
    except _ParseFailure as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except argparse.ArgumentTypeError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DecompositionError, CodeError, ChannelError, PrefixError, FockError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
