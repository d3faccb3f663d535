"""The ten acceptance criteria, each at its stated tolerance.

Every test prints (and records for the end-of-run summary) exactly one
``criterion N: PASS|FAIL`` line, then asserts.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, ket, noise_ensemble, plus
from oracles import (
    eigen_branch_success,
    entropy,
    exhaustive_decomposition,
    random_ensemble,
    random_state,
    random_unitary,
    rotate,
)
from qlossless.channelsim import (
    NoiseConfig,
    append_message,
    channel_init,
    channel_step,
    compare_noise,
    disturbance_report,
    lossy_truncate,
    transmit,
)
from qlossless.codec import brute_force_optimal, build_code, check_entropy_bounds, expected_base_length
from qlossless.decomposition import Ensemble, decompose
from qlossless.fockstring import FockVector, inner_product, zero_extended_form
from qlossless.prefix import PrefixError, is_prefix_free_space, is_self_prefix, kraft_sums

N_RANDOM = 1000
PLANE_ENTROPY = -2 * 0.4375 * math.log2(0.4375) - 0.125 * math.log2(0.125)
PLANE_LENGTH = 0.875 * 2 + 0.125 * 3


def report(n, name, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {name}  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def instances():
    """1000 random ensembles (<= 5 states, span <= 4, lengths <= 6) with their codes."""
    rng = np.random.default_rng(1234)
    out = []
    for _ in range(N_RANDOM):
        E = random_ensemble(rng, max_states=5, max_dim=4, max_len=6)
        D = decompose(E)
        out.append((E, D, build_code(D)))
    return out


def test_criterion_01_losslessness(instances):
    worst = 0.0
    for E, _, C in instances:
        for v in E.states:
            back = C.decode(C.encode(v))
            # the difference vector is pruned below 1e-9, the overlap is not
            worst = max(worst, (back - v).norm(), abs(1 - inner_product(v, back)))
    report(1, "losslessness", worst <= 1e-9, f"{N_RANDOM} ensembles, max error {worst:.2e}")


def test_criterion_02_entropy_sandwich(instances, plane, e_noise, classical):
    bad = 0
    cases = [(E, D, C) for E, D, C in instances]
    for E in (plane, e_noise, classical):
        D = decompose(E)
        cases.append((E, D, build_code(D)))
    for E, D, C in cases:
        bad += not check_entropy_bounds(C, E, D).ok
    D = decompose(plane)
    r = check_entropy_bounds(build_code(D), plane, D)
    fig_ok = abs(r.entropy - PLANE_ENTROPY) <= 1e-6 and abs(r.expected_length - PLANE_LENGTH) <= 1e-6
    report(
        2,
        "entropy sandwich",
        bad == 0 and fig_ok,
        f"{bad} violations in {len(cases)}; plane S={r.entropy:.6f} E[L]={r.expected_length:.6f}",
    )


def test_criterion_03_optimality_gap(instances):
    worst, checked, bad = -math.inf, 0, 0
    for E, _, C in instances:
        if E.span_dimension() > 3:
            continue
        opt, _ = brute_force_optimal(E)
        gap = expected_base_length(C, E) - opt
        bad += gap > 1 + 1e-9 or gap < -1e-9
        worst = max(worst, gap)
        checked += 1
    report(3, "optimality gap", bad == 0 and checked > 0, f"{checked} instances, max gap {worst:.4f}")


def test_criterion_04_kraft(instances, classical):
    rng = np.random.default_rng(4)
    bad = 0
    for E, _, C in instances:
        image = [FockVector.basis(w) for w in C.codewords]
        # a rebasing mixes lengths, which separates the two sums
        rotated = rotate(image, random_unitary(rng, len(image)))
        for vs in (image, rotated):
            base, avg = kraft_sums(vs)
            bad += not (base <= avg + 1e-12 and avg <= 1 + 1e-12)
    complete = [build_code(decompose(classical)).kraft_sum()]
    uniform = Ensemble(tuple((0.25, ket(s)) for s in ("00", "01", "10", "11")))
    complete.append(build_code(decompose(uniform)).kraft_sum())
    exact = all(k == 1.0 for k in complete)
    report(4, "Kraft", bad == 0 and exact, f"{bad} violations; complete codes sum to {complete}")


def test_criterion_05_basis_independence(instances):
    rng = np.random.default_rng(5)
    ok = 0
    spaces = [[FockVector.basis(w) for w in C.codewords] for _, _, C in instances]
    spaces = [s for s in spaces if len(s) > 1]
    for k in range(200):
        base = is_prefix_free_space(spaces[k % len(spaces)]).vectors
        try:
            ok += is_prefix_free_space(rotate(base, random_unitary(rng, len(base)))).verified
        except PrefixError:
            pass
    report(5, "prefix-freeness is basis independent", ok == 200, f"{ok}/200 rebasings verified")


def test_criterion_06_self_prefix():
    rng = np.random.default_rng(6)
    cases = [plus("0", "00")]
    for _ in range(50):
        alpha, beta = rng.normal(size=2) + 1j * rng.normal(size=2)
        phi = random_state(rng, sorted({"1", "01", "110"}))
        v = FockVector({"": alpha}) + phi * beta
        cases.append(v.normalized())
    flagged = sum(is_self_prefix(v) for v in cases)
    rejected = 0
    for v in cases:
        try:
            is_prefix_free_space([v])
        except PrefixError:
            rejected += 1
    report(6, "self-prefix facts", flagged == rejected == len(cases), f"{flagged} flagged, {rejected} rejected of {len(cases)}")


def test_criterion_07_channel():
    rng = np.random.default_rng(7)
    words = ["0", "10", "110", "111"]
    worst = 0.0
    bad = 0
    for _ in range(100):
        k = int(rng.integers(1, 4))
        support = sorted(rng.choice(words, size=k, replace=False), key=len)
        msg = random_state(rng, support)
        L = max(len(w) for w in support)
        r = transmit(msg, L)
        bad += not r.complete
        worst = max(worst, abs(1 - (r.fidelity or 0.0)))
    s = channel_init(zero_extended_form(ket("10"), 4), 4)
    s = channel_step(s)
    s = append_message(s, zero_extended_form(plus("0", "10"), 2), offset=2)
    for _ in range(3):
        s = channel_step(s)
    bob = s.bob_register()
    append_ok = bob is not None and (bob.vector - plus("1000", "1010")).norm() <= 1e-12
    report(7, "channel protocol", bad == 0 and worst <= 1e-12 and append_ok, f"max 1-fidelity {worst:.1e}, append {'ok' if append_ok else 'failed'}")


def test_criterion_08_noise(e_noise, plane):
    C = build_code(decompose(e_noise))
    ps = [0.0, 0.01, 0.1, 0.25, 0.5, 0.9, 1.0]
    exact = all(abs(disturbance_report(C, e_noise, NoiseConfig(p)).touch_prob - p) <= 1e-15 for p in ps)
    monotone = True
    for E in (e_noise, plane, noise_ensemble(0.1)):
        prev = None
        for p in np.linspace(0, 1, 21):
            base, avg = compare_noise(E, NoiseConfig(float(p)))
            cur = np.array([base.touch_prob, -base.untouched_weight, avg.touch_prob, -avg.untouched_weight])
            if prev is not None and np.any(cur < prev - 1e-15):
                monotone = False
            prev = cur
    report(8, "noise example", exact and monotone, f"touch prob equals p: {exact}; monotone: {monotone}")


def test_criterion_09_lossy(e_noise):
    eig, lengths = [0.75, 0.25], [1, 2]
    worst = 0.0
    for n in range(1, 7):
        for delta in (0.0, 0.25, 0.5):
            r = lossy_truncate(e_noise, n, delta)
            worst = max(worst, abs(r.success_probability - eigen_branch_success(eig, lengths, n, r.cut)))
    entropy_ok = abs(lossy_truncate(e_noise, 1, 0.25).entropy - entropy([(0.75, 1), (0.25, 1)])) <= 1e-12
    series = [lossy_truncate(e_noise, 4, d).success_probability for d in np.linspace(0, 1.5, 7)]
    tends = all(a <= b + 1e-12 for a, b in zip(series, series[1:])) and abs(series[-1] - 1) <= 1e-12
    report(9, "lossy truncation", worst <= 1e-9 and entropy_ok and tends, f"max deviation {worst:.1e}; success at large delta {series[-1]:.6f}")


def test_criterion_10_decomposition_oracle(instances):
    mismatches = 0
    worst_trace = 0.0
    for E, D, _ in instances:
        want = []
        for v, d in exhaustive_decomposition(E):
            if want and abs(want[-1][0] - v) <= 1e-12:
                want[-1] = (want[-1][0], want[-1][1] + d)
            else:
                want.append((v, d))
        got = sorted((round(v, 9), m) for v, m in D.density_eigenvalues)
        mismatches += got != sorted((round(v, 9), d) for v, d in want)
        worst_trace = max(worst_trace, abs(D.trace - 1))
    report(10, "decomposition oracle", mismatches == 0 and worst_trace <= 1e-9, f"{mismatches} mismatches in {N_RANDOM}; max |trace-1| {worst_trace:.1e}")
