import math

import numpy as np
import pytest

from conftest import R2, ket, noise_ensemble, plus
from oracles import eigen_branch_success, random_state
from qlossless.channelsim import (
    ChannelError,
    NoiseConfig,
    append_message,
    average_length_code,
    channel_init,
    channel_step,
    compare_noise,
    disturbance_report,
    format_noise,
    lossy_truncate,
    monte_carlo_disturbance,
    transmit,
)
from qlossless.codec import build_code
from qlossless.decomposition import Ensemble, decompose
from qlossless.fockstring import FockVector, RegisterVector, zero_extended_form


def reg(width, v):
    return zero_extended_form(v, width)


def test_init():
    s = channel_init(reg(2, ket("10")), 2)
    assert s.joint == ket("10000")
    sup = channel_init(reg(2, plus("00", "10")), 2)
    assert (sup.joint - FockVector({"00000": R2, "10000": R2})).norm() < 1e-12


def test_init_cap():
    with pytest.raises(ChannelError, match="cap"):
        channel_init(reg(10, ket("1")), 10, cap=16)


def test_two_steps_move_the_message():
    s = channel_init(reg(2, ket("10")), 2)
    s = channel_step(channel_step(s))
    assert s.joint == ket("00010")
    with pytest.raises(ChannelError):
        channel_step(s)


def test_step_is_linear():
    s = channel_step(channel_init(reg(2, plus("00", "10")), 2))
    assert (s.joint - FockVector({"00000": R2, "00010": R2})).norm() < 1e-12


def test_transmit_determinate():
    r = transmit(ket("10"), 2)
    assert r.complete and r.fidelity == pytest.approx(1.0, abs=1e-12)
    assert (r.bob_state.vector - ket("10")).norm() < 1e-12


def test_transmit_superposed_lengths():
    # condensed from the prefix code {0, 10}: branches of length 1 and 2
    msg = plus("0", "10")
    r = transmit(msg, 2)
    assert r.complete and r.fidelity == pytest.approx(1.0, abs=1e-12)
    assert (r.bob_state.vector - plus("00", "10")).norm() < 1e-12
    assert all(n == pytest.approx(1.0) for n in r.trace)


def test_transmit_rejects_colliding_padding():
    with pytest.raises(ChannelError, match="collide"):
        transmit(plus("0", "00"), 2)


def test_transmit_incomplete():
    r = transmit(ket("11"), 1)
    assert not r.complete


@pytest.mark.parametrize("width_extra", [0, 2])
def test_random_messages_transfer_in_base_length_steps(rng, width_extra):
    for _ in range(20):
        words = ["0", "10", "110", "1110", "1111", "01"][: int(rng.integers(1, 6))]
        strings = list(rng.choice(words, size=min(3, len(words)), replace=False))
        msg = random_state(rng, strings)
        L = max(len(s) for s in strings)
        r = transmit(msg, L, width=L + width_extra)
        assert r.complete
        assert r.fidelity == pytest.approx(1.0, abs=1e-12)


def test_append_mid_transmission():
    first = ket("10")
    s = channel_init(reg(4, first), 4)
    s = channel_step(s)
    s = append_message(s, reg(2, ket("11")), offset=2)
    for _ in range(3):
        s = channel_step(s)
    bob = s.bob_register()
    assert bob is not None and (bob.vector - ket("1011")).norm() < 1e-12


def test_append_rejects_sent_or_dirty_region():
    s = channel_step(channel_init(reg(4, ket("10")), 4))
    with pytest.raises(ChannelError):
        append_message(s, reg(1, ket("1")), offset=0)
    dirty = channel_step(channel_init(reg(4, ket("1100")), 4))
    with pytest.raises(ChannelError, match="not blank"):
        append_message(dirty, reg(2, ket("11")), offset=1)
    with pytest.raises(ChannelError):
        append_message(s, reg(2, ket("11")), offset=3)


def test_noise_example_is_p(e_noise):
    for p in (0.0, 0.05, 0.1, 0.3):
        rep = disturbance_report(build_code(decompose(e_noise)), e_noise, NoiseConfig(p))
        assert rep.touch_prob == pytest.approx(p, abs=1e-15)


def test_noise_p_zero(plane):
    base, avg = compare_noise(plane, NoiseConfig(0.0))
    for rep in (base, avg):
        assert rep.touch_prob == 0.0
        assert rep.untouched_weight == pytest.approx(1.0, abs=1e-12)


def test_length_two_state():
    E = Ensemble(((1.0, ket("10")),))
    code = build_code(decompose(E))
    # a lone state gets a length-1 code, so build a length-2 one directly
    two = Ensemble(tuple((0.25, ket(s)) for s in ("00", "01", "10", "11")))
    rep = disturbance_report(build_code(decompose(two)), two, NoiseConfig(0.1))
    assert rep.touch_prob == pytest.approx(0.19, abs=1e-12)
    assert rep.untouched_weight == pytest.approx(0.81, abs=1e-12)
    assert disturbance_report(code, E, NoiseConfig(0.1)).touch_prob == pytest.approx(0.1)


def test_metrics_monotone_in_p(plane, e_noise):
    for E in (plane, e_noise):
        prev = None
        for p in np.linspace(0, 1, 11):
            base, avg = compare_noise(E, NoiseConfig(float(p)))
            cur = (base.touch_prob, base.untouched_weight, avg.touch_prob, avg.untouched_weight)
            if prev is not None:
                assert cur[0] >= prev[0] - 1e-15 and cur[2] >= prev[2] - 1e-15
                assert cur[1] <= prev[1] + 1e-15 and cur[3] <= prev[3] + 1e-15
            prev = cur


def test_average_length_code_noise_example(e_noise):
    C = average_length_code(e_noise)
    assert C.lengths == (1, 2)
    assert C.ideal_lengths[0] == pytest.approx(-math.log2(0.75))
    assert C.ideal_lengths[1] == pytest.approx(2.0)
    assert (C.basis[0] - ket("0")).norm() < 1e-12


def test_average_length_code_pure_state():
    C = average_length_code(Ensemble(((1.0, plus("0", "1")),)))
    assert C.lengths == (1,)


def test_average_length_code_degenerate_is_canonical(e_noise):
    C = average_length_code(noise_ensemble(0.5))
    assert [tuple(b.support()) for b in C.basis] == [("0",), ("1",)]


def test_bad_noise_config():
    with pytest.raises(ChannelError):
        NoiseConfig(1.5)
    with pytest.raises(ChannelError):
        NoiseConfig(0.1, "depolarizing")


def test_format_noise_has_two_arms(e_noise):
    lines = format_noise(compare_noise(e_noise, NoiseConfig(0.1))).splitlines()
    assert lines[0].startswith("arm\tstate")
    assert sum(line.startswith("base\tall") for line in lines) == 1
    assert sum(line.startswith("average\tall") for line in lines) == 1


def test_monte_carlo_is_seeded(e_noise):
    C = build_code(decompose(e_noise))
    a = monte_carlo_disturbance(C, e_noise, NoiseConfig(0.2, "bit-flip"), 2000, seed=7)
    b = monte_carlo_disturbance(C, e_noise, NoiseConfig(0.2, "bit-flip"), 2000, seed=7)
    assert a == b
    assert a[0] == pytest.approx(0.2, abs=0.03)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_lossy_matches_enumeration(e_noise, n):
    r = lossy_truncate(e_noise, n, 0.25)
    want = eigen_branch_success([0.75, 0.25], [1, 2], n, r.cut)
    assert r.success_probability == pytest.approx(want, abs=1e-9)
    assert r.cut == math.ceil(n * (r.entropy + 0.25) - 1e-9)


def test_lossy_large_delta_keeps_everything(e_noise):
    r = lossy_truncate(e_noise, 3, 5.0)
    assert r.success_probability == pytest.approx(1.0, abs=1e-12)
    assert r.fidelity == pytest.approx(1.0, abs=1e-12)


def test_lossy_cut_below_shortest_codeword(e_noise):
    # S = H(0.75) ~ 0.811, so delta = -0.5 gives a cut of 1 ... push below
    r = lossy_truncate(e_noise, 1, -0.9)
    assert r.cut == 0
    assert r.success_probability == 0.0


def test_lossy_success_grows_with_delta(e_noise):
    values = [lossy_truncate(e_noise, 4, d).success_probability for d in (0.0, 0.25, 0.5, 1.0, 1.25)]
    assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(1.0)


def test_lossy_cap(e_noise):
    with pytest.raises(ChannelError, match="cap"):
        lossy_truncate(e_noise, 9, 0.25, cap=16)
