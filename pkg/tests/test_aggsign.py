import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fogsec import aggsign
from fogsec.aggsign import SignedFrame, Signature
from fogsec.pairing import DecodeError, OpCounter, counting, setup_pairing

from conftest import log_of


def _frame(P, n, rng, msg_size=16):
    kp = aggsign.keygen(P, rng)
    packets = [rng.randbytes(msg_size) for _ in range(n)]
    return kp, packets, [aggsign.sign(P, d, kp.sk) for d in packets]


def test_pk_is_g_to_sk(params, rng):
    kp = aggsign.keygen(params, rng)
    assert kp.pk == params.g ** kp.sk


def test_sign_with_unit_key_is_hash(params):
    assert aggsign.sign(params, b"pkt", 1).sigma == params.hash_to_g1(b"pkt")


def test_sign_mock_exponents(mock):
    h = log_of(mock.hash_to_g1(b"D"))
    assert log_of(aggsign.sign(mock, b"D", 7).sigma) == 7 * h % mock.q


def test_sign_rejects_empty_packet(params):
    with pytest.raises(ValueError):
        aggsign.sign(params, b"", 3)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_sign_cost(params, n):
    with counting() as c:
        for i in range(n):
            aggsign.sign(params, bytes([i + 1]), 5)
    assert c == OpCounter(exponentiations=n, hashes=n)


def test_aggregate_of_one_is_identity_op(params, rng):
    _, _, sigs = _frame(params, 1, rng)
    agg = aggsign.aggregate(sigs)
    assert agg.to_bytes() == sigs[0].to_bytes()


def test_aggregate_mock_sums_logs(mock):
    sigs = [Signature(mock.g1_from_log(v)) for v in (3, 5, 11)]
    assert log_of(aggsign.aggregate(sigs).sigma) == 19


def test_aggregate_empty():
    with pytest.raises(ValueError):
        aggsign.aggregate([])


@pytest.mark.parametrize("n", [1, 3, 12])
def test_aggregate_size_constant(params, rng, n):
    _, _, sigs = _frame(params, n, rng)
    assert len(aggsign.aggregate(sigs).to_bytes()) == 96


def test_verify_aggregate_n7(params, rng):
    kp, packets, sigs = _frame(params, 7, rng)
    agg = aggsign.aggregate(sigs)
    with counting() as c:
        assert aggsign.verify_aggregate(params, packets, agg, kp.pk)
    assert c == OpCounter(pairings=8, hashes=7)


def test_verify_aggregate_tamper_sweep_mock(mock, rng):
    kp, packets, sigs = _frame(mock, 3, rng)
    agg = aggsign.aggregate(sigs)
    for j in range(3):
        for replacement in (b"x", packets[(j + 1) % 3] + b"!", bytes(16)):
            tampered = list(packets)
            tampered[j] = replacement
            assert not aggsign.verify_aggregate(mock, tampered, agg, kp.pk)


def test_verify_aggregate_random_sig(params, rng):
    kp, packets, _ = _frame(params, 4, rng)
    assert not aggsign.verify_aggregate(params, packets, Signature(params.random_g1(rng)), kp.pk)


def test_verify_aggregate_empty(params, rng):
    kp = aggsign.keygen(params, rng)
    with pytest.raises(ValueError):
        aggsign.verify_aggregate(params, [], Signature(params.g), kp.pk)


def test_verify_single(params, rng):
    kp, packets, sigs = _frame(params, 1, rng)
    other = aggsign.keygen(params, rng)
    assert aggsign.verify_single(params, packets[0], sigs[0], kp.pk)
    assert not aggsign.verify_single(params, packets[0], sigs[0], other.pk)


def test_verify_bls_counts_2n_pairings(params, rng):
    kp, packets, sigs = _frame(params, 5, rng)
    frame = SignedFrame(packets, sigs)
    with counting() as c:
        assert aggsign.verify_frame(params, frame, kp.pk)
    assert c == OpCounter(pairings=10, hashes=5)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2**32), st.data())
def test_correct_and_sound_mock(n, seed, data):
    P = setup_pairing("mock", b"tests")
    rng = random.Random(seed)
    kp, packets, sigs = _frame(P, n, rng, msg_size=8)
    agg = aggsign.aggregate(sigs)
    assert aggsign.verify_aggregate(P, packets, agg, kp.pk)
    j = data.draw(st.integers(0, n - 1))
    bit = data.draw(st.integers(0, 63))
    tampered = list(packets)
    buf = bytearray(tampered[j])
    buf[bit // 8] ^= 1 << (bit % 8)
    tampered[j] = bytes(buf)
    assert not aggsign.verify_aggregate(P, tampered, agg, kp.pk)


class TestWire:
    @pytest.mark.parametrize("mode,expected", [("aggregate", 796), ("bls", 1372)])
    def test_frame_wire_size(self, mode, expected):
        assert aggsign.frame_wire_size(7, 100, mode) == expected

    def test_n1_degenerate(self):
        assert aggsign.frame_wire_size(1, 50, "aggregate") == aggsign.frame_wire_size(1, 50, "bls")

    def test_zero_packets(self):
        with pytest.raises(ValueError):
            aggsign.frame_wire_size(0, 100)

    def test_signature_width_switch(self):
        assert aggsign.frame_wire_size(7, 100, "aggregate", signature_size=128) == 828

    @pytest.mark.parametrize("mode", ["aggregate", "bls"])
    def test_payload_size_matches_formula(self, params, rng, mode):
        kp = aggsign.keygen(params, rng)
        packets = [rng.randbytes(100) for _ in range(7)]
        frame = aggsign.sign_frame(params, packets, kp.sk, mode)
        assert frame.payload_size() == aggsign.frame_wire_size(7, 100, mode)
        # the wire format adds a u32 count plus a u32 length per packet
        assert len(frame.to_bytes()) == frame.payload_size() + 4 + 4 * 7

    @pytest.mark.parametrize("mode", ["aggregate", "bls"])
    def test_frame_round_trip(self, params, rng, mode):
        kp = aggsign.keygen(params, rng)
        frame = aggsign.sign_frame(params, [b"a", b"bb", b"ccc"], kp.sk, mode)
        back = SignedFrame.from_bytes(params, frame.to_bytes(), aggregated=(mode == "aggregate"))
        assert back.packets == frame.packets
        assert aggsign.verify_frame(params, back, kp.pk)

    def test_frame_truncated(self, params, rng):
        kp = aggsign.keygen(params, rng)
        raw = aggsign.sign_frame(params, [b"a"], kp.sk).to_bytes()
        with pytest.raises(DecodeError):
            SignedFrame.from_bytes(params, raw[:-1])

    def test_signature_128_width(self, params, rng):
        sig = aggsign.sign(params, b"pkt", 9, size=128)
        assert len(sig.to_bytes()) == 128
        assert Signature.from_bytes(params, sig.to_bytes(), 128) == sig

    def test_signature_bad_padding(self, params):
        raw = bytearray(aggsign.sign(params, b"pkt", 9).to_bytes())
        raw[-1] = 1
        with pytest.raises(DecodeError):
            Signature.from_bytes(params, bytes(raw))
