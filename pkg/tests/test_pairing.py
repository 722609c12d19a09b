import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fogsec.pairing import (ELEMENT_BYTES, DecodeError, OpCounter, ParamsMismatchError, UnsupportedBackendError,
                            counting, deserialize, scalar_from_bytes, scalar_to_bytes, serialize, setup_pairing,
                            typea, uncounted)

from conftest import log_of

# Stock Type A parameters shipped with PBC (a.param), an independent source.
PBC_Q = 8780710799663312522437781984754049815806883199414208211028653399266475630880222957078625179422662221423155858769582317459277713367317481324925129998224791
PBC_R = 730750818665451621361119245571504901405976559617
PBC_H = 12016012264891146079388821366740534204802954401251311822919615131047207289359704531102844802183906537786776


def _probably_prime(n, rounds=20):
    # Miller-Rabin with fixed bases, written independently of gmpy2
    if n < 4:
        return n in (2, 3)
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for a in random.Random(0).sample(range(2, 10_000), rounds):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class TestCurveConstants:
    def test_match_pbc_a_param(self):
        assert (int(typea.P), int(typea.Q), int(typea.H)) == (PBC_Q, PBC_R, PBC_H)

    def test_shape(self):
        assert typea.P.bit_length() == 512
        assert typea.P % 4 == 3
        assert typea.Q.bit_length() == 160
        assert typea.H * typea.Q == typea.P + 1
        assert _probably_prime(int(typea.P)) and _probably_prime(int(typea.Q))

    def test_params_report_fields(self, curve):
        assert curve.backend_id == "curve"
        assert curve.base_field_bits == 512
        assert curve.q == PBC_R


class TestSetup:
    def test_mock_deterministic(self):
        assert setup_pairing("mock", b"42") == setup_pairing("mock", b"42")

    def test_unknown_backend(self):
        with pytest.raises(UnsupportedBackendError):
            setup_pairing("bn254")

    def test_mock_needs_seed(self):
        with pytest.raises(ValueError):
            setup_pairing("mock", b"")

    def test_non_degenerate(self, params):
        assert not params.g.is_identity()
        assert not params.pair(params.g, params.g).is_identity()

    def test_seed_changes_hash_domain(self):
        a, b = setup_pairing("mock", b"one"), setup_pairing("mock", b"two")
        assert log_of(a.hash_to_g1(b"x")) != log_of(b.hash_to_g1(b"x"))


class TestPairing:
    def test_mock_exponent_oracle(self, mock):
        g = mock.g
        assert mock.pair(g ** 3, g ** 5) == mock.pair(g, g) ** 15
        assert log_of(mock.pair(g ** 3, g ** 5)) == 15

    def test_identity(self, params):
        assert params.pair(params.g1_identity(), params.g ** 7).is_identity()

    def test_symmetric(self, params):
        g = params.g
        assert params.pair(g ** 2, g ** 3) == params.pair(g ** 3, g ** 2)

    def test_counts_one_pairing(self, params):
        a, b = params.g ** 2, params.g ** 3
        with counting() as c:
            params.pair(a, b)
        assert c == OpCounter(pairings=1)

    def test_mismatched_params(self, mock):
        other = setup_pairing("mock", b"elsewhere")
        with pytest.raises(ParamsMismatchError):
            mock.pair(mock.g, other.g)

    def test_bilinear_curve(self, curve):
        r = random.Random(5)
        g = curve.g
        base = curve.pair(g, g)
        for _ in range(6):
            a, b = curve.random_scalar(r), curve.random_scalar(r)
            assert curve.pair(g ** a, g ** b) == base ** (a * b)

    def test_multi_pairing(self, curve):
        r = random.Random(6)
        pts = [(curve.random_g1(r), curve.random_g1(r)) for _ in range(3)]
        with counting() as c:
            fused = curve.pair_product(pts)
        expect = curve.gt_identity()
        with uncounted():
            for a, b in pts:
                expect = expect * curve.pair(a, b)
        assert fused == expect
        assert c == OpCounter(pairings=3)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**31 - 2), st.integers(0, 2**31 - 2))
    def test_bilinear_mock_property(self, a, b):
        P = setup_pairing("mock", b"tests")
        g = P.g
        assert P.pair(g ** a, g ** b) == P.pair(g, g) ** (a * b)

    def test_bilinear_curve_200(self, curve):
        # 200 random pairs, checked against e(g,g)^(ab) with the exponent
        # reduced mod q first so the GT exponentiation stays cheap
        r = random.Random(7)
        g, q = curve.g, curve.q
        base = curve.pair(g, g)
        for _ in range(200):
            a, b = r.randrange(1, q), r.randrange(1, q)
            assert curve.pair(g ** a, g ** b) == base ** (a * b % q)


class TestHashing:
    def test_deterministic_and_distinct(self, params):
        assert params.hash_to_g1(b"a") == params.hash_to_g1(b"a")
        assert params.hash_to_g1(b"a") != params.hash_to_g1(b"b")
        assert not params.hash_to_g1(b"a").is_identity()

    def test_counts_one_hash(self, params):
        with counting() as c:
            params.hash_to_g1(b"data")
        assert c == OpCounter(hashes=1)

    def test_digest_is_32_bytes(self, params):
        assert len(params.hash_digest(b"data")) == 32

    def test_h2_is_h1_of_canonical_bytes(self, mock):
        y = mock.gt_from_log(99)
        assert mock.hash_gt_to_g1(y) == mock.hash_to_g1(y.to_bytes())

    def test_h2_not_homomorphic(self, params):
        y, d = params.gt_from_log(11), 7
        assert params.hash_gt_to_g1(y) ** d != params.hash_gt_to_g1(y ** d)

    def test_curve_hash_in_subgroup(self, curve):
        h = curve.hash_to_g1(b"subgroup")
        assert (h ** curve.q).is_identity()


class TestSerialization:
    @pytest.mark.parametrize("group", ["G1", "GT"])
    def test_round_trip(self, params, group):
        r = random.Random(3)
        e = params.random_g1(r) if group == "G1" else params.random_gt(r)
        raw = serialize(e)
        assert len(raw) == ELEMENT_BYTES == 128
        assert deserialize(params, raw, group) == e

    def test_identity_round_trip(self, params):
        assert deserialize(params, serialize(params.g1_identity()), "G1").is_identity()
        assert deserialize(params, serialize(params.gt_identity()), "GT").is_identity()

    def test_short_input(self, params):
        with pytest.raises(DecodeError):
            deserialize(params, bytes(127), "G1")

    def test_off_curve_point(self, curve):
        raw = bytearray(serialize(curve.g))
        raw[-1] ^= 1
        with pytest.raises(DecodeError):
            deserialize(curve, bytes(raw), "G1")

    def test_gt_not_in_subgroup(self, curve):
        with pytest.raises(DecodeError):
            deserialize(curve, (2).to_bytes(64, "big") + (3).to_bytes(64, "big"), "GT")

    def test_mock_out_of_range(self, mock):
        with pytest.raises(DecodeError):
            deserialize(mock, mock.q.to_bytes(128, "big"), "G1")

    def test_compressed_round_trip(self, curve):
        e = curve.random_g1(random.Random(4))
        assert curve.g1_from_compressed(e.to_compressed()) == e

    def test_scalar_encoding(self):
        assert len(scalar_to_bytes(5)) == 32
        assert scalar_from_bytes(scalar_to_bytes(12345)) == 12345


class TestCounter:
    def test_categories_are_independent(self, params):
        g = params.g
        Z = params.gt_generator
        with counting() as c:
            g ** 3
        assert c == OpCounter(exponentiations=1)
        with counting() as c:
            _ = (g * g, Z * Z)
        assert c == OpCounter(multiplications=2)
        with counting() as c:
            _ = (g / g, params.inv(3))
        assert c == OpCounter(divisions=2)
        with counting() as c:
            params.sub(5, 3)
        assert c == OpCounter(subtractions=1)

    def test_nested_sessions_both_charged(self, params):
        with counting() as outer:
            params.pair(params.g, params.g)
            with counting() as inner:
                params.pair(params.g, params.g)
        assert outer.pairings == 2 and inner.pairings == 1

    def test_uncounted(self, params):
        with counting() as c, uncounted():
            params.random_g1(random.Random(0))
            params.pair(params.g, params.g)
        assert c == OpCounter()

    def test_merge_and_symbols(self):
        a = OpCounter(pairings=1, hashes=2)
        b = OpCounter(pairings=3)
        a.merge(b)
        assert a.as_symbols()["T_P"] == 4
        assert OpCounter.from_symbols(a.as_symbols()) == a
        assert str(OpCounter(exponentiations=1, multiplications=1)) == "1T_E + 1T_M"

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.sampled_from(["pair", "exp", "mul", "hash"]), max_size=20))
    def test_conservation(self, ops):
        P = setup_pairing("mock", b"tests")
        g = P.g
        with counting() as c:
            for op in ops:
                if op == "pair":
                    P.pair(g, g)
                elif op == "exp":
                    g ** 2
                elif op == "mul":
                    g * g
                else:
                    P.hash_to_g1(b"x")
        assert c.pairings == ops.count("pair")
        assert c.exponentiations == ops.count("exp")
        assert c.multiplications == ops.count("mul")
        assert c.hashes == ops.count("hash")
        assert c.divisions == c.subtractions == 0
