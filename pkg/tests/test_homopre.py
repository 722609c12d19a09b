import random

import pytest
from hypothesis import given, settings, strategies as st

from fogsec import homopre
from fogsec.homopre import FIRST, MUL, MUL_CONST, SECOND
from fogsec.pairing import DecodeError, OpCounter, counting, setup_pairing

from conftest import log_of

MOCK = setup_pairing("mock", b"tests")


def test_keygen_mock_logs(mock):
    k = homopre.keygen(mock, sk=4)
    assert log_of(k.pk1) == 4 and log_of(k.pk2) == 4
    assert homopre.check_keypair(mock, k.public)


def test_keygen_cost(params, rng):
    with counting() as c:
        homopre.keygen(params, rng)
    assert c == OpCounter(pairings=1, exponentiations=2)


def test_encrypt_cost_and_size(params, rng):
    k = homopre.keygen(params, rng)
    with counting() as c:
        ct = homopre.encrypt(params, params.random_gt(rng), k.public, SECOND, rng)
    assert c == OpCounter(exponentiations=2, multiplications=1)
    assert len(ct.to_bytes()) == 256


def test_eval_mul_mock(mock, rng):
    k = homopre.keygen(mock, rng)
    Z = mock.gt_generator
    a = homopre.encrypt(mock, Z ** 3, k.public, SECOND, rng)
    b = homopre.encrypt(mock, Z ** 5, k.public, SECOND, rng)
    assert log_of(homopre.decrypt(mock, homopre.eval_mul(mock, a, b, k.public, rng=rng), k.sk)) == 8


def test_eval_mul_rerandomizes(params, rng):
    k = homopre.keygen(params, rng)
    a = homopre.encrypt(params, params.random_gt(rng), k.public, SECOND, rng)
    b = homopre.encrypt(params, params.random_gt(rng), k.public, SECOND, rng)
    r1 = homopre.eval_mul(params, a, b, k.public, a=1)
    r2 = homopre.eval_mul(params, a, b, k.public, a=2)
    assert r1.c1 != r2.c1 and r1.c2 != r2.c2
    assert homopre.decrypt(params, r1, k.sk) == homopre.decrypt(params, r2, k.sk)


def test_eval_mul_cost(params, rng):
    k = homopre.keygen(params, rng)
    a, b = (homopre.encrypt(params, params.random_gt(rng), k.public, SECOND, rng) for _ in range(2))
    with counting() as c:
        homopre.eval_mul(params, a, b, k.public, rng=rng)
    assert c == OpCounter(exponentiations=2, multiplications=4)


def test_eval_mul_level_mismatch(params, rng):
    k = homopre.keygen(params, rng)
    a = homopre.encrypt(params, params.random_gt(rng), k.public, SECOND, rng)
    b = homopre.encrypt(params, params.random_gt(rng), k.public, FIRST, rng)
    with pytest.raises(homopre.LevelMismatchError):
        homopre.eval_mul(params, a, b, k.public, rng=rng)


def test_eval_mul_key_mismatch(params, rng):
    k1, k2 = homopre.keygen(params, rng), homopre.keygen(params, rng)
    a = homopre.encrypt(params, params.random_gt(rng), k1.public, SECOND, rng)
    b = homopre.encrypt(params, params.random_gt(rng), k2.public, SECOND, rng)
    with pytest.raises(homopre.LevelMismatchError):
        homopre.eval_mul(params, a, b, k1.public, rng=rng)


def test_mul_const(params, rng):
    k = homopre.keygen(params, rng)
    m, f = params.random_gt(rng), params.random_gt(rng)
    ct = homopre.encrypt(params, m, k.public, SECOND, rng)
    assert homopre.decrypt(params, homopre.mul_const(ct, f), k.sk) == m * f


def test_rekey_mock(mock):
    k1, k2 = homopre.keygen(mock, sk=4), homopre.keygen(mock, sk=12)
    rk = homopre.rekeygen(mock, k1.sk, k2.pk2)
    assert log_of(rk.rk) == 3
    assert homopre.check_rekey(mock, rk, k1.pk2, k2.pk2)


def test_rekey_self_is_generator(params, rng):
    k = homopre.keygen(params, rng)
    assert homopre.rekeygen(params, k.sk, k.pk2).rk == params.g


def test_check_rekey_rejects_wrong_target(params, rng):
    k1, k2, k3 = (homopre.keygen(params, rng) for _ in range(3))
    rk = homopre.rekeygen(params, k1.sk, k2.pk2)
    assert not homopre.check_rekey(params, rk, k1.pk2, k3.pk2)


def test_reencrypt(params, rng):
    k1, k2 = homopre.keygen(params, rng), homopre.keygen(params, rng)
    m = params.random_gt(rng)
    ct = homopre.encrypt(params, m, k1.public, SECOND, rng)
    rk = homopre.rekeygen(params, k1.sk, k2.pk2)
    with counting() as c:
        rct = homopre.reencrypt(params, ct, rk, k2.public)
    assert c == OpCounter(pairings=1)
    assert rct.level == FIRST
    assert homopre.decrypt(params, rct, k2.sk) == m
    assert homopre.decrypt(params, rct, k1.sk) != m


def test_reencrypt_first_level_rejected(params, rng):
    k1, k2 = homopre.keygen(params, rng), homopre.keygen(params, rng)
    ct = homopre.encrypt(params, params.random_gt(rng), k1.public, FIRST, rng)
    with pytest.raises(homopre.LevelMismatchError):
        homopre.reencrypt(params, ct, homopre.rekeygen(params, k1.sk, k2.pk2))


def test_decrypt_second_level_cost(params, rng):
    k = homopre.keygen(params, rng)
    ct = homopre.encrypt(params, params.random_gt(rng), k.public, SECOND, rng)
    with counting() as c:
        homopre.decrypt(params, ct, k.sk)
    assert c.pairings == 1


def test_decrypt_wrong_key(params, rng):
    k1, k2 = homopre.keygen(params, rng), homopre.keygen(params, rng)
    m = params.random_gt(rng)
    assert homopre.decrypt(params, homopre.encrypt(params, m, k1.public, SECOND, rng), k2.sk) != m


@settings(max_examples=200, deadline=None)
@given(st.integers(0, MOCK.q - 1), st.integers(0, MOCK.q - 1), st.integers(1, MOCK.q - 1), st.randoms())
def test_homomorphism_property_mock(x, y, sk, r):
    k = homopre.keygen(MOCK, sk=sk)
    Z = MOCK.gt_generator
    a = homopre.encrypt(MOCK, Z ** x, k.public, SECOND, r)
    b = homopre.encrypt(MOCK, Z ** y, k.public, SECOND, r)
    assert log_of(homopre.decrypt(MOCK, homopre.eval_mul(MOCK, a, b, k.public, rng=r), k.sk)) == (x + y) % MOCK.q


def test_program_round_trip(params, rng):
    prog = [(MUL, 0), (MUL_CONST, params.random_gt(rng)), (MUL, 3)]
    data = homopre.encode_program(prog)
    assert len(data) == 2 + 3 + 3 + 129
    assert homopre.decode_program(params, data) == prog


def test_program_decode_errors(params):
    with pytest.raises(DecodeError):
        homopre.decode_program(params, b"\x00\x01\x09")
    with pytest.raises(DecodeError):
        homopre.decode_program(params, b"\x00\x01\x01")
    with pytest.raises(DecodeError):
        homopre.decode_program(params, b"\x00\x00\x00")


def test_run_program(params, rng):
    k = homopre.keygen(params, rng)
    m, f, g2 = (params.random_gt(rng) for _ in range(3))
    ct = homopre.encrypt(params, m, k.public, SECOND, rng)
    other = homopre.encrypt(params, g2, k.public, SECOND, rng)
    out = homopre.run_program(params, ct, [(MUL_CONST, f), (MUL, 0)], k.public, [other], rng)
    assert homopre.decrypt(params, out, k.sk) == m * f * g2


def test_codec(params, rng):
    k = homopre.keygen(params, rng)
    ct = homopre.encrypt(params, params.random_gt(rng), k.public, SECOND, rng)
    back = homopre.HomoCiphertext.from_bytes(params, ct.to_bytes(), SECOND)
    assert (back.c1, back.c2) == (ct.c1, ct.c2)
    with pytest.raises(DecodeError):
        homopre.HomoCiphertext.from_bytes(params, ct.to_bytes()[:-1], SECOND)
