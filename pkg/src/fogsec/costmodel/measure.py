"""Run every tabulated task under an op counter and collect measurements."""
from __future__ import annotations

import random

from .. import aggsign, clpre, homopre, lsss, mabe
from ..pairing import OpCounter, PairingParams, counting
from . import Measurement


def _count(fn, *args, **kw):
    with counting() as c:
        out = fn(*args, **kw)
    return out, c


def _fields_size(fields: dict) -> int:
    return sum(len(v) for v in fields.values())


def measure_aggsign(params: PairingParams, n: int = 7, msg_size: int = 100, rng=None) -> list:
    rng = rng or random.Random(0)
    kp = aggsign.keygen(params, rng)
    packets = [rng.randbytes(msg_size) for _ in range(n)]
    sigs, c_sign = _count(lambda: [aggsign.sign(params, d, kp.sk) for d in packets])
    agg, c_agg = _count(aggsign.aggregate, sigs)
    ok_a, c_va = _count(aggsign.verify_aggregate, params, packets, agg, kp.pk)
    ok_b, c_vb = _count(lambda: [aggsign.verify_single(params, d, s, kp.pk) for d, s in zip(packets, sigs)])
    if not ok_a or not all(ok_b):
        raise AssertionError("honest frame failed to verify")
    p = {"n": n, "m": msg_size}
    agg_frame = aggsign.SignedFrame(packets, agg)
    bls_frame = aggsign.SignedFrame(packets, sigs)
    return [
        Measurement("II", "sign-aggregate", p, c_sign),
        Measurement("II", "sign-bls", p, c_sign.copy()),
        Measurement("II", "aggregate", p, c_agg),
        Measurement("II", "verify-aggregate", p, c_va),
        Measurement("II", "verify-bls", p, c_vb),
        Measurement("II", "device-bytes-aggregate", p, bytes=agg_frame.payload_size()),
        Measurement("II", "device-bytes-bls", p, bytes=bls_frame.payload_size()),
    ]


def measure_clpre(params: PairingParams, rng=None) -> list:
    rng = rng or random.Random(0)
    pkg = clpre.pkg_setup(params, rng)
    ps = clpre.extract_partial_key(pkg, b"sender")
    pr = clpre.extract_partial_key(pkg, b"receiver")
    sender, c_kg = _count(clpre.user_keygen, params, ps, b"sender", pkg.mpk, True, rng)
    receiver = clpre.user_keygen(params, pr, b"receiver", pkg.mpk, False, rng)
    m = params.random_gt(rng)
    ct, c_enc = _count(clpre.encrypt, params, m, sender, rng)
    rk, c_rk = _count(clpre.rekeygen, params, sender, receiver.public_key(), rng)
    rct, c_re = _count(clpre.reencrypt, params, ct, rk)
    if clpre.decrypt(params, rct, receiver) != m:
        raise AssertionError("CL-PRE round trip failed")
    return [
        Measurement("III", "key-generation", {}, c_kg),
        Measurement("III", "encryption", {}, c_enc),
        Measurement("III", "rekey-generation", {}, c_rk),
        Measurement("III", "sender-total-bytes", {}, bytes=_fields_size(ct.fields()) + _fields_size(rk.fields())),
        Measurement("III", "re-encryption", {}, c_re, bytes=_fields_size(rct.fields())),
    ]


def _and_policy(attrs: list) -> str:
    return " AND ".join(attrs)


def measure_mabe(params: PairingParams, x: int = 2, rng=None) -> list:
    """One slot per attribute and an AND over all of them, so ``l = x``."""
    rng = rng or random.Random(0)
    attrs = [f"attr{i}" for i in range(x)]
    directory = mabe.AttributeDirectory()
    auth = mabe.authority_setup(params, attrs, rng, "AA", directory)
    d = params.random_gt(rng)
    (ict, state), c_ie = _count(mabe.intermediate_encrypt, params, attrs, directory, rng)
    dev_bytes = _fields_size(mabe.device_message_fields(d, ict, state))
    ct, c_fe = _count(mabe.full_encrypt, params, d, ict, state, _and_policy(attrs), rng)
    uk = mabe.keygen_user(params, auth, b"A2", attrs)
    (tk, r), c_tk = _count(mabe.transform_key, params, uk, rng)
    pct, c_pd = _count(mabe.partial_decrypt, params, ct, tk)
    out, c_fd = _count(mabe.full_decrypt, params, pct, r)
    if out != d:
        raise AssertionError("MABE round trip failed")
    p = {"x": x, "l": ct.structure.l, "m": len(d.to_bytes())}
    return [
        Measurement("IV", "intermediate-encryption", p, c_ie, bytes=dev_bytes),
        Measurement("IV", "key-transform", p, c_tk),
        Measurement("IV", "full-decrypt", p, c_fd),
        Measurement("IV", "device-p2-bytes", p, bytes=_fields_size(tk.fields())),
        Measurement("IV", "full-encrypt", p, c_fe, bytes=ct.payload_size()),
        Measurement("IV", "partial-decrypt", p, c_pd, bytes=_fields_size(pct.fields())),
    ]


def measure_homo(params: PairingParams, req_size: int = 64, rng=None) -> list:
    rng = rng or random.Random(0)
    k1, c_kg1 = _count(homopre.keygen, params, rng)
    k2, c_kg2 = _count(homopre.keygen, params, rng)
    m1, m2, m3 = (params.random_gt(rng) for _ in range(3))
    ct, c_enc = _count(homopre.encrypt, params, m1, k1.public, homopre.SECOND, rng)
    ct2 = homopre.encrypt(params, m2, k1.public, homopre.SECOND, rng)
    res, c_ev = _count(homopre.eval_mul, params, ct, ct2, k1.public, rng=rng)
    rk, c_rk = _count(homopre.rekeygen, params, k1.sk, k2.pk2)
    res1, c_re = _count(homopre.reencrypt, params, res, rk, k2.public)
    ct3 = homopre.encrypt(params, m3, k2.public, homopre.FIRST, rng)
    res2, c_ev2 = _count(homopre.eval_mul, params, res1, ct3, k2.public, rng=rng)
    out, c_dec = _count(homopre.decrypt, params, res2, k2.sk)
    if out != m1 * m2 * m3:
        raise AssertionError("homomorphic pipeline failed")
    p = {"req": req_size}
    return [
        Measurement("V", "pf1-key-generation", p, c_kg1),
        Measurement("V", "encryption", p, c_enc),
        Measurement("V", "computation-on-encrypted", p, c_ev),
        Measurement("V", "rekey-generation", p, c_rk),
        Measurement("V", "re-encryption", p, c_re),
        Measurement("V", "computation-on-transformed", p, c_ev2),
        Measurement("V", "pf1-total-bytes", p, bytes=len(ct.to_bytes()) + len(res2.to_bytes())),
        Measurement("V", "pf2-key-generation", p, c_kg2),
        Measurement("V", "decryption", p, c_dec),
        Measurement("V", "pf2-total-bytes", p, bytes=req_size),
    ]


def measure_all(params: PairingParams, *, n: int = 7, msg_size: int = 100, x: int = 2, req_size: int = 64,
                tables=("II", "III", "IV", "V"), seed: int = 0) -> list:
    rng = random.Random(seed)
    out = []
    if "II" in tables:
        out += measure_aggsign(params, n, msg_size, rng)
    if "III" in tables:
        out += measure_clpre(params, rng)
    if "IV" in tables:
        out += measure_mabe(params, x, rng)
    if "V" in tables:
        out += measure_homo(params, req_size, rng)
    return out
