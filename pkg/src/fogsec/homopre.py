"""Multiplicatively homomorphic encryption with unidirectional re-encryption.

Ciphertexts come in two levels.  A second-level ciphertext under
``pk = (Z^sk, g^sk)``, ``Z = e(g,g)``, is ``(pk2^y, m Z^y)``; the proxy turns
it into a first-level ciphertext ``(pk1_target^y, m Z^y)`` with one pairing
against ``rk = pk2_target^(1/sk_source)``.  Both levels multiply
homomorphically:

    c1'' = c1 c1' B^a      c2'' = c2 c2' Z^a

where ``B`` is ``pk2`` (second level) or ``pk1`` (first level).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

from .pairing import DecodeError, G1Element, GTElement, PairingParams

SECOND = "second"
FIRST = "first"


class HomoError(Exception):
    pass


class LevelMismatchError(HomoError):
    pass


@dataclass(frozen=True)
class HomoPublicKey:
    pk1: GTElement
    pk2: G1Element


@dataclass(frozen=True)
class HomoKeyPair:
    sk: int
    pk1: GTElement
    pk2: G1Element

    @property
    def public(self) -> HomoPublicKey:
        return HomoPublicKey(self.pk1, self.pk2)


@dataclass(frozen=True)
class HomoCiphertext:
    level: str
    c1: G1Element | GTElement
    c2: GTElement
    pk: HomoPublicKey | None = None  # key the ciphertext is bound to

    def fields(self) -> dict:
        return {"c1": self.c1.to_bytes(), "c2": self.c2.to_bytes()}

    def to_bytes(self) -> bytes:
        return self.c1.to_bytes() + self.c2.to_bytes()

    @classmethod
    def from_bytes(cls, params: PairingParams, data: bytes, level: str) -> "HomoCiphertext":
        if len(data) != 256:
            raise DecodeError(f"expected 256 bytes, got {len(data)}")
        g1 = "G1" if level == SECOND else "GT"
        return cls(level, params.deserialize(data[:128], g1), params.deserialize(data[128:], "GT"))


@dataclass(frozen=True)
class HomoReKey:
    rk: G1Element

    def to_bytes(self) -> bytes:
        return self.rk.to_bytes()


def keygen(params: PairingParams, rng=None, sk: int | None = None) -> HomoKeyPair:
    sk = params.random_scalar(rng) if sk is None else sk % params.q
    pk1 = params.pair(params.g, params.g) ** sk
    pk2 = params.g ** sk
    return HomoKeyPair(sk, pk1, pk2)


def check_keypair(params: PairingParams, pk: HomoPublicKey) -> bool:
    return pk.pk1 == params.pair(pk.pk2, params.g)


def _base(pk: HomoPublicKey, level: str):
    if level == SECOND:
        return pk.pk2
    if level == FIRST:
        return pk.pk1
    raise ValueError(f"unknown level {level!r}")


def encrypt(params: PairingParams, m: GTElement, pk: HomoPublicKey, level: str = SECOND, rng=None,
            y: int | None = None) -> HomoCiphertext:
    y = params.random_scalar(rng) if y is None else y
    return HomoCiphertext(level, _base(pk, level) ** y, m * (params.gt_generator ** y), pk)


def eval_mul(params: PairingParams, ct: HomoCiphertext, ct2: HomoCiphertext, pk: HomoPublicKey,
             level: str | None = None, rng=None, a: int | None = None) -> HomoCiphertext:
    level = ct.level if level is None else level
    if ct.level != level or ct2.level != level:
        raise LevelMismatchError(f"operands at levels {ct.level}/{ct2.level}, expected {level}")
    for c in (ct, ct2):
        if c.pk is not None and c.pk != pk:
            raise LevelMismatchError("operand encrypted under a different key")
    a = params.random_scalar(rng) if a is None else a
    c1 = ct.c1 * ct2.c1 * (_base(pk, level) ** a)
    c2 = ct.c2 * ct2.c2 * (params.gt_generator ** a)
    return HomoCiphertext(level, c1, c2, pk)


def mul_const(ct: HomoCiphertext, k: GTElement) -> HomoCiphertext:
    """Multiply the plaintext by a public factor."""
    return HomoCiphertext(ct.level, ct.c1, ct.c2 * k, ct.pk)


def rekeygen(params: PairingParams, source_sk: int, target_pk2: G1Element) -> HomoReKey:
    """``pk2_target^(1/sk_source)``; needs nothing secret from the target."""
    return HomoReKey(target_pk2 ** params.inv(source_sk))


def check_rekey(params: PairingParams, rk: HomoReKey, source_pk2: G1Element, target_pk2: G1Element) -> bool:
    return params.pair(rk.rk, source_pk2) == params.pair(target_pk2, params.g)


def reencrypt(params: PairingParams, ct: HomoCiphertext, rk: HomoReKey,
              target: HomoPublicKey | None = None) -> HomoCiphertext:
    if ct.level != SECOND:
        raise LevelMismatchError("only second-level ciphertexts can be re-encrypted")
    return HomoCiphertext(FIRST, params.pair(ct.c1, rk.rk), ct.c2, target)


def decrypt(params: PairingParams, ct: HomoCiphertext, sk: int) -> GTElement:
    inv = params.inv(sk)
    if ct.level == FIRST:
        return ct.c2 / (ct.c1 ** inv)
    return ct.c2 / (params.pair(ct.c1, params.g) ** inv)


# Evaluation programs ----------------------------------------------------
#
# A program is a list of ``(opcode, operand)`` steps.  ``MUL`` multiplies by a
# ciphertext (an index into the operand list shipped with the query);
# ``MUL_CONST`` multiplies by a plaintext GT factor, which the evaluator
# encrypts under the current key and folds in with ``eval_mul``.

MUL = "MUL"
MUL_CONST = "MUL_CONST"
_OPCODES = {MUL: 1, MUL_CONST: 2}


def run_program(params: PairingParams, ct: HomoCiphertext, program: list, pk: HomoPublicKey,
                operands: list = (), rng=None) -> HomoCiphertext:
    for op, arg in program:
        if op == MUL:
            ct = eval_mul(params, ct, operands[arg], pk, rng=rng)
        elif op == MUL_CONST:
            ct = eval_mul(params, ct, encrypt(params, arg, pk, ct.level, rng), pk, rng=rng)
        else:
            raise HomoError(f"unknown opcode {op!r}")
    return ct


def encode_program(program: list) -> bytes:
    """``[u16 count]`` then per step ``[u8 opcode][operand]``; operands are a
    u16 reference for MUL and a 128-byte GT element for MUL_CONST."""
    out = [struct.pack(">H", len(program))]
    for op, arg in program:
        out.append(struct.pack(">B", _OPCODES[op]))
        out.append(struct.pack(">H", arg) if op == MUL else arg.to_bytes())
    return b"".join(out)


def decode_program(params: PairingParams, data: bytes) -> list:
    try:
        (n,) = struct.unpack_from(">H", data, 0)
        pos, prog = 2, []
        for _ in range(n):
            (code,) = struct.unpack_from(">B", data, pos)
            pos += 1
            if code == 1:
                (ref,) = struct.unpack_from(">H", data, pos)
                prog.append((MUL, ref))
                pos += 2
            elif code == 2:
                prog.append((MUL_CONST, params.deserialize(data[pos:pos + 128], "GT")))
                pos += 128
            else:
                raise DecodeError(f"unknown opcode {code}")
    except struct.error:
        raise DecodeError("truncated program") from None
    if pos != len(data):
        raise DecodeError("trailing bytes after program")
    return prog
