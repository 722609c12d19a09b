"""Certificateless proxy re-encryption for sharing device data with many users.

Key derivation fixed for this library:

* ``g_i = H1(id)``, partial key ``P_i = g_i^mk`` issued by the PKG;
* the user picks ``k_i`` and holds ``S_i = P_i^k_i``;
* public key ``(g^k_i, mpk^k_i)``, plus ``g^d`` for a delegating sender.

The scalar written ``sk_S`` in the re-encryption key is ``d * k_S``, which is
what makes ``c2 * e(c4, c1)`` collapse to ``m * e(H2(y), c0)``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .pairing import DecodeError, G1Element, GTElement, PairingParams


class ClpreError(Exception):
    pass


class KeyConsistencyError(ClpreError):
    """The PKG-issued partial key does not match the identity."""


class MissingDelegationError(ClpreError):
    pass


@dataclass(frozen=True)
class PkgState:
    params: PairingParams
    mk: int
    mpk: G1Element

    def public(self) -> dict:
        """What the PKG publishes.  The master key never leaves."""
        return {"mpk": self.mpk}


@dataclass(frozen=True)
class ClpreUserKeys:
    id: bytes
    g_i: G1Element
    partial: G1Element
    secret_k: int
    S_i: G1Element
    pub_u: G1Element
    pub_X: G1Element
    delegation_d: int | None = None
    pub_gd: G1Element | None = None

    def public_key(self) -> "ClprePublicKey":
        return ClprePublicKey(self.id, self.g_i, self.pub_u, self.pub_X, self.pub_gd)


@dataclass(frozen=True)
class ClprePublicKey:
    id: bytes
    g_i: G1Element
    pub_u: G1Element
    pub_X: G1Element
    pub_gd: G1Element | None = None


@dataclass(frozen=True)
class ClpreCiphertext:
    c0: G1Element
    c1: G1Element
    c2: GTElement

    def fields(self) -> dict:
        return {"c0": self.c0.to_bytes(), "c1": self.c1.to_bytes(), "c2": self.c2.to_bytes()}

    def to_bytes(self) -> bytes:
        return b"".join(self.fields().values())

    @classmethod
    def from_bytes(cls, params, data: bytes) -> "ClpreCiphertext":
        if len(data) != 384:
            _bad(384, data)
        return cls(params.deserialize(data[:128], "G1"), params.deserialize(data[128:256], "G1"),
                   params.deserialize(data[256:], "GT"))


@dataclass(frozen=True)
class WrappedY:
    """``C_R(y)``: the re-encryption secret y encrypted to the receiver."""

    u1: G1Element
    u2: GTElement


@dataclass(frozen=True)
class ReEncKey:
    c4: G1Element
    wrapped_y: WrappedY

    def fields(self) -> dict:
        return {"c4": self.c4.to_bytes(), "u1": self.wrapped_y.u1.to_bytes(),
                "u2": self.wrapped_y.u2.to_bytes()}

    def to_bytes(self) -> bytes:
        return b"".join(self.fields().values())

    @classmethod
    def from_bytes(cls, params, data: bytes) -> "ReEncKey":
        if len(data) != 384:
            _bad(384, data)
        return cls(params.deserialize(data[:128], "G1"),
                   WrappedY(params.deserialize(data[128:256], "G1"), params.deserialize(data[256:], "GT")))


@dataclass(frozen=True)
class ReEncCiphertext:
    """The 3-tuple ``<c0, c'', C_R(y)>`` delivered to the receiver."""

    c0: G1Element
    c2pp: GTElement
    wrapped_y: WrappedY

    def fields(self) -> dict:
        return {"c0": self.c0.to_bytes(), "c''": self.c2pp.to_bytes(),
                "u1": self.wrapped_y.u1.to_bytes(), "u2": self.wrapped_y.u2.to_bytes()}

    def to_bytes(self) -> bytes:
        return b"".join(self.fields().values())

    @classmethod
    def from_bytes(cls, params, data: bytes) -> "ReEncCiphertext":
        if len(data) != 512:
            _bad(512, data)
        d = params.deserialize
        return cls(d(data[:128], "G1"), d(data[128:256], "GT"),
                   WrappedY(d(data[256:384], "G1"), d(data[384:], "GT")))


def _bad(expected, data):
    raise DecodeError(f"expected {expected} bytes, got {len(data)}")


def pkg_setup(params: PairingParams, rng=None, mk: int | None = None) -> PkgState:
    mk = params.random_scalar(rng) if mk is None else mk % params.q
    return PkgState(params, mk, params.g ** mk)


def extract_partial_key(pkg: PkgState, id: bytes) -> G1Element:
    if not id:
        raise ValueError("identity must be non-empty")
    return pkg.params.hash_to_g1(id) ** pkg.mk


def check_partial_key(params: PairingParams, partial: G1Element, id: bytes, mpk: G1Element) -> bool:
    return params.pair(partial, params.g) == params.pair(params.hash_to_g1(id), mpk)


def user_keygen(params: PairingParams, partial: G1Element, id: bytes, mpk: G1Element,
                is_sender: bool = False, rng=None, *, k: int | None = None, d: int | None = None,
                verify: bool = True) -> ClpreUserKeys:
    g_i = params.hash_to_g1(id)
    if verify and params.pair(partial, params.g) != params.pair(g_i, mpk):
        raise KeyConsistencyError(f"partial key for {id!r} fails e(P, g) = e(H1(id), mpk)")
    k = params.random_scalar(rng) if k is None else k % params.q
    S_i = partial ** k
    pub_u = params.g ** k
    pub_X = mpk ** k
    dd = gd = None
    if is_sender:
        dd = params.random_scalar(rng) if d is None else d % params.q
        gd = params.g ** dd
    return ClpreUserKeys(id, g_i, partial, k, S_i, pub_u, pub_X, dd, gd)


def encrypt(params: PairingParams, m: GTElement, sender: ClpreUserKeys, rng=None,
            r: int | None = None) -> ClpreCiphertext:
    """``(g^{dr}, g^r, m * e(g_S^r, g^{d k_S}))``."""
    if sender.delegation_d is None:
        raise MissingDelegationError("sender has no delegation secret d")
    q = params.q
    r = params.random_scalar(rng) if r is None else r % q
    d = sender.delegation_d
    c0 = params.g ** (d * r % q)
    c1 = params.g ** r
    blind = params.pair(sender.g_i ** r, params.g ** (d * sender.secret_k % q))
    return ClpreCiphertext(c0, c1, m * blind)


def wrap_for(params: PairingParams, y: GTElement, receiver: ClprePublicKey, rng=None,
             r: int | None = None) -> WrappedY:
    r = params.random_scalar(rng) if r is None else r
    return WrappedY(params.g ** r, y * params.pair(receiver.g_i ** r, receiver.pub_X))


def unwrap(params: PairingParams, w: WrappedY, receiver: ClpreUserKeys) -> GTElement:
    return w.u2 / params.pair(receiver.S_i, w.u1)


def rekeygen(params: PairingParams, sender: ClpreUserKeys, receiver: ClprePublicKey, rng=None,
             y: GTElement | None = None) -> ReEncKey:
    """``rk = (g_S^{-d k_S} * H2(y)^d, C_R(y))`` for a fresh random y in GT."""
    if sender.delegation_d is None:
        raise MissingDelegationError("sender has no delegation secret d")
    q = params.q
    d = sender.delegation_d
    if y is None:
        y = params.random_gt(rng)
    c4 = (sender.g_i ** (-d * sender.secret_k % q)) * (params.hash_gt_to_g1(y) ** d)
    return ReEncKey(c4, wrap_for(params, y, receiver, rng))


def reencrypt(params: PairingParams, ct: ClpreCiphertext, rk: ReEncKey) -> ReEncCiphertext:
    """Proxy step; touches only ciphertext and re-encryption key material."""
    return ReEncCiphertext(ct.c0, ct.c2 * params.pair(rk.c4, ct.c1), rk.wrapped_y)


def decrypt(params: PairingParams, rct: ReEncCiphertext, receiver: ClpreUserKeys) -> GTElement:
    y = unwrap(params, rct.wrapped_y, receiver)
    return rct.c2pp / params.pair(params.hash_gt_to_g1(y), rct.c0)


def decrypt_own(params: PairingParams, ct: ClpreCiphertext, sender: ClpreUserKeys) -> GTElement:
    """Owner-side decryption by recomputing the blinding factor."""
    q = params.q
    blind = params.pair(sender.g_i, ct.c1 ** (sender.delegation_d * sender.secret_k % q))
    return ct.c2 / blind
