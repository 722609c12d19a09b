"""BLS and aggregate-BLS signing for device-to-fog data frames.

A device signs every packet ``D_j`` as ``H1(D_j)^sk`` and multiplies the
signatures into one aggregate; the fog node checks

    prod_j e(pk, H1(D_j)) == e(sigma_agg, g).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

from .pairing import DecodeError, G1Element, PairingParams

# Accounting width of one signature on the wire.  Set to 128 to ship the
# uncompressed G1 encoding instead.
SIGNATURE_SIZE = 96
_WIDTHS = (96, 128)


@dataclass(frozen=True)
class SignKeyPair:
    sk: int
    pk: G1Element


@dataclass(frozen=True)
class Signature:
    sigma: G1Element
    size: int = SIGNATURE_SIZE

    def to_bytes(self) -> bytes:
        if self.size == 128:
            return self.sigma.to_bytes()
        raw = self.sigma.to_compressed()
        return raw + bytes(self.size - len(raw))

    @classmethod
    def from_bytes(cls, params: PairingParams, data: bytes, size: int = SIGNATURE_SIZE) -> "Signature":
        if size not in _WIDTHS or len(data) != size:
            raise DecodeError(f"expected a {size}-byte signature, got {len(data)} bytes")
        if size == 128:
            return cls(params.deserialize(data, "G1"), size)
        width = len(params.g1_identity().to_compressed())
        if any(data[width:]):
            raise DecodeError("non-zero signature padding")
        return cls(params.g1_from_compressed(data[:width]), size)


@dataclass
class SignedFrame:
    """Packets plus either one signature per packet or a single aggregate."""

    packets: list
    sig: Signature | list = field(default_factory=list)

    @property
    def aggregated(self) -> bool:
        return isinstance(self.sig, Signature)

    def to_bytes(self) -> bytes:
        """``[u32 n][n x (u32 len | payload)][signature bytes]``."""
        out = [struct.pack(">I", len(self.packets))]
        for d in self.packets:
            out.append(struct.pack(">I", len(d)) + bytes(d))
        sigs = [self.sig] if self.aggregated else self.sig
        out.extend(s.to_bytes() for s in sigs)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, params: PairingParams, data: bytes, aggregated: bool = True,
                   size: int = SIGNATURE_SIZE) -> "SignedFrame":
        try:
            (n,) = struct.unpack_from(">I", data, 0)
            pos = 4
            packets = []
            for _ in range(n):
                (ln,) = struct.unpack_from(">I", data, pos)
                pos += 4
                packets.append(bytes(data[pos:pos + ln]))
                pos += ln
        except struct.error:
            raise DecodeError("truncated frame") from None
        k = 1 if aggregated else n
        if len(data) - pos != k * size:
            raise DecodeError("signature section has the wrong length")
        sigs = [Signature.from_bytes(params, data[pos + i * size:pos + (i + 1) * size], size) for i in range(k)]
        return cls(packets, sigs[0] if aggregated else sigs)

    def payload_size(self) -> int:
        """Accounted bytes: packets plus signatures, without length prefixes."""
        sigs = [self.sig] if self.aggregated else self.sig
        return sum(len(d) for d in self.packets) + sum(s.size for s in sigs)


def keygen(params: PairingParams, rng=None) -> SignKeyPair:
    sk = params.random_scalar(rng)
    return SignKeyPair(sk, params.g ** sk)


def sign(params: PairingParams, packet: bytes, sk: int, size: int = SIGNATURE_SIZE) -> Signature:
    if not packet:
        raise ValueError("cannot sign an empty packet")
    return Signature(params.hash_to_g1(packet) ** sk, size)


def aggregate(sigs: list) -> Signature:
    if not sigs:
        raise ValueError("nothing to aggregate")
    acc = sigs[0].sigma
    for s in sigs[1:]:
        acc = acc * s.sigma
    return Signature(acc, sigs[0].size)


def verify_aggregate(params: PairingParams, packets: list, agg: Signature, pk: G1Element) -> bool:
    if not packets:
        raise ValueError("empty frame")
    lhs = params.pair_product((pk, params.hash_to_g1(d)) for d in packets)
    return lhs == params.pair(agg.sigma, params.g)


def verify_single(params: PairingParams, packet: bytes, sig: Signature, pk: G1Element) -> bool:
    return params.pair(pk, params.hash_to_g1(packet)) == params.pair(sig.sigma, params.g)


def sign_frame(params: PairingParams, packets: list, sk: int, mode: str = "aggregate",
               size: int = SIGNATURE_SIZE) -> SignedFrame:
    sigs = [sign(params, d, sk, size) for d in packets]
    if mode == "aggregate":
        return SignedFrame(list(packets), aggregate(sigs))
    if mode == "bls":
        return SignedFrame(list(packets), sigs)
    raise ValueError(f"unknown mode {mode!r}")


def verify_frame(params: PairingParams, frame: SignedFrame, pk: G1Element) -> bool:
    if frame.aggregated:
        return verify_aggregate(params, frame.packets, frame.sig, pk)
    if len(frame.sig) != len(frame.packets):
        return False
    # no short-circuit: every packet is checked
    results = [verify_single(params, d, s, pk) for d, s in zip(frame.packets, frame.sig)]
    return all(results)


def frame_wire_size(n: int, msg_size: int, mode: str = "aggregate", signature_size: int = SIGNATURE_SIZE) -> int:
    if n < 1:
        raise ValueError("a frame carries at least one packet")
    if mode == "aggregate":
        return n * msg_size + signature_size
    if mode == "bls":
        return n * msg_size + n * signature_size
    raise ValueError(f"unknown mode {mode!r}")
