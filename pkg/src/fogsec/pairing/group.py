"""Symmetric prime-order bilinear groups with a curve and a mock backend."""
from __future__ import annotations

import hashlib
import random
import secrets

import gmpy2

from . import typea
from .counter import tick, uncounted

ELEMENT_BYTES = 128
SCALAR_BYTES = 32
MOCK_DEFAULT_Q = 2**31 - 1


class PairingError(Exception):
    pass


class UnsupportedBackendError(PairingError, ValueError):
    pass


class ParamsMismatchError(PairingError, ValueError):
    pass


class DecodeError(PairingError, ValueError):
    pass


def digest(data: bytes) -> bytes:
    """SHA-256, the 32-byte intermediary of every hash-to-group call."""
    return hashlib.sha256(data).digest()


class _MockBackend:
    """Elements are stored as discrete logarithms base g; pairing multiplies logs."""

    backend_id = "mock"

    def __init__(self, q: int):
        self.q = q
        self.base_field_bits = 0

    def g1_generator(self, seed):
        return 1

    def g1_identity(self):
        return 0

    gt_identity = g1_identity

    def g1_mul(self, a, b):
        return (a + b) % self.q

    gt_mul = g1_mul

    def g1_pow(self, a, k):
        return a * k % self.q

    gt_pow = g1_pow

    def g1_inv(self, a):
        return -a % self.q

    gt_inv = g1_inv

    def pair(self, a, b):
        return a * b % self.q

    def multi_pair(self, pairs):
        return sum(a * b for a, b in pairs) % self.q

    def hash_to_g1(self, data: bytes):
        ctr = 0
        while True:
            dg = digest(data + ctr.to_bytes(4, "big"))
            v = int.from_bytes(dg, "big") % self.q
            if v:
                return v, dg
            ctr += 1

    def _enc(self, v, width=ELEMENT_BYTES):
        return int(v).to_bytes(width, "big")

    def _dec(self, data):
        v = int.from_bytes(data, "big")
        if v >= self.q:
            raise DecodeError("mock element out of range")
        return v

    g1_to_bytes = gt_to_bytes = _enc
    g1_from_bytes = gt_from_bytes = _dec

    def g1_to_compressed(self, v):
        return self._enc(v, 1 + typea.FIELD_BYTES)

    g1_from_compressed = _dec


class _TypeABackend:
    backend_id = "curve"

    def __init__(self):
        self.q = int(typea.Q)
        self.base_field_bits = int(typea.P.bit_length())

    def g1_generator(self, seed):
        pt, _ = typea.map_to_point(b"fogsec/generator/" + seed)
        return pt

    def g1_identity(self):
        return None

    def gt_identity(self):
        return typea.GT_ONE

    def g1_mul(self, a, b):
        return typea.add(a, b)

    def g1_pow(self, a, k):
        return typea.mul(a, k % self.q)

    def g1_inv(self, a):
        return typea.neg(a)

    def gt_mul(self, a, b):
        return typea.f2_mul(a, b)

    def gt_pow(self, a, k):
        return typea.gt_pow(a, k % self.q)

    def gt_inv(self, a):
        return typea.f2_conj(a)

    def pair(self, a, b):
        return typea.pairing(a, b)

    def multi_pair(self, pairs):
        return typea.multi_pairing(pairs)

    def hash_to_g1(self, data: bytes):
        return typea.map_to_point(data)

    def g1_to_bytes(self, v):
        return typea.point_to_bytes(v)

    def g1_from_bytes(self, data):
        try:
            return typea.point_from_bytes(data)
        except ValueError as exc:
            raise DecodeError(str(exc)) from None

    def gt_to_bytes(self, v):
        return typea.gt_to_bytes(v)

    def gt_from_bytes(self, data):
        try:
            return typea.gt_from_bytes(data)
        except ValueError as exc:
            raise DecodeError(str(exc)) from None

    def g1_to_compressed(self, v):
        return typea.point_to_compressed(v)

    def g1_from_compressed(self, data):
        try:
            return typea.point_from_compressed(data)
        except ValueError as exc:
            raise DecodeError(str(exc)) from None


class _Element:
    __slots__ = ("params", "value")
    group = ""

    def __init__(self, params: "PairingParams", value):
        self.params = params
        self.value = value

    def _check(self, other):
        if not isinstance(other, type(self)):
            raise TypeError(f"expected {type(self).__name__}, got {type(other).__name__}")
        if other.params is not self.params and other.params != self.params:
            raise ParamsMismatchError("elements belong to different pairing parameters")

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self.params == other.params and self.value == other.value

    def __hash__(self):
        return hash((self.group, self.to_bytes()))

    def __repr__(self):
        return f"{self.group}({self.to_bytes().hex()[:16]}..)"


class G1Element(_Element):
    __slots__ = ()
    group = "G1"

    def __mul__(self, other: "G1Element") -> "G1Element":
        self._check(other)
        tick("multiplications")
        return G1Element(self.params, self.params.backend.g1_mul(self.value, other.value))

    def __truediv__(self, other: "G1Element") -> "G1Element":
        self._check(other)
        tick("divisions")
        be = self.params.backend
        return G1Element(self.params, be.g1_mul(self.value, be.g1_inv(other.value)))

    def __pow__(self, k: int) -> "G1Element":
        tick("exponentiations")
        return G1Element(self.params, self.params.backend.g1_pow(self.value, int(k)))

    def is_identity(self) -> bool:
        return self.value == self.params.backend.g1_identity()

    def to_bytes(self) -> bytes:
        return self.params.backend.g1_to_bytes(self.value)

    def to_compressed(self) -> bytes:
        return self.params.backend.g1_to_compressed(self.value)


class GTElement(_Element):
    __slots__ = ()
    group = "GT"

    def __mul__(self, other: "GTElement") -> "GTElement":
        self._check(other)
        tick("multiplications")
        return GTElement(self.params, self.params.backend.gt_mul(self.value, other.value))

    def __truediv__(self, other: "GTElement") -> "GTElement":
        self._check(other)
        tick("divisions")
        be = self.params.backend
        return GTElement(self.params, be.gt_mul(self.value, be.gt_inv(other.value)))

    def __pow__(self, k: int) -> "GTElement":
        tick("exponentiations")
        return GTElement(self.params, self.params.backend.gt_pow(self.value, int(k)))

    def is_identity(self) -> bool:
        return self.value == self.params.backend.gt_identity()

    def to_bytes(self) -> bytes:
        return self.params.backend.gt_to_bytes(self.value)


class PairingParams:
    """Public parameters of one bilinear group; immutable after setup."""

    def __init__(self, backend, seed: bytes):
        self.backend = backend
        self.backend_id = backend.backend_id
        self.seed = bytes(seed)
        self.group_order_q = backend.q
        self.base_field_bits = backend.base_field_bits
        self.generator_g = G1Element(self, backend.g1_generator(self.seed))
        self._dst = b"fogsec/H1/" + digest(self.seed)[:8] + b"/"
        self._gt_generator = GTElement(self, backend.pair(self.generator_g.value, self.generator_g.value))

    @property
    def q(self) -> int:
        return self.group_order_q

    @property
    def g(self) -> G1Element:
        return self.generator_g

    @property
    def gt_generator(self) -> GTElement:
        """Cached e(g, g); reading it is free."""
        return self._gt_generator

    def __eq__(self, other):
        if not isinstance(other, PairingParams):
            return NotImplemented
        return (self.backend_id, self.group_order_q, self.seed) == (
            other.backend_id, other.group_order_q, other.seed)

    def __hash__(self):
        return hash((self.backend_id, self.group_order_q, self.seed))

    def __repr__(self):
        return f"PairingParams(backend={self.backend_id!r}, q_bits={self.q.bit_length()}, seed={self.seed!r})"

    # -- constructors ------------------------------------------------------

    def g1_identity(self) -> G1Element:
        return G1Element(self, self.backend.g1_identity())

    def gt_identity(self) -> GTElement:
        return GTElement(self, self.backend.gt_identity())

    def g1_from_log(self, k: int) -> G1Element:
        """g^k without touching the op counters (test and sampling helper)."""
        return G1Element(self, self.backend.g1_pow(self.generator_g.value, k))

    def gt_from_log(self, k: int) -> GTElement:
        return GTElement(self, self.backend.gt_pow(self._gt_generator.value, k))

    def random_scalar(self, rng: random.Random | None = None, nonzero: bool = True) -> int:
        rng = rng or secrets.SystemRandom()
        lo = 1 if nonzero else 0
        return rng.randrange(lo, self.q)

    def random_g1(self, rng=None) -> G1Element:
        return self.g1_from_log(self.random_scalar(rng))

    def random_gt(self, rng=None) -> GTElement:
        return self.gt_from_log(self.random_scalar(rng))

    # -- counted operations ------------------------------------------------

    def pair(self, a: G1Element, b: G1Element) -> GTElement:
        for e in (a, b):
            if not isinstance(e, G1Element):
                raise TypeError("pairing inputs must be G1 elements")
            if e.params is not self and e.params != self:
                raise ParamsMismatchError("element from different pairing parameters")
        tick("pairings")
        return GTElement(self, self.backend.pair(a.value, b.value))

    def pair_product(self, pairs) -> GTElement:
        """prod_j e(a_j, b_j), fused into one multi-pairing.

        Charged as one pairing per input pair; the accumulation happens
        inside the Miller loop and is not counted as GT multiplications.
        """
        pairs = list(pairs)
        for a, b in pairs:
            for e in (a, b):
                if e.params is not self and e.params != self:
                    raise ParamsMismatchError("element from different pairing parameters")
        tick("pairings", len(pairs))
        return GTElement(self, self.backend.multi_pair([(a.value, b.value) for a, b in pairs]))

    def hash_to_g1(self, data: bytes) -> G1Element:
        """H1: {0,1}* -> G1."""
        tick("hashes")
        v, _ = self.backend.hash_to_g1(self._dst + bytes(data))
        return G1Element(self, v)

    def hash_digest(self, data: bytes) -> bytes:
        """The 32-byte SHA-256 digest that ``hash_to_g1`` maps from."""
        _, dg = self.backend.hash_to_g1(self._dst + bytes(data))
        return dg

    def hash_gt_to_g1(self, y: GTElement) -> G1Element:
        """H2: GT -> G1, hashing the canonical encoding of y."""
        if not isinstance(y, GTElement):
            raise TypeError("H2 takes a GT element")
        return self.hash_to_g1(y.to_bytes())

    def inv(self, k: int) -> int:
        """Modular inverse of a scalar; charged as a division."""
        tick("divisions")
        k %= self.q
        if k == 0:
            raise ZeroDivisionError("scalar 0 has no inverse")
        return int(gmpy2.invert(k, self.q))

    def sub(self, a: int, b: int) -> int:
        """Scalar subtraction mod q; charged as a subtraction."""
        tick("subtractions")
        return (a - b) % self.q

    # -- serialization -----------------------------------------------------

    def deserialize(self, data: bytes, group: str = "G1"):
        if len(data) != ELEMENT_BYTES:
            raise DecodeError(f"expected {ELEMENT_BYTES} bytes, got {len(data)}")
        if group == "G1":
            return G1Element(self, self.backend.g1_from_bytes(bytes(data)))
        if group == "GT":
            return GTElement(self, self.backend.gt_from_bytes(bytes(data)))
        raise ValueError(f"unknown group {group!r}")

    def g1_from_compressed(self, data: bytes) -> G1Element:
        if len(data) != 1 + typea.FIELD_BYTES:
            raise DecodeError("bad compressed point length")
        return G1Element(self, self.backend.g1_from_compressed(bytes(data)))


def setup_pairing(backend: str = "curve", seed: bytes | str = b"fogsec", *, mock_q: int = MOCK_DEFAULT_Q) -> PairingParams:
    """Build pairing parameters.

    ``curve`` is the fixed 512-bit Type A parameter set (160-bit order);
    ``mock`` stores elements as exponents modulo ``mock_q``.  The seed picks
    the generator (curve) and the hash domain (both backends).
    """
    if isinstance(seed, str):
        seed = seed.encode()
    if backend == "mock":
        if not seed:
            raise ValueError("mock backend needs a non-empty seed")
        if not gmpy2.is_prime(mock_q):
            raise ValueError("mock group order must be prime")
        with uncounted():
            return PairingParams(_MockBackend(mock_q), seed)
    if backend == "curve":
        with uncounted():
            return PairingParams(_TypeABackend(), seed)
    raise UnsupportedBackendError(f"unsupported backend {backend!r}")


def pair(a: G1Element, b: G1Element) -> GTElement:
    return a.params.pair(a, b)


def serialize(e: _Element) -> bytes:
    return e.to_bytes()


def deserialize(params: PairingParams, data: bytes, group: str = "G1"):
    return params.deserialize(data, group)


def scalar_to_bytes(k: int) -> bytes:
    return int(k).to_bytes(SCALAR_BYTES, "big")


def scalar_from_bytes(data: bytes, q: int | None = None) -> int:
    if len(data) != SCALAR_BYTES:
        raise DecodeError(f"expected {SCALAR_BYTES} bytes, got {len(data)}")
    v = int.from_bytes(data, "big")
    if q is not None and v >= q:
        raise DecodeError("scalar out of range")
    return v
