"""KEM-style wrapper: a GT element keys AES-GCM for bulk application data."""
from __future__ import annotations

import hashlib

from cryptography.hazmat.primitives.ciphers.aead import AESGCM

NONCE_BYTES = 12


def derive_key(elem) -> bytes:
    return hashlib.sha256(b"fogsec/kem/" + elem.to_bytes()).digest()


def seal(elem, data: bytes, rng) -> bytes:
    nonce = rng.randbytes(NONCE_BYTES)
    return nonce + AESGCM(derive_key(elem)).encrypt(nonce, data, None)


def open_(elem, blob: bytes) -> bytes:
    return AESGCM(derive_key(elem)).decrypt(blob[:NONCE_BYTES], blob[NONCE_BYTES:], None)
