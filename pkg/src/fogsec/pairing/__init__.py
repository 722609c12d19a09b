from .counter import CATEGORIES, SYMBOLS, OpCounter, counting, uncounted
from .group import (
    ELEMENT_BYTES,
    SCALAR_BYTES,
    DecodeError,
    G1Element,
    GTElement,
    PairingError,
    PairingParams,
    ParamsMismatchError,
    UnsupportedBackendError,
    deserialize,
    digest,
    pair,
    scalar_from_bytes,
    scalar_to_bytes,
    serialize,
    setup_pairing,
)

__all__ = [
    "CATEGORIES", "SYMBOLS", "OpCounter", "counting", "uncounted",
    "ELEMENT_BYTES", "SCALAR_BYTES", "DecodeError", "G1Element", "GTElement",
    "PairingError", "PairingParams", "ParamsMismatchError", "UnsupportedBackendError",
    "deserialize", "digest", "pair", "scalar_from_bytes", "scalar_to_bytes",
    "serialize", "setup_pairing",
]
