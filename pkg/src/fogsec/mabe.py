"""Multi-authority CP-ABE with offline/online encryption and outsourced decryption.

Each attribute ``k`` is owned by one authority holding ``(a_k, b_k)`` and
publishing ``(e(g,g)^a_k, g^b_k)``.  A user key component is
``K_k = g^a_k * H1(id)^b_k``.

Encryption is split between a device and its fog node.  Offline, the device
prepares one slot per attribute::

    ict1 = e(g,g)^lam' * e(g,g)^(a t)    ict2 = g^t    ict3 = g^(b t) * g^omega'

with random ``t, lam', omega'`` kept as the intermediate state.  Online, the
fog node shares ``m_s`` (and 0) over the policy matrix and ships the
corrections ``lam - lam'`` and ``omega - omega'`` next to each slot.

Decryption is outsourced: the user raises its key to ``1/r``, the proxy
computes

    CT1 = prod [e(H1(id)^(1/r), ict3 g^corr2) / e(K^(1/r), ict2)]^c_x
    CT2 = prod [ict1 e(g,g)^corr1]^c_x

and the user finishes with ``d = C0 / (CT1^r * CT2)``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

from . import lsss
from .pairing import SCALAR_BYTES, DecodeError, G1Element, GTElement, PairingParams, scalar_to_bytes


class MabeError(Exception):
    pass


class DuplicateAttributeError(MabeError):
    pass


class ForeignAttributeError(MabeError):
    pass


class UnknownAttributeError(MabeError):
    pass


class MissingSlotError(MabeError):
    pass


class PolicyUnsatisfiedError(MabeError):
    pass


@dataclass(frozen=True)
class AttributePublicKey:
    attr: str
    egg_a: GTElement
    g_b: G1Element


@dataclass(frozen=True)
class AuthorityKeys:
    name: str
    secrets: dict  # attr -> (a_k, b_k)
    public: dict  # attr -> AttributePublicKey

    @property
    def attrs(self) -> frozenset:
        return frozenset(self.public)


class AttributeDirectory:
    """Public keys of every attribute across authorities; names are unique."""

    def __init__(self):
        self._keys: dict = {}
        self._owner: dict = {}

    def publish(self, auth: AuthorityKeys) -> None:
        clash = [a for a in auth.public if a in self._keys]
        if clash:
            raise DuplicateAttributeError(
                f"attribute(s) {sorted(clash)} already owned by {self._owner[clash[0]]!r}")
        for a, pk in auth.public.items():
            self._keys[a] = pk
            self._owner[a] = auth.name

    def __getitem__(self, attr: str) -> AttributePublicKey:
        return self._keys[attr]

    def __contains__(self, attr) -> bool:
        return attr in self._keys

    def owner(self, attr: str) -> str:
        return self._owner[attr]

    def as_dict(self) -> dict:
        return dict(self._keys)


@dataclass(frozen=True)
class UserAttrKey:
    id: bytes
    keys: dict  # attr -> K_{k,id}


@dataclass(frozen=True)
class ICTSlot:
    attr: str
    ict1: GTElement
    ict2: G1Element
    ict3: G1Element

    def fields(self) -> dict:
        return {"ict1": self.ict1.to_bytes(), "ict2": self.ict2.to_bytes(), "ict3": self.ict3.to_bytes()}


@dataclass(frozen=True)
class IntermediateState:
    attr: str
    t: int
    lam: int
    omega: int

    def fields(self) -> dict:
        return {"t": scalar_to_bytes(self.t), "lam'": scalar_to_bytes(self.lam),
                "omega'": scalar_to_bytes(self.omega)}


@dataclass(frozen=True)
class MabeRow:
    slot: ICTSlot
    corr1: int
    corr2: int


@dataclass(frozen=True)
class MabeCiphertext:
    structure: lsss.AccessStructure
    C0: GTElement
    rows: tuple

    def fields(self) -> dict:
        out = {"C0": self.C0.to_bytes()}
        for x, row in enumerate(self.rows):
            for k, v in row.slot.fields().items():
                out[f"{k}[{x}]"] = v
            out[f"corr1[{x}]"] = scalar_to_bytes(row.corr1)
            out[f"corr2[{x}]"] = scalar_to_bytes(row.corr2)
        return out

    def payload_size(self) -> int:
        return sum(len(v) for v in self.fields().values())

    def to_bytes(self) -> bytes:
        """Header ``(l, m, policy)``, C0, then per row ``label | 3 elements | 2 scalars``."""
        pol = self.structure.policy_text.encode()
        out = [struct.pack(">HHH", self.structure.l, self.structure.m, len(pol)), pol, self.C0.to_bytes()]
        for row in self.rows:
            label = row.slot.attr.encode()
            out += [struct.pack(">B", len(label)), label, row.slot.ict1.to_bytes(), row.slot.ict2.to_bytes(),
                    row.slot.ict3.to_bytes(), scalar_to_bytes(row.corr1), scalar_to_bytes(row.corr2)]
        return b"".join(out)

    @classmethod
    def from_bytes(cls, params: PairingParams, data: bytes) -> "MabeCiphertext":
        try:
            l, m, plen = struct.unpack_from(">HHH", data, 0)
            pos = 6
            policy = data[pos:pos + plen].decode()
            pos += plen
            structure = lsss.compile_policy(policy)
            if (structure.l, structure.m) != (l, m):
                raise DecodeError("header dimensions disagree with the policy")
            C0 = params.deserialize(data[pos:pos + 128], "GT")
            pos += 128
            rows = []
            for x in range(l):
                (ln,) = struct.unpack_from(">B", data, pos)
                pos += 1
                attr = data[pos:pos + ln].decode()
                pos += ln
                if attr != structure.rho[x]:
                    raise DecodeError(f"row {x} label {attr!r} does not match the policy")
                e1 = params.deserialize(data[pos:pos + 128], "GT")
                e2 = params.deserialize(data[pos + 128:pos + 256], "G1")
                e3 = params.deserialize(data[pos + 256:pos + 384], "G1")
                pos += 384
                c1 = int.from_bytes(data[pos:pos + SCALAR_BYTES], "big")
                c2 = int.from_bytes(data[pos + SCALAR_BYTES:pos + 2 * SCALAR_BYTES], "big")
                pos += 2 * SCALAR_BYTES
                rows.append(MabeRow(ICTSlot(attr, e1, e2, e3), c1, c2))
        except (struct.error, UnicodeDecodeError, lsss.PolicyError) as exc:
            raise DecodeError(f"malformed ciphertext: {exc}") from None
        if pos != len(data):
            raise DecodeError("trailing bytes after ciphertext")
        return cls(structure, C0, tuple(rows))


@dataclass(frozen=True)
class TransformedKey:
    id: bytes
    keys: dict  # attr -> K^{1/r}
    h_id: G1Element  # H1(id)^{1/r}

    def fields(self) -> dict:
        out = {f"K[{a}]": k.to_bytes() for a, k in sorted(self.keys.items())}
        out["H1(id)"] = self.h_id.to_bytes()
        return out


@dataclass(frozen=True)
class PartialCiphertext:
    CT1: GTElement
    CT2: GTElement
    C0: GTElement

    def fields(self) -> dict:
        return {"CT1": self.CT1.to_bytes(), "CT2": self.CT2.to_bytes(), "C0": self.C0.to_bytes()}

    def to_bytes(self) -> bytes:
        return b"".join(self.fields().values())


def authority_setup(params: PairingParams, attrs, rng=None, name: str = "AA",
                    directory: AttributeDirectory | None = None) -> AuthorityKeys:
    attrs = list(dict.fromkeys(attrs))
    if not attrs:
        raise ValueError("an authority controls at least one attribute")
    secrets_, public = {}, {}
    for attr in attrs:
        a, b = params.random_scalar(rng), params.random_scalar(rng)
        secrets_[attr] = (a, b)
        public[attr] = AttributePublicKey(attr, params.gt_generator ** a, params.g ** b)
    auth = AuthorityKeys(name, secrets_, public)
    if directory is not None:
        directory.publish(auth)
    return auth


def authority_from_secrets(params: PairingParams, secrets_: dict, name: str = "AA") -> AuthorityKeys:
    """Rebuild an authority from fixed ``{attr: (a, b)}`` exponents."""
    public = {attr: AttributePublicKey(attr, params.gt_generator ** a, params.g ** b)
              for attr, (a, b) in secrets_.items()}
    return AuthorityKeys(name, dict(secrets_), public)


def keygen_user(params: PairingParams, auth: AuthorityKeys, id: bytes, attrs) -> UserAttrKey:
    attrs = list(attrs)
    foreign = [a for a in attrs if a not in auth.secrets]
    if foreign:
        raise ForeignAttributeError(f"{auth.name} does not control {foreign}")
    h = params.hash_to_g1(id)
    keys = {}
    for attr in attrs:
        a, b = auth.secrets[attr]
        keys[attr] = (params.g ** a) * (h ** b)
    return UserAttrKey(id, keys)


def merge_user_keys(*uks: UserAttrKey) -> UserAttrKey:
    ids = {u.id for u in uks}
    if len(ids) != 1:
        raise ValueError("keys belong to different identities")
    keys = {}
    for u in uks:
        keys.update(u.keys)
    return UserAttrKey(ids.pop(), keys)


def intermediate_encrypt(params: PairingParams, attrs_of_data, auth_pubs, rng=None) -> tuple:
    """Offline phase on the device: one slot per attribute attached to the datum."""
    attrs_of_data = list(attrs_of_data)
    if not attrs_of_data:
        raise ValueError("at least one attribute is required")
    Z = params.gt_generator
    g = params.g
    ict, state = [], []
    for attr in attrs_of_data:
        if attr not in auth_pubs:
            raise UnknownAttributeError(f"no public key for attribute {attr!r}")
        pk = auth_pubs[attr]
        t = params.random_scalar(rng)
        lam = params.random_scalar(rng, nonzero=False)
        omega = params.random_scalar(rng, nonzero=False)
        ict1 = (Z ** lam) * (pk.egg_a ** t)
        ict2 = g ** t
        ict3 = (pk.g_b ** t) * (g ** omega)
        ict.append(ICTSlot(attr, ict1, ict2, ict3))
        state.append(IntermediateState(attr, t, lam, omega))
    return ict, state


def device_message_fields(d: GTElement, ict: list, state: list) -> dict:
    """Accounted fields of the device-to-fog 3-tuple ``<d, ICT, IS>``."""
    out = {"d": d.to_bytes()}
    for x, (slot, st) in enumerate(zip(ict, state)):
        for k, v in slot.fields().items():
            out[f"{k}[{x}]"] = v
        for k, v in st.fields().items():
            out[f"{k}[{x}]"] = v
    return out


def full_encrypt(params: PairingParams, d: GTElement, ict: list, state: list, policy, rng=None,
                 m_s: int | None = None, v: list | None = None, w: list | None = None) -> MabeCiphertext:
    """Online phase on the fog node.

    Each policy row is bound to the first unused prepared slot carrying its
    attribute.  ``v``/``w`` fix the sharing vectors (first entries ``m_s``
    and 0) for reproducible tests.
    """
    structure = policy if isinstance(policy, lsss.AccessStructure) else lsss.compile_policy(policy)
    q = params.q
    free = {}
    for i, slot in enumerate(ict):
        free.setdefault(slot.attr, []).append(i)
    assignment = []
    for attr in structure.rho:
        if not free.get(attr):
            raise MissingSlotError(f"no prepared slot for attribute {attr!r}")
        assignment.append(free[attr].pop(0))
    if m_s is None:
        m_s = params.random_scalar(rng)
    if v is not None:
        v = [m_s] + list(v[1:])
    if w is not None:
        w = [0] + list(w[1:])
    lam = lsss.share(structure, m_s, q, rng, v=v)
    omega = lsss.share(structure, 0, q, rng, zero_target=True, v=w)
    C0 = d * (params.gt_generator ** m_s)
    rows = []
    for x, slot_i in enumerate(assignment):
        st = state[slot_i]
        rows.append(MabeRow(ict[slot_i], params.sub(lam[x], st.lam), params.sub(omega[x], st.omega)))
    return MabeCiphertext(structure, C0, tuple(rows))


def transform_key(params: PairingParams, uk: UserAttrKey, rng=None, r: int | None = None) -> tuple:
    r = params.random_scalar(rng) if r is None else r % params.q
    r_inv = params.inv(r)
    keys = {a: k ** r_inv for a, k in uk.keys.items()}
    return TransformedKey(uk.id, keys, params.hash_to_g1(uk.id) ** r_inv), r


def partial_decrypt(params: PairingParams, ct: MabeCiphertext, tk: TransformedKey) -> PartialCiphertext:
    coeffs = lsss.satisfy(ct.structure, tk.keys.keys(), params.q)
    if coeffs is None:
        raise PolicyUnsatisfiedError(
            f"attributes {sorted(tk.keys)} do not satisfy {ct.structure.policy_text}")
    g, Z = params.g, params.gt_generator
    CT1 = CT2 = None
    for x, c in sorted(coeffs.items()):
        row = ct.rows[x]
        attr = ct.structure.rho[x]
        term1 = params.pair(tk.h_id, row.slot.ict3 * (g ** row.corr2)) / params.pair(tk.keys[attr], row.slot.ict2)
        term2 = row.slot.ict1 * (Z ** row.corr1)
        term1, term2 = term1 ** c, term2 ** c
        CT1 = term1 if CT1 is None else CT1 * term1
        CT2 = term2 if CT2 is None else CT2 * term2
    return PartialCiphertext(CT1, CT2, ct.C0)


def full_decrypt(params: PairingParams, pct: PartialCiphertext, r: int) -> GTElement:
    return pct.C0 / ((pct.CT1 ** r) * pct.CT2)
