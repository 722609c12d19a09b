"""Protocol drivers replaying the four fog-layer sequence diagrams.

A driver declares the roles it needs, provisions keys through the protocol
modules' setup flows, exposes scripted actions and checks end-state
assertions.  Handlers only touch the state of the entity they run on; all
cross-entity data moves through ``Simulator.send``.
"""
from __future__ import annotations

from .. import aggsign, clpre, homopre, mabe
from ..pairing import scalar_to_bytes
from . import kem
from .core import Entity, Simulator, TopologyError


def _fields(obj) -> dict:
    return dict(obj.fields())


def publish(sim: Simulator, cloud: Entity, data_id: str) -> None:
    """The cloud lists stored item ids on the public directory."""
    listing = sim.directory.setdefault(("catalog", cloud.id), [])
    if data_id not in listing:
        listing.append(data_id)


def catalog(sim: Simulator, cloud: Entity) -> list:
    return list(sim.directory.get(("catalog", cloud.id), []))


class Protocol:
    name = ""
    # role -> required layer (None: any layer); "cloud" is looked up by layer
    roles: dict = {}
    needs_cloud = False
    default_events: list = []

    def __init__(self, params: dict | None = None):
        self.cfg = dict(self.defaults())
        self.cfg.update(params or {})

    def defaults(self) -> dict:
        return {}

    # -- topology --------------------------------------------------------

    def bind(self, sim: Simulator) -> None:
        self.sim = sim
        self.ent = {}
        for role, layer in self.roles.items():
            found = [e for e in sim.by_role(role) if layer is None or e.layer == layer]
            if not found:
                where = f"a {layer} entity" if layer else "an entity"
                raise TopologyError(f"{self.name} needs {where} with role {role!r}")
            self.ent[role] = found
        if self.needs_cloud:
            clouds = [e for e in sim.entities.values() if e.layer == "cloud"]
            if not clouds:
                raise TopologyError(f"{self.name} needs a cloud entity")
            self.ent["cloud"] = clouds

    def one(self, role: str) -> Entity:
        return self.ent[role][0]

    def provision(self) -> None:
        pass

    def actions(self) -> dict:
        return {}

    def check(self) -> None:
        pass

    @property
    def params(self):
        return self.sim.params

    def reading(self, ent: Entity) -> bytes:
        return ent.rng.randbytes(self.cfg["reading_size"])


# --------------------------------------------------------------------------


class Aggregation(Protocol):
    name = "aggregation"
    roles = {"device": "perception", "collector": "fog"}
    default_events = [{"at": 1, "action": "send-frame", "entity": None}]

    def defaults(self):
        return {"n": 7, "msg_size": 100, "mode": "aggregate", "summary_size": 0}

    def provision(self):
        sim, P = self.sim, self.params
        for dev in self.ent["device"]:
            kp = sim.step(dev, "keygen", lambda: aggsign.keygen(P, dev.rng))
            dev.keep_secret("sk", kp.sk)
            dev.state["sk"] = kp.sk
            sim.directory[("sign-pk", dev.id)] = kp.pk
        for fog in self.ent["collector"]:
            sim.on(fog.id, "frame", self.on_frame)
            fog.state["accepted"] = []
        for cloud in (e for e in sim.entities.values() if e.layer == "cloud"):
            sim.on(cloud.id, "summary", self.on_summary)
            cloud.state.setdefault("store", {})

    def actions(self):
        return {"send-frame": self.send_frame}

    def send_frame(self, dev: Entity):
        sim, P, cfg = self.sim, self.params, self.cfg
        if dev not in self.ent["device"]:
            raise TopologyError(f"{dev.id} is not a signing device")
        packets = [dev.rng.randbytes(cfg["msg_size"]) for _ in range(cfg["n"])]
        dev.state.setdefault("sent", []).append(packets)
        sigs = sim.step(dev, "sign", lambda: [aggsign.sign(P, d, dev.state["sk"]) for d in packets])
        if cfg["mode"] == "aggregate":
            sigs = sim.step(dev, "aggregate", lambda: aggsign.aggregate(sigs))
        elif cfg["mode"] != "bls":
            raise ValueError(f"unknown signing mode {cfg['mode']!r}")
        frame = aggsign.SignedFrame(packets, sigs)
        fields = {f"D[{j}]": d for j, d in enumerate(packets)}
        for j, s in enumerate([frame.sig] if frame.aggregated else frame.sig):
            fields[f"sigma[{j}]"] = s.to_bytes()
        envelope = len(frame.to_bytes()) - frame.payload_size()
        sim.send(dev.id, self.one("collector").id, "frame", frame, fields, envelope=envelope)

    def on_frame(self, fog: Entity, msg):
        sim, P = self.sim, self.params
        pk = sim.directory[("sign-pk", msg.src)]
        ok = sim.step(fog, "verify", lambda: aggsign.verify_frame(P, msg.payload, pk), layer="fog")
        if not ok:
            sim.fail("verify", f"frame from {msg.src} failed verification at {fog.id}")
        fog.state["accepted"].append(list(msg.payload.packets))
        size = self.cfg["summary_size"]
        clouds = [e for e in sim.entities.values() if e.layer == "cloud"]
        if size and clouds:
            blob = fog.rng.randbytes(size)
            sim.send(fog.id, clouds[0].id, "summary", blob, {"summary": blob})

    def on_summary(self, cloud: Entity, msg):
        cloud.state["store"][f"summary/{msg.src}/{len(cloud.state['store'])}"] = msg.fields["summary"]

    def check(self):
        sent = [p for dev in self.ent["device"] for p in dev.state.get("sent", [])]
        got = [p for fog in self.ent["collector"] for p in fog.state["accepted"]]
        if sent != got:
            self.sim.fail("verify", "collector did not accept exactly the frames that were sent")


# --------------------------------------------------------------------------


class DataSharing(Protocol):
    name = "data-sharing"
    roles = {"sender": "perception", "proxy": "fog", "pkg": None, "receiver": None}
    needs_cloud = True
    default_events = [{"at": 1, "action": "share", "entity": None},
                      {"at": 5, "action": "request", "entity": None}]

    def defaults(self):
        return {"reading_size": 64}

    def provision(self):
        sim, P = self.sim, self.params
        pkg_ent = self.one("pkg")
        pkg = sim.step(pkg_ent, "pkg-setup", lambda: clpre.pkg_setup(P, pkg_ent.rng))
        pkg_ent.keep_secret("mk", pkg.mk)
        pkg_ent.state["pkg"] = pkg
        sim.directory["mpk"] = pkg.mpk
        for ent in self.ent["sender"] + self.ent["receiver"]:
            sim.on(ent.id, "partial-key", self.on_partial_key)
            partial = sim.step(pkg_ent, "partial-key-extract",
                               lambda: clpre.extract_partial_key(pkg, ent.id.encode()))
            sim.send(pkg_ent.id, ent.id, "partial-key", partial, {"P_i": partial.to_bytes()})
        sim.run()
        gateways = [e for e in sim.by_role("gateway") if e.layer == "fog"]
        self.gateway = gateways[0] if gateways else None
        if self.gateway:
            sim.on(self.gateway.id, "share", self.on_gateway)
            sim.on(self.gateway.id, "bulk", self.on_gateway)
        proxy = self.one("proxy")
        sim.on(proxy.id, "share", self.on_share)
        sim.on(proxy.id, "bulk", self.on_bulk_at_proxy)
        sim.on(proxy.id, "notify", self.on_notify)
        proxy.state["c''"] = {}
        cloud = self.one("cloud")
        cloud.state.setdefault("store", {})
        sim.on(cloud.id, "store", self.on_store)
        sim.on(cloud.id, "request", self.on_request)
        for r in self.ent["receiver"]:
            sim.on(r.id, "reply", self.on_reply)
            sim.on(r.id, "bulk", self.on_reply)
            r.state["inbox"] = {}
            r.state["received"] = {}

    def on_partial_key(self, ent: Entity, msg):
        sim, P = self.sim, self.params
        is_sender = ent in self.ent["sender"]
        keys = sim.step(ent, "key-generation", lambda: clpre.user_keygen(
            P, msg.payload, ent.id.encode(), sim.directory["mpk"], is_sender, ent.rng))
        ent.keep_secret("k", keys.secret_k)
        if keys.delegation_d is not None:
            ent.keep_secret("d", keys.delegation_d)
        ent.state["keys"] = keys
        sim.directory[("clpre-pk", ent.id)] = keys.public_key()

    def actions(self):
        return {"share": self.share, "request": self.request}

    def share(self, s: Entity):
        sim, P = self.sim, self.params
        keys = s.state["keys"]
        data = self.reading(s)
        n = len(s.state.setdefault("shared", {}))
        data_id = f"{s.id}/{n}"
        s.state["shared"][data_id] = data
        m = P.random_gt(s.rng)
        ct = sim.step(s, "encryption", lambda: clpre.encrypt(P, m, keys, s.rng), data=data_id)
        fields = {f"c'.{k}": v for k, v in ct.fields().items()}
        rks = {}
        for r in self.ent["receiver"]:
            pub = sim.directory[("clpre-pk", r.id)]
            rk = sim.step(s, "rekey-generation", lambda: clpre.rekeygen(P, keys, pub, s.rng), receiver=r.id)
            rks[r.id] = rk
            fields.update({f"rk[{r.id}].{k}": v for k, v in rk.fields().items()})
        bulk = kem.seal(m, data, s.rng)
        hop = self.gateway or self.one("proxy")
        sim.send(s.id, hop.id, "share", (data_id, ct, rks), fields, envelope=len(data_id))
        sim.send(s.id, hop.id, "bulk", (data_id, bulk), {"bulk": bulk}, envelope=len(data_id))

    def on_gateway(self, fog: Entity, msg):
        # time-insensitive data: hand it to a proxy fog for cloud storage
        if msg.kind == "share":
            self.sim.step(fog, "forward", lambda: None)
        self.sim.send(fog.id, self.one("proxy").id, msg.kind, msg.payload, msg.fields, msg.envelope)

    def on_share(self, pf: Entity, msg):
        sim, P = self.sim, self.params
        data_id, ct, rks = msg.payload
        cloud = self.one("cloud")
        sim.step(pf, "store", lambda: None, data=data_id)
        sim.send(pf.id, cloud.id, "store", (f"{data_id}/c'", ct.to_bytes()),
                 {f"c'.{k}": v for k, v in ct.fields().items()}, envelope=len(data_id))
        for rid, rk in rks.items():
            rct = sim.step(pf, "re-encryption", lambda: clpre.reencrypt(P, ct, rk),
                           layer="fog", role="proxy", receiver=rid)
            pf.state["c''"][(data_id, rid)] = rct
        pf.state.setdefault("origin", {})[data_id] = msg.src

    def on_bulk_at_proxy(self, pf: Entity, msg):
        data_id, bulk = msg.payload
        self.sim.send(pf.id, self.one("cloud").id, "store", (f"{data_id}/bulk", bulk), msg.fields,
                      envelope=len(data_id))

    def on_store(self, cloud: Entity, msg):
        key, blob = msg.payload
        cloud.state["store"][key] = blob
        cloud.state.setdefault("uploader", {})[key.rsplit("/", 1)[0]] = msg.src
        publish(self.sim, cloud, key.rsplit("/", 1)[0])

    def request(self, r: Entity):
        sim = self.sim
        for data_id in catalog(sim, self.one("cloud")):
            sim.step(r, "request", lambda: None, data=data_id)
            raw = data_id.encode()
            sim.send(r.id, self.one("cloud").id, "request", data_id, {"data_id": raw})

    def on_request(self, cloud: Entity, msg):
        sim = self.sim
        data_id = msg.payload
        store = cloud.state["store"]
        pf = cloud.state["uploader"].get(data_id)
        if pf is None:
            sim.fail("request", f"cloud holds no data under {data_id!r}")
        sim.step(cloud, "notify", lambda: None, data=data_id, proxy=pf)
        sim.send(cloud.id, pf, "notify", (data_id, msg.src),
                 {"data_id": data_id.encode(), "receiver": msg.src.encode()})
        blob = store[f"{data_id}/bulk"]
        sim.send(cloud.id, msg.src, "bulk", (data_id, blob), {"bulk": blob}, envelope=len(data_id))

    def on_notify(self, pf: Entity, msg):
        sim = self.sim
        data_id, rid = msg.payload
        rct = pf.state["c''"].get((data_id, rid))
        if rct is None:
            sim.fail("re-encryption", f"no re-encryption key from the sender covers {rid}")
        sim.send(pf.id, rid, "reply", (data_id, rct), _fields(rct), envelope=len(data_id))

    def on_reply(self, r: Entity, msg):
        data_id = msg.payload[0]
        slot = r.state["inbox"].setdefault(data_id, {})
        slot[msg.kind] = msg.payload[1]
        if len(slot) < 2:
            return
        P = self.params
        m = self.sim.step(r, "decryption", lambda: clpre.decrypt(P, slot["reply"], r.state["keys"]), data=data_id)
        r.state["received"][data_id] = kem.open_(m, slot["bulk"])

    def check(self):
        sent = {k: v for s in self.ent["sender"] for k, v in s.state.get("shared", {}).items()}
        for r in self.ent["receiver"]:
            if r.state["received"] != sent:
                self.sim.fail("decryption", f"{r.id} did not recover the sender's plaintext")


# --------------------------------------------------------------------------


class AccessControl(Protocol):
    name = "access-control"
    roles = {"owner": "perception", "encryptor": "fog", "authority": None,
             "requester": "perception", "proxy": "fog"}
    needs_cloud = True
    default_events = [{"at": 1, "action": "upload", "entity": None},
                      {"at": 5, "action": "request", "entity": None}]

    def defaults(self):
        return {"reading_size": 64, "attributes": ["engineer", "plant2"],
                "policy": "engineer AND plant2", "requester_attributes": ["engineer", "plant2"],
                "expect_access": True}

    def provision(self):
        sim, P, cfg = self.sim, self.params, self.cfg
        directory = mabe.AttributeDirectory()
        self.auth = {}
        attrs = sorted(set(cfg["attributes"]) | set(cfg["requester_attributes"]))
        aa = self.one("authority")
        auth = sim.step(aa, "authority-setup",
                        lambda: mabe.authority_setup(P, attrs, aa.rng, aa.id, directory))
        for a, (ak, bk) in sorted(auth.secrets.items()):
            aa.keep_secret(f"a[{a}]", ak)
            aa.keep_secret(f"b[{a}]", bk)
        aa.state["auth"] = auth
        sim.directory["attribute-pks"] = directory.as_dict()
        for req in self.ent["requester"]:
            sim.on(req.id, "user-key", self.on_user_key)
            req.state["received"] = {}
            req.state["denied"] = []
            uk = sim.step(aa, "key-generation",
                          lambda: mabe.keygen_user(P, auth, req.id.encode(), cfg["requester_attributes"]))
            sim.send(aa.id, req.id, "user-key", uk, {f"K[{a}]": k.to_bytes() for a, k in sorted(uk.keys.items())})
        sim.run()
        for f1 in self.ent["encryptor"]:
            sim.on(f1.id, "ict", self.on_ict)
            sim.on(f1.id, "bulk", self.on_bulk)
        cloud = self.one("cloud")
        cloud.state.setdefault("store", {})
        sim.on(cloud.id, "store", self.on_store)
        sim.on(cloud.id, "download", self.on_download)
        for f2 in self.ent["proxy"]:
            sim.on(f2.id, "tk", self.on_tk)
            sim.on(f2.id, "ct", self.on_ct)
        for req in self.ent["requester"]:
            sim.on(req.id, "partial", self.on_partial)
            sim.on(req.id, "denied", self.on_partial)

    def on_user_key(self, ent: Entity, msg):
        ent.state["uk"] = msg.payload

    def actions(self):
        return {"upload": self.upload, "request": self.request}

    def upload(self, a1: Entity):
        sim, P, cfg = self.sim, self.params, self.cfg
        data = self.reading(a1)
        n = len(a1.state.setdefault("uploaded", {}))
        data_id = f"{a1.id}/{n}"
        a1.state["uploaded"][data_id] = data
        d = P.random_gt(a1.rng)
        pubs = sim.directory["attribute-pks"]
        ict, state = sim.step(a1, "intermediate-encryption",
                              lambda: mabe.intermediate_encrypt(P, cfg["attributes"], pubs, a1.rng),
                              layer="perception", data=data_id)
        f1 = self.one("encryptor")
        bulk = kem.seal(d, data, a1.rng)
        sim.send(a1.id, f1.id, "ict", (data_id, d, ict, state), mabe.device_message_fields(d, ict, state),
                 envelope=len(data_id))
        sim.send(a1.id, f1.id, "bulk", (data_id, bulk), {"bulk": bulk}, envelope=len(data_id))

    def on_ict(self, f1: Entity, msg):
        sim, P = self.sim, self.params
        data_id, d, ict, state = msg.payload
        ct = sim.step(f1, "full-encrypt",
                      lambda: mabe.full_encrypt(P, d, ict, state, self.cfg["policy"], f1.rng),
                      layer="fog", data=data_id)
        sim.send(f1.id, self.one("cloud").id, "store", (f"{data_id}/ct", ct.to_bytes()), ct.fields(),
                 envelope=len(ct.to_bytes()) - ct.payload_size())

    def on_bulk(self, f1: Entity, msg):
        data_id, bulk = msg.payload
        self.sim.send(f1.id, self.one("cloud").id, "store", (f"{data_id}/bulk", bulk), msg.fields,
                      envelope=len(data_id))

    def on_store(self, cloud: Entity, msg):
        key, blob = msg.payload
        cloud.state["store"][key] = blob
        publish(self.sim, cloud, key.rsplit("/", 1)[0])

    def request(self, a2: Entity):
        sim, P = self.sim, self.params
        f2 = self.one("proxy")
        for data_id in catalog(sim, self.one("cloud")):
            tk, r = sim.step(a2, "key-transformation", lambda: mabe.transform_key(P, a2.state["uk"], a2.rng),
                             data=data_id)
            a2.keep_secret(f"r[{data_id}]", r)
            a2.state.setdefault("r", {})[data_id] = r
            fields = {f"K'[{a}]": k.to_bytes() for a, k in sorted(tk.keys.items())}
            fields["H'"] = tk.h_id.to_bytes()
            sim.send(a2.id, f2.id, "tk", (data_id, tk), fields, envelope=len(data_id))

    def on_tk(self, f2: Entity, msg):
        data_id, tk = msg.payload
        f2.state.setdefault("pending", {})[data_id] = (msg.src, tk)
        self.sim.send(f2.id, self.one("cloud").id, "download", data_id, {"data_id": data_id.encode()})

    def on_download(self, cloud: Entity, msg):
        data_id = msg.payload
        store = cloud.state["store"]
        if f"{data_id}/ct" not in store:
            self.sim.fail("download", f"cloud holds no ciphertext under {data_id!r}")
        ct_bytes, bulk = store[f"{data_id}/ct"], store[f"{data_id}/bulk"]
        self.sim.send(cloud.id, msg.src, "ct", (data_id, ct_bytes, bulk),
                      {"ct": ct_bytes, "bulk": bulk})

    def on_ct(self, f2: Entity, msg):
        sim, P = self.sim, self.params
        data_id, ct_bytes, bulk = msg.payload
        requester, tk = f2.state["pending"].pop(data_id)
        ct = mabe.MabeCiphertext.from_bytes(P, ct_bytes)
        try:
            pct = sim.step(f2, "partial-decryption", lambda: mabe.partial_decrypt(P, ct, tk),
                           layer="fog", role="proxy", data=data_id)
        except mabe.PolicyUnsatisfiedError:
            sim.send(f2.id, requester, "denied", (data_id, None), {"data_id": data_id.encode()})
            return
        sim.send(f2.id, requester, "partial", (data_id, (pct, bulk)), _fields(pct), envelope=len(data_id))

    def on_partial(self, a2: Entity, msg):
        data_id, body = msg.payload
        if msg.kind == "denied":
            a2.state["denied"].append(data_id)
            return
        pct, bulk = body
        r = a2.state["r"].pop(data_id)
        d = self.sim.step(a2, "full-decryption", lambda: mabe.full_decrypt(self.params, pct, r), data=data_id)
        a2.state["received"][data_id] = kem.open_(d, bulk)

    def check(self):
        sent = {k: v for a in self.ent["owner"] for k, v in a.state.get("uploaded", {}).items()}
        for a2 in self.ent["requester"]:
            if self.cfg["expect_access"]:
                if a2.state["received"] != sent:
                    self.sim.fail("full-decryption", f"{a2.id} did not recover the owner's plaintext")
            elif a2.state["received"] or sorted(a2.state["denied"]) != sorted(sent):
                self.sim.fail("partial-decryption", f"{a2.id} was not denied access as expected")


# --------------------------------------------------------------------------


class Computation(Protocol):
    name = "computation"
    roles = {"owner": "fog", "requester": "fog"}
    needs_cloud = True
    default_events = [{"at": 1, "action": "upload", "entity": None},
                      {"at": 5, "action": "query", "entity": None}]

    def defaults(self):
        # plaintexts are Z^v; f1 and f2 multiply by Z^k for each listed k
        return {"value": 3, "f1": [4], "f2": [5]}

    def provision(self):
        sim, P = self.sim, self.params
        for ta in sim.by_role("ta"):
            sim.step(ta, "setup", lambda: None, backend=P.backend_id)
        for pf in self.ent["owner"] + self.ent["requester"]:
            if not pf.has("proxy") or pf.layer != "fog":
                raise TopologyError(f"{pf.id} must be a proxy-role fog node")
            kp = sim.step(pf, "key-generation", lambda: homopre.keygen(P, pf.rng))
            pf.keep_secret("sk", kp.sk)
            pf.state["kp"] = kp
            sim.directory[("homo-pk", pf.id)] = kp.public
        cloud = self.one("cloud")
        cloud.state.setdefault("store", {})
        sim.on(cloud.id, "upload", self.on_upload)
        sim.on(cloud.id, "query", self.on_query)
        sim.on(cloud.id, "result", self.on_result)
        for pf in self.ent["owner"]:
            sim.on(pf.id, "evaluate", self.on_evaluate)
        for pf in self.ent["requester"]:
            sim.on(pf.id, "reply", self.on_reply)
            pf.state["results"] = []

    def actions(self):
        return {"upload": self.upload, "query": self.query}

    def upload(self, pf1: Entity):
        sim, P = self.sim, self.params
        m = P.gt_from_log(self.cfg["value"])
        kp = pf1.state["kp"]
        ct = sim.step(pf1, "encrypt/upload",
                      lambda: homopre.encrypt(P, m, kp.public, homopre.SECOND, pf1.rng), layer="fog")
        n = len(pf1.state.setdefault("uploaded", []))
        pf1.state["uploaded"].append(self.cfg["value"])
        key = f"{pf1.id}/{n}"
        sim.send(pf1.id, self.one("cloud").id, "upload", (key, ct), _fields(ct), envelope=len(key))

    def on_upload(self, cloud: Entity, msg):
        key, ct = msg.payload
        cloud.state["store"][key] = ct.to_bytes()
        cloud.state.setdefault("owner", {})[key] = msg.src
        publish(self.sim, cloud, key)

    def _program(self, name: str) -> list:
        return [(homopre.MUL_CONST, self.params.gt_from_log(k)) for k in self.cfg[name]]

    def query(self, pf2: Entity):
        sim = self.sim
        cloud = self.one("cloud")
        keys = catalog(sim, cloud)
        f1, f2 = sim.step(pf2, "query", lambda: (homopre.encode_program(self._program("f1")),
                                                 homopre.encode_program(self._program("f2"))))
        for key in keys:
            sim.send(pf2.id, cloud.id, "query", (key, f1, f2),
                     {"data_id": key.encode(), "f1": f1, "f2": f2})

    def on_query(self, cloud: Entity, msg):
        key, f1, f2 = msg.payload
        owner = cloud.state["owner"][key]
        ct_bytes = cloud.state["store"][key]
        cloud.state.setdefault("queries", {})[key] = msg.src
        self.sim.send(cloud.id, owner, "evaluate", (key, ct_bytes, f1, f2, msg.src),
                      {"CT": ct_bytes, "f1": f1, "f2": f2}, envelope=len(key) + len(msg.src))

    def on_evaluate(self, pf1: Entity, msg):
        sim, P = self.sim, self.params
        key, ct_bytes, f1, f2, requester = msg.payload
        kp = pf1.state["kp"]
        target = sim.directory[("homo-pk", requester)]
        ct = homopre.HomoCiphertext.from_bytes(P, ct_bytes, homopre.SECOND)
        ct = homopre.HomoCiphertext(ct.level, ct.c1, ct.c2, kp.public)
        prog1 = homopre.decode_program(P, f1)
        prog2 = homopre.decode_program(P, f2)
        res = sim.step(pf1, "eval", lambda: homopre.run_program(P, ct, prog1, kp.public, rng=pf1.rng),
                       layer="fog", role="proxy")
        rk = sim.step(pf1, "rkgen", lambda: homopre.rekeygen(P, kp.sk, target.pk2), layer="fog", role="proxy")
        res1 = sim.step(pf1, "reencrypt", lambda: homopre.reencrypt(P, res, rk, target),
                        layer="fog", role="proxy")
        res2 = sim.step(pf1, "eval-on-transformed",
                        lambda: homopre.run_program(P, res1, prog2, target, rng=pf1.rng),
                        layer="fog", role="proxy")
        sim.send(pf1.id, msg.src, "result", (key, res2), _fields(res2), envelope=len(key))

    def on_result(self, cloud: Entity, msg):
        key, res = msg.payload
        cloud.state["store"][f"{key}/result"] = res.to_bytes()
        requester = cloud.state["queries"].pop(key)
        self.sim.step(cloud, "reply", lambda: None, data=key)
        self.sim.send(cloud.id, requester, "reply", (key, res.to_bytes()), _fields(res), envelope=len(key))

    def on_reply(self, pf2: Entity, msg):
        sim, P = self.sim, self.params
        key, blob = msg.payload
        kp = pf2.state["kp"]
        res = homopre.HomoCiphertext.from_bytes(P, blob, homopre.FIRST)
        out = sim.step(pf2, "decrypt", lambda: homopre.decrypt(P, res, kp.sk))
        pf2.state["results"].append(out)

    def check(self):
        P = self.params
        expected = [P.gt_from_log(v + sum(self.cfg["f1"]) + sum(self.cfg["f2"]))
                    for pf in self.ent["owner"] for v in pf.state.get("uploaded", [])]
        for pf2 in self.ent["requester"]:
            if pf2.state["results"] != expected:
                self.sim.fail("decrypt", f"{pf2.id} did not obtain the expected product")


PROTOCOLS = {p.name: p for p in (Aggregation, DataSharing, AccessControl, Computation)}


def secret_leaks(sim: Simulator) -> list:
    """Messages whose accounted fields contain another entity's secret scalar."""
    found = []
    for ent in sim.entities.values():
        for name, value in ent.state.get("secrets", {}).items():
            needle = scalar_to_bytes(value)
            for msg in sim.messages:
                if any(needle in v for v in msg.fields.values()):
                    found.append((ent.id, name, msg.src, msg.dst, msg.kind))
    return found
