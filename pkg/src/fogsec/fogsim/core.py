"""Deterministic single-threaded event loop, entities, messages and ledgers."""
from __future__ import annotations

import csv
import heapq
import io
import itertools
import json
import random
from dataclasses import dataclass, field

from ..pairing import OpCounter, counting

LAYERS = ("perception", "fog", "cloud", "application")


class SimulationError(Exception):
    pass


class TopologyError(SimulationError):
    pass


class AuthError(SimulationError):
    pass


class LayerViolation(SimulationError):
    pass


class ScenarioAssertionError(SimulationError):
    def __init__(self, step: str, message: str):
        super().__init__(f"{step}: {message}")
        self.step = step


def allow_all(src: str, dst: str, payload_type: str) -> bool:
    return True


@dataclass(eq=False)
class Entity:
    id: str
    layer: str
    roles: frozenset = frozenset()
    counter: OpCounter = field(default_factory=OpCounter)
    # private key material and local storage; only this entity's steps touch it
    state: dict = field(default_factory=dict, repr=False)
    rng: random.Random | None = field(default=None, repr=False)

    def has(self, role: str) -> bool:
        return role in self.roles

    def keep_secret(self, name: str, value: int) -> int:
        """Register a long-term secret scalar so leak checks can look for it."""
        self.state.setdefault("secrets", {})[name] = value
        return value


@dataclass(frozen=True)
class Message:
    src: str
    dst: str
    kind: str
    payload: object = field(compare=False, repr=False)
    fields: dict = field(default_factory=dict, compare=False, repr=False)
    envelope: int = 0  # framing bytes (length prefixes, labels), kept out of the accounting

    @property
    def size(self) -> int:
        return sum(len(v) for v in self.fields.values())


class ByteLedger:
    """Per-link record of transmitted message sizes."""

    def __init__(self):
        self.links: dict = {}
        self._order: list = []

    def record(self, t: float, msg: Message) -> None:
        key = (msg.src, msg.dst)
        self.links.setdefault(key, []).append((msg.kind, msg.size))
        self._order.append((t, msg.src, msg.dst, msg.kind, msg.size, msg.envelope,
                            ";".join(f"{k}={len(v)}" for k, v in msg.fields.items())))

    def total(self, src: str | None = None, dst: str | None = None, kind: str | None = None) -> int:
        out = 0
        for (s, d), entries in self.links.items():
            if src is not None and s != src or dst is not None and d != dst:
                continue
            out += sum(sz for k, sz in entries if kind is None or k == kind)
        return out

    def sizes(self, src: str, dst: str) -> list:
        return [sz for _, sz in self.links.get((src, dst), [])]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "src", "dst", "kind", "bytes", "envelope_bytes", "fields"])
        for row in self._order:
            w.writerow(row)
        return buf.getvalue()


class Simulator:
    def __init__(self, params, seed: int = 0, latency: float = 0.0):
        self.params = params
        self.seed = seed
        self.latency = latency
        self.link_latency: dict = {}
        self.now = 0.0
        self.entities: dict = {}
        self.ledger = ByteLedger()
        self.transcript: list = []
        self.messages: list = []
        self.auth_hook = allow_all
        self.directory: dict = {}  # public bulletin board
        self._queue: list = []
        self._seq = itertools.count()
        self.handlers: dict = {}
        self.phase = "setup"

    # -- topology --------------------------------------------------------

    def add_entity(self, id: str, layer: str, roles=()) -> Entity:
        if layer not in LAYERS:
            raise TopologyError(f"unknown layer {layer!r} for {id}")
        if id in self.entities:
            raise TopologyError(f"duplicate entity id {id!r}")
        ent = Entity(id, layer, frozenset(roles), rng=random.Random(f"{self.seed}/{id}"))
        self.entities[id] = ent
        return ent

    def by_role(self, role: str) -> list:
        return [e for e in self.entities.values() if role in e.roles]

    def set_auth_hook(self, hook) -> None:
        self.auth_hook = hook or allow_all

    # -- events ----------------------------------------------------------

    def schedule(self, delay: float, fn, *args) -> None:
        heapq.heappush(self._queue, (self.now + delay, next(self._seq), fn, args))

    def run(self, until: float | None = None) -> None:
        while self._queue:
            t, _, fn, args = self._queue[0]
            if until is not None and t > until:
                break
            heapq.heappop(self._queue)
            self.now = t
            fn(*args)

    def on(self, entity_id: str, kind: str, handler) -> None:
        self.handlers[(entity_id, kind)] = handler

    def send(self, src: str, dst: str, kind: str, payload, fields: dict, envelope: int = 0) -> Message:
        if dst not in self.entities:
            raise TopologyError(f"{src} sends to unknown entity {dst!r}")
        if not self.auth_hook(src, dst, kind):
            raise AuthError(f"authentication hook denied {kind} from {src} to {dst}")
        msg = Message(src, dst, kind, payload, dict(fields), envelope)
        self.messages.append(msg)
        self.ledger.record(self.now, msg)
        self.transcript.append({"t": self.now, "phase": self.phase, "entity": src, "step": "send",
                                "kind": kind, "dst": dst, "bytes": msg.size})
        delay = self.link_latency.get((src, dst), self.latency)
        self.schedule(delay, self._deliver, msg)
        return msg

    def _deliver(self, msg: Message) -> None:
        handler = self.handlers.get((msg.dst, msg.kind))
        if handler is None:
            raise SimulationError(f"{msg.dst} has no handler for {msg.kind!r}")
        handler(self.entities[msg.dst], msg)

    def step(self, ent: Entity, name: str, fn, *, layer: str | None = None, role: str | None = None, **detail):
        """Execute one protocol step on ``ent``, charging its op counter."""
        if layer is not None and ent.layer != layer:
            raise LayerViolation(f"step {name!r} must run on the {layer} layer, not on {ent.id} ({ent.layer})")
        if role is not None and role not in ent.roles:
            raise LayerViolation(f"step {name!r} needs role {role!r}, which {ent.id} lacks")
        with ent.counter.session(), counting() as c:
            out = fn()
        self.transcript.append({"t": self.now, "phase": self.phase, "entity": ent.id, "step": name,
                                "ops": {k: v for k, v in c.as_symbols().items() if v}, **detail})
        return out

    def fail(self, step: str, message: str):
        raise ScenarioAssertionError(step, message)

    # -- outputs ---------------------------------------------------------

    def counters(self) -> dict:
        return {eid: e.counter.as_symbols() for eid, e in self.entities.items()}

    def transcript_jsonl(self) -> str:
        return "".join(json.dumps(entry, sort_keys=True) + "\n" for entry in self.transcript)

    def steps(self, entity: str | None = None, phase: str | None = "run") -> list:
        return [e["step"] for e in self.transcript
                if e["step"] != "send"
                and (entity is None or e["entity"] == entity)
                and (phase is None or e["phase"] == phase)]
