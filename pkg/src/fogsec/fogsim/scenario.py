"""Declarative scenarios: topology, scripted events and end-state assertions."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from ..pairing import setup_pairing
from .core import ScenarioAssertionError, Simulator, TopologyError
from .protocols import PROTOCOLS


class UnknownScenarioError(LookupError):
    pass


@dataclass
class Scenario:
    name: str
    protocol: str
    topology: list
    events: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    seed: int = 0
    backend: str = "mock"
    latency: float = 0.0
    links: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        missing = {"name", "protocol", "topology"} - set(data)
        if missing:
            raise ValueError(f"scenario lacks {sorted(missing)}")
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown scenario keys {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_yaml(cls, text: str) -> "Scenario":
        return cls.from_dict(yaml.safe_load(text))

    def with_overrides(self, *, seed=None, backend=None, **params) -> "Scenario":
        merged = dict(self.params)
        merged.update({k: v for k, v in params.items() if v is not None})
        return Scenario(self.name, self.protocol, self.topology, self.events, self.assertions, merged,
                        self.seed if seed is None else seed, backend or self.backend, self.latency, self.links)


def builtin_names() -> list:
    pkg = resources.files(__package__) / "scenarios"
    return sorted(p.name[:-5] for p in pkg.iterdir() if p.name.endswith(".yaml"))


def load_scenario(name_or_path: str | Path) -> Scenario:
    path = Path(name_or_path)
    if path.suffix in (".yaml", ".yml") and path.exists():
        return Scenario.from_yaml(path.read_text())
    res = resources.files(__package__) / "scenarios" / f"{name_or_path}.yaml"
    if not res.is_file():
        raise UnknownScenarioError(f"unknown scenario {name_or_path!r}; known: {', '.join(builtin_names())}")
    return Scenario.from_yaml(res.read_text())


@dataclass
class ScenarioResult:
    ledger: object
    counters: dict
    transcript: list
    sim: Simulator = field(repr=False)

    def __iter__(self):
        return iter((self.ledger, self.counters, self.transcript))


def build_topology(scenario: Scenario, params=None, auth_hook=None):
    """Create entities, bind the protocol's roles and provision keys."""
    if scenario.protocol not in PROTOCOLS:
        raise TopologyError(f"unknown protocol {scenario.protocol!r}")
    params = params or setup_pairing(scenario.backend)
    sim = Simulator(params, scenario.seed, scenario.latency)
    for spec in scenario.topology:
        sim.add_entity(spec["id"], spec["layer"], spec.get("roles", ()))
    for link, delay in scenario.links.items():
        src, dst = link.split(">")
        sim.link_latency[(src.strip(), dst.strip())] = float(delay)
    sim.set_auth_hook(auth_hook)
    proto = PROTOCOLS[scenario.protocol](scenario.params)
    proto.bind(sim)
    proto.provision()
    sim.run()
    return sim, proto


def run_scenario(scenario: Scenario | str, params=None, auth_hook=None) -> ScenarioResult:
    if isinstance(scenario, str):
        scenario = load_scenario(scenario)
    sim, proto = build_topology(scenario, params, auth_hook)
    sim.phase = "run"
    actions = proto.actions()
    start = sim.now
    for ev in scenario.events or proto.default_events:
        action = ev["action"]
        if action not in actions:
            raise TopologyError(f"{scenario.protocol} has no action {action!r}")
        targets = [ev["entity"]] if ev.get("entity") else None
        if targets is None:
            role = {"send-frame": "device", "share": "sender", "request": "receiver" if "receiver" in proto.ent
                    else "requester", "upload": "owner", "query": "requester"}[action]
            targets = [e.id for e in proto.ent[role]]
        for eid in targets:
            if eid not in sim.entities:
                raise TopologyError(f"event targets unknown entity {eid!r}")
            sim.schedule(start + float(ev.get("at", 0)) - sim.now, actions[action], sim.entities[eid])
    sim.run()
    proto.check()
    _check_assertions(sim, scenario.assertions)
    return ScenarioResult(sim.ledger, sim.counters(), sim.transcript, sim)


def _check_assertions(sim: Simulator, assertions: list) -> None:
    for a in assertions:
        if "link" in a:
            src, dst = a["link"]
            if "sizes" in a:
                got = [sz for k, sz in sim.ledger.links.get((src, dst), []) if "kind" not in a or k == a["kind"]]
                want = list(a["sizes"])
            else:
                got = sim.ledger.total(src, dst, a.get("kind"))
                want = a["bytes"]
            if got != want:
                raise ScenarioAssertionError("ledger", f"{src}->{dst} {a.get('kind', '')}: {got} bytes, expected {want}")
        elif "ops" in a:
            entries = [e for e in sim.transcript if e["entity"] == a["entity"] and e["step"] == a["step"]]
            if not entries:
                raise ScenarioAssertionError(a["step"], f"{a['entity']} never ran this step")
            want = {k: v for k, v in a["ops"].items() if v}
            for e in entries:
                if e["ops"] != want:
                    raise ScenarioAssertionError(a["step"], f"{a['entity']} measured {e['ops']}, expected {want}")
        elif "order" in a:
            names = list(a["order"])
            got = [s for s in sim.steps() if s in names]
            if got != names:
                raise ScenarioAssertionError("order", f"step order {got}, expected {names}")
        else:
            raise ValueError(f"unrecognised assertion {a!r}")
