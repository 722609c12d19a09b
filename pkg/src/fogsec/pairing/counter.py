"""Operation counting for the T_P/T_E/T_M/T_H/T_D/T_S cost alphabet."""
from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, fields

CATEGORIES = ("pairings", "exponentiations", "multiplications", "hashes", "divisions", "subtractions")
SYMBOLS = {
    "pairings": "T_P",
    "exponentiations": "T_E",
    "multiplications": "T_M",
    "hashes": "T_H",
    "divisions": "T_D",
    "subtractions": "T_S",
}

_active: ContextVar[tuple] = ContextVar("fogsec_active_counters", default=())


@dataclass
class OpCounter:
    pairings: int = 0
    exponentiations: int = 0
    multiplications: int = 0
    hashes: int = 0
    divisions: int = 0
    subtractions: int = 0

    def __add__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(*(getattr(self, f) + getattr(other, f) for f in CATEGORIES))

    def __sub__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(*(getattr(self, f) - getattr(other, f) for f in CATEGORIES))

    def merge(self, other: "OpCounter") -> None:
        for f in CATEGORIES:
            setattr(self, f, getattr(self, f) + getattr(other, f))

    def copy(self) -> "OpCounter":
        return OpCounter(*self.as_tuple())

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def as_symbols(self) -> dict:
        """Counts keyed by the cost-model symbols (``T_P`` ...)."""
        return {SYMBOLS[f]: getattr(self, f) for f in CATEGORIES}

    @classmethod
    def from_symbols(cls, counts: dict) -> "OpCounter":
        rev = {v: k for k, v in SYMBOLS.items()}
        return cls(**{rev[k]: v for k, v in counts.items()})

    def __str__(self) -> str:
        parts = [f"{v}{k}" for k, v in self.as_symbols().items() if v]
        return " + ".join(parts) or "0"

    @contextmanager
    def session(self):
        """Count every operation executed inside the block into this counter."""
        with counting(self):
            yield self


@contextmanager
def counting(counter: OpCounter | None = None):
    """Activate ``counter`` (a fresh one by default) for the enclosed block.

    Sessions nest: an operation is charged to every active counter, so a
    per-task counter can sit inside a per-entity one.
    """
    counter = OpCounter() if counter is None else counter
    token = _active.set(_active.get() + (counter,))
    try:
        yield counter
    finally:
        _active.reset(token)


@contextmanager
def uncounted():
    """Suspend all counting, e.g. for sampling random group elements."""
    token = _active.set(())
    try:
        yield
    finally:
        _active.reset(token)


def tick(category: str, k: int = 1) -> None:
    for c in _active.get():
        setattr(c, category, getattr(c, category) + k)
