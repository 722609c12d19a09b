"""Closed-form overhead formulas, evaluated and diffed against measurements.

The formulas live in ``formulas.json`` as coefficient tables: every count or
byte expression maps monomials over the parameters ``n``, ``x``, ``l``, ``m``
(|m|) and ``req`` (|Req_msg|) to integer coefficients, e.g. ``n|m| + 96`` is
``{"n*m": 1, "1": 96}``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources

from ..pairing import SYMBOLS, OpCounter

CATEGORY_SYMBOLS = tuple(SYMBOLS.values())
TABLES = ("II", "III", "IV", "V")


class CostModelError(Exception):
    pass


class MissingParameterError(CostModelError, KeyError):
    pass


class UnknownTaskError(CostModelError, KeyError):
    pass


@lru_cache(maxsize=None)
def _load(name: str) -> dict:
    return json.loads(resources.files(__package__).joinpath(name).read_text())


def formulas() -> dict:
    return _load("formulas.json")


def annotations() -> dict:
    return _load("annotations.json")


def convention() -> str:
    return formulas()["convention"]


def task_spec(table: str, task: str) -> dict:
    try:
        return formulas()["tables"][table]["tasks"][task]
    except KeyError:
        raise UnknownTaskError(f"no task {task!r} in table {table!r}") from None


def tasks(table: str) -> list:
    return list(formulas()["tables"][table]["tasks"])


def _eval_poly(poly: dict, params: dict) -> int:
    total = 0
    for mono, coef in poly.items():
        term = coef
        if mono != "1":
            for sym in mono.split("*"):
                if sym not in params:
                    raise MissingParameterError(f"formula needs parameter {sym!r}")
                term *= params[sym]
        total += term
    return total


@dataclass
class FormulaValue:
    counts: OpCounter | None
    bytes: int | None


def eval_formula(table: str, task: str, params: dict | None = None) -> FormulaValue:
    """Evaluate the printed cell(s) for ``task`` at concrete parameters."""
    params = params or {}
    spec = task_spec(table, task)
    counts = None
    if "ops" in spec:
        values = {sym: _eval_poly(poly, params) for sym, poly in spec["ops"].items()}
        counts = OpCounter.from_symbols(values)
        if any(v < 0 for v in counts.as_tuple()):
            raise CostModelError(f"negative count for {table}/{task} at {params}")
    nbytes = _eval_poly(spec["bytes"], params) if "bytes" in spec else None
    return FormulaValue(counts, nbytes)


@dataclass
class Measurement:
    table: str
    task: str
    params: dict
    counts: OpCounter | None = None
    bytes: int | None = None


@dataclass
class TaskComparison:
    table: str
    task: str
    params: dict
    exact: bool
    formula_counts: dict | None
    measured_counts: dict | None
    delta: dict
    formula_bytes: int | None
    measured_bytes: int | None
    byte_delta: int | None
    annotations: list = field(default_factory=list)
    status: str = "match"

    @property
    def zero_delta(self) -> bool:
        return not any(self.delta.values()) and not self.byte_delta


@dataclass
class ComparisonReport:
    convention: str
    rows: list

    def by_task(self, table: str, task: str) -> TaskComparison:
        for r in self.rows:
            if (r.table, r.task) == (table, task):
                return r
        raise UnknownTaskError(f"{table}/{task} not in report")

    @property
    def ok(self) -> bool:
        return all(r.status in ("match", "annotated") for r in self.rows)

    def to_json(self) -> str:
        return json.dumps({"convention": self.convention, "rows": [asdict(r) for r in self.rows]}, indent=2)

    def to_text(self) -> str:
        lines = [f"counting convention: {self.convention}", ""]
        head = f"{'table':<5} {'task':<27} {'formula':<30} {'measured':<30} {'delta':<24} {'bytes p/m':<12} status"
        lines.append(head)
        lines.append("-" * len(head))
        for r in self.rows:
            p = _fmt_counts(r.formula_counts)
            m = _fmt_counts(r.measured_counts)
            d = _fmt_counts(r.delta, signed=True) if any(r.delta.values()) else "0"
            b = "" if r.formula_bytes is None else f"{r.formula_bytes}/{r.measured_bytes}"
            status = r.status + (f" [{', '.join(r.annotations)}]" if r.annotations else "")
            lines.append(f"{r.table:<5} {r.task:<27} {p:<30} {m:<30} {d:<24} {b:<12} {status}")
        return "\n".join(lines)


def _fmt_counts(counts: dict | None, signed: bool = False) -> str:
    if counts is None:
        return "-"
    parts = []
    for sym in CATEGORY_SYMBOLS:
        v = counts.get(sym, 0)
        if v:
            parts.append(f"{v:+d}{sym}" if signed else f"{v}{sym}")
    return "+".join(parts).replace("++", "+").replace("+-", "-") or "0"


def _annotations_for(table: str, task: str) -> dict:
    out = {}
    for aid, ann in annotations().items():
        ann_tasks = ann["task"] if isinstance(ann["task"], list) else [ann["task"]]
        if ann["table"] == table and task in ann_tasks:
            out[aid] = ann
    return out


def compare(measurements: list) -> ComparisonReport:
    """Diff measured counts/bytes against the formulas.

    A non-zero delta is ``annotated`` when every differing category is
    covered by an entry of the errata registry; otherwise ``unexplained``.
    Tasks flagged exact must match with zero delta.
    """
    rows = []
    for ms in measurements:
        spec = task_spec(ms.table, ms.task)
        ref = eval_formula(ms.table, ms.task, ms.params)
        delta = {}
        pc = mc = None
        if ref.counts is not None and ms.counts is not None:
            pc, mc = ref.counts.as_symbols(), ms.counts.as_symbols()
            delta = {k: mc[k] - pc[k] for k in CATEGORY_SYMBOLS}
        bdelta = None
        if ref.bytes is not None and ms.bytes is not None:
            bdelta = ms.bytes - ref.bytes
        differing = {k for k, v in delta.items() if v}
        if bdelta:
            differing.add("bytes")
        anns = _annotations_for(ms.table, ms.task)
        covered = set()
        used = []
        for aid, ann in anns.items():
            hit = differing & set(ann["categories"])
            if hit:
                covered |= hit
                used.append(aid)
        exact = bool(spec.get("exact", False))
        if not differing:
            status = "match"
        elif exact:
            status = "mismatch"
        elif differing <= covered:
            status = "annotated"
        else:
            status = "unexplained"
        rows.append(TaskComparison(ms.table, ms.task, dict(ms.params), exact, pc, mc, delta,
                                   ref.bytes, ms.bytes, bdelta, used, status))
    return ComparisonReport(convention(), rows)
