"""Timing harness: per-task wall-clock means plus op-count snapshots."""
from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field

from . import aggsign, clpre, homopre, mabe
from .pairing import OpCounter, counting, setup_pairing

SUITES = ("agg", "clpre", "mabe", "homo")

# reference execution times (ms) of the CL-PRE testbed, reported next to ours
CLPRE_REFERENCE_MS = {
    "PKG Setup": 9.964,
    "Key Generation (Sender)": 30.317,
    "Key Generation (Receiver)": 2.311,
    "Encryption": 57.717,
    "Re-Encryption Key Generation": 45.997,
    "Re-Encryption": 0.723,
    "Decryption": 0.581,
}


class BenchConfigError(ValueError):
    pass


@dataclass
class BenchConfig:
    suite: str = "agg"
    n_values: list = field(default_factory=lambda: list(range(1, 11)))
    msg_size: int = 100
    attrs: list = field(default_factory=lambda: [2])
    repeat: int = 10
    backend: str = "curve"
    seed: int = 0

    def validate(self) -> None:
        if self.suite not in SUITES:
            raise BenchConfigError(f"unknown suite {self.suite!r}")
        if self.repeat < 1:
            raise BenchConfigError("repetitions must be at least 1")
        if not self.n_values or min(self.n_values) < 1:
            raise BenchConfigError("packet counts must be positive")
        if self.msg_size < 1:
            raise BenchConfigError("message size must be positive")
        if not self.attrs or min(self.attrs) < 1:
            raise BenchConfigError("attribute counts must be positive")


def parse_range(text: str) -> list:
    """``"7"``, ``"1..10"``, ``"1-10"`` or ``"2,4,8"`` to a list of ints."""
    try:
        out = []
        for part in text.split(","):
            part = part.strip()
            for sep in ("..", "-"):
                if sep in part:
                    lo, hi = (int(x) for x in part.split(sep, 1))
                    if hi < lo:
                        raise BenchConfigError(f"empty range {part!r}")
                    out.extend(range(lo, hi + 1))
                    break
            else:
                out.append(int(part))
    except ValueError as exc:
        if isinstance(exc, BenchConfigError):
            raise
        raise BenchConfigError(f"bad range {text!r}") from None
    return out


@dataclass
class BenchRow:
    suite: str
    point: dict
    task: str
    mean_ms: float
    stdev_ms: float
    ops: dict
    reference_ms: float | None = None

    def as_dict(self) -> dict:
        d = {"suite": self.suite, "task": self.task, **self.point,
             "mean_ms": round(self.mean_ms, 4), "stdev_ms": round(self.stdev_ms, 4)}
        if self.reference_ms is not None:
            d["reference_ms"] = self.reference_ms
        d.update(self.ops)
        return d


class _Timer:
    """Collects per-task durations and the op counts of the last repetition."""

    def __init__(self):
        self.times: dict = {}
        self.ops: dict = {}

    def run(self, task: str, fn, *args, **kw):
        with counting() as c:
            t0 = time.perf_counter()
            out = fn(*args, **kw)
            dt = (time.perf_counter() - t0) * 1000
        self.add(task, dt, c)
        return out

    def add(self, task: str, ms: float, ops: OpCounter) -> None:
        self.times.setdefault(task, []).append(ms)
        self.ops[task] = ops

    def rows(self, suite: str, point: dict, reference: dict | None = None) -> list:
        out = []
        for task, ts in self.times.items():
            sd = statistics.stdev(ts) if len(ts) > 1 else 0.0
            ref = reference.get(task) if reference else None
            out.append(BenchRow(suite, dict(point), task, statistics.fmean(ts), sd,
                                self.ops[task].as_symbols(), ref))
        return out


def _bench_agg(P, cfg: BenchConfig, rng) -> list:
    rows = []
    kp = aggsign.keygen(P, rng)
    for n in cfg.n_values:
        tm = _Timer()
        for _ in range(cfg.repeat):
            packets = [rng.randbytes(cfg.msg_size) for _ in range(n)]
            with counting() as c_sign:
                t0 = time.perf_counter()
                sigs = [aggsign.sign(P, d, kp.sk) for d in packets]
                t_sign = (time.perf_counter() - t0) * 1000
            with counting() as c_agg:
                t0 = time.perf_counter()
                agg = aggsign.aggregate(sigs)
                t_agg = (time.perf_counter() - t0) * 1000
            # aggregate signing is the plain signing pass plus the product step
            tm.add("sign-bls", t_sign, c_sign)
            tm.add("sign-aggregate", t_sign + t_agg, c_sign + c_agg)
            ok_a = tm.run("verify-aggregate", aggsign.verify_aggregate, P, packets, agg, kp.pk)
            ok_b = tm.run("verify-bls", lambda: all([aggsign.verify_single(P, d, s, kp.pk)
                                                     for d, s in zip(packets, sigs)]))
            if not (ok_a and ok_b):
                raise AssertionError("honest frame failed to verify")
        rows += tm.rows("agg", {"n": n, "msg_size": cfg.msg_size})
    return rows


def _bench_clpre(P, cfg: BenchConfig, rng) -> list:
    tm = _Timer()
    for _ in range(cfg.repeat):
        pkg = tm.run("PKG Setup", clpre.pkg_setup, P, rng)
        ps = clpre.extract_partial_key(pkg, b"sender")
        pr = clpre.extract_partial_key(pkg, b"receiver")
        s = tm.run("Key Generation (Sender)", clpre.user_keygen, P, ps, b"sender", pkg.mpk, True, rng)
        r = tm.run("Key Generation (Receiver)", clpre.user_keygen, P, pr, b"receiver", pkg.mpk, False, rng)
        m = P.random_gt(rng)
        ct = tm.run("Encryption", clpre.encrypt, P, m, s, rng)
        rk = tm.run("Re-Encryption Key Generation", clpre.rekeygen, P, s, r.public_key(), rng)
        rct = tm.run("Re-Encryption", clpre.reencrypt, P, ct, rk)
        if tm.run("Decryption", clpre.decrypt, P, rct, r) != m:
            raise AssertionError("CL-PRE round trip failed")
    return tm.rows("clpre", {}, CLPRE_REFERENCE_MS)


def _bench_mabe(P, cfg: BenchConfig, rng) -> list:
    rows = []
    for x in cfg.attrs:
        attrs = [f"attr{i}" for i in range(x)]
        directory = mabe.AttributeDirectory()
        auth = mabe.authority_setup(P, attrs, rng, "AA", directory)
        uk = mabe.keygen_user(P, auth, b"A2", attrs)
        policy = " AND ".join(attrs)
        tm = _Timer()
        for _ in range(cfg.repeat):
            d = P.random_gt(rng)
            ict, st = tm.run("intermediate-encryption", mabe.intermediate_encrypt, P, attrs, directory, rng)
            ct = tm.run("full-encrypt", mabe.full_encrypt, P, d, ict, st, policy, rng)
            tk, r = tm.run("key-transform", mabe.transform_key, P, uk, rng)
            pct = tm.run("partial-decrypt", mabe.partial_decrypt, P, ct, tk)
            if tm.run("full-decrypt", mabe.full_decrypt, P, pct, r) != d:
                raise AssertionError("MABE round trip failed")
        rows += tm.rows("mabe", {"attrs": x})
    return rows


def _bench_homo(P, cfg: BenchConfig, rng) -> list:
    tm = _Timer()
    for _ in range(cfg.repeat):
        k1 = tm.run("key-generation", homopre.keygen, P, rng)
        k2 = homopre.keygen(P, rng)
        m1, m2, m3 = (P.random_gt(rng) for _ in range(3))
        ct = tm.run("encryption", homopre.encrypt, P, m1, k1.public, homopre.SECOND, rng)
        ct2 = homopre.encrypt(P, m2, k1.public, homopre.SECOND, rng)
        res = tm.run("computation-on-encrypted", homopre.eval_mul, P, ct, ct2, k1.public, rng=rng)
        rk = tm.run("rekey-generation", homopre.rekeygen, P, k1.sk, k2.pk2)
        res1 = tm.run("re-encryption", homopre.reencrypt, P, res, rk, k2.public)
        ct3 = homopre.encrypt(P, m3, k2.public, homopre.FIRST, rng)
        res2 = tm.run("computation-on-transformed", homopre.eval_mul, P, res1, ct3, k2.public, rng=rng)
        if tm.run("decryption", homopre.decrypt, P, res2, k2.sk) != m1 * m2 * m3:
            raise AssertionError("homomorphic pipeline failed")
    return tm.rows("homo", {})


_RUNNERS = {"agg": _bench_agg, "clpre": _bench_clpre, "mabe": _bench_mabe, "homo": _bench_homo}


def run_bench(cfg: BenchConfig, params=None) -> list:
    cfg.validate()
    P = params or setup_pairing(cfg.backend)
    return _RUNNERS[cfg.suite](P, cfg, random.Random(cfg.seed))
