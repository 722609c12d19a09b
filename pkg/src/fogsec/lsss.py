"""Monotone boolean policies compiled to LSSS access matrices.

Conversion follows Lewko-Waters: the root carries ``(1)``; an OR gate passes
its vector to both children; an AND gate with vector ``v`` gives the left
child ``v|0..0|1`` and the right child ``0..0|-1``, opening a new column.
"""
from __future__ import annotations

import json
import re
import secrets
from dataclasses import dataclass
from typing import Iterable

import gmpy2


class PolicyError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Gate:
    op: str  # "AND" | "OR"
    left: object
    right: object

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


Policy = Leaf | Gate

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([A-Za-z0-9_.:@-]+))")


def parse_policy(text: str) -> Policy:
    """Parse ``A AND (B OR C)``.  AND binds tighter than OR."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolicyError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    if not tokens:
        raise PolicyError("empty policy")
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def parse_or():
        node = parse_and()
        while peek() is not None and peek().upper() == "OR":
            take()
            node = Gate("OR", node, parse_and())
        return node

    def parse_and():
        node = parse_atom()
        while peek() is not None and peek().upper() == "AND":
            take()
            node = Gate("AND", node, parse_atom())
        return node

    def parse_atom():
        tok = peek()
        if tok is None:
            raise PolicyError("policy ends unexpectedly")
        if tok.upper() == "NOT":
            raise PolicyError("negation is not allowed in a monotone policy")
        if tok == "(":
            take()
            node = parse_or()
            if peek() != ")":
                raise PolicyError("unbalanced parentheses")
            take()
            return node
        if tok == ")" or tok.upper() in ("AND", "OR"):
            raise PolicyError(f"unexpected token {tok!r}")
        return Leaf(take())

    node = parse_or()
    if i != len(tokens):
        raise PolicyError(f"trailing tokens: {tokens[i:]}")
    return node


def as_policy(policy) -> Policy:
    if isinstance(policy, (Leaf, Gate)):
        return policy
    if isinstance(policy, str):
        return parse_policy(policy)
    raise PolicyError(f"not a policy: {policy!r}")


def leaves(policy) -> list:
    policy = as_policy(policy)
    if isinstance(policy, Leaf):
        return [policy.name]
    return leaves(policy.left) + leaves(policy.right)


def evaluate(policy, attrs: Iterable[str]) -> bool:
    policy = as_policy(policy)
    attrs = set(attrs)
    if isinstance(policy, Leaf):
        return policy.name in attrs
    if policy.op == "AND":
        return evaluate(policy.left, attrs) and evaluate(policy.right, attrs)
    return evaluate(policy.left, attrs) or evaluate(policy.right, attrs)


@dataclass(frozen=True)
class AccessStructure:
    matrix: tuple  # l rows of m integer entries
    rho: tuple  # row index -> attribute name
    policy_text: str = ""

    @property
    def l(self) -> int:
        return len(self.matrix)

    @property
    def m(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def to_json(self) -> str:
        return json.dumps({"matrix": [list(r) for r in self.matrix], "rho": list(self.rho),
                           "policy": self.policy_text}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "AccessStructure":
        d = json.loads(text)
        return cls(tuple(tuple(r) for r in d["matrix"]), tuple(d["rho"]), d.get("policy", ""))


def compile_policy(policy) -> AccessStructure:
    policy = as_policy(policy)
    rows, rho = [], []
    width = 1

    def walk(node, vec):
        nonlocal width
        if isinstance(node, Leaf):
            rows.append(vec)
            rho.append(node.name)
        elif node.op == "OR":
            walk(node.left, vec)
            walk(node.right, vec)
        elif node.op == "AND":
            left = vec + [0] * (width - len(vec)) + [1]
            right = [0] * width + [-1]
            width += 1
            walk(node.left, left)
            walk(node.right, right)
        else:
            raise PolicyError(f"unsupported gate {node.op!r}")

    walk(policy, [1])
    matrix = tuple(tuple(r + [0] * (width - len(r))) for r in rows)
    return AccessStructure(matrix, tuple(rho), str(policy))


def satisfy(structure: AccessStructure, attrs: Iterable[str], q: int) -> dict | None:
    """Coefficients ``{row: c_x}`` with ``sum c_x A_x = (1, 0, ..., 0)`` mod q.

    Only rows whose attribute is in ``attrs`` are eligible.  Gaussian
    elimination pivots on the lowest eligible row index first and sets free
    coefficients to zero, so the answer is deterministic.  Returns ``None``
    when the target vector is outside the span.
    """
    attrs = set(attrs)
    cols = [i for i, a in enumerate(structure.rho) if a in attrs]
    if not cols:
        return None
    m = structure.m
    # augmented system: m equations, one unknown per eligible row
    aug = [[structure.matrix[c][j] % q for c in cols] + [1 if j == 0 else 0] for j in range(m)]
    pivots = []
    r = 0
    for k in range(len(cols)):
        piv = next((i for i in range(r, m) if aug[i][k]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = int(gmpy2.invert(aug[r][k], q))
        aug[r] = [v * inv % q for v in aug[r]]
        for i in range(m):
            if i != r and aug[i][k]:
                f = aug[i][k]
                aug[i] = [(a - f * b) % q for a, b in zip(aug[i], aug[r])]
        pivots.append(k)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][-1]:
            return None
    coeffs = {}
    for row_i, k in enumerate(pivots):
        if aug[row_i][-1]:
            coeffs[cols[k]] = aug[row_i][-1]
    return coeffs


def share(structure: AccessStructure, s: int, q: int, rng=None, zero_target: bool = False,
          v: list | None = None) -> list:
    """Shares ``A_x . v`` of ``v = (s, v2, ..., vm)``; ``v1 = 0`` if ``zero_target``."""
    if v is None:
        rng = rng or secrets.SystemRandom()
        v = [0 if zero_target else s % q] + [rng.randrange(q) for _ in range(structure.m - 1)]
    return [sum(a * b for a, b in zip(row, v)) % q for row in structure.matrix]


def reconstruct(coeffs: dict, shares: list, q: int) -> int:
    return sum(c * shares[x] for x, c in coeffs.items()) % q
