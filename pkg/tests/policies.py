"""Random monotone policy generation shared by the LSSS and ABE tests."""
import itertools

from hypothesis import strategies as st

from fogsec.lsss import Gate, Leaf


def random_policy(rng, n_leaves: int, pool):
    if n_leaves == 1:
        return Leaf(rng.choice(pool))
    k = rng.randint(1, n_leaves - 1)
    return Gate(rng.choice(["AND", "OR"]), random_policy(rng, k, pool), random_policy(rng, n_leaves - k, pool))


def policies(max_leaves: int, pool):
    leaf = st.sampled_from(pool).map(Leaf)
    return st.recursive(
        leaf,
        lambda kids: st.tuples(st.sampled_from(["AND", "OR"]), kids, kids).map(lambda t: Gate(*t)),
        max_leaves=max_leaves,
    ).filter(lambda p: _count(p) <= max_leaves)


def _count(p):
    return 1 if isinstance(p, Leaf) else _count(p.left) + _count(p.right)


def subsets(pool):
    for r in range(len(pool) + 1):
        yield from (set(c) for c in itertools.combinations(pool, r))


def all_shapes(n_leaves: int):
    """Every binary AND/OR tree shape with ``n_leaves`` placeholder leaves."""
    if n_leaves == 1:
        yield "_"
        return
    for k in range(1, n_leaves):
        for left in all_shapes(k):
            for right in all_shapes(n_leaves - k):
                for op in ("AND", "OR"):
                    yield (op, left, right)


def fill(shape, names):
    it = iter(names)

    def go(s):
        if s == "_":
            return Leaf(next(it))
        return Gate(s[0], go(s[1]), go(s[2]))

    return go(shape)
