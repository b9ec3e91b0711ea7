"""Shared fixtures and brute-force oracles.

The oracles below deliberately avoid the package's rank machinery: ranks of
column sets come from counting the vectors in their span.
"""

import itertools

import pytest

from pgkit.field import field_of_order
from pgkit.geometry import pg
from pgkit.matroid import LinearMatroid


def span_size_rank(spec, vectors) -> int:
    """Rank over GF(q) as log_q of the number of distinct linear combinations."""
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return 0
    n = len(vectors[0])
    add, mul = spec.add_table, spec.mul_table
    span = {(0,) * n}
    for v in vectors:
        new = set(span)
        for c in range(1, spec.q):
            cv = tuple(mul[c][x] for x in v)
            for s in span:
                new.add(tuple(add[a][b] for a, b in zip(s, cv)))
        span = new
    r = 0
    while spec.q**r < len(span):
        r += 1
    assert spec.q**r == len(span)
    return r


def brute_rank(M: LinearMatroid, X) -> int:
    return span_size_rank(M.spec, [M.columns[x] for x in X])


def brute_points(M, X=None) -> int:
    """Parallel classes among non-loops, from pairwise rank tests."""
    X = list(M.ground if X is None else X)
    reps = []
    for x in X:
        if M.rank([x]) == 0:
            continue
        if not any(M.rank([x, y]) == 1 for y in reps):
            reps.append(x)
    return len(reps)


def brute_closure(M, X) -> set:
    rX = M.rank(X)
    return {y for y in M.ground if M.rank(list(X) + [y]) == rX}


def subsets(items):
    items = list(items)
    for k in range(len(items) + 1):
        yield from itertools.combinations(items, k)


@pytest.fixture(scope="session")
def gf2():
    return field_of_order(2)


@pytest.fixture(scope="session")
def gf3():
    return field_of_order(3)


@pytest.fixture(scope="session")
def fano(gf2):
    return pg(3, gf2)


@pytest.fixture(scope="session")
def pg32(gf2):
    return pg(4, gf2)


@pytest.fixture(scope="session")
def pg42(gf2):
    return pg(5, gf2)
