import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgkit.field import field_of_order
from pgkit.geometry import direct_sum, free_matroid, pg, uniform_matroid
from pgkit.matroid import LinearMatroid, point_masks
from pgkit.roundness import (
    dense_round_restriction,
    exact_cover,
    fib_lucas,
    phi_bound_holds,
    phi_scaled_at_least,
    weakly_round,
    weakly_round_bruteforce,
)

from test_matroid import small_corpus

PHI = (1 + math.sqrt(5)) / 2


def u23_plus_coloop():
    gf2 = field_of_order(2)
    line = LinearMatroid(gf2, 2, {0: (1, 0), 1: (0, 1), 2: (1, 1)})  # U_{2,3}
    return direct_sum(line, free_matroid(gf2, 1))


def test_fib_lucas():
    assert [fib_lucas(n) for n in range(6)] == [(0, 2), (1, 1), (1, 3), (2, 4), (3, 7), (5, 11)]


@given(st.integers(-200, 200), st.integers(0, 12), st.integers(-2000, 2000))
def test_phi_comparison_matches_floats_away_from_ties(a, s, b):
    value = a * PHI**s - b
    if abs(value) > 1e-6:
        assert phi_scaled_at_least(a, s, b) == (value > 0)


def test_phi_comparison_rejects_negative_exponent():
    with pytest.raises(ValueError):
        phi_scaled_at_least(1, -1, 1)


def test_low_rank_is_round(gf2):
    assert weakly_round(free_matroid(gf2, 2)).kind == "bound-holds"
    assert weakly_round(uniform_matroid(2, 5, gf2)).kind == "bound-holds"


def test_coloop_sum_is_not_round():
    M = u23_plus_coloop()
    v = weakly_round(M)
    assert v.kind == "refuted"
    A, B = v.witness["A"], v.witness["B"]
    assert A == [3] and B == [0, 1, 2]
    assert M.rank(A) == 1 and M.rank(B) == 2


def test_fano_is_round(fano):
    assert weakly_round(fano.handle).kind == "bound-holds"
    assert weakly_round_bruteforce(fano.handle)


@pytest.mark.parametrize("name,M", list(small_corpus(10)))
def test_weakly_round_matches_double_loop(name, M):
    v = weakly_round(M)
    assert (v.kind != "refuted") == weakly_round_bruteforce(M)
    if v.kind == "refuted":
        E = set(M.ground)
        A, B = set(v.witness["A"]), set(v.witness["B"])
        assert A | B == E
        assert M.rank(A) <= M.r - 2 and M.rank(B) <= M.r - 1
        Am, Bm = exact_cover(M, M.mask(A), M.mask(B))
        assert M._r(Am) == M.r - 2 and M._r(Bm) == M.r - 1 and Am | Bm == M.ground_mask


def test_dense_round_restriction_examples(fano):
    assert dense_round_restriction(fano.handle)[0] is fano.handle
    M = u23_plus_coloop()
    N, trace = dense_round_restriction(M)
    assert list(N.ground) == [0, 1, 2] and trace[0]["kept"] == "B"
    assert phi_bound_holds(M, N)
    S = direct_sum(fano.handle, fano.handle)
    N, trace = dense_round_restriction(S)
    assert N.r == 3 and len(point_masks(N)) == 7
    assert phi_bound_holds(S, N)
    assert weakly_round(N).kind == "bound-holds"


@pytest.mark.parametrize("name,M", list(small_corpus(14)))
def test_dense_round_restriction_bound(name, M):
    N, _ = dense_round_restriction(M)
    assert weakly_round(N).kind == "bound-holds"
    assert phi_bound_holds(M, N)
    assert set(N.ground) <= set(M.ground)


def test_pg_is_round(gf2):
    assert weakly_round(pg(4, gf2).handle).kind == "bound-holds"
