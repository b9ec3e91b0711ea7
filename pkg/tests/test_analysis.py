import pytest

from pgkit.analysis import (
    Fullness,
    FullnessParams,
    GrowthRateOracle,
    critical_dichotomy_check,
    critical_elements,
    fullness,
    has_line_restriction,
    kung_bound_check,
    line_minor,
    lines_through,
    long_line_checks,
    matching_bound,
    pg_points,
    replay_line_witness,
)
from pgkit.errors import NotOverfull, PreconditionFailed
from pgkit.field import field_of_order
from pgkit.geometry import free_matroid, pg, principal_extension, truncate, uniform_matroid
from pgkit.harness import line_minor_bruteforce
from pgkit.matroid import LinearMatroid, closure, epsilon

from test_matroid import small_corpus


def brute_critical(M, params):
    t = params.threshold(M.r - 1)
    return [e for e in M.ground if epsilon(M.contract([e])) <= t]


# -- formulas ---------------------------------------------------------------------------


def test_formulas():
    assert pg_points(2, 4) == 15 and pg_points(3, 3) == 13
    assert matching_bound(2, 1) == 1 and matching_bound(2, 2) == 5 and matching_bound(3, 2) == 10
    o = GrowthRateOracle(2, 1)
    assert (o.h(3), o.truncation(3), o.gap()) == (13, 15, 2)
    assert GrowthRateOracle(2, 0).h(4) == 15
    assert GrowthRateOracle(3, 0).h(3) == 13
    for q in (2, 3, 4, 5):
        for k in range(4):
            o = GrowthRateOracle(q, k)
            for n in range(1, 6):
                assert o.truncation(n) - o.h(n) == q * (q ** (2 * k) - 1) // (q * q - 1)


# -- line minors --------------------------------------------------------------------------


def test_line_minor_examples(fano, pg32, gf2):
    assert line_minor(fano.handle, 4).kind == "refuted"
    assert line_minor(fano.handle, 3).kind == "minor-found"
    M, e = principal_extension(pg32.handle, closure(pg32.handle, [0, 1]))
    v = line_minor(M.contract([e]), 5)
    assert v.kind == "minor-found"
    assert replay_line_witness(M.contract([e]), v.witness) >= 5
    assert line_minor(free_matroid(gf2, 1), 2).kind == "refuted"


@pytest.mark.parametrize("name,M", list(small_corpus(10)))
def test_line_minor_matches_bruteforce(name, M):
    best = line_minor_bruteforce(M)
    for m in range(2, max(best, 2) + 2):
        v = line_minor(M, m)
        assert (v.kind == "minor-found") == (m <= best), (m, best)
        if v.kind == "minor-found":
            assert replay_line_witness(M, v.witness) >= m


def test_has_line_restriction():
    R = pg(3, field_of_order(3))
    assert has_line_restriction(R.handle, 4).kind == "witness"
    assert has_line_restriction(R.handle, 5).kind == "refuted"


def test_singleproj_instance_has_five_point_line(pg32):
    M, e = principal_extension(pg32.handle, closure(pg32.handle, [0, 1]))
    assert has_line_restriction(M.contract([e]), 5).kind == "witness"


def test_lines_through_count(fano):
    lines = lines_through(fano.handle, 0)
    assert len(lines) == 3 and all(c == 3 for _, c in lines)


# -- Kung's bound ----------------------------------------------------------------------------


def test_kung_examples(gf2, fano, pg32):
    v = kung_bound_check(fano.handle, 2)
    assert v.kind == "bound-holds" and v.witness["eps"] == v.witness["bound"] == 7 and v.witness["tight"]
    assert kung_bound_check(free_matroid(gf2, 1), 2).witness["bound"] == 1
    T = truncate(pg32.handle, 1)
    # Contracting a point of the rank-3 truncation leaves a 7-point line, so
    # T has a U_{2,6}-minor and lies outside the class the bound is about.
    with pytest.raises(PreconditionFailed):
        kung_bound_check(T, 4)
    v = kung_bound_check(T, 6)
    assert v.kind == "bound-holds" and v.witness["eps"] == 15 and v.witness["bound"] == 43


def test_kung_refutes_when_membership_is_assumed():
    U = uniform_matroid(2, 6, field_of_order(2))
    assert kung_bound_check(U, 3, assume_member=True).kind == "refuted"


# -- fullness ----------------------------------------------------------------------------------


def test_fullness_examples(gf2, fano, pg32):
    assert fullness(fano.handle, FullnessParams(2, 0)) is Fullness.FULL
    assert FullnessParams(2, 1).threshold(3) == 13
    assert fullness(truncate(pg32.handle, 1), FullnessParams(2, 1)) is Fullness.OVERFULL
    empty = LinearMatroid(gf2, 0, {})
    assert fullness(empty, FullnessParams(2, 0)) is Fullness.FULL
    assert fullness(uniform_matroid(2, 2, gf2), FullnessParams(2, 0)) is Fullness.UNDERFULL


# -- critical elements ---------------------------------------------------------------------------


def test_truncation_has_no_critical_elements(pg32):
    T = truncate(pg32.handle, 1)
    for k in (0, 1):
        params = FullnessParams(2, k)
        assert critical_elements(T, params) == brute_critical(T, params) == []


def test_critical_points_on_a_long_line(fano):
    L = closure(fano.handle, [0, 1])
    M, e = principal_extension(fano.handle, L)
    params = FullnessParams(2, 0)
    assert critical_elements(M, params) == brute_critical(M, params) == L.sorted()
    for x in L.sorted():
        v = critical_dichotomy_check(M, params, x)
        assert v.kind == "bound-holds" and v.witness["outcome"] == "many-lines"
        assert len(v.witness["medium_lines"]) == 1


def test_critical_requires_overfull(fano):
    with pytest.raises(NotOverfull):
        critical_elements(fano.handle, FullnessParams(2, 0))
    with pytest.raises(PreconditionFailed):
        critical_dichotomy_check(fano.handle, FullnessParams(2, 0), 0)


def test_dichotomy_rejects_non_critical(pg32):
    T = truncate(pg32.handle, 1)
    with pytest.raises(PreconditionFailed):
        critical_dichotomy_check(T, FullnessParams(2, 1), 0)


@pytest.mark.parametrize("name,M", list(small_corpus(12))[:80])
def test_critical_matches_bruteforce(name, M):
    for q, k in ((2, 0), (2, 1), (3, 0)):
        params = FullnessParams(q, k)
        if fullness(M, params) is Fullness.OVERFULL:
            assert critical_elements(M, params) == brute_critical(M, params)


# -- long lines -----------------------------------------------------------------------------------


def _long_line_instance(extra_on_line, free_point):
    """PG(6,2) with ``extra_on_line`` points added freely on one line, plus
    optionally one point placed freely on the whole ground set."""
    R = pg(7, field_of_order(2), max_rank=10)
    M = R.handle
    L = closure(M, [0, 1]).sorted()
    for _ in range(extra_on_line):
        M, e = principal_extension(M, closure(M, L))
        L = L + [e]
    if free_point:
        M, _ = principal_extension(M, M.ground)
    return M, R


def test_long_line_forces_minor():
    M, R = _long_line_instance(3, True)
    v = long_line_checks(M, R, FullnessParams(2, 1))
    assert v.witness["longlinewin"]["applicable"]
    assert v.kind == "minor-found"
    found = v.witness["longlinewin"]["verdict"]["witness"]
    assert found["points"] >= 7


def test_short_lines_are_vacuous():
    M, R = _long_line_instance(2, True)
    v = long_line_checks(M, R, FullnessParams(2, 1))
    assert v.kind == "bound-holds" and v.witness["vacuous"]


def test_long_line_rank_precondition(fano):
    with pytest.raises(PreconditionFailed):
        long_line_checks(fano.handle, fano, FullnessParams(2, 1))


def test_loops_are_never_critical(gf2, fano):
    """Contracting a loop keeps rank and point count, so an overfull matroid stays overfull."""
    M = LinearMatroid(gf2, 3, {**{i: v for i, v in enumerate(fano.points)}, 7: (0, 0, 0), 8: (1, 0, 0)})
    params = FullnessParams(2, 0)
    assert fullness(M, params) is Fullness.FULL
    N, e = principal_extension(M, closure(M, [0, 1]))
    assert fullness(N, params) is Fullness.OVERFULL
    crit = critical_elements(N, params)
    assert 7 not in crit and crit == brute_critical(N, params)
