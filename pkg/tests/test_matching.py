import itertools
import random
from fractions import Fraction

import pytest

from conftest import brute_points
from pgkit.analysis import FullnessParams, has_line_restriction
from pgkit.errors import PreconditionFailed, StructureViolation
from pgkit.geometry import pg, principal_extension, quadratic_placements
from pgkit.matching import (
    contract_unstable_check,
    find_matching,
    find_unstable,
    is_unstable,
    matching_obstruction,
    skew_dense_subset,
    spanning_lines,
)
from pgkit.matroid import all_flats, closure, flats_of_rank


def coordinate_line(R, i, j):
    pts = R.points
    unit = [pts.index(tuple(int(a == b) for a in range(R.n))) for b in range(R.n)]
    return closure(R.handle, [unit[i], unit[j]])


def brute_max_matching(R, lines):
    for k in range(len(lines), 0, -1):
        for combo in itertools.combinations(lines, k):
            if R.handle.rank(sorted(set().union(*[set(L.sorted()) for L in combo]))) == 2 * k:
                return k
    return 0


def placements(R, lines):
    M = R.handle
    xs = []
    for L in lines:
        M, e = principal_extension(M, L)
        xs.append(e)
    return M, xs


# -- matchings ----------------------------------------------------------------------------------


def test_matching_examples(gf2, pg32):
    lines = flats_of_rank(pg32.handle, 2)
    v = find_matching(pg32, lines, 2)
    assert v.kind == "witness" and len(v.witness["lines"]) == 2
    assert pg32.handle.rank(v.witness["lines"][0] + v.witness["lines"][1]) == 4
    assert find_matching(pg32, lines, 3).kind == "refuted"
    R = pg(6, gf2)
    three = [coordinate_line(R, 0, 1), coordinate_line(R, 2, 3), coordinate_line(R, 4, 5), coordinate_line(R, 0, 2)]
    assert find_matching(R, three, 3).kind == "witness"


def test_matching_rejects_non_lines(fano):
    with pytest.raises(PreconditionFailed):
        find_matching(fano, [[0]], 1)


@pytest.mark.parametrize("seed", range(25))
def test_matching_maximum_matches_bruteforce(seed, pg42):
    rng = random.Random(seed)
    lines = rng.sample(flats_of_rank(pg42.handle, 2), rng.randint(1, 9))
    best = brute_max_matching(pg42, lines)
    assert find_matching(pg42, lines, best).kind == "witness"
    v = find_matching(pg42, lines, best + 1)
    assert v.kind == "refuted"
    if "maximum" in v.witness:
        assert v.witness["maximum"] == best


# -- unstable sets -----------------------------------------------------------------------------------


def test_unstable_on_skew_lines(pg42):
    M, xs = placements(pg42, [coordinate_line(pg42, 0, 1), coordinate_line(pg42, 2, 3)])
    v = find_unstable(M, pg42, 2)
    assert v.kind == "witness" and sorted(v.witness["X"]) == xs
    assert is_unstable(M, pg42, xs)


def test_unstable_on_meeting_lines(pg42):
    M, xs = placements(pg42, [coordinate_line(pg42, 0, 1), coordinate_line(pg42, 1, 2)])
    assert find_unstable(M, pg42, 2).kind == "refuted"
    assert find_unstable(M, pg42, 1).kind == "witness"
    assert not is_unstable(M, pg42, xs)


def test_unstable_empty(pg42):
    v = find_unstable(pg42.handle, pg42, 0)
    assert v.kind == "witness" and v.witness["X"] == []


def test_spanning_lines_need_lines(pg32):
    M, e = principal_extension(pg32.handle, pg32.handle.ground)
    with pytest.raises(StructureViolation):
        spanning_lines(M, pg32)


# -- contraction of unstable sets -----------------------------------------------------------------------


def test_free_skew_placements_leave_the_class(pg42):
    M, xs = placements(pg42, [coordinate_line(pg42, 0, 1), coordinate_line(pg42, 2, 3)])
    # Free placements create a line minor with more than q^2 + q points.
    with pytest.raises(PreconditionFailed, match="U_"):
        contract_unstable_check(M, pg42, xs, 3)
    v = contract_unstable_check(M, pg42, xs, 3, assume_member=True)
    w = v.witness
    assert w["rank"] == 3 and w["eps"] >= w["threshold"] == 21
    assert w["line"] is not None and not w["closure_meets_R"]
    assert v.kind == "bound-holds"


@pytest.mark.parametrize("k", [1, 2])
def test_quadratic_skew_placements(pg42, k):
    lines = [coordinate_line(pg42, 0, 1), coordinate_line(pg42, 2, 3)][:k]
    M = quadratic_placements(pg42, [L.sorted() for L in lines])
    X = list(range(31, 31 + k))
    n = 5 - k
    v = contract_unstable_check(M, pg42, X, n)
    assert v.kind == "bound-holds"
    w = v.witness
    N = M.restrict(w["restrict"]).contract(X)
    assert N.r == n and brute_points(N) == w["eps"] >= FullnessParams(2, k).threshold(n)
    assert has_line_restriction(N, 5).kind == "witness"


def test_single_placement_in_pg32(pg32):
    M, xs = placements(pg32, [coordinate_line(pg32, 0, 1)])
    v = contract_unstable_check(M, pg32, xs, 2, assume_member=True)
    N = M.restrict(v.witness["restrict"]).contract(xs)
    eps = brute_points(N)
    assert v.witness["eps"] == eps and N.r == 2
    assert v.witness["fullness"] in ("full-not-overfull", "overfull")
    assert (v.kind == "bound-holds") == (eps >= FullnessParams(2, 1).threshold(2) and eps >= 5)


def test_contract_unstable_preconditions(pg32):
    assert contract_unstable_check(pg32.handle, pg32, [], 2).witness["vacuous"]
    M, xs = placements(pg32, [coordinate_line(pg32, 0, 1)])
    with pytest.raises(PreconditionFailed):
        contract_unstable_check(M, pg32, xs, 1)
    with pytest.raises(PreconditionFailed):
        contract_unstable_check(M, pg32, xs, 4)


# -- skew dense subsets ---------------------------------------------------------------------------------


def qualifies(M, F, B, scale, mu):
    j = M.rank(F)
    return M.rank(list(F) + list(B)) == j + M.rank(B) and brute_points(M, F) > scale * mu**j


def test_skew_subset_with_empty_b(pg32):
    A = closure(pg32.handle, [0, 1, 3]).sorted()
    v = skew_dense_subset(pg32.handle, A, [], Fraction(3, 2), 1, 2)
    assert v.kind == "witness"
    assert qualifies(pg32.handle, A, [], Fraction(1), Fraction(3, 2))
    assert qualifies(pg32.handle, v.witness["A_prime"], [], Fraction(1), Fraction(3, 2))


def test_skew_subset_plane_and_point(pg32):
    A = closure(pg32.handle, [0, 1, 3]).sorted()
    b = next(x for x in pg32.handle.ground if x not in A)
    mu = Fraction(3, 2)
    scale = Fraction(1) * ((mu - 1) / 2) ** 1
    v = skew_dense_subset(pg32.handle, A, [b], mu, 1, 2)
    assert v.kind == "witness"
    assert qualifies(pg32.handle, A, [b], scale, mu)
    assert qualifies(pg32.handle, v.witness["A_prime"], [b], scale, mu)


def test_skew_subset_hypotheses(pg32):
    A = closure(pg32.handle, [0, 1]).sorted()
    with pytest.raises(PreconditionFailed):
        skew_dense_subset(pg32.handle, A, A[:1], 2, 1, 2)
    with pytest.raises(PreconditionFailed):
        skew_dense_subset(pg32.handle, A, [], 2, 5, 2)
    with pytest.raises(PreconditionFailed):
        skew_dense_subset(pg32.handle, A, [], 1, 1, 2)


@pytest.mark.parametrize("seed", range(20))
def test_skew_subset_matches_exhaustive_search(seed, gf2):
    rng = random.Random(seed)
    while True:  # draw until the density hypothesis holds
        M = pg(rng.randint(3, 4), gf2).handle
        ground = list(M.ground)
        A = rng.sample(ground, rng.randint(3, len(ground) - 1))
        rest = [x for x in ground if x not in A]
        B = rng.sample(rest, rng.randint(0, min(2, len(rest))))
        mu, lam = Fraction(rng.choice([3, 5]), 2), Fraction(1, rng.randint(1, 4))
        if brute_points(M, A) > lam * mu ** M.rank(A) and M.rank(B) < M.r:
            break
    v = skew_dense_subset(M, A, B, mu, lam, 2)
    scale = lam * ((mu - 1) / 2) ** M.rank(B)
    MA = M.restrict(A)
    any_ok = any(qualifies(M, F.sorted(), B, scale, mu) for F in all_flats(MA))
    assert (v.kind == "witness") == any_ok
    if v.kind == "witness":
        assert qualifies(M, v.witness["A_prime"], B, scale, mu)


def test_matching_obstruction_report(pg32):
    lines = [coordinate_line(pg32, 0, 1), coordinate_line(pg32, 2, 3)]
    rows = matching_obstruction(pg32, lines, j_max=2)
    assert rows[0]["missed"] == 0 and rows[2]["rank"] == 0
