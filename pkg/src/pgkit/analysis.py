"""Density thresholds, line-minor detection and the long-line / critical-element checks."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import NotOverfull, PreconditionFailed, ResourceExceeded
from .geometry import ProjectiveGeometry, spanning_flat
from .matroid import (
    DEFAULT_FLAT_CAP,
    Matroid,
    _group_parallel,
    elements_of,
    iter_bits,
    line_masks,
    mask_key,
    point_masks,
)
from .verdict import AnalysisVerdict


def _exact_div(a: int, b: int) -> int:
    q, rem = divmod(a, b)
    if rem:
        raise ArithmeticError(f"{a} is not divisible by {b}")
    return q


def pg_points(q: int, n: int) -> int:
    """(q^n - 1)/(q - 1), the number of points of PG(n-1, q)."""
    if n <= 0:
        return 0
    return _exact_div(q**n - 1, q - 1)


def matching_bound(q: int, k: int) -> int:
    """(q^{2k} - 1)/(q^2 - 1)."""
    return _exact_div(q ** (2 * k) - 1, q * q - 1)


@dataclass(frozen=True)
class FullnessParams:
    q: int
    k: int = 0

    def __post_init__(self):
        if self.q < 2 or self.k < 0:
            raise ValueError("need q >= 2 and k >= 0")

    def threshold(self, r: int) -> int:
        """(q^{r+k}-1)/(q-1) - q(q^{2k}-1)/(q^2-1); r = 0 gives the empty matroid's value."""
        return _exact_div(self.q ** (r + self.k) - 1, self.q - 1) - self.q * matching_bound(self.q, self.k)


@dataclass(frozen=True)
class GrowthRateOracle:
    q: int
    k: int = 0

    def h(self, n: int) -> int:
        return FullnessParams(self.q, self.k).threshold(n)

    def h_pg(self, n: int) -> int:
        return pg_points(self.q, n)

    def truncation(self, n: int) -> int:
        """Density of k-fold truncations of PG(n+k-1, q)."""
        return pg_points(self.q, n + self.k)

    def gap(self) -> int:
        return self.q * matching_bound(self.q, self.k)


class Fullness(str, Enum):
    UNDERFULL = "underfull"
    FULL = "full-not-overfull"
    OVERFULL = "overfull"


def fullness(M: Matroid, params: FullnessParams) -> Fullness:
    eps = len(point_masks(M))
    t = params.threshold(M.r)
    if eps > t:
        return Fullness.OVERFULL
    return Fullness.FULL if eps == t else Fullness.UNDERFULL


# -- line minors ---------------------------------------------------------------


def _points_over(M: Matroid, F: int) -> list[int]:
    """Parallel classes of M/F for a flat F, built from the classes of M."""
    reps = {c & -c: c for c in M.point_classes() if not c & F}
    grouped = _group_parallel(M._r, F, M._r(F) + 1, list(reps))
    out = []
    for g in grouped:
        cls = 0
        for b in iter_bits(g):
            cls |= reps[b]
        out.append(cls)
    return out


def _longest_line_over(M: Matroid, F: int, pts: list[int], m: int):
    """First line of M/F with at least m points, as (line bitset, count), or None."""
    r = M._r
    rF2 = r(F) + 2
    reps = [p & -p for p in pts]
    n = len(reps)
    covered = set()
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in covered:
                continue
            base = F | reps[i] | reps[j]
            members = [t for t in range(n) if t == i or t == j or r(base | reps[t]) == rF2]
            if len(members) >= m:
                line = 0
                for t in members:
                    line |= pts[t]
                return line, len(members)
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    covered.add((members[a], members[b]))
    return None


def line_minor(
    M: Matroid,
    m: int,
    *,
    cap: int = DEFAULT_FLAT_CAP,
    priority=None,
    assume_simple: bool = False,
) -> AnalysisVerdict:
    """Decide whether M has a U_{2,m}-minor.

    Depth-first search over contraction flats F, starting at cl(empty): at
    each F, the lines of M/F are measured; a line with >= m points is a
    witness. Flats with eps(M/F) < m are pruned. ``priority`` lists elements
    whose points are contracted first (affects speed, never the verdict).
    ``assume_simple`` is accepted for interface compatibility; the search
    never needs the simplification.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    rM = M.r
    if rM < 2:
        return AnalysisVerdict("refuted", {"reason": "rank < 2", "searched": 0})
    rank_of = {x: i for i, x in enumerate(priority or ())}

    def order_key(P):
        return min((rank_of.get(x, len(rank_of) + x) for x in elements_of(P)), default=0)

    root = M.closure_mask(0)
    stack = [root]
    seen = {root}
    searched = 0
    while stack:
        F = stack.pop()
        searched += 1
        if searched > cap:
            raise ResourceExceeded(f"line-minor search exceeded {cap} contraction flats")
        rF = M._r(F)
        pts = _points_over(M, F)
        if len(pts) < m:
            continue
        if rM - rF == 2:
            line, count = M.ground_mask & ~F, len(pts)
        else:
            hit = _longest_line_over(M, F, pts, m)
            line, count = hit if hit else (0, 0)
        if count >= m:
            return AnalysisVerdict(
                "minor-found",
                {"contract": elements_of(F), "line": elements_of(line), "points": count, "searched": searched},
            )
        if rM - rF - 1 >= 2:
            children = [F | P for P in sorted(pts, key=order_key)]
            for G in reversed(children):
                if G not in seen:
                    seen.add(G)
                    stack.append(G)
    return AnalysisVerdict("refuted", {"m": m, "searched": searched})


def replay_line_witness(M: Matroid, witness: dict) -> int:
    """Number of points of (M/C)|line for a line-minor witness; checks rank 2."""
    N = M.contract(witness["contract"])
    if N.rank(witness["line"]) != 2:
        raise AssertionError("witness line does not have rank 2")
    return len(point_masks(N, witness["line"]))


def has_line_restriction(M: Matroid, m: int) -> AnalysisVerdict:
    """True iff some line of M (no contraction) has at least m points."""
    if m < 2:
        raise ValueError("m must be >= 2")
    best = None
    for line, count in line_masks(M):
        if count >= m:
            return AnalysisVerdict("witness", {"line": elements_of(line), "points": count})
        best = max(best or 0, count)
    return AnalysisVerdict("refuted", {"m": m, "longest": best or 0})


def lines_through(M: Matroid, e: int) -> list[tuple[int, int]]:
    """Lines of M containing ``e`` as (bitset of the line minus e's point, point count)."""
    M.mask([e])
    r = M._r
    ebit = 1 << e
    if r(ebit) == 0:
        raise PreconditionFailed(f"element {e} is a loop")
    E = M.closure_mask(ebit)
    classes = _points_over(M, E)
    out = []
    for P in classes:
        out.append((P, 1 + len(point_masks(M, elements_of(P)))))
    out.sort(key=lambda lc: mask_key(lc[0]))
    return out


def kung_bound_check(M: Matroid, ell: int, *, assume_member: bool = False, cap: int = DEFAULT_FLAT_CAP) -> AnalysisVerdict:
    """eps(M) <= (ell^r - 1)/(ell - 1) for M with no U_{2,ell+2}-minor."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    if not assume_member:
        v = line_minor(M, ell + 2, cap=cap)
        if v.kind == "minor-found":
            raise PreconditionFailed(f"matroid has a U_{{2,{ell + 2}}}-minor: {v.witness}")
    eps = len(point_masks(M))
    bound = pg_points(ell, M.r)
    witness = {"eps": eps, "bound": bound, "rank": M.r, "ell": ell, "tight": eps == bound}
    return AnalysisVerdict("bound-holds" if eps <= bound else "refuted", witness)


# -- critical elements -----------------------------------------------------------


def critical_elements(M: Matroid, params: FullnessParams) -> list[int]:
    """Elements e with M/e not (q,k)-overfull; M itself must be overfull."""
    if fullness(M, params) is not Fullness.OVERFULL:
        raise NotOverfull(f"matroid is not ({params.q},{params.k})-overfull")
    return [e for e in M.ground if fullness(M.contract([e]), params) is not Fullness.OVERFULL]


def critical_dichotomy_check(M: Matroid, params: FullnessParams, e: int) -> AnalysisVerdict:
    """e lies on a line with >= q^2+2 points, or on >= (q^{2k}-1)/(q^2-1)+1 lines with >= q+2 points."""
    q, k = params.q, params.k
    if fullness(M, params) is not Fullness.OVERFULL:
        raise PreconditionFailed("matroid is not overfull")
    if fullness(M.contract([e]), params) is Fullness.OVERFULL:
        raise PreconditionFailed(f"element {e} is not critical")
    lines = lines_through(M, e)
    long_lines = [(elements_of(P), c) for P, c in lines if c >= q * q + 2]
    medium = [(elements_of(P), c) for P, c in lines if c >= q + 2]
    need = matching_bound(q, k) + 1
    witness = {
        "element": e,
        "long_lines": [{"line": l, "points": c} for l, c in long_lines],
        "medium_lines": [{"line": l, "points": c} for l, c in medium],
        "needed_medium": need,
    }
    if long_lines:
        witness["outcome"] = "long-line"
    elif len(medium) >= need:
        witness["outcome"] = "many-lines"
    else:
        return AnalysisVerdict("refuted", witness)
    return AnalysisVerdict("bound-holds", witness)


# -- long lines -------------------------------------------------------------------


def _r_flat_spanning(M: Matroid, R: ProjectiveGeometry, elements) -> int:
    """Smallest flat of R whose closure in M contains ``elements``."""
    rmask = R.ground_mask
    acc = 0
    for x in elements:
        if rmask >> x & 1:
            acc |= 1 << x
        else:
            acc |= spanning_flat(M, R, x).mask
    return R.handle.closure_mask(acc)


def _long_line_through_extras(M: Matroid, R: ProjectiveGeometry, extra: list[int], need: int) -> int | None:
    """First line of a simple M with >= ``need`` points and two elements outside R.

    A line meets R in at most q+1 points, so when need > q+2 every long line
    holds two elements x, y outside R; its R-points lie in the join of their
    spanning flats, so only that part of R is scanned.
    """
    r = M._r
    seen = set()
    for i, x in enumerate(extra):
        for y in extra[i + 1 :]:
            if (x, y) in seen:
                continue
            pair = (1 << x) | (1 << y)
            others = [z for z in extra if z != x and z != y and r(pair | (1 << z)) == 2]
            on = sorted([x, y] + others)
            for a in range(len(on)):
                for b in range(a + 1, len(on)):
                    seen.add((on[a], on[b]))
            join = R.handle.closure_mask(spanning_flat(M, R, x).mask | spanning_flat(M, R, y).mask)
            line = pair
            for z in others:
                line |= 1 << z
            for b in iter_bits(join):
                if r(pair | b) == 2:
                    line |= b
            if len(point_masks(M, elements_of(line))) >= need:
                return line
    return None


def _escalating_minor(M: Matroid, R: ProjectiveGeometry, start: int, F: int, m: int, cap: int, priority):
    """Search for a U_{2,m}-minor in restrictions M|S of growing rank.

    S starts as cl(start); each round adds one point of R, taken from the
    R-flat F first and then anywhere in R, until S spans M.
    """
    r = M._r
    S = M.closure_mask(start)
    order = [b for b in R.handle.bits if b & F] + [b for b in R.handle.bits if not b & F]
    tried = []
    while True:
        tried.append(r(S))
        N = M if r(S) == M.r else M.restrict(elements_of(S))
        v = line_minor(N, m, cap=cap, priority=priority)
        if v.kind == "minor-found" or r(S) == M.r:
            return v, tried
        b = next(b for b in order if r(S | b) > r(S))
        S = M.closure_mask(S | b)


def long_line_checks(
    M: Matroid,
    R: ProjectiveGeometry,
    params: FullnessParams,
    X=None,
    *,
    cap: int = DEFAULT_FLAT_CAP,
) -> AnalysisVerdict:
    """Implication checks for the two long-line statements.

    First statement: M simple, rank >= 7, spanning PG(r-1,q)-restriction R, a line
    with >= q^2+2 points and an element off R and that line. Second statement
    (only when ``X`` is given and k >= 3): rank >= k+7, r(X) <= k and
    eps(M|X) > (q^{2k}-1)/(q^2-1). When the hypotheses hold, a
    U_{2,q^2+q+1}-minor must be found; it is searched for in a low-rank
    restriction around the long structure, which is enough because a minor
    of a restriction is a minor of M.
    """
    q, k = params.q, params.k
    target = q * q + q + 1
    r = M._r
    if M.r < 7:
        raise PreconditionFailed(f"rank {M.r} < 7")
    rmask = R.ground_mask
    if rmask & ~M.ground_mask or r(rmask) != M.r:
        raise PreconditionFailed("R is not a spanning restriction of M")
    if R.q != q:
        raise PreconditionFailed("R is over a different field")
    simple = len(point_masks(M)) == len(M)
    extra = [x for x in M.ground if not rmask >> x & 1]
    priority = extra + [x for x in M.ground if rmask >> x & 1]
    report: dict = {"simple": simple, "rank": M.r, "extra": extra}
    outcomes = []

    # First statement.
    first = {"applicable": False}
    if simple:
        long_line = _long_line_through_extras(M, R, extra, q * q + 2)
        if long_line is not None:
            outside = [x for x in extra if not long_line >> x & 1]
            first.update(line=elements_of(long_line), points=len(point_masks(M, elements_of(long_line))))
            if outside:
                z = outside[0]
                first.update(applicable=True, z=z)
                F = _r_flat_spanning(M, R, elements_of(long_line) + [z])
                v, tried = _escalating_minor(M, R, long_line | (1 << z), F, target, cap, priority)
                first.update(spanning_rank=R.handle._r(F), search_ranks=tried, verdict=v.to_json())
                outcomes.append(v.kind)
    report["longlinewin"] = first

    # Second statement.
    second = {"applicable": False}
    if X is not None:
        xmask = M.mask(X)
        bound = matching_bound(q, k)
        eps_x = len(point_masks(M, elements_of(xmask)))
        second.update(eps=eps_x, bound=bound, rank_X=r(xmask))
        if k >= 3 and M.r >= k + 7 and r(xmask) <= k and eps_x > bound:
            second["applicable"] = True
            F = _r_flat_spanning(M, R, elements_of(xmask))
            v, tried = _escalating_minor(M, R, xmask, F, target, cap, priority)
            second.update(spanning_rank=R.handle._r(F), search_ranks=tried, verdict=v.to_json())
            outcomes.append(v.kind)
    report["longlinewin2"] = second

    if not outcomes:
        return AnalysisVerdict("bound-holds", {**report, "vacuous": True})
    if all(o == "minor-found" for o in outcomes):
        return AnalysisVerdict("minor-found", report)
    return AnalysisVerdict("refuted", report)
