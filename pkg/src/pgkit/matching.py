"""Matchings of lines in a projective-geometry restriction, unstable sets, skew dense subsets."""

from __future__ import annotations

from fractions import Fraction

from .analysis import Fullness, FullnessParams, fullness, has_line_restriction, line_minor
from .errors import PreconditionFailed, ResourceExceeded, StructureViolation
from .geometry import ProjectiveGeometry, spanning_flat
from .matroid import DEFAULT_FLAT_CAP, FlatRef, Matroid, elements_of, flat_masks_by_rank, point_masks
from .verdict import AnalysisVerdict

DEFAULT_NODE_CAP = 5_000_000


def _line_mask(R: ProjectiveGeometry, L) -> int:
    m = L.mask if isinstance(L, FlatRef) else R.handle.mask(L)
    if R.handle._r(m) != 2 or R.handle.closure_mask(m) != m:
        raise PreconditionFailed(f"{elements_of(m)} is not a line of R")
    return m


def _search_matching(r, masks: list[int], k: int, cap: int) -> tuple[list[int] | None, int]:
    """Indices of k mutually skew lines (r(union) = 2k), or None with the maximum size.

    Branches are pruned when they cannot beat the best matching seen so far;
    since that best is below k until k is reached, this never loses a
    k-matching and makes the reported maximum exact.
    """
    best = 0
    nodes = 0
    chosen: list[int] = []

    def go(union: int, cands: list[int]) -> bool:
        nonlocal best, nodes
        nodes += 1
        if nodes > cap:
            raise ResourceExceeded(f"matching search exceeded {cap} nodes")
        j = len(chosen)
        best = max(best, j)
        if j == k:
            return True
        ru = r(union)
        for pos, i in enumerate(cands):
            if j + len(cands) - pos <= best:
                return False
            U = union | masks[i]
            chosen.append(i)
            rest = [c for c in cands[pos + 1 :] if r(U | masks[c]) == ru + 4]
            if go(U, rest):
                return True
            chosen.pop()
        return False

    found = go(0, list(range(len(masks))))
    return (list(chosen) if found else None), best


def find_matching(R: ProjectiveGeometry, lines, k: int, *, cap: int = DEFAULT_NODE_CAP) -> AnalysisVerdict:
    """A k-matching (k mutually skew lines) among ``lines``, by branch and bound.

    Mutual skewness of j lines is tested as r(union) = 2j. A refutation
    reports the largest matching seen, which is the maximum because the
    search is exhaustive.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    masks = [_line_mask(R, L) for L in lines]
    if 2 * k > R.n:
        return AnalysisVerdict("refuted", {"k": k, "reason": f"rank {R.n} < {2 * k}"})
    idx, best = _search_matching(R.handle._r, masks, k, cap)
    if idx is None:
        return AnalysisVerdict("refuted", {"k": k, "maximum": best})
    return AnalysisVerdict("witness", {"k": k, "lines": [elements_of(masks[i]) for i in idx]})


def spanning_lines(M: Matroid, R: ProjectiveGeometry) -> dict[int, int]:
    """L_x for every non-loop x outside R; every spanning flat must be a line."""
    out = {}
    for x in M.ground:
        if R.ground_mask >> x & 1 or M._r(1 << x) == 0:
            continue
        F = spanning_flat(M, R, x)
        if F.rank != 2:
            raise StructureViolation(f"element {x} has a spanning flat of rank {F.rank}")
        out[x] = F.mask
    return out


def find_unstable(M: Matroid, R: ProjectiveGeometry, k: int, *, cap: int = DEFAULT_NODE_CAP) -> AnalysisVerdict:
    """A size-k set X outside R whose spanning lines form a matching."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return AnalysisVerdict("witness", {"X": [], "lines": []})
    L = spanning_lines(M, R)
    xs = sorted(L)
    if 2 * k > R.n:
        return AnalysisVerdict("refuted", {"k": k, "reason": f"rank {R.n} < {2 * k}"})
    idx, best = _search_matching(R.handle._r, [L[x] for x in xs], k, cap)
    if idx is None:
        return AnalysisVerdict("refuted", {"k": k, "maximum": best})
    X = [xs[i] for i in idx]
    return AnalysisVerdict("witness", {"X": X, "lines": [elements_of(L[x]) for x in X]})


def is_unstable(M: Matroid, R: ProjectiveGeometry, X) -> bool:
    L = spanning_lines(M, R)
    X = list(X)
    if any(x not in L for x in X):
        return False
    union = 0
    for x in X:
        union |= L[x]
    return R.handle._r(union) == 2 * len(X)


def contract_unstable_check(
    M: Matroid,
    R: ProjectiveGeometry,
    X,
    n: int,
    *,
    assume_member: bool = False,
    cap: int = DEFAULT_FLAT_CAP,
) -> AnalysisVerdict:
    """Build the rank-n minor N = M'/X and check it is full with a (q^2+1)-point line.

    M' is M restricted to the flat of R of rank n+k spanned by the lines L_x
    (padded with points of R in identifier order) together with X. Unless
    ``assume_member`` is set, M' is checked to have no U_{2,q^2+q+1}-minor;
    a minor of M' is a minor of M, so finding one means M is outside the
    excluded-minor class and PreconditionFailed is raised.
    """
    X = elements_of(M.mask(X))
    k, q = len(X), R.q
    if not X:
        return AnalysisVerdict("bound-holds", {"X": [], "vacuous": True})
    if n <= k:
        raise PreconditionFailed(f"need n > k, got n={n}, k={k}")
    if M.r < n + k:
        raise PreconditionFailed(f"rank {M.r} < n + k = {n + k}")
    if not is_unstable(M, R, X):
        raise PreconditionFailed(f"{X} is not R-unstable")
    L = spanning_lines(M, R)
    Rr = R.handle._r
    F = 0
    for x in X:
        F |= L[x]
    for b in R.handle.bits:
        if Rr(F) >= n + k:
            break
        if Rr(F | b) > Rr(F):
            F |= b
    F = R.handle.closure_mask(F)
    keep = elements_of(F) + X
    Mp = M.restrict(keep)
    if not assume_member:
        v = line_minor(Mp, q * q + q + 1, cap=cap)
        if v.kind == "minor-found":
            raise PreconditionFailed(f"restriction has a U_{{2,{q * q + q + 1}}}-minor: {v.witness}")
    N = Mp.contract(X)
    params = FullnessParams(q, k)
    eps = len(point_masks(N))
    status = fullness(N, params)
    line = has_line_restriction(N, q * q + 1)
    xm = M.mask(X)
    meet = M.closure_mask(xm) & R.ground_mask
    witness = {
        "X": X,
        "restrict": sorted(keep),
        "rank": N.r,
        "eps": eps,
        "threshold": params.threshold(n),
        "fullness": status.value,
        "line": line.witness,
        "closure_meets_R": elements_of(meet),
    }
    ok = N.r == n and status is not Fullness.UNDERFULL and line.kind == "witness" and not meet
    return AnalysisVerdict("bound-holds" if ok else "refuted", witness)


def skew_dense_subset(
    M: Matroid,
    A,
    B,
    mu,
    lam,
    ell: int,
    t: int | None = None,
    *,
    assume_member: bool = False,
    cap: int = DEFAULT_FLAT_CAP,
) -> AnalysisVerdict:
    """Search flats A' of M|A, smallest first, that are skew to B and dense enough.

    Density target: eps(M|A') > lam * ((mu - 1)/ell)^t * mu^r(A'), compared as
    exact fractions. ``t`` defaults to r(B).
    """
    mu, lam = Fraction(mu), Fraction(lam)
    am, bm = M.mask(A), M.mask(B)
    r = M._r
    if am & bm:
        raise PreconditionFailed("A and B are not disjoint")
    if lam <= 0 or mu <= 1 or ell < 2:
        raise PreconditionFailed("need lam > 0, mu > 1 and ell >= 2")
    t = r(bm) if t is None else t
    if not r(bm) <= t < M.r:
        raise PreconditionFailed(f"need r(B) <= t < r(M), got r(B)={r(bm)}, t={t}, r(M)={M.r}")
    eps_a = len(point_masks(M, elements_of(am)))
    if not eps_a > lam * mu ** r(am):
        raise PreconditionFailed(f"eps(M|A) = {eps_a} is not > {lam} * {mu}^{r(am)}")
    if not assume_member and line_minor(M, ell + 2, cap=cap).kind == "minor-found":
        raise PreconditionFailed(f"matroid has a U_{{2,{ell + 2}}}-minor")
    scale = lam * ((mu - 1) / ell) ** t
    MA = M.restrict(elements_of(am))
    levels = flat_masks_by_rank(MA, MA.r, cap)
    rb = r(bm)
    searched = 0
    for j in range(MA.r + 1):
        for Fm in levels[j]:
            searched += 1
            if r(Fm | bm) != j + rb:
                continue
            eps = len(point_masks(M, elements_of(Fm)))
            if eps > scale * mu**j:
                return AnalysisVerdict(
                    "witness",
                    {"A_prime": elements_of(Fm), "rank": j, "eps": eps, "target": str(scale * mu**j), "searched": searched},
                )
    return AnalysisVerdict("refuted", {"searched": searched})


def matching_obstruction(R: ProjectiveGeometry, lines, j_max: int = 5, *, cap: int = DEFAULT_FLAT_CAP) -> list[dict]:
    """Exploratory: for j <= j_max, a smallest-rank flat of R meeting all but at most j lines.

    No claim is made about any bounding constant; this only reports what is found.
    """
    masks = [_line_mask(R, L) for L in lines]
    levels = flat_masks_by_rank(R.handle, R.n, cap)
    out = []
    for j in range(j_max + 1):
        hit = None
        for rank in range(R.n + 1):
            for Fm in levels[rank]:
                missed = sum(1 for m in masks if not m & Fm)
                if missed <= j:
                    hit = {"j": j, "flat": elements_of(Fm), "rank": rank, "missed": missed}
                    break
            if hit:
                break
        out.append(hit)
    return out


__all__ = [
    "contract_unstable_check",
    "find_matching",
    "find_unstable",
    "is_unstable",
    "matching_obstruction",
    "skew_dense_subset",
    "spanning_lines",
]
