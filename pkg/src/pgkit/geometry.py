"""Projective geometries over GF(q) and the constructions built on them.

Everything here goes through principal extensions: a projection adds new
elements freely placed on chosen flats and contracts them, and a truncation
is a free extension on the whole ground set followed by a contraction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from .errors import NotAFlat, NotSpanned, PreconditionFailed, RankOutOfRange, StructureViolation, UnsupportedSize
from .field import FieldSpec, field_make
from .matroid import (
    FlatRef,
    LinearMatroid,
    Matroid,
    PrincipalExtension,
    elements_of,
    mask_of,
    next_identifier,
)

MAX_PG_RANK = 6
MAX_PG_ORDER = 5


def projective_points(spec: FieldSpec, n: int) -> list[tuple[int, ...]]:
    """Normalized representatives of the 1-dimensional subspaces of GF(q)^n.

    First nonzero coordinate is 1; the list is in lexicographic order of the
    element-index tuples.
    """
    return [v for v in itertools.product(range(spec.q), repeat=n) if any(v) and next(c for c in v if c) == 1]


def _dot(spec: FieldSpec, u, v) -> int:
    add, mul = spec.add_table, spec.mul_table
    s = 0
    for a, b in zip(u, v):
        if a and b:
            s = add[s][mul[a][b]]
    return s


@dataclass(frozen=True)
class ProjectiveGeometry:
    spec: FieldSpec
    n: int
    handle: LinearMatroid = field(repr=False)
    points: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def ground_mask(self) -> int:
        return self.handle.ground_mask

    @cached_property
    def hyperplane_masks(self) -> tuple[int, ...]:
        """Every hyperplane, as the kernel of a normalized dual vector."""
        if self.n == 1:
            return (0,)
        out = []
        for h in projective_points(self.spec, self.n):
            out.append(mask_of(i for i, v in enumerate(self.points) if _dot(self.spec, h, v) == 0))
        return tuple(out)

    @cached_property
    def basis_mask(self) -> int:
        """Greedy basis of the geometry in identifier order."""
        r = self.handle._r
        B = 0
        for b in self.handle.bits:
            if r(B | b) > r(B):
                B |= b
        return B

    def __repr__(self):
        return f"PG({self.n - 1},{self.q})"


def pg(n: int, spec: FieldSpec, *, max_rank: int = MAX_PG_RANK, max_order: int = MAX_PG_ORDER) -> ProjectiveGeometry:
    """PG(n-1, q) as a rank-n linear matroid on identifiers 0..(q^n-1)/(q-1)-1.

    Geometries are immutable, so equal requests share one cached instance.
    """
    if n < 1 or n > max_rank or spec.q > max_order:
        raise UnsupportedSize(f"PG({n - 1},{spec.q}) outside the configured caps (rank <= {max_rank}, q <= {max_order})")
    return _pg(n, spec)


@lru_cache(maxsize=64)
def _pg(n: int, spec: FieldSpec) -> ProjectiveGeometry:
    pts = projective_points(spec, n)
    handle = LinearMatroid(spec, n, {i: v for i, v in enumerate(pts)})
    return ProjectiveGeometry(spec, n, handle, tuple(pts))


def principal_extension(M: Matroid, F) -> tuple[Matroid, int]:
    """Add a new element placed freely on the flat ``F``.

    The new element takes the smallest identifier not in ``E(M)``.
    """
    fmask = M.mask(F)
    if not (isinstance(F, FlatRef) and F.matroid is M) and not M.is_flat_mask(fmask):
        raise NotAFlat(f"{elements_of(fmask)} is not a flat")
    e = next_identifier(M)
    return PrincipalExtension(M, fmask, e), e


def truncate(M: Matroid, k: int = 1) -> Matroid:
    """k-fold truncation via free extension on E followed by contraction."""
    if not 0 <= k <= M.r:
        raise RankOutOfRange(f"cannot truncate rank-{M.r} matroid {k} times")
    for _ in range(k):
        ext, e = principal_extension(M, M.ground)
        M = ext.contract([e])
    return M


@dataclass(frozen=True)
class ProjectionSpec:
    """Ordered extension flats; step i's flat lives in the matroid after i placements."""

    base: ProjectiveGeometry
    steps: tuple[tuple[int, ...], ...] = ()

    @property
    def k(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class Projection:
    N: Matroid
    C: tuple[int, ...]
    M: Matroid

    @property
    def k(self) -> int:
        return len(self.C)


def project(spec: ProjectionSpec) -> Projection:
    """Build N by iterated principal extensions of the base, then return N/C."""
    N: Matroid = spec.base.handle
    added = []
    for i, flat in enumerate(spec.steps):
        try:
            N, e = principal_extension(N, flat)
        except NotAFlat as exc:
            raise NotAFlat(f"step {i}: {exc}") from None
        added.append(e)
    return Projection(N, tuple(added), N.contract(added))


def spanning_flat(M: Matroid, R: ProjectiveGeometry, e: int) -> FlatRef:
    """The unique minimal flat of R whose closure in M contains ``e``.

    Computed as the intersection of all flats of R that span ``e`` and are
    hyperplanes of a minimal spanning flat found by shrinking a basis.
    Returned as a flat of ``R.handle``.
    """
    rmask = R.ground_mask
    if rmask & ~M.ground_mask:
        raise PreconditionFailed("R is not a restriction of M")
    ebit = M.mask([e])
    if ebit & rmask:
        raise PreconditionFailed(f"element {e} belongs to R")
    r = M._r
    if r(ebit) == 0:
        raise PreconditionFailed(f"element {e} is a loop")
    if r(rmask | ebit) != r(rmask):
        raise NotSpanned(f"element {e} is not spanned by E(R)")
    # Shrink a basis of R to a minimal subset spanning e, then cut its
    # closure down by every hyperplane of that closure which still spans e.
    B = R.basis_mask
    for b in R.handle.bits:
        if b & B and r((B ^ b) | ebit) == r(B ^ b):
            B ^= b
    top = R.handle.closure_mask(B)
    F = top
    for G in sorted({H & top for H in R.hyperplane_masks if top & ~H}):
        if r(G | ebit) == r(G):
            F &= G
    if r(F | ebit) != r(F):
        raise StructureViolation(f"minimal flats spanning {e} are not unique")
    return FlatRef(R.handle, F, R.handle._r(F))


def direct_sum(A: LinearMatroid, B: LinearMatroid) -> LinearMatroid:
    """Block-diagonal sum; B's identifiers are shifted past A's."""
    if A.spec != B.spec:
        raise ValueError("direct sum needs a common field")
    shift = max(A.ground, default=-1) + 1
    cols = {x: tuple(v) + (0,) * B.rows for x, v in A.columns.items()}
    for x, v in B.columns.items():
        cols[x + shift] = (0,) * A.rows + tuple(v)
    return LinearMatroid(A.spec, A.rows + B.rows, cols)


def free_matroid(spec: FieldSpec, n: int) -> LinearMatroid:
    return LinearMatroid(spec, n, {i: tuple(int(i == j) for j in range(n)) for i in range(n)})


def uniform_matroid(r: int, n: int, spec: FieldSpec) -> Matroid:
    """U_{r,n} as a free matroid plus n - r free extensions."""
    M: Matroid = free_matroid(spec, r)
    for _ in range(n - r):
        M, _e = principal_extension(M, M.ground)
    return M


def quadratic_placements(R: ProjectiveGeometry, lines) -> LinearMatroid:
    """R over GF(q^2) with one new point a + w*b on each given line {a, b, ...} of R.

    Here w generates GF(q^2) over the prime field GF(q), so each new point lies
    on its line but off R. Unlike free placements, the result is
    GF(q^2)-representable and so has no U_{2,q^2+2}-minor. New elements take
    identifiers |E(R)|, |E(R)|+1, ... in the order of ``lines``. Needs q prime.
    """
    if R.spec.e != 1:
        raise UnsupportedSize("quadratic placements need a prime field")
    big = field_make(R.spec.p, 2)
    omega = big.index((0, 1))
    add, mul = big.add_table, big.mul_table
    cols = {i: tuple(v) for i, v in enumerate(R.points)}
    nxt = len(R.points)
    for L in lines:
        lm = R.handle.mask(L)
        if R.handle._r(lm) != 2:
            raise NotAFlat(f"{elements_of(lm)} is not a line")
        a, b = elements_of(lm)[:2]
        cols[nxt] = tuple(add[u][mul[omega][v]] for u, v in zip(R.points[a], R.points[b]))
        nxt += 1
    return LinearMatroid(big, R.n, cols)
