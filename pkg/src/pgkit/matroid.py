"""Composable rank oracles over bitset-encoded subsets.

A :class:`Matroid` is an immutable value: a ground set of integer element
identifiers plus a rank function. Subsets are handled internally as Python
ints used as bitsets (bit ``i`` set <=> element ``i`` present); the public
methods also accept any iterable of identifiers or a :class:`FlatRef`.

Minors and extensions wrap their parent instead of copying it, so a matroid
is a small construction tree whose leaves are :class:`LinearMatroid` values.
Identifiers are stable under deletion and contraction.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import AxiomViolation, NotAFlat, RankOutOfRange, ResourceExceeded, UnknownElement
from .field import FieldSpec

MEMO_LIMIT = 24
LARGE_MEMO_ENTRIES = 50_000
DEFAULT_FLAT_CAP = 2_000_000


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for x in elements:
        m |= 1 << x
    return m


def elements_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


def mask_key(mask: int) -> tuple[int, ...]:
    """Sort key giving lexicographic order on the sorted member tuple."""
    return tuple(elements_of(mask))


def _group_parallel(r, base: int, target: int, candidates: list[int]) -> list[int]:
    """Group bitsets b with r(base | b) = target into classes of r(base | a | b) = target."""
    classes = []
    remaining = candidates
    while remaining:
        head = remaining[0]
        cls = head
        rest = []
        for b in remaining[1:]:
            if r(base | head | b) == target:
                cls |= b
            else:
                rest.append(b)
        classes.append(cls)
        remaining = rest
    return classes


class Matroid:
    """Base rank oracle. Subclasses implement ``_rank_mask``."""

    kind = "matroid"

    def __init__(self, ground: Iterable[int]):
        self.ground = tuple(sorted(set(ground)))
        self.ground_mask = mask_of(self.ground)
        self.bits = tuple(1 << x for x in self.ground)
        # Plain dict: CPython makes get/set atomic, and a racing duplicate
        # computation stores the same value. Above MEMO_LIMIT elements the
        # memo is bounded and simply cleared when full.
        self._memo: dict[int, int] = {}
        self._memo_cap = None if len(self.ground) <= MEMO_LIMIT else LARGE_MEMO_ENTRIES
        self._r_full: int | None = None
        self._classes: tuple[int, ...] | None = None

    def _rank_mask(self, mask: int) -> int:
        raise NotImplementedError

    def _r(self, mask: int) -> int:
        memo = self._memo
        r = memo.get(mask)
        if r is None:
            r = self._rank_mask(mask)
            if self._memo_cap is not None and len(memo) >= self._memo_cap:
                memo.clear()
            memo[mask] = r
        return r

    # -- conversions -------------------------------------------------------

    def mask(self, X) -> int:
        """Bitset for ``X`` (iterable of identifiers or FlatRef); checks membership."""
        if X is None:
            return self.ground_mask
        if isinstance(X, FlatRef):
            m = X.mask
        else:
            m = mask_of(X)
        extra = m & ~self.ground_mask
        if extra:
            raise UnknownElement(elements_of(extra))
        return m

    def __len__(self):
        return len(self.ground)

    @property
    def r(self) -> int:
        if self._r_full is None:
            self._r_full = self._r(self.ground_mask)
        return self._r_full

    def rank(self, X=None) -> int:
        return self._r(self.mask(X))

    # -- closure -----------------------------------------------------------

    def closure_mask(self, mask: int) -> int:
        r0 = self._r(mask)
        out = mask
        for b in self.bits:
            if not b & mask and self._r(mask | b) == r0:
                out |= b
        return out

    def closure(self, X=()) -> "FlatRef":
        m = self.closure_mask(self.mask(X))
        return FlatRef(self, m, self._r(m))

    def is_flat_mask(self, mask: int) -> bool:
        r0 = self._r(mask)
        return all(b & mask or self._r(mask | b) > r0 for b in self.bits)

    def flat(self, X) -> "FlatRef":
        """Wrap ``X`` as a FlatRef, raising NotAFlat if it is not closed."""
        m = self.mask(X)
        if not self.is_flat_mask(m):
            raise NotAFlat(f"{elements_of(m)} is not closed")
        return FlatRef(self, m, self._r(m))

    # -- minors ------------------------------------------------------------

    def delete(self, D) -> "Matroid":
        m = self.mask(D)
        return self if not m else Deletion(self, m)

    def contract(self, C) -> "Matroid":
        m = self.mask(C)
        return self if not m else Contraction(self, m)

    def restrict(self, S) -> "Matroid":
        return self.delete(elements_of(self.ground_mask & ~self.mask(S)))

    # -- parallel classes ---------------------------------------------------

    def point_classes(self) -> tuple[int, ...]:
        """Parallel classes of non-loops as bitsets, ordered by smallest member.

        Cached per handle. Wrappers derive their classes from the parent's
        where the construction allows it; the generic route compares pairs.
        """
        pc = self._classes
        if pc is None:
            pc = self._classes = tuple(sorted(self._point_classes(), key=lambda c: c & -c))
        return pc

    def _point_classes(self) -> list[int]:
        return _group_parallel(self._r, 0, 1, [b for b in self.bits if self._r(b) == 1])

    def describe(self) -> str:
        return f"{self.kind}(|E|={len(self)}, r={self.r})"

    def __repr__(self):
        return f"<{self.describe()}>"


@dataclass(frozen=True, eq=True)
class FlatRef:
    matroid: Matroid = field(compare=True, repr=False)
    mask: int
    rank: int

    @property
    def members(self) -> frozenset[int]:
        return frozenset(elements_of(self.mask))

    def __len__(self):
        return popcount(self.mask)

    def __iter__(self):
        return iter(elements_of(self.mask))

    def __contains__(self, x):
        return bool(self.mask >> x & 1)

    def sorted(self) -> list[int]:
        return elements_of(self.mask)

    def __repr__(self):
        return f"FlatRef(rank={self.rank}, members={elements_of(self.mask)})"


# -- leaves and wrappers ------------------------------------------------------


def _rank_gf2(vectors, rows: int) -> int:
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length()
            b = basis.get(top)
            if b is None:
                basis[top] = v
                if len(basis) == rows:
                    return rows
                break
            v ^= b
    return len(basis)


def _rank_char2(vectors, rows: int, spec: FieldSpec) -> int:
    """Rank of packed vectors over GF(2^e); each basis row keeps all its scalar
    multiples so that elimination is a single XOR."""
    w, mask = spec.e, spec.q - 1
    mul, inv = spec.mul_table, spec.inv_table
    basis: dict[int, list[int]] = {}
    for v in vectors:
        while v:
            coord = (v.bit_length() - 1) // w
            c = (v >> (coord * w)) & mask
            mults = basis.get(coord)
            if mults is None:
                # table[a] = (a / c) * v has value a in coordinate ``coord``.
                digits = [(v >> (w * i)) & mask for i in range(rows)]
                table = [0] * (mask + 1)
                for a in range(1, mask + 1):
                    ma = mul[mul[a][inv[c]]]
                    table[a] = sum(ma[d] << (w * i) for i, d in enumerate(digits) if d)
                basis[coord] = table
                if len(basis) == rows:
                    return rows
                break
            v ^= mults[c]
    return len(basis)


class LinearMatroid(Matroid):
    """Column matroid of a matrix over GF(q).

    ``columns`` maps identifier -> tuple of field-element indices (length = rows).
    """

    kind = "linear"

    def __init__(self, spec: FieldSpec, rows: int, columns: dict[int, tuple[int, ...]]):
        super().__init__(columns)
        self.spec = spec
        self.rows = rows
        self.columns = {x: tuple(v) for x, v in columns.items()}
        for x, v in self.columns.items():
            if len(v) != rows or any(not 0 <= c < spec.q for c in v):
                raise ValueError(f"column {x} is not a length-{rows} vector over {spec!r}")
        self._packed = None
        if spec.p == 2:
            # In characteristic 2 addition is XOR of element indices, so a column
            # packs into one int with e bits per coordinate, row 0 most significant.
            w = spec.e
            self._packed = {
                x: sum(c << (w * (rows - 1 - i)) for i, c in enumerate(v)) for x, v in self.columns.items()
            }

    def _rank_mask(self, mask: int) -> int:
        if self._packed is not None:
            packed = self._packed
            vecs = (packed[b.bit_length() - 1] for b in iter_bits(mask))
            if self.spec.q == 2:
                return _rank_gf2(vecs, self.rows)
            return _rank_char2(vecs, self.rows, self.spec)
        cols = self.columns
        return self._rank_general(cols[b.bit_length() - 1] for b in iter_bits(mask))

    def _point_classes(self) -> list[int]:
        inv, mul = self.spec.inv_table, self.spec.mul_table
        groups: dict[tuple[int, ...], int] = {}
        for x in self.ground:
            v = self.columns[x]
            lead = next((c for c in v if c), 0)
            if not lead:
                continue
            mi = mul[inv[lead]]
            key = tuple(mi[c] for c in v)
            groups[key] = groups.get(key, 0) | (1 << x)
        return list(groups.values())

    def _rank_general(self, vecs) -> int:
        spec = self.spec
        add, mul, neg, inv = spec.add_table, spec.mul_table, spec.neg_table, spec.inv_table
        n = self.rows
        rows: list[tuple[int, list[int]]] = []
        for v in vecs:
            v = list(v)
            for piv, row in rows:
                c = v[piv]
                if c:
                    mr = mul[neg[c]]
                    v = [add[a][mr[b]] for a, b in zip(v, row)]
            for i, c in enumerate(v):
                if c:
                    mi = mul[inv[c]]
                    rows.append((i, [mi[a] for a in v]))
                    break
            if len(rows) == n:
                break
        return len(rows)


class Deletion(Matroid):
    kind = "deletion"

    def __init__(self, parent: Matroid, dmask: int):
        super().__init__(elements_of(parent.ground_mask & ~dmask))
        self.parent = parent
        self.removed = dmask

    def _rank_mask(self, mask: int) -> int:
        return self.parent._r(mask)

    def _point_classes(self) -> list[int]:
        g = self.ground_mask
        return [c & g for c in self.parent.point_classes() if c & g]


class Contraction(Matroid):
    kind = "contraction"

    def __init__(self, parent: Matroid, cmask: int):
        super().__init__(elements_of(parent.ground_mask & ~cmask))
        self.parent = parent
        self.contracted = cmask
        self.r_contracted = parent._r(cmask)

    def _rank_mask(self, mask: int) -> int:
        return self.parent._r(mask | self.contracted) - self.r_contracted

    def _point_classes(self) -> list[int]:
        # Parallel classes of the parent outside cl(C) merge into those of M/C.
        P = self.parent
        C = self.contracted
        F = P.closure_mask(C)
        outside = [c for c in P.point_classes() if not c & F]
        reps = {c & -c: c for c in outside}
        grouped = _group_parallel(P._r, C, self.r_contracted + 1, list(reps))
        out = []
        for g in grouped:
            cls = 0
            for b in iter_bits(g):
                cls |= reps[b]
            out.append(cls & self.ground_mask)
        return out


class PrincipalExtension(Matroid):
    """Parent plus a new element ``e`` placed freely on the flat ``flat_mask``."""

    kind = "extension"

    def __init__(self, parent: Matroid, flat_mask: int, e: int):
        if parent.ground_mask >> e & 1:
            raise ValueError(f"element {e} already in ground set")
        super().__init__(parent.ground + (e,))
        self.parent = parent
        self.flat_mask = flat_mask
        self.e = e
        self.ebit = 1 << e
        self.free = flat_mask == parent.ground_mask

    def _rank_mask(self, mask: int) -> int:
        if not mask & self.ebit:
            return self.parent._r(mask)
        base = mask ^ self.ebit
        r = self.parent._r(base)
        if not self.flat_mask & ~base or r == self.parent.r:
            return r
        if self.free:
            return min(r + 1, self.parent.r)
        return min(r + 1, self.parent._r(base | self.flat_mask))

    def _point_classes(self) -> list[int]:
        pc = list(self.parent.point_classes())
        rF = self.parent._r(self.flat_mask)
        if rF == 0:
            return pc
        if rF == 1:
            return [c | self.ebit if c & self.flat_mask else c for c in pc]
        return pc + [self.ebit]


class Truncation(Matroid):
    """Direct truncation oracle ``min(r(X), r(M) - 1)``.

    The geometry builders truncate through a free extension and a contraction;
    this class is kept as an independent cross-check of that route.
    """

    kind = "truncation"

    def __init__(self, parent: Matroid):
        if parent.r < 1:
            raise RankOutOfRange("cannot truncate a rank-0 matroid")
        super().__init__(parent.ground)
        self.parent = parent
        self.cap = parent.r - 1

    def _rank_mask(self, mask: int) -> int:
        return min(self.parent._r(mask), self.cap)

    def _point_classes(self) -> list[int]:
        pc = self.parent.point_classes()
        if self.cap >= 2:
            return list(pc)
        if self.cap == 1 and pc:
            out = 0
            for c in pc:
                out |= c
            return [out]
        return []


def next_identifier(M: Matroid) -> int:
    """Smallest identifier not in the ground set."""
    m = M.ground_mask
    i = 0
    while m >> i & 1:
        i += 1
    return i


# -- operations --------------------------------------------------------------


def rank(M: Matroid, X=None) -> int:
    return M.rank(X)


def closure(M: Matroid, X=()) -> FlatRef:
    return M.closure(X)


def delete(M: Matroid, D) -> Matroid:
    return M.delete(D)


def contract(M: Matroid, C) -> Matroid:
    return M.contract(C)


def point_masks(M: Matroid, X=None) -> list[int]:
    """Parallel classes of non-loops of ``M|X`` as bitsets, ordered by smallest member."""
    if X is None:
        return list(M.point_classes())
    m = M.mask(X)
    return [c & m for c in M.point_classes() if c & m]


def epsilon(M: Matroid, X=None) -> int:
    """Number of points of ``M|X``."""
    return len(point_masks(M, X))


def simplify(M: Matroid) -> Matroid:
    """Restriction to the smallest identifier of each point (loops removed)."""
    keep = 0
    for cls in point_masks(M):
        keep |= cls & -cls
    return M.restrict(elements_of(keep))


def line_masks(M: Matroid, X=None, point_list=None) -> list[tuple[int, int]]:
    """Lines of ``M|X`` as ``(union of point bitsets, number of points)``.

    Only lines spanned by two points are returned (every rank-2 flat is).
    """
    pts = point_list if point_list is not None else point_masks(M, X)
    reps = [p & -p for p in pts]
    r = M._r
    n = len(reps)
    covered = set()
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in covered:
                continue
            pair = reps[i] | reps[j]
            members = [i, j] + [t for t in range(n) if t != i and t != j and r(pair | reps[t]) == 2]
            members.sort()
            for a, b in itertools.combinations(members, 2):
                covered.add((a, b))
            line = 0
            for t in members:
                line |= pts[t]
            out.append((line, len(members)))
    out.sort(key=lambda lm: mask_key(lm[0]))
    return out


def flat_masks_by_rank(M: Matroid, k: int, cap: int = DEFAULT_FLAT_CAP) -> list[list[int]]:
    """All flats of rank 0..k, level by level, as bitsets sorted lexicographically."""
    if not 0 <= k <= M.r:
        raise RankOutOfRange(f"rank {k} outside 0..{M.r}")
    levels = [[M.closure_mask(0)]]
    generated = 1
    for _ in range(k):
        nxt = set()
        for F in levels[-1]:
            covered = F
            for b in M.bits:
                if b & covered:
                    continue
                G = M.closure_mask(F | b)
                generated += 1
                if generated > cap:
                    raise ResourceExceeded(f"flat enumeration exceeded {cap} closures")
                covered |= G
                nxt.add(G)
        levels.append(sorted(nxt, key=mask_key))
    return levels


def flats_of_rank(M: Matroid, k: int, cap: int = DEFAULT_FLAT_CAP) -> list[FlatRef]:
    return [FlatRef(M, F, k) for F in flat_masks_by_rank(M, k, cap)[k]]


def all_flats(M: Matroid, cap: int = DEFAULT_FLAT_CAP) -> list[FlatRef]:
    levels = flat_masks_by_rank(M, M.r, cap)
    return [FlatRef(M, F, j) for j, level in enumerate(levels) for F in level]


def local_connectivity(M: Matroid, X, Y) -> int:
    a, b = M.mask(X), M.mask(Y)
    return M._r(a) + M._r(b) - M._r(a | b)


def skew(M: Matroid, X, Y) -> bool:
    return local_connectivity(M, X, Y) == 0


def mutually_skew(M: Matroid, collection) -> bool:
    masks = [M.mask(X) for X in collection]
    for i, a in enumerate(masks):
        rest = 0
        for j, b in enumerate(masks):
            if j != i:
                rest |= b
        if M._r(a) + M._r(rest) != M._r(a | rest):
            return False
    return True


def _flat_mask(M: Matroid, F) -> int:
    m = M.mask(F)
    if isinstance(F, FlatRef) and F.matroid is M:
        return m
    if not M.is_flat_mask(m):
        raise NotAFlat(f"{elements_of(m)} is not a flat")
    return m


def is_modular_pair(M: Matroid, F1, F2) -> bool:
    a, b = _flat_mask(M, F1), _flat_mask(M, F2)
    return M._r(a) + M._r(b) - M._r(a | b) == M._r(a & b)


def is_modular_flat(M: Matroid, F, flats=None) -> bool:
    a = _flat_mask(M, F)
    others = flats if flats is not None else all_flats(M)
    ra = M._r(a)
    for G in others:
        b = G.mask if isinstance(G, FlatRef) else G
        if ra + M._r(b) - M._r(a | b) != M._r(a & b):
            return False
    return True


def axiom_check(M: Matroid, trials: int = 200, seed: int = 0, exhaustive_limit: int = 12):
    """Check rank axioms; exhaustive when ``|E| <= exhaustive_limit``, else sampled.

    Returns a passing verdict or raises AxiomViolation carrying the witness.
    """
    from .verdict import AnalysisVerdict

    if trials < 1:
        raise ValueError("trials must be >= 1")
    r = M._r
    bits = M.bits
    n = len(bits)

    def unit(X, y):
        rX = r(X)
        if not 0 <= rX <= popcount(X):
            raise AxiomViolation("bounds", {"X": elements_of(X), "rank": rX})
        if not rX <= r(X | y) <= rX + 1:
            raise AxiomViolation("unit-increase", {"X": elements_of(X), "y": elements_of(y)})

    def check(X, y, z):
        unit(X, y)
        unit(X, z)
        if r(X | y) + r(X | z) < r(X | y | z) + r(X):
            raise AxiomViolation(
                "submodularity", {"X": elements_of(X), "y": elements_of(y), "z": elements_of(z)}
            )

    if n <= exhaustive_limit:
        count = 0
        for sub in range(1 << n):
            X = 0
            for i in range(n):
                if sub >> i & 1:
                    X |= bits[i]
            outside = [b for b in bits if not b & X]
            for y in outside:
                unit(X, y)
            for y, z in itertools.combinations(outside, 2):
                check(X, y, z)
                count += 1
            if not outside:
                unit(X, 0)
        return AnalysisVerdict("bound-holds", {"mode": "exhaustive", "checks": count})
    rng = random.Random(seed)
    for _ in range(trials):
        X = 0
        for b in bits:
            if rng.random() < 0.5:
                X |= b
        y, z = rng.sample(bits, 2) if n >= 2 else (0, 0)
        check(X & ~(y | z), y, z)
        # Full submodularity on a random pair of sets as well.
        A = mask_of(x for x in M.ground if rng.random() < 0.5)
        B = mask_of(x for x in M.ground if rng.random() < 0.5)
        if r(A) + r(B) < r(A | B) + r(A & B):
            raise AxiomViolation("submodularity", {"A": elements_of(A), "B": elements_of(B)})
    return AnalysisVerdict("bound-holds", {"mode": "sampled", "checks": trials, "seed": seed})
