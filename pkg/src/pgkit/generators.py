"""Seeded instance generators.

Every generator draws from a ``random.Random`` seeded with a string, so the
instance stream depends only on that string (CPython hashes str seeds with
SHA-512). Instances are emitted as construction documents and replayed, so
anything a suite reports can be rebuilt from its JSON alone.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .field import FieldSpec, field_of_order
from .geometry import ProjectiveGeometry, pg, principal_extension, quadratic_placements, truncate
from .matroid import LinearMatroid, Matroid, elements_of, flat_masks_by_rank
from .serialize import ConstructionDocument, matrix_document, pg_document, replay

BIG_RANK = 10


def make_rng(*parts) -> random.Random:
    return random.Random(":".join(str(p) for p in parts))


class Builder:
    """Applies operations to a matroid and records them in a document."""

    def __init__(self, doc: ConstructionDocument):
        self.doc = doc
        self.M = replay(doc, max_rank=BIG_RANK)

    def extend(self, flat) -> int:
        flat = tuple(sorted(flat))
        self.M, e = principal_extension(self.M, flat)
        self.doc = self.doc.with_ops(("extend", flat))
        return e

    def truncate(self):
        self.M = truncate(self.M, 1)
        self.doc = self.doc.with_ops(("truncate", None))

    def delete(self, D):
        D = tuple(sorted(D))
        self.M = self.M.delete(D)
        self.doc = self.doc.with_ops(("delete", D))

    def contract(self, C):
        C = tuple(sorted(C))
        self.M = self.M.contract(C)
        self.doc = self.doc.with_ops(("contract", C))


def random_flat(rng: random.Random, M: Matroid, rank: int) -> int:
    """Closure of ``rank`` random elements (its rank can come out smaller)."""
    picks = rng.sample(M.ground, min(rank, len(M)))
    return M.closure_mask(sum(1 << x for x in picks))


def random_line(rng: random.Random, M: Matroid) -> int:
    while True:
        F = random_flat(rng, M, 2)
        if M._r(F) == 2:
            return F


def skew_lines(rng: random.Random, R: ProjectiveGeometry, k: int) -> list[int]:
    """k mutually skew lines of R, drawn at random."""
    r = R.handle._r
    while True:
        lines: list[int] = []
        union = 0
        for _ in range(20 * k):
            if len(lines) == k:
                break
            L = random_line(rng, R.handle)
            if r(union | L) == r(union) + 2:
                lines.append(L)
                union |= L
        if len(lines) == k:
            return lines


def random_matrix_matroid(rng: random.Random, spec: FieldSpec, rows: int, cols: int) -> LinearMatroid:
    """Random columns, with a bias towards repeated and zero columns."""
    columns: dict[int, tuple[int, ...]] = {}
    for j in range(cols):
        roll = rng.random()
        if j and roll < 0.1:
            src = columns[rng.randrange(j)]
            c = rng.randrange(1, spec.q)
            columns[j] = tuple(spec.mul_table[c][v] for v in src)
        elif roll < 0.13:
            columns[j] = (0,) * rows
        else:
            columns[j] = tuple(rng.randrange(spec.q) for _ in range(rows))
    return LinearMatroid(spec, rows, columns)


def block_sum_document(spec: FieldSpec, blocks: list[list[tuple[int, ...]]]) -> ConstructionDocument:
    """Matrix document of a direct sum of column lists."""
    rows = sum(len(b[0]) for b in blocks)
    cols: dict[int, tuple[int, ...]] = {}
    offset = 0
    for b in blocks:
        h = len(b[0])
        for v in b:
            cols[len(cols)] = (0,) * offset + tuple(v) + (0,) * (rows - offset - h)
        offset += h
    return matrix_document(LinearMatroid(spec, rows, cols))


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    doc: ConstructionDocument


def corpus(seed: int = 0, size: int = 150) -> list[CorpusEntry]:
    """A mixed family of small matroids: geometries, restrictions, random
    matrices, extensions, contractions, truncations and direct sums."""
    rng = make_rng("corpus", seed)
    out: list[CorpusEntry] = []
    F2, F3, F4 = field_of_order(2), field_of_order(3), field_of_order(4)
    fixed = [
        ("pg-1-2", pg_document(F2, 2)),
        ("pg-2-2", pg_document(F2, 3)),
        ("pg-1-3", pg_document(F3, 2)),
        ("pg-2-3", pg_document(F3, 3)),
        ("pg-1-4", pg_document(F4, 2)),
        ("u23+u11", block_sum_document(F2, [[(1, 0), (0, 1), (1, 1)], [(1,)]])),
        ("fano+fano", block_sum_document(F2, [list(pg(3, F2).points), list(pg(3, F2).points)])),
    ]
    out.extend(CorpusEntry(n, d) for n, d in fixed)
    kinds = ["restriction", "matrix", "extension", "contraction", "truncation", "sum"]
    i = 0
    while len(out) < size:
        kind = kinds[i % len(kinds)]
        i += 1
        name = f"{kind}-{i}"
        if kind == "restriction":
            q, n = rng.choice([(2, 3), (2, 4), (3, 3), (4, 2), (4, 3)])
            b = Builder(pg_document(field_of_order(q), n))
            size_keep = rng.randint(3, min(12, len(b.M)))
            keep = set(rng.sample(b.M.ground, size_keep))
            b.delete([x for x in b.M.ground if x not in keep])
        elif kind == "matrix":
            spec = rng.choice([F2, F3, F4])
            M = random_matrix_matroid(rng, spec, rng.randint(2, 4), rng.randint(3, 10))
            b = Builder(matrix_document(M))
        elif kind == "extension":
            q, n = rng.choice([(2, 3), (2, 3), (3, 3), (2, 4)])
            b = Builder(pg_document(field_of_order(q), n))
            if len(b.M) > 9:
                keep = set(rng.sample(b.M.ground, rng.randint(5, 9)))
                b.delete([x for x in b.M.ground if x not in keep])
            for _ in range(rng.randint(1, 3)):
                b.extend(elements_of(random_flat(rng, b.M, rng.randint(1, b.M.r))))
        elif kind == "contraction":
            q, n = rng.choice([(2, 4), (3, 4), (2, 5)])
            b = Builder(pg_document(field_of_order(q), n))
            keep = set(rng.sample(b.M.ground, rng.randint(6, 13)))
            b.delete([x for x in b.M.ground if x not in keep])
            b.contract([rng.choice(b.M.ground)])
        elif kind == "truncation":
            q, n = rng.choice([(2, 4), (3, 3), (2, 3)])
            b = Builder(pg_document(field_of_order(q), n))
            keep = set(rng.sample(b.M.ground, rng.randint(4, min(12, len(b.M)))))
            b.delete([x for x in b.M.ground if x not in keep])
            if b.M.r >= 1:
                b.truncate()
        else:
            spec = rng.choice([F2, F3])
            blocks = []
            for _ in range(2):
                A = random_matrix_matroid(rng, spec, rng.randint(1, 3), rng.randint(1, 5))
                blocks.append([A.columns[x] for x in A.ground])
            b = Builder(block_sum_document(spec, blocks))
        out.append(CorpusEntry(name, b.doc))
    return out


def pg_placement_documents(q: int, n: int):
    """One document per nonempty flat F of PG(n-1,q): PG plus a point placed on F."""
    spec = field_of_order(q)
    R = pg(n, spec)
    for level in flat_masks_by_rank(R.handle, n)[1:]:
        for F in level:
            yield pg_document(spec, n, [("extend", tuple(elements_of(F)))]), F


def quadratic_document(R: ProjectiveGeometry, lines: list[int]) -> ConstructionDocument:
    return matrix_document(quadratic_placements(R, [elements_of(L) for L in lines]))


def quadratic_plane_document(R: ProjectiveGeometry, lines: list[int]) -> ConstructionDocument:
    """R plus every point of the GF(q^2)-span of the placements a + w*b on ``lines``
    that is not already a point of R. Three skew lines give a PG(2,q^2)."""
    base = quadratic_placements(R, [elements_of(L) for L in lines])
    big = base.spec
    add, mul, inv = big.add_table, big.mul_table, big.inv_table
    gens = [base.columns[x] for x in base.ground if x >= len(R.points)]

    def normalized(v):
        lead = next((c for c in v if c), 0)
        return tuple(mul[inv[lead]][c] for c in v) if lead else None

    seen = {tuple(v) for v in R.points} | {normalized(g) for g in gens}
    cols = dict(base.columns)
    for coeffs in itertools.product(range(big.q), repeat=len(gens)):
        v = [0] * R.n
        for c, g in zip(coeffs, gens):
            if c:
                v = [add[a][mul[c][b]] for a, b in zip(v, g)]
        key = normalized(v)
        if key is not None and key not in seen:
            seen.add(key)
            cols[len(cols)] = key
    return matrix_document(LinearMatroid(big, R.n, cols))


__all__ = [
    "Builder",
    "CorpusEntry",
    "block_sum_document",
    "corpus",
    "make_rng",
    "pg_placement_documents",
    "quadratic_document",
    "quadratic_plane_document",
    "random_flat",
    "random_line",
    "random_matrix_matroid",
    "skew_lines",
]
