"""Named, seeded verification suites with deterministic reports.

A suite is a generator of instance parameters plus a check. Parameters are
plain JSON (a construction document and a few arguments), so any instance can
be rechecked from its report entry with :func:`recheck`.
"""

from __future__ import annotations

import hashlib
import itertools
import time
from fractions import Fraction
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterator

from . import analysis as an
from .errors import AxiomViolation, PgkitError, ResourceExceeded, UnknownSuite, UnsupportedSize
from .field import field_of_order
from .generators import (
    BIG_RANK,
    Builder,
    corpus,
    make_rng,
    pg_placement_documents,
    quadratic_document,
    quadratic_plane_document,
    random_flat,
    random_line,
    random_matrix_matroid,
    skew_lines,
)
from .geometry import pg, spanning_flat
from .matching import contract_unstable_check, find_unstable, skew_dense_subset
from .matroid import Matroid, all_flats, axiom_check, elements_of, flat_masks_by_rank, is_modular_flat, point_masks
from .roundness import dense_round_restriction, phi_bound_holds, weakly_round, weakly_round_bruteforce
from .serialize import ConstructionDocument, canonical_bytes, matrix_document, parse, pg_document, replay

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"


# -- reports ----------------------------------------------------------------------


@dataclass
class InstanceResult:
    id: int
    verdict: str
    detail: dict
    params: dict

    def to_json(self, embed: bool) -> dict:
        out = {"id": self.id, "verdict": self.verdict, "detail": self.detail}
        if embed or self.verdict != PASS:
            out["params"] = self.params
        else:
            out["params_sha256"] = hashlib.sha256(canonical_bytes(self.params)).hexdigest()
        return out


@dataclass
class Report:
    suite: str
    seed: int
    config: dict
    instances: list[InstanceResult] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    started: str = ""
    wall_time: float = 0.0

    @property
    def counts(self) -> dict:
        c = {PASS: 0, FAIL: 0, SKIP: 0}
        for inst in self.instances:
            c[inst.verdict] += 1
        return c

    @property
    def status(self) -> str:
        return FAIL if self.counts[FAIL] else PASS

    @property
    def exit_code(self) -> int:
        return 1 if self.counts[FAIL] else 0

    def body(self) -> dict:
        embed = bool(self.config.get("embed_params", False))
        return {
            "suite": self.suite,
            "seed": self.seed,
            "config": self.config,
            "counts": self.counts,
            "status": self.status,
            "summary": self.summary,
            "instances": [i.to_json(embed) for i in self.instances],
        }

    def body_bytes(self) -> bytes:
        return canonical_bytes(self.body())

    def digest(self) -> str:
        return hashlib.sha256(self.body_bytes()).hexdigest()

    def to_json(self) -> dict:
        return {"meta": {"started": self.started, "wall_time_s": round(self.wall_time, 3)}, "digest": self.digest(), **self.body()}

    def to_text(self) -> str:
        """Aligned table; only the first line carries the timestamp."""
        lines = [f"# {self.suite} seed={self.seed} started={self.started} wall={self.wall_time:.2f}s"]
        rows = [("id", "verdict", "detail")]
        for inst in self.instances:
            rows.append((str(inst.id), inst.verdict, _short(inst.detail)))
        w0 = max(len(r[0]) for r in rows)
        w1 = max(len(r[1]) for r in rows)
        lines += [f"{a.rjust(w0)}  {b.ljust(w1)}  {c}" for a, b, c in rows]
        c = self.counts
        lines.append(f"total {len(self.instances)}: {c[PASS]} pass, {c[FAIL]} fail, {c[SKIP]} skip; status {self.status}")
        if self.summary:
            lines.append("summary " + _short(self.summary, 400))
        lines.append(f"digest {self.digest()}")
        return "\n".join(lines) + "\n"


def _short(d: dict, limit: int = 100) -> str:
    s = canonical_bytes(d).decode().strip()
    return s if len(s) <= limit else s[: limit - 3] + "..."


# -- suite registry ---------------------------------------------------------------


@dataclass(frozen=True)
class Suite:
    name: str
    generate: Callable[[dict, int], Iterator[dict]]
    check: Callable[[dict], tuple[str, dict]]
    defaults: dict
    big: dict
    description: str
    summarize: Callable[[list[InstanceResult]], dict] | None = None


SUITES: dict[str, Suite] = {}


def suite(name: str, description: str, defaults: dict | None = None, big: dict | None = None, summarize=None):
    def register(gen):
        def wrap(check):
            SUITES[name] = Suite(name, gen, check, defaults or {}, big or {}, description, summarize)
            return check

        return wrap

    return register


def _doc(params: dict) -> ConstructionDocument:
    return parse(canonical_bytes(params["doc"]))


def _load(params: dict) -> Matroid:
    return replay(_doc(params), max_rank=BIG_RANK)


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def _run_check(s: Suite, params: dict) -> tuple[str, dict]:
    try:
        return s.check(params)
    except ResourceExceeded as exc:
        return SKIP, {"resource": str(exc)}
    except AxiomViolation as exc:
        return FAIL, {"error": "AxiomViolation", "axiom": exc.axiom, "witness": exc.witness}
    except PgkitError as exc:
        return FAIL, {"error": type(exc).__name__, "message": str(exc)}


def run_suite(name: str, seed: int = 0, config: dict | None = None, big: bool = False) -> Report:
    """Run a suite; identical (name, seed, config, big) give identical report bodies."""
    if name not in SUITES:
        raise UnknownSuite(name)
    s = SUITES[name]
    cfg = {**s.defaults, **(s.big if big else {}), **(config or {})}
    report = Report(name, seed, cfg, started=datetime.now(timezone.utc).isoformat(timespec="seconds"))
    t0 = time.perf_counter()
    for i, params in enumerate(s.generate(cfg, seed)):
        verdict, detail = _run_check(s, params)
        report.instances.append(InstanceResult(i, verdict, detail, params))
    if s.summarize:
        report.summary = s.summarize(report.instances)
    report.wall_time = time.perf_counter() - t0
    return report


def recheck(name: str, params: dict) -> tuple[str, dict]:
    """Re-run one instance of a suite from its reported parameters."""
    if name not in SUITES:
        raise UnknownSuite(name)
    return _run_check(SUITES[name], params)


def suite_names() -> list[str]:
    return sorted(SUITES)


# -- density suites ---------------------------------------------------------------


def _gen_pg_density(cfg, seed):
    for q, n in cfg["cases"]:
        yield {"doc": pg_document(field_of_order(q), n).to_json(), "q": q, "n": n}


@suite(
    "pg-density",
    "point counts of PG(n-1,q) against (q^n-1)/(q-1)",
    defaults={"cases": [[q, n] for q in (2, 3, 4, 5) for n in (1, 2, 3, 4)] + [[2, 5], [2, 6]]},
)(_gen_pg_density)
def _check_pg_density(params):
    M = _load(params)
    eps = len(point_masks(M))
    want = an.pg_points(params["q"], params["n"])
    return _verdict(eps == want and M.r == params["n"]), {"eps": eps, "expected": want}


def _gen_truncation(cfg, seed):
    for q in cfg["q"]:
        for k in range(cfg["k_max"] + 1):
            # A truncation to rank 1 collapses every point, so the formula needs n >= 2 once k >= 1.
            for n in range(1 if k == 0 else 2, cfg["rank_max"] - k + 1):
                ops = [("truncate", None)] * k
                yield {"doc": pg_document(field_of_order(q), n + k, ops).to_json(), "q": q, "k": k, "n": n}


@suite(
    "truncation-spectrum",
    "k-fold truncations of PG(n+k-1,q) keep (q^(n+k)-1)/(q-1) points",
    defaults={"q": [2, 3], "k_max": 2, "rank_max": 5},
)(_gen_truncation)
def _check_truncation(params):
    q, k, n = params["q"], params["k"], params["n"]
    M = _load(params)
    eps = len(point_masks(M))
    oracle = an.GrowthRateOracle(q, k)
    want = oracle.truncation(n)
    gap = want - oracle.h(n)
    ok = eps == want and M.r == n and gap == q * an.matching_bound(q, k)
    return _verdict(ok), {"eps": eps, "expected": want, "formula": oracle.h(n), "gap": gap}


def _gen_projection(cfg, seed):
    rng = make_rng("projection-quantization", seed)
    for _ in range(cfg["samples"]):
        q = rng.choice(cfg["q"])
        k = rng.choice(cfg["k"])
        n = rng.randint(k + 1, cfg["rank_max"][str(q)])
        for _attempt in range(100):
            b = Builder(pg_document(field_of_order(q), n))
            C = []
            for _step in range(k):
                F = random_flat(rng, b.M, rng.randint(1, b.M.r))
                C.append(b.extend(elements_of(F)))
            cm = b.M.mask(C)
            if b.M._r(cm) == k and b.M.closure_mask(cm) == cm:
                break
        else:  # pragma: no cover - 100 rejections in a row
            raise RuntimeError("no valid projection found")
        yield {"doc": b.doc.to_json(), "q": q, "k": k, "n": n, "C": C}


def _summarize_projection(results):
    ds = sorted({r.detail["d"] for r in results if "d" in r.detail})
    between = sum(1 for r in results if r.detail.get("between_bounds"))
    return {"d_values": ds, "between_bounds": between}


@suite(
    "projection-quantization",
    "eps(N\\C) - eps(N/C) = q d with 0 <= d <= (q^2k-1)/(q^2-1)",
    defaults={"samples": 200, "q": [2, 3], "k": [1, 2], "rank_max": {"2": 5, "3": 4}},
    big={"samples": 1000, "rank_max": {"2": 5, "3": 5}},
    summarize=_summarize_projection,
)(_gen_projection)
def _check_projection(params):
    q, k, n, C = params["q"], params["k"], params["n"], params["C"]
    N = _load(params)
    cm = N.mask(C)
    if N._r(cm) != k or N.closure_mask(cm) != cm:
        return FAIL, {"error": "C is not a rank-k flat"}
    deleted, contracted = N.delete(C), N.contract(C)
    e_del, e_con = len(point_masks(deleted)), len(point_masks(contracted))
    diff = e_del - e_con
    tight = an.matching_bound(q, k)
    loose = (q ** (2 * k) - 1) // (q - 1)
    d, rem = divmod(diff, q)
    detail = {"eps_del": e_del, "eps_con": e_con, "d": d, "bound": tight, "loose_bound": loose}
    if rem or e_del != an.pg_points(q, n):
        detail["divisible"] = not rem
        return FAIL, detail
    if tight < d <= loose:
        detail["between_bounds"] = True
    return _verdict(0 <= d <= tight), detail


# -- projective frames ----------------------------------------------------------------


def _gen_pgframe(cfg, seed):
    for q, n in cfg["cases"]:
        for doc, F in pg_placement_documents(q, n):
            yield {"doc": doc.to_json(), "q": q, "n": n, "F": elements_of(F)}


@suite(
    "pgframe",
    "single placements: spanning flat recovered and the forced line minors of M/e",
    defaults={"cases": [[2, 4], [2, 5], [3, 3]]},
)(_gen_pgframe)
def _check_pgframe(params):
    q, n, F = params["q"], params["n"], params["F"]
    M = _load(params)
    R = pg(n, field_of_order(q))
    e = max(M.ground)
    S = spanning_flat(M, R, e)
    detail = {"rank_F": S.rank, "spanning_flat_ok": S.sorted() == F}
    ok = detail["spanning_flat_ok"]
    m = None
    if M.r >= 3 and S.rank == 2:
        m = q * q + 1
    elif S.rank >= 3:
        m = q * q + q + 1
    if m is not None:
        N = M.contract([e])
        v = an.line_minor(N, m)
        detail.update(m=m, minor=v.kind)
        if v.kind == "minor-found":
            detail["witness_points"] = an.replay_line_witness(N, v.witness)
            ok = ok and detail["witness_points"] >= m
        else:
            ok = False
    return _verdict(ok), detail


def _gen_singleproj(cfg, seed):
    for q, n in cfg["cases"]:
        spec = field_of_order(q)
        R = pg(n, spec)
        for L in flat_masks_by_rank(R.handle, 2)[2]:
            yield {"doc": pg_document(spec, n, [("extend", tuple(elements_of(L)))]).to_json(), "q": q, "n": n, "L": elements_of(L)}


@suite(
    "singleproj",
    "a line placement collapses to a point lying only on modular (q^2+1)-point lines",
    defaults={"cases": [[2, 4], [2, 5], [3, 3]]},
)(_gen_singleproj)
def _check_singleproj(params):
    q, L = params["q"], params["L"]
    M = _load(params)
    e = max(M.ground)
    N = M.contract([e])
    lm = N.mask(L)
    is_point = N._r(lm) == 1 and N.closure_mask(lm) == lm
    flats = [f.mask for f in all_flats(N)]
    lines = an.lines_through(N, L[0])
    sizes, modular = [], []
    for P, count in lines:
        line = N.closure_mask(P | lm)
        sizes.append(count)
        modular.append(is_modular_flat(N, elements_of(line), flats=flats))
    ok = is_point and all(c == q * q + 1 for c in sizes) and all(modular) and bool(lines)
    return _verdict(ok), {"point": is_point, "lines": len(lines), "sizes": sorted(set(sizes)), "modular": all(modular)}


# -- corpus suites ----------------------------------------------------------------------


def _corpus_params(cfg, seed, max_size=None):
    for entry in corpus(seed, cfg["corpus_size"]):
        if max_size is not None:
            M = replay(entry.doc)
            if len(M) > max_size:
                continue
        yield {"doc": entry.doc.to_json(), "name": entry.name}


def _gen_kung(cfg, seed):
    for params in _corpus_params(cfg, seed):
        for ell in cfg["ell"]:
            yield {**params, "ell": ell}
    for ell, n in cfg["tight"]:
        yield {"doc": pg_document(field_of_order(ell), n).to_json(), "name": f"pg-{n - 1}-{ell}", "ell": ell, "tight": True}


def _summarize_kung(results):
    members = sum(1 for r in results if r.detail.get("member"))
    tight = sum(1 for r in results if r.detail.get("tight"))
    return {"members": members, "tight": tight}


@suite(
    "kung",
    "eps(M) <= (l^r-1)/(l-1) on members of EX(U_{2,l+2}), tight on PG(n-1,l)",
    defaults={"corpus_size": 150, "ell": [2, 3, 4], "tight": [[2, 2], [2, 3], [2, 4], [3, 2], [3, 3], [4, 2], [4, 3]]},
    summarize=_summarize_kung,
)(_gen_kung)
def _check_kung(params):
    M = _load(params)
    ell = params["ell"]
    v = an.line_minor(M, ell + 2)
    if v.kind == "minor-found":
        ok = not params.get("tight")
        return _verdict(ok), {"member": False}
    k = an.kung_bound_check(M, ell, assume_member=True)
    detail = {"member": True, "eps": k.witness["eps"], "bound": k.witness["bound"], "tight": k.witness["tight"]}
    ok = k.kind == "bound-holds" and (k.witness["tight"] or not params.get("tight"))
    return _verdict(ok), detail


def _gen_weak_oracle(cfg, seed):
    yield from _corpus_params(cfg, seed, cfg["max_size"])


@suite(
    "weak-roundness-oracle",
    "hyperplane search for weak roundness against a double loop over all covers",
    defaults={"corpus_size": 150, "max_size": 10},
)(_gen_weak_oracle)
def _check_weak_oracle(params):
    M = _load(params)
    fast = weakly_round(M).positive
    slow = weakly_round_bruteforce(M)
    return _verdict(fast == slow), {"weakly_round": fast, "oracle": slow}


def _gen_corpus(cfg, seed):
    yield from _corpus_params(cfg, seed)


@suite(
    "getdenserestriction",
    "the dense weakly round restriction meets the golden-ratio bound",
    defaults={"corpus_size": 150},
)(_gen_corpus)
def _check_dense(params):
    M = _load(params)
    N, trace = dense_round_restriction(M)
    round_ = weakly_round(N).positive
    bound = phi_bound_holds(M, N)
    restriction = set(N.ground) <= set(M.ground) and N.r == M.rank(N.ground)
    detail = {"rank": M.r, "eps": len(point_masks(M)), "rank_N": N.r, "eps_N": len(point_masks(N)), "steps": len(trace), "N": list(N.ground)}
    return _verdict(round_ and bound and restriction), detail


@suite(
    "roundconnectivity",
    "every single-element contraction of a weakly round matroid is weakly round",
    defaults={"corpus_size": 150},
)(_gen_corpus)
def _check_roundconn(params):
    M = _load(params)
    if not weakly_round(M).positive:
        return PASS, {"weakly_round": False}
    bad = [e for e in M.ground if not weakly_round(M.contract([e])).positive]
    return _verdict(not bad), {"weakly_round": True, "contractions": len(M), "failures": bad}


# -- oracle equivalence and axioms ----------------------------------------------------


def _span_size_rank(M) -> dict[int, int]:
    """Rank of every subset as log_q of the size of its span, built by closing
    the set of vectors under addition and scalar multiples."""
    spec = M.spec
    add, mul = spec.add_table, spec.mul_table
    q = spec.q
    ground = list(M.ground)
    zero = (0,) * M.rows
    spans: dict[int, frozenset] = {0: frozenset([zero])}
    ranks = {0: 0}
    for sub in range(1, 1 << len(ground)):
        top = sub.bit_length() - 1
        prev = spans[sub & ~(1 << top)]
        v = M.columns[ground[top]]
        new = set(prev)
        for c in range(1, q):
            cv = tuple(mul[c][x] for x in v)
            for s in prev:
                new.add(tuple(add[a][b] for a, b in zip(s, cv)))
        spans[sub] = frozenset(new)
        size, r = len(new), 0
        while size > 1:
            size //= q
            r += 1
        mask = 0
        for i in range(len(ground)):
            if sub >> i & 1:
                mask |= 1 << ground[i]
        ranks[mask] = r
    return ranks


def line_minor_bruteforce(M: Matroid) -> int:
    """Largest m with a U_{2,m}-minor, from every independent (r-2)-set I and
    the points of M/I counted pairwise (0 when r < 2)."""
    r = M.r
    if r < 2:
        return 0
    best = 0
    for I in itertools.combinations(M.ground, r - 2):
        im = M.mask(I)
        if M._r(im) != r - 2:
            continue
        nonloops = [x for x in M.ground if M._r(im | (1 << x)) == r - 1]
        reps: list[int] = []
        for x in nonloops:
            if all(M._r(im | (1 << x) | (1 << y)) == r for y in reps):
                reps.append(x)
        best = max(best, len(reps))
    return best


def _gen_oracle(cfg, seed):
    rng = make_rng("oracle-equivalence", seed)
    for _ in range(cfg["matrices"]):
        spec = field_of_order(rng.choice([2, 3, 4]))
        M = random_matrix_matroid(rng, spec, rng.randint(1, 4), rng.randint(1, cfg["rank_size"]))
        yield {"kind": "rank", "doc": matrix_document(M).to_json()}
    for params in _corpus_params(cfg, seed, cfg["minor_size"]):
        yield {**params, "kind": "line-minor"}


@suite(
    "oracle-equivalence",
    "Gaussian-elimination rank and line-minor search against brute-force oracles",
    defaults={"matrices": 60, "rank_size": 10, "corpus_size": 150, "minor_size": 12},
)(_gen_oracle)
def _check_oracle(params):
    M = _load(params)
    if params["kind"] == "rank":
        ranks = _span_size_rank(M)
        bad = [m for m, r in ranks.items() if M._rank_mask(m) != r]
        return _verdict(not bad), {"subsets": len(ranks), "mismatches": [elements_of(m) for m in bad[:5]]}
    best = line_minor_bruteforce(M)
    mismatches = []
    for m in range(2, best + 2):
        found = an.line_minor(M, m).kind == "minor-found"
        if found != (m <= best):
            mismatches.append(m)
    return _verdict(not mismatches), {"largest_line_minor": best, "mismatches": mismatches}


class CorruptedOracle(Matroid):
    """Test fixture: a rank oracle that overstates the rank of one subset."""

    kind = "corrupted"

    def __init__(self, parent: Matroid, bad_mask: int):
        super().__init__(parent.ground)
        self.parent = parent
        self.bad_mask = bad_mask

    def _rank_mask(self, mask: int) -> int:
        r = self.parent._r(mask)
        return r + 2 if mask == self.bad_mask else r


def _gen_axioms(cfg, seed):
    yield from _corpus_params(cfg, seed)
    if cfg.get("corrupt"):
        doc = pg_document(field_of_order(2), 3)
        yield {"doc": doc.to_json(), "name": "corrupted-fano", "corrupt": [0, 1]}


@suite(
    "axioms",
    "rank axioms on every oracle wrapper; config corrupt=true adds a broken fixture",
    defaults={"corpus_size": 150, "trials": 200, "corrupt": False},
)(_gen_axioms)
def _check_axioms(params):
    M = _load(params)
    if "corrupt" in params:
        M = CorruptedOracle(M, M.mask(params["corrupt"]))
    v = axiom_check(M, trials=200, seed=0)
    return PASS, {"checked": v.witness}


# -- long lines and critical elements ------------------------------------------------


def _gen_longlinewin(cfg, seed):
    rng = make_rng("longlinewin", seed)
    q, n = 2, cfg["rank"]
    spec = field_of_order(q)
    for i in range(cfg["samples"]):
        b = Builder(pg_document(spec, n))
        R = b.M
        L = random_line(rng, R)
        style = i % 4
        if style == 0:  # long line plus one element off it
            for _ in range(rng.randint(3, 4)):
                b.extend(elements_of(b.M.closure_mask(L | _new_bits(b.M, R))))
            b.extend(elements_of(b.M.closure_mask(random_flat(rng, R, rng.randint(2, n)))))
        elif style == 1:  # long line only: E(M) = E(R) u L, hypotheses fail
            for _ in range(3):
                b.extend(elements_of(b.M.closure_mask(L | _new_bits(b.M, R))))
        elif style == 2:  # five-point line: one short of long
            for _ in range(2):
                b.extend(elements_of(b.M.closure_mask(L | _new_bits(b.M, R))))
            b.extend(elements_of(b.M.closure_mask(random_flat(rng, R, rng.randint(2, n)))))
        else:  # placements on distinct random flats, possibly interacting
            for _ in range(rng.randint(2, 5)):
                b.extend(elements_of(random_flat(rng, b.M, rng.randint(2, 3))))
        yield {"doc": b.doc.to_json(), "q": q, "k": 1, "n": n}


def _new_bits(M: Matroid, R: Matroid) -> int:
    return M.ground_mask & ~R.ground_mask


def _summarize_implication(results):
    applicable = sum(1 for r in results if r.detail.get("applicable"))
    return {"applicable": applicable, "vacuous": len(results) - applicable}


@suite(
    "longlinewin",
    "a (q^2+2)-point line plus an element off R and the line forces U_{2,q^2+q+1}",
    defaults={"samples": 60, "rank": 7},
    summarize=_summarize_implication,
)(_gen_longlinewin)
def _check_longlinewin(params):
    M = _load(params)
    R = pg(params["n"], field_of_order(params["q"]), max_rank=BIG_RANK)
    v = an.long_line_checks(M, R, an.FullnessParams(params["q"], params["k"]), X=params.get("X"))
    w = v.witness
    applicable = w["longlinewin"]["applicable"] or w["longlinewin2"]["applicable"]
    detail = {"applicable": applicable, "kind": v.kind}
    for key in ("longlinewin", "longlinewin2"):
        if w[key]["applicable"]:
            detail[key] = {"minor": w[key]["verdict"]["witness"], "search_ranks": w[key]["search_ranks"]}
    return _verdict(v.kind != "refuted"), detail


def _gen_longlinewin2(cfg, seed):
    rng = make_rng("longlinewin2", seed)
    q, k, n = 2, 3, cfg["rank"]
    spec = field_of_order(q)
    R = pg(n, spec, max_rank=BIG_RANK)
    bound = an.matching_bound(q, k)
    for i in range(cfg["samples"]):
        style = i % 3
        lines = skew_lines(rng, R, 3)
        if style == 0:  # free placements: three on skew lines, the rest free on their plane
            b = Builder(pg_document(spec, n))
            xs = [b.extend(elements_of(L)) for L in lines]
            for _ in range(rng.randint(bound - 5, bound + 2)):
                xs.append(b.extend(elements_of(b.M.closure_mask(b.M.mask(xs)))))
            X = xs
        else:  # the GF(q^2)-plane through three skew-line placements; style 2 adds a free point
            b = Builder(quadratic_plane_document(R, lines))
            X = [x for x in b.M.ground if x >= len(R.points)]
            plane = b.M.closure_mask(b.M.mask(X))
            X = elements_of(plane)
            if style == 2:
                X.append(b.extend(X))
        yield {"doc": b.doc.to_json(), "q": q, "k": k, "n": n, "X": sorted(X)}


@suite(
    "longlinewin2",
    "a rank-<=k set with more than (q^2k-1)/(q^2-1) points forces U_{2,q^2+q+1}",
    defaults={"samples": 51, "rank": 10},
    summarize=_summarize_implication,
)(_gen_longlinewin2)
def _check_longlinewin2(params):
    return _check_longlinewin(params)


def _gen_critical(cfg, seed):
    rng = make_rng("criticallines", seed)
    bases = [(2, 3), (2, 3), (2, 4), (3, 3), (4, 3)]
    made = 0
    attempts = 0
    while made < cfg["instances"] and attempts < cfg["max_attempts"]:
        attempts += 1
        q_base, n = rng.choice(bases)
        b = Builder(pg_document(field_of_order(q_base), n))
        for _ in range(rng.randint(0, 3)):
            b.extend(elements_of(random_flat(rng, b.M, rng.randint(1, b.M.r))))
        if rng.random() < 0.2 and b.M.r >= 3:
            b.truncate()
        q, k = rng.choice([(2, 0), (2, 1), (3, 0), (3, 1)])
        params = an.FullnessParams(q, k)
        if an.fullness(b.M, params) is not an.Fullness.OVERFULL:
            continue
        crit = an.critical_elements(b.M, params)
        if not crit:
            continue
        e = rng.choice(crit)
        made += 1
        yield {"doc": b.doc.to_json(), "q": q, "k": k, "e": e}


@suite(
    "criticallines",
    "a critical element sits on a long line or on enough (q+2)-point lines",
    defaults={"instances": 60, "max_attempts": 5000},
)(_gen_critical)
def _check_critical(params):
    M = _load(params)
    v = an.critical_dichotomy_check(M, an.FullnessParams(params["q"], params["k"]), params["e"])
    w = v.witness
    detail = {"outcome": w.get("outcome"), "long": len(w["long_lines"]), "medium": len(w["medium_lines"]), "needed": w["needed_medium"]}
    return _verdict(v.kind == "bound-holds"), detail


# -- matchings and skew subsets --------------------------------------------------------


def _gen_contractunstable(cfg, seed):
    rng = make_rng("contractunstable", seed)
    cases = cfg["cases"]
    for i in range(cfg["samples"]):
        q, rank, k, style = cases[i % len(cases)]
        R = pg(rank, field_of_order(q))
        lines = skew_lines(rng, R, k)
        if style == "quadratic":
            doc = quadratic_document(R, lines)
        else:
            doc = pg_document(field_of_order(q), rank, [("extend", tuple(elements_of(L))) for L in lines])
        X = list(range(len(R.points), len(R.points) + k))
        n = rng.randint(k + 1, rank - k)
        yield {"doc": doc.to_json(), "q": q, "rank": rank, "k": k, "n": n, "X": X}


@suite(
    "contractunstable",
    "contracting an R-unstable set leaves a full rank-n minor with a (q^2+1)-point line",
    defaults={
        "samples": 60,
        "cases": [[2, 5, 1, "free"], [2, 5, 1, "quadratic"], [2, 5, 2, "quadratic"], [3, 4, 1, "quadratic"]],
    },
)(_gen_contractunstable)
def _check_contractunstable(params):
    M = _load(params)
    q, k = params["q"], params["k"]
    R = pg(params["rank"], field_of_order(q))
    u = find_unstable(M, R, k)
    v = contract_unstable_check(M, R, params["X"], params["n"])
    w = v.witness
    detail = {"unstable_found": u.kind == "witness", "eps": w["eps"], "threshold": w["threshold"], "fullness": w["fullness"]}
    detail["line_points"] = w["line"]["points"] if w["line"] else None
    detail["closure_meets_R"] = w["closure_meets_R"]
    return _verdict(u.kind == "witness" and v.kind == "bound-holds"), detail


def _gen_skewsubset(cfg, seed):
    rng = make_rng("skewsubset", seed)
    spec = field_of_order(2)
    made = 0
    while made < cfg["samples"]:
        n = rng.randint(3, cfg["rank_max"])
        b = Builder(pg_document(spec, n))
        if rng.random() < 0.5:
            keep = set(rng.sample(b.M.ground, rng.randint(n + 2, len(b.M))))
            b.delete([x for x in b.M.ground if x not in keep])
        M = b.M
        if M.r < 2:
            continue
        ground = list(M.ground)
        rng.shuffle(ground)
        cut = rng.randint(1, len(ground) - 1)
        A, rest = ground[:cut], ground[cut:]
        B = rest[: rng.randint(0, min(len(rest), 3))]
        rB = M.rank(B)
        if rB >= M.r:
            continue
        t = rng.randint(rB, M.r - 1)
        mu = rng.choice([Fraction(3, 2), Fraction(2), Fraction(5, 2)])
        epsA = len(point_masks(M, A))
        lam = Fraction(epsA) / mu ** M.rank(A) * Fraction(rng.randint(1, 3), 4)
        made += 1
        yield {
            "doc": b.doc.to_json(),
            "A": sorted(A),
            "B": sorted(B),
            "mu": [mu.numerator, mu.denominator],
            "lam": [lam.numerator, lam.denominator],
            "ell": 2,
            "t": t,
        }


@suite(
    "skewsubset",
    "a dense set has a dense subset skew to a low-rank set",
    defaults={"samples": 60, "rank_max": 5},
)(_gen_skewsubset)
def _check_skewsubset(params):
    M = _load(params)
    mu = Fraction(*params["mu"])
    lam = Fraction(*params["lam"])
    v = skew_dense_subset(M, params["A"], params["B"], mu, lam, params["ell"], params["t"])
    return _verdict(v.kind == "witness"), dict(v.witness)


# -- atlas and growth table -------------------------------------------------------------


@dataclass(frozen=True)
class AtlasEntry:
    q: int
    k: int
    construction: dict
    eps_del: int
    eps_con: int

    @property
    def d(self) -> int:
        return (self.eps_del - self.eps_con) // self.q

    def to_json(self) -> dict:
        return {"q": self.q, "k": self.k, "construction": self.construction, "eps_del": self.eps_del, "eps_con": self.eps_con, "d": self.d}


def _atlas_entry(q, k, b: Builder, C) -> AtlasEntry | None:
    cm = b.M.mask(C)
    if b.M._r(cm) != k or b.M.closure_mask(cm) != cm:
        return None
    e_del = len(point_masks(b.M.delete(C)))
    e_con = len(point_masks(b.M.contract(C)))
    return AtlasEntry(q, k, b.doc.to_json(), e_del, e_con)


def projection_atlas(q: int, k: int, budget: int = 500, *, seed: int = 0, rank_max: int = 4) -> list[AtlasEntry]:
    """Observed d values of k-element projections of PG(n-1,q), one entry per d.

    k = 1 walks every flat of PG(n-1,q) for n <= rank_max; k = 2 samples
    pairs of placements. ``budget`` caps the constructions evaluated. The list
    shows what was found and says nothing about values that were not.
    """
    if q not in (2, 3) or not 0 <= k <= 2:
        raise UnsupportedSize("the atlas covers q in {2,3} and k <= 2")
    spec = field_of_order(q)
    found: dict[int, AtlasEntry] = {}
    used = 0

    def record(entry):
        if entry is not None and entry.d not in found:
            found[entry.d] = entry

    if k == 0:
        b = Builder(pg_document(spec, 2))
        record(_atlas_entry(q, 0, b, []))
    elif k == 1:
        for n in range(2, rank_max + 1):
            for doc, _F in pg_placement_documents(q, n):
                if used >= budget:
                    break
                used += 1
                b = Builder(doc)
                record(_atlas_entry(q, 1, b, [max(b.M.ground)]))
    else:
        rng = make_rng("atlas", q, k, seed)
        while used < budget:
            used += 1
            n = rng.randint(2, rank_max)
            b = Builder(pg_document(spec, n))
            C = [b.extend(elements_of(random_flat(rng, b.M, rng.randint(1, b.M.r)))) for _ in range(2)]
            record(_atlas_entry(q, 2, b, C))
    return [found[d] for d in sorted(found)]


def growth_table(q: int, k: int, n_max: int, *, measure_limit: int = 400) -> list[dict]:
    """Both growth-rate formulas per rank, with measured truncation densities.

    A row is measured when PG(n+k-1,q) has at most ``measure_limit`` points
    and fits the geometry caps.
    """
    oracle = an.GrowthRateOracle(q, k)
    spec = field_of_order(q)
    rows = []
    for n in range(1, n_max + 1):
        row = {"n": n, "formula": oracle.h(n), "truncation": oracle.truncation(n), "gap": oracle.truncation(n) - oracle.h(n)}
        if an.pg_points(q, n + k) <= measure_limit:
            try:
                M = replay(pg_document(spec, n + k, [("truncate", None)] * k))
            except PgkitError:
                M = None
            if M is not None:
                row["measured"] = len(point_masks(M))
                row["matches_truncation"] = row["measured"] == row["truncation"]
        rows.append(row)
    return rows


__all__ = [
    "AtlasEntry",
    "CorruptedOracle",
    "Report",
    "SUITES",
    "growth_table",
    "line_minor_bruteforce",
    "projection_atlas",
    "recheck",
    "run_suite",
    "suite_names",
]
