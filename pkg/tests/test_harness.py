import json

import pytest

from pgkit.errors import ResourceExceeded, UnknownSuite
from pgkit.generators import corpus, make_rng
from pgkit.harness import (
    FAIL,
    PASS,
    SKIP,
    SUITES,
    Suite,
    _run_check,
    growth_table,
    projection_atlas,
    recheck,
    run_suite,
    suite_names,
)
from pgkit.serialize import serialize

EXPECTED_SUITES = {
    "axioms",
    "contractunstable",
    "criticallines",
    "getdenserestriction",
    "kung",
    "longlinewin",
    "longlinewin2",
    "oracle-equivalence",
    "pg-density",
    "pgframe",
    "projection-quantization",
    "roundconnectivity",
    "singleproj",
    "skewsubset",
    "truncation-spectrum",
    "weak-roundness-oracle",
}


def test_registry():
    assert set(suite_names()) == EXPECTED_SUITES
    with pytest.raises(UnknownSuite):
        run_suite("nope")
    with pytest.raises(UnknownSuite):
        recheck("nope", {})


def test_rng_depends_only_on_its_name():
    assert make_rng("a", 1).random() == make_rng("a", 1).random()
    assert make_rng("a", 1).random() != make_rng("a", 2).random()


def test_corpus_is_deterministic():
    a = [serialize(e.doc) for e in corpus(3, 40)]
    b = [serialize(e.doc) for e in corpus(3, 40)]
    assert a == b and len(a) == 40
    assert a != [serialize(e.doc) for e in corpus(4, 40)]


def test_report_shape_and_digest():
    r1 = run_suite("pg-density", seed=0)
    r2 = run_suite("pg-density", seed=0)
    assert r1.status == PASS and r1.counts[PASS] == 18
    assert r1.body_bytes() == r2.body_bytes() and r1.digest() == r2.digest()
    obj = r1.to_json()
    assert set(obj) >= {"meta", "digest", "suite", "seed", "config", "counts", "status", "summary", "instances"}
    assert "params_sha256" in obj["instances"][0] and "params" not in obj["instances"][0]
    json.dumps(obj)
    text = r1.to_text()
    assert text.splitlines()[-1] == f"digest {r1.digest()}"


def test_embed_params_config():
    r = run_suite("pg-density", seed=0, config={"embed_params": True})
    assert "params" in r.to_json()["instances"][0]


def test_failures_embed_replayable_params():
    r = run_suite("axioms", seed=0, config={"corpus_size": 8, "corrupt": True})
    assert r.status == FAIL and r.exit_code == 1
    failing = [i for i in r.to_json()["instances"] if i["verdict"] == FAIL]
    assert len(failing) == 1
    verdict, detail = recheck("axioms", failing[0]["params"])
    assert verdict == FAIL and detail == failing[0]["detail"]


def test_resource_limits_are_skips():
    def check(params):
        raise ResourceExceeded("cap")

    s = Suite("tmp", lambda cfg, seed: iter(()), check, {}, {}, "")
    assert _run_check(s, {})[0] == SKIP


@pytest.mark.parametrize("name", ["truncation-spectrum", "weak-roundness-oracle", "criticallines"])
def test_quick_suites_pass_and_repeat(name):
    a = run_suite(name, seed=1)
    b = run_suite(name, seed=1)
    assert a.status == PASS and a.digest() == b.digest()


def test_recheck_matches_report():
    r = run_suite("truncation-spectrum", seed=0, config={"embed_params": True})
    for inst in r.to_json()["instances"][:5]:
        assert recheck("truncation-spectrum", inst["params"]) == (inst["verdict"], inst["detail"])


def test_projection_atlas():
    assert [e.d for e in projection_atlas(2, 0)] == [0]
    assert sorted(e.d for e in projection_atlas(2, 1)) == [0, 1]
    assert 1 in {e.d for e in projection_atlas(3, 1, rank_max=3)}
    for e in projection_atlas(2, 2, budget=60):
        assert 0 <= e.d <= 5 and e.eps_del - e.eps_con == 2 * e.d


def test_growth_table():
    rows = growth_table(2, 1, 4)
    row = rows[2]
    assert (row["n"], row["formula"], row["truncation"], row["gap"], row["measured"]) == (3, 13, 15, 2, 15)
    assert growth_table(2, 0, 4)[3]["formula"] == 15
    assert growth_table(3, 0, 3)[2]["formula"] == 13
    # Truncating to rank 1 merges all points, so only n >= 2 follows the formula.
    assert rows[0]["measured"] == 1 and not rows[0]["matches_truncation"]
    assert all(r["gap"] == 2 for r in rows)


def test_every_suite_has_a_description():
    for s in SUITES.values():
        assert s.description and isinstance(s.defaults, dict)
