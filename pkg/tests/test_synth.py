from __future__ import annotations

import json
import random

import pytest

from crossbound.attraction import DEFAULT_SCHEME
from crossbound.config import load_config
from crossbound.ingest import parse_mbox
from crossbound.pipeline import run_analyze, run_ingest
from crossbound.quotes import extract_quote_blocks
from crossbound.synth import (
    GroundTruth,
    SynthParams,
    compare_metrics,
    generate_corpus,
    oracle_metrics,
    write_corpus,
)
from crossbound.synth.oracle import LABELS


def _truth(discussions, quotes=(), posters=None, roster=(), pairs=(), cross=()):
    names = {m["sender"] for d in discussions for m in d["messages"]}
    return GroundTruth(
        params={}, lists={"user": "py-list", "developer": "py-dev"}, roster=list(roster),
        posters=posters or {n: "User" for n in names}, discussions=discussions,
        pairs=list(pairs), cross=list(cross), quotes=list(quotes), revisions=[],
    )


def _disc(did, list_id, senders, start=0, key=None):
    return {
        "discussion_id": f"{list_id}/{did}", "list_id": list_id, "subject_key": key or did,
        "messages": [{"message_id": f"{did}.{i}", "sender": s, "date": start + i, "parent": None}
                     for i, s in enumerate(senders)],
    }


def test_planted_cross_set_size():
    corpus = generate_corpus(SynthParams(seed=7, planted_cross_count=5, parallel_pair_count=3))
    assert len(corpus.ground_truth.cross) == 5
    assert oracle_metrics(corpus.ground_truth)["cross"] == corpus.ground_truth.cross


def test_same_seed_same_bytes():
    a, b = generate_corpus(SynthParams(seed=5)), generate_corpus(SynthParams(seed=5))
    assert a.mboxes == b.mboxes and a.revision_logs == b.revision_logs
    assert a.ground_truth.to_dict() == b.ground_truth.to_dict()
    assert generate_corpus(SynthParams(seed=6)).mboxes != a.mboxes


def test_zero_quote_rate_means_no_quote_blocks():
    corpus = generate_corpus(SynthParams(seed=2, quote_rate=0.0))
    assert corpus.ground_truth.quotes == []
    for lid, data in corpus.mboxes.items():
        for m in parse_mbox(data, lid):
            assert extract_quote_blocks(m.body) == []


@pytest.mark.parametrize("bad", [
    dict(planted_cross_count=50),
    dict(planted_cross_count=2, parallel_pair_count=0),
    dict(quote_noise=1.5),
    dict(parallel_pair_count=40),
    dict(n_participants_per_role={"ProjectLeader": 2}),
])
def test_infeasible_params_rejected(bad):
    with pytest.raises(ValueError):
        generate_corpus(SynthParams(**bad))


def test_params_load_rejects_unknown_keys(tmp_path):
    p = tmp_path / "p.yaml"
    p.write_text("seed: 1\nbogus: 2\n")
    with pytest.raises(ValueError):
        SynthParams.load(p)
    p.write_text("seed: 1\nquote_noise: 0.2\n")
    assert SynthParams.load(p, seed=9) == SynthParams(seed=9, quote_noise=0.2)


def test_ground_truth_round_trip():
    truth = generate_corpus(SynthParams(seed=1)).ground_truth
    assert GroundTruth.from_dict(truth.to_dict()) == truth


def test_generated_structure_matches_plant():
    truth = generate_corpus(SynthParams(seed=3, malformed_rate=0.2)).ground_truth
    assert truth.malformed > 0
    m = oracle_metrics(truth)
    assert sorted(map(sorted, m["parallel_pairs"])) == sorted(map(sorted, truth.pairs))
    champions = [r["canonical_name"] for r in truth.roster if r.get("category") == "U-C"]
    assert len(champions) <= 1
    for q in truth.quotes:
        assert q["source"] != q["message_id"]


def test_oracle_q3_of_planted_counts():
    counts = [1, 1, 1, 1, 2, 2, 3, 5]
    ds = []
    for p, c in enumerate(counts):
        for k in range(c):
            ds.append(_disc(f"p{p}k{k}", "py-list", [f"p{p}"], start=100 * len(ds)))
    ds.append(_disc("dev", "py-dev", ["z"]))
    m = oracle_metrics(_truth(ds))
    assert m["lists"]["py-list"]["q3"] == 2
    assert m["lists"]["py-list"]["regular"] == ["p6", "p7"]


def test_oracle_rd_near_zero_under_independence():
    rnd = random.Random(0)
    people = {f"{lab}{i}": lab for lab in ("U", "A-D", "PL") for i in range(4)}
    roles = {n: {"U": "User", "A-D": "Developer", "PL": "ProjectLeader"}[c] for n, c in people.items()}
    names = sorted(people)
    ds = [_disc("u", "py-list", names), _disc("d", "py-dev", ["PL0"])]
    quotes = [
        {"message_id": "u.0", "list_id": "py-list", "block": k, "depth": 1,
         "quoter": rnd.choice(names), "source": "u.1", "source_sender": rnd.choice(names)}
        for k in range(6000)
    ]
    m = oracle_metrics(_truth(ds, quotes, posters=roles))
    rd = m["contingency"]["pooled"]["rd"]
    defined = [v for row in rd for v in row if v is not None]
    assert len(defined) == 9
    assert max(abs(v) for v in defined) < 0.1


def test_oracle_labels_follow_default_scheme():
    assert tuple(LABELS) == DEFAULT_SCHEME


def test_compare_metrics_reports_differences():
    assert compare_metrics({"a": 1.0, "b": [1, 2]}, {"a": 1.0 + 1e-12, "b": [1, 2]}) == []
    diffs = compare_metrics({"a": 1.0, "b": [1]}, {"a": 1.1, "c": 0})
    assert any(".a" in d for d in diffs) and any("missing" in d for d in diffs)
    edges_a = [{"source": "U", "target": "PL", "weight": 0.5}, {"source": "PL", "target": "U", "weight": 0.5}]
    assert compare_metrics(edges_a, list(reversed(edges_a))) == []


def test_pipeline_agrees_with_oracle_for_one_seed(tmp_path):
    write_corpus(SynthParams(seed=21), tmp_path)
    cfg = load_config(tmp_path / "config.yaml")
    run_ingest(cfg)
    bundle = json.loads(run_analyze(cfg).read_text())
    truth = json.loads((tmp_path / "ground_truth.json").read_text())
    assert compare_metrics(bundle["corpora"]["synthetic"]["metrics"], truth["expected"]) == []
