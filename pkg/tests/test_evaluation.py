import json
import math

import numpy as np
import pytest

from xltopics import (
    ComparableCorpus,
    aggregate_runs,
    build_cooccurrence,
    evaluate_topics,
    npmi_pair,
    topic_cnpmi,
    topic_diversity,
    topic_quality,
)
from xltopics.evaluation import TopicEvaluation
from xltopics.topics import TopicTopWords


def make_top(lists_l1, lists_l2, n_top, languages=("l1", "l2")):
    """Assemble a TopicTopWords table from plain word lists (scores faked)."""
    topics = []
    for w1, w2 in zip(lists_l1, lists_l2):
        topics.append(
            {
                "words": {
                    languages[0]: [(w, 1.0) for w in w1],
                    languages[1]: [(w, 1.0) for w in w2],
                },
                "shortfall": {
                    languages[0]: len(w1) < n_top,
                    languages[1]: len(w2) < n_top,
                },
            }
        )
    return TopicTopWords(n_top=n_top, languages=languages, topics=tuple(topics))


@pytest.fixture
def four_pair_corpus():
    # wi on the l1 side of pairs 1 and 2, wj on the l2 side of pairs 1 and 3
    return ComparableCorpus(
        pairs=(
            (("wi", "filler"), ("wj", "x")),
            (("wi",), ("y",)),
            (("z",), ("wj",)),
            (("filler",), ("x",)),
        )
    )


def test_counts_from_four_pairs(four_pair_corpus):
    model = build_cooccurrence(
        four_pair_corpus, {"l1": {"wi", "z"}, "l2": {"wj", "y"}}
    )
    assert model.n_pairs == 4
    assert model.df_l1["wi"] == 2
    assert model.df_l2["wj"] == 2
    assert model.joint[("wi", "wj")] == 1
    assert model.joint.get(("z", "y"), 0) == 0


def test_npmi_independent_pair_is_zero(four_pair_corpus):
    # Pr(wi)=Pr(wj)=0.5, Pr(wi,wj)=0.25: exactly independent, NPMI 0
    model = build_cooccurrence(four_pair_corpus, {"l1": {"wi"}, "l2": {"wj"}})
    assert npmi_pair(model, "wi", "wj") == 0.0


def test_npmi_perfect_association_is_one():
    cc = ComparableCorpus(pairs=((("a",), ("b",)), (("a",), ("b",))))
    model = build_cooccurrence(cc, {"l1": {"a"}, "l2": {"b"}})
    assert npmi_pair(model, "a", "b") == 1.0


def test_npmi_never_cooccurring_is_minus_one():
    cc = ComparableCorpus(
        pairs=((("a",), ("y",)), (("x",), ("b",)), (("x",), ("y",)))
    )
    model = build_cooccurrence(cc, {"l1": {"a"}, "l2": {"b"}})
    # both words occur, never together
    assert model.df_l1["a"] == 1 and model.df_l2["b"] == 1
    assert npmi_pair(model, "a", "b") == -1.0


def test_npmi_zero_marginal_is_minus_one(four_pair_corpus):
    model = build_cooccurrence(four_pair_corpus, {"l1": {"wi"}, "l2": {"wj"}})
    assert npmi_pair(model, "unseen", "wj") == -1.0
    assert npmi_pair(model, "wi", "unseen") == -1.0


def test_presence_not_frequency():
    cc = ComparableCorpus(
        pairs=(
            (("a", "a", "a", "a", "a"), ("b",)),
            (("x",), ("y",)),
        )
    )
    model = build_cooccurrence(cc, {"l1": {"a"}, "l2": {"b"}})
    assert model.df_l1["a"] == 1
    assert model.joint[("a", "b")] == 1


def test_query_language_mismatch(four_pair_corpus):
    with pytest.raises(ValueError, match="do not match"):
        build_cooccurrence(four_pair_corpus, {"en": {"wi"}, "zh": {"wj"}})


def test_empty_query_rejected(four_pair_corpus):
    with pytest.raises(ValueError, match="query vocabulary is empty"):
        build_cooccurrence(four_pair_corpus, {"l1": set(), "l2": set()})


def _oracle_npmi(pairs, w1, w2):
    """Direct enumeration over raw pairs, formula written out independently."""
    m = len(pairs)
    df1 = sum(1 for left, _ in pairs if w1 in left)
    df2 = sum(1 for _, right in pairs if w2 in right)
    co = sum(1 for left, right in pairs if w1 in left and w2 in right)
    if co == 0 or df1 == 0 or df2 == 0:
        return -1.0
    if co == m:
        return 1.0
    pmi = math.log((co / m) / ((df1 / m) * (df2 / m)))
    value = pmi / (-math.log(co / m))
    return min(1.0, max(-1.0, value))


def test_npmi_matches_enumeration_oracle():
    rng = np.random.default_rng(7)
    vocab1 = [f"a{i}" for i in range(6)]
    vocab2 = [f"b{i}" for i in range(6)]
    for trial in range(10):
        m = int(rng.integers(2, 21))
        pairs = []
        for _ in range(m):
            left = tuple(vocab1[i] for i in rng.integers(0, 6, size=int(rng.integers(1, 5))))
            right = tuple(vocab2[i] for i in rng.integers(0, 6, size=int(rng.integers(1, 5))))
            pairs.append((left, right))
        cc = ComparableCorpus(pairs=tuple(pairs))
        model = build_cooccurrence(cc, {"l1": set(vocab1), "l2": set(vocab2)})
        for w1 in vocab1:
            for w2 in vocab2:
                got = npmi_pair(model, w1, w2)
                want = _oracle_npmi(pairs, w1, w2)
                assert got == pytest.approx(want, abs=1e-12), (trial, w1, w2)


def test_npmi_bounds_fuzz():
    rng = np.random.default_rng(8)
    vocab1 = [f"a{i}" for i in range(4)]
    vocab2 = [f"b{i}" for i in range(4)]
    for trial in range(200):
        m = int(rng.integers(1, 12))
        pairs = tuple(
            (
                tuple(vocab1[i] for i in rng.integers(0, 4, size=int(rng.integers(1, 4)))),
                tuple(vocab2[i] for i in rng.integers(0, 4, size=int(rng.integers(1, 4)))),
            )
            for _ in range(m)
        )
        cc = ComparableCorpus(pairs=pairs)
        model = build_cooccurrence(cc, {"l1": set(vocab1), "l2": set(vocab2)})
        w1 = vocab1[int(rng.integers(4))]
        w2 = vocab2[int(rng.integers(4))]
        value = npmi_pair(model, w1, w2)
        assert -1.0 <= value <= 1.0


def test_topic_cnpmi_means_and_empty_flag(four_pair_corpus):
    model = build_cooccurrence(
        four_pair_corpus, {"l1": {"wi", "z"}, "l2": {"wj", "y"}}
    )
    top = make_top(
        lists_l1=[["wi"], []],
        lists_l2=[["wj"], ["y"]],
        n_top=1,
    )
    per_topic, mean, empty = topic_cnpmi(top, model)
    assert per_topic == [0.0, -1.0]
    assert mean == pytest.approx(-0.5, abs=1e-12)
    assert empty == [1]


def test_topic_cnpmi_averages_every_cross_pair():
    cc = ComparableCorpus(
        pairs=(
            (("a", "c"), ("b", "d")),
            (("a",), ("d",)),
            (("c",), ("b",)),
            (("e",), ("f",)),
        )
    )
    vocab = {"l1": {"a", "c"}, "l2": {"b", "d"}}
    model = build_cooccurrence(cc, vocab)
    top = make_top([["a", "c"]], [["b", "d"]], n_top=2)
    per_topic, mean, _ = topic_cnpmi(top, model)
    expected = np.mean(
        [
            _oracle_npmi(cc.pairs, w1, w2)
            for w1 in ("a", "c")
            for w2 in ("b", "d")
        ]
    )
    assert per_topic[0] == pytest.approx(expected, abs=1e-12)
    assert mean == pytest.approx(expected, abs=1e-12)


def test_topic_cnpmi_language_check(four_pair_corpus):
    model = build_cooccurrence(four_pair_corpus, {"l1": {"wi"}, "l2": {"wj"}})
    top = make_top([["wi"]], [["wj"]], n_top=1, languages=("en", "zh"))
    with pytest.raises(ValueError, match="no language"):
        topic_cnpmi(top, model)


def test_diversity_identical_lists():
    k = 50
    top = make_top([["a", "b"]] * k, [["x", "y"]] * k, n_top=2)
    assert topic_diversity(top, k, 2) == pytest.approx(0.02, abs=1e-12)


def test_diversity_disjoint_lists():
    top = make_top(
        [["a", "b"], ["c", "d"]],
        [["w", "x"], ["y", "z"]],
        n_top=2,
    )
    assert topic_diversity(top, 2, 2) == 1.0


def test_diversity_hand_case():
    top = make_top(
        [["a", "b"], ["a", "c"]],
        [["x", "y"], ["x", "y"]],
        n_top=2,
    )
    assert topic_diversity(top, 2, 2) == pytest.approx(0.625, abs=1e-12)


def test_diversity_shortfall_keeps_requested_denominator():
    # one topic produced a single word where 2 were requested
    top = make_top([["a", "b"], ["c"]], [["x", "y"], ["z"]], n_top=2)
    assert topic_diversity(top, 2, 2) == pytest.approx(6 / 8, abs=1e-12)


def test_diversity_topic_count_mismatch():
    top = make_top([["a"]], [["x"]], n_top=1)
    with pytest.raises(ValueError, match="expected 3"):
        topic_diversity(top, 3, 1)


def test_tq_values():
    assert topic_quality(-0.244, 0.570) == 0.0
    assert topic_quality(0.171, 0.603) == pytest.approx(0.103, abs=0.0005)
    assert topic_quality(0.0, 1.0) == 0.0


def test_evaluate_topics_bundles_everything(four_pair_corpus):
    model = build_cooccurrence(
        four_pair_corpus, {"l1": {"wi", "z"}, "l2": {"wj", "y"}}
    )
    top = make_top([["wi"], ["z"]], [["wj"], ["y"]], n_top=1)
    result = evaluate_topics(top, model, seed=3, config={"method": "usvd"})
    assert result.seed == 3
    assert result.cnpmi_per_topic[0] == 0.0
    assert result.diversity == 1.0
    assert result.tq == topic_quality(result.cnpmi_mean, result.diversity)
    assert result.empty_topics == []
    assert result.shortfall is False
    payload = result.to_json_dict()
    assert set(payload) == {
        "seed",
        "cnpmi_mean",
        "cnpmi_per_topic",
        "diversity",
        "tq",
        "empty_topics",
        "shortfall",
    }
    json.dumps(payload)


def _run(seed, cnpmi, diversity, config=None):
    config = config if config is not None else {"method": "usvd", "r": 16}
    return TopicEvaluation(
        seed=seed,
        config=config,
        cnpmi_per_topic=[cnpmi],
        cnpmi_mean=cnpmi,
        diversity=diversity,
        tq=topic_quality(cnpmi, diversity),
    )


def test_aggregate_identical_runs_zero_std():
    report = aggregate_runs([_run(s, 0.4, 0.8) for s in range(1, 6)])
    assert report.aggregate["cnpmi"]["mean"] == pytest.approx(0.4, abs=1e-12)
    assert report.aggregate["cnpmi"]["std"] == 0.0
    assert report.aggregate["tq"]["std"] == 0.0
    assert report.config["seeds"] == [1, 2, 3, 4, 5]
    assert report.single_seed is False


def test_aggregate_sample_std():
    report = aggregate_runs([_run(1, 0.1, 0.5), _run(2, 0.2, 0.5)])
    assert report.aggregate["cnpmi"]["mean"] == pytest.approx(0.15, abs=1e-12)
    assert report.aggregate["cnpmi"]["std"] == pytest.approx(
        0.07071067811865477, abs=1e-12
    )


def test_aggregate_single_run_flagged():
    report = aggregate_runs([_run(9, 0.3, 0.6)])
    assert report.single_seed is True
    assert report.aggregate["cnpmi"]["std"] == 0.0
    assert report.aggregate["diversity"]["std"] == 0.0


def test_aggregate_rejects_mixed_configs():
    runs = [_run(1, 0.1, 0.5), _run(2, 0.1, 0.5, config={"method": "oe", "r": 16})]
    with pytest.raises(ValueError, match="different configs"):
        aggregate_runs(runs)


def test_aggregate_rejects_empty():
    with pytest.raises(ValueError, match="nothing to aggregate"):
        aggregate_runs([])


def test_report_json_shape():
    report = aggregate_runs([_run(1, 0.1, 0.5), _run(2, 0.2, 0.5)])
    payload = report.to_json_dict()
    assert set(payload) == {"config", "per_seed", "aggregate", "single_seed"}
    assert set(payload["aggregate"]) == {"cnpmi", "diversity", "tq"}
    for metric in payload["aggregate"].values():
        assert set(metric) == {"mean", "std"}
    assert [entry["seed"] for entry in payload["per_seed"]] == [1, 2]
    json.dumps(payload)
