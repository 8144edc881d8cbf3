"""Topic-quality metrics estimated over a comparable bilingual corpus.

Probabilities are presence-based over document pairs: ``Pr(w) = df(w) / M``
where ``df`` counts pairs whose relevant side contains the word at least
once, and ``Pr(w_i, w_j)`` counts pairs containing ``w_i`` on the first-
language side and ``w_j`` on the second.  Cross-language NPMI of a word pair
is ``log(Pr(i,j) / (Pr(i) Pr(j))) / -log Pr(i,j)``, which lies in [-1, 1];
pairs that never co-occur (or whose marginals are zero) score -1, pairs that
co-occur in every document pair score 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .topics import TopicTopWords
from .types import ComparableCorpus


@dataclass
class CooccurrenceModel:
    """Document-pair presence counts restricted to a query vocabulary."""

    n_pairs: int
    languages: tuple[str, str]
    df_l1: dict[str, int]
    df_l2: dict[str, int]
    joint: dict[tuple[str, str], int]


@dataclass
class TopicEvaluation:
    """Metrics for one pipeline run (one seed)."""

    seed: int
    config: dict
    cnpmi_per_topic: list[float]
    cnpmi_mean: float
    diversity: float
    tq: float
    empty_topics: list[int] = field(default_factory=list)
    shortfall: bool = False

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "cnpmi_mean": self.cnpmi_mean,
            "cnpmi_per_topic": self.cnpmi_per_topic,
            "diversity": self.diversity,
            "tq": self.tq,
            "empty_topics": self.empty_topics,
            "shortfall": self.shortfall,
        }


@dataclass
class EvalReport:
    """Per-seed metric records plus mean/std aggregates."""

    config: dict
    per_seed: list[TopicEvaluation]
    aggregate: dict[str, dict[str, float]]
    single_seed: bool = False

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "per_seed": [r.to_json_dict() for r in self.per_seed],
            "aggregate": self.aggregate,
            "single_seed": self.single_seed,
        }


def build_cooccurrence(
    cc: ComparableCorpus, query_vocab: dict[str, set[str]]
) -> CooccurrenceModel:
    """Count word presences and cross-side co-presences over document pairs.

    ``query_vocab`` maps each of the corpus languages to the word set worth
    tracking; joint counts are stored sparsely for that vocabulary only.
    """
    l1, l2 = cc.languages
    if set(query_vocab) != {l1, l2}:
        raise ValueError(
            f"query vocabulary languages {sorted(query_vocab)} do not match "
            f"corpus languages {[l1, l2]}"
        )
    vocab1 = query_vocab[l1]
    vocab2 = query_vocab[l2]
    if not vocab1 and not vocab2:
        raise ValueError("query vocabulary is empty")
    df_l1: dict[str, int] = {}
    df_l2: dict[str, int] = {}
    joint: dict[tuple[str, str], int] = {}
    for left, right in cc.pairs:
        present1 = set(left) & vocab1
        present2 = set(right) & vocab2
        for w in present1:
            df_l1[w] = df_l1.get(w, 0) + 1
        for w in present2:
            df_l2[w] = df_l2.get(w, 0) + 1
        for wi in present1:
            for wj in present2:
                joint[(wi, wj)] = joint.get((wi, wj), 0) + 1
    return CooccurrenceModel(
        n_pairs=cc.n_pairs, languages=(l1, l2), df_l1=df_l1, df_l2=df_l2, joint=joint
    )


def npmi_pair(model: CooccurrenceModel, word_l1: str, word_l2: str) -> float:
    """NPMI of one cross-language word pair under the fitted model."""
    m = model.n_pairs
    df1 = model.df_l1.get(word_l1, 0)
    df2 = model.df_l2.get(word_l2, 0)
    co = model.joint.get((word_l1, word_l2), 0)
    if co == 0 or df1 == 0 or df2 == 0:
        return -1.0
    if co == m:
        # Both marginals equal M as well; the independence ratio and the
        # normalizer both vanish and the defined limit is perfect association.
        return 1.0
    p1 = df1 / m
    p2 = df2 / m
    pj = co / m
    value = math.log(pj / (p1 * p2)) / (-math.log(pj))
    return min(1.0, max(-1.0, value))


def topic_cnpmi(
    top: TopicTopWords, model: CooccurrenceModel
) -> tuple[list[float], float, list[int]]:
    """Mean cross-language NPMI per topic, plus the overall mean.

    Every pair from the first-language list crossed with the second-language
    list contributes; a topic missing all words on either side scores -1 and
    its index is returned in the flagged list.
    """
    l1, l2 = model.languages
    for lang in (l1, l2):
        if lang not in top.languages:
            raise ValueError(
                f"top-words table has no language {lang!r} (has {list(top.languages)})"
            )
    per_topic: list[float] = []
    empty_topics: list[int] = []
    for k, topic in enumerate(top.topics):
        words1 = [w for w, _ in topic["words"][l1]]
        words2 = [w for w, _ in topic["words"][l2]]
        if not words1 or not words2:
            per_topic.append(-1.0)
            empty_topics.append(k)
            continue
        total = 0.0
        for wi in words1:
            for wj in words2:
                total += npmi_pair(model, wi, wj)
        per_topic.append(total / (len(words1) * len(words2)))
    mean = sum(per_topic) / len(per_topic)
    return per_topic, mean, empty_topics


def topic_diversity(top: TopicTopWords, n_clusters: int, n_top: int) -> float:
    """Unique-word fraction across all topics' per-language lists.

    The denominator uses the requested list length even when some topics came
    up short, so incomplete lists lower the score rather than hide.
    """
    if len(top.topics) != n_clusters:
        raise ValueError(
            f"top-words table covers {len(top.topics)} topics, expected {n_clusters}"
        )
    l1, l2 = top.languages[0], top.languages[-1]
    unique1 = set().union(*top.word_sets(l1)) if top.topics else set()
    unique2 = set().union(*top.word_sets(l2)) if top.topics else set()
    return (len(unique1) + len(unique2)) / (n_clusters * 2 * n_top)


def topic_quality(cnpmi_mean: float, diversity: float) -> float:
    """Combined score: ``max(0, mean CNPMI) * Diversity``."""
    return max(0.0, cnpmi_mean) * diversity


def evaluate_topics(
    top: TopicTopWords,
    model: CooccurrenceModel,
    seed: int,
    config: dict,
) -> TopicEvaluation:
    """Bundle CNPMI, Diversity, and TQ for one run into a record."""
    n_clusters = len(top.topics)
    per_topic, mean, empty = topic_cnpmi(top, model)
    diversity = topic_diversity(top, n_clusters, top.n_top)
    shortfall = any(
        topic["shortfall"][lang] for topic in top.topics for lang in top.languages
    )
    return TopicEvaluation(
        seed=seed,
        config=config,
        cnpmi_per_topic=per_topic,
        cnpmi_mean=mean,
        diversity=diversity,
        tq=topic_quality(mean, diversity),
        empty_topics=empty,
        shortfall=shortfall,
    )


def aggregate_runs(runs: list[TopicEvaluation]) -> EvalReport:
    """Mean and sample standard deviation of each metric across seeds.

    All runs must share a config (seed aside).  A single run aggregates to
    std 0 with ``single_seed`` flagged.
    """
    if not runs:
        raise ValueError("nothing to aggregate")
    base = runs[0].config
    for run in runs[1:]:
        if run.config != base:
            raise ValueError(
                f"cannot aggregate runs with different configs: {base} vs {run.config}"
            )
    seeds = [r.seed for r in runs]
    config = dict(base)
    config["seeds"] = seeds

    def stats(values: list[float]) -> dict[str, float]:
        arr = np.asarray(values, dtype=np.float64)
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        return {"mean": float(arr.mean()), "std": std}

    aggregate = {
        "cnpmi": stats([r.cnpmi_mean for r in runs]),
        "diversity": stats([r.diversity for r in runs]),
        "tq": stats([r.tq for r in runs]),
    }
    return EvalReport(
        config=config,
        per_seed=list(runs),
        aggregate=aggregate,
        single_seed=len(runs) == 1,
    )
