"""Cluster summarization: term counts, c-TF-IDF scores, per-language top words.

The score of word ``w`` in cluster ``k`` is ``tf * ln(1 + A / f)`` where
``tf`` is the token count of ``w`` inside ``k``, ``f`` is its token count
across all clusters, and ``A`` is the average token count per cluster.  The
log base only rescales all scores by a constant, so rankings are identical
under any base; natural log is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cluster import ClusterAssignment
from .types import Corpus


@dataclass
class ClusterTermCounts:
    """Exact integer token counts per (cluster, vocabulary id)."""

    n_clusters: int
    counts: tuple[dict[int, int], ...]      # per cluster: vocab id -> tf
    cluster_totals: tuple[int, ...]         # tokens per cluster
    word_totals: dict[int, int]             # vocab id -> tf summed over clusters
    mean_tokens_per_cluster: float          # total tokens / n_clusters


@dataclass
class TopicWordScores:
    """Per-cluster word importance tables; only words with tf > 0 appear."""

    n_clusters: int
    scores: tuple[dict[int, float], ...]
    method: str = "ctfidf"


@dataclass
class TopicTopWords:
    """Per-topic, per-language ranked word lists.

    ``topics[k]["words"][lang]`` is a list of ``(surface, score)`` in
    descending score order (ties broken lexicographically), at most ``n_top``
    long; ``topics[k]["shortfall"][lang]`` flags lists shorter than requested.
    """

    n_top: int
    languages: tuple[str, ...]
    topics: tuple[dict, ...]

    def word_sets(self, lang: str) -> list[set[str]]:
        return [{w for w, _ in t["words"][lang]} for t in self.topics]

    def to_json_dict(self) -> dict:
        return {
            "topics": [
                {
                    "id": k,
                    "top_words": {
                        lang: [{"word": w, "score": s} for w, s in topic["words"][lang]]
                        for lang in self.languages
                    },
                    "shortfall": {lang: topic["shortfall"][lang] for lang in self.languages},
                }
                for k, topic in enumerate(self.topics)
            ]
        }


def cluster_term_counts(corpus: Corpus, assignment: ClusterAssignment) -> ClusterTermCounts:
    """Count tokens per (cluster, vocab id) from an aligned corpus/assignment."""
    if len(corpus) != assignment.labels.size:
        raise ValueError(
            f"corpus has {len(corpus)} documents but assignment covers "
            f"{assignment.labels.size}"
        )
    k_total = assignment.n_clusters
    counts: list[dict[int, int]] = [{} for _ in range(k_total)]
    for doc, k in zip(corpus.documents, assignment.labels):
        table = counts[int(k)]
        for tok in doc.tokens:
            wid = corpus.vocab[(tok, doc.lang)]
            table[wid] = table.get(wid, 0) + 1
    cluster_totals = tuple(sum(t.values()) for t in counts)
    word_totals: dict[int, int] = {}
    for table in counts:
        for wid, tf in table.items():
            word_totals[wid] = word_totals.get(wid, 0) + tf
    return ClusterTermCounts(
        n_clusters=k_total,
        counts=tuple(counts),
        cluster_totals=cluster_totals,
        word_totals=word_totals,
        mean_tokens_per_cluster=sum(cluster_totals) / k_total,
    )


def ctfidf_scores(counts: ClusterTermCounts) -> TopicWordScores:
    """Score every (cluster, word) with ``tf * ln(1 + A / f)``; always > 0."""
    avg = counts.mean_tokens_per_cluster
    tables = []
    for table in counts.counts:
        scored = {
            wid: tf * math.log(1.0 + avg / counts.word_totals[wid])
            for wid, tf in table.items()
        }
        tables.append(scored)
    return TopicWordScores(n_clusters=counts.n_clusters, scores=tuple(tables))


def top_words_per_language(
    scores: TopicWordScores, corpus: Corpus, n_top: int
) -> TopicTopWords:
    """The ``n_top`` best-scoring words of each language in each topic.

    Languages with fewer scored words than requested yield a shorter list and
    a shortfall flag.  Ordering is deterministic: score descending, then
    surface ascending.
    """
    if n_top < 1:
        raise ValueError("n_top must be >= 1")
    surface_of = corpus.inverse_vocab()
    topics = []
    for table in scores.scores:
        per_lang: dict[str, list[tuple[str, float]]] = {l: [] for l in corpus.languages}
        for wid, score in table.items():
            surface, lang = surface_of[wid]
            per_lang[lang].append((surface, score))
        words = {}
        shortfall = {}
        for lang in corpus.languages:
            ranked = sorted(per_lang[lang], key=lambda ws: (-ws[1], ws[0]))[:n_top]
            words[lang] = ranked
            shortfall[lang] = len(ranked) < n_top
        topics.append({"words": words, "shortfall": shortfall})
    return TopicTopWords(n_top=n_top, languages=corpus.languages, topics=tuple(topics))


def render_topics_markdown(top: TopicTopWords) -> str:
    """Human-readable table of the per-topic word lists."""
    lines = ["| topic | language | top words |", "| --- | --- | --- |"]
    for k, topic in enumerate(top.topics):
        for lang in top.languages:
            rendered = ", ".join(f"{w} ({s:.3f})" for w, s in topic["words"][lang])
            mark = " *short*" if topic["shortfall"][lang] else ""
            lines.append(f"| {k} | {lang} | {rendered}{mark} |")
    return "\n".join(lines) + "\n"
