"""Seeded bilingual benchmark generator with planted topics and language axes.

Embeddings are ``topic center + Gaussian noise + per-language offset`` where
the offset adds +delta on the chosen axes for the first language and -delta
for the second.  Tokens are drawn from disjoint per-(topic, language)
vocabularies, and comparable pairs are generated per topic so that words of
the same topic co-occur across languages.  Everything is a deterministic
function of the settings, including the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import ComparableCorpus, Corpus, Document, EmbeddingMatrix

_MAX_CENTER_ATTEMPTS = 64


@dataclass(frozen=True)
class SynthSpec:
    num_topics: int = 5
    docs_per_group: int = 50          # documents per (topic, language)
    dim: int = 64
    separation: float = 5.0           # minimum pairwise topic-center distance
    noise_sigma: float = 1.0
    ldd_axes: tuple[tuple[int, float], ...] = ((0, 5.0),)
    languages: tuple[str, str] = ("l1", "l2")
    vocab_per_group: int = 20
    tokens_per_doc: int = 20
    pairs_per_topic: int = 40
    tokens_per_pair_side: int = 30
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ldd_axes", tuple((int(a), float(d)) for a, d in self.ldd_axes))
        object.__setattr__(self, "languages", (self.languages[0], self.languages[1]))
        if self.num_topics < 2:
            raise ValueError("num_topics must be >= 2")
        if self.docs_per_group < 1:
            raise ValueError("docs_per_group must be >= 1")
        if self.dim <= len(self.ldd_axes):
            raise ValueError(
                f"dim={self.dim} too small for {len(self.ldd_axes)} language axes"
            )
        axes = [a for a, _ in self.ldd_axes]
        if len(set(axes)) != len(axes):
            raise ValueError("ldd_axes contains duplicate axis indices")
        for axis, delta in self.ldd_axes:
            if not 0 <= axis < self.dim:
                raise ValueError(f"language axis {axis} out of range for dim={self.dim}")
            if delta < 0:
                raise ValueError("language offsets must be >= 0")
        if self.noise_sigma <= 0:
            raise ValueError("noise_sigma must be > 0")
        if self.separation <= 0:
            raise ValueError("separation must be > 0")
        if self.languages[0] == self.languages[1]:
            raise ValueError("languages must be distinct")
        if self.vocab_per_group < 1 or self.tokens_per_doc < 1:
            raise ValueError("vocab_per_group and tokens_per_doc must be >= 1")
        if self.pairs_per_topic < 1 or self.tokens_per_pair_side < 1:
            raise ValueError("pairs_per_topic and tokens_per_pair_side must be >= 1")

    @property
    def n_documents(self) -> int:
        return self.num_topics * 2 * self.docs_per_group


@dataclass
class SynthTruth:
    """Planted ground truth: per-document topic/language plus the offset axes."""

    topic: np.ndarray
    lang: list[str]
    ldd_axes: tuple[tuple[int, float], ...]

    def to_json_dict(self) -> dict:
        return {
            "topic": self.topic.astype(int).tolist(),
            "lang": list(self.lang),
            "ldd_axes": [[a, d] for a, d in self.ldd_axes],
        }


def _group_vocab(spec: SynthSpec, topic: int, lang: str) -> list[str]:
    return [f"topic{topic}_{lang}_w{j:02d}" for j in range(spec.vocab_per_group)]


def _draw_centers(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    """Random directions at radius ``separation``; retried until all pairwise
    distances clear the floor (unit directions put the expected distance at
    ~separation * sqrt(2))."""
    g = spec.num_topics
    for _ in range(_MAX_CENTER_ATTEMPTS):
        raw = rng.standard_normal((g, spec.dim))
        centers = spec.separation * raw / np.linalg.norm(raw, axis=1, keepdims=True)
        diffs = centers[:, None, :] - centers[None, :, :]
        dists = np.sqrt((diffs**2).sum(axis=2))
        if dists[np.triu_indices(g, k=1)].min() >= spec.separation:
            return centers
    raise ValueError(
        f"could not place {g} topic centers at pairwise distance >= "
        f"{spec.separation} in {spec.dim} dimensions after {_MAX_CENTER_ATTEMPTS} attempts"
    )


def generate_synthetic(
    spec: SynthSpec,
) -> tuple[Corpus, EmbeddingMatrix, ComparableCorpus, SynthTruth]:
    """Generate an aligned (corpus, embeddings, comparable pairs, truth) tuple.

    Document order is topic-major, then language, then index; embedding rows
    follow the same order.
    """
    rng = np.random.default_rng(spec.seed)
    l1, l2 = spec.languages
    centers = _draw_centers(spec, rng)

    topic_of = np.repeat(np.arange(spec.num_topics), 2 * spec.docs_per_group)
    lang_of: list[str] = []
    for _ in range(spec.num_topics):
        lang_of.extend([l1] * spec.docs_per_group)
        lang_of.extend([l2] * spec.docs_per_group)
    is_l1 = np.array([lang == l1 for lang in lang_of])

    m = spec.n_documents
    data = centers[topic_of] + rng.normal(0.0, spec.noise_sigma, size=(m, spec.dim))
    for axis, delta in spec.ldd_axes:
        data[is_l1, axis] += delta
        data[~is_l1, axis] -= delta

    token_idx = rng.integers(0, spec.vocab_per_group, size=(m, spec.tokens_per_doc))
    documents = []
    ids = []
    for row in range(m):
        g = int(topic_of[row])
        lang = lang_of[row]
        vocab = _group_vocab(spec, g, lang)
        doc_id = f"d{g:03d}-{lang}-{row:05d}"
        ids.append(doc_id)
        documents.append(
            Document(
                id=doc_id,
                lang=lang,
                tokens=tuple(vocab[j] for j in token_idx[row]),
            )
        )

    pair_idx = rng.integers(
        0,
        spec.vocab_per_group,
        size=(spec.num_topics, spec.pairs_per_topic, 2, spec.tokens_per_pair_side),
    )
    pairs = []
    for g in range(spec.num_topics):
        vocab1 = _group_vocab(spec, g, l1)
        vocab2 = _group_vocab(spec, g, l2)
        for p in range(spec.pairs_per_topic):
            left = tuple(vocab1[j] for j in pair_idx[g, p, 0])
            right = tuple(vocab2[j] for j in pair_idx[g, p, 1])
            pairs.append((left, right))

    corpus = Corpus(documents)
    emb = EmbeddingMatrix(ids=tuple(ids), data=data)
    cc = ComparableCorpus(pairs=tuple(pairs), languages=(l1, l2))
    truth = SynthTruth(topic=topic_of, lang=lang_of, ldd_axes=spec.ldd_axes)
    return corpus, emb, cc, truth
