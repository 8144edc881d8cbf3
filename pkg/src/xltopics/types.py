"""Core data containers: documents, corpora, embedding matrices, comparable pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Document:
    """One pre-tokenized document with a language tag."""

    id: str
    lang: str
    tokens: tuple[str, ...]


class Corpus:
    """An ordered collection of documents over exactly-known languages.

    The vocabulary maps ``(surface, lang)`` pairs to integer ids, assigned in
    first-occurrence order.  A surface form shared by two languages gets two
    distinct entries, so every downstream per-language word list is
    unambiguous.
    """

    def __init__(self, documents: Iterable[Document], allow_empty: bool = False):
        docs = tuple(documents)
        seen: dict[str, int] = {}
        for pos, doc in enumerate(docs):
            if not doc.id:
                raise ValueError(f"document at position {pos} has an empty id")
            if not doc.lang:
                raise ValueError(f"document {doc.id!r} has an empty language code")
            if doc.id in seen:
                raise ValueError(
                    f"duplicate document id {doc.id!r} at positions {seen[doc.id]} and {pos}"
                )
            seen[doc.id] = pos
            if not doc.tokens and not allow_empty:
                raise ValueError(
                    f"document {doc.id!r} has no tokens (pass allow_empty to accept)"
                )
        vocab: dict[tuple[str, str], int] = {}
        for doc in docs:
            for tok in doc.tokens:
                key = (tok, doc.lang)
                if key not in vocab:
                    vocab[key] = len(vocab)
        self.documents = docs
        self.languages: tuple[str, ...] = tuple(sorted({d.lang for d in docs}))
        self.vocab: dict[tuple[str, str], int] = vocab

    def __len__(self) -> int:
        return len(self.documents)

    @property
    def n_documents(self) -> int:
        return len(self.documents)

    def doc_ids(self) -> list[str]:
        return [d.id for d in self.documents]

    def doc_languages(self) -> list[str]:
        return [d.lang for d in self.documents]

    def inverse_vocab(self) -> dict[int, tuple[str, str]]:
        """Vocabulary id back to its ``(surface, lang)`` pair."""
        return {i: key for key, i in self.vocab.items()}

    def bilingual_pair(self) -> tuple[str, str]:
        """The two language codes in sorted order; error unless exactly two."""
        if len(self.languages) != 2:
            raise ValueError(
                f"corpus must contain exactly 2 languages, found {len(self.languages)}: "
                f"{list(self.languages)}"
            )
        return (self.languages[0], self.languages[1])


@dataclass
class EmbeddingMatrix:
    """Dense document representations: one row per document id.

    ``data`` is held as float64 regardless of on-disk precision; storage
    formats downcast on write.
    """

    ids: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        self.ids = tuple(self.ids)
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError(f"embedding data must be 2-D, got shape {data.shape}")
        if len(self.ids) != data.shape[0]:
            raise ValueError(
                f"id count {len(self.ids)} does not match row count {data.shape[0]}"
            )
        if len(set(self.ids)) != len(self.ids):
            dupes = sorted({i for i in self.ids if self.ids.count(i) > 1})
            raise ValueError(f"duplicate embedding ids: {dupes}")
        if data.size and not np.isfinite(data).all():
            raise ValueError("embedding data contains NaN or Inf entries")
        self.data = data

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass
class ComparableCorpus:
    """Aligned document pairs covering the same content in two languages.

    Used only to estimate co-occurrence probabilities; sides are positional
    and ``languages`` names what each side is.
    """

    pairs: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    languages: tuple[str, str] = ("l1", "l2")

    def __post_init__(self):
        self.pairs = tuple(
            (tuple(left), tuple(right)) for left, right in self.pairs
        )
        self.languages = (self.languages[0], self.languages[1])
        if not self.pairs:
            raise ValueError("comparable corpus must contain at least one pair")

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    def with_languages(self, languages: Sequence[str]) -> "ComparableCorpus":
        l1, l2 = languages
        return ComparableCorpus(self.pairs, (l1, l2))
