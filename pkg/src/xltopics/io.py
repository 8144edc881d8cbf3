"""File formats: corpus JSONL, EMB1 binary embeddings, comparable-pairs JSONL.

EMB1 layout (little-endian throughout):

    bytes 0..3    ASCII magic ``EMB1``
    bytes 4..7    uint32 header length H
    bytes 8..8+H  UTF-8 JSON header ``{"m":...,"d":...,"dtype":"f32","ids":[...]}``
                  in exactly that key order, compact separators
    remainder     m*d IEEE-754 float32 values, row-major

The header serialization is canonical, so loading any valid file and writing
it back reproduces the input byte for byte.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .types import ComparableCorpus, Corpus, Document, EmbeddingMatrix

_EMB1_MAGIC = b"EMB1"


class FileFormatError(ValueError):
    """A file failed structural validation; the message carries the location."""


def _read_jsonl(path: Path) -> list[tuple[int, dict]]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FileFormatError(f"{path}: malformed JSON on line {lineno}: {exc}") from exc
            if not isinstance(obj, dict):
                raise FileFormatError(f"{path}: line {lineno} is not a JSON object")
            rows.append((lineno, obj))
    return rows


def load_corpus(path: str | Path, allow_empty: bool = False, bilingual: bool = False) -> Corpus:
    """Load a corpus from JSONL with fields ``id``, ``lang``, ``tokens``.

    With ``bilingual=True`` the corpus must contain exactly two languages.
    """
    path = Path(path)
    rows = _read_jsonl(path)
    if not rows:
        raise FileFormatError(f"{path}: empty corpus")
    docs: list[Document] = []
    line_of_id: dict[str, int] = {}
    for lineno, obj in rows:
        missing = [k for k in ("id", "lang", "tokens") if k not in obj]
        if missing:
            raise FileFormatError(f"{path}: line {lineno} missing fields {missing}")
        doc_id, lang, tokens = obj["id"], obj["lang"], obj["tokens"]
        if not isinstance(doc_id, str) or not doc_id:
            raise FileFormatError(f"{path}: line {lineno}: id must be a non-empty string")
        if not isinstance(lang, str) or not lang:
            raise FileFormatError(f"{path}: line {lineno}: lang must be a non-empty string")
        if not isinstance(tokens, list) or any(not isinstance(t, str) for t in tokens):
            raise FileFormatError(f"{path}: line {lineno}: tokens must be an array of strings")
        if doc_id in line_of_id:
            raise FileFormatError(
                f"{path}: duplicate document id {doc_id!r} on lines "
                f"{line_of_id[doc_id]} and {lineno}"
            )
        line_of_id[doc_id] = lineno
        if not tokens and not allow_empty:
            raise FileFormatError(
                f"{path}: line {lineno}: document {doc_id!r} has empty tokens"
            )
        docs.append(Document(id=doc_id, lang=lang, tokens=tuple(tokens)))
    corpus = Corpus(docs, allow_empty=True)
    if bilingual and len(corpus.languages) != 2:
        raise FileFormatError(
            f"{path}: bilingual corpus required, found {len(corpus.languages)} "
            f"languages: {list(corpus.languages)}"
        )
    return corpus


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(json.dumps(
                {"id": doc.id, "lang": doc.lang, "tokens": list(doc.tokens)},
                ensure_ascii=False,
            ))
            fh.write("\n")


def _canonical_emb1_header(m: int, d: int, ids: Sequence[str]) -> bytes:
    header = {"m": m, "d": d, "dtype": "f32", "ids": list(ids)}
    return json.dumps(header, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def write_embeddings(emb: EmbeddingMatrix, path: str | Path) -> None:
    """Write an EMB1 file; values are downcast to float32."""
    header = _canonical_emb1_header(emb.n_rows, emb.dim, emb.ids)
    payload = np.ascontiguousarray(emb.data, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(_EMB1_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(payload)


def _load_embeddings_emb1(path: Path, blob: bytes) -> EmbeddingMatrix:
    if len(blob) < 8:
        raise FileFormatError(f"{path}: truncated EMB1 file")
    (header_len,) = struct.unpack_from("<I", blob, 4)
    header_end = 8 + header_len
    if len(blob) < header_end:
        raise FileFormatError(f"{path}: truncated EMB1 header")
    try:
        header = json.loads(blob[8:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"{path}: invalid EMB1 header: {exc}") from exc
    for key in ("m", "d", "dtype", "ids"):
        if key not in header:
            raise FileFormatError(f"{path}: EMB1 header missing {key!r}")
    if header["dtype"] != "f32":
        raise FileFormatError(f"{path}: unsupported EMB1 dtype {header['dtype']!r}")
    m, d = int(header["m"]), int(header["d"])
    ids = header["ids"]
    if len(ids) != m:
        raise FileFormatError(f"{path}: EMB1 header declares m={m} but has {len(ids)} ids")
    payload = blob[header_end:]
    expected = m * d * 4
    if len(payload) != expected:
        raise FileFormatError(
            f"{path}: payload length mismatch: expected {expected} bytes "
            f"({m}x{d} float32), found {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(m, d)
    if data.size and not np.isfinite(data).all():
        raise FileFormatError(f"{path}: embedding payload contains NaN or Inf")
    return EmbeddingMatrix(ids=tuple(ids), data=data.astype(np.float64))


def _load_embeddings_jsonl(path: Path) -> EmbeddingMatrix:
    rows = _read_jsonl(path)
    if not rows:
        raise FileFormatError(f"{path}: empty embedding file")
    ids: list[str] = []
    vectors: list[list[float]] = []
    dim: int | None = None
    for lineno, obj in rows:
        if "id" not in obj or "embedding" not in obj:
            raise FileFormatError(f"{path}: line {lineno} missing 'id' or 'embedding'")
        vec = obj["embedding"]
        if not isinstance(vec, list) or not all(isinstance(v, (int, float)) for v in vec):
            raise FileFormatError(f"{path}: line {lineno}: embedding must be a number array")
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise FileFormatError(
                f"{path}: line {lineno}: embedding length {len(vec)} != expected {dim}"
            )
        ids.append(obj["id"])
        vectors.append(vec)
    data = np.asarray(vectors, dtype=np.float64)
    if data.size and not np.isfinite(data).all():
        raise FileFormatError(f"{path}: embeddings contain NaN or Inf")
    return EmbeddingMatrix(ids=tuple(ids), data=data)


def load_embeddings(path: str | Path) -> EmbeddingMatrix:
    """Load embeddings from EMB1 binary or the JSONL fallback (sniffed by magic)."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == _EMB1_MAGIC:
        return _load_embeddings_emb1(path, path.read_bytes())
    if head[:3] == b"EMB":
        raise FileFormatError(f"{path}: bad magic/version {head!r} (expected {_EMB1_MAGIC!r})")
    return _load_embeddings_jsonl(path)


def align_corpus_embeddings(
    corpus: Corpus, emb: EmbeddingMatrix
) -> tuple[Corpus, EmbeddingMatrix]:
    """Reorder embedding rows to corpus document order; ids must match 1:1."""
    corpus_ids = corpus.doc_ids()
    emb_index = {doc_id: row for row, doc_id in enumerate(emb.ids)}
    missing = [i for i in corpus_ids if i not in emb_index]
    if missing:
        raise ValueError(f"missing embedding for {', '.join(repr(i) for i in missing)}")
    extra = [i for i in emb.ids if i not in set(corpus_ids)]
    if extra:
        raise ValueError(f"embeddings for unknown document ids: {extra}")
    if list(emb.ids) == corpus_ids:
        return corpus, emb
    order = [emb_index[i] for i in corpus_ids]
    return corpus, EmbeddingMatrix(ids=tuple(corpus_ids), data=emb.data[order])


def load_comparable_pairs(
    path: str | Path, languages: Sequence[str] = ("l1", "l2")
) -> ComparableCorpus:
    """Load comparable pairs from JSONL with fields ``l1_tokens``, ``l2_tokens``."""
    path = Path(path)
    rows = _read_jsonl(path)
    if not rows:
        raise FileFormatError(f"{path}: empty comparable corpus")
    pairs = []
    for lineno, obj in rows:
        for key in ("l1_tokens", "l2_tokens"):
            if key not in obj:
                raise FileFormatError(f"{path}: line {lineno} missing {key!r}")
            if not isinstance(obj[key], list) or any(
                not isinstance(t, str) for t in obj[key]
            ):
                raise FileFormatError(
                    f"{path}: line {lineno}: {key} must be an array of strings"
                )
        pairs.append((tuple(obj["l1_tokens"]), tuple(obj["l2_tokens"])))
    l1, l2 = languages
    return ComparableCorpus(pairs=tuple(pairs), languages=(l1, l2))


def write_comparable_pairs(cc: ComparableCorpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for left, right in cc.pairs:
            fh.write(json.dumps(
                {"l1_tokens": list(left), "l2_tokens": list(right)},
                ensure_ascii=False,
            ))
            fh.write("\n")
