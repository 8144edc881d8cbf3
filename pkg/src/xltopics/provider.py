"""Remote embedding service client.

Documents are sent as batches of space-joined token strings to a JSON POST
endpoint and vectors come back in request order.  Authentication is read at
call time from the environment variable named in the config; configs never
hold the secret itself, only the variable name.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

import numpy as np
import requests

from .types import Corpus, EmbeddingMatrix


class ProviderError(RuntimeError):
    pass


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    model: str
    batch_size: int = 32
    max_retries: int = 3
    timeout: float = 30.0
    auth_env: str | None = None     # name of the env var holding the token
    backoff_base: float = 0.5

    def __post_init__(self):
        if not self.endpoint:
            raise ValueError("endpoint must be non-empty")
        if not self.model:
            raise ValueError("model must be non-empty")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.backoff_base < 0:
            raise ValueError("backoff_base must be >= 0")


def _auth_headers(config: ProviderConfig) -> dict[str, str]:
    headers = {"Content-Type": "application/json"}
    if config.auth_env is not None:
        token = os.environ.get(config.auth_env)
        if not token:
            raise ProviderError(
                f"auth environment variable {config.auth_env!r} is not set"
            )
        headers["Authorization"] = f"Bearer {token}"
    return headers


def _post_batch(
    config: ProviderConfig, headers: dict[str, str], texts: list[str]
) -> list[list[float]]:
    last_error = "no attempt made"
    for attempt in range(config.max_retries + 1):
        if attempt > 0:
            time.sleep(config.backoff_base * 2 ** (attempt - 1))
        try:
            resp = requests.post(
                config.endpoint,
                json={"texts": texts, "model": config.model},
                headers=headers,
                timeout=config.timeout,
            )
        except requests.RequestException as exc:
            last_error = str(exc)
            continue
        if 500 <= resp.status_code < 600:
            last_error = f"HTTP {resp.status_code}"
            continue
        if resp.status_code != 200:
            raise ProviderError(
                f"embedding request failed with HTTP {resp.status_code}: {resp.text[:200]}"
            )
        try:
            payload = resp.json()
        except ValueError as exc:
            raise ProviderError(f"embedding response is not valid JSON: {exc}") from exc
        if "embeddings" not in payload:
            raise ProviderError("embedding response is missing the 'embeddings' field")
        vectors = payload["embeddings"]
        if len(vectors) != len(texts):
            raise ProviderError(
                f"embedding response count mismatch: got {len(vectors)} vectors "
                f"for {len(texts)} texts"
            )
        return vectors
    raise ProviderError(
        f"embedding request failed after {config.max_retries + 1} attempts: {last_error}"
    )


def fetch_embeddings(config: ProviderConfig, corpus: Corpus) -> EmbeddingMatrix:
    """Embed every document, preserving corpus order.

    Raises ProviderError on transport failure (after retries), malformed
    responses, count mismatches, or inconsistent vector lengths.
    """
    if corpus.n_documents == 0:
        return EmbeddingMatrix(ids=(), data=np.zeros((0, 0), dtype=np.float64))
    for doc in corpus.documents:
        if not doc.tokens:
            raise ProviderError(f"cannot embed document {doc.id!r}: it has no tokens")

    headers = _auth_headers(config)
    texts = [" ".join(doc.tokens) for doc in corpus.documents]
    rows: list[list[float]] = []
    dim: int | None = None
    for start in range(0, len(texts), config.batch_size):
        batch = texts[start : start + config.batch_size]
        vectors = _post_batch(config, headers, batch)
        for offset, vec in enumerate(vectors):
            if dim is None:
                dim = len(vec)
                if dim == 0:
                    raise ProviderError("embedding response contains empty vectors")
            elif len(vec) != dim:
                doc_id = corpus.documents[start + offset].id
                raise ProviderError(
                    f"inconsistent vector length for document {doc_id!r}: "
                    f"got {len(vec)}, expected {dim}"
                )
            rows.append(vec)
    data = np.asarray(rows, dtype=np.float64)
    return EmbeddingMatrix(ids=corpus.doc_ids(), data=data)
