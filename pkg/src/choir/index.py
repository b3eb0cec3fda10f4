"""In-memory retrieval index over repository markdown.

The default embedder is a deterministic hashed bag-of-words: tokens are
maximal unicode-alphanumeric runs of the lowercased text, each hashed
with 64-bit FNV-1a; the hash picks a dimension (mod D) and a sign (bit
63), term frequencies accumulate, and the vector is L2-normalized.
Token-free text embeds to the all-zero vector. Remote embedding
providers plug in behind the same callable signature.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .chunking import DEFAULT_MAX_CHUNK_CHARS, Chunk, segment_document
from .repo_store import RepositoryHandle

DEFAULT_DIMENSION = 256
DEFAULT_RELEVANCE_THRESHOLD = 0.05

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

Embedder = Callable[[str], np.ndarray]


def _fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def _tokens(text: str) -> list[str]:
    runs = []
    current: list[str] = []
    for ch in text.lower():
        if ch.isalnum():
            current.append(ch)
        elif current:
            runs.append("".join(current))
            current = []
    if current:
        runs.append("".join(current))
    return runs


def hashed_embedder(dimension: int = DEFAULT_DIMENSION) -> Embedder:
    def embed(text: str) -> np.ndarray:
        vec = np.zeros(dimension, dtype=np.float64)
        for token in _tokens(text):
            h = _fnv1a_64(token.encode("utf-8"))
            sign = 1.0 if (h >> 63) == 0 else -1.0
            vec[h % dimension] += sign
        norm = np.linalg.norm(vec)
        if norm > 0.0:
            vec /= norm
        return vec

    return embed


@dataclass(frozen=True)
class IndexSnapshot:
    repo_revision: Optional[str]
    chunks: tuple[Chunk, ...]
    vectors: np.ndarray  # shape (len(chunks), D), rows unit-norm or zero

    @property
    def entries(self) -> list[tuple[Chunk, np.ndarray]]:
        return [(c, self.vectors[i]) for i, c in enumerate(self.chunks)]


def build_index(
    handle: RepositoryHandle,
    embedder: Embedder,
    *,
    dimension: int = DEFAULT_DIMENSION,
    max_chunk_chars: int = DEFAULT_MAX_CHUNK_CHARS,
) -> IndexSnapshot:
    revision = handle.head()
    chunks: list[Chunk] = []
    for path in handle.list_documents(revision):
        doc = handle.read_document(path, revision)
        chunks.extend(segment_document(path, doc.content, max_chunk_chars))
    if chunks:
        vectors = np.stack([embedder(c.text) for c in chunks])
    else:
        vectors = np.zeros((0, dimension), dtype=np.float64)
    return IndexSnapshot(repo_revision=revision, chunks=tuple(chunks), vectors=vectors)


def query_chunks(
    snapshot: IndexSnapshot, embedder: Embedder, text: str, k: int
) -> list[tuple[Chunk, float]]:
    """Top-k chunks by cosine similarity, ties by (doc_path, ordinal)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    query = embedder(text)
    if not snapshot.chunks or not np.any(query):
        return []
    scores = snapshot.vectors @ query  # rows are unit-norm, so dot = cosine
    order = sorted(
        range(len(snapshot.chunks)),
        key=lambda i: (-scores[i], snapshot.chunks[i].doc_path, snapshot.chunks[i].ordinal),
    )
    return [(snapshot.chunks[i], float(scores[i])) for i in order[:k]]


def rank_documents(
    snapshot: IndexSnapshot,
    embedder: Embedder,
    text: str,
    *,
    relevance_threshold: float = DEFAULT_RELEVANCE_THRESHOLD,
) -> list[tuple[str, float]]:
    """Documents ranked by their best chunk score; empty means nothing relevant."""
    query = embedder(text)
    if not snapshot.chunks or not np.any(query):
        return []
    scores = snapshot.vectors @ query
    best: dict[str, float] = {}
    for chunk, score in zip(snapshot.chunks, scores):
        if chunk.doc_path not in best or score > best[chunk.doc_path]:
            best[chunk.doc_path] = float(score)
    ranked = [(p, s) for p, s in best.items() if s > relevance_threshold]
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked


class IndexHolder:
    """Holds the current snapshot; rebuilds swap it atomically."""

    def __init__(
        self,
        handle: RepositoryHandle,
        embedder: Embedder,
        *,
        dimension: int = DEFAULT_DIMENSION,
        max_chunk_chars: int = DEFAULT_MAX_CHUNK_CHARS,
        relevance_threshold: float = DEFAULT_RELEVANCE_THRESHOLD,
    ):
        self._handle = handle
        self.embedder = embedder
        self._dimension = dimension
        self._max_chunk_chars = max_chunk_chars
        self.relevance_threshold = relevance_threshold
        self._rebuild_lock = threading.Lock()
        self._snapshot = build_index(
            handle, embedder, dimension=dimension, max_chunk_chars=max_chunk_chars
        )

    @property
    def snapshot(self) -> IndexSnapshot:
        return self._snapshot

    def rebuild(self) -> IndexSnapshot:
        with self._rebuild_lock:
            snapshot = build_index(
                self._handle,
                self.embedder,
                dimension=self._dimension,
                max_chunk_chars=self._max_chunk_chars,
            )
            self._snapshot = snapshot  # atomic reference swap
            return snapshot

    def query_chunks(self, text: str, k: int) -> list[tuple[Chunk, float]]:
        return query_chunks(self._snapshot, self.embedder, text, k)

    def rank_documents(self, text: str) -> list[tuple[str, float]]:
        return rank_documents(
            self._snapshot,
            self.embedder,
            text,
            relevance_threshold=self.relevance_threshold,
        )
