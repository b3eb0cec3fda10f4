"""Heading-based markdown segmentation.

Documents split at ATX headings; oversized sections split again at
paragraph boundaries, then hard-split. Concatenating a document's chunks
in ordinal order reproduces the normalized source byte-exactly, so the
chunker never trims or rewrites text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

DEFAULT_MAX_CHUNK_CHARS = 1600

_HEADING_RE = re.compile(r"^(#{1,6})\s+(.*?)\s*#*\s*$")


@dataclass(frozen=True)
class Chunk:
    chunk_id: str
    doc_path: str
    heading_path: tuple[str, ...]
    ordinal: int
    text: str

    @property
    def char_count(self) -> int:
        return len(self.text)


def _split_paragraphs(text: str) -> list[str]:
    """Split into paragraph pieces whose concatenation equals text.

    Blank-line runs stay attached to the paragraph they terminate.
    """
    pieces: list[str] = []
    current: list[str] = []
    for line in text.splitlines(keepends=True):
        starts_paragraph = (
            current
            and line.strip() != ""
            and current[-1].strip() == ""
            and any(prev.strip() for prev in current)
        )
        if starts_paragraph:
            pieces.append("".join(current))
            current = []
        current.append(line)
    if current:
        pieces.append("".join(current))
    return pieces


def _pack_pieces(pieces: list[str], limit: int) -> list[str]:
    """Greedily pack pieces into ≤limit strings, hard-splitting oversized ones."""
    out: list[str] = []
    buf = ""
    for piece in pieces:
        while len(piece) > limit:
            if buf:
                out.append(buf)
                buf = ""
            out.append(piece[:limit])
            piece = piece[limit:]
        if len(buf) + len(piece) > limit:
            out.append(buf)
            buf = piece
        else:
            buf += piece
    if buf:
        out.append(buf)
    return out


def segment_document(
    path: str, content: str, max_chunk_chars: int = DEFAULT_MAX_CHUNK_CHARS
) -> list[Chunk]:
    if content == "":
        return []

    # sections: (heading_path, text); a heading line opens its own section
    sections: list[tuple[tuple[str, ...], str]] = []
    stack: list[tuple[int, str]] = []  # (level, title)
    current_lines: list[str] = []
    current_path: tuple[str, ...] = ()

    def flush():
        if current_lines:
            sections.append((current_path, "".join(current_lines)))

    for line in content.splitlines(keepends=True):
        match = _HEADING_RE.match(line)
        if match:
            flush()
            current_lines = []
            level = len(match.group(1))
            title = match.group(2)
            while stack and stack[-1][0] >= level:
                stack.pop()
            stack.append((level, title))
            current_path = tuple(t for _, t in stack)
        current_lines.append(line)
    flush()

    chunks: list[Chunk] = []
    for heading_path, text in sections:
        if len(text) <= max_chunk_chars:
            parts = [text]
        else:
            parts = _pack_pieces(_split_paragraphs(text), max_chunk_chars)
        for part in parts:
            ordinal = len(chunks)
            chunks.append(
                Chunk(
                    chunk_id=f"{path}#{ordinal}",
                    doc_path=path,
                    heading_path=heading_path,
                    ordinal=ordinal,
                    text=part,
                )
            )
    return chunks
