"""Task-shaped wrapper around the language-model provider.

Four operations: propose an edit from selected messages, answer a
question from retrieved chunks, summarize prior revision context, and
summarize a proposed change. The scripted provider is a deterministic
stand-in used by the whole test suite; the remote provider posts
task-tagged JSON to a configurable chat-completion endpoint with prompts
loaded from the prompts/ directory.
"""

from __future__ import annotations

import json
import logging
import re
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol

from .chunking import Chunk, segment_document
from .diffs import EditDiff, diff_documents
from .errors import DegenerateOutput, ProviderUnavailable
from .index import _tokens
from .repo_store import (
    DocumentFile,
    RevisionRecord,
    SourceMessage,
    normalize_content,
)

logger = logging.getLogger(__name__)

NO_SOURCE_ANSWER = "I could not find an answer to that in the repository."
NO_CONTEXT_SUMMARY = "No prior revision context."


@dataclass(frozen=True)
class EditProposal:
    proposal_id: str
    doc_path: str  # or "new:<suggested-path>" for creation
    base_revision: Optional[str]
    proposed_content: str
    change_title: str
    source_messages: tuple[SourceMessage, ...]
    candidate_rank: int

    @property
    def is_creation(self) -> bool:
        return self.doc_path.startswith("new:")

    @property
    def target_path(self) -> str:
        return self.doc_path[4:] if self.is_creation else self.doc_path

    def to_dict(self) -> dict:
        return {
            "proposal_id": self.proposal_id,
            "doc_path": self.doc_path,
            "base_revision": self.base_revision,
            "proposed_content": self.proposed_content,
            "change_title": self.change_title,
            "source_messages": [m.to_dict() for m in self.source_messages],
            "candidate_rank": self.candidate_rank,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EditProposal":
        return cls(
            proposal_id=d["proposal_id"],
            doc_path=d["doc_path"],
            base_revision=d["base_revision"],
            proposed_content=d["proposed_content"],
            change_title=d["change_title"],
            source_messages=tuple(SourceMessage.from_dict(m) for m in d["source_messages"]),
            candidate_rank=d["candidate_rank"],
        )


@dataclass(frozen=True)
class Answer:
    text: str
    cited_chunks: tuple[str, ...]


class Provider(Protocol):
    def complete(self, task: str, payload: dict) -> str: ...


class ScriptedProvider:
    """Deterministic provider: pure rules, no model.

    propose_edit appends each selected message as a bullet under the
    document heading with the largest token overlap; answers quote the
    top chunk verbatim; summaries follow fixed templates.
    """

    def complete(self, task: str, payload: dict) -> str:
        if task == "propose_edit":
            return self._propose(payload["document"], payload["messages"])
        if task == "answer_question":
            chunks = payload["chunks"]
            return chunks[0]["text"] if chunks else NO_SOURCE_ANSWER
        raise ProviderUnavailable(f"scripted provider has no rule for task {task!r}")

    def _propose(self, document: str, messages: list[str]) -> str:
        if document == "":
            title = _title_from(messages[0])
            lines = [f"# {title}", ""]
            lines += [f"* {_one_line(m)}" for m in messages]
            return "\n".join(lines) + "\n"
        content = document
        for message in messages:
            content = self._insert_bullet(content, message)
        return content

    def _insert_bullet(self, content: str, message: str) -> str:
        sections = _sections(content)
        msg_tokens = set(_tokens(message))
        best_idx, best_score = 0, -1
        for i, (_, text) in enumerate(sections):
            score = len(msg_tokens & set(_tokens(text)))
            if score > best_score:
                best_idx, best_score = i, score
        bullet = f"* {_one_line(message)}\n"
        parts = []
        for i, (_, text) in enumerate(sections):
            if i == best_idx:
                if not text.endswith("\n"):
                    text += "\n"
                # keep the section's trailing blank lines after the new bullet
                body = text
                trailing = ""
                while body.endswith("\n\n"):
                    body = body[:-1]
                    trailing += "\n"
                text = body + bullet + trailing
            parts.append(text)
        return "".join(parts)


def _one_line(text: str) -> str:
    return " ".join(text.split())


def _title_from(text: str) -> str:
    line = _one_line(text)
    return line[:60].rstrip() if len(line) > 60 else line


def _sections(content: str) -> list[tuple[tuple[str, ...], str]]:
    # generous cap: section-level granularity, no size splitting
    chunks = segment_document("_", content, max_chunk_chars=1 << 30)
    return [(c.heading_path, c.text) for c in chunks]


class RemoteProvider:
    """HTTP chat-completion adapter: POST {task, inputs...}, read {text}."""

    def __init__(self, endpoint: str, *, timeout_secs: float = 30.0,
                 prompt_dir: Optional[Path] = None, model: str = "",
                 api_key: str = ""):
        self.endpoint = endpoint
        self.timeout_secs = timeout_secs
        self.prompt_dir = prompt_dir
        self.model = model
        self.api_key = api_key

    def _render_prompt(self, task: str, payload: dict) -> Optional[str]:
        if self.prompt_dir is None:
            return None
        path = self.prompt_dir / f"{task}.txt"
        if not path.is_file():
            return None
        template = path.read_text(encoding="utf-8")
        for key, value in payload.items():
            rendered = value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)
            template = template.replace("{{" + key + "}}", rendered)
        return template

    def complete(self, task: str, payload: dict) -> str:
        import httpx

        body = {"task": task, **payload}
        prompt = self._render_prompt(task, payload)
        if prompt is not None:
            body["prompt"] = prompt
        if self.model:
            body["model"] = self.model
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(
                self.endpoint, json=body, headers=headers, timeout=self.timeout_secs
            )
            response.raise_for_status()
            return response.json()["text"]
        except Exception as exc:
            raise ProviderUnavailable(str(exc)) from exc


@dataclass
class Assistant:
    provider: Provider = field(default_factory=ScriptedProvider)

    def propose_edit(
        self, document: DocumentFile, messages: list[SourceMessage]
    ) -> tuple[str, str]:
        if not messages:
            raise ValueError("messages must be non-empty")
        base = normalize_content(document.content)
        proposed = self.provider.complete(
            "propose_edit",
            {"document": base, "path": document.path, "messages": [m.text for m in messages]},
        )
        proposed = normalize_content(proposed)
        if proposed == "" or proposed == base:
            raise DegenerateOutput(document.path)
        return proposed, _title_from(messages[0].text)

    def answer_question(self, question: str, grounding: list[Chunk]) -> Answer:
        text = self.provider.complete(
            "answer_question",
            {
                "question": question,
                "chunks": [{"chunk_id": c.chunk_id, "text": c.text} for c in grounding],
            },
        )
        cited = tuple(c.chunk_id for c in grounding if c.text and c.text in text)
        return Answer(text=text, cited_chunks=cited)

    def summarize_context(self, records: list[RevisionRecord]) -> str:
        with_context = [r for r in records if r.context is not None]
        if not with_context:
            return NO_CONTEXT_SUMMARY
        lines = [f"Context from {len(with_context)} prior revision(s):"]
        for record in with_context:
            ctx = record.context
            assert ctx is not None
            first = ctx.messages[0].text if ctx.messages else ""
            first = _one_line(first)[:80]
            lines.append(
                f'- {record.revision[:8]} by {ctx.requester_id}, '
                f'approved by {ctx.approver_id}: "{first}"'
            )
        return "\n".join(lines)

    def summarize_change(self, base_content: str, proposed_content: str) -> str:
        if base_content == proposed_content:
            raise ValueError("contents must differ")
        diff = diff_documents(base_content, proposed_content)
        sections = _changed_sections(diff)
        return f"+{diff.inserted}/-{diff.deleted} lines in {', '.join(sections)}"

    def diff_documents(self, base_content: str, proposed_content: str) -> EditDiff:
        return diff_documents(base_content, proposed_content)


_HEADING_LINE = re.compile(r"^(#{1,6})\s+(.*?)\s*#*\s*$")


def _changed_sections(diff: EditDiff) -> list[str]:
    sections: list[str] = []
    current = "document"
    for hunk in diff.hunks:
        for line in hunk.lines:
            match = _HEADING_LINE.match(line.rstrip("\n"))
            if match and hunk.op != "delete":
                current = match.group(2)
            if hunk.op in ("insert", "delete") and current not in sections:
                sections.append(current)
    return sections or ["document"]


def new_proposal_id() -> str:
    return str(uuid.uuid4())
