"""Versioned markdown document store over a local git repository.

Approved edits become commits whose messages carry the originating
conversation as machine-readable trailers; history reads decode that
context back. Git plumbing goes through the ``git`` executable so the
on-disk repository stays fully interoperable with manual edits.
"""

from __future__ import annotations

import base64
import json
import logging
import subprocess
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import (
    DocumentNotFound,
    EmptyEdit,
    MalformedTrailer,
    NotARepository,
    RevisionNotFound,
    StaleBase,
)

logger = logging.getLogger(__name__)

TRAILER_PROPOSAL = "Choir-Proposal-Id"
TRAILER_REQUESTER = "Choir-Requester"
TRAILER_APPROVER = "Choir-Approver"
TRAILER_CONTEXT = "Choir-Context"

# one writer lock per resolved repository root, shared across handles
_repo_locks: dict[str, threading.RLock] = {}
_repo_locks_guard = threading.Lock()


def normalize_content(text: str) -> str:
    """Normalize line endings to \\n and the trailing newline to exactly one."""
    if text == "":
        return ""
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    return text.rstrip("\n") + "\n"


def validate_doc_path(path: str) -> str:
    if not path or path.startswith("/") or "\\" in path:
        raise DocumentNotFound(f"invalid document path: {path!r}")
    parts = path.split("/")
    if any(p in ("", ".", "..") for p in parts):
        raise DocumentNotFound(f"invalid document path: {path!r}")
    if not path.endswith(".md"):
        raise DocumentNotFound(f"not a markdown path: {path!r}")
    return path


@dataclass(frozen=True)
class SourceMessage:
    channel_id: str
    author_id: str
    timestamp: str
    text: str

    def to_dict(self) -> dict:
        return {
            "channel_id": self.channel_id,
            "author_id": self.author_id,
            "timestamp": self.timestamp,
            "text": self.text,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SourceMessage":
        return cls(d["channel_id"], d["author_id"], d["timestamp"], d["text"])


@dataclass(frozen=True)
class ConversationContext:
    proposal_id: str
    requester_id: str
    approver_id: str
    messages: tuple[SourceMessage, ...]
    summary: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "proposal_id": self.proposal_id,
            "requester_id": self.requester_id,
            "approver_id": self.approver_id,
            "messages": [m.to_dict() for m in self.messages],
            "summary": self.summary,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConversationContext":
        return cls(
            proposal_id=d["proposal_id"],
            requester_id=d["requester_id"],
            approver_id=d["approver_id"],
            messages=tuple(SourceMessage.from_dict(m) for m in d["messages"]),
            summary=d.get("summary"),
        )


@dataclass(frozen=True)
class DocumentFile:
    path: str
    content: str
    revision: str


@dataclass(frozen=True)
class RevisionRecord:
    revision: str
    parent: Optional[str]
    author_time: int
    paths_changed: tuple[str, ...]
    context: Optional[ConversationContext]


def encode_context(
    context: ConversationContext,
    *,
    path: str,
    title: str,
    create: bool = False,
) -> str:
    """Render the bit-exact commit message carrying the conversation context.

    Layout: subject line, blank, one-line change title, blank, trailer
    block. Messages and summary travel base64-encoded so arbitrary text
    (newlines, colons, unicode) cannot break trailer parsing.
    """
    verb = "create" if create else "update"
    for label, value in (
        ("proposal_id", context.proposal_id),
        ("requester_id", context.requester_id),
        ("approver_id", context.approver_id),
    ):
        if "\n" in value or "\r" in value:
            raise ValueError(f"{label} may not contain line breaks: {value!r}")
    payload = {
        "messages": [m.to_dict() for m in context.messages],
        "summary": context.summary,
    }
    blob = base64.b64encode(
        json.dumps(payload, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    ).decode("ascii")
    title_line = " ".join(title.splitlines()) or f"{verb} {path}"
    return (
        f"choir: {verb} {path}\n"
        f"\n"
        f"{title_line}\n"
        f"\n"
        f"{TRAILER_PROPOSAL}: {context.proposal_id}\n"
        f"{TRAILER_REQUESTER}: {context.requester_id}\n"
        f"{TRAILER_APPROVER}: {context.approver_id}\n"
        f"{TRAILER_CONTEXT}: {blob}\n"
    )


def decode_context(message: str) -> Optional[ConversationContext]:
    """Parse a commit message back into its ConversationContext.

    Returns None for messages without the trailer block (foreign/manual
    commits). Raises MalformedTrailer when the context trailer is present
    but its payload is undecodable.
    """
    # trailers live in the final paragraph, per git convention
    block = message.rstrip("\n").split("\n\n")[-1]
    trailers: dict[str, str] = {}
    for line in block.split("\n"):
        key, sep, value = line.partition(": ")
        if sep and key.startswith("Choir-"):
            trailers[key] = value
    if TRAILER_CONTEXT not in trailers:
        return None
    missing = [
        k
        for k in (TRAILER_PROPOSAL, TRAILER_REQUESTER, TRAILER_APPROVER)
        if k not in trailers
    ]
    if missing:
        raise MalformedTrailer(f"context trailer present but {missing} missing")
    try:
        payload = json.loads(base64.b64decode(trailers[TRAILER_CONTEXT], validate=True))
        messages = tuple(SourceMessage.from_dict(m) for m in payload["messages"])
        summary = payload["summary"]
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedTrailer(f"undecodable context payload: {exc}") from exc
    return ConversationContext(
        proposal_id=trailers[TRAILER_PROPOSAL],
        requester_id=trailers[TRAILER_REQUESTER],
        approver_id=trailers[TRAILER_APPROVER],
        messages=messages,
        summary=summary,
    )


@dataclass
class RepositoryHandle:
    root: Path
    _lock: threading.RLock = field(repr=False, default_factory=threading.RLock)

    def _git(self, *args: str, input_text: Optional[str] = None) -> str:
        proc = subprocess.run(
            ["git", "-C", str(self.root), *args],
            input=input_text.encode("utf-8") if input_text is not None else None,
            capture_output=True,
        )
        if proc.returncode != 0:
            raise subprocess.CalledProcessError(
                proc.returncode, proc.args, proc.stdout, proc.stderr
            )
        return proc.stdout.decode("utf-8")

    def _git_ok(self, *args: str) -> Optional[str]:
        try:
            return self._git(*args)
        except subprocess.CalledProcessError:
            return None

    def head(self) -> Optional[str]:
        out = self._git_ok("rev-parse", "--verify", "HEAD")
        return out.strip() if out else None

    def list_documents(self, revision: Optional[str] = None) -> list[str]:
        rev = revision or self.head()
        if rev is None:
            return []
        out = self._git_ok("ls-tree", "-r", "--name-only", rev)
        if out is None:
            raise RevisionNotFound(rev)
        return sorted(p for p in out.splitlines() if p.endswith(".md"))

    def read_document(self, path: str, revision: Optional[str] = None) -> DocumentFile:
        validate_doc_path(path)
        rev = revision or self.head()
        if rev is None:
            raise DocumentNotFound(path)
        resolved = self._git_ok("rev-parse", "--verify", f"{rev}^{{commit}}")
        if resolved is None:
            raise RevisionNotFound(revision or "HEAD")
        resolved = resolved.strip()
        blob = self._git_ok("show", f"{resolved}:{path}")
        if blob is None:
            raise DocumentNotFound(f"{path} at {resolved}")
        return DocumentFile(path=path, content=normalize_content(blob), revision=resolved)

    def latest_revision_for(self, path: str) -> Optional[str]:
        """Hash of the most recent first-parent commit touching path, or None."""
        if self.head() is None:
            return None
        out = self._git("rev-list", "--first-parent", "-1", "HEAD", "--", path)
        return out.strip() or None

    def commit_update(
        self,
        path: str,
        new_content: str,
        context: ConversationContext,
        *,
        expected_base: Optional[str] = None,
        title: str = "",
    ) -> str:
        """Apply an approved edit as a single commit and return its hash.

        expected_base is the revision the proposal was computed against
        (None for document creation); a mismatch with the path's current
        latest revision raises StaleBase and commits nothing.
        """
        validate_doc_path(path)
        with self._lock:
            current = self.latest_revision_for(path)
            if (expected_base or None) != current:
                raise StaleBase(path, expected_base or "<none>", current or "<none>")
            new_content = normalize_content(new_content)
            if current is not None:
                existing = self.read_document(path).content
                if existing == new_content:
                    raise EmptyEdit(path)
            message = encode_context(
                context, path=path, title=title, create=current is None
            )
            file_path = self.root / path
            file_path.parent.mkdir(parents=True, exist_ok=True)
            file_path.write_text(new_content, encoding="utf-8", newline="\n")
            self._git("add", "--", path)
            self._git(
                "-c", "user.name=choir",
                "-c", "user.email=choir@localhost",
                "commit", "--quiet", "--cleanup=verbatim", "-F", "-",
                input_text=message,
            )
            revision = self.head()
            assert revision is not None
            logger.info("committed %s as %s", path, revision[:8])
            return revision

    def raw_commit_message(self, revision: str) -> str:
        """Exact message bytes of a commit, from the raw object."""
        raw = self._git("cat-file", "commit", revision)
        _, _, message = raw.partition("\n\n")
        return message

    def history(self, path: str) -> list[RevisionRecord]:
        """Newest-first first-parent revisions touching path.

        Foreign commits (no context trailers) and malformed trailers both
        yield records with context=None; only a never-existing path errors.
        """
        validate_doc_path(path)
        head = self.head()
        if head is None:
            raise DocumentNotFound(path)
        out = self._git("rev-list", "--first-parent", "HEAD", "--", path)
        revisions = out.split()
        if not revisions:
            raise DocumentNotFound(path)
        records = []
        for rev in revisions:
            records.append(self._revision_record(rev))
        return records

    def _revision_record(self, revision: str) -> RevisionRecord:
        raw = self._git("cat-file", "commit", revision)
        header, _, message = raw.partition("\n\n")
        parent: Optional[str] = None
        author_time = 0
        for line in header.splitlines():
            if line.startswith("parent ") and parent is None:
                parent = line.split()[1]
            elif line.startswith("author "):
                author_time = int(line.rsplit(" ", 2)[-2])
        changed = self._git(
            "diff-tree", "--no-commit-id", "--name-only", "-r", "--root", revision
        )
        try:
            context = decode_context(message)
        except MalformedTrailer as exc:
            logger.warning("revision %s: %s", revision[:8], exc)
            context = None
        return RevisionRecord(
            revision=revision,
            parent=parent,
            author_time=author_time,
            paths_changed=tuple(changed.split()),
            context=context,
        )


def open_repository(root: str | Path, init: bool = False) -> RepositoryHandle:
    """Open (or with init=True create) the git repository at root."""
    root = Path(root)
    if init:
        root.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            ["git", "-C", str(root), "init", "--quiet", "--initial-branch=main"],
            check=True,
            capture_output=True,
        )
    if not root.is_dir():
        raise NotARepository(str(root))
    probe = subprocess.run(
        ["git", "-C", str(root), "rev-parse", "--git-dir"], capture_output=True
    )
    if probe.returncode != 0:
        raise NotARepository(str(root))
    key = str(root.resolve())
    with _repo_locks_guard:
        lock = _repo_locks.setdefault(key, threading.RLock())
    return RepositoryHandle(root=root, _lock=lock)
