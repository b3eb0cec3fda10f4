"""Chat-platform-agnostic wire types.

Inbound ChatEvents arrive over HTTP; outbound ChatActions flow through
the cursor-resumable action stream. Block kinds are the rendering
vocabulary chat clients must support.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from .diffs import DiffHunk, EditDiff
from .errors import MalformedEvent
from .repo_store import SourceMessage

EVENT_KINDS = ("mention", "dm", "button", "selection")
ACTION_KINDS = ("post_message", "ephemeral_message", "open_conversation", "invite_user")
BLOCK_KINDS = ("text", "diff_view", "button_row", "message_select")


def now_rfc3339() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


def new_id() -> str:
    return str(uuid.uuid4())


@dataclass(frozen=True)
class ChatEvent:
    event_id: str
    workspace_id: str
    kind: str
    channel_id: str
    user_id: str
    payload: dict
    ts: str

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "workspace_id": self.workspace_id,
            "kind": self.kind,
            "channel_id": self.channel_id,
            "user_id": self.user_id,
            "payload": self.payload,
            "ts": self.ts,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChatEvent":
        if not isinstance(data, dict):
            raise MalformedEvent("event must be a JSON object")
        for key in ("event_id", "workspace_id", "kind", "channel_id", "user_id", "ts"):
            value = data.get(key)
            if not isinstance(value, str) or not value:
                raise MalformedEvent(f"missing or non-string field {key!r}")
        if data["kind"] not in EVENT_KINDS:
            raise MalformedEvent(f"unknown event kind {data['kind']!r}")
        payload = data.get("payload", {})
        if not isinstance(payload, dict):
            raise MalformedEvent("payload must be a JSON object")
        return cls(
            event_id=data["event_id"],
            workspace_id=data["workspace_id"],
            kind=data["kind"],
            channel_id=data["channel_id"],
            user_id=data["user_id"],
            payload=payload,
            ts=data["ts"],
        )


@dataclass(frozen=True)
class Button:
    action: str
    label: str
    flow_id: Optional[str] = None

    def to_dict(self) -> dict:
        d: dict = {"action": self.action, "label": self.label}
        if self.flow_id is not None:
            d["flow_id"] = self.flow_id
        return d


@dataclass(frozen=True)
class Block:
    kind: str
    content: dict

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.content}

    @staticmethod
    def text(text: str) -> "Block":
        return Block("text", {"text": text})

    @staticmethod
    def diff_view(diff: EditDiff) -> "Block":
        return Block(
            "diff_view",
            {"hunks": [{"op": h.op, "lines": list(h.lines)} for h in diff.hunks]},
        )

    @staticmethod
    def button_row(buttons: list[Button]) -> "Block":
        return Block("button_row", {"buttons": [b.to_dict() for b in buttons]})

    @staticmethod
    def message_select(flow_id: str, messages: list[SourceMessage]) -> "Block":
        return Block(
            "message_select",
            {"flow_id": flow_id, "messages": [m.to_dict() for m in messages]},
        )

    def as_diff(self) -> EditDiff:
        hunks = tuple(
            DiffHunk(h["op"], tuple(h["lines"])) for h in self.content["hunks"]
        )
        return EditDiff(hunks=hunks)


@dataclass(frozen=True)
class ChatAction:
    action_id: str
    kind: str
    target: str
    blocks: tuple[Block, ...]
    members: tuple[str, ...] = ()  # open_conversation / invite_user only

    def to_dict(self) -> dict:
        d = {
            "action_id": self.action_id,
            "kind": self.kind,
            "target": self.target,
            "blocks": [b.to_dict() for b in self.blocks],
        }
        if self.kind in ("open_conversation", "invite_user"):
            d["members"] = list(self.members)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ChatAction":
        blocks = tuple(
            Block(b["kind"], {k: v for k, v in b.items() if k != "kind"})
            for b in data.get("blocks", [])
        )
        return cls(
            action_id=data["action_id"],
            kind=data["kind"],
            target=data["target"],
            blocks=blocks,
            members=tuple(data.get("members", ())),
        )


def post_message(target: str, blocks: list[Block]) -> ChatAction:
    return ChatAction(new_id(), "post_message", target, tuple(blocks))


def ephemeral_message(target: str, user_id: str, blocks: list[Block]) -> ChatAction:
    # target carries "<channel>:<user>" so clients can scope visibility
    return ChatAction(new_id(), "ephemeral_message", f"{target}:{user_id}", tuple(blocks))


def open_conversation(conversation_id: str, members: set[str]) -> ChatAction:
    return ChatAction(
        new_id(), "open_conversation", conversation_id, (), members=tuple(sorted(members))
    )


def invite_user(conversation_id: str, invitee_id: str) -> ChatAction:
    return ChatAction(new_id(), "invite_user", conversation_id, (), members=(invitee_id,))
