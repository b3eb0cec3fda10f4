"""Gateway core: event ingestion, action stream, persistence, views.

Framework-free so tests can drive it directly; the HTTP layer in
http_api.py is a thin adapter. All event processing is serialized under
one lock, which also gives per-flow arrival ordering.
"""

from __future__ import annotations

import logging
import threading
import time
from typing import Callable, Iterator, Optional

from .assistant import Assistant, RemoteProvider, ScriptedProvider
from .config import ServiceConfig
from .errors import FlowNotFound, MalformedEvent
from .index import IndexHolder, hashed_embedder
from .journal import Journal
from .protocol import ChatAction, ChatEvent
from .repo_store import RepositoryHandle, SourceMessage, open_repository
from .workflow import Conversation, FlowInstance, WorkflowEngine

logger = logging.getLogger(__name__)


def _make_embedder(config: ServiceConfig):
    if config.embedder == "remote":
        import httpx
        import numpy as np

        def embed(text: str):
            response = httpx.post(config.embedder_endpoint, json={"text": text}, timeout=30.0)
            response.raise_for_status()
            return np.asarray(response.json()["vector"], dtype=np.float64)

        return embed
    return hashed_embedder(config.embedding_dimension)


def _make_assistant(config: ServiceConfig) -> Assistant:
    if config.assistant_provider == "remote":
        from pathlib import Path

        provider = RemoteProvider(
            config.assistant_endpoint,
            timeout_secs=config.assistant_timeout_secs,
            prompt_dir=Path("prompts"),
        )
        return Assistant(provider=provider)
    return Assistant(provider=ScriptedProvider())


class Service:
    def __init__(
        self,
        config: ServiceConfig,
        *,
        clock: Callable[[], float] = time.time,
        replay: bool = True,
    ):
        self.config = config
        self.repo: RepositoryHandle = open_repository(config.repo_root, init=True)
        embedder = _make_embedder(config)
        self.index = IndexHolder(
            self.repo,
            embedder,
            dimension=config.embedding_dimension,
            max_chunk_chars=config.max_chunk_chars,
            relevance_threshold=config.relevance_threshold,
        )
        self.engine = WorkflowEngine(
            self.repo,
            self.index,
            _make_assistant(config),
            managers=config.managers,
            selection_window=config.selection_window,
            answer_top_k=config.answer_top_k,
            flow_ttl_hours=config.flow_ttl_hours,
            clock=clock,
        )
        self.journal = Journal(config.journal_path)
        self.actions: list[dict] = []  # action dicts, each carrying "seq"
        self.seq = 0
        self.seen_events: set[str] = set()
        self._lock = threading.RLock()
        self._new_action = threading.Condition(self._lock)
        if replay:
            self._replay_journal()

    # -- persistence -----------------------------------------------------

    def _replay_journal(self) -> None:
        count = 0
        for record_type, record in self.journal.read_all():
            count += 1
            if record_type == "event":
                self.seen_events.add(record["event_id"])
            elif record_type == "flow":
                flow = FlowInstance.from_dict(record)
                self.engine.flows[flow.flow_id] = flow
                for proposal in flow.issued_proposals:
                    self.engine.proposals[proposal.proposal_id] = proposal
            elif record_type == "conversation":
                conversation = Conversation.from_dict(record)
                self.engine.conversations[conversation.conversation_id] = conversation
            elif record_type == "action":
                self.actions.append(record)
                self.seq = max(self.seq, record["seq"])
        if count:
            logger.info("replayed %d journal records, resuming at seq %d", count, self.seq)

    def _emit(self, actions: list[ChatAction]) -> list[dict]:
        emitted = []
        for action in actions:
            self.seq += 1
            record = {**action.to_dict(), "seq": self.seq}
            self.journal.append("action", record)
            self.actions.append(record)
            emitted.append(record)
        if emitted:
            self._new_action.notify_all()
        return emitted

    def _snapshot_changes(self, before_flows: dict, before_convs: dict) -> None:
        for flow_id, flow in self.engine.flows.items():
            snapshot = flow.to_dict()
            if before_flows.get(flow_id) != snapshot:
                self.journal.append("flow", snapshot)
        for conv_id, conversation in self.engine.conversations.items():
            snapshot = conversation.to_dict()
            if before_convs.get(conv_id) != snapshot:
                self.journal.append("conversation", snapshot)

    # -- ingestion ---------------------------------------------------------

    def ingest_event(self, data: dict) -> dict:
        event = ChatEvent.from_dict(data)
        with self._lock:
            if event.event_id in self.seen_events:
                return {"ok": True, "duplicate": True}
            before_flows = {fid: f.to_dict() for fid, f in self.engine.flows.items()}
            before_convs = {cid: c.to_dict() for cid, c in self.engine.conversations.items()}
            self.journal.append("event", event.to_dict())
            self.seen_events.add(event.event_id)
            flow_id, actions = self._route(event)
            emitted = self._emit(actions)
            self._snapshot_changes(before_flows, before_convs)
            ack = {"ok": True, "duplicate": False}
            if flow_id:
                ack["flow_id"] = flow_id
            if emitted:
                ack["seq_start"] = emitted[0]["seq"]
            return ack

    def _route(self, event: ChatEvent) -> tuple[Optional[str], list[ChatAction]]:
        engine = self.engine
        payload = event.payload
        if event.kind == "mention":
            text = _require_str(payload, "text")
            recent = [SourceMessage.from_dict(m) for m in payload.get("recent_messages", [])]
            flow, actions = engine.handle_mention(
                event.channel_id, event.user_id, text, recent, ts=event.ts
            )
            return flow.flow_id, actions
        if event.kind == "dm":
            text = _require_str(payload, "text")
            conversation_id = payload.get("conversation_id")
            if conversation_id:
                return None, self._known_flow_errors(
                    lambda: engine.post_to_conversation(conversation_id, event.user_id, text)
                )
            flow, actions = engine.handle_direct_question(
                event.user_id, text, event.channel_id
            )
            return flow.flow_id, actions
        if event.kind == "selection":
            flow_id = _require_str(payload, "flow_id")
            selected = [SourceMessage.from_dict(m) for m in payload.get("selected", [])]
            return flow_id, self._known_flow_errors(
                lambda: engine.select_messages(flow_id, selected)
            )
        if event.kind == "button":
            return self._route_button(event)
        raise MalformedEvent(f"unhandled event kind {event.kind!r}")

    def _route_button(self, event: ChatEvent) -> tuple[Optional[str], list[ChatAction]]:
        engine = self.engine
        payload = event.payload
        action = _require_str(payload, "action")
        flow_id = _require_str(payload, "flow_id")
        if flow_id not in engine.flows:
            raise MalformedEvent("unknown flow")
        if action == "next_suggestion":
            return flow_id, engine.next_suggestion(flow_id)
        if action == "create_new":
            return flow_id, engine.create_new_document(flow_id)
        if action == "start_discussion":
            return flow_id, engine.start_discussion(flow_id)
        if action == "approve":
            return flow_id, engine.manager_decide(flow_id, event.user_id, "approve")
        if action == "reject":
            return flow_id, engine.manager_decide(flow_id, event.user_id, "reject")
        if action == "regenerate":
            return flow_id, engine.regenerate_from_discussion(flow_id)
        if action == "invite":
            invitee = _require_str(payload, "invitee_id")
            return flow_id, engine.invite_participant(flow_id, event.user_id, invitee)
        if action == "helpful":
            return flow_id, engine.question_feedback(flow_id, helpful=True)
        if action == "not_helpful":
            return flow_id, engine.question_feedback(flow_id, helpful=False)
        if action == "spawn_update":
            flow, actions = engine.spawn_update_from_question(flow_id, event.user_id)
            return flow.flow_id, actions
        raise MalformedEvent(f"unknown button action {action!r}")

    @staticmethod
    def _known_flow_errors(fn: Callable[[], list[ChatAction]]) -> list[ChatAction]:
        try:
            return fn()
        except FlowNotFound as exc:
            raise MalformedEvent("unknown flow") from exc

    # -- action stream -----------------------------------------------------

    def actions_since(self, since: int) -> list[dict]:
        with self._lock:
            return [a for a in self.actions if a["seq"] > since]

    def stream_actions(
        self, since: int = 0, *, poll_timeout: float = 1.0
    ) -> Iterator[dict]:
        """Yield actions after `since` forever, blocking for new ones."""
        cursor = since
        while True:
            with self._new_action:
                pending = [a for a in self.actions if a["seq"] > cursor]
                if not pending:
                    self._new_action.wait(timeout=poll_timeout)
                    pending = [a for a in self.actions if a["seq"] > cursor]
            for action in pending:
                cursor = action["seq"]
                yield action
            if not pending:
                yield {}  # keepalive marker; HTTP layer turns it into a blank line

    # -- inspection views ----------------------------------------------------

    def view_documents(self) -> list[str]:
        return self.repo.list_documents()

    def view_document(self, path: str) -> dict:
        doc = self.repo.read_document(path)
        return {"path": doc.path, "content": doc.content, "revision": doc.revision}

    def view_history(self, path: str) -> list[dict]:
        records = self.repo.history(path)
        return [
            {
                "revision": r.revision,
                "parent": r.parent,
                "author_time": r.author_time,
                "paths_changed": list(r.paths_changed),
                "context": r.context.to_dict() if r.context else None,
            }
            for r in records
        ]

    def view_flow(self, flow_id: str) -> dict:
        return self.engine.get_flow(flow_id).to_dict()

    def sweep(self) -> list[str]:
        with self._lock:
            before_flows = {fid: f.to_dict() for fid, f in self.engine.flows.items()}
            before_convs = {cid: c.to_dict() for cid, c in self.engine.conversations.items()}
            swept = self.engine.sweep_expired()
            if swept:
                self._snapshot_changes(before_flows, before_convs)
            return swept

    def close(self) -> None:
        self.journal.close()


def _require_str(payload: dict, key: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str) or not value:
        raise MalformedEvent(f"payload field {key!r} missing or not a string")
    return value
