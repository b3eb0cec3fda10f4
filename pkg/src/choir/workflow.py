"""Role-driven flow state machines.

Two flow kinds: the Requester update flow (mention → message selection →
proposal cycling → Manager discussion → approve/reject) and the
Questioner Q&A flow (direct question → grounded answer → optional
escalation into a discussion that can spawn an update flow). Every
(state, event) pair either follows the transition tables below or raises
IllegalTransition; nothing is silently ignored.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .assistant import Assistant, EditProposal, NO_CONTEXT_SUMMARY, new_proposal_id
from .diffs import diff_documents
from .errors import (
    DegenerateOutput,
    DocumentNotFound,
    FlowNotFound,
    IllegalTransition,
    NoManagersConfigured,
    NotAManager,
    NotAMember,
    SelectionNotOffered,
    StaleBase,
)
from .index import IndexHolder, _tokens
from .protocol import (
    Block,
    Button,
    ChatAction,
    ephemeral_message,
    invite_user,
    new_id,
    open_conversation,
    post_message,
)
from .repo_store import (
    ConversationContext,
    DocumentFile,
    RepositoryHandle,
    SourceMessage,
)

logger = logging.getLogger(__name__)

BOT_USER_ID = "choir"

DEFAULT_SELECTION_WINDOW = 10
DEFAULT_ANSWER_TOP_K = 4
DEFAULT_FLOW_TTL_HOURS = 72


class UpdateState(str, Enum):
    AWAITING_SELECTION = "AwaitingSelection"
    PROPOSAL_SHOWN = "ProposalShown"
    DISCUSSION_OPEN = "DiscussionOpen"
    AWAITING_DECISION = "AwaitingDecision"
    APPLIED = "Applied"
    REJECTED = "Rejected"
    ABANDONED = "Abandoned"


class QuestionState(str, Enum):
    ASKED = "Asked"
    ANSWERED = "Answered"
    DISCUSSION_OPEN = "DiscussionOpen"
    RESOLVED = "Resolved"
    ESCALATED_TO_UPDATE = "EscalatedToUpdate"


class FlowEvent(str, Enum):
    SELECT = "select"
    NEXT_SUGGESTION = "next_suggestion"
    CREATE_NEW = "create_new"
    START_DISCUSSION = "start_discussion"
    INVITE = "invite"
    REGENERATE = "regenerate"
    APPROVE = "approve"
    REJECT = "reject"
    EXPIRE = "expire"
    ANSWER = "answer"
    HELPFUL = "helpful"
    NOT_HELPFUL = "not_helpful"
    SPAWN_UPDATE = "spawn_update"


UPDATE_EVENTS = (
    FlowEvent.SELECT,
    FlowEvent.NEXT_SUGGESTION,
    FlowEvent.CREATE_NEW,
    FlowEvent.START_DISCUSSION,
    FlowEvent.INVITE,
    FlowEvent.REGENERATE,
    FlowEvent.APPROVE,
    FlowEvent.REJECT,
    FlowEvent.EXPIRE,
)

QUESTION_EVENTS = (
    FlowEvent.ANSWER,
    FlowEvent.HELPFUL,
    FlowEvent.NOT_HELPFUL,
    FlowEvent.INVITE,
    FlowEvent.SPAWN_UPDATE,
)

# (state, event) -> resulting state; anything absent is IllegalTransition.
# Self-loops mark events that are legal but keep the flow where it is.
UPDATE_TRANSITIONS: dict[tuple[UpdateState, FlowEvent], UpdateState] = {
    (UpdateState.AWAITING_SELECTION, FlowEvent.SELECT): UpdateState.PROPOSAL_SHOWN,
    (UpdateState.AWAITING_SELECTION, FlowEvent.EXPIRE): UpdateState.ABANDONED,
    (UpdateState.PROPOSAL_SHOWN, FlowEvent.NEXT_SUGGESTION): UpdateState.PROPOSAL_SHOWN,
    (UpdateState.PROPOSAL_SHOWN, FlowEvent.CREATE_NEW): UpdateState.PROPOSAL_SHOWN,
    (UpdateState.PROPOSAL_SHOWN, FlowEvent.START_DISCUSSION): UpdateState.AWAITING_DECISION,
    (UpdateState.PROPOSAL_SHOWN, FlowEvent.EXPIRE): UpdateState.ABANDONED,
    (UpdateState.DISCUSSION_OPEN, FlowEvent.INVITE): UpdateState.DISCUSSION_OPEN,
    (UpdateState.DISCUSSION_OPEN, FlowEvent.EXPIRE): UpdateState.ABANDONED,
    (UpdateState.AWAITING_DECISION, FlowEvent.INVITE): UpdateState.AWAITING_DECISION,
    (UpdateState.AWAITING_DECISION, FlowEvent.REGENERATE): UpdateState.AWAITING_DECISION,
    (UpdateState.AWAITING_DECISION, FlowEvent.APPROVE): UpdateState.APPLIED,
    (UpdateState.AWAITING_DECISION, FlowEvent.REJECT): UpdateState.REJECTED,
    (UpdateState.AWAITING_DECISION, FlowEvent.EXPIRE): UpdateState.ABANDONED,
}

QUESTION_TRANSITIONS: dict[tuple[QuestionState, FlowEvent], QuestionState] = {
    (QuestionState.ASKED, FlowEvent.ANSWER): QuestionState.ANSWERED,
    (QuestionState.ANSWERED, FlowEvent.HELPFUL): QuestionState.RESOLVED,
    (QuestionState.ANSWERED, FlowEvent.NOT_HELPFUL): QuestionState.DISCUSSION_OPEN,
    (QuestionState.DISCUSSION_OPEN, FlowEvent.INVITE): QuestionState.DISCUSSION_OPEN,
    (QuestionState.DISCUSSION_OPEN, FlowEvent.SPAWN_UPDATE): QuestionState.ESCALATED_TO_UPDATE,
}


def slugify(text: str, max_words: int = 5) -> str:
    words = _tokens(text)[:max_words]
    return "-".join(words) or "untitled"


@dataclass
class Conversation:
    conversation_id: str
    members: set[str]
    messages: list[SourceMessage] = field(default_factory=list)
    _counter: int = 0

    def log(self, author_id: str, text: str) -> SourceMessage:
        self._counter += 1
        msg = SourceMessage(
            channel_id=self.conversation_id,
            author_id=author_id,
            timestamp=f"{self._counter:06d}",
            text=text,
        )
        self.messages.append(msg)
        return msg

    def to_dict(self) -> dict:
        return {
            "conversation_id": self.conversation_id,
            "members": sorted(self.members),
            "messages": [m.to_dict() for m in self.messages],
            "counter": self._counter,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Conversation":
        return cls(
            conversation_id=d["conversation_id"],
            members=set(d["members"]),
            messages=[SourceMessage.from_dict(m) for m in d["messages"]],
            _counter=d["counter"],
        )


@dataclass
class FlowInstance:
    flow_id: str
    kind: str  # "update" | "question"
    state: str
    channel_id: str
    initiator_id: str
    created_at: float
    updated_at: float
    offered_messages: list[SourceMessage] = field(default_factory=list)
    selected_messages: list[SourceMessage] = field(default_factory=list)
    rankings: list[tuple[str, float]] = field(default_factory=list)
    candidate_cursor: int = 0
    proposal: Optional[EditProposal] = None
    issued_proposals: list[EditProposal] = field(default_factory=list)
    discussion_id: Optional[str] = None
    applied_revision: Optional[str] = None
    question: Optional[str] = None
    answer_text: Optional[str] = None
    cited_chunks: list[str] = field(default_factory=list)
    linked_flow_id: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "flow_id": self.flow_id,
            "kind": self.kind,
            "state": self.state,
            "channel_id": self.channel_id,
            "initiator_id": self.initiator_id,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "offered_messages": [m.to_dict() for m in self.offered_messages],
            "selected_messages": [m.to_dict() for m in self.selected_messages],
            "rankings": [[p, s] for p, s in self.rankings],
            "candidate_cursor": self.candidate_cursor,
            "proposal": self.proposal.to_dict() if self.proposal else None,
            "issued_proposals": [p.to_dict() for p in self.issued_proposals],
            "discussion_id": self.discussion_id,
            "applied_revision": self.applied_revision,
            "question": self.question,
            "answer_text": self.answer_text,
            "cited_chunks": list(self.cited_chunks),
            "linked_flow_id": self.linked_flow_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FlowInstance":
        return cls(
            flow_id=d["flow_id"],
            kind=d["kind"],
            state=d["state"],
            channel_id=d["channel_id"],
            initiator_id=d["initiator_id"],
            created_at=d["created_at"],
            updated_at=d["updated_at"],
            offered_messages=[SourceMessage.from_dict(m) for m in d["offered_messages"]],
            selected_messages=[SourceMessage.from_dict(m) for m in d["selected_messages"]],
            rankings=[(p, s) for p, s in d["rankings"]],
            candidate_cursor=d["candidate_cursor"],
            proposal=EditProposal.from_dict(d["proposal"]) if d["proposal"] else None,
            issued_proposals=[EditProposal.from_dict(p) for p in d["issued_proposals"]],
            discussion_id=d["discussion_id"],
            applied_revision=d["applied_revision"],
            question=d["question"],
            answer_text=d["answer_text"],
            cited_chunks=list(d["cited_chunks"]),
            linked_flow_id=d["linked_flow_id"],
        )


def transition(flow: FlowInstance, event: FlowEvent) -> str:
    """Resolve the next state for (flow.state, event) or raise IllegalTransition."""
    if flow.kind == "update":
        table: dict = UPDATE_TRANSITIONS
        state: FlowEvent | UpdateState | QuestionState = UpdateState(flow.state)
    else:
        table = QUESTION_TRANSITIONS
        state = QuestionState(flow.state)
    key = (state, event)
    if key not in table:
        raise IllegalTransition(flow.state, event.value)
    return table[key].value


class WorkflowEngine:
    """Drives flows against the repository, index, and assistant.

    Every public operation validates the transition first, performs its
    effects, and returns the chat actions to emit. The gateway owns
    per-flow event ordering; the engine itself is synchronous.
    """

    def __init__(
        self,
        repo: RepositoryHandle,
        index: IndexHolder,
        assistant: Assistant,
        *,
        managers: list[str],
        selection_window: int = DEFAULT_SELECTION_WINDOW,
        answer_top_k: int = DEFAULT_ANSWER_TOP_K,
        flow_ttl_hours: float = DEFAULT_FLOW_TTL_HOURS,
        clock: Callable[[], float] = time.time,
    ):
        self.repo = repo
        self.index = index
        self.assistant = assistant
        self.managers = list(managers)
        self.selection_window = selection_window
        self.answer_top_k = answer_top_k
        self.flow_ttl_hours = flow_ttl_hours
        self.clock = clock
        self.flows: dict[str, FlowInstance] = {}
        self.conversations: dict[str, Conversation] = {}
        self.proposals: dict[str, EditProposal] = {}

    # -- lookup helpers ------------------------------------------------

    def get_flow(self, flow_id: str) -> FlowInstance:
        flow = self.flows.get(flow_id)
        if flow is None:
            raise FlowNotFound(flow_id)
        return flow

    def _touch(self, flow: FlowInstance, event: FlowEvent) -> None:
        flow.state = transition(flow, event)
        flow.updated_at = self.clock()

    # -- update flow ---------------------------------------------------

    def handle_mention(
        self,
        channel_id: str,
        user_id: str,
        message_text: str,
        recent_messages: list[SourceMessage],
        ts: str,
    ) -> tuple[FlowInstance, list[ChatAction]]:
        mention = SourceMessage(channel_id, user_id, ts, message_text)
        window = list(recent_messages)
        if not any(
            m.channel_id == mention.channel_id and m.timestamp == mention.timestamp
            for m in window
        ):
            window.append(mention)
        window = window[-self.selection_window:]
        now = self.clock()
        flow = FlowInstance(
            flow_id=new_id(),
            kind="update",
            state=UpdateState.AWAITING_SELECTION.value,
            channel_id=channel_id,
            initiator_id=user_id,
            created_at=now,
            updated_at=now,
            offered_messages=window,
        )
        self.flows[flow.flow_id] = flow
        actions = [
            ephemeral_message(
                channel_id,
                user_id,
                [
                    Block.text(f"<@{user_id}> requested CHOIR to edit the document."),
                    Block.text("Select Messages to Save"),
                    Block.message_select(flow.flow_id, window),
                ],
            )
        ]
        return flow, actions

    def select_messages(
        self, flow_id: str, selected: list[SourceMessage]
    ) -> list[ChatAction]:
        flow = self.get_flow(flow_id)
        next_state = transition(flow, FlowEvent.SELECT)
        if not selected:
            raise SelectionNotOffered("no messages selected")
        offered = {(m.channel_id, m.timestamp) for m in flow.offered_messages}
        for m in selected:
            if (m.channel_id, m.timestamp) not in offered:
                raise SelectionNotOffered(f"message {m.timestamp} was not offered")
        flow.selected_messages = list(selected)
        query = " ".join(m.text for m in selected)
        flow.rankings = self.index.rank_documents(query)
        flow.candidate_cursor = 0
        actions = self._issue_proposal(flow, rank=0)
        flow.state = next_state
        flow.updated_at = self.clock()
        return actions

    def next_suggestion(self, flow_id: str) -> list[ChatAction]:
        flow = self.get_flow(flow_id)
        self._touch(flow, FlowEvent.NEXT_SUGGESTION)
        flow.candidate_cursor += 1
        if flow.candidate_cursor >= len(flow.rankings):
            return [
                ephemeral_message(
                    flow.channel_id,
                    flow.initiator_id,
                    [
                        Block.text("No further suggestions."),
                        Block.button_row(
                            [Button("create_new", "Create a new document altogether", flow.flow_id)]
                        ),
                    ],
                )
            ]
        return self._issue_proposal(flow, rank=flow.candidate_cursor)

    def create_new_document(self, flow_id: str) -> list[ChatAction]:
        flow = self.get_flow(flow_id)
        self._touch(flow, FlowEvent.CREATE_NEW)
        return self._issue_proposal(flow, rank=flow.candidate_cursor, force_creation=True)

    def _issue_proposal(
        self, flow: FlowInstance, rank: int, force_creation: bool = False
    ) -> list[ChatAction]:
        selected = flow.selected_messages
        creation = force_creation or rank >= len(flow.rankings)
        if creation:
            suggested = f"{slugify(selected[0].text)}.md"
            document = DocumentFile(path=suggested, content="", revision="")
            doc_path = f"new:{suggested}"
            base_revision = None
            base_content = ""
        else:
            path = flow.rankings[rank][0]
            document = self.repo.read_document(path)
            doc_path = path
            base_revision = self.repo.latest_revision_for(path)
            base_content = document.content
        try:
            proposed, title = self.assistant.propose_edit(document, selected)
        except DegenerateOutput:
            return [
                ephemeral_message(
                    flow.channel_id,
                    flow.initiator_id,
                    [Block.text("The assistant produced no usable edit; try another selection.")],
                )
            ]
        proposal = EditProposal(
            proposal_id=new_proposal_id(),
            doc_path=doc_path,
            base_revision=base_revision,
            proposed_content=proposed,
            change_title=title,
            source_messages=tuple(selected),
            candidate_rank=rank,
        )
        flow.proposal = proposal
        flow.issued_proposals.append(proposal)
        self.proposals[proposal.proposal_id] = proposal
        diff = diff_documents(base_content, proposed)
        return [
            ephemeral_message(
                flow.channel_id,
                flow.initiator_id,
                [
                    Block.text("Document Updates Suggestion"),
                    Block.text(f"File: {proposal.target_path}"),
                    Block.diff_view(diff),
                    Block.button_row(
                        [
                            Button("start_discussion", "Start Discussion", flow.flow_id),
                            Button("next_suggestion", "Next Suggestion", flow.flow_id),
                        ]
                    ),
                ],
            )
        ]

    def start_discussion(self, flow_id: str) -> list[ChatAction]:
        flow = self.get_flow(flow_id)
        transition(flow, FlowEvent.START_DISCUSSION)
        if not self.managers:
            raise NoManagersConfigured("no managers configured")
        proposal = flow.proposal
        assert proposal is not None
        flow.state = UpdateState.DISCUSSION_OPEN.value
        conversation = Conversation(
            conversation_id=new_id(),
            members={flow.initiator_id, *self.managers},
        )
        self.conversations[conversation.conversation_id] = conversation
        flow.discussion_id = conversation.conversation_id

        try:
            records = self.repo.history(proposal.target_path)
        except DocumentNotFound:
            records = []
        context_summary = (
            self.assistant.summarize_context(records) if records else NO_CONTEXT_SUMMARY
        )
        base_content = self._base_content(proposal)
        change_summary = self.assistant.summarize_change(
            base_content, proposal.proposed_content
        )
        actions = [open_conversation(conversation.conversation_id, conversation.members)]
        for text in (context_summary, change_summary):
            conversation.log(BOT_USER_ID, text)
            actions.append(
                post_message(conversation.conversation_id, [Block.text(text)])
            )
        actions.append(self._decision_card(flow, conversation.conversation_id))
        flow.state = UpdateState.AWAITING_DECISION.value
        flow.updated_at = self.clock()
        return actions

    def _base_content(self, proposal: EditProposal) -> str:
        if proposal.is_creation or proposal.base_revision is None:
            return ""
        return self.repo.read_document(proposal.target_path).content

    def _decision_card(self, flow: FlowInstance, conversation_id: str) -> ChatAction:
        proposal = flow.proposal
        assert proposal is not None
        diff = diff_documents(self._base_content(proposal), proposal.proposed_content)
        return post_message(
            conversation_id,
            [
                Block.text(f"Proposed update to {proposal.target_path}: {proposal.change_title}"),
                Block.diff_view(diff),
                Block.button_row(
                    [
                        Button("approve", "Approve", flow.flow_id),
                        Button("reject", "Reject", flow.flow_id),
                        Button("regenerate", "Regenerate from this discussion", flow.flow_id),
                    ]
                ),
            ],
        )

    def invite_participant(
        self, flow_id: str, inviter_id: str, invitee_id: str
    ) -> list[ChatAction]:
        flow = self.get_flow(flow_id)
        transition(flow, FlowEvent.INVITE)
        assert flow.discussion_id is not None
        conversation = self.conversations[flow.discussion_id]
        if inviter_id not in conversation.members:
            raise NotAMember(inviter_id)
        if invitee_id in conversation.members:
            return []  # idempotent
        conversation.members.add(invitee_id)
        flow.updated_at = self.clock()
        return [invite_user(conversation.conversation_id, invitee_id)]

    def post_to_conversation(
        self, conversation_id: str, author_id: str, text: str
    ) -> list[ChatAction]:
        conversation = self.conversations.get(conversation_id)
        if conversation is None:
            raise FlowNotFound(f"unknown conversation {conversation_id}")
        if author_id not in conversation.members:
            raise NotAMember(author_id)
        conversation.log(author_id, text)
        return [
            post_message(conversation_id, [Block.text(f"<@{author_id}>: {text}")])
        ]

    def regenerate_from_discussion(self, flow_id: str) -> list[ChatAction]:
        flow = self.get_flow(flow_id)
        self._touch(flow, FlowEvent.REGENERATE)
        proposal = flow.proposal
        assert proposal is not None and flow.discussion_id is not None
        conversation = self.conversations[flow.discussion_id]
        human = [m for m in conversation.messages if m.author_id != BOT_USER_ID]
        messages = flow.selected_messages + human
        return self._reissue(flow, messages, note="Regenerated from the discussion.")

    def _reissue(
        self, flow: FlowInstance, messages: list[SourceMessage], note: str
    ) -> list[ChatAction]:
        proposal = flow.proposal
        assert proposal is not None and flow.discussion_id is not None
        if proposal.is_creation:
            document = DocumentFile(path=proposal.target_path, content="", revision="")
            base_revision = None
        else:
            document = self.repo.read_document(proposal.target_path)
            base_revision = self.repo.latest_revision_for(proposal.target_path)
        try:
            proposed, title = self.assistant.propose_edit(document, messages)
        except DegenerateOutput:
            return [
                post_message(
                    flow.discussion_id,
                    [Block.text("The assistant produced no usable edit; keeping the current proposal.")],
                )
            ]
        new_proposal = EditProposal(
            proposal_id=new_proposal_id(),
            doc_path=proposal.doc_path,
            base_revision=base_revision,
            proposed_content=proposed,
            change_title=title,
            source_messages=tuple(messages),
            candidate_rank=proposal.candidate_rank,
        )
        flow.proposal = new_proposal
        flow.issued_proposals.append(new_proposal)
        self.proposals[new_proposal.proposal_id] = new_proposal
        actions = [post_message(flow.discussion_id, [Block.text(note)])]
        actions.append(self._decision_card(flow, flow.discussion_id))
        return actions

    def manager_decide(
        self, flow_id: str, user_id: str, decision: str
    ) -> list[ChatAction]:
        flow = self.get_flow(flow_id)
        event = FlowEvent.APPROVE if decision == "approve" else FlowEvent.REJECT
        next_state = transition(flow, event)
        if user_id not in self.managers:
            raise NotAManager(user_id)
        proposal = flow.proposal
        assert proposal is not None and flow.discussion_id is not None

        if decision == "reject":
            flow.state = next_state
            flow.updated_at = self.clock()
            return [
                post_message(
                    flow.discussion_id,
                    [Block.text(f"<@{user_id}> rejected the proposed update to {proposal.target_path}.")],
                )
            ]

        base_content = self._base_content(proposal)
        summary = self.assistant.summarize_change(base_content, proposal.proposed_content)
        context = ConversationContext(
            proposal_id=proposal.proposal_id,
            requester_id=flow.initiator_id,
            approver_id=user_id,
            messages=proposal.source_messages,
            summary=summary,
        )
        try:
            revision = self.repo.commit_update(
                proposal.target_path,
                proposal.proposed_content,
                context,
                expected_base=proposal.base_revision,
                title=proposal.change_title,
            )
        except StaleBase:
            logger.info("flow %s: stale base on %s, re-proposing", flow_id, proposal.target_path)
            actions = self._reissue(
                flow,
                list(proposal.source_messages),
                note=f"{proposal.target_path} changed meanwhile; here is a fresh proposal against the current version.",
            )
            flow.state = UpdateState.AWAITING_DECISION.value
            flow.updated_at = self.clock()
            return actions

        flow.state = next_state
        flow.applied_revision = revision
        flow.updated_at = self.clock()
        actions = [
            post_message(
                flow.discussion_id,
                [
                    Block.text(
                        f"<@{user_id}> approved the update; {proposal.target_path} "
                        f"committed as {revision[:8]}."
                    )
                ],
            )
        ]
        # rebuild after the confirmation action is already emitted, so the
        # deciding Manager never waits on indexing
        self.index.rebuild()
        return actions

    # -- question flow ---------------------------------------------------

    def handle_direct_question(
        self, user_id: str, question_text: str, channel_id: str
    ) -> tuple[FlowInstance, list[ChatAction]]:
        now = self.clock()
        flow = FlowInstance(
            flow_id=new_id(),
            kind="question",
            state=QuestionState.ASKED.value,
            channel_id=channel_id,
            initiator_id=user_id,
            created_at=now,
            updated_at=now,
            question=question_text,
        )
        self.flows[flow.flow_id] = flow
        ranked = self.index.query_chunks(question_text, k=self.answer_top_k)
        answer = self.assistant.answer_question(question_text, [c for c, _ in ranked])
        self._touch(flow, FlowEvent.ANSWER)
        flow.answer_text = answer.text
        flow.cited_chunks = list(answer.cited_chunks)
        blocks = [Block.text(answer.text)]
        if answer.cited_chunks:
            blocks.append(Block.text("Sources: " + ", ".join(answer.cited_chunks)))
        blocks.append(
            Block.button_row(
                [
                    Button("helpful", "Helpful", flow.flow_id),
                    Button("not_helpful", "Not helpful — discuss", flow.flow_id),
                ]
            )
        )
        return flow, [post_message(channel_id, blocks)]

    def question_feedback(self, flow_id: str, helpful: bool) -> list[ChatAction]:
        flow = self.get_flow(flow_id)
        if helpful:
            self._touch(flow, FlowEvent.HELPFUL)
            return [post_message(flow.channel_id, [Block.text("Glad that helped!")])]
        return self.escalate_question(flow_id)

    def escalate_question(self, flow_id: str) -> list[ChatAction]:
        flow = self.get_flow(flow_id)
        transition(flow, FlowEvent.NOT_HELPFUL)
        if not self.managers:
            raise NoManagersConfigured("no managers configured")
        flow.state = QuestionState.DISCUSSION_OPEN.value
        flow.updated_at = self.clock()
        conversation = Conversation(
            conversation_id=new_id(),
            members={flow.initiator_id, *self.managers},
        )
        self.conversations[conversation.conversation_id] = conversation
        flow.discussion_id = conversation.conversation_id
        question = flow.question or ""
        answer = flow.answer_text or ""
        conversation.log(flow.initiator_id, question)
        conversation.log(BOT_USER_ID, answer)
        actions = [open_conversation(conversation.conversation_id, conversation.members)]
        actions.append(
            post_message(
                conversation.conversation_id,
                [Block.text(f"<@{flow.initiator_id}> asked: {question}")],
            )
        )
        answer_blocks = [Block.text(f"CHOIR answered: {answer}")]
        if flow.cited_chunks:
            answer_blocks.append(Block.text("Sources: " + ", ".join(flow.cited_chunks)))
        answer_blocks.append(
            Block.button_row(
                [Button("spawn_update", "Update the document through CHOIR", flow.flow_id)]
            )
        )
        actions.append(post_message(conversation.conversation_id, answer_blocks))
        return actions

    def spawn_update_from_question(
        self, flow_id: str, user_id: str
    ) -> tuple[FlowInstance, list[ChatAction]]:
        flow = self.get_flow(flow_id)
        next_state = transition(flow, FlowEvent.SPAWN_UPDATE)
        assert flow.discussion_id is not None
        conversation = self.conversations[flow.discussion_id]
        if user_id not in conversation.members:
            raise NotAMember(user_id)
        update_flow, actions = self.handle_mention(
            channel_id=conversation.conversation_id,
            user_id=user_id,
            message_text=flow.question or "",
            recent_messages=list(conversation.messages),
            ts=f"escalated:{flow.flow_id}",
        )
        update_flow.discussion_id = None
        flow.linked_flow_id = update_flow.flow_id
        flow.state = next_state
        flow.updated_at = self.clock()
        return update_flow, actions

    # -- housekeeping ------------------------------------------------------

    def sweep_expired(self) -> list[str]:
        """Move idle non-terminal update flows to Abandoned; return their ids."""
        cutoff = self.clock() - self.flow_ttl_hours * 3600.0
        swept = []
        for flow in self.flows.values():
            if flow.kind != "update":
                continue
            if flow.state in (
                UpdateState.APPLIED.value,
                UpdateState.REJECTED.value,
                UpdateState.ABANDONED.value,
            ):
                continue
            if flow.updated_at < cutoff:
                self._touch(flow, FlowEvent.EXPIRE)
                swept.append(flow.flow_id)
        return swept
