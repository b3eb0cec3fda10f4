import pytest

from choir.assistant import (
    NO_CONTEXT_SUMMARY,
    NO_SOURCE_ANSWER,
    Assistant,
    ScriptedProvider,
)
from choir.chunking import segment_document
from choir.errors import DegenerateOutput
from choir.repo_store import (
    ConversationContext,
    DocumentFile,
    RevisionRecord,
    SourceMessage,
)

from conftest import DEMO_MESSAGES, POLICY_DOC


@pytest.fixture
def assistant():
    return Assistant(provider=ScriptedProvider())


@pytest.fixture
def policy_doc():
    return DocumentFile(path="echolabs-policy.md", content=POLICY_DOC, revision="r" * 40)


class TestProposeEdit:
    def test_demo_message_lands_in_paper_section(self, assistant, policy_doc):
        proposed, title = assistant.propose_edit(policy_doc, [DEMO_MESSAGES[2]])
        chunks = segment_document("echolabs-policy.md", proposed, max_chunk_chars=1 << 30)
        paper = next(c for c in chunks if c.heading_path[-1] == "Paper and Talk Writing")
        assert "decision to submit a paper or not one month before" in paper.text
        vacation = next(c for c in chunks if c.heading_path[-1] == "Vacation")
        assert "one month before" not in vacation.text
        assert title

    def test_all_messages_appended_as_bullets(self, assistant, policy_doc):
        proposed, _ = assistant.propose_edit(policy_doc, DEMO_MESSAGES)
        for m in DEMO_MESSAGES:
            assert f"* {m.text}" in proposed

    def test_deterministic(self, assistant, policy_doc):
        a = assistant.propose_edit(policy_doc, DEMO_MESSAGES)
        b = assistant.propose_edit(policy_doc, DEMO_MESSAGES)
        assert a == b

    def test_echo_provider_degenerate(self, policy_doc):
        class EchoProvider:
            def complete(self, task, payload):
                return payload["document"]

        with pytest.raises(DegenerateOutput):
            Assistant(provider=EchoProvider()).propose_edit(policy_doc, DEMO_MESSAGES)

    def test_empty_provider_degenerate(self, policy_doc):
        class EmptyProvider:
            def complete(self, task, payload):
                return ""

        with pytest.raises(DegenerateOutput):
            Assistant(provider=EmptyProvider()).propose_edit(policy_doc, DEMO_MESSAGES)

    def test_creation_from_empty_document(self, assistant):
        doc = DocumentFile(path="new-doc.md", content="", revision="")
        proposed, title = assistant.propose_edit(doc, DEMO_MESSAGES)
        assert proposed.startswith("# ")
        assert f"* {DEMO_MESSAGES[0].text}" in proposed
        assert title == DEMO_MESSAGES[0].text[:60].rstrip()


class TestAnswerQuestion:
    def test_quotes_top_chunk(self, assistant):
        chunks = segment_document("echolabs-policy.md", POLICY_DOC)
        answer = assistant.answer_question("when do we decide about submitting?", chunks)
        assert answer.text == chunks[0].text
        assert chunks[0].chunk_id in answer.cited_chunks
        assert set(answer.cited_chunks) <= {c.chunk_id for c in chunks}

    def test_empty_grounding(self, assistant):
        answer = assistant.answer_question("anything?", [])
        assert answer.text == NO_SOURCE_ANSWER
        assert answer.cited_chunks == ()


def record(revision, requester, approver, first_text, with_context=True):
    context = None
    if with_context:
        context = ConversationContext(
            proposal_id="p",
            requester_id=requester,
            approver_id=approver,
            messages=(SourceMessage("c", requester, "1", first_text),),
            summary=None,
        )
    return RevisionRecord(revision, None, 0, ("a.md",), context)


class TestSummarizeContext:
    def test_template(self, assistant):
        records = [
            record("a" * 40, "adnan", "prof-lee", "newest message"),
            record("b" * 40, "caleb", "prof-lee", "older message"),
        ]
        text = assistant.summarize_context(records)
        lines = text.splitlines()
        assert lines[0] == "Context from 2 prior revision(s):"
        assert lines[1] == f'- {"a" * 8} by adnan, approved by prof-lee: "newest message"'
        assert lines[2] == f'- {"b" * 8} by caleb, approved by prof-lee: "older message"'

    def test_mentions_every_author(self, assistant):
        records = [
            record("a" * 40, "questioner-1", "manager-9", "what is the policy?"),
            record("b" * 40, "requester-2", "manager-9", "updating the policy"),
        ]
        text = assistant.summarize_context(records)
        for author in ("questioner-1", "requester-2", "manager-9"):
            assert author in text

    def test_no_context_records(self, assistant):
        assert assistant.summarize_context([]) == NO_CONTEXT_SUMMARY
        foreign = [record("c" * 40, "x", "y", "z", with_context=False)]
        assert assistant.summarize_context(foreign) == NO_CONTEXT_SUMMARY

    def test_truncates_long_first_message(self, assistant):
        records = [record("a" * 40, "u", "m", "x" * 200)]
        text = assistant.summarize_context(records)
        assert f'"{"x" * 80}"' in text
        assert "x" * 81 not in text


class TestSummarizeChange:
    def test_single_insert(self, assistant):
        base = "# T\n\n## Section One\n\nline\n"
        new = "# T\n\n## Section One\n\nline\n* added\n"
        text = assistant.summarize_change(base, new)
        assert text.startswith("+1/-0 lines")
        assert "Section One" in text

    def test_pure_deletion(self, assistant):
        base = "# T\n\na\nb\nc\n"
        new = "# T\n\na\n"
        text = assistant.summarize_change(base, new)
        assert text.startswith("+0/-2 lines")

    def test_identical_contents_rejected(self, assistant):
        with pytest.raises(ValueError):
            assistant.summarize_change("same\n", "same\n")
