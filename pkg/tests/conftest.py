import subprocess
import uuid
from pathlib import Path

import pytest

from choir.config import ServiceConfig
from choir.repo_store import SourceMessage, open_repository

POLICY_DOC = """\
# EchoLabs Policy

## Meetings

* Weekly lab meetings happen on Mondays.
* Reading group alternates with project updates.

## Paper and Talk Writing

* We aim for a go/no-go decision three months before the paper is due.
* Most first-time authors are surprised by how long writing takes.
* Talks should be rehearsed with the lab at least once.

## Vacation

* Coordinate vacation plans with your advisor ahead of time.
"""

ONBOARDING_DOC = """\
# Onboarding

## Accounts

* Request a cluster account from the sysadmin.
* Join the lab mailing list.

## Equipment

* Laptops are ordered through the department office.
"""

SERVERS_DOC = """\
# Server Maintenance

## Backups

* Nightly backups run at 02:00 and rotate weekly.

## Upgrades

* Kernel upgrades are scheduled for the first Friday of the month.
"""

FIXTURE_DOCS = {
    "echolabs-policy.md": POLICY_DOC,
    "onboarding.md": ONBOARDING_DOC,
    "server-maintenance.md": SERVERS_DOC,
}

# Demo channel conversation about paper submission deadlines
DEMO_MESSAGES = [
    SourceMessage("C1", "caleb", "1001.0", "True. How about deciding whether to submit or not a month ahead?"),
    SourceMessage("C1", "adnan", "1002.0", "Yeah, that sounds safer."),
    SourceMessage(
        "C1",
        "adnan",
        "1003.0",
        "@CHOIR We aim for a decision to submit a paper or not one month before the deadline.",
    ),
]


def git(root: Path, *args: str, input_text: str | None = None) -> str:
    proc = subprocess.run(
        ["git", "-C", str(root), *args],
        input=input_text.encode() if input_text is not None else None,
        capture_output=True,
        check=True,
    )
    return proc.stdout.decode()


def manual_commit(root: Path, path: str, content: str, message: str = "manual edit") -> str:
    """A foreign commit made outside the service, as a human would."""
    (root / path).write_text(content, encoding="utf-8")
    git(root, "add", "--", path)
    git(
        root,
        "-c", "user.name=human",
        "-c", "user.email=human@example.com",
        "commit", "-q", "-m", message,
    )
    return git(root, "rev-parse", "HEAD").strip()


def seed_repo(root: Path, docs: dict[str, str] | None = None):
    handle = open_repository(root, init=True)
    for path, content in (docs if docs is not None else FIXTURE_DOCS).items():
        manual_commit(root, path, content, message=f"add {path}")
    return handle


@pytest.fixture
def empty_repo(tmp_path):
    return open_repository(tmp_path / "repo", init=True)


@pytest.fixture
def fixture_repo(tmp_path):
    root = tmp_path / "repo"
    root.mkdir()
    return seed_repo(root)


@pytest.fixture
def service_config(tmp_path):
    root = tmp_path / "repo"
    root.mkdir()
    seed_repo(root)
    return ServiceConfig(
        repo_root=str(root),
        journal_path=str(tmp_path / "journal.ndjson"),
        managers=["prof-lee"],
    )


def demo_events(flow_id_box: dict | None = None):
    """Event factories for the demo update scenario; selection/button events
    need the flow_id from the mention ack, so those are callables."""
    mention = make_event(
        "mention",
        user_id="adnan",
        ts=DEMO_MESSAGES[2].timestamp,
        payload={
            "text": DEMO_MESSAGES[2].text,
            "recent_messages": [m.to_dict() for m in DEMO_MESSAGES[:2]],
        },
    )

    def selection(flow_id):
        return make_event(
            "selection",
            user_id="adnan",
            payload={"flow_id": flow_id, "selected": [m.to_dict() for m in DEMO_MESSAGES]},
        )

    def button(flow_id, action, user_id):
        return make_event(
            "button", user_id=user_id, payload={"flow_id": flow_id, "action": action}
        )

    return mention, selection, button


def run_update_scenario(service, *, approve=True):
    """Drive mention → selection → discussion (→ approval) and return the flow id."""
    mention, selection, button = demo_events()
    ack = service.ingest_event(mention)
    flow_id = ack["flow_id"]
    service.ingest_event(selection(flow_id))
    service.ingest_event(button(flow_id, "start_discussion", "adnan"))
    if approve:
        service.ingest_event(button(flow_id, "approve", "prof-lee"))
    return flow_id


def canonical_ranking(scored, tol=1e-9, key=None):
    """Ids in rank order, with groups tied within tol re-sorted deterministically.

    Makes ordering comparisons robust to sub-tolerance float differences
    between an implementation and an independent oracle.
    """
    if key is None:
        key = lambda item: (item.doc_path, item.ordinal)
    groups = []
    for item, score in scored:
        if groups and abs(groups[-1][-1][1] - score) <= tol:
            groups[-1].append((item, score))
        else:
            groups.append([(item, score)])
    out = []
    for group in groups:
        out.extend(sorted(group, key=lambda pair: key(pair[0])))
    return [item for item, _ in out]


def make_event(kind: str, *, channel_id="C1", user_id="adnan", payload=None, event_id=None, ts=None):
    return {
        "event_id": event_id or str(uuid.uuid4()),
        "workspace_id": "w1",
        "kind": kind,
        "channel_id": channel_id,
        "user_id": user_id,
        "payload": payload or {},
        "ts": ts or "2026-08-23T12:00:00Z",
    }
