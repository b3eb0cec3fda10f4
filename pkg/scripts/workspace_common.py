"""Shared fixtures for the workspace scripts: a small seeded policy
repository and the canonical demo conversation."""

import subprocess
import uuid
from pathlib import Path

POLICY_DOC = """\
# EchoLabs Policy

## Meetings

* Weekly lab meetings happen on Mondays.

## Paper and Talk Writing

* We aim for a go/no-go decision three months before the paper is due.

## Vacation

* Coordinate vacation plans with your advisor ahead of time.
"""

CONVERSATION = [
    ("caleb", "1001.0", "True. How about deciding whether to submit or not a month ahead?"),
    ("adnan", "1002.0", "Yeah, that sounds safer."),
    ("adnan", "1003.0", "@CHOIR We aim for a decision to submit a paper or not one month before the deadline."),
]


def seed_repository(root: Path):
    root.mkdir(parents=True, exist_ok=True)
    subprocess.run(["git", "init", "-q", str(root)], check=True)
    (root / "echolabs-policy.md").write_text(POLICY_DOC, encoding="utf-8")
    subprocess.run(["git", "-C", str(root), "add", "-A"], check=True)
    subprocess.run(
        ["git", "-C", str(root),
         "-c", "user.name=demo", "-c", "user.email=demo@example.com",
         "commit", "-q", "-m", "seed policy document"],
        check=True,
    )


def event(kind, user_id, payload, ts="1003.0", channel_id="C1"):
    return {
        "event_id": str(uuid.uuid4()),
        "workspace_id": "demo",
        "kind": kind,
        "channel_id": channel_id,
        "user_id": user_id,
        "payload": payload,
        "ts": ts,
    }


def message(author, ts, text):
    return {"channel_id": "C1", "author_id": author, "timestamp": ts, "text": text}
