#!/usr/bin/env python3
"""Drive the demo scenario headlessly (no HTTP) and leave the journal
behind for comparison with a console-driven session.

Usage: python3 scripts/headless_journal.py BASE_DIR
Seeds BASE_DIR/repo and writes BASE_DIR/journal.ndjson.
"""

import argparse
from pathlib import Path

from workspace_common import CONVERSATION, event, message, seed_repository

from choir.config import ServiceConfig
from choir.service import Service


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("base")
    args = parser.parse_args()
    base = Path(args.base)
    base.mkdir(parents=True, exist_ok=True)
    seed_repository(base / "repo")

    config = ServiceConfig(
        repo_root=str(base / "repo"),
        journal_path=str(base / "journal.ndjson"),
        managers=["prof-lee"],
    )
    service = Service(config)
    try:
        ack = service.ingest_event(event(
            "mention", "adnan",
            {
                "text": CONVERSATION[2][2],
                "recent_messages": [message(*m) for m in CONVERSATION[:2]],
            },
        ))
        flow_id = ack["flow_id"]
        service.ingest_event(event(
            "selection", "adnan",
            {"flow_id": flow_id, "selected": [message(*m) for m in CONVERSATION]},
        ))
        service.ingest_event(event(
            "button", "adnan", {"flow_id": flow_id, "action": "start_discussion"}
        ))
        service.ingest_event(event(
            "button", "prof-lee", {"flow_id": flow_id, "action": "approve"}
        ))
        assert service.view_flow(flow_id)["state"] == "Applied"
    finally:
        service.close()
    print(config.journal_path)


if __name__ == "__main__":
    main()
