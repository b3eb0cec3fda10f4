#!/usr/bin/env python3
"""Run the full CHOIR update flow end to end in a throwaway workspace.

Seeds a small policy repository, drives a channel conversation through
mention → message selection → discussion → manager approval, then prints
the emitted actions, the committed document, its decoded revision
history, and a retrieval query against the rebuilt index.

Usage:
    python3 scripts/demo_scenario.py [--workdir DIR]

Without --workdir everything happens in a temporary directory that is
deleted on exit.
"""

import argparse
import contextlib
import json
import tempfile
from pathlib import Path

from workspace_common import CONVERSATION, event, message, seed_repository

from choir.config import ServiceConfig
from choir.service import Service


def show_actions(service, since, label):
    print(f"\n--- actions after {label} ---")
    for action in service.actions_since(since):
        blocks = ", ".join(b["kind"] for b in action["blocks"])
        print(f"  seq={action['seq']} {action['kind']} -> {action['target']} [{blocks}]")
    return service.seq


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--workdir", help="keep state here instead of a temp dir")
    args = parser.parse_args()

    with contextlib.ExitStack() as stack:
        base = Path(args.workdir) if args.workdir else Path(stack.enter_context(tempfile.TemporaryDirectory()))
        base.mkdir(parents=True, exist_ok=True)
        root = base / "repo"
        if not root.exists():
            root.mkdir()
            seed_repository(root)

        config = ServiceConfig(
            repo_root=str(root),
            journal_path=str(base / "journal.ndjson"),
            managers=["prof-lee"],
        )
        service = Service(config)
        stack.callback(service.close)

        mention_text = CONVERSATION[2][2]
        cursor = 0
        ack = service.ingest_event(event(
            "mention", "adnan",
            {
                "text": mention_text,
                "recent_messages": [message(*m) for m in CONVERSATION[:2]],
            },
        ))
        flow_id = ack["flow_id"]
        print(f"flow {flow_id}: {service.view_flow(flow_id)['state']}")
        cursor = show_actions(service, cursor, "mention")

        service.ingest_event(event(
            "selection", "adnan",
            {"flow_id": flow_id, "selected": [message(*m) for m in CONVERSATION]},
        ))
        proposal = service.view_flow(flow_id)["proposal"]
        print(f"\nproposal {proposal['proposal_id'][:8]} for {proposal['doc_path']}: "
              f"{proposal['change_title']!r}")
        cursor = show_actions(service, cursor, "selection")

        service.ingest_event(event(
            "button", "adnan", {"flow_id": flow_id, "action": "start_discussion"}
        ))
        cursor = show_actions(service, cursor, "start_discussion")

        service.ingest_event(event(
            "button", "prof-lee", {"flow_id": flow_id, "action": "approve"}
        ))
        print(f"\nflow {flow_id}: {service.view_flow(flow_id)['state']}")
        cursor = show_actions(service, cursor, "approval")

        print("\n--- committed document ---")
        print(service.view_document("echolabs-policy.md")["content"])

        print("--- revision history ---")
        for record in service.view_history("echolabs-policy.md"):
            context = record["context"]
            if context:
                print(f"  {record['revision'][:8]} by {context['requester_id']}, "
                      f"approved by {context['approver_id']}, "
                      f"{len(context['messages'])} source message(s)")
            else:
                print(f"  {record['revision'][:8]} (manual commit)")

        print("\n--- retrieval: 'paper submit decision deadline' ---")
        for path, score in service.index.rank_documents("paper submit decision deadline"):
            print(f"  {score:.3f}  {path}")

        print("\n--- journal ---")
        with open(config.journal_path, encoding="utf-8") as fh:
            counts: dict[str, int] = {}
            for line in fh:
                counts[json.loads(line)["type"]] = counts.get(json.loads(line)["type"], 0) + 1
        print("  " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))


if __name__ == "__main__":
    main()
