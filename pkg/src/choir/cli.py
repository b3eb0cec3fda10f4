"""Command-line entrypoints: `choir serve` and `choir replay`."""

from __future__ import annotations

import logging
import os
import sys
import threading

import click

from .config import ENV_CONFIG_PATH, load_config
from .errors import ConfigError, CorruptJournal
from .journal import Journal

EXIT_CONFIG_ERROR = 2
EXIT_CORRUPT_JOURNAL = 3


@click.group()
def main():
    """CHOIR: chat-driven organizational knowledge repository."""
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")


@main.command()
@click.option("--config", "config_path", default=None, help="Path to the config file.")
def serve(config_path):
    """Run the gateway service."""
    import uvicorn

    from .http_api import create_app
    from .service import Service

    config_path = os.environ.get(ENV_CONFIG_PATH, config_path)
    if not config_path:
        click.echo("error: --config or CHOIR_CONFIG required", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG_ERROR)
    try:
        service = Service(config)
    except CorruptJournal as exc:
        click.echo(f"corrupt journal: {exc}", err=True)
        sys.exit(EXIT_CORRUPT_JOURNAL)

    def sweeper():
        import time

        while True:
            time.sleep(60)
            service.sweep()

    threading.Thread(target=sweeper, daemon=True).start()
    host, _, port = config.listen_addr.partition(":")
    app = create_app(service)
    uvicorn.run(app, host=host, port=int(port), log_level="warning")


@main.command()
@click.option("--journal", "journal_path", required=True, help="Path to the journal file.")
@click.option("--dry-run", is_flag=True, help="Validate and summarize without touching state.")
def replay(journal_path, dry_run):
    """Validate a journal and summarize what replay would restore."""
    journal = Journal(journal_path)
    counts = {"event": 0, "flow": 0, "conversation": 0, "action": 0}
    flows: dict[str, str] = {}
    max_seq = 0
    try:
        for record_type, record in journal.read_all():
            counts[record_type] += 1
            if record_type == "flow":
                flows[record["flow_id"]] = record["state"]
            elif record_type == "action":
                max_seq = max(max_seq, record["seq"])
    except CorruptJournal as exc:
        click.echo(f"corrupt journal: {exc}", err=True)
        sys.exit(EXIT_CORRUPT_JOURNAL)
    click.echo(
        f"journal ok: {counts['event']} events, {len(flows)} flows, "
        f"{counts['conversation']} conversation snapshots, "
        f"{counts['action']} actions (seq {max_seq})"
    )
    for flow_id, state in sorted(flows.items()):
        click.echo(f"  flow {flow_id}: {state}")
    if dry_run:
        click.echo("dry run: no state restored")


if __name__ == "__main__":
    main()
