#!/usr/bin/env python3
"""Seed a demo workspace (repo + config) for `choir serve`.

Usage: python3 scripts/seed_workspace.py BASE_DIR --port 8787
Prints the path of the generated config file.
"""

import argparse
from pathlib import Path

from workspace_common import seed_repository


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("base")
    parser.add_argument("--port", type=int, default=8787)
    args = parser.parse_args()
    base = Path(args.base)
    base.mkdir(parents=True, exist_ok=True)
    seed_repository(base / "repo")
    config_path = base / "choir.conf"
    config_path.write_text(
        f'repo_root = "{base / "repo"}"\n'
        f'journal_path = "{base / "journal.ndjson"}"\n'
        'managers = ["prof-lee"]\n'
        f'listen_addr = "127.0.0.1:{args.port}"\n',
        encoding="utf-8",
    )
    print(config_path)


if __name__ == "__main__":
    main()
