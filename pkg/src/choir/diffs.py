"""Line-level LCS diff used to render and summarize proposed edits.

Lines keep their terminators so re-applying a diff to the base text
reproduces the proposed text byte-exactly, including a missing final
newline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

Op = Literal["keep", "delete", "insert"]


@dataclass(frozen=True)
class DiffHunk:
    op: Op
    lines: tuple[str, ...]


@dataclass(frozen=True)
class EditDiff:
    hunks: tuple[DiffHunk, ...]

    @property
    def inserted(self) -> int:
        return sum(len(h.lines) for h in self.hunks if h.op == "insert")

    @property
    def deleted(self) -> int:
        return sum(len(h.lines) for h in self.hunks if h.op == "delete")


def _lcs_keep_flags(a: list[str], b: list[str]) -> list[tuple[Op, str]]:
    n, m = len(a), len(b)
    # dp[i][j] = LCS length of a[i:], b[j:]
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = dp[i], dp[i + 1]
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = max(below[j], row[j + 1])
    ops: list[tuple[Op, str]] = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            ops.append(("keep", a[i]))
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            ops.append(("delete", a[i]))
            i += 1
        else:
            ops.append(("insert", b[j]))
            j += 1
    ops.extend(("delete", line) for line in a[i:])
    ops.extend(("insert", line) for line in b[j:])
    return ops


def diff_documents(base: str, proposed: str) -> EditDiff:
    a = base.splitlines(keepends=True)
    b = proposed.splitlines(keepends=True)
    hunks: list[DiffHunk] = []
    for op, line in _lcs_keep_flags(a, b):
        if hunks and hunks[-1].op == op:
            hunks[-1] = DiffHunk(op, hunks[-1].lines + (line,))
        else:
            hunks.append(DiffHunk(op, (line,)))
    return EditDiff(hunks=tuple(hunks))


def apply_diff(base: str, diff: EditDiff) -> str:
    """Replay a diff against its base; keep/delete lines must match."""
    base_lines = base.splitlines(keepends=True)
    out: list[str] = []
    pos = 0
    for hunk in diff.hunks:
        if hunk.op == "insert":
            out.extend(hunk.lines)
            continue
        for line in hunk.lines:
            if pos >= len(base_lines) or base_lines[pos] != line:
                raise ValueError(f"diff does not apply at line {pos}")
            if hunk.op == "keep":
                out.append(line)
            pos += 1
    if pos != len(base_lines):
        raise ValueError("diff does not consume the whole base")
    return "".join(out)
