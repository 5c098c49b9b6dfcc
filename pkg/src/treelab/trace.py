"""Visit-trace events emitted by the tree algorithms.

Each algorithm can report every node visit to an ``on_visit`` callback.  A
node is identified by its branch path from the root: a tuple of 0 (invalid
side) and 1 (valid side), so traces from different algorithms over the same
bootstrap are directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

TRACE_HEADER = "# depth\tpath\ttrain\ttest\trow\taction"


@dataclass(frozen=True)
class TraceEvent:
    algorithm: str
    bootstrap: int
    path: tuple[int, ...]
    depth: int
    train_count: int
    test_count: int | None
    kind: str  # "split" | "leaf"
    attribute: int | None = None
    op: str | None = None
    value: float | None = None
    label: int | None = None
    test_row: int | None = None


def path_string(path: tuple[int, ...]) -> str:
    if not path:
        return "-"
    return "".join("iv"[branch] for branch in path)


def format_trace_line(event: TraceEvent) -> str:
    if event.kind == "split":
        action = f"split {event.attribute} {event.op} {event.value!r}"
    else:
        action = f"leaf {event.label}"
    test = "-" if event.test_count is None else str(event.test_count)
    row = "-" if event.test_row is None else str(event.test_row)
    return (
        f"{event.depth}\t{path_string(event.path)}\t{event.train_count}"
        f"\t{test}\t{row}\t{action}"
    )
