"""Per-criterion outcomes collected during the acceptance run."""

from __future__ import annotations

import time
from contextlib import contextmanager
from typing import Any, Callable, Iterator

RESULTS: dict[int, dict[str, Any]] = {}


class Clock:
    """Times the operations a runtime budget applies to.

    ``measure`` keeps the best of ``repeat`` runs so one-off interpreter
    hiccups don't decide sub-millisecond budgets. With no measured calls the
    whole block is timed.
    """

    def __init__(self) -> None:
        self.spent: list[float] = []

    def measure(self, fn: Callable[[], Any], repeat: int = 5) -> Any:
        best, result = float("inf"), None
        for _ in range(repeat):
            start = time.perf_counter()
            result = fn()
            best = min(best, time.perf_counter() - start)
        self.spent.append(best)
        return result


@contextmanager
def criterion(n: int, title: str, budget: float) -> Iterator[Clock]:
    clock = Clock()
    start = time.perf_counter()
    entry = {"ok": False, "title": title, "budget": budget, "elapsed": 0.0}
    RESULTS[n] = entry
    try:
        yield clock
    except BaseException as exc:
        entry["elapsed"] = time.perf_counter() - start
        entry["note"] = type(exc).__name__
        raise
    elapsed = sum(clock.spent) if clock.spent else time.perf_counter() - start
    entry["elapsed"] = elapsed
    entry["ok"] = elapsed < budget
    if not entry["ok"]:
        entry["note"] = "over budget"
    assert elapsed < budget, f"criterion {n} took {elapsed:.4f}s, budget {budget}s"
