"""Execution-based feedback.

Assembles a runnable program from the learner's arrangement and delegates
execution to the external runner process over its newline-delimited JSON
protocol (one request line in, one reply line out).  The runner command comes
from the ``ENGINE_RUNNER_CMD`` environment variable or explicit
configuration; by default the bundled ``parsonkit.runner`` is used.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import sys
import uuid
from dataclasses import dataclass

from .errors import EmptyArrangement, ProtocolError, RunnerUnavailable
from .grading import Arrangement, PlacedBlock
from .model import PARSONS_FAMILY, ProblemSpec, Representation, SolutionBlock, TestCase, render_line

DEFAULT_PER_TEST_TIMEOUT_MS = 5000
DEFAULT_TOTAL_TIMEOUT_MS = 30000

RUNNER_CMD_ENV = "ENGINE_RUNNER_CMD"


@dataclass(frozen=True)
class TestResult:
    ordinal: int
    status: str  # pass | fail | error
    expected: str
    actual: str | None = None
    error: str | None = None
    wall_time_ms: int = 0

    def to_dict(self) -> dict:
        return {
            "ordinal": self.ordinal,
            "status": self.status,
            "expected": self.expected,
            "actual": self.actual,
            "error": self.error,
            "wall_time_ms": self.wall_time_ms,
        }


@dataclass(frozen=True)
class ExecutionReport:
    compiled: bool
    results: tuple[TestResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    def to_dict(self) -> dict:
        return {
            "compiled": self.compiled,
            "results": [r.to_dict() for r in self.results],
            "all_passed": self.all_passed,
        }


def _block_view_text(block: SolutionBlock, placed: PlacedBlock, representation: Representation) -> str:
    """The block text as the learner currently sees it, fills and edits applied."""
    if block.fixcode is not None:
        if placed.edited_text is not None:
            return placed.edited_text
        if representation is Representation.FADED_PARSONS:
            return block.fixcode.buggy_text
        return block.fixcode.corrected_text
    if representation is Representation.FADED_PARSONS:
        return block.filled_text(list(placed.blank_fills))
    if placed.blank_fills:
        return block.filled_text(list(placed.blank_fills))
    return block.canonical_text()


def assemble(arrangement: Arrangement, spec: ProblemSpec) -> str:
    """Deterministic source text for an arrangement.

    Editor representations pass the editor text through verbatim; Parsons
    placements render each placed block at its placed indent.  Unfilled
    blanks render their placeholder marker verbatim (the resulting runtime
    error is the correct feedback).
    """
    representation = Representation(arrangement.representation)
    if representation in (Representation.WRITE_CODE, Representation.FIX_CODE):
        if arrangement.editor_text is None or not arrangement.editor_text.strip():
            raise EmptyArrangement("editor text is empty")
        return arrangement.editor_text

    if representation not in PARSONS_FAMILY or not arrangement.placed:
        raise EmptyArrangement("no blocks placed")

    lines = []
    for placed in arrangement.placed:
        block = spec.block_by_id(placed.id)
        if block is not None:
            text = _block_view_text(block, placed, representation)
        else:
            distractor = spec.distractor_by_id(placed.id)
            text = distractor.text if distractor is not None else (placed.text or "")
        lines.append(render_line(text, placed.indent))
    return "\n".join(lines)


class RunnerClient:
    """Spawns the runner per request and exchanges one protocol line."""

    def __init__(self, command: list[str] | None = None):
        self.command = command or self._default_command()

    @staticmethod
    def _default_command() -> list[str]:
        configured = os.environ.get(RUNNER_CMD_ENV)
        if configured:
            return shlex.split(configured)
        return [sys.executable, "-m", "parsonkit.runner"]

    def run_tests(
        self,
        source: str,
        tests: list[TestCase],
        per_test_timeout_ms: int = DEFAULT_PER_TEST_TIMEOUT_MS,
        total_timeout_ms: int = DEFAULT_TOTAL_TIMEOUT_MS,
    ) -> ExecutionReport:
        request_id = str(uuid.uuid4())
        request = {
            "request_id": request_id,
            "source": source,
            "tests": [
                {"ordinal": t.ordinal, "call": t.call, "expected": t.expected} for t in tests
            ],
            "timeout_ms": per_test_timeout_ms,
        }
        try:
            completed = subprocess.run(
                self.command,
                input=json.dumps(request) + "\n",
                capture_output=True,
                text=True,
                timeout=total_timeout_ms / 1000.0 + 10.0,
            )
        except FileNotFoundError as exc:
            raise RunnerUnavailable(f"runner command not found: {exc}") from exc
        except subprocess.TimeoutExpired:
            return ExecutionReport(
                compiled=False,
                results=tuple(
                    TestResult(ordinal=t.ordinal, status="error", expected=t.expected, error="timeout")
                    for t in tests
                ),
            )

        line = completed.stdout.strip().splitlines()[-1] if completed.stdout.strip() else ""
        if not line:
            raise RunnerUnavailable(
                f"runner produced no reply (exit {completed.returncode}): {completed.stderr[:500]}"
            )
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"malformed runner reply: {exc}") from exc
        if reply.get("request_id") != request_id:
            raise ProtocolError("runner reply for a different request")
        if "results" not in reply:
            raise ProtocolError(f"runner error: {reply.get('error', 'missing results')}")

        by_ordinal = {r.get("ordinal"): r for r in reply["results"]}
        results = []
        for t in tests:
            raw = by_ordinal.get(t.ordinal)
            if raw is None:
                results.append(
                    TestResult(ordinal=t.ordinal, status="error", expected=t.expected, error="no result")
                )
                continue
            results.append(
                TestResult(
                    ordinal=t.ordinal,
                    status=raw.get("status", "error"),
                    expected=raw.get("expected", t.expected),
                    actual=raw.get("actual"),
                    error=raw.get("error"),
                    wall_time_ms=int(raw.get("wall_time_ms") or 0),
                )
            )
        return ExecutionReport(compiled=bool(reply.get("compiled")), results=tuple(results))


def run_tests(
    source: str,
    tests: list[TestCase],
    per_test_timeout_ms: int = DEFAULT_PER_TEST_TIMEOUT_MS,
    total_timeout_ms: int = DEFAULT_TOTAL_TIMEOUT_MS,
    client: RunnerClient | None = None,
) -> ExecutionReport:
    client = client or RunnerClient()
    return client.run_tests(source, tests, per_test_timeout_ms, total_timeout_ms)
