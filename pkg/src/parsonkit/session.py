"""Timed practice sessions: state machine, event log, and instrument capture.

A session walks one learner through an ordered list of problems.  Each
problem gets its own clock (``limit_ms``); time accrues only while Running,
so pausing is free and unlimited.  Every accepted event is appended to a
newline-delimited JSON log, and replaying that log through :func:`apply`
reproduces the final :class:`SessionState` exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import (
    IllegalTransition,
    MissingItem,
    OutOfRange,
    ProblemNotFinished,
)
from .helpx import AdaptationState, Outcome, inter_adapt
from .model import Representation

PAAS_MIN, PAAS_MAX = 1, 9
LIKERT_MIN, LIKERT_MAX = 1, 5
QUESTIONNAIRE_ITEMS = tuple(range(1, 9))
FREE_TEXT_ITEMS = (4, 7)


class Phase(str, Enum):
    RUNNING = "running"
    PAUSED = "paused"
    FINISHED = "finished"


class FinishReason(str, Enum):
    TIMEOUT = "timeout"
    SOLVED = "solved"
    GAVE_UP = "gave-up"


class EventKind(str, Enum):
    SUBMIT = "submit"
    HELP = "help"
    SWITCH_REPRESENTATION = "switch-representation"
    PAUSE = "pause"
    RESUME = "resume"
    COPY_BLOCKS = "copy-blocks"
    ADD_BLOCK = "add-block"
    TIMEOUT = "timeout"
    GIVE_UP = "give-up"
    NEXT_PROBLEM = "next-problem"


# Event kinds that mutate the workspace or consume an attempt; they are
# only legal while Running and only while the clock has budget left.
_RUNNING_ONLY = frozenset(
    {
        EventKind.SUBMIT,
        EventKind.HELP,
        EventKind.SWITCH_REPRESENTATION,
        EventKind.COPY_BLOCKS,
        EventKind.ADD_BLOCK,
        EventKind.PAUSE,
        EventKind.GIVE_UP,
        EventKind.TIMEOUT,
    }
)


@dataclass(frozen=True)
class AttemptEvent:
    timestamp_ms: int
    representation: Representation
    kind: EventKind
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "type": "attempt",
            "timestamp_ms": self.timestamp_ms,
            "representation": self.representation.value,
            "kind": self.kind.value,
            "payload": dict(self.payload),
        }

    @staticmethod
    def from_dict(doc: dict) -> "AttemptEvent":
        return AttemptEvent(
            timestamp_ms=doc["timestamp_ms"],
            representation=Representation(doc["representation"]),
            kind=EventKind(doc["kind"]),
            payload=dict(doc.get("payload", {})),
        )


@dataclass(frozen=True)
class RatingRecord:
    learner_id: str
    problem_id: str
    paas: int
    timestamp_ms: int = 0

    def __post_init__(self) -> None:
        if not PAAS_MIN <= self.paas <= PAAS_MAX:
            raise OutOfRange(
                f"mental-effort rating {self.paas} outside {PAAS_MIN}..{PAAS_MAX}"
            )

    def to_dict(self) -> dict:
        return {
            "type": "rating",
            "learner_id": self.learner_id,
            "problem_id": self.problem_id,
            "paas": self.paas,
            "timestamp_ms": self.timestamp_ms,
        }

    @staticmethod
    def from_dict(doc: dict) -> "RatingRecord":
        return RatingRecord(
            learner_id=doc["learner_id"],
            problem_id=doc["problem_id"],
            paas=doc["paas"],
            timestamp_ms=doc.get("timestamp_ms", 0),
        )


@dataclass(frozen=True)
class QuestionnaireResponse:
    learner_id: str
    items: dict  # item number (1-8) -> rating 1-5
    free_text: dict = field(default_factory=dict)  # item number -> explanation

    def __post_init__(self) -> None:
        numbers = {int(k) for k in self.items}
        if numbers != set(QUESTIONNAIRE_ITEMS):
            missing = sorted(set(QUESTIONNAIRE_ITEMS) - numbers)
            extra = sorted(numbers - set(QUESTIONNAIRE_ITEMS))
            raise MissingItem(
                f"questionnaire needs items {QUESTIONNAIRE_ITEMS}; "
                f"missing {missing}, unexpected {extra}"
            )
        for number, value in self.items.items():
            if not LIKERT_MIN <= int(value) <= LIKERT_MAX:
                raise OutOfRange(
                    f"item {number} rating {value} outside {LIKERT_MIN}..{LIKERT_MAX}"
                )

    def to_dict(self) -> dict:
        return {
            "type": "questionnaire",
            "learner_id": self.learner_id,
            "items": {str(k): int(v) for k, v in sorted(self.items.items())},
            "free_text": {str(k): v for k, v in sorted(self.free_text.items())},
        }

    @staticmethod
    def from_dict(doc: dict) -> "QuestionnaireResponse":
        return QuestionnaireResponse(
            learner_id=doc["learner_id"],
            items={int(k): int(v) for k, v in doc["items"].items()},
            free_text={int(k): v for k, v in doc.get("free_text", {}).items()},
        )


@dataclass(frozen=True)
class SessionState:
    session_id: str
    learner_id: str
    problem_order: tuple[str, ...]
    limit_ms: int
    problem_index: int = 0
    representation: Representation = Representation.PARSONS_2D
    phase: Phase = Phase.RUNNING
    finish_reason: FinishReason | None = None
    elapsed_ms: int = 0
    anchor_ms: int = 0  # timestamp the Running clock last restarted from
    attempts: tuple[AttemptEvent, ...] = ()
    attempts_this_problem: int = 0
    adaptation: AdaptationState = AdaptationState()
    finished_problems: tuple[str, ...] = ()

    @property
    def current_problem(self) -> str:
        return self.problem_order[self.problem_index]

    def running_elapsed(self, now_ms: int) -> int:
        if self.phase is Phase.RUNNING:
            return self.elapsed_ms + max(0, now_ms - self.anchor_ms)
        return self.elapsed_ms

    def remaining_ms(self, now_ms: int) -> int:
        return max(0, self.limit_ms - self.running_elapsed(now_ms))

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "learner_id": self.learner_id,
            "problem_order": list(self.problem_order),
            "limit_ms": self.limit_ms,
            "problem_index": self.problem_index,
            "current_problem": self.current_problem,
            "representation": self.representation.value,
            "phase": self.phase.value,
            "finish_reason": self.finish_reason.value if self.finish_reason else None,
            "elapsed_ms": self.elapsed_ms,
            "anchor_ms": self.anchor_ms,
            "attempts": [e.to_dict() for e in self.attempts],
            "attempts_this_problem": self.attempts_this_problem,
            "adaptation": self.adaptation.to_dict(),
            "finished_problems": list(self.finished_problems),
        }


def start_session(
    session_id: str,
    learner_id: str,
    problem_order: tuple[str, ...],
    limit_ms: int,
    representation: Representation = Representation.PARSONS_2D,
    start_ms: int = 0,
    adaptation: AdaptationState | None = None,
) -> SessionState:
    if not problem_order:
        raise IllegalTransition("a session needs at least one problem")
    return SessionState(
        session_id=session_id,
        learner_id=learner_id,
        problem_order=tuple(problem_order),
        limit_ms=limit_ms,
        representation=Representation(representation),
        anchor_ms=start_ms,
        adaptation=adaptation if adaptation is not None else AdaptationState(),
    )


def _accrue(state: SessionState, now_ms: int) -> SessionState:
    if now_ms < state.anchor_ms:
        raise IllegalTransition(
            f"event timestamp {now_ms} precedes the clock anchor {state.anchor_ms}"
        )
    return replace(
        state, elapsed_ms=state.elapsed_ms + (now_ms - state.anchor_ms), anchor_ms=now_ms
    )


def _check_order(state: SessionState, event: AttemptEvent) -> None:
    if state.attempts and event.timestamp_ms < state.attempts[-1].timestamp_ms:
        raise IllegalTransition(
            "event timestamps must be non-decreasing within a session"
        )


def apply(state: SessionState, event: AttemptEvent) -> SessionState:
    """Advance the session state machine by one accepted event.

    Raises :class:`IllegalTransition` for events that are not legal in the
    current phase; such events must not be written to the log.
    """
    kind = EventKind(event.kind)
    _check_order(state, event)

    if kind is EventKind.NEXT_PROBLEM:
        if state.phase is not Phase.FINISHED:
            raise IllegalTransition("next-problem requires the current problem finished")
        if state.problem_index + 1 >= len(state.problem_order):
            raise IllegalTransition("no further problem in this session")
        outcome = Outcome(
            solved=state.finish_reason is FinishReason.SOLVED,
            attempts=state.attempts_this_problem,
            gave_up=state.finish_reason is FinishReason.GAVE_UP,
        )
        difficulty = inter_adapt(state.adaptation, outcome)
        adaptation = replace(
            state.adaptation, difficulty=difficulty, last_problem_attempts=0
        )
        limit = int(event.payload.get("limit_ms", state.limit_ms))
        return replace(
            state,
            problem_index=state.problem_index + 1,
            representation=Representation(event.representation),
            phase=Phase.RUNNING,
            finish_reason=None,
            elapsed_ms=0,
            anchor_ms=event.timestamp_ms,
            limit_ms=limit,
            attempts=state.attempts + (event,),
            attempts_this_problem=0,
            adaptation=adaptation,
        )

    if kind is EventKind.RESUME:
        if state.phase is not Phase.PAUSED:
            raise IllegalTransition("resume is only legal while paused")
        return replace(
            state,
            phase=Phase.RUNNING,
            anchor_ms=event.timestamp_ms,
            attempts=state.attempts + (event,),
        )

    if kind not in _RUNNING_ONLY:
        raise IllegalTransition(f"unsupported event kind {kind!r}")
    if state.phase is Phase.PAUSED:
        raise IllegalTransition(f"{kind.value} is not legal while paused")
    if state.phase is Phase.FINISHED:
        raise IllegalTransition(f"{kind.value} is not legal after the problem finished")

    accrued = _accrue(state, event.timestamp_ms)

    if kind is EventKind.TIMEOUT:
        if accrued.elapsed_ms < state.limit_ms:
            raise IllegalTransition(
                f"timeout before the limit ({accrued.elapsed_ms} < {state.limit_ms} ms)"
            )
        return replace(
            accrued,
            elapsed_ms=state.limit_ms,
            phase=Phase.FINISHED,
            finish_reason=FinishReason.TIMEOUT,
            attempts=state.attempts + (event,),
            finished_problems=state.finished_problems + (state.current_problem,),
        )

    if accrued.elapsed_ms > state.limit_ms:
        raise IllegalTransition(
            "time limit exceeded; record a timeout event instead"
        )

    new = replace(accrued, attempts=state.attempts + (event,))

    if kind is EventKind.PAUSE:
        return replace(new, phase=Phase.PAUSED)

    if kind is EventKind.GIVE_UP:
        return replace(
            new,
            phase=Phase.FINISHED,
            finish_reason=FinishReason.GAVE_UP,
            finished_problems=state.finished_problems + (state.current_problem,),
        )

    if kind is EventKind.SWITCH_REPRESENTATION:
        target = Representation(event.payload["to"])
        return replace(new, representation=target)

    if kind is EventKind.SUBMIT:
        new = replace(
            new,
            attempts_this_problem=state.attempts_this_problem + 1,
            adaptation=replace(
                state.adaptation,
                last_problem_attempts=state.attempts_this_problem + 1,
            ),
        )
        if bool(event.payload.get("solved")):
            return replace(
                new,
                phase=Phase.FINISHED,
                finish_reason=FinishReason.SOLVED,
                finished_problems=state.finished_problems + (state.current_problem,),
            )
        return new

    if kind is EventKind.HELP:
        return replace(
            new,
            adaptation=replace(
                new.adaptation, helps_used=new.adaptation.helps_used + 1
            ),
        )

    # copy-blocks / add-block carry no state beyond the logged event.
    return new


def tick(state: SessionState, now_ms: int) -> SessionState:
    """Fire a timeout if the Running clock has reached the limit."""
    if state.phase is Phase.RUNNING and state.running_elapsed(now_ms) >= state.limit_ms:
        event = AttemptEvent(
            timestamp_ms=now_ms,
            representation=state.representation,
            kind=EventKind.TIMEOUT,
        )
        return apply(state, event)
    return state


def replay(
    session_id: str,
    learner_id: str,
    problem_order: tuple[str, ...],
    limit_ms: int,
    representation: Representation,
    start_ms: int,
    events: list[AttemptEvent],
) -> SessionState:
    state = start_session(
        session_id, learner_id, problem_order, limit_ms, representation, start_ms
    )
    for event in events:
        state = apply(state, event)
    return state


# ---------------------------------------------------------------------------
# Event log (newline-delimited JSON)


def session_header(state: SessionState, start_ms: int = 0) -> dict:
    return {
        "type": "session",
        "session_id": state.session_id,
        "learner_id": state.learner_id,
        "problem_order": list(state.problem_order),
        "limit_ms": state.limit_ms,
        "representation": state.representation.value,
        "start_ms": start_ms,
    }


def append_record(path: str | Path, record: dict) -> None:
    with open(path, "a", encoding="utf-8") as handle:
        handle.write(json.dumps(record, sort_keys=True) + "\n")


def read_log(path: str | Path):
    """Parse an event log into (headers, attempts, ratings, questionnaires)."""
    headers: list[dict] = []
    attempts: list[AttemptEvent] = []
    ratings: list[RatingRecord] = []
    questionnaires: list[QuestionnaireResponse] = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            kind = doc.get("type")
            if kind == "session":
                headers.append(doc)
            elif kind == "attempt":
                attempts.append(AttemptEvent.from_dict(doc))
            elif kind == "rating":
                ratings.append(RatingRecord.from_dict(doc))
            elif kind == "questionnaire":
                questionnaires.append(QuestionnaireResponse.from_dict(doc))
            # Unknown record types are skipped so logs stay forward-compatible.
    return headers, attempts, ratings, questionnaires


def replay_log(path: str | Path) -> SessionState:
    headers, attempts, _, _ = read_log(path)
    if not headers:
        raise IllegalTransition("log has no session header")
    head = headers[0]
    return replay(
        session_id=head["session_id"],
        learner_id=head["learner_id"],
        problem_order=tuple(head["problem_order"]),
        limit_ms=head["limit_ms"],
        representation=Representation(head["representation"]),
        start_ms=head.get("start_ms", 0),
        events=attempts,
    )


# ---------------------------------------------------------------------------
# Instrument capture


class TelemetryStore:
    """Ratings (last write wins per learner × problem) and questionnaires."""

    def __init__(self) -> None:
        self.ratings: dict[tuple[str, str], RatingRecord] = {}
        self.questionnaires: list[QuestionnaireResponse] = []

    def record_paas(self, record: RatingRecord, problem_finished: bool) -> None:
        if not problem_finished:
            raise ProblemNotFinished(
                f"problem {record.problem_id!r} is not finished for "
                f"learner {record.learner_id!r}"
            )
        self.ratings[(record.learner_id, record.problem_id)] = record

    def record_questionnaire(self, response: QuestionnaireResponse) -> None:
        self.questionnaires.append(response)

    def all_ratings(self) -> list[RatingRecord]:
        return list(self.ratings.values())
