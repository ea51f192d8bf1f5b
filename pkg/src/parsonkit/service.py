"""HTTP facade over the engine: problems, sessions, grading, execution,
help, and telemetry.

JSON mirrors the domain types one-to-one.  Session mutations are serialized
per session id with a lock; every accepted action appends one line to the
event log.  The server assigns derivation seeds when the client omits them,
from a process-level PRNG whose seed is logged at startup.
"""

from __future__ import annotations

import logging
import random
import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from . import analytics, session as sess
from .errors import (
    EngineError,
    IllegalTransition,
    NotApplicable,
    RepresentationUnavailable,
)
from .execfb import RunnerClient, assemble
from .grading import Arrangement, grade
from .helpx import (
    HelpAction,
    Workspace,
    add_block,
    apply_help,
    copy_blocks,
    intra_adapt,
)
from .model import ProblemSpec, Representation, builtin_corpus_dir, load_corpus
from .variants import DifficultyConfig, RenderedProblem, derive

logger = logging.getLogger("parsonkit.service")


class NotFound(EngineError):
    code = "NotFound"
    http_status = 404


@dataclass
class SessionRuntime:
    state: sess.SessionState
    rendered: RenderedProblem
    workspace: Workspace
    spec: ProblemSpec
    started_at: float  # monotonic seconds at session start
    lock: threading.Lock = field(default_factory=threading.Lock)
    records: list = field(default_factory=list)  # log lines for this session
    editor_texts: dict = field(default_factory=dict)  # representation -> text


def create_app(
    corpus_dir: str | Path | None = None,
    log_path: str | Path | None = None,
    runner_cmd: list[str] | None = None,
    seed: int | None = None,
) -> FastAPI:
    app = FastAPI(title="parsonkit", version="1.0")
    corpus = load_corpus(corpus_dir or builtin_corpus_dir())
    server_seed = seed if seed is not None else random.SystemRandom().getrandbits(64)
    logger.info("server seed prng initialised with seed %d", server_seed)
    prng = random.Random(server_seed)
    runner = RunnerClient(runner_cmd)
    sessions: dict[str, SessionRuntime] = {}
    telemetry = sess.TelemetryStore()
    registry_lock = threading.Lock()

    def log_record(runtime: SessionRuntime, record: dict) -> None:
        record = dict(record)
        record["session_id"] = runtime.state.session_id
        runtime.records.append(record)
        if log_path:
            sess.append_record(log_path, record)

    def get_spec(problem_id: str) -> ProblemSpec:
        spec = corpus.get(problem_id)
        if spec is None:
            raise NotFound(f"unknown problem {problem_id!r}")
        return spec

    def get_runtime(session_id: str) -> SessionRuntime:
        runtime = sessions.get(session_id)
        if runtime is None:
            raise NotFound(f"unknown session {session_id!r}")
        return runtime

    def now_ms(runtime: SessionRuntime, body: dict | None = None) -> int:
        # Simulated-clock hook: clients (and tests) may timestamp events
        # themselves; otherwise the server clock is authoritative.
        if body and "at_ms" in body:
            return int(body["at_ms"])
        return int((time.monotonic() - runtime.started_at) * 1000)

    def auto_timeout(runtime: SessionRuntime, at: int) -> None:
        before = runtime.state
        runtime.state = sess.tick(runtime.state, at)
        if runtime.state is not before:
            log_record(runtime, runtime.state.attempts[-1].to_dict())

    def record_event(
        runtime: SessionRuntime, kind: sess.EventKind, at: int, payload: dict
    ) -> None:
        event = sess.AttemptEvent(
            timestamp_ms=at,
            representation=runtime.state.representation,
            kind=kind,
            payload=payload,
        )
        runtime.state = sess.apply(runtime.state, event)
        log_record(runtime, event.to_dict())

    def fresh_render(
        runtime: SessionRuntime, representation: Representation, at: int
    ) -> None:
        spec = get_spec(runtime.state.current_problem)
        rendered = derive(
            spec,
            representation,
            runtime.state.adaptation.difficulty,
            prng.getrandbits(64),
        )
        runtime.spec = spec
        runtime.rendered = rendered
        runtime.workspace = Workspace.from_rendered(rendered)

    def session_view(runtime: SessionRuntime) -> dict:
        return {
            "state": runtime.state.to_dict(),
            "rendered": runtime.rendered.to_dict(),
            "workspace": runtime.workspace.to_dict(),
        }

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400, content={"code": "ValidationError", "message": str(exc)}
        )

    @app.exception_handler(KeyError)
    async def key_error_handler(request: Request, exc: KeyError):
        return JSONResponse(
            status_code=400,
            content={"code": "ValidationError", "message": f"missing field {exc}"},
        )

    # ------------------------------------------------------------------
    # Problems

    @app.get("/problems")
    def list_problems() -> list[dict]:
        return [
            {
                "id": spec.id,
                "title": spec.title,
                "category": spec.category,
                "representations": [r.value for r in spec.available_representations()],
            }
            for spec in sorted(corpus.values(), key=lambda s: s.id)
        ]

    @app.get("/problems/{problem_id}")
    def get_problem(
        problem_id: str, rep: str = "Parsons2D", seed: int | None = None
    ) -> dict:
        spec = get_spec(problem_id)
        try:
            representation = Representation(rep)
        except ValueError as exc:
            raise RepresentationUnavailable(f"unknown representation {rep!r}") from exc
        used_seed = seed if seed is not None else prng.getrandbits(64)
        rendered = derive(spec, representation, DifficultyConfig(), used_seed)
        doc = rendered.to_dict()
        doc["time_limit"] = spec.time_limit
        doc["test_cases"] = [
            {"ordinal": t.ordinal, "call": t.call, "expected": t.expected}
            for t in spec.test_cases
        ]
        return doc

    # ------------------------------------------------------------------
    # Sessions

    @app.post("/sessions", status_code=201)
    def create_session(body: dict) -> dict:
        learner = body.get("learner_id") or body.get("learner")
        order = tuple(body.get("problem_order", ()))
        if not learner or not order:
            raise IllegalTransition("learner_id and problem_order are required") from None
        for pid in order:
            get_spec(pid)
        representation = Representation(body.get("representation", "Parsons2D"))
        first = get_spec(order[0])
        session_id = body.get("session_id") or uuid.uuid4().hex[:12]
        state = sess.start_session(
            session_id=session_id,
            learner_id=learner,
            problem_order=order,
            limit_ms=first.time_limit * 1000,
            representation=representation,
            start_ms=0,
        )
        rendered = derive(
            first, representation, state.adaptation.difficulty, prng.getrandbits(64)
        )
        runtime = SessionRuntime(
            state=state,
            rendered=rendered,
            workspace=Workspace.from_rendered(rendered),
            spec=first,
            started_at=time.monotonic(),
        )
        with registry_lock:
            sessions[session_id] = runtime
        log_record(runtime, sess.session_header(state))
        return {"session_id": session_id, **session_view(runtime)}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            auto_timeout(runtime, now_ms(runtime))
            return session_view(runtime)

    def _sync_workspace(runtime: SessionRuntime, arrangement: Arrangement) -> None:
        placed_ids = {p.id for p in arrangement.placed}
        tray_ids = [b.id for b in runtime.rendered.source_blocks]
        custom = dict(runtime.workspace.custom_texts)
        known = set(tray_ids) | set(custom)
        for placed in arrangement.placed:
            if placed.id not in known and placed.text is not None:
                custom[placed.id] = placed.text
        tray = tuple(
            t
            for t in (list(tray_ids) + sorted(set(custom) - set(tray_ids)))
            if t not in placed_ids
        )
        runtime.workspace = Workspace(
            tray=tray, placed=arrangement.placed, custom_texts=custom
        )

    @app.post("/sessions/{session_id}/arrangement")
    def submit_arrangement(session_id: str, body: dict) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            if runtime.state.phase is not sess.Phase.RUNNING:
                raise IllegalTransition(
                    f"submit is not legal while {runtime.state.phase.value}"
                )
            arrangement = Arrangement.from_dict(body["arrangement"])
            report = grade(arrangement, runtime.spec)
            record_event(
                runtime,
                sess.EventKind.SUBMIT,
                at,
                {
                    "mode": "structural",
                    "arrangement": arrangement.to_dict(),
                    "report": report.to_dict(),
                    "solved": report.solved,
                },
            )
            _sync_workspace(runtime, arrangement)
            return {"report": report.to_dict(), "state": runtime.state.to_dict()}

    @app.post("/sessions/{session_id}/run")
    def run_arrangement(session_id: str, body: dict) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            arrangement = Arrangement.from_dict(body["arrangement"])
            if runtime.state.phase is not sess.Phase.RUNNING:
                raise IllegalTransition(
                    f"run is not legal while {runtime.state.phase.value}"
                )
            source = assemble(arrangement, runtime.spec)
            report = runner.run_tests(source, list(runtime.spec.test_cases))
            solved = report.all_passed
            record_event(
                runtime,
                sess.EventKind.SUBMIT,
                at,
                {
                    "mode": "execution",
                    "arrangement": arrangement.to_dict(),
                    "report": report.to_dict(),
                    "solved": solved,
                },
            )
            if arrangement.representation in (
                Representation.WRITE_CODE,
                Representation.FIX_CODE,
            ):
                runtime.editor_texts[arrangement.representation.value] = (
                    arrangement.editor_text
                )
            else:
                _sync_workspace(runtime, arrangement)
            return {"report": report.to_dict(), "state": runtime.state.to_dict()}

    @app.post("/sessions/{session_id}/help")
    def request_help(session_id: str, body: dict) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            if runtime.state.phase is not sess.Phase.RUNNING:
                raise IllegalTransition(
                    f"help is not legal while {runtime.state.phase.value}"
                )
            action = body.get("action", "")
            if action == "MakeEasier":
                rendered, what = intra_adapt(runtime.rendered, runtime.spec)
                removed = {b.id for b in runtime.rendered.source_blocks} - {
                    b.id for b in rendered.source_blocks
                }
                added = [
                    b.id
                    for b in rendered.source_blocks
                    if b.id not in {x.id for x in runtime.rendered.source_blocks}
                ]
                runtime.rendered = rendered
                tray = tuple(
                    t for t in runtime.workspace.tray if t not in removed
                ) + tuple(added)
                placed = tuple(
                    p for p in runtime.workspace.placed if p.id not in removed
                )
                runtime.workspace = replace(
                    runtime.workspace, tray=tray, placed=placed
                )
                record_event(
                    runtime, sess.EventKind.HELP, at, {"action": action, "effect": what}
                )
                return {
                    "effect": {"action": action, "detail": {"change": what}},
                    **session_view(runtime),
                }
            try:
                help_action = HelpAction(action)
            except ValueError as exc:
                raise NotApplicable(f"unknown help action {action!r}") from exc
            workspace, effect = apply_help(
                help_action, runtime.workspace, runtime.rendered, runtime.spec
            )
            record_event(
                runtime, sess.EventKind.HELP, at, {"action": action, "effect": effect.to_dict()}
            )
            runtime.workspace = workspace
            return {"effect": effect.to_dict(), **session_view(runtime)}

    @app.post("/sessions/{session_id}/add-block")
    def post_add_block(session_id: str, body: dict) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            if runtime.state.phase is not sess.Phase.RUNNING:
                raise IllegalTransition(
                    f"add-block is not legal while {runtime.state.phase.value}"
                )
            workspace, block_id = add_block(runtime.workspace, body.get("text", ""))
            record_event(
                runtime,
                sess.EventKind.ADD_BLOCK,
                at,
                {"block_id": block_id, "text": body.get("text", "")},
            )
            runtime.workspace = workspace
            return {"block_id": block_id, **session_view(runtime)}

    @app.post("/sessions/{session_id}/copy-blocks")
    def post_copy_blocks(session_id: str, body: dict) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            if runtime.state.phase is not sess.Phase.RUNNING:
                raise IllegalTransition(
                    f"copy-blocks is not legal while {runtime.state.phase.value}"
                )
            target = Representation(body.get("target", "WriteCode"))
            text = copy_blocks(runtime.workspace, runtime.rendered, runtime.spec, target)
            existing = runtime.editor_texts.get(target.value, "")
            combined = (existing + "\n" + text).strip("\n") if existing else text
            runtime.editor_texts[target.value] = combined
            record_event(
                runtime,
                sess.EventKind.COPY_BLOCKS,
                at,
                {"target": target.value, "text": text},
            )
            return {
                "text": text,
                "editor_text": combined,
                "state": runtime.state.to_dict(),
            }

    @app.post("/sessions/{session_id}/representation")
    def switch_representation(session_id: str, body: dict) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            target = Representation(body["to"])
            record_event(
                runtime, sess.EventKind.SWITCH_REPRESENTATION, at, {"to": target.value}
            )
            fresh_render(runtime, target, at)
            return session_view(runtime)

    @app.post("/sessions/{session_id}/pause")
    def pause(session_id: str, body: dict | None = None) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            record_event(runtime, sess.EventKind.PAUSE, at, {})
            return {"state": runtime.state.to_dict()}

    @app.post("/sessions/{session_id}/resume")
    def resume(session_id: str, body: dict | None = None) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            record_event(runtime, sess.EventKind.RESUME, at, {})
            return {"state": runtime.state.to_dict()}

    @app.post("/sessions/{session_id}/give-up")
    def give_up(session_id: str, body: dict | None = None) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            record_event(runtime, sess.EventKind.GIVE_UP, at, {})
            return {"state": runtime.state.to_dict()}

    @app.post("/sessions/{session_id}/next")
    def next_problem(session_id: str, body: dict | None = None) -> dict:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            if runtime.state.problem_index + 1 >= len(runtime.state.problem_order):
                raise IllegalTransition("no further problem in this session")
            next_spec = get_spec(
                runtime.state.problem_order[runtime.state.problem_index + 1]
            )
            record_event(
                runtime,
                sess.EventKind.NEXT_PROBLEM,
                at,
                {"limit_ms": next_spec.time_limit * 1000},
            )
            fresh_render(runtime, runtime.state.representation, at)
            runtime.editor_texts = {}
            return session_view(runtime)

    # ------------------------------------------------------------------
    # Instruments and analytics

    @app.post("/sessions/{session_id}/paas", status_code=204)
    def post_paas(session_id: str, body: dict) -> Response:
        runtime = get_runtime(session_id)
        with runtime.lock:
            at = now_ms(runtime, body)
            auto_timeout(runtime, at)
            problem_id = body.get("problem_id", runtime.state.current_problem)
            record = sess.RatingRecord(
                learner_id=runtime.state.learner_id,
                problem_id=problem_id,
                paas=int(body["rating"]),
                timestamp_ms=at,
            )
            telemetry.record_paas(
                record, problem_finished=problem_id in runtime.state.finished_problems
            )
            log_record(runtime, record.to_dict())
            return Response(status_code=204)

    @app.post("/sessions/{session_id}/questionnaire", status_code=204)
    def post_questionnaire(session_id: str, body: dict) -> Response:
        runtime = get_runtime(session_id)
        with runtime.lock:
            response = sess.QuestionnaireResponse(
                learner_id=runtime.state.learner_id,
                items={int(k): int(v) for k, v in body.get("items", {}).items()},
                free_text={int(k): v for k, v in body.get("free_text", {}).items()},
            )
            telemetry.record_questionnaire(response)
            log_record(runtime, response.to_dict())
            return Response(status_code=204)

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str) -> PlainTextResponse:
        import json as _json

        runtime = get_runtime(session_id)
        with runtime.lock:
            lines = [_json.dumps(r, sort_keys=True) for r in runtime.records]
        return PlainTextResponse(
            "\n".join(lines) + ("\n" if lines else ""),
            media_type="application/x-ndjson",
        )

    @app.get("/stats")
    def get_stats() -> dict:
        return analytics.analytics_bundle(
            telemetry.all_ratings(), list(telemetry.questionnaires)
        )

    @app.get("/questionnaire-items")
    def questionnaire_items() -> dict:
        import json as _json

        path = Path(__file__).parent / "data" / "questionnaire_items.json"
        return _json.loads(path.read_text(encoding="utf-8"))

    return app
