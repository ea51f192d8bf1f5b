"""Command-line entry points: authoring, grading, analytics, and serving."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .analytics import analytics_bundle
from .errors import EngineError
from .grading import Arrangement, grade
from .model import builtin_corpus_dir, load_spec
from .session import read_log
from .variants import DifficultyConfig, DistractorMode, derive


@click.group()
def main() -> None:
    """Multi-representation programming-practice engine."""


@click.group()
def author() -> None:
    """Authoring tools: derive learner-facing representations from a spec."""


@author.command("derive")
@click.option("--problem", "problem_path", required=True, type=click.Path(exists=True))
@click.option(
    "--rep",
    required=True,
    help="WriteCode | Parsons2D | FadedParsons | PseudocodeParsons | FixCode",
)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--distractors",
    type=click.Choice([m.value for m in DistractorMode]),
    default=DistractorMode.ALL_JUMBLED.value,
    show_default=True,
)
def author_derive(problem_path: str, rep: str, seed: int, distractors: str) -> None:
    """Emit the RenderedProblem for one representation as JSON."""
    spec = load_spec(problem_path)
    config = DifficultyConfig(distractor_mode=DistractorMode(distractors))
    try:
        rendered = derive(spec, rep, config, seed)
    except EngineError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    click.echo(json.dumps(rendered.to_dict(), indent=2))


@click.command("grade")
@click.option("--problem", "problem_path", required=True, type=click.Path(exists=True))
@click.option("--attempt", "attempt_path", required=True, type=click.Path(exists=True))
def grade_cmd(problem_path: str, attempt_path: str) -> None:
    """Print the GradeReport for an arrangement; exit 0 iff solved."""
    spec = load_spec(problem_path)
    doc = json.loads(Path(attempt_path).read_text(encoding="utf-8"))
    try:
        report = grade(Arrangement.from_dict(doc), spec)
    except EngineError as exc:
        raise click.ClickException(f"{exc.code}: {exc}") from exc
    click.echo(json.dumps(report.to_dict(), indent=2))
    sys.exit(0 if report.solved else 1)


@click.command("stats")
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
def stats(log_path: str) -> None:
    """Print the analytics bundle computed from an event log as JSON."""
    headers, _, ratings, questionnaires = read_log(log_path)
    order: list[str] = []
    for head in headers:
        for pid in head.get("problem_order", []):
            if pid not in order:
                order.append(pid)
    bundle = analytics_bundle(ratings, questionnaires, order or None)
    click.echo(json.dumps(bundle, indent=2))


@click.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), default=None)
@click.option("--log", "log_path", type=click.Path(), default=None)
@click.option(
    "--runner-cmd",
    default=None,
    help="External runner command; the ENGINE_RUNNER_CMD env var overrides this.",
)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", type=int, default=None, help="Server seed PRNG (logged).")
def serve(
    port: int,
    corpus_dir: str | None,
    log_path: str | None,
    runner_cmd: str | None,
    host: str,
    seed: int | None,
) -> None:
    """Run the HTTP service."""
    import os
    import shlex

    import uvicorn

    from .execfb import RUNNER_CMD_ENV
    from .service import create_app

    command = None
    env_cmd = os.environ.get(RUNNER_CMD_ENV)
    if env_cmd:
        command = shlex.split(env_cmd)
    elif runner_cmd:
        command = shlex.split(runner_cmd)
    app = create_app(
        corpus_dir=corpus_dir or builtin_corpus_dir(),
        log_path=log_path,
        runner_cmd=command,
        seed=seed,
    )
    uvicorn.run(app, host=host, port=port)


main.add_command(author)
main.add_command(grade_cmd)
main.add_command(stats)
main.add_command(serve)


if __name__ == "__main__":
    main()
