import json
from pathlib import Path

from click.testing import CliRunner

from parsonkit.cli import author, grade_cmd, main, stats
from parsonkit.grading import canonical_arrangement
from parsonkit.model import builtin_corpus_dir
from parsonkit.session import AttemptEvent, EventKind, RatingRecord, append_record
from parsonkit.model import Representation

LOCATE = str(builtin_corpus_dir() / "locate.json")


class TestAuthorDerive:
    def test_emits_rendered_problem_json(self):
        result = CliRunner().invoke(
            author,
            ["derive", "--problem", LOCATE, "--rep", "FadedParsons", "--seed", "7"],
        )
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)
        assert doc["representation"] == "FadedParsons"
        assert doc["seed"] == 7

    def test_deterministic_output(self):
        args = ["derive", "--problem", LOCATE, "--rep", "Parsons2D", "--seed", "3"]
        a = CliRunner().invoke(author, args).output
        b = CliRunner().invoke(author, args).output
        assert a == b

    def test_distractor_mode_flag(self):
        result = CliRunner().invoke(
            author,
            [
                "derive", "--problem", LOCATE, "--rep", "Parsons2D",
                "--seed", "1", "--distractors", "none",
            ],
        )
        doc = json.loads(result.output)
        assert all(b["kind"] == "solution" for b in doc["source_blocks"])

    def test_bad_representation_fails_cleanly(self):
        result = CliRunner().invoke(
            author, ["derive", "--problem", LOCATE, "--rep", "Bogus"]
        )
        assert result.exit_code != 0


class TestGrade:
    def test_solved_exits_zero(self, tmp_path, locate):
        attempt = tmp_path / "attempt.json"
        attempt.write_text(json.dumps(canonical_arrangement(locate).to_dict()))
        result = CliRunner().invoke(
            grade_cmd, ["--problem", LOCATE, "--attempt", str(attempt)]
        )
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["solved"] is True

    def test_unsolved_exits_one(self, tmp_path, locate):
        doc = canonical_arrangement(locate).to_dict()
        doc["placed"] = doc["placed"][:-1]
        attempt = tmp_path / "attempt.json"
        attempt.write_text(json.dumps(doc))
        result = CliRunner().invoke(
            grade_cmd, ["--problem", LOCATE, "--attempt", str(attempt)]
        )
        assert result.exit_code == 1
        assert json.loads(result.output)["solved"] is False


class TestStats:
    def test_prints_bundle_from_log(self, tmp_path):
        log = tmp_path / "events.ndjson"
        append_record(
            log,
            {
                "type": "session",
                "session_id": "s",
                "learner_id": "L1",
                "problem_order": ["p5"],
                "limit_ms": 600000,
                "representation": "Parsons2D",
                "start_ms": 0,
            },
        )
        for n, v in enumerate([1, 2, 5, 6, 7, 7, 7, 8, 8]):
            append_record(log, RatingRecord(f"L{n}", "p5", v).to_dict())
        result = CliRunner().invoke(stats, ["--log", str(log)])
        assert result.exit_code == 0, result.output
        bundle = json.loads(result.output)
        assert bundle["problems"]["p5"]["mean"] == 5.67
        assert bundle["problems"]["p5"]["sd"] == 2.55

    def test_tolerates_attempt_lines(self, tmp_path):
        log = tmp_path / "events.ndjson"
        event = AttemptEvent(
            timestamp_ms=1,
            representation=Representation.PARSONS_2D,
            kind=EventKind.GIVE_UP,
        )
        append_record(log, event.to_dict())
        append_record(log, RatingRecord("L1", "p1", 4).to_dict())
        result = CliRunner().invoke(stats, ["--log", str(log)])
        assert result.exit_code == 0, result.output


class TestEntryPoints:
    def test_main_group_exposes_subcommands(self):
        result = CliRunner().invoke(main, ["--help"])
        for name in ("author", "grade", "stats", "serve"):
            assert name in result.output

    def test_console_scripts_installed(self):
        import importlib.metadata as md

        eps = md.entry_points()
        if hasattr(eps, "select"):
            names = {e.name for e in eps.select(group="console_scripts")}
        else:  # pragma: no cover - older interpreter API
            names = {e.name for e in eps.get("console_scripts", [])}
        assert {"parsonkit", "author", "grade", "serve", "stats"} <= names
