import pytest

from parsonkit.errors import EmptyArrangement, ProtocolError, RunnerUnavailable
from parsonkit.execfb import RunnerClient, assemble, run_tests
from parsonkit.grading import Arrangement, PlacedBlock, canonical_arrangement
from parsonkit.model import Representation, canonical_program


class TestAssemble:
    def test_editor_text_passes_through_verbatim(self, locate):
        arr = Arrangement(
            problem_id="locate",
            representation=Representation.WRITE_CODE,
            editor_text="def locate(a, b):\n    return []",
        )
        assert assemble(arr, locate) == "def locate(a, b):\n    return []"

    def test_empty_editor_rejected(self, locate):
        arr = Arrangement(
            problem_id="locate",
            representation=Representation.WRITE_CODE,
            editor_text="   ",
        )
        with pytest.raises(EmptyArrangement):
            assemble(arr, locate)

    def test_empty_placement_rejected(self, locate):
        arr = Arrangement(
            problem_id="locate", representation=Representation.PARSONS_2D
        )
        with pytest.raises(EmptyArrangement):
            assemble(arr, locate)

    def test_canonical_parsons_assembles_canonical_program(self, corpus):
        for spec in corpus.values():
            assert assemble(canonical_arrangement(spec), spec) == canonical_program(
                spec
            )

    def test_faded_unfilled_blank_renders_placeholder(self, locate):
        placed = [
            p if p.id != "s0" else PlacedBlock(id="s0", indent=0, blank_fills=())
            for p in canonical_arrangement(locate, Representation.FADED_PARSONS).placed
        ]
        arr = Arrangement(
            problem_id="locate",
            representation=Representation.FADED_PARSONS,
            placed=tuple(placed),
        )
        assert assemble(arr, locate).splitlines()[0] == "def locate(___, lst2):"

    def test_faded_unedited_fixcode_renders_buggy_text(self, locate):
        placed = [
            p if p.id != "s4" else PlacedBlock(id="s4", indent=3)
            for p in canonical_arrangement(locate, Representation.FADED_PARSONS).placed
        ]
        arr = Arrangement(
            problem_id="locate",
            representation=Representation.FADED_PARSONS,
            placed=tuple(placed),
        )
        assert "missing_append(i)" in assemble(arr, locate)

    def test_placed_indent_wins_over_solution_indent(self, middle):
        placed = [
            PlacedBlock(id="m0", indent=0),
            PlacedBlock(id="m1", indent=3, blank_fills=("//",)),
            PlacedBlock(id="m2", indent=1),
        ]
        arr = Arrangement(
            problem_id="middle",
            representation=Representation.PARSONS_2D,
            placed=tuple(placed),
        )
        assert assemble(arr, middle).splitlines()[1] == "            mid = len(lst) // 2"

    def test_distractor_and_learner_blocks_render(self, middle):
        placed = [
            PlacedBlock(id="m0", indent=0),
            PlacedBlock(id="md0", indent=1),
            PlacedBlock(id="zz", indent=1, text="pass"),
        ]
        arr = Arrangement(
            problem_id="middle",
            representation=Representation.PARSONS_2D,
            placed=tuple(placed),
        )
        lines = assemble(arr, middle).splitlines()
        assert lines[1] == "    mid = len(lst) / 2"
        assert lines[2] == "    pass"


class TestRunnerClient:
    def test_canonical_program_passes_all_tests(self, corpus):
        for spec in corpus.values():
            report = run_tests(canonical_program(spec), list(spec.test_cases))
            assert report.compiled and report.all_passed, spec.id

    def test_failing_program_reports_failures(self, middle):
        source = "def middle(lst):\n    return lst[0]\n"
        report = run_tests(source, list(middle.test_cases))
        assert report.compiled
        assert not report.all_passed
        statuses = {r.ordinal: r.status for r in report.results}
        assert statuses[4] == "pass"  # single element
        assert statuses[1] == "fail"

    def test_missing_runner_command_unavailable(self):
        client = RunnerClient(["/no/such/binary"])
        with pytest.raises(RunnerUnavailable):
            client.run_tests("x = 1", [])

    def test_garbage_reply_is_protocol_error(self, tmp_path):
        script = tmp_path / "bad_runner.sh"
        script.write_text("#!/bin/sh\necho 'not json'\n")
        script.chmod(0o755)
        client = RunnerClient([str(script)])
        with pytest.raises(ProtocolError):
            client.run_tests("x = 1", [])

    def test_silent_runner_is_unavailable(self, tmp_path):
        script = tmp_path / "mute_runner.sh"
        script.write_text("#!/bin/sh\nexit 3\n")
        script.chmod(0o755)
        client = RunnerClient([str(script)])
        with pytest.raises(RunnerUnavailable):
            client.run_tests("x = 1", [])

    def test_env_var_selects_runner(self, monkeypatch):
        monkeypatch.setenv("ENGINE_RUNNER_CMD", "/custom/runner --flag")
        assert RunnerClient().command == ["/custom/runner", "--flag"]
