import json
import subprocess
import sys

from parsonkit.runner import handle_request

GOOD = "def add(a, b):\n    return a + b\n"


class TestHandleRequest:
    def test_pass_fail_and_error(self):
        reply = handle_request(
            {
                "request_id": "r1",
                "source": GOOD,
                "tests": [
                    {"ordinal": 1, "call": "add(2, 3)", "expected": "5"},
                    {"ordinal": 2, "call": "add(2, 3)", "expected": "6"},
                    {"ordinal": 3, "call": "add(2)", "expected": "5"},
                ],
                "timeout_ms": 5000,
            }
        )
        assert reply["request_id"] == "r1"
        assert reply["compiled"] is True
        by = {r["ordinal"]: r for r in reply["results"]}
        assert by[1]["status"] == "pass"
        assert by[1]["actual"] == "5"
        assert by[2]["status"] == "fail"
        assert by[3]["status"] == "error"
        assert "TypeError" in by[3]["error"]

    def test_structural_equality_not_textual(self):
        reply = handle_request(
            {
                "request_id": "r2",
                "source": "def f():\n    return [1, 2]\n",
                "tests": [{"ordinal": 1, "call": "f()", "expected": "[1,2]"}],
                "timeout_ms": 5000,
            }
        )
        assert reply["results"][0]["status"] == "pass"

    def test_runtime_error_format_matches_interpreter(self):
        reply = handle_request(
            {
                "request_id": "r3",
                "source": "def f(lst):\n    return lst[10]\n",
                "tests": [{"ordinal": 1, "call": "f([1])", "expected": "1"}],
                "timeout_ms": 5000,
            }
        )
        assert reply["results"][0]["error"] == "IndexError: list index out of range"

    def test_syntax_error_marks_not_compiled(self):
        reply = handle_request(
            {
                "request_id": "r4",
                "source": "def f(:\n",
                "tests": [{"ordinal": 1, "call": "f()", "expected": "1"}],
                "timeout_ms": 5000,
            }
        )
        assert reply["compiled"] is False
        assert reply["results"][0]["status"] == "error"
        assert "SyntaxError" in reply["results"][0]["error"]

    def test_timeout_kills_runaway_test(self):
        reply = handle_request(
            {
                "request_id": "r5",
                "source": "def f():\n    while True:\n        pass\n",
                "tests": [{"ordinal": 1, "call": "f()", "expected": "1"}],
                "timeout_ms": 300,
            }
        )
        assert reply["results"][0]["status"] == "error"
        assert reply["results"][0]["error"] == "timeout"

    def test_each_test_runs_in_fresh_namespace(self):
        reply = handle_request(
            {
                "request_id": "r6",
                "source": "state = []\n\ndef poke():\n    state.append(1)\n    return len(state)\n",
                "tests": [
                    {"ordinal": 1, "call": "poke()", "expected": "1"},
                    {"ordinal": 2, "call": "poke()", "expected": "1"},
                ],
                "timeout_ms": 5000,
            }
        )
        assert all(r["status"] == "pass" for r in reply["results"])


class TestProtocolOverStdio:
    def test_one_line_in_one_line_out(self):
        request = {
            "request_id": "abc",
            "source": GOOD,
            "tests": [{"ordinal": 1, "call": "add(1, 1)", "expected": "2"}],
            "timeout_ms": 5000,
        }
        proc = subprocess.run(
            [sys.executable, "-m", "parsonkit.runner"],
            input=json.dumps(request) + "\n",
            capture_output=True,
            text=True,
            timeout=30,
        )
        lines = proc.stdout.strip().splitlines()
        assert len(lines) == 1
        reply = json.loads(lines[0])
        assert reply["request_id"] == "abc"
        assert reply["results"][0]["status"] == "pass"

    def test_malformed_request_yields_error_line(self):
        proc = subprocess.run(
            [sys.executable, "-m", "parsonkit.runner"],
            input="this is not json\n",
            capture_output=True,
            text=True,
            timeout=30,
        )
        reply = json.loads(proc.stdout.strip().splitlines()[0])
        assert "error" in reply
