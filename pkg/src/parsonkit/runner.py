"""External test runner — line-oriented JSON protocol.

Reads one JSON request per line from stdin and writes one JSON reply per
line to stdout (UTF-8):

  Request: {"request_id", "source", "tests": [{"ordinal", "call", "expected"}],
            "timeout_ms"}
  Reply:   {"request_id", "compiled", "results": [{"ordinal", "status",
            "expected", "actual", "error", "wall_time_ms"}]}

Each test executes the submitted source in a fresh child process, evaluates
the call expression, and compares the value against the evaluated expected
expression with ``==`` (structural equality, so formatting of literals never
matters).  A test that exceeds ``timeout_ms`` is killed and reported as
``status: "error"`` with message ``"timeout"``.

This process is the designated place to run untrusted code; the engine never
executes learner code in-process.  Resource jails beyond the per-test
timeout are out of scope here.
"""

import json
import multiprocessing
import sys
import time

DEFAULT_TIMEOUT_MS = 5000


def _execute_one(source: str, call: str, expected: str, conn) -> None:
    try:
        expected_value = eval(expected, {})  # noqa: S307 - trusted author literal
    except Exception as exc:
        conn.send({"status": "error", "error": f"bad expected value: {exc}"})
        return
    try:
        namespace: dict = {}
        exec(compile(source, "<submission>", "exec"), namespace)  # noqa: S102
        actual = eval(call, namespace)  # noqa: S307
    except Exception as exc:
        conn.send({"status": "error", "error": f"{type(exc).__name__}: {exc}"})
        return
    status = "pass" if actual == expected_value else "fail"
    conn.send({"status": status, "actual": repr(actual)})


def _run_test(source: str, test: dict, timeout_ms: int) -> dict:
    ctx = multiprocessing.get_context("fork" if sys.platform != "win32" else "spawn")
    parent_conn, child_conn = ctx.Pipe(duplex=False)
    proc = ctx.Process(
        target=_execute_one,
        args=(source, test["call"], test["expected"], child_conn),
    )
    started = time.monotonic()
    proc.start()
    child_conn.close()
    proc.join(timeout_ms / 1000.0)
    wall_ms = int((time.monotonic() - started) * 1000)
    if proc.is_alive():
        proc.terminate()
        proc.join()
        outcome = {"status": "error", "error": "timeout"}
    elif parent_conn.poll():
        outcome = parent_conn.recv()
    else:
        outcome = {"status": "error", "error": f"runner child died (exit {proc.exitcode})"}
    parent_conn.close()
    return {
        "ordinal": test["ordinal"],
        "status": outcome["status"],
        "expected": test["expected"],
        "actual": outcome.get("actual"),
        "error": outcome.get("error"),
        "wall_time_ms": wall_ms,
    }


def handle_request(request: dict) -> dict:
    source = request.get("source", "")
    tests = request.get("tests", [])
    timeout_ms = int(request.get("timeout_ms") or DEFAULT_TIMEOUT_MS)

    try:
        compile(source, "<submission>", "exec")
        compiled = True
        compile_error = None
    except SyntaxError as exc:
        compiled = False
        compile_error = f"SyntaxError: {exc}"

    results = []
    for test in tests:
        if compiled:
            results.append(_run_test(source, test, timeout_ms))
        else:
            results.append(
                {
                    "ordinal": test["ordinal"],
                    "status": "error",
                    "expected": test["expected"],
                    "actual": None,
                    "error": compile_error,
                    "wall_time_ms": 0,
                }
            )
    return {
        "request_id": request.get("request_id"),
        "compiled": compiled,
        "results": results,
    }


def main() -> None:
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            print(json.dumps({"request_id": None, "error": f"bad request: {exc}"}), flush=True)
            continue
        print(json.dumps(handle_request(request)), flush=True)


if __name__ == "__main__":
    main()
