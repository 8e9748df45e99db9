"""Critical points of Euclidean distance and likelihood objectives on
algebraic varieties, computed by monodromy and certified by the trace test."""

import json
import os

from ._core import DEFAULT_SEED, ParseError, normalize_problem, run_json

__all__ = ["CritfiberError", "ParseError", "DEFAULT_SEED", "run", "solve", "degree", "trace_check",
           "normalize_problem"]


class CritfiberError(RuntimeError):
    """A run failed; `code` is the exit code the command-line tool would return."""

    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _complex_list(values):
    return None if values is None else [complex(v) for v in values]


def run(command, problem, *, u=None, seed=DEFAULT_SEED, bound=None, certify=False, threads=1,
        tol_endpoint=None, tol_dedup=None, max_loops=100, stall=15, fiber=None):
    """Run one command and return the report as a dict.

    `problem` is a path to a problem file or the problem text itself. The
    report carries `exit_code`; parse and seeding failures raise CritfiberError.
    """
    is_path = isinstance(problem, os.PathLike) or ("\n" not in problem and os.path.exists(problem))
    text = json.loads(run_json(
        command,
        problem_path=os.fspath(problem) if is_path else None,
        problem_text=None if is_path else problem,
        u=_complex_list(u), seed=seed, bound=bound, certify=certify, threads=threads,
        tol_endpoint=tol_endpoint, tol_dedup=tol_dedup, max_loops=max_loops, stall=stall,
        fiber=None if fiber is None else [_complex_list(x) for x in fiber]))
    if "error" in text:
        raise CritfiberError(text["error"], text["exit_code"])
    return text


def solve(problem, **kwargs):
    return run("solve", problem, **kwargs)


def degree(problem, **kwargs):
    return run("degree", problem, **kwargs)["degree"]


def trace_check(problem, report, **kwargs):
    """Trace test on the fiber of a previous `solve` report."""
    fiber = [[complex(re, im) for re, im in p["x"]] for p in report["points"]]
    u = [complex(re, im) for re, im in report["u"]]
    return run("trace-check", problem, u=u, fiber=fiber, **kwargs)
