"""Bridge to an external SMT solver process."""
from __future__ import annotations

import shlex
import subprocess
import time
from dataclasses import dataclass


class SolverError(Exception):
    pass


class SolverSpawnError(SolverError):
    pass


class SolverTimeout(SolverError):
    pass


@dataclass(frozen=True)
class SolverResult:
    verdict: str  # sat, unsat, unknown or error
    stdout: str
    stderr: str
    returncode: int
    seconds: float


def _verdict(stdout: str) -> str:
    for line in stdout.splitlines():
        word = line.strip()
        if word in ("sat", "unsat", "unknown"):
            return word
    return "error"


def run_solver(command, script_text: str, timeout: float = 600.0) -> SolverResult:
    """Feed ``script_text`` to ``command`` on stdin and collect its output.

    ``communicate`` writes and reads the pipes concurrently, so a solver that
    answers before reading all its input cannot deadlock us.
    """
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    if not argv:
        raise SolverSpawnError("empty solver command")
    t0 = time.perf_counter()
    try:
        proc = subprocess.Popen(argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                stderr=subprocess.PIPE, text=True)
    except OSError as e:
        raise SolverSpawnError(f"cannot start {argv[0]}: {e}") from e
    try:
        out, err = proc.communicate(script_text, timeout=timeout)
    except subprocess.TimeoutExpired:
        proc.kill()
        proc.communicate()
        raise SolverTimeout(f"solver exceeded {timeout} s") from None
    return SolverResult(_verdict(out), out, err, proc.returncode, time.perf_counter() - t0)
