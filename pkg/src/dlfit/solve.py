"""SAT backends: built-in CDCL, in-process pysat, or an external DIMACS solver.

Every SAT answer is checked clause by clause before it is returned.
"""

from __future__ import annotations

import argparse
import os
import shlex
import subprocess
import sys
import tempfile
import threading
import time
from dataclasses import dataclass, field

from .cdcl import SAT, TIMEOUT, UNSAT, CDCLSolver
from .cnf import CnfInstance, parse_dimacs
from .errors import (
    InputError,
    ModelVerificationError,
    SolverConfigError,
    SolverOutputError,
    SolverProcessError,
)

BUILTIN = "builtin"
PYSAT = "pysat"
AUTO = "auto"
EXTERNAL = "external"
SOLVER_ENV = "DLFIT_SOLVER"
# interruptible solver inside pysat
PYSAT_ENGINE = "glucose4"


@dataclass
class SolveResult:
    status: str
    model: list | None = None
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status == SAT

    def value(self, var: int) -> bool:
        return bool(self.model[var])


class CancelToken:
    """Shared stop flag; also fires registered interrupt callbacks."""

    def __init__(self):
        self._event = threading.Event()
        self._lock = threading.Lock()
        self._hooks = []

    def cancel(self):
        with self._lock:
            self._event.set()
            hooks = list(self._hooks)
        for fn in hooks:
            try:
                fn()
            except Exception:
                pass

    def is_set(self) -> bool:
        return self._event.is_set()

    def register(self, fn):
        with self._lock:
            if self._event.is_set():
                fire = True
            else:
                self._hooks.append(fn)
                fire = False
        if fire:
            fn()

    def unregister(self, fn):
        with self._lock:
            if fn in self._hooks:
                self._hooks.remove(fn)


def pysat_available() -> bool:
    try:
        import pysat.solvers  # noqa: F401
    except ImportError:
        return False
    return True


def verify_model(cnf: CnfInstance, model) -> None:
    if model is None or len(model) < cnf.n_vars + 1:
        raise ModelVerificationError("model does not cover every variable")
    for clause in cnf.clauses:
        if not any(model[lit] if lit > 0 else not model[-lit] for lit in clause):
            raise ModelVerificationError(f"model falsifies clause {clause}")


def _check_cnf(cnf: CnfInstance) -> None:
    try:
        cnf.check()
    except InputError as exc:
        raise InputError(f"malformed CNF: {exc}") from None


def resolve_backend(backend: str | None) -> str:
    backend = backend or AUTO
    if backend == AUTO:
        return PYSAT if pysat_available() else BUILTIN
    if backend == PYSAT and not pysat_available():
        raise SolverConfigError("pysat backend requested but python-sat is not installed")
    if backend not in (BUILTIN, PYSAT):
        raise SolverConfigError(f"unknown backend {backend!r}")
    return backend


def solve(
    cnf: CnfInstance,
    budget: float | None = None,
    backend: str | None = AUTO,
    cancel: CancelToken | None = None,
    command: str | None = None,
) -> SolveResult:
    """Decide ``cnf`` within ``budget`` seconds (None means unlimited).

    ``command`` (or the DLFIT_SOLVER environment variable when backend is
    "external") selects an external DIMACS solver instead.
    """
    _check_cnf(cnf)
    if cancel is not None and cancel.is_set():
        return SolveResult(TIMEOUT, None, {"wall_time": 0.0, "cancelled": True})
    if backend == EXTERNAL or command:
        command = command or os.environ.get(SOLVER_ENV)
        if not command:
            raise SolverConfigError(f"external backend needs a command or ${SOLVER_ENV}")
        return solve_external(cnf, command, budget, cancel)
    backend = resolve_backend(backend)
    start = time.monotonic()
    if backend == PYSAT:
        result = _solve_pysat(cnf, budget, cancel)
    else:
        result = _solve_builtin(cnf, budget, cancel)
    result.stats["wall_time"] = time.monotonic() - start
    result.stats["backend"] = backend
    if result.status == SAT:
        verify_model(cnf, result.model)
    return result


def _solve_builtin(cnf, budget, cancel) -> SolveResult:
    deadline = None if budget is None else time.monotonic() + budget
    solver = CDCLSolver(cnf.n_vars, cnf.clauses)
    status = solver.solve(deadline=deadline, should_stop=cancel.is_set if cancel else None)
    stats = {"conflicts": solver.conflicts, "decisions": solver.decisions}
    return SolveResult(status, solver.model() if status == SAT else None, stats)


def _solve_pysat(cnf, budget, cancel) -> SolveResult:
    from pysat.solvers import Solver

    if any(len(c) == 0 for c in cnf.clauses):
        return SolveResult(UNSAT, None, {"conflicts": 0, "decisions": 0})
    solver = Solver(name=PYSAT_ENGINE, bootstrap_with=cnf.clauses)
    timer = None
    try:
        if cnf.n_vars and solver.nof_vars() < cnf.n_vars:
            # make sure every declared variable appears in the model
            solver.add_clause([cnf.n_vars, -cnf.n_vars])
        if budget is not None:
            timer = threading.Timer(budget, solver.interrupt)
            timer.daemon = True
            timer.start()
        if cancel is not None:
            cancel.register(solver.interrupt)
            # an interrupt delivered before the search starts is not seen by the solver
            if cancel.is_set():
                return SolveResult(TIMEOUT, None, {"conflicts": 0, "decisions": 0})
        if budget is None and cancel is None:
            answer = solver.solve()
        else:
            answer = solver.solve_limited(expect_interrupt=True)
        acc = solver.accum_stats() or {}
        stats = {"conflicts": acc.get("conflicts", 0), "decisions": acc.get("decisions", 0)}
        if answer is None:
            return SolveResult(TIMEOUT, None, stats)
        if not answer:
            return SolveResult(UNSAT, None, stats)
        model = [False] * (cnf.n_vars + 1)
        for lit in solver.get_model():
            if 0 < lit <= cnf.n_vars:
                model[lit] = True
        return SolveResult(SAT, model, stats)
    finally:
        if timer is not None:
            timer.cancel()
        if cancel is not None:
            cancel.unregister(solver.interrupt)
        solver.delete()


def parse_solver_output(text: str, n_vars: int) -> tuple[str, list | None]:
    status = None
    values = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            elif word in ("UNKNOWN", "INDETERMINATE"):
                status = TIMEOUT
            else:
                raise SolverOutputError(f"unrecognised status line {line!r}")
        elif line.startswith("v "):
            for tok in line[2:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise SolverOutputError(f"bad literal {tok!r} in model line") from None
                if lit == 0:
                    continue
                if abs(lit) > n_vars:
                    raise SolverOutputError(f"model literal {lit} exceeds {n_vars} variables")
                values[abs(lit)] = lit > 0
    if status is None:
        raise SolverOutputError("solver output has no 's' status line")
    if status != SAT:
        return status, None
    if not values and n_vars:
        raise SolverOutputError("SATISFIABLE without a model")
    model = [False] * (n_vars + 1)
    for v, b in values.items():
        model[v] = b
    return status, model


def solve_external(
    cnf: CnfInstance,
    command: str,
    budget: float | None = None,
    cancel: CancelToken | None = None,
) -> SolveResult:
    """Run ``command <file.cnf>`` and parse SAT-competition style output."""
    _check_cnf(cnf)
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    if not argv:
        raise SolverConfigError("empty solver command")
    start = time.monotonic()
    with tempfile.TemporaryDirectory(prefix="dlfit-") as tmp:
        path = os.path.join(tmp, "instance.cnf")
        with open(path, "w") as fh:
            fh.write(cnf.to_dimacs())
        try:
            proc = subprocess.Popen(
                argv + [path], stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True
            )
        except FileNotFoundError:
            raise SolverConfigError(f"solver executable not found: {argv[0]!r}") from None
        except PermissionError:
            raise SolverConfigError(f"solver executable not runnable: {argv[0]!r}") from None
        if cancel is not None:
            cancel.register(proc.kill)
        try:
            out, err = proc.communicate(timeout=budget)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            return SolveResult(TIMEOUT, None, {"wall_time": time.monotonic() - start, "backend": EXTERNAL})
        finally:
            if cancel is not None:
                cancel.unregister(proc.kill)
    stats = {"wall_time": time.monotonic() - start, "backend": EXTERNAL, "returncode": proc.returncode}
    if cancel is not None and cancel.is_set():
        return SolveResult(TIMEOUT, None, stats)
    # SAT-competition exit codes are 10 / 20; anything else except 0 is a failure
    if proc.returncode not in (0, 10, 20):
        raise SolverProcessError(
            f"solver exited with code {proc.returncode}: {err.strip()[:200]}"
        )
    status, model = parse_solver_output(out, cnf.n_vars)
    if status == SAT:
        verify_model(cnf, model)
    return SolveResult(status, model, stats)


def main(argv=None) -> int:
    """Minimal DIMACS solver front end (exit 10 SAT, 20 UNSAT, 0 unknown)."""
    ap = argparse.ArgumentParser(prog="python -m dlfit.solve", description=main.__doc__)
    ap.add_argument("cnf", help="DIMACS file")
    ap.add_argument("--backend", default=AUTO, choices=[AUTO, BUILTIN, PYSAT])
    ap.add_argument("--budget", type=float, default=None)
    args = ap.parse_args(argv)
    with open(args.cnf) as fh:
        cnf = parse_dimacs(fh.read())
    res = solve(cnf, args.budget, args.backend)
    if res.status == SAT:
        print("s SATISFIABLE")
        lits = [v if res.model[v] else -v for v in range(1, cnf.n_vars + 1)]
        print("v " + " ".join(map(str, lits)) + " 0")
        return 10
    if res.status == UNSAT:
        print("s UNSATISFIABLE")
        return 20
    print("s UNKNOWN")
    return 0


if __name__ == "__main__":
    sys.exit(main())
