"""SAT back ends: in-process solvers from python-sat, any external
competition-style solver binary, and a small embedded DPLL solver used
for cross-checks and as a fallback."""

from __future__ import annotations

import logging
import os
import shlex
import subprocess
import sys
import tempfile
import threading
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

SAT, UNSAT, TIMEOUT, ERROR = "SAT", "UNSAT", "TIMEOUT", "ERROR"
ENV_SOLVER = "CWD_SAT_SOLVER"
PYSAT_NAMES = {"cadical": "cadical153", "cadical195": "cadical195", "glucose": "glucose4",
               "minisat": "minisat22"}
DEFAULT_BACKEND = "glucose"

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class RawCnf:
    """Plain clause list, for callers without a CnfInstance."""

    num_vars: int
    clauses: Sequence[Sequence[int]]


@dataclass
class SolveResult:
    verdict: str
    model: tuple[int, ...] | None = None
    seconds: float = 0.0
    solver: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def conclusive(self) -> bool:
        return self.verdict in (SAT, UNSAT)


@dataclass
class SolverConfig:
    """``backend`` is a python-sat solver alias, "embedded" or "external";
    the external command may contain a ``{cnf}`` placeholder, otherwise the
    file path is appended."""

    backend: str = DEFAULT_BACKEND
    command: Sequence[str] | None = None
    timeout: float | None = None
    workdir: str | None = None

    def __post_init__(self):
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")

    @classmethod
    def from_env(cls, timeout: float | None = None) -> "SolverConfig":
        spec = os.environ.get(ENV_SOLVER, "").strip()
        if not spec:
            return cls(timeout=timeout)
        return cls.parse(spec, timeout)

    @classmethod
    def parse(cls, spec: str, timeout: float | None = None) -> "SolverConfig":
        if spec in PYSAT_NAMES or spec in PYSAT_NAMES.values() or spec == "embedded":
            return cls(backend=spec, timeout=timeout)
        return cls(backend="external", command=shlex.split(spec), timeout=timeout)

    def describe(self) -> str:
        if self.backend == "external":
            return "external:" + " ".join(self.command or ())
        return self.backend


def check_model(inst, model: Iterable[int]) -> bool:
    """True iff every clause of ``inst`` (an instance or a clause list) has
    a literal in ``model``."""
    clauses = getattr(inst, "clauses", inst)
    true = set(model)
    return all(any(lit in true for lit in cl) for cl in clauses)


def _complete(model: Iterable[int], num_vars: int) -> tuple[int, ...]:
    """Fill in variables a solver left out as false."""
    vals = {}
    for x in model:
        if abs(x) > num_vars:
            log.warning("ignoring model literal %d beyond %d variables", x, num_vars)
        elif x:
            vals[abs(x)] = x
    return tuple(vals.get(v, -v) for v in range(1, num_vars + 1))


def parse_dimacs(text: str) -> tuple[int, list[tuple[int, ...]]]:
    num_vars = None
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise SolverError(f"line {lineno}: bad problem line {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            x = int(tok)
            if x == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(x)
    if cur:
        clauses.append(tuple(cur))
    if num_vars is None:
        raise SolverError("missing 'p cnf' line")
    return num_vars, clauses


def parse_solver_output(text: str) -> tuple[str | None, list[int]]:
    """Status and model literals from s/v lines."""
    status = None
    lits: list[int] = []
    for line in text.splitlines():
        if line.startswith("s "):
            word = line[2:].strip().upper()
            status = {"SATISFIABLE": SAT, "UNSATISFIABLE": UNSAT}.get(word, TIMEOUT)
        elif line.startswith("v "):
            lits.extend(int(x) for x in line[2:].split() if x != "0")
    return status, lits


def solve_external(inst, cfg: SolverConfig, dimacs: str | None = None) -> SolveResult:
    """Run a solver binary on a temporary DIMACS file. The s-line is
    authoritative; exit codes 10/20 only corroborate it. A SAT answer is
    accepted only with a model that satisfies every clause."""
    if not cfg.command:
        raise SolverError("external backend needs a command")
    clauses, num_vars = inst.clauses, inst.num_vars
    command, timeout = list(cfg.command), cfg.timeout
    if dimacs is None:
        body = [f"p cnf {num_vars} {len(clauses)}"] + [" ".join(map(str, c)) + " 0" for c in clauses]
        dimacs = "\n".join(body) + "\n"
    name = " ".join(command)
    with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
        fh.write(dimacs)
        path = fh.name
    argv = [a.replace("{cnf}", path) for a in command]
    if not any("{cnf}" in a for a in command):
        argv.append(path)
    start = time.monotonic()
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout,
                              cwd=cfg.workdir)
    except subprocess.TimeoutExpired:
        return SolveResult(TIMEOUT, seconds=time.monotonic() - start, solver=name)
    except OSError as e:
        return SolveResult(ERROR, seconds=time.monotonic() - start, solver=name,
                           stats={"error": str(e)})
    finally:
        os.unlink(path)
    elapsed = time.monotonic() - start
    status, lits = parse_solver_output(proc.stdout)
    stats = {"exit_code": proc.returncode}
    if status is None:
        stats["error"] = "no s-line in solver output"
        stats["output"] = (proc.stdout + proc.stderr)[-2000:]
        return SolveResult(ERROR, seconds=elapsed, solver=name, stats=stats)
    expected_code = {SAT: 10, UNSAT: 20}.get(status)
    if expected_code is not None and proc.returncode not in (expected_code, 0):
        stats["error"] = f"exit code {proc.returncode} contradicts {status}"
        return SolveResult(ERROR, seconds=elapsed, solver=name, stats=stats)
    if status == SAT:
        model = _complete(lits, num_vars)
        if not check_model(clauses, model):
            stats["error"] = "reported model does not satisfy the formula"
            log.error("%s: SAT claim with a model that violates the formula", name)
            return SolveResult(ERROR, seconds=elapsed, solver=name, stats=stats)
        return SolveResult(SAT, model, elapsed, name, stats)
    return SolveResult(status, None, elapsed, name, stats)


def solve_pysat(inst, backend: str = DEFAULT_BACKEND, timeout: float | None = None) -> SolveResult:
    from pysat.solvers import Solver

    clauses, num_vars = inst.clauses, inst.num_vars
    name = PYSAT_NAMES.get(backend, backend)
    start = time.monotonic()
    with Solver(name=name, bootstrap_with=clauses) as s:
        timer = None
        if timeout is not None:
            timer = threading.Timer(timeout, s.interrupt)
            timer.start()
        try:
            res = s.solve_limited(expect_interrupt=timer is not None)
        finally:
            if timer is not None:
                timer.cancel()
        elapsed = time.monotonic() - start
        stats = dict(s.accum_stats() or {})
        if res is None:
            return SolveResult(TIMEOUT, seconds=elapsed, solver=name, stats=stats)
        if not res:
            return SolveResult(UNSAT, seconds=elapsed, solver=name, stats=stats)
        model = _complete(s.get_model(), num_vars)
    if not check_model(clauses, model):
        raise SolverError(f"{name} returned a model that violates the formula")
    return SolveResult(SAT, model, elapsed, name, stats)


def unit_propagate(clauses: Sequence[Sequence[int]], assumptions: Iterable[int] = ()
                   ) -> tuple[bool, set[int]]:
    """Exhaustive unit propagation; returns (conflict, implied literals)."""
    assigned = set(assumptions)
    if any(-x in assigned for x in assigned):
        return True, assigned
    changed = True
    while changed:
        changed = False
        for cl in clauses:
            if any(x in assigned for x in cl):
                continue
            free = [x for x in cl if -x not in assigned]
            if not free:
                return True, assigned
            if len(free) == 1:
                assigned.add(free[0])
                changed = True
    return False, assigned


class _Dpll:
    """DPLL with two watched literals and chronological backtracking."""

    def __init__(self, clauses, num_vars):
        self.n = num_vars
        self.val = [0] * (num_vars + 1)
        self.clauses = []
        self.watch: dict[int, list[int]] = {}
        self.units = []
        self.empty = False
        for cl in clauses:
            cl = list(dict.fromkeys(cl))
            if any(-x in cl for x in cl):
                continue
            if not cl:
                self.empty = True
            elif len(cl) == 1:
                self.units.append(cl[0])
            else:
                idx = len(self.clauses)
                self.clauses.append(cl)
                self.watch.setdefault(cl[0], []).append(idx)
                self.watch.setdefault(cl[1], []).append(idx)
        self.trail: list[int] = []
        self.decisions = 0

    def value(self, lit):
        v = self.val[abs(lit)]
        return v if lit > 0 else -v

    def assign(self, lit):
        self.val[abs(lit)] = 1 if lit > 0 else -1
        self.trail.append(lit)

    def propagate(self, head):
        while head < len(self.trail):
            false_lit = -self.trail[head]
            head += 1
            watchers = self.watch.get(false_lit, [])
            keep = []
            conflict = False
            for pos, ci in enumerate(watchers):
                if conflict:
                    keep.append(ci)
                    continue
                cl = self.clauses[ci]
                if cl[0] == false_lit:
                    cl[0], cl[1] = cl[1], cl[0]
                if self.value(cl[0]) == 1:
                    keep.append(ci)
                    continue
                for j in range(2, len(cl)):
                    if self.value(cl[j]) != -1:
                        cl[1], cl[j] = cl[j], cl[1]
                        self.watch.setdefault(cl[1], []).append(ci)
                        break
                else:
                    keep.append(ci)
                    if self.value(cl[0]) == -1:
                        conflict = True
                    else:
                        self.assign(cl[0])
            self.watch[false_lit] = keep
            if conflict:
                return None
        return head

    def solve(self, budget):
        if self.empty:
            return UNSAT
        for u in self.units:
            if self.value(u) == -1:
                return UNSAT
            if self.value(u) == 0:
                self.assign(u)
        head = self.propagate(0)
        if head is None:
            return UNSAT
        # stack of (trail length before decision, decision literal, flipped)
        stack: list[tuple[int, int, bool]] = []
        nxt = 1
        while True:
            while nxt <= self.n and self.val[nxt] != 0:
                nxt += 1
            if nxt > self.n:
                return SAT
            if self.decisions >= budget:
                return TIMEOUT
            self.decisions += 1
            stack.append((len(self.trail), -nxt, False))
            self.assign(-nxt)
            head = self.propagate(head)
            while head is None:
                while stack and stack[-1][2]:
                    self._undo(stack.pop()[0])
                if not stack:
                    return UNSAT
                mark, lit, _ = stack.pop()
                self._undo(mark)
                stack.append((mark, -lit, True))
                self.assign(-lit)
                head = self.propagate(mark)
            nxt = 1

    def _undo(self, mark):
        while len(self.trail) > mark:
            self.val[abs(self.trail.pop())] = 0


def solve_embedded(inst, budget: int = 10_000_000) -> SolveResult:
    """``budget`` caps the number of decisions; exceeding it is an ERROR."""
    clauses, num_vars = inst.clauses, inst.num_vars
    start = time.monotonic()
    d = _Dpll(clauses, num_vars)
    verdict = d.solve(budget)
    elapsed = time.monotonic() - start
    stats = {"decisions": d.decisions}
    if verdict == TIMEOUT:
        stats["error"] = "budget"
        return SolveResult(ERROR, seconds=elapsed, solver="embedded", stats=stats)
    if verdict != SAT:
        return SolveResult(verdict, seconds=elapsed, solver="embedded", stats=stats)
    model = tuple(v if d.val[v] > 0 else -v for v in range(1, num_vars + 1))
    if not check_model(clauses, model):
        raise SolverError("embedded solver produced an invalid model")
    return SolveResult(SAT, model, elapsed, "embedded", stats)


def solve(inst, config: SolverConfig | None = None, dimacs: str | None = None) -> SolveResult:
    cfg = config or SolverConfig.from_env()
    if cfg.backend == "external":
        return solve_external(inst, cfg, dimacs)
    if cfg.backend == "embedded":
        return solve_embedded(inst)
    return solve_pysat(inst, cfg.backend, cfg.timeout)


def minisolver_command() -> list[str]:
    """Command line of the bundled competition-format solver wrapper."""
    return [sys.executable, "-m", "cliquewidth.minisolver"]
