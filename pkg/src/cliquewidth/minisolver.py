"""Competition-format wrapper: ``python -m cliquewidth.minisolver FILE``.

Prints an s-line and v-lines and exits with 10 (SAT), 20 (UNSAT) or 0
(unknown), so it can stand in for an external solver binary.
"""

from __future__ import annotations

import argparse
import sys

from .solvers import PYSAT_NAMES, SAT, UNSAT, RawCnf, parse_dimacs, solve_embedded, solve_pysat


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="cliquewidth.minisolver")
    ap.add_argument("cnf")
    ap.add_argument("--backend", default="embedded",
                    choices=["embedded", *PYSAT_NAMES])
    args = ap.parse_args(argv)
    with open(args.cnf) as fh:
        cnf = RawCnf(*parse_dimacs(fh.read()))
    if args.backend == "embedded":
        res = solve_embedded(cnf)
    else:
        res = solve_pysat(cnf, args.backend)
    if res.verdict == SAT:
        print("s SATISFIABLE")
        lits = list(res.model) + [0]
        for i in range(0, len(lits), 20):
            print("v " + " ".join(map(str, lits[i:i + 20])))
        return 10
    if res.verdict == UNSAT:
        print("s UNSATISFIABLE")
        return 20
    print("s UNKNOWN")
    return 0


if __name__ == "__main__":
    sys.exit(main())
