"""Experiment drivers: prime-graph survey by vertex count, random G(n, p)
sweep and the named-graph table. All write versioned CSV."""

from __future__ import annotations

import csv
import io
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

from .catalog import catalog_entry, load_catalog_graph
from .encoder import encode
from .graph import (PRNG_NAME, Graph, canonical_form, enumerate_connected, is_connected,
                    is_prime, parse_graph6, random_gnp, to_graph6)
from .search import Certificate, SearchOptions, clique_width

SURVEY_SCHEMA = "cliquewidth-survey/1"
SWEEP_SCHEMA = "cliquewidth-sweep/1"
TABLE_SCHEMA = "cliquewidth-table/1"
UNKNOWN = "?"


@dataclass
class SurveyRow:
    n: int
    connected: int = 0
    prime: int = 0
    widths: dict[int, int] = field(default_factory=dict)
    inconclusive: int = 0
    # graph6 of the prime graphs with the largest width seen
    widest: list[str] = field(default_factory=list)

    @property
    def max_width(self) -> int | None:
        return max(self.widths, default=None)

    def check(self):
        if self.prime > self.connected:
            raise AssertionError("more prime than connected graphs")
        if sum(self.widths.values()) + self.inconclusive != self.prime:
            raise AssertionError("width counts do not add up to the prime count")


@dataclass
class SweepPoint:
    n: int
    p: float
    samples: int
    mean: float | None
    stddev: float | None
    seed_base: int
    inconclusive: int = 0
    values: list[int] = field(default_factory=list)


def _solve_g6(args) -> tuple[str, int | None]:
    g6, opts = args
    cert = clique_width(parse_graph6(g6), opts)
    return g6, cert.cwd


def _map(fn, items, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            yield from pool.map(fn, items, chunksize=4)
    else:
        yield from map(fn, items)


def read_graph6_stream(fh: TextIO) -> Iterator[Graph]:
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if line and not line.startswith("#"):
            yield parse_graph6(line, name=f"line{lineno}")


def survey(n: int | None = None, graphs: Iterable[Graph] | None = None,
           opts: SearchOptions | None = None, workers: int = 1, keep_widest: int = 10) -> SurveyRow:
    """Count connected and prime graphs and the clique-width of every prime
    one. Non-prime graphs are counted but not solved."""
    if graphs is None:
        if n is None:
            raise ValueError("give n or a graph stream")
        graphs = enumerate_connected(n)
    opts = opts or SearchOptions()
    row = SurveyRow(n or 0)
    primes = []
    for g in graphs:
        if n is None:
            row.n = g.n
        elif g.n != n:
            raise ValueError(f"stream graph has {g.n} vertices, expected {n}")
        if not is_connected(g):
            continue
        row.connected += 1
        if is_prime(g):
            primes.append(to_graph6(g))
    row.prime = len(primes)
    by_width: dict[int, list[str]] = {}
    for g6, cwd in _map(_solve_g6, [(x, opts) for x in primes], workers):
        if cwd is None:
            row.inconclusive += 1
        else:
            by_width.setdefault(cwd, []).append(g6)
    row.widths = {w: len(v) for w, v in sorted(by_width.items())}
    if by_width:
        row.widest = by_width[max(by_width)][:keep_widest]
    row.check()
    return row


def write_survey_csv(rows: list[SurveyRow], out: TextIO, meta: dict | None = None):
    seen = [w for r in rows for w in r.widths]
    lo, top = min(seen + [2]), max(seen + [2])
    cols = [f"cw{w}" for w in range(lo, top + 1)]
    out.write(_meta_line(SURVEY_SCHEMA, meta))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "connected", "prime", *cols, "inconclusive", "widest_graph6"])
    for r in rows:
        w.writerow([r.n, r.connected, r.prime,
                    *[r.widths.get(int(c[2:]), 0) for c in cols],
                    r.inconclusive if r.inconclusive == 0 else f"{UNKNOWN}{r.inconclusive}",
                    " ".join(r.widest)])


def _meta_line(schema: str, meta: dict | None) -> str:
    parts = [f"schema={schema}"] + [f"{k}={v}" for k, v in (meta or {}).items()]
    return "# " + " ".join(parts) + "\n"


def sample_seed(seed: int, p_index: int, sample: int) -> int:
    """Seed of one sweep graph; distinct for every (p, sample) cell."""
    return seed * 1_000_000 + p_index * 1_000 + sample


def p_grid(step: float) -> list[float]:
    if not 0 < step <= 1:
        raise ValueError("p-grid step must lie in (0, 1]")
    count = round(1 / step)
    if abs(count * step - 1) > 1e-9:
        raise ValueError("p-grid step must divide 1")
    return [round(j * step, 10) for j in range(count + 1)]


def sweep(n: int, ps: Iterable[float], samples: int, seed: int = 0,
          opts: SearchOptions | None = None) -> list[SweepPoint]:
    if samples < 1:
        raise ValueError("need at least one sample per point")
    opts = opts or SearchOptions()
    points = []
    for j, p in enumerate(ps):
        vals, unknown = [], 0
        for s in range(samples):
            g = random_gnp(n, p, sample_seed(seed, j, s))
            cert = clique_width(g, opts)
            if cert.exact:
                vals.append(cert.cwd)
            else:
                unknown += 1
        mean = statistics.fmean(vals) if vals else None
        sd = statistics.pstdev(vals) if vals else None
        points.append(SweepPoint(n, p, samples, mean, sd, sample_seed(seed, j, 0), unknown, vals))
    return points


def write_sweep_csv(points: list[SweepPoint], out: TextIO, meta: dict | None = None):
    meta = {"prng": PRNG_NAME, **(meta or {})}
    out.write(_meta_line(SWEEP_SCHEMA, meta))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "p", "samples", "solved", "inconclusive", "mean", "stddev", "seed_base"])
    for pt in points:
        w.writerow([pt.n, f"{pt.p:g}", pt.samples, len(pt.values),
                    pt.inconclusive if pt.inconclusive == 0 else f"{UNKNOWN}{pt.inconclusive}",
                    UNKNOWN if pt.mean is None else f"{pt.mean:.4f}",
                    UNKNOWN if pt.stddev is None else f"{pt.stddev:.4f}", pt.seed_base])


@dataclass
class TableRow:
    name: str
    n: int
    m: int
    reference_cwd: int | None
    cwd: int | None
    lower: int
    upper: int
    variables: int | None
    clauses: int | None
    seconds: float


def named_table(names: Iterable[str], opts: SearchOptions | None = None) -> list[TableRow]:
    """Clique-width of catalog graphs with the size of the UNSAT instance
    F(G, cwd - 1, n - cwd + 2)."""
    opts = opts or SearchOptions()
    rows = []
    for name in names:
        entry = catalog_entry(name)
        g = load_catalog_graph(name)
        start = time.monotonic()
        cert: Certificate = clique_width(g, opts)
        elapsed = time.monotonic() - start
        nv = nc = None
        if cert.exact and cert.cwd and cert.cwd > 2:
            inst = encode(g, cert.cwd - 1, encoding=opts.encoding)
            nv, nc = inst.num_vars, inst.num_clauses
        rows.append(TableRow(entry.name, g.n, g.m, entry.reference_cwd, cert.cwd, cert.lower,
                             cert.upper, nv, nc, round(elapsed, 2)))
    return rows


def write_table_csv(rows: list[TableRow], out: TextIO, meta: dict | None = None):
    out.write(_meta_line(TABLE_SCHEMA, meta))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["graph", "n", "m", "reference_cwd", "cwd", "lower", "upper", "variables",
                "clauses", "seconds"])
    for r in rows:
        w.writerow([r.name, r.n, r.m, r.reference_cwd if r.reference_cwd is not None else "",
                    UNKNOWN if r.cwd is None else r.cwd, r.lower, r.upper,
                    r.variables or "", r.clauses or "", f"{r.seconds:.2f}"])


def to_csv_text(writer, items, meta=None) -> str:
    buf = io.StringIO()
    writer(items, buf, meta)
    return buf.getvalue()


def canonical_widest(row: SurveyRow) -> list[str]:
    return sorted(canonical_form(parse_graph6(x)) for x in row.widest)
