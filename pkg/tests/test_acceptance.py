"""Acceptance criteria 1 to 9. Each test records one PASS/FAIL line, printed
again in the terminal summary."""

import time

import pytest

from cliquewidth.catalog import catalog_entry, load_catalog_graph
from cliquewidth.derivation import check_models, make_strict, validate_derivation
from cliquewidth.encoder import DIRECT, REPRESENTATIVE, encode, expected_variables
from cliquewidth.experiments import canonical_widest, p_grid, survey, sweep
from cliquewidth.graph import (canonical_form, cycle_graph, enumerate_connected, is_prime,
                               path_graph, prism_graph)
from cliquewidth.kexpr import (derivation_to_expr, evaluate, expr_to_derivation, parse_expr,
                               print_expr, verify_expression)
from cliquewidth.oracle import oracle_cwd, oracle_min_derivation
from cliquewidth.search import Certificate, clique_width, decide_width_at_most, verify_certificate
from cliquewidth.solvers import solve_pysat, unit_propagate

NAMED = {"petersen": 5, "chvatal": 5, "frucht": 5, "paley-13": 9, "poussin": 7,
         "shrikhande": 9, "clebsch": 8, "hoffman": 6, "sousselier": 6}
NAMED_CEILING = 30 * 60
SURVEY = {4: (6, 1, {3: 1}), 5: (21, 4, {3: 4}), 6: (112, 26, {3: 25, 4: 1}),
          7: (853, 260, {3: 210, 4: 50})}
SURVEY_CEILING = 3 * 3600
SWEEP_CEILING = 3600


def small_connected():
    """The 30 connected classes on 2..5 vertices."""
    return [g for n in (2, 3, 4, 5) for g in enumerate_connected(n)]


def roundtrip_ok(g, k) -> bool:
    """SAT at k, then decode, make strict, convert to an expression and back."""
    res = decide_width_at_most(g, k)
    if res.verdict != "SAT":
        return False
    d = make_strict(res.derivation, g)
    e = derivation_to_expr(d, g)
    back = expr_to_derivation(e)
    return (evaluate(e).underlying() == g and verify_expression(e, g, k)
            and parse_expr(print_expr(e)) == e and check_models(back, g).ok
            and validate_derivation(back).ok)


def test_criterion_1_p4_ground_truth(criterion):
    start = time.monotonic()
    g = path_graph(4)
    two = decide_width_at_most(g, 2).verdict
    three = decide_width_at_most(g, 3).verdict
    cert = clique_width(g)
    verified = verify_certificate(Certificate.from_json(cert.to_json()), g).ok
    elapsed = time.monotonic() - start
    ok = two == "UNSAT" and three == "SAT" and cert.cwd == 3 and verified and elapsed < 1
    assert criterion(1, ok, f"k=2 {two}, k=3 {three}, cwd={cert.cwd}, verified={verified}, "
                            f"{elapsed:.2f}s")


def test_criterion_2_variable_counts(criterion):
    named = [("petersen", 4, 7, 1040), ("chvatal", 4, 9, 1800), ("paley-13", 8, 6, 1820)]
    got = []
    for name, k, t, want in named:
        for enc in (REPRESENTATIVE, DIRECT):
            inst = encode(load_catalog_graph(name), k, encoding=enc)
            got.append(inst.varmap.t == t and inst.num_vars == want)
    closed = []
    for g in [path_graph(n) for n in range(2, 10)] + [cycle_graph(n) for n in range(3, 10)]:
        for k in range(2, g.n + 1):
            for enc in (REPRESENTATIVE, DIRECT):
                inst = encode(g, k, encoding=enc)
                closed.append(inst.num_vars == g.n * (g.n + k - 1) * (g.n - k + 2)
                              == expected_variables(g.n, k))
    ok = all(got) and all(closed)
    assert criterion(2, ok, f"named totals {sum(got)}/{len(got)}, closed form "
                            f"{sum(closed)}/{len(closed)} instances")


@pytest.mark.slow
def test_criterion_3_named_graphs(criterion):
    parts, ok = [], True
    for name, want in NAMED.items():
        g = load_catalog_graph(name)
        start = time.monotonic()
        cert = clique_width(g)
        elapsed = time.monotonic() - start
        good = (cert.exact and cert.cwd == want == catalog_entry(name).reference_cwd
                and elapsed < NAMED_CEILING
                and verify_certificate(Certificate.from_json(cert.to_json()), g).ok)
        ok &= good
        parts.append(f"{name}={cert.cwd}({elapsed:.0f}s){'' if good else '!'}")
    assert criterion(3, ok, " ".join(parts))


@pytest.mark.slow
def test_criterion_4_survey(criterion):
    parts, ok = [], True
    start = time.monotonic()
    rows = {}
    for n, (connected, prime, widths) in SURVEY.items():
        row = survey(n)
        rows[n] = row
        good = (row.connected, row.prime, row.widths, row.inconclusive) == \
            (connected, prime, widths, 0)
        ok &= good
        parts.append(f"n={n}: {row.connected}/{row.prime}/{row.widths}{'' if good else '!'}")
    prism = canonical_widest(rows[6]) == [canonical_form(prism_graph(3))]
    # smallest vertex count reaching width 1, 2, 3, 4
    first = {}
    for n in range(1, 8):
        for w in (survey(n).widths if n < 4 else rows[n].widths):
            first.setdefault(w, n)
    prefix = [first.get(w) for w in (1, 2, 3, 4)] == [1, 2, 4, 6]
    elapsed = time.monotonic() - start
    ok &= prism and prefix and elapsed < SURVEY_CEILING
    parts.append(f"cw4 at n=6 is the prism: {prism}; prefix 1,2,4,6: {prefix}; {elapsed:.0f}s")
    assert criterion(4, ok, "; ".join(parts))


def test_criterion_5_oracle_equivalence(criterion):
    graphs = small_connected()
    mismatches, bad_witness = [], 0
    for g in graphs:
        want = oracle_cwd(g)
        cert = clique_width(g)
        if cert.cwd != want:
            mismatches.append(g.sorted_edges())
        d = oracle_min_derivation(g, want)
        e = derivation_to_expr(d, g)
        witness_ok = (validate_derivation(d).ok and check_models(d, g).ok
                      and verify_expression(e, g, want) and parse_expr(print_expr(e)) == e)
        if want >= 2:
            witness_ok &= roundtrip_ok(g, want)
        bad_witness += not witness_ok
    ok = len(graphs) == 30 and not mismatches and not bad_witness
    assert criterion(5, ok, f"{len(graphs)} classes, {len(mismatches)} cwd mismatches, "
                            f"{bad_witness} bad witnesses")


@pytest.mark.slow
def test_criterion_6_certificate_round_trip(criterion):
    cases = [(path_graph(4), 3)]
    cases += [(load_catalog_graph(name), k) for name, k in NAMED.items()]
    for n in (4, 5, 6, 7):
        for g in enumerate_connected(n):
            if is_prime(g):
                cases.append((g, None))
    cases += [(g, None) for g in small_connected()]
    failed = 0
    for g, k in cases:
        cert = clique_width(g) if k is None else None
        if cert is not None:
            k = cert.cwd
            if not verify_certificate(Certificate.from_json(cert.to_json()), g).ok:
                failed += 1
                continue
            e = parse_expr(cert.expression)
            if not check_models(expr_to_derivation(e), g).ok:
                failed += 1
                continue
        if k >= 2 and not roundtrip_ok(g, k):
            failed += 1
    assert criterion(6, failed == 0, f"{len(cases)} SAT witnesses, {failed} failed")


def test_criterion_7_encoding_agreement(criterion):
    disagreements, instances = 0, 0
    for g in small_connected():
        for k in range(2, g.n + 1):
            a = solve_pysat(encode(g, k, encoding=REPRESENTATIVE)).verdict
            b = solve_pysat(encode(g, k, encoding=DIRECT)).verdict
            instances += 1
            disagreements += a != b or a not in ("SAT", "UNSAT")
    # three vertices of one component in distinct groups, two group numbers
    g = cycle_graph(5)
    inst = encode(g, 2, encoding=DIRECT)
    vm, i = inst.varmap, inst.varmap.t
    pairs3 = [(0, 1), (0, 2), (1, 2)]
    direct = unit_propagate(inst.clauses, [vm.c(u, v, i) for u, v in pairs3]
                            + [-vm.g(u, v, i) for u, v in pairs3])[0]
    # four representatives of one component, three group numbers
    inst = encode(g, 3)
    vm, i = inst.varmap, inst.varmap.t
    pairs4 = [(u, v) for u in range(4) for v in range(u + 1, 4)]
    rep = unit_propagate(inst.clauses, [vm.c(u, v, i) for u, v in pairs4]
                         + [vm.r(v, i) for v in range(4)])[0]
    ok = disagreements == 0 and not direct and rep
    assert criterion(7, ok, f"{instances} instances, {disagreements} disagreements; "
                            f"propagation conflict direct={direct} representative={rep}")


@pytest.mark.slow
def test_criterion_8_random_sweep(criterion):
    start = time.monotonic()
    points = sweep(10, p_grid(0.1), 25, seed=0)
    elapsed = time.monotonic() - start
    means = {round(p.p, 1): p.mean for p in points}
    top = max(means.values())
    argmax = [p for p, m in means.items() if m == top]
    ok = (all(p.inconclusive == 0 for p in points) and means[0.0] == 1 and means[1.0] == 2
          and all(p in (0.4, 0.5, 0.6) for p in argmax)
          and means[0.1] < top and means[0.9] < top and elapsed < SWEEP_CEILING)
    shown = " ".join(f"{p:g}:{m:.2f}" for p, m in means.items())
    assert criterion(8, ok, f"means {shown}; max at {argmax}; {elapsed:.0f}s")


def test_criterion_9_wall_clock_not_reproduced(criterion):
    # Timing columns depend on hardware and solver version; the ceilings
    # enforced in criteria 1, 3, 4 and 8 stand in for them.
    ceilings = {"named": NAMED_CEILING, "survey": SURVEY_CEILING, "sweep": SWEEP_CEILING}
    ok = all(v > 0 for v in ceilings.values())
    assert criterion(9, ok, "wall-clock tables not reproduced; runtime ceilings enforced "
                            "in criteria 1, 3, 4 and 8 instead")
