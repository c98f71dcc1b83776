import json
import random
import re

import pytest

from cliquewidth.catalog import load_catalog_graph
from cliquewidth.derivation import make_strict
from cliquewidth.graph import (Graph, complete_graph, cycle_graph, empty_graph, enumerate_connected,
                               parse_graph6, path_graph, petersen_graph, prism_graph, to_graph6)
from cliquewidth.kexpr import derivation_to_expr, evaluate, expr_to_derivation, parse_expr
from cliquewidth.oracle import oracle_cwd
from cliquewidth.search import (BOUND_ONLY, CERT_FORMAT, STRATEGIES, Certificate, SearchOptions,
                                clique_width, decide_width_at_most, preprocess,
                                strategy_schedule, verify_certificate)
from cliquewidth.solvers import SolverConfig


def test_p4_decisions():
    assert decide_width_at_most(path_graph(4), 2).verdict == "UNSAT"
    res = decide_width_at_most(path_graph(4), 3)
    assert res.verdict == "SAT" and res.derivation.width() <= 3


def test_prism_decisions():
    g = prism_graph(3)
    assert decide_width_at_most(g, 3).verdict == "UNSAT"
    assert decide_width_at_most(g, 4).verdict == "SAT"


def test_short_t_unsat_is_bound_only():
    res = decide_width_at_most(path_graph(6), 3, t=1)
    assert res.verdict == "UNSAT" and res.probe.tag == BOUND_ONLY and res.bound_only
    assert not decide_width_at_most(path_graph(4), 2).bound_only


def test_decide_rejects_k_out_of_range():
    with pytest.raises(ValueError):
        decide_width_at_most(path_graph(4), 1)
    with pytest.raises(ValueError):
        decide_width_at_most(path_graph(4), 5)


@pytest.mark.parametrize("g,cwd", [(Graph.from_edges(1, []), 1), (empty_graph(7), 1),
                                   (complete_graph(5), 2), (path_graph(4), 3),
                                   (cycle_graph(4), 2), (cycle_graph(5), 3), (prism_graph(3), 4),
                                   (petersen_graph(), 5)])
def test_clique_width_values(g, cwd):
    cert = clique_width(g)
    assert cert.exact and cert.cwd == cwd
    assert all(v == "ok" for v in cert.transcript.values())


def test_disconnected_graph_takes_the_maximum():
    g = Graph.from_edges(9, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7), (7, 8), (8, 4)])
    cert = clique_width(g)
    assert cert.cwd == 3
    assert cert.reductions[0]["kind"] == "component-split"
    assert verify_certificate(Certificate.from_json(cert.to_json()), g).ok


def test_preprocess_examples():
    h, kept, trace = preprocess(complete_graph(4))
    assert h.n == 2 and len(trace.steps) == 2
    assert clique_width(complete_graph(4)).cwd == 2
    h, kept, trace = preprocess(cycle_graph(4))
    assert h.n == 2 and {s.kind for s in trace.steps} == {"false-twin"}
    cert = clique_width(cycle_graph(4))
    assert cert.cwd == 2 and [r["kind"] for r in cert.reductions] == ["false-twin", "false-twin"]
    h, kept, trace = preprocess(path_graph(4))
    assert h.n == 4 and not trace.steps and kept == [0, 1, 2, 3]


def test_universal_vertex_reduction():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3)] + [(4, v) for v in range(4)])
    _, _, trace = preprocess(g)
    assert trace.steps[0].kind == "universal" and trace.steps[0].vertex == "4"
    assert clique_width(g).cwd == 3


def test_strategy_schedules():
    assert strategy_schedule(10, (2, 10), "up") == [2]
    assert strategy_schedule(10, (2, 10), "down") == [9]
    assert strategy_schedule(10, (2, 10), "down", width=3) == [9, 8, 7]
    assert strategy_schedule(10, (2, 10), "binary") == [6]
    assert strategy_schedule(10, (5, 5), "binary") == []
    with pytest.raises(ValueError):
        strategy_schedule(10, (2, 10), "sideways")


def test_up_probes_on_p4():
    cert = clique_width(path_graph(4), SearchOptions(strategy="up"))
    assert [(p["k"], p["verdict"]) for p in cert.probes] == [(2, "UNSAT"), (3, "SAT")]


def test_binary_probe_count_on_ten_vertices():
    cert = clique_width(petersen_graph(), SearchOptions(strategy="binary"))
    assert cert.cwd == 5 and len(cert.probes) <= 4


@pytest.mark.parametrize("parallel", [1, 3])
def test_strategies_agree_on_small_graphs(parallel):
    for n in (2, 3, 4, 5):
        for g in enumerate_connected(n):
            got = {s: clique_width(g, SearchOptions(strategy=s, parallel=parallel)).cwd
                   for s in STRATEGIES}
            assert len(set(got.values())) == 1, (g.sorted_edges(), got)


def test_reductions_do_not_change_the_answer():
    rnd = random.Random(3)
    for g in rnd.sample(list(enumerate_connected(6)), 30):
        want = oracle_cwd(g)
        assert clique_width(g).cwd == want
        assert clique_width(g, SearchOptions(reductions=False)).cwd == want


def test_search_options_validation():
    with pytest.raises(ValueError):
        SearchOptions(encoding="unary")
    with pytest.raises(ValueError):
        SearchOptions(strategy="sideways")
    with pytest.raises(ValueError):
        SearchOptions(timeout=0)
    with pytest.raises(ValueError):
        SearchOptions(parallel=0)


def test_certificate_round_trip_and_schema():
    cert = clique_width(petersen_graph())
    data = json.loads(cert.to_json())
    assert data["format"] == CERT_FORMAT and data["version"] == 1
    back = Certificate.from_json(cert.to_json())
    assert back == cert
    rep = verify_certificate(back, petersen_graph())
    assert rep.ok
    ev = back.unsat_evidence[0]
    assert (ev["k"], ev["t"], ev["verdict"]) == (4, 7, "UNSAT")
    e = parse_expr(back.expression)
    assert evaluate(e).underlying() == petersen_graph()
    assert verify_certificate(back, resolve=SolverConfig("glucose")).ok


def test_tampered_graph_fails():
    cert = clique_width(cycle_graph(5))
    g = cycle_graph(5)
    smaller = Graph.from_edges(5, sorted(g.edges)[1:])
    cert.graph6 = to_graph6(smaller)
    cert.m = smaller.m
    rep = verify_certificate(cert, g)
    assert not rep.ok and rep.transcript()["graph"] != "ok"
    rep = verify_certificate(cert)
    assert not rep.ok and rep.transcript()["verify_expression"] != "ok"


def test_tampered_label_fails():
    cert = clique_width(path_graph(4))
    cert.expression = re.sub(r"\d+\((\w+)\)", r"9(\1)", cert.expression, count=1)
    rep = verify_certificate(cert)
    assert not rep.ok and rep.transcript()["verify_expression"] != "ok"


def test_tampered_bounds_fail():
    cert = clique_width(path_graph(4))
    cert.unsat_evidence = []
    assert verify_certificate(cert).transcript()["lower-bound"] != "ok"
    cert = clique_width(path_graph(4))
    cert.cwd = cert.lower = cert.upper = 2
    assert not verify_certificate(cert).ok


def test_wrong_format_is_rejected():
    with pytest.raises(ValueError):
        Certificate.from_dict({"format": "other"})
    with pytest.raises(ValueError):
        Certificate.from_dict({"format": CERT_FORMAT, "version": 99})


def test_timeout_gives_inconclusive_bounds():
    g = load_catalog_graph("clebsch")
    cert = clique_width(g, SearchOptions(strategy="up", solver=SolverConfig("glucose", timeout=0.2)))
    if cert.exact:
        pytest.skip("solver finished within the tiny timeout")
    assert cert.cwd is None and cert.lower < cert.upper
    assert verify_certificate(Certificate.from_json(cert.to_json()), g).ok


def test_witness_pipeline_reproduces_graph():
    for g in enumerate_connected(5):
        res = decide_width_at_most(g, 4)
        d = make_strict(res.derivation, g)
        e = derivation_to_expr(d, g)
        assert evaluate(e).underlying() == g
        assert parse_graph6(to_graph6(g)) == g
        assert expr_to_derivation(e).width() <= 4
