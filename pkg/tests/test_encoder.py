import itertools

import pytest

from cliquewidth.catalog import load_catalog_graph
from cliquewidth.derivation import InvariantError, is_derivation_of
from cliquewidth.encoder import (DIRECT, ENCODINGS, REPRESENTATIVE, CnfInstance, EncodingError,
                                 VarMap, decode_model, emit_dimacs, encode, expected_variables)
from cliquewidth.graph import complete_graph, cycle_graph, enumerate_connected, path_graph
from cliquewidth.solvers import parse_dimacs, solve_pysat, unit_propagate


@pytest.mark.parametrize("name,k,t,total", [("petersen", 4, 7, 1040), ("chvatal", 4, 9, 1800),
                                            ("paley-13", 8, 6, 1820)])
def test_named_variable_totals(name, k, t, total):
    g = load_catalog_graph(name)
    for enc in ENCODINGS:
        inst = encode(g, k, encoding=enc)
        assert inst.varmap.t == t
        assert inst.num_vars == total == expected_variables(g.n, k)


@pytest.mark.parametrize("enc", ENCODINGS)
def test_closed_form_for_many_sizes(enc):
    for n in range(2, 9):
        g = path_graph(n)
        for k in range(2, n + 1):
            for t in (1, n - k + 1, n):
                assert encode(g, k, t, enc).num_vars == n * (n + k - 1) * (t + 1)


@pytest.mark.parametrize("enc", ENCODINGS)
def test_variable_indices_are_a_bijection(enc):
    n, k, t = 5, 3, 3
    vm = encode(cycle_graph(n), k, t, enc).varmap
    ids = []
    for i in range(t + 1):
        for u, v in itertools.combinations(range(n), 2):
            ids += [vm.c(u, v, i), vm.g(u, v, i)]
        for v in range(n):
            if enc == DIRECT:
                ids += [vm.l(v, a, i) for a in range(1, k + 1)]
            else:
                ids.append(vm.r(v, i))
                ids += [vm.o(v, a, i) for a in range(1, k)]
    assert sorted(ids) == list(range(1, vm.total + 1))
    assert vm.describe(vm.g(1, 3, 2)) == "g[1,3,2]"
    assert vm.describe(vm.c(0, 4, 0)) == "c[0,4,0]"
    name = vm.describe(vm.l(2, 3, 1)) if enc == DIRECT else vm.describe(vm.o(2, 2, 1))
    assert name == ("l[2,3,1]" if enc == DIRECT else "o[2,2,1]")


def test_pair_index_is_symmetric_and_dense():
    vm = VarMap(6, 2)
    seen = {vm.pair(u, v) for u, v in itertools.combinations(range(6), 2)}
    assert seen == set(range(15))
    assert vm.pair(4, 1) == vm.pair(1, 4)


@pytest.mark.parametrize("enc", ENCODINGS)
def test_clause_families_in_order_and_sane(enc):
    inst = encode(load_catalog_graph("petersen"), 4, encoding=enc)
    names = [f for f, _, _ in inst.families]
    base = ["D1-D4", "transitivity", "edge", "neighborhood", "path"]
    tail = ["direct-alo", "direct-amo", "direct-link"] if enc == DIRECT else ["representative", "width"]
    assert names == base + tail
    assert sum(inst.family_counts().values()) == inst.num_clauses
    for cl in inst.clauses:
        assert cl and len({abs(x) for x in cl}) == len(cl)
        assert all(1 <= abs(x) <= inst.num_vars for x in cl)


def test_family_rejects_bad_clauses():
    inst = CnfInstance(VarMap(3, 1))
    for bad in ([()], [(1, -1)], [(1, 1)], [(99,)]):
        with pytest.raises(InvariantError):
            inst._family("bad", bad)


def test_encode_argument_errors():
    with pytest.raises(EncodingError):
        encode(path_graph(4), 2, 0)
    with pytest.raises(EncodingError):
        encode(path_graph(4), 2, encoding="unary")
    with pytest.raises(EncodingError):
        encode(path_graph(1), 1, 1)


def test_dimacs_header_and_body():
    inst = encode(path_graph(4), 3)
    text = emit_dimacs(inst, comments=["audit"])
    lines = text.splitlines()
    assert lines[0] == "c graph=path-4 n=4 k=3 t=2 enc=rep"
    assert lines[1] == "c audit"
    assert lines[2] == f"p cnf {inst.num_vars} {inst.num_clauses}"
    nv, clauses = parse_dimacs(text)
    assert nv == inst.num_vars and clauses == inst.clauses


@pytest.mark.parametrize("enc", ENCODINGS)
def test_p4_verdicts_and_decoded_derivation(enc):
    g = path_graph(4)
    assert solve_pysat(encode(g, 2, encoding=enc)).verdict == "UNSAT"
    res = solve_pysat(encode(g, 3, encoding=enc))
    assert res.verdict == "SAT"
    d = decode_model(res.model, g, 3)
    assert d.t == 2 and is_derivation_of(d, g, 3)


def test_decode_accepts_true_variable_sets():
    g = complete_graph(3)
    res = solve_pysat(encode(g, 2))
    true = {x for x in res.model if x > 0}
    assert decode_model(true, g, 2) == decode_model(res.model, g, 2)


def test_decode_rejects_non_transitive_model():
    g = path_graph(3)
    vm = VarMap(3, 2, 2, REPRESENTATIVE)
    with pytest.raises(InvariantError):
        decode_model([vm.c(0, 1, 1), vm.c(1, 2, 1)], g, 2)


def test_decoded_witnesses_for_all_small_graphs():
    for n in (3, 4, 5):
        for g in enumerate_connected(n):
            for k in range(2, n + 1):
                res = solve_pysat(encode(g, k))
                if res.verdict == "SAT":
                    assert is_derivation_of(decode_model(res.model, g, k), g, k)
                    break


def _pairs(m):
    return list(itertools.combinations(range(m), 2))


def test_direct_encoding_propagation_misses_three_groups_with_two_numbers():
    g = cycle_graph(5)
    inst = encode(g, 2, encoding=DIRECT)
    vm, i = inst.varmap, inst.varmap.t
    assume = [vm.c(u, v, i) for u, v in _pairs(3)] + [-vm.g(u, v, i) for u, v in _pairs(3)]
    conflict, _ = unit_propagate(inst.clauses, assume)
    assert not conflict
    # yet the l-clauses over u, v, w alone already have no model
    lvars = [vm.l(v, a, i) for v in range(3) for a in (1, 2)]
    touched = [cl for cl in inst.clauses if {abs(x) for x in cl} <= set(lvars) | {abs(a) for a in assume}]
    rest = [tuple(x for x in cl if -x not in assume) for cl in touched if not any(x in assume for x in cl)]
    for bits in itertools.product([False, True], repeat=len(lvars)):
        val = {v if b else -v for v, b in zip(lvars, bits)}
        assert not all(any(x in val for x in cl) for cl in rest)


def test_representative_encoding_propagation_finds_four_representatives():
    g = cycle_graph(5)
    inst = encode(g, 3)
    vm, i = inst.varmap, inst.varmap.t
    four = [vm.c(u, v, i) for u, v in _pairs(4)] + [vm.r(v, i) for v in range(4)]
    assert unit_propagate(inst.clauses, four)[0]
    three = [vm.c(u, v, i) for u, v in _pairs(3)] + [vm.r(v, i) for v in range(3)]
    assert not unit_propagate(inst.clauses, three)[0]
