import io

import pytest

from cliquewidth.experiments import (SURVEY_SCHEMA, SWEEP_SCHEMA, TABLE_SCHEMA, SurveyRow,
                                     canonical_widest, named_table, p_grid, read_graph6_stream,
                                     sample_seed, survey, sweep, to_csv_text, write_survey_csv,
                                     write_sweep_csv, write_table_csv)
from cliquewidth.graph import canonical_form, enumerate_connected, prism_graph, to_graph6


@pytest.mark.parametrize("n,connected,prime,widths", [(4, 6, 1, {3: 1}), (5, 21, 4, {3: 4})])
def test_survey_small(n, connected, prime, widths):
    row = survey(n)
    assert (row.connected, row.prime, row.widths, row.inconclusive) == (connected, prime, widths, 0)


def test_survey_six_has_prism_as_only_width_four():
    row = survey(6)
    assert (row.connected, row.prime, row.widths) == (112, 26, {3: 25, 4: 1})
    assert canonical_widest(row) == [canonical_form(prism_graph(3))]


def test_survey_from_stream_and_workers():
    text = "# comment\n" + "\n".join(to_graph6(g) for g in enumerate_connected(5)) + "\n"
    row = survey(graphs=read_graph6_stream(io.StringIO(text)), workers=2)
    assert (row.n, row.connected, row.prime, row.widths) == (5, 21, 4, {3: 4})


def test_survey_rejects_wrong_sizes():
    with pytest.raises(ValueError):
        survey(5, graphs=iter(enumerate_connected(4)))
    with pytest.raises(ValueError):
        survey()


def test_survey_row_check():
    with pytest.raises(AssertionError):
        SurveyRow(4, connected=6, prime=1, widths={3: 2}).check()


def test_survey_csv_schema():
    text = to_csv_text(write_survey_csv, [survey(4), survey(5)], {"solver": "glucose"})
    lines = text.splitlines()
    assert lines[0] == f"# schema={SURVEY_SCHEMA} solver=glucose"
    assert lines[1] == "n,connected,prime,cw2,cw3,inconclusive,widest_graph6"
    assert lines[2].startswith("4,6,1,0,1,0,")


def test_sample_seeds_are_distinct():
    seeds = {sample_seed(0, j, s) for j in range(11) for s in range(25)}
    assert len(seeds) == 275


def test_p_grid():
    assert p_grid(0.1) == [round(x / 10, 10) for x in range(11)]
    assert p_grid(0.5) == [0.0, 0.5, 1.0]
    for bad in (0, 0.3, 2):
        with pytest.raises(ValueError):
            p_grid(bad)


def test_sweep_is_deterministic_with_exact_endpoints():
    a = sweep(7, [0.0, 0.5, 1.0], 4, seed=11)
    b = sweep(7, [0.0, 0.5, 1.0], 4, seed=11)
    assert [p.values for p in a] == [p.values for p in b]
    assert a[0].mean == 1 and a[0].stddev == 0
    assert a[2].mean == 2
    text = to_csv_text(write_sweep_csv, a, {"seed": 11})
    assert text.splitlines()[0].startswith(f"# schema={SWEEP_SCHEMA} prng=")
    assert text.splitlines()[1] == "n,p,samples,solved,inconclusive,mean,stddev,seed_base"
    with pytest.raises(ValueError):
        sweep(7, [0.5], 0)


def test_named_table():
    rows = named_table(["petersen"])
    r = rows[0]
    assert (r.n, r.m, r.cwd, r.reference_cwd) == (10, 15, 5, 5)
    assert r.variables == 1040
    text = to_csv_text(write_table_csv, rows)
    assert text.splitlines()[0] == f"# schema={TABLE_SCHEMA}"
    assert text.splitlines()[2].startswith("petersen,10,15,5,5,5,5,1040,")
