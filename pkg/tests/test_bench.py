import csv
import json
import random

import pytest

from embhunter.bench import (CELL_COLUMNS, SUMMARY_COLUMNS, Cell, ExperimentConfig, MalformedCSV,
                             collect_series, emit_plot, run_cell, run_experiment, seeds_for)
from embhunter.cli import main


def tiny(tmp_path, **kw):
    base = dict(v=60, n=40, d=2, M=2, repetitions=2, output=str(tmp_path / "out"),
                swept=[20, 40, 60], algorithms=["embedded_hunter", "resoo", "sresoo"])
    base.update(kw)
    family = base.pop("family", "convergence")
    return ExperimentConfig.profile(family, "desk", **base)


def test_convergence_grid(tmp_path):
    cfg = tiny(tmp_path, repetitions=3)
    curves, results = run_experiment(cfg)
    assert len(curves) == 9
    assert all(len(c.regrets) == 3 for c in curves)
    rows = list(csv.DictReader(open(tmp_path / "out" / "cells.csv")))
    assert len(rows) == 27
    for row in rows:
        assert int(row["evaluations_used"]) == int(row["swept_value"])
        assert row["wall_time_ms"] == ""
    summary = open(tmp_path / "out" / "summary.csv").read().splitlines()
    assert summary[0] == ",".join(SUMMARY_COLUMNS) and len(summary) == 10
    meta = json.loads((tmp_path / "out" / "run.json").read_text())
    assert meta["schema_version"] == 1


def test_golden_header(tmp_path):
    run_experiment(tiny(tmp_path, repetitions=1, swept=[10]))
    header = open(tmp_path / "out" / "cells.csv").readline().strip()
    assert header == ("family,function,algorithm,swept_name,swept_value,repetition,seed,"
                      "evaluations_used,final_regret,wall_time_ms")
    assert header.split(",") == CELL_COLUMNS


def test_reruns_are_byte_identical(tmp_path):
    a = tiny(tmp_path / "a", functions=["ackley", "rosenbrock"])
    b = tiny(tmp_path / "b", functions=["ackley", "rosenbrock"])
    run_experiment(a)
    run_experiment(b)
    for name in ("cells.csv", "summary.csv"):
        assert (tmp_path / "a" / "out" / name).read_bytes() == (tmp_path / "b" / "out" / name).read_bytes()


def test_cell_results_do_not_depend_on_order(tmp_path):
    cfg = tiny(tmp_path, functions=["ackley"])
    from embhunter.bench.experiment import cells
    todo = cells(cfg)
    forward = {c: run_cell(cfg, c).final_regret for c in todo}
    shuffled = todo[:]
    random.Random(3).shuffle(shuffled)
    assert {c: run_cell(cfg, c).final_regret for c in shuffled} == forward


def test_mismatch_matches_effective_dimension_when_equal(tmp_path):
    kw = dict(d=3, swept=[3], v=80, functions=["rosenbrock"])
    mm = tiny(tmp_path, family="dimension_mismatch", **kw)
    ed = tiny(tmp_path, family="effective_dimension", **kw)
    for alg in mm.algorithms:
        for rep in range(2):
            a = run_cell(mm, Cell("dimension_mismatch", "rosenbrock", alg, 3, rep))
            b = run_cell(ed, Cell("effective_dimension", "rosenbrock", alg, 3, rep))
            assert a.final_regret == b.final_regret


def test_seeds_ignore_swept_value():
    a = Cell("convergence", "ackley", "resoo", 100, 1)
    b = Cell("convergence", "ackley", "resoo", 500, 1)
    assert seeds_for(0, a) == seeds_for(0, b)
    assert seeds_for(0, a) != seeds_for(1, a)


def test_infeasible_cells_are_skipped(tmp_path):
    cfg = tiny(tmp_path, family="dimension_mismatch", n=4, swept=[2, 8], repetitions=1,
               algorithms=["resoo"])
    _, results = run_experiment(cfg)
    assert [r.skipped for r in results] == [False, True]
    rows = list(csv.DictReader(open(tmp_path / "out" / "cells.csv")))
    assert rows[1]["final_regret"] == ""
    small_v = tiny(tmp_path, swept=[1], M=3, repetitions=1, algorithms=["resoo", "embedded_hunter"])
    _, results = run_experiment(small_v, write=False)
    assert [r.skipped for r in results] == [True, False]


def test_config_file_and_validation(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"family": "embedding_number", "v": 50, "repetitions": 1}))
    cfg = ExperimentConfig.from_file(p, output=str(tmp_path))
    assert cfg.swept_name == "M" and cfg.v == 50 and cfg.n == 1000
    p.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ValueError):
        ExperimentConfig.from_file(p)
    with pytest.raises(ValueError):
        ExperimentConfig(family="nope")
    with pytest.raises(ValueError):
        ExperimentConfig(algorithms=["nope"])


def write_cells(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CELL_COLUMNS)
        w.writerows(rows)


def row(alg, x, reg, rep=0):
    return ["convergence", "ellipsoid", alg, "v", x, rep, 1, x, reg, ""]


def test_plot_empty_input_errors(tmp_path):
    write_cells(tmp_path / "c.csv", [])
    with pytest.raises(MalformedCSV):
        emit_plot(tmp_path / "c.csv", tmp_path)


def test_plot_single_algorithm(tmp_path):
    write_cells(tmp_path / "c.csv", [row("resoo", 10, 1.0), row("resoo", 100, 0.5)])
    (path,) = emit_plot(tmp_path / "c.csv", tmp_path)
    assert path.name == "convergence_ellipsoid.svg"
    assert "resoo" in path.read_text()


def test_plot_three_algorithms_and_means(tmp_path):
    rows = [row(a, x, r + k, rep=k) for a, r in (("embedded_hunter", 0.1), ("resoo", 1.0),
                                                 ("sresoo", 2.0))
            for x in (10, 100, 1000) for k in (0, 1)]
    write_cells(tmp_path / "c.csv", rows)
    series = collect_series(tmp_path / "c.csv")
    assert series[("convergence", "ellipsoid")]["resoo"] == [(10.0, 1.5), (100.0, 1.5), (1000.0, 1.5)]
    (path,) = emit_plot(tmp_path / "c.csv", tmp_path)
    svg = path.read_text()
    for alg in ("embedded_hunter", "resoo", "sresoo"):
        assert alg in svg
    again = emit_plot(tmp_path / "c.csv", tmp_path / "again")[0]
    assert again.read_bytes() == path.read_bytes()


@pytest.mark.parametrize("rows,lineno", [
    ([row("resoo", 10, 1.0), ["convergence", "ellipsoid"]], 3),
    ([row("resoo", "ten", 1.0)], 2),
    ([row("resoo", 10, -1.0)], 2),
])
def test_plot_malformed_rows(tmp_path, rows, lineno):
    write_cells(tmp_path / "c.csv", rows)
    with pytest.raises(MalformedCSV, match=f"row {lineno}"):
        emit_plot(tmp_path / "c.csv", tmp_path)


def test_plot_bad_header(tmp_path):
    (tmp_path / "c.csv").write_text("a,b\n1,2\n")
    with pytest.raises(MalformedCSV, match="row 1"):
        collect_series(tmp_path / "c.csv")


def test_cli_run(tmp_path, capsys):
    curve, tree = tmp_path / "curve.csv", tmp_path / "tree.csv"
    assert main(["run", "-f", "ackley", "-v", "50", "--n", "30", "--d", "2",
                 "--curve", str(curve), "--tree-dump", str(tree)]) == 0
    out = capsys.readouterr().out
    assert "evaluations      50" in out
    assert len(curve.read_text().splitlines()) == 51
    assert tree.read_text().startswith("depth,index,base_point,fstar,eval_count,leaf")
    assert main(["run", "-a", "resoo", "-v", "20", "--n", "10", "--d", "2",
                 "--tree-dump", str(tree)]) == 2


def test_cli_experiment_and_plot(tmp_path, capsys):
    out = tmp_path / "exp"
    assert main(["experiment", "--family", "convergence", "--swept", "10", "30", "--n", "20",
                 "--d", "2", "--repetitions", "1", "-o", str(out), "--plot"]) == 0
    assert (out / "convergence_ellipsoid.svg").exists()
    assert main(["plot", str(out / "cells.csv"), "-o", str(tmp_path / "p")]) == 0
    assert "wrote" in capsys.readouterr().out


def test_cli_theory_check(tmp_path, capsys):
    rc = main(["theory-check", "--trials", "200", "--lipschitz-samples", "2000",
               "-o", str(tmp_path / "t.csv")])
    out = capsys.readouterr().out
    assert rc == 0 and out.count("[PASS]") == 9
    assert (tmp_path / "t.csv").read_text().startswith("name,")
